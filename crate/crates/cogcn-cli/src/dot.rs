//! Graphviz DOT rendering: one subgraph cluster per candidate microservice,
//! intra-cluster edges inside their cluster block, inter-cluster edges drawn
//! across, and ranked outliers flagged in red.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use cogcn::graph::AppGraph;
use cogcn::partition::Partition;
use cogcn::trainer::OutlierEntry;

fn quoted(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the clustered call graph as DOT text.
pub fn export_dot(graph: &AppGraph, assignment: &Partition, outliers: &[OutlierEntry]) -> String {
    let flagged: BTreeSet<usize> = outliers.iter().map(|e| e.node).collect();
    let names = graph.node_names();
    let a = graph.adjacency();
    let mut out = String::new();
    out.push_str("digraph microservices {\n");
    out.push_str("  node [shape=box];\n");

    for cluster in 0..assignment.cluster_count() {
        let members: Vec<usize> = assignment.members(cluster).collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(out, "  subgraph cluster_{cluster} {{");
        let _ = writeln!(out, "    label=\"service_{cluster}\";");
        for &m in &members {
            if flagged.contains(&m) {
                let _ = writeln!(out, "    {} [color=red, penwidth=2.0];", quoted(&names[m]));
            } else {
                let _ = writeln!(out, "    {};", quoted(&names[m]));
            }
        }
        for &i in &members {
            for &j in &members {
                if a.get(i, j) != 0.0 {
                    let _ = writeln!(out, "    {} -> {};", quoted(&names[i]), quoted(&names[j]));
                }
            }
        }
        out.push_str("  }\n");
    }

    for i in 0..graph.node_count() {
        for j in 0..graph.node_count() {
            if a.get(i, j) != 0.0 && assignment.label(i) != assignment.label(j) {
                let _ = writeln!(out, "  {} -> {};", quoted(&names[i]), quoted(&names[j]));
            }
        }
    }
    out.push_str("}\n");
    out
}
