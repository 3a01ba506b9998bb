//! Emits synthetic planted graphs in the monolith file format so the full
//! pipeline can run end to end on generated data. Blocks become
//! pseudo-entrypoints: each node joins the trace of the block whose
//! attribute pattern it carries, so planted attribute outliers land in a
//! foreign trace.

use cogcn::synth::{PlantedGraph, PlantedSpec};
use serde_json::{json, Value};

fn class_name(i: usize) -> String {
    format!("C{i:03}")
}

/// Index of the block whose attribute columns dominate this node's row.
fn pattern_block(graph: &PlantedGraph, spec: &PlantedSpec, node: usize) -> usize {
    let row = graph.attributes.row(node);
    (0..spec.blocks)
        .max_by(|&a, &b| {
            let sum = |block: usize| -> f64 {
                row[block * spec.attr_dim_per_block..(block + 1) * spec.attr_dim_per_block]
                    .iter()
                    .sum()
            };
            sum(a).total_cmp(&sum(b))
        })
        .unwrap_or(0)
}

/// Serializes the planted graph as a monolith description. Each undirected
/// edge appears once (callers run with symmetrization on).
pub fn planted_monolith_json(spec: &PlantedSpec, graph: &PlantedGraph) -> String {
    let n = graph.node_count();
    let classes: Vec<Value> = (0..n).map(|i| Value::String(class_name(i))).collect();
    let mut calls = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if graph.adjacency.get(i, j) != 0.0 {
                calls.push(json!([class_name(i), class_name(j)]));
            }
        }
    }
    let mut entrypoints = serde_json::Map::new();
    for block in 0..spec.blocks {
        let members: Vec<Value> = (0..n)
            .filter(|&i| pattern_block(graph, spec, i) == block)
            .map(|i| Value::String(class_name(i)))
            .collect();
        entrypoints.insert(format!("block{block}"), Value::Array(members));
    }
    let doc = json!({
        "classes": classes,
        "calls": calls,
        "inheritance": [],
        "entrypoints": entrypoints,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("fixture serializes");
    text.push('\n');
    text
}
