//! Conversion of a monolith description (classes, calls, inheritance pairs
//! and per-entrypoint execution traces) into the attributed graph the model
//! trains on.
//!
//! Nodes are classes. A directed edge i -> j exists when some method of
//! class i calls a method of class j; multiple calls collapse to one edge.
//! Inheritance never becomes an edge, only an attribute. The attribute
//! matrix is the column-wise concatenation `[EP | Co | In]`:
//!
//! * `EP(i,p) = 1` iff class i appears in the execution trace of
//!   entrypoint p,
//! * `Co(i,j)` = number of traces containing both i and j (the diagonal
//!   counts traces containing i),
//! * `In(i,j) = In(j,i) = 1` iff i and j are related by inheritance.
//!
//! Each block is L1 row-normalized individually (zero rows stay zero), so
//! the attribute width is `F = |P| + 2|V|`. Classes that appear in no
//! trace are pruned before anything else is built.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::DenseMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    /// A call, inheritance pair or trace references a class that is not in
    /// the class list.
    UnknownClass { name: String, context: &'static str },
    /// A class cannot inherit from itself.
    SelfInheritance { name: String },
    /// Pruning removed every node (no class appears in any trace).
    EmptyGraph,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownClass { name, context } => {
                write!(f, "unknown class {name:?} referenced in {context}")
            }
            GraphError::SelfInheritance { name } => {
                write!(f, "class {name:?} listed as inheriting from itself")
            }
            GraphError::EmptyGraph => {
                write!(
                    f,
                    "no class appears in any entrypoint trace; graph is empty"
                )
            }
        }
    }
}

/// Validated monolith description. Class order fixes node indices;
/// entrypoint names are kept sorted so their order fixes attribute columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawMonolith {
    classes: Vec<String>,
    calls: Vec<(usize, usize)>,
    inheritance: Vec<(usize, usize)>,
    entrypoint_traces: BTreeMap<String, BTreeSet<usize>>,
}

impl RawMonolith {
    /// Validates and normalizes the description: duplicate class names and
    /// duplicate call/inheritance pairs collapse, every referenced name must
    /// be declared, and self-inheritance is rejected.
    pub fn new(
        classes: Vec<String>,
        calls: &[(String, String)],
        inheritance: &[(String, String)],
        entrypoint_traces: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut unique = Vec::with_capacity(classes.len());
        for c in classes {
            if seen.insert(c.clone()) {
                unique.push(c);
            }
        }
        let index: BTreeMap<&str, usize> = unique
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let resolve = |name: &str, context: &'static str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownClass {
                    name: String::from(name),
                    context,
                })
        };

        let mut call_set = BTreeSet::new();
        for (from, to) in calls {
            call_set.insert((resolve(from, "calls")?, resolve(to, "calls")?));
        }

        let mut inherit_set = BTreeSet::new();
        for (a, b) in inheritance {
            let ia = resolve(a, "inheritance")?;
            let ib = resolve(b, "inheritance")?;
            if ia == ib {
                return Err(GraphError::SelfInheritance { name: a.clone() });
            }
            inherit_set.insert((ia.min(ib), ia.max(ib)));
        }

        let mut traces = BTreeMap::new();
        for (ep, members) in entrypoint_traces {
            let mut set = BTreeSet::new();
            for m in members {
                set.insert(resolve(m, "entrypoint traces")?);
            }
            traces.insert(ep.clone(), set);
        }

        Ok(RawMonolith {
            classes: unique,
            calls: call_set.into_iter().collect(),
            inheritance: inherit_set.into_iter().collect(),
            entrypoint_traces: traces,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn call_count(&self) -> usize {
        self.calls.len()
    }

    pub fn entrypoint_count(&self) -> usize {
        self.entrypoint_traces.len()
    }

    /// Drops every class that appears in no entrypoint trace, along with
    /// calls and inheritance pairs touching it. Relative order of the
    /// survivors is preserved. Idempotent.
    pub fn prune_untraced(&self) -> Result<RawMonolith, GraphError> {
        let mut traced = BTreeSet::new();
        for set in self.entrypoint_traces.values() {
            traced.extend(set.iter().copied());
        }
        if traced.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut remap = BTreeMap::new();
        let mut classes = Vec::with_capacity(traced.len());
        for (old, name) in self.classes.iter().enumerate() {
            if traced.contains(&old) {
                remap.insert(old, classes.len());
                classes.push(name.clone());
            }
        }
        let remap_pair = |&(a, b): &(usize, usize)| Some((*remap.get(&a)?, *remap.get(&b)?));
        Ok(RawMonolith {
            classes,
            calls: self.calls.iter().filter_map(remap_pair).collect(),
            inheritance: self.inheritance.iter().filter_map(remap_pair).collect(),
            entrypoint_traces: self
                .entrypoint_traces
                .iter()
                .map(|(ep, set)| {
                    (
                        ep.clone(),
                        set.iter().map(|old| remap[old]).collect::<BTreeSet<_>>(),
                    )
                })
                .collect(),
        })
    }
}

/// The three attribute blocks before row normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeBlocks {
    /// |V| x |P| trace membership indicators.
    pub entrypoint: DenseMatrix,
    /// |V| x |V| trace co-occurrence counts.
    pub co_occurrence: DenseMatrix,
    /// |V| x |V| symmetric inheritance indicators, zero diagonal.
    pub inheritance: DenseMatrix,
}

/// Directed binary adjacency over the monolith's (pruned) class order.
/// Inheritance pairs are deliberately not edges.
pub fn build_adjacency(raw: &RawMonolith) -> DenseMatrix {
    let n = raw.classes.len();
    let mut a = DenseMatrix::zeros(n, n);
    for &(from, to) in &raw.calls {
        if from != to {
            a.set(from, to, 1.0);
        }
    }
    a
}

/// Builds the EP, Co and In blocks over fixed node and entrypoint orderings.
pub fn build_attribute_blocks(raw: &RawMonolith) -> AttributeBlocks {
    let n = raw.classes.len();
    let p = raw.entrypoint_traces.len();
    let mut ep = DenseMatrix::zeros(n, p);
    let mut co = DenseMatrix::zeros(n, n);
    for (col, set) in raw.entrypoint_traces.values().enumerate() {
        for &i in set {
            ep.set(i, col, 1.0);
            for &j in set {
                co.set(i, j, co.get(i, j) + 1.0);
            }
        }
    }
    let mut inh = DenseMatrix::zeros(n, n);
    for &(a, b) in &raw.inheritance {
        inh.set(a, b, 1.0);
        inh.set(b, a, 1.0);
    }
    AttributeBlocks {
        entrypoint: ep,
        co_occurrence: co,
        inheritance: inh,
    }
}

/// L1-normalizes each row of each block individually (rows summing to zero
/// stay zero) and concatenates the blocks column-wise into `[EP | Co | In]`.
pub fn assemble_attributes(blocks: &AttributeBlocks) -> DenseMatrix {
    let n = blocks.entrypoint.rows();
    assert_eq!(blocks.co_occurrence.rows(), n, "row count mismatch");
    assert_eq!(blocks.inheritance.rows(), n, "row count mismatch");
    let width = blocks.entrypoint.cols() + blocks.co_occurrence.cols() + blocks.inheritance.cols();
    let mut x = DenseMatrix::zeros(n, width);
    for i in 0..n {
        let mut offset = 0;
        for block in [
            &blocks.entrypoint,
            &blocks.co_occurrence,
            &blocks.inheritance,
        ] {
            let row = block.row(i);
            let sum: f64 = row.iter().sum();
            let out = x.row_mut(i);
            if sum > 0.0 {
                for (j, &v) in row.iter().enumerate() {
                    out[offset + j] = v / sum;
                }
            }
            offset += block.cols();
        }
    }
    x
}

/// Element-wise `max(A, A^T)`: keeps an undirected edge wherever a call
/// exists in either direction.
pub fn symmetrize_adjacency(a: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.rows(), a.cols(), "adjacency must be square");
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.get(i, j).max(a.get(j, i));
            out.set(i, j, v);
        }
    }
    out
}

/// Propagation matrix for graph convolutions: with `A~ = A + I` and degree
/// diagonal `D~`, returns `D~^(-1/2) A~ D~^(-1/2)`. With `symmetrize` set
/// (the default reading), A is first replaced by `max(A, A^T)`. The added
/// identity keeps every degree at least 1, so no division by zero occurs.
pub fn normalize_adjacency(a: &DenseMatrix, symmetrize: bool) -> DenseMatrix {
    assert_eq!(a.rows(), a.cols(), "adjacency must be square");
    let n = a.rows();
    let base = if symmetrize {
        symmetrize_adjacency(a)
    } else {
        a.clone()
    };
    let mut tilde = base;
    for i in 0..n {
        tilde.set(i, i, tilde.get(i, i) + 1.0);
    }
    let degrees: Vec<f64> = (0..n).map(|i| tilde.row(i).iter().sum::<f64>()).collect();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = tilde.get(i, j);
            if v != 0.0 {
                out.set(i, j, v / libm::sqrt(degrees[i] * degrees[j]));
            }
        }
    }
    out
}

/// The assembled attributed graph: node identities, directed adjacency and
/// the normalized attribute matrix with its constituent blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct AppGraph {
    node_names: Vec<String>,
    entrypoint_names: Vec<String>,
    adjacency: DenseMatrix,
    blocks: AttributeBlocks,
    attributes: DenseMatrix,
}

impl AppGraph {
    /// Prunes untraced classes, then assembles adjacency and attributes.
    pub fn build(raw: &RawMonolith) -> Result<AppGraph, GraphError> {
        let pruned = raw.prune_untraced()?;
        let adjacency = build_adjacency(&pruned);
        let blocks = build_attribute_blocks(&pruned);
        let attributes = assemble_attributes(&blocks);
        Ok(AppGraph {
            node_names: pruned.classes.clone(),
            entrypoint_names: pruned.entrypoint_traces.keys().cloned().collect(),
            adjacency,
            blocks,
            attributes,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn entrypoint_names(&self) -> &[String] {
        &self.entrypoint_names
    }

    /// Directed binary adjacency (original call direction).
    pub fn adjacency(&self) -> &DenseMatrix {
        &self.adjacency
    }

    pub fn blocks(&self) -> &AttributeBlocks {
        &self.blocks
    }

    /// Row-normalized `[EP | Co | In]`, width `|P| + 2|V|`.
    pub fn attributes(&self) -> &DenseMatrix {
        &self.attributes
    }

    pub fn symmetrized_adjacency(&self) -> DenseMatrix {
        symmetrize_adjacency(&self.adjacency)
    }

    pub fn propagation_matrix(&self, symmetrize: bool) -> DenseMatrix {
        normalize_adjacency(&self.adjacency, symmetrize)
    }
}
