//! Planted-partition generators with injected structural and attribute
//! outliers, plus the adjusted Rand index used as the recovery oracle.
//!
//! Structural outliers keep their block label but get rewired to connect
//! uniformly across all blocks; attribute outliers keep their edges but
//! carry the attribute pattern of a different block.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::DenseMatrix;
use crate::rng::SplitMix64;
use crate::trainer::OutlierKind;

/// Parameters of a planted graph.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedSpec {
    pub blocks: usize,
    pub nodes_per_block: usize,
    /// Intra-block edge probability.
    pub p_in: f64,
    /// Inter-block edge probability; must stay below `p_in`.
    pub p_out: f64,
    pub structural_outliers: usize,
    pub attribute_outliers: usize,
    pub attr_dim_per_block: usize,
    pub seed: u64,
}

impl Default for PlantedSpec {
    fn default() -> Self {
        PlantedSpec {
            blocks: 4,
            nodes_per_block: 15,
            p_in: 0.3,
            p_out: 0.02,
            structural_outliers: 3,
            attribute_outliers: 3,
            attr_dim_per_block: 8,
            seed: 0,
        }
    }
}

/// A generated graph together with its ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedGraph {
    /// Symmetric binary adjacency, zero diagonal.
    pub adjacency: DenseMatrix,
    /// Row-normalized attributes, width `blocks * attr_dim_per_block`.
    pub attributes: DenseMatrix,
    /// Planted block label per node.
    pub labels: Vec<usize>,
    /// Injected outliers with their kind, in injection order.
    pub outliers: Vec<(usize, OutlierKind)>,
}

impl PlantedGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn outlier_nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self.outliers.iter().map(|&(n, _)| n).collect();
        nodes.sort_unstable();
        nodes
    }
}

/// Samples a planted graph. Deterministic for a fixed spec.
pub fn planted_graph(spec: &PlantedSpec) -> PlantedGraph {
    assert!(spec.blocks > 0 && spec.nodes_per_block > 0, "empty spec");
    assert!(
        0.0 <= spec.p_out && spec.p_out < spec.p_in && spec.p_in <= 1.0,
        "need 0 <= p_out < p_in <= 1"
    );
    let n = spec.blocks * spec.nodes_per_block;
    assert!(
        spec.structural_outliers + spec.attribute_outliers <= n,
        "more outliers than nodes"
    );
    assert!(spec.attr_dim_per_block > 0, "attribute block width");

    let mut rng = SplitMix64::new(spec.seed);
    let labels: Vec<usize> = (0..n).map(|i| i / spec.nodes_per_block).collect();

    let mut adjacency = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] {
                spec.p_in
            } else {
                spec.p_out
            };
            if rng.next_bool(p) {
                adjacency.set(i, j, 1.0);
                adjacency.set(j, i, 1.0);
            }
        }
    }

    // Fisher-Yates over the node ids; the prefix becomes the outlier set.
    let mut shuffled: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.next_below(i + 1);
        shuffled.swap(i, j);
    }
    let structural: Vec<usize> = shuffled[..spec.structural_outliers].to_vec();
    let attribute: Vec<usize> = shuffled
        [spec.structural_outliers..spec.structural_outliers + spec.attribute_outliers]
        .to_vec();

    // Rewire structural outliers: drop their edges, then connect uniformly
    // across all blocks at the intra-block rate. Most of their edges then
    // cross blocks and their degree is visibly elevated, the god-class
    // profile that makes a node structurally odd.
    let p_uniform = spec.p_in;
    for &node in &structural {
        for j in 0..n {
            adjacency.set(node, j, 0.0);
            adjacency.set(j, node, 0.0);
        }
        for j in 0..n {
            if j != node && rng.next_bool(p_uniform) {
                adjacency.set(node, j, 1.0);
                adjacency.set(j, node, 1.0);
            }
        }
    }

    // Attribute rows: ones over the pattern block's columns, small uniform
    // noise everywhere, then L1 row normalization. Attribute outliers draw
    // their pattern from a different block.
    let width = spec.blocks * spec.attr_dim_per_block;
    let mut attributes = DenseMatrix::zeros(n, width);
    let mut pattern: Vec<usize> = labels.clone();
    for &node in &attribute {
        if spec.blocks > 1 {
            let shift = 1 + rng.next_below(spec.blocks - 1);
            pattern[node] = (labels[node] + shift) % spec.blocks;
        }
    }
    for (i, &pat) in pattern.iter().enumerate() {
        let row = attributes.row_mut(i);
        let start = pat * spec.attr_dim_per_block;
        for v in &mut row[start..start + spec.attr_dim_per_block] {
            *v = 1.0;
        }
        for v in row.iter_mut() {
            *v += rng.next_range(0.0, 0.05);
        }
        let sum: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= sum;
        }
    }

    let mut outliers: Vec<(usize, OutlierKind)> = structural
        .into_iter()
        .map(|o| (o, OutlierKind::Structural))
        .collect();
    outliers.extend(attribute.into_iter().map(|o| (o, OutlierKind::Attribute)));

    PlantedGraph {
        adjacency,
        attributes,
        labels,
        outliers,
    }
}

/// Adjusted Rand index between two labelings of the same nodes, from the
/// pair-counting contingency table. Degenerate cases where the index is
/// undefined (both labelings trivial) score 1.
pub fn adjusted_rand_index(labels_a: &[usize], labels_b: &[usize]) -> f64 {
    assert_eq!(labels_a.len(), labels_b.len(), "labelings must align");
    let n = labels_a.len();
    if n < 2 {
        return 1.0;
    }
    let ka = labels_a.iter().max().map_or(0, |&m| m + 1);
    let kb = labels_b.iter().max().map_or(0, |&m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&a, &b) in labels_a.iter().zip(labels_b) {
        table[a][b] += 1;
    }
    let comb2 = |x: u64| (x * x.saturating_sub(1) / 2) as f64;
    let sum_cells: f64 = table.iter().flatten().map(|&c| comb2(c)).sum();
    let sum_rows: f64 = table.iter().map(|r| comb2(r.iter().sum())).sum();
    let sum_cols: f64 = (0..kb)
        .map(|b| comb2(table.iter().map(|r| r[b]).sum()))
        .sum();
    let total_pairs = comb2(n as u64);
    let expected = sum_rows * sum_cols / total_pairs;
    let max_index = 0.5 * (sum_rows + sum_cols);
    let denom = max_index - expected;
    if denom.abs() < 1e-12 {
        return 1.0;
    }
    (sum_cells - expected) / denom
}
