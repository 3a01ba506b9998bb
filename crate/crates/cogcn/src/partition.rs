//! Cluster assignments shared between the trainer (where they play the role
//! of the one-hot assignment matrix) and the metrics module.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::DenseMatrix;

/// Maps every node to a cluster id in `[0, cluster_count)`. Empty clusters
/// are permitted; they still count toward `cluster_count` when metrics
/// average per cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    cluster_count: usize,
}

impl Partition {
    /// Panics if any label is out of range or `cluster_count` is zero.
    pub fn new(labels: Vec<usize>, cluster_count: usize) -> Self {
        assert!(cluster_count > 0, "cluster count must be positive");
        for (i, &l) in labels.iter().enumerate() {
            assert!(
                l < cluster_count,
                "node {i} assigned to cluster {l} out of {cluster_count}"
            );
        }
        Partition {
            labels,
            cluster_count,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }

    /// Node count per cluster, indexed by cluster id.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.cluster_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |&(_, &l)| l == cluster)
            .map(|(i, _)| i)
    }

    /// The assignment as a binary one-hot matrix (|V| x K), row i carrying a
    /// single 1 in the column of node i's cluster.
    pub fn to_onehot(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.labels.len(), self.cluster_count);
        for (i, &l) in self.labels.iter().enumerate() {
            m.set(i, l, 1.0);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_count_members() {
        let p = Partition::new(vec![0, 1, 1, 2, 1], 4);
        assert_eq!(p.sizes(), vec![1, 3, 1, 0]);
        assert_eq!(p.members(1).collect::<Vec<_>>(), vec![1, 2, 4]);
    }

    #[test]
    fn onehot_rows_sum_to_one() {
        let p = Partition::new(vec![2, 0, 1], 3);
        let m = p.to_onehot();
        for i in 0..3 {
            assert_eq!(m.row(i).iter().sum::<f64>(), 1.0);
            assert_eq!(m.get(i, p.label(i)), 1.0);
        }
    }

    #[test]
    #[should_panic(expected = "out of")]
    fn out_of_range_label_panics() {
        let _ = Partition::new(vec![0, 3], 3);
    }
}
