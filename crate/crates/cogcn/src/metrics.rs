//! Partition quality metrics: Newman modularity, structural modularity,
//! 1-NED (share of nodes in extreme-size clusters) and IFN (average number
//! of published interfaces per cluster).
//!
//! Modularity and structural modularity read the graph as undirected, so
//! they expect a symmetrized adjacency; IFN counts "referenced from another
//! cluster" and therefore works on the original call direction.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::symmetrize_adjacency;
use crate::matrix::DenseMatrix;
use crate::partition::Partition;

/// Default bounds of a non-extreme cluster size.
pub const NED_LOWER: usize = 5;
pub const NED_UPPER: usize = 20;

/// Per-cluster counters backing the aggregate metrics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClusterStats {
    pub size: usize,
    /// Undirected edges lying entirely inside the cluster (u_k).
    pub intra_edges: usize,
    /// Classes referenced by a class from a different cluster (ifn_k).
    pub interfaces: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub modularity: f64,
    pub structural_modularity: f64,
    pub one_minus_ned: f64,
    pub ifn: f64,
    pub per_cluster: Vec<ClusterStats>,
}

/// Newman modularity `Q = (1/2m) sum_ij (A_ij - k_i k_j / 2m) d(c_i, c_j)`
/// on a symmetrized binary adjacency. An edgeless graph has Q = 0.
pub fn modularity(a_sym: &DenseMatrix, partition: &Partition) -> f64 {
    let n = a_sym.rows();
    assert_eq!(a_sym.cols(), n, "adjacency must be square");
    assert_eq!(partition.len(), n, "one label per node");
    let k = partition.cluster_count();

    let two_m: f64 = a_sym.data().iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    // Q = sum_c (l_c / m - (d_c / 2m)^2) over communities.
    let mut intra = vec![0.0f64; k];
    let mut degree = vec![0.0f64; k];
    for i in 0..n {
        let ci = partition.label(i);
        for j in 0..n {
            let w = a_sym.get(i, j);
            if w == 0.0 {
                continue;
            }
            degree[ci] += w;
            if ci == partition.label(j) {
                intra[ci] += w;
            }
        }
    }
    (0..k)
        .map(|c| intra[c] / two_m - (degree[c] / two_m) * (degree[c] / two_m))
        .sum()
}

/// Structural modularity: mean intra-cluster edge density `u_k / N_k^2`
/// minus mean pairwise coupling `sigma / (2 N_k1 N_k2)`. Undirected edges
/// count once; clusters of size zero contribute zero to either term; with
/// K = 1 the coupling term is zero by convention.
pub fn structural_modularity(a_sym: &DenseMatrix, partition: &Partition) -> f64 {
    let k = partition.cluster_count();
    let sizes = partition.sizes();
    let (intra, between) = edge_counts(a_sym, partition);

    let cohesion: f64 = (0..k)
        .map(|c| {
            if sizes[c] == 0 {
                0.0
            } else {
                intra[c] as f64 / (sizes[c] * sizes[c]) as f64
            }
        })
        .sum::<f64>()
        / k as f64;

    if k == 1 {
        return cohesion;
    }
    let mut coupling = 0.0;
    for k1 in 0..k {
        for k2 in (k1 + 1)..k {
            if sizes[k1] == 0 || sizes[k2] == 0 {
                continue;
            }
            coupling += between[k1][k2] as f64 / (2.0 * (sizes[k1] * sizes[k2]) as f64);
        }
    }
    let pairs = (k * (k - 1) / 2) as f64;
    cohesion - coupling / pairs
}

/// Counts undirected intra-cluster edges per cluster and inter-cluster
/// edges per unordered cluster pair, each edge once.
fn edge_counts(a_sym: &DenseMatrix, partition: &Partition) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = a_sym.rows();
    assert_eq!(partition.len(), n, "one label per node");
    let k = partition.cluster_count();
    let mut intra = vec![0usize; k];
    let mut between = vec![vec![0usize; k]; k];
    for i in 0..n {
        for j in (i + 1)..n {
            if a_sym.get(i, j) == 0.0 && a_sym.get(j, i) == 0.0 {
                continue;
            }
            let (ci, cj) = (partition.label(i), partition.label(j));
            if ci == cj {
                intra[ci] += 1;
            } else {
                between[ci.min(cj)][ci.max(cj)] += 1;
            }
        }
    }
    (intra, between)
}

/// `1 - NED`: the fraction of nodes living in clusters of extreme size,
/// where a size is non-extreme when `lower <= n_k <= upper`. Lower is
/// better; zero means every cluster has a reasonable size.
pub fn one_minus_ned(partition: &Partition, lower: usize, upper: usize) -> f64 {
    let total = partition.len();
    if total == 0 {
        return 0.0;
    }
    let non_extreme: usize = partition
        .sizes()
        .into_iter()
        .filter(|&s| s >= lower && s <= upper)
        .sum();
    1.0 - non_extreme as f64 / total as f64
}

/// Interface number: `ifn_k` counts classes of cluster k with at least one
/// incoming call from a different cluster, and IFN is the mean over all K
/// clusters (empty ones included).
pub fn ifn(a_directed: &DenseMatrix, partition: &Partition) -> f64 {
    interface_counts(a_directed, partition)
        .iter()
        .sum::<usize>() as f64
        / partition.cluster_count() as f64
}

fn interface_counts(a_directed: &DenseMatrix, partition: &Partition) -> Vec<usize> {
    let n = a_directed.rows();
    assert_eq!(partition.len(), n, "one label per node");
    let mut counts = vec![0usize; partition.cluster_count()];
    for target in 0..n {
        let ct = partition.label(target);
        let published = (0..n)
            .any(|source| a_directed.get(source, target) != 0.0 && partition.label(source) != ct);
        if published {
            counts[ct] += 1;
        }
    }
    counts
}

/// Computes all four metrics plus the per-cluster counters from the
/// directed adjacency; the symmetrized view is derived internally.
pub fn evaluate(a_directed: &DenseMatrix, partition: &Partition) -> MetricsReport {
    let a_sym = symmetrize_adjacency(a_directed);
    let (intra, _) = edge_counts(&a_sym, partition);
    let interfaces = interface_counts(a_directed, partition);
    let sizes = partition.sizes();
    let per_cluster = (0..partition.cluster_count())
        .map(|c| ClusterStats {
            size: sizes[c],
            intra_edges: intra[c],
            interfaces: interfaces[c],
        })
        .collect();
    MetricsReport {
        modularity: modularity(&a_sym, partition),
        structural_modularity: structural_modularity(&a_sym, partition),
        one_minus_ned: one_minus_ned(partition, NED_LOWER, NED_UPPER),
        ifn: ifn(a_directed, partition),
        per_cluster,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    /// Two disjoint triangles: nodes 0-2 and 3-5.
    fn two_triangles() -> DenseMatrix {
        let mut a = DenseMatrix::zeros(6, 6);
        for &(i, j) in &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
            a.set(i, j, 1.0);
            a.set(j, i, 1.0);
        }
        a
    }

    fn triangle_split() -> Partition {
        Partition::new(alloc::vec![0, 0, 0, 1, 1, 1], 2)
    }

    #[test]
    fn modularity_single_cluster_is_zero() {
        let a = two_triangles();
        let p = Partition::new(alloc::vec![0; 6], 1);
        assert!(modularity(&a, &p).abs() < 1e-15);
    }

    #[test]
    fn modularity_two_triangles_is_half() {
        let a = two_triangles();
        assert!((modularity(&a, &triangle_split()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn modularity_edgeless_is_zero() {
        let a = DenseMatrix::zeros(4, 4);
        let p = Partition::new(alloc::vec![0, 1, 0, 1], 2);
        assert_eq!(modularity(&a, &p), 0.0);
    }

    /// Literal double-loop over all ordered pairs, as an independent route.
    fn modularity_reference(a: &DenseMatrix, p: &Partition) -> f64 {
        let n = a.rows();
        let two_m: f64 = a.data().iter().sum();
        if two_m == 0.0 {
            return 0.0;
        }
        let degrees: alloc::vec::Vec<f64> = (0..n).map(|i| a.row(i).iter().sum()).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if p.label(i) == p.label(j) {
                    q += a.get(i, j) - degrees[i] * degrees[j] / two_m;
                }
            }
        }
        q / two_m
    }

    #[test]
    fn modularity_matches_double_loop_reference() {
        let mut rng = SplitMix64::new(2024);
        for _ in 0..5 {
            let n = 12;
            let mut a = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.next_bool(0.3) {
                        a.set(i, j, 1.0);
                        a.set(j, i, 1.0);
                    }
                }
            }
            let labels = (0..n).map(|_| rng.next_below(3)).collect();
            let p = Partition::new(labels, 3);
            let fast = modularity(&a, &p);
            let slow = modularity_reference(&a, &p);
            assert!((fast - slow).abs() < 1e-12);
        }
    }

    #[test]
    fn structural_modularity_two_triangles() {
        let a = two_triangles();
        let sm = structural_modularity(&a, &triangle_split());
        assert!((sm - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn structural_modularity_isolated_node_is_zero() {
        let a = DenseMatrix::zeros(1, 1);
        let p = Partition::new(alloc::vec![0], 1);
        assert_eq!(structural_modularity(&a, &p), 0.0);
    }

    #[test]
    fn empty_clusters_dilute_the_averages() {
        // Two triangles split across clusters 0 and 1 out of K = 3: the
        // empty cluster contributes zero cohesion but still divides.
        let a = two_triangles();
        let p = Partition::new(alloc::vec![0, 0, 0, 1, 1, 1], 3);
        let sm = structural_modularity(&a, &p);
        assert!((sm - 2.0 / 9.0).abs() < 1e-12);
        assert_eq!(ifn(&a, &p), 0.0);
        // Sizes 3, 3, 0 are all extreme under the [5, 20] bounds.
        assert_eq!(one_minus_ned(&p, 5, 20), 1.0);
    }

    #[test]
    fn structural_modularity_negative_for_pure_coupling() {
        // All four edges run between the clusters, none within.
        let mut a = DenseMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 2), (0, 3), (1, 2), (1, 3)] {
            a.set(i, j, 1.0);
            a.set(j, i, 1.0);
        }
        let p = Partition::new(alloc::vec![0, 0, 1, 1], 2);
        assert!(structural_modularity(&a, &p) < 0.0);
    }

    #[test]
    fn one_minus_ned_fixture() {
        // Sizes 6, 10, 3 over 19 nodes: only the size-3 cluster is extreme.
        let mut labels = alloc::vec![0; 6];
        labels.extend(alloc::vec![1; 10]);
        labels.extend(alloc::vec![2; 3]);
        let p = Partition::new(labels, 3);
        assert!((one_minus_ned(&p, 5, 20) - 3.0 / 19.0).abs() < 1e-12);
    }

    #[test]
    fn one_minus_ned_zero_when_all_sizes_fit() {
        let mut labels = alloc::vec![0; 5];
        labels.extend(alloc::vec![1; 20]);
        let p = Partition::new(labels, 2);
        assert_eq!(one_minus_ned(&p, 5, 20), 0.0);
    }

    #[test]
    fn one_minus_ned_one_when_all_extreme() {
        let p = Partition::new(alloc::vec![0, 0, 1, 1, 2, 2], 3);
        assert_eq!(one_minus_ned(&p, 5, 20), 1.0);
    }

    #[test]
    fn ifn_zero_without_cross_edges() {
        let a = two_triangles();
        assert_eq!(ifn(&a, &triangle_split()), 0.0);
    }

    #[test]
    fn ifn_zero_for_single_cluster() {
        let mut a = DenseMatrix::zeros(3, 3);
        a.set(0, 1, 1.0);
        a.set(1, 2, 1.0);
        let p = Partition::new(alloc::vec![0, 0, 0], 1);
        assert_eq!(ifn(&a, &p), 0.0);
    }

    #[test]
    fn ifn_counts_published_target_only() {
        // A -> B across the split: only B's cluster gains an interface.
        let mut a = DenseMatrix::zeros(2, 2);
        a.set(0, 1, 1.0);
        let p = Partition::new(alloc::vec![0, 1], 2);
        assert!((ifn(&a, &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn evaluate_assembles_consistent_per_cluster_stats() {
        let mut a = two_triangles();
        a.set(0, 3, 1.0); // directed bridge into the second triangle
        let report = evaluate(&a, &triangle_split());
        assert_eq!(report.per_cluster.len(), 2);
        assert_eq!(report.per_cluster[0].size, 3);
        assert_eq!(report.per_cluster[0].intra_edges, 3);
        assert_eq!(report.per_cluster[0].interfaces, 0);
        assert_eq!(report.per_cluster[1].interfaces, 1);
        assert!((report.ifn - 0.5).abs() < 1e-15);
    }
}
