//! Training loop: pre-training of the autoencoder on the reconstruction
//! losses, k-means++ initialization of the cluster variables, then the
//! alternating loop that each iteration applies the closed-form outlier
//! updates, recomputes cluster assignments and centers, and takes one ADAM
//! step on the joint objective.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::adam::AdamState;
use crate::gcn::{
    self, encode, forward, grad_params, loss_att_weighted, loss_clus, loss_str_weighted,
    total_loss, LossWeights, ModelDims, ModelParams,
};
use crate::graph::{normalize_adjacency, symmetrize_adjacency};
use crate::matrix::{squared_distance, DenseMatrix};
use crate::partition::Partition;
use crate::rng::SplitMix64;

/// Floor applied to per-node residuals before normalization so every
/// outlier score stays strictly positive and `ln(1/O)` stays finite.
const SCORE_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Pretrain,
    Main,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Pretrain => write!(f, "pre-training"),
            Phase::Main => write!(f, "main loop"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainError {
    InvalidConfig(&'static str),
    ClusterCountExceedsNodes {
        clusters: usize,
        nodes: usize,
    },
    /// The objective became non-finite.
    Diverged {
        phase: Phase,
        iteration: usize,
    },
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            TrainError::ClusterCountExceedsNodes { clusters, nodes } => {
                write!(f, "{clusters} clusters requested for {nodes} nodes")
            }
            TrainError::Diverged { phase, iteration } => {
                write!(f, "loss diverged during {phase} at iteration {iteration}")
            }
        }
    }
}

/// All knobs of one training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Number of candidate microservices K.
    pub clusters: usize,
    pub hidden_dim: usize,
    pub embed_dim: usize,
    pub pretrain_iters: usize,
    /// T, the number of alternating iterations.
    pub iters: usize,
    pub weights: LossWeights,
    pub seed: u64,
    /// Use `max(A, A^T)` for propagation and as the structural
    /// reconstruction target (the default reading); off means the literal
    /// directed adjacency is used for both.
    pub symmetrize: bool,
    /// Drop the clustering objective (weight 0) and cluster post hoc with
    /// k-means++ on the final embeddings.
    pub ablation_no_cluster: bool,
    /// Drop the `ln(1/O)` factors from both reconstruction losses.
    pub ablation_no_outlier: bool,
    pub adam: crate::adam::AdamConfig,
}

impl TrainConfig {
    pub fn new(clusters: usize) -> Self {
        TrainConfig {
            clusters,
            hidden_dim: 64,
            embed_dim: 32,
            pretrain_iters: 250,
            iters: 500,
            weights: LossWeights::default(),
            seed: 0,
            symmetrize: true,
            ablation_no_cluster: false,
            ablation_no_outlier: false,
            adam: crate::adam::AdamConfig::default(),
        }
    }

    pub fn validate(&self, node_count: usize) -> Result<(), TrainError> {
        if node_count == 0 {
            return Err(TrainError::InvalidConfig("graph has no nodes"));
        }
        if self.clusters == 0 {
            return Err(TrainError::InvalidConfig("cluster count must be positive"));
        }
        if self.clusters > node_count {
            return Err(TrainError::ClusterCountExceedsNodes {
                clusters: self.clusters,
                nodes: node_count,
            });
        }
        if self.hidden_dim == 0 || self.embed_dim == 0 {
            return Err(TrainError::InvalidConfig("layer widths must be positive"));
        }
        self.weights.validate().map_err(TrainError::InvalidConfig)?;
        if !self.adam.base_lr.is_finite() || self.adam.base_lr <= 0.0 {
            return Err(TrainError::InvalidConfig("learning rate must be positive"));
        }
        if !self.adam.decay_rate.is_finite()
            || self.adam.decay_rate <= 0.0
            || self.adam.decay_rate > 1.0
        {
            return Err(TrainError::InvalidConfig("decay rate must be in (0, 1]"));
        }
        if self.adam.decay_every == 0 {
            return Err(TrainError::InvalidConfig("decay interval must be positive"));
        }
        Ok(())
    }

    /// Loss weights actually optimized, after applying the ablation flags.
    fn effective_weights(&self) -> LossWeights {
        LossWeights {
            alpha3: if self.ablation_no_cluster {
                0.0
            } else {
                self.weights.alpha3
            },
            ..self.weights
        }
    }
}

/// Loss components recorded at one iteration, together with the outlier
/// score sums used to check the simplex constraints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossRecord {
    pub iteration: usize,
    pub structural: f64,
    pub attribute: f64,
    pub clustering: f64,
    /// The weighted objective actually optimized at this iteration.
    pub total: f64,
    pub o_s_sum: f64,
    pub o_a_sum: f64,
}

/// Result of the pre-training phase.
#[derive(Clone, Debug)]
pub struct Pretrained {
    pub params: ModelParams,
    pub embeddings: DenseMatrix,
    pub structural_scores: Vec<f64>,
    pub attribute_scores: Vec<f64>,
    pub history: Vec<LossRecord>,
}

/// Final state of a training run.
#[derive(Clone, Debug)]
pub struct TrainState {
    pub params: ModelParams,
    /// Embeddings from the final parameters.
    pub embeddings: DenseMatrix,
    pub structural_scores: Vec<f64>,
    pub attribute_scores: Vec<f64>,
    pub assignment: Partition,
    pub centers: DenseMatrix,
    pub pretrain_history: Vec<LossRecord>,
    pub loss_history: Vec<LossRecord>,
}

impl TrainState {
    /// Main-loop loss history as CSV with a header row.
    pub fn loss_history_csv(&self) -> String {
        let mut out = String::from("iteration,loss_str,loss_att,loss_clus,total\n");
        for r in &self.loss_history {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.iteration, r.structural, r.attribute, r.clustering, r.total
            );
        }
        out
    }
}

/// Per-node reconstruction weights: `ln(1/O_i)`, or all-ones when the
/// outlier discounting is ablated.
fn reconstruction_weights(scores: &[f64], no_outlier: bool) -> Vec<f64> {
    if no_outlier {
        vec![1.0; scores.len()]
    } else {
        gcn::outlier_log_weights(scores)
    }
}

/// Normalizes non-negative residuals into outlier scores: each entry is
/// floored at `SCORE_FLOOR`, then the vector is scaled to sum to one. An
/// all-zero residual vector has no information and maps to uniform scores.
fn normalize_scores(mut residuals: Vec<f64>) -> Vec<f64> {
    let n = residuals.len();
    let raw_total: f64 = residuals.iter().sum();
    if raw_total <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    for r in &mut residuals {
        if *r < SCORE_FLOOR {
            *r = SCORE_FLOOR;
        }
    }
    let total: f64 = residuals.iter().sum();
    for r in &mut residuals {
        *r /= total;
    }
    residuals
}

/// Closed-form structural outlier update: score i proportional to
/// `|| A_i: - (Z Z^T)_i: ||^2`.
pub fn update_outliers_structural(a_target: &DenseMatrix, z: &DenseMatrix) -> Vec<f64> {
    let gram = z.matmul(&z.transpose());
    let residuals = (0..z.rows())
        .map(|i| squared_distance(a_target.row(i), gram.row(i)))
        .collect();
    normalize_scores(residuals)
}

/// Closed-form attribute outlier update: score i proportional to
/// `|| X_i: - X^_i: ||^2`.
pub fn update_outliers_attribute(x: &DenseMatrix, x_hat: &DenseMatrix) -> Vec<f64> {
    assert_eq!(x.shape(), x_hat.shape(), "attribute shapes");
    let residuals = (0..x.rows())
        .map(|i| squared_distance(x.row(i), x_hat.row(i)))
        .collect();
    normalize_scores(residuals)
}

/// Assigns every node to its nearest center; ties break toward the smaller
/// cluster index.
pub fn update_assignments(z: &DenseMatrix, centers: &DenseMatrix) -> Partition {
    assert_eq!(z.cols(), centers.cols(), "embedding width");
    let k = centers.rows();
    let labels = (0..z.rows())
        .map(|i| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let d = squared_distance(z.row(i), centers.row(c));
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            best
        })
        .collect();
    Partition::new(labels, k)
}

/// Each non-empty cluster's center becomes the mean of its members. An
/// empty cluster is reseeded onto the point currently farthest from its own
/// cluster's new center; multiple empty clusters take successive distinct
/// points.
pub fn update_centers(z: &DenseMatrix, assignment: &Partition) -> DenseMatrix {
    let k = assignment.cluster_count();
    let dim = z.cols();
    let mut centers = DenseMatrix::zeros(k, dim);
    let sizes = assignment.sizes();
    for i in 0..z.rows() {
        let label = assignment.label(i);
        let row = z.row(i);
        let c = centers.row_mut(label);
        for (acc, &v) in c.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for (c, &size) in sizes.iter().enumerate() {
        if size > 0 {
            let inv = 1.0 / size as f64;
            for v in centers.row_mut(c) {
                *v *= inv;
            }
        }
    }
    let empties: Vec<usize> = (0..k).filter(|&c| sizes[c] == 0).collect();
    if !empties.is_empty() {
        let mut by_distance: Vec<(usize, f64)> = (0..z.rows())
            .map(|i| {
                (
                    i,
                    squared_distance(z.row(i), centers.row(assignment.label(i))),
                )
            })
            .collect();
        by_distance.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for (slot, empty) in empties.into_iter().enumerate() {
            let (point, _) = by_distance[slot % by_distance.len()];
            let row = z.row(point).to_vec();
            centers.row_mut(empty).copy_from_slice(&row);
        }
    }
    centers
}

/// k-means++ seeding (first center uniform, later centers sampled with
/// probability proportional to squared distance from the nearest chosen
/// center) followed by Lloyd rounds until the assignment stabilizes or 100
/// rounds pass. Deterministic given the generator state.
pub fn kmeanspp_init(
    z: &DenseMatrix,
    k: usize,
    rng: &mut SplitMix64,
) -> Result<(Partition, DenseMatrix), TrainError> {
    let n = z.rows();
    if k == 0 {
        return Err(TrainError::InvalidConfig("cluster count must be positive"));
    }
    if k > n {
        return Err(TrainError::ClusterCountExceedsNodes {
            clusters: k,
            nodes: n,
        });
    }

    let first = rng.next_below(n);
    let mut centers = DenseMatrix::zeros(k, z.cols());
    centers.row_mut(0).copy_from_slice(z.row(first));
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(z.row(i), z.row(first)))
        .collect();

    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &w) in nearest.iter().enumerate() {
                acc += w;
                if target < acc {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // every point coincides with a chosen center; any pick works
            rng.next_below(n)
        };
        centers.row_mut(c).copy_from_slice(z.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            let nd = squared_distance(z.row(i), z.row(pick));
            if nd < *d {
                *d = nd;
            }
        }
    }

    let mut assignment = update_assignments(z, &centers);
    for _ in 0..100 {
        let new_centers = update_centers(z, &assignment);
        let new_assignment = update_assignments(z, &new_centers);
        centers = new_centers;
        let stable = new_assignment == assignment;
        assignment = new_assignment;
        if stable {
            break;
        }
    }
    Ok((assignment, centers))
}

/// Ranks nodes by their best (minimum) position across the two score lists
/// sorted descending; ties break toward the larger combined score, then the
/// smaller node index. `top_n` is clamped to the node count.
pub fn rank_outliers(o_s: &[f64], o_a: &[f64], top_n: usize) -> Vec<OutlierEntry> {
    assert_eq!(o_s.len(), o_a.len(), "score vectors must align");
    let n = o_s.len();
    let rank_positions = |scores: &[f64]| -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let mut ranks = vec![0usize; n];
        for (pos, &node) in order.iter().enumerate() {
            ranks[node] = pos;
        }
        ranks
    };
    let rank_s = rank_positions(o_s);
    let rank_a = rank_positions(o_a);

    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.sort_by(|&a, &b| {
        let best_a = rank_s[a].min(rank_a[a]);
        let best_b = rank_s[b].min(rank_a[b]);
        best_a
            .cmp(&best_b)
            .then((o_s[b] + o_a[b]).total_cmp(&(o_s[a] + o_a[a])))
            .then(a.cmp(&b))
    });
    nodes
        .into_iter()
        .take(top_n.min(n))
        .map(|node| OutlierEntry {
            node,
            kind: if rank_a[node] < rank_s[node] {
                OutlierKind::Attribute
            } else {
                OutlierKind::Structural
            },
            structural_score: o_s[node],
            attribute_score: o_a[node],
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutlierKind {
    Structural,
    Attribute,
}

impl fmt::Display for OutlierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutlierKind::Structural => write!(f, "structural"),
            OutlierKind::Attribute => write!(f, "attribute"),
        }
    }
}

/// One entry of the combined outlier ranking, with both scores attached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutlierEntry {
    pub node: usize,
    /// Which score list produced the winning rank (structural on an exact
    /// rank tie).
    pub kind: OutlierKind,
    pub structural_score: f64,
    pub attribute_score: f64,
}

/// Pre-trains encoder and decoder on the two reconstruction losses with
/// uniform outlier scores. The generator carries all randomness; `fit`
/// seeds it from `config.seed`.
pub fn pretrain(
    adjacency: &DenseMatrix,
    attributes: &DenseMatrix,
    config: &TrainConfig,
    rng: &mut SplitMix64,
) -> Result<Pretrained, TrainError> {
    let n = adjacency.rows();
    assert_eq!(adjacency.cols(), n, "adjacency must be square");
    assert_eq!(attributes.rows(), n, "one attribute row per node");
    config.validate(n)?;

    let a_target = if config.symmetrize {
        symmetrize_adjacency(adjacency)
    } else {
        adjacency.clone()
    };
    let a_hat = normalize_adjacency(adjacency, config.symmetrize);
    let dims = ModelDims {
        input: attributes.cols(),
        hidden: config.hidden_dim,
        embed: config.embed_dim,
    };
    let mut params = ModelParams::glorot(dims, rng);
    let structural_scores = vec![1.0 / n as f64; n];
    let attribute_scores = structural_scores.clone();
    let ws = reconstruction_weights(&structural_scores, config.ablation_no_outlier);
    let wa = reconstruction_weights(&attribute_scores, config.ablation_no_outlier);
    let pretrain_weights = LossWeights {
        alpha3: 0.0,
        ..config.weights
    };
    let mut adam = AdamState::new(config.adam.clone(), &params.shapes());
    let mut history = Vec::with_capacity(config.pretrain_iters);

    for iteration in 1..=config.pretrain_iters {
        let cache = forward(&a_hat, attributes, &params);
        let structural = loss_str_weighted(&a_target, cache.z(), &ws);
        let attribute = loss_att_weighted(attributes, cache.x_hat(), &wa);
        let total = total_loss(structural, attribute, 0.0, &pretrain_weights);
        history.push(LossRecord {
            iteration,
            structural,
            attribute,
            clustering: 0.0,
            total,
            o_s_sum: structural_scores.iter().sum(),
            o_a_sum: attribute_scores.iter().sum(),
        });
        if !total.is_finite() {
            return Err(TrainError::Diverged {
                phase: Phase::Pretrain,
                iteration,
            });
        }
        let grads = grad_params(
            &a_hat,
            attributes,
            &a_target,
            &params,
            &cache,
            &ws,
            &wa,
            None,
            &pretrain_weights,
        );
        adam.step(params.weights_mut(), &grads);
    }

    let embeddings = encode(&a_hat, attributes, &params).z;
    Ok(Pretrained {
        params,
        embeddings,
        structural_scores,
        attribute_scores,
        history,
    })
}

/// Runs the full procedure: pre-training, k-means++ initialization, then
/// `config.iters` alternating iterations of outlier updates, cluster
/// updates and one ADAM step, in that order. With the clustering ablation
/// the final assignment comes from a post-hoc k-means++ on the trained
/// embeddings instead.
pub fn fit(
    adjacency: &DenseMatrix,
    attributes: &DenseMatrix,
    config: &TrainConfig,
) -> Result<TrainState, TrainError> {
    let n = adjacency.rows();
    config.validate(n)?;
    let mut rng = SplitMix64::new(config.seed);

    let pretrained = pretrain(adjacency, attributes, config, &mut rng)?;
    let mut params = pretrained.params;
    let mut structural_scores = pretrained.structural_scores;
    let mut attribute_scores = pretrained.attribute_scores;

    let a_target = if config.symmetrize {
        symmetrize_adjacency(adjacency)
    } else {
        adjacency.clone()
    };
    let a_hat = normalize_adjacency(adjacency, config.symmetrize);

    let (mut assignment, mut centers) =
        kmeanspp_init(&pretrained.embeddings, config.clusters, &mut rng)?;

    let weights = config.effective_weights();
    let mut adam = AdamState::new(config.adam.clone(), &params.shapes());
    let mut loss_history = Vec::with_capacity(config.iters);

    for iteration in 1..=config.iters {
        let cache = forward(&a_hat, attributes, &params);

        structural_scores = update_outliers_structural(&a_target, cache.z());
        attribute_scores = update_outliers_attribute(attributes, cache.x_hat());

        if !config.ablation_no_cluster {
            assignment = update_assignments(cache.z(), &centers);
            centers = update_centers(cache.z(), &assignment);
        }

        let ws = reconstruction_weights(&structural_scores, config.ablation_no_outlier);
        let wa = reconstruction_weights(&attribute_scores, config.ablation_no_outlier);
        let structural = loss_str_weighted(&a_target, cache.z(), &ws);
        let attribute = loss_att_weighted(attributes, cache.x_hat(), &wa);
        let clustering = loss_clus(cache.z(), &assignment, &centers);
        let total = total_loss(structural, attribute, clustering, &weights);
        loss_history.push(LossRecord {
            iteration,
            structural,
            attribute,
            clustering,
            total,
            o_s_sum: structural_scores.iter().sum(),
            o_a_sum: attribute_scores.iter().sum(),
        });
        if !total.is_finite() {
            return Err(TrainError::Diverged {
                phase: Phase::Main,
                iteration,
            });
        }

        let cluster_term = if weights.alpha3 > 0.0 {
            Some((&assignment, &centers))
        } else {
            None
        };
        let grads = grad_params(
            &a_hat,
            attributes,
            &a_target,
            &params,
            &cache,
            &ws,
            &wa,
            cluster_term,
            &weights,
        );
        adam.step(params.weights_mut(), &grads);
    }

    let embeddings = encode(&a_hat, attributes, &params).z;
    if config.ablation_no_cluster {
        let (post_assignment, post_centers) =
            kmeanspp_init(&embeddings, config.clusters, &mut rng)?;
        assignment = post_assignment;
        centers = post_centers;
    }

    Ok(TrainState {
        params,
        embeddings,
        structural_scores,
        attribute_scores,
        assignment,
        centers,
        pretrain_history: pretrained.history,
        loss_history,
    })
}
