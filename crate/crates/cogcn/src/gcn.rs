//! The graph-convolutional autoencoder: two-layer encoder
//! `Z = ReLU(A^ ReLU(A^ X W0) W1)`, mirrored decoder
//! `X^ = ReLU(A^ ReLU(A^ Z W2) W3)`, the outlier-weighted structural and
//! attribute reconstruction losses, the k-means-style clustering loss, and
//! exact reverse-mode gradients of the joint objective with respect to the
//! four weight matrices.
//!
//! Per-node reconstruction weights are passed in explicitly: the trainer
//! derives them as `ln(1 / O_i)` from the outlier scores, or as all-ones
//! when outlier weighting is ablated.

use alloc::vec::Vec;

use crate::matrix::{glorot_init, relu, relu_mask, squared_distance, DenseMatrix};
use crate::partition::Partition;
use crate::rng::SplitMix64;

/// Layer widths: attribute width F, hidden width H, embedding width F'.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelDims {
    pub input: usize,
    pub hidden: usize,
    pub embed: usize,
}

/// The four trainable weight matrices of encoder and decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    weights: [DenseMatrix; 4],
}

impl ModelParams {
    /// Glorot-initialized parameters drawn in order W0, W1, W2, W3 from the
    /// given generator.
    pub fn glorot(dims: ModelDims, rng: &mut SplitMix64) -> Self {
        ModelParams {
            weights: [
                glorot_init(dims.input, dims.hidden, rng),
                glorot_init(dims.hidden, dims.embed, rng),
                glorot_init(dims.embed, dims.hidden, rng),
                glorot_init(dims.hidden, dims.input, rng),
            ],
        }
    }

    pub fn from_weights(
        w0: DenseMatrix,
        w1: DenseMatrix,
        w2: DenseMatrix,
        w3: DenseMatrix,
    ) -> Self {
        assert_eq!(w0.cols(), w1.rows(), "W0/W1 dims");
        assert_eq!(w1.cols(), w2.rows(), "W1/W2 dims");
        assert_eq!(w2.cols(), w3.rows(), "W2/W3 dims");
        assert_eq!(w3.cols(), w0.rows(), "W3/W0 dims");
        ModelParams {
            weights: [w0, w1, w2, w3],
        }
    }

    pub fn dims(&self) -> ModelDims {
        ModelDims {
            input: self.weights[0].rows(),
            hidden: self.weights[0].cols(),
            embed: self.weights[1].cols(),
        }
    }

    pub fn w0(&self) -> &DenseMatrix {
        &self.weights[0]
    }

    pub fn w1(&self) -> &DenseMatrix {
        &self.weights[1]
    }

    pub fn w2(&self) -> &DenseMatrix {
        &self.weights[2]
    }

    pub fn w3(&self) -> &DenseMatrix {
        &self.weights[3]
    }

    pub fn weights(&self) -> &[DenseMatrix; 4] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [DenseMatrix; 4] {
        &mut self.weights
    }

    pub fn shapes(&self) -> [(usize, usize); 4] {
        [
            self.weights[0].shape(),
            self.weights[1].shape(),
            self.weights[2].shape(),
            self.weights[3].shape(),
        ]
    }
}

/// Coefficients of the joint loss `a1*L_str + a2*L_att + a3*L_clus`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossWeights {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            alpha1: 0.1,
            alpha2: 0.1,
            alpha3: 0.8,
        }
    }
}

impl LossWeights {
    /// All coefficients must be non-negative and at least one positive.
    pub fn validate(&self) -> Result<(), &'static str> {
        let all = [self.alpha1, self.alpha2, self.alpha3];
        if all.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err("loss weights must be finite and non-negative");
        }
        if all.iter().all(|a| *a == 0.0) {
            return Err("at least one loss weight must be positive");
        }
        Ok(())
    }
}

/// Encoder intermediates: propagated inputs, pre-activations and the final
/// embedding matrix Z.
#[derive(Clone, Debug)]
pub struct EncoderCache {
    /// A^ X
    pub propagated_input: DenseMatrix,
    /// A^ X W0 (pre-activation of layer 1)
    pub pre_hidden: DenseMatrix,
    /// ReLU of `pre_hidden`
    pub hidden: DenseMatrix,
    /// A^ hidden
    pub propagated_hidden: DenseMatrix,
    /// A^ hidden W1 (pre-activation of layer 2)
    pub pre_embed: DenseMatrix,
    /// Z = ReLU of `pre_embed`
    pub z: DenseMatrix,
}

/// Decoder intermediates ending in the reconstructed attributes.
#[derive(Clone, Debug)]
pub struct DecoderCache {
    /// A^ Z
    pub propagated_embed: DenseMatrix,
    /// A^ Z W2
    pub pre_hidden: DenseMatrix,
    pub hidden: DenseMatrix,
    /// A^ hidden
    pub propagated_hidden: DenseMatrix,
    /// A^ hidden W3
    pub pre_output: DenseMatrix,
    /// X^ = ReLU of `pre_output`
    pub x_hat: DenseMatrix,
}

/// Full forward state for one `(params, A^, X)` triple.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    pub encoder: EncoderCache,
    pub decoder: DecoderCache,
}

impl ForwardCache {
    pub fn z(&self) -> &DenseMatrix {
        &self.encoder.z
    }

    pub fn x_hat(&self) -> &DenseMatrix {
        &self.decoder.x_hat
    }
}

/// Two-layer graph-convolution encoder.
pub fn encode(a_hat: &DenseMatrix, x: &DenseMatrix, params: &ModelParams) -> EncoderCache {
    let propagated_input = a_hat.matmul(x);
    let pre_hidden = propagated_input.matmul(params.w0());
    let hidden = relu(&pre_hidden);
    let propagated_hidden = a_hat.matmul(&hidden);
    let pre_embed = propagated_hidden.matmul(params.w1());
    let z = relu(&pre_embed);
    EncoderCache {
        propagated_input,
        pre_hidden,
        hidden,
        propagated_hidden,
        pre_embed,
        z,
    }
}

/// Graph-convolution decoder mapping embeddings back to attribute space.
pub fn decode(a_hat: &DenseMatrix, z: &DenseMatrix, params: &ModelParams) -> DecoderCache {
    let propagated_embed = a_hat.matmul(z);
    let pre_hidden = propagated_embed.matmul(params.w2());
    let hidden = relu(&pre_hidden);
    let propagated_hidden = a_hat.matmul(&hidden);
    let pre_output = propagated_hidden.matmul(params.w3());
    let x_hat = relu(&pre_output);
    DecoderCache {
        propagated_embed,
        pre_hidden,
        hidden,
        propagated_hidden,
        pre_output,
        x_hat,
    }
}

pub fn forward(a_hat: &DenseMatrix, x: &DenseMatrix, params: &ModelParams) -> ForwardCache {
    let encoder = encode(a_hat, x, params);
    let decoder = decode(a_hat, &encoder.z, params);
    ForwardCache { encoder, decoder }
}

/// `ln(1 / score)` per node. Panics unless every score is strictly positive.
pub fn outlier_log_weights(scores: &[f64]) -> Vec<f64> {
    scores
        .iter()
        .map(|&o| {
            assert!(o > 0.0, "outlier score must be strictly positive, got {o}");
            libm::log(1.0 / o)
        })
        .collect()
}

/// Structural reconstruction loss with explicit per-node weights:
/// `sum_i w_i * || A_i: - (Z Z^T)_i: ||^2`.
pub fn loss_str_weighted(a_target: &DenseMatrix, z: &DenseMatrix, row_weights: &[f64]) -> f64 {
    let n = a_target.rows();
    assert_eq!(a_target.cols(), n, "target adjacency must be square");
    assert_eq!(z.rows(), n, "Z row count");
    assert_eq!(row_weights.len(), n, "one weight per node");
    let gram = z.matmul(&z.transpose());
    (0..n)
        .map(|i| row_weights[i] * squared_distance(a_target.row(i), gram.row(i)))
        .sum()
}

/// Structural loss discounted by outlier scores:
/// `sum_i ln(1/O_si) * || A_i: - (Z Z^T)_i: ||^2`.
pub fn loss_str(a_target: &DenseMatrix, z: &DenseMatrix, o_s: &[f64]) -> f64 {
    loss_str_weighted(a_target, z, &outlier_log_weights(o_s))
}

/// Attribute reconstruction loss with explicit per-node weights.
pub fn loss_att_weighted(x: &DenseMatrix, x_hat: &DenseMatrix, row_weights: &[f64]) -> f64 {
    assert_eq!(x.shape(), x_hat.shape(), "attribute shapes");
    assert_eq!(row_weights.len(), x.rows(), "one weight per node");
    (0..x.rows())
        .map(|i| row_weights[i] * squared_distance(x.row(i), x_hat.row(i)))
        .sum()
}

/// Attribute loss discounted by outlier scores:
/// `sum_i ln(1/O_ai) * || X_i: - X^_i: ||^2`.
pub fn loss_att(x: &DenseMatrix, x_hat: &DenseMatrix, o_a: &[f64]) -> f64 {
    loss_att_weighted(x, x_hat, &outlier_log_weights(o_a))
}

/// Clustering loss: `sum_i || Z_i: - C_{assignment(i)} ||^2`.
pub fn loss_clus(z: &DenseMatrix, assignment: &Partition, centers: &DenseMatrix) -> f64 {
    assert_eq!(assignment.len(), z.rows(), "one label per node");
    assert_eq!(assignment.cluster_count(), centers.rows(), "center count");
    assert_eq!(centers.cols(), z.cols(), "center width");
    (0..z.rows())
        .map(|i| squared_distance(z.row(i), centers.row(assignment.label(i))))
        .sum()
}

/// Joint objective `a1*L_str + a2*L_att + a3*L_clus`.
pub fn total_loss(structural: f64, attribute: f64, clustering: f64, weights: &LossWeights) -> f64 {
    weights.alpha1 * structural + weights.alpha2 * attribute + weights.alpha3 * clustering
}

/// Exact gradients of the joint loss with respect to W0..W3.
///
/// `str_weights` and `att_weights` are the per-node reconstruction weights
/// (`ln(1/O)` or all-ones), `cluster` carries the assignment and centers
/// when the clustering term is active. Terms whose coefficient is zero are
/// skipped entirely, so their contribution is exactly zero.
///
/// The ReLU subgradient at exactly zero is taken as zero, matching the
/// forward pass convention.
#[allow(clippy::too_many_arguments)]
pub fn grad_params(
    a_hat: &DenseMatrix,
    x: &DenseMatrix,
    a_target: &DenseMatrix,
    params: &ModelParams,
    cache: &ForwardCache,
    str_weights: &[f64],
    att_weights: &[f64],
    cluster: Option<(&Partition, &DenseMatrix)>,
    weights: &LossWeights,
) -> [DenseMatrix; 4] {
    let enc = &cache.encoder;
    let dec = &cache.decoder;
    let z = &enc.z;
    let n = z.rows();
    let a_hat_t = a_hat.transpose();

    let mut grad_w2 = DenseMatrix::zeros(params.w2().rows(), params.w2().cols());
    let mut grad_w3 = DenseMatrix::zeros(params.w3().rows(), params.w3().cols());
    // dL/dZ accumulates contributions from all three loss terms.
    let mut grad_z = DenseMatrix::zeros(n, z.cols());

    if weights.alpha2 > 0.0 {
        // L_att flows back through the decoder into Z.
        let mut grad_x_hat = dec.x_hat.sub(x).scale_rows(att_weights);
        grad_x_hat = grad_x_hat.map(|v| 2.0 * weights.alpha2 * v);
        let mut grad_pre_out = grad_x_hat;
        relu_mask(&dec.pre_output, &mut grad_pre_out);
        grad_w3 = dec.propagated_hidden.transpose().matmul(&grad_pre_out);
        let grad_prop_hidden = grad_pre_out.matmul(&params.w3().transpose());
        let mut grad_pre_hidden = a_hat_t.matmul(&grad_prop_hidden);
        relu_mask(&dec.pre_hidden, &mut grad_pre_hidden);
        grad_w2 = dec.propagated_embed.transpose().matmul(&grad_pre_hidden);
        let grad_prop_embed = grad_pre_hidden.matmul(&params.w2().transpose());
        grad_z.add_scaled(&a_hat_t.matmul(&grad_prop_embed), 1.0);
    }

    if weights.alpha1 > 0.0 {
        // d/dZ sum_i w_i ||A_i: - (Z Z^T)_i:||^2 = -2 (D + D^T) Z
        // with D = diag(w) (A - Z Z^T).
        let residual = a_target.sub(&z.matmul(&z.transpose()));
        let weighted = residual.scale_rows(str_weights);
        let mut sym = weighted.transpose();
        sym.add_scaled(&weighted, 1.0);
        grad_z.add_scaled(&sym.matmul(z), -2.0 * weights.alpha1);
    }

    if weights.alpha3 > 0.0 {
        if let Some((assignment, centers)) = cluster {
            // d/dZ sum_i ||Z_i: - C_{l(i)}||^2 = 2 (Z - M C)
            let mut assigned = DenseMatrix::zeros(n, z.cols());
            for i in 0..n {
                let c = centers.row(assignment.label(i));
                assigned.row_mut(i).copy_from_slice(c);
            }
            let diff = z.sub(&assigned);
            grad_z.add_scaled(&diff, 2.0 * weights.alpha3);
        }
    }

    // Back through the encoder.
    let mut grad_pre_embed = grad_z;
    relu_mask(&enc.pre_embed, &mut grad_pre_embed);
    let grad_w1 = enc.propagated_hidden.transpose().matmul(&grad_pre_embed);
    let grad_prop_hidden = grad_pre_embed.matmul(&params.w1().transpose());
    let mut grad_pre_hidden = a_hat_t.matmul(&grad_prop_hidden);
    relu_mask(&enc.pre_hidden, &mut grad_pre_hidden);
    let grad_w0 = enc.propagated_input.transpose().matmul(&grad_pre_hidden);

    [grad_w0, grad_w1, grad_w2, grad_w3]
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::gradcheck::finite_diff_grad;
    use alloc::vec;
    use alloc::vec::Vec;

    /// Literal scalar-loop evaluation of `ReLU(A ReLU(A in Wa) Wb)`,
    /// independent of DenseMatrix::matmul. Covers both the encoder
    /// (Wa = W0, Wb = W1) and the decoder (Wa = W2, Wb = W3).
    fn naive_two_layer(
        a: &DenseMatrix,
        input: &DenseMatrix,
        wa: &DenseMatrix,
        wb: &DenseMatrix,
    ) -> Vec<Vec<f64>> {
        let naive_mul = |l: &[Vec<f64>], r: &DenseMatrix| -> Vec<Vec<f64>> {
            let mut out = vec![vec![0.0; r.cols()]; l.len()];
            for i in 0..l.len() {
                for j in 0..r.cols() {
                    for (k, &lv) in l[i].iter().enumerate() {
                        out[i][j] += lv * r.get(k, j);
                    }
                }
            }
            out
        };
        let to_rows = |m: &DenseMatrix| -> Vec<Vec<f64>> {
            (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
        };
        let naive_relu = |m: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            m.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|v| if v > 0.0 { v } else { 0.0 })
                        .collect()
                })
                .collect()
        };
        let hidden = naive_relu(naive_mul(&naive_mul(&to_rows(a), input), wa));
        naive_relu(naive_mul(
            &naive_mul(&to_rows(a), &DenseMatrix::from_rows(&hidden)),
            wb,
        ))
    }

    fn toy_params(n: usize) -> ModelParams {
        ModelParams::from_weights(
            DenseMatrix::identity(n),
            DenseMatrix::identity(n),
            DenseMatrix::identity(n),
            DenseMatrix::identity(n),
        )
    }

    #[test]
    fn zero_w0_gives_zero_embeddings() {
        let a = DenseMatrix::identity(3);
        let x = DenseMatrix::identity(3);
        let params = ModelParams::from_weights(
            DenseMatrix::zeros(3, 3),
            DenseMatrix::identity(3),
            DenseMatrix::identity(3),
            DenseMatrix::identity(3),
        );
        let enc = encode(&a, &x, &params);
        assert_eq!(enc.z, DenseMatrix::zeros(3, 3));
    }

    #[test]
    fn identity_chain_is_identity() {
        let a = DenseMatrix::identity(3);
        let x = DenseMatrix::identity(3);
        let params = toy_params(3);
        let cache = forward(&a, &x, &params);
        assert_eq!(*cache.z(), DenseMatrix::identity(3));
        assert_eq!(*cache.x_hat(), DenseMatrix::identity(3));
    }

    #[test]
    fn encode_matches_naive_evaluation() {
        let mut rng = SplitMix64::new(31);
        let a = crate::graph::normalize_adjacency(
            &DenseMatrix::from_rows(&[
                [0.0, 1.0, 0.0, 1.0],
                [1.0, 0.0, 1.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
            ]),
            true,
        );
        let x = glorot_init(4, 5, &mut rng);
        let params = ModelParams::glorot(
            ModelDims {
                input: 5,
                hidden: 3,
                embed: 2,
            },
            &mut rng,
        );
        let enc = encode(&a, &x, &params);
        let expected = naive_two_layer(&a, &x, params.w0(), params.w1());
        for i in 0..4 {
            for j in 0..2 {
                assert!((enc.z.get(i, j) - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decode_matches_naive_evaluation() {
        let mut rng = SplitMix64::new(53);
        let a = crate::graph::normalize_adjacency(
            &DenseMatrix::from_rows(&[
                [0.0, 1.0, 1.0, 0.0],
                [1.0, 0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
            ]),
            true,
        );
        let params = ModelParams::glorot(
            ModelDims {
                input: 5,
                hidden: 3,
                embed: 2,
            },
            &mut rng,
        );
        let z = glorot_init(4, 2, &mut rng).map(|v| if v > 0.0 { v } else { 0.0 });
        let dec = decode(&a, &z, &params);
        let expected = naive_two_layer(&a, &z, params.w2(), params.w3());
        for i in 0..4 {
            for j in 0..5 {
                assert!((dec.x_hat.get(i, j) - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decode_zero_embeddings_give_zero_output() {
        let a = DenseMatrix::identity(3);
        let params = toy_params(3);
        let dec = decode(&a, &DenseMatrix::zeros(3, 3), &params);
        assert_eq!(dec.x_hat, DenseMatrix::zeros(3, 3));
    }

    #[test]
    fn loss_str_zero_on_perfect_reconstruction() {
        let z = DenseMatrix::identity(2);
        let a = DenseMatrix::identity(2); // Z Z^T = I = A
        let o_s = vec![0.5, 0.5];
        assert_eq!(loss_str(&a, &z, &o_s), 0.0);
    }

    #[test]
    fn loss_str_uniform_scores_factor_out() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let z = DenseMatrix::from_rows(&[[0.3, 0.1], [0.2, 0.4]]);
        let n = 2.0;
        let uniform = vec![1.0 / n; 2];
        let raw: f64 = loss_str_weighted(&a, &z, &[1.0, 1.0]);
        let weighted = loss_str(&a, &z, &uniform);
        assert!((weighted - libm::log(n) * raw).abs() < 1e-12);
    }

    #[test]
    fn loss_str_matches_term_by_term_expansion() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
        let z = DenseMatrix::from_rows(&[[0.5, 0.2], [0.1, 0.9], [0.7, 0.3]]);
        let o_s = [0.2, 0.5, 0.3];
        // Independent expansion with scalar loops.
        let mut expected = 0.0;
        for i in 0..3 {
            let mut row_err = 0.0;
            for j in 0..3 {
                let zz: f64 = (0..2).map(|f| z.get(i, f) * z.get(j, f)).sum();
                let d = a.get(i, j) - zz;
                row_err += d * d;
            }
            expected += libm::log(1.0 / o_s[i]) * row_err;
        }
        assert!((loss_str(&a, &z, &o_s) - expected).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "strictly positive")]
    fn loss_str_rejects_zero_score() {
        let z = DenseMatrix::identity(2);
        let a = DenseMatrix::identity(2);
        let _ = loss_str(&a, &z, &[0.0, 1.0]);
    }

    #[test]
    fn loss_att_zero_on_match() {
        let x = DenseMatrix::from_rows(&[[0.1, 0.9], [0.4, 0.6]]);
        assert_eq!(loss_att(&x, &x.clone(), &[0.5, 0.5]), 0.0);
    }

    #[test]
    fn loss_att_matches_term_by_term_expansion() {
        let x = DenseMatrix::from_rows(&[[0.2, 0.8], [0.5, 0.5], [1.0, 0.0]]);
        let x_hat = DenseMatrix::from_rows(&[[0.3, 0.6], [0.5, 0.4], [0.7, 0.2]]);
        let o_a = [0.5, 0.3, 0.2];
        let mut expected = 0.0;
        for i in 0..3 {
            let mut row_err = 0.0;
            for j in 0..2 {
                let d = x.get(i, j) - x_hat.get(i, j);
                row_err += d * d;
            }
            expected += libm::log(1.0 / o_a[i]) * row_err;
        }
        assert!((loss_att(&x, &x_hat, &o_a) - expected).abs() < 1e-12);
    }

    #[test]
    fn loss_att_linear_in_squared_residuals() {
        let x = DenseMatrix::zeros(2, 2);
        let x_hat = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 2.0]]);
        let doubled = x_hat.map(|v| v * libm::sqrt(2.0));
        let w = [0.7, 0.3];
        let base = loss_att_weighted(&x, &x_hat, &w);
        let twice = loss_att_weighted(&x, &doubled, &w);
        assert!((twice - 2.0 * base).abs() < 1e-12);
    }

    #[test]
    fn loss_clus_zero_when_points_sit_on_centers() {
        let z = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        let centers = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]);
        let assignment = Partition::new(vec![0, 1, 0], 2);
        assert_eq!(loss_clus(&z, &assignment, &centers), 0.0);
    }

    #[test]
    fn loss_clus_matches_hand_computation() {
        let z =
            DenseMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [4.0, 4.0], [5.0, 4.0]]);
        let centers = DenseMatrix::from_rows(&[[0.0, 0.0], [4.5, 4.0]]);
        let assignment = Partition::new(vec![0, 0, 0, 1, 1], 2);
        // Distances: 0, 1, 1, 0.25, 0.25.
        assert!((loss_clus(&z, &assignment, &centers) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn total_loss_arithmetic() {
        let w = LossWeights::default();
        assert!((total_loss(1.0, 2.0, 3.0, &w) - 2.7).abs() < 1e-12);
        let str_only = LossWeights {
            alpha1: 1.0,
            alpha2: 0.0,
            alpha3: 0.0,
        };
        assert_eq!(total_loss(5.0, 2.0, 3.0, &str_only), 5.0);
        assert_eq!(total_loss(0.0, 0.0, 0.0, &w), 0.0);
    }

    /// Builds a random but kink-free test instance for gradient checks.
    fn gradcheck_instance(seed: u64) -> (DenseMatrix, DenseMatrix, DenseMatrix, ModelParams) {
        let mut rng = SplitMix64::new(seed);
        let n = 4;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.next_bool(0.5) {
                    a.set(i, j, 1.0);
                    a.set(j, i, 1.0);
                }
            }
        }
        let a_hat = crate::graph::normalize_adjacency(&a, true);
        let x = glorot_init(n, 5, &mut rng);
        let params = ModelParams::glorot(
            ModelDims {
                input: 5,
                hidden: 3,
                embed: 2,
            },
            &mut rng,
        );
        (a, a_hat, x, params)
    }

    #[test]
    fn gradients_match_finite_differences() {
        let (a, a_hat, x, params) = gradcheck_instance(77);
        let o_s = vec![0.25; 4];
        let o_a = vec![0.25; 4];
        let ws = outlier_log_weights(&o_s);
        let wa = outlier_log_weights(&o_a);
        let centers = DenseMatrix::from_rows(&[[0.2, 0.1], [0.0, 0.3]]);
        let assignment = Partition::new(vec![0, 1, 0, 1], 2);
        let weights = LossWeights::default();

        let cache = forward(&a_hat, &x, &params);
        let grads = grad_params(
            &a_hat,
            &x,
            &a,
            &params,
            &cache,
            &ws,
            &wa,
            Some((&assignment, &centers)),
            &weights,
        );

        for wi in 0..4 {
            let fd = finite_diff_grad(
                |w_probe| {
                    let mut p = params.clone();
                    p.weights_mut()[wi] = w_probe.clone();
                    let c = forward(&a_hat, &x, &p);
                    let ls = loss_str_weighted(&a, &c.encoder.z, &ws);
                    let la = loss_att_weighted(&x, &c.decoder.x_hat, &wa);
                    let lc = loss_clus(&c.encoder.z, &assignment, &centers);
                    total_loss(ls, la, lc, &weights)
                },
                &params.weights()[wi],
                1e-5,
            );
            for i in 0..fd.rows() {
                for j in 0..fd.cols() {
                    let analytic = grads[wi].get(i, j);
                    let numeric = fd.get(i, j);
                    let denom = analytic.abs().max(numeric.abs()).max(1e-3);
                    assert!(
                        ((analytic - numeric) / denom).abs() < 1e-4,
                        "W{wi}[{i},{j}]: analytic {analytic}, numeric {numeric}"
                    );
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences_on_directed_target() {
        // With symmetrization off the structural residual A - Z Z^T is
        // asymmetric, exercising both halves of the two-term gradient.
        let mut rng = SplitMix64::new(61);
        let n = 4;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.next_bool(0.4) {
                    a.set(i, j, 1.0);
                }
            }
        }
        let a_hat = crate::graph::normalize_adjacency(&a, false);
        let x = glorot_init(n, 5, &mut rng);
        let params = ModelParams::glorot(
            ModelDims {
                input: 5,
                hidden: 3,
                embed: 2,
            },
            &mut rng,
        );
        let ws = vec![0.7, 1.3, 0.4, 1.1];
        let wa = vec![1.0; n];
        let weights = LossWeights {
            alpha1: 1.0,
            alpha2: 0.5,
            alpha3: 0.0,
        };
        let cache = forward(&a_hat, &x, &params);
        let grads = grad_params(&a_hat, &x, &a, &params, &cache, &ws, &wa, None, &weights);
        for wi in 0..4 {
            let fd = finite_diff_grad(
                |probe| {
                    let mut p = params.clone();
                    p.weights_mut()[wi] = probe.clone();
                    let c = forward(&a_hat, &x, &p);
                    total_loss(
                        loss_str_weighted(&a, &c.encoder.z, &ws),
                        loss_att_weighted(&x, &c.decoder.x_hat, &wa),
                        0.0,
                        &weights,
                    )
                },
                &params.weights()[wi],
                1e-5,
            );
            for i in 0..fd.rows() {
                for j in 0..fd.cols() {
                    let denom = grads[wi].get(i, j).abs().max(fd.get(i, j).abs()).max(1e-3);
                    assert!(
                        ((grads[wi].get(i, j) - fd.get(i, j)) / denom).abs() < 1e-4,
                        "W{wi}[{i},{j}]"
                    );
                }
            }
        }
    }

    #[test]
    fn att_only_weights_reduce_to_att_gradient() {
        let (a, a_hat, x, params) = gradcheck_instance(99);
        let ws = vec![1.0; 4];
        let wa = vec![1.0; 4];
        let att_only = LossWeights {
            alpha1: 0.0,
            alpha2: 1.0,
            alpha3: 0.0,
        };
        let cache = forward(&a_hat, &x, &params);
        let grads = grad_params(&a_hat, &x, &a, &params, &cache, &ws, &wa, None, &att_only);
        // Against finite differences of the attribute term alone.
        for wi in 0..4 {
            let fd = finite_diff_grad(
                |w_probe| {
                    let mut p = params.clone();
                    p.weights_mut()[wi] = w_probe.clone();
                    let c = forward(&a_hat, &x, &p);
                    loss_att_weighted(&x, &c.decoder.x_hat, &wa)
                },
                &params.weights()[wi],
                1e-5,
            );
            for i in 0..fd.rows() {
                for j in 0..fd.cols() {
                    let denom = grads[wi].get(i, j).abs().max(fd.get(i, j).abs()).max(1e-3);
                    assert!(((grads[wi].get(i, j) - fd.get(i, j)) / denom).abs() < 1e-4);
                }
            }
        }
    }

    #[test]
    fn zero_residuals_give_zero_gradients() {
        // All-zero weights push every activation to zero; with zero targets
        // every residual vanishes and so must every gradient.
        let n = 3;
        let a_hat = DenseMatrix::identity(n);
        let x = DenseMatrix::zeros(n, n);
        let a = DenseMatrix::zeros(n, n);
        let params = ModelParams::from_weights(
            DenseMatrix::zeros(n, n),
            DenseMatrix::zeros(n, n),
            DenseMatrix::zeros(n, n),
            DenseMatrix::zeros(n, n),
        );
        let cache = forward(&a_hat, &x, &params);
        let centers = DenseMatrix::zeros(1, n);
        let assignment = Partition::new(vec![0; n], 1);
        let grads = grad_params(
            &a_hat,
            &x,
            &a,
            &params,
            &cache,
            &[1.0; 3],
            &[1.0; 3],
            Some((&assignment, &centers)),
            &LossWeights::default(),
        );
        for g in &grads {
            assert_eq!(g.max_abs(), 0.0);
        }
    }
}
