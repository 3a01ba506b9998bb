//! The JSON partition report. Serialization goes through a sorted-key
//! `serde_json::Value` so reruns with identical inputs produce byte-identical
//! files.

use std::collections::BTreeMap;

use cogcn::graph::AppGraph;
use cogcn::metrics::MetricsReport;
use cogcn::partition::Partition;
use cogcn::trainer::{OutlierEntry, TrainConfig};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub schema_version: u32,
    /// Cluster id (decimal string, JSON object keys) to member class names.
    pub clusters: BTreeMap<String, Vec<String>>,
    /// Classes dropped because they appear in no entrypoint trace.
    pub pruned_classes: Vec<String>,
    pub outliers: Vec<OutlierJson>,
    pub metrics: MetricsJson,
    pub config_echo: ConfigEcho,
    pub loss_history_path: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutlierJson {
    pub rank: usize,
    pub class: String,
    pub kind: String,
    pub structural_score: f64,
    pub attribute_score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsJson {
    pub modularity: f64,
    pub structural_modularity: f64,
    pub one_minus_ned: f64,
    pub ifn: f64,
    pub per_cluster: Vec<ClusterStatsJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterStatsJson {
    pub cluster: usize,
    pub size: usize,
    pub intra_edges: usize,
    pub interfaces: usize,
}

/// Everything needed to reproduce the run byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub clusters: usize,
    pub hidden_dim: usize,
    pub embedding_dim: usize,
    pub alpha: [f64; 3],
    pub pretrain_iters: usize,
    pub iters: usize,
    pub seed: u64,
    pub symmetrize: bool,
    pub ablation: Option<String>,
    pub top_outliers: usize,
    pub adam: AdamEcho,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdamEcho {
    pub base_lr: f64,
    pub decay_rate: f64,
    pub decay_every: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl ConfigEcho {
    pub fn new(input: &str, config: &TrainConfig, top_outliers: usize) -> Self {
        let ablation = if config.ablation_no_cluster {
            Some("no-cluster".to_string())
        } else if config.ablation_no_outlier {
            Some("no-outlier".to_string())
        } else {
            None
        };
        ConfigEcho {
            input: input.to_string(),
            clusters: config.clusters,
            hidden_dim: config.hidden_dim,
            embedding_dim: config.embed_dim,
            alpha: [
                config.weights.alpha1,
                config.weights.alpha2,
                config.weights.alpha3,
            ],
            pretrain_iters: config.pretrain_iters,
            iters: config.iters,
            seed: config.seed,
            symmetrize: config.symmetrize,
            ablation,
            top_outliers,
            adam: AdamEcho {
                base_lr: config.adam.base_lr,
                decay_rate: config.adam.decay_rate,
                decay_every: config.adam.decay_every,
                beta1: config.adam.beta1,
                beta2: config.adam.beta2,
                epsilon: config.adam.epsilon,
            },
        }
    }
}

/// Assembles the report for a finished run.
pub fn build_report(
    graph: &AppGraph,
    all_classes: &[String],
    assignment: &Partition,
    ranked_outliers: &[OutlierEntry],
    metrics: &MetricsReport,
    config_echo: ConfigEcho,
    loss_history_path: Option<String>,
) -> PartitionReport {
    let mut clusters: BTreeMap<String, Vec<String>> = (0..assignment.cluster_count())
        .map(|c| (c.to_string(), Vec::new()))
        .collect();
    for (node, name) in graph.node_names().iter().enumerate() {
        clusters
            .get_mut(&assignment.label(node).to_string())
            .expect("cluster key")
            .push(name.clone());
    }
    let retained: std::collections::BTreeSet<&str> =
        graph.node_names().iter().map(|s| s.as_str()).collect();
    let pruned_classes = all_classes
        .iter()
        .filter(|c| !retained.contains(c.as_str()))
        .cloned()
        .collect();
    let outliers = ranked_outliers
        .iter()
        .enumerate()
        .map(|(i, e)| OutlierJson {
            rank: i + 1,
            class: graph.node_names()[e.node].clone(),
            kind: e.kind.to_string(),
            structural_score: e.structural_score,
            attribute_score: e.attribute_score,
        })
        .collect();
    let per_cluster = metrics
        .per_cluster
        .iter()
        .enumerate()
        .map(|(c, s)| ClusterStatsJson {
            cluster: c,
            size: s.size,
            intra_edges: s.intra_edges,
            interfaces: s.interfaces,
        })
        .collect();
    PartitionReport {
        schema_version: SCHEMA_VERSION,
        clusters,
        pruned_classes,
        outliers,
        metrics: MetricsJson {
            modularity: metrics.modularity,
            structural_modularity: metrics.structural_modularity,
            one_minus_ned: metrics.one_minus_ned,
            ifn: metrics.ifn,
            per_cluster,
        },
        config_echo,
        loss_history_path,
    }
}

/// Pretty JSON with keys sorted at every level, trailing newline included.
pub fn to_sorted_json(report: &PartitionReport) -> String {
    let value = serde_json::to_value(report).expect("report is serializable");
    let mut text = serde_json::to_string_pretty(&value).expect("value prints");
    text.push('\n');
    text
}
