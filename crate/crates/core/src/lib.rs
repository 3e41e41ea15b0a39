//! Ego-centric circle detection for co-authorship networks.
//!
//! The pipeline reads a paper corpus, builds the co-authorship graph,
//! extracts one ego network per author, describes each alter by a
//! 67-dimensional profile, and searches for overlapping circles that
//! maximize a profile-driven edge likelihood. Evaluation covers overlapping
//! modularity, circle statistics, and circle-augmented link prediction.

pub mod cli;
pub mod corpus;
pub mod ego;
pub mod error;
pub mod io;
pub mod linkpred;
pub mod metrics;
pub mod model;
pub mod optimizer;
pub mod pipeline;
pub mod profiles;
pub mod synth;

pub use corpus::{build_graph, load_corpus, CoauthorGraph, CorpusConfig, CorpusFormat, PaperCorpus, PaperRecord};
pub use ego::{ego_network, enumerate_egos, EgoNetwork};
pub use error::{Error, Result};
pub use model::{Circle, CircleState, SimilarityCache};
pub use optimizer::{CircleOptimizer, DetectionResult, OptimizerConfig};
pub use profiles::{CorpusStats, ProfileVector};
pub use linkpred::{run_prediction, FeatureMode, ModelKind, PredictConfig, PredictionReport, SplitSpec};
pub use metrics::{summarize, Summary};
pub use pipeline::{detect_corpus, DetectConfig, EgoCircles};
