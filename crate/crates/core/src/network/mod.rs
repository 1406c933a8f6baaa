//! Interaction networks: dense matrices, their mean-field weights and
//! moment statistics, random ensembles, social graphs and bipartite
//! mutualistic communities.

mod graphs;
mod incidence;
mod matrix;
mod mutualistic;
mod random;
mod stats;

pub use graphs::{degrees, generate_ba, generate_er, generate_sw, GraphSpec};
pub use incidence::{parse_incidence, read_incidence, Incidence, ParseOptions};
pub use matrix::{a_eff, mean_field, InteractionMatrix, MeanField};
pub use mutualistic::{
    build_mutualistic, BipartiteSpec, MutualisticNetwork, Species, COMPETITION_MAX, INTRASPECIFIC,
};
pub use random::{generate_random_matrix, Marginal, RandomMatrixSpec};
pub use stats::{matrix_stats, MatrixStats};
