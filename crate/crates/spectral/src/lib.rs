//! Spectral graph analysis on dense matrices: similarity-graph
//! construction, graph Laplacians, a deterministic symmetric eigensolver,
//! heat diffusion, Laplacian eigenmaps, locality preserving projections,
//! and spectral clustering.
//!
//! The pipeline shared by every method here is the same: turn data into a
//! weighted graph, form a Laplacian, and read structure out of its lowest
//! eigenvectors. Each stage is exposed on its own so the intermediate
//! objects (weight matrices, spectra, embeddings) can be inspected,
//! exported, and cross-checked against independent routes.
//!
//! Everything is deterministic: the eigensolver is a fixed-order cyclic
//! Jacobi iteration, randomized routines take explicit seeds, and exports
//! print floats in round-tripping scientific notation.

pub mod cluster;
pub mod diffusion;
pub mod eigen;
pub mod embed;
pub mod error;
pub mod graph;
pub mod io;
pub mod laplacian;

pub use cluster::{
    adjusted_rand_index, kmeans, kmeans_with_trace, spectral_cluster, spectral_coordinates,
    ClusterAssignment, SpectralCoordinates,
};
pub use diffusion::{
    max_stable_dt, mode_decay_factors, solve_analytic, step_discrete, step_discrete_with,
    HeatState, StabilityPolicy, StepOutcome,
};
pub use eigen::{
    edge_smoothness, generalized_eig, hat_eig, kernel_multiplicity, rayleigh_objective, sym_eig,
    Convention, Spectrum,
};
pub use embed::{
    expand_monomials, lem_embed, lem_embed_with, lpp_fit, lpp_transform, Embedding,
    EmbeddingSource, Expansion, LemConstraint, LppModel,
};
pub use error::{Error, Result};
pub use graph::{
    build_epsilon_graph, build_full_graph, build_graph, build_knn_graph, from_edge_list,
    pairwise_distances, DataSet, GraphRecipe, KnnMode, SimilarityGraph, Weighting,
};
pub use laplacian::{
    connected_components, degree_vector, is_valid_laplacian, laplacian, random_walk_normalized,
    sym_normalized, ComponentLabels, LaplacianBundle,
};
