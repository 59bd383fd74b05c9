//! Finite experiments around indivisibility: colorings and copy searches,
//! the annulus coloring, the hedgehog space and the tree codings whose
//! metric property underlies the Ramsey-theoretic arguments.

pub mod coloring;
pub mod hedgehog;
pub mod milliken;

pub use coloring::{
    annulus_lemma_check, band_index, divisibility_coloring, epsilon_component, epsilon_neighborhood,
    greedy_monochromatic, indivisibility_search, lambda_epsilon, monochromatic_copy, Coloring, ColoringOutcome,
    GreedyOutcome, IndivisibilitySummary, NetSystem, Obstruction, SearchMode, EXHAUSTIVE_COLORING_BUDGET,
};
pub use hedgehog::{hedgehog_build, hedgehog_verify, HedgehogReport, HedgehogSpace, HedgehogViolation};
pub use milliken::{
    coding_embed, greedy_coding, milliken_space, CodingEmbedding, CodingOutcome, CodingTable, MetricVerdict,
    MillikenSpace, MillikenVariant,
};
