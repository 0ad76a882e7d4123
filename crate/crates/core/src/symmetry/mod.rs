//! Tensor words over group-valued variables, Haar sampling and the exact
//! structured generators used as anchors.

mod sampling;
mod structured;
mod word;

pub use sampling::{
    haar_orthogonal_from, haar_unitary_from, random_permutation_from, sample_assignment, sample_haar_orthogonal,
    sample_haar_unitary, stream_rng, StreamDomain,
};
pub use structured::{
    anchor_generators, orthogonal_probe, permutation_matrix, structured_generators, unitary_2x2, GeneratorKind,
};
pub use word::{instantiate_word, parse_word, parse_word_with_cap, Factor, GeneratorAssignment, Group, SymmetryWord, VarSpec};
