//! Stream generators: planted positives and the hard instances behind the
//! lower bounds.

mod amri;
mod bvl;
mod planted;
mod set_disjointness;

pub use amri::{amri_repetitions, gen_amri_stream, AmriInstance, AmriStream, REPETITION_CONSTANT};
pub use bvl::{
    assemble_z, bits_to_string, bvl_column, decode_bvl_witnesses, gen_bvl_graph, parse_bits, BvlInstance,
    DecodedBit,
};
pub use planted::{gen_layered_star, gen_planted_star, gen_star_graph, with_churn, PlantedInstance};
pub use set_disjointness::{gen_set_disjointness, SetDisjointnessInstance};
