//! Frequent elements with witnesses over bipartite edge streams.
//!
//! The algorithms report an A-vertex together with a set of its neighbours
//! that certifies a high degree. [`insertion_only`] handles streams of edge
//! insertions, [`insertion_deletion`] handles turnstile streams through
//! [`l0`] sketches, and [`star`] lifts both to max-degree detection in general
//! graphs. [`model`] holds the exact oracle every result is checked against.

pub mod deg_res;
pub mod error;
pub mod harness;
pub mod insertion_deletion;
pub mod insertion_only;
pub mod instances;
pub mod l0;
pub mod model;
pub mod seed;
pub mod star;
pub mod stream;

pub use error::{Error, Result};
pub use model::{Dims, Edge, ExactGraph, Neighbourhood, Sign, StreamUpdate};
pub use stream::{Stream, StreamMode};
