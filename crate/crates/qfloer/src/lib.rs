//! Combinatorial Heegaard Floer calculator for 3-manifolds presented as
//! broken fibrations over the circle.
//!
//! The pipeline: a fibration description (fiber genus, number of critical
//! circles, attaching cycles) is turned into a Heegaard diagram on a closed
//! surface built from polygonal cells; curves are itineraries through the
//! cells realized with exact rational coordinates; the complement regions,
//! periodic domains, generators and holomorphic-polygon counts are all
//! extracted from that arrangement; homology is computed over a truncated
//! power series ring. No floating point is used anywhere.

pub mod curve;
pub mod diagram;
pub mod error;
pub mod geom;
pub mod moves;
pub mod overlay;
pub mod scaffold;
pub mod snf;
pub mod surface;

pub use error::{QfError, Result};
