//! Simulation and analysis toolkit for binary semi-totalistic cellular
//! automata of the interval family `R(δ1δ2θ1θ2)`, with a focus on the
//! Diffusion Rule B2/S7.

pub mod analysis;
pub mod collider;
pub mod gates;
pub mod lattice;
pub mod meanfield;
pub mod pattern;
pub mod rule;
pub mod symmetry;
pub mod zoo;

pub use lattice::{evolve, neighborhood_sum, step, step_reference, BBox, Boundary, Grid, GridError, PopulationTrace};
pub use pattern::catalog::{Catalog, CatalogEntry, CatalogError, EntryKind, Measurements, Provenance};
pub use pattern::{measure_static, parse_cells, parse_rle, place, write_rle, CanonicalMode, Pattern, PlaceError, RleError};
pub use rule::{enumerate_dc22, format_rule, parse_rule, Interval, RuleError, RuleSpec, RuleStyle};
pub use symmetry::Symmetry;
