//! Explicit hypergraph constructions and their finite certificates: the
//! three-partite Cayley gadget, the multipartite outer graph, complete
//! joins, uniformity lifts, palettes and subsequence extraction.

mod extraction;
mod gadget;
mod outer;
mod palette;
mod transfer;

pub use extraction::{extract_decreasing, Extraction};
pub use gadget::{
    build_gadget, centered_violation, verify_centered_bound, verify_link_relabel, CenteredReport,
    GadgetGraph, Part,
};
pub use outer::{
    build_outer, build_outer_from, check_parameter_constraints, outer_decomposition,
    outer_edge_count, outer_uniform_exact, outer_uniform_lower_bound, outer_upper_violation,
    symbolic_outer_identity, OuterBound, OuterGraph, ParameterCheck,
};
pub use palette::{palette_from_graph, palette_lagrangian, Palette, S3_ORDER};
pub use transfer::{
    complete_join, join_density_limit, join_edge_count, lift_constant, terminal_interval,
    uniformity_lift, TerminalInterval,
};
