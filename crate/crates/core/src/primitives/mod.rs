//! Single-address-space kernels. The distributed plans in `cluster` and
//! `plans` run these inside worker tasks.

mod cover;
mod derive;
mod eqclass;
mod evidence;
mod join;
mod refine;

pub use cover::{minimal_covers, minimal_covers_filtered, sort};
pub use derive::{dcs_from_evidence, fd_lhs_for_rhs, fds_from_evidence, uccs_from_evidence};
pub use eqclass::{gen_eq_class, intersect_partitions, intersection_work, row_labels};
pub use evidence::gen_ev_set;
pub use join::{local_join, self_join, window_pairs, PairMode};
pub use refine::{check_refinement, is_ucc, order_holds, sorted_rows, RefinementInput};
