//! Explicit double-warped model metrics with certified Ricci bounds: the
//! cap-and-settle Part 1, the power-ladder tail reaching the cone regime,
//! the re-cap for small S² scales, C¹-corner smoothing, the rescaled local
//! model with its exact product neck, and Sⁿ-fiber modification.

pub mod bundle;
mod error;
mod full;
mod glue;
mod local;
mod modify;
mod params;
mod part1;
mod part2;
mod part3;
pub mod svg;

pub use error::{ModelError, Result};
pub use full::{admissible_alpha0, build_full_profile, reverify_full, FullModel};
pub use glue::smooth_c1_glue;
pub use local::{build_local_model, LocalModel};
pub use modify::{hypothesis_cap, modify_fiber};
pub use params::{alpha0, ModelConstants, ModelParams};
pub use part1::{build_part1, Part1};
pub use part2::{build_part2, LadderOutcome};
pub use part3::{apply_recap, RecapOutcome};
