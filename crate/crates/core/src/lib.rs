//! Exact computational dynamics for piecewise-linear interval maps.
//!
//! Everything is built on arbitrary-precision rational arithmetic: maps are
//! breakpoint lists in canonical form, images and preimages are exact, and
//! every certificate this crate emits can be re-verified independently. The
//! main pieces:
//!
//! - [`rat`] and [`interval`]: exact scalars and closed intervals.
//! - [`plmap`]: piecewise-linear maps with composition, powers, images,
//!   preimages, laps, and lap-count entropy estimates.
//! - [`horseshoe`]: covering certificates, word pullbacks, and the
//!   conjugacy self-test for the induced full 2-shift.
//! - [`denjoy`]: blowing up a finite invariant set into wandering intervals,
//!   with exact semiconjugacy checks.
//! - [`shift`]: eventually periodic sequences, block recodings, and
//!   itineraries.
//! - [`graph`]: primitivity of labeled transition graphs.
//! - [`analysis`]: swap decompositions and the end-to-end pipeline.
//!
//! Batch checks run data-parallel on rayon when the `parallel` feature
//! (default) is on; each has an always-available `*_seq` twin, and the
//! bench suite compares the two.

pub mod analysis;
pub mod denjoy;
pub mod error;
pub mod graph;
pub mod horseshoe;
pub mod interval;
pub mod plmap;
pub mod rat;
pub mod shift;

pub use analysis::{
    cycle_verify, mixing_decomposition, pipeline, pipeline_with_cap, swap_map, PipelineReport,
    SwapDecomposition,
};
pub use denjoy::{
    build_blowup, default_lengths, interval_orbit_check, obstruction_report, orbit_closure,
    orbit_closure_with_cap, semiconjugacy_check, semiconjugacy_check_seq, tent_plateau,
    BlowupModel, Collar, IntervalOrbitReport, ObstructionReport, OrbitPoint, OrbitSet, OrbitSpec,
    SemiconjugacyReport, DEFAULT_ORBIT_CAP,
};
pub use error::{Error, Result};
pub use graph::{Imprimitivity, LabeledGraph, Primitivity};
pub use horseshoe::{
    conjugacy_self_test, conjugacy_self_test_seq, entropy_lower_bound, find_horseshoe,
    find_horseshoe_with_cap, point_for_itinerary, pullback, singleton_rate, verify_horseshoe,
    EntropyBound, HorseshoeCert, SelfTestReport, WordIntervalTable, DEFAULT_SAMPLED_WORDS,
    EXHAUSTIVE_WORD_LIMIT,
};
pub use interval::{Interval, IntervalSet};
pub use plmap::{Lap, LapGrowth, PLMap, Sign, DEFAULT_BREAKPOINT_CAP};
pub use rat::Rat;
pub use shift::{
    asymptotic_resolve, cantor_depth_check, itinerary, power_block_encode, Cells, EPSeq, Word,
};
