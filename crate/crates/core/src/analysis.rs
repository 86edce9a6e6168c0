//! Desk-scale transitivity analysis: swap decompositions, interval cycles,
//! and the end-to-end map-to-shift pipeline.
//!
//! Transitivity and mixing of an interval map have no finite certificate, so
//! nothing here claims either. What can be decided exactly is the structure
//! the proofs actually consume: a fixed point whose two sides are swapped
//! (so the second iterate preserves each half), exact interval cycles, and a
//! horseshoe for the map or for its restricted second iterate. The pipeline
//! chains those and labels its outcome "certificate found" or
//! "inconclusive", never "transitive".

use serde::Serialize;

use crate::error::{Error, Result};
use crate::horseshoe::{
    conjugacy_self_test, entropy_lower_bound, find_horseshoe_with_cap, singleton_rate,
    EntropyBound, HorseshoeCert, SelfTestReport,
};
use crate::plmap::DEFAULT_BREAKPOINT_CAP;
use crate::interval::Interval;
use crate::plmap::PLMap;
use crate::rat::Rat;

/// Map that exchanges the two halves of [0, 1]: up from (0, 1/2) to
/// (1/4, 1), down through (1/2, 1/2) to (1, 0). Its square restricted to
/// either half is a full tent. Ships as the standard non-mixing fixture.
pub fn swap_map() -> PLMap {
    let r = |p: i64, q: i64| Rat::new(p, q);
    PLMap::new(vec![
        (r(0, 1), r(1, 2)),
        (r(1, 4), r(1, 1)),
        (r(1, 2), r(1, 2)),
        (r(1, 1), r(0, 1)),
    ])
    .expect("fixture breakpoints are valid")
}

/// A fixed point whose two sides are exchanged by the map, with the exact
/// images as evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapDecomposition {
    pub c: Rat,
    pub left: Interval,
    pub right: Interval,
    pub image_left: Interval,
    pub image_right: Interval,
}

/// All fixed points of f, in increasing order. Identity pieces contribute
/// their endpoints.
fn fixed_points(f: &PLMap) -> Vec<Rat> {
    let mut out = std::collections::BTreeSet::new();
    let one = Rat::one();
    for i in 0..f.piece_count() {
        let ((x0, y0), (x1, y1)) = f.piece(i);
        let slope = f.piece_slope(i);
        if slope == one {
            if y0 == x0 {
                out.insert(x0.clone());
                out.insert(x1.clone());
            }
            continue;
        }
        // Solve y0 + slope (x - x0) = x within the piece.
        let x = (y0 - &slope * x0) / (Rat::one() - &slope);
        if x0 <= &x && &x <= x1 {
            out.insert(x);
        }
        let _ = y1;
    }
    out.into_iter().collect()
}

/// Finds the first fixed point c (in increasing order) such that f maps
/// [lo, c] into [c, hi] and [c, hi] into [lo, c], exactly.
pub fn mixing_decomposition(f: &PLMap) -> Result<Option<SwapDecomposition>> {
    if !f.is_self_map() {
        return Err(Error::Domain("swap decomposition needs a self-map".into()));
    }
    let domain = f.domain();
    for c in fixed_points(f) {
        let left = Interval::new(domain.lo().clone(), c.clone()).expect("c in domain");
        let right = Interval::new(c.clone(), domain.hi().clone()).expect("c in domain");
        let image_left = f.image(&left)?;
        let image_right = f.image(&right)?;
        if right.contains_interval(&image_left) && left.contains_interval(&image_right) {
            return Ok(Some(SwapDecomposition { c, left, right, image_left, image_right }));
        }
    }
    Ok(None)
}

/// True iff f maps each interval exactly onto the next, cyclically.
pub fn cycle_verify(f: &PLMap, cycle: &[Interval]) -> Result<bool> {
    if cycle.is_empty() {
        return Err(Error::Invalid("cycle verification needs at least one interval".into()));
    }
    for (i, interval) in cycle.iter().enumerate() {
        let next = &cycle[(i + 1) % cycle.len()];
        if &f.image(interval)? != next {
            return Ok(false);
        }
    }
    Ok(true)
}

/// End-to-end analysis outcome. When a swap decomposition exists the
/// certificate is relative to the second iterate restricted to the left
/// half, and the entropy bound's power counts steps of the original map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub decomposition: Option<SwapDecomposition>,
    pub certificate: Option<HorseshoeCert>,
    pub rate: Option<Rat>,
    pub self_test: Option<SelfTestReport>,
    pub entropy_bound: Option<EntropyBound>,
    pub status: String,
}

/// Runs the whole chain: swap decomposition, horseshoe search on the map or
/// on its restricted second iterate, singleton rate, depth-8 self-test, and
/// the entropy bound. Deterministic; every emitted certificate re-verifies
/// independently.
pub fn pipeline(f: &PLMap, r_max: u32) -> Result<PipelineReport> {
    pipeline_with_cap(f, r_max, DEFAULT_BREAKPOINT_CAP)
}

/// [`pipeline`] with an explicit breakpoint cap on every composition it
/// performs.
pub fn pipeline_with_cap(f: &PLMap, r_max: u32, cap: usize) -> Result<PipelineReport> {
    let decomposition = mixing_decomposition(f)?;
    let (base, steps_per_iterate) = match &decomposition {
        Some(d) => (f.power_with_cap(2, cap)?.restrict(&d.left)?, 2u32),
        None => (f.clone(), 1u32),
    };
    let certificate = find_horseshoe_with_cap(&base, r_max, cap)?;
    let (rate, self_test, entropy_bound, status) = match &certificate {
        Some(cert) => {
            let rate = singleton_rate(&base, cert)?;
            let self_test = conjugacy_self_test(&base, cert, 8, None)?;
            let effective = HorseshoeCert {
                r: cert.r * steps_per_iterate,
                j0: cert.j0.clone(),
                j1: cert.j1.clone(),
            };
            (
                rate,
                Some(self_test),
                Some(entropy_lower_bound(&effective)),
                "certificate found".to_string(),
            )
        }
        None => (None, None, None, "inconclusive".to_string()),
    };
    Ok(PipelineReport { decomposition, certificate, rate, self_test, entropy_bound, status })
}
