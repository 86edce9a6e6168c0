//! Blowing up a finite invariant set of a piecewise-linear interval map into
//! a family of wandering intervals.
//!
//! Starting from a finite set closed under the map (forward orbits of some
//! seeds, fattened by finitely many preimage levels), each point `z_j` is
//! replaced by a closed interval `I_j` of prescribed positive length. The
//! blown-up map sends `I_j` affinely onto the insertion of its image point,
//! acts as the conjugated base map elsewhere, and smears the unavoidable
//! jumps at non-blown preimages of blown points across narrow collars. The
//! projection that collapses every insertion back to its point is then an
//! exact semiconjugacy away from the collars, with an explicit residual
//! bound on them.
//!
//! Everything is exact rational arithmetic; the checks in this module verify
//! the construction rather than assume it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::plmap::{PLMap, Sign};
use crate::rat::Rat;

/// Tent map with a plateau: 0 -> 0, [1/3, 2/3] -> 1, 1 -> 0, affine between.
/// The standard fixture for blow-ups and horseshoe certificates.
pub fn tent_plateau() -> PLMap {
    let r = |p: i64, q: i64| Rat::new(p, q);
    PLMap::new(vec![
        (r(0, 1), r(0, 1)),
        (r(1, 3), r(1, 1)),
        (r(2, 3), r(1, 1)),
        (r(1, 1), r(0, 1)),
    ])
    .expect("fixture breakpoints are valid")
}

/// Forward-orbit length cap before a seed is declared non-eventually-periodic.
pub const DEFAULT_ORBIT_CAP: usize = 10_000;

/// One point of a finite invariant set: its location, the index of its image
/// under the base map, the slope sign of the base map at it, and the
/// preimage level it entered at (0 for forward-orbit points).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPoint {
    pub z: Rat,
    pub tau: usize,
    pub sign: i32,
    pub depth: usize,
}

/// Finite set closed under the base map, in insertion order: seed orbits
/// first, then each preimage level sorted by position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSet {
    points: Vec<OrbitPoint>,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[OrbitPoint] {
        &self.points
    }

    pub fn index_of(&self, z: &Rat) -> Option<usize> {
        self.points.iter().position(|p| &p.z == z)
    }
}

/// Slope sign of the map strictly inside the lap containing z. Points on lap
/// boundaries or inside plateaus cannot be blown up and are rejected.
fn interior_sign(g: &PLMap, z: &Rat) -> Result<i32> {
    for lap in g.laps() {
        if lap.interval.contains_strictly(z) {
            return match lap.sign {
                Sign::Pos => Ok(1),
                Sign::Neg => Ok(-1),
                Sign::Zero => Err(Error::Plateau(format!(
                    "the point {z} lies inside a plateau and cannot be blown up"
                ))),
            };
        }
    }
    Err(Error::Plateau(format!(
        "the point {z} is not strictly inside a monotone lap"
    )))
}

/// Exact preimage points of z, rejecting plateau preimages (a whole interval
/// mapping onto z cannot be blown up pointwise).
fn point_preimages(g: &PLMap, z: &Rat) -> Result<Vec<Rat>> {
    let target = Interval::point(z.clone());
    let mut out = Vec::new();
    for comp in g.preimage(&target).components() {
        if !comp.is_degenerate() {
            return Err(Error::Plateau(format!(
                "a plateau maps onto the orbit point {z}"
            )));
        }
        out.push(comp.lo().clone());
    }
    Ok(out)
}

/// [`orbit_closure`] with an explicit forward-orbit cap.
pub fn orbit_closure_with_cap(
    g: &PLMap,
    seeds: &[Rat],
    preimage_depth: usize,
    cap: usize,
) -> Result<OrbitSet> {
    if seeds.is_empty() {
        return Err(Error::Orbit("orbit closure needs at least one seed".into()));
    }
    if !g.is_self_map() {
        return Err(Error::Domain(
            "orbit closure needs a map whose image lies in its domain".into(),
        ));
    }
    let mut order: Vec<(Rat, usize)> = Vec::new();
    let mut seen: HashMap<Rat, usize> = HashMap::new();
    for seed in seeds {
        let mut x = seed.clone();
        let mut walked = 0usize;
        while !seen.contains_key(&x) {
            walked += 1;
            if walked > cap {
                return Err(Error::NonEventuallyPeriodic(format!(
                    "the forward orbit of {seed} exceeded {cap} points without repeating"
                )));
            }
            seen.insert(x.clone(), order.len());
            order.push((x.clone(), 0));
            x = g.eval(&x)?;
        }
    }
    for level in 1..=preimage_depth {
        let current: Vec<Rat> = order.iter().map(|(z, _)| z.clone()).collect();
        let mut fresh: BTreeSet<Rat> = BTreeSet::new();
        for z in &current {
            for p in point_preimages(g, z)? {
                if !seen.contains_key(&p) {
                    fresh.insert(p);
                }
            }
        }
        for p in fresh {
            seen.insert(p.clone(), order.len());
            order.push((p, level));
        }
    }
    let mut points = Vec::with_capacity(order.len());
    for (z, depth) in &order {
        let image = g.eval(z)?;
        let tau = *seen.get(&image).ok_or_else(|| {
            Error::Orbit(format!("the image of {z} escaped the collected set"))
        })?;
        let sign = interior_sign(g, z)?;
        points.push(OrbitPoint { z: z.clone(), tau, sign, depth: *depth });
    }
    Ok(OrbitSet { points })
}

/// Forward orbits of the seeds (which must be eventually periodic), fattened
/// by the given number of preimage levels, every point validated to sit
/// strictly inside a monotone lap.
pub fn orbit_closure(g: &PLMap, seeds: &[Rat], preimage_depth: usize) -> Result<OrbitSet> {
    orbit_closure_with_cap(g, seeds, preimage_depth, DEFAULT_ORBIT_CAP)
}

/// Insertion lengths 1/2, 1/4, .., 2^-n: summable and strictly positive.
pub fn default_lengths(n: usize) -> Vec<Rat> {
    (1..=n).map(|j| Rat::from_int(2).pow(-(j as i32))).collect()
}

/// Collar around a non-blown preimage of a blown point. `center` is in base
/// coordinates, `interval` in extended coordinates, `target` is the index of
/// the blown image point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collar {
    pub center: Rat,
    pub target: usize,
    pub interval: Interval,
}

/// The blown-up system: base map, insertion data, the two piecewise-linear
/// maps of the construction (the blown-up map and the collapsing
/// projection), and the residual bound the collars guarantee.
#[derive(Debug, Clone)]
pub struct BlowupModel {
    base: PLMap,
    points: Vec<OrbitPoint>,
    lengths: Vec<Rat>,
    insertions: Vec<Interval>,
    collars: Vec<Collar>,
    collar_width: Rat,
    projection: PLMap,
    lifted: PLMap,
    residual_bound: Rat,
}

impl BlowupModel {
    pub fn base(&self) -> &PLMap {
        &self.base
    }

    pub fn points(&self) -> &[OrbitPoint] {
        &self.points
    }

    pub fn lengths(&self) -> &[Rat] {
        &self.lengths
    }

    /// Insertion intervals in extended coordinates, in point order.
    pub fn insertions(&self) -> &[Interval] {
        &self.insertions
    }

    pub fn collars(&self) -> &[Collar] {
        &self.collars
    }

    pub fn collar_width(&self) -> &Rat {
        &self.collar_width
    }

    /// The blown-up map on the extended domain.
    pub fn lifted(&self) -> &PLMap {
        &self.lifted
    }

    /// The collapsing projection from the extended domain onto the base.
    pub fn projection(&self) -> &PLMap {
        &self.projection
    }

    /// Uniform bound on the semiconjugacy defect, attained only on collars.
    pub fn residual_bound(&self) -> &Rat {
        &self.residual_bound
    }

    pub fn extended_domain(&self) -> Interval {
        self.lifted.domain()
    }

    /// Index of the insertion deepest in the preimage tree, ties resolved
    /// toward the largest base point. Its orbit is the natural candidate for
    /// a wandering insertion.
    pub fn deepest_insertion(&self) -> usize {
        let mut best = 0usize;
        for (i, p) in self.points.iter().enumerate() {
            let b = &self.points[best];
            if (p.depth, &p.z) > (b.depth, &b.z) {
                best = i;
            }
        }
        best
    }
}

/// Position lookup with prefix sums of insertion lengths, for the two
/// one-sided lifts into extended coordinates.
struct Lifter {
    zs: Vec<Rat>,
    cum: Vec<Rat>,
}

impl Lifter {
    fn new(sorted: &[(Rat, Rat, usize)]) -> Lifter {
        let mut cum = Vec::with_capacity(sorted.len() + 1);
        cum.push(Rat::zero());
        for (_, len, _) in sorted {
            let last = cum.last().unwrap().clone();
            cum.push(last + len);
        }
        Lifter { zs: sorted.iter().map(|(z, _, _)| z.clone()).collect(), cum }
    }

    /// v plus all lengths inserted strictly left of v: the left edge of the
    /// insertion when v is blown, the plain lift otherwise.
    fn low(&self, v: &Rat) -> Rat {
        let k = self.zs.partition_point(|z| z < v);
        v + &self.cum[k]
    }
}

/// Builds the blow-up of `orbit` inside g, with one length per point (in
/// point order) and collars of half-width `collar_width` around every
/// non-blown preimage of a blown point.
///
/// Fails when a collar would leave its monotone lap, touch a blown point, or
/// meet another collar; widths that pass make the blown-up map continuous
/// with semiconjugacy defect at most `2 * collar_width * max |slope|`.
pub fn build_blowup(
    g: &PLMap,
    orbit: &OrbitSet,
    lengths: &[Rat],
    collar_width: &Rat,
) -> Result<BlowupModel> {
    if orbit.is_empty() {
        return Err(Error::Orbit("cannot blow up an empty set".into()));
    }
    if lengths.len() != orbit.len() {
        return Err(Error::Invalid(format!(
            "{} lengths for {} orbit points",
            lengths.len(),
            orbit.len()
        )));
    }
    if let Some(bad) = lengths.iter().find(|l| l.signum() <= 0) {
        return Err(Error::Invalid(format!("insertion length {bad} is not positive")));
    }
    if collar_width.signum() <= 0 {
        return Err(Error::Invalid(format!("collar width {collar_width} is not positive")));
    }
    if !g.is_self_map() {
        return Err(Error::Domain("blow-up needs a self-map".into()));
    }

    let points = orbit.points().to_vec();
    let domain = g.domain();
    let (base_lo, base_hi) = (domain.lo().clone(), domain.hi().clone());

    let mut sorted: Vec<(Rat, Rat, usize)> = points
        .iter()
        .zip(lengths)
        .enumerate()
        .map(|(i, (p, len))| (p.z.clone(), len.clone(), i))
        .collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let lifter = Lifter::new(&sorted);
    let total = lifter.cum.last().unwrap().clone();
    let ext_hi = &base_hi + &total;

    // Insertions in point order; Ls and Rs in sorted order for lookups.
    let mut insertions = vec![Interval::point(Rat::zero()); points.len()];
    let mut ls = Vec::with_capacity(sorted.len());
    let mut rs = Vec::with_capacity(sorted.len());
    for (z, len, orig) in &sorted {
        let l = lifter.low(z);
        let r = &l + len;
        insertions[*orig] = Interval::new(l.clone(), r.clone()).expect("positive length");
        ls.push(l);
        rs.push(r);
    }

    let projection = {
        let mut nodes = vec![(base_lo.clone(), base_lo.clone())];
        for (i, (z, _, _)) in sorted.iter().enumerate() {
            nodes.push((ls[i].clone(), z.clone()));
            nodes.push((rs[i].clone(), z.clone()));
        }
        nodes.push((ext_hi.clone(), base_hi.clone()));
        PLMap::new(nodes)?
    };

    // Collar centers: non-blown preimages of blown points, each tagged with
    // the index of its blown image.
    let mut centers: BTreeMap<Rat, usize> = BTreeMap::new();
    for (j, p) in points.iter().enumerate() {
        for v in point_preimages(g, &p.z)? {
            if orbit.index_of(&v).is_none() {
                centers.insert(v, j);
            }
        }
    }

    let laps = g.laps();
    let mut prev_center: Option<Rat> = None;
    let two_c = Rat::from_int(2) * collar_width;
    for v in centers.keys() {
        let lo = v - collar_width;
        let hi = v + collar_width;
        let carried = laps.iter().any(|lap| {
            lap.sign != Sign::Zero && lap.interval.lo() < &lo && &hi < lap.interval.hi()
        });
        if !carried {
            return Err(Error::CollarOverlap(format!(
                "the collar around {v} is not strictly inside a monotone lap"
            )));
        }
        let k = lifter.zs.partition_point(|z| z < &lo);
        if k < lifter.zs.len() && lifter.zs[k] <= hi {
            return Err(Error::CollarOverlap(format!(
                "the collar around {v} contains the blown point {}",
                lifter.zs[k]
            )));
        }
        if let Some(prev) = &prev_center {
            if v - prev <= two_c {
                return Err(Error::CollarOverlap(format!(
                    "the collars around {prev} and {v} overlap"
                )));
            }
        }
        prev_center = Some(v.clone());
    }

    // No blown point inside a collar, so the lift is affine there and the
    // lifted collar keeps the same half-width.
    let collars: Vec<Collar> = centers
        .iter()
        .map(|(v, &target)| {
            let lifted_v = lifter.low(v);
            let interval = Interval::new(&lifted_v - collar_width, &lifted_v + collar_width)
                .expect("positive width");
            Collar { center: v.clone(), target, interval }
        })
        .collect();

    // Node set of the blown-up map: lifted base breakpoints, insertion
    // boundaries, and collar endpoints. Nothing strictly inside a collar may
    // be a node: the single segment across each collar is what absorbs the
    // jump of the conjugated map.
    let mut xs: BTreeSet<Rat> = BTreeSet::new();
    xs.insert(base_lo.clone());
    xs.insert(ext_hi.clone());
    for (x, _) in g.breakpoints() {
        match orbit.index_of(x) {
            Some(j) => {
                xs.insert(insertions[j].lo().clone());
                xs.insert(insertions[j].hi().clone());
            }
            None => {
                xs.insert(lifter.low(x));
            }
        }
    }
    for iv in &insertions {
        xs.insert(iv.lo().clone());
        xs.insert(iv.hi().clone());
    }
    for collar in &collars {
        xs.insert(collar.interval.lo().clone());
        xs.insert(collar.interval.hi().clone());
    }
    let xs: Vec<Rat> = xs
        .into_iter()
        .filter(|x| !collars.iter().any(|c| c.interval.contains_strictly(x)))
        .collect();

    let insertion_containing = |x: &Rat| -> Option<usize> {
        let k = ls.partition_point(|l| l <= x);
        if k > 0 && x <= &rs[k - 1] {
            Some(sorted[k - 1].2)
        } else {
            None
        }
    };

    let mut nodes = Vec::with_capacity(xs.len());
    for x in &xs {
        let y = match insertion_containing(x) {
            Some(j) => {
                let source = &insertions[j];
                let target = &insertions[points[j].tau];
                let t = (x - source.lo()) / source.diameter();
                if points[j].sign > 0 {
                    target.lo() + t * target.diameter()
                } else {
                    target.hi() - t * target.diameter()
                }
            }
            None => {
                let k = rs.partition_point(|r| r < x);
                let v = x - &lifter.cum[k];
                let image = g.eval(&v)?;
                if orbit.index_of(&image).is_some() {
                    return Err(Error::CollarOverlap(format!(
                        "the point {v} maps onto a blown point but is not shielded by a collar"
                    )));
                }
                lifter.low(&image)
            }
        };
        nodes.push((x.clone(), y));
    }
    let lifted = PLMap::new(nodes)?;
    if !lifted.is_self_map() {
        return Err(Error::Invalid(
            "the blown-up map escaped its extended domain".into(),
        ));
    }

    let max_slope = (0..g.piece_count())
        .map(|i| g.piece_slope(i).abs())
        .max()
        .expect("a map has at least one piece");
    let residual_bound = Rat::from_int(2) * collar_width * &max_slope;

    Ok(BlowupModel {
        base: g.clone(),
        points,
        lengths: lengths.to_vec(),
        insertions,
        collars,
        collar_width: collar_width.clone(),
        projection,
        lifted,
        residual_bound,
    })
}

/// Pointwise semiconjugacy audit along orbits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiconjugacyReport {
    pub samples_checked: usize,
    pub horizon: usize,
    /// Largest one-step defect `|proj(F(x)) - g(proj(x))|` seen.
    pub max_residual: Rat,
    pub residual_bound: Rat,
    pub within_bound: bool,
    /// True when every sampled orbit point outside all collars had defect
    /// exactly zero.
    pub off_collar_exact: bool,
    pub collar_steps: usize,
}

struct DefectSample {
    max_residual: Rat,
    off_collar_exact: bool,
    collar_steps: usize,
}

fn sample_defect(model: &BlowupModel, start: &Rat, horizon: usize) -> Result<DefectSample> {
    let mut cur = start.clone();
    let mut max_residual = Rat::zero();
    let mut off_collar_exact = true;
    let mut collar_steps = 0usize;
    for _ in 0..horizon {
        let next = model.lifted.eval(&cur)?;
        let here = model.projection.eval(&cur)?;
        let below = model.base.eval(&here)?;
        let above = model.projection.eval(&next)?;
        let defect = (above - below).abs();
        let in_collar = model
            .collars
            .iter()
            .any(|c| c.interval.contains_strictly(&cur));
        if in_collar {
            collar_steps += 1;
        } else if !defect.is_zero() {
            off_collar_exact = false;
        }
        if defect > max_residual {
            max_residual = defect;
        }
        cur = next;
    }
    Ok(DefectSample { max_residual, off_collar_exact, collar_steps })
}

fn defect_points(model: &BlowupModel, samples: usize) -> Vec<Rat> {
    let domain = model.extended_domain();
    let mut pts: BTreeSet<Rat> = model
        .lifted
        .breakpoints()
        .iter()
        .map(|(x, _)| x.clone())
        .collect();
    let denom = Rat::from_int(samples.saturating_sub(1).max(1) as i64);
    let step = (domain.hi() - domain.lo()) / denom;
    for i in 0..samples {
        pts.insert(domain.lo() + Rat::from_int(i as i64) * &step);
    }
    pts.into_iter().collect()
}

fn assemble_defects(
    model: &BlowupModel,
    horizon: usize,
    pts: &[Rat],
    outcomes: Vec<DefectSample>,
) -> SemiconjugacyReport {
    let mut max_residual = Rat::zero();
    let mut off_collar_exact = true;
    let mut collar_steps = 0usize;
    for o in outcomes {
        if o.max_residual > max_residual {
            max_residual = o.max_residual;
        }
        off_collar_exact &= o.off_collar_exact;
        collar_steps += o.collar_steps;
    }
    let within_bound = max_residual <= *model.residual_bound();
    SemiconjugacyReport {
        samples_checked: pts.len(),
        horizon,
        max_residual,
        residual_bound: model.residual_bound().clone(),
        within_bound,
        off_collar_exact,
        collar_steps,
    }
}

/// Checks the one-step defect `|proj(F(x)) - g(proj(x))|` along the orbit of
/// each sample point: equispaced samples plus every breakpoint of the
/// blown-up map. The defect must vanish exactly off the collars and stay
/// within the residual bound on them.
pub fn semiconjugacy_check(
    model: &BlowupModel,
    samples: usize,
    horizon: usize,
) -> Result<SemiconjugacyReport> {
    if samples == 0 || horizon == 0 {
        return Err(Error::Invalid("semiconjugacy check needs samples >= 1 and horizon >= 1".into()));
    }
    let pts = defect_points(model, samples);
    #[cfg(feature = "parallel")]
    let outcomes: Vec<DefectSample> = pts
        .par_iter()
        .map(|x| sample_defect(model, x, horizon))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<DefectSample> = pts
        .iter()
        .map(|x| sample_defect(model, x, horizon))
        .collect::<Result<_>>()?;
    Ok(assemble_defects(model, horizon, &pts, outcomes))
}

/// Sequential twin of [`semiconjugacy_check`]; the bench suite compares the
/// two.
pub fn semiconjugacy_check_seq(
    model: &BlowupModel,
    samples: usize,
    horizon: usize,
) -> Result<SemiconjugacyReport> {
    if samples == 0 || horizon == 0 {
        return Err(Error::Invalid("semiconjugacy check needs samples >= 1 and horizon >= 1".into()));
    }
    let pts = defect_points(model, samples);
    let outcomes: Vec<DefectSample> = pts
        .iter()
        .map(|x| sample_defect(model, x, horizon))
        .collect::<Result<_>>()?;
    Ok(assemble_defects(model, horizon, &pts, outcomes))
}

/// Exact image trail of one insertion. Indices are 1-based in the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalOrbitReport {
    pub start: usize,
    pub steps: usize,
    /// Insertion indices visited, starting with `start` itself.
    pub path: Vec<usize>,
    /// Diameters of the iterated images, starting with the insertion's own.
    pub lengths: Vec<Rat>,
    /// True when every iterated image equals the expected insertion exactly.
    pub exact: bool,
    pub first_mismatch: Option<usize>,
    pub first_return: Option<usize>,
}

/// Iterates an insertion under the blown-up map and compares each image with
/// the insertion of the corresponding image point, exactly.
pub fn interval_orbit_check(model: &BlowupModel, j: usize, steps: usize) -> Result<IntervalOrbitReport> {
    if j >= model.points().len() {
        return Err(Error::Invalid(format!(
            "insertion index {} out of range 0..{}",
            j,
            model.points().len()
        )));
    }
    if steps == 0 {
        return Err(Error::Invalid("interval orbit check needs steps >= 1".into()));
    }
    let mut path = vec![j + 1];
    let mut lengths = vec![model.insertions()[j].diameter()];
    let mut exact = true;
    let mut first_mismatch = None;
    let mut first_return = None;
    let mut current = model.insertions()[j].clone();
    let mut idx = j;
    for k in 1..=steps {
        idx = model.points()[idx].tau;
        current = model.lifted.image(&current)?;
        let expected = &model.insertions()[idx];
        if &current != expected && first_mismatch.is_none() {
            exact = false;
            first_mismatch = Some(k);
        }
        if idx == j && first_return.is_none() {
            first_return = Some(k);
        }
        path.push(idx + 1);
        lengths.push(current.diameter());
    }
    Ok(IntervalOrbitReport { start: j + 1, steps, path, lengths, exact, first_mismatch, first_return })
}

/// Gap trail of a non-returning insertion. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub start: usize,
    pub horizon: usize,
    pub path: Vec<usize>,
    /// Distance from the k-th image insertion back to the start, k = 1..
    pub gaps: Vec<Rat>,
    pub min_gap: Rat,
    pub min_gap_positive: bool,
}

fn interval_gap(a: &Interval, b: &Interval) -> Rat {
    let left = a.lo() - b.hi();
    let right = b.lo() - a.hi();
    Rat::zero().max(left.max(right))
}

/// For an insertion whose index orbit never returns to it within the
/// horizon, reports the exact distances between its iterated images and
/// itself. Every gap is positive, while the ideal construction drives the
/// infimum over all horizons to zero; a returning orbit is a precondition
/// failure, not an obstruction.
pub fn obstruction_report(model: &BlowupModel, j: usize, horizon: usize) -> Result<ObstructionReport> {
    if j >= model.points().len() {
        return Err(Error::Invalid(format!(
            "insertion index {} out of range 0..{}",
            j,
            model.points().len()
        )));
    }
    if horizon == 0 {
        return Err(Error::Invalid("obstruction report needs horizon >= 1".into()));
    }
    let mut path = vec![j + 1];
    let mut idx = j;
    let mut gaps = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        idx = model.points()[idx].tau;
        if idx == j {
            return Err(Error::Precondition(format!(
                "insertion {} returns to itself after {} steps; its orbit is periodic, not wandering",
                j + 1,
                k
            )));
        }
        path.push(idx + 1);
        gaps.push(interval_gap(&model.insertions()[idx], &model.insertions()[j]));
    }
    let min_gap = gaps.iter().cloned().min().expect("horizon >= 1");
    let min_gap_positive = min_gap.signum() > 0;
    Ok(ObstructionReport { start: j + 1, horizon, path, gaps, min_gap, min_gap_positive })
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    j: usize,
    z: Rat,
    tau: usize,
    sign: i32,
    depth: usize,
    length: Rat,
}

/// Wire format: the base map, the collar width, and one record per point
/// with 1-based indices. The maps and collars are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    map: PLMap,
    collar_width: Rat,
    points: Vec<PointRecord>,
}

impl Serialize for BlowupModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let points = self
            .points
            .iter()
            .zip(&self.lengths)
            .enumerate()
            .map(|(i, (p, len))| PointRecord {
                j: i + 1,
                z: p.z.clone(),
                tau: p.tau + 1,
                sign: p.sign,
                depth: p.depth,
                length: len.clone(),
            })
            .collect();
        ModelFile {
            map: self.base.clone(),
            collar_width: self.collar_width.clone(),
            points,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlowupModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let file = ModelFile::deserialize(d)?;
        let n = file.points.len();
        let mut points = Vec::with_capacity(n);
        let mut lengths = Vec::with_capacity(n);
        for (i, rec) in file.points.iter().enumerate() {
            if rec.j != i + 1 {
                return Err(D::Error::custom(format!(
                    "point records must be numbered 1..; record {} is labeled {}",
                    i + 1,
                    rec.j
                )));
            }
            if rec.tau == 0 || rec.tau > n {
                return Err(D::Error::custom(format!(
                    "tau {} out of range 1..={n} at record {}",
                    rec.tau,
                    i + 1
                )));
            }
            points.push(OrbitPoint {
                z: rec.z.clone(),
                tau: rec.tau - 1,
                sign: rec.sign,
                depth: rec.depth,
            });
            lengths.push(rec.length.clone());
        }
        let orbit = OrbitSet { points };
        for p in orbit.points() {
            let image = file.map.eval(&p.z).map_err(D::Error::custom)?;
            if image != orbit.points()[p.tau].z {
                return Err(D::Error::custom(format!(
                    "the map sends {} to {image}, not to the recorded image {}",
                    p.z,
                    orbit.points()[p.tau].z
                )));
            }
            let sign = interior_sign(&file.map, &p.z).map_err(D::Error::custom)?;
            if sign != p.sign {
                return Err(D::Error::custom(format!(
                    "recorded slope sign {} at {} does not match the map",
                    p.sign, p.z
                )));
            }
        }
        build_blowup(&file.map, &orbit, &lengths, &file.collar_width).map_err(D::Error::custom)
    }
}

/// Seeds and preimage depth, the input an orbit closure is built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub seeds: Vec<Rat>,
    pub preimage_depth: usize,
}
