//! Continuous piecewise-linear maps with exact rational breakpoints.
//!
//! A [`PLMap`] is stored as its breakpoint list `(x_i, y_i)` with strictly
//! increasing `x_i`; the map is the linear interpolation between consecutive
//! breakpoints and the domain is `[x_0, x_last]`. Collinear interior
//! breakpoints are merged on construction, so two maps are equal as functions
//! exactly when their representations are equal.
//!
//! Everything here is exact: evaluation, composition, powers, forward images,
//! preimages and lap decompositions all stay in rational arithmetic. The only
//! decimal that ever appears is the lap-growth estimate, which is explicitly
//! display-only.
//!
//! Compositions can grow quickly (the n-th power of an expanding map has
//! exponentially many breakpoints), so composition-like operations take a
//! breakpoint cap and fail with a resource error instead of allocating
//! without bound. The default cap is [`DEFAULT_BREAKPOINT_CAP`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rat::Rat;

/// Default ceiling on breakpoints produced by a single composition chain.
pub const DEFAULT_BREAKPOINT_CAP: usize = 5_000_000;

/// Slope sign of a linear piece or a lap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sign::Neg => "-",
            Sign::Zero => "0",
            Sign::Pos => "+",
        };
        write!(f, "{s}")
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Sign, D::Error> {
        let s = String::deserialize(de)?;
        match s.as_str() {
            "-" => Ok(Sign::Neg),
            "0" => Ok(Sign::Zero),
            "+" => Ok(Sign::Pos),
            other => Err(serde::de::Error::custom(format!("not a slope sign: {other:?}"))),
        }
    }
}

/// Maximal interval on which the map has constant slope sign. Plateaus are
/// laps of sign zero; adjacent laps always have different signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lap {
    pub interval: Interval,
    pub sign: Sign,
    /// Index range (inclusive) of the linear pieces this lap spans.
    pub(crate) pieces: (usize, usize),
}

/// Continuous piecewise-linear self-contained map on a closed interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLMap {
    points: Vec<(Rat, Rat)>,
}

impl PLMap {
    /// Validates and canonicalizes a breakpoint list: at least two points,
    /// strictly increasing x, collinear interior points merged.
    pub fn new(points: Vec<(Rat, Rat)>) -> Result<PLMap> {
        if points.len() < 2 {
            return Err(Error::Invalid(format!(
                "a map needs at least 2 breakpoints, got {}",
                points.len()
            )));
        }
        for (i, pair) in points.windows(2).enumerate() {
            if pair[0].0 >= pair[1].0 {
                return Err(Error::Invalid(format!(
                    "breakpoint x values must be strictly increasing: breakpoint {} has x = {} \
                     followed by x = {}",
                    i,
                    pair[0].0,
                    pair[1].0
                )));
            }
        }
        let mut merged: Vec<(Rat, Rat)> = Vec::with_capacity(points.len());
        for p in points {
            while merged.len() >= 2 {
                let b = &merged[merged.len() - 1];
                let a = &merged[merged.len() - 2];
                // Middle point is redundant iff slopes agree:
                // (b.y - a.y)(p.x - b.x) == (p.y - b.y)(b.x - a.x)
                let lhs = (&b.1 - &a.1) * (&p.0 - &b.0);
                let rhs = (&p.1 - &b.1) * (&b.0 - &a.0);
                if lhs == rhs {
                    merged.pop();
                } else {
                    break;
                }
            }
            merged.push(p);
        }
        Ok(PLMap { points: merged })
    }

    pub fn breakpoints(&self) -> &[(Rat, Rat)] {
        &self.points
    }

    pub fn domain(&self) -> Interval {
        Interval::new(self.points[0].0.clone(), self.points[self.points.len() - 1].0.clone())
            .expect("breakpoints are increasing")
    }

    /// Exact hull of the range (for a PL map the extrema sit at breakpoints).
    pub fn codomain_hull(&self) -> Interval {
        let mut lo = self.points[0].1.clone();
        let mut hi = lo.clone();
        for (_, y) in &self.points[1..] {
            if y < &lo {
                lo = y.clone();
            }
            if y > &hi {
                hi = y.clone();
            }
        }
        Interval::new(lo, hi).expect("min <= max")
    }

    pub fn is_self_map(&self) -> bool {
        self.domain().contains_interval(&self.codomain_hull())
    }

    pub(crate) fn piece_count(&self) -> usize {
        self.points.len() - 1
    }

    pub(crate) fn piece(&self, i: usize) -> (&(Rat, Rat), &(Rat, Rat)) {
        (&self.points[i], &self.points[i + 1])
    }

    pub(crate) fn piece_slope(&self, i: usize) -> Rat {
        let (a, b) = self.piece(i);
        (&b.1 - &a.1) / (&b.0 - &a.0)
    }

    fn piece_sign(&self, i: usize) -> Sign {
        let (a, b) = self.piece(i);
        match b.1.cmp(&a.1) {
            std::cmp::Ordering::Less => Sign::Neg,
            std::cmp::Ordering::Equal => Sign::Zero,
            std::cmp::Ordering::Greater => Sign::Pos,
        }
    }

    /// Exact evaluation. At a breakpoint the stored y is returned; elsewhere
    /// the surrounding segment is interpolated.
    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        let n = self.points.len();
        if x < &self.points[0].0 || x > &self.points[n - 1].0 {
            return Err(Error::Domain(format!(
                "point {} outside domain {}",
                x,
                self.domain()
            )));
        }
        // Index of the first breakpoint with x_i >= x.
        let idx = self.points.partition_point(|(px, _)| px < x);
        let (px, py) = &self.points[idx];
        if px == x {
            return Ok(py.clone());
        }
        let (x0, y0) = &self.points[idx - 1];
        Ok(y0 + &((py - y0) * &(x - x0) / (px - x0)))
    }

    /// Exact composition `outer ∘ inner`. Breakpoints of the result are the
    /// inner breakpoints together with every inner preimage of an outer
    /// breakpoint, so the result interpolates exactly.
    pub fn compose(outer: &PLMap, inner: &PLMap) -> Result<PLMap> {
        Self::compose_with_cap(outer, inner, DEFAULT_BREAKPOINT_CAP)
    }

    pub fn compose_with_cap(outer: &PLMap, inner: &PLMap, cap: usize) -> Result<PLMap> {
        if !outer.domain().contains_interval(&inner.codomain_hull()) {
            return Err(Error::Domain(format!(
                "inner range {} escapes outer domain {}",
                inner.codomain_hull(),
                outer.domain()
            )));
        }
        let mut xs: BTreeSet<Rat> = inner.points.iter().map(|(x, _)| x.clone()).collect();
        for (b, _) in &outer.points {
            for comp in inner.preimage(&Interval::point(b.clone())).iter() {
                xs.insert(comp.lo().clone());
                xs.insert(comp.hi().clone());
            }
            if xs.len() > cap {
                return Err(Error::Resource(format!(
                    "composition exceeds breakpoint cap {cap}"
                )));
            }
        }
        let mut points = Vec::with_capacity(xs.len());
        for x in xs {
            let y = outer.eval(&inner.eval(&x)?)?;
            points.push((x, y));
        }
        PLMap::new(points)
    }

    /// Exact n-th iterate (n >= 1). Requires a self-map.
    pub fn power(&self, n: u32) -> Result<PLMap> {
        self.power_with_cap(n, DEFAULT_BREAKPOINT_CAP)
    }

    pub fn power_with_cap(&self, n: u32, cap: usize) -> Result<PLMap> {
        if n == 0 {
            return Err(Error::Invalid("power of a map needs n >= 1".into()));
        }
        if !self.is_self_map() {
            return Err(Error::Domain(format!(
                "not a self-map: range {} escapes domain {}",
                self.codomain_hull(),
                self.domain()
            )));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = Self::compose_with_cap(self, &acc, cap)?;
        }
        Ok(acc)
    }

    /// Exact forward image of a subinterval of the domain.
    pub fn image(&self, j: &Interval) -> Result<Interval> {
        if !self.domain().contains_interval(j) {
            return Err(Error::Domain(format!(
                "interval {} outside domain {}",
                j,
                self.domain()
            )));
        }
        let mut lo = self.eval(j.lo())?;
        let mut hi = lo.clone();
        let mut push = |y: Rat| {
            if y < lo {
                lo = y;
            } else if y > hi {
                hi = y;
            }
        };
        push(self.eval(j.hi())?);
        // Interior breakpoints are the only other candidates for extrema.
        let start = self.points.partition_point(|(px, _)| px <= j.lo());
        for (px, py) in &self.points[start..] {
            if px >= j.hi() {
                break;
            }
            push(py.clone());
        }
        Ok(Interval::new(lo, hi).expect("min <= max"))
    }

    /// Exact preimage of a closed interval, as a disjoint union of closed
    /// intervals (plateau preimages contribute whole pieces, transversal
    /// crossings contribute solved endpoints).
    pub fn preimage(&self, target: &Interval) -> IntervalSet {
        let mut found: Vec<Interval> = Vec::new();
        for i in 0..self.piece_count() {
            let ((x0, y0), (x1, y1)) = self.piece(i);
            if y0 == y1 {
                if target.contains(y0) {
                    found.push(Interval::new(x0.clone(), x1.clone()).unwrap());
                }
                continue;
            }
            let piece_range = if y0 < y1 {
                Interval::new(y0.clone(), y1.clone()).unwrap()
            } else {
                Interval::new(y1.clone(), y0.clone()).unwrap()
            };
            let Some(overlap) = piece_range.intersection(target) else {
                continue;
            };
            let solve = |y: &Rat| -> Rat { x0 + &((x1 - x0) * &(y - y0) / (y1 - y0)) };
            let (a, b) = if y0 < y1 {
                (solve(overlap.lo()), solve(overlap.hi()))
            } else {
                (solve(overlap.hi()), solve(overlap.lo()))
            };
            found.push(Interval::new(a, b).unwrap());
        }
        IntervalSet::from_intervals(found)
    }

    /// Lap decomposition: maximal intervals of constant slope sign, in order.
    /// The laps tile the domain and adjacent laps carry different signs.
    pub fn laps(&self) -> Vec<Lap> {
        let mut laps: Vec<Lap> = Vec::new();
        for i in 0..self.piece_count() {
            let sign = self.piece_sign(i);
            match laps.last_mut() {
                Some(last) if last.sign == sign => {
                    last.interval =
                        Interval::new(last.interval.lo().clone(), self.points[i + 1].0.clone())
                            .unwrap();
                    last.pieces.1 = i;
                }
                _ => laps.push(Lap {
                    interval: Interval::new(
                        self.points[i].0.clone(),
                        self.points[i + 1].0.clone(),
                    )
                    .unwrap(),
                    sign,
                    pieces: (i, i),
                }),
            }
        }
        laps
    }

    /// Restricts the map to a nondegenerate subinterval of its domain.
    pub fn restrict(&self, j: &Interval) -> Result<PLMap> {
        if !self.domain().contains_interval(j) {
            return Err(Error::Domain(format!(
                "interval {} outside domain {}",
                j,
                self.domain()
            )));
        }
        if j.is_degenerate() {
            return Err(Error::Invalid("cannot restrict to a single point".into()));
        }
        let mut points = vec![(j.lo().clone(), self.eval(j.lo())?)];
        for (px, py) in &self.points {
            if px > j.lo() && px < j.hi() {
                points.push((px.clone(), py.clone()));
            }
        }
        points.push((j.hi().clone(), self.eval(j.hi())?));
        PLMap::new(points)
    }

    /// Unique solution of `self(x) = y` inside a strictly monotone lap.
    pub(crate) fn invert_on_lap(&self, lap: &Lap, y: &Rat) -> Result<Rat> {
        if lap.sign == Sign::Zero {
            return Err(Error::Cert("cannot invert on a plateau lap".into()));
        }
        let (first, last) = lap.pieces;
        for i in first..=last {
            let ((x0, y0), (x1, y1)) = self.piece(i);
            let (ylo, yhi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            if ylo <= y && y <= yhi {
                if y0 == y {
                    return Ok(x0.clone());
                }
                return Ok(x0 + &((x1 - x0) * &(y - y0) / (y1 - y0)));
            }
        }
        Err(Error::Cert(format!(
            "value {} not attained on lap {}",
            y, lap.interval
        )))
    }

    /// Lap count of the n-th iterate together with the growth estimate
    /// `ln(lap_count) / n`. The lap count is the exact contract; the decimal
    /// is display-only, rounded half-even to six places.
    pub fn lap_entropy_estimate(&self, n: u32) -> Result<LapGrowth> {
        self.lap_entropy_estimate_with_cap(n, DEFAULT_BREAKPOINT_CAP)
    }

    pub fn lap_entropy_estimate_with_cap(&self, n: u32, cap: usize) -> Result<LapGrowth> {
        let power = self.power_with_cap(n, cap)?;
        let lap_count = power.laps().len() as u64;
        let estimate = (lap_count as f64).ln() / f64::from(n);
        Ok(LapGrowth {
            n,
            lap_count,
            estimate_display_only: format!("{estimate:.6}"),
        })
    }
}

/// Exact lap count of an iterate plus its display-only entropy estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LapGrowth {
    pub n: u32,
    pub lap_count: u64,
    pub estimate_display_only: String,
}

#[derive(Serialize, Deserialize)]
struct PLMapFile {
    breakpoints: Vec<(Rat, Rat)>,
}

impl Serialize for PLMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PLMapFile { breakpoints: self.points.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PLMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<PLMap, D::Error> {
        let file = PLMapFile::deserialize(de)?;
        PLMap::new(file.breakpoints).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denjoy::tent_plateau;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn iv(lo: &str, hi: &str) -> Interval {
        Interval::new(r(lo), r(hi)).unwrap()
    }

    fn map(pts: &[(&str, &str)]) -> PLMap {
        PLMap::new(pts.iter().map(|(x, y)| (r(x), r(y))).collect()).unwrap()
    }

    #[test]
    fn construction_rejects_non_increasing_x() {
        assert!(PLMap::new(vec![(r("0"), r("0")), (r("0"), r("1"))]).is_err());
        assert!(PLMap::new(vec![(r("1"), r("0")), (r("0"), r("1"))]).is_err());
        assert!(PLMap::new(vec![(r("0"), r("0"))]).is_err());
    }

    #[test]
    fn collinear_breakpoints_merge() {
        let a = map(&[("0", "0"), ("1/2", "1/2"), ("1", "1")]);
        let b = map(&[("0", "0"), ("1", "1")]);
        assert_eq!(a, b);
        assert_eq!(a.breakpoints().len(), 2);
    }

    #[test]
    fn eval_matches_tent_values() {
        let g = tent_plateau();
        assert_eq!(g.eval(&r("0")).unwrap(), r("0"));
        assert_eq!(g.eval(&r("1/3")).unwrap(), r("1"));
        assert_eq!(g.eval(&r("1/2")).unwrap(), r("1"));
        assert_eq!(g.eval(&r("3/4")).unwrap(), r("3/4"));
        assert_eq!(g.eval(&r("9/10")).unwrap(), r("3/10"));
        assert!(g.eval(&r("-1")).is_err());
        assert!(g.eval(&r("2")).is_err());
    }

    #[test]
    fn compose_evaluates_pointwise() {
        let g = tent_plateau();
        let gg = PLMap::compose(&g, &g).unwrap();
        assert_eq!(gg.eval(&r("1/9")).unwrap(), r("1"));
        assert_eq!(gg.eval(&r("1/2")).unwrap(), r("0"));
        assert_eq!(gg.eval(&r("3/10")).unwrap(), r("3/10"));
    }

    #[test]
    fn compose_with_identity_is_identity_on_breakpoints() {
        let g = tent_plateau();
        let id = map(&[("0", "0"), ("1", "1")]);
        assert_eq!(PLMap::compose(&id, &g).unwrap(), g);
        assert_eq!(PLMap::compose(&g, &id).unwrap(), g);
    }

    #[test]
    fn compose_rejects_range_escape() {
        let double = map(&[("0", "0"), ("1", "2")]);
        let g = tent_plateau();
        assert!(PLMap::compose(&g, &double).is_err());
    }

    #[test]
    fn compose_respects_breakpoint_cap() {
        let g = tent_plateau();
        assert!(matches!(
            PLMap::compose_with_cap(&g, &g, 3),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn power_finds_period_two_orbit() {
        let g = tent_plateau();
        let g2 = g.power(2).unwrap();
        assert_eq!(g2.eval(&r("3/10")).unwrap(), r("3/10"));
        assert_eq!(g2.eval(&r("9/10")).unwrap(), r("9/10"));
        assert!(g.power(0).is_err());
    }

    #[test]
    fn image_handles_plateaus_and_degenerate_inputs() {
        let g = tent_plateau();
        assert_eq!(g.image(&iv("0", "1/3")).unwrap(), iv("0", "1"));
        assert_eq!(g.image(&iv("1/3", "2/3")).unwrap(), iv("1", "1"));
        assert_eq!(g.image(&iv("3/4", "3/4")).unwrap(), iv("3/4", "3/4"));
        assert_eq!(g.image(&iv("0", "1")).unwrap(), iv("0", "1"));
    }

    #[test]
    fn preimage_of_points_and_plateau_values() {
        let g = tent_plateau();
        let p = g.preimage(&Interval::point(r("3/10")));
        assert_eq!(p.components(), &[iv("1/10", "1/10"), iv("9/10", "9/10")]);
        let plateau = g.preimage(&Interval::point(r("1")));
        assert_eq!(plateau.components(), &[iv("1/3", "2/3")]);
        assert!(g.preimage(&Interval::point(r("2"))).is_empty());
    }

    #[test]
    fn preimage_duality_on_a_window() {
        let g = tent_plateau();
        let target = iv("1/4", "1/2");
        let pre = g.preimage(&target);
        assert_eq!(pre.components(), &[iv("1/12", "1/6"), iv("5/6", "11/12")]);
    }

    #[test]
    fn laps_of_tent_and_swap() {
        let g = tent_plateau();
        let laps = g.laps();
        assert_eq!(laps.len(), 3);
        assert_eq!(laps[0].interval, iv("0", "1/3"));
        assert_eq!(laps[0].sign, Sign::Pos);
        assert_eq!(laps[1].sign, Sign::Zero);
        assert_eq!(laps[2].interval, iv("2/3", "1"));
        assert_eq!(laps[2].sign, Sign::Neg);

        // Two descending pieces with different slopes form one lap.
        let s = crate::analysis::swap_map();
        let laps = s.laps();
        assert_eq!(laps.len(), 2);
        assert_eq!(laps[0].interval, iv("0", "1/4"));
        assert_eq!(laps[1].interval, iv("1/4", "1"));
        assert_eq!(laps[1].sign, Sign::Neg);
    }

    #[test]
    fn laps_of_the_squared_tent() {
        // Sign pattern of g∘g is +,0,-,0,+,0,-: seven laps.
        let g = tent_plateau();
        let gg = g.power(2).unwrap();
        let laps = gg.laps();
        assert_eq!(laps.len(), 7);
        let signs: Vec<Sign> = laps.iter().map(|l| l.sign).collect();
        assert_eq!(
            signs,
            vec![Sign::Pos, Sign::Zero, Sign::Neg, Sign::Zero, Sign::Pos, Sign::Zero, Sign::Neg]
        );
        assert_eq!(laps[0].interval, iv("0", "1/9"));
        assert_eq!(laps[3].interval, iv("1/3", "2/3"));
        assert_eq!(laps[6].interval, iv("8/9", "1"));
    }

    #[test]
    fn laps_tile_the_domain() {
        let g = tent_plateau();
        for m in [g.clone(), g.power(3).unwrap(), crate::analysis::swap_map()] {
            let laps = m.laps();
            assert_eq!(laps[0].interval.lo(), m.domain().lo());
            assert_eq!(laps[laps.len() - 1].interval.hi(), m.domain().hi());
            for pair in laps.windows(2) {
                assert_eq!(pair[0].interval.hi(), pair[1].interval.lo());
                assert_ne!(pair[0].sign, pair[1].sign);
            }
        }
    }

    #[test]
    fn restrict_keeps_interior_breakpoints() {
        let g = tent_plateau();
        let left = g.restrict(&iv("0", "1/2")).unwrap();
        assert_eq!(left.domain(), iv("0", "1/2"));
        assert_eq!(left.eval(&r("1/3")).unwrap(), r("1"));
        assert_eq!(left.eval(&r("1/2")).unwrap(), r("1"));
        assert!(left.eval(&r("2/3")).is_err());
    }

    #[test]
    fn entropy_estimate_for_flat_growth_is_zero() {
        let affine = map(&[("0", "0"), ("1", "1")]);
        let growth = affine.lap_entropy_estimate(5).unwrap();
        assert_eq!(growth.lap_count, 1);
        assert_eq!(growth.estimate_display_only, "0.000000");
    }

    #[test]
    fn entropy_estimate_for_tent_first_power() {
        let g = tent_plateau();
        let growth = g.lap_entropy_estimate(1).unwrap();
        assert_eq!(growth.lap_count, 3);
        assert_eq!(growth.estimate_display_only, "1.098612");
    }

    #[test]
    fn serde_roundtrip_and_rejections() {
        let g = tent_plateau();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(
            json,
            r#"{"breakpoints":[["0","0"],["1/3","1"],["2/3","1"],["1","0"]]}"#
        );
        let back: PLMap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);

        let bad = r#"{"breakpoints":[["0","0"],["1//3","1"]]}"#;
        let err = serde_json::from_str::<PLMap>(bad).unwrap_err();
        assert!(err.to_string().contains("line"), "error should carry a position: {err}");

        let unsorted = r#"{"breakpoints":[["1/3","1"],["0","0"]]}"#;
        assert!(serde_json::from_str::<PLMap>(unsorted).is_err());

        let unnormalized = r#"{"breakpoints":[["0","0"],["2/6","1"]]}"#;
        assert!(serde_json::from_str::<PLMap>(unnormalized).is_err());
    }
}
