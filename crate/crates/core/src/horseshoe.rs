//! Horseshoe certificates and the full-shift conjugacy they induce.
//!
//! A certificate `(r, J0, J1)` asserts that the r-th iterate of the map
//! stretches each of the two disjoint closed intervals across both, i.e.
//! `J0 ∪ J1 ⊆ f^r(J0) ∩ f^r(J1)`. Verification is exact. Over a verified
//! certificate, every binary word w pulls back to a closed interval `J_w`
//! (nested as the word grows on the left), and when the minimal expansion
//! rate over the certificate intervals exceeds one these pullbacks shrink to
//! points, giving the semiconjugacy to the full 2-shift that the self-test
//! exercises word by word.
//!
//! The batch operations (`conjugacy_self_test`, and the table sweeps built on
//! it) fan out across words; with the `parallel` feature they run on rayon
//! and merge deterministically, and `*_seq` variants always compile for
//! comparison.

use std::collections::HashMap;
use std::sync::RwLock;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::plmap::{Lap, PLMap, Sign, DEFAULT_BREAKPOINT_CAP};
use crate::rat::Rat;
use crate::shift::{itinerary, Cells, Word};

/// Above this many words a self-test samples instead of enumerating.
pub const EXHAUSTIVE_WORD_LIMIT: usize = 4096;
/// Default sample size for sampled self-tests.
pub const DEFAULT_SAMPLED_WORDS: usize = 500;

const SAMPLE_SEED: u64 = 0x5EED_2026;

/// Certificate that `f^r` maps each of `J0`, `J1` across `J0 ∪ J1`.
///
/// Serializes as `{"r": 1, "J0": ["0", "1/3"], "J1": ["2/3", "1"]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorseshoeCert {
    pub r: u32,
    #[serde(rename = "J0")]
    pub j0: Interval,
    #[serde(rename = "J1")]
    pub j1: Interval,
}

/// Exact covering check: `J0`, `J1` disjoint (with `J0` to the left) and
/// `J0 ∪ J1` contained in the image of each under `f^r`.
pub fn verify_horseshoe(f: &PLMap, cert: &HorseshoeCert) -> Result<bool> {
    if cert.r == 0 {
        return Err(Error::Invalid("certificate power r must be >= 1".into()));
    }
    let domain = f.domain();
    if !domain.contains_interval(&cert.j0) || !domain.contains_interval(&cert.j1) {
        return Err(Error::Domain(format!(
            "certificate intervals must lie in the domain {domain}"
        )));
    }
    if cert.j0.hi() >= cert.j1.lo() {
        return Ok(false);
    }
    let fr = f.power(cert.r)?;
    let im0 = fr.image(&cert.j0)?;
    let im1 = fr.image(&cert.j1)?;
    Ok(im0.contains_interval(&cert.j0)
        && im0.contains_interval(&cert.j1)
        && im1.contains_interval(&cert.j0)
        && im1.contains_interval(&cert.j1))
}

/// Bounded search for a horseshoe certificate.
///
/// For each power r = 1, .., r_max it scans every ordered pair of
/// strictly monotone laps of `f^r` whose images both contain the hull of the
/// pair, shrinks each lap to the minimal closed subinterval mapping exactly
/// onto that hull, and accepts the pair if the shrunk intervals are disjoint
/// (an adjacent pair can collapse onto a shared endpoint; the search then
/// moves on, reaching the next power if nothing else qualifies). Among the
/// certificates found at the smallest feasible r, the lexicographically
/// first by (J0 lower end, J1 lower end) is returned, so the result is
/// deterministic. Returns `None` when no power up to r_max works.
pub fn find_horseshoe(f: &PLMap, r_max: u32) -> Result<Option<HorseshoeCert>> {
    find_horseshoe_with_cap(f, r_max, DEFAULT_BREAKPOINT_CAP)
}

/// [`find_horseshoe`] with an explicit breakpoint cap on the iterated
/// composition.
pub fn find_horseshoe_with_cap(
    f: &PLMap,
    r_max: u32,
    cap: usize,
) -> Result<Option<HorseshoeCert>> {
    if r_max == 0 {
        return Err(Error::Invalid("search needs r_max >= 1".into()));
    }
    let mut fr: Option<PLMap> = None;
    for r in 1..=r_max {
        fr = Some(match fr {
            None => f.clone(),
            Some(prev) => PLMap::compose_with_cap(f, &prev, cap)?,
        });
        let power = fr.as_ref().unwrap();
        let laps: Vec<Lap> = power
            .laps()
            .into_iter()
            .filter(|lap| lap.sign != Sign::Zero)
            .collect();
        let images: Vec<Interval> = laps
            .iter()
            .map(|lap| power.image(&lap.interval))
            .collect::<Result<_>>()?;
        let mut best: Option<(Interval, Interval)> = None;
        for i in 0..laps.len() {
            for j in i + 1..laps.len() {
                let hull = Interval::new(
                    laps[i].interval.lo().clone(),
                    laps[j].interval.hi().clone(),
                )
                .expect("laps are ordered");
                if !images[i].contains_interval(&hull) || !images[j].contains_interval(&hull) {
                    continue;
                }
                let j0 = shrink_onto(power, &laps[i], &hull)?;
                let j1 = shrink_onto(power, &laps[j], &hull)?;
                if j0.hi() >= j1.lo() {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((b0, b1)) => {
                        (j0.lo(), j1.lo()) < (b0.lo(), b1.lo())
                    }
                };
                if better {
                    best = Some((j0, j1));
                }
            }
        }
        if let Some((j0, j1)) = best {
            return Ok(Some(HorseshoeCert { r, j0, j1 }));
        }
    }
    Ok(None)
}

/// Minimal closed subinterval of a strictly monotone lap mapping exactly
/// onto `target` (which the lap's image must contain).
fn shrink_onto(power: &PLMap, lap: &Lap, target: &Interval) -> Result<Interval> {
    let a = power.invert_on_lap(lap, target.lo())?;
    let b = power.invert_on_lap(lap, target.hi())?;
    Ok(match lap.sign {
        Sign::Pos => Interval::new(a, b),
        Sign::Neg => Interval::new(b, a),
        Sign::Zero => unreachable!("callers filter plateau laps"),
    }
    .expect("monotone inversion preserves order"))
}

/// Verified certificate together with everything pullbacks need: the
/// materialized power, the monotone laps carrying `J0` and `J1`, their hull,
/// and the disjoint coding cells.
struct CertScope {
    power: PLMap,
    lap0: Lap,
    lap1: Lap,
    hull: Interval,
    cells: Cells,
}

impl CertScope {
    fn new(f: &PLMap, cert: &HorseshoeCert) -> Result<CertScope> {
        if !verify_horseshoe(f, cert)? {
            return Err(Error::Cert(format!(
                "certificate (r = {}, J0 = {}, J1 = {}) does not verify",
                cert.r, cert.j0, cert.j1
            )));
        }
        let power = f.power(cert.r)?;
        let laps = power.laps();
        let lap0 = Self::carrier(&laps, &cert.j0)?;
        let lap1 = Self::carrier(&laps, &cert.j1)?;
        let hull = cert.j0.hull(&cert.j1);
        let cells = Cells::new(vec![(0, cert.j0.clone()), (1, cert.j1.clone())])?;
        Ok(CertScope { power, lap0, lap1, hull, cells })
    }

    /// The strictly monotone lap containing a certificate interval.
    fn carrier(laps: &[Lap], j: &Interval) -> Result<Lap> {
        laps.iter()
            .find(|lap| lap.sign != Sign::Zero && lap.interval.contains_interval(j))
            .cloned()
            .ok_or_else(|| {
                Error::Cert(format!(
                    "certificate interval {j} is not carried by a single monotone lap"
                ))
            })
    }

    fn check_symbols(&self, w: &Word) -> Result<()> {
        if let Some(&bad) = w.symbols().iter().find(|&&s| s > 1) {
            return Err(Error::Cert(format!(
                "pullback words are binary, symbol {bad} is not"
            )));
        }
        Ok(())
    }

    /// One pullback step: the subinterval of the chosen branch mapping
    /// exactly onto `target`.
    fn pull(&self, symbol: u32, target: &Interval) -> Result<Interval> {
        let lap = if symbol == 0 { &self.lap0 } else { &self.lap1 };
        shrink_onto(&self.power, lap, target)
    }

    /// `J_w`, computed back to front: `J_ε` is the hull and
    /// `J_{a·v} = branch_a^{-1}(J_v)`.
    fn interval(&self, w: &Word) -> Result<Interval> {
        self.check_symbols(w)?;
        let mut current = self.hull.clone();
        for &s in w.symbols().iter().rev() {
            current = self.pull(s, &current)?;
        }
        Ok(current)
    }

    /// Per-word self-test: pull the word back, then read the midpoint's
    /// itinerary through the certificate cells and compare.
    fn check_word(&self, w: &Word) -> Result<WordOutcome> {
        self.check_symbols(w)?;
        let mut diameters = Vec::with_capacity(w.len());
        let mut current = self.hull.clone();
        for &s in w.symbols().iter().rev() {
            current = self.pull(s, &current)?;
            diameters.push(current.diameter());
        }
        // diameters[i] is the diameter of the suffix of length i + 1.
        let mid = current.midpoint();
        let read = itinerary(&self.power, &self.cells, &mid, w.len())?;
        let pass = read.as_ref() == Some(w);
        Ok(WordOutcome { pass, diameters })
    }
}

struct WordOutcome {
    pass: bool,
    /// Diameter of the pulled-back suffix interval, by suffix length.
    diameters: Vec<Rat>,
}

/// Lazily filled table of word pullbacks over one verified certificate.
/// Distinct words may be requested concurrently; a repeated insert writes the
/// identical interval, so races are harmless.
pub struct WordIntervalTable {
    scope: CertScope,
    cache: RwLock<HashMap<Word, Interval>>,
}

impl WordIntervalTable {
    pub fn new(f: &PLMap, cert: &HorseshoeCert) -> Result<WordIntervalTable> {
        Ok(WordIntervalTable {
            scope: CertScope::new(f, cert)?,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Hull of the certificate intervals (`J_ε`).
    pub fn hull(&self) -> &Interval {
        &self.scope.hull
    }

    /// `J_w`, reusing every cached suffix of w and caching what it computes.
    pub fn interval(&self, w: &Word) -> Result<Interval> {
        self.scope.check_symbols(w)?;
        let symbols = w.symbols();
        let mut current = self.scope.hull.clone();
        let mut from = symbols.len();
        {
            let cache = self.cache.read().expect("cache lock");
            for i in 0..symbols.len() {
                let suffix = Word::new(symbols[i..].to_vec(), w.alphabet())?;
                if let Some(hit) = cache.get(&suffix) {
                    current = hit.clone();
                    from = i;
                    break;
                }
            }
        }
        if from == 0 {
            return Ok(current);
        }
        let mut fresh: Vec<(Word, Interval)> = Vec::with_capacity(from);
        for i in (0..from).rev() {
            current = self.scope.pull(symbols[i], &current)?;
            fresh.push((Word::new(symbols[i..].to_vec(), w.alphabet())?, current.clone()));
        }
        let mut cache = self.cache.write().expect("cache lock");
        for (word, interval) in fresh {
            cache.entry(word).or_insert(interval);
        }
        Ok(current)
    }

    pub fn cached_words(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }
}

/// Pullback interval `J_w` of a binary word over a verified certificate.
/// For repeated queries against one certificate use [`WordIntervalTable`].
pub fn pullback(f: &PLMap, cert: &HorseshoeCert, w: &Word) -> Result<Interval> {
    CertScope::new(f, cert)?.interval(w)
}

/// Exact enclosure of the point whose itinerary is w. With a singleton rate
/// above one the enclosure diameter shrinks like `rate^{-|w|}`, so iterating
/// this with longer words brackets the coded point as tightly as wanted.
pub fn point_for_itinerary(f: &PLMap, cert: &HorseshoeCert, w: &Word) -> Result<Interval> {
    pullback(f, cert, w)
}

/// Minimal absolute slope of `f^r` over the linear pieces that overlap the
/// certificate intervals in more than a point, provided it exceeds one; that
/// certifies infinite-word pullbacks are singletons. `None` means no
/// expansion rate is established, not that the certificate is wrong.
pub fn singleton_rate(f: &PLMap, cert: &HorseshoeCert) -> Result<Option<Rat>> {
    if !verify_horseshoe(f, cert)? {
        return Err(Error::Cert("singleton rate needs a verified certificate".into()));
    }
    let power = f.power(cert.r)?;
    let mut min_slope: Option<Rat> = None;
    for i in 0..power.piece_count() {
        let (a, b) = power.piece(i);
        let piece = Interval::new(a.0.clone(), b.0.clone()).expect("breakpoints increase");
        if piece.overlaps_interior(&cert.j0) || piece.overlaps_interior(&cert.j1) {
            let slope = power.piece_slope(i).abs();
            min_slope = Some(match min_slope {
                None => slope,
                Some(m) => m.min(slope),
            });
        }
    }
    let rate = min_slope
        .ok_or_else(|| Error::Cert("certificate intervals are degenerate".into()))?;
    Ok(if rate > Rat::one() { Some(rate) } else { None })
}

/// Entropy lower bound `log 2 / r` induced by a verified certificate for
/// `f^r`. Kept symbolic; the decimal is display-only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyBound {
    pub r: u32,
}

impl EntropyBound {
    pub fn symbolic(&self) -> String {
        if self.r == 1 {
            "log2".to_string()
        } else {
            format!("log2/{}", self.r)
        }
    }

    pub fn nats(&self) -> f64 {
        std::f64::consts::LN_2 / f64::from(self.r)
    }
}

impl std::fmt::Display for EntropyBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.symbolic())
    }
}

impl Serialize for EntropyBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EntropyBound", 3)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("bound", &self.symbolic())?;
        st.serialize_field("nats_display_only", &format!("{:.6}", self.nats()))?;
        st.end()
    }
}

pub fn entropy_lower_bound(cert: &HorseshoeCert) -> EntropyBound {
    EntropyBound { r: cert.r }
}

/// Word-by-word check that pullbacks and itineraries agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfTestReport {
    pub depth: usize,
    pub exhaustive: bool,
    pub words_checked: usize,
    pub passes: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    /// Largest pullback diameter seen at each depth 1..=depth, as exact
    /// rationals.
    pub max_diameter_per_depth: Vec<Rat>,
    pub all_pass: bool,
}

fn select_words(depth: usize, samples: Option<usize>) -> Result<(Vec<Word>, bool)> {
    if depth == 0 {
        return Err(Error::Invalid("self-test depth must be >= 1".into()));
    }
    let total = 1u128 << depth.min(127);
    let budget = match samples {
        Some(n) => n as u128,
        None => EXHAUSTIVE_WORD_LIMIT as u128,
    };
    if depth <= 63 && total <= budget {
        let words = (0..total as u64).map(|bits| Word::from_bits(bits, depth)).collect();
        return Ok((words, true));
    }
    if depth > 63 {
        return Err(Error::Invalid(format!(
            "sampled self-test supports depth <= 63, got {depth}"
        )));
    }
    let n = samples.unwrap_or(DEFAULT_SAMPLED_WORDS);
    let mask = (1u64 << depth) - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let words = (0..n).map(|_| Word::from_bits(rng.next_u64() & mask, depth)).collect();
    Ok((words, false))
}

fn assemble_report(
    depth: usize,
    exhaustive: bool,
    words: &[Word],
    outcomes: Vec<WordOutcome>,
) -> SelfTestReport {
    let mut passes = 0;
    let mut failures = 0;
    let mut first_failure = None;
    let mut max_diameter_per_depth = vec![Rat::zero(); depth];
    for (word, outcome) in words.iter().zip(outcomes) {
        if outcome.pass {
            passes += 1;
        } else {
            failures += 1;
            if first_failure.is_none() {
                first_failure = Some(word.to_string());
            }
        }
        for (d, diam) in outcome.diameters.into_iter().enumerate() {
            if diam > max_diameter_per_depth[d] {
                max_diameter_per_depth[d] = diam;
            }
        }
    }
    SelfTestReport {
        depth,
        exhaustive,
        words_checked: words.len(),
        passes,
        failures,
        first_failure,
        max_diameter_per_depth,
        all_pass: failures == 0,
    }
}

/// Checks, for every word of the given depth (or a deterministic sample when
/// there are more than [`EXHAUSTIVE_WORD_LIMIT`], or more than `samples` if
/// given), that the midpoint of `J_w` reads back the itinerary w. With the
/// `parallel` feature the words are checked on rayon; the merge is
/// deterministic either way.
pub fn conjugacy_self_test(
    f: &PLMap,
    cert: &HorseshoeCert,
    depth: usize,
    samples: Option<usize>,
) -> Result<SelfTestReport> {
    let scope = CertScope::new(f, cert)?;
    let (words, exhaustive) = select_words(depth, samples)?;
    #[cfg(feature = "parallel")]
    let outcomes: Vec<WordOutcome> = words
        .par_iter()
        .map(|w| scope.check_word(w))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<WordOutcome> = words
        .iter()
        .map(|w| scope.check_word(w))
        .collect::<Result<_>>()?;
    Ok(assemble_report(depth, exhaustive, &words, outcomes))
}

/// Sequential twin of [`conjugacy_self_test`], available regardless of
/// features; the bench suite compares the two.
pub fn conjugacy_self_test_seq(
    f: &PLMap,
    cert: &HorseshoeCert,
    depth: usize,
    samples: Option<usize>,
) -> Result<SelfTestReport> {
    let scope = CertScope::new(f, cert)?;
    let (words, exhaustive) = select_words(depth, samples)?;
    let outcomes: Vec<WordOutcome> = words
        .iter()
        .map(|w| scope.check_word(w))
        .collect::<Result<_>>()?;
    Ok(assemble_report(depth, exhaustive, &words, outcomes))
}
