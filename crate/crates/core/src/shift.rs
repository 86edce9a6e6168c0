//! One-sided symbolic sequences and itinerary coding.
//!
//! [`Word`] is a finite block over a finite alphabet `{0, .., m-1}`.
//! [`EPSeq`] is an eventually periodic one-sided infinite sequence stored in
//! canonical form: the period is primitive (not a power of a shorter block)
//! and the preperiod is as short as possible, so structural equality is
//! semantic equality and shift orbits can be compared exactly.
//!
//! Text notation writes preperiod then period in parentheses: `"01(10)"` is
//! `0,1,1,0,1,0,...`. Alphabets up to 10 print one digit per symbol; larger
//! alphabets separate symbols with dots (`"1(3.13)"`), since bare digits
//! would be ambiguous.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::plmap::PLMap;
use crate::rat::Rat;

/// Finite word over an alphabet `{0, .., alphabet-1}` with `alphabet >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<u32>,
    alphabet: u32,
}

impl Word {
    pub fn new(symbols: Vec<u32>, alphabet: u32) -> Result<Word> {
        if alphabet < 2 {
            return Err(Error::Invalid(format!("alphabet size {alphabet} < 2")));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet) {
            return Err(Error::Invalid(format!(
                "symbol {bad} outside alphabet of size {alphabet}"
            )));
        }
        Ok(Word { symbols, alphabet })
    }

    pub fn empty(alphabet: u32) -> Result<Word> {
        Word::new(Vec::new(), alphabet)
    }

    /// Binary word of length `len` reading the low `len` bits of `bits`,
    /// most significant first. Enumerating `bits` in `0..2^len` enumerates
    /// all binary words of that length in lexicographic order.
    pub fn from_bits(bits: u64, len: usize) -> Word {
        assert!(len <= 64);
        let symbols = (0..len)
            .map(|i| ((bits >> (len - 1 - i)) & 1) as u32)
            .collect();
        Word { symbols, alphabet: 2 }
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Everything after the first symbol.
    pub fn tail(&self) -> Word {
        Word {
            symbols: self.symbols.get(1..).unwrap_or_default().to_vec(),
            alphabet: self.alphabet,
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word {
            symbols: self.symbols[..len.min(self.symbols.len())].to_vec(),
            alphabet: self.alphabet,
        }
    }

    fn render(&self) -> String {
        if self.alphabet <= 10 {
            self.symbols.iter().map(|s| s.to_string()).collect()
        } else {
            self.symbols
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Smallest p dividing `len` such that the word is the (len/p)-fold repeat
/// of its first p symbols.
fn primitive_root_len(symbols: &[u32]) -> usize {
    let n = symbols.len();
    for p in 1..=n {
        if n.is_multiple_of(p) && (p..n).all(|i| symbols[i] == symbols[i - p]) {
            return p;
        }
    }
    n
}

/// Eventually periodic one-sided sequence `preperiod · period^∞`, stored in
/// canonical form: primitive period, minimal preperiod.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EPSeq {
    preperiod: Word,
    period: Word,
}

impl EPSeq {
    pub fn new(preperiod: Word, period: Word) -> Result<EPSeq> {
        if preperiod.alphabet != period.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "preperiod over alphabet {}, period over alphabet {}",
                preperiod.alphabet, period.alphabet
            )));
        }
        if period.is_empty() {
            return Err(Error::Invalid("period block must be nonempty".into()));
        }
        let mut pre = preperiod.symbols;
        let mut per = period.symbols;
        per.truncate(primitive_root_len(&per));
        // Roll the preperiod into the period while its last symbol matches the
        // symbol the period would contribute at that position.
        while let Some(&last) = pre.last() {
            if last != *per.last().unwrap() {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        let alphabet = preperiod.alphabet;
        Ok(EPSeq {
            preperiod: Word { symbols: pre, alphabet },
            period: Word { symbols: per, alphabet },
        })
    }

    pub fn periodic(period: Word) -> Result<EPSeq> {
        let alphabet = period.alphabet;
        EPSeq::new(Word::empty(alphabet)?, period)
    }

    /// Parses the `"u(v)"` notation. The alphabet is inferred as
    /// `max(symbol) + 1`, but never less than `min_alphabet` or 2.
    pub fn parse(text: &str, min_alphabet: u32) -> Result<EPSeq> {
        let bad = |msg: &str| Error::Parse(format!("{msg}: {text:?}"));
        let open = text.find('(').ok_or_else(|| bad("missing '(' in sequence"))?;
        if !text.ends_with(')') {
            return Err(bad("sequence must end with ')'"));
        }
        let pre_text = &text[..open];
        let per_text = &text[open + 1..text.len() - 1];
        let parse_part = |part: &str| -> Result<Vec<u32>> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            if part.contains('.') {
                part.split('.')
                    .map(|tok| tok.parse::<u32>().map_err(|_| bad("bad symbol")))
                    .collect()
            } else {
                part.chars()
                    .map(|c| c.to_digit(10).ok_or_else(|| bad("bad symbol")))
                    .collect()
            }
        };
        let pre = parse_part(pre_text)?;
        let per = parse_part(per_text)?;
        if per.is_empty() {
            return Err(bad("period block must be nonempty"));
        }
        let alphabet = pre
            .iter()
            .chain(per.iter())
            .max()
            .map(|&m| m + 1)
            .unwrap_or(0)
            .max(min_alphabet)
            .max(2);
        EPSeq::new(Word::new(pre, alphabet)?, Word::new(per, alphabet)?)
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn alphabet(&self) -> u32 {
        self.preperiod.alphabet
    }

    pub fn symbol_at(&self, i: usize) -> u32 {
        let pre = self.preperiod.len();
        if i < pre {
            self.preperiod.symbols[i]
        } else {
            self.period.symbols[(i - pre) % self.period.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        let symbols = (0..len).map(|i| self.symbol_at(i)).collect();
        Word { symbols, alphabet: self.alphabet() }
    }

    /// Drops the first symbol. The result is canonical again.
    pub fn shift(&self) -> EPSeq {
        let (pre, per) = if self.preperiod.is_empty() {
            let mut per = self.period.symbols.clone();
            per.rotate_left(1);
            (Vec::new(), per)
        } else {
            (self.preperiod.symbols[1..].to_vec(), self.period.symbols.clone())
        };
        let alphabet = self.alphabet();
        EPSeq::new(Word { symbols: pre, alphabet }, Word { symbols: per, alphabet })
            .expect("shift preserves validity")
    }

    pub fn shift_n(&self, n: usize) -> EPSeq {
        let mut s = self.clone();
        for _ in 0..n {
            s = s.shift();
        }
        s
    }
}

impl fmt::Display for EPSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.preperiod.render(), self.period.render())
    }
}

/// Least n with `shift^n(p) = shift^n(q)`, or `None` if the tails never
/// merge. Exact decision: beyond the longer preperiod both sequences cycle
/// with period `lcm(|v_p|, |v_q|)`, so scanning that far is conclusive.
pub fn asymptotic_resolve(p: &EPSeq, q: &EPSeq) -> Result<Option<usize>> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "cannot compare sequences over alphabets {} and {}",
            p.alphabet(),
            q.alphabet()
        )));
    }
    let reach = p.preperiod.len().max(q.preperiod.len());
    let cycle = p.period.len().lcm(&q.period.len());
    let mut sp = p.clone();
    let mut sq = q.clone();
    for n in 0..reach + cycle {
        if sp == sq {
            return Ok(Some(n));
        }
        sp = sp.shift();
        sq = sq.shift();
    }
    Ok(None)
}

/// Recodes a sequence by non-overlapping k-blocks, each block read as a
/// big-endian base-m value, producing a sequence over the alphabet `m^k`.
/// This conjugates the k-th power of the shift to the shift:
/// `power_block_encode(shift_n(s, k), k) == power_block_encode(s, k).shift()`.
pub fn power_block_encode(s: &EPSeq, k: usize) -> Result<EPSeq> {
    if k == 0 {
        return Err(Error::Invalid("block size must be at least 1".into()));
    }
    let m = s.alphabet();
    let big = u64::from(m)
        .checked_pow(k as u32)
        .filter(|&v| v <= u64::from(u32::MAX))
        .ok_or_else(|| {
            Error::Invalid(format!("block alphabet {m}^{k} exceeds the symbol range"))
        })? as u32;
    let block_value = |start: usize| -> u32 {
        let mut v: u64 = 0;
        for j in 0..k {
            v = v * u64::from(m) + u64::from(s.symbol_at(start + j));
        }
        v as u32
    };
    // Blocks from here on sample only the periodic tail.
    let pre_blocks = s.preperiod.len().div_ceil(k);
    let per_blocks = s.period.len() / s.period.len().gcd(&k);
    let pre: Vec<u32> = (0..pre_blocks).map(|i| block_value(i * k)).collect();
    let per: Vec<u32> = (pre_blocks..pre_blocks + per_blocks)
        .map(|i| block_value(i * k))
        .collect();
    EPSeq::new(Word::new(pre, big)?, Word::new(per, big)?)
}

/// Labeled, pairwise disjoint closed cells inside a map's domain, used to
/// read itineraries. Overlapping cells or duplicate labels are rejected here
/// so the coding itself never has to disambiguate.
#[derive(Debug, Clone)]
pub struct Cells {
    /// Sorted by interval position.
    cells: Vec<(u32, Interval)>,
    alphabet: u32,
}

impl Cells {
    pub fn new(mut cells: Vec<(u32, Interval)>) -> Result<Cells> {
        if cells.is_empty() {
            return Err(Error::Invalid("no cells given".into()));
        }
        cells.sort_by(|a, b| a.1.lo().cmp(b.1.lo()));
        for pair in cells.windows(2) {
            if pair[0].1.hi() >= pair[1].1.lo() {
                return Err(Error::Invalid(format!(
                    "cells {} and {} are not disjoint",
                    pair[0].1, pair[1].1
                )));
            }
        }
        let mut labels: Vec<u32> = cells.iter().map(|(l, _)| *l).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != cells.len() {
            return Err(Error::Invalid("duplicate cell labels".into()));
        }
        let alphabet = cells.iter().map(|(l, _)| l + 1).max().unwrap().max(2);
        Ok(Cells { cells, alphabet })
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    /// Label of the unique cell containing x, if any.
    pub fn locate(&self, x: &Rat) -> Option<u32> {
        let idx = self.cells.partition_point(|(_, c)| c.lo() <= x);
        (idx > 0 && self.cells[idx - 1].1.contains(x)).then(|| self.cells[idx - 1].0)
    }
}

/// Reads the length-n itinerary of x through the cells under iteration of m:
/// symbol j labels the cell containing `m^j(x)`. Returns `None` as soon as an
/// iterate escapes every cell.
pub fn itinerary(m: &PLMap, cells: &Cells, x: &Rat, n: usize) -> Result<Option<Word>> {
    if !m.domain().contains(x) {
        return Err(Error::Domain(format!(
            "point {} outside domain {}",
            x,
            m.domain()
        )));
    }
    let mut symbols = Vec::with_capacity(n);
    let mut current = x.clone();
    for step in 0..n {
        match cells.locate(&current) {
            None => return Ok(None),
            Some(label) => symbols.push(label),
        }
        if step + 1 < n {
            current = m.eval(&current)?;
        }
    }
    Ok(Some(Word { symbols, alphabet: cells.alphabet() }))
}

/// True when x stays inside the cells for n steps, i.e. the depth-n itinerary
/// exists.
pub fn cantor_depth_check(m: &PLMap, cells: &Cells, x: &Rat, n: usize) -> Result<bool> {
    Ok(itinerary(m, cells, x, n)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denjoy::tent_plateau;

    fn seq(text: &str) -> EPSeq {
        EPSeq::parse(text, 2).unwrap()
    }

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn iv(lo: &str, hi: &str) -> Interval {
        Interval::new(r(lo), r(hi)).unwrap()
    }

    #[test]
    fn word_construction_checks_alphabet() {
        assert!(Word::new(vec![0, 1, 2], 2).is_err());
        assert!(Word::new(vec![0, 1], 1).is_err());
        assert!(Word::new(vec![0, 1, 1], 2).is_ok());
    }

    #[test]
    fn canonicalization_reduces_period_and_preperiod() {
        // Period 0101 reduces to 01.
        let s = EPSeq::new(Word::empty(2).unwrap(), Word::new(vec![0, 1, 0, 1], 2).unwrap())
            .unwrap();
        assert_eq!(s.to_string(), "(01)");
        // Preperiod symbols that agree with the rotated period roll in.
        let s = EPSeq::new(
            Word::new(vec![0, 1, 1], 2).unwrap(),
            Word::new(vec![0, 1], 2).unwrap(),
        )
        .unwrap();
        assert_eq!(s.to_string(), "01(10)");
        // "01(1)" is "0(1)".
        assert_eq!(seq("01(1)").to_string(), "0(1)");
    }

    #[test]
    fn canonical_forms_expand_to_the_same_symbols() {
        let raw = EPSeq::new(
            Word::new(vec![0, 1, 1], 2).unwrap(),
            Word::new(vec![0, 1], 2).unwrap(),
        )
        .unwrap();
        let expected = [0, 1, 1, 0, 1, 0, 1, 0, 1, 0];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(raw.symbol_at(i), e, "symbol {i}");
        }
    }

    #[test]
    fn shift_follows_the_worked_examples() {
        assert_eq!(seq("0(1)").shift().to_string(), "(1)");
        assert_eq!(seq("(01)").shift().to_string(), "(10)");
        assert_eq!(seq("011(01)").shift().to_string(), "1(10)");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(EPSeq::parse("01", 2).is_err());
        assert!(EPSeq::parse("01()", 2).is_err());
        assert!(EPSeq::parse("0(1", 2).is_err());
        assert!(EPSeq::parse("0(x)", 2).is_err());
    }

    #[test]
    fn dotted_notation_roundtrips_large_alphabets() {
        let s = EPSeq::new(Word::new(vec![1], 16).unwrap(), Word::new(vec![3, 13], 16).unwrap())
            .unwrap();
        assert_eq!(s.to_string(), "1(3.13)");
        let back = EPSeq::parse("1(3.13)", 16).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn asymptotic_resolution_examples() {
        assert_eq!(asymptotic_resolve(&seq("0(1)"), &seq("1(1)")).unwrap(), Some(1));
        assert_eq!(asymptotic_resolve(&seq("(01)"), &seq("(10)")).unwrap(), None);
        assert_eq!(asymptotic_resolve(&seq("01(1)"), &seq("10(1)")).unwrap(), Some(2));
        assert_eq!(asymptotic_resolve(&seq("(0)"), &seq("(0)")).unwrap(), Some(0));
    }

    #[test]
    fn asymptotic_requires_matching_alphabets() {
        let p = seq("(01)");
        let q = EPSeq::parse("(2)", 3).unwrap();
        assert!(matches!(
            asymptotic_resolve(&p, &q),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn block_encoding_examples() {
        let s = power_block_encode(&seq("(01)"), 2).unwrap();
        assert_eq!(s.alphabet(), 4);
        assert_eq!(s.to_string(), "(1)");

        let s = power_block_encode(&seq("0(1)"), 2).unwrap();
        assert_eq!(s.to_string(), "1(3)");
    }

    #[test]
    fn block_encoding_conjugates_the_power_shift() {
        for text in ["(01)", "0(1)", "0110(010)", "(1101)", "10(0011)"] {
            let s = seq(text);
            for k in 1..=4 {
                let lhs = power_block_encode(&s.shift_n(k), k).unwrap();
                let rhs = power_block_encode(&s, k).unwrap().shift();
                assert_eq!(lhs, rhs, "s = {s}, k = {k}");
            }
        }
    }

    #[test]
    fn cells_reject_overlap_and_duplicates() {
        assert!(Cells::new(vec![(0, iv("0", "1/2")), (1, iv("1/2", "1"))]).is_err());
        assert!(Cells::new(vec![(0, iv("0", "1/3")), (0, iv("2/3", "1"))]).is_err());
        assert!(Cells::new(vec![(0, iv("0", "1/3")), (1, iv("2/3", "1"))]).is_ok());
    }

    #[test]
    fn itineraries_on_the_plateau_tent() {
        let g = tent_plateau();
        let cells = Cells::new(vec![(0, iv("0", "1/3")), (1, iv("2/3", "1"))]).unwrap();
        let w = itinerary(&g, &cells, &r("3/4"), 5).unwrap().unwrap();
        assert_eq!(w.symbols(), &[1, 1, 1, 1, 1]);
        let w = itinerary(&g, &cells, &r("0"), 4).unwrap().unwrap();
        assert_eq!(w.symbols(), &[0, 0, 0, 0]);
        assert_eq!(itinerary(&g, &cells, &r("1/2"), 1).unwrap(), None);
        assert!(itinerary(&g, &cells, &r("2"), 1).is_err());
    }

    #[test]
    fn cantor_membership_via_itineraries() {
        let g = tent_plateau();
        let cells = Cells::new(vec![(0, iv("0", "1/3")), (1, iv("2/3", "1"))]).unwrap();
        assert!(cantor_depth_check(&g, &cells, &r("3/4"), 50).unwrap());
        assert!(cantor_depth_check(&g, &cells, &r("1/10"), 3).unwrap());
        assert!(!cantor_depth_check(&g, &cells, &r("1/2"), 1).unwrap());
    }

    #[test]
    fn itinerary_prefix_extension_is_consistent() {
        let g = tent_plateau();
        let cells = Cells::new(vec![(0, iv("0", "1/3")), (1, iv("2/3", "1"))]).unwrap();
        let long = itinerary(&g, &cells, &r("1/10"), 3).unwrap().unwrap();
        let short = itinerary(&g, &cells, &r("1/10"), 2).unwrap().unwrap();
        assert_eq!(long.prefix(2), short);
    }
}
