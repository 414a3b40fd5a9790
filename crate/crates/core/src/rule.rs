//! Interval rules `R(δ1δ2θ1θ2)`, equivalently `Bθ1..θ2/Sδ1..δ2`.
//!
//! A cell in state 0 is born when its live-neighbor count lies in the birth
//! interval; a live cell survives when the count lies in the survival
//! interval. Every other cell is (or becomes) dead.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors produced while parsing or constructing a rule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("malformed rule string {0:?}")]
    Malformed(String),
    #[error("interval [{lo},{hi}] is invalid: bounds must satisfy 0 <= lo <= hi <= 8")]
    Interval { lo: u8, hi: u8 },
    #[error("{side} set {digits:?} is not contiguous: count {missing} is missing")]
    NonContiguous { side: &'static str, digits: String, missing: u8 },
    #[error("{0} side is empty; an explicit interval is required")]
    EmptySide(&'static str),
}

/// Closed interval of neighbor counts, `lo..=hi` within `0..=8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: u8,
    hi: u8,
}

impl Interval {
    pub fn new(lo: u8, hi: u8) -> Result<Self, RuleError> {
        if lo > hi || hi > 8 {
            return Err(RuleError::Interval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub const fn lo(self) -> u8 {
        self.lo
    }

    pub const fn hi(self) -> u8 {
        self.hi
    }

    #[inline]
    pub const fn contains(self, count: u8) -> bool {
        count >= self.lo && count <= self.hi
    }

    /// All 45 valid intervals in lexicographic order.
    pub fn all() -> impl Iterator<Item = Interval> {
        (0..=8u8).flat_map(|lo| (lo..=8).map(move |hi| Interval { lo, hi }))
    }

    fn digits(self) -> String {
        (self.lo..=self.hi).map(|d| char::from(b'0' + d)).collect()
    }
}

/// A rule of the semi-totalistic interval family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleSpec {
    birth: Interval,
    survive: Interval,
}

/// Output notation for [`format_rule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleStyle {
    /// `R(δ1δ2θ1θ2)`
    R,
    /// `Bθ1..θ2/Sδ1..δ2` with explicit digit runs.
    BS,
}

impl RuleSpec {
    pub const fn from_intervals(birth: Interval, survive: Interval) -> Self {
        RuleSpec { birth, survive }
    }

    pub fn new(birth_lo: u8, birth_hi: u8, survive_lo: u8, survive_hi: u8) -> Result<Self, RuleError> {
        Ok(RuleSpec {
            birth: Interval::new(birth_lo, birth_hi)?,
            survive: Interval::new(survive_lo, survive_hi)?,
        })
    }

    /// The Diffusion Rule, B2/S7.
    pub const fn diffusion() -> Self {
        RuleSpec { birth: Interval { lo: 2, hi: 2 }, survive: Interval { lo: 7, hi: 7 } }
    }

    /// Conway's Life, B3/S23.
    pub const fn life() -> Self {
        RuleSpec { birth: Interval { lo: 3, hi: 3 }, survive: Interval { lo: 2, hi: 3 } }
    }

    pub const fn birth(&self) -> Interval {
        self.birth
    }

    pub const fn survive(&self) -> Interval {
        self.survive
    }

    /// Next state of a cell given its state and live-neighbor count.
    #[inline]
    pub const fn next_state(&self, alive: bool, count: u8) -> bool {
        if alive {
            self.survive.contains(count)
        } else {
            self.birth.contains(count)
        }
    }

    /// Bit `k` set iff a dead cell with `k` live neighbors is born.
    pub fn birth_mask(&self) -> u16 {
        interval_mask(self.birth)
    }

    /// Bit `k` set iff a live cell with `k` live neighbors survives.
    pub fn survive_mask(&self) -> u16 {
        interval_mask(self.survive)
    }

    /// True when the all-dead configuration is a fixed point.
    pub const fn is_quiescent(&self) -> bool {
        self.birth.lo >= 1
    }

    /// Every valid rule: 45 birth intervals times 45 survival intervals.
    pub fn all() -> impl Iterator<Item = RuleSpec> {
        Interval::all().flat_map(|b| Interval::all().map(move |s| RuleSpec::from_intervals(b, s)))
    }
}

fn interval_mask(iv: Interval) -> u16 {
    (iv.lo..=iv.hi).fold(0u16, |m, k| m | (1 << k))
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rule(self, RuleStyle::BS))
    }
}

impl FromStr for RuleSpec {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rule(s)
    }
}

impl serde::Serialize for RuleSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for RuleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rule(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses `R(abcd)` (a=δ1, b=δ2, c=θ1, d=θ2) or `Bm..n/Sp..q`.
///
/// Case-insensitive, surrounding whitespace ignored. Each B/S side is a
/// contiguous run of digits, or an explicit range written `lo...hi`.
pub fn parse_rule(text: &str) -> Result<RuleSpec, RuleError> {
    let s = text.trim().to_ascii_uppercase();
    let malformed = || RuleError::Malformed(text.to_string());

    if let Some(inner) = s.strip_prefix("R(").and_then(|r| r.strip_suffix(')')) {
        let digits: Vec<u8> = inner
            .trim()
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(malformed)?;
        let [d1, d2, t1, t2] = digits[..] else {
            return Err(malformed());
        };
        return RuleSpec::new(t1, t2, d1, d2);
    }

    let (b, rest) = s.split_once('/').ok_or_else(malformed)?;
    let (birth_txt, survive_txt) = match (b.trim().strip_prefix('B'), rest.trim().strip_prefix('S')) {
        (Some(b), Some(s)) => (b, s),
        _ => match (b.trim().strip_prefix('S'), rest.trim().strip_prefix('B')) {
            (Some(s), Some(b)) => (b, s),
            _ => return Err(malformed()),
        },
    };
    let birth = parse_side(birth_txt, "birth", text)?;
    let survive = parse_side(survive_txt, "survival", text)?;
    Ok(RuleSpec::from_intervals(birth, survive))
}

fn parse_side(txt: &str, side: &'static str, original: &str) -> Result<Interval, RuleError> {
    let txt = txt.trim();
    if txt.is_empty() {
        return Err(RuleError::EmptySide(side));
    }
    let malformed = || RuleError::Malformed(original.to_string());
    // Ellipsis form: "2...8" or "2…8".
    let ellipsis = txt.split_once("...").or_else(|| txt.split_once('…'));
    if let Some((lo, hi)) = ellipsis {
        let lo = single_digit(lo).ok_or_else(malformed)?;
        let hi = single_digit(hi).ok_or_else(malformed)?;
        return Interval::new(lo, hi);
    }
    let mut present = [false; 10];
    for c in txt.chars() {
        let d = c.to_digit(10).ok_or_else(malformed)? as usize;
        if present[d] {
            return Err(malformed());
        }
        present[d] = true;
    }
    let lo = present.iter().position(|&p| p).unwrap() as u8;
    let hi = present.iter().rposition(|&p| p).unwrap() as u8;
    if let Some(missing) = (lo..=hi).find(|&d| !present[d as usize]) {
        return Err(RuleError::NonContiguous { side, digits: txt.to_string(), missing });
    }
    Interval::new(lo, hi)
}

fn single_digit(s: &str) -> Option<u8> {
    let s = s.trim();
    let mut chars = s.chars();
    let d = chars.next()?.to_digit(10)? as u8;
    chars.next().is_none().then_some(d)
}

pub fn format_rule(rule: &RuleSpec, style: RuleStyle) -> String {
    match style {
        RuleStyle::R => format!(
            "R({}{}{}{})",
            rule.survive.lo, rule.survive.hi, rule.birth.lo, rule.birth.hi
        ),
        RuleStyle::BS => format!("B{}/S{}", rule.birth.digits(), rule.survive.digits()),
    }
}

/// The Life dc22 cluster: birth [2,2], survival [d,c] with 2 <= d <= c <= 8,
/// ordered lexicographically by (d, c).
pub fn enumerate_dc22() -> Vec<RuleSpec> {
    let birth = Interval { lo: 2, hi: 2 };
    (2..=8u8)
        .flat_map(|d| (d..=8).map(move |c| RuleSpec::from_intervals(birth, Interval { lo: d, hi: c })))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_notations_of_the_diffusion_rule() {
        let bs = parse_rule("B2/S7").unwrap();
        let r = parse_rule("R(7722)").unwrap();
        assert_eq!(bs, r);
        assert_eq!(bs, RuleSpec::diffusion());
        assert_eq!(bs.birth(), Interval::new(2, 2).unwrap());
        assert_eq!(bs.survive(), Interval::new(7, 7).unwrap());
    }

    #[test]
    fn r_notation_is_positional() {
        let life = parse_rule("R(2333)").unwrap();
        assert_eq!(life.birth(), Interval::new(3, 3).unwrap());
        assert_eq!(life.survive(), Interval::new(2, 3).unwrap());
        assert_eq!(life, RuleSpec::life());
    }

    #[test]
    fn case_and_whitespace_insensitive() {
        assert_eq!(parse_rule("  b2/s7\n").unwrap(), RuleSpec::diffusion());
        assert_eq!(parse_rule("r(7722)").unwrap(), RuleSpec::diffusion());
        assert_eq!(parse_rule("S7/B2").unwrap(), RuleSpec::diffusion());
    }

    #[test]
    fn rejects_non_contiguous_sets() {
        let err = parse_rule("B36/S23").unwrap_err();
        assert_eq!(err, RuleError::NonContiguous { side: "birth", digits: "36".into(), missing: 4 });
        assert!(err.to_string().contains("4 is missing"));
    }

    #[test]
    fn rejects_malformed_and_empty() {
        for bad in ["", "B2", "B2/S", "/S7", "Bx/S7", "R(772)", "R(77222)", "R(7a22)", "B22/S7", "B9/S7"] {
            assert!(parse_rule(bad).is_err(), "{bad:?} should be rejected");
        }
        assert_eq!(parse_rule("B2/S").unwrap_err(), RuleError::EmptySide("survival"));
        assert!(matches!(parse_rule("R(7732)"), Err(RuleError::Interval { lo: 3, hi: 2 })));
        assert!(matches!(parse_rule("R(7729)"), Err(RuleError::Interval { .. })));
    }

    #[test]
    fn ellipsis_ranges() {
        let r = parse_rule("B2/S2...8").unwrap();
        assert_eq!(r.survive(), Interval::new(2, 8).unwrap());
        assert_eq!(format_rule(&r, RuleStyle::BS), "B2/S2345678");
        assert_eq!(parse_rule("B2/S2…8").unwrap(), r);
    }

    #[test]
    fn formats() {
        let dr = RuleSpec::diffusion();
        assert_eq!(format_rule(&dr, RuleStyle::BS), "B2/S7");
        assert_eq!(format_rule(&dr, RuleStyle::R), "R(7722)");
        assert_eq!(format_rule(&RuleSpec::life(), RuleStyle::BS), "B3/S23");
        assert_eq!(format_rule(&RuleSpec::life(), RuleStyle::R), "R(2333)");
    }

    #[test]
    fn round_trip_over_every_rule() {
        let mut count = 0;
        let mut nonzero = 0;
        for rule in RuleSpec::all() {
            for style in [RuleStyle::R, RuleStyle::BS] {
                assert_eq!(parse_rule(&format_rule(&rule, style)).unwrap(), rule);
            }
            count += 1;
            if rule.birth().lo() >= 1 && rule.survive().lo() >= 1 {
                nonzero += 1;
            }
        }
        assert_eq!(count, 45 * 45);
        // The family of intervals inside 1..8 on both sides.
        assert_eq!(nonzero, 1296);
    }

    #[test]
    fn dc22_cluster() {
        let rules = enumerate_dc22();
        assert_eq!(rules.len(), 28);
        assert_eq!(rules[0].to_string(), "B2/S2");
        assert!(rules.contains(&RuleSpec::diffusion()));
        assert!(rules.iter().all(|r| r.birth() == Interval::new(2, 2).unwrap()));
        let mut sorted = rules.clone();
        sorted.sort_by_key(|r| (r.survive().lo(), r.survive().hi()));
        sorted.dedup();
        assert_eq!(sorted, rules);
    }

    #[test]
    fn masks() {
        let dr = RuleSpec::diffusion();
        assert_eq!(dr.birth_mask(), 1 << 2);
        assert_eq!(dr.survive_mask(), 1 << 7);
        assert!(dr.next_state(false, 2));
        assert!(!dr.next_state(true, 8));
    }
}
