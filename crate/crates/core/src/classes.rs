//! Size classes, shelf heights and packing ratios.
//!
//! Squares are split into large (`> 1/2`), medium (`(1/4, 1/2]`) and the
//! subclasses `c_k` covering `(0, 1/4]`. Subclass `c_k` holds heights in
//! `(h_k * r_k, h_k]` with `h_0 = 1/4` and `h_k = h_{k-1} * r_{k-1}`.
//!
//! Heights are evaluated as exact decimal products and rounded once, so the
//! table entries are the correctly rounded values of the true constants and
//! neighbouring intervals share their endpoint bit for bit.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Heights below this are treated as out of range.
pub const MIN_RESOLVABLE_HEIGHT: f64 = 1e-15;

/// Length of every vertical shelf (the height of a primary row).
pub const COLUMN_LENGTH: f64 = 0.25;

/// Ratio of the rows as integer percentages; index 3 repeats for every `k >= 3`.
const RATIO_PERCENT: [u32; 4] = [50, 71, 65, 58];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SizeClass {
    Large,
    Medium,
    /// `Sub(0)` is the small class, `Sub(k)` for `k >= 1` the very-small subclass `c_k`.
    Sub(u32),
}

impl SizeClass {
    pub fn is_very_small(self) -> bool {
        matches!(self, SizeClass::Sub(k) if k >= 1)
    }

    pub fn label(self) -> String {
        match self {
            SizeClass::Large => "large".to_string(),
            SizeClass::Medium => "medium".to_string(),
            SizeClass::Sub(k) => format!("c{k}"),
        }
    }

    pub fn parse(s: &str) -> Option<SizeClass> {
        match s {
            "large" => Some(SizeClass::Large),
            "medium" => Some(SizeClass::Medium),
            _ => s.strip_prefix('c')?.parse().ok().map(SizeClass::Sub),
        }
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for SizeClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for SizeClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SizeClass::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown class {s}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub k: u32,
    /// Largest admissible height `h_k`.
    pub max_height: f64,
    /// Packing ratio `r_k`.
    pub ratio: f64,
    /// Exclusive lower bound `h_k * r_k` (equal to `h_{k+1}`).
    pub min_height: f64,
}

/// Packing ratio of subclass `k`.
pub fn ratio(k: u32) -> f64 {
    match k {
        0 => 0.5,
        1 => 0.71,
        2 => 0.65,
        _ => 0.58,
    }
}

fn ratio_percent(k: usize) -> u32 {
    RATIO_PERCENT[k.min(3)]
}

/// Memoized `h_k` table, `h_0 = 0.25` down to the first entry below
/// [`MIN_RESOLVABLE_HEIGHT`] (kept so the last class has a lower bound).
fn heights() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // h_k = 25 * prod(r_j) / 100^(k+1), evaluated exactly.
        let mut numerator = BigUint::from(25u32);
        let mut table = Vec::new();
        let mut k = 0usize;
        loop {
            let h = exact_decimal_to_f64(&numerator, 2 * (k + 1));
            table.push(h);
            if h < MIN_RESOLVABLE_HEIGHT {
                break;
            }
            numerator *= ratio_percent(k);
            k += 1;
        }
        table
    })
}

/// Rounds `numerator / 10^scale` to the nearest f64 via the std decimal parser.
fn exact_decimal_to_f64(numerator: &BigUint, scale: usize) -> f64 {
    let digits = numerator.to_string();
    let text = if digits.len() > scale {
        let (int, frac) = digits.split_at(digits.len() - scale);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{}", "0".repeat(scale - digits.len()), digits)
    };
    text.parse().expect("decimal literal")
}

/// Number of subclasses with a resolvable height range.
pub fn subclass_count() -> u32 {
    (heights().len() - 1) as u32
}

/// `h_k` for subclass `k`.
pub fn max_height(k: u32) -> f64 {
    class_params(k).max_height
}

/// Returns `(h_k, r_k, h_k * r_k)`.
///
/// Indices past the resolvable range are extended by plain multiplication
/// and are never produced by [`classify`].
pub fn class_params(k: u32) -> ClassParams {
    let table = heights();
    let idx = k as usize;
    if idx + 1 < table.len() {
        return ClassParams {
            k,
            max_height: table[idx],
            ratio: ratio(k),
            min_height: table[idx + 1],
        };
    }
    let mut h = table[table.len() - 1];
    for _ in table.len() - 1..idx {
        h *= 0.58;
    }
    ClassParams {
        k,
        max_height: h,
        ratio: 0.58,
        min_height: h * 0.58,
    }
}

/// Maps a height in `(0, 1]` to its size class. Interval endpoints belong to
/// the class whose upper bound they are.
pub fn classify(height: f64) -> Result<SizeClass> {
    if !(height > 0.0 && height <= 1.0) {
        return Err(Error::InvalidHeight(height));
    }
    if height > 0.5 {
        return Ok(SizeClass::Large);
    }
    if height > 0.25 {
        return Ok(SizeClass::Medium);
    }
    let table = heights();
    for k in 0..table.len() - 1 {
        if height > table[k + 1] {
            return Ok(SizeClass::Sub(k as u32));
        }
    }
    Err(Error::HeightBelowResolution(height))
}

/// One density margin produced by [`validate_ratios`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCheck {
    pub k: u32,
    /// Worst-case closed-column density for this subclass.
    pub density_bound: f64,
    /// `density_bound - 1/2`; must be positive.
    pub margin: f64,
}

/// Checks that every closed vertical shelf is guaranteed a density above 1/2.
///
/// `c_1` columns always hold exactly two squares, giving `r_1^2`; deeper
/// subclasses use `r - h r^2 / l` with `l` the column length.
pub fn validate_ratios() -> Result<Vec<RatioCheck>> {
    let mut out = Vec::new();
    for k in 1..=subclass_count() {
        let p = class_params(k);
        let density_bound = if k == 1 {
            p.ratio * p.ratio
        } else {
            p.ratio - p.max_height * p.ratio * p.ratio / COLUMN_LENGTH
        };
        let margin = density_bound - 0.5;
        if margin.is_nan() || margin <= 0.0 {
            return Err(Error::ConstantsInconsistent { k, margin });
        }
        out.push(RatioCheck {
            k,
            density_bound,
            margin,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BufferGroup {
    /// `b3` and `b0` side by side in the third row.
    B0B3Row,
    /// `b1`, `b2` and the `b4+` columns in the top row.
    B1B2B4PlusRow,
}

/// Total width of a buffer row.
pub fn buffer_span(which: BufferGroup) -> f64 {
    match which {
        BufferGroup::B0B3Row => max_height(3) + 0.25,
        BufferGroup::B1B2B4PlusRow => {
            max_height(1) + max_height(2) + max_height(4) / (1.0 - ratio(4))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn top_level_classes() {
        assert_eq!(classify(0.75).unwrap(), SizeClass::Large);
        assert_eq!(classify(0.5).unwrap(), SizeClass::Medium);
        assert_eq!(classify(0.25).unwrap(), SizeClass::Sub(0));
        assert_eq!(classify(0.2).unwrap(), SizeClass::Sub(0));
        assert_eq!(classify(1.0).unwrap(), SizeClass::Large);
    }

    #[test]
    fn upper_bound_is_inclusive() {
        assert_eq!(classify(0.125).unwrap(), SizeClass::Sub(1));
        assert_eq!(classify(0.0576875).unwrap(), SizeClass::Sub(3));
    }

    #[test]
    fn c1_interval_from_direct_multiplication() {
        // (0.125 * 0.71, 0.125] = (0.08875, 0.125]
        assert_eq!(classify(0.09).unwrap(), SizeClass::Sub(1));
        assert_eq!(classify(0.08875).unwrap(), SizeClass::Sub(2));
        assert_eq!(classify(0.0888).unwrap(), SizeClass::Sub(1));
    }

    #[test]
    fn invalid_heights() {
        for h in [0.0, -0.1, 1.0000001, f64::NAN, f64::INFINITY] {
            assert!(matches!(classify(h), Err(Error::InvalidHeight(_))), "{h}");
        }
        assert!(matches!(
            classify(1e-16),
            Err(Error::HeightBelowResolution(_))
        ));
    }

    #[test]
    fn params_match_table() {
        let p2 = class_params(2);
        assert_eq!(p2.max_height, 0.08875);
        assert_eq!(p2.ratio, 0.65);
        let p3 = class_params(3);
        assert_eq!(p3.max_height, 0.0576875);
        assert_eq!(p3.ratio, 0.58);
        let p4 = class_params(4);
        assert_eq!(p4.max_height, 0.03345875);
        assert_eq!(p4.ratio, 0.58);
        assert_eq!(class_params(0).max_height, 0.25);
        assert_eq!(class_params(1).max_height, 0.125);
    }

    #[test]
    fn intervals_share_endpoints() {
        for k in 0..subclass_count() {
            assert_eq!(class_params(k).min_height, class_params(k + 1).max_height);
            let p = class_params(k);
            // the stored bound is the correctly rounded h_k * r_k
            assert!((p.min_height - p.max_height * p.ratio).abs() <= p.min_height * 1e-15);
        }
    }

    #[test]
    fn ratio_margins() {
        let checks = validate_ratios().unwrap();
        assert_eq!(checks.len() as u32, subclass_count());
        assert!((checks[0].density_bound - 0.5041).abs() < 1e-12);
        assert!((checks[1].density_bound - 0.5000125).abs() < 1e-12);
        assert!((checks[2].density_bound - 0.5023757).abs() < 1e-7);
        let tightest = checks
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .unwrap();
        assert_eq!(tightest.k, 2);
        assert!(checks.iter().all(|c| c.margin > 0.0));
    }

    #[test]
    fn buffer_spans() {
        assert_eq!(buffer_span(BufferGroup::B0B3Row), 0.3076875);
        assert!(buffer_span(BufferGroup::B0B3Row) < 0.308);
        let row = buffer_span(BufferGroup::B1B2B4PlusRow);
        let series = 0.25 * (0.5 * (1.0 + 0.71 * (1.0 + 0.65 * 0.58 / (1.0 - 0.58))));
        assert!((row - series).abs() < 1e-12);
        assert!((row - 0.2934137).abs() < 1e-6);
        assert!(row < 0.294);
        assert_eq!(max_height(1) + max_height(2), 0.21375);
    }

    #[test]
    fn labels_round_trip() {
        for c in [SizeClass::Large, SizeClass::Medium, SizeClass::Sub(0), SizeClass::Sub(17)] {
            assert_eq!(SizeClass::parse(&c.label()), Some(c));
        }
    }

    proptest! {
        #[test]
        fn classify_lands_in_its_interval(h in 1e-12..=0.25f64) {
            let SizeClass::Sub(k) = classify(h).unwrap() else { panic!() };
            let p = class_params(k);
            prop_assert!(h <= p.max_height && h > p.min_height);
        }

        #[test]
        fn classify_is_monotone(a in 1e-12..=1.0f64, b in 1e-12..=1.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let rank = |c: SizeClass| match c {
                SizeClass::Large => -2i64,
                SizeClass::Medium => -1,
                SizeClass::Sub(k) => k as i64,
            };
            prop_assert!(rank(classify(hi).unwrap()) <= rank(classify(lo).unwrap()));
        }
    }
}
