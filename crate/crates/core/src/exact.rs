//! Exact real numbers of the form `c_1·√n_1 + … + c_k·√n_k` with rational
//! coefficients and positive integer radicands.
//!
//! Every distance, threshold and witness sum compared anywhere in the crate
//! lives in this field extension, so every comparison is decided exactly.
//! Radicands are kept in classes of rationally dependent roots (two roots
//! `√a`, `√b` are dependent iff `ab` is a perfect square), which makes the
//! zero test syntactic. A nonzero value is then separated from zero by
//! interval refinement, which terminates.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed rational {0:?}")]
    Rational(String),
    #[error("malformed threshold: {0}")]
    Threshold(String),
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.125"`.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let s = text.trim();
    let bad = || ParseError::Rational(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = BigRational::new(int_part * &scale + frac_part, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Splits `n = s² · m` pulling out squares of small primes only.
fn pull_small_squares(mut n: BigInt) -> (BigInt, BigInt) {
    let mut outside = BigInt::one();
    for p in SMALL_PRIMES {
        let sq = BigInt::from(p * p);
        while (&n % &sq).is_zero() {
            n /= &sq;
            outside *= p;
        }
    }
    (outside, n)
}

/// A finite `ℚ`-linear combination of square roots of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    // (radicand, coefficient); sorted by radicand, coefficients nonzero,
    // radicands pairwise independent.
    terms: Vec<(BigInt, BigRational)>,
}

impl Surd {
    pub fn zero() -> Self {
        Surd { terms: Vec::new() }
    }

    pub fn rational(q: BigRational) -> Self {
        let mut s = Surd::zero();
        s.add_term(BigInt::one(), q);
        s
    }

    pub fn integer(n: i64) -> Self {
        Surd::rational(BigRational::from_integer(n.into()))
    }

    /// `q·√2`.
    pub fn sqrt2_multiple(q: BigRational) -> Self {
        let mut s = Surd::zero();
        s.add_term(BigInt::from(2), q);
        s
    }

    /// `√q` for a nonnegative rational `q`.
    pub fn sqrt(q: &BigRational) -> Self {
        assert!(!q.is_negative(), "square root of a negative rational");
        // √(p/r) = √(p·r) / r
        let radicand = q.numer() * q.denom();
        let coefficient = BigRational::new(BigInt::one(), q.denom().clone());
        let mut s = Surd::zero();
        s.add_term(radicand, coefficient);
        s
    }

    fn add_term(&mut self, radicand: BigInt, coefficient: BigRational) {
        if coefficient.is_zero() || radicand.is_zero() {
            return;
        }
        let (outside, mut radicand) = pull_small_squares(radicand);
        let mut coefficient = coefficient * BigRational::from_integer(outside);
        if let Some(root) = is_perfect_square(&radicand) {
            coefficient *= BigRational::from_integer(root);
            radicand = BigInt::one();
        }
        for i in 0..self.terms.len() {
            let (m, _) = &self.terms[i];
            let dependent = if *m == radicand {
                Some(BigRational::one())
            } else {
                // √n = (√(nm)/m)·√m when nm is a square.
                is_perfect_square(&(&radicand * m))
                    .map(|root| BigRational::new(root, m.clone()))
            };
            if let Some(factor) = dependent {
                let c = &self.terms[i].1 + coefficient * factor;
                if c.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = c;
                }
                return;
            }
        }
        let at = self.terms.partition_point(|(m, _)| *m < radicand);
        self.terms.insert(at, (radicand, coefficient));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(r, c)] if r.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.terms.iter().map(|(r, c)| (r, c))
    }

    pub fn scale(&self, q: &BigRational) -> Surd {
        let mut out = Surd::zero();
        for (r, c) in &self.terms {
            out.add_term(r.clone(), c * q);
        }
        out
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                out.add_term(r1 * r2, c1 * c2);
            }
        }
        out
    }

    /// Rational enclosure `[lo, hi]` using `bits` fractional bits per root.
    fn enclosure(&self, bits: usize) -> (BigRational, BigRational) {
        let scale = BigInt::one() << bits;
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (r, c) in &self.terms {
            let (root_lo, root_hi) = if r.is_one() {
                (BigRational::one(), BigRational::one())
            } else {
                let scaled = (r << (2 * bits)).sqrt();
                (
                    BigRational::new(scaled.clone(), scale.clone()),
                    BigRational::new(scaled + 1, scale.clone()),
                )
            };
            if c.is_positive() {
                lo += c * &root_lo;
                hi += c * &root_hi;
            } else {
                lo += c * &root_hi;
                hi += c * &root_lo;
            }
        }
        (lo, hi)
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        if let Some(q) = self.as_rational() {
            return q.cmp(&BigRational::zero());
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    /// Outward-rounded `f64` enclosure of the value.
    pub fn f64_bounds(&self) -> (f64, f64) {
        if let Some(q) = self.as_rational() {
            let v = q.to_f64().unwrap_or(f64::NAN);
            if v.is_finite() {
                return (v.next_down(), v.next_up());
            }
        }
        let (lo, hi) = self.enclosure(64);
        let lo = lo.to_f64().unwrap_or(f64::NEG_INFINITY);
        let hi = hi.to_f64().unwrap_or(f64::INFINITY);
        if lo.is_nan() || hi.is_nan() {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        (lo.next_down(), hi.next_up())
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.f64_bounds();
        0.5 * (lo + hi)
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, other: &Surd) -> Surd {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.add_term(r.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, other: &Surd) -> Surd {
        let mut out = self.clone();
        for (r, c) in &other.terms {
            out.add_term(r.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c.clone())).collect(),
        }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if r.is_one() {
                write!(f, "{}", format_rational(c))?;
            } else {
                write!(f, "{}·√{}", format_rational(c), r)?;
            }
        }
        Ok(())
    }
}

/// A nonnegative exact scale parameter (ε, 2ε, γ, …) with a cached
/// floating-point enclosure used to short-circuit comparisons.
#[derive(Clone, Debug)]
pub struct Threshold {
    value: Surd,
    lo: f64,
    hi: f64,
}

impl PartialEq for Threshold {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}
impl Eq for Threshold {}

impl PartialOrd for Threshold {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Threshold {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.hi < other.lo {
            return Ordering::Less;
        }
        if self.lo > other.hi {
            return Ordering::Greater;
        }
        self.value.cmp(&other.value)
    }
}

impl Threshold {
    /// Wraps an exact value; `None` when it is negative.
    pub fn new(value: Surd) -> Option<Self> {
        if value.signum() == Ordering::Less {
            return None;
        }
        let (lo, hi) = value.f64_bounds();
        Some(Threshold { value, lo: lo.max(0.0), hi })
    }

    pub fn zero() -> Self {
        Threshold::new(Surd::zero()).unwrap()
    }

    pub fn rational(q: BigRational) -> Option<Self> {
        Threshold::new(Surd::rational(q))
    }

    pub fn sqrt2_multiple(q: BigRational) -> Option<Self> {
        Threshold::new(Surd::sqrt2_multiple(q))
    }

    /// `√q`, the natural form of a distance computed from a squared distance.
    pub fn sqrt_of(q: &BigRational) -> Self {
        Threshold::new(Surd::sqrt(q)).expect("square roots are nonnegative")
    }

    /// Convenience constructor used heavily in tests: `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Threshold::rational(BigRational::new(num.into(), den.into())).expect("nonnegative ratio")
    }

    pub fn value(&self) -> &Surd {
        &self.value
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn scale(&self, q: &BigRational) -> Option<Threshold> {
        Threshold::new(self.value.scale(q))
    }

    pub fn times(&self, k: i64) -> Threshold {
        self.scale(&BigRational::from_integer(k.abs().into())).expect("nonnegative multiple")
    }

    pub fn plus(&self, other: &Threshold) -> Threshold {
        Threshold::new(&self.value + &other.value).expect("sum of nonnegatives")
    }

    /// `self − other`, `None` when negative.
    pub fn minus(&self, other: &Threshold) -> Option<Threshold> {
        Threshold::new(&self.value - &other.value)
    }

    /// Compares `√q` with this threshold.
    pub fn cmp_sqrt(&self, q: &BigRational) -> Ordering {
        (&Surd::sqrt(q) - &self.value).signum()
    }

    /// Compares `Σ √q_i` with this threshold.
    pub fn cmp_sqrt_sum<'a>(&self, qs: impl IntoIterator<Item = &'a BigRational>) -> Ordering {
        let mut sum = Surd::zero();
        for q in qs {
            sum = &sum + &Surd::sqrt(q);
        }
        (&sum - &self.value).signum()
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

#[derive(Serialize, Deserialize)]
struct ThresholdRepr {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rational: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sqrt2_multiple: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    terms: Option<Vec<TermRepr>>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coefficient: String,
    radicand: String,
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<_> = self.value.terms().collect();
        let repr = match terms.as_slice() {
            [] => ThresholdRepr {
                rational: Some("0".into()),
                sqrt2_multiple: Some(false),
                terms: None,
            },
            [(r, c)] if r.is_one() || **r == BigInt::from(2) => ThresholdRepr {
                rational: Some(format_rational(c)),
                sqrt2_multiple: Some(!r.is_one()),
                terms: None,
            },
            _ => ThresholdRepr {
                rational: None,
                sqrt2_multiple: None,
                terms: Some(
                    terms
                        .iter()
                        .map(|(r, c)| TermRepr {
                            coefficient: format_rational(c),
                            radicand: r.to_string(),
                        })
                        .collect(),
                ),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ThresholdRepr::deserialize(deserializer)?;
        let value = if let Some(terms) = repr.terms {
            let mut sum = Surd::zero();
            for t in terms {
                let c = parse_rational(&t.coefficient).map_err(D::Error::custom)?;
                let r: BigInt = t
                    .radicand
                    .parse()
                    .map_err(|_| D::Error::custom(format!("bad radicand {:?}", t.radicand)))?;
                if !r.is_positive() {
                    return Err(D::Error::custom("radicand must be positive"));
                }
                let mut term = Surd::zero();
                term.add_term(r, c);
                sum = &sum + &term;
            }
            sum
        } else {
            let q = repr
                .rational
                .ok_or_else(|| D::Error::custom("threshold needs \"rational\" or \"terms\""))?;
            let q = parse_rational(&q).map_err(D::Error::custom)?;
            if repr.sqrt2_multiple.unwrap_or(false) {
                Surd::sqrt2_multiple(q)
            } else {
                Surd::rational(q)
            }
        };
        Threshold::new(value).ok_or_else(|| D::Error::custom("threshold must be nonnegative"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), q(-3, 1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn dependent_roots_collapse() {
        // √8 − 2√2 = 0
        let a = Surd::sqrt(&q(8, 1));
        let b = Surd::sqrt2_multiple(q(2, 1));
        assert!((&a - &b).is_zero());
        // √(1/2) = √2/2
        assert_eq!(Surd::sqrt(&q(1, 2)), Surd::sqrt2_multiple(q(1, 2)));
        // √(1/64) = 1/8
        assert_eq!(Surd::sqrt(&q(1, 64)).as_rational(), Some(q(1, 8)));
        // large square factors outside the small-prime table: √(101²·3) vs 101√3
        let big = Surd::sqrt(&q(101 * 101 * 3, 1));
        let mut other = Surd::zero();
        other.add_term(BigInt::from(3), q(101, 1));
        assert!((&big - &other).is_zero());
    }

    #[test]
    fn sign_of_close_values() {
        // √2 vs 1.41421356 and 1.41421357
        let r2 = Surd::sqrt(&q(2, 1));
        assert_eq!(r2.cmp(&Surd::rational(q(141421356, 100000000))), Ordering::Greater);
        assert_eq!(r2.cmp(&Surd::rational(q(141421357, 100000000))), Ordering::Less);
        // √2 + √3 vs √10 (3.146… vs 3.162…)
        let lhs = &Surd::sqrt(&q(2, 1)) + &Surd::sqrt(&q(3, 1));
        assert_eq!(lhs.cmp(&Surd::sqrt(&q(10, 1))), Ordering::Less);
        // exact tie: √2 + √8 = √18
        let lhs = &Surd::sqrt(&q(2, 1)) + &Surd::sqrt(&q(8, 1));
        assert_eq!(lhs.cmp(&Surd::sqrt(&q(18, 1))), Ordering::Equal);
    }

    #[test]
    fn threshold_round_trips_through_json() {
        let t = Threshold::sqrt2_multiple(q(1, 8)).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"rational":"1/8","sqrt2_multiple":true}"#);
        let back: Threshold = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);

        let mixed = Threshold::sqrt2_multiple(q(1, 2)).unwrap().minus(&Threshold::ratio(1, 8)).unwrap();
        let json = serde_json::to_string(&mixed).unwrap();
        let back: Threshold = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mixed);
        assert!(serde_json::from_str::<Threshold>(r#"{"rational":"-1"}"#).is_err());
    }

    #[test]
    fn threshold_comparisons_with_sqrt() {
        let t = Threshold::sqrt2_multiple(q(1, 4)).unwrap(); // √2/4
        assert_eq!(t.cmp_sqrt(&q(1, 8)), Ordering::Equal); // √(1/8) = √2/4
        assert_eq!(t.cmp_sqrt(&q(1, 16)), Ordering::Less);
        assert_eq!(t.cmp_sqrt(&q(1, 4)), Ordering::Greater);
        assert_eq!(t.cmp_sqrt_sum([&q(1, 32), &q(1, 32)]), Ordering::Equal);
    }

    #[test]
    fn f64_bounds_enclose() {
        let s = &Surd::sqrt(&q(2, 1)) - &Surd::rational(q(1, 3));
        let (lo, hi) = s.f64_bounds();
        let v = 2f64.sqrt() - 1.0 / 3.0;
        assert!(lo <= v && v <= hi);
        assert!(hi - lo < 1e-12);
    }
}
