//! System parameters and exact rational arithmetic.
//!
//! The model is scale-free: every expectation value depends on the node
//! count `n` and the normalized radio range `rho = r / l` only, so physical
//! inputs `(r, l)` are reduced to `(n, rho)` at the boundary and all exact
//! analytics run on arbitrary-precision rationals from there on. Decimal
//! input like `"0.03"` is parsed as a fraction over a power of ten, never
//! through binary floating point, so the exact evaluation path is preserved
//! end to end.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator. Arithmetic and comparison are exact; nothing in this
/// type rounds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidParameter("denominator must be nonzero".into()));
        }
        Ok(Self(BigRational::new(numerator, denominator)))
    }

    /// Convenience constructor for small literal fractions.
    pub fn ratio(numerator: i64, denominator: i64) -> Self {
        Self(BigRational::new(BigInt::from(numerator), BigInt::from(denominator)))
    }

    pub fn from_int(value: i64) -> Self {
        Self(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Exact non-negative integer power, with the convention `0^0 = 1`.
    pub fn pow_u(&self, exp: u32) -> Self {
        if exp == 0 {
            return Self::one();
        }
        // Base is in lowest terms, so numerator^e / denominator^e already is.
        let numer = self.0.numer().pow(exp);
        let denom = self.0.denom().pow(exp);
        Self(BigRational::new_raw(numer, denom))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of zero".into()));
        }
        Ok(Self(self.0.recip()))
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    /// Nearest `f64`; presentation only, never fed back into exact paths.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Nearest rational with the given denominator to a float, used when an
    /// irrational quantity (e.g. `ln n`) has to enter the exact path.
    pub fn round_with_denominator(value: f64, denominator: u64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter("cannot rationalize a non-finite value".into()));
        }
        if denominator == 0 {
            return Err(Error::InvalidParameter("denominator must be nonzero".into()));
        }
        let scaled = value * denominator as f64;
        if scaled.abs() >= 9.0e18 {
            return Err(Error::InvalidParameter("value too large to rationalize".into()));
        }
        Self::new(BigInt::from(scaled.round() as i128), BigInt::from(denominator))
    }
}

impl fmt::Display for ExactRational {
    /// Always renders as `numerator/denominator`, including `x/1` for
    /// integers, so the output re-parses under the same grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    /// Accepts `<int>/<int>` or a decimal string; both convert exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty rational".into()));
        }
        if let Some((numer, denom)) = s.split_once('/') {
            let numer = BigInt::from_str(numer.trim())
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let denom = BigInt::from_str(denom.trim())
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return Self::new(numer, denom);
        }
        // Decimal grammar: [sign] digits [ "." digits ]
        let (sign, digits) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Minus, rest),
            None => (Sign::Plus, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse(format!("not a rational: {s:?}")));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::Parse(format!("not a rational: {s:?}")));
        }
        let mantissa = format!("{int_part}{frac_part}");
        let mantissa = BigUint::from_str(if mantissa.is_empty() { "0" } else { &mantissa })
            .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
        let numer = BigInt::from_biguint(sign, mantissa);
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        Self::new(numer, denom)
    }
}

impl serde::Serialize for ExactRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational((self.0).$method(rhs.0))
            }
        }
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl std::iter::Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> ExactRational {
        iter.fold(ExactRational::zero(), |acc, x| acc + x)
    }
}

/// Normalized model parameters: node count and normalized radio range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemParams {
    n: u64,
    rho: ExactRational,
}

impl SystemParams {
    pub fn new(n: u64, rho: ExactRational) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("node count must be >= 1".into()));
        }
        if !rho.is_positive() {
            return Err(Error::InvalidParameter("normalized range rho must be > 0".into()));
        }
        Ok(Self { n, rho })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn rho(&self) -> &ExactRational {
        &self.rho
    }

    /// Same node count at doubled range; used by the coveredness identity.
    pub fn with_doubled_rho(&self) -> Self {
        Self {
            n: self.n,
            rho: &self.rho * &ExactRational::from_int(2),
        }
    }
}

/// Physical inputs before scaling: radio range `r` and system length `l`,
/// both in the same length unit and exactly representable as rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalParams {
    r: ExactRational,
    l: ExactRational,
}

impl PhysicalParams {
    pub fn new(r: ExactRational, l: ExactRational) -> Result<Self> {
        if !r.is_positive() || !l.is_positive() {
            return Err(Error::InvalidParameter("r and l must be > 0".into()));
        }
        Ok(Self { r, l })
    }

    pub fn r(&self) -> &ExactRational {
        &self.r
    }

    pub fn l(&self) -> &ExactRational {
        &self.l
    }
}

/// Reduce `(r, l, n)` to `(n, rho = r/l)` with `rho` in lowest terms.
pub fn normalize(phys: &PhysicalParams, n: u64) -> Result<SystemParams> {
    SystemParams::new(n, &phys.r / &phys.l)
}

/// `floor(1/rho)`, computed exactly by integer division of the denominator
/// by the numerator. This caps the inclusion-exclusion sums: at most
/// `floor(1/rho)` gaps of length `>= rho` fit into the unit circle.
pub fn floor_reciprocal(rho: &ExactRational) -> Result<BigUint> {
    if !rho.is_positive() {
        return Err(Error::InvalidParameter("floor_reciprocal requires rho > 0".into()));
    }
    let q = rho.denominator().div_floor(rho.numerator());
    Ok(q.to_biguint().expect("quotient of positive integers"))
}

/// `min(n, floor(1/rho))` as a loop bound.
pub(crate) fn summation_cap(n: u64, rho: &ExactRational) -> Result<u64> {
    let cap = floor_reciprocal(rho)?;
    Ok(cap.to_u64().map_or(n, |c| c.min(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::cmp::Ordering;

    fn rat(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_fraction_and_decimal() {
        assert_eq!(rat("3/100"), ExactRational::ratio(3, 100));
        assert_eq!(rat("0.03"), ExactRational::ratio(3, 100));
        assert_eq!(rat("30"), ExactRational::from_int(30));
        assert_eq!(rat("-1.5"), ExactRational::ratio(-3, 2));
        assert_eq!(rat("6/8"), ExactRational::ratio(3, 4));
        assert_eq!(rat("2.50"), ExactRational::ratio(5, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "0x10", ".", "1e3"] {
            assert!(bad.parse::<ExactRational>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn display_always_carries_denominator() {
        assert_eq!(rat("1/5").to_string(), "1/5");
        assert_eq!(rat("1").to_string(), "1/1");
        assert_eq!(rat("0").to_string(), "0/1");
        assert_eq!(rat("-0.25").to_string(), "-1/4");
    }

    #[test]
    fn normalize_spec_cases() {
        // WLAN row of the design table.
        let phys = PhysicalParams::new(rat("30"), rat("1000")).unwrap();
        let sys = normalize(&phys, 261).unwrap();
        assert_eq!(sys.rho(), &rat("3/100"));
        assert_eq!(sys.n(), 261);

        // Range equal to system length.
        let phys = PhysicalParams::new(rat("10"), rat("10")).unwrap();
        assert_eq!(normalize(&phys, 5).unwrap().rho(), &rat("1/1"));

        // Bluetooth column.
        let phys = PhysicalParams::new(rat("10"), rat("1000")).unwrap();
        assert_eq!(normalize(&phys, 906).unwrap().rho(), &rat("1/100"));
    }

    #[test]
    fn normalize_rejects_nonpositive() {
        assert!(PhysicalParams::new(rat("0"), rat("10")).is_err());
        assert!(PhysicalParams::new(rat("10"), rat("-1")).is_err());
        let phys = PhysicalParams::new(rat("1"), rat("2")).unwrap();
        assert!(normalize(&phys, 0).is_err());
    }

    #[test]
    fn floor_reciprocal_spec_cases() {
        assert_eq!(floor_reciprocal(&rat("3/100")).unwrap(), BigUint::from(33u32));
        assert_eq!(floor_reciprocal(&rat("1/4")).unwrap(), BigUint::from(4u32));
        assert_eq!(floor_reciprocal(&rat("2")).unwrap(), BigUint::from(0u32));
        assert!(floor_reciprocal(&rat("0")).is_err());
        assert!(floor_reciprocal(&rat("-1/2")).is_err());
    }

    #[test]
    fn round_with_denominator_is_nearest() {
        let r = ExactRational::round_with_denominator(0.0096058, 1_000_000).unwrap();
        assert_eq!(r, rat("9606/1000000"));
        assert!(ExactRational::round_with_denominator(f64::NAN, 10).is_err());
    }

    proptest! {
        // Scale invariance: normalize(lambda*r, lambda*l, n) == normalize(r, l, n).
        #[test]
        fn normalize_scale_invariant(
            rn in 1i64..10_000, rd in 1i64..10_000,
            ln in 1i64..10_000, ld in 1i64..10_000,
            sn in 1i64..10_000, sd in 1i64..10_000,
            n in 1u64..1000,
        ) {
            let r = ExactRational::ratio(rn, rd);
            let l = ExactRational::ratio(ln, ld);
            let scale = ExactRational::ratio(sn, sd);
            let base = normalize(&PhysicalParams::new(r.clone(), l.clone()).unwrap(), n).unwrap();
            let scaled = normalize(
                &PhysicalParams::new(&r * &scale, &l * &scale).unwrap(),
                n,
            ).unwrap();
            prop_assert_eq!(base, scaled);
        }

        // floor_reciprocal(rho) is the unique integer m with m*rho <= 1 < (m+1)*rho.
        #[test]
        fn floor_reciprocal_is_floor(num in 1i64..2000, den in 1i64..2000) {
            let rho = ExactRational::ratio(num, den);
            let m = floor_reciprocal(&rho).unwrap();
            let m_rat = ExactRational::new(BigInt::from(m.clone()), BigInt::from(1)).unwrap();
            let m1_rat = &m_rat + &ExactRational::one();
            prop_assert!(&m_rat * &rho <= ExactRational::one());
            prop_assert!(&m1_rat * &rho > ExactRational::one());
        }

        // Emitted rationals re-parse to the identical value.
        #[test]
        fn display_roundtrip(num in -100_000i64..100_000, den in 1i64..100_000) {
            let r = ExactRational::ratio(num, den);
            prop_assert_eq!(r.to_string().parse::<ExactRational>().unwrap(), r);
        }
    }

    #[test]
    fn ordering_is_exact() {
        assert_eq!(rat("1/3").cmp(&rat("333333/1000000")), Ordering::Greater);
        assert_eq!(rat("2/6").cmp(&rat("1/3")), Ordering::Equal);
    }
}
