//! Exact rational evaluation of disconnection probabilities and quality
//! parameter expectations under periodic boundary conditions.
//!
//! The k-disconnection probability is an alternating inclusion-exclusion sum
//!
//! ```text
//! P_disc(k) = sum_{j=k}^{floor(1/rho)} (-1)^(j-k) C(j,k) C(n,j) (1 - j*rho)^(n-1)
//! ```
//!
//! whose terms have large modulus and opposite signs, so floating-point
//! evaluation is unreliable for small `rho`. Every sum in this module runs in
//! arbitrary-precision rationals; results are exact, and `f64` conversion
//! happens only at the caller's request.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::params::{summation_cap, ExactRational, SystemParams};

/// Evaluating the reachability sum costs `O(n * floor(1/rho'))` big-rational
/// operations; above this node count callers are pointed at the asymptotic
/// module instead.
pub const REACHABILITY_DEFAULT_N_CAP: u64 = 5000;

/// A probability as an exact rational, validated to lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactProb(ExactRational);

impl ExactProb {
    pub fn new(value: ExactRational) -> Result<Self> {
        if value.is_negative() || value > ExactRational::one() {
            return Err(Error::Domain(format!("probability {value} outside [0, 1]")));
        }
        Ok(Self(value))
    }

    pub fn zero() -> Self {
        Self(ExactRational::zero())
    }

    pub fn one() -> Self {
        Self(ExactRational::one())
    }

    pub fn value(&self) -> &ExactRational {
        &self.0
    }

    pub fn into_value(self) -> ExactRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The family of quality metrics handled by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricKind {
    Connectedness,
    Coveredness,
    Coverage,
    Segmentation,
    Vulnerability,
    Reachability,
    /// Probability that the network splits into exactly `k` segments.
    Disconnection(u64),
}

impl MetricKind {
    pub const QUALITY_FIVE: [MetricKind; 5] = [
        MetricKind::Connectedness,
        MetricKind::Coverage,
        MetricKind::Segmentation,
        MetricKind::Vulnerability,
        MetricKind::Reachability,
    ];

    /// Intensive metrics converge to a function of `nu = n*rho`; the others
    /// need the finer regime `eta = n*rho - ln n`.
    pub fn is_intensive(&self) -> bool {
        matches!(
            self,
            MetricKind::Coverage | MetricKind::Segmentation | MetricKind::Vulnerability
        )
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Connectedness => write!(f, "connectedness"),
            MetricKind::Coveredness => write!(f, "coveredness"),
            MetricKind::Coverage => write!(f, "coverage"),
            MetricKind::Segmentation => write!(f, "segmentation"),
            MetricKind::Vulnerability => write!(f, "vulnerability"),
            MetricKind::Reachability => write!(f, "reachability"),
            MetricKind::Disconnection(k) => write!(f, "disc:{k}"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conn" | "connectedness" => Ok(MetricKind::Connectedness),
            "coveredness" | "covd" => Ok(MetricKind::Coveredness),
            "coverage" | "cov" => Ok(MetricKind::Coverage),
            "seg" | "segmentation" => Ok(MetricKind::Segmentation),
            "vuln" | "vulnerability" => Ok(MetricKind::Vulnerability),
            "reach" | "reachability" => Ok(MetricKind::Reachability),
            other => {
                if let Some(k) = other.strip_prefix("disc:") {
                    let k = k
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad disconnection order in {s:?}")))?;
                    Ok(MetricKind::Disconnection(k))
                } else {
                    Err(Error::Parse(format!("unknown metric {s:?}")))
                }
            }
        }
    }
}

impl serde::Serialize for MetricKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Exact binomial coefficient by the multiplicative recurrence; every
/// intermediate quotient is itself a binomial coefficient, so the integer
/// divisions are exact.
pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

fn exponent_u32(e: u64) -> u32 {
    u32::try_from(e).expect("exponent fits u32")
}

/// Probability that the network splits into exactly `k` segments under
/// periodic boundary conditions; `k = 0` is strong connectedness.
pub fn disconnection(params: &SystemParams, k: u64) -> Result<ExactProb> {
    let n = params.n();
    let rho = params.rho();
    if k > n {
        return Ok(ExactProb::zero());
    }
    let j_max = summation_cap(n, rho)?;
    if k > j_max {
        // More than floor(1/rho) gaps of length >= rho cannot coexist.
        return Ok(ExactProb::zero());
    }
    let exp = exponent_u32(n - 1);
    let one = ExactRational::one();

    let mut sum = ExactRational::zero();
    // C(n, j) and C(j, k) advance by one multiplicative step per term.
    let mut c_n_j = binomial(n, k);
    let mut c_j_k = BigInt::one();
    for j in k..=j_max {
        if j > k {
            c_n_j = c_n_j * BigInt::from(n - j + 1) / BigInt::from(j);
            c_j_k = c_j_k * BigInt::from(j) / BigInt::from(j - k);
        }
        let base = &one - &(ExactRational::from_int(j as i64) * rho.clone());
        let coeff = ExactRational::new(&c_j_k * &c_n_j, BigInt::one())?;
        let term = coeff * base.pow_u(exp);
        if (j - k) % 2 == 0 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    ExactProb::new(sum)
}

/// Probability of strong connectedness under periodic boundary conditions.
pub fn connectedness(params: &SystemParams) -> Result<ExactProb> {
    disconnection(params, 0)
}

/// Expected fraction of the system within range of at least one node.
/// `1 - (1 - 2*rho)^n` for `rho < 1/2`, and exactly 1 beyond.
pub fn coverage(params: &SystemParams) -> Result<ExactProb> {
    let two_rho = ExactRational::from_int(2) * params.rho().clone();
    if two_rho >= ExactRational::one() {
        return Ok(ExactProb::one());
    }
    let base = ExactRational::one() - two_rho;
    ExactProb::new(ExactRational::one() - base.pow_u(exponent_u32(params.n())))
}

/// Probability that every point of the system is covered. A gap is covered
/// iff it is shorter than `2*rho`, so this equals connectedness at doubled
/// range.
pub fn coveredness(params: &SystemParams) -> Result<ExactProb> {
    connectedness(&params.with_doubled_rho())
}

/// Expected number of network segments divided by node count:
/// `(1 - rho)^(n-1)` for `rho < 1`.
pub fn segmentation(params: &SystemParams) -> Result<ExactProb> {
    let n = params.n();
    if n == 1 {
        // Zero exponent; holds for any rho.
        return Ok(ExactProb::one());
    }
    if params.rho() >= &ExactRational::one() {
        return Ok(ExactProb::zero());
    }
    let base = ExactRational::one() - params.rho().clone();
    ExactProb::new(base.pow_u(exponent_u32(n - 1)))
}

fn require_vuln_domain(params: &SystemParams, what: &str) -> Result<()> {
    if params.n() < 2 {
        return Err(Error::Domain(format!("{what} requires n >= 2")));
    }
    if params.rho() >= &ExactRational::ratio(1, 2) {
        return Err(Error::Domain(format!("{what} requires rho < 1/2")));
    }
    Ok(())
}

/// Expected fraction of nodes whose removal splits a segment in two:
/// `(n*rho - 1)(1 - rho)^(n-2) + (1 - 2*rho)^(n-1)` for `n >= 2`, `rho < 1/2`.
pub fn vulnerability(params: &SystemParams) -> Result<ExactProb> {
    require_vuln_domain(params, "vulnerability")?;
    let n = params.n();
    let rho = params.rho();
    let one = ExactRational::one();
    let n_rho = ExactRational::from_int(n as i64) * rho.clone();
    let first = (n_rho - &one) * (&one - rho).pow_u(exponent_u32(n - 2));
    let second = (&one - &(ExactRational::from_int(2) * rho.clone())).pow_u(exponent_u32(n - 1));
    ExactProb::new(first + second)
}

/// Expected average fraction of other nodes reachable multi-hop.
///
/// Assembled from connectedness, the one-split probability, and a sum over
/// segment sizes; the segment-start index contributes a uniform factor `n`,
/// which is already folded in below. Cost is `O(n * floor(1/rho'))`
/// big-rational operations with `rho' = rho / (1 - 2*rho)`.
pub fn reachability(params: &SystemParams) -> Result<ExactProb> {
    reachability_with_cap(params, REACHABILITY_DEFAULT_N_CAP)
}

pub fn reachability_with_cap(params: &SystemParams, n_cap: u64) -> Result<ExactProb> {
    require_vuln_domain(params, "reachability")?;
    let n = params.n();
    if n > n_cap {
        return Err(Error::Domain(format!(
            "exact reachability is capped at n <= {n_cap}; use the asymptotic formula for larger networks"
        )));
    }
    let rho = params.rho();
    let one = ExactRational::one();
    let exp = exponent_u32(n - 1);

    let conn = connectedness(params)?.into_value();
    let one_split = disconnection(params, 1)?.into_value();

    // rho' = rho / (1 - 2*rho); inner sums run over j <= min(n-2, floor(1/rho')).
    let one_minus_two_rho = &one - &(ExactRational::from_int(2) * rho.clone());
    let rho_prime = rho / &one_minus_two_rho;
    let j_max = summation_cap(n.saturating_sub(2), &rho_prime)?;

    // Swap the (b, j) summation order: the integer weights
    // S_j = sum_b b(b-1) C(b-1, j) are cheap, leaving one big-rational
    // multiplication per j.
    let mut segment_sum = ExactRational::zero();
    for j in 0..=j_max {
        let mut weight = BigInt::zero();
        let mut c = BigInt::one(); // C(b-1, j) for b-1 = j
        for b in (j + 1)..n {
            if b - 1 > j {
                c = c * BigInt::from(b - 1) / BigInt::from(b - 1 - j);
            }
            weight += BigInt::from(b) * BigInt::from(b - 1) * &c;
        }
        if weight.is_zero() {
            continue;
        }
        let base = &one - &(ExactRational::from_int(j as i64) * rho_prime.clone());
        let term = ExactRational::new(weight, BigInt::one())? * base.pow_u(exp);
        if j % 2 == 0 {
            segment_sum = segment_sum + term;
        } else {
            segment_sum = segment_sum - term;
        }
    }
    let n_rat = ExactRational::from_int(n as i64);
    let third = one_minus_two_rho.pow_u(exp) * segment_sum / &n_rat;

    let n_minus_1_over_n = ExactRational::new(BigInt::from(n - 1), BigInt::from(n))?;
    ExactProb::new(conn + n_minus_1_over_n * one_split + third)
}

/// Closed-form connectedness of two nodes on the plain interval (disconnected
/// boundaries): `2*rho - rho^2`. Serves as the exact oracle for the n = 2
/// disconnected-boundary case, where no general closed form exists.
pub fn line_connectedness_n2(rho: &ExactRational) -> Result<ExactProb> {
    if !rho.is_positive() || rho > &ExactRational::one() {
        return Err(Error::Domain("line_connectedness_n2 requires 0 < rho <= 1".into()));
    }
    let two_rho = ExactRational::from_int(2) * rho.clone();
    ExactProb::new(two_rho - rho.pow_u(2))
}

/// Coverage for nodes dropped into a d-dimensional torus, `d` in 1..=3:
/// `1 - (1 - c_d rho^d)^n` with `c_1 = 2`, `c_2 = pi`, `c_3 = 4*pi/3`.
/// Floating point: `pi` is irrational, so this sits outside the
/// exact-rational contract.
pub fn coverage_ddim(n: u64, rho: f64, d: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("node count must be >= 1".into()));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter("rho must be positive and finite".into()));
    }
    let c_d = match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => return Err(Error::InvalidParameter("dimension must be 1, 2 or 3".into())),
    };
    let ball = c_d * rho.powi(d as i32);
    if ball > 1.0 {
        return Err(Error::Domain(format!(
            "single-node covered volume c_d*rho^d = {ball} exceeds the system"
        )));
    }
    Ok(1.0 - (1.0 - ball).powi(i32::try_from(n).unwrap_or(i32::MAX)))
}

/// Dispatch an exact metric by kind.
pub fn metric(params: &SystemParams, kind: MetricKind) -> Result<ExactProb> {
    match kind {
        MetricKind::Connectedness => connectedness(params),
        MetricKind::Coveredness => coveredness(params),
        MetricKind::Coverage => coverage(params),
        MetricKind::Segmentation => segmentation(params),
        MetricKind::Vulnerability => vulnerability(params),
        MetricKind::Reachability => reachability(params),
        MetricKind::Disconnection(k) => disconnection(params, k),
    }
}
