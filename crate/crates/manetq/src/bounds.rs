//! Two-sided bounds for disconnected-boundary probabilities.
//!
//! No closed form is known for the plain interval at general n, but the
//! periodic value sandwiches it:
//!
//! ```text
//! P_disc_pb(k) <= P_disc_db(k) <= P_disc_pb(k) + (1-rho)^n + n*rho*(1-rho)^(n-1)
//! ```
//!
//! The correction is the probability of a boundary split, and it vanishes in
//! the `eta` regime, which is what makes the periodic results transfer.

use crate::error::{Error, Result};
use crate::exact::{disconnection, ExactProb};
use crate::params::{ExactRational, SystemParams};

/// Exact lower and upper bounds on a probability, `lower <= upper`, with the
/// upper bound clamped at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbBounds {
    pub lower: ExactProb,
    pub upper: ExactProb,
}

/// Sandwich `P_disc_db(k)` between periodic-boundary values.
///
/// For `rho >= 1` the correction terms vanish and the bounds collapse onto
/// the periodic value.
pub fn disconnection_bounds(params: &SystemParams, k: u64) -> Result<ProbBounds> {
    let lower = disconnection(params, k)?;
    if params.rho() >= &ExactRational::one() {
        return Ok(ProbBounds { lower: lower.clone(), upper: lower });
    }
    let raw_upper = lower.value() + &width(params)?;
    let upper = if raw_upper > ExactRational::one() {
        ExactProb::one()
    } else {
        ExactProb::new(raw_upper)?
    };
    Ok(ProbBounds { lower, upper })
}

/// The exact gap between upper and lower bound before clamping:
/// `(1-rho)^n + n*rho*(1-rho)^(n-1)`. Zero for `rho >= 1`, where the
/// degenerate branch of [`disconnection_bounds`] applies.
pub fn width(params: &SystemParams) -> Result<ExactRational> {
    let rho = params.rho();
    if rho >= &ExactRational::one() {
        return Ok(ExactRational::zero());
    }
    let n = params.n();
    let one = ExactRational::one();
    let base = &one - rho;
    let exp = u32::try_from(n).map_err(|_| Error::InvalidParameter("n too large".into()))?;
    let first = base.pow_u(exp);
    let second = ExactRational::from_int(n as i64) * rho.clone() * base.pow_u(exp - 1);
    Ok(first + second)
}
