//! Varying node number: each device is independently switched on with
//! probability `p`, and fixed-n expectations mix binomially over the active
//! count. Segmentation additionally has the closed form
//! `(1 - p*rho)^n / (1 - rho)`.

use crate::asym;
use crate::error::{Error, Result};
use crate::exact::{self, MetricKind};
use crate::params::{ExactRational, SystemParams};

/// Probability that a device is switched on; exact rational in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnProbability(ExactRational);

impl OnProbability {
    pub fn new(p: ExactRational) -> Result<Self> {
        if p.is_negative() || p > ExactRational::one() {
            return Err(Error::InvalidParameter(format!("on-probability {p} outside [0, 1]")));
        }
        Ok(Self(p))
    }

    pub fn value(&self) -> &ExactRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

/// Binomial mixing of a fixed-n family: with `n = values.len() - 1`,
///
/// ```text
/// sum_{n'=0}^{n} C(n, n') p^n' (1-p)^(n-n') * values[n']
/// ```
///
/// Generic over caller-supplied sequences; supplying meaningful entries at
/// `n' = 0` and `n' = 1` is the caller's job (see [`segmentation_values_formula`]
/// and [`metric_values_simulation`]).
pub fn mix_binomial(values: &[ExactRational], p: &OnProbability) -> Result<ExactRational> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "mix_binomial needs entries for n' = 0..=n; got an empty sequence".into(),
        ));
    }
    let n = (values.len() - 1) as u64;
    let one = ExactRational::one();
    let q = &one - &p.0;
    let mut total = ExactRational::zero();
    for (idx, v) in values.iter().enumerate() {
        let k = idx as u64;
        let coeff = ExactRational::new(exact::binomial(n, k), num::BigInt::from(1u32))?;
        let weight = coeff * p.0.pow_u(k as u32) * q.pow_u((n - k) as u32);
        total = total + weight * v.clone();
    }
    Ok(total)
}

/// Closed-form varying-node segmentation `(1 - p*rho)^n / (1 - rho)`.
///
/// Note this is the analytic continuation of the fixed-n formula: the
/// `n' = 0` term enters as `(1 - rho)^(-1)`, which is not a probability, so
/// the result may exceed 1 (e.g. `p = 0`). It equals [`mix_binomial`] over
/// [`segmentation_values_formula`] exactly; a simulation-based definition
/// with segmentation 0 at `n' = 0` differs by the `n' = 0` weight.
pub fn segmentation_vn(params: &SystemParams, p: &OnProbability) -> Result<ExactRational> {
    let rho = params.rho();
    let one = ExactRational::one();
    if rho >= &one {
        return Err(Error::Domain("varying-node segmentation requires rho < 1".into()));
    }
    let exp = u32::try_from(params.n()).map_err(|_| Error::InvalidParameter("n too large".into()))?;
    let base = &one - &(&p.0 * rho);
    Ok(base.pow_u(exp) / (&one - rho))
}

/// Fixed-n segmentation values `(1 - rho)^(n'-1)` for `n' = 0..=n`, with the
/// `n' = 0` entry analytically continued to `(1 - rho)^(-1)`. Feeding this
/// into [`mix_binomial`] reproduces [`segmentation_vn`] exactly.
pub fn segmentation_values_formula(n: u64, rho: &ExactRational) -> Result<Vec<ExactRational>> {
    let one = ExactRational::one();
    if rho >= &one {
        return Err(Error::Domain("formula-convention values require rho < 1".into()));
    }
    let base = &one - rho;
    let mut values = Vec::with_capacity(n as usize + 1);
    values.push(base.recip()?);
    let mut power = ExactRational::one(); // (1 - rho)^(n'-1) starting at n' = 1
    values.push(power.clone());
    for _ in 2..=n {
        power = power * base.clone();
        values.push(power.clone());
    }
    Ok(values)
}

/// Exact per-active-count metric values under the simulator's conventions:
/// every metric is 0 at `n' = 0`; at `n' = 1` segmentation is 1,
/// reachability and vulnerability are 0; all other entries are the exact
/// fixed-n expectations. Used to cross-check the Monte Carlo varying-node
/// mode against binomial mixing.
pub fn metric_values_simulation(
    kind: MetricKind,
    n: u64,
    rho: &ExactRational,
) -> Result<Vec<ExactRational>> {
    let mut values = Vec::with_capacity(n as usize + 1);
    values.push(ExactRational::zero());
    for active in 1..=n {
        let params = SystemParams::new(active, rho.clone())?;
        let v = match (kind, active) {
            (MetricKind::Segmentation, 1) => ExactRational::one(),
            (MetricKind::Reachability | MetricKind::Vulnerability, 1) => ExactRational::zero(),
            _ => exact::metric(&params, kind)?.into_value(),
        };
        values.push(v);
    }
    Ok(values)
}

/// Intensive limits carry over to the varying-node model with `nu` replaced
/// by `p*nu`.
pub fn metric_vn(kind: MetricKind, nu: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter("on-probability must lie in [0, 1]".into()));
    }
    if !kind.is_intensive() {
        return Err(Error::Regime(format!(
            "{kind} is not intensive; the varying-node limit theorem does not apply"
        )));
    }
    asym::metric(kind, asym::Regime::Nu(p * nu))
}
