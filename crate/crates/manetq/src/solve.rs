//! Inverse problems: minimum node count for a quality target.
//!
//! All inversions run on the asymptotic formulas (that is what makes the
//! design table cheap to reproduce), use bisection with analytically derived
//! brackets, and finish with integer stepping under forward evaluation so the
//! root-finder tolerance cannot shift the returned node count.

use serde::Serialize;

use crate::asym;
use crate::error::{Error, Result};
use crate::exact::MetricKind;
use crate::params::PhysicalParams;

/// Absolute bisection tolerance, both in the auxiliary variable and in n.
const TOL: f64 = 1e-12;
const MAX_ITER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    AtLeast,
    AtMost,
}

/// A quality requirement. Connectedness, coverage and reachability targets
/// are lower bounds; segmentation and vulnerability targets are upper bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityTarget {
    pub kind: MetricKind,
    pub threshold: f64,
    pub direction: Direction,
}

impl QualityTarget {
    /// Build a target with the direction implied by the metric.
    pub fn new(kind: MetricKind, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidParameter("threshold must lie strictly in (0, 1)".into()));
        }
        let direction = match kind {
            MetricKind::Connectedness | MetricKind::Coverage | MetricKind::Reachability => {
                Direction::AtLeast
            }
            MetricKind::Segmentation | MetricKind::Vulnerability => Direction::AtMost,
            MetricKind::Coveredness | MetricKind::Disconnection(_) => {
                return Err(Error::InvalidParameter(format!(
                    "no inversion is defined for {kind}"
                )))
            }
        };
        Ok(Self { kind, threshold, direction })
    }
}

/// Solver output: the minimal node count, the solved auxiliary variable
/// (eta for connectedness, nu for the intensive metrics, x = e^eta for
/// reachability), and the asymptotic metric achieved at `n_min`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub n_min: u64,
    pub auxiliary: f64,
    pub achieved: f64,
}

/// Bisection on a bracketing interval; `f(lo)` and `f(hi)` must straddle zero.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!("bisection bracket [{lo}, {hi}] does not straddle a root")));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solve `n*rho - ln n = eta` for real n on the increasing branch
/// (`n >= 1/rho`). The function attains its minimum `1 + ln rho` at
/// `n = 1/rho`; below that no solution exists on this branch.
pub fn solve_eta_for_n(eta: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter("rho must be positive and finite".into()));
    }
    let n_valley = 1.0 / rho;
    let f_min = 1.0 + rho.ln();
    if eta < f_min {
        return Err(Error::Infeasible {
            limit: f_min,
            reason: format!("eta = {eta} lies below the branch minimum 1 + ln rho = {f_min}"),
        });
    }
    let f = |n: f64| n * rho - n.ln() - eta;
    let mut hi = (n_valley * 2.0).max(n_valley + 1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    bisect(f, n_valley, hi)
}

/// Location and height of the vulnerability curve's maximum. The derivative
/// `(2 - nu) e^-nu - 2 e^-2nu` is positive at nu = 1 and negative at nu = 2,
/// so the peak is bracketed by [1, 2].
pub fn vulnerability_peak() -> (f64, f64) {
    let dv = |nu: f64| (2.0 - nu) * (-nu).exp() - 2.0 * (-2.0 * nu).exp();
    let peak = bisect(dv, 1.0, 2.0).expect("fixed bracket straddles the peak");
    (peak, asym::vulnerability(peak))
}

/// Smallest node count whose asymptotic metric meets the target at the given
/// radio range and system length.
pub fn min_nodes(target: &QualityTarget, phys: &PhysicalParams) -> Result<SolveResult> {
    if phys.r() >= phys.l() {
        return Err(Error::InvalidParameter("solver requires r < l".into()));
    }
    let rho = (phys.r() / phys.l()).to_f64();
    let t = target.threshold;

    // Criterion in n, restricted to the correct branch where the curve is
    // not monotone.
    let (aux, n_real, met): (f64, f64, Box<dyn Fn(u64) -> bool>) = match target.kind {
        MetricKind::Connectedness => {
            let eta = -(-t.ln()).ln();
            let met = move |n: u64| asym::connectedness(n as f64 * rho - (n as f64).ln()) >= t;
            match solve_eta_for_n(eta, rho) {
                Ok(n_real) => (eta, n_real, Box::new(met)),
                // Target below the branch minimum: every node count
                // qualifies, so stepping starts at 1.
                Err(Error::Infeasible { .. }) => (eta, 1.0, Box::new(met)),
                Err(e) => return Err(e),
            }
        }
        MetricKind::Reachability => {
            let g = |x: f64| asym::reachability(x.ln()) - t;
            let mut hi = 1.0;
            while g(hi) < 0.0 {
                hi *= 2.0;
            }
            let x = bisect(g, 1e-12, hi)?;
            let eta = x.ln();
            let met = move |n: u64| asym::reachability(n as f64 * rho - (n as f64).ln()) >= t;
            match solve_eta_for_n(eta, rho) {
                Ok(n_real) => (x, n_real, Box::new(met)),
                Err(Error::Infeasible { .. }) => (x, 1.0, Box::new(met)),
                Err(e) => return Err(e),
            }
        }
        MetricKind::Coverage => {
            let nu = -f64::ln_1p(-t) / 2.0;
            let met = move |n: u64| asym::coverage(n as f64 * rho) >= t;
            (nu, nu / rho, Box::new(met))
        }
        MetricKind::Segmentation => {
            let nu = -t.ln();
            let met = move |n: u64| asym::segmentation(n as f64 * rho) <= t;
            (nu, nu / rho, Box::new(met))
        }
        MetricKind::Vulnerability => {
            let (peak_nu, peak_value) = vulnerability_peak();
            if t >= peak_value {
                return Err(Error::Infeasible {
                    limit: peak_value,
                    reason: format!(
                        "vulnerability threshold {t} is not below the curve maximum; no greater root exists"
                    ),
                });
            }
            // Greater root: bracket on the decaying side of the peak.
            let mut hi = peak_nu + 50.0;
            while asym::vulnerability(hi) > t {
                hi += 50.0;
            }
            let nu = bisect(|nu| asym::vulnerability(nu) - t, peak_nu, hi)?;
            let met = move |n: u64| {
                let n_nu = n as f64 * rho;
                n_nu >= peak_nu && asym::vulnerability(n_nu) <= t
            };
            (nu, nu / rho, Box::new(met))
        }
        MetricKind::Coveredness | MetricKind::Disconnection(_) => {
            return Err(Error::InvalidParameter(format!(
                "no inversion is defined for {}",
                target.kind
            )))
        }
    };

    // Ceil the real root, then absorb solver tolerance by stepping while the
    // forward evaluation says so.
    let mut n = (n_real - 1e-9).ceil().max(1.0) as u64;
    while n > 1 && met(n - 1) {
        n -= 1;
    }
    let mut guard = 0;
    while !met(n) {
        n += 1;
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::Domain("forward stepping failed to meet the target".into()));
        }
    }

    let achieved = match target.kind {
        MetricKind::Connectedness => asym::connectedness(n as f64 * rho - (n as f64).ln()),
        MetricKind::Reachability => asym::reachability(n as f64 * rho - (n as f64).ln()),
        MetricKind::Coverage => asym::coverage(n as f64 * rho),
        MetricKind::Segmentation => asym::segmentation(n as f64 * rho),
        MetricKind::Vulnerability => asym::vulnerability(n as f64 * rho),
        _ => unreachable!(),
    };
    Ok(SolveResult { n_min: n, auxiliary: aux, achieved })
}
