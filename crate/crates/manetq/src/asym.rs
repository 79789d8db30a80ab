//! Closed-form large-network limits for all metrics.
//!
//! Two scaling regimes appear. Intensive metrics (coverage, segmentation,
//! vulnerability) converge along `n*rho -> nu`; connectedness, reachability
//! and the disconnection family need the finer scaling `n*rho - ln n -> eta`,
//! under which the segment count becomes Poisson with rate `e^(-eta)`.
//!
//! Everything here is plain double precision. `exp(-e^(-eta))` underflows to
//! 0 for eta below about -37, which is the correct limit value, so underflow
//! is accepted rather than reported.

use crate::error::{Error, Result};
use crate::exact::MetricKind;
use crate::params::SystemParams;

/// Which limit a metric is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// `n*rho - ln n -> eta`; any real value.
    Eta(f64),
    /// `n*rho -> nu`; non-negative (`nu = 0` is the empty-network limit).
    Nu(f64),
}

/// Limit of the k-segment probability: `(e^(-eta*k) / k!) * exp(-e^(-eta))`,
/// the Poisson law with rate `e^(-eta)`.
pub fn disconnection(k: u64, eta: f64) -> f64 {
    // Factorial is exact in f64 up to k = 170; past that the whole term is
    // assembled in log space.
    let log_term = -eta * k as f64 - (-eta).exp();
    if k <= 170 {
        let mut fact = 1.0f64;
        for i in 1..=k {
            fact *= i as f64;
        }
        log_term.exp() / fact
    } else {
        let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
        (log_term - ln_fact).exp()
    }
}

pub fn connectedness(eta: f64) -> f64 {
    (-(-eta).exp()).exp()
}

/// `2x - (1 + 2x) e^(-1/x)` with `x = e^eta`, rewritten as
/// `(1 + 2x)(-expm1(-1/x)) - 1` to avoid cancellation between the two large
/// terms when x is big.
pub fn reachability(eta: f64) -> f64 {
    let x = eta.exp();
    if x.is_infinite() {
        return 1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    (1.0 + 2.0 * x) * (-f64::exp_m1(-1.0 / x)) - 1.0
}

pub fn coverage(nu: f64) -> f64 {
    -f64::exp_m1(-2.0 * nu)
}

pub fn segmentation(nu: f64) -> f64 {
    (-nu).exp()
}

pub fn vulnerability(nu: f64) -> f64 {
    (nu - 1.0) * (-nu).exp() + (-2.0 * nu).exp()
}

/// Evaluate a metric's limit in its matching regime.
///
/// Coveredness has no limit expressible in either parameter alone (its
/// natural scale is `2*n*rho - ln n`, which neither eta nor nu determines),
/// so it is rejected; evaluate connectedness with [`eta_from_params`] at
/// doubled rho instead.
pub fn metric(kind: MetricKind, regime: Regime) -> Result<f64> {
    match (kind, regime) {
        (MetricKind::Connectedness, Regime::Eta(eta)) => Ok(connectedness(eta)),
        (MetricKind::Disconnection(k), Regime::Eta(eta)) => Ok(disconnection(k, eta)),
        (MetricKind::Reachability, Regime::Eta(eta)) => Ok(reachability(eta)),
        (MetricKind::Coverage, Regime::Nu(nu)) => {
            check_nu(nu)?;
            Ok(coverage(nu))
        }
        (MetricKind::Segmentation, Regime::Nu(nu)) => {
            check_nu(nu)?;
            Ok(segmentation(nu))
        }
        (MetricKind::Vulnerability, Regime::Nu(nu)) => {
            check_nu(nu)?;
            Ok(vulnerability(nu))
        }
        (MetricKind::Coveredness, _) => Err(Error::Regime(
            "coveredness has no limit in eta or nu alone; evaluate connectedness at eta computed from doubled rho"
                .into(),
        )),
        (kind, Regime::Eta(_)) => Err(Error::Regime(format!(
            "{kind} is intensive; pass the nu regime (nu = n*rho)"
        ))),
        (kind, Regime::Nu(_)) => Err(Error::Regime(format!(
            "{kind} is not intensive; pass the eta regime (eta = n*rho - ln n)"
        ))),
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_nan() || nu < 0.0 {
        return Err(Error::InvalidParameter("nu must be >= 0".into()));
    }
    Ok(())
}

/// `eta = n*rho - ln n`, with `n*rho` taken exactly before conversion.
pub fn eta_from_params(params: &SystemParams) -> f64 {
    n_rho(params) - (params.n() as f64).ln()
}

/// `nu = n*rho`.
pub fn nu_from_params(params: &SystemParams) -> f64 {
    n_rho(params)
}

fn n_rho(params: &SystemParams) -> f64 {
    (crate::params::ExactRational::from_int(params.n() as i64) * params.rho().clone()).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ExactRational;

    fn sys(n: u64, rho: &str) -> SystemParams {
        SystemParams::new(n, rho.parse().unwrap()).unwrap()
    }

    #[test]
    fn disconnection_spec_values() {
        assert!((disconnection(0, 0.0) - (-1.0f64).exp()).abs() < 1e-15);
        // Divergence limit: eta = +20 gives essentially certain connectivity.
        assert!((disconnection(0, 20.0) - 1.0).abs() < 1e-8);
        // Poisson normalization at eta = -1.
        let total: f64 = (0..=60).map(|k| disconnection(k, -1.0)).sum();
        assert!((total - 1.0).abs() < 1e-12, "got {total}");
    }

    #[test]
    fn poisson_normalizes_across_eta() {
        for eta in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let mut total = 0.0;
            for k in 0..10_000u64 {
                let term = disconnection(k, eta);
                total += term;
                if term < 1e-16 && k > (-eta).exp() as u64 {
                    break;
                }
            }
            assert!((total - 1.0).abs() < 1e-12, "eta={eta} total={total}");
        }
    }

    #[test]
    fn large_k_log_space_branch() {
        // Poisson rate e^5 ~ 148; k = 200 is far in the tail but finite.
        let v = disconnection(200, -5.0);
        assert!(v.is_finite() && v > 0.0 && v < 1e-3, "got {v}");
        // Mass near the mode with a rate large enough to exercise k > 170.
        let lambda = 200.0f64;
        let eta = -lambda.ln();
        let total: f64 = (0..=400).map(|k| disconnection(k, eta)).sum();
        assert!((total - 1.0).abs() < 1e-9, "got {total}");
    }

    #[test]
    fn underflow_is_the_limit_value() {
        assert_eq!(connectedness(-40.0), 0.0);
        assert_eq!(reachability(-745.0), 0.0);
        assert_eq!(reachability(1000.0), 1.0);
    }

    #[test]
    fn metric_dispatch_and_regime_errors() {
        assert!((metric(MetricKind::Coverage, Regime::Nu(1.151293)).unwrap() - 0.9).abs() < 1e-5);
        let v = metric(MetricKind::Vulnerability, Regime::Nu(1e-12)).unwrap();
        assert!(v.abs() < 1e-9, "got {v}");
        assert!(metric(MetricKind::Coverage, Regime::Eta(1.0)).is_err());
        assert!(metric(MetricKind::Connectedness, Regime::Nu(1.0)).is_err());
        assert!(metric(MetricKind::Coveredness, Regime::Eta(1.0)).is_err());
        assert!(metric(MetricKind::Coveredness, Regime::Nu(1.0)).is_err());
        assert!(metric(MetricKind::Coverage, Regime::Nu(-0.5)).is_err());
    }

    #[test]
    fn reachability_limits_and_monotonicity() {
        let mut prev = -1.0;
        let mut eta = -5.0;
        while eta <= 5.0 {
            let v = reachability(eta);
            assert!(v > prev, "not monotone at eta={eta}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
            eta += 0.125;
        }
        assert!(reachability(-5.0) < 0.02);
        assert!(reachability(5.0) > 0.98);
        // Forward evaluation at the root of 2x - (1+2x)e^(-1/x) = 0.9.
        let eta = 1.0230279f64.ln();
        assert!((reachability(eta) - 0.9).abs() < 1e-3);
    }

    #[test]
    fn regime_parameters_from_params() {
        let eta = eta_from_params(&sys(261, "3/100"));
        assert!((eta - 2.2655).abs() < 1e-4, "got {eta}");
        assert_eq!(eta_from_params(&sys(1, "7/10")), 0.7);
        assert_eq!(nu_from_params(&sys(100, "1/100")), 1.0);
    }
}
