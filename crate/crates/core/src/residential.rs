//! Residential-time densities: how long a randomly picked node has been in
//! the network at the observation horizon. All cases are truncated
//! exponentials on `[0, 𝒯]`, differing only in rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ResidentialCase {
    /// `ℒ = 1, 𝒰 = ∞`: rate `2λ`.
    BarabasiAlbert,
    /// `U` comparable to the network size: rate `λ(L + 1)`.
    LargeU,
    /// `U ≪ N`: rate `λL`.
    SmallU,
    /// Rate `λγ` for an explicit exponent.
    Gamma { gamma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidentialTimeSpec {
    pub case: ResidentialCase,
    pub arrival_rate: f64,
    pub lower_bound: u64,
    /// Observation horizon `𝒯`; may be infinite.
    pub horizon: f64,
}

impl ResidentialTimeSpec {
    pub fn new(case: ResidentialCase, params: &ModelParams, horizon: f64) -> Result<Self> {
        let spec = ResidentialTimeSpec {
            case,
            arrival_rate: params.arrival_rate(),
            lower_bound: params.lower_bound(),
            horizon,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(Error::Parameter(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            return Err(Error::Parameter(format!(
                "arrival rate must be positive, got {}",
                self.arrival_rate
            )));
        }
        if let ResidentialCase::Gamma { gamma } = self.case {
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Error::Parameter(format!("γ must be positive, got {gamma}")));
            }
        }
        Ok(())
    }

    /// The exponential rate implied by the case.
    pub fn rate(&self) -> f64 {
        let lambda = self.arrival_rate;
        match self.case {
            ResidentialCase::BarabasiAlbert => 2.0 * lambda,
            ResidentialCase::LargeU => lambda * (self.lower_bound as f64 + 1.0),
            ResidentialCase::SmallU => lambda * self.lower_bound as f64,
            ResidentialCase::Gamma { gamma } => lambda * gamma,
        }
    }

    /// `1 − e^{−rate·𝒯}`, equal to 1 for an infinite horizon.
    fn mass(&self) -> f64 {
        if self.horizon.is_infinite() {
            1.0
        } else {
            -(-self.rate() * self.horizon).exp_m1()
        }
    }

    pub(crate) fn density_unchecked(&self, t: f64) -> f64 {
        let rate = self.rate();
        rate * (-rate * t).exp() / self.mass()
    }
}

pub fn residential_time_density(t: f64, spec: &ResidentialTimeSpec) -> Result<f64> {
    spec.validate()?;
    if !(t >= 0.0 && t <= spec.horizon) {
        return Err(Error::Domain(format!("t = {t} outside [0, {}]", spec.horizon)));
    }
    Ok(spec.density_unchecked(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(case: ResidentialCase, lambda: f64, l: u64, horizon: f64) -> ResidentialTimeSpec {
        ResidentialTimeSpec {
            case,
            arrival_rate: lambda,
            lower_bound: l,
            horizon,
        }
    }

    #[test]
    fn ba_case_at_origin() {
        let s = spec(ResidentialCase::BarabasiAlbert, 1.0, 1, f64::INFINITY);
        assert!((residential_time_density(0.0, &s).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_u_case() {
        let s = spec(ResidentialCase::SmallU, 0.5, 2, f64::INFINITY);
        let v = residential_time_density(1.0, &s).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_times_outside_horizon() {
        let s = spec(ResidentialCase::LargeU, 1.0, 2, 3.0);
        assert!(residential_time_density(3.5, &s).is_err());
        assert!(residential_time_density(-0.1, &s).is_err());
    }

    /// Composite Simpson on a fine grid as the normalization oracle.
    fn simpson(spec: &ResidentialTimeSpec, upper: f64, n: usize) -> f64 {
        let h = upper / n as f64;
        let f = |t: f64| spec.density_unchecked(t);
        let mut acc = f(0.0) + f(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn every_case_normalizes_on_finite_horizon() {
        for case in [
            ResidentialCase::BarabasiAlbert,
            ResidentialCase::LargeU,
            ResidentialCase::SmallU,
            ResidentialCase::Gamma { gamma: 2.4 },
        ] {
            let s = spec(case, 0.7, 3, 2.5);
            let integral = simpson(&s, 2.5, 20_000);
            assert!((integral - 1.0).abs() < 1e-9, "{case:?}: {integral}");
        }
    }
}
