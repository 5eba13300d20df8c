//! Forward integration of the one-dimensional degree master equation
//!
//! ```text
//! dp_k/dt = λ k̂_{k−1} p_{k−1} − λ k̂_k p_k
//! ```
//!
//! and its average against a residential-time density. Shares no code with
//! the closed forms or the simulator so it can serve as a cross-check of both.

use serde::{Deserialize, Serialize};

use crate::closed_form::{ClosedFormPmf, PmfSource};
use crate::error::{Error, Result};
use crate::params::{Bound, ModelParams};
use crate::residential::{ResidentialCase, ResidentialTimeSpec};

/// Largest admissible `dt · λ · max k̂`.
pub const STABILITY_LIMIT: f64 = 0.1;
const NEGATIVE_CLIP: f64 = 1e-12;
const INIT_SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub k_max: u64,
    /// Requested step; the integrator may shrink it slightly so that a whole
    /// number of steps lands exactly on `t_end`.
    pub dt: f64,
    pub t_end: f64,
    /// Keep every n-th step (the first and last are always kept).
    pub record_every: usize,
    /// Leaked mass above which a warning is attached to the result.
    pub leak_tol: f64,
}

impl GridConfig {
    pub fn new(k_max: u64, dt: f64, t_end: f64) -> Self {
        GridConfig {
            k_max,
            dt,
            t_end,
            record_every: 1,
            leak_tol: 1e-6,
        }
    }

    /// Smallest admissible truncation and the largest stable step for
    /// `params`, integrating to `t_end`.
    pub fn for_params(params: &ModelParams, t_end: f64) -> Self {
        let k_max = min_k_max(params);
        let rate = params.arrival_rate() * params.max_modified_degree(k_max) as f64;
        Self::new(k_max, STABILITY_LIMIT / rate, t_end)
    }

    pub fn with_record_every(mut self, n: usize) -> Self {
        self.record_every = n;
        self
    }

    pub fn with_k_max(mut self, k_max: u64) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_leak_tol(mut self, tol: f64) -> Self {
        self.leak_tol = tol;
        self
    }

    fn steps(&self) -> usize {
        (self.t_end / self.dt).ceil().max(1.0) as usize
    }
}

fn min_k_max(params: &ModelParams) -> u64 {
    match params.upper_threshold() {
        Bound::Finite(uu) => uu + 50,
        Bound::Infinite => 200,
    }
}

/// Snapshots of `p_k(t)` for `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MasterEquationGrid {
    k_max: u64,
    dt: f64,
    t_end: f64,
    times: Vec<f64>,
    probabilities: Vec<Vec<f64>>,
    leak: f64,
    leak_warning: Option<String>,
}

impl MasterEquationGrid {
    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    /// The step actually used.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Row `i` of the stored snapshots, indexed by degree from 0.
    pub fn snapshot(&self, i: usize) -> &[f64] {
        &self.probabilities[i]
    }

    pub fn snapshots(&self) -> &[Vec<f64>] {
        &self.probabilities
    }

    pub fn final_pmf(&self) -> &[f64] {
        self.probabilities.last().expect("grid holds at least the initial row")
    }

    /// Mass that flowed past `k_max` by `t_end`.
    pub fn leak(&self) -> f64 {
        self.leak
    }

    pub fn leak_warning(&self) -> Option<&str> {
        self.leak_warning.as_deref()
    }
}

struct Integrator {
    /// `λ k̂_k` for `k = 0..=k_max`.
    rates: Vec<f64>,
    dt: f64,
    steps: usize,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Integrator {
    fn new(params: &ModelParams, grid: &GridConfig) -> Result<Self> {
        if !(grid.t_end.is_finite() && grid.t_end > 0.0) {
            return Err(Error::Config(format!(
                "integration horizon must be finite and positive, got {}",
                grid.t_end
            )));
        }
        if !(grid.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", grid.dt)));
        }
        let need = min_k_max(params);
        if grid.k_max < need {
            return Err(Error::Config(format!(
                "k_max = {} too small, need at least {need}",
                grid.k_max
            )));
        }
        let lambda = params.arrival_rate();
        let max_rate = params.max_modified_degree(grid.k_max) as f64;
        if grid.dt * lambda * max_rate > STABILITY_LIMIT {
            return Err(Error::Config(format!(
                "dt·λ·max k̂ = {:.4} exceeds {STABILITY_LIMIT}; use dt ≤ {:.3e}",
                grid.dt * lambda * max_rate,
                STABILITY_LIMIT / (lambda * max_rate)
            )));
        }
        let n = grid.k_max as usize + 1;
        let steps = grid.steps();
        Ok(Integrator {
            rates: (0..=grid.k_max)
                .map(|k| lambda * params.modified_degree(k) as f64)
                .collect(),
            dt: grid.t_end / steps as f64,
            steps,
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        })
    }

    fn derivative(rates: &[f64], p: &[f64], out: &mut [f64]) {
        out[0] = -rates[0] * p[0];
        for k in 1..p.len() {
            out[k] = rates[k - 1] * p[k - 1] - rates[k] * p[k];
        }
    }

    /// One classical Runge-Kutta step; returns the mass that left through
    /// the top state during the step.
    fn step(&mut self, p: &mut [f64]) -> f64 {
        let dt = self.dt;
        let top = p.len() - 1;
        let r = &self.rates;
        Self::derivative(r, p, &mut self.k1);
        for (t, (x, d)) in self.tmp.iter_mut().zip(p.iter().zip(&self.k1)) {
            *t = x + 0.5 * dt * d;
        }
        let out1 = r[top] * p[top];
        let out2 = r[top] * self.tmp[top];
        Self::derivative(r, &self.tmp, &mut self.k2);
        for (t, (x, d)) in self.tmp.iter_mut().zip(p.iter().zip(&self.k2)) {
            *t = x + 0.5 * dt * d;
        }
        let out3 = r[top] * self.tmp[top];
        Self::derivative(r, &self.tmp, &mut self.k3);
        for (t, (x, d)) in self.tmp.iter_mut().zip(p.iter().zip(&self.k3)) {
            *t = x + dt * d;
        }
        let out4 = r[top] * self.tmp[top];
        Self::derivative(r, &self.tmp, &mut self.k4);
        for k in 0..p.len() {
            let v = p[k] + dt / 6.0 * (self.k1[k] + 2.0 * self.k2[k] + 2.0 * self.k3[k] + self.k4[k]);
            p[k] = if v < 0.0 && v > -NEGATIVE_CLIP { 0.0 } else { v };
        }
        dt / 6.0 * (out1 + 2.0 * out2 + 2.0 * out3 + out4)
    }
}

fn check_init(init: &[f64], k_max: u64) -> Result<()> {
    if init.is_empty() || init.len() as u64 > k_max + 1 {
        return Err(Error::Config(format!(
            "initial vector must have 1..={} entries, got {}",
            k_max + 1,
            init.len()
        )));
    }
    if init.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::Parameter("initial probabilities must be finite and non-negative".into()));
    }
    let s: f64 = init.iter().sum();
    if (s - 1.0).abs() > INIT_SUM_TOL {
        return Err(Error::Parameter(format!("initial probabilities sum to {s}, expected 1")));
    }
    Ok(())
}

/// Runs the integration, calling `observe(step, t, p)` on every step
/// including the initial state. Returns the total leaked mass.
fn integrate_with(
    params: &ModelParams,
    init: &[f64],
    grid: &GridConfig,
    mut observe: impl FnMut(usize, f64, &[f64]),
) -> Result<(f64, f64)> {
    check_init(init, grid.k_max)?;
    let mut integ = Integrator::new(params, grid)?;
    let mut p = vec![0.0; grid.k_max as usize + 1];
    p[..init.len()].copy_from_slice(init);
    observe(0, 0.0, &p);
    let mut leak = 0.0;
    for i in 1..=integ.steps {
        leak += integ.step(&mut p);
        let t = if i == integ.steps { grid.t_end } else { i as f64 * integ.dt };
        observe(i, t, &p);
    }
    Ok((leak, integ.dt))
}

/// Integrates from `init` (indexed by degree from 0) to `grid.t_end`.
pub fn integrate_degree_dynamics(
    params: &ModelParams,
    init: &[f64],
    grid: &GridConfig,
) -> Result<MasterEquationGrid> {
    let every = grid.record_every.max(1);
    let last = grid.steps();
    let mut times = Vec::new();
    let mut rows = Vec::new();
    let (leak, dt) = integrate_with(params, init, grid, |i, t, p| {
        if i % every == 0 || i == last {
            times.push(t);
            rows.push(p.to_vec());
        }
    })?;
    Ok(MasterEquationGrid {
        k_max: grid.k_max,
        dt,
        t_end: grid.t_end,
        times,
        probabilities: rows,
        leak,
        leak_warning: leak_warning(leak, grid.leak_tol),
    })
}

fn leak_warning(leak: f64, tol: f64) -> Option<String> {
    (leak > tol).then(|| format!("{leak:.3e} probability mass flowed past k_max (tolerance {tol:.1e})"))
}

/// `∫₀^𝒯 p_k(t) f_T(t) dt` by the trapezoidal rule on the integration grid,
/// normalized to unit mass.
pub fn stationary_degree_pmf(
    params: &ModelParams,
    init: &[f64],
    spec: &ResidentialTimeSpec,
    grid: &GridConfig,
) -> Result<ClosedFormPmf> {
    stationary_with_leak(params, init, spec, grid).map(|(pmf, _)| pmf)
}

/// [`stationary_degree_pmf`] plus the residence-weighted mass that had
/// flowed past `k_max`: the share of the average lost to truncation before
/// renormalizing.
pub fn stationary_with_leak(
    params: &ModelParams,
    init: &[f64],
    spec: &ResidentialTimeSpec,
    grid: &GridConfig,
) -> Result<(ClosedFormPmf, f64)> {
    if spec.horizon != grid.t_end {
        return Err(Error::Config(format!(
            "residential horizon {} differs from grid horizon {}",
            spec.horizon, grid.t_end
        )));
    }
    let last = grid.steps();
    let mut acc = vec![0.0; grid.k_max as usize + 1];
    let mut weight = 0.0;
    // uniform steps, so the common factor dt cancels in the normalization
    integrate_with(params, init, grid, |i, t, p| {
        let w = spec.density_unchecked(t) * if i == 0 || i == last { 0.5 } else { 1.0 };
        weight += w;
        for (a, x) in acc.iter_mut().zip(p) {
            *a += w * x;
        }
    })?;
    let leak = (1.0 - acc.iter().sum::<f64>() / weight).max(0.0);
    Ok((normalized_pmf(acc, params, *spec), leak))
}

fn normalized_pmf(mut acc: Vec<f64>, params: &ModelParams, spec: ResidentialTimeSpec) -> ClosedFormPmf {
    let total: f64 = acc.iter().sum();
    acc.iter_mut().for_each(|x| *x /= total);
    let k_min = params.starting_degree() as usize;
    ClosedFormPmf::from_parts(
        k_min as u64,
        acc.split_off(k_min),
        PmfSource::MasterEquation {
            params: params.clone(),
            residential: spec,
        },
    )
}

/// Exponent γ for which the residential rate `λγ` equals the mean attachment
/// weight per connection of the stationary law it produces:
/// `γ = Σ_k k̂_k p_k(γ) / E[m]`. This is the rate at which a growing network
/// with these parameters ages its nodes, and the one that reproduces a
/// finite-size simulation. Solved by damped fixed-point iteration on a
/// single integration.
pub fn self_consistent_gamma(params: &ModelParams, grid: &GridConfig) -> Result<f64> {
    let init = params.big_bang_init();
    let mean_m: f64 = init.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
    let mean_m = if mean_m > 0.0 { mean_m } else { 1.0 };
    // p_k(t) does not depend on γ: integrate once, keeping about 2000 rows
    let every = (grid.steps() / 2000).max(1);
    let solution = integrate_degree_dynamics(params, &init, &grid.clone().with_record_every(every))?;
    let weights: Vec<f64> = (0..=grid.k_max).map(|k| params.modified_degree(k) as f64).collect();
    let times = solution.times();
    let n = times.len();
    let trapezoid: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
            let right = if i + 1 < n { times[i + 1] - times[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();
    let mut gamma = params.lower_bound() as f64 + 0.5;
    for _ in 0..200 {
        let spec = ResidentialTimeSpec::new(ResidentialCase::Gamma { gamma }, params, grid.t_end)?;
        let mut acc = vec![0.0; weights.len()];
        for ((t, h), row) in times.iter().zip(&trapezoid).zip(solution.snapshots()) {
            let w = spec.density_unchecked(*t) * h;
            for (a, x) in acc.iter_mut().zip(row) {
                *a += w * x;
            }
        }
        let total: f64 = acc.iter().sum();
        let mean_weight: f64 = acc.iter().zip(&weights).map(|(p, w)| p * w).sum::<f64>() / total;
        let next = mean_weight / mean_m;
        if (next - gamma).abs() < 1e-12 {
            return Ok(next);
        }
        // damped: the undamped map has slope −1 at the linear-weight fixed point
        gamma = 0.5 * (gamma + next);
    }
    Err(Error::Fit("self-consistent γ iteration did not converge".into()))
}
