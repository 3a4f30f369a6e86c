//! Fixed-step classical Runge–Kutta integration of complex vector ODEs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, HierarchyState};
use crate::liouvillian::ChainConfig;
use crate::pulse::GaussianPulse;
use crate::qubit_algebra::C64;

/// `dy/dt = f(t, y)` on a flat complex vector.
pub trait OdeSystem {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

/// Adapts a closure into an [`OdeSystem`].
pub struct FnSystem<F> {
    len: usize,
    f: F,
}

impl<F: Fn(f64, &[C64], &mut [C64])> FnSystem<F> {
    pub fn new(len: usize, f: F) -> Self {
        Self { len, f }
    }
}

impl<F: Fn(f64, &[C64], &mut [C64])> OdeSystem for FnSystem<F> {
    fn len(&self) -> usize {
        self.len
    }
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        (self.f)(t, y, dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(rename = "stride")]
    pub record_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 12.0, record_stride: 10 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter { name: "integrator.dt", reason: format!("must be > 0, got {}", self.dt) });
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter {
                name: "integrator.t_end",
                reason: format!("must be > 0, got {}", self.t_end),
            });
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter { name: "integrator.stride", reason: "must be >= 1".into() });
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened so the run ends exactly at `t_end`.
    pub fn n_steps(&self) -> usize {
        let raw = self.t_end / self.dt;
        let rounded = raw.round();
        if (raw - rounded).abs() < 1e-9 * raw.max(1.0) {
            rounded as usize
        } else {
            raw.ceil() as usize
        }
    }

    /// Number of recorded samples including `t = 0`.
    pub fn n_records(&self) -> usize {
        self.n_steps() / self.record_stride + 1
    }
}

/// Classical RK4 with preallocated stage buffers.
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(len: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); len];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    pub fn step<S: OdeSystem + ?Sized>(&mut self, sys: &S, t: f64, h: f64, y: &mut [C64]) {
        let half = 0.5 * h;
        sys.rhs(t, y, &mut self.k1);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *t = y + k * half;
        }
        sys.rhs(t + half, &self.tmp, &mut self.k2);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *t = y + k * half;
        }
        sys.rhs(t + half, &self.tmp, &mut self.k3);
        for ((t, y), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *t = y + k * h;
        }
        sys.rhs(t + h, &self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * sixth;
        }
    }
}

/// Integrates `sys` from `t = 0`, calling `record(t, y)` at `t = 0` and every
/// `record_stride` steps.
pub fn integrate_system<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[C64],
    icfg: &IntegratorConfig,
    mut record: impl FnMut(f64, &[C64]),
) -> Result<Vec<C64>> {
    icfg.validate()?;
    if y0.len() != sys.len() {
        return Err(Error::Dimension { expected: sys.len(), got: y0.len() });
    }
    let mut y = y0.to_vec();
    let mut rk = Rk4::new(y.len());
    let n = icfg.n_steps();
    record(0.0, &y);
    for k in 0..n {
        let t = k as f64 * icfg.dt;
        let h = if k + 1 == n { icfg.t_end - t } else { icfg.dt };
        rk.step(sys, t, h, &mut y);
        let t_next = if k + 1 == n { icfg.t_end } else { (k + 1) as f64 * icfg.dt };
        if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { time: t_next });
        }
        if (k + 1) % icfg.record_stride == 0 {
            record(t_next, &y);
        }
    }
    Ok(y)
}

/// Runs the hierarchy from `state0` and returns the recorded states.
pub fn integrate(
    chain: &ChainConfig,
    pulse: GaussianPulse,
    state0: &HierarchyState,
    icfg: &IntegratorConfig,
) -> Result<Vec<HierarchyState>> {
    let hierarchy = Hierarchy::new(chain, pulse, state0.n_photons())?;
    if state0.dim() != hierarchy.dim() {
        return Err(Error::Dimension { expected: hierarchy.dim(), got: state0.dim() });
    }
    let (n_ph, dim) = (state0.n_photons(), state0.dim());
    let mut out = Vec::with_capacity(icfg.n_records());
    let mut failed = None;
    integrate_system(&hierarchy, &state0.to_flat(), icfg, |t, y| {
        match HierarchyState::from_flat(n_ph, dim, y, t) {
            Ok(s) => out.push(s),
            Err(e) => failed = Some(e),
        }
    })?;
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> FnSystem<impl Fn(f64, &[C64], &mut [C64])> {
        FnSystem::new(1, |_t, y: &[C64], dy: &mut [C64]| dy[0] = -y[0])
    }

    fn x_at_one(dt: f64) -> f64 {
        let icfg = IntegratorConfig { dt, t_end: 1.0, record_stride: 1 };
        integrate_system(&decay(), &[C64::new(1.0, 0.0)], &icfg, |_, _| {}).unwrap()[0].re
    }

    #[test]
    fn exponential_decay() {
        assert!((x_at_one(1e-3) - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn fourth_order() {
        let exact = (-1.0f64).exp();
        let e1 = (x_at_one(0.1) - exact).abs();
        let e2 = (x_at_one(0.05) - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn records_on_stride_and_ends_at_t_end() {
        let icfg = IntegratorConfig { dt: 0.03, t_end: 1.0, record_stride: 5 };
        let mut times = Vec::new();
        integrate_system(&decay(), &[C64::new(1.0, 0.0)], &icfg, |t, _| times.push(t)).unwrap();
        assert_eq!(icfg.n_steps(), 34);
        assert_eq!(times.len(), icfg.n_records());
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert!(*times.last().unwrap() <= 1.0);

        let exact = IntegratorConfig { dt: 1e-3, t_end: 12.0, record_stride: 10 };
        assert_eq!(exact.n_steps(), 12_000);
        assert_eq!(exact.n_records(), 1201);
        let mut last = 0.0;
        integrate_system(&decay(), &[C64::new(1.0, 0.0)], &exact, |t, _| last = t).unwrap();
        assert_eq!(last, 12.0);
    }

    #[test]
    fn rejects_bad_config_and_reports_blow_up() {
        let bad = IntegratorConfig { dt: 0.0, t_end: 1.0, record_stride: 1 };
        assert!(integrate_system(&decay(), &[C64::new(1.0, 0.0)], &bad, |_, _| {}).is_err());
        let neg = IntegratorConfig { dt: -1e-3, ..Default::default() };
        assert!(neg.validate().is_err());
        let zero_stride = IntegratorConfig { record_stride: 0, ..Default::default() };
        assert!(zero_stride.validate().is_err());

        let explode = FnSystem::new(1, |_t, y: &[C64], dy: &mut [C64]| dy[0] = y[0] * y[0]);
        let icfg = IntegratorConfig { dt: 0.01, t_end: 5.0, record_stride: 1 };
        match integrate_system(&explode, &[C64::new(1.0, 0.0)], &icfg, |_, _| {}) {
            Err(Error::NonFinite { time }) => assert!(time > 0.9 && time < 5.0, "{time}"),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
