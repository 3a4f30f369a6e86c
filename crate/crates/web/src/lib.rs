//! Three browser entry points: the pulse shape, one emitter's excitation
//! under a Fock-state pulse, and the three-emitter concurrence fill.
//!
//! The plain functions are what the tests exercise; the `wasm_bindgen`
//! exports only convert errors.

use wasm_bindgen::prelude::*;
use wqed::integrator::IntegratorConfig;
use wqed::observables::{peak, OutputSpec};
use wqed::pulse::GaussianPulse;
use wqed::scenario::{self, ChainSection, PerEmitter, Scenario, SystemSection};

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    times: Vec<f64>,
    values: Vec<f64>,
    peak_value: f64,
    peak_time: f64,
}

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }

    #[wasm_bindgen(getter, js_name = peakValue)]
    pub fn peak_value(&self) -> f64 {
        self.peak_value
    }

    #[wasm_bindgen(getter, js_name = peakTime)]
    pub fn peak_time(&self) -> f64 {
        self.peak_time
    }
}

impl Curve {
    fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self, String> {
        let p = peak(&times, &values).map_err(|e| e.to_string())?;
        Ok(Self { times, values, peak_value: p.value, peak_time: p.time })
    }
}

/// `|g(t)|²` on `samples` points over `[0, t_end]`.
pub fn pulse_profile(mu: f64, t_bar: f64, t_end: f64, samples: usize) -> Result<Curve, String> {
    if samples < 2 || t_end.is_nan() || t_end <= 0.0 {
        return Err("need at least 2 samples and t_end > 0".into());
    }
    let pulse = GaussianPulse::new(mu, t_bar).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..samples).map(|k| t_end * k as f64 / (samples - 1) as f64).collect();
    let values = grid.iter().map(|&t| pulse.intensity(t)).collect();
    Curve::new(grid, values)
}

fn scenario(emitters: usize, photons: usize, ratio: f64, mu: f64, delta: f64, gamma: f64, dt: f64) -> Scenario {
    Scenario {
        system: SystemSection { emitters, photons },
        chain: ChainSection {
            gamma_r: PerEmitter::All(ratio),
            gamma_l: PerEmitter::All(1.0),
            gamma: PerEmitter::All(gamma),
            delta: PerEmitter::All(delta),
            ..ChainSection::default()
        },
        pulse: GaussianPulse { mu, t_bar: 5.0 },
        integrator: IntegratorConfig { dt, t_end: 12.0, record_stride: ((0.01 / dt).round() as usize).max(1) },
        output: OutputSpec::default(),
        sweep: None,
    }
}

fn run_series(scn: &mut Scenario, series: &str) -> Result<Curve, String> {
    match series {
        "fill" => scn.output.fill = true,
        label => scn.output.populations = vec![label.trim_start_matches("P_").to_string()],
    }
    let out = scenario::run(scn).map_err(|e| e.to_string())?;
    let values = out.trajectory.get(series).ok_or("missing series")?.to_vec();
    Curve::new(out.trajectory.times, values)
}

/// Excited-state probability of one emitter with Γ_l = 1, Γ_r = `ratio`.
pub fn single_emitter(ratio: f64, photons: usize, mu: f64) -> Result<Curve, String> {
    run_series(&mut scenario(1, photons, ratio, mu, 0.0, 0.0, 1e-3), "P_e")
}

/// Concurrence fill of three emitters under a three-photon pulse.
pub fn fill_curve(ratio: f64, delta: f64, gamma: f64, dt: f64) -> Result<Curve, String> {
    run_series(&mut scenario(3, 3, ratio, 1.46, delta, gamma, dt), "fill")
}

#[wasm_bindgen(js_name = pulseProfile)]
pub fn pulse_profile_js(mu: f64, t_bar: f64, t_end: f64, samples: usize) -> Result<Curve, JsError> {
    pulse_profile(mu, t_bar, t_end, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = singleEmitter)]
pub fn single_emitter_js(ratio: f64, photons: usize, mu: f64) -> Result<Curve, JsError> {
    single_emitter(ratio, photons, mu).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fillCurve)]
pub fn fill_curve_js(ratio: f64, delta: f64, gamma: f64, dt: f64) -> Result<Curve, JsError> {
    fill_curve(ratio, delta, gamma, dt).map_err(|e| JsError::new(&e))
}
