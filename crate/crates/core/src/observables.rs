//! Time series extracted from recorded hierarchy states.
//!
//! Population labels are written the way plot legends usually are: `"eg+ge"` is
//! `P_{e₁g₂} + P_{g₁e₂}`, emitter 1 first. `"x1"`, `"x2"`, ... are shorthands
//! for "all basis states with exactly k excited emitters".

use serde::{Deserialize, Serialize};

use crate::entanglement::{concurrence_fill, wootters_concurrence, TRACE_TOL};
use crate::error::{Error, Result};
use crate::hierarchy::HierarchyState;
use crate::pulse::GaussianPulse;
use crate::qubit_algebra::{EmitterRegister, OperatorMatrix};

/// A named set of computational basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationLabel {
    name: String,
    states: Vec<usize>,
}

impl PopulationLabel {
    pub fn parse(register: &EmitterRegister, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let mut states = Vec::new();
        if let Some(k) = spec.strip_prefix('x') {
            let k: usize = k.parse().map_err(|_| Error::UnknownLabel(spec.to_string()))?;
            if k > register.n_emitters() {
                return Err(Error::UnknownLabel(spec.to_string()));
            }
            states.extend((0..register.dim()).filter(|&b| register.excitations(b) == k));
        } else {
            for part in spec.split('+') {
                let b = register.parse_basis_label(part.trim())?;
                if !states.contains(&b) {
                    states.push(b);
                }
            }
        }
        if states.is_empty() {
            return Err(Error::UnknownLabel(spec.to_string()));
        }
        Ok(Self { name: spec.to_string(), states })
    }

    /// All `k`-excitation states of the register.
    pub fn excitations(register: &EmitterRegister, k: usize) -> Result<Self> {
        Self::parse(register, &format!("x{k}"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn series_name(&self) -> String {
        format!("P_{}", self.name)
    }
}

/// Sum of the diagonal entries of `rho` named by `label`.
pub fn population(rho: &OperatorMatrix, label: &PopulationLabel) -> f64 {
    label.states.iter().map(|&b| rho[(b, b)].re).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSummary {
    pub value: f64,
    pub time: f64,
}

/// Global maximum of `values` on `times`; the first occurrence wins ties.
pub fn peak(times: &[f64], values: &[f64]) -> Result<PeakSummary> {
    if values.is_empty() || times.len() != values.len() {
        return Err(Error::Empty);
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(PeakSummary { value: values[best], time: times[best] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Concurrence,
    Fill,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::Concurrence => "concurrence",
            Measure::Fill => "fill",
        }
    }

    fn required_emitters(&self) -> usize {
        match self {
            Measure::Concurrence => 2,
            Measure::Fill => 3,
        }
    }
}

/// Normalises a lossy state by its trace so the measures see a unit-trace
/// state; states already normalised to [`TRACE_TOL`] pass through unchanged.
fn conditioned(rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    let tr = rho.trace().re;
    if (tr - 1.0).abs() <= TRACE_TOL {
        return Ok(rho.clone());
    }
    if tr.is_nan() || tr <= 1e-12 {
        return Err(Error::NotNormalized { trace: tr });
    }
    Ok(rho.scale_real(1.0 / tr))
}

/// Applies `measure` to the physical density matrix of every state.
pub fn entanglement_series(states: &[HierarchyState], register: &EmitterRegister, measure: Measure) -> Result<Vec<f64>> {
    if register.n_emitters() != measure.required_emitters() {
        return Err(Error::WrongRegister {
            measure: measure.name(),
            needed: measure.required_emitters(),
            got: register.n_emitters(),
        });
    }
    states
        .iter()
        .map(|s| {
            let rho = conditioned(s.physical_density())?;
            match measure {
                Measure::Concurrence => wootters_concurrence(&rho),
                Measure::Fill => concurrence_fill(&rho),
            }
        })
        .collect()
}

/// Which series to extract from a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub populations: Vec<String>,
    pub concurrence: bool,
    pub fill: bool,
    /// Adds `|g(t)|²` as a `pulse_intensity` column.
    pub pulse: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// Time grid plus named observable series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    pub pulse_intensity: Vec<f64>,
}

impl Trajectory {
    pub fn from_states(
        register: &EmitterRegister,
        states: &[HierarchyState],
        pulse: &GaussianPulse,
        outputs: &OutputSpec,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty);
        }
        let times: Vec<f64> = states.iter().map(|s| s.time).collect();
        let mut series = Vec::new();
        for spec in &outputs.populations {
            let label = PopulationLabel::parse(register, spec)?;
            let values = states.iter().map(|s| population(s.physical_density(), &label)).collect();
            series.push(Series { name: label.series_name(), values });
        }
        if outputs.concurrence {
            series.push(Series {
                name: Measure::Concurrence.name().into(),
                values: entanglement_series(states, register, Measure::Concurrence)?,
            });
        }
        if outputs.fill {
            series.push(Series { name: Measure::Fill.name().into(), values: entanglement_series(states, register, Measure::Fill)? });
        }
        let pulse_intensity: Vec<f64> = times.iter().map(|&t| pulse.intensity(t)).collect();
        if outputs.pulse {
            series.push(Series { name: "pulse_intensity".into(), values: pulse_intensity.clone() });
        }
        Ok(Self { times, series, pulse_intensity })
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }

    pub fn peak(&self, name: &str) -> Result<PeakSummary> {
        let values = self.get(name).ok_or_else(|| Error::UnknownLabel(name.to_string()))?;
        peak(&self.times, values)
    }
}

/// Worst-case conservation diagnostics over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max |Tr ρ_{m,m} - 1|` over all diagonal blocks and times.
    pub max_trace_error: f64,
    /// Smallest eigenvalue of the physical block over all times.
    pub min_eigenvalue: f64,
    /// Largest hermiticity defect of any diagonal block.
    pub max_hermiticity_defect: f64,
}

impl ConservationReport {
    pub fn from_states(states: &[HierarchyState]) -> Self {
        let mut report = Self { max_trace_error: 0.0, min_eigenvalue: f64::INFINITY, max_hermiticity_defect: 0.0 };
        for s in states {
            for ((m, n), b) in s.blocks() {
                if m != n {
                    continue;
                }
                report.max_trace_error = report.max_trace_error.max((b.trace().re - 1.0).abs());
                report.max_hermiticity_defect = report.max_hermiticity_defect.max(b.hermiticity_defect());
            }
            report.min_eigenvalue = report.min_eigenvalue.min(s.physical_density().min_eigenvalue());
        }
        report
    }
}
