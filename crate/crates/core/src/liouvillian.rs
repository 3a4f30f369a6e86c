//! Time-independent part of the emitter-chain master equation.
//!
//! `L[ρ] = L_cs[ρ] + L_pd[ρ] + L_cd[ρ]`:
//!
//! * closed-system part `-i(H ρ - ρ H†)` with `H = Σ_j (Δ_j - iγ_j) σ_j†σ_j`;
//!   the imaginary part leaks population to non-waveguide modes,
//! * pure waveguide decay of each emitter at total rate `Γ_jr + Γ_jl`,
//! * cooperative, direction-resolved decay between distinct emitters: right
//!   movers couple `j → i` for `i > j`, left movers for `i < j`.
//!
//! Every part is a linear map, so it applies equally to the non-hermitian
//! off-diagonal hierarchy blocks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit_algebra::{EmitterRegister, OperatorMatrix, C64};

/// Rates are in units of Γ; `delta` is `ω_eg - ω_p` in units of Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    pub gamma_r: f64,
    pub gamma_l: f64,
    pub gamma_spont: f64,
    pub delta: f64,
}

impl EmitterParams {
    pub fn symmetric(gamma: f64) -> Self {
        Self { gamma_r: gamma, gamma_l: gamma, gamma_spont: 0.0, delta: 0.0 }
    }

    pub fn chiral(gamma_r: f64, gamma_l: f64) -> Self {
        Self { gamma_r, gamma_l, gamma_spont: 0.0, delta: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        let rates = [("chain.gamma_r", self.gamma_r), ("chain.gamma_l", self.gamma_l), ("chain.gamma_spont", self.gamma_spont)];
        for (name, v) in rates {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter { name, reason: format!("must be finite and >= 0, got {v}") });
            }
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter { name: "chain.delta", reason: "must be finite".into() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub emitters: Vec<EmitterParams>,
    /// Emitter spacing over resonant wavelength, `D = L/λ₀`.
    pub d_ratio: f64,
    /// Driving phase `k₀d_j` per emitter, radians.
    pub k0d: Vec<f64>,
}

impl ChainConfig {
    pub fn uniform(n: usize, params: EmitterParams) -> Self {
        Self { emitters: vec![params; n], d_ratio: 0.0, k0d: vec![0.0; n] }
    }

    pub fn n_emitters(&self) -> usize {
        self.emitters.len()
    }

    pub fn register(&self) -> Result<EmitterRegister> {
        EmitterRegister::new(self.emitters.len())
    }

    pub fn validate(&self) -> Result<()> {
        self.register()?;
        for e in &self.emitters {
            e.validate()?;
        }
        if self.k0d.len() != self.emitters.len() {
            return Err(Error::InvalidParameter {
                name: "chain.k0d",
                reason: format!("expected {} phases, got {}", self.emitters.len(), self.k0d.len()),
            });
        }
        if !self.d_ratio.is_finite() || self.k0d.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter { name: "chain.k0d", reason: "phases must be finite".into() });
        }
        Ok(())
    }

    /// Prefactor of the `(i, j)` cooperative term (1-based, `i ≠ j`):
    /// `√(Γ_ir Γ_jr)` for `i > j`, `√(Γ_il Γ_jl)` for `i < j`.
    pub fn cooperative_coefficient(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.emitters[i - 1], &self.emitters[j - 1]);
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => (a.gamma_r * b.gamma_r).sqrt(),
            std::cmp::Ordering::Less => (a.gamma_l * b.gamma_l).sqrt(),
            std::cmp::Ordering::Equal => 0.0,
        }
    }
}

/// The Liouvillian of one chain with its emitter operators cached.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    cfg: ChainConfig,
    dim: usize,
    lowering: Vec<OperatorMatrix>,
    raising: Vec<OperatorMatrix>,
    h_eff: OperatorMatrix,
}

impl Liouvillian {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        cfg.validate()?;
        let reg = cfg.register()?;
        let n = reg.n_emitters();
        let lowering: Vec<_> = (1..=n).map(|j| reg.lowering_op(j)).collect::<Result<_>>()?;
        let raising: Vec<_> = lowering.iter().map(OperatorMatrix::adjoint).collect();
        let mut h_eff = OperatorMatrix::zeros(reg.dim());
        for (j, e) in cfg.emitters.iter().enumerate() {
            let num = &raising[j] * &lowering[j];
            h_eff += &num.scale(C64::new(e.delta, -e.gamma_spont));
        }
        Ok(Self { cfg: cfg.clone(), dim: reg.dim(), lowering, raising, h_eff })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `σ_j` (1-based).
    pub fn lowering(&self, j: usize) -> &OperatorMatrix {
        &self.lowering[j - 1]
    }

    pub fn raising(&self, j: usize) -> &OperatorMatrix {
        &self.raising[j - 1]
    }

    fn check(&self, rho: &OperatorMatrix) -> Result<()> {
        if rho.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: rho.dim() });
        }
        Ok(())
    }

    pub fn closed(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check(rho)?;
        let h = &self.h_eff;
        let out = &(h * rho) - &(rho * &h.adjoint());
        Ok(out.scale(C64::new(0.0, -1.0)))
    }

    pub fn pure_decay(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check(rho)?;
        let mut out = OperatorMatrix::zeros(self.dim);
        for (j, e) in self.cfg.emitters.iter().enumerate() {
            let rate = 0.5 * (e.gamma_r + e.gamma_l);
            if rate == 0.0 {
                continue;
            }
            let (s, sd) = (&self.lowering[j], &self.raising[j]);
            let num = sd * s;
            let jump = &(s * rho) * sd;
            let term = &(&(&num * rho) - &jump.scale_real(2.0)) + &(rho * &num);
            out += &term.scale_real(-rate);
        }
        Ok(out)
    }

    pub fn cooperative(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check(rho)?;
        let n = self.cfg.n_emitters();
        let mut out = OperatorMatrix::zeros(self.dim);
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let c = self.cfg.cooperative_coefficient(i, j);
                if c == 0.0 {
                    continue;
                }
                let phase = C64::from_polar(1.0, -2.0 * PI * self.cfg.d_ratio * (i as f64 - j as f64));
                let (si, sdi) = (self.lowering(i), self.raising(i));
                let (sj, sdj) = (self.lowering(j), self.raising(j));
                // (σi†σj ρ − σj ρ σi†) e^{-iφ}
                let forward = &(&(sdi * sj) * rho) - &(&(sj * rho) * sdi);
                // its adjoint partner (ρ σj†σi − σi ρ σj†) e^{+iφ}
                let backward = &(rho * &(sdj * si)) - &(&(si * rho) * sdj);
                let term = &forward.scale(phase) + &backward.scale(phase.conj());
                out += &term.scale_real(-c);
            }
        }
        Ok(out)
    }

    pub fn total(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        let mut out = self.closed(rho)?;
        out += &self.pure_decay(rho)?;
        out += &self.cooperative(rho)?;
        Ok(out)
    }

    /// Sparse matrix form of [`total`](Self::total) acting on row-major vectorised operators.
    pub fn superoperator(&self) -> Superoperator {
        Superoperator::from_linear_map(self.dim, |rho| self.total(rho).expect("dimension checked"))
    }
}

pub fn apply_closed(cfg: &ChainConfig, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    Liouvillian::new(cfg)?.closed(rho)
}

pub fn apply_pure_decay(cfg: &ChainConfig, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    Liouvillian::new(cfg)?.pure_decay(rho)
}

pub fn apply_cooperative(cfg: &ChainConfig, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    Liouvillian::new(cfg)?.cooperative(rho)
}

pub fn apply_total(cfg: &ChainConfig, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
    Liouvillian::new(cfg)?.total(rho)
}

/// A linear map on `dim × dim` operators stored as a sparse list of
/// `(output index, input index, weight)` over row-major vectorisation.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    entries: Vec<(u32, u32, C64)>,
}

impl Superoperator {
    /// Builds the map by applying `f` to every matrix unit `|r⟩⟨c|`.
    pub fn from_linear_map(dim: usize, mut f: impl FnMut(&OperatorMatrix) -> OperatorMatrix) -> Self {
        let mut entries = Vec::new();
        for r in 0..dim {
            for c in 0..dim {
                let mut unit = OperatorMatrix::zeros(dim);
                unit[(r, c)] = C64::new(1.0, 0.0);
                let image = f(&unit);
                let input = r * dim + c;
                for (out, z) in image.to_row_major().into_iter().enumerate() {
                    if z != C64::new(0.0, 0.0) {
                        entries.push((out as u32, input as u32, z));
                    }
                }
            }
        }
        entries.sort_by_key(|&(o, i, _)| (o, i));
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `out += weight · S(input)` on vectorised operators.
    #[inline]
    pub fn apply_add(&self, input: &[C64], weight: C64, out: &mut [C64]) {
        for &(o, i, z) in &self.entries {
            out[o as usize] += weight * z * input[i as usize];
        }
    }

    pub fn apply(&self, rho: &OperatorMatrix) -> OperatorMatrix {
        let input = rho.to_row_major();
        let mut out = vec![C64::new(0.0, 0.0); input.len()];
        self.apply_add(&input, C64::new(1.0, 0.0), &mut out);
        OperatorMatrix::from_row_slice(self.dim, &out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(params: EmitterParams) -> ChainConfig {
        ChainConfig::uniform(1, params)
    }

    fn random_op(dim: usize, seed: u64) -> OperatorMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        OperatorMatrix::from_fn(dim, |_, _| C64::new(next(), next()))
    }

    fn random_hermitian(dim: usize, seed: u64) -> OperatorMatrix {
        let a = random_op(dim, seed);
        (&a + &a.adjoint()).scale_real(0.5)
    }

    #[test]
    fn closed_part_vanishes_without_detuning_or_loss() {
        let cfg = ChainConfig::uniform(2, EmitterParams::symmetric(1.0));
        let rho = random_op(4, 1);
        assert_eq!(apply_closed(&cfg, &rho).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn closed_part_detuned_coherence() {
        let cfg = one(EmitterParams { gamma_r: 0.0, gamma_l: 0.0, gamma_spont: 0.0, delta: 0.5 });
        let mut rho = OperatorMatrix::zeros(2);
        rho[(1, 0)] = C64::new(1.0, 0.0); // |e⟩⟨g|
        let out = apply_closed(&cfg, &rho).unwrap();
        assert!((out[(1, 0)] - C64::new(0.0, -0.5)).norm() < 1e-15);
        assert_eq!(out[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn closed_part_spontaneous_loss() {
        let cfg = one(EmitterParams { gamma_r: 0.0, gamma_l: 0.0, gamma_spont: 0.75, delta: 0.0 });
        let out = apply_closed(&cfg, &OperatorMatrix::projector(2, 1)).unwrap();
        assert!((out[(1, 1)] - C64::new(-1.5, 0.0)).norm() < 1e-15);
        assert!(out[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn pure_decay_cases() {
        let cfg = ChainConfig::uniform(2, EmitterParams::symmetric(1.0));
        let ground = cfg.register().unwrap().ground_projector();
        assert_eq!(apply_pure_decay(&cfg, &ground).unwrap().max_abs(), 0.0);

        let cfg1 = one(EmitterParams::symmetric(1.0));
        let out = apply_pure_decay(&cfg1, &OperatorMatrix::projector(2, 1)).unwrap();
        let expected = OperatorMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, -2.0]]);
        assert!(out.max_abs_diff(&expected) < 1e-15);
        assert!(out.trace().norm() < 1e-15);

        let rho = random_hermitian(4, 7);
        assert!(apply_pure_decay(&cfg, &rho).unwrap().trace().norm() < 1e-13);
    }

    #[test]
    fn cooperative_empty_for_single_emitter() {
        let cfg = one(EmitterParams::symmetric(1.0));
        assert_eq!(apply_cooperative(&cfg, &random_op(2, 3)).unwrap().max_abs(), 0.0);
    }

    /// Term-by-term expansion for N = 2, D = 0 on |eg⟩⟨eg|, written out by hand
    /// with explicit basis kets rather than through the operator products.
    #[test]
    fn cooperative_two_emitter_expansion() {
        let (gr, gl) = (1.7, 0.6);
        let cfg = ChainConfig::uniform(2, EmitterParams::chiral(gr, gl));
        let reg = cfg.register().unwrap();
        let eg = reg.parse_basis_label("eg").unwrap();
        let ge = reg.parse_basis_label("ge").unwrap();
        let rho = OperatorMatrix::projector(4, eg);
        let out = apply_cooperative(&cfg, &rho).unwrap();

        // (i,j) = (2,1), coefficient gr: σ2†σ1 ρ = |ge⟩⟨eg|, σ1 ρ σ2† = 0,
        //   ρ σ1†σ2 = |eg⟩⟨ge|, σ2 ρ σ1† = 0.
        // (i,j) = (1,2), coefficient gl: every product contains σ2 acting on
        //   |eg⟩ from one side, so all four vanish.
        let mut expected = OperatorMatrix::zeros(4);
        expected[(ge, eg)] = C64::new(-gr, 0.0);
        expected[(eg, ge)] = C64::new(-gr, 0.0);
        assert!(out.max_abs_diff(&expected) < 1e-15, "{out:?}");

        // mirror case: |ge⟩⟨ge| couples through the left-moving channel
        let out2 = apply_cooperative(&cfg, &OperatorMatrix::projector(4, ge)).unwrap();
        let mut expected2 = OperatorMatrix::zeros(4);
        expected2[(eg, ge)] = C64::new(-gl, 0.0);
        expected2[(ge, eg)] = C64::new(-gl, 0.0);
        assert!(out2.max_abs_diff(&expected2) < 1e-15, "{out2:?}");
    }

    #[test]
    fn cooperative_coefficients_follow_direction() {
        let mut cfg = ChainConfig::uniform(3, EmitterParams::chiral(4.0, 1.0));
        cfg.emitters[2].gamma_r = 9.0;
        assert_eq!(cfg.cooperative_coefficient(3, 1), 6.0);
        assert_eq!(cfg.cooperative_coefficient(2, 1), 4.0);
        assert_eq!(cfg.cooperative_coefficient(1, 3), 1.0);
        let no_left = ChainConfig::uniform(3, EmitterParams::chiral(2.0, 0.0));
        for i in 1..=3 {
            for j in (i + 1)..=3 {
                assert_eq!(no_left.cooperative_coefficient(i, j), 0.0);
            }
        }
    }

    #[test]
    fn total_is_linear_trace_free_and_hermiticity_preserving() {
        let mut cfg = ChainConfig::uniform(3, EmitterParams::chiral(2.5, 1.0));
        cfg.d_ratio = 0.13;
        cfg.emitters[1].delta = -0.4;
        let l = Liouvillian::new(&cfg).unwrap();
        let (a, b) = (random_op(8, 11), random_op(8, 12));
        let (alpha, beta) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let lhs = l.total(&(&a.scale(alpha) + &b.scale(beta))).unwrap();
        let rhs = &l.total(&a).unwrap().scale(alpha) + &l.total(&b).unwrap().scale(beta);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);

        let h = random_hermitian(8, 5);
        let out = l.total(&h).unwrap();
        assert!(out.trace().norm() < 1e-12);
        assert!(out.hermiticity_defect() < 1e-12);
        assert!(l.total(&a).unwrap().trace().norm() < 1e-12);

        cfg.emitters[0].gamma_spont = 0.75;
        let lossy = Liouvillian::new(&cfg).unwrap();
        assert!(lossy.total(&h).unwrap().hermiticity_defect() < 1e-12);
    }

    #[test]
    fn ground_state_is_dark() {
        let cfg = ChainConfig::uniform(3, EmitterParams::chiral(5.0, 1.0));
        let ground = cfg.register().unwrap().ground_projector();
        assert_eq!(apply_total(&cfg, &ground).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn superoperator_matches_matrix_route() {
        let mut cfg = ChainConfig::uniform(3, EmitterParams::chiral(3.0, 1.0));
        cfg.emitters[2].gamma_spont = 0.2;
        cfg.emitters[0].delta = 0.5;
        let l = Liouvillian::new(&cfg).unwrap();
        let sup = l.superoperator();
        let rho = random_op(8, 99);
        assert!(sup.apply(&rho).max_abs_diff(&l.total(&rho).unwrap()) < 1e-13);
        assert!(sup.nnz() < 64 * 64 / 4);
    }

    #[test]
    fn dimension_and_parameter_errors() {
        let cfg = ChainConfig::uniform(2, EmitterParams::symmetric(1.0));
        assert!(apply_total(&cfg, &OperatorMatrix::zeros(2)).is_err());
        let bad = ChainConfig::uniform(1, EmitterParams::chiral(-1.0, 1.0));
        assert!(bad.validate().is_err());
        let mut phases = ChainConfig::uniform(2, EmitterParams::symmetric(1.0));
        phases.k0d.pop();
        assert!(phases.validate().is_err());
    }
}
