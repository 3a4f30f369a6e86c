#![allow(dead_code)]

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use wqed::hierarchy::{block_keys, Hierarchy, HierarchyState};
use wqed::liouvillian::ChainConfig;
use wqed::qubit_algebra::{OperatorMatrix, C64};
use wqed::scenario::Scenario;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

pub fn load_scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, dim: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Arbitrary complex blocks, no hermiticity or trace constraints.
pub fn random_state(rng: &mut StdRng, n_ph: usize, dim: usize) -> HierarchyState {
    let blocks = block_keys(n_ph).into_iter().map(|_| random_matrix(rng, dim)).collect();
    HierarchyState::from_blocks(n_ph, blocks, 0.0).unwrap()
}

/// The three-photon hierarchy written out block by block. With
/// `daggered_sources`, blocks (1,3) and (0,3) take their lowering source as
/// `ρ_{2,1}` and `ρ_{2,0}` instead of `ρ_{1,2}` and `ρ_{0,2}`.
pub fn three_photon_rhs(
    h: &Hierarchy,
    chain: &ChainConfig,
    s: &HierarchyState,
    t: f64,
    daggered_sources: bool,
) -> Vec<((usize, usize), OperatorMatrix)> {
    assert_eq!(s.n_photons(), 3);
    let l = h.liouvillian();
    let g = h.pulse().amplitude(t);
    let n = chain.n_emitters();
    let b = |m: usize, k: usize| s.block(m, k).unwrap().into_owned();
    let dag = |x: OperatorMatrix| x.adjoint();
    // Σ_i √Γ_ir e^{ik₀d_i} g [X, σ_i†]
    let left = |x: &OperatorMatrix| {
        let mut out = OperatorMatrix::zeros(x.dim());
        for i in 1..=n {
            let w = C64::from_polar(chain.emitters[i - 1].gamma_r.sqrt() * g, chain.k0d[i - 1]);
            out += &OperatorMatrix::commutator(x, l.raising(i)).unwrap().scale(w);
        }
        out
    };
    // Σ_i √Γ_ir e^{-ik₀d_i} g* [σ_i, X]
    let right = |x: &OperatorMatrix| {
        let mut out = OperatorMatrix::zeros(x.dim());
        for i in 1..=n {
            let w = C64::from_polar(chain.emitters[i - 1].gamma_r.sqrt() * g, -chain.k0d[i - 1]);
            out += &OperatorMatrix::commutator(l.lowering(i), x).unwrap().scale(w);
        }
        out
    };
    let lv = |x: &OperatorMatrix| l.total(x).unwrap();
    let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
    let src13 = if daggered_sources { dag(b(1, 2)) } else { b(1, 2) };
    let src03 = if daggered_sources { dag(b(0, 2)) } else { b(0, 2) };

    vec![
        ((0, 0), lv(&b(0, 0))),
        ((0, 1), &lv(&b(0, 1)) + &right(&b(0, 0))),
        ((0, 2), &lv(&b(0, 2)) + &right(&b(0, 1)).scale_real(r2)),
        ((0, 3), &lv(&b(0, 3)) + &right(&src03).scale_real(r3)),
        ((1, 1), &(&lv(&b(1, 1)) + &left(&b(0, 1))) + &right(&dag(b(0, 1)))),
        ((1, 2), &(&lv(&b(1, 2)) + &left(&b(0, 2))) + &right(&b(1, 1)).scale_real(r2)),
        ((1, 3), &(&lv(&b(1, 3)) + &left(&b(0, 3))) + &right(&src13).scale_real(r3)),
        ((2, 2), &(&lv(&b(2, 2)) + &left(&b(1, 2)).scale_real(r2)) + &right(&dag(b(1, 2))).scale_real(r2)),
        ((2, 3), &(&lv(&b(2, 3)) + &left(&b(1, 3)).scale_real(r2)) + &right(&b(2, 2)).scale_real(r3)),
        ((3, 3), &(&lv(&b(3, 3)) + &left(&b(2, 3)).scale_real(r3)) + &right(&dag(b(2, 3))).scale_real(r3)),
    ]
}

/// Largest deviation of the generic right-hand side from the written-out one.
pub fn transcription_error(h: &Hierarchy, chain: &ChainConfig, s: &HierarchyState, t: f64, daggered_sources: bool) -> f64 {
    let generic = h.rhs(s, t).unwrap();
    three_photon_rhs(h, chain, s, t, daggered_sources)
        .iter()
        .map(|((m, n), want)| generic.block(*m, *n).unwrap().max_abs_diff(want))
        .fold(0.0, f64::max)
}

/// Spin-flipped two-qubit matrix with the sparsity seen in the two-emitter
/// dynamics, parameterised by `ρ1 = ⟨gg|ρ|gg⟩`, `ρ4 = ⟨gg|ρ|ee⟩`,
/// `ρ6 = ⟨eg|ρ|eg⟩`, `ρ16 = ⟨ee|ρ|ee⟩`.
pub fn structured_spin_flip(r1: f64, r4: f64, r6: f64, r16: f64) -> OperatorMatrix {
    let p = r1 * r16;
    let s = 2.0 * r6 * r6;
    OperatorMatrix::from_real_rows(&[
        &[p + r4 * r4, 0.0, 0.0, r1 * r4],
        &[0.0, s, s, 0.0],
        &[0.0, s, s, 0.0],
        &[r4 * r16, 0.0, 0.0, p],
    ])
}

/// Closed-form spectrum of [`structured_spin_flip`], ascending.
pub fn structured_spin_flip_eigenvalues(r1: f64, r4: f64, r6: f64, r16: f64) -> [f64; 4] {
    let p = r1 * r16;
    let root = (r4 * r4 + 4.0 * p).sqrt();
    let mut ev = [0.0, 4.0 * r6 * r6, p + 0.5 * r4 * (r4 - root), p + 0.5 * r4 * (r4 + root)];
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn sorted_real_eigenvalues(m: &OperatorMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.eigenvalues().iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn ghz() -> OperatorMatrix {
    let mut a = vec![C64::new(0.0, 0.0); 8];
    a[0] = C64::new(0.5f64.sqrt(), 0.0);
    a[7] = a[0];
    OperatorMatrix::pure(&a)
}

pub fn w_state() -> OperatorMatrix {
    let mut a = vec![C64::new(0.0, 0.0); 8];
    for b in [1, 2, 4] {
        a[b] = C64::new((1.0f64 / 3.0).sqrt(), 0.0);
    }
    OperatorMatrix::pure(&a)
}

/// Interior local maxima above `floor`, as `(time, value)`.
pub fn local_maxima(times: &[f64], y: &[f64], floor: f64) -> Vec<(f64, f64)> {
    (1..y.len().saturating_sub(1))
        .filter(|&k| y[k] > y[k - 1] && y[k] >= y[k + 1] && y[k] > floor)
        .map(|k| (times[k], y[k]))
        .collect()
}

pub fn local_minima(times: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    (1..y.len().saturating_sub(1))
        .filter(|&k| y[k] < y[k - 1] && y[k] <= y[k + 1])
        .map(|k| (times[k], y[k]))
        .collect()
}
