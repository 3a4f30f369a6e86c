mod common;

use common::*;
use rand::RngExt;
use wqed::entanglement::{concurrence_fill, spin_flip_eigenvalues, wootters_concurrence};
use wqed::hierarchy::{initial_state, Hierarchy};
use wqed::integrator::{integrate, IntegratorConfig};
use wqed::liouvillian::{ChainConfig, EmitterParams};
use wqed::pulse::GaussianPulse;
use wqed::qubit_algebra::{EmitterRegister, OperatorMatrix};

fn random_chain(rng: &mut rand::rngs::StdRng, n: usize) -> ChainConfig {
    let emitters = (0..n)
        .map(|_| EmitterParams {
            gamma_r: rng.random_range(0.0..5.0),
            gamma_l: rng.random_range(0.0..5.0),
            gamma_spont: rng.random_range(0.0..1.0),
            delta: rng.random_range(-1.0..1.0),
        })
        .collect();
    let k0d = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    ChainConfig { emitters, d_ratio: rng.random_range(0.0..1.0), k0d }
}

#[test]
fn written_out_three_photon_hierarchy_matches_generic_rhs() {
    let mut rng = rng(7);
    for n in 1..=3 {
        for _ in 0..10 {
            let chain = random_chain(&mut rng, n);
            let h = Hierarchy::new(&chain, GaussianPulse::default(), 3).unwrap();
            let s = random_state(&mut rng, 3, 1 << n);
            let t = rng.random_range(2.0..8.0);
            let err = transcription_error(&h, &chain, &s, t, false);
            assert!(err < 1e-12, "N={n}: {err:e}");
        }
    }
}

#[test]
fn daggered_sources_on_upper_blocks_break_excitation_structure() {
    // Block (m,n) only has entries ⟨a|·|b⟩ with exc(b) - exc(a) = n - m.
    let chain = ChainConfig::uniform(2, EmitterParams::symmetric(1.0));
    let reg = chain.register().unwrap();
    let icfg = IntegratorConfig { t_end: 5.0, ..Default::default() };
    let states = integrate(&chain, GaussianPulse::default(), &initial_state(reg, 3).unwrap(), &icfg).unwrap();
    let s = states.last().unwrap();
    let h = Hierarchy::new(&chain, GaussianPulse::default(), 3).unwrap();
    let outside = |x: &OperatorMatrix, diff: i64| {
        let mut worst = 0.0f64;
        for a in 0..reg.dim() {
            for b in 0..reg.dim() {
                if reg.excitations(b) as i64 - reg.excitations(a) as i64 != diff {
                    worst = worst.max(x[(a, b)].norm());
                }
            }
        }
        worst
    };
    for ((m, n), d) in three_photon_rhs(&h, &chain, s, s.time, false) {
        assert!(outside(&d, n as i64 - m as i64) < 1e-12, "({m},{n})");
    }
    let daggered = three_photon_rhs(&h, &chain, s, s.time, true);
    let (_, d13) = daggered.iter().find(|(k, _)| *k == (1, 3)).unwrap();
    assert!(outside(d13, 2) > 1e-3);
    assert!(transcription_error(&h, &chain, s, s.time, true) > 1e-3);
}

#[test]
fn structured_spin_flip_closed_form() {
    let mut rng = rng(18);
    for _ in 0..100 {
        let (r1, r16) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let (r4, r6) = (rng.random_range(-0.5..0.5), rng.random_range(0.0..0.5));
        let numeric = sorted_real_eigenvalues(&structured_spin_flip(r1, r4, r6, r16));
        let closed = structured_spin_flip_eigenvalues(r1, r4, r6, r16);
        for (a, b) in numeric.iter().zip(closed) {
            assert!((a - b).abs() < 1e-10, "{numeric:?} vs {closed:?}");
        }
    }
}

#[test]
fn x_state_spin_flip_spectrum() {
    // ρ with ⟨gg|ρ|ee⟩ = ρ4 and equal single-excitation entries ρ6:
    // λ = 0, 4ρ6², (√(ρ1ρ16) ± ρ4)².
    let mut rng = rng(17);
    for _ in 0..100 {
        let r6: f64 = rng.random_range(0.0..0.25);
        let r1: f64 = rng.random_range(0.0..(1.0 - 2.0 * r6));
        let r16 = 1.0 - 2.0 * r6 - r1;
        let r4 = rng.random_range(-1.0..1.0f64) * (r1 * r16).sqrt();
        let rho = OperatorMatrix::from_real_rows(&[
            &[r1, 0.0, 0.0, r4],
            &[0.0, r6, r6, 0.0],
            &[0.0, r6, r6, 0.0],
            &[r4, 0.0, 0.0, r16],
        ]);
        let root = (r1 * r16).sqrt();
        let mut want = [0.0, 4.0 * r6 * r6, (root + r4).powi(2), (root - r4).powi(2)];
        want.sort_by(|a, b| b.total_cmp(a));
        let got = spin_flip_eigenvalues(&rho);
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-10, "{got:?} vs {want:?}");
        }
        let c = wootters_concurrence(&rho).unwrap();
        let s: Vec<f64> = want.iter().map(|x| x.sqrt()).collect();
        assert!((c - (s[0] - s[1] - s[2] - s[3]).max(0.0)).abs() < 1e-7);
    }
}

#[test]
fn fill_fixtures() {
    let product = OperatorMatrix::projector(8, 0);
    assert!((concurrence_fill(&ghz()).unwrap() - 1.0).abs() < 1e-9);
    assert!((concurrence_fill(&w_state()).unwrap() - 8.0 / 9.0).abs() < 1e-9);
    assert!(concurrence_fill(&product).unwrap().abs() < 1e-9);
}

#[test]
fn single_photon_kick() {
    // d/dt ρ_{0,1} at t̄ from the ground state is -√Γ_r g(t̄) |g⟩⟨e|.
    let chain = ChainConfig::uniform(1, EmitterParams::chiral(2.0, 1.0));
    let pulse = GaussianPulse::default();
    let h = Hierarchy::new(&chain, pulse, 1).unwrap();
    let s = initial_state(EmitterRegister::new(1).unwrap(), 1).unwrap();
    let d = h.rhs(&s, pulse.t_bar).unwrap();
    let want = -(2.0f64.sqrt()) * pulse.amplitude(pulse.t_bar);
    let d01 = d.block(0, 1).unwrap();
    assert!((d01[(0, 1)].re - want).abs() < 1e-14);
    assert_eq!(d01[(1, 0)].norm(), 0.0);
}
