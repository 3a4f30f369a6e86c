//! Fock-state master-equation hierarchy for an `n_ph`-photon input.
//!
//! The state is the set of operators `ρ_{m,n}` for `0 ≤ m, n ≤ n_ph`. Only
//! blocks with `m ≤ n` are stored; `ρ_{n,m} = ρ_{m,n}†` is materialised on
//! demand. Each block obeys
//!
//! ```text
//! dρ_{m,n}/dt = L[ρ_{m,n}]
//!     + Σ_i √Γ_ir ( √m e^{ik₀d_i} g(t) [ρ_{m-1,n}, σ_i†]
//!                 + √n e^{-ik₀d_i} g*(t) [σ_i, ρ_{m,n-1}] )
//! ```
//!
//! with the `m = 0` (resp. `n = 0`) term absent. Only right-moving modes are
//! driven; the left input is vacuum. `ρ_{n_ph,n_ph}` is the physical
//! emitter state.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::integrator::OdeSystem;
use crate::liouvillian::{ChainConfig, Liouvillian, Superoperator};
use crate::pulse::GaussianPulse;
use crate::qubit_algebra::{EmitterRegister, OperatorMatrix, C64};

pub const MAX_PHOTONS: usize = 3;

/// Stored `(m, n)` pairs in lexicographic order, `m ≤ n`.
pub fn block_keys(n_ph: usize) -> Vec<(usize, usize)> {
    let mut keys = Vec::with_capacity((n_ph + 1) * (n_ph + 2) / 2);
    for m in 0..=n_ph {
        for n in m..=n_ph {
            keys.push((m, n));
        }
    }
    keys
}

fn check_photons(n_ph: usize) -> Result<()> {
    if n_ph == 0 || n_ph > MAX_PHOTONS {
        return Err(Error::PhotonNumber(n_ph));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyState {
    n_ph: usize,
    dim: usize,
    blocks: Vec<OperatorMatrix>,
    pub time: f64,
}

impl HierarchyState {
    /// All diagonal blocks in the ground state, all coherences zero, `t = 0`.
    pub fn initial(register: EmitterRegister, n_ph: usize) -> Result<Self> {
        check_photons(n_ph)?;
        let dim = register.dim();
        let blocks = block_keys(n_ph)
            .into_iter()
            .map(|(m, n)| if m == n { register.ground_projector() } else { OperatorMatrix::zeros(dim) })
            .collect();
        Ok(Self { n_ph, dim, blocks, time: 0.0 })
    }

    /// Assembles a state from blocks in [`block_keys`] order.
    pub fn from_blocks(n_ph: usize, blocks: Vec<OperatorMatrix>, time: f64) -> Result<Self> {
        check_photons(n_ph)?;
        let expected = (n_ph + 1) * (n_ph + 2) / 2;
        if blocks.len() != expected {
            return Err(Error::MalformedState(format!("expected {expected} blocks, got {}", blocks.len())));
        }
        let dim = blocks[0].dim();
        if let Some(b) = blocks.iter().find(|b| b.dim() != dim) {
            return Err(Error::Dimension { expected: dim, got: b.dim() });
        }
        Ok(Self { n_ph, dim, blocks, time })
    }

    pub fn n_photons(&self) -> usize {
        self.n_ph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `ρ_{m,n}`; borrowed when stored, an adjoint when `m > n`.
    pub fn block(&self, m: usize, n: usize) -> Result<Cow<'_, OperatorMatrix>> {
        if m > self.n_ph || n > self.n_ph {
            return Err(Error::MalformedState(format!("block ({m},{n}) outside n_ph = {}", self.n_ph)));
        }
        if m <= n {
            Ok(Cow::Borrowed(&self.blocks[block_offset(self.n_ph, m, n)]))
        } else {
            Ok(Cow::Owned(self.blocks[block_offset(self.n_ph, n, m)].adjoint()))
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &OperatorMatrix)> {
        block_keys(self.n_ph).into_iter().zip(self.blocks.iter())
    }

    pub fn physical_density(&self) -> &OperatorMatrix {
        &self.blocks[block_offset(self.n_ph, self.n_ph, self.n_ph)]
    }

    /// Blocks concatenated in key order, each row-major.
    pub fn to_flat(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.blocks.len() * self.dim * self.dim);
        for b in &self.blocks {
            v.extend(b.to_row_major());
        }
        v
    }

    pub fn from_flat(n_ph: usize, dim: usize, flat: &[C64], time: f64) -> Result<Self> {
        check_photons(n_ph)?;
        let per = dim * dim;
        let count = (n_ph + 1) * (n_ph + 2) / 2;
        if flat.len() != per * count {
            return Err(Error::MalformedState(format!("flat length {} != {}", flat.len(), per * count)));
        }
        let blocks = flat.chunks_exact(per).map(|c| OperatorMatrix::from_row_slice(dim, c)).collect();
        Ok(Self { n_ph, dim, blocks, time })
    }
}

/// Position of stored block `(m, n)`, `m ≤ n`, in [`block_keys`] order.
pub fn block_offset(n_ph: usize, m: usize, n: usize) -> usize {
    // rows k < m hold (n_ph + 1 - k) blocks each
    let before: usize = (0..m).map(|k| n_ph + 1 - k).sum();
    before + (n - m)
}

pub fn initial_state(register: EmitterRegister, n_ph: usize) -> Result<HierarchyState> {
    HierarchyState::initial(register, n_ph)
}

pub fn physical_density(state: &HierarchyState) -> &OperatorMatrix {
    state.physical_density()
}

/// Right-hand side of the hierarchy for one chain and pulse.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    n_ph: usize,
    dim: usize,
    pulse: GaussianPulse,
    liouvillian: Liouvillian,
    lindblad: Superoperator,
    /// `X ↦ Σ_i √Γ_ir e^{ik₀d_i} [X, σ_i†]`
    raise: Superoperator,
    /// `X ↦ Σ_i √Γ_ir e^{-ik₀d_i} [σ_i, X]`
    lower: Superoperator,
    /// For each stored block: (m, n, source of the raise term, source of the lower term).
    plan: Vec<BlockPlan>,
}

#[derive(Debug, Clone, Copy)]
struct BlockPlan {
    m: usize,
    n: usize,
    raise_from: Option<usize>,
    lower_from: Option<Source>,
}

#[derive(Debug, Clone, Copy)]
enum Source {
    Stored(usize),
    Adjoint(usize),
}

impl Hierarchy {
    pub fn new(chain: &ChainConfig, pulse: GaussianPulse, n_ph: usize) -> Result<Self> {
        check_photons(n_ph)?;
        let liouvillian = Liouvillian::new(chain)?;
        let dim = liouvillian.dim();
        let n = chain.n_emitters();
        let lindblad = liouvillian.superoperator();

        let couplings: Vec<(f64, C64)> = (0..n)
            .map(|i| (chain.emitters[i].gamma_r.sqrt(), C64::from_polar(1.0, chain.k0d[i])))
            .collect();
        let raise = Superoperator::from_linear_map(dim, |x| {
            let mut out = OperatorMatrix::zeros(dim);
            for (i, &(amp, phase)) in couplings.iter().enumerate() {
                let c = OperatorMatrix::commutator(x, liouvillian.raising(i + 1)).expect("dims");
                out += &c.scale(phase * amp);
            }
            out
        });
        let lower = Superoperator::from_linear_map(dim, |x| {
            let mut out = OperatorMatrix::zeros(dim);
            for (i, &(amp, phase)) in couplings.iter().enumerate() {
                let c = OperatorMatrix::commutator(liouvillian.lowering(i + 1), x).expect("dims");
                out += &c.scale(phase.conj() * amp);
            }
            out
        });

        let plan = block_keys(n_ph)
            .into_iter()
            .map(|(m, n)| BlockPlan {
                m,
                n,
                raise_from: (m > 0).then(|| block_offset(n_ph, m - 1, n)),
                lower_from: (n > 0).then(|| {
                    if m < n {
                        Source::Stored(block_offset(n_ph, m, n - 1))
                    } else {
                        Source::Adjoint(block_offset(n_ph, n - 1, m))
                    }
                }),
            })
            .collect();

        Ok(Self { n_ph, dim, pulse, liouvillian, lindblad, raise, lower, plan })
    }

    pub fn n_photons(&self) -> usize {
        self.n_ph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pulse(&self) -> &GaussianPulse {
        &self.pulse
    }

    pub fn liouvillian(&self) -> &Liouvillian {
        &self.liouvillian
    }

    /// Time derivative of every stored block, assembled with dense matrix
    /// products. The integrator uses the equivalent sparse [`OdeSystem`] path.
    pub fn rhs(&self, state: &HierarchyState, t: f64) -> Result<HierarchyState> {
        if state.n_photons() != self.n_ph {
            return Err(Error::MalformedState(format!(
                "state has n_ph = {}, hierarchy expects {}",
                state.n_photons(),
                self.n_ph
            )));
        }
        if state.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: state.dim() });
        }
        let g = self.pulse.amplitude(t);
        let chain = self.liouvillian.config();
        let mut out = Vec::with_capacity(state.n_blocks());
        for (m, n) in block_keys(self.n_ph) {
            let mut d = self.liouvillian.total(state.block(m, n)?.as_ref())?;
            for (i, e) in chain.emitters.iter().enumerate() {
                let amp = e.gamma_r.sqrt();
                let phase = C64::from_polar(1.0, chain.k0d[i]);
                if m > 0 {
                    let src = state.block(m - 1, n)?;
                    let c = OperatorMatrix::commutator(&src, self.liouvillian.raising(i + 1))?;
                    d += &c.scale(phase * (amp * (m as f64).sqrt() * g));
                }
                if n > 0 {
                    let src = state.block(m, n - 1)?;
                    let c = OperatorMatrix::commutator(self.liouvillian.lowering(i + 1), &src)?;
                    d += &c.scale(phase.conj() * (amp * (n as f64).sqrt() * g));
                }
            }
            out.push(d);
        }
        HierarchyState::from_blocks(self.n_ph, out, t)
    }

    pub fn flat_len(&self) -> usize {
        self.plan.len() * self.dim * self.dim
    }
}

impl OdeSystem for Hierarchy {
    fn len(&self) -> usize {
        self.flat_len()
    }

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let per = self.dim * self.dim;
        let g = self.pulse.amplitude(t);
        let mut adjoint_buf = vec![C64::new(0.0, 0.0); per];
        dy.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (k, p) in self.plan.iter().enumerate() {
            let out = &mut dy[k * per..(k + 1) * per];
            self.lindblad.apply_add(&y[k * per..(k + 1) * per], C64::new(1.0, 0.0), out);
            if g == 0.0 {
                continue;
            }
            if let Some(src) = p.raise_from {
                let w = C64::new((p.m as f64).sqrt() * g, 0.0);
                self.raise.apply_add(&y[src * per..(src + 1) * per], w, out);
            }
            if let Some(src) = p.lower_from {
                let w = C64::new((p.n as f64).sqrt() * g, 0.0);
                match src {
                    Source::Stored(s) => self.lower.apply_add(&y[s * per..(s + 1) * per], w, out),
                    Source::Adjoint(s) => {
                        let block = &y[s * per..(s + 1) * per];
                        for r in 0..self.dim {
                            for c in 0..self.dim {
                                adjoint_buf[r * self.dim + c] = block[c * self.dim + r].conj();
                            }
                        }
                        self.lower.apply_add(&adjoint_buf, w, out);
                    }
                }
            }
        }
    }
}
