//! Two- and three-qubit entanglement measures.
//!
//! * Wootters concurrence of a two-qubit mixed state from the eigenvalues of
//!   `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
//! * Squared one-to-other concurrence `C²_{i(jk)} = 2(1 - Tr ρ_i²)` from the
//!   single-qubit purity.
//! * Concurrence fill: the Heron area of the triangle with the three squared
//!   one-to-other concurrences as sides, scaled so that GHZ gives 1.

use crate::error::{Error, Result};
use crate::qubit_algebra::{EmitterRegister, OperatorMatrix, C64};

pub const HERMITIAN_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-6;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const TRIANGLE_TOL: f64 = 1e-9;

fn check_density(rho: &OperatorMatrix, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: rho.dim() });
    }
    let defect = rho.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotNormalized { trace });
    }
    Ok(())
}

/// `σ_y ⊗ σ_y`.
pub fn spin_flip() -> OperatorMatrix {
    let z = C64::new(0.0, 0.0);
    let sy = OperatorMatrix::from_row_slice(2, &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z]);
    sy.kron(&sy)
}

/// `ρ̃ = ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flipped(rho: &OperatorMatrix) -> OperatorMatrix {
    let yy = spin_flip();
    &(&(rho * &yy) * &rho.conjugate()) * &yy
}

/// Eigenvalues of [`spin_flipped`], real parts clamped at 0, descending.
pub fn spin_flip_eigenvalues(rho: &OperatorMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = spin_flipped(rho).eigenvalues().iter().map(|z| z.re.max(0.0)).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn wootters_concurrence(rho: &OperatorMatrix) -> Result<f64> {
    check_density(rho, 4)?;
    let min_ev = rho.min_eigenvalue();
    if min_ev < -POSITIVITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min_ev });
    }
    let s: Vec<f64> = spin_flip_eigenvalues(rho).into_iter().map(f64::sqrt).collect();
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// `2(1 - Tr ρ_i²)` for qubit `i` (1-based) of a three-qubit state. Unclamped.
pub fn one_to_other_c2(rho3: &OperatorMatrix, i: usize) -> Result<f64> {
    check_density(rho3, 8)?;
    let reg = EmitterRegister::new(3)?;
    let reduced = reg.partial_trace(rho3, &[i])?;
    Ok(2.0 * (1.0 - reduced.purity()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceTriangle {
    pub c2_1_23: f64,
    pub c2_2_13: f64,
    pub c2_3_12: f64,
}

impl ConcurrenceTriangle {
    /// Sides are clamped to `[0, 1]`; fails if the triangle inequality is
    /// violated by more than [`TRIANGLE_TOL`].
    pub fn new(c2_1_23: f64, c2_2_13: f64, c2_3_12: f64) -> Result<Self> {
        let t = Self::clamped(c2_1_23, c2_2_13, c2_3_12);
        let excess = t.triangle_excess();
        if excess > TRIANGLE_TOL {
            return Err(Error::TriangleViolation { excess });
        }
        Ok(t)
    }

    /// Sides clamped to `[0, 1]` without the triangle check.
    pub fn clamped(c2_1_23: f64, c2_2_13: f64, c2_3_12: f64) -> Self {
        Self { c2_1_23: c2_1_23.clamp(0.0, 1.0), c2_2_13: c2_2_13.clamp(0.0, 1.0), c2_3_12: c2_3_12.clamp(0.0, 1.0) }
    }

    /// Sides of a positive three-qubit state. Mixed states can violate the
    /// triangle inequality (`I/2 ⊗ |gg⟩⟨gg|` has sides 1, 0, 0), so only
    /// positivity is enforced; [`fill`](Self::fill) treats such triangles as
    /// degenerate.
    pub fn from_state(rho3: &OperatorMatrix) -> Result<Self> {
        check_density(rho3, 8)?;
        let min_ev = rho3.min_eigenvalue();
        if min_ev < -POSITIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min_ev });
        }
        Ok(Self::clamped(one_to_other_c2(rho3, 1)?, one_to_other_c2(rho3, 2)?, one_to_other_c2(rho3, 3)?))
    }

    pub fn sides(&self) -> [f64; 3] {
        [self.c2_1_23, self.c2_2_13, self.c2_3_12]
    }

    /// Largest amount by which one side exceeds the sum of the other two.
    pub fn triangle_excess(&self) -> f64 {
        let [a, b, c] = self.sides();
        (a - b - c).max(b - a - c).max(c - a - b)
    }

    /// Half-perimeter `Q`.
    pub fn q(&self) -> f64 {
        0.5 * self.sides().iter().sum::<f64>()
    }

    /// `[(16/3) Q (Q-a)(Q-b)(Q-c)]^{1/4}`, Heron factors clamped at 0.
    pub fn fill(&self) -> f64 {
        let q = self.q();
        let heron: f64 = self.sides().iter().map(|s| (q - s).max(0.0)).product();
        (16.0 / 3.0 * q * heron).powf(0.25)
    }
}

pub fn concurrence_fill(rho3: &OperatorMatrix) -> Result<f64> {
    Ok(ConcurrenceTriangle::from_state(rho3)?.fill())
}
