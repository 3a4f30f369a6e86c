//! Dense operator algebra on a register of two-level emitters.
//!
//! Basis convention: a basis index `b` in `0..2^N` stores the state of
//! emitter `j` (numbered from 1) in bit `N - j`, so emitter 1 is the most
//! significant bit. A set bit means the emitter is excited. For `N = 2` the
//! ordering is `|gg⟩, |ge⟩, |eg⟩, |ee⟩`.
//!
//! Operators on different emitters are built as tensor products, so they
//! commute. On a single emitter `{σ, σ†} = 1` and `σ² = 0`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest register the crate will build (dim 64). Physics runs use N ≤ 3.
pub const MAX_EMITTERS: usize = 6;

/// A register of `n_emitters` two-level emitters with Hilbert dimension `2^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EmitterRegister {
    n_emitters: usize,
}

impl EmitterRegister {
    pub fn new(n_emitters: usize) -> Result<Self> {
        if n_emitters == 0 || n_emitters > MAX_EMITTERS {
            return Err(Error::RegisterSize(n_emitters));
        }
        Ok(Self { n_emitters })
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn dim(&self) -> usize {
        1 << self.n_emitters
    }

    fn check_emitter(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.n_emitters {
            return Err(Error::EmitterIndex { index: j, n_emitters: self.n_emitters });
        }
        Ok(())
    }

    /// Bit mask selecting emitter `j` (1-based) inside a basis index.
    pub fn emitter_mask(&self, j: usize) -> Result<usize> {
        self.check_emitter(j)?;
        Ok(1 << (self.n_emitters - j))
    }

    /// Whether emitter `j` is excited in basis state `b`.
    pub fn is_excited(&self, b: usize, j: usize) -> bool {
        b & (1 << (self.n_emitters - j)) != 0
    }

    /// Number of excited emitters in basis state `b`.
    pub fn excitations(&self, b: usize) -> usize {
        b.count_ones() as usize
    }

    /// Label such as `"egg"`, emitter 1 first.
    pub fn basis_label(&self, b: usize) -> String {
        (1..=self.n_emitters)
            .map(|j| if self.is_excited(b, j) { 'e' } else { 'g' })
            .collect()
    }

    /// Inverse of [`basis_label`](Self::basis_label).
    pub fn parse_basis_label(&self, label: &str) -> Result<usize> {
        if label.chars().count() != self.n_emitters {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let mut b = 0;
        for c in label.chars() {
            b <<= 1;
            match c {
                'e' => b |= 1,
                'g' => {}
                _ => return Err(Error::UnknownLabel(label.to_string())),
            }
        }
        Ok(b)
    }

    /// `σ_j = |g_j⟩⟨e_j|` on the full register.
    pub fn lowering_op(&self, j: usize) -> Result<OperatorMatrix> {
        let mask = self.emitter_mask(j)?;
        let dim = self.dim();
        let mut m = OperatorMatrix::zeros(dim);
        for b in 0..dim {
            if b & mask != 0 {
                m[(b & !mask, b)] = C64::new(1.0, 0.0);
            }
        }
        Ok(m)
    }

    /// `σ_j† σ_j`, the excited-state projector of emitter `j`.
    pub fn number_op(&self, j: usize) -> Result<OperatorMatrix> {
        let mask = self.emitter_mask(j)?;
        let dim = self.dim();
        Ok(OperatorMatrix::from_fn(dim, |r, c| {
            if r == c && r & mask != 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// `⊗_j |g_j⟩⟨g_j|`.
    pub fn ground_projector(&self) -> OperatorMatrix {
        OperatorMatrix::projector(self.dim(), 0)
    }

    /// Reduced operator on the emitters in `keep` (1-based, any order).
    ///
    /// The reduced register keeps the original relative order of the emitters,
    /// so the lowest-numbered kept emitter becomes the most significant bit.
    pub fn partial_trace(&self, rho: &OperatorMatrix, keep: &[usize]) -> Result<OperatorMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: rho.dim() });
        }
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        for &j in &kept {
            self.check_emitter(j)?;
        }
        let traced: Vec<usize> = (1..=self.n_emitters).filter(|j| !kept.contains(j)).collect();

        let compose = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut b = 0;
            for (pos, &j) in kept.iter().enumerate() {
                if kept_bits & (1 << (kept.len() - 1 - pos)) != 0 {
                    b |= 1 << (self.n_emitters - j);
                }
            }
            for (pos, &j) in traced.iter().enumerate() {
                if traced_bits & (1 << (traced.len() - 1 - pos)) != 0 {
                    b |= 1 << (self.n_emitters - j);
                }
            }
            b
        };

        let out_dim = 1 << kept.len();
        let env_dim = 1 << traced.len();
        let mut out = OperatorMatrix::zeros(out_dim);
        for r in 0..out_dim {
            for c in 0..out_dim {
                let mut acc = C64::new(0.0, 0.0);
                for e in 0..env_dim {
                    acc += rho[(compose(r, e), compose(c, e))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(out)
    }
}

/// Dense complex square matrix: the representation of every system
/// operator and every hierarchy block.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix(DMatrix<C64>);

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Row-major construction. Panics if `entries.len()` is not a square.
    pub fn from_row_slice(dim: usize, entries: &[C64]) -> Self {
        Self(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |r, c| C64::new(rows[r][c], 0.0))
    }

    /// `|b⟩⟨b|`.
    pub fn projector(dim: usize, b: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(b, b)] = C64::new(1.0, 0.0);
        m
    }

    /// `|ψ⟩⟨ψ|` for an (unnormalised) amplitude vector.
    pub fn pure(amplitudes: &[C64]) -> Self {
        let dim = amplitudes.len();
        Self::from_fn(dim, |r, c| amplitudes[r] * amplitudes[c].conj())
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension { expected: m.nrows(), got: m.ncols() });
        }
        Ok(Self(m))
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Elementwise complex conjugate in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self(&self.0 * &other.0))
    }

    /// `ab − ba`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.check_same(b)?;
        Ok(Self(&a.0 * &b.0 - &b.0 * &a.0))
    }

    /// `ab + ba`.
    pub fn anticommutator(a: &Self, b: &Self) -> Result<Self> {
        a.check_same(b)?;
        Ok(Self(&a.0 * &b.0 + &b.0 * &a.0))
    }

    /// Largest entry of `|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `Tr(A²)` real part; the purity for a density matrix.
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// Eigenvalues of the hermitian part `(A + A†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }

    /// Eigenvalues of a general complex matrix via the Schur form.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let schur = self.0.clone().schur();
        let (_, t) = schur.unpack();
        (0..t.nrows()).map(|i| t[(i, i)]).collect()
    }

    /// Largest entrywise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> Vec<C64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                v.push(self.0[(r, c)]);
            }
        }
        v
    }
}

/// `A†`.
pub fn adjoint(a: &OperatorMatrix) -> OperatorMatrix {
    a.adjoint()
}

pub fn trace(a: &OperatorMatrix) -> C64 {
    a.trace()
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    OperatorMatrix::commutator(a, b)
}

impl std::ops::Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl std::ops::IndexMut<(usize, usize)> for OperatorMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        writeln!(f, "OperatorMatrix({d}x{d}) [")?;
        for r in 0..d {
            write!(f, "  ")?;
            for c in 0..d {
                let z = self.0[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator overloads panic on dimension mismatch, like nalgebra's; use the
// `try_*`/`commutator` forms where the sizes come from user input.

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(self.0 + rhs.0)
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(self.0 - rhs.0)
    }
}

impl AddAssign<&OperatorMatrix> for OperatorMatrix {
    fn add_assign(&mut self, rhs: &OperatorMatrix) {
        self.0 += &rhs.0;
    }
}

impl Mul<C64> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, s: C64) -> OperatorMatrix {
        OperatorMatrix(&self.0 * s)
    }
}

impl Neg for OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix(-self.0)
    }
}
