//! Dense complex linear algebra on the 16-dimensional two-photon space and
//! its single-photon (4) and single-qubit (2) factors.
//!
//! Basis ordering: the flat index of `|p1pol, p1path, p2pol, p2path⟩` is
//! `8·p1pol + 4·p1path + 2·p2pol + p2path`, with `H = u = 0` and
//! `V = d = 1`. In every Kronecker product the left argument is the more
//! significant factor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude type used throughout the crate.
pub type C64 = Complex64;

/// Tolerance for all exact-algebra assertions.
pub const TOL: f64 = 1e-12;

/// Largest dimension the crate ever handles.
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HilbertError {
    #[error("dimension {0} is not one of 2, 4, 8, 16")]
    InvalidDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("tensor product dimension {0} exceeds {MAX_DIM}")]
    DimensionOverflow(usize),
    #[error("entry count {got} does not match a {dim}x{dim} operator")]
    EntryCount { dim: usize, got: usize },
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("expectation has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

pub type Result<T> = std::result::Result<T, HilbertError>;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 | 16 => Ok(()),
        other => Err(HilbertError::InvalidDimension(other)),
    }
}

fn check_finite(values: &[C64]) -> Result<()> {
    match values
        .iter()
        .position(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        Some(i) => Err(HilbertError::NonFinite(i)),
        None => Ok(()),
    }
}

/// One computational basis label of the joint space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    pub p1pol: u8,
    pub p1path: u8,
    pub p2pol: u8,
    pub p2path: u8,
}

impl BasisIndex {
    pub fn new(p1pol: u8, p1path: u8, p2pol: u8, p2path: u8) -> Self {
        debug_assert!(p1pol < 2 && p1path < 2 && p2pol < 2 && p2path < 2);
        Self {
            p1pol,
            p1path,
            p2pol,
            p2path,
        }
    }

    pub fn flat(self) -> usize {
        8 * self.p1pol as usize
            + 4 * self.p1path as usize
            + 2 * self.p2pol as usize
            + self.p2path as usize
    }

    pub fn from_flat(index: usize) -> Self {
        assert!(index < MAX_DIM, "basis index {index} out of range");
        Self {
            p1pol: ((index >> 3) & 1) as u8,
            p1path: ((index >> 2) & 1) as u8,
            p2pol: ((index >> 1) & 1) as u8,
            p2path: (index & 1) as u8,
        }
    }

    /// Single-photon index (`2·pol + path`) of photon 1 or 2.
    pub fn photon_local(self, photon: u8) -> usize {
        match photon {
            1 => 2 * self.p1pol as usize + self.p1path as usize,
            2 => 2 * self.p2pol as usize + self.p2path as usize,
            _ => panic!("photon must be 1 or 2"),
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pol = |b| if b == 0 { 'H' } else { 'V' };
        let path = |b| if b == 0 { 'u' } else { 'd' };
        write!(
            f,
            "|{},{},{},{}⟩",
            pol(self.p1pol),
            path(self.p1path),
            pol(self.p2pol),
            path(self.p2path)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        check_finite(&amps)?;
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis ket `|index⟩` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < TOL
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Max-abs entry of `self − other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Born probabilities in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let dim = self.dim() * other.dim();
        if dim > MAX_DIM {
            return Err(HilbertError::DimensionOverflow(dim));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { amps })
    }
}

impl Add for &StateVector {
    type Output = StateVector;

    fn add(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "state dimension mismatch");
        StateVector {
            amps: self
                .amps
                .iter()
                .zip(&rhs.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &StateVector {
    type Output = StateVector;

    fn sub(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "state dimension mismatch");
        StateVector {
            amps: self
                .amps
                .iter()
                .zip(&rhs.amps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Which structural properties an operator satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Unitary,
    General,
}

/// A dense `dim × dim` complex matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
    hermitian: bool,
    unitary: bool,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(HilbertError::EntryCount {
                dim,
                got: entries.len(),
            });
        }
        check_finite(&entries)?;
        Ok(Self::classified(dim, entries))
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    fn classified(dim: usize, entries: Vec<C64>) -> Self {
        let mut op = Self {
            dim,
            entries,
            hermitian: false,
            unitary: false,
        };
        op.hermitian = op.hermiticity_defect() < TOL;
        op.unitary = op.unitarity_defect() < TOL;
        op
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        Ok(Self {
            dim,
            entries,
            hermitian: true,
            unitary: true,
        })
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        let dim = values.len();
        check_dim(dim)?;
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for (i, v) in values.iter().enumerate() {
            entries[i * dim + i] = *v;
        }
        Self::new(dim, entries)
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        same_dim(ket.dim(), bra.dim())?;
        let dim = ket.dim();
        let entries = (0..dim * dim)
            .map(|k| ket.amp(k / dim) * bra.amp(k % dim).conj())
            .collect();
        Self::new(dim, entries)
    }

    /// Operator whose columns are the given states.
    pub fn from_columns(columns: &[StateVector]) -> Result<Self> {
        let dim = columns.len();
        check_dim(dim)?;
        for c in columns {
            same_dim(dim, c.dim())?;
        }
        let entries = (0..dim * dim)
            .map(|k| columns[k % dim].amp(k / dim))
            .collect();
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn kind(&self) -> OperatorKind {
        if self.hermitian {
            OperatorKind::Hermitian
        } else if self.unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        }
    }

    /// Max-abs entry of `A − A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Max-abs entry of `A†A − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.entry(k, i).conj() * self.entry(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn adjoint(&self) -> Operator {
        let n = self.dim;
        let entries = (0..n * n)
            .map(|k| self.entry(k % n, k / n).conj())
            .collect();
        Self {
            dim: n,
            entries,
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    pub fn matmul(&self, rhs: &Operator) -> Result<Operator> {
        same_dim(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * rhs.entry(k, j);
                }
            }
        }
        Ok(Self::classified(n, entries))
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        same_dim(self.dim, state.dim())?;
        let n = self.dim;
        let amps = (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j) * state.amp(j)).sum())
            .collect();
        Ok(StateVector { amps })
    }

    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(HilbertError::DimensionOverflow(dim));
        }
        let (m, n) = (self.dim, other.dim);
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..m {
            for j in 0..m {
                let a = self.entry(i, j);
                for k in 0..n {
                    for l in 0..n {
                        entries[(i * n + k) * dim + (j * n + l)] = a * other.entry(k, l);
                    }
                }
            }
        }
        Ok(Self::classified(dim, entries))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Self::classified(self.dim, self.entries.iter().map(|a| a * factor).collect())
    }

    /// Max-abs entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        same_dim(self.dim, other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Real part of `⟨s|A|s⟩` for Hermitian `A`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if !self.hermitian {
            return Err(HilbertError::NotHermitian(self.hermiticity_defect()));
        }
        let value = state.inner(&self.apply(state)?)?;
        if value.im.abs() >= TOL {
            return Err(HilbertError::ImaginaryResidue(value.im.abs()));
        }
        Ok(value.re)
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator::classified(
            self.dim,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator::classified(
            self.dim,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        self.scale(-1.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs).expect("operator dimension mismatch")
    }
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(HilbertError::DimensionMismatch { left, right })
    }
}

/// Kronecker product of two states or two operators.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Result<Self> {
        StateVector::tensor(self, other)
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        Operator::tensor(self, other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// Left-to-right Kronecker product of a non-empty list of factors.
pub fn tensor_all<T: Tensor + Clone>(factors: &[T]) -> Result<T> {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().try_fold(first.clone(), |acc, f| acc.tensor(f))
}

pub fn apply(op: &Operator, state: &StateVector) -> Result<StateVector> {
    op.apply(state)
}

pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    a.inner(b)
}

pub fn expectation(op: &Operator, state: &StateVector) -> Result<f64> {
    op.expectation(state)
}

pub fn adjoint(op: &Operator) -> Operator {
    op.adjoint()
}

pub fn matmul(a: &Operator, b: &Operator) -> Result<Operator> {
    a.matmul(b)
}

/// Max-abs entry of `ab − ba`.
pub fn commutator_norm(a: &Operator, b: &Operator) -> Result<f64> {
    a.matmul(b)?.max_abs_diff(&b.matmul(a)?)
}

/// Single-qubit kets and Pauli matrices.
pub mod qubit {
    use super::{Operator, StateVector, C64};
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn zero() -> StateVector {
        StateVector::basis(2, 0).unwrap()
    }

    pub fn one() -> StateVector {
        StateVector::basis(2, 1).unwrap()
    }

    /// `(|0⟩ + sign·|1⟩)/√2`.
    pub fn plus_minus(sign: f64) -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, sign * FRAC_1_SQRT_2]).unwrap()
    }

    pub fn identity() -> Operator {
        Operator::identity(2).unwrap()
    }

    pub fn sigma_x() -> Operator {
        Operator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn sigma_z() -> Operator {
        Operator::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    pub fn hadamard() -> Operator {
        let h = FRAC_1_SQRT_2;
        Operator::from_real(2, &[h, h, h, -h]).unwrap()
    }

    pub fn phase(phi: f64) -> Operator {
        Operator::diagonal(&[C64::new(1.0, 0.0), C64::from_polar(1.0, phi)]).unwrap()
    }
}
