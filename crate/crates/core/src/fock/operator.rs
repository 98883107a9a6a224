use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64 as C64;

use super::space::{HilbertSpace, Qubit};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance applied to every Hamiltonian builder.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex operator on a [`HilbertSpace`].
///
/// Arithmetic operators (`+`, `-`, `*`) panic when the operands belong to
/// different spaces; use [`Operator::checked_mul`] and friends to get an
/// error instead.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn from_matrix(space: HilbertSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.shape() != (d, d) {
            return Err(Error::invalid(format!(
                "matrix shape {:?} does not match space dimension {d}",
                matrix.shape()
            )));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::invalid("operator has non-finite entries"));
        }
        Ok(Self { space, matrix })
    }

    /// `1_qubit ⊗ boson`.
    pub fn from_boson(space: HilbertSpace, boson: &DMatrix<C64>) -> Self {
        assert_eq!(boson.nrows(), space.dim_boson());
        let matrix = Matrix2::<C64>::identity().kronecker(boson);
        Self { space, matrix }
    }

    /// `qubit ⊗ 1_boson`.
    pub fn from_qubit(space: HilbertSpace, qubit: &Matrix2<C64>) -> Self {
        let nb = space.dim_boson();
        let matrix = qubit.kronecker(&DMatrix::<C64>::identity(nb, nb));
        Self { space, matrix }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Matrix element `<q_row, n_row| O |q_col, n_col>`.
    pub fn element(&self, row: (Qubit, usize), col: (Qubit, usize)) -> C64 {
        let r = self.space.index(row.0, row.1);
        let c = self.space.index(col.0, col.1);
        self.matrix[(r, c)]
    }

    pub fn adjoint(&self) -> Operator {
        Self {
            space: self.space,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Maximum absolute row sum; an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.matrix.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |O - O†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut defect = 0.0f64;
        for i in 0..d {
            for j in i..d {
                defect = defect.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        defect
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs()
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian(HERMITIAN_TOL) {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                defect: self.hermiticity_defect(),
            })
        }
    }

    pub fn checked_mul(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(self * other)
    }

    pub fn checked_add(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(self + other)
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(&(self * other) - &(other * self))
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Self {
            space: self.space,
            matrix: &self.matrix * factor,
        }
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator space mismatch");
        Operator {
            space: self.space,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator space mismatch");
        Operator {
            space: self.space,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "operator space mismatch");
        Operator {
            space: self.space,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            space: self.space,
            matrix: -&self.matrix,
        }
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(C64::new(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_matrix_validates() {
        let s = HilbertSpace::new(1).unwrap();
        assert!(Operator::from_matrix(s, DMatrix::zeros(3, 3)).is_err());
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(Operator::from_matrix(s, m).is_err());
    }

    #[test]
    fn checked_ops_reject_mismatch() {
        let a = Operator::identity(HilbertSpace::new(2).unwrap());
        let b = Operator::identity(HilbertSpace::new(3).unwrap());
        assert!(a.checked_mul(&b).is_err());
        assert!(a.commutator(&b).is_err());
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn hermiticity_check() {
        let s = HilbertSpace::new(1).unwrap();
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, -1.0);
        let h = Operator::from_matrix(s, m.clone()).unwrap();
        assert!(h.ensure_hermitian().is_ok());
        m[(1, 0)] = C64::new(0.0, 1.0);
        let h = Operator::from_matrix(s, m).unwrap();
        assert!(matches!(
            h.ensure_hermitian(),
            Err(Error::NotHermitian { .. })
        ));
    }
}
