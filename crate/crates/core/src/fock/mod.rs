//! Qubit and boson operators on the truncated composite space, plus the
//! nonlinear coupling function f1.

mod displacement;
mod f1;
mod laguerre;
mod operator;
mod space;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

pub use displacement::displacement_block;
pub use f1::{
    barrier_eta, barrier_eta_in, f1, f1_closed_form, rabi_rate, NonlinearCoupling, Sideband,
    BARRIER_BRACKET,
};
pub use laguerre::{laguerre, laguerre_sequence};
pub use operator::{Operator, HERMITIAN_TOL};
pub use space::{HilbertSpace, Qubit};

use crate::error::Result;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `a`, acting as identity on the qubit.
pub fn annihilation(space: HilbertSpace) -> Operator {
    let nb = space.dim_boson();
    let mut b = DMatrix::<C64>::zeros(nb, nb);
    for n in 1..nb {
        b[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator::from_boson(space, &b)
}

/// `a†`.
pub fn creation(space: HilbertSpace) -> Operator {
    annihilation(space).adjoint()
}

/// `n̂ = a†a`, exact on the whole truncated space.
pub fn number(space: HilbertSpace) -> Operator {
    let nb = space.dim_boson();
    let b = DMatrix::<C64>::from_fn(nb, nb, |i, j| {
        if i == j {
            C64::new(i as f64, 0.0)
        } else {
            ZERO
        }
    });
    Operator::from_boson(space, &b)
}

/// Qubit operators, identity on the boson.
#[derive(Clone, Debug)]
pub struct QubitOps {
    pub sigma_z: Operator,
    pub sigma_plus: Operator,
    pub sigma_minus: Operator,
    pub sigma_x: Operator,
}

pub fn qubit_ops(space: HilbertSpace) -> QubitOps {
    // rows/cols ordered (↓, ↑)
    let z = Matrix2::new(-ONE, ZERO, ZERO, ONE);
    let plus = Matrix2::new(ZERO, ZERO, ONE, ZERO);
    let minus = plus.adjoint();
    let x = plus + minus;
    QubitOps {
        sigma_z: Operator::from_qubit(space, &z),
        sigma_plus: Operator::from_qubit(space, &plus),
        sigma_minus: Operator::from_qubit(space, &minus),
        sigma_x: Operator::from_qubit(space, &x),
    }
}

/// Diagonal `f1(n̂)` for the given Lamb-Dicke parameter.
pub fn f1_operator(space: HilbertSpace, eta: f64) -> Result<Operator> {
    let table = NonlinearCoupling::new(eta, space.n_max())?;
    Ok(f1_operator_from(space, &table))
}

pub(crate) fn f1_operator_from(space: HilbertSpace, table: &NonlinearCoupling) -> Operator {
    let nb = space.dim_boson();
    let b = DMatrix::<C64>::from_fn(nb, nb, |i, j| {
        if i == j {
            C64::new(table.value(i), 0.0)
        } else {
            ZERO
        }
    });
    Operator::from_boson(space, &b)
}

/// `D(beta)` on the boson factor, built from the Laguerre closed form.
pub fn displacement(space: HilbertSpace, beta: C64) -> Operator {
    Operator::from_boson(space, &displacement_block(space.n_max(), beta))
}

/// Parity `σ_z (-1)^n̂`, the Z2 symmetry of the (nonlinear) Rabi model.
pub fn parity(space: HilbertSpace) -> Operator {
    let nb = space.dim_boson();
    let d = space.dim();
    let m = DMatrix::<C64>::from_fn(d, d, |i, j| {
        if i != j {
            return ZERO;
        }
        let qubit_sign = if i < nb { -1.0 } else { 1.0 };
        let boson_sign = if (i % nb).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        C64::new(qubit_sign * boson_sign, 0.0)
    });
    Operator::from_matrix(space, m).expect("parity is finite and correctly sized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn space(n: usize) -> HilbertSpace {
        HilbertSpace::new(n).unwrap()
    }

    fn basis(s: HilbertSpace, q: Qubit, n: usize) -> DVector<C64> {
        let mut v = DVector::zeros(s.dim());
        v[s.index(q, n)] = ONE;
        v
    }

    #[test]
    fn annihilation_elements() {
        let s = space(6);
        let a = annihilation(s);
        for q in [Qubit::Down, Qubit::Up] {
            assert_eq!(a.element((q, 0), (q, 1)), ONE);
            assert!((a.element((q, 1), (q, 2)).re - 2f64.sqrt()).abs() < 1e-15);
            assert_eq!(a.element((Qubit::Down, 0), (Qubit::Up, 1)), ZERO);
        }
        let v = a.apply(&basis(s, Qubit::Down, 0));
        assert!(v.iter().all(|z| *z == ZERO));
        // top row of the boson block is empty: nothing maps into n_max
        for j in 0..s.dim() {
            assert_eq!(a.matrix()[(s.index(Qubit::Up, 6), j)], ZERO);
        }
    }

    #[test]
    fn canonical_commutator_inside_truncation() {
        let s = space(12);
        let a = annihilation(s);
        let c = a.commutator(&creation(s)).unwrap();
        for q in [Qubit::Down, Qubit::Up] {
            for n in 0..s.n_max() {
                for m in 0..s.n_max() {
                    let want = if n == m { ONE } else { ZERO };
                    assert!((c.element((q, n), (q, m)) - want).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn number_is_a_dagger_a() {
        let s = space(8);
        let a = annihilation(s);
        let n = &creation(s) * &a;
        assert!((&n - &number(s)).max_abs() < 1e-14);
    }

    #[test]
    fn pauli_relations() {
        let s = space(4);
        let q = qubit_ops(s);
        let up3 = q.sigma_plus.apply(&basis(s, Qubit::Down, 3));
        assert_eq!(up3, basis(s, Qubit::Up, 3));
        assert_eq!(
            q.sigma_z.apply(&basis(s, Qubit::Up, 2)),
            basis(s, Qubit::Up, 2)
        );
        assert_eq!(
            q.sigma_z.apply(&basis(s, Qubit::Down, 2)),
            -basis(s, Qubit::Down, 2)
        );
        assert_eq!(&q.sigma_z * &q.sigma_z, Operator::identity(s));
        assert_eq!(q.sigma_x, &q.sigma_plus + &q.sigma_minus);
        assert_eq!(q.sigma_minus, q.sigma_plus.adjoint());
    }

    #[test]
    fn f1_operator_properties() {
        let s = space(30);
        assert_eq!(f1_operator(s, 0.0).unwrap(), Operator::identity(s));
        let f = f1_operator(s, 0.57838).unwrap();
        assert!(f.element((Qubit::Up, 10), (Qubit::Up, 10)).norm() < 1e-3);
        assert!(f.ensure_hermitian().is_ok());
        let c = f.commutator(&number(s)).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn f1_bounded_by_one() {
        for eta in [0.01, 0.1, 0.3, 0.5, 0.8, 1.0] {
            let t = NonlinearCoupling::new(eta, 200).unwrap();
            assert!(t.values().iter().all(|v| v.abs() <= 1.0));
        }
    }

    #[test]
    fn displacement_operator_is_boson_only() {
        let s = space(10);
        let d = displacement(s, C64::new(0.0, 0.2));
        assert_eq!(d.element((Qubit::Down, 3), (Qubit::Up, 3)), ZERO);
        assert_eq!(
            d.element((Qubit::Down, 2), (Qubit::Down, 4)),
            d.element((Qubit::Up, 2), (Qubit::Up, 4))
        );
    }

    #[test]
    fn parity_squares_to_one() {
        let s = space(7);
        let p = parity(s);
        assert_eq!(&p * &p, Operator::identity(s));
        assert_eq!(p.element((Qubit::Down, 0), (Qubit::Down, 0)), -ONE);
        assert_eq!(p.element((Qubit::Up, 1), (Qubit::Up, 1)), -ONE);
    }
}
