//! Simultaneous red and blue first-sideband drive beyond the Lamb-Dicke
//! regime, before the vibrational RWA.
//!
//! In the interaction picture of the bare ion,
//!
//! ```text
//! H(t) = (Ω/2) σ⁺ D(iη e^{iνt}) c(t) + h.c.,
//! c(t) = e^{-i((δ_r - ν) t - φ_r)} + e^{-i((δ_b + ν) t - φ_b)}
//! ```
//!
//! where `δ_r`, `δ_b` are the detunings from the red and blue sidebands, so
//! the lasers sit at `-ν + δ_r` and `+ν + δ_b` from the carrier.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::{ModelKind, ModelSpec};
use crate::dynamics::TimeDependentHamiltonian;
use crate::error::{Error, Result};
use crate::fock::{displacement_block, HilbertSpace, Operator};

/// Two-tone Hamiltonian with the displacement block `D(iη)` cached; the
/// time dependence of `D(iη e^{iνt})` is a pure phase `e^{i(m-n)νt}`.
#[derive(Clone, Debug)]
pub struct TwoToneHamiltonian {
    space: HilbertSpace,
    spec: ModelSpec,
    d0: DMatrix<C64>,
    d0_adj: DMatrix<C64>,
}

impl TwoToneHamiltonian {
    pub fn new(spec: &ModelSpec, space: HilbertSpace) -> Result<Self> {
        if spec.kind != ModelKind::TwoTone {
            return Err(Error::invalid("two-tone Hamiltonian needs a TwoTone spec"));
        }
        spec.validate()?;
        let d0 = displacement_block(space.n_max(), C64::new(0.0, spec.eta));
        let d0_adj = d0.adjoint();
        Ok(Self {
            space,
            spec: spec.clone(),
            d0,
            d0_adj,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Sum of the two laser phase factors `c(t)`.
    pub fn drive_factor(&self, t: f64) -> C64 {
        let s = &self.spec;
        let red = (s.delta_r - s.nu) * t - s.phi_r;
        let blue = (s.delta_b + s.nu) * t - s.phi_b;
        C64::from_polar(1.0, -red) + C64::from_polar(1.0, -blue)
    }

    /// Dense `H(t)`, built from a fresh displacement matrix.
    pub fn matrix_at(&self, t: f64) -> Operator {
        let beta = C64::new(0.0, self.spec.eta) * C64::from_polar(1.0, self.spec.nu * t);
        let d = displacement_block(self.space.n_max(), beta);
        assemble(self.space, &d, 0.5 * self.spec.rabi * self.drive_factor(t))
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        let theta = (self.spec.nu * t).rem_euclid(std::f64::consts::TAU);
        (0..self.space.dim_boson())
            .map(|n| C64::from_polar(1.0, theta * n as f64))
            .collect()
    }
}

fn assemble(space: HilbertSpace, d: &DMatrix<C64>, amp: C64) -> Operator {
    let nb = space.dim_boson();
    let dim = space.dim();
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let block = d * amp;
    m.view_mut((nb, 0), (nb, nb)).copy_from(&block);
    m.view_mut((0, nb), (nb, nb)).copy_from(&block.adjoint());
    Operator::from_matrix(space, m).expect("finite two-tone matrix")
}

/// Dense two-tone Hamiltonian at time `t`.
pub fn build_two_tone(spec: &ModelSpec, space: HilbertSpace, t: f64) -> Result<Operator> {
    if t < 0.0 {
        return Err(Error::invalid("time must be non-negative"));
    }
    Ok(TwoToneHamiltonian::new(spec, space)?.matrix_at(t))
}

impl TimeDependentHamiltonian for TwoToneHamiltonian {
    fn space(&self) -> HilbertSpace {
        self.space
    }

    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) {
        let nb = self.space.dim_boson();
        let w = self.phases(t);
        let amp = 0.5 * self.spec.rabi * self.drive_factor(t);
        let down = psi.rows(0, nb);
        let up = psi.rows(nb, nb);
        let x_down = DVector::from_iterator(nb, (0..nb).map(|n| w[n].conj() * down[n]));
        let x_up = DVector::from_iterator(nb, (0..nb).map(|n| w[n].conj() * up[n]));
        let y_up = &self.d0 * x_down;
        let y_down = &self.d0_adj * x_up;
        for n in 0..nb {
            out[nb + n] = amp * w[n] * y_up[n];
            out[n] = amp.conj() * w[n] * y_down[n];
        }
    }
}
