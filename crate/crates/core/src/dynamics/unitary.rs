use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::state::QuantumState;
use super::trajectory::{Diagnostics, Record, Reference, Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{HilbertSpace, Operator};

/// Options shared by the trajectory recorders.
#[derive(Clone, Debug, Default)]
pub struct RecordOptions {
    /// Time-grid indices at which the full state is kept.
    pub snapshots: Vec<usize>,
    pub exec: Execution,
}

/// `e^{-iHt}` from a one-time Hermitian eigendecomposition. Immutable and
/// shareable across threads.
#[derive(Clone, Debug)]
pub struct Propagator {
    space: HilbertSpace,
    energies: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &Operator) -> Result<Self> {
        h.ensure_hermitian()?;
        // Symmetrize so tiny anti-Hermitian rounding does not leak in.
        let m = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(m);
        if !eig.eigenvalues.iter().all(|e| e.is_finite())
            || !eig
                .eigenvectors
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFiniteEigen);
        }
        Ok(Self {
            space: h.space(),
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &DVector<C64>) -> DVector<C64> {
        self.vectors.ad_mul(psi)
    }

    /// `e^{-iHt} psi` given eigenbasis coefficients of `psi`.
    pub fn evolve_coefficients(&self, coeffs: &DVector<C64>, t: f64) -> DVector<C64> {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.energies.iter())
                .map(|(c, e)| c * C64::from_polar(1.0, -e * t)),
        );
        &self.vectors * phased
    }

    pub fn evolve(&self, psi: &DVector<C64>, t: f64) -> DVector<C64> {
        self.evolve_coefficients(&self.to_eigenbasis(psi), t)
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }
}

/// Closed-system evolution under a time-independent Hamiltonian, sampled on
/// `times`.
pub fn evolve_unitary(
    h: &Operator,
    psi0: &QuantumState,
    times: &[f64],
    opts: &RecordOptions,
) -> Result<Trajectory> {
    h.space().ensure_same(&psi0.space())?;
    let v0 = psi0
        .vector()
        .ok_or_else(|| Error::invalid("unitary evolution needs a pure initial state"))?;
    let prop = Propagator::new(h)?;
    let coeffs = prop.to_eigenbasis(v0);
    let space = psi0.space();
    let reference = Reference::Pure(v0);
    let rows = opts.exec.map(times, |&t| {
        let psi = prop.evolve_coefficients(&coeffs, t);
        let state = QuantumState::pure_unchecked(space, psi);
        let drift = (state.trace() - 1.0).abs();
        (Record::measure(&state, &reference), drift, state)
    });
    let mut records = Vec::with_capacity(rows.len());
    let mut snapshots = Vec::new();
    let mut max_drift = 0.0f64;
    for (i, (rec, drift, state)) in rows.into_iter().enumerate() {
        max_drift = max_drift.max(drift);
        if opts.snapshots.contains(&i) {
            snapshots.push(Snapshot {
                index: i,
                time: times[i],
                state,
            });
        }
        records.push(rec);
    }
    Ok(Trajectory {
        space,
        times: times.to_vec(),
        records,
        snapshots,
        diagnostics: Diagnostics {
            method: "eigendecomposition".into(),
            max_norm_drift: max_drift,
            ..Default::default()
        },
    })
}
