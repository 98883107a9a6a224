use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, Qubit};

/// Largest probability mass that state preparation may drop at the
/// truncation edge.
pub const TAIL_TOL: f64 = 1e-10;
const PURE_NORM_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;
const DENSITY_HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

/// Pure state or density matrix on a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    space: HilbertSpace,
    data: StateData,
}

/// Initial boson state, tensored with a qubit basis state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialState {
    Fock {
        n: usize,
        qubit: Qubit,
    },
    Coherent {
        alpha_re: f64,
        #[serde(default)]
        alpha_im: f64,
        qubit: Qubit,
    },
    Thermal {
        nbar: f64,
        qubit: Qubit,
    },
}

impl InitialState {
    pub fn prepare(&self, space: HilbertSpace) -> Result<QuantumState> {
        match *self {
            InitialState::Fock { n, qubit } => QuantumState::fock(space, n, qubit),
            InitialState::Coherent {
                alpha_re,
                alpha_im,
                qubit,
            } => QuantumState::coherent(space, C64::new(alpha_re, alpha_im), qubit),
            InitialState::Thermal { nbar, qubit } => QuantumState::thermal(space, nbar, qubit),
        }
    }

    /// Smallest `n_max` for which preparation keeps the dropped tail below
    /// [`TAIL_TOL`].
    pub fn required_n_max(&self) -> usize {
        match *self {
            InitialState::Fock { n, .. } => n.max(1),
            InitialState::Coherent {
                alpha_re, alpha_im, ..
            } => coherent_required_n_max(C64::new(alpha_re, alpha_im).norm_sqr()),
            InitialState::Thermal { nbar, .. } => thermal_required_n_max(nbar),
        }
    }

    pub fn alpha_abs(&self) -> f64 {
        match *self {
            InitialState::Coherent {
                alpha_re, alpha_im, ..
            } => C64::new(alpha_re, alpha_im).norm(),
            _ => 0.0,
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, InitialState::Thermal { nbar, .. } if *nbar > 0.0)
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn poisson_probs(mean: f64, n_max: usize) -> Vec<f64> {
    if mean == 0.0 {
        let mut p = vec![0.0; n_max + 1];
        p[0] = 1.0;
        return p;
    }
    let lm = mean.ln();
    let mut lnf = 0.0;
    (0..=n_max)
        .map(|n| {
            if n > 0 {
                lnf += (n as f64).ln();
            }
            (n as f64 * lm - mean - lnf).exp()
        })
        .collect()
}

/// Poisson mass strictly above `n_max`.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let lm = mean.ln();
    let mut ln_p = (n_max + 1) as f64 * lm - mean - ln_factorial(n_max + 1);
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let p = ln_p.exp();
        tail += p;
        n += 1;
        ln_p += lm - (n as f64).ln();
        if n as f64 > mean && p < 1e-18 * tail.max(1e-300) {
            break;
        }
        if n > n_max + 100_000 {
            break;
        }
    }
    tail
}

pub fn coherent_required_n_max(mean: f64) -> usize {
    let mut n = (mean.floor() as usize).max(1);
    while poisson_tail(mean, n) >= TAIL_TOL {
        n += 1;
    }
    n
}

pub fn thermal_tail(nbar: f64, n_max: usize) -> f64 {
    if nbar == 0.0 {
        0.0
    } else {
        (nbar / (nbar + 1.0)).powi(n_max as i32 + 1)
    }
}

pub fn thermal_required_n_max(nbar: f64) -> usize {
    let mut n = 1;
    while thermal_tail(nbar, n) >= TAIL_TOL {
        n += 1;
    }
    n
}

impl QuantumState {
    pub fn pure(space: HilbertSpace, v: DVector<C64>) -> Result<Self> {
        if v.len() != space.dim() {
            return Err(Error::invalid("state vector has the wrong dimension"));
        }
        let s = Self {
            space,
            data: StateData::Pure(v),
        };
        s.check()?;
        Ok(s)
    }

    pub fn density(space: HilbertSpace, rho: DMatrix<C64>) -> Result<Self> {
        if rho.shape() != (space.dim(), space.dim()) {
            return Err(Error::invalid("density matrix has the wrong shape"));
        }
        let s = Self {
            space,
            data: StateData::Density(rho),
        };
        s.check()?;
        Ok(s)
    }

    pub(crate) fn pure_unchecked(space: HilbertSpace, v: DVector<C64>) -> Self {
        Self {
            space,
            data: StateData::Pure(v),
        }
    }

    pub(crate) fn density_unchecked(space: HilbertSpace, rho: DMatrix<C64>) -> Self {
        Self {
            space,
            data: StateData::Density(rho),
        }
    }

    /// `|qubit, n>`.
    pub fn fock(space: HilbertSpace, n: usize, qubit: Qubit) -> Result<Self> {
        if n > space.n_max() {
            return Err(Error::invalid(format!(
                "Fock level {n} exceeds n_max = {}",
                space.n_max()
            )));
        }
        let mut v = DVector::zeros(space.dim());
        v[space.index(qubit, n)] = C64::new(1.0, 0.0);
        Ok(Self::pure_unchecked(space, v))
    }

    /// `|qubit> ⊗ |alpha>`, renormalized after truncation.
    pub fn coherent(space: HilbertSpace, alpha: C64, qubit: Qubit) -> Result<Self> {
        let mean = alpha.norm_sqr();
        if poisson_tail(mean, space.n_max()) >= TAIL_TOL {
            return Err(Error::TruncationTooSmall {
                n_max: space.n_max(),
                required: coherent_required_n_max(mean),
            });
        }
        let probs = poisson_probs(mean, space.n_max());
        let phase = if mean > 0.0 {
            alpha / alpha.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut v = DVector::zeros(space.dim());
        let mut ph = C64::new(1.0, 0.0);
        for (n, p) in probs.iter().enumerate() {
            v[space.index(qubit, n)] = ph * p.sqrt();
            ph *= phase;
        }
        let norm = v.norm();
        v /= C64::new(norm, 0.0);
        Ok(Self::pure_unchecked(space, v))
    }

    /// Thermal boson state with mean occupation `nbar`, tensored with
    /// `|qubit><qubit|`; renormalized after truncation.
    pub fn thermal(space: HilbertSpace, nbar: f64, qubit: Qubit) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::invalid("nbar must be finite and non-negative"));
        }
        if thermal_tail(nbar, space.n_max()) >= TAIL_TOL {
            return Err(Error::TruncationTooSmall {
                n_max: space.n_max(),
                required: thermal_required_n_max(nbar),
            });
        }
        let ratio = nbar / (nbar + 1.0);
        let probs: Vec<f64> = (0..=space.n_max())
            .map(|k| {
                if k == 0 {
                    1.0 / (nbar + 1.0)
                } else {
                    ratio.powi(k as i32) / (nbar + 1.0)
                }
            })
            .collect();
        let total: f64 = probs.iter().sum();
        let mut rho = DMatrix::zeros(space.dim(), space.dim());
        for (k, p) in probs.iter().enumerate() {
            let i = space.index(qubit, k);
            rho[(i, i)] = C64::new(p / total, 0.0);
        }
        Ok(Self::density_unchecked(space, rho))
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn vector(&self) -> Option<&DVector<C64>> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    /// Density matrix (built as `|ψ><ψ|` for pure states).
    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.data {
            StateData::Pure(v) => v * v.adjoint(),
            StateData::Density(r) => r.clone(),
        }
    }

    pub fn to_density(&self) -> QuantumState {
        Self::density_unchecked(self.space, self.density_matrix())
    }

    /// `<ψ|ψ>` or `Tr ρ`.
    pub fn trace(&self) -> f64 {
        match &self.data {
            StateData::Pure(v) => v.norm_squared(),
            StateData::Density(r) => r.diagonal().iter().map(|z| z.re).sum(),
        }
    }

    /// Occupation of each basis state.
    pub fn populations(&self) -> Vec<f64> {
        match &self.data {
            StateData::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            StateData::Density(r) => r.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    /// Smallest eigenvalue of the density matrix (zero-cost 0 for pure
    /// states).
    pub fn min_eigenvalue(&self) -> f64 {
        match &self.data {
            StateData::Pure(_) => 0.0,
            StateData::Density(r) => {
                // Shifted by the identity: exactly-zero decoupled blocks make
                // the unshifted QR iteration return non-finite eigenvalues.
                let n = r.nrows();
                let h = (r + r.adjoint()) * C64::new(0.5, 0.0) + DMatrix::identity(n, n);
                SymmetricEigen::new(h)
                    .eigenvalues
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
                    - 1.0
            }
        }
    }

    /// Norm/trace and Hermiticity invariants.
    pub fn check(&self) -> Result<()> {
        match &self.data {
            StateData::Pure(v) => {
                let drift = (v.norm_squared() - 1.0).abs();
                if drift >= PURE_NORM_TOL {
                    return Err(Error::invalid(format!("state norm drift {drift:.3e}")));
                }
            }
            StateData::Density(r) => {
                let drift = (self.trace() - 1.0).abs();
                if drift >= TRACE_TOL {
                    return Err(Error::invalid(format!("trace drift {drift:.3e}")));
                }
                let herm = (r - r.adjoint())
                    .iter()
                    .fold(0.0f64, |m, z| m.max(z.norm()));
                if herm >= DENSITY_HERMITIAN_TOL {
                    return Err(Error::invalid(format!(
                        "density matrix not Hermitian ({herm:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Positivity check on demand.
    pub fn check_positive(&self, tol: f64) -> Result<()> {
        let m = self.min_eigenvalue();
        if m < -tol {
            return Err(Error::PositivityLoss { min_eigenvalue: m });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize) -> HilbertSpace {
        HilbertSpace::new(n).unwrap()
    }

    #[test]
    fn fock_basis() {
        let s = space(5);
        let f = QuantumState::fock(s, 0, Qubit::Down).unwrap();
        assert_eq!(f.vector().unwrap()[0], C64::new(1.0, 0.0));
        assert!(QuantumState::fock(s, 6, Qubit::Down).is_err());
    }

    #[test]
    fn coherent_amplitudes() {
        let s = space(40);
        let vac = QuantumState::coherent(s, C64::new(0.0, 0.0), Qubit::Down).unwrap();
        assert_eq!(vac, QuantumState::fock(s, 0, Qubit::Down).unwrap());
        let c = QuantumState::coherent(s, C64::new(1.0, 0.0), Qubit::Up).unwrap();
        let p0 = c.populations()[s.index(Qubit::Up, 0)];
        assert!((p0 - (-1.0f64).exp()).abs() < 1e-12);
        assert!((p0 - 0.367879).abs() < 1e-6);
        let c = QuantumState::coherent(s, C64::new(0.0, 1.0), Qubit::Down).unwrap();
        // <1|alpha> carries the phase of alpha
        let a1 = c.vector().unwrap()[1];
        assert!((a1.arg() - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn coherent_rejects_small_truncation() {
        let err = QuantumState::coherent(space(40), C64::new(30f64.sqrt(), 0.0), Qubit::Down);
        match err {
            Err(Error::TruncationTooSmall {
                n_max: 40,
                required,
            }) => {
                assert!(required > 60 && required < 120, "{required}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn thermal_weights() {
        let s = space(40);
        let t = QuantumState::thermal(s, 0.0, Qubit::Down).unwrap();
        assert_eq!(
            t.density_matrix(),
            QuantumState::fock(s, 0, Qubit::Down)
                .unwrap()
                .density_matrix()
        );
        let t = QuantumState::thermal(s, 1.0, Qubit::Down).unwrap();
        let p = t.populations();
        assert!((p[0] - 0.5).abs() < 1e-12);
        for k in 0..10 {
            assert!((p[k] - 0.5f64.powi(k as i32 + 1)).abs() < 1e-12);
        }
        let above: f64 = p[18..=40].iter().sum();
        assert!((above - 2f64.powi(-18)).abs() < 1e-11);
        assert!(QuantumState::thermal(space(20), 1.0, Qubit::Down).is_err());
        assert!(QuantumState::thermal(s, -1.0, Qubit::Down).is_err());
        t.check().unwrap();
        t.check_positive(1e-8).unwrap();
    }

    #[test]
    fn tails() {
        // Poisson(1) mass above 10
        let direct: f64 = (11..40)
            .map(|n| (-1.0f64).exp() / (1..=n).map(|k| k as f64).product::<f64>())
            .sum();
        assert!((poisson_tail(1.0, 10) - direct).abs() < 1e-20);
        assert_eq!(thermal_tail(1.0, 17), 2f64.powi(-18));
        assert!(coherent_required_n_max(30.0) <= 120);
    }

    #[test]
    fn invariant_checks() {
        let s = space(2);
        let v = DVector::from_element(s.dim(), C64::new(1.0, 0.0));
        assert!(QuantumState::pure(s, v).is_err());
        let mut r = DMatrix::zeros(s.dim(), s.dim());
        r[(0, 0)] = C64::new(1.0, 0.0);
        r[(0, 1)] = C64::new(0.0, 0.1);
        assert!(QuantumState::density(s, r).is_err());
    }

    #[test]
    fn initial_state_serde() {
        let i: InitialState =
            toml::from_str("type = \"coherent\"\nalpha_re = 1.0\nqubit = \"g\"").unwrap();
        assert_eq!(
            i,
            InitialState::Coherent {
                alpha_re: 1.0,
                alpha_im: 0.0,
                qubit: Qubit::Down
            }
        );
        assert!(toml::from_str::<InitialState>(
            "type = \"fock\"\nn = 1\nqubit = \"down\"\nbogus = 1"
        )
        .is_err());
    }
}
