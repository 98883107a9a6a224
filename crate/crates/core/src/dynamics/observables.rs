use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::state::{QuantumState, StateData};
use crate::error::{Error, Result};
use crate::fock::Operator;

const IMAG_TOL: f64 = 1e-10;

/// `<O>` for a Hermitian observable. The imaginary part is checked and
/// discarded.
pub fn expectation(op: &Operator, state: &QuantumState) -> Result<f64> {
    op.space().ensure_same(&state.space())?;
    let z = match state.data() {
        StateData::Pure(v) => v.dotc(&op.apply(v)),
        StateData::Density(r) => (op.matrix() * r).trace(),
    };
    if z.im.abs() > IMAG_TOL * (1.0 + z.re.abs()) {
        return Err(Error::invalid(format!(
            "expectation has imaginary part {:.3e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `|<ψ₀|ψ>|²` for a pure state, `<ψ₀|ρ|ψ₀>` for a density matrix. The
/// reference must be pure.
pub fn overlap_fidelity(reference: &QuantumState, state: &QuantumState) -> Result<f64> {
    reference.space().ensure_same(&state.space())?;
    let psi0 = reference
        .vector()
        .ok_or_else(|| Error::invalid("fidelity reference must be a pure state"))?;
    Ok(fidelity_with(psi0, state))
}

pub(crate) fn fidelity_with(psi0: &DVector<C64>, state: &QuantumState) -> f64 {
    match state.data() {
        StateData::Pure(v) => psi0.dotc(v).norm_sqr(),
        StateData::Density(r) => psi0.dotc(&(r * psi0)).re,
    }
}

/// `P_n`, summed over both qubit levels.
pub fn phonon_distribution(state: &QuantumState) -> Vec<f64> {
    phonons_from_populations(&state.populations(), state.space().dim_boson())
}

pub(crate) fn phonons_from_populations(pops: &[f64], nb: usize) -> Vec<f64> {
    (0..nb).map(|n| pops[n] + pops[nb + n]).collect()
}

pub(crate) fn sigma_z_from_populations(pops: &[f64], nb: usize) -> f64 {
    pops[nb..].iter().sum::<f64>() - pops[..nb].iter().sum::<f64>()
}

pub fn mean_phonons(state: &QuantumState) -> f64 {
    phonon_distribution(state)
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number, qubit_ops, HilbertSpace, Qubit};

    #[test]
    fn basic_expectations() {
        let s = HilbertSpace::new(30).unwrap();
        let q = qubit_ops(s);
        for n in [0, 3, 30] {
            let up = QuantumState::fock(s, n, Qubit::Up).unwrap();
            assert_eq!(expectation(&q.sigma_z, &up).unwrap(), 1.0);
            assert_eq!(expectation(&number(s), &up).unwrap(), n as f64);
            assert_eq!(mean_phonons(&up), n as f64);
            assert_eq!(overlap_fidelity(&up, &up).unwrap(), 1.0);
            assert_eq!(overlap_fidelity(&up, &up.to_density()).unwrap(), 1.0);
        }
    }

    #[test]
    fn coherent_phonons_are_poisson() {
        let s = HilbertSpace::new(40).unwrap();
        let c = QuantumState::coherent(s, C64::new(1.0, 0.0), Qubit::Down).unwrap();
        let p = phonon_distribution(&c);
        let mut fact = 1.0;
        for (n, pn) in p.iter().enumerate().take(20) {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((pn - (-1.0f64).exp() / fact).abs() < 1e-8);
        }
        assert!((mean_phonons(&c) - 1.0).abs() < 1e-8);
        // density route agrees
        assert!((expectation(&number(s), &c.to_density()).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_mean_large_alpha() {
        let s = HilbertSpace::new(120).unwrap();
        let c = QuantumState::coherent(s, C64::new(30f64.sqrt(), 0.0), Qubit::Down).unwrap();
        assert!((mean_phonons(&c) - 30.0).abs() < 1e-8);
    }

    #[test]
    fn space_mismatch() {
        let s = HilbertSpace::new(3).unwrap();
        let t = HilbertSpace::new(4).unwrap();
        let st = QuantumState::fock(t, 0, Qubit::Down).unwrap();
        assert!(expectation(&number(s), &st).is_err());
        let mixed =
            QuantumState::thermal(HilbertSpace::new(60).unwrap(), 1.0, Qubit::Down).unwrap();
        assert!(overlap_fidelity(&mixed, &mixed).is_err());
    }
}
