//! Hamiltonian builders.
//!
//! All couplings use the literal form `i g (σ⁺ B - σ⁻ B†)` for a boson
//! operator `B` (`a` for JC, `a†` for anti-JC, `f1 a` and `a† f1` for the
//! nonlinear variants, `a + a†` and `f1 a + a† f1` for the Rabi models).
//! Frequencies are angular; any consistent time unit works.

mod two_tone;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::poisson_tail;
use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, NonlinearCoupling, Operator};

pub use two_tone::{build_two_tone, TwoToneHamiltonian};

/// Trap frequency used for two-tone checks when none is given: 2π·5 MHz.
pub const DEFAULT_NU: f64 = 2.0 * PI * 5.0e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    JC,
    AntiJC,
    NonlinearJC,
    NonlinearAntiJC,
    QRM,
    NonlinearQRM,
    TwoTone,
}

impl ModelKind {
    pub fn is_nonlinear(self) -> bool {
        matches!(
            self,
            ModelKind::NonlinearJC
                | ModelKind::NonlinearAntiJC
                | ModelKind::NonlinearQRM
                | ModelKind::TwoTone
        )
    }

    pub fn is_rabi(self) -> bool {
        matches!(
            self,
            ModelKind::QRM | ModelKind::NonlinearQRM | ModelKind::TwoTone
        )
    }
}

/// Physical parameters of a model. All frequencies in angular units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub eta: f64,
    pub g: f64,
    pub omega_r: f64,
    pub omega0_r: f64,
    /// Laser Rabi frequency Ω (two-tone only).
    pub rabi: f64,
    /// Trap frequency ν (two-tone only).
    pub nu: f64,
    pub delta_r: f64,
    pub delta_b: f64,
    pub phi_r: f64,
    pub phi_b: f64,
}

impl ModelSpec {
    fn base(kind: ModelKind) -> Self {
        Self {
            kind,
            eta: 0.0,
            g: 0.0,
            omega_r: 0.0,
            omega0_r: 0.0,
            rabi: 0.0,
            nu: 0.0,
            delta_r: 0.0,
            delta_b: 0.0,
            phi_r: 0.0,
            phi_b: 0.0,
        }
    }

    pub fn jc(g: f64) -> Self {
        Self {
            g,
            ..Self::base(ModelKind::JC)
        }
    }

    pub fn anti_jc(g: f64) -> Self {
        Self {
            g,
            ..Self::base(ModelKind::AntiJC)
        }
    }

    pub fn nonlinear_jc(g: f64, eta: f64) -> Self {
        Self {
            g,
            eta,
            ..Self::base(ModelKind::NonlinearJC)
        }
    }

    pub fn nonlinear_anti_jc(g: f64, eta: f64) -> Self {
        Self {
            g,
            eta,
            ..Self::base(ModelKind::NonlinearAntiJC)
        }
    }

    pub fn qrm(g: f64, omega_r: f64, omega0_r: f64) -> Self {
        Self {
            g,
            omega_r,
            omega0_r,
            ..Self::base(ModelKind::QRM)
        }
    }

    pub fn nonlinear_qrm(g: f64, eta: f64, omega_r: f64, omega0_r: f64) -> Self {
        Self {
            g,
            eta,
            omega_r,
            omega0_r,
            ..Self::base(ModelKind::NonlinearQRM)
        }
    }

    /// Two-tone sideband drive; `g`, `omega_r` and `omega0_r` are filled in
    /// from `g = ηΩ/2` and [`simulated_frequencies`].
    pub fn two_tone(eta: f64, rabi: f64, nu: f64, delta_r: f64, delta_b: f64) -> Self {
        let (omega0_r, omega_r) = simulated_frequencies(delta_r, delta_b);
        Self {
            eta,
            rabi,
            nu,
            delta_r,
            delta_b,
            g: eta * rabi / 2.0,
            omega_r,
            omega0_r,
            ..Self::base(ModelKind::TwoTone)
        }
    }

    /// Checks parameter consistency and returns advisory warnings (also
    /// logged). Hard violations are errors.
    pub fn validate(&self) -> Result<Vec<String>> {
        let finite = [
            self.eta,
            self.g,
            self.omega_r,
            self.omega0_r,
            self.rabi,
            self.nu,
            self.delta_r,
            self.delta_b,
            self.phi_r,
            self.phi_b,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("model parameters must be finite"));
        }
        if self.eta < 0.0 {
            return Err(Error::invalid("eta must be non-negative"));
        }
        let mut warnings = Vec::new();
        match self.kind {
            ModelKind::JC
            | ModelKind::AntiJC
            | ModelKind::NonlinearJC
            | ModelKind::NonlinearAntiJC => {
                if !(self.g > 0.0) {
                    return Err(Error::invalid("Jaynes-Cummings models need g > 0"));
                }
            }
            ModelKind::QRM | ModelKind::NonlinearQRM => {}
            ModelKind::TwoTone => {
                if !(self.nu > 0.0) {
                    return Err(Error::invalid(
                        "two-tone drive needs a trap frequency nu > 0",
                    ));
                }
                let expect = self.eta * self.rabi / 2.0;
                if self.g != 0.0 && (self.g - expect).abs() > 1e-9 * expect.abs().max(self.g.abs())
                {
                    return Err(Error::invalid(format!(
                        "g = {} is inconsistent with eta*Omega/2 = {expect}",
                        self.g
                    )));
                }
                for (name, d) in [("delta_r", self.delta_r), ("delta_b", self.delta_b)] {
                    if d.abs() / self.nu > 0.1 {
                        warnings.push(format!(
                            "|{name}|/nu = {:.3} is not small",
                            d.abs() / self.nu
                        ));
                    }
                }
                if self.rabi / self.nu > 0.2 {
                    warnings.push(format!(
                        "Omega/nu = {:.3}; the vibrational RWA is not valid",
                        self.rabi / self.nu
                    ));
                }
            }
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(warnings)
    }

    /// Time-independent Hamiltonian for this spec. For `TwoTone` this is the
    /// nonlinear Rabi model it simulates after the vibrational RWA; use
    /// [`TwoToneHamiltonian`] for the driven form.
    pub fn hamiltonian(&self, space: HilbertSpace) -> Result<Operator> {
        self.validate()?;
        match self.kind {
            ModelKind::JC => build_jc(space, self.g),
            ModelKind::AntiJC => build_anti_jc(space, self.g),
            ModelKind::NonlinearJC => build_nonlinear_jc(space, self.g, self.eta),
            ModelKind::NonlinearAntiJC => build_nonlinear_anti_jc(space, self.g, self.eta),
            ModelKind::QRM => build_qrm(space, self.g, self.omega_r, self.omega0_r),
            ModelKind::NonlinearQRM | ModelKind::TwoTone => {
                build_nonlinear_qrm(space, self.g, self.eta, self.omega_r, self.omega0_r)
            }
        }
    }

    /// Effective coupling `g` (derived from `ηΩ/2` for two-tone specs that
    /// leave it unset).
    pub fn coupling(&self) -> f64 {
        if self.kind == ModelKind::TwoTone && self.g == 0.0 {
            self.eta * self.rabi / 2.0
        } else {
            self.g
        }
    }
}

/// `(ω₀ᴿ, ωᴿ)` from the red/blue detunings.
pub fn simulated_frequencies(delta_r: f64, delta_b: f64) -> (f64, f64) {
    (-0.5 * (delta_r + delta_b), 0.5 * (delta_r - delta_b))
}

/// Default truncation: enough room for twice the barrier, for the
/// deep-strong-coupling displacement `2g/ωᴿ` around a coherent amplitude
/// (`⌈(|α| + 2g/ωᴿ)²⌉ + 20`, raised until a coherent state of that amplitude
/// has less than [`DISPLACED_TAIL`] above the cutoff), and never below 40.
pub fn default_truncation(spec: &ModelSpec, alpha: f64, barrier: Option<usize>) -> usize {
    let mut n = 40usize;
    if let Some(b) = barrier {
        n = n.max(2 * b);
    }
    let displacement = if spec.kind.is_rabi() && spec.omega_r != 0.0 {
        2.0 * spec.coupling().abs() / spec.omega_r.abs()
    } else {
        0.0
    };
    let amplitude = alpha.abs() + displacement;
    let reach = amplitude.powi(2).ceil() as usize + 20;
    let mean = amplitude * amplitude;
    let mut tail_n = reach;
    while poisson_tail(mean, tail_n) >= DISPLACED_TAIL {
        tail_n += 1;
    }
    n.max(tail_n)
}

/// Population allowed above the cutoff for the displaced wavepacket. Amplitude
/// errors of `√tail` enter observables linearly, so this sits well below the
/// 1e-6 convergence target squared.
pub const DISPLACED_TAIL: f64 = 1e-14;

fn check_coupling(g: f64) -> Result<()> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::invalid(format!(
            "coupling g must be positive, got {g}"
        )));
    }
    Ok(())
}

/// `i g (σ⁺ ⊗ B - σ⁻ ⊗ B†)` for a boson block `B`.
fn sideband_coupling(space: HilbertSpace, g: f64, boson: &DMatrix<C64>) -> DMatrix<C64> {
    let nb = space.dim_boson();
    let d = space.dim();
    let ig = C64::new(0.0, g);
    let mut m = DMatrix::<C64>::zeros(d, d);
    // σ⁺ = |↑><↓| fills the (↑ rows, ↓ cols) block.
    m.view_mut((nb, 0), (nb, nb)).copy_from(&(boson * ig));
    m.view_mut((0, nb), (nb, nb))
        .copy_from(&(boson.adjoint() * (-ig)));
    m
}

fn boson_a(nb: usize) -> DMatrix<C64> {
    DMatrix::from_fn(nb, nb, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn boson_f1(table: &NonlinearCoupling) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        table.values().len(),
        table.values().iter().map(|&v| C64::new(v, 0.0)),
    ))
}

fn add_free_terms(space: HilbertSpace, m: &mut DMatrix<C64>, omega_r: f64, omega0_r: f64) {
    let nb = space.dim_boson();
    for i in 0..space.dim() {
        let n = (i % nb) as f64;
        let sz = if i < nb { -1.0 } else { 1.0 };
        m[(i, i)] += C64::new(0.5 * omega0_r * sz + omega_r * n, 0.0);
    }
}

fn finish(space: HilbertSpace, m: DMatrix<C64>) -> Result<Operator> {
    let h = Operator::from_matrix(space, m)?;
    h.ensure_hermitian()?;
    Ok(h)
}

/// `H_JC = i g (σ⁺ a - σ⁻ a†)`.
pub fn build_jc(space: HilbertSpace, g: f64) -> Result<Operator> {
    check_coupling(g)?;
    let a = boson_a(space.dim_boson());
    finish(space, sideband_coupling(space, g, &a))
}

/// `H_aJC = i g (σ⁺ a† - σ⁻ a)`.
pub fn build_anti_jc(space: HilbertSpace, g: f64) -> Result<Operator> {
    check_coupling(g)?;
    let ad = boson_a(space.dim_boson()).adjoint();
    finish(space, sideband_coupling(space, g, &ad))
}

/// `H_nJC = i g (σ⁺ f1 a - σ⁻ a† f1)`.
pub fn build_nonlinear_jc(space: HilbertSpace, g: f64, eta: f64) -> Result<Operator> {
    check_coupling(g)?;
    let f = boson_f1(&NonlinearCoupling::new(eta, space.n_max())?);
    let b = f * boson_a(space.dim_boson());
    finish(space, sideband_coupling(space, g, &b))
}

/// `H_naJC = i g (σ⁺ a† f1 - σ⁻ f1 a)`.
pub fn build_nonlinear_anti_jc(space: HilbertSpace, g: f64, eta: f64) -> Result<Operator> {
    check_coupling(g)?;
    let f = boson_f1(&NonlinearCoupling::new(eta, space.n_max())?);
    let b = boson_a(space.dim_boson()).adjoint() * f;
    finish(space, sideband_coupling(space, g, &b))
}

/// `H_QRM = (ω₀ᴿ/2) σ_z + ωᴿ a†a + i g (σ⁺ - σ⁻)(a + a†)`.
pub fn build_qrm(space: HilbertSpace, g: f64, omega_r: f64, omega0_r: f64) -> Result<Operator> {
    let a = boson_a(space.dim_boson());
    let x = &a + a.adjoint();
    let mut m = sideband_coupling(space, g, &x);
    add_free_terms(space, &mut m, omega_r, omega0_r);
    finish(space, m)
}

/// `H_nQRM = (ω₀ᴿ/2) σ_z + ωᴿ a†a + i g (σ⁺ - σ⁻)(f1 a + a† f1)`.
pub fn build_nonlinear_qrm(
    space: HilbertSpace,
    g: f64,
    eta: f64,
    omega_r: f64,
    omega0_r: f64,
) -> Result<Operator> {
    let f = boson_f1(&NonlinearCoupling::new(eta, space.n_max())?);
    let a = boson_a(space.dim_boson());
    let fa = &f * &a;
    let x = &fa + fa.adjoint();
    let mut m = sideband_coupling(space, g, &x);
    add_free_terms(space, &mut m, omega_r, omega0_r);
    finish(space, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{barrier_eta, f1, parity, Qubit};
    use nalgebra::{DVector, SymmetricEigen};

    const ONE_I: C64 = C64 { re: 0.0, im: 1.0 };

    fn space(n: usize) -> HilbertSpace {
        HilbertSpace::new(n).unwrap()
    }

    fn eigenvalues(h: &Operator) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(h.matrix().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn jc_elements() {
        let s = space(10);
        let g = 0.7;
        let h = build_jc(s, g).unwrap();
        assert!((h.element((Qubit::Up, 0), (Qubit::Down, 1)) - ONE_I * g).norm() < 1e-15);
        let mut v = DVector::zeros(s.dim());
        v[s.index(Qubit::Down, 0)] = C64::new(1.0, 0.0);
        assert!(h.apply(&v).norm() == 0.0);
        // only |↓,n> <-> |↑,n-1>
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                if h.matrix()[(i, j)] != C64::new(0.0, 0.0) {
                    let (qi, ni) = s.split(i);
                    let (qj, nj) = s.split(j);
                    assert_ne!(qi, qj);
                    let (nd, nu) = if qi == Qubit::Down {
                        (ni, nj)
                    } else {
                        (nj, ni)
                    };
                    assert_eq!(nd, nu + 1);
                }
            }
        }
        assert!(build_jc(s, 0.0).is_err());
    }

    #[test]
    fn jc_block_eigenvalues() {
        // 2x2 block [[0, -ig√n], [ig√n, 0]] has eigenvalues ±g√n.
        let s = space(1);
        let g = 1.3;
        let e = eigenvalues(&build_jc(s, g).unwrap());
        // spectrum: 0 (|↓,0>), 0 (|↑,1> uncoupled at the edge), ±g
        assert!((e[0] + g).abs() < 1e-12 && (e[3] - g).abs() < 1e-12);
    }

    #[test]
    fn anti_jc_elements() {
        let s = space(6);
        let g = 0.4;
        let h = build_anti_jc(s, g).unwrap();
        assert!((h.element((Qubit::Up, 1), (Qubit::Down, 0)) - ONE_I * g).norm() < 1e-15);
        let top = s.index(Qubit::Up, 6);
        let row_sum: f64 = h.matrix().row(top).iter().map(|z| z.norm()).sum();
        // |↑,n_max> couples back to |↓,n_max-1> only.
        assert!((row_sum - g * 6f64.sqrt()).abs() < 1e-12);
        let n = 3;
        let mut block = DMatrix::<C64>::zeros(2, 2);
        block[(0, 1)] = h.element((Qubit::Down, n), (Qubit::Up, n + 1));
        block[(1, 0)] = h.element((Qubit::Up, n + 1), (Qubit::Down, n));
        let mut e: Vec<f64> = SymmetricEigen::new(block)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        assert!((e[1] - g * ((n + 1) as f64).sqrt()).abs() < 1e-12);
        assert!((e[0] + e[1]).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_jc_limits_and_barrier() {
        let s = space(30);
        let g = 1.0;
        let lin = build_jc(s, g).unwrap();
        let nl = build_nonlinear_jc(s, g, 1e-4).unwrap();
        assert!((&lin - &nl).max_abs() / lin.max_abs() < 1e-6);
        let nl = build_nonlinear_jc(s, g, 0.4518).unwrap();
        assert!(nl.element((Qubit::Up, 17), (Qubit::Down, 18)).norm() < 1e-3 * g);
        let nl = build_nonlinear_jc(s, g, 0.5).unwrap();
        let want = (-0.125f64).exp();
        assert!((nl.element((Qubit::Up, 0), (Qubit::Down, 1)) - ONE_I * want).norm() < 1e-15);
    }

    #[test]
    fn nonlinear_anti_jc_dark_state() {
        let s = space(30);
        let g = 1.0;
        let h = build_nonlinear_anti_jc(s, g, 0.4518).unwrap();
        assert!(h.element((Qubit::Up, 18), (Qubit::Down, 17)).norm() < 1e-3 * g);
        let mut v = DVector::zeros(s.dim());
        v[s.index(Qubit::Down, 17)] = C64::new(1.0, 0.0);
        assert!(h.apply(&v).norm() < 1e-3 * g);
        let lin = build_anti_jc(s, g).unwrap();
        let nl = build_nonlinear_anti_jc(s, g, 1e-4).unwrap();
        assert!((&lin - &nl).max_abs() / lin.max_abs() < 1e-6);
    }

    #[test]
    fn qrm_spectra() {
        let s = space(60);
        let (w, w0) = (1.0, 0.6);
        let e = eigenvalues(&build_qrm(s, 0.0, w, w0).unwrap());
        let mut want: Vec<f64> = (0..=60)
            .flat_map(|n| [n as f64 * w - w0 / 2.0, n as f64 * w + w0 / 2.0])
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in e.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10);
        }
        // ω₀ = 0: displaced oscillators, E = n ω - g²/ω, doubly degenerate
        let g = 0.8;
        let e = eigenvalues(&build_qrm(s, g, w, 0.0).unwrap());
        for n in 0..10 {
            let want = n as f64 * w - g * g / w;
            assert!((e[2 * n] - want).abs() < 1e-8, "n={n}: {}", e[2 * n]);
            assert!((e[2 * n + 1] - want).abs() < 1e-8);
        }
    }

    #[test]
    fn nonlinear_qrm_reduces_and_blocks() {
        let s = space(30);
        let lin = build_qrm(s, 0.9, 1.0, 0.3).unwrap();
        let nl = build_nonlinear_qrm(s, 0.9, 1e-4, 1.0, 0.3).unwrap();
        assert!((&lin - &nl).max_abs() / lin.max_abs() < 1e-6);
        let eta = barrier_eta(7).unwrap();
        let g = 4.0;
        let h = build_nonlinear_qrm(s, g, eta, 1.0, 0.0).unwrap();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let (_, ni) = s.split(i);
                let (_, nj) = s.split(j);
                if ni <= 7 && nj > 7 {
                    assert!(h.matrix()[(i, j)].norm() < 1e-12 * g);
                }
            }
        }
        // g = 0 spectrum is the free one
        let e = eigenvalues(&build_nonlinear_qrm(s, 0.0, 0.5, 1.0, 0.4).unwrap());
        assert!((e[0] + 0.2).abs() < 1e-12 && (e[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn parity_symmetry() {
        let s = space(40);
        let p = parity(s);
        for h in [
            build_qrm(s, 2.0, 1.0, 0.7).unwrap(),
            build_nonlinear_qrm(s, 2.0, 0.57838, 1.0, 0.7).unwrap(),
        ] {
            let c = h.commutator(&p).unwrap();
            assert!(c.max_abs() < 1e-12 * h.max_abs());
        }
    }

    #[test]
    fn lamb_dicke_convergence_is_quadratic() {
        let s = space(10);
        let lin = build_qrm(s, 1.0, 1.0, 0.0).unwrap();
        let dev = |eta: f64| {
            let nl = build_nonlinear_qrm(s, 1.0, eta, 1.0, 0.0).unwrap();
            (&nl - &lin).max_abs() / lin.max_abs()
        };
        let (d1, d2) = (dev(0.05), dev(0.025));
        assert!(d1 / (0.05 * 0.05) < 10.0);
        // halving eta quarters the deviation
        assert!((d1 / d2 - 4.0).abs() < 0.1, "{}", d1 / d2);
    }

    #[test]
    fn simulated_frequency_mapping() {
        let d = 2.0 * PI * 11.31e3;
        assert_eq!(simulated_frequencies(d, -d), (0.0, d));
        assert_eq!(simulated_frequencies(0.0, 0.0), (0.0, 0.0));
        assert_eq!(simulated_frequencies(0.0, -2.0 * 3.0), (3.0, 3.0));
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::jc(0.0).validate().is_err());
        assert!(ModelSpec::nonlinear_qrm(1.0, -0.2, 1.0, 0.0)
            .validate()
            .is_err());
        let tt = ModelSpec::two_tone(0.5, 1.0, 10.0, 0.01, -0.01);
        assert!(tt.validate().unwrap().is_empty());
        assert!((tt.g - 0.25).abs() < 1e-15);
        let loose = ModelSpec::two_tone(0.5, 5.0, 10.0, 2.0, -0.01);
        assert_eq!(loose.validate().unwrap().len(), 2);
        let mut bad = tt.clone();
        bad.g = 0.3;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn truncation_defaults() {
        let spec = ModelSpec::qrm(2.0, 1.0, 0.0);
        // (1 + 4)^2 + 20
        let n = default_truncation(&spec, 1.0, None);
        assert!(n >= 45 && poisson_tail(25.0, n) < DISPLACED_TAIL, "{n}");
        assert_eq!(default_truncation(&ModelSpec::jc(1.0), 0.0, Some(30)), 60);
        assert_eq!(default_truncation(&ModelSpec::jc(1.0), 0.0, None), 40);
    }

    #[test]
    fn f1_enters_couplings() {
        let s = space(12);
        let h = build_nonlinear_qrm(s, 1.0, 0.5, 0.0, 0.0).unwrap();
        // <↑,4| H |↓,3> = i g (f1(3)√4 ... from a† f1) ; <↑,2|H|↓,3> = i g f1(2)√3
        let up = h.element((Qubit::Up, 4), (Qubit::Down, 3));
        assert!((up - ONE_I * 2.0 * f1(3, 0.5).unwrap()).norm() < 1e-15);
        let down = h.element((Qubit::Up, 2), (Qubit::Down, 3));
        assert!((down - ONE_I * 3f64.sqrt() * f1(2, 0.5).unwrap()).norm() < 1e-15);
    }
}
