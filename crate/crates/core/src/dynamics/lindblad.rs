//! Lindblad master equation
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_k Γ_k (C_k ρ C_k† - ½{C_k† C_k, ρ})
//! ```
//!
//! integrated by fixed-step RK4 directly on the matrix. The right-hand side
//! uses sparse copies of `H_eff = H - (i/2) Σ Γ C†C` and of the collapse
//! operators; the models here have O(dim) non-zeros.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::state::QuantumState;
use super::trajectory::{Diagnostics, Record, Reference, Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::Operator;

/// Trace drift beyond which a run is rejected.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
/// Most negative eigenvalue tolerated at record points.
pub const POSITIVITY_LIMIT: f64 = 1e-6;
/// Upper bound on `(‖H‖ + Σ Γ ‖C‖²) dt`.
pub const STEP_BOUND: f64 = 0.05;

/// Collapse channels `(Γ, C)`.
#[derive(Clone, Debug, Default)]
pub struct LindbladSpec {
    terms: Vec<(f64, Operator)>,
}

impl LindbladSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, rate: f64, op: Operator) -> Result<Self> {
        self.push(rate, op)?;
        Ok(self)
    }

    pub fn push(&mut self, rate: f64, op: Operator) -> Result<()> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::invalid(format!(
                "decay rate must be non-negative, got {rate}"
            )));
        }
        if let Some((_, first)) = self.terms.first() {
            first.space().ensure_same(&op.space())?;
        }
        self.terms.push((rate, op));
        Ok(())
    }

    pub fn terms(&self) -> &[(f64, Operator)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Dense reference evaluation of the right-hand side.
pub fn lindblad_rhs(h: &Operator, spec: &LindbladSpec, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let hm = h.matrix();
    let mut out = (hm * rho - rho * hm) * C64::new(0.0, -1.0);
    for (rate, c) in spec.terms() {
        let cm = c.matrix();
        let cdc = cm.adjoint() * cm;
        let d = cm * rho * cm.adjoint() - (&cdc * rho + rho * &cdc) * C64::new(0.5, 0.0);
        out += d * C64::new(*rate, 0.0);
    }
    out
}

/// Row-compressed sparse matrix.
#[derive(Clone, Debug)]
struct Csr {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for i in 0..dim {
            for j in 0..dim {
                let z = m[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(z);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            dim,
            row_start,
            cols,
            vals,
        }
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    /// `out = self · x`.
    fn mul_dense(&self, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        out.fill(C64::new(0.0, 0.0));
        for j in 0..self.dim {
            let xc = x.column(j);
            let mut oc = out.column_mut(j);
            for i in 0..self.dim {
                let mut acc = C64::new(0.0, 0.0);
                for (k, v) in self.row(i) {
                    acc += v * xc[k];
                }
                oc[i] = acc;
            }
        }
    }

    /// `out += scale · x · self†`.
    fn add_dense_mul_adjoint(&self, x: &DMatrix<C64>, scale: C64, out: &mut DMatrix<C64>) {
        // (x S†)[:, j] = Σ_k x[:, k] conj(S[j, k])
        for j in 0..self.dim {
            for (k, v) in self.row(j) {
                let w = scale * v.conj();
                let src = x.column(k);
                let mut dst = out.column_mut(j);
                for i in 0..self.dim {
                    dst[i] += w * src[i];
                }
            }
        }
    }
}

/// Sparse right-hand side with scratch buffers.
struct Rhs {
    h_eff: Csr,
    jumps: Vec<(f64, Csr)>,
    scratch: DMatrix<C64>,
}

impl Rhs {
    fn new(h: &Operator, spec: &LindbladSpec) -> Self {
        let mut h_eff = h.matrix().clone();
        for (rate, c) in spec.terms() {
            let cdc = c.matrix().adjoint() * c.matrix();
            h_eff -= cdc * C64::new(0.0, 0.5 * rate);
        }
        let dim = h_eff.nrows();
        Self {
            h_eff: Csr::from_dense(&h_eff),
            jumps: spec
                .terms()
                .iter()
                .filter(|(r, _)| *r > 0.0)
                .map(|(r, c)| (*r, Csr::from_dense(c.matrix())))
                .collect(),
            scratch: DMatrix::zeros(dim, dim),
        }
    }

    /// `out = -i (H_eff ρ - ρ H_eff†) + Σ Γ C ρ C†`, using that ρ is
    /// Hermitian so `ρ H_eff† = (H_eff ρ)†`.
    fn eval(&mut self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let dim = rho.nrows();
        self.h_eff.mul_dense(rho, &mut self.scratch);
        for j in 0..dim {
            for i in 0..dim {
                let k = self.scratch[(i, j)] - self.scratch[(j, i)].conj();
                out[(i, j)] = C64::new(k.im, -k.re); // -i * k
            }
        }
        for (rate, c) in &self.jumps {
            c.mul_dense(rho, &mut self.scratch);
            c.add_dense_mul_adjoint(&self.scratch, C64::new(*rate, 0.0), out);
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LindbladOptions {
    /// Requested step; clamped to the stability bound.
    pub dt_max: Option<f64>,
    pub snapshots: Vec<usize>,
    /// Skip the eigenvalue check at record points.
    pub skip_positivity: bool,
    pub exec: Execution,
}

/// Step size honouring `(‖H‖ + Σ Γ ‖C‖²) dt ≤ STEP_BOUND`.
pub fn stable_step(h: &Operator, spec: &LindbladSpec) -> f64 {
    let mut scale = h.norm_inf();
    for (rate, c) in spec.terms() {
        // ‖C‖₂² ≤ ‖C‖₁ ‖C‖∞
        scale += rate * c.norm_inf() * c.adjoint().norm_inf();
    }
    if scale == 0.0 {
        f64::INFINITY
    } else {
        STEP_BOUND / scale
    }
}

/// Open-system evolution of `rho0`, sampled on `times` (non-decreasing,
/// starting the evolution at `times[0]`).
pub fn evolve_lindblad(
    h: &Operator,
    spec: &LindbladSpec,
    rho0: &QuantumState,
    times: &[f64],
    opts: &LindbladOptions,
) -> Result<Trajectory> {
    h.space().ensure_same(&rho0.space())?;
    for (_, c) in spec.terms() {
        h.space().ensure_same(&c.space())?;
    }
    h.ensure_hermitian()?;
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("time grid must be non-decreasing"));
    }
    let space = rho0.space();
    let bound = stable_step(h, spec);
    let dt_max = opts.dt_max.map_or(bound, |d| d.min(bound));
    if !(dt_max > 0.0) {
        return Err(Error::invalid("dt_max must be positive"));
    }

    let r0 = rho0.density_matrix();
    let reference_vec = rho0.vector().cloned();
    let reference = match &reference_vec {
        Some(v) => Reference::Pure(v),
        None => Reference::Mixed(&r0),
    };

    let dim = space.dim();
    let mut rhs = Rhs::new(h, spec);
    let mut rho = r0.clone();
    let mut k = [
        DMatrix::zeros(dim, dim),
        DMatrix::zeros(dim, dim),
        DMatrix::zeros(dim, dim),
        DMatrix::zeros(dim, dim),
    ];
    let mut tmp = DMatrix::<C64>::zeros(dim, dim);

    let mut records = Vec::with_capacity(times.len());
    let mut snapshots = Vec::new();
    let mut diag = Diagnostics {
        method: "rk4-lindblad".into(),
        dt: Some(dt_max),
        ..Default::default()
    };
    let mut t = times.first().copied().unwrap_or(0.0);

    for (idx, &target) in times.iter().enumerate() {
        let m = if target > t {
            ((target - t) / dt_max).ceil() as usize
        } else {
            0
        };
        let dt = if m > 0 { (target - t) / m as f64 } else { 0.0 };
        let half = C64::new(0.5 * dt, 0.0);
        let full = C64::new(dt, 0.0);
        for _ in 0..m {
            let [k1, k2, k3, k4] = &mut k;
            rhs.eval(&rho, k1);
            tmp.copy_from(&rho);
            axpy(&mut tmp, half, k1);
            rhs.eval(&tmp, k2);
            tmp.copy_from(&rho);
            axpy(&mut tmp, half, k2);
            rhs.eval(&tmp, k3);
            tmp.copy_from(&rho);
            axpy(&mut tmp, full, k3);
            rhs.eval(&tmp, k4);
            let w = full / 6.0;
            axpy(&mut rho, w, k1);
            axpy(&mut rho, w * 2.0, k2);
            axpy(&mut rho, w * 2.0, k3);
            axpy(&mut rho, w, k4);
            hermitize(&mut rho);
            diag.steps += 1;
        }
        t = target;

        let state = QuantumState::density_unchecked(space, rho.clone());
        let drift = (state.trace() - 1.0).abs();
        diag.max_norm_drift = diag.max_norm_drift.max(drift);
        if drift > TRACE_DRIFT_LIMIT || !drift.is_finite() {
            return Err(Error::StepTooLarge {
                drift,
                limit: TRACE_DRIFT_LIMIT,
            });
        }
        if !opts.skip_positivity {
            let lam = state.min_eigenvalue();
            diag.min_eigenvalue = Some(diag.min_eigenvalue.map_or(lam, |m: f64| m.min(lam)));
            if lam < -POSITIVITY_LIMIT {
                return Err(Error::PositivityLoss {
                    min_eigenvalue: lam,
                });
            }
        }
        records.push(Record::measure(&state, &reference));
        if opts.snapshots.contains(&idx) {
            snapshots.push(Snapshot {
                index: idx,
                time: target,
                state,
            });
        }
    }

    Ok(Trajectory {
        space,
        times: times.to_vec(),
        records,
        snapshots,
        diagnostics: diag,
    })
}

/// `y += a x`
fn axpy(y: &mut DMatrix<C64>, a: C64, x: &DMatrix<C64>) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += a * xi;
    }
}

fn hermitize(rho: &mut DMatrix<C64>) {
    let n = rho.nrows();
    for j in 0..n {
        rho[(j, j)].im = 0.0;
        for i in (j + 1)..n {
            let avg = 0.5 * (rho[(i, j)] + rho[(j, i)].conj());
            rho[(i, j)] = avg;
            rho[(j, i)] = avg.conj();
        }
    }
}
