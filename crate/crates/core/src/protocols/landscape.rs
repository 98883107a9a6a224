use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::f1;

/// Lower clamp for `log10|f1|`.
pub const LANDSCAPE_FLOOR: f64 = -16.0;

/// `log10|f1(n, η)|` on a grid; `values[i][j]` belongs to `n_values[i]`,
/// `eta_values[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub n_values: Vec<usize>,
    pub eta_values: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Landscape {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }
}

/// `grid` evenly spaced η values over `eta_range` (inclusive) for each `n`
/// in `n_min..=n_max`.
pub fn f1_landscape(
    n_min: usize,
    n_max: usize,
    eta_range: (f64, f64),
    grid: usize,
    exec: Execution,
) -> Result<Landscape> {
    let (lo, hi) = eta_range;
    if grid == 0 || n_min > n_max {
        return Err(Error::invalid("landscape grid must be non-empty"));
    }
    if !(lo >= 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::invalid(format!("bad eta range [{lo}, {hi}]")));
    }
    let eta_values: Vec<f64> = if grid == 1 {
        vec![lo]
    } else {
        let step = (hi - lo) / (grid - 1) as f64;
        (0..grid)
            .map(|j| {
                if j + 1 == grid {
                    hi
                } else {
                    lo + step * j as f64
                }
            })
            .collect()
    };
    let n_values: Vec<usize> = (n_min..=n_max).collect();
    let cols = eta_values.len();
    let cells = exec.map_range(n_values.len() * cols, |k| {
        let v = f1(n_values[k / cols], eta_values[k % cols])?;
        Ok(log10_abs(v))
    });
    let flat = cells.into_iter().collect::<Result<Vec<f64>>>()?;
    let values = flat.chunks(cols).map(<[f64]>::to_vec).collect();
    Ok(Landscape {
        n_values,
        eta_values,
        values,
    })
}

fn log10_abs(v: f64) -> f64 {
    if v == 0.0 {
        LANDSCAPE_FLOOR
    } else {
        v.abs().log10().max(LANDSCAPE_FLOOR)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_zero_is_flat() {
        let l = f1_landscape(0, 30, (0.0, 0.0), 1, Execution::Sequential).unwrap();
        assert!(l.values.iter().all(|r| r[0] == 0.0));
    }

    #[test]
    fn first_row_is_gaussian() {
        let l = f1_landscape(0, 3, (0.01, 1.0), 25, Execution::Parallel).unwrap();
        for (j, &eta) in l.eta_values.iter().enumerate() {
            let expected = (-eta * eta / 2.0f64).exp().log10();
            assert!((l.values[0][j] - expected).abs() <= 1e-15, "{eta}");
        }
    }

    #[test]
    fn matches_scalar_and_is_exec_independent() {
        let a = f1_landscape(0, 60, (0.01, 1.0), 40, Execution::Sequential).unwrap();
        let b = f1_landscape(0, 60, (0.01, 1.0), 40, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        for (i, &n) in a.n_values.iter().enumerate() {
            for (j, &eta) in a.eta_values.iter().enumerate() {
                assert_eq!(a.values[i][j], log10_abs(f1(n, eta).unwrap()));
            }
        }
        assert_eq!(*a.eta_values.last().unwrap(), 1.0);
    }

    #[test]
    fn half_eta_column_dips_at_the_zeros() {
        let l = f1_landscape(0, 60, (0.5, 0.5), 1, Execution::Sequential).unwrap();
        let col = l.column(0);
        let minima: Vec<usize> = (1..col.len() - 1)
            .filter(|&i| col[i] < col[i - 1] && col[i] < col[i + 1])
            .collect();
        assert_eq!(minima, vec![14, 48]);
    }

    #[test]
    fn rejects_empty() {
        assert!(f1_landscape(0, 5, (0.1, 0.2), 0, Execution::Sequential).is_err());
        assert!(f1_landscape(6, 5, (0.1, 0.2), 3, Execution::Sequential).is_err());
        assert!(f1_landscape(0, 5, (0.3, 0.2), 3, Execution::Sequential).is_err());
    }
}
