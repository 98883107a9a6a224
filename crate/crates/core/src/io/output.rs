use std::path::Path;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::protocols::Landscape;

/// 17 significant digits, so values survive a text round trip.
pub(crate) fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Schema {
            key: None,
            message: format!("csv: {other:?}"),
        },
    }
}

/// Columns `t, sigma_z, fidelity, n_mean, P_0..P_nmax`; `times` are the
/// values written in the `t` column.
pub fn write_trajectory_csv(path: &Path, times: &[f64], tr: &Trajectory) -> Result<()> {
    let nb = tr.space.dim_boson();
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec![
        "t".to_string(),
        "sigma_z".into(),
        "fidelity".into(),
        "n_mean".into(),
    ];
    header.extend((0..nb).map(|n| format!("P_{n}")));
    w.write_record(&header).map_err(csv_err)?;
    for (t, r) in times.iter().zip(&tr.records) {
        let mut row = vec![fmt(*t), fmt(r.sigma_z), fmt(r.fidelity), fmt(r.n_mean)];
        row.extend(r.phonons.iter().map(|p| fmt(*p)));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, P_0..P_nmax`, one row per snapshot.
pub fn write_snapshots_csv(path: &Path, times: &[f64], phonons: &[Vec<f64>]) -> Result<()> {
    let nb = phonons.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..nb).map(|n| format!("P_{n}")));
    w.write_record(&header).map_err(csv_err)?;
    for (t, p) in times.iter().zip(phonons) {
        let mut row = vec![fmt(*t)];
        row.extend(p.iter().map(|x| fmt(*x)));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows are Fock levels, columns η; the header row holds the η values.
pub fn write_landscape_csv(path: &Path, l: &Landscape) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let mut header = vec!["n".to_string()];
    header.extend(l.eta_values.iter().map(|e| fmt(*e)));
    w.write_record(&header).map_err(csv_err)?;
    for (n, row) in l.n_values.iter().zip(&l.values) {
        let mut rec = vec![n.to_string()];
        rec.extend(row.iter().map(|v| fmt(*v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Numeric CSV with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| Error::Schema {
                    key: None,
                    message: format!("{}: row {}: not a number: {s:?}", path.display(), line + 2),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}
