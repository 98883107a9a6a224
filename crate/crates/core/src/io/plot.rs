use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::output::read_table;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    /// `sigma_z`, `fidelity` and `n_mean` against `t` from a trajectory CSV.
    Timeseries,
    /// `log10|f1|` over (η, n) from a landscape CSV.
    Heatmap,
    /// Final-row phonon distribution from a trajectory CSV.
    Bars,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "timeseries" => Ok(PlotKind::Timeseries),
            "heatmap" => Ok(PlotKind::Heatmap),
            "bars" => Ok(PlotKind::Bars),
            _ => Err(Error::invalid(format!("unknown plot kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotFiles {
    pub data: PathBuf,
    pub script: PathBuf,
}

/// Writes a whitespace-separated data file and a gnuplot script that
/// renders it to PNG, next to each other in `out_dir`.
pub fn emit_plotdata(input: &Path, kind: PlotKind, out_dir: &Path) -> Result<PlotFiles> {
    let table = read_table(input)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let base = match kind {
        PlotKind::Timeseries => format!("{stem}_timeseries"),
        PlotKind::Heatmap => format!("{stem}_heatmap"),
        PlotKind::Bars => format!("{stem}_bars"),
    };
    let data_name = format!("{base}.dat");
    let mut data = String::new();
    let script = match kind {
        PlotKind::Timeseries => {
            let cols = ["t", "sigma_z", "fidelity", "n_mean"];
            let idx = cols
                .iter()
                .map(|c| table.column_index(c))
                .collect::<Result<Vec<_>>>()?;
            data.push_str("# t sigma_z fidelity n_mean\n");
            for row in &table.rows {
                let line: Vec<String> = idx.iter().map(|&i| format!("{:.16e}", row[i])).collect();
                writeln!(data, "{}", line.join(" ")).unwrap();
            }
            format!(
                "set terminal pngcairo size 900,900\nset output '{base}.png'\nset multiplot layout 3,1\n\
                 set xlabel 't [2pi/g]'\n\
                 set ylabel '<sigma_z>'\nplot '{data_name}' using 1:2 with lines notitle\n\
                 set ylabel 'P(t)'\nplot '{data_name}' using 1:3 with lines notitle\n\
                 set ylabel '<n>'\nplot '{data_name}' using 1:4 with lines notitle\n\
                 unset multiplot\n"
            )
        }
        PlotKind::Bars => {
            let last = table
                .rows
                .last()
                .ok_or_else(|| Error::MissingColumn("P_0 (no rows)".into()))?;
            table.column_index("P_0")?;
            data.push_str("# n P_n\n");
            let mut n = 0;
            while let Ok(i) = table.column_index(&format!("P_{n}")) {
                writeln!(data, "{n} {:.16e}", last[i]).unwrap();
                n += 1;
            }
            format!(
                "set terminal pngcairo size 800,500\nset output '{base}.png'\n\
                 set style fill solid 0.8\nset boxwidth 0.8\nset xlabel 'n'\nset ylabel 'P_n'\n\
                 plot '{data_name}' using 1:2 with boxes notitle\n"
            )
        }
        PlotKind::Heatmap => {
            if table.header.first().map(String::as_str) != Some("n") {
                return Err(Error::MissingColumn("n".into()));
            }
            let etas = table.header[1..]
                .iter()
                .map(|h| {
                    h.parse::<f64>()
                        .map_err(|_| Error::MissingColumn(format!("eta value {h:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            data.push_str("# eta n log10|f1|\n");
            for (j, eta) in etas.iter().enumerate() {
                for row in &table.rows {
                    writeln!(data, "{eta:.16e} {} {:.16e}", row[0], row[j + 1]).unwrap();
                }
                data.push('\n');
            }
            format!(
                "set terminal pngcairo size 800,600\nset output '{base}.png'\n\
                 set view map\nset xlabel 'eta'\nset ylabel 'n'\nset cblabel 'log10|f1|'\n\
                 splot '{data_name}' using 1:2:3 with pm3d notitle\n"
            )
        }
    };
    std::fs::create_dir_all(out_dir)?;
    let files = PlotFiles {
        data: out_dir.join(&data_name),
        script: out_dir.join(format!("{base}.gp")),
    };
    std::fs::write(&files.data, data)?;
    std::fs::write(&files.script, script)?;
    Ok(files)
}
