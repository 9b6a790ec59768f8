//! CSV tables of energy, relative entropy and the itemised inequality.
//!
//! Every table has a mandatory header row and one row per time level. Reals
//! are written with 17 significant digits so that reading a table returns
//! the written values exactly.

use std::path::Path;

use crate::diagnostics::{EnergyReport, GronwallFit, ReiReport, RelEntropyTrace};
use crate::error::{Error, Result};
use crate::experiments::ConvergenceStudy;

/// A fixed-width row of reals.
pub trait Row: Sized {
    const HEADER: &'static [&'static str];
    fn to_values(&self) -> Vec<f64>;
    fn from_values(v: &[f64]) -> Self;
}

impl Row for EnergyReport {
    const HEADER: &'static [&'static str] = &[
        "t",
        "kinetic",
        "interfacial",
        "potential",
        "viscous_diss",
        "ac_diss",
        "cumulative_diss",
        "audit_violation",
    ];

    fn to_values(&self) -> Vec<f64> {
        // the violation column is filled in by `write_energy`
        vec![
            self.t,
            self.kinetic,
            self.interfacial,
            self.potential,
            self.viscous_diss,
            self.ac_diss,
            self.cumulative_diss,
            0.0,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        EnergyReport {
            t: v[0],
            kinetic: v[1],
            interfacial: v[2],
            potential: v[3],
            viscous_diss: v[4],
            ac_diss: v[5],
            cumulative_diss: v[6],
        }
    }
}

/// One line of the relative entropy table.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EntropyRow {
    pub t: f64,
    pub entropy: f64,
    pub dissipation: f64,
    pub omega: f64,
    pub bound: f64,
}

impl Row for EntropyRow {
    const HEADER: &'static [&'static str] = &["t", "E", "D", "omega", "bound_curve"];

    fn to_values(&self) -> Vec<f64> {
        vec![self.t, self.entropy, self.dissipation, self.omega, self.bound]
    }

    fn from_values(v: &[f64]) -> Self {
        EntropyRow {
            t: v[0],
            entropy: v[1],
            dissipation: v[2],
            omega: v[3],
            bound: v[4],
        }
    }
}

impl Row for ReiReport {
    const HEADER: &'static [&'static str] = &[
        "t",
        "lhs_entropy_gap",
        "lhs_visc",
        "lhs_ac",
        "r_conv",
        "r_eps1",
        "r_eps2",
        "r_eps3",
        "r_eps4",
        "r_f",
        "slack",
    ];

    fn to_values(&self) -> Vec<f64> {
        vec![
            self.t,
            self.lhs_entropy_gap,
            self.lhs_visc,
            self.lhs_ac,
            self.r_conv,
            self.r_eps1,
            self.r_eps2,
            self.r_eps3,
            self.r_eps4,
            self.r_f,
            self.slack,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        ReiReport {
            t: v[0],
            lhs_entropy_gap: v[1],
            lhs_visc: v[2],
            lhs_ac: v[3],
            r_conv: v[4],
            r_eps1: v[5],
            r_eps2: v[6],
            r_eps3: v[7],
            r_eps4: v[8],
            r_f: v[9],
            slack: v[10],
        }
    }
}

/// One entry of a convergence study; `order` is against the previous row
/// and NaN on the first.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConvergenceRow {
    pub size: f64,
    pub error: f64,
    pub order: f64,
}

impl Row for ConvergenceRow {
    const HEADER: &'static [&'static str] = &["size", "error", "order"];

    fn to_values(&self) -> Vec<f64> {
        vec![self.size, self.error, self.order]
    }

    fn from_values(v: &[f64]) -> Self {
        ConvergenceRow {
            size: v[0],
            error: v[1],
            order: v[2],
        }
    }
}

pub fn convergence_rows(study: &ConvergenceStudy) -> Vec<ConvergenceRow> {
    (0..study.sizes.len())
        .map(|i| ConvergenceRow {
            size: study.sizes[i],
            error: study.errors[i],
            order: if i == 0 { f64::NAN } else { study.orders[i - 1] },
        })
        .collect()
}

pub fn entropy_rows(trace: &RelEntropyTrace, fit: &GronwallFit) -> Vec<EntropyRow> {
    (0..trace.times.len())
        .map(|i| EntropyRow {
            t: trace.times[i],
            entropy: trace.entropy[i],
            dissipation: trace.dissipation[i],
            omega: trace.omega[i],
            bound: fit.bound_curve[i],
        })
        .collect()
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_rows<R: Row>(path: &Path, rows: &[R]) -> Result<()> {
    write_table(path, R::HEADER, rows.iter().map(Row::to_values))
}

pub fn read_rows<R: Row>(path: &Path) -> Result<Vec<R>> {
    let schema = |message: String| Error::Schema {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(R::HEADER.iter().copied()) {
        return Err(schema(format!(
            "expected header {:?}, got {:?}",
            R::HEADER,
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let values = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| schema(format!("row {}: {e}", i + 1)))?;
        out.push(R::from_values(&values));
    }
    Ok(out)
}

/// Energy table with the running audit violation in the last column.
pub fn write_energy(path: &Path, reports: &[EnergyReport]) -> Result<()> {
    let violations = crate::diagnostics::EnergyTrace::from_reports(reports.to_vec()).violations();
    write_table(
        path,
        EnergyReport::HEADER,
        reports.iter().zip(violations).map(|(r, v)| {
            let mut row = r.to_values();
            row[7] = v;
            row
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("energy.csv");
        let reports: Vec<EnergyReport> = (0..5)
            .map(|i| EnergyReport {
                t: i as f64 * 0.1,
                kinetic: 1.0 / (i as f64 + 3.0),
                interfacial: std::f64::consts::PI * 1e-7,
                potential: 2.0f64.sqrt(),
                viscous_diss: 1e-300,
                ac_diss: -0.0,
                cumulative_diss: 123456.789e10,
            })
            .collect();
        write_energy(&path, &reports).unwrap();
        let back: Vec<EnergyReport> = read_rows(&path).unwrap();
        assert_eq!(back, reports);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(
            text.starts_with("t,kinetic,interfacial,potential,viscous_diss,ac_diss,cumulative_diss,audit_violation\n")
        );
    }

    #[test]
    fn rei_and_entropy_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rei = vec![ReiReport {
            t: 0.3,
            lhs_entropy_gap: -1e-5,
            slack: 1.0 / 7.0,
            ..Default::default()
        }];
        let p = dir.path().join("rei.csv");
        write_rows(&p, &rei).unwrap();
        assert_eq!(read_rows::<ReiReport>(&p).unwrap(), rei);
        let rows = vec![EntropyRow {
            t: 0.1,
            entropy: 0.2,
            dissipation: 0.3,
            omega: 1.4,
            bound: 0.5,
        }];
        let p = dir.path().join("entropy.csv");
        write_rows(&p, &rows).unwrap();
        assert_eq!(read_rows::<EntropyRow>(&p).unwrap(), rows);
        assert!(std::fs::read_to_string(&p)
            .unwrap()
            .starts_with("t,E,D,omega,bound_curve\n"));
    }

    #[test]
    fn convergence_rows_mark_the_first_order_missing() {
        let study = ConvergenceStudy {
            sizes: vec![0.1, 0.05],
            errors: vec![4e-2, 1e-2],
            orders: vec![2.0],
        };
        let rows = convergence_rows(&study);
        assert!(rows[0].order.is_nan());
        assert_eq!(rows[1].order, 2.0);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_rows(&p, &rows).unwrap();
        let back: Vec<ConvergenceRow> = read_rows(&p).unwrap();
        assert!(back[0].order.is_nan());
        assert_eq!(back[1], rows[1]);
    }

    #[test]
    fn wrong_header_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        std::fs::write(&p, "t,E,D\n0,1,2\n").unwrap();
        assert!(matches!(read_rows::<EntropyRow>(&p), Err(Error::Schema { .. })));
        std::fs::write(&p, "t,E,D,omega,bound_curve\n0,1,2,x,4\n").unwrap();
        assert!(matches!(read_rows::<EntropyRow>(&p), Err(Error::Schema { .. })));
    }

    #[test]
    fn missing_file_is_reported_with_its_path() {
        let e = read_rows::<EntropyRow>(Path::new("/nonexistent/entropy.csv")).unwrap_err();
        assert!(e.to_string().contains("/nonexistent/entropy.csv"));
    }
}
