use std::io::Write;

use crate::error::Result;

use super::simulation::TimeSeriesRecord;
use super::ConvergenceTable;

/// Leading columns of every time-series file; the per-exponent entropy
/// columns follow `E1`, and `EG` follows them.
pub const RECORD_FIXED_COLUMNS: [&str; 4] = ["step", "t", "mass", "E1"];

const TRAILING_COLUMNS: [&str; 7] = [
    "Fd",
    "minU",
    "rcorr",
    "newton_iters",
    "chain_residual",
    "fisher_rate",
    "dissipation_residual",
];

/// 17 significant digits: enough to recover every `f64` exactly.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn header(alphas: &[f64]) -> Vec<String> {
    let mut cols: Vec<String> = RECORD_FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    for a in alphas {
        cols.push(format!("E_{a}"));
        cols.push(format!("Erel_{a}"));
    }
    cols.push("EG".into());
    cols.extend(TRAILING_COLUMNS.iter().map(|s| s.to_string()));
    cols
}

/// Writes a time series. `alphas` fixes the entropy columns so an empty
/// series still gets the full header.
pub fn write_records_csv(records: &[TimeSeriesRecord], alphas: &[f64], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header(alphas))?;
    for r in records {
        let mut row = vec![r.step.to_string(), num(r.t), num(r.mass), num(r.e1)];
        for a in alphas {
            let found = r.entropies.iter().find(|(b, _, _)| b == a);
            row.push(opt(found.map(|e| e.1)));
            row.push(opt(found.map(|e| e.2)));
        }
        row.push(opt(r.eg));
        row.push(num(r.fd));
        row.push(num(r.min_u));
        row.push(opt(r.r_corr));
        row.push(r.newton_iters.to_string());
        row.push(opt(r.chain_residual));
        row.push(opt(r.fisher_rate));
        row.push(opt(r.dissipation_residual));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `tau,error` rows.
pub fn write_table_csv(table: &ConvergenceTable, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["tau", "error"])?;
    for &(tau, err) in &table.rows {
        w.write_record([num(tau), num(err)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Scheme;

    fn sample(step: usize) -> TimeSeriesRecord {
        TimeSeriesRecord {
            step,
            t: step as f64 * 1e-6,
            mass: 1.0 / 3.0,
            e1: 0.1,
            entropies: vec![(1.2, 0.5, 0.25)],
            eg: None,
            fd: std::f64::consts::PI,
            min_u: 1e-3,
            r_corr: Some(-2.5e-9),
            newton_iters: 4,
            chain_residual: Some(0.0),
            fisher_rate: None,
            dissipation_residual: None,
        }
    }

    fn to_string(records: &[TimeSeriesRecord]) -> String {
        let mut buf = Vec::new();
        write_records_csv(records, &[1.2], &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_series_is_header_only() {
        let s = to_string(&[]);
        assert_eq!(
            s,
            "step,t,mass,E1,E_1.2,Erel_1.2,EG,Fd,minU,rcorr,newton_iters,chain_residual,fisher_rate,dissipation_residual\n"
        );
    }

    #[test]
    fn one_record_two_lines_and_round_trip() {
        let s = to_string(&[sample(3)]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(!s.contains('\r'));
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[0], "3");
        assert_eq!(cells[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(cells[7].parse::<f64>().unwrap(), std::f64::consts::PI);
        assert_eq!(cells[6], "", "missing values are empty cells");
        assert_eq!(cells[9].parse::<f64>().unwrap(), -2.5e-9);
    }

    #[test]
    fn output_is_deterministic() {
        let recs = [sample(0), sample(1)];
        assert_eq!(to_string(&recs), to_string(&recs));
    }

    #[test]
    fn table_format() {
        let t = ConvergenceTable {
            scheme: Scheme::Dvd,
            rows: vec![(5e-6, 1.5e-4), (2.5e-6, 7.5e-5)],
            rate: 1.0,
        };
        let mut buf = Vec::new();
        write_table_csv(&t, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "tau,error\n5.0000000000000004e-6,1.4999999999999999e-4\n2.5000000000000002e-6,7.4999999999999993e-5\n"
        );
    }
}
