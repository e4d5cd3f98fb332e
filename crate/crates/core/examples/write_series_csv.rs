//! Writes a short BDF2 DVD time series as CSV to the path given on the
//! command line, or to standard output.
//!
//!     cargo run --release --example write_series_csv -- run.csv

use std::fs::File;
use std::io::{self, BufWriter, Write};

use dlss::experiments::{run_simulation, write_records_csv, Scheme, SimulationConfig};

fn main() -> dlss::Result<()> {
    let mut cfg = SimulationConfig::new(Scheme::Bdf2Dvd, 100, 1e-6, 2e-5);
    cfg.entropy_alphas = vec![1.0, 1.2];
    cfg.record_every = 2;
    let run = run_simulation(&cfg)?;

    let out: Box<dyn Write> = match std::env::args().nth(1) {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    write_records_csv(&run.records, &cfg.entropy_alphas, out)?;
    match run.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
