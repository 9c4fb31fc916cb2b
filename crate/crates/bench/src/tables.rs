//! CSV emission of experiment results.
//!
//! The summary file has one row per cell. The long file is whitespace
//! separated with one row per replicate, ready for gnuplot. Wall times are
//! left out of both so that repeated runs produce identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{BenchError, Result};
use crate::experiment::{CellResult, ExperimentResult};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const LONG_FILE: &str = "deltas.dat";

pub const SUMMARY_HEADER: [&str; 10] = [
    "model",
    "n",
    "p",
    "metric",
    "estimator",
    "mean_delta",
    "sd_delta",
    "se_delta",
    "replicates",
    "failures",
];

/// Four decimals; `NA` for undefined statistics.
pub fn fmt4(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "NA".to_string()
    }
}

fn summary_record(c: &CellResult) -> [String; 10] {
    [
        c.model.roman().to_string(),
        c.n.to_string(),
        c.p.to_string(),
        c.metric.to_string(),
        c.method.label().to_string(),
        fmt4(c.mean),
        fmt4(c.sd),
        fmt4(c.se),
        c.attempted().to_string(),
        c.failures.to_string(),
    ]
}

pub fn write_summary<W: Write>(cells: &[CellResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| BenchError::Execution(format!("writing summary: {e}"));
    w.write_record(SUMMARY_HEADER).map_err(csv_err)?;
    for c in cells {
        w.write_record(summary_record(c)).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| BenchError::Execution(format!("writing summary: {e}")))?;
    Ok(())
}

pub fn write_long<W: Write>(cells: &[CellResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "# model n p metric estimator replicate delta")?;
    for c in cells {
        for (r, d) in c.deltas.iter().enumerate() {
            let v = d.map_or_else(|| "NaN".to_string(), |v| format!("{v:.6}"));
            writeln!(
                out,
                "{} {} {} {} {} {r} {v}",
                c.model.roman(),
                c.n,
                c.p,
                c.metric,
                c.method.label()
            )?;
        }
    }
    Ok(())
}

/// Writes `summary.csv` (and `deltas.dat` when `long` is set) into `dir`.
pub fn emit_tables(results: &ExperimentResult, dir: &Path, long: bool) -> Result<Vec<PathBuf>> {
    if results.cells.is_empty() {
        return Err(BenchError::Execution("no cells to emit".into()));
    }
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let summary = dir.join(SUMMARY_FILE);
    let file = fs::File::create(&summary).map_err(|e| BenchError::io(&summary, e))?;
    write_summary(&results.cells, std::io::BufWriter::new(file))?;
    let mut written = vec![summary];
    if long {
        let path = dir.join(LONG_FILE);
        let file = fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
        let mut w = std::io::BufWriter::new(file);
        write_long(&results.cells, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| BenchError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn summary_string(cells: &[CellResult]) -> Result<String> {
    let mut buf = Vec::new();
    write_summary(cells, &mut buf)?;
    String::from_utf8(buf).map_err(|e| BenchError::Execution(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use frechet_sdr::sdr::Method;
    use frechet_sdr::simgen::ModelId;
    use std::time::Duration;

    fn cell() -> CellResult {
        CellResult {
            model: ModelId::I,
            n: 100,
            p: 10,
            metric: "l2".parse().unwrap(),
            method: Method::SaOls,
            d: 1,
            deltas: vec![Some(0.4), None, Some(0.523456)],
            mean: 0.461728,
            sd: 0.087,
            se: 0.0615,
            successes: 2,
            failures: 1,
            first_error: Some("boom".into()),
            wall_time: Duration::from_millis(3),
        }
    }

    #[test]
    fn one_cell_gives_header_and_one_row() {
        let s = summary_string(&[cell()]).unwrap();
        assert_eq!(
            s,
            "model,n,p,metric,estimator,mean_delta,sd_delta,se_delta,replicates,failures\n\
             I,100,10,l2,sa-OLS,0.4617,0.0870,0.0615,3,1\n"
        );
    }

    #[test]
    fn undefined_statistics_print_na() {
        assert_eq!(fmt4(f64::NAN), "NA");
        assert_eq!(fmt4(1.0 / 3.0), "0.3333");
    }

    #[test]
    fn re_emission_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let result = ExperimentResult {
            cells: vec![cell(), cell()],
            wall_time: Duration::from_secs(1),
        };
        let first = emit_tables(&result, dir.path(), true).unwrap();
        let bytes: Vec<Vec<u8>> = first.iter().map(|p| fs::read(p).unwrap()).collect();
        let mut slower = result.clone();
        slower.cells[0].wall_time = Duration::from_secs(9);
        let second = emit_tables(&slower, dir.path(), true).unwrap();
        assert_eq!(first, second);
        for (p, b) in second.iter().zip(&bytes) {
            assert_eq!(&fs::read(p).unwrap(), b);
        }
        let long = fs::read_to_string(&second[1]).unwrap();
        assert_eq!(long.lines().count(), 1 + 6);
        assert!(long.contains("I 100 10 l2 sa-OLS 1 NaN"));
    }

    #[test]
    fn empty_results_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let empty = ExperimentResult {
            cells: vec![],
            wall_time: Duration::ZERO,
        };
        assert!(emit_tables(&empty, dir.path(), false).is_err());
    }
}
