//! CSV emission for experiment results.
//!
//! Output files are consumed by the plotting pipeline and by replay
//! verification, which compares files byte for byte — so the column
//! order, header spelling, and float formatting here are all contract,
//! not convenience.  Floats go through the shortest round-trip
//! representation, which is stable for a given bit pattern.

use std::io;

use serde::{Deserialize, Serialize};

/// Column names of an error-rate CSV, in order.
pub const ERRORS_HEADER: [&str; 10] = [
    "variant", "K", "T", "R", "trials", "failures", "rate", "ci_low", "ci_high", "seed",
];

/// Column names of a speedup CSV, in order.
pub const SPEEDUP_HEADER: [&str; 7] = [
    "K",
    "R",
    "target_err",
    "T_star",
    "baseline_T",
    "speedup",
    "seed",
];

/// One row of an error-rate table.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
pub struct ErrorsCsvRow {
    pub variant: String,
    #[serde(rename = "K")]
    pub agents: u32,
    #[serde(rename = "T")]
    pub horizon: u64,
    #[serde(rename = "R")]
    pub rounds: u32,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// One row of a rounds-versus-speedup table.
#[derive(Clone, Debug, Deserialize, PartialEq, Serialize)]
pub struct SpeedupCsvRow {
    #[serde(rename = "K")]
    pub agents: u32,
    #[serde(rename = "R")]
    pub rounds: u32,
    pub target_err: f64,
    #[serde(rename = "T_star")]
    pub t_star: u64,
    #[serde(rename = "baseline_T")]
    pub baseline_t: u64,
    pub speedup: f64,
    pub seed: u64,
}

/// Write an error-rate CSV, headers included even when `rows` is empty.
pub fn write_errors_csv<W: io::Write>(writer: W, rows: &[ErrorsCsvRow]) -> Result<(), csv::Error> {
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    out.write_record(ERRORS_HEADER)?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Write a speedup CSV, headers included even when `rows` is empty.
pub fn write_speedup_csv<W: io::Write>(
    writer: W,
    rows: &[SpeedupCsvRow],
) -> Result<(), csv::Error> {
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    out.write_record(SPEEDUP_HEADER)?;
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_csv_matches_the_golden_bytes() {
        let rows = vec![
            ErrorsCsvRow {
                variant: "basic".into(),
                agents: 4,
                horizon: 1000,
                rounds: 2,
                trials: 100,
                failures: 7,
                rate: 0.07,
                ci_low: 0.0,
                ci_high: 0.2,
                seed: 42,
            },
            ErrorsCsvRow {
                variant: "meta".into(),
                agents: 64,
                horizon: 44652,
                rounds: 3,
                trials: 300,
                failures: 0,
                rate: 0.0,
                ci_low: 0.0,
                ci_high: 0.125,
                seed: 7,
            },
        ];
        let mut buf = Vec::new();
        write_errors_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "variant,K,T,R,trials,failures,rate,ci_low,ci_high,seed\n\
             basic,4,1000,2,100,7,0.07,0.0,0.2,42\n\
             meta,64,44652,3,300,0,0.0,0.0,0.125,7\n"
        );
    }

    #[test]
    fn speedup_csv_matches_the_golden_bytes() {
        let rows = vec![SpeedupCsvRow {
            agents: 64,
            rounds: 2,
            target_err: 0.1,
            t_star: 930,
            baseline_t: 2325,
            speedup: 2.5,
            seed: 9,
        }];
        let mut buf = Vec::new();
        write_speedup_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "K,R,target_err,T_star,baseline_T,speedup,seed\n\
             64,2,0.1,930,2325,2.5,9\n"
        );
    }

    #[test]
    fn empty_tables_still_carry_headers() {
        let mut buf = Vec::new();
        write_errors_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "variant,K,T,R,trials,failures,rate,ci_low,ci_high,seed\n"
        );
        let mut buf = Vec::new();
        write_speedup_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "K,R,target_err,T_star,baseline_T,speedup,seed\n"
        );
    }

    #[test]
    fn rows_survive_a_read_back() {
        let rows = vec![ErrorsCsvRow {
            variant: "random-threshold".into(),
            agents: 16,
            horizon: 5000,
            rounds: 3,
            trials: 500,
            failures: 12,
            rate: 0.024,
            ci_low: 0.0,
            ci_high: 0.1,
            seed: 123456789,
        }];
        let mut buf = Vec::new();
        write_errors_csv(&mut buf, &rows).unwrap();
        let parsed: Vec<ErrorsCsvRow> = csv::Reader::from_reader(buf.as_slice())
            .deserialize()
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(parsed, rows);

        let rows = vec![SpeedupCsvRow {
            agents: 64,
            rounds: 3,
            target_err: 0.1,
            t_star: 800,
            baseline_t: 2400,
            speedup: 3.0,
            seed: 55,
        }];
        let mut buf = Vec::new();
        write_speedup_csv(&mut buf, &rows).unwrap();
        let parsed: Vec<SpeedupCsvRow> = csv::Reader::from_reader(buf.as_slice())
            .deserialize()
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(parsed, rows);
    }
}
