//! `eta,f,fp,fpp` profile CSV and comparison CSV output.

use std::io::Write;

use blasius_net_core::report::ComparisonRow;
use blasius_net_core::{ProfileRow, SolutionProfile};

use crate::fmt_f64;

pub const PROFILE_HEADER: [&str; 4] = ["eta", "f", "fp", "fpp"];
pub const COMPARISON_HEADER: [&str; 5] = ["eta", "ours", "reference", "rel_error", "absolute"];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("unexpected header {found:?}, expected {PROFILE_HEADER:?}")]
    Header { found: Vec<String> },

    #[error("record {record}: {message}")]
    Record { record: usize, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Profile(#[from] blasius_net_core::Error),
}

pub fn write_profile<W: Write>(out: W, profile: &SolutionProfile) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(PROFILE_HEADER)?;
    for r in profile.rows() {
        writer.write_record([fmt_f64(r.eta), fmt_f64(r.f), fmt_f64(r.fp), fmt_f64(r.fpp)])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn profile_to_string(profile: &SolutionProfile) -> String {
    let mut buf = Vec::new();
    write_profile(&mut buf, profile).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads a profile CSV; lines starting with `#` are ignored.
pub fn parse_profile(text: &str) -> Result<SolutionProfile, CsvError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != PROFILE_HEADER {
        return Err(CsvError::Header { found: header });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let value = |j: usize| -> Result<f64, CsvError> {
            let field = record.get(j).unwrap_or("");
            field.parse().map_err(|_| CsvError::Record { record: i + 1, message: format!("bad number `{field}`") })
        };
        rows.push(ProfileRow { eta: value(0)?, f: value(1)?, fp: value(2)?, fpp: value(3)? });
    }
    Ok(SolutionProfile::new(rows)?)
}

pub fn write_comparison<W: Write>(out: W, rows: &[ComparisonRow]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(COMPARISON_HEADER)?;
    for r in rows {
        writer.write_record([
            fmt_f64(r.eta),
            fmt_f64(r.ours),
            fmt_f64(r.reference),
            fmt_f64(r.rel_error),
            r.absolute.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
