//! Reference tables shipped with the crate.
//!
//! Each table is a CSV file with two metadata comments:
//!
//! ```text
//! # table=2
//! # quantity=f
//! eta,published,ref16,ref17,rel_ref16,rel_ref17
//! 0.2,0.0066712,0.00664,0.006640985327,4.69e-3,4.54e-3
//! ```
//!
//! `published` is the neural-network column printed next to the reference
//! values; a `-` in a `rel_*` column means no error was printed. Values are
//! stored exactly as printed.
//!
//! Setting `BLASIUS_NET_FIXTURES` to a directory makes [`load_table`] read
//! `table<N>.csv` from there instead of the embedded copies.

use std::path::{Path, PathBuf};

use blasius_net_core::report::{PrintedValue, Quantity, ReferenceRow, ReferenceTable, TableId};

pub const FIXTURES_ENV: &str = "BLASIUS_NET_FIXTURES";

const EMBEDDED: [&str; 8] = [
    include_str!("../fixtures/table1.csv"),
    include_str!("../fixtures/table2.csv"),
    include_str!("../fixtures/table3.csv"),
    include_str!("../fixtures/table4.csv"),
    include_str!("../fixtures/table5.csv"),
    include_str!("../fixtures/table6.csv"),
    include_str!("../fixtures/table7.csv"),
    include_str!("../fixtures/table8.csv"),
];

/// Rows per table, T1 to T8.
pub const ROW_COUNTS: [usize; 8] = [12, 16, 16, 16, 28, 19, 19, 19];

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("{source_name}: {message}")]
    Format { source_name: String, message: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{source_name}: {source}")]
    Csv { source_name: String, source: csv::Error },
}

pub fn fixture_file_name(id: TableId) -> String {
    format!("table{}.csv", id.number())
}

pub fn embedded_source(id: TableId) -> &'static str {
    EMBEDDED[id.number() as usize - 1]
}

/// Loads a table from `$BLASIUS_NET_FIXTURES` when set, otherwise from the
/// embedded copy.
pub fn load_table(id: TableId) -> Result<ReferenceTable, FixtureError> {
    match std::env::var_os(FIXTURES_ENV) {
        Some(dir) if !dir.is_empty() => load_table_from(Path::new(&dir), id),
        _ => parse_table(embedded_source(id), &fixture_file_name(id)),
    }
}

pub fn load_table_from(dir: &Path, id: TableId) -> Result<ReferenceTable, FixtureError> {
    let path = dir.join(fixture_file_name(id));
    let text = std::fs::read_to_string(&path).map_err(|source| FixtureError::Io { path: path.clone(), source })?;
    parse_table(&text, &path.display().to_string())
}

pub fn load_all() -> Result<Vec<ReferenceTable>, FixtureError> {
    TableId::ALL.into_iter().map(load_table).collect()
}

pub fn parse_table(text: &str, source_name: &str) -> Result<ReferenceTable, FixtureError> {
    let fail = |message: String| FixtureError::Format { source_name: source_name.to_string(), message };
    let csv_err = |source| FixtureError::Csv { source_name: source_name.to_string(), source };

    let mut table_id = None;
    let mut quantity = None;
    for meta in text.lines().filter_map(|l| l.strip_prefix('#')) {
        if let Some((key, value)) = meta.trim().split_once('=') {
            match key.trim() {
                "table" => {
                    let n: u8 = value.trim().parse().map_err(|_| fail(format!("bad table number `{value}`")))?;
                    table_id = Some(TableId::new(n).map_err(|e| fail(e.to_string()))?);
                }
                "quantity" => {
                    quantity = Some(Quantity::parse(value.trim()).ok_or_else(|| fail(format!("unknown quantity `{value}`")))?);
                }
                _ => {}
            }
        }
    }
    let table_id = table_id.ok_or_else(|| fail("missing `# table=` line".into()))?;
    let quantity = quantity.ok_or_else(|| fail("missing `# quantity=` line".into()))?;

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.len() < 4 || !header.len().is_multiple_of(2) || header[0] != "eta" || header[1] != "published" {
        return Err(fail(format!("unexpected header {header:?}")));
    }
    let columns = (header.len() - 2) / 2;
    let sources: Vec<String> = header[2..2 + columns].to_vec();
    for (src, rel) in sources.iter().zip(&header[2 + columns..]) {
        if rel.strip_prefix("rel_") != Some(src.as_str()) {
            return Err(fail(format!("error column `{rel}` does not match `{src}`")));
        }
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let number = |j: usize| -> Result<f64, FixtureError> {
            let field = record.get(j).unwrap_or("");
            field.parse().map_err(|_| fail(format!("row {}: bad number `{field}`", i + 1)))
        };
        let printed = |j: usize| -> Result<Option<PrintedValue>, FixtureError> {
            match record.get(j).unwrap_or("") {
                "-" => Ok(None),
                field => PrintedValue::parse(field).map(Some).ok_or_else(|| fail(format!("row {}: bad error `{field}`", i + 1))),
            }
        };
        rows.push(ReferenceRow {
            eta: number(0)?,
            published: number(1)?,
            reference_values: (0..columns).map(|c| number(2 + c)).collect::<Result<_, _>>()?,
            printed_rel_errors: (0..columns).map(|c| printed(2 + columns + c)).collect::<Result<_, _>>()?,
        });
    }

    let expected = ROW_COUNTS[table_id.number() as usize - 1];
    if rows.len() != expected {
        return Err(fail(format!("{table_id} must have {expected} rows, found {}", rows.len())));
    }
    let table = ReferenceTable { table_id, quantity, sources, rows };
    table.validate().map_err(|e| fail(e.to_string()))?;
    Ok(table)
}
