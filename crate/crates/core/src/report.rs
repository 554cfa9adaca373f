//! Comparison of solution profiles against published reference tables.

use core::fmt;

use alloc::format;
use alloc::vec::Vec;

use crate::mlp::NetworkParams;
use crate::oracle::{ProfileRow, SolutionProfile};
use crate::trial::{TrialJet, TrialSpec};
use crate::{Error, Result};

/// Abscissa matching tolerance used when joining a profile to a table.
pub const ETA_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    F,
    Fp,
    Fpp,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::F => "f",
            Quantity::Fp => "fp",
            Quantity::Fpp => "fpp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "f" => Some(Quantity::F),
            "fp" => Some(Quantity::Fp),
            "fpp" => Some(Quantity::Fpp),
            _ => None,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identifier of one of the eight published comparison tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableId(u8);

impl TableId {
    pub const ALL: [TableId; 8] = [TableId(1), TableId(2), TableId(3), TableId(4), TableId(5), TableId(6), TableId(7), TableId(8)];

    pub fn new(number: u8) -> Result<Self> {
        if (1..=8).contains(&number) {
            Ok(Self(number))
        } else {
            Err(Error::InvalidArgument(format!("table number must be 1..=8, got {number}")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// A number as printed in a table, with the size of one unit in its last
/// printed digit (e.g. `4.70e-3` has unit `1e-5`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedValue {
    pub value: f64,
    pub last_digit_unit: f64,
}

impl PrintedValue {
    /// Parses `4.70e-3`, `8.e-1`, `0.0066712` and similar decimal forms.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        let value: f64 = text.parse().ok()?;
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
            None => (text, 0),
        };
        let decimals = mantissa.split_once('.').map_or(0, |(_, frac)| frac.len()) as i32;
        Some(Self { value, last_digit_unit: libm::pow(10.0, (exponent - decimals) as f64) })
    }

    /// `|x − value|` within one unit in the last printed digit (with a
    /// relative slack of 1e-9 for the binary representation).
    pub fn matches(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.last_digit_unit * (1.0 + 1e-9)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub eta: f64,
    /// The neural-network value printed next to the references.
    pub published: f64,
    /// One or two reference columns.
    pub reference_values: Vec<f64>,
    /// Printed relative errors, aligned with `reference_values`; `None`
    /// where the table prints a dash.
    pub printed_rel_errors: Vec<Option<PrintedValue>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    pub table_id: TableId,
    pub quantity: Quantity,
    /// Labels of the reference columns.
    pub sources: Vec<alloc::string::String>,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    pub fn validate(&self) -> Result<()> {
        let columns = self.sources.len();
        if !(1..=2).contains(&columns) {
            return Err(Error::InvalidArgument(format!("{}: expected 1 or 2 reference columns, got {columns}", self.table_id)));
        }
        for row in &self.rows {
            let finite = row.eta.is_finite() && row.published.is_finite() && row.reference_values.iter().all(|v| v.is_finite());
            if !finite {
                return Err(Error::InvalidArgument(format!("{}: non-finite value at eta={}", self.table_id, row.eta)));
            }
            if row.reference_values.len() != columns || row.printed_rel_errors.len() != columns {
                return Err(Error::InvalidArgument(format!("{}: wrong column count at eta={}", self.table_id, row.eta)));
            }
        }
        if self.rows.windows(2).any(|w| w[0].eta >= w[1].eta) {
            return Err(Error::InvalidArgument(format!("{}: rows not sorted by eta", self.table_id)));
        }
        Ok(())
    }

    pub fn etas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.eta).collect()
    }

    pub fn column_count(&self) -> usize {
        self.sources.len()
    }

    /// The table's own published column as a profile; columns for the other
    /// quantities are NaN.
    pub fn published_profile(&self) -> SolutionProfile {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut row = ProfileRow { eta: r.eta, f: f64::NAN, fp: f64::NAN, fpp: f64::NAN };
                match self.quantity {
                    Quantity::F => row.f = r.published,
                    Quantity::Fp => row.fp = r.published,
                    Quantity::Fpp => row.fpp = r.published,
                }
                row
            })
            .collect();
        SolutionProfile::new(rows).expect("validated tables are sorted")
    }

    /// Copy restricted to rows with `eta <= eta_max`.
    pub fn truncated(&self, eta_max: f64) -> Self {
        Self { rows: self.rows.iter().filter(|r| r.eta <= eta_max).cloned().collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub eta: f64,
    pub ours: f64,
    pub reference: f64,
    pub rel_error: f64,
    /// Set when the reference is zero and `rel_error` is an absolute error.
    pub absolute: bool,
}

/// `|ours − reference| / |reference|`, or `|ours|` when the reference is 0.
pub fn relative_error(ours: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        ours.abs()
    } else {
        (ours - reference).abs() / reference.abs()
    }
}

/// Rows `(η, y_t, y_t', y_t'')` of a trained trial solution.
pub fn evaluate_profile(spec: &TrialSpec, params: &NetworkParams, etas: &[f64]) -> Result<SolutionProfile> {
    let rows = etas
        .iter()
        .map(|&eta| {
            spec.check_domain(eta)?;
            let jet = TrialJet::new(spec, params, eta);
            Ok(ProfileRow { eta, f: jet.derivative(0), fp: jet.derivative(1), fpp: jet.derivative(2) })
        })
        .collect::<Result<Vec<_>>>()?;
    SolutionProfile::new(rows)
}

/// Joins `profile` to `table` on `η` and computes the error against
/// reference column `column` (0-based).
pub fn compare(profile: &SolutionProfile, table: &ReferenceTable, column: usize) -> Result<Vec<ComparisonRow>> {
    if column >= table.column_count() {
        return Err(Error::InvalidArgument(format!(
            "{} has {} reference column(s), requested column {}",
            table.table_id,
            table.column_count(),
            column + 1
        )));
    }
    let mut missing = Vec::new();
    let mut out = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        match profile.find(row.eta, ETA_MATCH_TOL) {
            Some(p) => {
                let ours = p.get(table.quantity);
                let reference = row.reference_values[column];
                out.push(ComparisonRow {
                    eta: row.eta,
                    ours,
                    reference,
                    rel_error: relative_error(ours, reference),
                    absolute: reference == 0.0,
                });
            }
            None => missing.push(row.eta),
        }
    }
    if !missing.is_empty() || out.is_empty() {
        return Err(Error::Join { missing });
    }
    Ok(out)
}
