//! Plain-text model files.
//!
//! ```text
//! blasius-net-model v1
//! mode=penalty
//! domain_end=6
//! hidden=2
//! v=1.2345678901234567e-1,-2.0000000000000000e0
//! u=...
//! w=...
//! ```
//!
//! Weights are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use blasius_net_core::{NetworkParams, TrialMode, TrialSpec};

use crate::fmt_f64;

pub const MAGIC: &str = "blasius-net-model";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported model version {found} (expected v{VERSION})")]
    Version { found: String },

    #[error("line {line}: expected {expected} values for `{field}`, found {found}")]
    Length { line: usize, field: char, expected: usize, found: usize },

    #[error(transparent)]
    Invalid(#[from] blasius_net_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> ModelError {
    ModelError::Parse { line, message: message.into() }
}

pub fn format_model(params: &NetworkParams, spec: &TrialSpec) -> String {
    let join = |values: &[f64]| values.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(",");
    format!(
        "{MAGIC} v{VERSION}\nmode={}\ndomain_end={}\nhidden={}\nv={}\nu={}\nw={}\n",
        spec.mode(),
        spec.domain_end(),
        params.hidden_count(),
        join(params.output_weights()),
        join(params.hidden_biases()),
        join(params.input_weights()),
    )
}

pub fn parse_model(text: &str) -> Result<(NetworkParams, TrialSpec), ModelError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")));

    let (n, header) = next("header")?;
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.strip_prefix(" v"))
        .ok_or_else(|| parse_err(n, format!("expected `{MAGIC} v{VERSION}`, found `{header}`")))?;
    if version != VERSION.to_string() {
        if version.chars().all(|c| c.is_ascii_digit()) && !version.is_empty() {
            return Err(ModelError::Version { found: version.to_string() });
        }
        return Err(parse_err(n, format!("malformed version `{version}`")));
    }

    let field = |(n, line): (usize, &str), key: &str| -> Result<(usize, String), ModelError> {
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .map(|v| (n, v.to_string()))
            .ok_or_else(|| parse_err(n, format!("expected `{key}=...`, found `{line}`")))
    };

    let (n, mode) = field(next("mode")?, "mode")?;
    let mode: TrialMode = mode.parse().map_err(|_| parse_err(n, format!("unknown mode `{mode}`")))?;
    let (n, end) = field(next("domain_end")?, "domain_end")?;
    let end: f64 = end.parse().map_err(|_| parse_err(n, format!("bad domain_end `{end}`")))?;
    let spec = TrialSpec::new(mode, end).map_err(|e| parse_err(n, e.to_string()))?;
    let (n, hidden) = field(next("hidden")?, "hidden")?;
    let hidden: usize = hidden.parse().map_err(|_| parse_err(n, format!("bad hidden count `{hidden}`")))?;
    if hidden == 0 {
        return Err(parse_err(n, "hidden count must be at least 1"));
    }

    let mut arrays = Vec::with_capacity(3);
    for key in ['v', 'u', 'w'] {
        let (n, values) = field(next(&key.to_string())?, &key.to_string())?;
        let parsed = values
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| parse_err(n, format!("bad number `{s}` in `{key}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if parsed.len() != hidden {
            return Err(ModelError::Length { line: n, field: key, expected: hidden, found: parsed.len() });
        }
        arrays.push(parsed);
    }
    if let Some((n, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(n, format!("unexpected trailing content `{extra}`")));
    }
    let w = arrays.pop().unwrap();
    let u = arrays.pop().unwrap();
    let v = arrays.pop().unwrap();
    Ok((NetworkParams::new(v, u, w)?, spec))
}

/// Writes via a temporary file in the target directory, then renames.
pub fn save_model(path: &Path, params: &NetworkParams, spec: &TrialSpec) -> Result<(), ModelError> {
    write_atomic(path, format_model(params, spec).as_bytes())?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(NetworkParams, TrialSpec), ModelError> {
    parse_model(&fs::read_to_string(path)?)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (NetworkParams, TrialSpec) {
        let params = NetworkParams::new(vec![0.1, -2.5e-7], vec![1.0 / 3.0, 7.0], vec![-0.0, 123456.789]).unwrap();
        (params, TrialSpec::new(TrialMode::PenaltyForm, 6.0).unwrap())
    }

    #[test]
    fn layout() {
        let (p, s) = sample();
        let text = format_model(&p, &s);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "blasius-net-model v1");
        assert_eq!(lines[1], "mode=penalty");
        assert_eq!(lines[2], "domain_end=6");
        assert_eq!(lines[3], "hidden=2");
        assert_eq!(lines[4], "v=1.0000000000000001e-1,-2.4999999999999999e-7");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn roundtrip_is_exact() {
        let (p, s) = sample();
        let (q, t) = parse_model(&format_model(&p, &s)).unwrap();
        assert_eq!(s, t);
        let bits = |p: &NetworkParams| p.to_flat().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&p), bits(&q));
    }

    #[test]
    fn corrupted_header() {
        let (p, s) = sample();
        let text = format_model(&p, &s).replacen("blasius-net-model", "blasius-nat-model", 1);
        assert!(matches!(parse_model(&text), Err(ModelError::Parse { line: 1, .. })));
        assert!(matches!(parse_model(""), Err(ModelError::Parse { .. })));
    }

    #[test]
    fn version_mismatch() {
        let (p, s) = sample();
        let text = format_model(&p, &s).replacen("v1", "v2", 1);
        assert!(matches!(parse_model(&text), Err(ModelError::Version { found }) if found == "2"));
    }

    #[test]
    fn short_weight_line() {
        let text = "blasius-net-model v1\nmode=paper\ndomain_end=6\nhidden=5\nv=1,2,3,4,5\nu=1,2,3,4\nw=1,2,3,4,5\n";
        assert!(matches!(
            parse_model(text),
            Err(ModelError::Length { line: 6, field: 'u', expected: 5, found: 4 })
        ));
    }

    #[test]
    fn bad_values() {
        let base = "blasius-net-model v1\nmode=paper\ndomain_end=6\nhidden=1\nv=1\nu=1\nw=1\n";
        assert!(parse_model(base).is_ok());
        assert!(matches!(parse_model(&base.replace("mode=paper", "mode=cubic")), Err(ModelError::Parse { line: 2, .. })));
        assert!(matches!(parse_model(&base.replace("domain_end=6", "domain_end=-1")), Err(ModelError::Parse { line: 3, .. })));
        assert!(matches!(parse_model(&base.replace("w=1", "w=x")), Err(ModelError::Parse { line: 7, .. })));
        assert!(matches!(parse_model(&base.replace("w=1", "w=NaN")), Err(ModelError::Invalid(_))));
        assert!(matches!(parse_model(&format!("{base}junk\n")), Err(ModelError::Parse { line: 8, .. })));
    }
}
