use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::Format;
use super::CliError;

/// One attack evaluation. `margin = min_success − bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: usize,
    pub d: usize,
    pub delta_prime: f64,
    pub c_estimate: f64,
    pub min_success: f64,
    pub mean_success: f64,
    pub bound: f64,
    pub margin: f64,
    pub all_bounds_hold: bool,
}

pub const REPORT_HEADER: &str =
    "N,m,d,delta_prime,c_estimate,min_success,mean_success,bound,margin,all_bounds_hold";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcealRow {
    pub index: usize,
    pub kind: &'static str,
    pub omega: Vec<f64>,
    pub fidelity: f64,
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BobSubRow {
    pub b: u8,
    pub trace_distance: f64,
    pub effective: Vec<f64>,
    pub target: Vec<f64>,
    pub effective_gap: f64,
    pub collapse_gap: f64,
    pub reduction_gap: f64,
    pub all_bounds_hold: bool,
}

/// Rows that can be written as CSV.
pub trait CsvRow {
    fn header() -> &'static str;
    fn cells(&self) -> Vec<String>;
}

impl CsvRow for ReportRow {
    fn header() -> &'static str {
        REPORT_HEADER
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.m.to_string(),
            self.d.to_string(),
            fmt_g(self.delta_prime),
            fmt_g(self.c_estimate),
            fmt_g(self.min_success),
            fmt_g(self.mean_success),
            fmt_g(self.bound),
            fmt_g(self.margin),
            self.all_bounds_hold.to_string(),
        ]
    }
}

impl CsvRow for ConcealRow {
    fn header() -> &'static str {
        "index,kind,omega,fidelity,deficit"
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.index.to_string(),
            self.kind.to_string(),
            join(&self.omega),
            fmt_g(self.fidelity),
            fmt_g(self.deficit),
        ]
    }
}

impl CsvRow for BobSubRow {
    fn header() -> &'static str {
        "b,trace_distance,effective,target,effective_gap,collapse_gap,reduction_gap,all_bounds_hold"
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.b.to_string(),
            fmt_g(self.trace_distance),
            join(&self.effective),
            join(&self.target),
            fmt_g(self.effective_gap),
            fmt_g(self.collapse_gap),
            fmt_g(self.reduction_gap),
            self.all_bounds_hold.to_string(),
        ]
    }
}

/// Distribution weights inside one CSV cell, `;`-separated.
fn join(w: &[f64]) -> String {
    w.iter().map(|x| fmt_g(*x)).collect::<Vec<_>>().join(";")
}

/// `printf("%.12g")`.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    seed: u64,
    rows: &'a [T],
}

pub fn render<T: CsvRow + Serialize>(rows: &[T], seed: u64, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(T::header());
            out.push('\n');
            for r in rows {
                out.push_str(&r.cells().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut out = serde_json::to_string_pretty(&Envelope { seed, rows })
                .expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (-2.25, "-2.25"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0 / 3.0, "0.666666666667"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (3.7683e-3, "0.0037683"),
            (1.5e-300, "1.5e-300"),
            (0.999999999999999, "1"),
            (9.9999999999995e-5, "0.0001"),
            (0.0, "0"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x:e}");
        }
    }

    fn row() -> ReportRow {
        ReportRow {
            n: 4,
            m: 3,
            d: 2,
            delta_prime: 0.25,
            c_estimate: 1.0,
            min_success: 0.75,
            mean_success: 0.8,
            bound: 0.5,
            margin: 0.25,
            all_bounds_hold: true,
        }
    }

    #[test]
    fn csv_header_and_row() {
        let text = render(&[row()], 1, Format::Csv);
        assert_eq!(
            text,
            "N,m,d,delta_prime,c_estimate,min_success,mean_success,bound,margin,all_bounds_hold\n\
             4,3,2,0.25,1,0.75,0.8,0.5,0.25,true\n"
        );
    }

    #[test]
    fn json_mirrors_csv_fields() {
        let text = render(&[row()], 9, Format::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["seed"], 9);
        let keys: Vec<&str> = v["rows"][0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
        let mut want: Vec<&str> = REPORT_HEADER.split(',').collect();
        let mut got = keys.clone();
        want.sort();
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
