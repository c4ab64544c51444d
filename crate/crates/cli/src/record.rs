use std::io::Write;

use rug::Float;
use serde_json::{Map, Value};

use sto3c::overlap::IntegralValue;

pub const COLUMNS: [&str; 16] = [
    "n_a",
    "n_b",
    "n_c",
    "zeta_a",
    "zeta_b",
    "zeta_c",
    "R",
    "conformation",
    "backend",
    "N",
    "digits",
    "value",
    "sign_analytic",
    "tail",
    "converged",
    "elapsed_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One evaluated integral: its inputs as given and its certified output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub n: [u32; 3],
    /// Exponents and separation echoed as typed.
    pub zeta: [String; 3],
    pub r: String,
    pub conformation: &'static str,
    pub backend: &'static str,
    pub terms: u32,
    pub digits: u32,
    /// Certified digits only; `None` when not even one is.
    pub value: Option<String>,
    pub sign: i8,
    pub tail: String,
    pub converged: bool,
    pub elapsed_s: f64,
    /// Relative analytic/quadrature gap, set in `--backend both` runs.
    pub delta: Option<String>,
}

/// Input echo shared by the rows of one parameter set.
#[derive(Debug, Clone)]
pub struct Echo {
    pub n: [u32; 3],
    pub zeta: [String; 3],
    pub r: String,
    pub conformation: &'static str,
}

enum Cell {
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl RunRecord {
    pub fn new(echo: &Echo, backend: &'static str, digits: u32, v: &IntegralValue, elapsed_s: f64) -> Self {
        let shown = v.certified_digits(digits);
        Self {
            n: echo.n,
            zeta: echo.zeta.clone(),
            r: echo.r.clone(),
            conformation: echo.conformation,
            backend,
            terms: v.terms_used,
            digits,
            value: (shown > 0).then(|| fixed_point(&v.value, shown)),
            sign: v.sign(),
            tail: format!("{:.3e}", v.tail_estimate.to_f64()),
            converged: v.converged,
            elapsed_s,
            delta: None,
        }
    }

    fn cells(&self, with_delta: bool) -> Vec<(&'static str, Cell)> {
        let text = |s: &str| Cell::Text(s.to_string());
        let mut out = vec![
            ("n_a", Cell::Int(self.n[0].into())),
            ("n_b", Cell::Int(self.n[1].into())),
            ("n_c", Cell::Int(self.n[2].into())),
            ("zeta_a", text(&self.zeta[0])),
            ("zeta_b", text(&self.zeta[1])),
            ("zeta_c", text(&self.zeta[2])),
            ("R", text(&self.r)),
            ("conformation", text(self.conformation)),
            ("backend", text(self.backend)),
            ("N", Cell::Int(self.terms.into())),
            ("digits", Cell::Int(self.digits.into())),
            ("value", self.value.as_deref().map_or(Cell::Null, text)),
            ("sign_analytic", Cell::Int(self.sign.into())),
            ("tail", text(&self.tail)),
            ("converged", Cell::Bool(self.converged)),
            ("elapsed_s", text(&format!("{:.3}", self.elapsed_s))),
        ];
        if with_delta {
            out.push(("delta", self.delta.as_deref().map_or(Cell::Null, text)));
        }
        out
    }
}

/// Writes `rows` as CSV or as a JSON array with the same keys and content.
/// A `delta` column is added when any row carries one.
pub fn write_records(rows: &[RunRecord], format: Format, out: &mut dyn Write) -> std::io::Result<()> {
    let with_delta = rows.iter().any(|r| r.delta.is_some());
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header: Vec<&str> = COLUMNS.to_vec();
            if with_delta {
                header.push("delta");
            }
            w.write_record(&header)?;
            for row in rows {
                w.write_record(row.cells(with_delta).into_iter().map(|(_, c)| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Text(s) => s,
                    Cell::Bool(b) => b.to_string(),
                    Cell::Null => String::new(),
                }))?;
            }
            w.flush()
        }
        Format::Json => {
            let array: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = row
                        .cells(with_delta)
                        .into_iter()
                        .map(|(k, c)| {
                            let v = match c {
                                Cell::Int(i) => Value::from(i),
                                Cell::Text(s) => Value::from(s),
                                Cell::Bool(b) => Value::from(b),
                                Cell::Null => Value::Null,
                            };
                            (k.to_string(), v)
                        })
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &array)?;
            writeln!(out)
        }
    }
}

/// `v` in fixed-point notation with `sig` significant digits, correctly
/// rounded.
pub fn fixed_point(v: &Float, sig: u32) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let sci = v.to_string_radix(10, Some(sig.max(1) as usize));
    // Already fixed-point when the exponent is small.
    let Some((mantissa, exp)) = sci.split_once('e') else {
        return sci;
    };
    let exp = exp.parse::<i64>().expect("MPFR exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    format!("{sign}{body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Float {
        Float::with_val(200, Float::parse(s).unwrap())
    }

    #[test]
    fn fixed_point_rounds_and_places_the_point() {
        assert_eq!(fixed_point(&f("0.1220972536598509853"), 10), "0.1220972537");
        assert_eq!(fixed_point(&f("-0.00565903345246598"), 4), "-0.005659");
        assert_eq!(fixed_point(&f("12.345"), 3), "12.3");
        assert_eq!(fixed_point(&f("1234.5"), 2), "1200");
        assert_eq!(fixed_point(&f("9.9996"), 4), "10.00");
        assert_eq!(fixed_point(&f("0"), 5), "0");
    }
}
