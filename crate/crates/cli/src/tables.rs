use rayon::prelude::*;
use rug::{Float, Integer};

use sto3c::overlap::{overlap_3c, SlaterParams, TruncationPolicy};
use sto3c::PrecisionContext;

use crate::compute::scan;
use crate::record::{Echo, RunRecord};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Table1,
    Table2,
}

/// Convergence table, rows `N = 1..30` for (1,2,1; 1.6,1.4,1.2; R = 1.4),
/// stored as published.
pub const TABLE1: [&str; 30] = [
    "-0.11416",
    "-0.12293 3",
    "-0.12160 22",
    "-0.12219 350",
    "-0.12207 7743",
    "-0.12210 04107",
    "-0.12209 67757 3",
    "-0.12209 73204 83",
    "-0.12209 72448 624",
    "-0.12209 72547 7065",
    "-0.12209 72535 25580",
    "-0.12209 72536 75642 0",
    "-0.12209 72536 58049 61",
    "-0.12209 72536 60052 409",
    "-0.12209 72536 59828 9497",
    "-0.12209 72536 59853 35836",
    "-0.12209 72536 59850 73400 8",
    "-0.12209 72536 59851 01158 63",
    "-0.12209 72536 59850 98261 802",
    "-0.12209 72536 59850 98559 9711",
    "-0.12209 72536 59850 98529 65861",
    "-0.12209 72536 59850 98532 70074 8",
    "-0.12209 72536 59850 98532 39925 80",
    "-0.12209 72536 59850 98532 42873 615",
    "-0.12209 72536 59850 98532 42589 4768",
    "-0.12209 72536 59850 98532 42616 42719",
    "-0.12209 72536 59850 98532 42613 91777",
    "-0.12209 72536 59850 98532 42614 14624",
    "-0.12209 72536 59850 98532 42614 12602",
    "-0.12209 72536 59850 98532 42614 12774",
];

pub struct Table2Row {
    pub n: [u32; 3],
    pub zeta: [&'static str; 3],
    pub r: &'static str,
    pub value: &'static str,
    pub terms: u32,
}

/// Values at the truncation order listed beside each, stored as published.
pub const TABLE2: [Table2Row; 5] = [
    Table2Row { n: [1, 1, 1], zeta: ["1.3", "1.3", "1.3"], r: "1.0", value: "-0.10852 96351 53609 38988", terms: 25 },
    Table2Row { n: [1, 1, 1], zeta: ["1.1", "1.3", "1.5"], r: "1.0", value: "-0.41057 77481 70340 63986", terms: 26 },
    Table2Row { n: [1, 2, 2], zeta: ["2.0", "2.0", "2.0"], r: "2.0", value: "0.00409 87551 44074 883", terms: 30 },
    Table2Row { n: [2, 2, 2], zeta: ["1.6", "1.4", "1.4"], r: "2.5", value: "0.08943 10170 26917 0505", terms: 28 },
    Table2Row { n: [4, 3, 2], zeta: ["2.6", "2.4", "1.6"], r: "3.0", value: "0.00362 95811 14392 3873", terms: 25 },
];

/// Outcome of comparing one computed value with its fixture.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub label: String,
    pub published: &'static str,
    /// `|value|` rounded to the fixture's length, with the computed sign.
    pub computed: String,
    pub matches: bool,
}

/// Digits after the point of a fixture's magnitude.
fn fixture_digits(s: &str) -> String {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.trim_start_matches('-');
    t.strip_prefix("0.").expect("fixtures lie in (-1, 1)").to_string()
}

/// `|v|` rounded to `d` decimals, digits after the point.
fn rounded_digits(v: &Float, d: usize) -> String {
    let scaled = Float::with_val(v.prec(), v.abs_ref()) * Integer::from(Integer::u_pow_u(10, d as u32));
    let int = scaled.round().to_integer().expect("finite value");
    format!("{:0>width$}", int.to_string(), width = d)
}

/// Magnitude comparison to every published digit; the sign is reported,
/// not compared.
pub fn compare(label: String, v: &Float, published: &'static str) -> Comparison {
    let want = fixture_digits(published);
    let got = rounded_digits(v, want.len());
    let sign = if v.is_sign_negative() { "-" } else { "" };
    Comparison { label, published, computed: format!("{sign}0.{got}"), matches: got == want }
}

pub fn run(which: Which, ctx: &PrecisionContext) -> Result<(Vec<RunRecord>, Vec<Comparison>), Failure> {
    match which {
        Which::Table1 => {
            let echo = Echo {
                n: [1, 2, 1],
                zeta: ["1.6".into(), "1.4".into(), "1.2".into()],
                r: "1.4".into(),
                conformation: "linear",
            };
            let rows = scan(&echo, 1, 30, ctx)?;
            let cmp =
                rows.iter().zip(TABLE1).map(|((rec, v), want)| compare(format!("N={}", rec.terms), v, want)).collect();
            Ok((rows.into_iter().map(|r| r.0).collect(), cmp))
        }
        Which::Table2 => {
            let done: Vec<Result<(RunRecord, Comparison), Failure>> = TABLE2
                .par_iter()
                .map(|row| {
                    let t = std::time::Instant::now();
                    let p = SlaterParams::parse((row.n[0], row.n[1], row.n[2]), row.zeta, row.r, ctx)
                        .map_err(Failure::from_core)?;
                    let v = overlap_3c(&p, TruncationPolicy::FixedN(row.terms), ctx).map_err(Failure::from_core)?;
                    let echo =
                        Echo { n: row.n, zeta: row.zeta.map(String::from), r: row.r.into(), conformation: "linear" };
                    let rec = RunRecord::new(&echo, "analytic", ctx.decimal_digits(), &v, t.elapsed().as_secs_f64());
                    let label = format!("{:?} {:?} R={} N={}", row.n, row.zeta, row.r, row.terms);
                    Ok((rec, compare(label, &v.value, row.value)))
                })
                .collect();
            let mut recs = Vec::new();
            let mut cmp = Vec::new();
            for d in done {
                let (r, c) = d?;
                recs.push(r);
                cmp.push(c);
            }
            Ok((recs, cmp))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_ignores_sign_and_spacing() {
        let v = Float::with_val(100, Float::parse("0.1141649").unwrap());
        assert!(compare("x".into(), &v, "-0.11416").matches);
        let v = Float::with_val(100, Float::parse("-0.1141651").unwrap());
        let c = compare("x".into(), &v, "-0.11416 5");
        assert!(c.matches);
        assert_eq!(c.computed, "-0.114165");
        assert!(!compare("x".into(), &v, "0.11415").matches);
    }
}
