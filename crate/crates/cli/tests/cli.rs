use std::process::{Command, Output};

fn sto3c(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sto3c")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// CSV rows as header-keyed maps.
fn rows(o: &Output) -> Vec<Vec<(String, String)>> {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records().map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect()).collect()
}

fn field<'a>(row: &'a [(String, String)], key: &str) -> &'a str {
    &row.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no column {key}")).1
}

const TABLE_ONE: [&str; 6] = ["--n", "1,2,1", "--zeta", "1.6,1.4,1.2", "--R", "1.4"];

#[test]
fn overlap_row_is_rerunnable_from_its_echo() {
    let o = sto3c(&[&["compute", "overlap", "--digits", "30"][..], &TABLE_ONE].concat());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = rows(&o);
    assert_eq!(r.len(), 1);
    let row = &r[0];
    assert!(field(row, "value").starts_with("0.18245052872528704358"));
    assert_eq!(field(row, "sign_analytic"), "1");
    assert_eq!(field(row, "converged"), "true");

    let n = format!("{},{},{}", field(row, "n_a"), field(row, "n_b"), field(row, "n_c"));
    let z = format!("{},{},{}", field(row, "zeta_a"), field(row, "zeta_b"), field(row, "zeta_c"));
    let again = sto3c(&[
        "compute",
        "overlap",
        "--n",
        &n,
        "--zeta",
        &z,
        "--R",
        field(row, "R"),
        "--N",
        field(row, "N"),
        "--digits",
        field(row, "digits"),
    ]);
    assert_eq!(field(&rows(&again)[0], "value"), field(row, "value"));
}

#[test]
fn csv_and_json_carry_the_same_content() {
    let args = [&["compute", "overlap", "--digits", "25", "--N", "12"][..], &TABLE_ONE].concat();
    let csv = sto3c(&[&args[..], &["--format", "csv"]].concat());
    let json = sto3c(&[&args[..], &["--format", "json"]].concat());
    let parsed: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let objects = parsed.as_array().unwrap();
    let table = rows(&csv);
    assert_eq!(objects.len(), table.len());
    for (obj, row) in objects.iter().zip(&table) {
        let obj = obj.as_object().unwrap();
        let keys: Vec<&String> = obj.keys().collect();
        let cols: Vec<&String> = row.iter().map(|(k, _)| k).collect();
        assert_eq!(keys, cols);
        for (k, v) in row {
            if k == "elapsed_s" {
                continue;
            }
            let j = match &obj[k] {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Null => String::new(),
                other => other.to_string(),
            };
            assert_eq!(&j, v, "column {k}");
        }
    }
}

#[test]
fn unconverged_fixed_order_exits_one_and_hides_uncertified_digits() {
    let o = sto3c(&[&["compute", "overlap", "--digits", "30", "--N", "8"][..], &TABLE_ONE].concat());
    assert_eq!(o.status.code(), Some(1));
    let r = rows(&o);
    assert_eq!(field(&r[0], "converged"), "false");
    // The N = 8 partial sum is good to a handful of digits only.
    let shown = field(&r[0], "value").trim_start_matches("0.").len();
    assert!((1..8).contains(&shown), "{}", field(&r[0], "value"));
}

#[test]
fn sets_come_out_in_input_order() {
    let o = sto3c(&[
        "compute",
        "overlap",
        "--digits",
        "20",
        "--n",
        "1,1,1",
        "--zeta",
        "1.3,1.3,1.1",
        "--R",
        "3.0",
        "--R",
        "1.0",
        "--R",
        "2.0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Vec<String> = rows(&o).iter().map(|row| field(row, "R").to_string()).collect();
    assert_eq!(r, ["3.0", "1.0", "2.0"]);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["compute", "overlap", "--n", "1,1", "--zeta", "1,1,1", "--R", "1"][..],
        &["compute", "overlap", "--n", "1,1,1", "--zeta", "1,1,1", "--R", "1", "--digits", "10"],
        &["compute", "overlap", "--n", "1,1,1", "--zeta", "1,1,1", "--R", "-1"],
        &["compute", "overlap", "--n", "1,1,1", "--zeta", "1,1,1", "--R", "1", "--N", "5", "--tol", "1e-10"],
        &["compute", "overlap", "--n", "1,1,1", "--zeta", "1,1,1", "--R", "1", "--center", "a"],
        &["compute", "eri", "--n", "1,1,1", "--zeta", "1,1,1", "--R", "1"],
        &["compute", "nucattr", "--center", "a", "--n", "1,1,1", "--zeta", "1,1,1", "--R", "1"],
        &["tables", "table3"],
    ] {
        let o = sto3c(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn degenerate_overlap_names_the_quadrature_fallback() {
    let o = sto3c(&["compute", "overlap", "--n", "0,1,1", "--zeta", "0,1.0,1.0", "--R", "2", "--digits", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--backend quadrature"), "{}", stderr(&o));
}

#[test]
fn nuclear_attraction_echo_fills_the_center_slot() {
    let run = |n: &str, z: &str| {
        sto3c(&[
            "compute",
            "nucattr",
            "--center",
            "b",
            "--n",
            n,
            "--zeta",
            z,
            "--R",
            "1.7",
            "--digits",
            "20",
            "--quad-digits",
            "14",
        ])
    };
    let o = run("1,1", "1.0,1.3");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row = &rows(&o)[0];
    assert_eq!((field(row, "n_b"), field(row, "zeta_b"), field(row, "conformation")), ("0", "0", "center-b"));
    let again = run("1,0,1", "1.0,0,1.3");
    assert_eq!(field(&rows(&again)[0], "value"), field(row, "value"));
    assert!(field(row, "value").starts_with("1.182255244878"));
}

#[test]
fn eri_on_the_midpoint() {
    let o = sto3c(&[
        "compute",
        "eri",
        "--center",
        "a",
        "--n",
        "1,1,1",
        "--zeta",
        "2.0,1.0,1.0",
        "--R",
        "2.0",
        "--digits",
        "24",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row = &rows(&o)[0];
    assert!(field(row, "value").starts_with("3.31458875733491233507"), "{}", field(row, "value"));
    assert_eq!(field(row, "conformation"), "center-a");
}

#[test]
fn tables_report_each_mismatch() {
    let o = sto3c(&["tables", "table2", "--digits", "30"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(rows(&o).len(), 5);
    let err = stderr(&o);
    assert_eq!(err.matches("MISMATCH").count(), 5);
    assert!(err.contains("published -0.41057 77481 70340 63986"));
    assert!(err.contains("0/5 rows match"));

    let o = sto3c(&["tables", "table1", "--format", "json"]);
    let parsed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let n: Vec<u64> = parsed.as_array().unwrap().iter().map(|r| r["N"].as_u64().unwrap()).collect();
    assert_eq!(n, (1..=30).collect::<Vec<_>>());
}

#[test]
fn scan_writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = sto3c(
        &[&["scan", "--from", "19", "--to", "21", "--digits", "30", "--out", path.to_str().unwrap()][..], &TABLE_ONE]
            .concat(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let n: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(9).unwrap()).collect();
    assert_eq!(n, ["19", "20", "21"]);
}

#[test]
fn validate_aux_passes() {
    let o = sto3c(&["validate", "aux"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("PASS").count(), 5);
    assert!(out.ends_with("5/5 checks passed\n"));
}
