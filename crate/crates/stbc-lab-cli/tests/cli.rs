//! End-to-end checks of the command-line binary: exit codes, artifact
//! formats, and agreement between CLI output and direct library calls.

use std::path::Path;
use std::process::{Command, Output};

use stbc_lab::design::LinearDesign;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stbc-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn unknown_verb_is_a_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_design_source_is_a_usage_error() {
    let out = run(&["verify"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unreadable_design_file_is_a_runtime_error() {
    let out = run(&["verify", "--design", "/nonexistent/design.json"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn construct_emits_the_shared_design_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ciod4.json");
    let out = run(&["construct", "--name", "ciod4", "-o", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    // The embedded `meta` object must not break readers of the format.
    let design = LinearDesign::from_json_str(&text).unwrap();
    assert_eq!((design.l(), design.n(), design.k()), (4, 4, 4));
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["meta"]["tool"], "stbc-lab");
    assert!(value["meta"]["command"]
        .as_str()
        .unwrap()
        .starts_with("stbc-lab construct"));
}

#[test]
fn construct_composes_interleaved_designs_by_antenna_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("composed.json");
    let out = run(&[
        "construct",
        "--n1",
        "2",
        "--n2",
        "4",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let design = LinearDesign::from_json_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((design.l(), design.n(), design.k()), (14, 6, 12));
    assert_eq!(design.rate().to_string(), "6/7");
}

#[test]
fn construct_can_delete_antenna_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dropped.json");
    let out = run(&[
        "construct",
        "--name",
        "ciod8",
        "--drop-cols",
        "7",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let design = LinearDesign::from_json_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((design.l(), design.n(), design.k()), (8, 7, 6));
}

#[test]
fn verify_gates_exit_status_on_the_required_property() {
    let ok = run(&[
        "verify",
        "--name",
        "ciod4",
        "--theta",
        "13.2825",
        "--require",
        "fsdd",
    ]);
    assert_eq!(exit_code(&ok), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&ok)).unwrap();
    assert_eq!(report["report"]["holds"], true);

    let bad = run(&["verify", "--name", "ciod4", "--require", "ufsdd"]);
    assert_eq!(exit_code(&bad), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&bad)).unwrap();
    assert_eq!(report["report"]["holds"], false);

    let typo = run(&["verify", "--name", "ciod4", "--require", "nonsense"]);
    assert_eq!(exit_code(&typo), 2);
}

#[test]
fn verify_reads_designs_written_by_construct() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alamouti.json");
    let out = run(&[
        "construct",
        "--name",
        "alamouti",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let out = run(&[
        "verify",
        "--design",
        path.to_str().unwrap(),
        "--require",
        "ufsdd",
    ]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn rotate_reports_the_closed_form_lattice_optimum() {
    let out = run(&["rotate"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_str(&out);
    let row = text.lines().last().unwrap();
    let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
    assert!((fields[0] - 31.7175).abs() < 1e-3, "theta {}", fields[0]);
    assert!(
        (fields[2] - 0.447_213_6).abs() < 1e-6,
        "normalized {}",
        fields[2]
    );
    // Unit-energy 4-QAM has spacing d = 1/sqrt(2), so the absolute
    // distance is twice the normalized one.
    assert!((fields[3] - 2.0 * fields[2]).abs() < 1e-12);
    let out = run(&["rotate", "--kind", "psk"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn rotate_gcpd_needs_block_sizes() {
    let out = run(&["rotate", "--objective", "gcpd"]);
    assert_eq!(exit_code(&out), 2);
    let out = run(&["rotate", "--objective", "gcpd", "--n1", "3", "--n2", "2"]);
    assert_eq!(exit_code(&out), 0);
    let row = stdout_str(&out).lines().last().unwrap().to_string();
    let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
    assert!((fields[1] - 0.5751).abs() < 6e-3, "x0 {}", fields[1]);
    assert!((fields[2] - 0.3869).abs() < 5e-3, "value {}", fields[2]);
}

#[test]
fn ber_csv_has_the_documented_shape() {
    let out = run(&[
        "ber",
        "--name",
        "alamouti",
        "--snr",
        "0:5:5",
        "--min-errors",
        "100",
        "--min-frames",
        "200",
        "--seed",
        "3",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# stbc-lab "));
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# command: stbc-lab ber --name alamouti"));
    assert_eq!(lines.next().unwrap(), "# seed: 3");
    let header = lines.find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "snr_db,ber,bit_errors,bits");
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 4);
        // 17 significant digits in scientific notation for the float columns.
        assert!(fields[0].contains('e'));
        assert!(fields[1].contains('e'));
        let mantissa = fields[1].split('e').next().unwrap();
        let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 17);
        let errors: u64 = fields[2].parse().unwrap();
        let bits: u64 = fields[3].parse().unwrap();
        assert!(errors >= 100);
        assert!(bits > errors);
        let ber: f64 = fields[1].parse().unwrap();
        assert!((ber - errors as f64 / bits as f64).abs() < 1e-15);
    }
}

#[test]
fn ber_runs_are_reproducible_byte_for_byte() {
    let args = [
        "ber",
        "--name",
        "ciod2",
        "--theta",
        "13.2825",
        "--snr",
        "4",
        "--min-errors",
        "150",
        "--min-frames",
        "500",
        "--seed",
        "11",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn ber_rejects_an_undecodable_design_for_the_single_symbol_decoder() {
    // cod34_4 spans 3 symbols over 4 slots; the rapid extension is not
    // single-symbol decodable, and the decoder must refuse rather than
    // silently produce a wrong curve.
    let out = run(&[
        "ber",
        "--name",
        "alamouti",
        "--channel",
        "rapid",
        "--snr",
        "10",
        "--min-errors",
        "100",
        "--min-frames",
        "100",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn mmi_csv_matches_direct_library_evaluation() {
    let out = run(&[
        "mmi", "--scheme", "glcod", "--n", "4", "--k", "3", "--l", "4", "--snr", "6",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_str(&out);
    let row = text.lines().last().unwrap();
    let bits: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    let rho = 10f64.powf(0.6);
    let direct = stbc_lab::mmi::mmi_glcod(4, 1, 3, 4, rho).unwrap();
    assert_eq!(bits, direct);

    let out = run(&["mmi", "--scheme", "nonsense", "--snr", "6"]);
    assert_eq!(exit_code(&out), 2);
    let out = run(&["mmi", "--scheme", "glcod", "--n", "4", "--snr", "6"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn mmi_channel_scheme_reports_standard_errors() {
    let out = run(&[
        "mmi",
        "--scheme",
        "channel",
        "--n",
        "2",
        "--rx",
        "2",
        "--snr",
        "0:10:10",
        "--samples",
        "5000",
        "--seed",
        "9",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_str(&out);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "snr_db,bits,stderr");
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 2);
    let low: Vec<f64> = rows[0].split(',').map(|f| f.parse().unwrap()).collect();
    let high: Vec<f64> = rows[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert!(high[1] > low[1]);
    assert!(low[2] > 0.0 && high[2] > 0.0);
}

#[test]
fn rapid_report_flags_non_decodable_designs() {
    let out = run(&["rapid", "--name", "alamouti", "--theta", "13.2825"]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let report = &value["report"];
    assert_eq!(report["sd"]["ok"], false);
    assert_eq!(report["sd"]["violations"][0]["k"], 0);
    assert_eq!(report["sd"]["violations"][0]["l"], 2);
    assert_eq!(report["max_rate_at_this_length"], "1");

    let out = run(&["rapid", "--name", "ciod2", "--theta", "13.2825"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["report"]["sd"]["ok"], true);
    assert_eq!(value["report"]["full_diversity"], true);

    let out = run(&["rapid", "--name", "ciod2"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["report"]["sd"]["ok"], true);
    assert_eq!(value["report"]["full_diversity"], false);
}

#[test]
fn thread_cap_env_var_is_tolerated_and_output_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |path: &Path| {
        vec![
            "ber".to_string(),
            "--name".into(),
            "alamouti".into(),
            "--snr".into(),
            "2:2:6".into(),
            "--min-errors".into(),
            "120".into(),
            "--min-frames".into(),
            "300".into(),
            "--seed".into(),
            "5".into(),
            "-o".into(),
            path.to_str().unwrap().to_string(),
        ]
    };
    let one = bin()
        .args(args(&a))
        .env("STBC_LAB_THREADS", "1")
        .output()
        .unwrap();
    let four = bin()
        .args(args(&b))
        .env("STBC_LAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(exit_code(&one), 0);
    assert_eq!(exit_code(&four), 0);
    let text_a = std::fs::read_to_string(&a).unwrap();
    let text_b = std::fs::read_to_string(&b).unwrap();
    assert_eq!(text_a, text_b);

    let warned = bin()
        .args(["rapid", "--name", "ciod2"])
        .env("STBC_LAB_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(exit_code(&warned), 0);
    assert!(String::from_utf8_lossy(&warned.stderr).contains("warning"));
}

#[test]
fn codinggain_report_matches_library_values() {
    let out = run(&[
        "codinggain",
        "--name",
        "alamouti",
        "--mode",
        "exhaustive",
        "--scale",
        "1.0",
    ]);
    assert_eq!(exit_code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let report = &value["report"];
    assert_eq!(report["full_diversity"], true);
    let gain = report["coding_gain"].as_f64().unwrap();
    assert!((gain - 2.0).abs() < 1e-9, "gain {gain}");
    assert_eq!(report["pairs_checked"], 120);
}
