//! Command-line front end for the space-time block code toolkit.
//!
//! Seven verbs cover the workflow: `construct` emits design files,
//! `verify` classifies a design, `rotate` reports optimal constellation
//! rotations, `codinggain` sweeps codeword pairs, `ber` runs the link
//! simulation, `mmi` evaluates mutual-information formulas, and `rapid`
//! analyzes per-slot fading decodability. Curves are CSV, structured
//! reports are JSON, and every artifact embeds the tool version and the
//! full resolved command so it can be reproduced bit-exactly.
//!
//! Exit codes: 0 on success (and when a `verify` property holds), 1 on
//! runtime errors or failed properties, 2 on usage errors. The environment
//! variable `STBC_LAB_THREADS` caps internal parallelism.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use stbc_lab::constellation::{make_signal_set, SetKind, SignalSet};
use stbc_lab::construct::{catalog, catalog_names, compose_for_antennas, delete_columns};
use stbc_lab::design::{classify, is_glcod, LinearDesign};
use stbc_lab::gain::{coding_gain, verify_full_diversity, GainMode};
use stbc_lab::mmi::{capacity_mimo_mc, mmi_gciod, mmi_glcod};
use stbc_lab::sim::{
    check_rapid_full_diversity, check_rapid_sd, extend, max_rapid_rate, simulate_ber, ChannelKind,
    ChannelModel, DecoderKind, SimConfig,
};
use stbc_lab::DEFAULT_TOL;

const TOOL: &str = "stbc-lab";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = TOOL, version, about = "Single-symbol decodable space-time block code toolkit")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Build a design and write it in the shared JSON design format
    Construct(ConstructArgs),
    /// Classify a design and optionally gate on one property
    Verify(VerifyArgs),
    /// Report the rotation maximizing a coordinate product distance
    Rotate(RotateArgs),
    /// Enumerate codeword pairs for diversity and coding gain
    Codinggain(GainArgs),
    /// Monte Carlo bit error rate over Rayleigh fading
    Ber(BerArgs),
    /// Maximum mutual information formulas and channel capacity
    Mmi(MmiArgs),
    /// Per-slot fading decodability and diversity analysis
    Rapid(RapidArgs),
}

/// Where a design comes from: a built-in catalog name or a JSON file.
#[derive(Args, Clone)]
struct DesignSource {
    /// Catalog design name
    #[arg(long, conflicts_with = "design")]
    name: Option<String>,
    /// Path to a design JSON file
    #[arg(long)]
    design: Option<PathBuf>,
}

impl DesignSource {
    fn load(&self) -> Result<(LinearDesign, (&'static str, String)), Outcome> {
        match (&self.name, &self.design) {
            (Some(n), None) => {
                let d = catalog(n).map_err(fail)?;
                Ok((d, ("name", n.clone())))
            }
            (None, Some(p)) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| fail(format!("cannot read {}: {e}", p.display())))?;
                let d = LinearDesign::from_json_str(&text).map_err(fail)?;
                Ok((d, ("design", p.display().to_string())))
            }
            _ => Err(usage(format!(
                "exactly one of --name or --design is required; catalog: {}",
                catalog_names().join(", ")
            ))),
        }
    }
}

/// Constellation flags shared by the verbs that need a signal set.
#[derive(Args, Clone)]
struct SetArgs {
    /// Constellation family: qam or psk (unit average energy)
    #[arg(long, default_value = "qam")]
    kind: String,
    /// Constellation size
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Rotation angle in degrees
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

impl SetArgs {
    fn build(&self) -> Result<SignalSet, Outcome> {
        let kind: SetKind = self.kind.parse().map_err(fail)?;
        Ok(make_signal_set(kind, self.m, true)
            .map_err(fail)?
            .rotated(self.theta))
    }

    fn echo(&self, opts: &mut Vec<(&'static str, String)>) {
        opts.push(("kind", self.kind.clone()));
        opts.push(("m", self.m.to_string()));
        opts.push(("theta", self.theta.to_string()));
    }
}

#[derive(Args)]
struct ConstructArgs {
    /// Catalog design name
    #[arg(long, conflicts_with_all = ["n1", "n2"])]
    name: Option<String>,
    /// Antennas of the first component of an interleaved composition
    #[arg(long, requires = "n2")]
    n1: Option<usize>,
    /// Antennas of the second component of an interleaved composition
    #[arg(long, requires = "n1")]
    n2: Option<usize>,
    /// Comma-separated antenna columns to delete from the result
    #[arg(long = "drop-cols")]
    drop_cols: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: DesignSource,
    #[command(flatten)]
    set: SetArgs,
    /// Property to gate on: sd-general, iq-orthogonal, sd-strict, fsdd,
    /// ufsdd, rfsdd, glcod, or full-diversity
    #[arg(long)]
    require: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RotateArgs {
    /// Constellation family (the lattice convention is qam)
    #[arg(long, default_value = "qam")]
    kind: String,
    /// Constellation size
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Distance to maximize: cpd or gcpd
    #[arg(long, default_value = "cpd")]
    objective: String,
    /// First block size for the gcpd objective
    #[arg(long)]
    n1: Option<usize>,
    /// Second block size for the gcpd objective
    #[arg(long)]
    n2: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GainArgs {
    #[command(flatten)]
    source: DesignSource,
    #[command(flatten)]
    set: SetArgs,
    /// Amplitude applied to every codeword before differencing
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Pair enumeration: exhaustive or single-symbol
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BerArgs {
    #[command(flatten)]
    source: DesignSource,
    #[command(flatten)]
    set: SetArgs,
    /// Fading model: quasistatic or rapid
    #[arg(long, default_value = "quasistatic")]
    channel: String,
    /// Receive antennas
    #[arg(long, default_value_t = 1)]
    rx: usize,
    /// SNR grid in dB: a single value or inclusive a:step:b
    #[arg(long)]
    snr: String,
    /// Bit errors required per point
    #[arg(long = "min-errors", default_value_t = 200)]
    min_errors: u64,
    /// Frames required per point
    #[arg(long = "min-frames", default_value_t = 1000)]
    min_frames: u64,
    /// Hard cap on frames per point
    #[arg(long = "max-frames", default_value_t = SimConfig::DEFAULT_MAX_FRAMES)]
    max_frames: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Decoder: sd (single-symbol) or jointml
    #[arg(long, default_value = "sd")]
    decoder: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MmiArgs {
    /// What to evaluate: channel (Monte Carlo capacity), glcod, or gciod
    #[arg(long)]
    scheme: String,
    /// Transmit antennas (channel and glcod schemes)
    #[arg(long)]
    n: Option<usize>,
    /// Receive antennas
    #[arg(long, default_value_t = 1)]
    rx: usize,
    /// Symbols per block (glcod and gciod schemes)
    #[arg(long)]
    k: Option<usize>,
    /// Block length (glcod scheme)
    #[arg(long)]
    l: Option<usize>,
    /// First sub-block antennas (gciod scheme)
    #[arg(long)]
    n1: Option<usize>,
    /// Second sub-block antennas (gciod scheme)
    #[arg(long)]
    n2: Option<usize>,
    /// First sub-block length (gciod scheme)
    #[arg(long)]
    l1: Option<usize>,
    /// Second sub-block length (gciod scheme)
    #[arg(long)]
    l2: Option<usize>,
    /// SNR grid in dB: a single value or inclusive a:step:b
    #[arg(long)]
    snr: String,
    /// Monte Carlo samples (channel scheme)
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RapidArgs {
    #[command(flatten)]
    source: DesignSource,
    #[command(flatten)]
    set: SetArgs,
    /// Diversity order to certify (default: the antenna count)
    #[arg(long)]
    r: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Exit disposition of a handler that did not produce a runtime error.
enum Outcome {
    Exit(u8),
    Error(String),
}

fn usage(msg: impl Into<String>) -> Outcome {
    eprintln!("usage error: {}", msg.into());
    Outcome::Exit(2)
}

fn fail(err: impl ToString) -> Outcome {
    Outcome::Error(err.to_string())
}

type Handled = Result<u8, Outcome>;

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.verb {
        Verb::Construct(a) => cmd_construct(a),
        Verb::Verify(a) => cmd_verify(a),
        Verb::Rotate(a) => cmd_rotate(a),
        Verb::Codinggain(a) => cmd_codinggain(a),
        Verb::Ber(a) => cmd_ber(a),
        Verb::Mmi(a) => cmd_mmi(a),
        Verb::Rapid(a) => cmd_rapid(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Outcome::Exit(code)) => ExitCode::from(code),
        Err(Outcome::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("STBC_LAB_THREADS") {
        match raw.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid STBC_LAB_THREADS value '{raw}'"),
        }
    }
}

// ---------------------------------------------------------------------------
// Artifact plumbing
// ---------------------------------------------------------------------------

/// 17-significant-digit fixed scientific formatting for CSV numerics.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn shell_quote(v: &str) -> String {
    if v.chars().any(|c| c.is_whitespace()) {
        format!("'{v}'")
    } else {
        v.to_string()
    }
}

/// Canonical reproduction command from the resolved options.
fn command_line(verb: &str, opts: &[(&'static str, String)]) -> String {
    let mut s = format!("{TOOL} {verb}");
    for (k, v) in opts {
        s.push_str(&format!(" --{k} {}", shell_quote(v)));
    }
    s
}

fn write_artifact(output: &Option<PathBuf>, content: &str) -> Handled {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| fail(format!("cannot write {}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            // A closed pipe downstream (e.g. `| head`) is not an error.
            if let Err(e) = std::io::stdout().write_all(content.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(fail(format!("cannot write to stdout: {e}")));
                }
            }
        }
    }
    Ok(0)
}

fn csv_artifact(
    verb: &str,
    opts: &[(&'static str, String)],
    extra_header_lines: &[String],
    columns: &str,
    rows: &[String],
) -> String {
    let mut out = format!(
        "# {TOOL} {VERSION}\n# command: {}\n",
        command_line(verb, opts)
    );
    for line in extra_header_lines {
        out.push_str(&format!("# {line}\n"));
    }
    out.push_str(columns);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonArtifact<T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: String,
    options: BTreeMap<String, String>,
    report: T,
}

fn json_artifact<T: Serialize>(verb: &str, opts: &[(&'static str, String)], report: T) -> String {
    let artifact = JsonArtifact {
        tool: TOOL,
        version: VERSION,
        command: command_line(verb, opts),
        options: opts
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        report,
    };
    let mut text = serde_json::to_string_pretty(&artifact).expect("serializable report");
    text.push('\n');
    text
}

/// Inclusive arithmetic SNR grid: "a:step:b" or a single value.
fn parse_snr_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<f64, String> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("malformed SNR value '{s}'"))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [a, step, b] => {
            let (a, step, b) = (parse(a)?, parse(step)?, parse(b)?);
            if step <= 0.0 {
                return Err(format!("SNR step must be positive, got {step}"));
            }
            if b < a {
                return Err(format!("SNR grid end {b} is below start {a}"));
            }
            let mut grid = Vec::new();
            let mut i = 0u64;
            loop {
                let x = a + i as f64 * step;
                if x > b + step * 1e-9 {
                    break;
                }
                grid.push(x);
                i += 1;
            }
            Ok(grid)
        }
        _ => Err(format!("SNR grid '{spec}' is not 'value' or 'a:step:b'")),
    }
}

fn parse_index_list(spec: &str) -> Result<Vec<usize>, String> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("malformed column index '{s}'"))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Verb handlers
// ---------------------------------------------------------------------------

fn cmd_construct(args: ConstructArgs) -> Handled {
    let mut opts: Vec<(&'static str, String)> = Vec::new();
    let design = if let Some(name) = &args.name {
        opts.push(("name", name.clone()));
        catalog(name).map_err(fail)?
    } else if let (Some(n1), Some(n2)) = (args.n1, args.n2) {
        opts.push(("n1", n1.to_string()));
        opts.push(("n2", n2.to_string()));
        compose_for_antennas(n1, n2).map_err(fail)?.0
    } else {
        return Err(usage(format!(
            "construct needs --name or --n1/--n2; catalog: {}",
            catalog_names().join(", ")
        )));
    };
    let design = match &args.drop_cols {
        Some(spec) => {
            let cols = parse_index_list(spec).map_err(usage)?;
            opts.push(("drop-cols", spec.clone()));
            delete_columns(&design, &cols).map_err(fail)?
        }
        None => design,
    };
    // The artifact is the shared design format plus a `meta` object that
    // readers of the format ignore.
    let mut value: serde_json::Value =
        serde_json::from_str(&design.to_json_string()).expect("design serializes");
    let meta = serde_json::json!({
        "tool": TOOL,
        "version": VERSION,
        "command": command_line("construct", &opts),
        "options": opts.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
    });
    value
        .as_object_mut()
        .expect("design is an object")
        .insert("meta".into(), meta);
    let mut text = serde_json::to_string_pretty(&value).expect("serializable design");
    text.push('\n');
    write_artifact(&args.output, &text)
}

#[derive(Serialize)]
struct VerifyReport {
    design: String,
    l: usize,
    n: usize,
    k: usize,
    rate: String,
    class: stbc_lab::design::DesignClass,
    glcod: bool,
    set: String,
    required: Option<String>,
    holds: Option<bool>,
}

fn cmd_verify(args: VerifyArgs) -> Handled {
    let (design, source_echo) = args.source.load()?;
    let set = args.set.build()?;
    let mut opts = vec![source_echo];
    args.set.echo(&mut opts);
    if let Some(req) = &args.require {
        opts.push(("require", req.clone()));
    }
    let class = classify(&design, Some(&set), DEFAULT_TOL);
    let glcod = is_glcod(&design, DEFAULT_TOL);
    let holds = match args.require.as_deref() {
        None => None,
        Some("sd-general") => Some(class.is_sd_general),
        Some("iq-orthogonal") => Some(class.is_iq_orthogonal),
        Some("sd-strict") => Some(class.is_sd_strict),
        Some("fsdd") => Some(class.fsdd()),
        Some("ufsdd") => Some(class.ufsdd),
        Some("rfsdd") => Some(class.rfsdd_with_set.unwrap_or(false)),
        Some("glcod") => Some(glcod),
        Some("full-diversity") => Some(verify_full_diversity(&design, &set).map_err(fail)?),
        Some(other) => {
            return Err(usage(format!(
                "unknown property '{other}'; expected sd-general, iq-orthogonal, sd-strict, \
                 fsdd, ufsdd, rfsdd, glcod, or full-diversity"
            )))
        }
    };
    let report = VerifyReport {
        design: design.name().to_string(),
        l: design.l(),
        n: design.n(),
        k: design.k(),
        rate: design.rate().to_string(),
        class,
        glcod,
        set: set.label().to_string(),
        required: args.require.clone(),
        holds,
    };
    let text = json_artifact("verify", &opts, report);
    write_artifact(&args.output, &text)?;
    Ok(if holds == Some(false) { 1 } else { 0 })
}

fn cmd_rotate(args: RotateArgs) -> Handled {
    if args.kind != "qam" {
        return Err(usage(
            "rotate uses the square-lattice convention; pass --kind qam",
        ));
    }
    let base = make_signal_set(SetKind::Qam, args.m, true).map_err(fail)?;
    let spacing_sq = 4.0 * base.d().expect("QAM sets expose their spacing").powi(2);
    let mut opts: Vec<(&'static str, String)> = vec![
        ("kind", args.kind.clone()),
        ("m", args.m.to_string()),
        ("objective", args.objective.clone()),
    ];
    let (theta, normalized) = match args.objective.as_str() {
        "cpd" => {
            if args.m == 4 {
                stbc_lab::constellation::optimal_rotation_cpd()
            } else {
                let (theta, absolute) = grid_argmax(&base, |s| s.cpd().map_err(fail))?;
                (theta, absolute / spacing_sq)
            }
        }
        "gcpd" => {
            let (n1, n2) = match (args.n1, args.n2) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(usage("the gcpd objective needs --n1 and --n2")),
            };
            opts.push(("n1", n1.to_string()));
            opts.push(("n2", n2.to_string()));
            if args.m == 4 {
                let (_, theta, value) =
                    stbc_lab::constellation::optimal_rotation_gcpd_qpsk(n1, n2).map_err(fail)?;
                (theta, value)
            } else {
                let (theta, absolute) = grid_argmax(&base, |s| s.gcpd(n1, n2).map_err(fail))?;
                (theta, absolute / spacing_sq)
            }
        }
        other => {
            return Err(usage(format!(
                "unknown objective '{other}', expected cpd or gcpd"
            )))
        }
    };
    let row = format!(
        "{},{},{},{}",
        num(theta),
        num(theta.to_radians().tan()),
        num(normalized),
        num(normalized * spacing_sq)
    );
    let text = csv_artifact(
        "rotate",
        &opts,
        &["distances are per squared lattice spacing (normalized) and for the unit-energy set (absolute)".into()],
        "theta_deg,x0,normalized,absolute",
        &[row],
    );
    write_artifact(&args.output, &text)
}

/// 0.01-degree grid search over [0, 45) used when no closed form applies.
fn grid_argmax(
    base: &SignalSet,
    mut eval: impl FnMut(&SignalSet) -> Result<f64, Outcome>,
) -> Result<(f64, f64), Outcome> {
    let mut best = (0.0f64, f64::NEG_INFINITY);
    for i in 0..4500u32 {
        let theta = i as f64 * 0.01;
        let value = eval(&base.rotated(theta))?;
        if value > best.1 {
            best = (theta, value);
        }
    }
    Ok(best)
}

fn cmd_codinggain(args: GainArgs) -> Handled {
    let (design, source_echo) = args.source.load()?;
    let set = args.set.build()?;
    let mode: GainMode = args.mode.parse().map_err(fail)?;
    let mut opts = vec![source_echo];
    args.set.echo(&mut opts);
    opts.push(("scale", args.scale.to_string()));
    opts.push(("mode", args.mode.clone()));
    let report = coding_gain(&design, &set, mode, args.scale).map_err(fail)?;
    let text = json_artifact("codinggain", &opts, report);
    write_artifact(&args.output, &text)
}

fn cmd_ber(args: BerArgs) -> Handled {
    let (design, source_echo) = args.source.load()?;
    let set = args.set.build()?;
    let channel_kind: ChannelKind = args.channel.parse().map_err(fail)?;
    let decoder: DecoderKind = args.decoder.parse().map_err(fail)?;
    let snr_grid_db = parse_snr_grid(&args.snr).map_err(usage)?;
    let mut opts = vec![source_echo];
    args.set.echo(&mut opts);
    opts.push(("channel", args.channel.clone()));
    opts.push(("rx", args.rx.to_string()));
    opts.push(("snr", args.snr.clone()));
    opts.push(("min-errors", args.min_errors.to_string()));
    opts.push(("min-frames", args.min_frames.to_string()));
    opts.push(("max-frames", args.max_frames.to_string()));
    opts.push(("seed", args.seed.to_string()));
    opts.push(("decoder", args.decoder.clone()));
    let model = ChannelModel {
        kind: channel_kind,
        n: design.n(),
        m: args.rx,
        l: design.l(),
    };
    let config = SimConfig {
        snr_grid_db,
        min_frames: args.min_frames,
        min_bit_errors: args.min_errors,
        seed: args.seed,
        decoder,
        max_frames: args.max_frames,
    };
    let curve = simulate_ber(&design, &set, &model, &config).map_err(fail)?;
    let rows: Vec<String> = curve
        .points
        .iter()
        .map(|p| {
            format!(
                "{},{},{},{}",
                num(p.snr_db),
                num(p.ber),
                p.bit_errors,
                p.bits
            )
        })
        .collect();
    let text = csv_artifact(
        "ber",
        &opts,
        &[
            format!("seed: {}", args.seed),
            "snr is per receive antenna against unit-variance noise".into(),
        ],
        "snr_db,ber,bit_errors,bits",
        &rows,
    );
    write_artifact(&args.output, &text)
}

fn cmd_mmi(args: MmiArgs) -> Handled {
    let snr_grid_db = parse_snr_grid(&args.snr).map_err(usage)?;
    let need = |v: Option<usize>, flag: &str| -> Result<usize, Outcome> {
        v.ok_or_else(|| usage(format!("scheme '{}' needs --{flag}", args.scheme)))
    };
    let mut opts: Vec<(&'static str, String)> = vec![("scheme", args.scheme.clone())];
    match args.scheme.as_str() {
        "channel" => {
            let n = need(args.n, "n")?;
            opts.push(("n", n.to_string()));
            opts.push(("rx", args.rx.to_string()));
            opts.push(("snr", args.snr.clone()));
            opts.push(("samples", args.samples.to_string()));
            opts.push(("seed", args.seed.to_string()));
            let mut rows = Vec::new();
            for &snr_db in &snr_grid_db {
                let rho = 10f64.powf(snr_db / 10.0);
                let (bits, stderr) =
                    capacity_mimo_mc(n, args.rx, rho, args.samples, args.seed).map_err(fail)?;
                rows.push(format!("{},{},{}", num(snr_db), num(bits), num(stderr)));
            }
            let text = csv_artifact(
                "mmi",
                &opts,
                &[format!("seed: {}", args.seed)],
                "snr_db,bits,stderr",
                &rows,
            );
            write_artifact(&args.output, &text)
        }
        "glcod" => {
            let (n, k, l) = (need(args.n, "n")?, need(args.k, "k")?, need(args.l, "l")?);
            opts.push(("n", n.to_string()));
            opts.push(("rx", args.rx.to_string()));
            opts.push(("k", k.to_string()));
            opts.push(("l", l.to_string()));
            opts.push(("snr", args.snr.clone()));
            let mut rows = Vec::new();
            for &snr_db in &snr_grid_db {
                let rho = 10f64.powf(snr_db / 10.0);
                let bits = mmi_glcod(n, args.rx, k, l, rho).map_err(fail)?;
                rows.push(format!("{},{}", num(snr_db), num(bits)));
            }
            let text = csv_artifact("mmi", &opts, &[], "snr_db,bits", &rows);
            write_artifact(&args.output, &text)
        }
        "gciod" => {
            let (n1, n2) = (need(args.n1, "n1")?, need(args.n2, "n2")?);
            let (l1, l2, k) = (
                need(args.l1, "l1")?,
                need(args.l2, "l2")?,
                need(args.k, "k")?,
            );
            let spec = stbc_lab::construct::GciodSpec::new(n1, n2, l1, l2, k).map_err(fail)?;
            opts.push(("rx", args.rx.to_string()));
            opts.push(("k", k.to_string()));
            opts.push(("n1", n1.to_string()));
            opts.push(("n2", n2.to_string()));
            opts.push(("l1", l1.to_string()));
            opts.push(("l2", l2.to_string()));
            opts.push(("snr", args.snr.clone()));
            let mut rows = Vec::new();
            for &snr_db in &snr_grid_db {
                let rho = 10f64.powf(snr_db / 10.0);
                let bits = mmi_gciod(&spec, args.rx, rho).map_err(fail)?;
                rows.push(format!("{},{}", num(snr_db), num(bits)));
            }
            let text = csv_artifact("mmi", &opts, &[], "snr_db,bits", &rows);
            write_artifact(&args.output, &text)
        }
        other => Err(usage(format!(
            "unknown scheme '{other}', expected channel, glcod, or gciod"
        ))),
    }
}

#[derive(Serialize)]
struct RapidReport {
    design: String,
    l: usize,
    n: usize,
    k: usize,
    max_rate_at_this_length: String,
    sd: stbc_lab::design::SdCheck,
    diversity_order_tested: usize,
    full_diversity: bool,
    set: String,
}

fn cmd_rapid(args: RapidArgs) -> Handled {
    let (design, source_echo) = args.source.load()?;
    let set = args.set.build()?;
    let r = args.r.unwrap_or(design.n());
    let mut opts = vec![source_echo];
    args.set.echo(&mut opts);
    opts.push(("r", r.to_string()));
    let ext = extend(&design);
    let sd = check_rapid_sd(&ext, DEFAULT_TOL);
    let full_diversity = check_rapid_full_diversity(&ext, &set, r);
    let report = RapidReport {
        design: design.name().to_string(),
        l: design.l(),
        n: design.n(),
        k: design.k(),
        max_rate_at_this_length: max_rapid_rate(design.l()).map_err(fail)?.to_string(),
        sd,
        diversity_order_tested: r,
        full_diversity,
        set: set.label().to_string(),
    };
    let text = json_artifact("rapid", &opts, report);
    write_artifact(&args.output, &text)
}
