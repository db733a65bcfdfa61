//! Command-line front end for the projlab workspace: single-quantity
//! computation with provenance labels, parameter sweeps to CSV, the core
//! verification suite, and the built-in reference tables.
//!
//! Everything here is plumbing around the `projlab` library. The one piece
//! of substance is [`run_core_suite`], which pins the cross-checks (values,
//! tolerances, runtime budgets) that define a healthy build; the acceptance
//! test and the `verify` subcommand share it.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use projlab::boolean::{self, SubsetFamily};
use projlab::characteristics::{
    characteristic_bruteforce, characteristic_closed, closed_form_label, duality_defect,
    duality_defect_oracle, OptConfig,
};
use projlab::closedforms::{self, Field, QuadratureConfig};
use projlab::indexsets::{IndexSet, IndexSetKind, MultiIndex};
use projlab::montecarlo::{self, MCEstimate};
use projlab::projbohr::{self, BoundKind, BoundReport};
use projlab::spaces::{conjugate_exponent, SequenceSpace, SpaceFamily};
use projlab::{quad, special, DEFAULT_SEED};

/// Entry point used by `main` and by the process-level tests. Returns the
/// exit code: 0 on success, 1 when a verification suite reports a failure,
/// 2 on argument, config, or computation errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("projlab: {}", e.msg);
            2
        }
    }
}

#[derive(Parser)]
#[command(
    name = "projlab",
    about = "Numerical laboratory for projection constants of polynomial spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one quantity and print it with its provenance label.
    Compute(CommonArgs),
    /// Evaluate one quantity over a parameter grid (CSV by default).
    Sweep(CommonArgs),
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Print a built-in reference table.
    Table(CommonArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Quantity identifier (see the README for the full list).
    #[arg(long)]
    quantity: Option<String>,
    /// Sequence-space descriptor: lr:2, linf, lorentz:2,1, nakano:1.5,2,3,
    /// mixed:1,2,2x2.
    #[arg(long)]
    space: Option<String>,
    /// Index-set descriptor (full:m, full-upto:m, tetra:m, tetra-upto:m,
    /// primes:x, primes-homog:x,m, a JSON list of multi-indices), or a
    /// comma-separated list where the quantity expects degrees or a single
    /// multi-index.
    #[arg(long = "index-set")]
    index_set: Option<String>,
    /// Ambient dimension (number of variables, matrix size, cube size).
    #[arg(long)]
    n: Option<u32>,
    /// Degree parameter (or k for cdkn).
    #[arg(long)]
    m: Option<u32>,
    /// Degree parameter for the Boolean quantities.
    #[arg(long)]
    d: Option<u32>,
    /// Cutoff for the prime-generated quantities.
    #[arg(long)]
    x: Option<u64>,
    /// Monte Carlo sample count (default 1000000).
    #[arg(long)]
    samples: Option<u64>,
    /// RNG seed (default fixed, so runs are reproducible).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker count (default: PROJLAB_WORKERS or 1).
    #[arg(long)]
    workers: Option<usize>,
    /// Tolerance override for the quadrature-backed quantities.
    #[arg(long)]
    tol: Option<f64>,
    /// Output format: json, csv, or text.
    #[arg(long)]
    format: Option<String>,
    /// Write data here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name; "core" is the only defined suite.
    #[arg(long)]
    suite: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug)]
struct CliError {
    msg: String,
}

impl CliError {
    fn new(msg: impl Into<String>) -> CliError {
        CliError { msg: msg.into() }
    }
}

macro_rules! impl_from_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::new(e.to_string())
            }
        }
    )*};
}

impl_from_error!(
    projlab::indexsets::IndexSetError,
    projlab::spaces::SpaceError,
    projlab::characteristics::CharError,
    projlab::closedforms::ClosedFormError,
    projlab::boolean::BooleanError,
    projlab::projbohr::ProjBohrError
);

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Cmd::Compute(args) => {
            let s = Resolved::from_args(&args, None)?;
            let out = cmd_compute(&s)?;
            emit(&s.out, &render(&out, s.format.unwrap_or(Format::Json)))?;
            Ok(0)
        }
        Cmd::Sweep(args) => {
            let s = Resolved::from_args(&args, None)?;
            let rows = cmd_sweep(&s)?;
            emit(&s.out, &render(&Output::Rows(rows), s.format.unwrap_or(Format::Csv)))?;
            Ok(0)
        }
        Cmd::Table(args) => {
            let s = Resolved::from_args(&args, None)?;
            let rows = cmd_table(&s)?;
            emit(&s.out, &render(&Output::Rows(rows), s.format.unwrap_or(Format::Text)))?;
            Ok(0)
        }
        Cmd::Verify(args) => {
            let s = Resolved::from_args(&args.common, args.suite.as_deref())?;
            if s.suite != "core" {
                return Err(CliError::new(format!(
                    "unknown suite {:?}; only \"core\" is defined",
                    s.suite
                )));
            }
            let summary = run_core_suite(s.seed, s.workers);
            emit(&s.out, &summary.render())?;
            Ok(if summary.all_passed() { 0 } else { 1 })
        }
    }
}

// ---------------------------------------------------------------------------
// Settings: flags merged over an optional flat key=value config file.

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn parse(s: &str) -> Result<Format, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(CliError::new(format!("unknown format {other:?}"))),
        }
    }
}

struct Resolved {
    quantity: Option<String>,
    space: Option<String>,
    index_set: Option<String>,
    n: Option<u32>,
    m: Option<u32>,
    d: Option<u32>,
    x: Option<u64>,
    samples: u64,
    seed: u64,
    workers: usize,
    tol: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    suite: String,
}

const CONFIG_KEYS: &[&str] = &[
    "quantity", "space", "index-set", "n", "m", "d", "x", "samples", "seed", "workers", "tol",
    "format", "out", "suite",
];

fn read_config(path: &PathBuf) -> Result<HashMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(format!("cannot read config {}: {e}", path.display())))?;
    let mut kv = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::new(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let k = k.trim().to_string();
        if !CONFIG_KEYS.contains(&k.as_str()) {
            return Err(CliError::new(format!("unknown config key {k:?}")));
        }
        kv.insert(k, v.trim().to_string());
    }
    Ok(kv)
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    kv: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match kv.get(key) {
        Some(s) => s
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::new(format!("bad config value for {key}: {s:?}"))),
        None => Ok(None),
    }
}

impl Resolved {
    fn from_args(args: &CommonArgs, suite_flag: Option<&str>) -> Result<Resolved, CliError> {
        let kv = match &args.config {
            Some(path) => read_config(path)?,
            None => HashMap::new(),
        };
        let workers = match pick(args.workers, &kv, "workers")? {
            Some(w) => w,
            None => match std::env::var("PROJLAB_WORKERS") {
                Ok(s) => s
                    .parse::<usize>()
                    .map_err(|_| CliError::new(format!("bad PROJLAB_WORKERS value {s:?}")))?,
                Err(_) => 1,
            },
        };
        if workers == 0 {
            return Err(CliError::new("workers must be >= 1"));
        }
        let format = match pick(args.format.clone(), &kv, "format")? {
            Some(s) => Some(Format::parse(&s)?),
            None => None,
        };
        let suite = match suite_flag {
            Some(s) => s.to_string(),
            None => kv.get("suite").cloned().unwrap_or_else(|| "core".to_string()),
        };
        Ok(Resolved {
            quantity: pick(args.quantity.clone(), &kv, "quantity")?,
            space: pick(args.space.clone(), &kv, "space")?,
            index_set: pick(args.index_set.clone(), &kv, "index-set")?,
            n: pick(args.n, &kv, "n")?,
            m: pick(args.m, &kv, "m")?,
            d: pick(args.d, &kv, "d")?,
            x: pick(args.x, &kv, "x")?,
            samples: pick(args.samples, &kv, "samples")?.unwrap_or(1_000_000).max(1),
            seed: pick(args.seed, &kv, "seed")?.unwrap_or(DEFAULT_SEED),
            workers,
            tol: pick(args.tol, &kv, "tol")?,
            format,
            out: pick(args.out.clone(), &kv, "out")?,
            suite,
        })
    }

    fn need_quantity(&self) -> Result<&str, CliError> {
        self.quantity.as_deref().ok_or_else(|| CliError::new("missing --quantity"))
    }

    fn need_n(&self) -> Result<u32, CliError> {
        self.n.ok_or_else(|| CliError::new("this quantity needs --n"))
    }

    fn need_m(&self) -> Result<u32, CliError> {
        self.m.ok_or_else(|| CliError::new("this quantity needs --m"))
    }

    fn need_d(&self) -> Result<u32, CliError> {
        self.d.ok_or_else(|| CliError::new("this quantity needs --d"))
    }

    fn need_x(&self) -> Result<u64, CliError> {
        self.x.ok_or_else(|| CliError::new("this quantity needs --x"))
    }

    fn need_index_set(&self) -> Result<&str, CliError> {
        self.index_set.as_deref().ok_or_else(|| CliError::new("this quantity needs --index-set"))
    }

    fn need_space(&self, dimension: usize) -> Result<SequenceSpace, CliError> {
        let desc = self.space.as_deref().ok_or_else(|| CliError::new("this quantity needs --space"))?;
        Ok(SequenceSpace::parse(desc, dimension)?)
    }

    fn opt_config(&self) -> OptConfig {
        OptConfig { seed: self.seed, ..OptConfig::default() }
    }

    fn quad_config(&self) -> QuadratureConfig {
        let mut cfg = QuadratureConfig::default();
        if let Some(t) = self.tol {
            cfg.rel_tol = t;
        }
        cfg
    }
}

// ---------------------------------------------------------------------------
// Output rows and renderers.

struct Row {
    quantity: String,
    params: Vec<(String, String)>,
    value: Option<f64>,
    stderr: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
    provenance: String,
    note: Option<String>,
}

impl Row {
    fn new(quantity: &str, provenance: &str) -> Row {
        Row {
            quantity: quantity.to_string(),
            params: Vec::new(),
            value: None,
            stderr: None,
            lower: None,
            upper: None,
            provenance: provenance.to_string(),
            note: None,
        }
    }

    fn param(mut self, key: &str, val: impl ToString) -> Row {
        self.params.push((key.to_string(), val.to_string()));
        self
    }

    fn value(mut self, v: f64) -> Row {
        self.value = Some(v);
        self
    }

    fn mc(mut self, est: &MCEstimate) -> Row {
        self.value = Some(est.mean);
        self.stderr = Some(est.stderr);
        self.params.push(("samples".to_string(), est.samples.to_string()));
        self.params.push(("seed".to_string(), est.seed.to_string()));
        self.params.push(("workers".to_string(), est.workers.to_string()));
        self
    }

    fn interval(mut self, lo: f64, hi: f64) -> Row {
        if lo == hi {
            self.value = Some(lo);
        }
        self.lower = Some(lo);
        self.upper = Some(hi);
        self
    }
}

enum Output {
    Rows(Vec<Row>),
    Report(BoundReport),
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn render(out: &Output, format: Format) -> String {
    match out {
        Output::Rows(rows) => match format {
            Format::Json => render_json(rows),
            Format::Csv => render_csv(rows),
            Format::Text => render_text(rows),
        },
        Output::Report(report) => match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&report.to_json()).unwrap();
                s.push('\n');
                s
            }
            Format::Text => report.to_table(),
            Format::Csv => render_csv(&report_rows(report)),
        },
    }
}

fn report_rows(report: &BoundReport) -> Vec<Row> {
    report
        .entries
        .iter()
        .map(|e| {
            let kind = match e.kind {
                BoundKind::Lower => "lower",
                BoundKind::Upper => "upper",
                BoundKind::Estimate => "estimate",
            };
            Row {
                quantity: report.quantity.clone(),
                params: vec![
                    ("label".to_string(), e.label.clone()),
                    ("kind".to_string(), kind.to_string()),
                ],
                value: Some(e.value),
                stderr: e.stderr,
                lower: None,
                upper: None,
                provenance: e.provenance.clone(),
                note: None,
            }
        })
        .collect()
}

fn row_json(r: &Row) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("quantity".to_string(), r.quantity.clone().into());
    let mut params = serde_json::Map::new();
    for (k, v) in &r.params {
        let val = if let Ok(u) = v.parse::<u64>() {
            serde_json::Value::from(u)
        } else if let Ok(f) = v.parse::<f64>() {
            serde_json::Value::from(f)
        } else {
            serde_json::Value::from(v.clone())
        };
        params.insert(k.clone(), val);
    }
    obj.insert("params".to_string(), params.into());
    if let Some(v) = r.value {
        obj.insert("value".to_string(), v.into());
    }
    if let Some(v) = r.stderr {
        obj.insert("stderr".to_string(), v.into());
    }
    if let Some(v) = r.lower {
        obj.insert("lower_bound".to_string(), v.into());
    }
    if let Some(v) = r.upper {
        obj.insert("upper_bound".to_string(), v.into());
    }
    obj.insert("provenance".to_string(), r.provenance.clone().into());
    if let Some(n) = &r.note {
        obj.insert("note".to_string(), n.clone().into());
    }
    serde_json::Value::Object(obj)
}

fn render_json(rows: &[Row]) -> String {
    let value = if rows.len() == 1 {
        row_json(&rows[0])
    } else {
        serde_json::Value::Array(rows.iter().map(row_json).collect())
    };
    let mut s = serde_json::to_string_pretty(&value).unwrap();
    s.push('\n');
    s
}

fn params_string(params: &[(String, String)]) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn render_csv(rows: &[Row]) -> String {
    let mut s = String::from("quantity,params,value,stderr,lower_bound,upper_bound,provenance\n");
    for r in rows {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        s.push_str(&format!(
            "{},\"{}\",{},{},{},{},\"{}\"\n",
            r.quantity,
            params_string(&r.params),
            opt(r.value),
            opt(r.stderr),
            opt(r.lower),
            opt(r.upper),
            r.provenance
        ));
    }
    s
}

fn render_text(rows: &[Row]) -> String {
    let has_stderr = rows.iter().any(|r| r.stderr.is_some());
    let has_bounds = rows.iter().any(|r| r.lower.is_some() || r.upper.is_some());
    let mut table: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["QUANTITY".to_string(), "PARAMS".to_string(), "VALUE".to_string()];
    if has_stderr {
        header.push("STDERR".to_string());
    }
    if has_bounds {
        header.push("LOWER".to_string());
        header.push("UPPER".to_string());
    }
    header.push("PROVENANCE".to_string());
    table.push(header);
    for r in rows {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "-".to_string());
        let mut line = vec![
            r.quantity.clone(),
            params_string(&r.params),
            opt(r.value),
        ];
        if has_stderr {
            line.push(opt(r.stderr));
        }
        if has_bounds {
            line.push(opt(r.lower));
            line.push(opt(r.upper));
        }
        line.push(r.provenance.clone());
        table.push(line);
    }
    let cols = table[0].len();
    let mut widths = vec![0usize; cols];
    for line in &table {
        for (i, cell) in line.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut s = String::new();
    for line in &table {
        let mut parts = Vec::with_capacity(cols);
        for (i, cell) in line.iter().enumerate() {
            if i + 1 == cols {
                parts.push(cell.clone());
            } else {
                parts.push(format!("{cell:<width$}", width = widths[i]));
            }
        }
        s.push_str(parts.join("  ").trim_end());
        s.push('\n');
    }
    for r in rows {
        if let Some(n) = &r.note {
            s.push_str(&format!("note [{}]: {n}\n", params_string(&r.params)));
        }
    }
    s
}

fn emit(out: &Option<PathBuf>, data: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, data)
            .map_err(|e| CliError::new(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{data}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Shared argument parsing helpers.

fn parse_u32_list(s: &str) -> Result<Vec<u32>, CliError> {
    let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
    trimmed
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| CliError::new(format!("bad integer {t:?} in list {s:?}")))
        })
        .collect()
}

fn parse_alpha(s: &str) -> Result<MultiIndex, CliError> {
    Ok(MultiIndex::new(parse_u32_list(s)?))
}

fn build_index_set(desc: &str, n: Option<u32>) -> Result<IndexSet, CliError> {
    let t = desc.trim_start();
    if t.starts_with('{') {
        return Ok(IndexSet::from_json(desc)?);
    }
    if t.starts_with('[') {
        let members: Vec<Vec<u32>> = serde_json::from_str(desc)
            .map_err(|e| CliError::new(format!("bad index-set JSON: {e}")))?;
        return Ok(IndexSet::custom(members.into_iter().map(MultiIndex::new).collect())?);
    }
    let kind = IndexSetKind::parse(desc)?;
    let needs_dim = matches!(
        kind,
        IndexSetKind::Full(_)
            | IndexSetKind::FullUpTo(_)
            | IndexSetKind::Tetrahedral(_)
            | IndexSetKind::TetrahedralUpTo(_)
    );
    if needs_dim && n.is_none() {
        return Err(CliError::new("this index-set descriptor needs --n for the dimension"));
    }
    Ok(IndexSet::enumerate(kind, n.unwrap_or(0) as usize)?)
}

// ---------------------------------------------------------------------------
// compute

fn cmd_compute(s: &Resolved) -> Result<Output, CliError> {
    let q = s.need_quantity()?;
    let row = |p: &str| Row::new(q, p);
    let rows = match q {
        "lebesgue" => {
            let m = s.need_m()?;
            vec![row("Sec. 2.4").param("m", m).value(closedforms::lebesgue_constant(m, false))]
        }
        "lebesgue-analytic" => {
            let m = s.need_m()?;
            vec![row("Cor. LoKha(ii)")
                .param("m", m)
                .value(closedforms::lebesgue_constant(m, true))]
        }
        "trig-product" => {
            let degrees = parse_u32_list(s.need_index_set()?)?;
            vec![row("Cor. Lozinski-Kharshiladze")
                .param("degrees", format_list(&degrees))
                .value(closedforms::trig_product(&degrees))]
        }
        "rw" => {
            let (n, m) = (s.need_n()?, s.need_m()?);
            vec![row("Cor. RW")
                .param("n", n)
                .param("m", m)
                .value(closedforms::proj_hilbert_homog(n, m))]
        }
        "invariant" => {
            let n = s.need_n()?;
            let degrees = parse_u32_list(s.need_index_set()?)?;
            let v = closedforms::proj_hilbert_invariant(n, &degrees, &s.quad_config())?;
            vec![row("Thm main").param("n", n).param("degrees", format_list(&degrees)).value(v)]
        }
        "l2-complex" => {
            let n = s.need_n()?;
            vec![row("Eq. (grunbuschC-A)").param("n", n).value(closedforms::proj_l2(n, Field::Complex))]
        }
        "l2-real" => {
            let n = s.need_n()?;
            vec![row("Eq. (grunbuschR)").param("n", n).value(closedforms::proj_l2(n, Field::Real))]
        }
        "l1-complex" => {
            let n = s.need_n()?;
            let v = match s.tol {
                Some(t) => closedforms::proj_l1_complex_with_tol(n, t),
                None => closedforms::proj_l1_complex(n),
            };
            vec![row("Eq. (grunbuschC-B)").param("n", n).value(v)]
        }
        "kappa" => vec![row("Eq. (kappa)").value(closedforms::kappa())],
        "boolean-limit" => {
            let d = s.need_d()?;
            vec![row("Thm limit bool homog").param("d", d).value(boolean::boolean_limit(d)?)]
        }
        "pd" => {
            let d = s.need_d()?;
            boolean::pd_polynomial(d)
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    row("Lemma boolean polynomial rewriting")
                        .param("d", d)
                        .param("k", k)
                        .value(c)
                })
                .collect()
        }
        "cdkn" => {
            let (d, k, n) = (s.need_d()?, s.need_m()?, s.need_n()?);
            let c = boolean::cdkn_exact(d, k, n)?;
            let mut r = row("Lemma lim coef homog bool")
                .param("d", d)
                .param("k", k)
                .param("n", n)
                .value(c as f64);
            r.note = Some(format!("exact value {c}"));
            vec![r]
        }
        "characteristic" | "characteristic-oracle" => {
            let alpha = parse_alpha(s.need_index_set()?)?;
            let space = s.need_space(alpha.dimension())?;
            let (ch, label) = if q == "characteristic-oracle" {
                (characteristic_bruteforce(&space, &alpha, &s.opt_config())?, "oracle")
            } else {
                match characteristic_closed(&space, &alpha) {
                    Ok(ch) => {
                        let label = closed_form_label(&space, &alpha).unwrap_or("closed form");
                        (ch, label)
                    }
                    Err(projlab::characteristics::CharError::NoClosedForm(_)) => {
                        (characteristic_bruteforce(&space, &alpha, &s.opt_config())?, "oracle")
                    }
                    Err(e) => return Err(e.into()),
                }
            };
            vec![row(label)
                .param("space", space.descriptor())
                .param("alpha", format_list(alpha.entries()))
                .interval(ch.lo, ch.hi)]
        }
        "duality-defect" => {
            let alpha = parse_alpha(s.need_index_set()?)?;
            let space = s.need_space(alpha.dimension())?;
            vec![row("Thm cE(i)")
                .param("space", space.descriptor())
                .param("alpha", format_list(alpha.entries()))
                .value(duality_defect(&space, &alpha)?)]
        }
        "torus-exp-sum" | "torus-exp-sum-squared" => {
            let j = build_index_set(s.need_index_set()?, s.n)?;
            let (est, label) = if q == "torus-exp-sum" {
                (montecarlo::torus_exp_sum(&j, s.samples, s.seed, s.workers), "Cor. manydimensionsB")
            } else {
                (montecarlo::torus_exp_sum_squared(&j, s.samples, s.seed, s.workers), "Parseval")
            };
            vec![row(label).param("index-set", j.kind().descriptor()).param("dim", j.dimension()).mc(&est)]
        }
        "trace-class" => {
            let n = s.need_n()?;
            let est = montecarlo::trace_class(n, s.samples, s.seed, s.workers);
            vec![row("Thm traceform").param("n", n).mc(&est)]
        }
        "sphere-invariant" => {
            let n = s.need_n()?;
            let degrees = parse_u32_list(s.need_index_set()?)?;
            let est = montecarlo::sphere_invariant(n, &degrees, s.samples, s.seed, s.workers);
            vec![row("Thm polleqm").param("n", n).param("degrees", format_list(&degrees)).mc(&est)]
        }
        "dirichlet" => {
            let x = s.need_x()?;
            let est = montecarlo::dirichlet_projection(x, s.m, s.samples, s.seed, s.workers)?;
            let mut r = row("Thm abstract").param("x", x);
            if let Some(m) = s.m {
                r = r.param("m", m);
            }
            vec![r.mc(&est)]
        }
        "boolean-exact" => {
            let n = s.need_n()?;
            let family = SubsetFamily::parse(s.need_index_set()?, n)?;
            vec![row("Thm bool-int")
                .param("n", n)
                .param("family", family.descriptor())
                .value(boolean::boolean_proj_exact(&family, s.workers)?)]
        }
        "boolean-mc" => {
            let n = s.need_n()?;
            let family = SubsetFamily::parse(s.need_index_set()?, n)?;
            let est = boolean::boolean_proj_mc(&family, s.samples, s.seed, s.workers);
            vec![row("Thm bool-int").param("n", n).param("family", family.descriptor()).mc(&est)]
        }
        "poly-proj" => {
            let j = build_index_set(s.need_index_set()?, s.n)?;
            let space = s.need_space(j.dimension())?;
            let lh = projbohr::poly_proj_const(&space, &j, &s.opt_config())?;
            vec![row("Eq. (lambda-dash-def)")
                .param("space", space.descriptor())
                .param("index-set", j.kind().descriptor())
                .interval(lh.lo, lh.hi)]
        }
        "uncond" => {
            let j = build_index_set(s.need_index_set()?, s.n)?;
            let space = s.need_space(j.dimension())?;
            let est = projbohr::uncond_basis_lower(&space, &j, &s.opt_config())?;
            let mut r = row("Eq. (unconditionality)")
                .param("space", space.descriptor())
                .param("index-set", j.kind().descriptor())
                .value(est.lower);
            if est.budget_exhausted {
                r.note = Some("improvement loop hit its pass cap; lower bound only".to_string());
            }
            vec![r]
        }
        "bohr-km" => {
            let j = build_index_set(s.need_index_set()?, s.n)?;
            let space = s.need_space(j.dimension())?;
            let m = s.need_m()?;
            let v = projbohr::bohr_radius_homog(&space, &j, m, &s.opt_config())?;
            vec![row("Prop. Km vs uncond in Pm")
                .param("space", space.descriptor())
                .param("m", m)
                .value(v)]
        }
        "bohr-sandwich" => {
            let j = build_index_set(s.need_index_set()?, s.n)?;
            let space = s.need_space(j.dimension())?;
            let m_max = s.m.unwrap_or_else(|| j.members().iter().map(|a| a.degree()).max().unwrap_or(1)).clamp(1, 8);
            let report = projbohr::bohr_sandwich(&space, &j, m_max, &s.opt_config())?;
            return Ok(Output::Report(report));
        }
        "catalog" => {
            let j = build_index_set(s.need_index_set()?, s.n)?;
            let space = s.need_space(j.dimension())?;
            let mc = if space.family() == &SpaceFamily::LInfty {
                Some(montecarlo::torus_exp_sum(&j, s.samples, s.seed, s.workers))
            } else {
                None
            };
            let report = projbohr::bounds_catalog(&space, &j, mc.as_ref(), &s.opt_config())?;
            return Ok(Output::Report(report));
        }
        other => {
            return Err(CliError::new(format!("unknown quantity {other:?}")));
        }
    };
    Ok(Output::Rows(rows))
}

fn format_list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// sweep

fn cmd_sweep(s: &Resolved) -> Result<Vec<Row>, CliError> {
    let q = s.need_quantity()?;
    let mut rows = Vec::new();
    match q {
        "lebesgue" => {
            for m in 0..=s.need_m()? {
                rows.push(
                    Row::new(q, "Sec. 2.4").param("m", m).value(closedforms::lebesgue_constant(m, false)),
                );
            }
        }
        "lebesgue-analytic" => {
            for m in 0..=s.need_m()? {
                rows.push(
                    Row::new(q, "Cor. LoKha(ii)")
                        .param("m", m)
                        .value(closedforms::lebesgue_constant(m, true)),
                );
            }
        }
        "boolean-limit" => {
            for d in 1..=s.need_d()? {
                rows.push(
                    Row::new(q, "Thm limit bool homog").param("d", d).value(boolean::boolean_limit(d)?),
                );
            }
        }
        "l1-complex" => {
            for n in 1..=s.need_n()? {
                rows.push(
                    Row::new(q, "Eq. (grunbuschC-B)").param("n", n).value(closedforms::proj_l1_complex(n)),
                );
            }
        }
        "l2-complex" => {
            for n in 1..=s.need_n()? {
                rows.push(
                    Row::new(q, "Eq. (grunbuschC-A)")
                        .param("n", n)
                        .value(closedforms::proj_l2(n, Field::Complex)),
                );
            }
        }
        "l2-real" => {
            for n in 1..=s.need_n()? {
                rows.push(
                    Row::new(q, "Eq. (grunbuschR)").param("n", n).value(closedforms::proj_l2(n, Field::Real)),
                );
            }
        }
        "rw" => {
            let n = s.need_n()?;
            for m in 1..=s.need_m()? {
                rows.push(
                    Row::new(q, "Cor. RW")
                        .param("n", n)
                        .param("m", m)
                        .value(closedforms::proj_hilbert_homog(n, m)),
                );
            }
        }
        "trace-class" => {
            let n_max = s.need_n()?;
            let mut n = 2u32;
            while n <= n_max {
                let est = montecarlo::trace_class(n, s.samples, s.seed, s.workers);
                rows.push(Row::new(q, "Thm traceform").param("n", n).mc(&est));
                n *= 2;
            }
        }
        "boolean-exact" => {
            let d = s.need_d()?;
            let n_max = s.need_n()?;
            for n in d.max(1)..=n_max {
                let family = SubsetFamily::homog(n, d)?;
                rows.push(
                    Row::new(q, "Thm bool-int")
                        .param("n", n)
                        .param("d", d)
                        .value(boolean::boolean_proj_exact(&family, s.workers)?),
                );
            }
        }
        "bohr-km" => {
            let n = s.need_n()?;
            let m_max = s.need_m()?;
            let space = match s.space.as_deref() {
                Some(desc) => SequenceSpace::parse(desc, n as usize)?,
                None => SequenceSpace::linf(n as usize)?,
            };
            let j = IndexSet::full_up_to(m_max, n as usize)?;
            for m in 1..=m_max {
                let v = projbohr::bohr_radius_homog(&space, &j, m, &s.opt_config())?;
                rows.push(
                    Row::new(q, "Prop. Km vs uncond in Pm")
                        .param("space", space.descriptor())
                        .param("m", m)
                        .value(v),
                );
            }
        }
        "dirichlet" => {
            for x in 2..=s.need_x()? {
                let est = montecarlo::dirichlet_projection(x, s.m, s.samples, s.seed, s.workers)?;
                let mut r = Row::new(q, "Thm abstract").param("x", x);
                if let Some(m) = s.m {
                    r = r.param("m", m);
                }
                rows.push(r.mc(&est));
            }
        }
        other => {
            return Err(CliError::new(format!(
                "quantity {other:?} is not sweepable; see the README for the sweep grid list"
            )));
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// table

fn cmd_table(s: &Resolved) -> Result<Vec<Row>, CliError> {
    let q = s.need_quantity()?;
    let mut rows = Vec::new();
    match q {
        "boolean-limits" => {
            for d in 1..=s.d.unwrap_or(6) {
                rows.push(
                    Row::new("boolean-limit", "Thm limit bool homog")
                        .param("d", d)
                        .value(boolean::boolean_limit(d)?),
                );
            }
        }
        "grunbaum" => {
            for n in 1..=s.n.unwrap_or(8) {
                rows.push(
                    Row::new("l2-real", "Eq. (grunbuschR)")
                        .param("n", n)
                        .value(closedforms::proj_l2(n, Field::Real)),
                );
                rows.push(
                    Row::new("l2-complex", "Eq. (grunbuschC-A)")
                        .param("n", n)
                        .value(closedforms::proj_l2(n, Field::Complex)),
                );
                rows.push(
                    Row::new("l1-complex", "Eq. (grunbuschC-B)")
                        .param("n", n)
                        .value(closedforms::proj_l1_complex(n)),
                );
            }
        }
        "lebesgue" => {
            for m in 0..=s.m.unwrap_or(10) {
                rows.push(
                    Row::new("lebesgue", "Sec. 2.4")
                        .param("m", m)
                        .value(closedforms::lebesgue_constant(m, false)),
                );
                rows.push(
                    Row::new("lebesgue-analytic", "Cor. LoKha(ii)")
                        .param("m", m)
                        .value(closedforms::lebesgue_constant(m, true)),
                );
            }
        }
        other => {
            return Err(CliError::new(format!(
                "unknown table {other:?}; defined tables: boolean-limits, grunbaum, lebesgue"
            )));
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// The core verification suite. One entry per acceptance criterion; pinned
// tolerances live here and nowhere else. Details never include durations,
// so the rendered report is byte-identical across runs with the same seed
// and worker count (runtime budgets still gate the pass bit).

pub struct CheckResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct VerifySummary {
    pub seed: u64,
    pub workers: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifySummary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "verify suite: core\nseed: {}\nworkers: {}\n",
            self.seed, self.workers
        );
        for c in &self.checks {
            out.push_str(&format!(
                "[{:>2}] {} {} | {}\n",
                c.index,
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!("result: {passed}/{} passed\n", self.checks.len()));
        out
    }
}

/// Runs all thirteen core checks. Deterministic for a fixed (seed, workers)
/// pair: every estimator derives its substream from `seed` and splits work
/// by worker index, so thread scheduling cannot move a single sample.
pub fn run_core_suite(seed: u64, workers: usize) -> VerifySummary {
    let checks = vec![
        check_sphere_invariant(seed, workers),
        check_torus_vs_bessel(seed, workers),
        check_trace_class(seed, workers),
        check_boolean_degree_one(seed, workers),
        check_boolean_limits(seed, workers),
        check_characteristics_oracle(seed, workers),
        check_duality(seed, workers),
        check_degree_one_lambda(seed, workers),
        check_lebesgue(seed, workers),
        check_random_sets_sandwich(seed, workers),
        check_bohr_witness(seed, workers),
        check_dirichlet(seed, workers),
        check_determinism(seed, workers),
    ];
    VerifySummary { seed, workers, checks }
}

fn subseed(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn check_sphere_invariant(seed: u64, _workers: usize) -> CheckResult {
    // Single worker by contract: the runtime budget assumes one.
    let start = Instant::now();
    let est = montecarlo::sphere_invariant(2, &[2], 1_000_000, subseed(seed, 1), 1);
    let in_time = start.elapsed() < Duration::from_secs(20);
    let target = closedforms::proj_hilbert_homog(2, 2);
    let dev = (est.mean - target).abs();
    let passed = dev <= 3.0 * est.stderr && est.stderr <= 4e-3 && in_time;
    CheckResult {
        index: 1,
        name: "sphere invariant matches the Gamma-ratio value",
        passed,
        detail: format!(
            "mean={} stderr={} target={}",
            fmt_f64(est.mean),
            fmt_f64(est.stderr),
            fmt_f64(target)
        ),
    }
}

fn check_torus_vs_bessel(seed: u64, workers: usize) -> CheckResult {
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [2u32, 4, 8] {
        let j = IndexSet::full(1, n as usize).expect("degree-1 set");
        let est = montecarlo::torus_exp_sum(&j, 1_000_000, subseed(seed, 2), workers);
        let quad_value = closedforms::proj_l1_complex(n);
        passed &= (est.mean - quad_value).abs() <= 3.0 * est.stderr;
        parts.push(format!("n={n} mc={} quad={}", fmt_f64(est.mean), fmt_f64(quad_value)));
    }
    let mut worst_consistency: f64 = 0.0;
    for n in [2u32, 4, 8] {
        let a = closedforms::proj_l1_complex_with_tol(n, 1e-9);
        let b = closedforms::proj_l1_complex_with_tol(n, 1e-10);
        worst_consistency = worst_consistency.max((a - b).abs());
    }
    passed &= worst_consistency <= 1e-8;
    parts.push(format!("tol-consistency={}", fmt_f64(worst_consistency)));
    CheckResult {
        index: 2,
        name: "torus exponential sums match the Bessel quadrature",
        passed,
        detail: parts.join("; "),
    }
}

fn check_trace_class(seed: u64, workers: usize) -> CheckResult {
    let mut passed = true;
    let mut ratios: Vec<(f64, f64)> = Vec::new();
    for n in [2u32, 4, 8, 16] {
        let start = Instant::now();
        let est = montecarlo::trace_class(n, 1_000_000, subseed(seed, 3 + n as u64), workers);
        passed &= start.elapsed() < Duration::from_secs(60);
        ratios.push((est.mean / n as f64, est.stderr / n as f64));
    }
    for w in ratios.windows(2) {
        let (r1, s1) = w[0];
        let (r2, s2) = w[1];
        passed &= r1 <= r2 + 3.0 * (s1 + s2);
    }
    let limit = std::f64::consts::PI.sqrt() / 2.0;
    let r16 = ratios[3].0;
    passed &= (r16 - 0.8862).abs() <= 0.02;
    let shown: Vec<String> = ratios.iter().map(|(r, _)| fmt_f64(*r)).collect();
    CheckResult {
        index: 3,
        name: "trace-class ratios rise toward sqrt(pi)/2",
        passed,
        detail: format!("ratios n=2,4,8,16: {}; limit={}", shown.join(", "), fmt_f64(limit)),
    }
}

fn check_boolean_degree_one(_seed: u64, workers: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    for n in (1..=15u32).step_by(2) {
        let family = SubsetFamily::homog(n, 1).expect("degree-1 family");
        let v = boolean::boolean_proj_exact(&family, workers).expect("small cube");
        let target = (2.0 / std::f64::consts::PI.sqrt())
            * (special::ln_gamma((n as f64 + 2.0) / 2.0) - special::ln_gamma((n as f64 + 1.0) / 2.0))
                .exp();
        worst = worst.max((v - target).abs());
    }
    CheckResult {
        index: 4,
        name: "boolean degree-1 values equal the Gamma-ratio identity",
        passed: worst <= 1e-10,
        detail: format!("worst |diff| over odd n<=15: {}", fmt_f64(worst)),
    }
}

fn check_boolean_limits(_seed: u64, workers: usize) -> CheckResult {
    let pi = std::f64::consts::PI;
    let target2 = (2.0 / (pi * std::f64::consts::E)).sqrt();
    let target3 = (1.0 + 4.0 * (-1.5f64).exp()) / (3.0 * (2.0 * pi).sqrt());
    let stated5 = 3.0 / (10.0 * (2.0 * pi).sqrt());
    let v2 = boolean::boolean_limit(2).expect("quadrature");
    let v3 = boolean::boolean_limit(3).expect("quadrature");
    let v5 = boolean::boolean_limit(5).expect("quadrature");
    let ok2 = (v2 - target2).abs() <= 1e-8;
    let ok3 = (v3 - target3).abs() <= 1e-8;
    let ok5 = (v5 - stated5).abs() <= 1e-8;
    let start = Instant::now();
    let family = SubsetFamily::homog(24, 2).expect("N=24 family");
    let v24 = boolean::boolean_proj_exact(&family, workers).expect("exact cube") / 24.0;
    let ok24 =
        (v24 / target2 - 1.0).abs() <= 0.05 && start.elapsed() < Duration::from_secs(300);
    CheckResult {
        index: 5,
        name: "boolean homogeneous limits match their closed values",
        passed: ok2 && ok3 && ok5 && ok24,
        detail: format!(
            "d=2 diff={}; d=3 diff={}; d=5 value={} vs stated {}; N=24 ratio={}",
            fmt_f64((v2 - target2).abs()),
            fmt_f64((v3 - target3).abs()),
            fmt_f64(v5),
            fmt_f64(stated5),
            fmt_f64(v24 / target2)
        ),
    }
}

fn spaces_for_dim(n: usize) -> Vec<SequenceSpace> {
    let mut out = vec![
        SequenceSpace::lr(1.0, n).unwrap(),
        SequenceSpace::lr(1.5, n).unwrap(),
        SequenceSpace::lr(2.0, n).unwrap(),
        SequenceSpace::lr(3.0, n).unwrap(),
    ];
    if n == 3 {
        out.push(SequenceSpace::nakano(vec![1.5, 2.0, 3.0]).unwrap());
        out.push(SequenceSpace::mixed(1.0, 2.0, 3, 1).unwrap());
    } else {
        out.push(SequenceSpace::nakano(vec![1.5, 2.0, 2.5, 3.0]).unwrap());
        out.push(SequenceSpace::mixed(1.0, 2.0, 2, 2).unwrap());
    }
    out
}

fn check_characteristics_oracle(seed: u64, _workers: usize) -> CheckResult {
    let cfg = OptConfig { seed: subseed(seed, 6), ..OptConfig::default() };
    let sets = [IndexSet::full(3, 3).unwrap(), IndexSet::full(2, 4).unwrap()];
    let mut worst_rel: f64 = 0.0;
    let mut lorentz_ok = true;
    for j in &sets {
        let n = j.dimension();
        for space in spaces_for_dim(n) {
            for alpha in j.members() {
                let closed = characteristic_closed(&space, alpha)
                    .expect("closed form")
                    .value()
                    .expect("point value");
                let oracle = characteristic_bruteforce(&space, alpha, &cfg).expect("oracle");
                worst_rel = worst_rel.max((closed - oracle.lo).abs() / closed);
            }
        }
        for (r, s) in [(2.0, f64::INFINITY), (2.0, 1.0)] {
            let space = SequenceSpace::lorentz(r, s, n).unwrap();
            for alpha in j.members() {
                let closed = characteristic_closed(&space, alpha).expect("interval");
                let oracle = characteristic_bruteforce(&space, alpha, &cfg).expect("oracle");
                lorentz_ok &= oracle.lo >= closed.lo * (1.0 - 1e-6) - 1e-12
                    && oracle.lo <= closed.hi * (1.0 + 1e-6) + 1e-12;
            }
        }
    }
    CheckResult {
        index: 6,
        name: "characteristic closed forms agree with the oracle",
        passed: worst_rel <= 1e-4 && lorentz_ok,
        detail: format!(
            "worst relative deviation {}; Lorentz oracle inside closed intervals: {}",
            fmt_f64(worst_rel),
            lorentz_ok
        ),
    }
}

fn check_duality(seed: u64, _workers: usize) -> CheckResult {
    let sets = [IndexSet::full(3, 3).unwrap(), IndexSet::full(2, 4).unwrap()];
    let mut worst_closed: f64 = 0.0;
    for j in &sets {
        for r in [1.0, 1.5, 2.0, 3.0] {
            let space = SequenceSpace::lr(r, j.dimension()).unwrap();
            for alpha in j.members() {
                worst_closed =
                    worst_closed.max(duality_defect(&space, alpha).expect("closed defect"));
            }
        }
    }
    let cfg = OptConfig { seed: subseed(seed, 7), ..OptConfig::default() };
    let mixed = SequenceSpace::mixed(1.0, 2.0, 2, 2).unwrap();
    let mut worst_mixed: f64 = 0.0;
    for alpha in IndexSet::full(2, 4).unwrap().members() {
        worst_mixed =
            worst_mixed.max(duality_defect_oracle(&mixed, alpha, &cfg).expect("oracle defect"));
    }
    CheckResult {
        index: 7,
        name: "duality identity for conjugate pairs",
        passed: worst_closed <= 1e-8 && worst_mixed <= 1e-4,
        detail: format!(
            "closed lr defect {}; mixed oracle defect {}",
            fmt_f64(worst_closed),
            fmt_f64(worst_mixed)
        ),
    }
}

fn check_degree_one_lambda(seed: u64, _workers: usize) -> CheckResult {
    let cfg = OptConfig { seed: subseed(seed, 8), ..OptConfig::default() };
    let mut worst: f64 = 0.0;
    let mut all_points = true;
    for r in [1.0, 2.0, 4.0] {
        for n in 1..=8usize {
            let space = SequenceSpace::lr(r, n).unwrap();
            let j = IndexSet::full(1, n).unwrap();
            let lh = projbohr::poly_proj_const(&space, &j, &cfg).expect("degree-1 value");
            all_points &= lh.is_point();
            let target = (n as f64).powf(1.0 / conjugate_exponent(r));
            worst = worst.max((lh.lo - target).abs());
        }
    }
    let mut sandwich_ok = true;
    let mut sandwich_parts = Vec::new();
    for (m, n) in [(2u32, 6usize), (3, 6)] {
        let space = SequenceSpace::lr(2.0, n).unwrap();
        let j = IndexSet::tetrahedral(m, n).unwrap();
        let lh = projbohr::poly_proj_const(&space, &j, &cfg).expect("tetrahedral value");
        let dual = space.kothe_dual().expect("dual of l2");
        let phi_n = dual.fundamental_function(n).unwrap();
        let phi_m = dual.fundamental_function(m as usize).unwrap();
        let lower = (phi_n / phi_m).powi(m as i32);
        let upper = std::f64::consts::E.powi(m as i32) * lower;
        sandwich_ok &= lh.lo >= lower - 1e-9 && lh.hi <= upper + 1e-9;
        sandwich_parts.push(format!(
            "(m,n)=({m},{n}): {} in [{}, {}]",
            fmt_f64(lh.lo),
            fmt_f64(lower),
            fmt_f64(upper)
        ));
    }
    CheckResult {
        index: 8,
        name: "degree-1 projection constants exact; tetrahedral sandwich holds",
        passed: worst <= 1e-6 && all_points && sandwich_ok,
        detail: format!(
            "worst degree-1 deviation {}; {}",
            fmt_f64(worst),
            sandwich_parts.join("; ")
        ),
    }
}

fn check_lebesgue(_seed: u64, _workers: usize) -> CheckResult {
    let pi = std::f64::consts::PI;
    let l0 = closedforms::lebesgue_constant(0, false);
    let mut sandwich_ok = (l0 - 1.0).abs() <= 1e-12;
    for m in 1..=200u32 {
        let lm = closedforms::lebesgue_constant(m, false);
        let lower = 4.0 / (pi * pi) * ((m as f64) + 1.0).ln();
        let upper = 3.0 + (m as f64).ln();
        sandwich_ok &= lower < lm && lm < upper;
    }
    let mut worst_id: f64 = 0.0;
    for m in 0..=50u32 {
        let a = closedforms::lebesgue_constant(2 * m, true);
        let b = closedforms::lebesgue_constant(m, false);
        worst_id = worst_id.max((a - b).abs());
    }
    CheckResult {
        index: 9,
        name: "Lebesgue constants obey the strict sandwich and half-range identity",
        passed: sandwich_ok && worst_id <= 1e-10,
        detail: format!(
            "sandwich m<=200 ok: {sandwich_ok}; worst half-range identity deviation {}",
            fmt_f64(worst_id)
        ),
    }
}

/// Small deterministic generator for the randomized index-set check; keeps
/// the CLI free of an RNG dependency.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

fn check_random_sets_sandwich(seed: u64, workers: usize) -> CheckResult {
    let mut rng = SplitMix(subseed(seed, 10));
    let mut passed = true;
    let mut worst_margin = f64::INFINITY;
    for t in 0..20u64 {
        let n = 1 + rng.below(4) as usize;
        let mut pool = IndexSet::full_up_to(3, n).unwrap().members().to_vec();
        let k = 1 + rng.below(pool.len().min(12) as u64) as usize;
        // Partial Fisher-Yates: the first k entries become the sample.
        for i in 0..k {
            let pick = i + rng.below((pool.len() - i) as u64) as usize;
            pool.swap(i, pick);
        }
        pool.truncate(k);
        let j = IndexSet::custom(pool).unwrap();
        let est = montecarlo::torus_exp_sum(&j, 100_000, subseed(seed, 100 + t), workers);
        let sq = (j.len() as f64).sqrt();
        let lower = sq / 8f64.sqrt() - 3.0 * est.stderr;
        let upper = sq + 3.0 * est.stderr;
        passed &= est.mean >= lower && est.mean <= upper;
        worst_margin = worst_margin.min((est.mean - lower).min(upper - est.mean) / sq);
    }
    CheckResult {
        index: 10,
        name: "random index sets stay inside the L2 sandwich",
        passed,
        detail: format!("20 sets checked; worst relative margin {}", fmt_f64(worst_margin)),
    }
}

fn check_bohr_witness(seed: u64, _workers: usize) -> CheckResult {
    let cfg = OptConfig { seed: subseed(seed, 11), ..OptConfig::default() };
    let space = SequenceSpace::linf(1).unwrap();
    let j = IndexSet::full_up_to(4, 1).unwrap();
    let report = projbohr::bohr_sandwich(&space, &j, 3, &cfg).expect("one-variable report");
    let find = |label: &str| {
        report
            .entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.value)
            .expect("entry present")
    };
    let radius = find("Moebius witness radius");
    let wiener = find("Wiener coefficient defect");
    let radius_ok = radius >= 1.0 / 3.0 - 1e-3 && radius <= 1.0 / 3.0 + 0.02;
    let wiener_ok = wiener <= 1e-9;
    CheckResult {
        index: 11,
        name: "Bohr radius witness brackets 1/3 and Wiener holds",
        passed: radius_ok && wiener_ok && report.consistent,
        detail: format!(
            "witness radius {}; wiener defect {}; report consistent: {}",
            fmt_f64(radius),
            fmt_f64(wiener),
            report.consistent
        ),
    }
}

fn check_dirichlet(seed: u64, workers: usize) -> CheckResult {
    let two_pi = 2.0 * std::f64::consts::PI;
    let est2 = montecarlo::dirichlet_projection(2, None, 1_000_000, subseed(seed, 12), workers)
        .expect("x=2");
    let mut f = |t: f64| (2.0 + 2.0 * t.cos()).sqrt();
    let oracle = quad::adaptive(&mut f, 0.0, two_pi, 1e-11, 1e-12, 30).value / two_pi;
    let ok_a = (est2.mean - oracle).abs() <= 3.0 * est2.stderr;
    let est30 = montecarlo::dirichlet_projection(30, Some(1), 1_000_000, subseed(seed, 13), workers)
        .expect("x=30");
    let quad10 = closedforms::proj_l1_complex(10);
    let ok_b = (est30.mean - quad10).abs() <= 3.0 * est30.stderr;
    let est10 = montecarlo::dirichlet_projection(10, None, 1_000_000, subseed(seed, 14), workers)
        .expect("x=10");
    let cap = |est: &MCEstimate, x: f64| est.mean <= x.sqrt() + 3.0 * est.stderr;
    let ok_c = cap(&est2, 2.0) && cap(&est30, 30.0) && cap(&est10, 10.0);
    CheckResult {
        index: 12,
        name: "Dirichlet estimates match quadrature and stay under sqrt(x)",
        passed: ok_a && ok_b && ok_c,
        detail: format!(
            "x=2: mc={} oracle={}; x=30,m=1: mc={} quad={}; x=10: mc={}",
            fmt_f64(est2.mean),
            fmt_f64(oracle),
            fmt_f64(est30.mean),
            fmt_f64(quad10),
            fmt_f64(est10.mean)
        ),
    }
}

fn check_determinism(seed: u64, workers: usize) -> CheckResult {
    let j = IndexSet::full_up_to(2, 3).unwrap();
    let a = montecarlo::torus_exp_sum(&j, 200_000, subseed(seed, 15), workers);
    let b = montecarlo::torus_exp_sum(&j, 200_000, subseed(seed, 15), workers);
    let family = SubsetFamily::homog(16, 2).unwrap();
    let c = boolean::boolean_proj_mc(&family, 200_000, subseed(seed, 16), workers);
    let d = boolean::boolean_proj_mc(&family, 200_000, subseed(seed, 16), workers);
    let e1 = montecarlo::trace_class(3, 50_000, subseed(seed, 17), workers);
    let e2 = montecarlo::trace_class(3, 50_000, subseed(seed, 17), workers);
    let same = |x: &MCEstimate, y: &MCEstimate| {
        x.mean.to_bits() == y.mean.to_bits() && x.stderr.to_bits() == y.stderr.to_bits()
    };
    let passed = same(&a, &b) && same(&c, &d) && same(&e1, &e2);
    CheckResult {
        index: 13,
        name: "repeated estimator runs are bit-identical",
        passed,
        detail: format!(
            "torus: {}; boolean mc: {}; trace class: {}",
            same(&a, &b),
            same(&c, &d),
            same(&e1, &e2)
        ),
    }
}
