use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qassess_core::assessment::{assess, AssessmentResult, MeasurementBundle};
use qassess_core::calibration::{calibrate_modules, read_baseline_csv};
use qassess_core::format::{parse_module, serialize_module, to_canonical_json, FILE_SUFFIX};
use qassess_core::model::{resolve, validate, Diagnostic, ModuleDef, QualityModel};
use qassess_core::report::{to_html, to_json, ReportMeta};
use qassess_core::stats::{average_ranks, improvement_percent, spearman, RankOrder, RankVector};
use qassess_core::weighting::{apply_rankings, read_ranking_csv, WeighOutcome};
use qassess_core::Error;

use crate::{Command, ReportFormat, ScoreOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Invalid = 1,
    Io = 2,
    Internal = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: Exit,
    pub message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure { code: Exit::Io, message: message.into() }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: Exit::Invalid, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: Exit::Internal, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Resolve(_) | Error::DegenerateThresholds { .. } | Error::MalformedRanking(_) => {
                Failure::invalid(e.to_string())
            }
            _ => Failure::io(e.to_string()),
        }
    }
}

type CmdResult<T = Exit> = Result<T, Failure>;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Validate { models } => cmd_validate(&models),
        Command::Calibrate { models, baseline, out } => cmd_calibrate(&models, &baseline, &out),
        Command::Weigh { models, ranking, out } => cmd_weigh(&models, &ranking, &out),
        Command::Assess { models, bundles, manual, out, format, timestamp } => {
            cmd_assess(&models, &bundles, manual.as_deref(), &out, format, timestamp)
        }
        Command::Compare { reports, factor } => cmd_compare(&reports, factor.as_deref()),
        Command::RankCorrelate { csv, order } => cmd_rank_correlate(&csv, order),
    }
}

fn read(path: &Path) -> CmdResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CmdResult<()> {
    fs::write(path, contents).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn create_dir(path: &Path) -> CmdResult<()> {
    fs::create_dir_all(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Expands directories to the model files they contain, sorted by name.
fn model_paths(inputs: &[PathBuf]) -> CmdResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.to_string_lossy().ends_with(FILE_SUFFIX))
                .collect();
            found.sort();
            out.extend(found);
        } else if p.exists() {
            out.push(p.clone());
        } else {
            return Err(Failure::io(format!("{}: no such file or directory", p.display())));
        }
    }
    if out.is_empty() {
        return Err(Failure::io("no model files given"));
    }
    Ok(out)
}

fn load_modules(inputs: &[PathBuf]) -> CmdResult<Vec<(PathBuf, ModuleDef)>> {
    model_paths(inputs)?
        .into_iter()
        .map(|path| {
            let bytes = read(&path)?;
            let module = parse_module(&bytes).map_err(|e| Failure::io(format!("{}:{e}", path.display())))?;
            Ok((path, module))
        })
        .collect()
}

fn report_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

/// Resolves and validates; prints every diagnostic to stderr and fails with
/// exit code 1 on any error.
fn checked_model(modules: Vec<ModuleDef>) -> CmdResult<(QualityModel, Vec<Diagnostic>)> {
    let model = match resolve(modules) {
        Ok(m) => m,
        Err(e) => {
            report_diagnostics(&e.diagnostics);
            return Err(Failure::invalid(format!("{} resolution error(s)", e.diagnostics.len())));
        }
    };
    let diags = validate(&model);
    report_diagnostics(&diags);
    let errors = diags.iter().filter(|d| d.is_error()).count();
    if errors > 0 {
        return Err(Failure::invalid(format!("{errors} validation error(s)")));
    }
    Ok((model, diags))
}

fn cmd_validate(models: &[PathBuf]) -> CmdResult {
    let modules: Vec<ModuleDef> = load_modules(models)?.into_iter().map(|(_, m)| m).collect();
    let (model, diags) = checked_model(modules)?;
    println!(
        "ok: {} module(s), {} factor(s), {} measure(s), 0 errors, {} warning(s)",
        model.modules().len(),
        model.factors().len(),
        model.measures().len(),
        diags.len()
    );
    Ok(Exit::Success)
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Writes a revised model next to nothing it was read from.
fn write_revision(out: &Path, loaded: &[(PathBuf, ModuleDef)], modules: &[ModuleDef]) -> CmdResult<()> {
    create_dir(out)?;
    for ((src, _), module) in loaded.iter().zip(modules) {
        let name = src.file_name().ok_or_else(|| Failure::io(format!("{}: not a file", src.display())))?;
        let dest = out.join(name);
        if same_file(src, &dest) {
            return Err(Failure::io(format!("refusing to overwrite input {}", src.display())));
        }
        write(&dest, &serialize_module(module))?;
    }
    Ok(())
}

fn cmd_calibrate(models: &[PathBuf], baseline: &Path, out: &Path) -> CmdResult {
    let loaded = load_modules(models)?;
    checked_model(loaded.iter().map(|(_, m)| m.clone()).collect())?;
    let samples = read_baseline_csv(read(baseline)?.as_slice())?;
    let mut modules: Vec<ModuleDef> = loaded.iter().map(|(_, m)| m.clone()).collect();
    let (records, unused) = calibrate_modules(&mut modules, &samples)?;
    for m in &unused {
        eprintln!("warning: baseline measure '{m}' has no evaluation entry with a utility direction");
    }
    checked_model(modules.clone())?;
    write_revision(out, &loaded, &modules)?;
    write(&out.join("calibration.json"), &to_canonical_json(&records))?;
    Ok(Exit::Success)
}

fn cmd_weigh(models: &[PathBuf], ranking: &Path, out: &Path) -> CmdResult {
    let loaded = load_modules(models)?;
    checked_model(loaded.iter().map(|(_, m)| m.clone()).collect())?;
    let rankings = read_ranking_csv(read(ranking)?.as_slice())?;
    let mut modules: Vec<ModuleDef> = loaded.iter().map(|(_, m)| m.clone()).collect();
    for (parent, outcome) in apply_rankings(&mut modules, &rankings)? {
        if outcome == WeighOutcome::KeptExplicit {
            eprintln!("warning: '{parent}' keeps its explicit weights; ranking ignored");
        }
    }
    checked_model(modules.clone())?;
    write_revision(out, &loaded, &modules)?;
    Ok(Exit::Success)
}

fn check_invariants(model: &QualityModel, result: &AssessmentResult) -> CmdResult<()> {
    if result.nodes.len() != model.evaluations().len() {
        return Err(Failure::internal("assessment does not cover every evaluated factor"));
    }
    for node in result.nodes.values() {
        let u = node.utility;
        if !(0.0 <= u.lo && u.lo <= u.hi && u.hi <= 1.0) {
            return Err(Failure::internal(format!("utility of '{}' is not a valid interval", node.factor_id)));
        }
    }
    Ok(())
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect()
}

fn cmd_assess(
    models: &[PathBuf],
    bundles: &[PathBuf],
    manual: Option<&Path>,
    out: &Path,
    format: ReportFormat,
    timestamp: Option<String>,
) -> CmdResult {
    let modules: Vec<ModuleDef> = load_modules(models)?.into_iter().map(|(_, m)| m).collect();
    let (model, _) = checked_model(modules)?;
    let manual_csv = manual.map(read).transpose()?;

    let mut loaded = Vec::new();
    for path in bundles {
        let mut bundle = MeasurementBundle::from_json(&read(path)?)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        if let Some(csv) = &manual_csv {
            for id in bundle.merge_manual_csv(csv.as_slice())? {
                eprintln!("warning: manual value for '{id}' overrides the tool value in {}", path.display());
            }
        }
        for id in bundle.values.keys() {
            if !model.instruments().contains_key(id) {
                eprintln!("warning: {}: unknown instrument '{id}' ignored", path.display());
            }
        }
        loaded.push(bundle);
    }

    let generated_at = timestamp
        .unwrap_or_else(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let meta = ReportMeta { generated_at };

    let results: Vec<Result<AssessmentResult, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = loaded.iter().map(|b| s.spawn(|| assess(&model, b))).collect();
        handles.into_iter().map(|h| h.join().expect("assessment thread panicked")).collect()
    });

    for result in results {
        let result = result.map_err(|e| Failure::internal(format!("assessment failed on a validated model: {e}")))?;
        check_invariants(&model, &result)?;
        let dir = if loaded.len() == 1 {
            out.to_path_buf()
        } else {
            out.join(sanitize(&format!("{}-{}", result.system_name, result.system_version)))
        };
        create_dir(&dir)?;
        if matches!(format, ReportFormat::Json | ReportFormat::Both) {
            write(&dir.join("report.json"), &to_json(&result, &meta))?;
        }
        if matches!(format, ReportFormat::Html | ReportFormat::Both) {
            write(&dir.join("report.html"), &to_html(&result, &meta))?;
        }
    }
    Ok(Exit::Success)
}

struct GradeRow {
    system: String,
    version: String,
    grade: f64,
    discrete: u64,
}

fn read_report(path: &Path, factor: Option<&str>) -> CmdResult<GradeRow> {
    let file = if path.is_dir() { path.join("report.json") } else { path.to_path_buf() };
    let bad = |what: &str| Failure::io(format!("{}: {what}", file.display()));
    let doc: serde_json::Value = serde_json::from_slice(&read(&file)?).map_err(|e| bad(&e.to_string()))?;
    let factor = match factor {
        Some(f) => f.to_string(),
        None => match doc["roots"].as_array().map(Vec::as_slice) {
            Some([only]) => only.as_str().ok_or_else(|| bad("malformed roots"))?.to_string(),
            _ => return Err(bad("report has several root factors; pass --factor")),
        },
    };
    let node = doc["factors"].get(&factor).ok_or_else(|| bad(&format!("no factor '{factor}'")))?;
    Ok(GradeRow {
        system: doc["metadata"]["system"].as_str().ok_or_else(|| bad("missing system"))?.to_string(),
        version: doc["metadata"]["version"].as_str().ok_or_else(|| bad("missing version"))?.to_string(),
        grade: node["raw"]["grade"].as_f64().ok_or_else(|| bad("missing grade"))?,
        discrete: node["grade"]["discrete"].as_u64().ok_or_else(|| bad("missing grade"))?,
    })
}

fn cmd_compare(reports: &[PathBuf], factor: Option<&str>) -> CmdResult {
    let rows = reports.iter().map(|r| read_report(r, factor)).collect::<CmdResult<Vec<_>>>()?;
    println!("{:<24} {:<12} {:>8} {:>6}", "system", "version", "grade", "rank");
    for r in &rows {
        println!("{:<24} {:<12} {:>8.2} {:>6}", r.system, r.version, r.grade, r.discrete);
    }
    println!();
    println!("improvement in percent (positive = better)");
    for (i, a) in rows.iter().enumerate() {
        for b in rows[i + 1..].iter().filter(|b| b.system == a.system) {
            let p = improvement_percent(a.grade, b.grade)?;
            println!("{} {} -> {}: {:.2}", a.system, a.version, b.version, p);
        }
    }
    Ok(Exit::Success)
}

fn cmd_rank_correlate(csv_path: &Path, order: ScoreOrder) -> CmdResult {
    let bytes = read(csv_path)?;
    let mut rdr = csv_reader(&bytes);
    let mut labels = Vec::new();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record.map_err(|e| Failure::io(format!("{}: {e}", csv_path.display())))?;
        if record.len() != 3 {
            return Err(Failure::io(format!("{}: expected 3 columns per row", csv_path.display())));
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| Failure::io(format!("{}: '{s}' is not a number", csv_path.display())))
        };
        labels.push(record[0].to_string());
        a.push(num(&record[1])?);
        b.push(num(&record[2])?);
    }
    let order = match order {
        ScoreOrder::Ascending => RankOrder::Ascending,
        ScoreOrder::Descending => RankOrder::Descending,
    };
    let ra = RankVector::new(labels.clone(), average_ranks(&a, order)?);
    let rb = RankVector::new(labels, average_ranks(&b, order)?);
    let res = spearman(&ra, &rb)?;
    let method = match res.method {
        qassess_core::stats::PValueMethod::ExactPermutation => "exact-permutation",
        qassess_core::stats::PValueMethod::TApproximation => "t-approximation",
    };
    println!("r = {:.4}", res.r);
    println!("p = {:.4} (one-sided, {method})", res.p_one_sided);
    println!("n = {}", res.n);
    Ok(Exit::Success)
}

fn csv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes)
}
