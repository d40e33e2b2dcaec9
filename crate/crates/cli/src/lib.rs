//! The `tracy` command line.
//!
//! Exit codes: 0 success, 1 `validate` found errors, 2 unreadable or invalid
//! input, 64 usage error. Reports go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use tracy_core::ingest::{import_issues, merge_imported, parse_model, serialize_model, ImportMapping};
use tracy_core::model::{has_errors, sort_diagnostics, validate, Diagnostic, Severity};
use tracy_core::render::{
    ascii_safe, layout_prioritization_canvas, render_business_value_canvas, render_canvas, render_impact_report,
    render_priority_table, CanvasFormat, Selector, TableFormat,
};
use tracy_core::{
    apply_whatif, AssetState, Id, ImpactReport, Model, PrioritizationRule, Prioritizer, ProcessClass, WhatIfOverrides,
};

pub const NO_COLOR_ENV: &str = "TRACY_NO_COLOR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "tracy", version, about = "Technical debt prioritization by business impact")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model document and list its diagnostics
    Validate { model: PathBuf },
    /// Group debt items by effective rank
    Prioritize {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
        /// Add per-horizon business metrics at risk
        #[arg(long)]
        impact: bool,
    },
    /// Show what one debt item reaches
    Impact {
        model: PathBuf,
        #[arg(long)]
        item: String,
    },
    /// Render the prioritization or business-value canvas
    Canvas {
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: CanvasKind,
        /// Business-value canvas only: restrict to one process or asset
        #[arg(long)]
        entity: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Turn an issue-tracker export into debt items
    ImportIssues {
        model: PathBuf,
        export: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        /// Rewrite the model file instead of printing the merged document
        #[arg(long)]
        write: bool,
    },
    /// Preview priorities under hypothetical changes; nothing is saved
    Whatif {
        model: PathBuf,
        /// Asset state override, e.g. sales-mobile=operational
        #[arg(long = "asset", value_name = "ID=STATE", value_parser = parse_pair::<AssetState>)]
        assets: Vec<(Id, AssetState)>,
        /// Process class override, e.g. offers=core
        #[arg(long = "bp", value_name = "ID=CLASS", value_parser = parse_pair::<ProcessClass>)]
        processes: Vec<(Id, ProcessClass)>,
        /// Replacement rule: a JSON object with the four rank cells
        #[arg(long)]
        rule: Option<PathBuf>,
    },
    /// Serve the HTTP API for one model file
    Serve {
        model: PathBuf,
        #[arg(long)]
        port: u16,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CanvasKind {
    Prioritization,
    BusinessValue,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Dot,
    Json,
}

impl From<OutputFormat> for CanvasFormat {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Text => CanvasFormat::Text,
            OutputFormat::Dot => CanvasFormat::Dot,
            OutputFormat::Json => CanvasFormat::Structured,
        }
    }
}

fn parse_pair<T>(raw: &str) -> Result<(Id, T), String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    let (id, value) = raw
        .split_once('=')
        .ok_or_else(|| format!("expected ID=VALUE, got {raw:?}"))?;
    let id = id.parse::<Id>().map_err(|e| e.to_string())?;
    let value = value.parse::<T>().map_err(|e| e.to_string())?;
    Ok((id, value))
}

/// How diagnostics are printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Style {
    pub color: bool,
}

impl Style {
    pub const PLAIN: Style = Style { color: false };

    /// Color only on a terminal and only when `TRACY_NO_COLOR` is unset.
    pub fn detect() -> Style {
        Style {
            color: std::env::var_os(NO_COLOR_ENV).is_none() && std::io::stderr().is_terminal(),
        }
    }
}

/// A run stopped early; the message has already been written.
struct Exit(i32);

type Outcome = Result<i32, Exit>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    style: Style,
}

impl Io<'_> {
    fn diagnostic(&mut self, d: &Diagnostic) {
        let line = ascii_safe(&d.to_string());
        let line = match (self.style.color, d.severity) {
            (false, _) => line,
            (true, Severity::Error) => format!("\x1b[31m{line}\x1b[0m"),
            (true, Severity::Warning) => format!("\x1b[33m{line}\x1b[0m"),
        };
        let _ = writeln!(self.err, "{line}");
    }

    fn diagnostics(&mut self, list: &[Diagnostic]) {
        for d in list {
            self.diagnostic(d);
        }
    }

    fn fail(&mut self, code: i32, message: impl AsRef<str>) -> Exit {
        let prefix = if self.style.color {
            "\x1b[31merror\x1b[0m"
        } else {
            "error"
        };
        let _ = writeln!(self.err, "{prefix}: {}", ascii_safe(message.as_ref()));
        Exit(code)
    }

    fn emit(&mut self, bytes: &[u8]) -> Outcome {
        self.out
            .write_all(bytes)
            .map_err(|e| self.fail(EXIT_INPUT, format!("cannot write output: {e}")))?;
        Ok(EXIT_OK)
    }
}

/// Runs `argv` (program name first) with plain diagnostics.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_styled(argv, out, err, Style::PLAIN)
}

pub fn run_styled<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write, style: Style) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut io = Io { out, err, style };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let mut text = e.render().to_string();
            return if e.use_stderr() {
                if !text.contains("Usage:") {
                    text = format!("{text}\n{}\n", Cli::command().render_usage());
                }
                let _ = io.err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = io.out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Validate { model } => cmd_validate(&mut io, &model),
        Command::Prioritize { model, format, impact } => cmd_prioritize(&mut io, &model, format, impact),
        Command::Impact { model, item } => cmd_impact(&mut io, &model, &item),
        Command::Canvas {
            model,
            kind,
            entity,
            format,
        } => cmd_canvas(&mut io, &model, kind, entity.as_deref(), format.into()),
        Command::ImportIssues {
            model,
            export,
            mapping,
            write,
        } => cmd_import(&mut io, &model, &export, &mapping, write),
        Command::Whatif {
            model,
            assets,
            processes,
            rule,
        } => cmd_whatif(&mut io, &model, assets, processes, rule.as_deref()),
        Command::Serve { model, port } => cmd_serve(&mut io, &model, port),
    };
    match outcome {
        Ok(code) | Err(Exit(code)) => code,
    }
}

fn read(io: &mut Io, path: &Path) -> Result<Vec<u8>, Exit> {
    fs::read(path).map_err(|e| io.fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

/// Parses `path`, printing warnings. Parse failures exit with 2.
fn parse(io: &mut Io, path: &Path) -> Result<(Model, Vec<Diagnostic>), Exit> {
    let bytes = read(io, path)?;
    match parse_model(&bytes) {
        Ok(parsed) => Ok((parsed.model, parsed.warnings)),
        Err(errors) => {
            for e in &errors {
                let _ = writeln!(io.err, "{}: {}", path.display(), ascii_safe(&e.to_string()));
            }
            Err(io.fail(EXIT_INPUT, format!("{} could not be parsed", path.display())))
        }
    }
}

/// A model the engine accepts. Warnings go to stderr; errors exit with 2.
fn load(io: &mut Io, path: &Path) -> Result<Model, Exit> {
    let (model, mut diagnostics) = parse(io, path)?;
    diagnostics.extend(validate(&model));
    sort_diagnostics(&mut diagnostics);
    io.diagnostics(&diagnostics);
    if has_errors(&diagnostics) {
        return Err(io.fail(EXIT_INPUT, format!("{} is not a valid model", path.display())));
    }
    Ok(model)
}

fn cmd_validate(io: &mut Io, path: &Path) -> Outcome {
    let (model, mut diagnostics) = parse(io, path)?;
    diagnostics.extend(validate(&model));
    sort_diagnostics(&mut diagnostics);
    io.diagnostics(&diagnostics);
    let errors = diagnostics.iter().filter(|d| d.is_error()).count();
    let warnings = diagnostics.len() - errors;
    let _ = writeln!(
        io.out,
        "{}: {errors} error(s), {warnings} warning(s); {} process(es), {} asset(s), {} configuration item(s), {} debt item(s)",
        ascii_safe(&path.display().to_string()),
        model.business_processes.len(),
        model.it_assets.len(),
        model.configuration_items.len(),
        model.debt_items.len(),
    );
    Ok(if errors > 0 { EXIT_FINDINGS } else { EXIT_OK })
}

fn engine_failure(io: &mut Io, err: impl std::fmt::Display) -> Exit {
    io.fail(EXIT_INPUT, err.to_string())
}

fn table_bytes(io: &mut Io, model: &Model, format: ReportFormat, with_impact: bool) -> Result<Vec<u8>, Exit> {
    let engine = Prioritizer::new(model).map_err(|e| engine_failure(io, e))?;
    let report = engine.prioritize().map_err(|e| engine_failure(io, e))?;
    let impacts: Option<Vec<ImpactReport>> = if with_impact {
        let mut list = Vec::new();
        for item in &model.debt_items {
            list.push(engine.impact_of(item.id.as_str()).map_err(|e| engine_failure(io, e))?);
        }
        list.sort_by(|a, b| a.item.cmp(&b.item));
        Some(list)
    } else {
        None
    };
    let bytes =
        match format {
            ReportFormat::Json => {
                let value = match &impacts {
                    None => serde_json::to_value(&report),
                    Some(list) => serde_json::to_value(serde_json::json!({ "report": report, "impacts": list })),
                }
                .expect("reports serialize");
                let mut out = serde_json::to_vec_pretty(&value).expect("reports serialize");
                out.push(b'\n');
                out
            }
            ReportFormat::Table => render_priority_table(&report, impacts.as_deref(), TableFormat::Text)
                .map_err(|e| engine_failure(io, e))?,
            ReportFormat::Csv => render_priority_table(&report, impacts.as_deref(), TableFormat::Csv)
                .map_err(|e| engine_failure(io, e))?,
        };
    Ok(bytes)
}

fn cmd_prioritize(io: &mut Io, path: &Path, format: ReportFormat, with_impact: bool) -> Outcome {
    let model = load(io, path)?;
    let bytes = table_bytes(io, &model, format, with_impact)?;
    io.emit(&bytes)
}

fn cmd_impact(io: &mut Io, path: &Path, item: &str) -> Outcome {
    let model = load(io, path)?;
    let report = tracy_core::impact_of(&model, item).map_err(|e| engine_failure(io, e))?;
    io.emit(&render_impact_report(&report))
}

fn cmd_canvas(io: &mut Io, path: &Path, kind: CanvasKind, entity: Option<&str>, format: CanvasFormat) -> Outcome {
    if entity.is_some() && matches!(kind, CanvasKind::Prioritization) {
        return Err(io.fail(EXIT_USAGE, "--entity applies only to --kind business-value"));
    }
    let model = load(io, path)?;
    let bytes = match kind {
        CanvasKind::Prioritization => {
            let layout = layout_prioritization_canvas(&model).map_err(|e| engine_failure(io, e))?;
            render_canvas(&layout, format)
        }
        CanvasKind::BusinessValue => {
            let selector = match entity {
                None => Selector::All,
                Some(raw) => Selector::Entity(raw.parse::<Id>().map_err(|e| engine_failure(io, e))?),
            };
            render_business_value_canvas(&model, &selector, format).map_err(|e| engine_failure(io, e))?
        }
    };
    io.emit(&bytes)
}

fn cmd_import(io: &mut Io, path: &Path, export: &Path, mapping: &Path, write: bool) -> Outcome {
    let model = load(io, path)?;
    let mapping_bytes = read(io, mapping)?;
    let mapping: ImportMapping = serde_json::from_slice(&mapping_bytes)
        .map_err(|e| io.fail(EXIT_INPUT, format!("{}: {e}", mapping.display())))?;
    let export_bytes = read(io, export)?;
    let (items, mut diagnostics) = import_issues(&export_bytes, &mapping, &model)
        .map_err(|e| io.fail(EXIT_INPUT, format!("{}: {e}", export.display())))?;
    let (merged, merge_diagnostics) = merge_imported(&model, &items);
    diagnostics.extend(merge_diagnostics);
    sort_diagnostics(&mut diagnostics);
    io.diagnostics(&diagnostics);
    let problems = validate(&merged);
    if has_errors(&problems) {
        io.diagnostics(&problems);
        return Err(io.fail(EXIT_INPUT, "merged model is not valid; nothing written"));
    }
    let bytes = serialize_model(&merged);
    if write {
        write_atomically(path, &bytes)
            .map_err(|e| io.fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display())))?;
        let _ = writeln!(io.out, "imported {} item(s) into {}", items.len(), path.display());
        Ok(EXIT_OK)
    } else {
        io.emit(&bytes)
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn cmd_whatif(
    io: &mut Io,
    path: &Path,
    assets: Vec<(Id, AssetState)>,
    processes: Vec<(Id, ProcessClass)>,
    rule: Option<&Path>,
) -> Outcome {
    let model = load(io, path)?;
    let rule_replacement = match rule {
        None => None,
        Some(rule_path) => {
            let bytes = read(io, rule_path)?;
            let rule: PrioritizationRule = serde_json::from_slice(&bytes)
                .map_err(|e| io.fail(EXIT_INPUT, format!("{}: {e}", rule_path.display())))?;
            Some(rule)
        }
    };
    let overrides = WhatIfOverrides {
        asset_state_changes: assets.into_iter().collect(),
        process_class_changes: processes.into_iter().collect(),
        rule_replacement,
    };
    let outcome = apply_whatif(&model, &overrides).map_err(|e| engine_failure(io, e))?;
    let table = render_priority_table(&outcome.report, None, TableFormat::Text).map_err(|e| engine_failure(io, e))?;
    if outcome.delta.is_empty() {
        let _ = writeln!(io.err, "no rank changes");
    }
    for change in &outcome.delta {
        let _ = writeln!(io.err, "{}: {} -> {}", change.item, change.old, change.new);
    }
    io.emit(&table)
}

fn cmd_serve(io: &mut Io, path: &Path, port: u16) -> Outcome {
    let err = &mut *io.err;
    let result = tracy_service::serve(path, port, |addr| {
        let _ = writeln!(err, "serving {} on http://{addr}", path.display());
        let _ = err.flush();
    });
    result.map_err(|e| io.fail(EXIT_INPUT, e.to_string()))?;
    Ok(EXIT_OK)
}
