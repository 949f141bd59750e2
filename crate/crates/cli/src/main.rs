use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use techknee_core::datasets::{parse_series_csv, DataSource, Registry};
use techknee_core::gml::{crossover_empirical, crossover_fitted, extrapolate, fit_exponential, knee, CrossoverResult};
use techknee_core::plot;
use techknee_core::sweep::{
    enumerate, feasibility_range, reproduce_published, results_csv, run_all, run_scenario, Axis, Case, CellStatus,
    Detection, Scenario, SweepConfig, SweepContext, MAIL_CASSETTE, MOVIE_MINUTES, SONG_MINUTES,
};
use techknee_core::adoption::UsageMetric;
use techknee_core::{AnnualSeries, Error, Unit};

#[derive(Parser)]
#[command(name = "techknee", version, about = "Forecast when a new technology overtakes an incumbent")]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an exponential improvement curve to a `year,value` CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "media-units-per-real-dollar")]
        unit: Unit,
        #[arg(long)]
        from: Option<i32>,
        #[arg(long)]
        to: Option<i32>,
    },
    /// Find the year a replacement's performance reaches a target's.
    Crossover {
        #[arg(long)]
        replacement: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value = "media-units-per-real-dollar")]
        unit: Unit,
        /// Compare fitted exponentials instead of the data points.
        #[arg(long)]
        fitted: bool,
        /// First year of the fit window (with --fitted).
        #[arg(long, requires = "fitted")]
        from: Option<i32>,
        /// Exit with status 1 if no crossover is found.
        #[arg(long)]
        require_crossover: bool,
    },
    /// Find the first year an adoption share reaches a threshold.
    Knee {
        #[arg(long)]
        input: PathBuf,
        /// Share between 0 and 1, e.g. 0.01 for 1%.
        #[arg(long)]
        threshold: f64,
    },
    /// Run the bundled audio or video case.
    Case {
        case: CaseArg,
        /// Variant of the baseline: a reference media (album, song, clip,
        /// sd_movie, hd_movie), mail_cassette, fit_all, fit_from_1995,
        /// raw_bits or units.
        #[arg(long, default_value = "baseline")]
        scenario: String,
        /// Also write tidy curve data and an SVG chart here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every scenario of a JSON sweep config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute the published crossover and knee tables from bundled data.
    Reproduce {
        /// Exit with status 1 if any cell is outside tolerance.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled tables and their manifests to a directory.
    ExportData {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Audio,
    Video,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Audio => Case::Audio,
            CaseArg::Video => Case::Video,
        }
    }
}

enum Failure {
    /// Bad invocation or unreadable input file.
    Usage(String),
    /// The computation ran but the answer is an error or a failed check.
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match &e {
            Error::Io { .. } | Error::UnknownName(_) => Failure::Usage(e.to_string()),
            Error::Scenario { source, .. } if matches!(**source, Error::UnknownName(_)) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match cli.command {
        Command::Fit { input, unit, from, to } => fit(&input, unit, from, to, json),
        Command::Crossover {
            replacement,
            target,
            unit,
            fitted,
            from,
            require_crossover,
        } => crossover(&replacement, &target, unit, fitted, from, require_crossover, json),
        Command::Knee { input, threshold } => knee_cmd(&input, threshold, json),
        Command::Case { case, scenario, out } => case_cmd(case.into(), &scenario, out.as_deref(), json),
        Command::Sweep { config, out } => sweep(&config, &out, json),
        Command::Reproduce { strict, out } => reproduce(strict, out.as_deref(), json),
        Command::ExportData { out } => export(&out, json),
    }
}

fn emit(json: bool, value: Value, text: String) {
    let body = if json {
        serde_json::to_string_pretty(&value).expect("serializable") + "\n"
    } else {
        text
    };
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
}

fn read_series(path: &Path, unit: Unit) -> Result<AnnualSeries, Failure> {
    if !path.exists() {
        return Err(Failure::Usage(format!("{}: file not found", path.display())));
    }
    Ok(parse_series_csv(path, unit)?)
}

fn window(series: &AnnualSeries, from: Option<i32>, to: Option<i32>) -> Option<(i32, i32)> {
    match (from, to) {
        (None, None) => None,
        _ => Some((from.or(series.first_year())?, to.or(series.last_year())?)),
    }
}

fn fit(input: &Path, unit: Unit, from: Option<i32>, to: Option<i32>, json: bool) -> Outcome {
    let series = read_series(input, unit)?;
    let fit = fit_exponential(&series, window(&series, from, to))?;
    let text = format!(
        "source: {}\nwindow: {}-{} ({} points)\nrate: {:.6} per year\nTIR: {:.1}% per year\nr^2: {:.4}\nvalue at {}: {:.6e} {}\n",
        input.display(),
        fit.window.0,
        fit.window.1,
        fit.n_points,
        fit.rate,
        fit.tir(),
        fit.r_squared,
        fit.t0,
        fit.intercept,
        unit
    );
    emit(
        json,
        json!({
            "command": "fit",
            "source": input.display().to_string(),
            "unit": unit,
            "fit": fit,
            "tir_percent": fit.tir(),
        }),
        text,
    );
    Ok(())
}

fn crossover_text(c: &CrossoverResult) -> String {
    match (c.year, c.fractional_year) {
        (Some(y), Some(f)) => format!("{y} (fitted curves meet at {f:.3})"),
        (Some(y), None) => y.to_string(),
        (None, Some(f)) => format!("none (fitted curves met at {f:.3}, replacement improving more slowly)"),
        (None, None) => "none".into(),
    }
}

fn crossover(
    replacement: &Path,
    target: &Path,
    unit: Unit,
    fitted: bool,
    from: Option<i32>,
    require: bool,
    json: bool,
) -> Outcome {
    let r = read_series(replacement, unit)?;
    let t = read_series(target, unit)?;
    let (result, fits) = if fitted {
        let common = techknee_core::series::align(&r, &t);
        let (Some(first), Some(last)) = (common.first(), common.last()) else {
            return Err(Error::EmptyAlignment.into());
        };
        let window = (from.unwrap_or(first.0), last.0);
        let rf = fit_exponential(&r, Some(window))?;
        let tf = fit_exponential(&t, Some(window))?;
        (crossover_fitted(&rf, &tf)?, Some((rf, tf)))
    } else {
        (crossover_empirical(&r, &t)?, None)
    };
    let mut text = format!(
        "replacement: {}\ntarget: {}\nunit: {unit}\ncrossover: {}\n",
        replacement.display(),
        target.display(),
        crossover_text(&result)
    );
    if let (Some((rf, tf)), Some(year)) = (&fits, result.year) {
        if extrapolate(rf, year).beyond_horizon || extrapolate(tf, year).beyond_horizon {
            text.push_str("warning: crossover lies beyond the extrapolation horizon of the fit window\n");
        }
    }
    emit(
        json,
        json!({
            "command": "crossover",
            "replacement": replacement.display().to_string(),
            "target": target.display().to_string(),
            "unit": unit,
            "crossover": result,
            "fits": fits.map(|(r, t)| json!({"replacement": r, "target": t})),
        }),
        text,
    );
    if require && result.year.is_none() {
        return Err(Failure::Domain("no crossover found".into()));
    }
    Ok(())
}

fn knee_cmd(input: &Path, threshold: f64, json: bool) -> Outcome {
    let series = read_series(input, Unit::DimensionlessShare)?;
    let k = knee(&series, threshold)?;
    let year = k.year.map_or("none".to_string(), |y| y.to_string());
    emit(
        json,
        json!({"command": "knee", "source": input.display().to_string(), "knee": k}),
        format!("source: {}\nknee({}): {year}\n", input.display(), percent(threshold)),
    );
    Ok(())
}

fn context() -> Result<(SweepContext, String), Failure> {
    let registry = Registry::from_env();
    let provenance = match registry.source() {
        DataSource::Embedded => "bundled tables a1-a8".to_string(),
        DataSource::Directory(dir) => format!("tables a1-a8 from {}", dir.display()),
    };
    Ok((SweepContext::new(registry.load_all()?), provenance))
}

fn named_scenario(case: Case, name: &str) -> Result<Scenario, Failure> {
    let mut s = Scenario::baseline(case);
    match name {
        "baseline" => {}
        "album" | "song" | "clip" | "sd_movie" | "hd_movie" => s.reference_media = name.into(),
        "mail_cassette" if case == Case::Audio => s.target = MAIL_CASSETTE.into(),
        "fit_all" => s.detection = Detection::Fitted { from: None, to: None },
        "fit_from_1995" => s.detection = Detection::Fitted { from: Some(1995), to: None },
        "raw_bits" => s.usage_metric = UsageMetric::RawBits,
        "units" => {
            let len = if case == Case::Audio { SONG_MINUTES } else { MOVIE_MINUTES };
            s.usage_metric = UsageMetric::Units { unit_length_minutes: len };
        }
        _ => return Err(Failure::Usage(format!("unknown scenario {name:?} for the {case} case"))),
    }
    Ok(s)
}

fn percent(threshold: f64) -> String {
    let p = format!("{:.6}", threshold * 100.0);
    format!("{}%", p.trim_end_matches('0').trim_end_matches('.'))
}

fn case_cmd(case: Case, name: &str, out: Option<&Path>, json: bool) -> Outcome {
    let scenario = named_scenario(case, name)?;
    let (ctx, provenance) = context()?;
    let result = run_scenario(&scenario, &ctx)?;
    let knee_year = result.knee.and_then(|k| k.year);
    let show = |y: Option<i32>| y.map_or("none".to_string(), |y| y.to_string());
    let text = format!(
        "crossover: {}, knee({}): {}\nscenario: {}\ndata: {provenance}\n",
        show(result.crossover.year),
        percent(scenario.knee_threshold),
        show(knee_year),
        scenario.id()
    );
    if let Some(dir) = out {
        let perf = vec![
            techknee_core::sweep::Curve {
                name: format!("internet_{}", scenario.reference_media),
                series: ctx.replacement_performance(case, &scenario.reference_media)?,
            },
            techknee_core::sweep::Curve {
                name: scenario.target.clone(),
                series: ctx.target_performance(&scenario.target)?,
            },
        ];
        let share = vec![techknee_core::sweep::Curve {
            name: format!("internet_share_{}", scenario.usage_metric.label()),
            series: ctx.adoption(case, scenario.usage_metric)?.expect("bundled case"),
        }];
        write_curves(dir, case.as_str(), &perf, &share)?;
    }
    emit(
        json,
        json!({"command": "case", "data": provenance, "result": result}),
        text,
    );
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Outcome {
    std::fs::write(path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Outcome {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))
}

fn write_curves(
    dir: &Path,
    stem: &str,
    perf: &[techknee_core::sweep::Curve],
    share: &[techknee_core::sweep::Curve],
) -> Outcome {
    create_dir(dir)?;
    let all: Vec<_> = perf.iter().chain(share).cloned().collect();
    write_file(&dir.join(format!("{stem}_curves.csv")), &plot::tidy_csv(&all))?;
    write_file(&dir.join(format!("{stem}_curves.svg")), &plot::svg(perf, share))
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn sweep(config_path: &Path, out: &Path, json: bool) -> Outcome {
    if !config_path.exists() {
        return Err(Failure::Usage(format!("{}: file not found", config_path.display())));
    }
    let config = SweepConfig::from_path(config_path)?;
    let (ctx, provenance) = context()?;
    let ctx = ctx.with_custom(config.load_custom_series()?);
    let scenarios = enumerate(&config, &ctx)?;
    let results = run_all(&scenarios, &ctx)?;
    let mut ranges = Vec::new();
    for axis in [Axis::Case, Axis::Target, Axis::ReferenceMedia, Axis::UsageMetric, Axis::Detection, Axis::KneeThreshold] {
        ranges.extend(feasibility_range(&results, axis)?);
    }
    create_dir(out)?;
    write_file(&out.join("results.csv"), &results_csv(&results))?;
    write_file(&out.join("ranges.json"), &to_json(&ranges))?;

    let overall = &ranges[0];
    let show = |r: Option<techknee_core::sweep::YearRange>| {
        r.map_or("none".to_string(), |r| format!("[{}, {}]", r.min_year, r.max_year))
    };
    let text = format!(
        "scenarios: {}\ncrossover range: {} ({} without crossover)\nknee range: {} ({} without knee)\ndata: {provenance}; config {}\nwrote {}\n",
        results.len(),
        show(overall.crossover),
        overall.crossover_absent,
        show(overall.knee),
        overall.knee_absent,
        config_path.display(),
        out.display()
    );
    emit(
        json,
        json!({"command": "sweep", "data": provenance, "scenarios": results.len(), "ranges": ranges}),
        text,
    );
    Ok(())
}

fn reproduce(strict: bool, out: Option<&Path>, json: bool) -> Outcome {
    let (ctx, provenance) = context()?;
    let report = reproduce_published(&ctx)?;
    let mut text = format!("data: {provenance}\n{:<8} {:<22} {:>8} {:>8} {:>4}  status\n", "table", "cell", "expected", "actual", "tol");
    for c in report.checks() {
        let status = match c.status {
            CellStatus::Pass => "pass".to_string(),
            CellStatus::Fail => "FAIL".to_string(),
            CellStatus::Unsupported => c.note.clone().unwrap_or_default(),
        };
        let actual = c.actual.map_or("-".into(), |y| y.to_string());
        let tol = if c.status == CellStatus::Unsupported { "-".into() } else { format!("±{}", c.tolerance) };
        text.push_str(&format!("{:<8} {:<22} {:>8} {:>8} {:>4}  {status}", c.table, c.cell, c.expected, actual, tol));
        if let (Some(note), CellStatus::Pass | CellStatus::Fail) = (&c.note, c.status) {
            text.push_str(&format!(" ({note})"));
        }
        text.push('\n');
    }
    let failures = report.failures().len();
    text.push_str(&format!("{failures} cell(s) outside tolerance\n"));

    if let Some(dir) = out {
        create_dir(dir)?;
        let mut w = String::from("table,cell,expected,actual,tolerance,status\n");
        for c in report.checks() {
            let status = serde_json::to_value(c.status).expect("serializable");
            w.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.table,
                c.cell,
                c.expected,
                c.actual.map_or(String::new(), |y| y.to_string()),
                c.tolerance,
                status.as_str().expect("string status")
            ));
        }
        write_file(&dir.join("cells.csv"), &w)?;
        write_file(&dir.join("results.csv"), &results_csv(&report.results))?;
        write_file(&dir.join("ranges.json"), &to_json(&report.ranges))?;
        write_file(&dir.join("report.json"), &to_json(&report))?;
        write_curves(dir, "fig3", &report.performance_curves, &report.adoption_curves)?;
    }
    emit(
        json,
        json!({
            "command": "reproduce",
            "data": provenance,
            "cells": report.cells,
            "ranges": report.ranges,
            "range_checks": report.range_checks,
            "failures": failures,
        }),
        text,
    );
    if strict && failures > 0 {
        return Err(Failure::Domain(format!("{failures} cell(s) outside tolerance")));
    }
    Ok(())
}

fn export(out: &Path, json: bool) -> Outcome {
    let registry = Registry::from_env();
    let written = registry.export(out)?;
    let names: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    let text = names.iter().map(|n| format!("wrote {n}\n")).collect();
    emit(json, json!({"command": "export-data", "files": names}), text);
    Ok(())
}
