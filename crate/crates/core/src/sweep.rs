//! Scenario sweeps over the uncertainty axes (target, reference media, usage
//! metric, detection mode, knee threshold), feasibility ranges, and the
//! published-table reproduction report.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adoption::{MediaMarket, UsageMetric};
use crate::cost::{internet_distribution_perf, mail_distribution_perf, InternetPricing, MailSpec, MediaKind, MediaSpec};
use crate::datasets::{parse_series_csv, Datasets};
use crate::error::{Error, Result};
use crate::gml::{crossover_empirical, crossover_fitted, fit_exponential, knee, CrossoverResult, ExpFit, KneeResult, EXTRAPOLATION_HORIZON_YEARS};
use crate::series::{annualize, AnnualSeries, ProbeDate, Unit};

/// Years over which distribution performance is compared.
pub const PERFORMANCE_YEARS: RangeInclusive<i32> = 1983..=2015;

/// Length of a song when counting audio in whole units.
pub const SONG_MINUTES: f64 = 3.0;
/// Length of a movie when counting video in whole units.
pub const MOVIE_MINUTES: f64 = 90.0;

pub const MAIL_CD: &str = "mail_cd";
pub const MAIL_CASSETTE: &str = "mail_cassette";
pub const MAIL_DVD: &str = "mail_dvd";

const CD_WEIGHT_OUNCES: f64 = 1.0;
const CASSETTE_WEIGHT_OUNCES: f64 = 2.0;
const DVD_WEIGHT_OUNCES: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Audio,
    Video,
    /// Replacement performance and adoption come from user series.
    Custom,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::Audio => "audio",
            Case::Video => "video",
            Case::Custom => "custom",
        }
    }

    fn media_kind(self) -> Option<MediaKind> {
        match self {
            Case::Audio => Some(MediaKind::Audio),
            Case::Video => Some(MediaKind::Video),
            Case::Custom => None,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    Empirical,
    /// Both curves fitted over `from..=to`; open ends default to the data.
    Fitted {
        #[serde(default)]
        from: Option<i32>,
        #[serde(default)]
        to: Option<i32>,
    },
}

impl Detection {
    pub fn label(&self) -> String {
        match self {
            Detection::Empirical => "empirical".into(),
            Detection::Fitted { from, to } => {
                let end = |y: &Option<i32>| y.map_or(String::new(), |y| y.to_string());
                format!("fitted:{}-{}", end(from), end(to))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub case: Case,
    pub target: String,
    pub reference_media: String,
    pub usage_metric: UsageMetric,
    pub detection: Detection,
    pub knee_threshold: f64,
}

impl Scenario {
    pub fn baseline(case: Case) -> Self {
        let (target, media) = match case {
            Case::Video => (MAIL_DVD, "clip"),
            _ => (MAIL_CD, "album"),
        };
        Self {
            case,
            target: target.into(),
            reference_media: media.into(),
            usage_metric: UsageMetric::Minutes,
            detection: Detection::Empirical,
            knee_threshold: 0.01,
        }
    }

    pub fn id(&self) -> String {
        format!(
            "{}/{}/{}/{}/{}/{}",
            self.case,
            self.target,
            self.reference_media,
            self.usage_metric.label(),
            self.detection.label(),
            self.knee_threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomSeriesSpec {
    pub path: PathBuf,
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub case: Case,
    pub targets: Vec<String>,
    pub reference_media: Vec<String>,
    pub usage_metrics: Vec<UsageMetric>,
    pub detection: Vec<Detection>,
    pub knee_thresholds: Vec<f64>,
    #[serde(default)]
    pub custom_series: BTreeMap<String, CustomSeriesSpec>,
}

impl SweepConfig {
    /// Reads a config; relative custom-series paths are resolved against the
    /// config file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: SweepConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for spec in config.custom_series.values_mut() {
            if spec.path.is_relative() {
                spec.path = base.join(&spec.path);
            }
        }
        Ok(config)
    }

    pub fn load_custom_series(&self) -> Result<BTreeMap<String, AnnualSeries>> {
        self.custom_series
            .iter()
            .map(|(name, spec)| Ok((name.clone(), parse_series_csv(&spec.path, spec.unit)?)))
            .collect()
    }
}

/// Bundled data plus any user series, shared by every scenario.
#[derive(Debug, Clone)]
pub struct SweepContext {
    pub datasets: Datasets,
    pub custom: BTreeMap<String, AnnualSeries>,
    pub probe: ProbeDate,
}

impl SweepContext {
    pub fn new(datasets: Datasets) -> Self {
        Self {
            datasets,
            custom: BTreeMap::new(),
            probe: ProbeDate::MID_YEAR,
        }
    }

    pub fn with_custom(mut self, custom: BTreeMap<String, AnnualSeries>) -> Self {
        self.custom = custom;
        self
    }

    fn mail_weight(name: &str) -> Option<f64> {
        match name {
            MAIL_CD => Some(CD_WEIGHT_OUNCES),
            MAIL_CASSETTE => Some(CASSETTE_WEIGHT_OUNCES),
            MAIL_DVD => Some(DVD_WEIGHT_OUNCES),
            _ => None,
        }
    }

    fn check_target(&self, name: &str) -> Result<()> {
        if self.custom.contains_key(name) || Self::mail_weight(name).is_some() {
            Ok(())
        } else if name.starts_with("drive") {
            Err(Error::InvalidParameter(format!(
                "target {name:?} is unsupported: no cost model; supply it as a custom series"
            )))
        } else {
            Err(Error::UnknownName(format!("target {name:?}")))
        }
    }

    fn check_reference(&self, case: Case, name: &str) -> Result<()> {
        match case.media_kind() {
            None if self.custom.contains_key(name) => Ok(()),
            None => Err(Error::UnknownName(format!("custom replacement series {name:?}"))),
            Some(kind) => match MediaSpec::preset(name) {
                Some(spec) if spec.kind() == kind => Ok(()),
                Some(spec) => Err(Error::WrongMediaKind {
                    expected: kind.as_str(),
                    found: spec.kind().as_str(),
                }),
                None => Err(Error::UnknownName(format!("reference media {name:?}"))),
            },
        }
    }

    /// Target performance in items per real dollar.
    pub fn target_performance(&self, name: &str) -> Result<AnnualSeries> {
        if let Some(series) = self.custom.get(name) {
            return match series.unit() {
                Unit::MediaUnitsPerRealDollar => Ok(series.clone()),
                Unit::RealDollars => series.map_values(Unit::MediaUnitsPerRealDollar, |_, cost| 1.0 / cost),
                found => Err(Error::UnitMismatch {
                    expected: Unit::RealDollars,
                    found,
                }),
            };
        }
        self.check_target(name)?;
        let weight = Self::mail_weight(name).expect("checked");
        let postage = annualize(&self.datasets.postage.real, PERFORMANCE_YEARS, self.probe, Unit::RealDollars)?;
        let [first, additional]: [AnnualSeries; 2] = postage.try_into().expect("two postage columns");
        mail_distribution_perf(&MailSpec::new(weight, first, additional)?, PERFORMANCE_YEARS)
    }

    /// Internet distribution performance for one reference item.
    pub fn replacement_performance(&self, case: Case, reference_media: &str) -> Result<AnnualSeries> {
        self.check_reference(case, reference_media)?;
        let Some(kind) = case.media_kind() else {
            let series = &self.custom[reference_media];
            series.expect_unit(Unit::MediaUnitsPerRealDollar)?;
            return Ok(series.clone());
        };
        let spec = MediaSpec::preset(reference_media).expect("checked");
        let pricing = InternetPricing::new(self.datasets.bandwidth_cost.real.clone())?;
        let compression = match kind {
            MediaKind::Audio => &self.datasets.compression.audio,
            MediaKind::Video => &self.datasets.compression.video,
        };
        internet_distribution_perf(&pricing, compression, &spec, PERFORMANCE_YEARS)
    }

    pub fn market(&self, kind: MediaKind) -> Result<MediaMarket> {
        let d = &self.datasets;
        let (share, compression, physical) = match kind {
            MediaKind::Audio => (&d.media_share.audio, &d.compression.audio, d.audio_physical_media()?),
            MediaKind::Video => (&d.media_share.video, &d.compression.video, d.video_physical_media()?),
        };
        Ok(MediaMarket {
            kind,
            traffic_bits: d.traffic_bits.clone(),
            media_share: share.clone(),
            compression: compression.clone(),
            physical,
        })
    }

    /// Internet share of usage, or the user's `adoption` series for custom
    /// cases.
    pub fn adoption(&self, case: Case, metric: UsageMetric) -> Result<Option<AnnualSeries>> {
        match case.media_kind() {
            Some(kind) => Ok(Some(self.market(kind)?.adoption(metric)?.share)),
            None => Ok(self.custom.get("adoption").cloned()),
        }
    }
}

/// Lists every scenario of the config, first axis varying slowest.
pub fn enumerate(config: &SweepConfig, context: &SweepContext) -> Result<Vec<Scenario>> {
    let axes = [
        ("targets", config.targets.len()),
        ("reference_media", config.reference_media.len()),
        ("usage_metrics", config.usage_metrics.len()),
        ("detection", config.detection.len()),
        ("knee_thresholds", config.knee_thresholds.len()),
    ];
    if let Some((axis, _)) = axes.iter().find(|(_, n)| *n == 0) {
        return Err(Error::InvalidParameter(format!("axis {axis} needs at least one value")));
    }
    for target in &config.targets {
        context.check_target(target)?;
    }
    for media in &config.reference_media {
        context.check_reference(config.case, media)?;
    }
    for &t in &config.knee_thresholds {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidParameter(format!("knee threshold {t} must lie strictly between 0 and 1")));
        }
    }
    let mut out = Vec::new();
    for target in &config.targets {
        for media in &config.reference_media {
            for &usage_metric in &config.usage_metrics {
                for &detection in &config.detection {
                    for &knee_threshold in &config.knee_thresholds {
                        out.push(Scenario {
                            case: config.case,
                            target: target.clone(),
                            reference_media: media.clone(),
                            usage_metric,
                            detection,
                            knee_threshold,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub replacement: ExpFit,
    pub target: ExpFit,
    /// The fitted crossover lies more than the extrapolation horizon
    /// outside the fit window.
    pub beyond_horizon: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub crossover: CrossoverResult,
    pub knee: Option<KneeResult>,
    pub diagnostics: Option<FitDiagnostics>,
}

pub fn run_scenario(scenario: &Scenario, context: &SweepContext) -> Result<SweepResult> {
    run_inner(scenario, context).map_err(|e| Error::Scenario {
        id: scenario.id(),
        source: Box::new(e),
    })
}

fn run_inner(s: &Scenario, context: &SweepContext) -> Result<SweepResult> {
    let replacement = context.replacement_performance(s.case, &s.reference_media)?;
    let target = context.target_performance(&s.target)?;
    let (crossover, diagnostics) = match s.detection {
        Detection::Empirical => (crossover_empirical(&replacement, &target)?, None),
        Detection::Fitted { from, to } => {
            let common = crate::series::align(&replacement, &target);
            let (Some(first), Some(last)) = (common.first(), common.last()) else {
                return Err(Error::EmptyAlignment);
            };
            let window = (from.unwrap_or(first.0), to.unwrap_or(last.0));
            let r = fit_exponential(&replacement, Some(window))?;
            let t = fit_exponential(&target, Some(window))?;
            let crossover = crossover_fitted(&r, &t)?;
            let beyond_horizon = crossover.fractional_year.is_some_and(|y| {
                let h = f64::from(EXTRAPOLATION_HORIZON_YEARS);
                y < f64::from(window.0) - h || y > f64::from(window.1) + h
            });
            (
                crossover,
                Some(FitDiagnostics {
                    replacement: r,
                    target: t,
                    beyond_horizon,
                }),
            )
        }
    };
    let knee = match context.adoption(s.case, s.usage_metric)? {
        Some(share) => Some(knee(&share, s.knee_threshold)?),
        None => None,
    };
    Ok(SweepResult {
        scenario: s.clone(),
        crossover,
        knee,
        diagnostics,
    })
}

/// Runs scenarios in parallel; results keep the input order.
pub fn run_all(scenarios: &[Scenario], context: &SweepContext) -> Result<Vec<SweepResult>> {
    scenarios.par_iter().map(|s| run_scenario(s, context)).collect()
}

/// Runs scenarios one at a time in `order` (a permutation of indices) and
/// merges by index, so the output never depends on evaluation order.
pub fn run_in_order(scenarios: &[Scenario], context: &SweepContext, order: &[usize]) -> Result<Vec<SweepResult>> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..scenarios.len()).collect::<Vec<_>>() {
        return Err(Error::InvalidParameter("evaluation order must be a permutation of scenario indices".into()));
    }
    let mut slots: Vec<Option<SweepResult>> = vec![None; scenarios.len()];
    for &i in order {
        slots[i] = Some(run_scenario(&scenarios[i], context)?);
    }
    Ok(slots.into_iter().map(|r| r.expect("every index ran")).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Case,
    Target,
    ReferenceMedia,
    UsageMetric,
    Detection,
    KneeThreshold,
}

impl Axis {
    fn key(self, s: &Scenario) -> String {
        match self {
            Axis::Case => s.case.to_string(),
            Axis::Target => s.target.clone(),
            Axis::ReferenceMedia => s.reference_media.clone(),
            Axis::UsageMetric => s.usage_metric.label(),
            Axis::Detection => s.detection.label(),
            Axis::KneeThreshold => s.knee_threshold.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub min_year: i32,
    pub max_year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityRange {
    pub axis: Axis,
    pub group: String,
    pub scenarios: usize,
    pub crossover: Option<YearRange>,
    pub crossover_absent: usize,
    pub knee: Option<YearRange>,
    pub knee_absent: usize,
}

fn year_range(years: impl Iterator<Item = Option<i32>>) -> (Option<YearRange>, usize) {
    let mut range: Option<YearRange> = None;
    let mut absent = 0;
    for year in years {
        match (year, &mut range) {
            (None, _) => absent += 1,
            (Some(y), None) => range = Some(YearRange { min_year: y, max_year: y }),
            (Some(y), Some(r)) => {
                r.min_year = r.min_year.min(y);
                r.max_year = r.max_year.max(y);
            }
        }
    }
    (range, absent)
}

/// Min/max crossover and knee years per value of `group_by`, groups in
/// order of first appearance.
pub fn feasibility_range(results: &[SweepResult], group_by: Axis) -> Result<Vec<FeasibilityRange>> {
    if results.is_empty() {
        return Err(Error::InvalidParameter("no results to summarize".into()));
    }
    let mut groups: Vec<(String, Vec<&SweepResult>)> = Vec::new();
    for r in results {
        let key = group_by.key(&r.scenario);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(group, members)| {
            let (crossover, crossover_absent) = year_range(members.iter().map(|r| r.crossover.year));
            let (knee, knee_absent) = year_range(members.iter().map(|r| r.knee.and_then(|k| k.year)));
            FeasibilityRange {
                axis: group_by,
                group,
                scenarios: members.len(),
                crossover,
                crossover_absent,
                knee,
                knee_absent,
            }
        })
        .collect())
}

/// One row per scenario.
pub fn results_csv(results: &[SweepResult]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "id",
        "case",
        "target",
        "reference_media",
        "usage_metric",
        "detection",
        "knee_threshold",
        "crossover_year",
        "crossover_fractional_year",
        "knee_year",
        "replacement_tir_percent",
        "target_tir_percent",
        "beyond_horizon",
    ])
    .expect("in-memory write");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in results {
        let s = &r.scenario;
        let d = r.diagnostics.as_ref();
        w.write_record([
            s.id(),
            s.case.to_string(),
            s.target.clone(),
            s.reference_media.clone(),
            s.usage_metric.label(),
            s.detection.label(),
            s.knee_threshold.to_string(),
            opt(r.crossover.year.map(|y| y.to_string())),
            opt(r.crossover.fractional_year.map(|y| y.to_string())),
            opt(r.knee.and_then(|k| k.year).map(|y| y.to_string())),
            opt(d.map(|d| d.replacement.tir().to_string())),
            opt(d.map(|d| d.target.tir().to_string())),
            opt(d.map(|d| d.beyond_horizon.to_string())),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pass,
    Fail,
    Unsupported,
}

/// One published cell compared with the computed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellCheck {
    pub table: String,
    pub cell: String,
    pub expected: i32,
    pub actual: Option<i32>,
    pub tolerance: i32,
    pub status: CellStatus,
    pub note: Option<String>,
}

impl CellCheck {
    fn compare(table: &str, cell: impl Into<String>, expected: i32, actual: Option<i32>, tolerance: i32) -> Self {
        let ok = actual.is_some_and(|a| (a - expected).abs() <= tolerance);
        Self {
            table: table.into(),
            cell: cell.into(),
            expected,
            actual,
            tolerance,
            status: if ok { CellStatus::Pass } else { CellStatus::Fail },
            note: None,
        }
    }

    fn unsupported(table: &str, cell: &str, expected: i32) -> Self {
        Self {
            table: table.into(),
            cell: cell.into(),
            expected,
            actual: None,
            tolerance: 0,
            status: CellStatus::Unsupported,
            note: Some("unsupported: no cost model for this target".into()),
        }
    }
}

/// A named curve for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub name: String,
    pub series: AnnualSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub cells: Vec<CellCheck>,
    /// Crossover and knee ranges per case over the crossover tables.
    pub ranges: Vec<FeasibilityRange>,
    pub range_checks: Vec<CellCheck>,
    pub results: Vec<SweepResult>,
    pub performance_curves: Vec<Curve>,
    pub adoption_curves: Vec<Curve>,
}

impl ReproductionReport {
    pub fn checks(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().chain(&self.range_checks)
    }

    pub fn all_pass(&self) -> bool {
        self.checks().all(|c| c.status != CellStatus::Fail)
    }

    pub fn failures(&self) -> Vec<&CellCheck> {
        self.checks().filter(|c| c.status == CellStatus::Fail).collect()
    }

    pub fn cell(&self, table: &str, cell: &str) -> Option<&CellCheck> {
        self.checks().find(|c| c.table == table && c.cell == cell)
    }
}

fn scenario(case: Case, target: &str, media: &str, metric: UsageMetric, detection: Detection, threshold: f64) -> Scenario {
    Scenario {
        case,
        target: target.into(),
        reference_media: media.into(),
        usage_metric: metric,
        detection,
        knee_threshold: threshold,
    }
}

const FIT_ALL: Detection = Detection::Fitted { from: None, to: None };
const FIT_FROM_1995: Detection = Detection::Fitted { from: Some(1995), to: None };

/// Recomputes every reproducible published cell from the bundled data.
pub fn reproduce_published(context: &SweepContext) -> Result<ReproductionReport> {
    use Case::{Audio, Video};
    use Detection::Empirical;
    use UsageMetric::{Minutes, RawBits};
    let songs = UsageMetric::Units { unit_length_minutes: SONG_MINUTES };
    let movies = UsageMetric::Units { unit_length_minutes: MOVIE_MINUTES };

    // (table, cell, scenario, expected, tolerance); knee cells use the knee,
    // others the crossover.
    type Spec = (&'static str, &'static str, Scenario, i32, i32);
    let cross = |table, cell, case, target, media, detection, expected, tol| -> Spec {
        (table, cell, scenario(case, target, media, Minutes, detection, 0.01), expected, tol)
    };
    let adopt = |cell, case, metric, threshold, expected, tol| -> Spec {
        let (target, media) = if case == Audio { (MAIL_CD, "album") } else { (MAIL_DVD, "clip") };
        ("table3", cell, scenario(case, target, media, metric, Empirical, threshold), expected, tol)
    };
    let crossover_specs: Vec<Spec> = vec![
        cross("table2", "audio/mail_cd", Audio, MAIL_CD, "album", Empirical, 1998, 0),
        cross("table2", "audio/mail_cassette", Audio, MAIL_CASSETTE, "album", Empirical, 1997, 0),
        cross("table2", "video/mail_dvd", Video, MAIL_DVD, "clip", Empirical, 2002, 0),
        cross("table4", "audio/album", Audio, MAIL_CD, "album", Empirical, 1998, 0),
        cross("table4", "audio/song", Audio, MAIL_CD, "song", Empirical, 1992, 0),
        cross("table4", "video/clip", Video, MAIL_DVD, "clip", Empirical, 2002, 0),
        cross("table4", "video/sd_movie", Video, MAIL_DVD, "sd_movie", Empirical, 2007, 1),
        cross("table4", "video/hd_movie", Video, MAIL_DVD, "hd_movie", Empirical, 2008, 1),
        cross("table5", "audio/empirical", Audio, MAIL_CD, "album", Empirical, 1998, 0),
        cross("table5", "audio/fit_all", Audio, MAIL_CD, "album", FIT_ALL, 1996, 1),
        cross("table5", "audio/fit_from_1995", Audio, MAIL_CD, "album", FIT_FROM_1995, 2001, 1),
        cross("table5", "video/empirical", Video, MAIL_DVD, "clip", Empirical, 2002, 0),
        cross("table5", "video/fit_all", Video, MAIL_DVD, "clip", FIT_ALL, 2001, 1),
        cross("table5", "video/fit_from_1995", Video, MAIL_DVD, "clip", FIT_FROM_1995, 2002, 1),
    ];
    let knee_specs: Vec<Spec> = vec![
        adopt("audio/minutes/1%", Audio, Minutes, 0.01, 1999, 0),
        adopt("audio/minutes/10%", Audio, Minutes, 0.10, 2001, 0),
        adopt("audio/raw_bits/1%", Audio, RawBits, 0.01, 1999, 1),
        adopt("audio/raw_bits/10%", Audio, RawBits, 0.10, 2001, 1),
        adopt("audio/songs/1%", Audio, songs, 0.01, 1999, 1),
        adopt("audio/songs/10%", Audio, songs, 0.10, 2000, 1),
        adopt("video/minutes/1%", Video, Minutes, 0.01, 2001, 0),
        adopt("video/minutes/10%", Video, Minutes, 0.10, 2003, 1),
        adopt("video/raw_bits/1%", Video, RawBits, 0.01, 2002, 1),
        adopt("video/raw_bits/10%", Video, RawBits, 0.10, 2005, 1),
        adopt("video/movies/1%", Video, movies, 0.01, 2000, 1),
        adopt("video/movies/10%", Video, movies, 0.10, 2002, 1),
    ];

    let scenarios: Vec<Scenario> = crossover_specs.iter().chain(&knee_specs).map(|s| s.2.clone()).collect();
    let results = run_all(&scenarios, context)?;
    let (cross_results, knee_results) = results.split_at(crossover_specs.len());

    let mut cells = Vec::new();
    for ((table, cell, _, expected, tol), r) in crossover_specs.iter().zip(cross_results) {
        if *table == "table2" && cell.starts_with("video") {
            cells.push(CellCheck::unsupported("table2", "audio/drive", 1997));
        }
        let mut check = CellCheck::compare(table, *cell, *expected, r.crossover.year, *tol);
        if let Some(y) = r.crossover.fractional_year {
            check.note = Some(format!("fitted crossover at {y:.3}"));
        }
        cells.push(check);
        if *table == "table2" && cell.starts_with("video") {
            cells.push(CellCheck::unsupported("table2", "video/drive", 2001));
        }
    }
    for ((table, cell, _, expected, tol), r) in knee_specs.iter().zip(knee_results) {
        cells.push(CellCheck::compare(table, *cell, *expected, r.knee.and_then(|k| k.year), *tol));
    }

    // Fig. 4 spans the distinct crossover scenarios of Tables 2, 4 and 5.
    let mut union: Vec<SweepResult> = Vec::new();
    for r in cross_results {
        if !union.iter().any(|u| u.scenario == r.scenario) {
            union.push(r.clone());
        }
    }
    let ranges = feasibility_range(&union, Axis::Case)?;
    let mut range_checks = Vec::new();
    for (case, lo, hi) in [("audio", 1992, 2001), ("video", 2001, 2008)] {
        let range = ranges.iter().find(|r| r.group == case).and_then(|r| r.crossover);
        range_checks.push(CellCheck::compare("fig4", format!("{case}/min"), lo, range.map(|r| r.min_year), 0));
        range_checks.push(CellCheck::compare("fig4", format!("{case}/max"), hi, range.map(|r| r.max_year), 0));
    }

    let mut performance_curves = Vec::new();
    let mut adoption_curves = Vec::new();
    for case in [Audio, Video] {
        let base = Scenario::baseline(case);
        performance_curves.push(Curve {
            name: format!("{case}/internet_{}", base.reference_media),
            series: context.replacement_performance(case, &base.reference_media)?,
        });
        performance_curves.push(Curve {
            name: format!("{case}/{}", base.target),
            series: context.target_performance(&base.target)?,
        });
        adoption_curves.push(Curve {
            name: format!("{case}/internet_share_minutes"),
            series: context.adoption(case, Minutes)?.expect("bundled market"),
        });
    }

    Ok(ReproductionReport {
        cells,
        ranges,
        range_checks,
        results,
        performance_curves,
        adoption_curves,
    })
}
