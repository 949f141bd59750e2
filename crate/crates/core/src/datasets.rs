//! Bundled appendix tables, user CSV ingestion and dataset validation.
//!
//! Every bundled table is a CSV file with a JSON manifest next to it
//! (`aN_<name>.csv`, `aN_<name>.manifest.json`). The manifest records the
//! column units, the year coverage and a SHA-256 checksum of the CSV bytes;
//! a checksum mismatch is a hard error.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adoption::{PhysicalMediaSpec, Storage};
use crate::cost::BITS_PER_BYTE;
use crate::error::{Error, Result};
use crate::series::{AnnualSeries, Deflator, RateChange, RateSchedule, Unit, REAL_DOLLAR_BASE_YEAR};

/// Environment variable naming a directory that replaces the bundled data.
pub const DATA_DIR_ENV: &str = "TECHKNEE_DATA";

const BYTES_PER_GIGABYTE: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetId {
    A1BandwidthCost,
    A2Compression,
    A3Postage,
    A4Traffic,
    A5MediaShare,
    A6Sales,
    A7MinutesPerUnit,
    A8UnitStorage,
}

impl DatasetId {
    pub const ALL: [DatasetId; 8] = [
        DatasetId::A1BandwidthCost,
        DatasetId::A2Compression,
        DatasetId::A3Postage,
        DatasetId::A4Traffic,
        DatasetId::A5MediaShare,
        DatasetId::A6Sales,
        DatasetId::A7MinutesPerUnit,
        DatasetId::A8UnitStorage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetId::A1BandwidthCost => "a1_bandwidth_cost",
            DatasetId::A2Compression => "a2_compression",
            DatasetId::A3Postage => "a3_postage",
            DatasetId::A4Traffic => "a4_traffic",
            DatasetId::A5MediaShare => "a5_media_share",
            DatasetId::A6Sales => "a6_sales",
            DatasetId::A7MinutesPerUnit => "a7_minutes_per_unit",
            DatasetId::A8UnitStorage => "a8_unit_storage",
        }
    }

    pub fn csv_file_name(self) -> String {
        format!("{}.csv", self.as_str())
    }

    pub fn manifest_file_name(self) -> String {
        format!("{}.manifest.json", self.as_str())
    }

    fn embedded(self) -> (&'static str, &'static str) {
        macro_rules! embed {
            ($name:literal) => {
                (
                    include_str!(concat!("../data/", $name, ".csv")),
                    include_str!(concat!("../data/", $name, ".manifest.json")),
                )
            };
        }
        match self {
            DatasetId::A1BandwidthCost => embed!("a1_bandwidth_cost"),
            DatasetId::A2Compression => embed!("a2_compression"),
            DatasetId::A3Postage => embed!("a3_postage"),
            DatasetId::A4Traffic => embed!("a4_traffic"),
            DatasetId::A5MediaShare => embed!("a5_media_share"),
            DatasetId::A6Sales => embed!("a6_sales"),
            DatasetId::A7MinutesPerUnit => embed!("a7_minutes_per_unit"),
            DatasetId::A8UnitStorage => embed!("a8_unit_storage"),
        }
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub from_year: i32,
    pub to_year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub id: String,
    pub title: String,
    pub columns: Vec<ColumnSpec>,
    pub coverage: Option<Coverage>,
    pub citation: String,
    pub rows: usize,
    pub sha256: String,
}

/// A CSV table kept as its original text cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str, origin: &str) -> Result<Table> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| csv_error(origin, 1, e))?
            .iter()
            .map(str::to_string)
            .collect::<Vec<_>>();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                csv_error(origin, line, e)
            })?;
            rows.push(record.iter().map(str::to_string).collect());
        }
        Ok(Table { header, rows })
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer.write_record(row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidParameter(format!("missing column {name:?}")))
    }
}

fn csv_error(origin: &str, line: u64, e: impl fmt::Display) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        message: e.to_string(),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Where bundled tables are read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Embedded,
    Directory(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Registry {
    source: DataSource,
}

impl Default for Registry {
    fn default() -> Self {
        Self::embedded()
    }
}

impl Registry {
    pub fn embedded() -> Self {
        Self {
            source: DataSource::Embedded,
        }
    }

    pub fn directory(path: impl Into<PathBuf>) -> Self {
        Self {
            source: DataSource::Directory(path.into()),
        }
    }

    /// Embedded data unless `TECHKNEE_DATA` names a directory.
    pub fn from_env() -> Self {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::directory(PathBuf::from(dir)),
            _ => Self::embedded(),
        }
    }

    pub fn source(&self) -> &DataSource {
        &self.source
    }

    /// Raw CSV text and manifest text, unverified.
    pub fn raw(&self, id: DatasetId) -> Result<(String, String)> {
        match &self.source {
            DataSource::Embedded => {
                let (csv, manifest) = id.embedded();
                Ok((csv.to_string(), manifest.to_string()))
            }
            DataSource::Directory(dir) => {
                let read = |name: String| {
                    let path = dir.join(name);
                    std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
                };
                Ok((read(id.csv_file_name())?, read(id.manifest_file_name())?))
            }
        }
    }

    pub fn manifest(&self, id: DatasetId) -> Result<DatasetManifest> {
        Ok(serde_json::from_str(&self.raw(id)?.1)?)
    }

    /// Loads a table after checking its checksum, row count and coverage
    /// against the manifest.
    pub fn load_table(&self, id: DatasetId) -> Result<(Table, DatasetManifest)> {
        let (text, manifest_text) = self.raw(id)?;
        let manifest: DatasetManifest = serde_json::from_str(&manifest_text)?;
        let actual = sha256_hex(text.as_bytes());
        if actual != manifest.sha256 {
            return Err(Error::Checksum {
                id: id.to_string(),
                expected: manifest.sha256,
                actual,
            });
        }
        let table = Table::parse(&text, &id.csv_file_name())?;
        let bad = |message: String| Error::Dataset {
            id: id.to_string(),
            message,
        };
        if table.rows.len() != manifest.rows {
            return Err(bad(format!(
                "manifest declares {} rows, file has {}",
                manifest.rows,
                table.rows.len()
            )));
        }
        let names: Vec<&str> = manifest.columns.iter().map(|c| c.name.as_str()).collect();
        if names != table.header {
            return Err(bad(format!("header {:?} does not match manifest {:?}", table.header, names)));
        }
        if let Some(cov) = manifest.coverage {
            let years = row_years(&table, id)?;
            if years.first() != Some(&cov.from_year) || years.last() != Some(&cov.to_year) {
                return Err(bad(format!(
                    "declared coverage {}-{} does not match rows",
                    cov.from_year, cov.to_year
                )));
            }
        }
        Ok((table, manifest))
    }

    /// Verbatim CSV and manifest files, for auditing.
    pub fn export(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        for id in DatasetId::ALL {
            self.load_table(id)?;
            let (csv, manifest) = self.raw(id)?;
            for (name, body) in [(id.csv_file_name(), csv), (id.manifest_file_name(), manifest)] {
                let path = dir.join(name);
                std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                written.push(path);
            }
        }
        Ok(written)
    }

    pub fn load_all(&self) -> Result<Datasets> {
        Datasets::load(self)
    }
}

fn row_years(table: &Table, id: DatasetId) -> Result<Vec<i32>> {
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let cell = &row[0];
            if id == DatasetId::A3Postage {
                parse_date(cell, id, i).map(|d| chrono::Datelike::year(&d))
            } else {
                cell.parse::<i32>().map_err(|e| row_error(id, i, e))
            }
        })
        .collect()
}

fn row_error(id: DatasetId, row: usize, e: impl fmt::Display) -> Error {
    Error::Parse {
        path: id.csv_file_name(),
        // header is line 1
        line: row as u64 + 2,
        message: e.to_string(),
    }
}

fn parse_date(cell: &str, id: DatasetId, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(cell, "%Y-%m-%d").map_err(|e| row_error(id, row, e))
}

fn number(table: &Table, id: DatasetId, row: usize, col: usize) -> Result<f64> {
    let cell = &table.rows[row][col];
    let v: f64 = cell.trim().parse().map_err(|_| row_error(id, row, format!("not a number: {cell:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(row_error(id, row, "non-finite value"))
    }
}

fn annual_column(
    table: &Table,
    id: DatasetId,
    column: &str,
    unit: Unit,
    convert: impl Fn(f64) -> f64,
) -> Result<AnnualSeries> {
    let col = table.column(column)?;
    let mut series = AnnualSeries::new(unit);
    for (i, row) in table.rows.iter().enumerate() {
        let year: i32 = row[0].parse().map_err(|e| row_error(id, i, e))?;
        series
            .insert(year, convert(number(table, id, i, col)?))
            .map_err(|e| row_error(id, i, e))?;
    }
    Ok(series)
}

fn keyed_column(table: &Table, id: DatasetId, column: &str) -> Result<BTreeMap<String, f64>> {
    let col = table.column(column)?;
    (0..table.rows.len())
        .map(|i| Ok((table.rows[i][0].clone(), number(table, id, i, col)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthCost {
    pub nominal: BTreeMap<i32, f64>,
    pub real: AnnualSeries,
    pub sources: BTreeMap<i32, String>,
}

impl BandwidthCost {
    /// Nominal-to-2016-dollar factors implied by the paired columns.
    pub fn deflator(&self) -> Result<Deflator> {
        Deflator::from_paired_columns(
            REAL_DOLLAR_BASE_YEAR,
            self.real
                .iter()
                .filter_map(|(y, real)| self.nominal.get(&y).map(|&n| (y, n, real))),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionTable {
    pub text: AnnualSeries,
    pub image: AnnualSeries,
    pub audio: AnnualSeries,
    pub video: AnnualSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostageTable {
    /// Columns: first ounce, additional ounce (real 2016 dollars).
    pub real: RateSchedule,
    /// Columns: first ounce, additional ounce (nominal dollars).
    pub nominal: RateSchedule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediaShareTable {
    pub audio: AnnualSeries,
    pub video: AnnualSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SalesTable {
    pub cd: AnnualSeries,
    pub cassette: AnnualSeries,
    pub vinyl: AnnualSeries,
    pub dvd: AnnualSeries,
    pub vhs: AnnualSeries,
}

/// All eight bundled tables, typed.
#[derive(Debug, Clone, PartialEq)]
pub struct Datasets {
    pub bandwidth_cost: BandwidthCost,
    pub compression: CompressionTable,
    pub postage: PostageTable,
    /// Internet traffic in bits per year.
    pub traffic_bits: AnnualSeries,
    pub media_share: MediaShareTable,
    pub sales: SalesTable,
    pub minutes_per_unit: BTreeMap<String, f64>,
    pub unit_storage_megabytes: BTreeMap<String, f64>,
}

/// Nominal content of one sold unit of a digital medium, for unit counting.
pub const CD_CONTENT_MINUTES: f64 = 60.0;
pub const DVD_CONTENT_MINUTES: f64 = 90.0;

impl Datasets {
    pub fn load(registry: &Registry) -> Result<Self> {
        let table = |id| registry.load_table(id).map(|(t, _)| t);

        let id = DatasetId::A1BandwidthCost;
        let t = table(id)?;
        let nominal_col = t.column("nominal_usd_per_mbps_month")?;
        let source_col = t.column("source")?;
        let mut nominal = BTreeMap::new();
        let mut sources = BTreeMap::new();
        for (i, row) in t.rows.iter().enumerate() {
            let year: i32 = row[0].parse().map_err(|e| row_error(id, i, e))?;
            nominal.insert(year, number(&t, id, i, nominal_col)?);
            sources.insert(year, row[source_col].clone());
        }
        let bandwidth_cost = BandwidthCost {
            nominal,
            real: annual_column(&t, id, "usd2016_per_mbps_month", Unit::RealDollarsPerMegabitMonth, |v| v)?,
            sources,
        };

        let id = DatasetId::A2Compression;
        let t = table(id)?;
        let ratio = |c| annual_column(&t, id, c, Unit::DimensionlessRatio, |v| v);
        let compression = CompressionTable {
            text: ratio("text")?,
            image: ratio("image")?,
            audio: ratio("audio")?,
            video: ratio("video")?,
        };

        let id = DatasetId::A3Postage;
        let t = table(id)?;
        let cols = [
            t.column("first_ounce_usd2016")?,
            t.column("additional_ounce_usd2016")?,
            t.column("first_ounce_nominal_cents")?,
            t.column("additional_ounce_nominal_usd")?,
        ];
        let mut real = Vec::new();
        let mut nominal = Vec::new();
        for i in 0..t.rows.len() {
            let effective = parse_date(&t.rows[i][0], id, i)?;
            let v = |c| number(&t, id, i, c);
            real.push(RateChange {
                effective,
                values: vec![v(cols[0])?, v(cols[1])?],
            });
            nominal.push(RateChange {
                effective,
                values: vec![v(cols[2])? / 100.0, v(cols[3])?],
            });
        }
        let postage = PostageTable {
            real: RateSchedule::new(real)?,
            nominal: RateSchedule::new(nominal)?,
        };

        let id = DatasetId::A4Traffic;
        let t = table(id)?;
        let traffic_bits = annual_column(&t, id, "gigabytes_per_year", Unit::Bits, |gb| gb * BYTES_PER_GIGABYTE * BITS_PER_BYTE)?;

        let id = DatasetId::A5MediaShare;
        let t = table(id)?;
        let media_share = MediaShareTable {
            audio: annual_column(&t, id, "audio_percent", Unit::DimensionlessShare, |pct| pct / 100.0)?,
            video: annual_column(&t, id, "video_percent", Unit::DimensionlessShare, |pct| pct / 100.0)?,
        };

        let id = DatasetId::A6Sales;
        let t = table(id)?;
        let sales = |c| annual_column(&t, id, c, Unit::CountPerYear, |millions| millions * 1e6);
        let sales = SalesTable {
            cd: sales("cd_millions")?,
            cassette: sales("cassette_millions")?,
            vinyl: sales("vinyl_millions")?,
            dvd: sales("dvd_millions")?,
            vhs: sales("vhs_millions")?,
        };

        let id = DatasetId::A7MinutesPerUnit;
        let minutes_per_unit = keyed_column(&table(id)?, id, "minutes_per_unit")?;
        let id = DatasetId::A8UnitStorage;
        let unit_storage_megabytes = keyed_column(&table(id)?, id, "megabytes_per_unit")?;

        Ok(Datasets {
            bandwidth_cost,
            compression,
            postage,
            traffic_bits,
            media_share,
            sales,
            minutes_per_unit,
            unit_storage_megabytes,
        })
    }

    fn keyed(map: &BTreeMap<String, f64>, key: &str, id: DatasetId) -> Result<f64> {
        map.get(key).copied().ok_or_else(|| Error::Dataset {
            id: id.to_string(),
            message: format!("no row for {key:?}"),
        })
    }

    pub fn analog_media(&self, name: &str, sales: &AnnualSeries) -> Result<PhysicalMediaSpec> {
        let minutes = Self::keyed(&self.minutes_per_unit, name, DatasetId::A7MinutesPerUnit)?;
        PhysicalMediaSpec::new(name, Storage::Analog { minutes_per_unit: minutes }, sales.clone())
    }

    pub fn digital_media(&self, name: &str, content_minutes: f64, sales: &AnnualSeries) -> Result<PhysicalMediaSpec> {
        let mb = Self::keyed(&self.unit_storage_megabytes, name, DatasetId::A8UnitStorage)?;
        PhysicalMediaSpec::new(
            name,
            Storage::Digital {
                unit_storage_megabytes: mb,
                nominal_content_minutes: content_minutes,
            },
            sales.clone(),
        )
    }

    /// Vinyl, cassettes and CDs.
    pub fn audio_physical_media(&self) -> Result<Vec<PhysicalMediaSpec>> {
        Ok(vec![
            self.analog_media("vinyl", &self.sales.vinyl)?,
            self.analog_media("cassette", &self.sales.cassette)?,
            self.digital_media("cd", CD_CONTENT_MINUTES, &self.sales.cd)?,
        ])
    }

    /// VHS tapes and DVDs.
    pub fn video_physical_media(&self) -> Result<Vec<PhysicalMediaSpec>> {
        Ok(vec![
            self.analog_media("vhs", &self.sales.vhs)?,
            self.digital_media("dvd", DVD_CONTENT_MINUTES, &self.sales.dvd)?,
        ])
    }
}

/// Reads a `year,value` CSV file into a series tagged with `unit`.
pub fn parse_series_csv(path: &Path, unit: Unit) -> Result<AnnualSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_series_str(&text, unit, &path.display().to_string())
}

pub fn parse_series_str(text: &str, unit: Unit, origin: &str) -> Result<AnnualSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_error(origin, 1, e))?.clone();
    if header.len() != 2 || &header[0] != "year" || &header[1] != "value" {
        return Err(Error::Parse {
            path: origin.into(),
            line: 1,
            message: format!("expected header `year,value`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut series = AnnualSeries::new(unit);
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_error(origin, line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| Error::Parse {
            path: origin.into(),
            line,
            message,
        };
        let year: i32 = record[0].parse().map_err(|_| fail(format!("bad year {:?}", &record[0])))?;
        let value: f64 = record[1].parse().map_err(|_| fail(format!("bad value {:?}", &record[1])))?;
        if !value.is_finite() {
            return Err(fail(format!("non-finite value for {year}")));
        }
        if value < 0.0 {
            return Err(fail(format!("negative value {value} for {year}")));
        }
        if series.get(year).is_some() {
            return Err(fail(format!("duplicate year {year}")));
        }
        series.insert(year, value).map_err(|e| fail(e.to_string()))?;
    }
    Ok(series)
}

/// `year,value` text; values use the shortest representation that parses
/// back to the same bits.
pub fn series_to_csv(series: &AnnualSeries) -> String {
    let mut out = String::from("year,value\n");
    for (year, value) in series.iter() {
        out.push_str(&format!("{year},{value}\n"));
    }
    out
}

pub fn write_series_csv(path: &Path, series: &AnnualSeries) -> Result<()> {
    std::fs::write(path, series_to_csv(series)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub coverage: Option<(i32, i32)>,
    pub contiguous: bool,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finding {
    EmptySeries,
    MissingYears { years: Vec<i32> },
    OutsideCoverage { years: Vec<i32> },
    NonPositive { years: Vec<i32> },
}

/// Checks a series against expectations without changing it.
pub fn validate_dataset(series: &AnnualSeries, expectations: &Expectations) -> Vec<Finding> {
    if series.is_empty() {
        return vec![Finding::EmptySeries];
    }
    let mut findings = Vec::new();
    let (first, last) = (series.first_year().unwrap(), series.last_year().unwrap());
    let (from, to) = expectations.coverage.unwrap_or((first, last));
    let expected_years = if expectations.coverage.is_some() || expectations.contiguous {
        Some(from..=to)
    } else {
        None
    };
    if let Some(range) = expected_years {
        let missing: Vec<i32> = range.filter(|&y| series.get(y).is_none()).collect();
        if !missing.is_empty() {
            findings.push(Finding::MissingYears { years: missing });
        }
    }
    if expectations.coverage.is_some() {
        let outside: Vec<i32> = series.years().filter(|&y| y < from || y > to).collect();
        if !outside.is_empty() {
            findings.push(Finding::OutsideCoverage { years: outside });
        }
    }
    if expectations.positive {
        let bad: Vec<i32> = series.iter().filter(|&(_, v)| v <= 0.0).map(|p| p.0).collect();
        if !bad.is_empty() {
            findings.push(Finding::NonPositive { years: bad });
        }
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_spot_values() {
        let data = Registry::embedded().load_all().unwrap();
        assert_eq!(data.bandwidth_cost.real.get(2010), Some(5.54));
        assert_eq!(data.compression.video.get(2007), Some(60.0));
        assert_eq!(data.unit_storage_megabytes["dvd"], 4700.0);
        assert_eq!(data.minutes_per_unit["vhs"], 180.0);
        assert_eq!(data.traffic_bits.get(1984), Some(180.0 * 8e9));
        assert_eq!(data.sales.cd.get(1993), Some(1183e6));
        assert!((data.media_share.audio.get(1999).unwrap() - 0.164).abs() < 1e-15);
    }

    #[test]
    fn bundled_coverage() {
        let data = Registry::embedded().load_all().unwrap();
        let cov = |s: &AnnualSeries| (s.first_year().unwrap(), s.last_year().unwrap(), s.len());
        assert_eq!(cov(&data.bandwidth_cost.real), (1983, 2015, 33));
        assert_eq!(cov(&data.traffic_bits), (1984, 2014, 31));
        assert_eq!(cov(&data.media_share.video), (1986, 2007, 22));
        assert_eq!(cov(&data.sales.vhs), (1993, 2007, 15));
        assert_eq!(cov(&data.compression.audio), (1983, 2015, 33));
        assert_eq!(data.postage.real.changes().len(), 15);
    }

    #[test]
    fn implied_deflator() {
        let data = Registry::embedded().load_all().unwrap();
        let d = data.bandwidth_cost.deflator().unwrap();
        assert!((d.factor(1998).unwrap() - 1.49279).abs() < 1e-5);
        assert_eq!(d.factor(2016).unwrap(), 1.0);
        assert!((d.factor(2015).unwrap() - 1.0).abs() < 1e-9);
        assert!(d.factor(1970).is_err());
    }

    #[test]
    fn manifests_match_files() {
        let reg = Registry::embedded();
        for id in DatasetId::ALL {
            let (table, manifest) = reg.load_table(id).unwrap();
            assert_eq!(manifest.id, id.as_str());
            assert_eq!(manifest.rows, table.rows.len());
        }
    }

    #[test]
    fn checksum_mismatch_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        Registry::embedded().export(dir.path()).unwrap();
        let path = dir.path().join("a1_bandwidth_cost.csv");
        let text = std::fs::read_to_string(&path).unwrap().replace("5.54", "5.55");
        std::fs::write(&path, text).unwrap();
        let reg = Registry::directory(dir.path());
        assert!(matches!(reg.load_table(DatasetId::A1BandwidthCost), Err(Error::Checksum { .. })));
        assert!(reg.load_table(DatasetId::A2Compression).is_ok());
    }

    #[test]
    fn table_text_round_trips() {
        let reg = Registry::embedded();
        for id in DatasetId::ALL {
            let (text, _) = reg.raw(id).unwrap();
            let table = Table::parse(&text, id.as_str()).unwrap();
            assert_eq!(table.to_csv(), text, "{id}");
        }
    }

    #[test]
    fn parse_series_examples() {
        let s = parse_series_str("year,value\n2000,1.5\n2001,2\n", Unit::Bits, "t").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.unit(), Unit::Bits);

        let err = parse_series_str("year,value\n2000,1\n2001,2\n2000,3\n", Unit::Bits, "t").unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate"));
            }
            other => panic!("{other}"),
        }
        for bad in ["year,value\n2000,NaN\n", "year,value\n2000,-1\n", "year,value\n2000\n", "year,value\nabc,1\n", "yr,val\n2000,1\n"] {
            assert!(matches!(parse_series_str(bad, Unit::Bits, "t"), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn series_csv_round_trip() {
        let data = Registry::embedded().load_all().unwrap();
        for s in [&data.bandwidth_cost.real, &data.traffic_bits, &data.media_share.audio, &data.sales.vinyl] {
            let back = parse_series_str(&series_to_csv(s), s.unit(), "t").unwrap();
            assert_eq!(&back, s);
        }
    }

    #[test]
    fn validation_findings() {
        let data = Registry::embedded().load_all().unwrap();
        let exp = Expectations { coverage: Some((1983, 2015)), contiguous: true, positive: true };
        assert!(validate_dataset(&data.bandwidth_cost.real, &exp).is_empty());

        let gappy = AnnualSeries::from_pairs(Unit::Bits, [(2000, 1.0), (2003, 1.0)]).unwrap();
        let f = validate_dataset(&gappy, &Expectations { contiguous: true, ..Default::default() });
        assert_eq!(f, vec![Finding::MissingYears { years: vec![2001, 2002] }]);

        assert_eq!(validate_dataset(&AnnualSeries::new(Unit::Bits), &exp), vec![Finding::EmptySeries]);

        let zeros = AnnualSeries::from_pairs(Unit::Bits, [(1990, 0.0), (2020, 1.0)]).unwrap();
        let f = validate_dataset(&zeros, &Expectations { coverage: Some((1990, 2000)), contiguous: false, positive: true });
        assert!(f.contains(&Finding::OutsideCoverage { years: vec![2020] }));
        assert!(f.contains(&Finding::NonPositive { years: vec![1990] }));
    }
}
