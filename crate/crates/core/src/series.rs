//! Year-indexed series with unit tags, real-dollar conversion and dated rate
//! schedules.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base year of every real-dollar figure in the bundled tables.
pub const REAL_DOLLAR_BASE_YEAR: i32 = 2016;

/// Unit tag carried by every [`AnnualSeries`]. Tags are never inferred and
/// never coerced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unit {
    Bits,
    MediaUnitsPerRealDollar,
    MinutesPerYear,
    RealDollarsPerMegabitMonth,
    RealDollars,
    DimensionlessShare,
    /// Compression ratios and other unitless multipliers that may exceed one.
    DimensionlessRatio,
    CountPerYear,
}

impl Unit {
    pub const ALL: [Unit; 8] = [
        Unit::Bits,
        Unit::MediaUnitsPerRealDollar,
        Unit::MinutesPerYear,
        Unit::RealDollarsPerMegabitMonth,
        Unit::RealDollars,
        Unit::DimensionlessShare,
        Unit::DimensionlessRatio,
        Unit::CountPerYear,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Bits => "bits",
            Unit::MediaUnitsPerRealDollar => "media-units-per-real-dollar",
            Unit::MinutesPerYear => "minutes-per-year",
            Unit::RealDollarsPerMegabitMonth => "real-dollars-per-megabit-month",
            Unit::RealDollars => "real-dollars",
            Unit::DimensionlessShare => "dimensionless-share",
            Unit::DimensionlessRatio => "dimensionless-ratio",
            Unit::CountPerYear => "count-per-year",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Unit::ALL
            .into_iter()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Unit::ALL.iter().map(|u| u.as_str()).collect();
                Error::InvalidParameter(format!(
                    "unknown unit {s:?} (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

/// Ordered map from year to a finite, non-negative value, tagged with a unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualSeries {
    unit: Unit,
    entries: BTreeMap<i32, f64>,
}

impl AnnualSeries {
    pub fn new(unit: Unit) -> Self {
        Self {
            unit,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a series from `(year, value)` pairs. Duplicate years are an
    /// error.
    pub fn from_pairs(unit: Unit, pairs: impl IntoIterator<Item = (i32, f64)>) -> Result<Self> {
        let mut series = Self::new(unit);
        for (year, value) in pairs {
            series.insert(year, value)?;
        }
        Ok(series)
    }

    pub fn insert(&mut self, year: i32, value: f64) -> Result<()> {
        check_value(year, value)?;
        if self.entries.insert(year, value).is_some() {
            return Err(Error::InvalidParameter(format!("duplicate year {year}")));
        }
        Ok(())
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        self.entries.get(&year).copied()
    }

    pub fn require(&self, year: i32) -> Result<f64> {
        self.get(year).ok_or(Error::MissingYear(year))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_year(&self) -> Option<i32> {
        self.entries.keys().next().copied()
    }

    pub fn last_year(&self) -> Option<i32> {
        self.entries.keys().next_back().copied()
    }

    pub fn years(&self) -> impl DoubleEndedIterator<Item = i32> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (i32, f64)> + '_ {
        self.entries.iter().map(|(&y, &v)| (y, v))
    }

    pub fn values(&self) -> impl DoubleEndedIterator<Item = f64> + '_ {
        self.entries.values().copied()
    }

    pub fn restrict(&self, years: RangeInclusive<i32>) -> Self {
        Self {
            unit: self.unit,
            entries: self
                .entries
                .range(years)
                .map(|(&y, &v)| (y, v))
                .collect(),
        }
    }

    pub fn expect_unit(&self, unit: Unit) -> Result<()> {
        if self.unit == unit {
            Ok(())
        } else {
            Err(Error::UnitMismatch {
                expected: unit,
                found: self.unit,
            })
        }
    }

    /// Pointwise sum over the common years.
    pub fn add(&self, other: &AnnualSeries) -> Result<AnnualSeries> {
        other.expect_unit(self.unit)?;
        AnnualSeries::from_pairs(
            self.unit,
            align(self, other).into_iter().map(|(y, a, b)| (y, a + b)),
        )
    }

    pub fn scale(&self, factor: f64) -> Result<AnnualSeries> {
        self.map_values(self.unit, |_, v| v * factor)
    }

    /// Applies `f` to every entry and retags the result with `unit`.
    pub fn map_values(&self, unit: Unit, mut f: impl FnMut(i32, f64) -> f64) -> Result<AnnualSeries> {
        AnnualSeries::from_pairs(unit, self.iter().map(|(y, v)| (y, f(y, v))))
    }
}

fn check_value(year: i32, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidValue {
            year,
            value,
            reason: "not finite",
        });
    }
    if value < 0.0 {
        return Err(Error::InvalidValue {
            year,
            value,
            reason: "negative",
        });
    }
    Ok(())
}

/// Years present in both series, ascending, with both values.
pub fn align(a: &AnnualSeries, b: &AnnualSeries) -> Vec<(i32, f64, f64)> {
    a.iter()
        .filter_map(|(year, va)| b.get(year).map(|vb| (year, va, vb)))
        .collect()
}

/// An amount of money stated in the currency of `year`, expressed in
/// dollars of `base`. A nominal amount has `base == year`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Money {
    pub amount: f64,
    pub year: i32,
    pub base: i32,
}

impl Money {
    pub fn nominal(amount: f64, year: i32) -> Self {
        Self {
            amount,
            year,
            base: year,
        }
    }
}

/// Per-year multipliers taking nominal dollars to base-year dollars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deflator {
    base: i32,
    factors: BTreeMap<i32, f64>,
}

impl Deflator {
    pub fn new(base: i32, factors: BTreeMap<i32, f64>) -> Result<Self> {
        for (&year, &f) in &factors {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::InvalidValue {
                    year,
                    value: f,
                    reason: "deflator factor must be positive",
                });
            }
        }
        Ok(Self { base, factors })
    }

    /// Factors implied by paired nominal and real columns of the same table.
    /// The base year itself is pinned to exactly one.
    pub fn from_paired_columns(
        base: i32,
        pairs: impl IntoIterator<Item = (i32, f64, f64)>,
    ) -> Result<Self> {
        let mut factors: BTreeMap<i32, f64> = pairs
            .into_iter()
            .map(|(year, nominal, real)| (year, real / nominal))
            .collect();
        factors.insert(base, 1.0);
        Self::new(base, factors)
    }

    pub fn base(&self) -> i32 {
        self.base
    }

    pub fn factor(&self, year: i32) -> Result<f64> {
        self.factors.get(&year).copied().ok_or(Error::MissingYear(year))
    }

    pub fn factors(&self) -> &BTreeMap<i32, f64> {
        &self.factors
    }
}

/// Converts a nominal amount into base-year dollars.
pub fn deflate(nominal: Money, deflator: &Deflator) -> Result<Money> {
    let factor = deflator.factor(nominal.year)?;
    Ok(Money {
        amount: nominal.amount * factor,
        year: nominal.year,
        base: deflator.base,
    })
}

/// Converts a base-year amount back into dollars of `year`.
pub fn inflate(real: Money, deflator: &Deflator, year: i32) -> Result<Money> {
    if real.base != deflator.base {
        return Err(Error::InvalidParameter(format!(
            "amount is in {} dollars but the deflator base is {}",
            real.base, deflator.base
        )));
    }
    let factor = deflator.factor(year)?;
    Ok(Money::nominal(real.amount / factor, year))
}

/// Calendar day used to pick the rate in force for a whole year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeDate {
    pub month: u32,
    pub day: u32,
}

impl ProbeDate {
    pub const MID_YEAR: ProbeDate = ProbeDate { month: 7, day: 1 };

    pub fn in_year(self, year: i32) -> Result<NaiveDate> {
        NaiveDate::from_ymd_opt(year, self.month, self.day).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "invalid probe date {}-{} in {year}",
                self.month, self.day
            ))
        })
    }
}

impl Default for ProbeDate {
    fn default() -> Self {
        Self::MID_YEAR
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateChange {
    pub effective: NaiveDate,
    pub values: Vec<f64>,
}

/// Dated rate changes, each carrying one value per rate column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSchedule {
    changes: Vec<RateChange>,
}

impl RateSchedule {
    pub fn new(changes: Vec<RateChange>) -> Result<Self> {
        let Some(first) = changes.first() else {
            return Err(Error::InvalidParameter("empty rate schedule".into()));
        };
        let width = first.values.len();
        if width == 0 {
            return Err(Error::InvalidParameter("rate change without values".into()));
        }
        for pair in changes.windows(2) {
            if pair[1].effective <= pair[0].effective {
                return Err(Error::UnorderedSchedule(pair[1].effective));
            }
        }
        for change in &changes {
            if change.values.len() != width {
                return Err(Error::InvalidParameter(format!(
                    "rate change on {} has {} values, expected {width}",
                    change.effective,
                    change.values.len()
                )));
            }
            for &v in &change.values {
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite rate on {}",
                        change.effective
                    )));
                }
            }
        }
        Ok(Self { changes })
    }

    pub fn changes(&self) -> &[RateChange] {
        &self.changes
    }

    pub fn width(&self) -> usize {
        self.changes[0].values.len()
    }

    /// Rates of the last change effective on or before `date`.
    pub fn rate_on(&self, date: NaiveDate) -> Option<&[f64]> {
        let idx = self.changes.partition_point(|c| c.effective <= date);
        idx.checked_sub(1).map(|i| self.changes[i].values.as_slice())
    }
}

/// Samples every rate column at `probe` of each year in `years`, giving one
/// series per column.
pub fn annualize(
    schedule: &RateSchedule,
    years: RangeInclusive<i32>,
    probe: ProbeDate,
    unit: Unit,
) -> Result<Vec<AnnualSeries>> {
    let mut out = vec![AnnualSeries::new(unit); schedule.width()];
    for year in years {
        let date = probe.in_year(year)?;
        let rates = schedule.rate_on(date).ok_or(Error::NoRateInEffect(date))?;
        for (series, &rate) in out.iter_mut().zip(rates) {
            series.insert(year, rate)?;
        }
    }
    Ok(out)
}
