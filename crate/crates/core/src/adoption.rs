//! Media usage per distribution channel and the internet's adoption share.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::cost::{MediaKind, MediaSpec, BITS_PER_BYTE, BITS_PER_MEGABIT};
use crate::error::{Error, Result};
use crate::series::{AnnualSeries, Unit};

/// How usage is counted when comparing distribution channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsageMetric {
    /// Minutes of media, compression-adjusted.
    Minutes,
    /// Bits as carried or stored, without compression adjustment.
    RawBits,
    /// Whole content units of the given length (3-minute songs, movies).
    Units { unit_length_minutes: f64 },
}

impl UsageMetric {
    pub fn label(&self) -> String {
        match self {
            UsageMetric::Minutes => "minutes".into(),
            UsageMetric::RawBits => "raw_bits".into(),
            UsageMetric::Units { unit_length_minutes } => format!("units_{unit_length_minutes}min"),
        }
    }

    fn unit(&self) -> Unit {
        match self {
            UsageMetric::Minutes => Unit::MinutesPerYear,
            UsageMetric::RawBits => Unit::Bits,
            UsageMetric::Units { .. } => Unit::CountPerYear,
        }
    }
}

/// Usage of one distribution channel, in whatever metric it was built for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainUsage {
    pub domain_name: String,
    pub usage: AnnualSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Storage {
    Analog {
        minutes_per_unit: f64,
    },
    Digital {
        unit_storage_megabytes: f64,
        /// Content a sold unit nominally carries, for unit counting.
        nominal_content_minutes: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalMediaSpec {
    pub name: String,
    pub storage: Storage,
    /// Units sold per year, as absolute counts.
    pub yearly_sales: AnnualSeries,
}

impl PhysicalMediaSpec {
    pub fn new(name: impl Into<String>, storage: Storage, yearly_sales: AnnualSeries) -> Result<Self> {
        yearly_sales.expect_unit(Unit::CountPerYear)?;
        let params: &[f64] = match &storage {
            Storage::Analog { minutes_per_unit } => &[*minutes_per_unit],
            Storage::Digital {
                unit_storage_megabytes,
                nominal_content_minutes,
            } => &[*unit_storage_megabytes, *nominal_content_minutes],
        };
        if params.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidParameter("storage parameters must be positive".into()));
        }
        Ok(Self {
            name: name.into(),
            storage,
            yearly_sales,
        })
    }
}

/// Minutes of media carried over the internet: the media's share of traffic
/// divided by the compressed size of one minute.
pub fn internet_media_minutes(
    traffic_bits: &AnnualSeries,
    media_share: &AnnualSeries,
    compression: &AnnualSeries,
    one_min_uncompressed_bits: f64,
) -> Result<AnnualSeries> {
    traffic_bits.expect_unit(Unit::Bits)?;
    media_share.expect_unit(Unit::DimensionlessShare)?;
    compression.expect_unit(Unit::DimensionlessRatio)?;
    if !(one_min_uncompressed_bits.is_finite() && one_min_uncompressed_bits > 0.0) {
        return Err(Error::InvalidParameter("one-minute size must be positive".into()));
    }
    let mut out = AnnualSeries::new(Unit::MinutesPerYear);
    for (year, traffic) in traffic_bits.iter() {
        let (Some(share), Some(ratio)) = (media_share.get(year), compression.get(year)) else {
            continue;
        };
        out.insert(year, traffic * share / (one_min_uncompressed_bits / ratio))?;
    }
    Ok(out)
}

/// Units sold times minutes per unit.
pub fn analog_media_minutes(spec: &PhysicalMediaSpec) -> Result<AnnualSeries> {
    let Storage::Analog { minutes_per_unit } = spec.storage else {
        return Err(Error::InvalidParameter(format!("{} is not analog media", spec.name)));
    };
    spec.yearly_sales.map_values(Unit::MinutesPerYear, |_, sales| sales * minutes_per_unit)
}

/// Units sold times the compressed minutes one unit can hold.
pub fn digital_media_minutes(
    spec: &PhysicalMediaSpec,
    compression: &AnnualSeries,
    one_min_uncompressed_bits: f64,
) -> Result<AnnualSeries> {
    let Storage::Digital { unit_storage_megabytes, .. } = spec.storage else {
        return Err(Error::InvalidParameter(format!("{} is not digital media", spec.name)));
    };
    compression.expect_unit(Unit::DimensionlessRatio)?;
    let storage_bits = unit_storage_megabytes * BITS_PER_MEGABIT * BITS_PER_BYTE;
    let mut out = AnnualSeries::new(Unit::MinutesPerYear);
    for (year, sales) in spec.yearly_sales.iter() {
        let Some(ratio) = compression.get(year) else {
            continue;
        };
        if ratio <= 0.0 {
            return Err(Error::InvalidValue {
                year,
                value: ratio,
                reason: "compression ratio must be positive",
            });
        }
        out.insert(year, sales * storage_bits * ratio / one_min_uncompressed_bits)?;
    }
    Ok(out)
}

/// What the adoption share is divided by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// Internet plus every competing channel.
    #[default]
    AllDomains,
    /// Competing channels only; the result may exceed one.
    CompetitorsOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareSeries {
    pub share: AnnualSeries,
    /// Years dropped because the denominator was zero.
    pub omitted_years: Vec<i32>,
}

fn common_years<'a>(usages: impl IntoIterator<Item = &'a DomainUsage>) -> Result<Vec<i32>> {
    let mut iter = usages.into_iter();
    let first = iter.next().expect("at least one usage");
    let unit = first.usage.unit();
    let mut years: Vec<i32> = first.usage.years().collect();
    for u in iter {
        u.usage.expect_unit(unit)?;
        years.retain(|&y| u.usage.get(y).is_some());
    }
    if years.is_empty() {
        return Err(Error::EmptyAlignment);
    }
    Ok(years)
}

/// Internet usage divided by the total usage of all channels, over the
/// years every channel covers.
pub fn adoption_share(internet: &DomainUsage, physical: &[DomainUsage]) -> Result<ShareSeries> {
    adoption_share_with(internet, physical, Denominator::AllDomains)
}

pub fn adoption_share_with(
    internet: &DomainUsage,
    physical: &[DomainUsage],
    denominator: Denominator,
) -> Result<ShareSeries> {
    let years = common_years(std::iter::once(internet).chain(physical))?;
    let mut share = AnnualSeries::new(Unit::DimensionlessShare);
    let mut omitted_years = Vec::new();
    for year in years {
        let own = internet.usage.get(year).expect("common year");
        let others = physical.iter().map(|p| p.usage.get(year).expect("common year"));
        let total: f64 = match denominator {
            Denominator::AllDomains => std::iter::once(own).chain(others).sum(),
            Denominator::CompetitorsOnly => others.sum(),
        };
        if total > 0.0 {
            share.insert(year, own / total)?;
        } else {
            omitted_years.push(year);
        }
    }
    Ok(ShareSeries { share, omitted_years })
}

/// Share of every channel (first entry is `usages[0]`) over a common
/// denominator.
pub fn market_shares(usages: &[DomainUsage]) -> Result<Vec<AnnualSeries>> {
    if usages.is_empty() {
        return Err(Error::InvalidParameter("no usages".into()));
    }
    let years = common_years(usages)?;
    let mut out = vec![AnnualSeries::new(Unit::DimensionlessShare); usages.len()];
    for year in years {
        let values: Vec<f64> = usages.iter().map(|u| u.usage.get(year).expect("common year")).collect();
        let total: f64 = values.iter().sum();
        if total <= 0.0 {
            continue;
        }
        for (series, v) in out.iter_mut().zip(values) {
            series.insert(year, v / total)?;
        }
    }
    Ok(out)
}

/// Combines per-protocol internet shares weighted by the fraction of each
/// protocol's traffic that is the media type.
pub fn protocol_mix(protocol_shares: &[(AnnualSeries, f64)]) -> Result<AnnualSeries> {
    let Some((first, _)) = protocol_shares.first() else {
        return Ok(AnnualSeries::new(Unit::DimensionlessShare));
    };
    for (series, fraction) in protocol_shares {
        series.expect_unit(Unit::DimensionlessShare)?;
        if !(0.0..=1.0).contains(fraction) {
            return Err(Error::InvalidParameter(format!(
                "media fraction {fraction} outside [0, 1]"
            )));
        }
    }
    let mut out = AnnualSeries::new(Unit::DimensionlessShare);
    'years: for year in first.years() {
        let mut total = 0.0;
        for (series, fraction) in protocol_shares {
            match series.get(year) {
                Some(v) => total += v * fraction,
                None => continue 'years,
            }
        }
        out.insert(year, total)?;
    }
    Ok(out)
}

/// Fills `years` from a compression table: ratio 1 before its first year,
/// its last value after its last year. Gaps inside the table stay gaps.
pub fn extend_compression(compression: &AnnualSeries, years: RangeInclusive<i32>) -> Result<AnnualSeries> {
    compression.expect_unit(Unit::DimensionlessRatio)?;
    let (Some(first), Some(last)) = (compression.first_year(), compression.last_year()) else {
        return Err(Error::InvalidParameter("empty compression table".into()));
    };
    let last_value = compression.get(last).expect("last year present");
    let mut out = AnnualSeries::new(Unit::DimensionlessRatio);
    for year in years {
        let value = if year < first {
            Some(1.0)
        } else if year > last {
            Some(last_value)
        } else {
            compression.get(year)
        };
        if let Some(v) = value {
            out.insert(year, v)?;
        }
    }
    Ok(out)
}

/// Everything needed to count usage of one media type across the internet
/// and its physical competitors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediaMarket {
    pub kind: MediaKind,
    pub traffic_bits: AnnualSeries,
    pub media_share: AnnualSeries,
    pub compression: AnnualSeries,
    pub physical: Vec<PhysicalMediaSpec>,
}

impl MediaMarket {
    pub fn one_minute_bits(&self) -> f64 {
        MediaSpec::one_minute(self.kind).size_bits()
    }

    fn compression_over_traffic(&self) -> Result<AnnualSeries> {
        match (self.traffic_bits.first_year(), self.traffic_bits.last_year()) {
            (Some(a), Some(b)) => extend_compression(&self.compression, a..=b),
            _ => Ok(AnnualSeries::new(Unit::DimensionlessRatio)),
        }
    }

    pub fn internet_minutes(&self) -> Result<AnnualSeries> {
        internet_media_minutes(
            &self.traffic_bits,
            &self.media_share,
            &self.compression_over_traffic()?,
            self.one_minute_bits(),
        )
    }

    pub fn physical_minutes(&self, spec: &PhysicalMediaSpec) -> Result<AnnualSeries> {
        match spec.storage {
            Storage::Analog { .. } => analog_media_minutes(spec),
            Storage::Digital { .. } => {
                let compression = match (spec.yearly_sales.first_year(), spec.yearly_sales.last_year()) {
                    (Some(a), Some(b)) => extend_compression(&self.compression, a..=b)?,
                    _ => AnnualSeries::new(Unit::DimensionlessRatio),
                };
                digital_media_minutes(spec, &compression, self.one_minute_bits())
            }
        }
    }

    /// Internet usage and each physical channel's usage in `metric`.
    pub fn usages(&self, metric: UsageMetric) -> Result<(DomainUsage, Vec<DomainUsage>)> {
        let unit = metric.unit();
        let one_min = self.one_minute_bits();
        let internet = match metric {
            UsageMetric::Minutes => self.internet_minutes()?,
            UsageMetric::RawBits => {
                let mut out = AnnualSeries::new(unit);
                for (year, traffic) in self.traffic_bits.iter() {
                    if let Some(share) = self.media_share.get(year) {
                        out.insert(year, traffic * share)?;
                    }
                }
                out
            }
            UsageMetric::Units { unit_length_minutes } => {
                check_unit_length(unit_length_minutes)?;
                self.internet_minutes()?
                    .map_values(unit, |_, m| m / unit_length_minutes)?
            }
        };
        let mut physical = Vec::with_capacity(self.physical.len());
        for spec in &self.physical {
            let usage = match (metric, spec.storage) {
                (UsageMetric::Minutes, _) => self.physical_minutes(spec)?,
                (UsageMetric::RawBits, Storage::Analog { .. }) => {
                    analog_media_minutes(spec)?.map_values(unit, |_, m| m * one_min)?
                }
                (UsageMetric::RawBits, Storage::Digital { unit_storage_megabytes, .. }) => {
                    let bits = unit_storage_megabytes * BITS_PER_MEGABIT * BITS_PER_BYTE;
                    spec.yearly_sales.map_values(unit, |_, s| s * bits)?
                }
                (UsageMetric::Units { unit_length_minutes }, Storage::Analog { .. }) => {
                    analog_media_minutes(spec)?.map_values(unit, |_, m| m / unit_length_minutes)?
                }
                (UsageMetric::Units { unit_length_minutes }, Storage::Digital { nominal_content_minutes, .. }) => {
                    let per_unit = nominal_content_minutes / unit_length_minutes;
                    spec.yearly_sales.map_values(unit, |_, s| s * per_unit)?
                }
            };
            physical.push(DomainUsage {
                domain_name: spec.name.clone(),
                usage,
            });
        }
        Ok((
            DomainUsage {
                domain_name: "internet".into(),
                usage: internet,
            },
            physical,
        ))
    }

    pub fn adoption(&self, metric: UsageMetric) -> Result<ShareSeries> {
        let (internet, physical) = self.usages(metric)?;
        adoption_share(&internet, &physical)
    }
}

fn check_unit_length(len: f64) -> Result<()> {
    if len.is_finite() && len > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("unit length must be positive, got {len} min")))
    }
}
