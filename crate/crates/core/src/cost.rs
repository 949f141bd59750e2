//! Distribution performance, in media units per real dollar, for internet
//! delivery and for mailing physical media, plus uncompressed reference sizes.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{AnnualSeries, Unit};

/// Seconds in a 30-day month.
pub const SECONDS_IN_MONTH: f64 = 2_592_000.0;

/// Uncompressed audio bit rate used for every bundled reference medium.
pub const REFERENCE_AUDIO_BIT_RATE: f64 = 633_600.0;

pub const BITS_PER_MEGABIT: f64 = 1e6;
pub const BITS_PER_BYTE: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediaKind {
    Audio,
    Video,
}

impl MediaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MediaKind::Audio => "audio",
            MediaKind::Video => "video",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub pixel_height: u32,
    pub pixel_width: u32,
    pub bits_per_pixel: u32,
    pub frames_per_second: f64,
}

impl FrameSpec {
    pub const STANDARD_DEFINITION: FrameSpec = FrameSpec {
        pixel_height: 480,
        pixel_width: 640,
        bits_per_pixel: 24,
        frames_per_second: 30.0,
    };

    fn bits_per_second(&self) -> f64 {
        f64::from(self.pixel_height)
            * f64::from(self.pixel_width)
            * f64::from(self.bits_per_pixel)
            * self.frames_per_second
    }
}

/// An uncompressed reference unit of media.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediaSpec {
    kind: MediaKind,
    length_seconds: f64,
    audio_bit_rate: f64,
    frame: Option<FrameSpec>,
    override_size_bits: Option<f64>,
}

impl MediaSpec {
    pub fn audio(audio_bit_rate: f64, length_seconds: f64) -> Result<Self> {
        check_positive("length_seconds", length_seconds)?;
        check_positive("audio_bit_rate", audio_bit_rate)?;
        Ok(Self {
            kind: MediaKind::Audio,
            length_seconds,
            audio_bit_rate,
            frame: None,
            override_size_bits: None,
        })
    }

    pub fn video(frame: FrameSpec, audio_bit_rate: f64, length_seconds: f64) -> Result<Self> {
        check_positive("length_seconds", length_seconds)?;
        check_non_negative("audio_bit_rate", audio_bit_rate)?;
        if frame.pixel_height == 0 || frame.pixel_width == 0 || frame.bits_per_pixel == 0 {
            return Err(Error::InvalidParameter(
                "frame dimensions and bits per pixel must be positive".into(),
            ));
        }
        check_positive("frames_per_second", frame.frames_per_second)?;
        Ok(Self {
            kind: MediaKind::Video,
            length_seconds,
            audio_bit_rate,
            frame: Some(frame),
            override_size_bits: None,
        })
    }

    /// Video whose uncompressed size is known only in aggregate.
    pub fn video_with_size(size_bits: f64, length_seconds: f64) -> Result<Self> {
        check_positive("override_size_bits", size_bits)?;
        check_positive("length_seconds", length_seconds)?;
        Ok(Self {
            kind: MediaKind::Video,
            length_seconds,
            audio_bit_rate: 0.0,
            frame: None,
            override_size_bits: Some(size_bits),
        })
    }

    /// Skips validation so degenerate frames can be evaluated.
    #[cfg(test)]
    pub(crate) fn video_unchecked(frame: FrameSpec, audio_bit_rate: f64, length_seconds: f64) -> Self {
        Self {
            kind: MediaKind::Video,
            length_seconds,
            audio_bit_rate,
            frame: Some(frame),
            override_size_bits: None,
        }
    }

    /// 60-minute album.
    pub fn album() -> Self {
        Self::audio(REFERENCE_AUDIO_BIT_RATE, 3600.0).expect("valid preset")
    }

    /// 3-minute song.
    pub fn song() -> Self {
        Self::audio(REFERENCE_AUDIO_BIT_RATE, 180.0).expect("valid preset")
    }

    /// Five-minute standard-definition clip.
    pub fn clip() -> Self {
        Self::video(FrameSpec::STANDARD_DEFINITION, REFERENCE_AUDIO_BIT_RATE, 300.0).expect("valid preset")
    }

    /// 90-minute standard-definition movie.
    pub fn sd_movie() -> Self {
        Self::video(FrameSpec::STANDARD_DEFINITION, REFERENCE_AUDIO_BIT_RATE, 5400.0).expect("valid preset")
    }

    /// 90-minute high-definition movie; only its total size is known.
    pub fn hd_movie() -> Self {
        Self::video_with_size(3_027e9, 5400.0).expect("valid preset")
    }

    /// One uncompressed minute of the given kind at the reference quality.
    pub fn one_minute(kind: MediaKind) -> Self {
        match kind {
            MediaKind::Audio => Self::audio(REFERENCE_AUDIO_BIT_RATE, 60.0),
            MediaKind::Video => Self::video(FrameSpec::STANDARD_DEFINITION, REFERENCE_AUDIO_BIT_RATE, 60.0),
        }
        .expect("valid preset")
    }

    pub fn preset(name: &str) -> Option<Self> {
        Some(match name {
            "album" => Self::album(),
            "song" => Self::song(),
            "clip" => Self::clip(),
            "sd_movie" => Self::sd_movie(),
            "hd_movie" => Self::hd_movie(),
            _ => return None,
        })
    }

    pub fn kind(&self) -> MediaKind {
        self.kind
    }

    pub fn length_seconds(&self) -> f64 {
        self.length_seconds
    }

    pub fn audio_bit_rate(&self) -> f64 {
        self.audio_bit_rate
    }

    pub fn frame(&self) -> Option<&FrameSpec> {
        self.frame.as_ref()
    }

    pub fn override_size_bits(&self) -> Option<f64> {
        self.override_size_bits
    }

    /// Uncompressed size in bits, whichever kind this is.
    pub fn size_bits(&self) -> f64 {
        match self.kind {
            MediaKind::Audio => self.audio_bit_rate * self.length_seconds,
            MediaKind::Video => self.override_size_bits.unwrap_or_else(|| {
                let picture = self.frame.map_or(0.0, |f| f.bits_per_second());
                (picture + self.audio_bit_rate) * self.length_seconds
            }),
        }
    }

    pub fn size_megabits(&self) -> f64 {
        self.size_bits() / BITS_PER_MEGABIT
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be non-negative and finite, got {v}")))
    }
}

fn wrong_kind(expected: &'static str, spec: &MediaSpec) -> Error {
    Error::WrongMediaKind {
        expected,
        found: spec.kind.as_str(),
    }
}

/// Bit rate times length.
pub fn audio_file_size(spec: &MediaSpec) -> Result<f64> {
    match spec.kind {
        MediaKind::Audio => Ok(spec.size_bits()),
        MediaKind::Video => Err(wrong_kind("audio", spec)),
    }
}

/// Picture bits per second plus the audio track, times length. An override
/// size wins when present.
pub fn video_file_size(spec: &MediaSpec) -> Result<f64> {
    match spec.kind {
        MediaKind::Video => Ok(spec.size_bits()),
        MediaKind::Audio => Err(wrong_kind("video", spec)),
    }
}

/// Monthly price of one megabit per second of internet capacity, in real
/// dollars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternetPricing {
    speed_cost: AnnualSeries,
}

impl InternetPricing {
    pub fn new(speed_cost: AnnualSeries) -> Result<Self> {
        speed_cost.expect_unit(Unit::RealDollarsPerMegabitMonth)?;
        if let Some((year, value)) = speed_cost.iter().find(|&(_, v)| v <= 0.0) {
            return Err(Error::InvalidValue {
                year,
                value,
                reason: "speed cost must be positive",
            });
        }
        Ok(Self { speed_cost })
    }

    pub fn speed_cost(&self) -> &AnnualSeries {
        &self.speed_cost
    }

    pub fn seconds_in_month(&self) -> f64 {
        SECONDS_IN_MONTH
    }
}

/// Media units delivered per real dollar of internet capacity: a month of
/// one megabit per second, bought at that year's price, moves
/// `SECONDS_IN_MONTH` megabits; compression stretches each megabit.
/// Years missing from either input are left out.
pub fn internet_distribution_perf(
    pricing: &InternetPricing,
    compression: &AnnualSeries,
    spec: &MediaSpec,
    years: RangeInclusive<i32>,
) -> Result<AnnualSeries> {
    compression.expect_unit(Unit::DimensionlessRatio)?;
    let size = spec.size_megabits();
    let mut out = AnnualSeries::new(Unit::MediaUnitsPerRealDollar);
    for year in years {
        let (Some(cost), Some(ratio)) = (pricing.speed_cost.get(year), compression.get(year)) else {
            continue;
        };
        if ratio <= 0.0 {
            return Err(Error::InvalidValue {
                year,
                value: ratio,
                reason: "compression ratio must be positive",
            });
        }
        out.insert(year, SECONDS_IN_MONTH / cost * ratio / size)?;
    }
    Ok(out)
}

/// Postage for mailing one physical item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MailSpec {
    weight_ounces: u32,
    postage_first: AnnualSeries,
    postage_additional: AnnualSeries,
}

impl MailSpec {
    /// `weight_ounces` is rounded up to whole ounces, with a one-ounce
    /// minimum.
    pub fn new(
        weight_ounces: f64,
        postage_first: AnnualSeries,
        postage_additional: AnnualSeries,
    ) -> Result<Self> {
        if !(weight_ounces.is_finite() && weight_ounces > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weight must be positive, got {weight_ounces} oz"
            )));
        }
        postage_first.expect_unit(Unit::RealDollars)?;
        postage_additional.expect_unit(Unit::RealDollars)?;
        for (year, value) in postage_first.iter().chain(postage_additional.iter()) {
            if value <= 0.0 {
                return Err(Error::InvalidValue {
                    year,
                    value,
                    reason: "postage must be positive",
                });
            }
        }
        Ok(Self {
            weight_ounces: (weight_ounces.ceil() as u32).max(1),
            postage_first,
            postage_additional,
        })
    }

    pub fn weight_ounces(&self) -> u32 {
        self.weight_ounces
    }
}

/// Items mailed per real dollar. Years without postage data are left out.
pub fn mail_distribution_perf(mail: &MailSpec, years: RangeInclusive<i32>) -> Result<AnnualSeries> {
    let extra = f64::from(mail.weight_ounces - 1);
    let mut out = AnnualSeries::new(Unit::MediaUnitsPerRealDollar);
    for year in years {
        let Some(first) = mail.postage_first.get(year) else {
            continue;
        };
        let additional = if extra > 0.0 {
            match mail.postage_additional.get(year) {
                Some(a) => a,
                None => continue,
            }
        } else {
            0.0
        };
        out.insert(year, 1.0 / (first + extra * additional))?;
    }
    Ok(out)
}
