//! Exponential improvement curves: log-linear fitting, improvement rates,
//! extrapolation, performance crossover and adoption-knee detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{align, AnnualSeries, Unit};

/// Extrapolating further than this many years past either edge of the fit
/// window sets [`Extrapolated::beyond_horizon`].
pub const EXTRAPOLATION_HORIZON_YEARS: i32 = 10;

/// `value(t) = intercept * exp(rate * (t - t0))`, fitted by least squares on
/// the logarithm of the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub intercept: f64,
    pub rate: f64,
    pub t0: i32,
    pub window: (i32, i32),
    pub n_points: usize,
    pub r_squared: f64,
}

impl ExpFit {
    pub fn value_at(&self, year: f64) -> f64 {
        self.intercept * (self.rate * (year - f64::from(self.t0))).exp()
    }

    /// Annual improvement in percent.
    pub fn tir(&self) -> f64 {
        tir(self)
    }
}

/// Fits an exponential to the points of `series` inside `window`
/// (inclusive). Without a window every point is used. The reference year is
/// the first year of the window.
pub fn fit_exponential(series: &AnnualSeries, window: Option<(i32, i32)>) -> Result<ExpFit> {
    let (from, to) = match window {
        Some((from, to)) if from > to => {
            return Err(Error::InvalidParameter(format!(
                "fit window {from}..{to} is reversed"
            )))
        }
        Some(w) => w,
        None => match (series.first_year(), series.last_year()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::TooFewPoints { needed: 2, found: 0 }),
        },
    };
    let points: Vec<(f64, f64)> = series
        .restrict(from..=to)
        .iter()
        .map(|(year, value)| {
            if value > 0.0 {
                Ok((f64::from(year - from), value.ln()))
            } else {
                Err(Error::InvalidValue {
                    year,
                    value,
                    reason: "logarithm needs a positive value",
                })
            }
        })
        .collect::<Result<_>>()?;
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: points.len(),
        });
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let rate = sxy / sxx;
    let ln_intercept = mean_y - rate * mean_x;

    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (ln_intercept + rate * x);
            r * r
        })
        .sum();
    // A flat series is fitted perfectly.
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };

    Ok(ExpFit {
        intercept: ln_intercept.exp(),
        rate,
        t0: from,
        window: (from, to),
        n_points: points.len(),
        r_squared,
    })
}

/// Technological improvement rate: `(e^k - 1)` in percent per year.
pub fn tir(fit: &ExpFit) -> f64 {
    rate_to_percent(fit.rate)
}

pub fn rate_to_percent(rate: f64) -> f64 {
    rate.exp_m1() * 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolated {
    pub value: f64,
    pub beyond_horizon: bool,
}

pub fn extrapolate(fit: &ExpFit, year: i32) -> Extrapolated {
    let distance = if year < fit.window.0 {
        fit.window.0 - year
    } else {
        (year - fit.window.1).max(0)
    };
    Extrapolated {
        value: fit.value_at(f64::from(year)),
        beyond_horizon: distance > EXTRAPOLATION_HORIZON_YEARS,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMode {
    Empirical,
    Fitted,
}

/// Which year counts as the empirical crossover when the curves touch more
/// than once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverRule {
    /// First year from which the replacement stays at or above the target
    /// for every later aligned year.
    #[default]
    Sustained,
    /// First aligned year at which the replacement is at or above the target.
    FirstReach,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverResult {
    pub year: Option<i32>,
    pub fractional_year: Option<f64>,
    pub mode: DetectionMode,
}

impl CrossoverResult {
    fn empirical(year: Option<i32>) -> Self {
        Self {
            year,
            fractional_year: None,
            mode: DetectionMode::Empirical,
        }
    }
}

/// Empirical crossover with the default [`CrossoverRule::Sustained`] rule.
pub fn crossover_empirical(
    replacement: &AnnualSeries,
    target: &AnnualSeries,
) -> Result<CrossoverResult> {
    crossover_empirical_with(replacement, target, CrossoverRule::default())
}

/// Compares the two series year by year; ties count as crossed and nothing
/// is interpolated between years.
pub fn crossover_empirical_with(
    replacement: &AnnualSeries,
    target: &AnnualSeries,
    rule: CrossoverRule,
) -> Result<CrossoverResult> {
    target.expect_unit(replacement.unit())?;
    let aligned = align(replacement, target);
    if aligned.is_empty() {
        return Err(Error::EmptyAlignment);
    }
    let year = match rule {
        CrossoverRule::FirstReach => aligned.iter().find(|(_, r, t)| r >= t).map(|p| p.0),
        CrossoverRule::Sustained => {
            let mut year = None;
            for &(y, r, t) in aligned.iter().rev() {
                if r >= t {
                    year = Some(y);
                } else {
                    break;
                }
            }
            year
        }
    };
    Ok(CrossoverResult::empirical(year))
}

/// Intersection of two fitted curves. The integer year is the first whole
/// year at which the replacement is at or above the target; when the
/// replacement improves more slowly it never overtakes and the year is
/// absent.
pub fn crossover_fitted(replacement: &ExpFit, target: &ExpFit) -> Result<CrossoverResult> {
    let rate_gap = replacement.rate - target.rate;
    // ln R(t) - ln T(t) = level_gap + rate_gap * (t - t0R)
    let level_gap = replacement.intercept.ln()
        - target.intercept.ln()
        - target.rate * f64::from(replacement.t0 - target.t0);
    if rate_gap == 0.0 {
        if level_gap == 0.0 {
            return Err(Error::DegenerateCrossover);
        }
        return Ok(CrossoverResult {
            year: None,
            fractional_year: None,
            mode: DetectionMode::Fitted,
        });
    }
    let t = f64::from(replacement.t0) - level_gap / rate_gap;
    let year = if rate_gap > 0.0 {
        Some((t - 1e-9).ceil() as i32)
    } else {
        None
    };
    Ok(CrossoverResult {
        year,
        fractional_year: Some(t),
        mode: DetectionMode::Fitted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KneeResult {
    pub year: Option<i32>,
    pub threshold: f64,
}

/// First year the adoption share reaches `threshold`.
pub fn knee(adoption: &AnnualSeries, threshold: f64) -> Result<KneeResult> {
    adoption.expect_unit(Unit::DimensionlessShare)?;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "knee threshold {threshold} must lie strictly between 0 and 1"
        )));
    }
    for (year, value) in adoption.iter() {
        if value > 1.0 {
            return Err(Error::InvalidValue {
                year,
                value,
                reason: "adoption share above 1",
            });
        }
    }
    let year = adoption.iter().find(|&(_, v)| v >= threshold).map(|p| p.0);
    Ok(KneeResult { year, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perf(pairs: impl IntoIterator<Item = (i32, f64)>) -> AnnualSeries {
        AnnualSeries::from_pairs(Unit::MediaUnitsPerRealDollar, pairs).unwrap()
    }

    fn exact(a: f64, k: f64, t0: i32, years: std::ops::RangeInclusive<i32>) -> AnnualSeries {
        perf(years.map(|y| (y, a * (k * f64::from(y - t0)).exp())))
    }

    fn share(pairs: impl IntoIterator<Item = (i32, f64)>) -> AnnualSeries {
        AnnualSeries::from_pairs(Unit::DimensionlessShare, pairs).unwrap()
    }

    #[test]
    fn flat_series_has_zero_rate() {
        let fit = fit_exponential(&perf((1990..2000).map(|y| (y, 3.5))), None).unwrap();
        assert!(fit.rate.abs() < 1e-12);
        assert!(tir(&fit).abs() < 1e-10);
        assert!((fit.intercept - 3.5).abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn doubling_series() {
        let s = perf((0..10).map(|i| (2000 + i, 2f64.powi(i))));
        let fit = fit_exponential(&s, None).unwrap();
        assert!((fit.rate - std::f64::consts::LN_2).abs() < 1e-9);
        assert!((tir(&fit) - 100.0).abs() < 1e-7);
        assert_eq!(fit.t0, 2000);
        assert_eq!(fit.n_points, 10);
    }

    #[test]
    fn window_selects_points_and_reference_year() {
        let s = exact(5.0, 0.1, 2000, 1990..=2010);
        let fit = fit_exponential(&s, Some((1995, 2005))).unwrap();
        assert_eq!(fit.t0, 1995);
        assert_eq!(fit.window, (1995, 2005));
        assert_eq!(fit.n_points, 11);
        assert!((fit.intercept - 5.0 * (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        let s = perf([(2000, 1.0), (2001, 0.0), (2002, 4.0)]);
        assert!(matches!(fit_exponential(&s, None), Err(Error::InvalidValue { year: 2001, .. })));
        let one = perf([(2000, 1.0)]);
        assert!(matches!(fit_exponential(&one, None), Err(Error::TooFewPoints { found: 1, .. })));
        assert!(fit_exponential(&perf([(2000, 1.0), (2010, 2.0)]), Some((2001, 2009))).is_err());
        assert!(fit_exponential(&perf([]), None).is_err());
        assert!(fit_exponential(&s, Some((2002, 2000))).is_err());
    }

    #[test]
    fn tir_examples() {
        let mut fit = fit_exponential(&perf([(0, 1.0), (1, 1.0)]), None).unwrap();
        fit.rate = 0.0305;
        assert!((tir(&fit) - 3.097).abs() < 5e-4);
        assert_eq!(rate_to_percent(0.0), 0.0);
        assert!((rate_to_percent(std::f64::consts::LN_2) - 100.0).abs() < 1e-10);
    }

    #[test]
    fn extrapolation() {
        let fit = fit_exponential(&exact(5.0, 0.1, 2000, 2000..=2010), None).unwrap();
        let at = extrapolate(&fit, 2015);
        let want = 5.0 * 1.5f64.exp();
        assert!((at.value - want).abs() / want < 1e-9);
        assert!(!at.beyond_horizon);
        assert!(extrapolate(&fit, 2021).beyond_horizon);
        assert!(extrapolate(&fit, 1989).beyond_horizon);
        assert!((extrapolate(&fit, 2000).value - 5.0).abs() < 1e-12);

        let doubling = fit_exponential(&perf((0..5).map(|i| (i, 2f64.powi(i)))), None).unwrap();
        assert!((extrapolate(&doubling, 3).value - 8.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_crossover() {
        let r = perf([(1996, 1.0), (1997, 2.0), (1998, 3.0)]);
        let t = perf([(1996, 2.0), (1997, 2.0), (1998, 2.0)]);
        let c = crossover_empirical(&r, &t).unwrap();
        // ties cross
        assert_eq!(c.year, Some(1997));
        assert_eq!(c.mode, DetectionMode::Empirical);

        let below = perf([(1996, 0.5), (1997, 0.5)]);
        assert_eq!(crossover_empirical(&below, &t).unwrap().year, None);
    }

    #[test]
    fn sustained_rule_skips_transient_crossing() {
        let r = perf([(1989, 1.4), (1990, 1.75), (1991, 1.72), (1992, 1.98), (1993, 9.1)]);
        let t = perf([(1989, 1.61), (1990, 1.61), (1991, 1.85), (1992, 1.85), (1993, 1.85)]);
        assert_eq!(crossover_empirical(&r, &t).unwrap().year, Some(1992));
        let first = crossover_empirical_with(&r, &t, CrossoverRule::FirstReach).unwrap();
        assert_eq!(first.year, Some(1990));

        let fading = perf([(1989, 3.0), (1990, 3.0), (1991, 1.0)]);
        assert_eq!(crossover_empirical(&fading, &t).unwrap().year, None);
    }

    #[test]
    fn empirical_crossover_errors() {
        let a = perf([(1990, 1.0)]);
        let b = perf([(2000, 1.0)]);
        assert!(matches!(crossover_empirical(&a, &b), Err(Error::EmptyAlignment)));
        let other = AnnualSeries::from_pairs(Unit::RealDollars, [(1990, 1.0)]).unwrap();
        assert!(matches!(crossover_empirical(&a, &other), Err(Error::UnitMismatch { .. })));
    }

    fn fit_of(a: f64, k: f64, t0: i32) -> ExpFit {
        ExpFit { intercept: a, rate: k, t0, window: (t0, t0 + 10), n_points: 11, r_squared: 1.0 }
    }

    #[test]
    fn fitted_crossover() {
        let c = crossover_fitted(&fit_of(1.0, 0.5, 0), &fit_of(std::f64::consts::E, 0.0, 0)).unwrap();
        assert!((c.fractional_year.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(c.year, Some(2));
        assert_eq!(c.mode, DetectionMode::Fitted);

        assert!(matches!(
            crossover_fitted(&fit_of(1.0, 0.3, 5), &fit_of(1.0, 0.3, 5)),
            Err(Error::DegenerateCrossover)
        ));
        let parallel = crossover_fitted(&fit_of(1.0, 0.3, 5), &fit_of(2.0, 0.3, 5)).unwrap();
        assert_eq!(parallel.year, None);
        assert_eq!(parallel.fractional_year, None);

        // slower replacement only falls behind
        let slower = crossover_fitted(&fit_of(3.0, 0.1, 0), &fit_of(1.0, 0.5, 0)).unwrap();
        assert_eq!(slower.year, None);
        assert!(slower.fractional_year.is_some());
    }

    #[test]
    fn fitted_crossover_handles_different_reference_years() {
        // R = e^{0.5 (t - 10)}, T = 1 from t0 = 0: they meet at t = 10.
        let c = crossover_fitted(&fit_of(1.0, 0.5, 10), &fit_of(1.0, 0.0, 0)).unwrap();
        assert!((c.fractional_year.unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(c.year, Some(10));
    }

    #[test]
    fn knee_examples() {
        let s = share([(1997, 0.001), (1998, 0.0075), (1999, 0.0275), (2000, 0.08), (2001, 0.15)]);
        assert_eq!(knee(&s, 0.01).unwrap().year, Some(1999));
        assert_eq!(knee(&s, 0.10).unwrap().year, Some(2001));
        let zeros = share((1990..2000).map(|y| (y, 0.0)));
        assert_eq!(knee(&zeros, 0.01).unwrap().year, None);
    }

    #[test]
    fn knee_errors() {
        let s = share([(2000, 0.5)]);
        assert!(knee(&s, 0.0).is_err());
        assert!(knee(&s, 1.0).is_err());
        let bad = share([(2000, 1.5)]);
        assert!(matches!(knee(&bad, 0.1), Err(Error::InvalidValue { .. })));
        let minutes = AnnualSeries::from_pairs(Unit::MinutesPerYear, [(2000, 0.5)]).unwrap();
        assert!(matches!(knee(&minutes, 0.1), Err(Error::UnitMismatch { .. })));
    }

    proptest! {
        #[test]
        fn exact_recovery(a in 1e-3f64..1e3, k in -1.0f64..1.0, t0 in 1950i32..2000, n in 2i32..30) {
            let fit = fit_exponential(&exact(a, k, t0, t0..=t0 + n - 1), None).unwrap();
            prop_assert!((fit.intercept - a).abs() / a < 1e-9);
            prop_assert!((fit.rate - k).abs() <= 1e-9 * k.abs().max(1.0));
            prop_assert!((fit.r_squared - 1.0).abs() < 1e-9);
        }

        #[test]
        fn scale_equivariance(
            values in proptest::collection::vec(1e-3f64..1e3, 2..25),
            c in 1e-3f64..1e3,
        ) {
            let s = perf(values.iter().enumerate().map(|(i, &v)| (1980 + i as i32, v)));
            let scaled = s.scale(c).unwrap();
            let f1 = fit_exponential(&s, None).unwrap();
            let f2 = fit_exponential(&scaled, None).unwrap();
            prop_assert!((f1.rate - f2.rate).abs() <= 1e-9 * f1.rate.abs().max(1.0));
            prop_assert!((f2.intercept - c * f1.intercept).abs() / (c * f1.intercept) < 1e-9);
        }

        #[test]
        fn crossover_monotone_under_scaling(
            r in proptest::collection::vec(0.01f64..10.0, 1..25),
            t in proptest::collection::vec(0.01f64..10.0, 25),
            up in 1.0f64..5.0,
            down in 0.2f64..1.0,
        ) {
            let rs = perf(r.iter().enumerate().map(|(i, &v)| (2000 + i as i32, v)));
            let ts = perf(t.iter().enumerate().map(|(i, &v)| (2000 + i as i32, v)));
            for rule in [CrossoverRule::Sustained, CrossoverRule::FirstReach] {
                let base = crossover_empirical_with(&rs, &ts, rule).unwrap().year;
                let higher = crossover_empirical_with(&rs.scale(up).unwrap(), &ts, rule).unwrap().year;
                let lower = crossover_empirical_with(&rs.scale(down).unwrap(), &ts, rule).unwrap().year;
                if let Some(b) = base {
                    prop_assert!(higher.is_some_and(|h| h <= b));
                    prop_assert!(lower.is_none_or(|l| l >= b));
                }
                if let Some(l) = lower {
                    prop_assert!(base.is_some_and(|b| b <= l));
                }
            }
        }

        #[test]
        fn knee_monotone_in_threshold(
            values in proptest::collection::vec(0.0f64..=1.0, 1..30),
            t1 in 0.001f64..0.999,
            t2 in 0.001f64..0.999,
        ) {
            let s = share(values.iter().enumerate().map(|(i, &v)| (1990 + i as i32, v)));
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            if let (Some(a), Some(b)) = (knee(&s, lo).unwrap().year, knee(&s, hi).unwrap().year) {
                prop_assert!(b >= a);
            }
        }

        #[test]
        fn fitted_agrees_with_empirical(
            a_r in 0.01f64..1.0, k_t in -0.2f64..0.2, dk in 0.05f64..1.0, a_t in 1.0f64..100.0,
        ) {
            let k_r = k_t + dk;
            let years = 2000..=2080;
            let rs = exact(a_r, k_r, 2000, years.clone());
            let ts = exact(a_t, k_t, 2000, years.clone());
            let fitted = crossover_fitted(
                &fit_exponential(&rs, None).unwrap(),
                &fit_exponential(&ts, None).unwrap(),
            ).unwrap();
            let empirical = crossover_empirical(&rs, &ts).unwrap();
            if let (Some(f), Some(e)) = (fitted.year, empirical.year) {
                prop_assert!((f - e).abs() <= 1);
            }
        }
    }
}
