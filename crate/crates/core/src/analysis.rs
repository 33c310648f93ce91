//! Statistics over yearly frames: premium convergence and dispersion,
//! loss-ratio coupling, portfolio shape and insolvencies.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::metrics::YearFrame;

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    Some((xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt())
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    let (mx, my) = (mean(xs)?, mean(ys)?);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Offered premium means of every syndicate-year in `years`.
pub fn offered_premiums(frames: &[YearFrame], years: RangeInclusive<u32>) -> Vec<f64> {
    frames
        .iter()
        .filter(|f| years.contains(&f.year))
        .filter_map(|f| f.premiums_offered_mean)
        .collect()
}

/// Market-mean offered premium per year (mean over syndicates that quoted).
pub fn market_offered_by_year(frames: &[YearFrame]) -> BTreeMap<u32, f64> {
    let mut acc: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for f in frames {
        if let Some(p) = f.premiums_offered_mean {
            acc.entry(f.year).or_default().push(p);
        }
    }
    acc.into_iter().filter_map(|(y, v)| Some((y, mean(&v)?))).collect()
}

/// Cross-syndicate standard deviation of offered premiums, averaged over
/// the years in `years` that have at least two quoting syndicates.
pub fn premium_dispersion(frames: &[YearFrame], years: RangeInclusive<u32>) -> Option<f64> {
    let mut by_year: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for f in frames.iter().filter(|f| years.contains(&f.year)) {
        if let Some(p) = f.premiums_offered_mean {
            by_year.entry(f.year).or_default().push(p);
        }
    }
    let per_year: Vec<f64> = by_year
        .values()
        .filter(|v| v.len() >= 2)
        .filter_map(|v| std_dev(v))
        .collect();
    mean(&per_year)
}

/// Mean pairwise Pearson correlation of yearly loss ratios across
/// syndicates, over the years both members of a pair report one.
pub fn loss_ratio_correlation(frames: &[YearFrame]) -> Option<f64> {
    let mut series: BTreeMap<usize, BTreeMap<u32, f64>> = BTreeMap::new();
    for f in frames {
        if let Some(lr) = f.loss_ratio {
            series.entry(f.syndicate_id).or_default().insert(f.year, lr);
        }
    }
    let ids: Vec<usize> = series.keys().copied().collect();
    let mut correlations = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            let (sa, sb) = (&series[a], &series[b]);
            let (xs, ys): (Vec<f64>, Vec<f64>) = sa
                .iter()
                .filter_map(|(y, x)| sb.get(y).map(|v| (*x, *v)))
                .unzip();
            if let Some(r) = pearson(&xs, &ys) {
                correlations.push(r);
            }
        }
    }
    mean(&correlations)
}

/// Mean uniform deviation of solvent syndicate-years in `years`.
pub fn uniform_deviation(frames: &[YearFrame], years: RangeInclusive<u32>) -> Option<f64> {
    let v: Vec<f64> = frames
        .iter()
        .filter(|f| years.contains(&f.year) && !f.insolvent)
        .map(|f| f.uniform_deviation)
        .collect();
    mean(&v)
}

pub fn insolvencies(frames: &[YearFrame]) -> usize {
    frames.iter().filter(|f| f.insolvent).count()
}

/// Year-over-year capital change per syndicate, keyed by year. The first
/// year is measured against `initial_capital`.
pub fn capital_changes(frames: &[YearFrame], initial_capital: f64) -> BTreeMap<usize, BTreeMap<u32, f64>> {
    let mut out: BTreeMap<usize, BTreeMap<u32, f64>> = BTreeMap::new();
    let mut last: BTreeMap<usize, f64> = BTreeMap::new();
    let mut sorted: Vec<&YearFrame> = frames.iter().collect();
    sorted.sort_by_key(|f| (f.syndicate_id, f.year));
    for f in sorted {
        let prev = last.insert(f.syndicate_id, f.capital).unwrap_or(initial_capital);
        out.entry(f.syndicate_id).or_default().insert(f.year, f.capital - prev);
    }
    out
}

/// Headline statistics of one replication.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub insolvencies: usize,
    pub final_capital_mean: f64,
    pub offered_premium_final_decade: Option<f64>,
    pub premium_dispersion: Option<f64>,
    pub loss_ratio_correlation: Option<f64>,
    pub uniform_deviation_final_decade: Option<f64>,
    pub catastrophes: usize,
    pub policies_bound: usize,
    pub risks: u64,
}

impl RunSummary {
    pub fn from_run(run: &crate::market::RunOutput, horizon_years: u32) -> Self {
        let last_decade = horizon_years.saturating_sub(9).max(1)..=horizon_years;
        let capitals: Vec<f64> = run.accounts.iter().map(|a| a.capital_end).collect();
        RunSummary {
            seed: run.seed,
            insolvencies: insolvencies(&run.frames),
            final_capital_mean: mean(&capitals).unwrap_or(0.0),
            offered_premium_final_decade: mean(&offered_premiums(&run.frames, last_decade.clone())),
            premium_dispersion: premium_dispersion(&run.frames, horizon_years.min(11)..=horizon_years),
            loss_ratio_correlation: loss_ratio_correlation(&run.frames),
            uniform_deviation_final_decade: uniform_deviation(&run.frames, last_decade),
            catastrophes: run.catastrophes.len(),
            policies_bound: run.policies.len(),
            risks: run.risks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(year: u32, syndicate_id: usize, offered: Option<f64>, lr: Option<f64>, capital: f64) -> YearFrame {
        YearFrame {
            year,
            syndicate_id,
            capital,
            premiums_offered_mean: offered,
            premiums_earned: 1.0,
            claims_paid: lr.unwrap_or(0.0),
            loss_ratio: lr,
            insolvent: false,
            uniform_deviation: 0.0,
            policies_in_force: 0,
        }
    }

    #[test]
    fn pearson_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &[8.0, 6.0, 4.0, 2.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(pearson(&x, &[1.0; 4]).is_none());
    }

    #[test]
    fn dispersion_and_correlation() {
        let frames = vec![
            frame(1, 0, Some(100.0), Some(0.5), 10.0),
            frame(1, 1, Some(300.0), Some(0.6), 10.0),
            frame(2, 0, Some(200.0), Some(1.5), 8.0),
            frame(2, 1, Some(200.0), Some(1.6), 9.0),
            frame(3, 0, None, Some(0.7), 7.0),
            frame(3, 1, Some(250.0), Some(0.8), 12.0),
        ];
        assert_eq!(premium_dispersion(&frames, 1..=3), Some(50.0));
        assert!((loss_ratio_correlation(&frames).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(offered_premiums(&frames, 2..=3), vec![200.0, 200.0, 250.0]);
        let changes = capital_changes(&frames, 10.0);
        assert_eq!(changes[&0][&1], 0.0);
        assert_eq!(changes[&0][&2], -2.0);
        assert_eq!(changes[&1][&3], 3.0);
        assert_eq!(market_offered_by_year(&frames)[&1], 200.0);
    }
}
