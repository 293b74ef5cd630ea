//! Hypothesis tests and estimators used by Bob's verifier and the experiment harness.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::optics::ScreenPdf;

/// Default number of equal-probability test cells for screen data.
pub const DEFAULT_TEST_BINS: usize = 32;
/// Minimum expected count per test cell.
pub const MIN_EXPECTED: f64 = 5.0;
/// Fewest cells a goodness-of-fit test may use.
pub const MIN_TEST_BINS: usize = 4;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Outcome of a Pearson goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
    pub cells: usize,
    pub pass: bool,
}

/// Survival function of the chi-squared distribution.
pub fn chi_squared_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("df > 0").sf(x)
}

/// Pearson statistic and p-value for observed counts against expected counts.
pub fn pearson_gof_counts(observed: &[u64], expected: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != expected.len() {
        return Err(Error::LengthMismatch {
            what: "observed counts",
            got: observed.len(),
            expected: expected.len(),
        });
    }
    if observed.len() < 2 {
        return Err(Error::InvalidParams("need at least two cells".into()));
    }
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    Ok((statistic, chi_squared_sf(statistic, observed.len() - 1)))
}

/// Equal-probability partition of the screen into test cells.
///
/// Grid bins are walked in order of decreasing density relative to the
/// single-slit envelope (ties by position), and the walk is cut into cells
/// of equal mass. For a single-slit pdf the relative density is constant, so
/// the cells are ordinary contiguous quantile bins. For a two-slit pdf each
/// cell collects all screen regions at a similar fringe phase: the first
/// cell gathers bright-fringe cores, the last one the dark fringes. Cuts may
/// fall inside a grid bin; positions within a bin are uniform, matching the
/// sampler.
#[derive(Debug, Clone)]
pub struct TestPartition<'a> {
    pdf: &'a ScreenPdf,
    cells: usize,
    cum_before: Vec<f64>,
    total: f64,
}

impl<'a> TestPartition<'a> {
    pub fn new(pdf: &'a ScreenPdf, cells: usize) -> Self {
        assert!(cells >= 1);
        let n = pdf.grid().len();
        let keys: Vec<f64> = (0..n).map(|b| pdf.fringe_key(b)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
        let mut cum_before = vec![0.0; n];
        let mut acc = 0.0;
        for &b in &order {
            cum_before[b] = acc;
            acc += pdf.bin_mass(b);
        }
        Self {
            pdf,
            cells,
            cum_before,
            total: acc,
        }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn cell_of(&self, x: f64) -> usize {
        let grid = self.pdf.grid();
        let bin = grid.bin_of(x);
        let t = ((x - grid.left_edge(bin)) / grid.bin_width()).clamp(0.0, 1.0);
        let u = (self.cum_before[bin] + t * self.pdf.bin_mass(bin)) / self.total;
        ((u * self.cells as f64).floor() as usize).min(self.cells - 1)
    }

    pub fn counts(&self, samples: &[f64]) -> Vec<u64> {
        let mut counts = vec![0u64; self.cells];
        for &x in samples {
            counts[self.cell_of(x)] += 1;
        }
        counts
    }
}

/// Number of cells used for `n_samples` samples, or `None` when fewer than
/// [`MIN_TEST_BINS`] cells could each expect [`MIN_EXPECTED`] counts.
pub fn gof_cells(n_samples: usize, n_test_bins: usize) -> Option<usize> {
    let by_count = (n_samples as f64 / MIN_EXPECTED).floor() as usize;
    let cells = n_test_bins.min(by_count);
    (cells >= MIN_TEST_BINS).then_some(cells)
}

/// Pearson chi-squared goodness of fit of screen positions against `pdf`.
///
/// Uses up to `n_test_bins` equal-probability cells (see [`TestPartition`]),
/// merged down until each expects at least five counts.
pub fn chi_squared_gof(samples: &[f64], pdf: &ScreenPdf, n_test_bins: usize, alpha: f64) -> Result<GofResult> {
    if n_test_bins < MIN_TEST_BINS {
        return Err(Error::InvalidParams(format!(
            "n_test_bins must be at least {MIN_TEST_BINS}, got {n_test_bins}"
        )));
    }
    let w = pdf.grid().half_width();
    if let Some(x) = samples.iter().find(|x| x.is_nan() || x.abs() > w) {
        return Err(Error::InvalidParams(format!("sample {x} outside the screen window")));
    }
    let cells = gof_cells(samples.len(), n_test_bins).ok_or(Error::InsufficientSamples {
        samples: samples.len(),
        min_bins: MIN_TEST_BINS,
        min_expected: MIN_EXPECTED,
    })?;
    let partition = TestPartition::new(pdf, cells);
    let observed = partition.counts(samples);
    let expected = vec![samples.len() as f64 / cells as f64; cells];
    let (statistic, p_value) = pearson_gof_counts(&observed, &expected)?;
    Ok(GofResult {
        statistic,
        p_value,
        df: cells - 1,
        cells,
        pass: p_value >= alpha,
    })
}

/// Exact two-sided binomial p-value: total probability of outcomes no more
/// likely than the observed count.
pub fn binomial_two_sided(successes: u64, trials: u64, p: f64) -> f64 {
    assert!(successes <= trials);
    if trials == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return if successes == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if successes == trials { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let ln_pmf = |k: u64| ln_binomial(trials, k) + k as f64 * lp + (trials - k) as f64 * lq;
    let cutoff = ln_pmf(successes) + 1e-7_f64.ln_1p();
    let total: f64 = (0..=trials).map(ln_pmf).filter(|&l| l <= cutoff).map(f64::exp).sum();
    total.min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialResult {
    pub p_value: f64,
    pub pass: bool,
}

/// Exact two-sided test that left/right claims are 50/50.
pub fn binomial_balance_test(n_left: u64, n_right: u64, alpha: f64) -> BinomialResult {
    let p_value = binomial_two_sided(n_left, n_left + n_right, 0.5);
    BinomialResult {
        p_value,
        pass: p_value >= alpha,
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Two-sided normal quantile for family-wise confidence `level` split over `m` intervals.
pub fn bonferroni_z(level: f64, m: usize) -> f64 {
    let tail = (1.0 - level) / (2.0 * m as f64);
    Normal::standard().inverse_cdf(1.0 - tail)
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Total-variation distance between two histograms (normalized internally).
pub fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    let len = a.len().max(b.len());
    let at = |h: &[u64], i: usize| h.get(i).copied().unwrap_or(0) as f64;
    0.5 * (0..len)
        .map(|i| (at(a, i) / na as f64 - at(b, i) / nb as f64).abs())
        .sum::<f64>()
}

/// Weighted least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

pub fn weighted_line_fit(points: &[(f64, f64, f64)]) -> Option<LineFit> {
    if points.len() < 2 {
        return None;
    }
    let sw: f64 = points.iter().map(|p| p.2).sum();
    if sw.is_nan() || sw <= 0.0 {
        return None;
    }
    let xm = points.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ym = points.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - xm).powi(2)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| p.2 * (p.0 - xm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: ym - slope * xm,
        slope_se: (1.0 / sxx).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{screen_pdf, OpticsParams, SlitConfig};

    #[test]
    fn perfect_fit_has_zero_statistic() {
        let (s, p) = pearson_gof_counts(&[25, 25, 25, 25], &[25.0; 4]).unwrap();
        assert_eq!(s, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn pearson_known_value() {
        // scipy.stats.chi2.sf(4, 3)
        let (s, p) = pearson_gof_counts(&[30, 20, 30, 20], &[25.0; 4]).unwrap();
        assert!((s - 4.0).abs() < 1e-12);
        assert!((p - 0.261_464_129_949_111_2).abs() < 1e-9);
    }

    #[test]
    fn balance_test_values() {
        let even = binomial_balance_test(50, 50, 0.01);
        assert!(even.pass && (even.p_value - 1.0).abs() < 1e-9);
        let r = binomial_balance_test(70, 30, 0.01);
        // scipy.stats.binomtest(70, 100).pvalue
        assert!((r.p_value - 7.850_139_645_593_67e-5).abs() < 1e-12);
        assert!(!r.pass);
        assert!(binomial_balance_test(1, 0, 0.01).pass);
        assert_eq!(binomial_balance_test(0, 1, 0.01).p_value, 1.0);
    }

    #[test]
    fn binomial_two_sided_against_enumeration() {
        // Brute-force oracle with exact rational pmf at p = 1/4.
        let n = 12u64;
        let pmf = |k: u64| -> f64 {
            let mut c = 1.0;
            for i in 0..k {
                c = c * (n - i) as f64 / (i + 1) as f64;
            }
            c * 0.25f64.powi(k as i32) * 0.75f64.powi((n - k) as i32)
        };
        for k in 0..=n {
            let obs = pmf(k);
            let want: f64 = (0..=n).map(pmf).filter(|&q| q <= obs * (1.0 + 1e-7)).sum();
            assert!((binomial_two_sided(k, n, 0.25) - want.min(1.0)).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn gof_on_quantile_samples() {
        let pdf = screen_pdf(&OpticsParams::default(), SlitConfig::LeftOnly).unwrap();
        let samples: Vec<f64> = (0..4)
            .flat_map(|cell| (0..25).map(move |i| (cell as f64 + (i as f64 + 0.5) / 25.0) / 4.0))
            .map(|u| pdf.quantile(u))
            .collect();
        let r = chi_squared_gof(&samples, &pdf, 4, 0.01).unwrap();
        assert_eq!(r.cells, 4);
        assert!(r.statistic.abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn gof_cell_merging() {
        assert_eq!(gof_cells(1000, 32), Some(32));
        assert_eq!(gof_cells(40, 32), Some(8));
        assert_eq!(gof_cells(20, 32), Some(4));
        assert_eq!(gof_cells(19, 32), None);
        let pdf = screen_pdf(&OpticsParams::default(), SlitConfig::BothOpen).unwrap();
        assert!(matches!(
            chi_squared_gof(&[0.0; 10], &pdf, 32, 0.01),
            Err(Error::InsufficientSamples { samples: 10, .. })
        ));
        assert!(matches!(
            chi_squared_gof(&[0.0; 100], &pdf, 3, 0.01),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn partition_cells_have_equal_mass() {
        let pdf = screen_pdf(&OpticsParams::default(), SlitConfig::BothOpen).unwrap();
        let part = TestPartition::new(&pdf, 8);
        // Integrate cell membership on a fine sub-grid of each bin.
        let mut mass = [0.0; 8];
        let g = pdf.grid();
        let sub = 64;
        for b in 0..g.len() {
            for s in 0..sub {
                let x = g.left_edge(b) + (s as f64 + 0.5) / sub as f64 * g.bin_width();
                mass[part.cell_of(x)] += pdf.bin_mass(b) / sub as f64;
            }
        }
        for m in mass {
            assert!((m - 0.125).abs() < 2e-3, "{mass:?}");
        }
        // Bright center falls in the first cell, a dark fringe in the last.
        assert_eq!(part.cell_of(0.0), 0);
        assert_eq!(part.cell_of(6.7e-3), 7);
    }

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson_interval(30, 100, Z95);
        assert!(lo < 0.3 && 0.3 < hi);
        assert!((lo - 0.219_1).abs() < 1e-3 && (hi - 0.396_1).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 10, Z95).0, 0.0);
        assert_eq!(wilson_interval(10, 10, Z95).1, 1.0);
    }

    #[test]
    fn bonferroni_quantile() {
        assert!((bonferroni_z(0.95, 1) - Z95).abs() < 1e-6);
        assert!(bonferroni_z(0.95, 3) > Z95);
    }

    #[test]
    fn ks_and_tv() {
        let xs = [0.1, 0.3, 0.5, 0.7, 0.9];
        assert!((ks_distance(&xs, |x| x) - 0.1).abs() < 1e-12);
        assert_eq!(total_variation(&[1, 2, 3], &[2, 4, 6]), 0.0);
        assert_eq!(total_variation(&[1, 0], &[0, 1]), 1.0);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let pts: Vec<_> = (0..5)
            .map(|i| (i as f64, 2.0 - 0.5 * i as f64, 1.0 + i as f64))
            .collect();
        let fit = weighted_line_fit(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 2.0).abs() < 1e-12);
    }
}
