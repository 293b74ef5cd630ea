//! Single-photon double-slit optics in the Fraunhofer (far-field) regime.
//!
//! The screen coordinate `x` is discretized into `n_bins` uniform bins over
//! `[-W, W]`. Densities are normalized over that window; samples are drawn by
//! inverting the piecewise-linear CDF, i.e. bin by tabulated mass and uniform
//! position within the bin.
//!
//! ```text
//!   single slit:  I(x) = sinc²(π a x / λL)
//!   double slit:  I(x) = sinc²(π a x / λL) · cos²(π d x / λL)
//! ```

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const EARTH_DIAMETER: f64 = 1.2742e7;

/// Slit geometry, screen discretization and detector efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpticsParams {
    #[serde(rename = "wavelength_m")]
    pub wavelength: f64,
    #[serde(rename = "slit_width_m")]
    pub slit_width: f64,
    #[serde(rename = "slit_separation_m")]
    pub slit_separation: f64,
    #[serde(rename = "distance_m")]
    pub distance: f64,
    #[serde(rename = "screen_half_width_m")]
    pub screen_half_width: f64,
    pub n_bins: usize,
    pub efficiency: f64,
    /// Largest tolerated fraction of probability mass beyond the screen
    /// window, measured on a 4x wider auxiliary grid.
    pub max_truncated_mass: f64,
}

impl Default for OpticsParams {
    fn default() -> Self {
        Self {
            wavelength: 670e-9,
            slit_width: 20e-6,
            slit_separation: 100e-6,
            distance: 2.0,
            screen_half_width: 0.05,
            n_bins: 1024,
            efficiency: 1.0,
            max_truncated_mass: 0.1,
        }
    }
}

impl OpticsParams {
    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("wavelength", self.wavelength),
            ("slit_width", self.slit_width),
            ("slit_separation", self.slit_separation),
            ("distance", self.distance),
            ("screen_half_width", self.screen_half_width),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if self.slit_separation <= self.slit_width {
            return Err(Error::InvalidParams(format!(
                "slit separation {} must exceed slit width {}",
                self.slit_separation, self.slit_width
            )));
        }
        if self.n_bins < 16 || !self.n_bins.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "n_bins must be even and at least 16, got {}",
                self.n_bins
            )));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidParams(format!(
                "efficiency must lie in [0, 1], got {}",
                self.efficiency
            )));
        }
        if !(self.max_truncated_mass > 0.0 && self.max_truncated_mass <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "max_truncated_mass must lie in (0, 1], got {}",
                self.max_truncated_mass
            )));
        }
        Ok(())
    }

    /// Fringe spacing `λL/d` on the screen.
    pub fn fringe_period(&self) -> f64 {
        self.wavelength * self.distance / self.slit_separation
    }

    /// First zero of the single-slit envelope, `λL/a`.
    pub fn envelope_zero(&self) -> f64 {
        self.wavelength * self.distance / self.slit_width
    }

    /// Dark-fringe positions `(k + 1/2)·λL/d` inside the screen window, ascending.
    pub fn dark_fringes(&self) -> Vec<f64> {
        let period = self.fringe_period();
        let w = self.screen_half_width;
        let kmax = (w / period - 0.5).floor() as i64;
        (-kmax - 1..=kmax)
            .map(|k| (k as f64 + 0.5) * period)
            .filter(|x| x.abs() <= w)
            .collect()
    }

    fn envelope_arg(&self, x: f64) -> f64 {
        PI * self.slit_width * x / (self.wavelength * self.distance)
    }

    fn fringe_arg(&self, x: f64) -> f64 {
        PI * self.slit_separation * x / (self.wavelength * self.distance)
    }

    /// Unnormalized single-slit intensity `sinc²(π a x / λL)`.
    pub fn single_intensity(&self, x: f64) -> f64 {
        let s = sinc(self.envelope_arg(x.abs()));
        s * s
    }

    /// Two-slit fringe factor `cos²(π d x / λL)`.
    pub fn fringe_factor(&self, x: f64) -> f64 {
        let c = self.fringe_arg(x.abs()).cos();
        c * c
    }
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Bob's secret slit setting for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlitConfig {
    BothOpen,
    LeftOnly,
    RightOnly,
    BothClosed,
}

impl SlitConfig {
    pub fn is_open(self) -> bool {
        self != SlitConfig::BothClosed
    }

    pub fn is_single(self) -> bool {
        matches!(self, SlitConfig::LeftOnly | SlitConfig::RightOnly)
    }

    /// The slit a which-slit measurement must report, if it is determined.
    pub fn open_slit(self) -> Option<WhichSlit> {
        match self {
            SlitConfig::LeftOnly => Some(WhichSlit::Left),
            SlitConfig::RightOnly => Some(WhichSlit::Right),
            _ => None,
        }
    }
}

/// Outcome of a telescope (which-slit) measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhichSlit {
    Left,
    Right,
}

/// Uniform bin centers over `[-W, W]`, exactly symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenGrid {
    centers: Vec<f64>,
    bin_width: f64,
    half_width: f64,
}

impl ScreenGrid {
    pub fn new(half_width: f64, n_bins: usize) -> Self {
        assert!(n_bins >= 2 && n_bins.is_multiple_of(2), "n_bins must be even");
        let bin_width = 2.0 * half_width / n_bins as f64;
        let mut centers = vec![0.0; n_bins];
        for i in 0..n_bins / 2 {
            let x = -half_width + (i as f64 + 0.5) * bin_width;
            centers[i] = x;
            centers[n_bins - 1 - i] = -x;
        }
        Self {
            centers,
            bin_width,
            half_width,
        }
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn left_edge(&self, bin: usize) -> f64 {
        -self.half_width + bin as f64 * self.bin_width
    }

    /// Bin holding `x`; positions on the outer edges map to the end bins.
    pub fn bin_of(&self, x: f64) -> usize {
        let i = ((x + self.half_width) / self.bin_width).floor();
        (i.max(0.0) as usize).min(self.len() - 1)
    }
}

/// Tabulated landing-position density for one slit setting (or a mixture).
///
/// Every density in this family has the form
/// `sinc²(π a x/λL) · (envelope_coeff + fringe_coeff · cos²(π d x/λL))`,
/// which covers single-slit, double-slit and their mixtures.
#[derive(Debug, Clone)]
pub struct ScreenPdf {
    params: OpticsParams,
    config: Option<SlitConfig>,
    grid: ScreenGrid,
    envelope_coeff: f64,
    fringe_coeff: f64,
    density: Vec<f64>,
    cdf: Vec<f64>,
}

/// Density of landing positions for `config`, normalized over the screen window.
pub fn screen_pdf(params: &OpticsParams, config: SlitConfig) -> Result<ScreenPdf> {
    params.validate()?;
    let (env, fringe) = match config {
        SlitConfig::BothClosed => return Err(Error::NoPhotonDistribution),
        SlitConfig::BothOpen => (0.0, 1.0),
        SlitConfig::LeftOnly | SlitConfig::RightOnly => (1.0, 0.0),
    };
    let outside = truncated_mass(params, env, fringe);
    if outside > params.max_truncated_mass {
        return Err(Error::ScreenWindowTooNarrow {
            outside_fraction: outside,
        });
    }
    Ok(ScreenPdf::tabulate(*params, Some(config), env, fringe))
}

/// Fraction of the mass on `[-4W, 4W]` that lies outside `[-W, W]`.
fn truncated_mass(params: &OpticsParams, env: f64, fringe: f64) -> f64 {
    let aux = ScreenGrid::new(4.0 * params.screen_half_width, 4 * params.n_bins);
    let w = params.screen_half_width;
    let (mut inside, mut total) = (0.0, 0.0);
    for &x in aux.centers() {
        let v = params.single_intensity(x) * (env + fringe * params.fringe_factor(x));
        total += v;
        if x.abs() <= w {
            inside += v;
        }
    }
    1.0 - inside / total
}

impl ScreenPdf {
    fn tabulate(params: OpticsParams, config: Option<SlitConfig>, env: f64, fringe: f64) -> Self {
        let grid = ScreenGrid::new(params.screen_half_width, params.n_bins);
        let raw: Vec<f64> = grid
            .centers()
            .iter()
            .map(|&x| params.single_intensity(x) * (env + fringe * params.fringe_factor(x)))
            .collect();
        let mass: f64 = raw.iter().sum::<f64>() * grid.bin_width();
        let norm = 1.0 / mass;
        let density: Vec<f64> = raw.iter().map(|v| v * norm).collect();
        let mut cdf = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        for d in &density {
            acc += d * grid.bin_width();
            cdf.push(acc);
        }
        let last = acc;
        cdf.iter_mut().for_each(|c| *c /= last);
        Self {
            params,
            config,
            grid,
            envelope_coeff: env * norm,
            fringe_coeff: fringe * norm,
            density,
            cdf,
        }
    }

    /// Weighted mixture `weight·self + (1 - weight)·other` of two pdfs on the same geometry.
    pub fn mixture(&self, other: &ScreenPdf, weight: f64) -> Result<ScreenPdf> {
        if self.params != other.params {
            return Err(Error::InvalidParams("mixture of pdfs with different optics".into()));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParams(format!("mixture weight {weight} outside [0, 1]")));
        }
        let env = weight * self.envelope_coeff + (1.0 - weight) * other.envelope_coeff;
        let fringe = weight * self.fringe_coeff + (1.0 - weight) * other.fringe_coeff;
        let config = if self.config == other.config { self.config } else { None };
        Ok(ScreenPdf::tabulate(self.params, config, env, fringe))
    }

    pub fn params(&self) -> &OpticsParams {
        &self.params
    }

    /// The slit setting this pdf describes; `None` for mixtures of different settings.
    pub fn config(&self) -> Option<SlitConfig> {
        self.config
    }

    pub fn grid(&self) -> &ScreenGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }

    /// Normalized density at an arbitrary position; zero off-screen.
    pub fn density_at(&self, x: f64) -> f64 {
        if x.abs() > self.grid.half_width() {
            return 0.0;
        }
        let p = &self.params;
        p.single_intensity(x) * (self.envelope_coeff + self.fringe_coeff * p.fringe_factor(x))
    }

    /// Density relative to the single-slit envelope. Constant for single-slit pdfs.
    pub(crate) fn fringe_key(&self, bin: usize) -> f64 {
        let x = self.grid.centers()[bin];
        self.envelope_coeff + self.fringe_coeff * self.params.fringe_factor(x)
    }

    /// Probability mass of one bin.
    pub fn bin_mass(&self, bin: usize) -> f64 {
        if bin == 0 {
            self.cdf[0]
        } else {
            self.cdf[bin] - self.cdf[bin - 1]
        }
    }

    /// Piecewise-linear CDF consistent with within-bin uniform sampling.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let w = self.grid.half_width();
        if x <= -w {
            return 0.0;
        }
        if x >= w {
            return 1.0;
        }
        let bin = self.grid.bin_of(x);
        let lo = if bin == 0 { 0.0 } else { self.cdf[bin - 1] };
        let t = (x - self.grid.left_edge(bin)) / self.grid.bin_width();
        lo + t.clamp(0.0, 1.0) * (self.cdf[bin] - lo)
    }

    /// Inverse of [`cdf_at`](Self::cdf_at) for `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.cdf.len();
        let bin = self.cdf.partition_point(|&c| c <= u).min(n - 1);
        let lo = if bin == 0 { 0.0 } else { self.cdf[bin - 1] };
        let mass = self.cdf[bin] - lo;
        let t = if mass > 0.0 {
            ((u - lo) / mass).clamp(0.0, 1.0)
        } else {
            0.5
        };
        let w = self.grid.half_width();
        (self.grid.left_edge(bin) + t * self.grid.bin_width()).clamp(-w, w)
    }
}

/// Draw a landing position distributed per `pdf`.
pub fn sample_screen_position<R: Rng + ?Sized>(pdf: &ScreenPdf, rng: &mut R) -> f64 {
    pdf.quantile(rng.random::<f64>())
}

/// Telescope measurement: which slit the photon emerged from.
pub fn sample_which_slit<R: Rng + ?Sized>(config: SlitConfig, rng: &mut R) -> Result<WhichSlit> {
    match config {
        SlitConfig::LeftOnly => Ok(WhichSlit::Left),
        SlitConfig::RightOnly => Ok(WhichSlit::Right),
        SlitConfig::BothOpen => Ok(if rng.random_bool(0.5) {
            WhichSlit::Left
        } else {
            WhichSlit::Right
        }),
        SlitConfig::BothClosed => Err(Error::NoPhotonToObserve),
    }
}

/// Whether a photon reaches Alice's detectors this round.
pub fn photon_arrives<R: Rng + ?Sized>(config: SlitConfig, params: &OpticsParams, rng: &mut R) -> bool {
    if !config.is_open() {
        return false;
    }
    let eta = params.efficiency;
    if eta >= 1.0 {
        true
    } else if eta <= 0.0 {
        false
    } else {
        rng.random_bool(eta)
    }
}

/// `(Imax - Imin) / (Imax + Imin)` of the tabulated density over bins within
/// `±half_width` of the center.
pub fn fringe_visibility(pdf: &ScreenPdf, half_width: f64) -> Result<f64> {
    let period = pdf.params().fringe_period();
    if 2.0 * half_width < period {
        return Err(Error::WindowTooSmall { half_width, period });
    }
    let (lo, hi) = pdf
        .grid()
        .centers()
        .iter()
        .zip(pdf.density())
        .filter(|(x, _)| x.abs() <= half_width)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (_, &d)| (lo.min(d), hi.max(d)));
    if hi + lo <= 0.0 || !lo.is_finite() {
        return Ok(0.0);
    }
    Ok((hi - lo) / (hi + lo))
}

/// Fringe visibility of a set of landing positions.
///
/// Fits `V` in `[0, 1]` by maximum likelihood under the model
/// `f_V(x) ∝ sinc²(π a x/λL) · (1 + V cos(2π d x/λL))` restricted to
/// `|x| ≤ half_width`. The known single-slit envelope is factored out, so a
/// fringeless sample scores near 0 and a full-contrast pattern scores 1.
pub fn fitted_visibility(samples: &[f64], params: &OpticsParams, half_width: f64) -> Result<f64> {
    let period = params.fringe_period();
    if 2.0 * half_width < period {
        return Err(Error::WindowTooSmall { half_width, period });
    }
    let k = 2.0 * PI / period;
    let cosines: Vec<f64> = samples
        .iter()
        .filter(|x| x.abs() <= half_width)
        .map(|x| (k * x).cos())
        .collect();
    if cosines.is_empty() {
        return Err(Error::InsufficientSamples {
            samples: 0,
            min_bins: 1,
            min_expected: 1.0,
        });
    }
    // Envelope moments over the window: S0 = ∫ s, S1 = ∫ s cos(kx).
    let steps = 20_000;
    let h = 2.0 * half_width / steps as f64;
    let (mut s0, mut s1) = (0.0, 0.0);
    for i in 0..steps {
        let x = -half_width + (i as f64 + 0.5) * h;
        let s = params.single_intensity(x);
        s0 += s * h;
        s1 += s * (k * x).cos() * h;
    }
    let n = cosines.len() as f64;
    let score = |v: f64| -> f64 {
        let data: f64 = cosines.iter().map(|c| c / (1.0 + v * c).max(1e-300)).sum();
        data - n * s1 / (s0 + v * s1)
    };
    let top = 1.0 - 1e-12;
    if score(0.0) <= 0.0 {
        return Ok(0.0);
    }
    if score(top) >= 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Radius reached by a light front after `delta_t` seconds.
pub fn wavefront_extent(delta_t: f64) -> Result<f64> {
    if delta_t.is_nan() || delta_t < 0.0 {
        return Err(Error::NegativeDuration(delta_t));
    }
    Ok(SPEED_OF_LIGHT * delta_t)
}

/// [`wavefront_extent`] in units of Earth's diameter.
pub fn earth_diameter_ratio(delta_t: f64) -> Result<f64> {
    Ok(wavefront_extent(delta_t)? / EARTH_DIAMETER)
}
