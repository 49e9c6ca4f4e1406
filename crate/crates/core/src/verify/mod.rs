//! Property harness: each identity between the transforms becomes a
//! [`VerificationReport`] with a measured error and a tolerance.
//!
//! Errors are relative with denominator `1 + |reference|`. Checks that carry
//! a negative control or a convergence requirement record it as a
//! [`Condition`]; a check succeeds when it passes and all its conditions hold.

mod eigen;
mod lemmas;
mod spectral;

pub use eigen::verify_eigenproperty;
pub use lemmas::{verify_convolution, verify_kernel_factorization, verify_lemma1, verify_lemma2};
pub use spectral::{envelope_fit, growth_profile, verify_paley_wiener, verify_plancherel, EnvelopeFit};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, GridSizes, HoroSizes, Model, ModelParams, Point, QuadratureGrid, SphereSize};

/// Outcome of one check.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub max_rel_error: f64,
    pub tolerance: f64,
    /// `max_rel_error ≤ tolerance`.
    pub pass: bool,
    pub conditions: Vec<Condition>,
    pub metadata: BTreeMap<String, Value>,
    /// Excluded from the manifest, which must not depend on the machine.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn new(name: &str, max_rel_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_rel_error,
            tolerance,
            pass: max_rel_error <= tolerance,
            conditions: Vec::new(),
            metadata: BTreeMap::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn with_condition(mut self, c: Condition) -> Self {
        self.conditions.push(c);
        self
    }

    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    /// Passes and every condition holds.
    pub fn succeeded(&self) -> bool {
        self.pass && self.conditions_hold()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {}  error {:.3e}  tolerance {:.1e}",
            self.name,
            if self.succeeded() { "PASS" } else { "FAIL" },
            self.max_rel_error,
            self.tolerance
        )?;
        for c in &self.conditions {
            write!(f, "\n    {c}")?;
        }
        Ok(())
    }
}

/// A side requirement `lower ≤ value ≤ upper`, e.g. a negative control that
/// must exceed a threshold.
#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub holds: bool,
}

impl Condition {
    pub fn at_least(name: &str, value: f64, lower: f64) -> Self {
        Self::between(name, value, Some(lower), None)
    }

    pub fn at_most(name: &str, value: f64, upper: f64) -> Self {
        Self::between(name, value, None, Some(upper))
    }

    pub fn between(name: &str, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let holds = lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        Self { name: name.to_string(), value, lower, upper, holds }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let range = match (self.lower, self.upper) {
            (Some(l), Some(u)) => format!("in [{l}, {u}]"),
            (Some(l), None) => format!(">= {l:e}"),
            (None, Some(u)) => format!("<= {u:e}"),
            (None, None) => String::new(),
        };
        write!(f, "{}: {:.3e} {} {}", self.name, self.value, range, if self.holds { "ok" } else { "VIOLATED" })
    }
}

/// The checks run by [`run`], in manifest order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Lemma2,
    Lemma1,
    Kernel,
    Convolution,
    Plancherel,
    PaleyWiener,
    Eigen,
}

impl Check {
    pub const ALL: [Check; 7] =
        [Check::Lemma2, Check::Lemma1, Check::Kernel, Check::Convolution, Check::Plancherel, Check::PaleyWiener, Check::Eigen];

    pub fn name(self) -> &'static str {
        match self {
            Check::Lemma2 => "lemma2",
            Check::Lemma1 => "lemma1",
            Check::Kernel => "kernel",
            Check::Convolution => "convolution",
            Check::Plancherel => "plancherel",
            Check::PaleyWiener => "paley_wiener",
            Check::Eigen => "eigen",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Check::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown check '{s}'")))
    }
}

/// Every knob of the harness. Serialized into the manifest so a run can be
/// reproduced from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub model: Model,
    /// Truncation radius `R`.
    pub radius: f64,
    /// Spectral cutoff `Λ` of the main grid.
    pub lambda_max: f64,
    pub sizes: GridSizes,
    pub seed: u64,

    /// Spectral window and sample of the (λ, x) comparisons.
    pub probe_lambda_min: f64,
    pub probe_lambda_max: f64,
    pub probe_lambdas: usize,
    pub probe_points: usize,
    pub probe_point_radius: f64,
    pub probe_directions: usize,

    pub kernel_triples: usize,

    pub convolver_support: f64,
    pub convolution_radial: usize,
    pub convolution_angular: SphereSize,
    pub convolution_horo: HoroSizes,

    pub plancherel_lambda_max: f64,
    pub plancherel_lambdas: usize,
    pub plancherel_boundary: SphereSize,
    pub plancherel_slices: usize,
    pub plancherel_norm_radial: usize,
    pub plancherel_sample_radial: usize,
    pub plancherel_sample_angular: SphereSize,

    pub pw_eta_min: f64,
    pub pw_eta_max: f64,
    pub pw_etas: usize,
    pub pw_slices: usize,

    pub eigen_step: f64,
    pub eigen_lambdas: Vec<f64>,
    pub eigen_points: usize,

    pub tol_lemma2: f64,
    pub tol_lemma1: f64,
    pub tol_kernel: f64,
    pub tol_convolution: f64,
    pub tol_plancherel: f64,
    pub tol_paley_wiener: f64,
    pub tol_eigen: f64,
}

impl VerifyConfig {
    pub fn defaults(model: Model) -> Self {
        let h2 = model == Model::H2;
        Self {
            model,
            radius: ModelParams::DEFAULT_SUPPORT_RADIUS,
            lambda_max: ModelParams::DEFAULT_SPECTRAL_CUTOFF,
            sizes: GridSizes::defaults(model),
            seed: 20240601,
            probe_lambda_min: 0.5,
            probe_lambda_max: 6.0,
            probe_lambdas: 16,
            probe_points: 40,
            probe_point_radius: 1.5,
            probe_directions: 8,
            kernel_triples: 100,
            convolver_support: 0.5,
            convolution_radial: 24,
            convolution_angular: if h2 { SphereSize::Circle(48) } else { SphereSize::Sphere { polar: 8, azimuth: 16 } },
            convolution_horo: if h2 {
                HoroSizes { slices: 48, radial: 48, azimuth: 1 }
            } else {
                HoroSizes { slices: 24, radial: 20, azimuth: 8 }
            },
            plancherel_lambda_max: 64.0,
            plancherel_lambdas: 257,
            plancherel_boundary: if h2 { SphereSize::Circle(512) } else { SphereSize::Sphere { polar: 96, azimuth: 192 } },
            plancherel_slices: 192,
            plancherel_norm_radial: 160,
            plancherel_sample_radial: 12,
            plancherel_sample_angular: if h2 { SphereSize::Circle(32) } else { SphereSize::Sphere { polar: 4, azimuth: 8 } },
            pw_eta_min: 5.0,
            pw_eta_max: 60.0,
            pw_etas: 12,
            pw_slices: 384,
            eigen_step: 1e-3,
            eigen_lambdas: vec![0.5, 1.0, 2.0],
            eigen_points: 12,
            tol_lemma2: 1e-6,
            tol_lemma1: 1e-8,
            tol_kernel: 1e-8,
            tol_convolution: 1e-4,
            tol_plancherel: 1e-3,
            tol_paley_wiener: 0.1,
            tol_eigen: 1e-4,
        }
    }

    /// Small grids for smoke and determinism runs. Accuracy is not expected.
    pub fn reduced(model: Model) -> Self {
        let h2 = model == Model::H2;
        let mut c = Self::defaults(model);
        c.sizes.radial = 24;
        c.sizes.spectral = 32;
        c.sizes.boundary = if h2 { SphereSize::Circle(48) } else { SphereSize::Sphere { polar: 8, azimuth: 16 } };
        c.sizes.angular = c.sizes.boundary;
        c.sizes.horo = if h2 {
            HoroSizes { slices: 24, radial: 24, azimuth: 1 }
        } else {
            HoroSizes { slices: 16, radial: 12, azimuth: 8 }
        };
        c.probe_lambdas = 4;
        c.probe_points = 6;
        c.probe_directions = 3;
        c.kernel_triples = 10;
        c.convolution_radial = 8;
        c.convolution_angular = if h2 { SphereSize::Circle(12) } else { SphereSize::Sphere { polar: 4, azimuth: 8 } };
        c.convolution_horo = if h2 {
            HoroSizes { slices: 12, radial: 12, azimuth: 1 }
        } else {
            HoroSizes { slices: 8, radial: 8, azimuth: 4 }
        };
        c.plancherel_lambda_max = 16.0;
        c.plancherel_lambdas = 33;
        c.plancherel_boundary = c.sizes.boundary;
        c.plancherel_slices = 32;
        c.plancherel_norm_radial = 32;
        c.plancherel_sample_radial = 4;
        c.plancherel_sample_angular = if h2 { SphereSize::Circle(8) } else { SphereSize::Sphere { polar: 4, azimuth: 4 } };
        c.pw_etas = 9;
        c.pw_slices = 48;
        c.eigen_points = 4;
        c
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.model, self.radius, self.lambda_max)
    }

    pub fn grid(&self) -> Result<QuadratureGrid> {
        QuadratureGrid::build(self.params()?, self.sizes)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.grid()?;
        if !(self.probe_lambda_min > 0.0 && self.probe_lambda_max > self.probe_lambda_min) {
            return bad(format!("bad probe spectral window [{}, {}]", self.probe_lambda_min, self.probe_lambda_max));
        }
        if self.probe_lambdas < 1 || self.probe_points < 1 || self.probe_directions < 2 || self.eigen_points < 1 {
            return bad("probe sample sizes must be positive (at least two directions)".into());
        }
        if !(self.probe_point_radius > 0.0 && self.probe_point_radius < self.radius) {
            return bad(format!("probe point radius must lie in (0, R), got {}", self.probe_point_radius));
        }
        if !(self.convolver_support > 0.0) {
            return bad("convolver support must be positive".into());
        }
        if self.pw_etas < 9 || !(self.pw_eta_min > 0.0 && self.pw_eta_max > self.pw_eta_min) {
            return bad("the growth fit needs at least 9 positive η values".into());
        }
        if self.plancherel_lambdas < 4 || !(self.plancherel_lambda_max > 0.0) {
            return bad("bad Plancherel spectral grid".into());
        }
        if self.eigen_lambdas.is_empty() || self.eigen_lambdas.iter().any(|l| !l.is_finite()) {
            return bad("eigen check needs finite λ values".into());
        }
        let tols = [
            self.tol_lemma2,
            self.tol_lemma1,
            self.tol_kernel,
            self.tol_convolution,
            self.tol_plancherel,
            self.tol_paley_wiener,
            self.tol_eigen,
        ];
        if tols.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("tolerances must be positive".into());
        }
        Ok(())
    }

    /// Equispaced probe λ values.
    pub fn probe_lambda_list(&self) -> Vec<f64> {
        let n = self.probe_lambdas;
        if n == 1 {
            return vec![self.probe_lambda_min];
        }
        let step = (self.probe_lambda_max - self.probe_lambda_min) / (n - 1) as f64;
        (0..n).map(|k| self.probe_lambda_min + step * k as f64).collect()
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Runs the named checks in [`Check::ALL`] order.
pub fn run(config: &VerifyConfig, checks: &[Check]) -> Result<Vec<VerificationReport>> {
    config.validate()?;
    let mut out = Vec::new();
    for check in Check::ALL.into_iter().filter(|c| checks.contains(c)) {
        log::info!("running {check} on {}", config.model);
        out.push(run_one(config, check)?);
    }
    Ok(out)
}

pub fn run_one(config: &VerifyConfig, check: Check) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = match check {
        Check::Lemma2 => verify_lemma2(config)?,
        Check::Lemma1 => verify_lemma1(config)?,
        Check::Kernel => verify_kernel_factorization(config)?,
        Check::Convolution => verify_convolution(config)?,
        Check::Plancherel => verify_plancherel(config)?,
        Check::PaleyWiener => verify_paley_wiener(config)?,
        Check::Eigen => verify_eigenproperty(config)?,
    };
    report.wall_time = start.elapsed();
    Ok(report)
}

pub(crate) fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / (1.0 + want.norm())
}

/// Uniformly random direction.
pub(crate) fn random_direction(rng: &mut ChaCha8Rng, model: Model) -> BoundaryPoint {
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    match model {
        Model::H2 => BoundaryPoint::from_angle(angle),
        Model::H3 => BoundaryPoint::from_polar(rng.random_range(-1.0..1.0), angle),
    }
}

/// `count` points with geodesic radius uniform in `[0, r_max]`.
pub(crate) fn random_points(rng: &mut ChaCha8Rng, model: Model, count: usize, r_max: f64) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let dir = random_direction(rng, model);
            let r = rng.random_range(0.0..r_max);
            Point::at_distance(&dir, r).expect("finite radius")
        })
        .collect()
}

/// A fixed spread of directions: the axis and its antipode first.
pub(crate) fn probe_directions(model: Model, count: usize) -> Vec<BoundaryPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| match model {
            Model::H2 => BoundaryPoint::from_angle(std::f64::consts::TAU * k as f64 / count as f64 + 0.3),
            Model::H3 => {
                let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                BoundaryPoint::from_polar(z, golden * k as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_pass_flag_follows_tolerance() {
        let r = VerificationReport::new("x", 1e-7, 1e-6);
        assert!(r.pass && r.succeeded());
        let r = r.with_condition(Condition::at_least("control", 0.01, 0.1));
        assert!(r.pass && !r.succeeded());
        assert!(!VerificationReport::new("x", f64::NAN, 1.0).pass);
    }

    #[test]
    fn wall_time_is_not_serialized() {
        let mut r = VerificationReport::new("x", 0.0, 1.0);
        r.wall_time = Duration::from_secs(3);
        let s = serde_json::to_string(&r).unwrap();
        assert!(!s.contains("wall"));
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert_eq!("paley-wiener".parse::<Check>().unwrap(), Check::PaleyWiener);
        assert!("lemma4".parse::<Check>().is_err());
    }

    #[test]
    fn configs_validate() {
        for m in [Model::H2, Model::H3] {
            VerifyConfig::defaults(m).validate().unwrap();
            VerifyConfig::reduced(m).validate().unwrap();
        }
        let mut c = VerifyConfig::defaults(Model::H2);
        c.pw_etas = 5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn random_points_are_seeded() {
        let c = VerifyConfig::defaults(Model::H3);
        let a = random_points(&mut c.rng(1), Model::H3, 5, 1.5);
        let b = random_points(&mut c.rng(1), Model::H3, 5, 1.5);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.radius() <= 1.5 + 1e-12));
    }
}
