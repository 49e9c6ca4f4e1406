use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::horo::{HoroRule, HoroSizes};
use super::quadrature::Rule1d;
use super::{BoundaryPoint, Model, ModelParams, Point};
use crate::error::{Error, Result};

/// Resolution of a rule on the unit sphere `S^{n−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereSize {
    /// Equispaced nodes on the circle.
    Circle(usize),
    /// Gauss nodes in the polar cosine times equispaced azimuths.
    Sphere { polar: usize, azimuth: usize },
}

impl SphereSize {
    pub fn count(&self) -> usize {
        match *self {
            SphereSize::Circle(n) => n,
            SphereSize::Sphere { polar, azimuth } => polar * azimuth,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SphereSize::Circle(_) => 2,
            SphereSize::Sphere { .. } => 3,
        }
    }

    fn validate(&self, model: Model, what: &str) -> Result<()> {
        if self.dim() != model.dim() {
            return Err(Error::Size(format!("{what} size {self} does not match model {model}")));
        }
        let ok = match *self {
            SphereSize::Circle(n) => n >= 4,
            SphereSize::Sphere { polar, azimuth } => polar >= 4 && azimuth >= 4,
        };
        if !ok {
            return Err(Error::Size(format!("{what} size {self} is below the minimum of 4 nodes per direction")));
        }
        Ok(())
    }
}

impl fmt::Display for SphereSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphereSize::Circle(n) => write!(f, "{n}"),
            SphereSize::Sphere { polar, azimuth } => write!(f, "{polar}x{azimuth}"),
        }
    }
}

impl FromStr for SphereSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad sphere size '{s}' (expected N or PxA)"));
        match s.split_once(['x', 'X']) {
            Some((p, a)) => Ok(SphereSize::Sphere {
                polar: p.trim().parse().map_err(|_| bad())?,
                azimuth: a.trim().parse().map_err(|_| bad())?,
            }),
            None => Ok(SphereSize::Circle(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

/// Spectral rule on `[0, Λ]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralRule {
    /// Equispaced nodes with the endpoint half-weights. The spectral
    /// integrands are even and analytic in λ, so this is spectrally accurate,
    /// and equispacing lets kernels advance `e^{iλs}` by a single rotation.
    Trapezoid,
    GaussLegendre,
}

/// Node counts for every rule in a [`QuadratureGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSizes {
    pub radial: usize,
    pub boundary: SphereSize,
    pub spectral: usize,
    /// Angular factor of the interior polar grid.
    pub angular: SphereSize,
    pub horo: HoroSizes,
    pub spectral_rule: SpectralRule,
}

impl GridSizes {
    pub fn defaults(model: Model) -> Self {
        let boundary = match model {
            Model::H2 => SphereSize::Circle(256),
            Model::H3 => SphereSize::Sphere { polar: 32, azimuth: 64 },
        };
        Self {
            radial: 96,
            boundary,
            spectral: 128,
            angular: match model {
                Model::H2 => SphereSize::Circle(256),
                Model::H3 => SphereSize::Sphere { polar: 16, azimuth: 32 },
            },
            horo: HoroSizes::defaults(model),
            spectral_rule: SpectralRule::Trapezoid,
        }
    }

    pub fn validate(&self, model: Model) -> Result<()> {
        if self.radial < 4 {
            return Err(Error::Size(format!("radial size must be at least 4, got {}", self.radial)));
        }
        if self.spectral < 4 {
            return Err(Error::Size(format!("spectral size must be at least 4, got {}", self.spectral)));
        }
        self.boundary.validate(model, "boundary")?;
        self.angular.validate(model, "angular")?;
        self.horo.validate(model)
    }
}

/// Weighted directions on the unit sphere; weights sum to one.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub points: Vec<BoundaryPoint>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(size: SphereSize) -> Result<Self> {
        match size {
            SphereSize::Circle(n) => {
                if n < 1 {
                    return Err(Error::Size("circle rule needs at least one node".into()));
                }
                let step = 2.0 * std::f64::consts::PI / n as f64;
                let points = (0..n).map(|j| BoundaryPoint::from_angle(step * j as f64)).collect();
                Ok(Self { points, weights: vec![1.0 / n as f64; n] })
            }
            SphereSize::Sphere { polar, azimuth } => {
                let cos_rule = Rule1d::gauss_legendre(polar, -1.0, 1.0)?;
                let step = 2.0 * std::f64::consts::PI / azimuth as f64;
                let mut points = Vec::with_capacity(polar * azimuth);
                let mut weights = Vec::with_capacity(polar * azimuth);
                for (t, wt) in cos_rule.nodes.iter().zip(&cos_rule.weights) {
                    for k in 0..azimuth {
                        points.push(BoundaryPoint::from_polar(*t, step * (k as f64 + 0.5)));
                        weights.push(0.5 * wt / azimuth as f64);
                    }
                }
                Ok(Self { points, weights })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Polar quadrature over a geodesic ball `B_ρ(o)` with the hyperbolic
/// volume element folded into the weights.
#[derive(Clone, Debug)]
pub struct InteriorRule {
    pub support: f64,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl InteriorRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// All rules needed by the transforms for one model.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    params: ModelParams,
    sizes: GridSizes,
    radial: Rule1d,
    boundary: SphereRule,
    spectral: Rule1d,
    angular: SphereRule,
}

impl QuadratureGrid {
    pub fn build(params: ModelParams, sizes: GridSizes) -> Result<Self> {
        sizes.validate(params.model())?;
        let radial = Rule1d::gauss_legendre(sizes.radial, 0.0, params.support_radius())?;
        let spectral = match sizes.spectral_rule {
            SpectralRule::Trapezoid => Rule1d::trapezoid(sizes.spectral, 0.0, params.spectral_cutoff())?,
            SpectralRule::GaussLegendre => Rule1d::gauss_legendre(sizes.spectral, 0.0, params.spectral_cutoff())?,
        };
        Ok(Self {
            params,
            sizes,
            radial,
            boundary: SphereRule::new(sizes.boundary)?,
            spectral,
            angular: SphereRule::new(sizes.angular)?,
        })
    }

    pub fn with_defaults(params: ModelParams) -> Result<Self> {
        Self::build(params, GridSizes::defaults(params.model()))
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn model(&self) -> Model {
        self.params.model()
    }

    pub fn sizes(&self) -> &GridSizes {
        &self.sizes
    }

    /// Gauss–Legendre rule on `[0, R]`.
    pub fn radial(&self) -> &Rule1d {
        &self.radial
    }

    pub fn boundary(&self) -> &SphereRule {
        &self.boundary
    }

    pub fn spectral(&self) -> &Rule1d {
        &self.spectral
    }

    pub fn angular(&self) -> &SphereRule {
        &self.angular
    }

    /// Radial Gauss–Legendre on `[0, support]`, scaled to the ball by
    /// `tanh(r/2)`, times the angular rule. Weights carry
    /// `sinh^{n−1}(r) · ω_{n−1}`.
    pub fn interior(&self, support: f64) -> Result<InteriorRule> {
        if !(support.is_finite() && support > 0.0) {
            return Err(Error::Domain(format!("support radius must be positive, got {support}")));
        }
        if support > self.params.support_radius() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "support radius {support} exceeds the model truncation radius {}",
                self.params.support_radius()
            )));
        }
        let model = self.model();
        let radial = Rule1d::gauss_legendre(self.sizes.radial, 0.0, support)?;
        let area = model.sphere_area();
        let n = radial.len() * self.angular.len();
        let mut points = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (r, wr) in radial.nodes.iter().zip(&radial.weights) {
            let t = (0.5 * r).tanh();
            let wv = wr * model.radial_volume(*r) * area;
            for (b, wb) in self.angular.points.iter().zip(&self.angular.weights) {
                points.push(b.scaled(t));
                weights.push(wv * wb);
            }
        }
        Ok(InteriorRule { support, points, weights })
    }

    /// Horocyclic rule over `B_support(o)` adapted to the direction `b`.
    pub fn horocyclic(&self, support: f64) -> Result<HoroRule> {
        if support > self.params.support_radius() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "support radius {support} exceeds the model truncation radius {}",
                self.params.support_radius()
            )));
        }
        HoroRule::new(self.model(), support, self.sizes.horo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::sum_f64;
    use approx::assert_relative_eq;

    #[test]
    fn boundary_mass_is_one() {
        for model in [Model::H2, Model::H3] {
            let grid = QuadratureGrid::with_defaults(ModelParams::with_defaults(model)).unwrap();
            let mass = sum_f64(grid.boundary().weights.iter().copied());
            assert!((mass - 1.0).abs() <= 1e-14, "{model}: {mass}");
            assert!(grid.boundary().weights.iter().all(|w| *w > 0.0));
            for b in &grid.boundary().points {
                let n: f64 = b.coords().iter().map(|x| x * x).sum();
                assert!((n - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn interior_volume_matches_closed_form() {
        let params = ModelParams::with_defaults(Model::H2);
        let grid = QuadratureGrid::with_defaults(params).unwrap();
        let rule = grid.interior(4.0).unwrap();
        let vol = sum_f64(rule.weights.iter().copied());
        // ∫₀^R sinh r dr · 2π
        assert_relative_eq!(vol, 2.0 * std::f64::consts::PI * (4f64.cosh() - 1.0), max_relative = 1e-10);

        let params = ModelParams::with_defaults(Model::H3);
        let grid = QuadratureGrid::with_defaults(params).unwrap();
        let rule = grid.interior(2.0).unwrap();
        let vol = sum_f64(rule.weights.iter().copied());
        // ∫₀^R sinh² r dr · 4π = 4π (sinh 2R / 4 − R / 2)
        let exact = 4.0 * std::f64::consts::PI * ((4f64).sinh() / 4.0 - 1.0);
        assert_relative_eq!(vol, exact, max_relative = 1e-10);
    }

    #[test]
    fn radial_rule_sinh_integral() {
        let sizes = GridSizes { radial: 64, ..GridSizes::defaults(Model::H2) };
        let grid = QuadratureGrid::build(ModelParams::with_defaults(Model::H2), sizes).unwrap();
        let got = grid.radial().integrate(f64::sinh);
        assert_relative_eq!(got, 4f64.cosh() - 1.0, max_relative = 1e-10);
    }

    #[test]
    fn size_validation() {
        let params = ModelParams::with_defaults(Model::H2);
        let mut sizes = GridSizes::defaults(Model::H2);
        sizes.radial = 3;
        assert!(matches!(QuadratureGrid::build(params, sizes), Err(Error::Size(_))));
        let mut sizes = GridSizes::defaults(Model::H2);
        sizes.boundary = SphereSize::Sphere { polar: 8, azimuth: 16 };
        assert!(QuadratureGrid::build(params, sizes).is_err());
        let mut sizes = GridSizes::defaults(Model::H2);
        sizes.spectral = 2;
        assert!(QuadratureGrid::build(params, sizes).is_err());
    }

    #[test]
    fn sphere_size_parsing() {
        assert_eq!("256".parse::<SphereSize>().unwrap(), SphereSize::Circle(256));
        assert_eq!("32x64".parse::<SphereSize>().unwrap(), SphereSize::Sphere { polar: 32, azimuth: 64 });
        assert!("x".parse::<SphereSize>().is_err());
    }
}
