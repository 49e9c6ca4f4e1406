//! Smooth compactly supported test functions.

use crate::error::{domain_err, Result};
use crate::geometry::{
    cosh_distance_minus_one, distance_from_cosh_minus_one, BoundaryPoint, ModelParams, Point,
};
use crate::transforms::{InteriorFunction, Patch};

/// A flat bump `amplitude · exp(−1/(1 − (d/ρ_s)²))` about `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec {
    pub support: f64,
    pub center: Point,
    pub amplitude: f64,
}

impl BumpSpec {
    pub fn centered(dim: usize, support: f64, amplitude: f64) -> Self {
        Self { support, center: Point::origin(dim), amplitude }
    }

    /// Requires `d(o, center) + ρ_s ≤ R`.
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if self.center.dim() != params.dim() {
            return Err(domain_err!("bump center has dimension {} but the model {}", self.center.dim(), params.dim()));
        }
        if !(self.support.is_finite() && self.support > 0.0) {
            return Err(domain_err!("bump support must be positive, got {}", self.support));
        }
        if !self.amplitude.is_finite() {
            return Err(domain_err!("bump amplitude must be finite"));
        }
        let reach = self.center.radius() + self.support;
        if reach > params.support_radius() * (1.0 + 1e-12) {
            return Err(domain_err!(
                "bump reaches radius {reach}, beyond the truncation radius {}",
                params.support_radius()
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Bump {
    spec: BumpSpec,
    reach: f64,
}

/// `exp(−1/(1 − t²))` on `|t| < 1`, zero elsewhere.
pub fn flat_profile(t: f64) -> f64 {
    let q = 1.0 - t * t;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

pub fn bump(spec: BumpSpec, params: &ModelParams) -> Result<Bump> {
    spec.validate(params)?;
    let reach = spec.center.radius() + spec.support;
    Ok(Bump { spec, reach })
}

impl Bump {
    pub fn spec(&self) -> &BumpSpec {
        &self.spec
    }
}

impl InteriorFunction for Bump {
    fn dim(&self) -> usize {
        self.spec.center.dim()
    }

    fn eval(&self, x: &Point) -> f64 {
        let d = distance_from_cosh_minus_one(cosh_distance_minus_one(&self.spec.center, x));
        if d >= self.spec.support {
            return 0.0;
        }
        self.spec.amplitude * flat_profile(d / self.spec.support)
    }

    fn support_radius(&self) -> f64 {
        self.reach
    }

    fn is_radial(&self) -> bool {
        self.spec.center.is_origin()
    }

    fn patches(&self) -> Vec<Patch> {
        vec![Patch { center: self.spec.center, radius: self.spec.support }]
    }

    fn patch_is_centered_radial(&self, _k: usize) -> bool {
        true
    }

    /// `d(c, τ_c z) = d(o, z)`, so no translation is needed.
    fn eval_patch_local(&self, _k: usize, _center: &Point, z: &Point) -> f64 {
        let d = z.radius();
        if d >= self.spec.support {
            return 0.0;
        }
        self.spec.amplitude * flat_profile(d / self.spec.support)
    }
}

/// A named finite sum of bumps.
#[derive(Clone, Debug)]
pub struct TestFunction {
    name: String,
    dim: usize,
    terms: Vec<Bump>,
}

impl TestFunction {
    pub fn new(name: impl Into<String>, dim: usize, terms: Vec<Bump>) -> Result<Self> {
        if terms.iter().any(|t| t.dim() != dim) {
            return Err(domain_err!("all bumps must live in dimension {dim}"));
        }
        Ok(Self { name: name.into(), dim, terms })
    }

    pub fn single(name: impl Into<String>, b: Bump) -> Self {
        let dim = b.dim();
        Self { name: name.into(), dim, terms: vec![b] }
    }

    pub fn zero(dim: usize) -> Self {
        Self { name: "zero".into(), dim, terms: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[Bump] {
        &self.terms
    }
}

impl InteriorFunction for TestFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &Point) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    fn support_radius(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.reach))
    }

    fn is_radial(&self) -> bool {
        self.terms.iter().all(|t| t.is_radial())
    }

    fn patches(&self) -> Vec<Patch> {
        self.terms.iter().flat_map(|t| t.patches()).collect()
    }

    fn eval_patch(&self, k: usize, x: &Point) -> f64 {
        self.terms[k].eval(x)
    }

    fn patch_is_centered_radial(&self, _k: usize) -> bool {
        true
    }

    fn eval_patch_local(&self, k: usize, center: &Point, z: &Point) -> f64 {
        self.terms[k].eval_patch_local(0, center, z)
    }
}

fn direction(dim: usize, angle: f64, cos_polar: f64) -> BoundaryPoint {
    if dim == 2 {
        BoundaryPoint::from_angle(angle)
    } else {
        BoundaryPoint::from_polar(cos_polar, angle)
    }
}

fn off_center(params: &ModelParams, dist: f64, dir: &BoundaryPoint, support: f64, amplitude: f64) -> Result<Bump> {
    let center = Point::at_distance(dir, dist)?;
    bump(BumpSpec { support, center, amplitude }, params)
}

/// The fixed suite, scaled with `R`: radial bumps of support `R/2` and
/// `R/4`, an off-center bump, a two-bump superposition and a
/// sign-changing combination.
pub fn suite(params: &ModelParams) -> Result<Vec<TestFunction>> {
    let dim = params.dim();
    let r = params.support_radius();
    let centered = |s: f64, a: f64| bump(BumpSpec::centered(dim, s, a), params);
    Ok(vec![
        TestFunction::single("radial-half", centered(0.5 * r, 1.0)?),
        TestFunction::single("radial-quarter", centered(0.25 * r, 1.0)?),
        TestFunction::single(
            "off-center",
            off_center(params, 0.1875 * r, &direction(dim, 0.4, 0.3), 0.3125 * r, 1.0)?,
        ),
        TestFunction::new(
            "two-bump",
            dim,
            vec![
                off_center(params, 0.15 * r, &direction(dim, 1.0, 0.5), 0.25 * r, 1.0)?,
                off_center(params, 0.15 * r, &direction(dim, 1.0 + 2.0 * std::f64::consts::FRAC_PI_3, -0.4), 0.3 * r, 0.7)?,
            ],
        )?,
        TestFunction::new(
            "sign-changing",
            dim,
            vec![
                centered(0.375 * r, 1.0)?,
                off_center(params, 0.125 * r, &direction(dim, -2.0, -0.2), 0.25 * r, -0.8)?,
            ],
        )?,
    ])
}
