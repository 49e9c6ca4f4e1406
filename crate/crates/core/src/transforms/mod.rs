//! Quadrature realizations of the spherical, Helgason, Poisson and
//! joint-eigenspace transforms, Plancherel inversion and radial convolution.
//!
//! Interior integrals run over the declared support of `f`, split into
//! geodesic balls ([`Patch`]) so that each piece is integrated in polar or
//! horocyclic coordinates centered on itself.

mod helgason;
mod inverse;
mod jeft;

pub use helgason::{helgason_transform, HelgasonGrid, HelgasonProfile};
pub(crate) use helgason::HelgasonPlan;
pub use inverse::{inverse_helgason, inverse_helgason_many, inverse_helgason_with};
pub use jeft::{jeft_composed, jeft_direct, JeftGrid};

use num_complex::Complex64;

use crate::error::{domain_err, Error, Result};
use crate::geometry::quadrature::Rule1d;
use crate::geometry::{
    bracket_unchecked, translate_unchecked, BoundaryPoint, Model, Point, QuadratureGrid, SpectralParam,
};
use crate::specfun::SphericalEvaluator;
use crate::sum::{ComplexSum, NeumaierSum};

/// A compactly supported real function on the ball.
pub trait InteriorFunction: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &Point) -> f64;

    /// `f` vanishes outside `B_{support_radius}(o)`.
    fn support_radius(&self) -> f64;

    fn is_radial(&self) -> bool {
        false
    }

    /// Geodesic balls covering the support, one per additive piece of `f`.
    fn patches(&self) -> Vec<Patch> {
        let r = self.support_radius();
        if r > 0.0 {
            vec![Patch { center: Point::origin(self.dim()), radius: r }]
        } else {
            Vec::new()
        }
    }

    /// The piece of `f` supported in patch `k`. The pieces sum to `f`.
    fn eval_patch(&self, _k: usize, x: &Point) -> f64 {
        self.eval(x)
    }

    /// Whether patch `k` is radial about its own center, so that its
    /// horocyclic coefficients do not depend on the direction.
    fn patch_is_centered_radial(&self, _k: usize) -> bool {
        false
    }

    /// `f_k(τ_c z)`: patch `k` seen from its center `c`.
    fn eval_patch_local(&self, k: usize, center: &Point, z: &Point) -> f64 {
        if center.is_origin() {
            self.eval_patch(k, z)
        } else {
            self.eval_patch(k, &translate_unchecked(center, z))
        }
    }
}

/// Geodesic ball `B_radius(center)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub center: Point,
    pub radius: f64,
}

/// A function on the boundary sphere.
pub trait BoundaryFunction: Sync {
    fn eval(&self, b: &BoundaryPoint) -> Complex64;
}

impl<F: Fn(&BoundaryPoint) -> Complex64 + Sync> BoundaryFunction for F {
    fn eval(&self, b: &BoundaryPoint) -> Complex64 {
        self(b)
    }
}

/// Closure-backed [`InteriorFunction`], cut off outside its support radius.
pub struct InteriorFn<F> {
    dim: usize,
    support: f64,
    radial: bool,
    f: F,
}

impl<F: Fn(&Point) -> f64 + Sync> InteriorFn<F> {
    pub fn new(dim: usize, support: f64, f: F) -> Self {
        Self { dim, support, radial: false, f }
    }

    /// Declares `f` radial; the caller guarantees it.
    pub fn radial(dim: usize, support: f64, f: F) -> Self {
        Self { dim, support, radial: true, f }
    }
}

impl<F: Fn(&Point) -> f64 + Sync> InteriorFunction for InteriorFn<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &Point) -> f64 {
        if x.radius() > self.support {
            0.0
        } else {
            (self.f)(x)
        }
    }

    fn support_radius(&self) -> f64 {
        self.support
    }

    fn is_radial(&self) -> bool {
        self.radial
    }
}

/// The zero function.
#[derive(Clone, Copy, Debug)]
pub struct ZeroFunction {
    pub dim: usize,
}

impl InteriorFunction for ZeroFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _x: &Point) -> f64 {
        0.0
    }

    fn support_radius(&self) -> f64 {
        0.0
    }

    fn is_radial(&self) -> bool {
        true
    }
}

/// Checks `f` against the grid and returns its patches.
pub(crate) fn checked_patches(f: &dyn InteriorFunction, grid: &QuadratureGrid) -> Result<Vec<Patch>> {
    let dim = grid.model().dim();
    if f.dim() != dim {
        return Err(domain_err!("function lives in dimension {} but the grid in {dim}", f.dim()));
    }
    let support = f.support_radius();
    let r_max = grid.params().support_radius();
    if !(support.is_finite() && support >= 0.0) || support > r_max * (1.0 + 1e-12) {
        return Err(domain_err!("support radius {support} is outside [0, {r_max}]"));
    }
    let spacing = r_max / grid.sizes().radial as f64;
    if support > r_max - 2.0 * spacing {
        log::warn!("support radius {support} lies within two radial nodes of the truncation radius {r_max}");
    }
    let patches = f.patches();
    for p in &patches {
        if p.center.dim() != dim || !(p.radius > 0.0) || p.center.radius() + p.radius > support * (1.0 + 1e-12) {
            return Err(domain_err!("patch {:?} does not fit in the declared support {support}", p));
        }
    }
    Ok(patches)
}

pub(crate) fn check_point(x: &Point, model: Model) -> Result<()> {
    if x.dim() != model.dim() {
        return Err(domain_err!("point has dimension {} but the model {}", x.dim(), model.dim()));
    }
    if !(x.norm_sq() < 1.0) {
        return Err(domain_err!("point must lie inside the unit ball, |x|² = {}", x.norm_sq()));
    }
    Ok(())
}

pub(crate) fn check_lambda(lambda: SpectralParam) -> Result<Complex64> {
    if !lambda.is_finite() {
        return Err(domain_err!("spectral parameter must be finite"));
    }
    Ok(lambda.value())
}

/// `e^{(±iλ + ρ)s}` with the sign folded into `exponent`.
#[inline]
pub(crate) fn kernel(exponent: Complex64, s: f64) -> Complex64 {
    (exponent * s).exp()
}

/// `iλ + ρ`, the exponent of the Poisson kernel.
#[inline]
pub(crate) fn poisson_exponent(lambda: Complex64, rho: f64) -> Complex64 {
    Complex64::new(rho - lambda.im, lambda.re)
}

/// `−iλ + ρ`, the exponent of the Helgason kernel.
#[inline]
pub(crate) fn helgason_exponent(lambda: Complex64, rho: f64) -> Complex64 {
    Complex64::new(rho + lambda.im, -lambda.re)
}

/// Interior nodes `y` with weights `w · f(y)`, patch by patch.
pub(crate) struct InteriorSamples {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Largest `d(o, y)` over the nodes.
    pub reach: f64,
}

impl InteriorSamples {
    pub(crate) fn new(f: &dyn InteriorFunction, grid: &QuadratureGrid) -> Result<Self> {
        let patches = checked_patches(f, grid)?;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut reach: f64 = 0.0;
        for (k, patch) in patches.iter().enumerate() {
            let rule = grid.interior(patch.radius)?;
            reach = reach.max(patch.center.radius() + patch.radius);
            for (z, w) in rule.points.iter().zip(&rule.weights) {
                let y = if patch.center.is_origin() { *z } else { translate_unchecked(&patch.center, z) };
                let v = f.eval_patch_local(k, &patch.center, z);
                if v != 0.0 {
                    points.push(y);
                    weights.push(w * v);
                }
            }
        }
        Ok(Self { points, weights, reach })
    }
}

/// Harish-Chandra spherical transform `ω_{n−1} ∫₀^ρ f(r) φ_λ(r) sinh^{n−1}(r) dr`.
pub fn spherical_transform(f: &dyn InteriorFunction, grid: &QuadratureGrid, lambda: SpectralParam) -> Result<Complex64> {
    if !f.is_radial() {
        return Err(Error::NotRadial("the spherical transform needs a radial function".into()));
    }
    checked_patches(f, grid)?;
    let lambda = check_lambda(lambda)?;
    let support = f.support_radius();
    if support == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let model = grid.model();
    let rule = Rule1d::gauss_legendre(grid.sizes().radial, 0.0, support)?;
    let axis = BoundaryPoint::axis(model.dim());
    let ev = SphericalEvaluator::with_defaults(model);
    let mut acc = ComplexSum::new();
    for (r, w) in rule.nodes.iter().zip(&rule.weights) {
        let fr = f.eval(&axis.scaled((0.5 * r).tanh()));
        acc.add(ev.eval_unchecked(lambda, *r) * (w * fr * model.radial_volume(*r)));
    }
    Ok(acc.value() * model.sphere_area())
}

/// Poisson transform `∫_B e^{(iλ+ρ)⟨x,b⟩} F(b) db` on the grid's boundary rule.
pub fn poisson_transform(
    big_f: &dyn BoundaryFunction,
    grid: &QuadratureGrid,
    lambda: SpectralParam,
    x: &Point,
) -> Result<Complex64> {
    let model = grid.model();
    check_point(x, model)?;
    let exponent = poisson_exponent(check_lambda(lambda)?, model.rho());
    let rule = grid.boundary();
    let mut acc = ComplexSum::new();
    for (b, w) in rule.points.iter().zip(&rule.weights) {
        let v = big_f.eval(b);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(domain_err!("boundary function is not finite at {:?}", b.coords()));
        }
        acc.add(kernel(exponent, bracket_unchecked(x.raw(), b.raw())) * v * *w);
    }
    Ok(acc.value())
}

/// Radial convolution `(f × g)(x) = ∫ f(y) g(d(x, y)) dy`.
pub fn convolve_radial(
    f: &dyn InteriorFunction,
    g: &dyn InteriorFunction,
    grid: &QuadratureGrid,
    x: &Point,
) -> Result<f64> {
    let conv = Convolution::new(f, g, grid)?;
    check_point(x, grid.model())?;
    Ok(conv.eval(x))
}

/// `f × g` for radial `g`, as an [`InteriorFunction`] that inherits the
/// patches of `f` enlarged by the support of `g`.
pub struct Convolution<'a> {
    f: &'a dyn InteriorFunction,
    support: f64,
    g_support: f64,
    /// Nodes `z ∈ B_{ρ_g}(o)` with weights `w · g(z)`.
    z: Vec<Point>,
    wg: Vec<f64>,
}

impl<'a> Convolution<'a> {
    pub fn new(f: &'a dyn InteriorFunction, g: &dyn InteriorFunction, grid: &QuadratureGrid) -> Result<Self> {
        if !g.is_radial() {
            return Err(Error::NotRadial("the convolver must be radial".into()));
        }
        checked_patches(f, grid)?;
        checked_patches(g, grid)?;
        let g_support = g.support_radius();
        let support = f.support_radius() + g_support;
        if support > grid.params().support_radius() * (1.0 + 1e-12) {
            return Err(domain_err!(
                "f × g is supported in radius {support}, beyond the truncation radius {}",
                grid.params().support_radius()
            ));
        }
        let mut z = Vec::new();
        let mut wg = Vec::new();
        if g_support > 0.0 {
            let rule = grid.interior(g_support)?;
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let v = g.eval(p);
                if v != 0.0 {
                    z.push(*p);
                    wg.push(w * v);
                }
            }
        }
        Ok(Self { f, support, g_support, z, wg })
    }

    fn integrate<E: Fn(&Point) -> f64>(&self, x: &Point, eval: E) -> f64 {
        let mut acc = NeumaierSum::new();
        for (z, w) in self.z.iter().zip(&self.wg) {
            acc.add(w * eval(&translate_unchecked(x, z)));
        }
        acc.value()
    }
}

impl InteriorFunction for Convolution<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn eval(&self, x: &Point) -> f64 {
        if self.z.is_empty() || x.radius() > self.support {
            return 0.0;
        }
        self.integrate(x, |y| self.f.eval(y))
    }

    fn support_radius(&self) -> f64 {
        if self.z.is_empty() {
            0.0
        } else {
            self.support
        }
    }

    fn is_radial(&self) -> bool {
        self.f.is_radial()
    }

    fn patches(&self) -> Vec<Patch> {
        if self.z.is_empty() {
            return Vec::new();
        }
        self.f
            .patches()
            .into_iter()
            .map(|p| Patch { center: p.center, radius: p.radius + self.g_support })
            .collect()
    }

    fn eval_patch(&self, k: usize, x: &Point) -> f64 {
        self.integrate(x, |y| self.f.eval_patch(k, y))
    }

    fn patch_is_centered_radial(&self, k: usize) -> bool {
        self.f.patch_is_centered_radial(k)
    }
}
