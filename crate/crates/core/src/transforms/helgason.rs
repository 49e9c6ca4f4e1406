//! Helgason transform `f̃(λ, b) = ∫ f(x) e^{(−iλ+ρ)⟨x,b⟩} dμ(x)`.
//!
//! For each direction `b` the integral is taken in horocyclic coordinates,
//! which reduces it to `Σ_j c_j e^{(−iλ+ρ) t_j}` with λ-independent `c_j`.
//! A patch centered at `p` is integrated about the origin after pulling `b`
//! back by the translation, using `⟨τ_p z, b⟩ = ⟨z, τ_p⁻¹ b⟩ + ⟨p, b⟩`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_lambda, checked_patches, helgason_exponent, kernel, InteriorFunction, Patch};

use crate::error::{domain_err, Result};
use crate::geometry::{
    bracket_unchecked, translate_boundary_unchecked, BoundaryPoint, HoroRule, Model,
    QuadratureGrid, SpectralParam, SphereRule,
};
use crate::specfun::plancherel_density;
use crate::sum::{ComplexSum, NeumaierSum};

/// `f̃(·, b)` for one direction as an exponential sum in λ.
#[derive(Clone, Debug, Default)]
pub struct HelgasonProfile {
    rho: f64,
    /// Bracket values `t_j`.
    t: Vec<f64>,
    /// Coefficients `c_j`.
    c: Vec<f64>,
}

impl HelgasonProfile {
    pub fn value(&self, lambda: Complex64) -> Complex64 {
        let exponent = helgason_exponent(lambda, self.rho);
        let mut acc = ComplexSum::new();
        for (t, c) in self.t.iter().zip(&self.c) {
            acc.add(kernel(exponent, *t) * *c);
        }
        acc.value()
    }

    /// Values at `λ_k = λ₀ + k·dλ`, advancing `e^{−iλt}` by one rotation per step.
    pub fn values_uniform(&self, lambda0: f64, dlambda: f64, count: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); count];
        for (t, c) in self.t.iter().zip(&self.c) {
            let mut cur = Complex64::from_polar(c * (self.rho * t).exp(), -lambda0 * t);
            let step = Complex64::from_polar(1.0, -dlambda * t);
            for v in out.iter_mut() {
                *v += cur;
                cur *= step;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

struct PatchPlan {
    patch: Patch,
    rule: HoroRule,
    /// Direction-independent coefficients of a centered-radial patch.
    cached: Option<Vec<f64>>,
}

/// Horocyclic rules for every patch of one function.
pub(crate) struct HelgasonPlan<'a> {
    f: &'a dyn InteriorFunction,
    rho: f64,
    patches: Vec<PatchPlan>,
}

impl<'a> HelgasonPlan<'a> {
    /// With `reuse_radial`, centered-radial patches are integrated along one
    /// direction and reused for all others.
    pub(crate) fn new(f: &'a dyn InteriorFunction, grid: &QuadratureGrid, reuse_radial: bool) -> Result<Self> {
        let patches = checked_patches(f, grid)?;
        let axis = BoundaryPoint::axis(grid.model().dim());
        let mut plans: Vec<PatchPlan> = Vec::with_capacity(patches.len());
        for (k, patch) in patches.into_iter().enumerate() {
            let rule = match plans.iter().find(|q| q.patch.radius == patch.radius) {
                Some(q) => q.rule.clone(),
                None => grid.horocyclic(patch.radius)?,
            };
            let cached = (reuse_radial && f.patch_is_centered_radial(k))
                .then(|| rule.profile(|z| f.eval_patch_local(k, &patch.center, z), &axis));
            plans.push(PatchPlan { patch, rule, cached });
        }
        Ok(Self { f, rho: grid.model().rho(), patches: plans })
    }

    pub(crate) fn profile(&self, b: &BoundaryPoint) -> HelgasonProfile {
        let mut t = Vec::new();
        let mut c = Vec::new();
        for (k, plan) in self.patches.iter().enumerate() {
            let p = &plan.patch.center;
            let coefs = match &plan.cached {
                Some(cached) => cached.clone(),
                None => {
                    let pulled = if p.is_origin() { *b } else { translate_boundary_unchecked(&p.neg(), b) };
                    plan.rule.profile(|z| self.f.eval_patch_local(k, p, z), &pulled)
                }
            };
            let shift = if p.is_origin() { 0.0 } else { bracket_unchecked(p.raw(), b.raw()) };
            for (slice, coef) in plan.rule.slices().iter().zip(coefs) {
                if coef != 0.0 {
                    t.push(slice.s + shift);
                    c.push(coef);
                }
            }
        }
        HelgasonProfile { rho: self.rho, t, c }
    }

    pub(crate) fn profiles(&self, rule: &SphereRule) -> Vec<HelgasonProfile> {
        rule.points.par_iter().map(|b| self.profile(b)).collect()
    }
}

/// `f̃(λ, b)` at one spectral parameter and direction.
pub fn helgason_transform(
    f: &dyn InteriorFunction,
    grid: &QuadratureGrid,
    lambda: SpectralParam,
    b: &BoundaryPoint,
) -> Result<Complex64> {
    if b.dim() != grid.model().dim() {
        return Err(domain_err!("boundary point has dimension {} but the model {}", b.dim(), grid.model().dim()));
    }
    let lambda = check_lambda(lambda)?;
    let plan = HelgasonPlan::new(f, grid, false)?;
    Ok(plan.profile(b).value(lambda))
}

/// `f̃(λ_k, b_j)` on a spectral list times a boundary rule, stored row-major
/// by spectral index.
#[derive(Clone, Debug)]
pub struct HelgasonGrid {
    model: Model,
    lambdas: Vec<Complex64>,
    lambda_weights: Option<Vec<f64>>,
    boundary: SphereRule,
    values: Vec<Complex64>,
}

impl HelgasonGrid {
    /// Transform at the given λ on the grid's boundary rule.
    pub fn compute(f: &dyn InteriorFunction, grid: &QuadratureGrid, lambdas: &[SpectralParam]) -> Result<Self> {
        let ls = lambdas.iter().map(|l| check_lambda(*l)).collect::<Result<Vec<_>>>()?;
        Self::fill(f, grid, ls, None)
    }

    /// Transform on the grid's spectral rule, ready for inversion.
    pub fn compute_spectral(f: &dyn InteriorFunction, grid: &QuadratureGrid) -> Result<Self> {
        let rule = grid.spectral();
        let ls = rule.nodes.iter().map(|l| Complex64::new(*l, 0.0)).collect();
        Self::fill(f, grid, ls, Some(rule.weights.clone()))
    }

    fn fill(
        f: &dyn InteriorFunction,
        grid: &QuadratureGrid,
        lambdas: Vec<Complex64>,
        lambda_weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let plan = HelgasonPlan::new(f, grid, true)?;
        let boundary = grid.boundary().clone();
        let profiles = plan.profiles(&boundary);
        let nb = boundary.len();
        let nl = lambdas.len();
        let uniform = uniform_real(&lambdas);
        let columns: Vec<Vec<Complex64>> = profiles
            .par_iter()
            .map(|p| match uniform {
                Some((l0, dl)) => p.values_uniform(l0, dl, nl),
                None => lambdas.iter().map(|l| p.value(*l)).collect(),
            })
            .collect();
        let mut values = vec![Complex64::new(0.0, 0.0); nl * nb];
        for (j, col) in columns.iter().enumerate() {
            for (k, v) in col.iter().enumerate() {
                values[k * nb + j] = *v;
            }
        }
        Self::from_values(grid.model(), lambdas, lambda_weights, boundary, values)
    }

    /// Wraps precomputed values; checks shapes and finiteness.
    pub fn from_values(
        model: Model,
        lambdas: Vec<Complex64>,
        lambda_weights: Option<Vec<f64>>,
        boundary: SphereRule,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != lambdas.len() * boundary.len() {
            return Err(crate::Error::Size(format!(
                "Helgason grid has {} values for {} × {} nodes",
                values.len(),
                lambdas.len(),
                boundary.len()
            )));
        }
        if let Some(w) = &lambda_weights {
            if w.len() != lambdas.len() {
                return Err(crate::Error::Size("spectral weights do not match the spectral nodes".into()));
            }
        }
        if boundary.points.iter().any(|b| b.dim() != model.dim()) {
            return Err(domain_err!("boundary rule does not match the model dimension"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(domain_err!("Helgason grid has non-finite entries"));
        }
        Ok(Self { model, lambdas, lambda_weights, boundary, values })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn lambda_weights(&self) -> Option<&[f64]> {
        self.lambda_weights.as_deref()
    }

    pub fn boundary(&self) -> &SphereRule {
        &self.boundary
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_lambda(&self) -> usize {
        self.lambdas.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    #[inline]
    pub fn get(&self, k: usize, j: usize) -> Complex64 {
        self.values[k * self.boundary.len() + j]
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        let nb = self.boundary.len();
        &self.values[k * nb..(k + 1) * nb]
    }

    /// Multiplies row `k` by `factor(λ_k)`.
    pub fn scale_rows<F: Fn(Complex64) -> Complex64>(&self, factor: F) -> Self {
        let nb = self.boundary.len();
        let mut out = self.clone();
        for (k, l) in self.lambdas.iter().enumerate() {
            let s = factor(*l);
            for v in &mut out.values[k * nb..(k + 1) * nb] {
                *v *= s;
            }
        }
        out
    }

    /// `∫∫ |f̃|² w(λ) dλ db` on the stored rules.
    pub fn weighted_norm_sq<W: Fn(f64) -> f64>(&self, density: W) -> Result<f64> {
        let weights = self.real_spectral_weights()?;
        let mut acc = NeumaierSum::new();
        for (k, (l, wl)) in self.lambdas.iter().zip(weights).enumerate() {
            let d = density(l.re);
            let mut row = NeumaierSum::new();
            for (v, wb) in self.row(k).iter().zip(&self.boundary.weights) {
                row.add(v.norm_sqr() * wb);
            }
            acc.add(wl * d * row.value());
        }
        Ok(acc.value())
    }

    /// `∫∫ |f̃|² |c(λ)|⁻² dλ db`.
    pub fn plancherel_norm_sq(&self) -> Result<f64> {
        let model = self.model;
        self.weighted_norm_sq(|l| plancherel_density(l.abs(), model).unwrap_or(0.0))
    }

    /// `max_b |f̃(λ_last, b)| / max |f̃|`, the spectral truncation indicator.
    pub fn tail_ratio(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if peak == 0.0 || self.lambdas.is_empty() {
            return 0.0;
        }
        let last = self.row(self.lambdas.len() - 1).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        last / peak
    }

    pub(crate) fn real_spectral_weights(&self) -> Result<&[f64]> {
        let w = self
            .lambda_weights
            .as_deref()
            .ok_or_else(|| domain_err!("Helgason grid carries no spectral weights"))?;
        if self.lambdas.iter().any(|l| l.im != 0.0) {
            return Err(domain_err!("spectral integration needs real λ nodes"));
        }
        Ok(w)
    }
}

/// `(λ₀, dλ)` when the list is real and equispaced.
pub(crate) fn uniform_real(lambdas: &[Complex64]) -> Option<(f64, f64)> {
    if lambdas.len() < 2 || lambdas.iter().any(|l| l.im != 0.0) {
        return None;
    }
    let n = lambdas.len();
    let l0 = lambdas[0].re;
    let dl = (lambdas[n - 1].re - l0) / (n - 1) as f64;
    let scale = lambdas.iter().fold(dl.abs(), |m, l| m.max(l.re.abs()));
    lambdas
        .iter()
        .enumerate()
        .all(|(k, l)| (l.re - (l0 + dl * k as f64)).abs() <= 1e-13 * scale)
        .then_some((l0, dl))
}
