//! Spherical functions `φ_λ` and the Plancherel density.

use num_complex::Complex64;

use crate::error::{domain_err, Result};
use crate::geometry::{Model, SpectralParam};
use crate::sum::ComplexSum;

/// `κ₂` in `|c(λ)|⁻² = κ₂ λ tanh(πλ)` on `H²`, with the boundary measure of
/// mass one and Riemannian volume on `X`.
pub const PLANCHEREL_KAPPA_H2: f64 = 1.0 / (2.0 * std::f64::consts::PI);

/// `κ₃` in `|c(λ)|⁻² = κ₃ λ²` on `H³`.
pub const PLANCHEREL_KAPPA_H3: f64 = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);

const TAYLOR_SWITCH: f64 = 1e-4;
const MAX_TRAPEZOID_NODES: usize = 1 << 20;

pub fn plancherel_kappa(model: Model) -> f64 {
    match model {
        Model::H2 => PLANCHEREL_KAPPA_H2,
        Model::H3 => PLANCHEREL_KAPPA_H3,
    }
}

/// Plancherel density `|c(λ)|⁻²` for `λ ≥ 0`.
pub fn plancherel_density(lambda: f64, model: Model) -> Result<f64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(domain_err!("Plancherel density needs a finite λ ≥ 0, got {lambda}"));
    }
    Ok(density_unnormalized(lambda, model) * plancherel_kappa(model))
}

/// `λ tanh(πλ)` or `λ²`, without the constant.
pub fn density_unnormalized(lambda: f64, model: Model) -> f64 {
    match model {
        Model::H2 => lambda * (std::f64::consts::PI * lambda).tanh(),
        Model::H3 => lambda * lambda,
    }
}

/// Evaluates `φ_λ(r)`, the boundary average of `e^{(iλ+ρ)⟨x, b⟩}` over a
/// point `x` at geodesic radius `r`.
#[derive(Clone, Copy, Debug)]
pub struct SphericalEvaluator {
    model: Model,
    resolution: usize,
}

impl SphericalEvaluator {
    pub const MIN_RESOLUTION: usize = 64;
    pub const DEFAULT_RESOLUTION: usize = 128;

    pub fn new(model: Model, resolution: usize) -> Result<Self> {
        if resolution < Self::MIN_RESOLUTION {
            return Err(crate::Error::Size(format!(
                "spherical function resolution must be at least {}, got {resolution}",
                Self::MIN_RESOLUTION
            )));
        }
        Ok(Self { model, resolution })
    }

    pub fn with_defaults(model: Model) -> Self {
        Self { model, resolution: Self::DEFAULT_RESOLUTION }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn eval(&self, lambda: SpectralParam, r: f64) -> Result<Complex64> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(domain_err!("spherical function needs a finite r ≥ 0, got {r}"));
        }
        if !lambda.is_finite() {
            return Err(domain_err!("spherical function needs a finite λ"));
        }
        Ok(self.eval_unchecked(lambda.value(), r))
    }

    pub(crate) fn eval_unchecked(&self, lambda: Complex64, r: f64) -> Complex64 {
        if r == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        match self.model {
            Model::H2 => self.h2_boundary_integral(lambda, r, self.resolution).0,
            Model::H3 => h3_closed_form(lambda, r),
        }
    }

    /// Trapezoid rule for the `H²` boundary integral, doubling the node
    /// count from `start` until successive values agree to rounding.
    /// Returns the value and the node count used.
    ///
    /// The boundary variable is reparametrized by the circle Möbius map
    /// `e^{iθ} = (e^{iψ} + c)/(1 + c e^{iψ})` with `c = tanh(r/4)`, which
    /// moves nodes toward the peak of the kernel at `θ = 0` and pushes the
    /// nearest complex singularity of the integrand out to `|log c|`.
    pub fn h2_boundary_integral(&self, lambda: Complex64, r: f64, start: usize) -> (Complex64, usize) {
        let a = (0.5 * r).tanh();
        let c = (0.25 * r).tanh();
        let exponent = Complex64::new(-lambda.im + 0.5, lambda.re);
        let one_minus_a2 = (1.0 - a) * (1.0 + a);
        let one_minus_c2 = (1.0 - c) * (1.0 + c);
        let term = |psi: f64| -> Complex64 {
            let (sp, cp) = psi.sin_cos();
            let z = Complex64::new(cp, sp);
            let b = (z + c) / (Complex64::new(1.0, 0.0) + c * z);
            let dx = a - b.re;
            let dist2 = dx * dx + b.im * b.im;
            let jac = one_minus_c2 / (1.0 + 2.0 * c * cp + c * c);
            (exponent * (one_minus_a2 / dist2).ln()).exp() * jac
        };
        let mut n = start.max(8);
        let step = |n: usize| 2.0 * std::f64::consts::PI / n as f64;
        let mut acc = ComplexSum::new();
        for k in 0..n {
            acc.add(term(step(n) * k as f64));
        }
        let mut total = acc.value();
        let mut value = total / n as f64;
        while n < MAX_TRAPEZOID_NODES {
            let h = step(2 * n);
            let mut odd = ComplexSum::new();
            for k in 0..n {
                odd.add(term(h * (2 * k + 1) as f64));
            }
            total += odd.value();
            n *= 2;
            let next = total / n as f64;
            let diff = (next - value).norm();
            value = next;
            if diff <= 1e-15 * value.norm().max(1.0) {
                break;
            }
        }
        (value, n)
    }

    /// Interpolant of `r ↦ φ_λ(r)` on `[0, r_max]`.
    pub fn table(&self, lambda: SpectralParam, r_max: f64) -> Result<SphericalTable> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(domain_err!("table range must be positive, got {r_max}"));
        }
        if !lambda.is_finite() {
            return Err(domain_err!("spherical function needs a finite λ"));
        }
        let real = lambda.is_real();
        let lambda = lambda.value();
        Ok(match (self.model, real) {
            (Model::H3, true) => SphericalTable::ClosedReal { lambda: lambda.re, r_max },
            (Model::H3, false) => SphericalTable::Closed { lambda, r_max },
            (Model::H2, _) => {
                let table = ChebyshevTable::build(|r| self.eval_unchecked(lambda, r), r_max, lambda);
                if real {
                    SphericalTable::RealChebyshev(table.real_part())
                } else {
                    SphericalTable::Chebyshev(table)
                }
            }
        })
    }
}

/// `sin(λr)/(λ sinh r)` with both removable singularities expanded.
pub fn h3_closed_form(lambda: Complex64, r: f64) -> Complex64 {
    sinc(lambda * r) * r_over_sinh(r)
}

fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < TAYLOR_SWITCH {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    }
}

/// Real-λ form of [`h3_closed_form`].
pub fn h3_closed_form_real(lambda: f64, r: f64) -> f64 {
    let z = lambda * r;
    let sinc = if z.abs() < TAYLOR_SWITCH {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0
    } else {
        z.sin() / z
    };
    sinc * r_over_sinh(r)
}

fn r_over_sinh(r: f64) -> f64 {
    if r.abs() < TAYLOR_SWITCH {
        let r2 = r * r;
        1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0 - 31.0 * r2 * r2 * r2 / 15120.0
    } else {
        r / r.sinh()
    }
}

/// Tabulated `φ_λ` for repeated evaluation at one λ.
#[derive(Clone, Debug)]
pub enum SphericalTable {
    Closed { lambda: Complex64, r_max: f64 },
    ClosedReal { lambda: f64, r_max: f64 },
    Chebyshev(ChebyshevTable),
    RealChebyshev(RealChebyshevTable),
}

impl SphericalTable {
    #[inline]
    pub fn eval(&self, r: f64) -> Complex64 {
        match self {
            SphericalTable::Closed { lambda, .. } => h3_closed_form(*lambda, r),
            SphericalTable::ClosedReal { lambda, .. } => Complex64::new(h3_closed_form_real(*lambda, r), 0.0),
            SphericalTable::Chebyshev(t) => t.eval(r),
            SphericalTable::RealChebyshev(t) => Complex64::new(t.eval(r), 0.0),
        }
    }

    pub fn r_max(&self) -> f64 {
        match self {
            SphericalTable::Closed { r_max, .. } | SphericalTable::ClosedReal { r_max, .. } => *r_max,
            SphericalTable::Chebyshev(t) => t.r_max,
            SphericalTable::RealChebyshev(t) => t.r_max,
        }
    }
}

/// Piecewise Chebyshev interpolant on `[0, r_max]`: equal panels, each
/// with its own adaptively chosen degree.
#[derive(Clone, Debug)]
pub struct ChebyshevTable {
    r_max: f64,
    panel_len: f64,
    panels: Vec<Vec<Complex64>>,
}

impl ChebyshevTable {
    const MIN_DEGREE: usize = 8;
    const MAX_DEGREE: usize = 128;
    /// Absolute tail tolerance; `|φ_λ| ≤ 1` on the real axis.
    const TAIL_TOL: f64 = 1e-15;

    /// Panels of length about `min(1/2, 2/|λ|)` keep degrees near 20.
    pub fn build<F: Fn(f64) -> Complex64>(f: F, r_max: f64, lambda: Complex64) -> Self {
        let target = (2.0 / lambda.norm().max(1e-300)).min(0.5);
        let count = ((r_max / target).ceil() as usize).max(1);
        let panel_len = r_max / count as f64;
        let panels = (0..count)
            .map(|i| Self::panel(&f, panel_len * i as f64, panel_len))
            .collect();
        Self { r_max, panel_len, panels }
    }

    fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, len: f64) -> Vec<Complex64> {
        let node = |n: usize, k: usize| a + 0.5 * len * (1.0 + (std::f64::consts::PI * k as f64 / n as f64).cos());
        let mut n = Self::MIN_DEGREE;
        let mut samples: Vec<Complex64> = (0..=n).map(|k| f(node(n, k))).collect();
        loop {
            let coeffs = Self::coefficients(&samples);
            let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            let tail = coeffs[n - 2..].iter().fold(0.0f64, |m, c| m.max(c.norm()));
            if tail <= Self::TAIL_TOL * scale.max(1.0) || n >= Self::MAX_DEGREE {
                let floor = 1e-18 * scale.max(1.0);
                let keep = coeffs.iter().rposition(|c| c.norm() > floor).map_or(1, |i| i + 1);
                let mut coeffs = coeffs;
                coeffs.truncate(keep);
                return coeffs;
            }
            // Lobatto points nest under doubling.
            let finer = 2 * n;
            samples = (0..=finer).map(|k| if k % 2 == 0 { samples[k / 2] } else { f(node(finer, k)) }).collect();
            n = finer;
        }
    }

    /// Type-I DCT of the Lobatto samples.
    fn coefficients(samples: &[Complex64]) -> Vec<Complex64> {
        let n = samples.len() - 1;
        let pi_n = std::f64::consts::PI / n as f64;
        (0..=n)
            .map(|j| {
                let mut acc = ComplexSum::new();
                for (k, s) in samples.iter().enumerate() {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    acc.add(*s * (w * (pi_n * ((j * k) % (2 * n)) as f64).cos()));
                }
                let scale = if j == 0 || j == n { 1.0 } else { 2.0 };
                acc.value() * (scale / n as f64)
            })
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        self.panels.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Drops the imaginary parts, for functions known to be real.
    pub fn real_part(&self) -> RealChebyshevTable {
        RealChebyshevTable {
            r_max: self.r_max,
            panel_len: self.panel_len,
            panels: self.panels.iter().map(|p| p.iter().map(|c| c.re).collect()).collect(),
        }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> Complex64 {
        let (i, t) = locate(r, self.panel_len, self.panels.len());
        let coeffs = &self.panels[i];
        let t2 = 2.0 * t;
        let mut b1 = Complex64::new(0.0, 0.0);
        let mut b2 = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().skip(1).rev() {
            let b0 = *c + b1 * t2 - b2;
            b2 = b1;
            b1 = b0;
        }
        coeffs[0] + b1 * t - b2
    }
}

/// Panel index and local coordinate in `[−1, 1]`.
#[inline]
fn locate(r: f64, panel_len: f64, count: usize) -> (usize, f64) {
    let i = ((r / panel_len) as usize).min(count - 1);
    (i, 2.0 * (r - panel_len * i as f64) / panel_len - 1.0)
}

/// Real-coefficient counterpart of [`ChebyshevTable`].
#[derive(Clone, Debug)]
pub struct RealChebyshevTable {
    r_max: f64,
    panel_len: f64,
    panels: Vec<Vec<f64>>,
}

impl RealChebyshevTable {
    pub fn max_degree(&self) -> usize {
        self.panels.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let (i, t) = locate(r, self.panel_len, self.panels.len());
        let coeffs = &self.panels[i];
        let t2 = 2.0 * t;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for c in coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * t2 - b2;
            b2 = b1;
            b1 = b0;
        }
        coeffs[0] + b1 * t - b2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Laplace's first integral for the conical function,
    /// `P_{−1/2+iλ}(cosh r) = (1/π) ∫₀^π (cosh r + sinh r cos t)^{−1/2+iλ} dt`,
    /// by composite Gauss–Legendre. Independent of the boundary-integral path.
    fn conical_oracle(lambda: f64, r: f64) -> Complex64 {
        let rule = crate::geometry::quadrature::Rule1d::gauss_legendre(40, 0.0, 1.0).unwrap();
        let panels = 200;
        let h = std::f64::consts::PI / panels as f64;
        let nu = Complex64::new(-0.5, lambda);
        let mut acc = ComplexSum::new();
        for p in 0..panels {
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let t = h * (p as f64 + x);
                let base = r.cosh() + r.sinh() * t.cos();
                acc.add((nu * base.ln()).exp() * (w * h));
            }
        }
        acc.value() / std::f64::consts::PI
    }

    #[test]
    fn value_at_origin_is_one() {
        for model in [Model::H2, Model::H3] {
            let ev = SphericalEvaluator::with_defaults(model);
            for l in [0.0, 0.3, 5.0, -7.0] {
                assert_eq!(ev.eval(l.into(), 0.0).unwrap(), Complex64::new(1.0, 0.0));
            }
            assert_eq!(ev.eval(SpectralParam::complex(1.0, 2.0), 0.0).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn h3_closed_form_against_sphere_quadrature() {
        // Brute-force boundary average over S² of e^{(iλ+1)⟨x, b⟩}, x at radius 1.
        let l = 1.0;
        let r = 1.0f64;
        let a = (0.5 * r).tanh();
        let rule = crate::geometry::quadrature::Rule1d::gauss_legendre(200, -1.0, 1.0).unwrap();
        let mut acc = ComplexSum::new();
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let p = (1.0 - a * a) / (1.0 + a * a - 2.0 * a * t);
            acc.add((Complex64::new(1.0, l) * p.ln()).exp() * (0.5 * w));
        }
        let oracle = acc.value();
        let ev = SphericalEvaluator::with_defaults(Model::H3);
        let got = ev.eval(l.into(), r).unwrap();
        assert!((got - oracle).norm() <= 1e-10);
        assert_relative_eq!(got.re, 1f64.sin() / 1f64.sinh(), max_relative = 1e-14);
        assert_relative_eq!(got.re, 0.716_023, epsilon = 1e-6);
    }

    #[test]
    fn h2_matches_conical_function() {
        let ev = SphericalEvaluator::with_defaults(Model::H2);
        for (l, r) in [(0.0, 0.5), (1.0, 1.0), (2.5, 3.0), (12.0, 4.0), (7.0, 5.0)] {
            let got = ev.eval(l.into(), r).unwrap();
            let want = conical_oracle(l, r);
            assert!((got - want).norm() <= 1e-12, "λ={l} r={r}: {got} vs {want}");
        }
    }

    #[test]
    fn weyl_symmetry() {
        for model in [Model::H2, Model::H3] {
            let ev = SphericalEvaluator::with_defaults(model);
            let a = ev.eval(2.0.into(), 1.3).unwrap();
            let b = ev.eval((-2.0).into(), 1.3).unwrap();
            assert!((a - b).norm() <= 1e-12);
            assert!(a.im.abs() <= 1e-14);
        }
    }

    #[test]
    fn h3_taylor_branches_are_continuous() {
        for (l, r) in [(1e-5, 1.0), (0.0, 1.0), (1.0, 1e-5), (3.0, 2e-5)] {
            let got = h3_closed_form(Complex64::new(l, 0.0), r).re;
            let direct = if l == 0.0 { r / r.sinh() } else { (l * r).sin() / (l * r.sinh()) };
            assert_relative_eq!(got, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn h2_doubling_converges() {
        let ev = SphericalEvaluator::with_defaults(Model::H2);
        for r in [0.5, 2.0, 4.0] {
            for l in [0.0, 3.0, 12.0] {
                let (v1, n) = ev.h2_boundary_integral(Complex64::new(l, 0.0), r, 128);
                let (v2, _) = ev.h2_boundary_integral(Complex64::new(l, 0.0), r, 2 * n);
                assert!((v1 - v2).norm() <= 1e-11, "r={r} λ={l}");
            }
        }
    }

    #[test]
    fn bounded_by_phi_zero() {
        for model in [Model::H2, Model::H3] {
            let ev = SphericalEvaluator::with_defaults(model);
            for i in 0..50 {
                let r = 4.0 * i as f64 / 49.0;
                let phi0 = ev.eval(0.0.into(), r).unwrap().re;
                assert!(phi0 <= 1.0 + 1e-15);
                for j in 0..50 {
                    let l = 12.0 * j as f64 / 49.0;
                    let v = ev.eval(l.into(), r).unwrap();
                    assert!(v.norm() <= phi0 + 1e-12, "{model} λ={l} r={r}");
                }
            }
        }
    }

    #[test]
    fn radial_eigen_equation() {
        // u'' + (n−1) coth(r) u' = −(λ² + ρ²) u, by central differences.
        for model in [Model::H2, Model::H3] {
            let ev = SphericalEvaluator::with_defaults(model);
            let rho = model.rho();
            let nm1 = (model.dim() - 1) as f64;
            let l = 1.7;
            let mut errs = Vec::new();
            for h in [1e-2, 5e-3] {
                let mut worst: f64 = 0.0;
                for r in [0.5, 1.0, 2.0, 3.0] {
                    let u = |x: f64| ev.eval(l.into(), x).unwrap().re;
                    let d2 = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
                    let d1 = (u(r + h) - u(r - h)) / (2.0 * h);
                    let res = d2 + nm1 / r.tanh() * d1 + (l * l + rho * rho) * u(r);
                    worst = worst.max(res.abs());
                }
                errs.push(worst);
            }
            assert!(errs[0] < 1e-3, "{model}: {errs:?}");
            let ratio = errs[0] / errs[1];
            assert!((3.5..=4.5).contains(&ratio), "{model}: ratio {ratio}");
        }
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let ev = SphericalEvaluator::with_defaults(Model::H2);
        for l in [0.0, 1.0, 12.0] {
            let table = ev.table(l.into(), 6.0).unwrap();
            assert!(matches!(table, SphericalTable::RealChebyshev(_)));
            for k in 0..37 {
                let r = 6.0 * k as f64 / 36.0;
                let d = (table.eval(r) - ev.eval(l.into(), r).unwrap()).norm();
                assert!(d <= 1e-13, "λ={l} r={r}: {d}");
            }
        }
    }

    #[test]
    fn complex_table_and_h3_real_path() {
        let ev = SphericalEvaluator::with_defaults(Model::H2);
        let l = SpectralParam::complex(1.5, 0.7);
        let table = ev.table(l, 5.0).unwrap();
        for r in [0.0, 0.3, 2.2, 5.0] {
            assert!((table.eval(r) - ev.eval(l, r).unwrap()).norm() <= 1e-13);
        }
        let h3 = SphericalEvaluator::with_defaults(Model::H3).table(2.0.into(), 5.0).unwrap();
        for r in [0.0, 1e-6, 0.3, 4.0] {
            assert!((h3.eval(r) - h3_closed_form(Complex64::new(2.0, 0.0), r)).norm() <= 1e-15);
        }
    }

    #[test]
    fn density_values() {
        assert_eq!(plancherel_density(0.0, Model::H2).unwrap(), 0.0);
        assert_eq!(plancherel_density(0.0, Model::H3).unwrap(), 0.0);
        let d = plancherel_density(1.0, Model::H2).unwrap();
        assert_relative_eq!(d / PLANCHEREL_KAPPA_H2, 0.996_272_1, epsilon = 1e-7);
        let ratio = plancherel_density(2.0, Model::H3).unwrap() / plancherel_density(1.0, Model::H3).unwrap();
        assert_relative_eq!(ratio, 4.0, max_relative = 1e-15);
        assert!(plancherel_density(-1.0, Model::H2).is_err());
    }

    #[test]
    fn resolution_floor() {
        assert!(SphericalEvaluator::new(Model::H2, 32).is_err());
        assert!(SphericalEvaluator::new(Model::H2, 64).is_ok());
    }
}
