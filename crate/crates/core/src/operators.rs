//! Finite-difference Laplace–Beltrami operator on the ball and the
//! eigen-residual of a field against `Δu = −(λ² + ρ²) u`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain_err, Error, Result};
use crate::geometry::{Model, Point, SpectralParam};

pub const MIN_STEP: f64 = 1e-4;
pub const MAX_STEP: f64 = 1e-1;

/// A complex field on the ball, differentiated with central differences of
/// step `h`.
pub struct ScalarField<'a> {
    model: Model,
    step: f64,
    rule: Box<dyn Fn(&Point) -> Complex64 + Sync + 'a>,
}

impl<'a> ScalarField<'a> {
    pub fn new<F>(model: Model, step: f64, rule: F) -> Result<Self>
    where
        F: Fn(&Point) -> Complex64 + Sync + 'a,
    {
        if !(MIN_STEP..=MAX_STEP).contains(&step) {
            return Err(domain_err!("stencil step must lie in [{MIN_STEP}, {MAX_STEP}], got {step}"));
        }
        Ok(Self { model, step, rule: Box::new(rule) })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn with_step(self, step: f64) -> Result<Self> {
        if !(MIN_STEP..=MAX_STEP).contains(&step) {
            return Err(domain_err!("stencil step must lie in [{MIN_STEP}, {MAX_STEP}], got {step}"));
        }
        Ok(Self { step, ..self })
    }

    pub fn eval(&self, x: &Point) -> Complex64 {
        (self.rule)(x)
    }
}

fn check_stencil(u: &ScalarField, x: &Point) -> Result<()> {
    if x.dim() != u.model.dim() {
        return Err(domain_err!("point has dimension {} but the field lives in {}", x.dim(), u.model.dim()));
    }
    let norm = x.norm();
    if norm + u.step >= 1.0 {
        return Err(Error::StencilOutOfDomain { norm, step: u.step });
    }
    Ok(())
}

/// `((1−|x|²)²/4) Δ_E u + (n−2) ((1−|x|²)/2) x·∇u`.
pub fn laplace_beltrami(u: &ScalarField, x: &Point) -> Result<Complex64> {
    check_stencil(u, x)?;
    Ok(laplace_unchecked(u, x).0)
}

/// Returns `(Δu(x), u(x))`.
fn laplace_unchecked(u: &ScalarField, x: &Point) -> (Complex64, Complex64) {
    let n = x.dim();
    let h = u.step;
    let u0 = u.eval(x);
    let mut lap = Complex64::new(0.0, 0.0);
    let mut radial = Complex64::new(0.0, 0.0);
    let mut c = [0.0; 3];
    c[..n].copy_from_slice(x.coords());
    for i in 0..n {
        let xi = c[i];
        c[i] = xi + h;
        let up = u.eval(&Point::new(&c[..n]).expect("stencil point inside the ball"));
        c[i] = xi - h;
        let um = u.eval(&Point::new(&c[..n]).expect("stencil point inside the ball"));
        c[i] = xi;
        lap += (up - u0 * 2.0 + um) / (h * h);
        radial += (up - um) * (xi / (2.0 * h));
    }
    let q = 1.0 - x.norm_sq();
    let value = lap * (0.25 * q * q) + radial * ((n as f64 - 2.0) * 0.5 * q);
    (value, u0)
}

/// `max |Δu + (λ² + ρ²) u| / (1 + |u|)` over `sample`.
pub fn eigen_residual(u: &ScalarField, lambda: SpectralParam, sample: &[Point]) -> Result<f64> {
    let l = lambda.value();
    if !(l.re.is_finite() && l.im.is_finite()) {
        return Err(domain_err!("spectral parameter must be finite"));
    }
    for x in sample {
        check_stencil(u, x)?;
    }
    let rho = u.model.rho();
    let eigen = l * l + rho * rho;
    let residuals: Vec<f64> = sample
        .par_iter()
        .map(|x| {
            let (lap, u0) = laplace_unchecked(u, x);
            (lap + eigen * u0).norm() / (1.0 + u0.norm())
        })
        .collect();
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{horocycle_bracket, BoundaryPoint};
    use crate::specfun::{h3_closed_form, SphericalEvaluator};

    fn plane_wave(model: Model, lambda: f64, b: BoundaryPoint) -> impl Fn(&Point) -> Complex64 + Sync {
        let e = Complex64::new(model.rho(), lambda);
        move |x: &Point| (e * horocycle_bracket(x, &b).unwrap()).exp()
    }

    fn sample(model: Model) -> Vec<Point> {
        (0..12)
            .map(|k| {
                let t = k as f64;
                let dir = if model == Model::H2 {
                    BoundaryPoint::from_angle(0.7 * t)
                } else {
                    BoundaryPoint::from_polar((1.3 * t).sin(), 0.7 * t)
                };
                Point::at_distance(&dir, 0.15 * t).unwrap()
            })
            .collect()
    }

    #[test]
    fn constant_field_is_harmonic() {
        for model in [Model::H2, Model::H3] {
            let u = ScalarField::new(model, 1e-3, |_| Complex64::new(3.0, -1.0)).unwrap();
            for x in sample(model) {
                assert!(laplace_beltrami(&u, &x).unwrap().norm() < 1e-8);
            }
        }
    }

    #[test]
    fn plane_wave_eigenvalue_h2() {
        let b = BoundaryPoint::from_angle(0.4);
        let u = ScalarField::new(Model::H2, 1e-3, plane_wave(Model::H2, 1.5, b)).unwrap();
        for x in sample(Model::H2) {
            let got = laplace_beltrami(&u, &x).unwrap();
            let want = -(1.5 * 1.5 + 0.25) * u.eval(&x);
            assert!((got - want).norm() / want.norm() <= 5e-5, "{got} vs {want}");
        }
    }

    #[test]
    fn plane_wave_eigenvalue_h3() {
        let b = BoundaryPoint::from_polar(0.2, 2.0);
        let u = ScalarField::new(Model::H3, 1e-3, plane_wave(Model::H3, 0.8, b)).unwrap();
        assert!(eigen_residual(&u, SpectralParam::real(0.8), &sample(Model::H3)).unwrap() < 5e-5);
    }

    #[test]
    fn spherical_functions_are_eigenfunctions() {
        let ev = SphericalEvaluator::with_defaults(Model::H2);
        let u = ScalarField::new(Model::H2, 1e-3, |x| ev.eval(SpectralParam::real(2.0), x.radius()).unwrap()).unwrap();
        assert!(eigen_residual(&u, SpectralParam::real(2.0), &sample(Model::H2)[1..]).unwrap() < 1e-4);
        let u = ScalarField::new(Model::H3, 1e-3, |x| h3_closed_form(Complex64::new(1.0, 0.0), x.radius())).unwrap();
        assert!(eigen_residual(&u, SpectralParam::real(1.0), &sample(Model::H3)[1..]).unwrap() < 1e-4);
    }

    #[test]
    fn wrong_eigenvalue_is_detected() {
        let b = BoundaryPoint::from_angle(0.4);
        let u = ScalarField::new(Model::H2, 1e-3, plane_wave(Model::H2, 1.5, b)).unwrap();
        assert!(eigen_residual(&u, SpectralParam::real(1.0), &sample(Model::H2)).unwrap() > 1e-1);
    }

    #[test]
    fn second_order_convergence() {
        let b = BoundaryPoint::from_polar(-0.3, 1.0);
        let pts = sample(Model::H3);
        let res = |h: f64| {
            let u = ScalarField::new(Model::H3, h, plane_wave(Model::H3, 2.0, b)).unwrap();
            eigen_residual(&u, SpectralParam::real(2.0), &pts).unwrap()
        };
        let ratio = res(1e-2) / res(5e-3);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn stencil_and_step_checks() {
        assert!(ScalarField::new(Model::H2, 1e-5, |_| Complex64::new(0.0, 0.0)).is_err());
        assert!(ScalarField::new(Model::H2, 0.2, |_| Complex64::new(0.0, 0.0)).is_err());
        let u = ScalarField::new(Model::H2, 1e-2, |_| Complex64::new(1.0, 0.0)).unwrap();
        let x = Point::new(&[0.995, 0.0]).unwrap();
        assert!(matches!(laplace_beltrami(&u, &x), Err(Error::StencilOutOfDomain { .. })));
        assert!(laplace_beltrami(&u, &Point::origin(3)).is_err());
    }
}
