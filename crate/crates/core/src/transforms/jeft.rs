//! Joint-eigenspace transform `f^△(λ, x) = (f × φ_λ)(x)`.
//!
//! The direct path integrates `f(y) φ_λ(d(x, y))` over the interior nodes.
//! The composed path takes the Poisson transform of `b ↦ f̃(λ, b)`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::helgason::{HelgasonGrid, HelgasonPlan};
use super::{
    bracket_unchecked, check_lambda, check_point, kernel, poisson_exponent, InteriorFunction, InteriorSamples,
};
use crate::error::Result;
use crate::geometry::{
    cosh_distance_minus_one, distance_from_cosh_minus_one, Model, Point, QuadratureGrid, SpectralParam,
};
use crate::specfun::{h3_closed_form_real, SphericalEvaluator, SphericalTable};
use crate::sum::{ComplexSum, NeumaierSum};

fn real_sum<F: Fn(f64) -> f64>(samples: &InteriorSamples, x: &Point, phi: F) -> Complex64 {
    let mut acc = NeumaierSum::new();
    for (y, w) in samples.points.iter().zip(&samples.weights) {
        acc.add(phi(distance_from_cosh_minus_one(cosh_distance_minus_one(x, y))) * w);
    }
    Complex64::new(acc.value(), 0.0)
}

fn direct_sum(samples: &InteriorSamples, table: &SphericalTable, x: &Point) -> Complex64 {
    match table {
        SphericalTable::ClosedReal { lambda, .. } => return real_sum(samples, x, |r| h3_closed_form_real(*lambda, r)),
        SphericalTable::RealChebyshev(t) => return real_sum(samples, x, |r| t.eval(r)),
        _ => {}
    }
    let mut acc = ComplexSum::new();
    for (y, w) in samples.points.iter().zip(&samples.weights) {
        let d = distance_from_cosh_minus_one(cosh_distance_minus_one(x, y));
        acc.add(table.eval(d) * *w);
    }
    acc.value()
}

/// `∫ f(y) φ_λ(d(x, y)) dμ(y)`.
pub fn jeft_direct(f: &dyn InteriorFunction, grid: &QuadratureGrid, lambda: SpectralParam, x: &Point) -> Result<Complex64> {
    check_point(x, grid.model())?;
    check_lambda(lambda)?;
    let samples = InteriorSamples::new(f, grid)?;
    if samples.points.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let ev = SphericalEvaluator::with_defaults(grid.model());
    let table = ev.table(lambda, x.radius() + samples.reach + 1e-9)?;
    Ok(direct_sum(&samples, &table, x))
}

/// `P_λ(f̃(λ, ·))(x)`.
pub fn jeft_composed(
    f: &dyn InteriorFunction,
    grid: &QuadratureGrid,
    lambda: SpectralParam,
    x: &Point,
) -> Result<Complex64> {
    check_point(x, grid.model())?;
    let l = check_lambda(lambda)?;
    let plan = HelgasonPlan::new(f, grid, true)?;
    let rule = grid.boundary();
    let profiles = plan.profiles(rule);
    let exponent = poisson_exponent(l, grid.model().rho());
    let mut acc = ComplexSum::new();
    for ((b, w), p) in rule.points.iter().zip(&rule.weights).zip(&profiles) {
        acc.add(kernel(exponent, bracket_unchecked(x.raw(), b.raw())) * p.value(l) * *w);
    }
    Ok(acc.value())
}

fn poisson_row(helgason: &HelgasonGrid, k: usize, x: &Point) -> Complex64 {
    let exponent = poisson_exponent(helgason.lambdas()[k], helgason.model().rho());
    let rule = helgason.boundary();
    let mut acc = ComplexSum::new();
    for ((b, w), v) in rule.points.iter().zip(&rule.weights).zip(helgason.row(k)) {
        acc.add(kernel(exponent, bracket_unchecked(x.raw(), b.raw())) * *v * *w);
    }
    acc.value()
}

impl HelgasonGrid {
    /// Poisson transform of row `k` at `x`.
    pub fn poisson(&self, k: usize, x: &Point) -> Result<Complex64> {
        check_point(x, self.model())?;
        if k >= self.n_lambda() {
            return Err(crate::error::domain_err!("spectral index {k} out of range"));
        }
        Ok(poisson_row(self, k, x))
    }
}

/// `f^△(λ_k, x_i)`, stored row-major by spectral index.
#[derive(Clone, Debug)]
pub struct JeftGrid {
    model: Model,
    lambdas: Vec<Complex64>,
    points: Vec<Point>,
    values: Vec<Complex64>,
}

impl JeftGrid {
    pub fn direct(
        f: &dyn InteriorFunction,
        grid: &QuadratureGrid,
        lambdas: &[SpectralParam],
        points: &[Point],
    ) -> Result<Self> {
        let model = grid.model();
        for x in points {
            check_point(x, model)?;
        }
        let ls = lambdas.iter().map(|l| check_lambda(*l)).collect::<Result<Vec<_>>>()?;
        let samples = InteriorSamples::new(f, grid)?;
        let np = points.len();
        if samples.points.is_empty() {
            let values = vec![Complex64::new(0.0, 0.0); ls.len() * np];
            return Ok(Self { model, lambdas: ls, points: points.to_vec(), values });
        }
        let r_max = points.iter().fold(0.0f64, |m, x| m.max(x.radius())) + samples.reach + 1e-9;
        let ev = SphericalEvaluator::with_defaults(model);
        let tables = lambdas.par_iter().map(|l| ev.table(*l, r_max)).collect::<Result<Vec<_>>>()?;
        let values = (0..ls.len() * np)
            .into_par_iter()
            .map(|idx| direct_sum(&samples, &tables[idx / np], &points[idx % np]))
            .collect();
        Ok(Self { model, lambdas: ls, points: points.to_vec(), values })
    }

    pub fn composed(
        f: &dyn InteriorFunction,
        grid: &QuadratureGrid,
        lambdas: &[SpectralParam],
        points: &[Point],
    ) -> Result<Self> {
        let helgason = HelgasonGrid::compute(f, grid, lambdas)?;
        Self::poisson_of(&helgason, points)
    }

    /// Row-wise Poisson transform of a Helgason grid.
    pub fn poisson_of(helgason: &HelgasonGrid, points: &[Point]) -> Result<Self> {
        let model = helgason.model();
        for x in points {
            check_point(x, model)?;
        }
        let np = points.len();
        let nl = helgason.n_lambda();
        let values = (0..nl * np)
            .into_par_iter()
            .map(|idx| poisson_row(helgason, idx / np, &points[idx % np]))
            .collect();
        Ok(Self { model, lambdas: helgason.lambdas().to_vec(), points: points.to_vec(), values })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize) -> Complex64 {
        self.values[k * self.points.len() + i]
    }
}
