//! Plancherel inversion
//! `f(x) = ∫₀^Λ ∫_B f̃(λ, b) e^{(iλ+ρ)⟨x,b⟩} |c(λ)|⁻² db dλ`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::helgason::{uniform_real, HelgasonGrid};
use super::{bracket_unchecked, check_point};
use crate::error::Result;
use crate::geometry::Point;
use crate::specfun::plancherel_density;
use crate::sum::ComplexSum;

const TAIL_WARNING: f64 = 1e-8;

pub fn inverse_helgason(ft: &HelgasonGrid, x: &Point) -> Result<Complex64> {
    Ok(inverse_helgason_many(ft, std::slice::from_ref(x))?[0])
}

pub fn inverse_helgason_many(ft: &HelgasonGrid, points: &[Point]) -> Result<Vec<Complex64>> {
    let model = ft.model();
    inverse_helgason_with(ft, points, |l| plancherel_density(l.abs(), model).unwrap_or(0.0))
}

/// Inversion with an arbitrary spectral density in place of `|c(λ)|⁻²`.
pub fn inverse_helgason_with<D: Fn(f64) -> f64>(ft: &HelgasonGrid, points: &[Point], density: D) -> Result<Vec<Complex64>> {
    let model = ft.model();
    for x in points {
        check_point(x, model)?;
    }
    let weights = ft.real_spectral_weights()?;
    let tail = ft.tail_ratio();
    if tail > TAIL_WARNING {
        log::warn!(
            "Helgason transform at the spectral cutoff is {tail:.2e} of its peak; the inversion is truncated"
        );
    }
    let rho = model.rho();
    let nl = ft.n_lambda();
    let nb = ft.n_boundary();
    let rule = ft.boundary();
    // g[j][k] = w_b w_k |c(λ_k)|⁻² f̃(λ_k, b_j), contiguous in k.
    let mut g = vec![Complex64::new(0.0, 0.0); nl * nb];
    for k in 0..nl {
        let scale = weights[k] * density(ft.lambdas()[k].re);
        for j in 0..nb {
            g[j * nl + k] = ft.get(k, j) * (scale * rule.weights[j]);
        }
    }
    let lambdas: Vec<f64> = ft.lambdas().iter().map(|l| l.re).collect();
    let uniform = uniform_real(ft.lambdas());
    Ok(points
        .par_iter()
        .map(|x| {
            let mut acc = ComplexSum::new();
            for (j, b) in rule.points.iter().enumerate() {
                let s = bracket_unchecked(x.raw(), b.raw());
                let row = &g[j * nl..(j + 1) * nl];
                let mut inner = Complex64::new(0.0, 0.0);
                match uniform {
                    Some((l0, dl)) => {
                        let mut cur = Complex64::from_polar(1.0, l0 * s);
                        let step = Complex64::from_polar(1.0, dl * s);
                        for v in row {
                            inner += v * cur;
                            cur *= step;
                        }
                    }
                    None => {
                        for (v, l) in row.iter().zip(&lambdas) {
                            inner += v * Complex64::from_polar(1.0, l * s);
                        }
                    }
                }
                acc.add(inner * (rho * s).exp());
            }
            acc.value()
        })
        .collect())
}
