//! Spectral-side checks: the Plancherel isometry with its inversion, and
//! exponential type against support radius.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{probe_directions, Condition, VerificationReport, VerifyConfig};
use crate::error::{Error, Result};
use crate::geometry::{GridSizes, ModelParams, QuadratureGrid, SpectralParam};
use crate::sum::NeumaierSum;
use crate::testfns::{suite, TestFunction};
use crate::transforms::{inverse_helgason_many, HelgasonGrid, HelgasonPlan, InteriorFunction};

fn plancherel_grid(config: &VerifyConfig) -> Result<QuadratureGrid> {
    let params = ModelParams::new(config.model, config.radius, config.plancherel_lambda_max)?;
    let mut sizes = GridSizes {
        radial: config.plancherel_norm_radial,
        boundary: config.plancherel_boundary,
        angular: config.plancherel_boundary,
        spectral: config.plancherel_lambdas,
        ..config.sizes
    };
    sizes.horo.slices = config.plancherel_slices;
    QuadratureGrid::build(params, sizes)
}

fn sample_grid(config: &VerifyConfig) -> Result<QuadratureGrid> {
    let sizes = GridSizes {
        radial: config.plancherel_sample_radial,
        angular: config.plancherel_sample_angular,
        ..config.sizes
    };
    QuadratureGrid::build(config.params()?, sizes)
}

#[derive(Serialize)]
struct PlancherelRow {
    parseval_ratio: f64,
    round_trip: f64,
    constant_density_ratio: f64,
}

fn plancherel_one(f: &TestFunction, pgrid: &QuadratureGrid, sgrid: &QuadratureGrid) -> Result<PlancherelRow> {
    let reach = f.support_radius();
    let dense = pgrid.interior(reach)?;
    let mut norm = NeumaierSum::new();
    for (p, w) in dense.points.iter().zip(&dense.weights) {
        let v = f.eval(p);
        norm.add(w * v * v);
    }
    let norm = norm.value();
    let ft = HelgasonGrid::compute_spectral(f, pgrid)?;
    let parseval_ratio = ft.plancherel_norm_sq()? / norm;
    let constant_density_ratio = ft.weighted_norm_sq(|_| 1.0)? / norm;

    let sample = sgrid.interior(reach)?;
    let inv = inverse_helgason_many(&ft, &sample.points)?;
    let mut num = NeumaierSum::new();
    let mut den = NeumaierSum::new();
    for ((p, w), u) in sample.points.iter().zip(&sample.weights).zip(&inv) {
        let v = f.eval(p);
        num.add(w * (u - v).norm_sqr());
        den.add(w * v * v);
    }
    let round_trip = (num.value() / den.value()).sqrt();
    Ok(PlancherelRow { parseval_ratio, round_trip, constant_density_ratio })
}

/// Parseval ratio and L² round trip for every suite member on a dedicated
/// wide spectral grid. The control replaces `|c(λ)|⁻²` by one.
pub fn verify_plancherel(config: &VerifyConfig) -> Result<VerificationReport> {
    let pgrid = plancherel_grid(config)?;
    let sgrid = sample_grid(config)?;
    let mut rows = BTreeMap::new();
    let mut worst = 0.0f64;
    let mut control = f64::INFINITY;
    for f in suite(&config.params()?)? {
        let row = plancherel_one(&f, &pgrid, &sgrid)?;
        log::info!(
            "plancherel {}: ratio {:.6}, round trip {:.3e}, constant density {:.3}",
            f.name(),
            row.parseval_ratio,
            row.round_trip,
            row.constant_density_ratio
        );
        worst = worst.max((row.parseval_ratio - 1.0).abs()).max(row.round_trip);
        control = control.min((row.constant_density_ratio - 1.0).abs());
        rows.insert(f.name().to_string(), row);
    }
    Ok(VerificationReport::new("plancherel", worst, config.tol_plancherel)
        .with_condition(Condition::at_least("constant-density Parseval defect", control, 0.1))
        .with_meta("functions", rows)
        .with_meta("lambda_max", config.plancherel_lambda_max)
        .with_meta("lambdas", config.plancherel_lambdas)
        .with_meta("boundary", config.plancherel_boundary.to_string()))
}

/// Least-squares fit of `m(η) = a|η| − c√|η| + d log(1 + |η|) + e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnvelopeFit {
    /// Exponential type, the coefficient of `|η|`.
    pub slope: f64,
    pub sqrt_coef: f64,
    pub log_coef: f64,
    pub offset: f64,
    pub rms_residual: f64,
}

pub fn envelope_fit(etas: &[f64], m: &[f64]) -> Result<EnvelopeFit> {
    if etas.len() != m.len() || etas.len() < 5 {
        return Err(Error::Domain("envelope fit needs at least five matching samples".into()));
    }
    let cols: Vec<Vec<f64>> = vec![
        etas.iter().map(|e| e.abs()).collect(),
        etas.iter().map(|e| -e.abs().sqrt()).collect(),
        etas.iter().map(|e| e.abs().ln_1p()).collect(),
        vec![1.0; etas.len()],
    ];
    let x = least_squares(&cols, m)?;
    let rms = (m
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let fit: f64 = cols.iter().zip(&x).map(|(c, k)| c[i] * k).sum();
            (v - fit).powi(2)
        })
        .sum::<f64>()
        / m.len() as f64)
        .sqrt();
    Ok(EnvelopeFit { slope: x[0], sqrt_coef: x[1], log_coef: x[2], offset: x[3], rms_residual: rms })
}

/// Ordinary least squares by modified Gram–Schmidt on the columns.
fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let n = cols.len();
    let mut q: Vec<Vec<f64>> = cols.to_vec();
    let mut r = vec![vec![0.0; n]; n];
    for j in 0..n {
        for i in 0..j {
            let d: f64 = q[i].iter().zip(&q[j]).map(|(a, b)| a * b).sum();
            r[i][j] = d;
            let qi = q[i].clone();
            for (v, a) in q[j].iter_mut().zip(&qi) {
                *v -= d * a;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-12) {
            return Err(Error::Domain("least-squares columns are dependent".into()));
        }
        r[j][j] = norm;
        for v in &mut q[j] {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = q.iter().map(|c| c.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let s: f64 = (j + 1..n).map(|k| r[j][k] * x[k]).sum();
        x[j] = (qty[j] - s) / r[j][j];
    }
    Ok(x)
}

fn line_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

const SIGMAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
const PW_DIRECTIONS: usize = 4;
const QUADRATURE_WARNING: f64 = 1e-8;

/// `m(η) = log max_{σ, b} |f̃(σ + iη, b)|` for each `η`.
pub fn growth_profile(f: &dyn InteriorFunction, grid: &QuadratureGrid, etas: &[f64]) -> Result<Vec<f64>> {
    let plan = HelgasonPlan::new(f, grid, true)?;
    let dirs = probe_directions(grid.model(), PW_DIRECTIONS);
    let profiles: Vec<_> = dirs.par_iter().map(|b| plan.profile(b)).collect();
    Ok(etas
        .iter()
        .map(|eta| {
            let mut peak = 0.0f64;
            for p in &profiles {
                for s in SIGMAS {
                    peak = peak.max(p.value(Complex64::new(s, *eta)).norm());
                }
            }
            peak.ln()
        })
        .collect())
}

#[derive(Serialize)]
struct GrowthRow {
    support: f64,
    fit: EnvelopeFit,
    naive_slope: f64,
    unit_window_slope: f64,
    quadrature_defect: f64,
}

/// Fitted exponential type of the radial suite bumps against their support
/// radii, their ordering, and an injectivity proxy between two members.
pub fn verify_paley_wiener(config: &VerifyConfig) -> Result<VerificationReport> {
    let params = config.params()?;
    let mut sizes = config.sizes;
    sizes.horo.slices = config.pw_slices;
    let grid = QuadratureGrid::build(params, sizes)?;
    let mut fine_sizes = sizes;
    fine_sizes.horo.slices *= 2;
    let fine = QuadratureGrid::build(params, fine_sizes)?;
    let etas = linspace(config.pw_eta_min, config.pw_eta_max, config.pw_etas);
    let unit_window = linspace(-2.0, 2.0, 9);
    let members = suite(&params)?;
    let mut rows = BTreeMap::new();
    let mut worst = 0.0f64;
    let mut slopes = Vec::new();
    for f in members.iter().filter(|f| f.is_radial()) {
        let support = f.support_radius();
        let m = growth_profile(f, &grid, &etas)?;
        let fit = envelope_fit(&etas, &m)?;
        let naive_slope = line_slope(&etas, &m);
        let mu = growth_profile(f, &grid, &unit_window)?;
        let abs_window: Vec<f64> = unit_window.iter().map(|e| e.abs()).collect();
        let unit_window_slope = line_slope(&abs_window, &mu);
        let last = &etas[etas.len() - 1..];
        let coarse = growth_profile(f, &grid, last)?[0];
        let refined = growth_profile(f, &fine, last)?[0];
        let quadrature_defect = (coarse - refined).exp_m1().abs();
        if quadrature_defect > QUADRATURE_WARNING {
            log::warn!(
                "{}: quadrature defect {quadrature_defect:.2e} at η = {} exceeds {QUADRATURE_WARNING:e}",
                f.name(),
                last[0]
            );
        }
        let err = (fit.slope - support).abs() / support;
        log::info!("paley_wiener {}: type {:.4} for support {support}, naive slope {naive_slope:.4}", f.name(), fit.slope);
        worst = worst.max(err);
        slopes.push(fit.slope);
        rows.insert(
            f.name().to_string(),
            GrowthRow { support, fit, naive_slope, unit_window_slope, quadrature_defect },
        );
    }
    let ordering = if slopes.len() >= 2 { slopes[0] - slopes[1] } else { f64::NAN };
    let lambdas: Vec<SpectralParam> = config.probe_lambda_list().into_iter().map(SpectralParam::real).collect();
    let main = config.grid()?;
    let a = HelgasonGrid::compute(&members[0], &main, &lambdas)?;
    let b = HelgasonGrid::compute(&members[2], &main, &lambdas)?;
    let separation = a.values().iter().zip(b.values()).fold(0.0f64, |m, (u, v)| m.max((u - v).norm()));
    Ok(VerificationReport::new("paley_wiener", worst, config.tol_paley_wiener)
        .with_condition(Condition::at_least("type ordering (half minus quarter)", ordering, 0.0))
        .with_condition(Condition::at_least(
            &format!("injectivity proxy ({} vs {})", members[0].name(), members[2].name()),
            separation,
            1e-6,
        ))
        .with_meta("functions", rows)
        .with_meta("etas", etas)
        .with_meta("sigmas", SIGMAS)
        .with_meta("slices", config.pw_slices))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_coefficients() {
        let etas = linspace(5.0, 60.0, 12);
        let m: Vec<f64> = etas.iter().map(|e| 1.7 * e - 2.0 * e.sqrt() + 0.5 * e.ln_1p() - 3.0).collect();
        let fit = envelope_fit(&etas, &m).unwrap();
        assert!((fit.slope - 1.7).abs() < 1e-9);
        assert!((fit.sqrt_coef - 2.0).abs() < 1e-8);
        assert!((fit.offset + 3.0).abs() < 1e-7);
        assert!(fit.rms_residual < 1e-10);
    }

    #[test]
    fn line_slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((line_slope(&xs, &ys) - 3.0).abs() < 1e-14);
    }
}
