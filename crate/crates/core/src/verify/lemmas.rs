//! Pointwise identities: the JEFT factorization, the radial restriction,
//! the kernel factorization and the convolution factorization.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::RngExt;
use rayon::prelude::*;

use super::{probe_directions, random_points, rel_err, Condition, VerificationReport, VerifyConfig};
use crate::error::Result;
use crate::geometry::{
    bracket_unchecked, cosh_distance_minus_one, distance_from_cosh_minus_one, GridSizes, Model, Point, QuadratureGrid,
    SpectralParam,
};
use crate::specfun::{h3_closed_form_real, plancherel_density, SphericalEvaluator};
use crate::testfns::{bump, suite, BumpSpec, TestFunction};
use crate::transforms::{
    poisson_exponent, spherical_transform, Convolution, HelgasonGrid, HelgasonPlan, InteriorFunction, JeftGrid,
};

fn with_zero(config: &VerifyConfig) -> Result<Vec<TestFunction>> {
    let mut fs = suite(&config.params()?)?;
    fs.push(TestFunction::zero(config.model.dim()));
    Ok(fs)
}

fn max_rel(got: &[Complex64], want: &[Complex64]) -> f64 {
    got.iter().zip(want).fold(0.0, |m, (g, w)| m.max(rel_err(*g, *w)))
}

/// Direct against composed JEFT on the probe (λ, x) grid for every suite
/// member. The control inserts the Plancherel density into the composed path.
pub fn verify_lemma2(config: &VerifyConfig) -> Result<VerificationReport> {
    let grid = config.grid()?;
    let lambdas: Vec<SpectralParam> = config.probe_lambda_list().into_iter().map(SpectralParam::real).collect();
    let points = random_points(&mut config.rng(2), config.model, config.probe_points, config.probe_point_radius);
    let mut per_fn = BTreeMap::new();
    let mut worst = 0.0f64;
    let mut control = f64::NAN;
    for f in with_zero(config)? {
        let direct = JeftGrid::direct(&f, &grid, &lambdas, &points)?;
        let helgason = HelgasonGrid::compute(&f, &grid, &lambdas)?;
        let composed = JeftGrid::poisson_of(&helgason, &points)?;
        let err = max_rel(composed.values(), direct.values());
        log::info!("lemma2 {}: {err:.3e}", f.name());
        if control.is_nan() {
            let model = config.model;
            let corrupted = helgason.scale_rows(|l| Complex64::new(plancherel_density(l.re, model).unwrap_or(0.0), 0.0));
            control = max_rel(JeftGrid::poisson_of(&corrupted, &points)?.values(), direct.values());
        }
        per_fn.insert(f.name().to_string(), err);
        worst = worst.max(err);
    }
    Ok(VerificationReport::new("lemma2", worst, config.tol_lemma2)
        .with_condition(Condition::at_least("density-inserted control", control, config.tol_lemma2))
        .with_meta("errors", per_fn)
        .with_meta("lambdas", config.probe_lambda_list())
        .with_meta("points", points.len())
        .with_meta("point_radius", config.probe_point_radius))
}

/// Per-direction transforms of `f` at the probe λ values, one row per direction.
fn per_direction(
    f: &dyn InteriorFunction,
    grid: &QuadratureGrid,
    lambdas: &[f64],
    dirs: &[crate::geometry::BoundaryPoint],
    reuse_radial: bool,
) -> Result<Vec<Vec<Complex64>>> {
    let plan = HelgasonPlan::new(f, grid, reuse_radial)?;
    Ok(dirs
        .par_iter()
        .map(|b| {
            let p = plan.profile(b);
            lambdas.iter().map(|l| p.value(Complex64::new(*l, 0.0))).collect()
        })
        .collect())
}

fn direction_spread(rows: &[Vec<Complex64>]) -> f64 {
    rows[1..].iter().fold(0.0, |m, row| m.max(max_rel(row, &rows[0])))
}

/// Radial members: `f̃(λ, b)` does not depend on `b`, equals `f̂(λ)`, and
/// `f^△(λ, o) = f̂(λ)`. The control checks that an off-center member does
/// depend on `b`.
pub fn verify_lemma1(config: &VerifyConfig) -> Result<VerificationReport> {
    let grid = config.grid()?;
    let lambdas = config.probe_lambda_list();
    let dirs = probe_directions(config.model, config.probe_directions);
    let origin = [Point::origin(config.model.dim())];
    let params: Vec<SpectralParam> = lambdas.iter().map(|l| SpectralParam::real(*l)).collect();
    let mut per_fn = BTreeMap::new();
    let mut worst = 0.0f64;
    let mut control = f64::NAN;
    for f in with_zero(config)? {
        if !f.is_radial() {
            if control.is_nan() {
                control = direction_spread(&per_direction(&f, &grid, &lambdas, &dirs, false)?);
            }
            continue;
        }
        let hat = params.iter().map(|l| spherical_transform(&f, &grid, *l)).collect::<Result<Vec<_>>>()?;
        let rows = per_direction(&f, &grid, &lambdas, &dirs, false)?;
        let restriction = rows.iter().fold(0.0f64, |m, row| m.max(max_rel(row, &hat)));
        let at_origin = max_rel(JeftGrid::direct(&f, &grid, &params, &origin)?.values(), &hat);
        let err = restriction.max(at_origin);
        log::info!("lemma1 {}: restriction {restriction:.3e}, origin {at_origin:.3e}", f.name());
        per_fn.insert(f.name().to_string(), [restriction, at_origin]);
        worst = worst.max(err);
    }
    Ok(VerificationReport::new("lemma1", worst, config.tol_lemma1)
        .with_condition(Condition::at_least("off-center direction spread", control, config.tol_lemma1))
        .with_meta("errors_restriction_origin", per_fn)
        .with_meta("lambdas", lambdas)
        .with_meta("directions", dirs.len()))
}

/// `∫_B e^{(iλ+ρ)⟨x,b⟩} e^{(−iλ+ρ)⟨y,b⟩} db` against `φ_λ(d(x, y))` on
/// random triples; the first triple is `x = y = o`.
pub fn verify_kernel_factorization(config: &VerifyConfig) -> Result<VerificationReport> {
    let grid = config.grid()?;
    let model = config.model;
    let rho = model.rho();
    let mut rng = config.rng(3);
    let mut triples = Vec::with_capacity(config.kernel_triples);
    for k in 0..config.kernel_triples {
        let (x, y) = if k == 0 {
            (Point::origin(model.dim()), Point::origin(model.dim()))
        } else {
            let p = random_points(&mut rng, model, 2, config.probe_point_radius);
            (p[0], p[1])
        };
        let l = rng.random_range(config.probe_lambda_min..config.probe_lambda_max);
        triples.push((x, y, l));
    }
    let ev = SphericalEvaluator::with_defaults(model);
    let rule = grid.boundary();
    let errors: Vec<f64> = triples
        .par_iter()
        .map(|(x, y, l)| {
            let ex = poisson_exponent(Complex64::new(*l, 0.0), rho);
            let ey = ex.conj();
            let mut acc = crate::sum::ComplexSum::new();
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let s = ex * bracket_unchecked(x.raw(), b.raw()) + ey * bracket_unchecked(y.raw(), b.raw());
                acc.add(s.exp() * *w);
            }
            let r = distance_from_cosh_minus_one(cosh_distance_minus_one(x, y));
            let want = match model {
                Model::H3 => Complex64::new(h3_closed_form_real(*l, r), 0.0),
                Model::H2 => ev.eval_unchecked(Complex64::new(*l, 0.0), r),
            };
            rel_err(acc.value(), want)
        })
        .collect();
    let worst = errors.iter().fold(0.0f64, |m, e| m.max(*e));
    Ok(VerificationReport::new("kernel", worst, config.tol_kernel)
        .with_meta("triples", triples.len())
        .with_meta("origin_error", errors.first().copied().unwrap_or(0.0))
        .with_meta(
            "reference",
            match model {
                Model::H2 => "adaptive boundary integral",
                Model::H3 => "closed form sin(λr)/(λ sinh r)",
            },
        ))
}

/// Grid for transforms of `f × g`: coarse interior and horocyclic rules,
/// since every node of `f × g` is itself an integral.
fn convolution_grid(config: &VerifyConfig) -> Result<QuadratureGrid> {
    let sizes = GridSizes {
        radial: config.convolution_radial,
        angular: config.convolution_angular,
        horo: config.convolution_horo,
        ..config.sizes
    };
    QuadratureGrid::build(config.params()?, sizes)
}

/// `(f × g)~(λ, b) = f̃(λ, b) ĝ(λ)` for every suite member `f` and a radial
/// bump `g`.
pub fn verify_convolution(config: &VerifyConfig) -> Result<VerificationReport> {
    let grid = config.grid()?;
    let cgrid = convolution_grid(config)?;
    let params = config.params()?;
    let lambdas = config.probe_lambda_list();
    let dirs = probe_directions(config.model, config.probe_directions);
    let g = bump(BumpSpec::centered(config.model.dim(), config.convolver_support, 1.0), &params)?;
    let g_hat = lambdas
        .iter()
        .map(|l| spherical_transform(&g, &grid, SpectralParam::real(*l)))
        .collect::<Result<Vec<_>>>()?;
    let mut per_fn = BTreeMap::new();
    let mut worst = 0.0f64;
    for f in with_zero(config)? {
        if f.support_radius() + config.convolver_support > config.radius {
            log::warn!("skipping {}: f × g would leave the truncation ball", f.name());
            continue;
        }
        let conv = Convolution::new(&f, &g, &cgrid)?;
        let lhs = per_direction(&conv, &cgrid, &lambdas, &dirs, true)?;
        let ft = per_direction(&f, &grid, &lambdas, &dirs, true)?;
        let mut err = 0.0f64;
        for (l_row, f_row) in lhs.iter().zip(&ft) {
            for ((a, fv), gh) in l_row.iter().zip(f_row).zip(&g_hat) {
                err = err.max(rel_err(*a, fv * gh));
            }
        }
        log::info!("convolution {}: {err:.3e}", f.name());
        per_fn.insert(f.name().to_string(), err);
        worst = worst.max(err);
    }
    Ok(VerificationReport::new("convolution", worst, config.tol_convolution)
        .with_meta("errors", per_fn)
        .with_meta("convolver_support", config.convolver_support)
        .with_meta("lambdas", lambdas)
        .with_meta("directions", dirs.len()))
}
