//! Joint-eigenfunction property of JEFT and Poisson fields.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{random_points, Condition, VerificationReport, VerifyConfig};
use crate::error::Result;
use crate::geometry::{BoundaryPoint, Model, Point, QuadratureGrid, SpectralParam};
use crate::operators::{eigen_residual, ScalarField};
use crate::testfns::{bump, suite, BumpSpec};
use crate::transforms::{poisson_transform, HelgasonGrid};

const COARSE_STEP: f64 = 1e-3;
const FINE_STEP: f64 = 5e-4;

struct Field<'a> {
    name: String,
    lambda: f64,
    rule: Box<dyn Fn(&Point) -> Complex64 + Sync + 'a>,
}

fn residual(model: Model, field: &Field, step: f64, sample: &[Point]) -> Result<f64> {
    let u = ScalarField::new(model, step, |x| (field.rule)(x))?;
    eigen_residual(&u, SpectralParam::real(field.lambda), sample)
}

/// Eigen-residual of the JEFT field of every suite member and of Poisson
/// fields, with the convergence ratio under `h → h/2`. The control is an
/// `x`-extension of `f̃(λ, b₀)` by a bump.
pub fn verify_eigenproperty(config: &VerifyConfig) -> Result<VerificationReport> {
    let grid = config.grid()?;
    let model = config.model;
    let params = config.params()?;
    let sample = random_points(&mut config.rng(5), model, config.eigen_points, config.probe_point_radius);
    let lambdas: Vec<SpectralParam> = config.eigen_lambdas.iter().map(|l| SpectralParam::real(*l)).collect();
    let members = suite(&params)?;
    let transforms = members
        .iter()
        .map(|f| HelgasonGrid::compute(f, &grid, &lambdas))
        .collect::<Result<Vec<_>>>()?;

    let mut fields: Vec<Field> = Vec::new();
    for (f, ft) in members.iter().zip(&transforms) {
        for (k, l) in config.eigen_lambdas.iter().enumerate() {
            fields.push(Field {
                name: format!("jeft {} λ={l}", f.name()),
                lambda: *l,
                rule: Box::new(move |x| ft.poisson(k, x).expect("sample inside the ball")),
            });
        }
    }
    let grid_ref: &QuadratureGrid = &grid;
    for l in &config.eigen_lambdas {
        let l = *l;
        fields.push(Field {
            name: format!("poisson 1 λ={l}"),
            lambda: l,
            rule: Box::new(move |x| {
                poisson_transform(&|_: &BoundaryPoint| Complex64::new(1.0, 0.0), grid_ref, SpectralParam::real(l), x)
                    .expect("sample inside the ball")
            }),
        });
        fields.push(Field {
            name: format!("poisson exp(b₁) λ={l}"),
            lambda: l,
            rule: Box::new(move |x| {
                poisson_transform(
                    &|b: &BoundaryPoint| Complex64::new(b.coords()[0].exp(), 0.0),
                    grid_ref,
                    SpectralParam::real(l),
                    x,
                )
                .expect("sample inside the ball")
            }),
        });
    }

    let mut per_field = BTreeMap::new();
    let mut worst = 0.0f64;
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = 0.0f64;
    for field in &fields {
        let res = residual(model, field, config.eigen_step, &sample)?;
        let ratio = residual(model, field, COARSE_STEP, &sample)? / residual(model, field, FINE_STEP, &sample)?;
        log::info!("eigen {}: residual {res:.3e}, ratio {ratio:.3}", field.name);
        worst = worst.max(res);
        ratio_lo = ratio_lo.min(ratio);
        ratio_hi = ratio_hi.max(ratio);
        per_field.insert(field.name.clone(), [res, ratio]);
    }

    // f̃(λ, b₀) does not depend on x; spreading it with a bump gives a field
    // that satisfies no eigen-equation.
    let l0 = config.eigen_lambdas[0];
    let ft0 = transforms[0].get(0, 0);
    let phase = if ft0.norm() > 0.0 { ft0 / ft0.norm() } else { Complex64::new(1.0, 0.0) };
    let spread = bump(BumpSpec::centered(model.dim(), 1.0, std::f64::consts::E), &params)?;
    let control_field = Field {
        name: "control".into(),
        lambda: l0,
        rule: Box::new(move |x| phase * crate::transforms::InteriorFunction::eval(&spread, x)),
    };
    let control = residual(model, &control_field, config.eigen_step, &sample)?;

    Ok(VerificationReport::new("eigen", worst, config.tol_eigen)
        .with_condition(Condition::between("min convergence ratio", ratio_lo, Some(3.5), Some(4.5)))
        .with_condition(Condition::between("max convergence ratio", ratio_hi, Some(3.5), Some(4.5)))
        .with_condition(Condition::at_least("bump-extension control", control, 0.1))
        .with_meta("fields", per_field)
        .with_meta("step", config.eigen_step)
        .with_meta("ratio_steps", [COARSE_STEP, FINE_STEP])
        .with_meta("points", sample.len()))
}
