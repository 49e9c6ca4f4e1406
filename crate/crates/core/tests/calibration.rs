use jeft::geometry::{GridSizes, SpectralParam};
use jeft::specfun::{density_unnormalized, plancherel_kappa};
use jeft::sum::NeumaierSum;
use jeft::testfns::{bump, BumpSpec};
use jeft::transforms::{inverse_helgason_with, spherical_transform, Convolution, HelgasonGrid, InteriorFunction};
use jeft::verify::{run_one, Check, VerifyConfig};
use jeft::{Model, ModelParams, Point, QuadratureGrid};

fn norm_sq(f: &dyn InteriorFunction, grid: &QuadratureGrid) -> f64 {
    let rule = grid.interior(f.support_radius()).unwrap();
    let mut acc = NeumaierSum::new();
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let v = f.eval(p);
        acc.add(w * v * v);
    }
    acc.value()
}

/// `κ` measured on a wide spectral grid, once from Parseval and once from the
/// round trip at the origin, against the hard-coded constant.
#[test]
fn measured_kappa_matches_the_constant() {
    for (model, expected) in [(Model::H2, 0.5 / std::f64::consts::PI), (Model::H3, 0.5 / std::f64::consts::PI.powi(2))] {
        assert!((plancherel_kappa(model) - expected).abs() < 1e-15);
        let mut sizes = GridSizes::defaults(model);
        // Step 1/8: the H² density has poles at ±i/2, which caps the
        // trapezoid rule near e^{-π/h}.
        sizes.spectral = 1025;
        sizes.radial = 160;
        sizes.horo.slices = 320;
        let grid = QuadratureGrid::build(ModelParams::new(model, 4.0, 128.0).unwrap(), sizes).unwrap();
        let f = bump(BumpSpec::centered(model.dim(), 3.5, 1.0), grid.params()).unwrap();
        let ft = HelgasonGrid::compute_spectral(&f, &grid).unwrap();
        let raw = ft.weighted_norm_sq(|l| density_unnormalized(l, model)).unwrap();
        let kappa = norm_sq(&f, &grid) / raw;
        assert!((kappa / expected - 1.0).abs() < 1e-4, "{model}: measured {kappa}, expected {expected}");

        // Round trip at the origin: f(o) = κ ∫ f̂(λ) λ tanh(πλ) dλ (or λ²).
        let o = Point::origin(model.dim());
        let raw = inverse_helgason_with(&ft, &[o], |l| density_unnormalized(l, model)).unwrap()[0];
        let kappa = f.eval(&o) / raw.re;
        assert!(raw.im.abs() < 1e-9 * raw.re.abs(), "{raw}");
        assert!((kappa / expected - 1.0).abs() < 1e-6, "{model}: round-trip {kappa}, expected {expected}");
    }
}

#[test]
fn finer_grids_give_smaller_errors() {
    for (model, check) in [(Model::H3, Check::Kernel), (Model::H3, Check::Lemma1), (Model::H2, Check::Convolution)] {
        let coarse = run_one(&VerifyConfig::reduced(model), check).unwrap().max_rel_error;
        let fine = run_one(&VerifyConfig::defaults(model), check).unwrap().max_rel_error;
        assert!(fine < coarse, "{model} {}: default {fine:e} vs reduced {coarse:e}", check.name());
    }
}

/// A narrow bump normalized to unit mass has `ĝ(λ) ≈ 1` at low frequency,
/// and `f × g ≈ f`.
#[test]
fn mollifier_is_close_to_identity() {
    let model = Model::H2;
    let grid = QuadratureGrid::with_defaults(ModelParams::new(model, 2.0, 8.0).unwrap()).unwrap();
    let s = 0.1;
    let unit = bump(BumpSpec::centered(2, s, 1.0), grid.params()).unwrap();
    let mass = spherical_transform(&unit, &grid, SpectralParam::complex(0.0, -0.5)).unwrap().re;
    assert!(mass > 0.0);
    let g = bump(BumpSpec::centered(2, s, 1.0 / mass), grid.params()).unwrap();
    for l in [0.0, 0.5, 1.0] {
        let gh = spherical_transform(&g, &grid, SpectralParam::real(l)).unwrap();
        assert!((gh.re - 1.0).abs() < 0.01 && gh.im.abs() < 1e-12, "λ = {l}: {gh}");
    }
    let f = bump(BumpSpec::centered(2, 1.0, 1.0), grid.params()).unwrap();
    let conv = Convolution::new(&f, &g, &grid).unwrap();
    for x in [Point::origin(2), Point::new(&[0.2, 0.1]).unwrap()] {
        let (a, b) = (conv.eval(&x), f.eval(&x));
        assert!((a - b).abs() < 0.01 * b.abs(), "{a} vs {b}");
    }
}

/// Log-log slopes of the tail envelope `T(λ) = max_{λ' ≥ λ, b} |f̃(λ', b)|`
/// over the octaves of `[1.5, 48]`: the last octave decays faster than every
/// earlier rate, so no fixed polynomial rate holds.
#[test]
fn suite_transforms_decay_superpolynomially() {
    use jeft::testfns::suite;
    for model in [Model::H2, Model::H3] {
        let mut sizes = GridSizes::defaults(model);
        sizes.boundary = match model {
            Model::H2 => jeft::geometry::SphereSize::Circle(32),
            Model::H3 => jeft::geometry::SphereSize::Sphere { polar: 6, azimuth: 12 },
        };
        // Resolves e^{-iλs} across the support up to λ = 48.
        sizes.horo.slices = 160;
        let grid = QuadratureGrid::build(ModelParams::new(model, 4.0, 48.0).unwrap(), sizes).unwrap();
        let step = 1.0 / 32.0;
        let lambdas: Vec<SpectralParam> = (0..=1488).map(|k| SpectralParam::real(1.5 + step * k as f64)).collect();
        for f in suite(grid.params()).unwrap() {
            let ft = HelgasonGrid::compute(&f, &grid, &lambdas).unwrap();
            let mut tail: Vec<f64> = (0..lambdas.len()).map(|k| ft.row(k).iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();
            for k in (0..tail.len() - 1).rev() {
                tail[k] = tail[k].max(tail[k + 1]);
            }
            let at = |l: f64| tail[((l - 1.5) / step).round() as usize];
            let slopes: Vec<f64> = [1.5, 3.0, 6.0, 12.0, 24.0].iter().map(|l| (at(2.0 * l) / at(*l)).log2()).collect();
            let earlier = slopes[..4].iter().copied().fold(f64::INFINITY, f64::min);
            assert!(slopes[4] < earlier && slopes[4] < -4.0, "{model} {}: slopes {slopes:?}", f.name());
        }
    }
}
