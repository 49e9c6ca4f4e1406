//! Unit-ball realization of the real hyperbolic plane and 3-space.
//!
//! Curvature is fixed at −1 with length element `2|dx| / (1 − |x|²)`. The
//! origin is the base point, the unit sphere is the boundary at infinity and
//! the boundary measure is normalized to total mass one.

mod grid;
mod horo;
pub mod quadrature;

pub use grid::{GridSizes, InteriorRule, QuadratureGrid, SpectralRule, SphereRule, SphereSize};
pub use horo::{HoroRule, HoroSizes, HoroSlice};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{domain_err, Result};

/// Tolerance on `|b| − 1` accepted by [`BoundaryPoint::new`].
pub const BOUNDARY_NORM_TOL: f64 = 1e-12;

/// Which rank-one space the ball lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    H2,
    H3,
}

impl Model {
    pub fn dim(self) -> usize {
        match self {
            Model::H2 => 2,
            Model::H3 => 3,
        }
    }

    /// Half-sum of positive roots, `(n − 1) / 2`.
    pub fn rho(self) -> f64 {
        match self {
            Model::H2 => 0.5,
            Model::H3 => 1.0,
        }
    }

    /// Unnormalized area of the unit sphere `S^{n−1}`.
    pub fn sphere_area(self) -> f64 {
        match self {
            Model::H2 => 2.0 * std::f64::consts::PI,
            Model::H3 => 4.0 * std::f64::consts::PI,
        }
    }

    /// `sinh^{n−1}(r)`, the radial part of the volume element.
    #[inline]
    pub fn radial_volume(self, r: f64) -> f64 {
        match self {
            Model::H2 => r.sinh(),
            Model::H3 => {
                let s = r.sinh();
                s * s
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h2" => Ok(Model::H2),
            "h3" => Ok(Model::H3),
            other => Err(crate::Error::Config(format!("unknown model '{other}' (expected h2 or h3)"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::H2 => f.write_str("h2"),
            Model::H3 => f.write_str("h3"),
        }
    }
}

/// Model choice plus the truncation radii shared by every quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    model: Model,
    support_radius: f64,
    spectral_cutoff: f64,
}

impl ModelParams {
    pub const DEFAULT_SUPPORT_RADIUS: f64 = 4.0;
    pub const DEFAULT_SPECTRAL_CUTOFF: f64 = 12.0;

    pub fn new(model: Model, support_radius: f64, spectral_cutoff: f64) -> Result<Self> {
        if !(support_radius.is_finite() && support_radius > 0.0) {
            return Err(domain_err!("support radius must be finite and positive, got {support_radius}"));
        }
        if !(spectral_cutoff.is_finite() && spectral_cutoff > 0.0) {
            return Err(domain_err!("spectral cutoff must be finite and positive, got {spectral_cutoff}"));
        }
        Ok(Self { model, support_radius, spectral_cutoff })
    }

    pub fn with_defaults(model: Model) -> Self {
        Self {
            model,
            support_radius: Self::DEFAULT_SUPPORT_RADIUS,
            spectral_cutoff: Self::DEFAULT_SPECTRAL_CUTOFF,
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn rho(&self) -> f64 {
        self.model.rho()
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn spectral_cutoff(&self) -> f64 {
        self.spectral_cutoff
    }
}

/// Interior point of the open unit ball. Unused trailing coordinates are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    c: [f64; 3],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let p = Self::from_slice(coords)?;
        let n2 = p.norm_sq();
        if !(n2 < 1.0) {
            return Err(domain_err!("interior point must satisfy |x| < 1, got |x| = {}", n2.sqrt()));
        }
        Ok(p)
    }

    pub fn origin(dim: usize) -> Self {
        debug_assert!(dim == 2 || dim == 3);
        Self { c: [0.0; 3], dim }
    }

    /// Point at geodesic distance `r` from the origin in direction `dir`.
    pub fn at_distance(dir: &BoundaryPoint, r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(domain_err!("geodesic radius must be finite and non-negative, got {r}"));
        }
        let t = (0.5 * r).tanh();
        if !(t < 1.0) {
            return Err(domain_err!("geodesic radius {r} is beyond double precision in the ball model"));
        }
        Ok(dir.scaled(t))
    }

    fn from_slice(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if dim != 2 && dim != 3 {
            return Err(domain_err!("points must have 2 or 3 coordinates, got {dim}"));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(domain_err!("non-finite coordinate in {coords:?}"));
        }
        let mut c = [0.0; 3];
        c[..dim].copy_from_slice(coords);
        Ok(Self { c, dim })
    }

    pub(crate) fn from_array_unchecked(c: [f64; 3], dim: usize) -> Self {
        Self { c, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[f64; 3] {
        &self.c
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.c[0] * self.c[0] + self.c[1] * self.c[1] + self.c[2] * self.c[2]
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Geodesic distance to the origin, `2 artanh |x|`.
    pub fn radius(&self) -> f64 {
        2.0 * self.norm().atanh()
    }

    /// The antipodal point `−x`, the image of `x` under the inverse translation.
    pub fn neg(&self) -> Self {
        Self { c: [-self.c[0], -self.c[1], -self.c[2]], dim: self.dim }
    }

    pub fn is_origin(&self) -> bool {
        self.c == [0.0; 3]
    }
}

/// Point of the boundary sphere `|b| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    c: [f64; 3],
    dim: usize,
}

impl BoundaryPoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let p = Point::from_slice(coords)?;
        let n = p.norm();
        if (n - 1.0).abs() > BOUNDARY_NORM_TOL {
            return Err(domain_err!("boundary point must satisfy |b| = 1, got |b| = {n}"));
        }
        let mut c = p.c;
        c.iter_mut().for_each(|x| *x /= n);
        Ok(Self { c, dim: p.dim })
    }

    /// Unit circle point at angle `theta`.
    pub fn from_angle(theta: f64) -> Self {
        Self { c: [theta.cos(), theta.sin(), 0.0], dim: 2 }
    }

    /// Unit sphere point from polar cosine and azimuth.
    pub fn from_polar(cos_polar: f64, azimuth: f64) -> Self {
        let s = (1.0 - cos_polar * cos_polar).max(0.0).sqrt();
        Self { c: [s * azimuth.cos(), s * azimuth.sin(), cos_polar], dim: 3 }
    }

    /// First coordinate axis.
    pub fn axis(dim: usize) -> Self {
        Self { c: [1.0, 0.0, 0.0], dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim]
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[f64; 3] {
        &self.c
    }

    pub fn scaled(&self, t: f64) -> Point {
        Point { c: [self.c[0] * t, self.c[1] * t, self.c[2] * t], dim: self.dim }
    }

    /// Angle on the circle; only meaningful for `dim == 2`.
    pub fn angle(&self) -> f64 {
        self.c[1].atan2(self.c[0])
    }
}

/// Complex spectral parameter. Real for the L² theory, complex on the
/// Paley–Wiener path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParam(pub Complex64);

impl SpectralParam {
    pub fn real(lambda: f64) -> Self {
        Self(Complex64::new(lambda, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }

    pub fn neg(&self) -> Self {
        Self(-self.0)
    }
}

impl From<f64> for SpectralParam {
    fn from(v: f64) -> Self {
        Self::real(v)
    }
}

impl From<Complex64> for SpectralParam {
    fn from(v: Complex64) -> Self {
        Self(v)
    }
}

#[inline]
fn dist_sq(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

#[inline]
fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_interior(x: &Point) -> Result<()> {
    if !(x.norm_sq() < 1.0) {
        return Err(domain_err!("interior point must satisfy |x| < 1, got |x| = {}", x.norm()));
    }
    Ok(())
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(domain_err!("dimension mismatch: {a} vs {b}"));
    }
    Ok(())
}

/// `cosh d − 1` between two interior points, without the range checks.
#[inline]
pub(crate) fn cosh_distance_minus_one(x: &Point, y: &Point) -> f64 {
    let num = 2.0 * dist_sq(&x.c, &y.c);
    let den = (1.0 - x.norm_sq()) * (1.0 - y.norm_sq());
    num / den
}

/// Geodesic distance from `cosh d − 1`, stable for nearby points.
#[inline]
pub(crate) fn distance_from_cosh_minus_one(delta: f64) -> f64 {
    2.0 * (0.5 * delta).sqrt().asinh()
}

/// Hyperbolic distance, `cosh d = 1 + 2|x − y|² / ((1 − |x|²)(1 − |y|²))`.
pub fn geodesic_distance(x: &Point, y: &Point) -> Result<f64> {
    check_same_dim(x.dim, y.dim)?;
    check_interior(x)?;
    check_interior(y)?;
    Ok(distance_from_cosh_minus_one(cosh_distance_minus_one(x, y)))
}

#[inline]
pub(crate) fn bracket_unchecked(x: &[f64; 3], b: &[f64; 3]) -> f64 {
    let nx = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    ((1.0 - nx) / dist_sq(x, b)).ln()
}

/// Horocycle bracket `⟨x, b⟩ = log((1 − |x|²) / |x − b|²)`: signed distance
/// from the origin to the horocycle through `x` tangent at `b`.
pub fn horocycle_bracket(x: &Point, b: &BoundaryPoint) -> Result<f64> {
    check_same_dim(x.dim, b.dim)?;
    check_interior(x)?;
    Ok(bracket_unchecked(&x.c, &b.c))
}

/// Isometry moving the origin to `a`: the disk map `(z + a)/(1 + āz)` in
/// the plane, Möbius addition `a ⊕ z` in the ball.
pub fn translate(a: &Point, z: &Point) -> Result<Point> {
    check_same_dim(a.dim, z.dim)?;
    check_interior(a)?;
    check_interior(z)?;
    let out = translate_unchecked(a, z);
    if !(out.norm_sq() < 1.0) {
        return Err(domain_err!("translated point left the ball (|x| rounded to 1)"));
    }
    Ok(out)
}

#[inline]
pub(crate) fn translate_unchecked(a: &Point, z: &Point) -> Point {
    match a.dim {
        2 => {
            let za = Complex64::new(a.c[0], a.c[1]);
            let zz = Complex64::new(z.c[0], z.c[1]);
            let w = (zz + za) / (Complex64::new(1.0, 0.0) + za.conj() * zz);
            Point { c: [w.re, w.im, 0.0], dim: 2 }
        }
        _ => {
            let az = dot(&a.c, &z.c);
            let a2 = a.norm_sq();
            let z2 = z.norm_sq();
            let ca = 1.0 + 2.0 * az + z2;
            let cz = 1.0 - a2;
            let den = 1.0 + 2.0 * az + a2 * z2;
            let c = std::array::from_fn(|i| (ca * a.c[i] + cz * z.c[i]) / den);
            Point { c, dim: 3 }
        }
    }
}

/// Boundary action of the translation moving the origin to `a`.
pub fn translate_boundary(a: &Point, b: &BoundaryPoint) -> Result<BoundaryPoint> {
    check_same_dim(a.dim, b.dim)?;
    check_interior(a)?;
    Ok(translate_boundary_unchecked(a, b))
}

#[inline]
pub(crate) fn translate_boundary_unchecked(a: &Point, b: &BoundaryPoint) -> BoundaryPoint {
    let w = translate_unchecked(a, &Point { c: b.c, dim: b.dim });
    let n = w.norm();
    let mut c = w.c;
    for v in c.iter_mut() {
        *v /= n;
    }
    BoundaryPoint { c, dim: b.dim }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, dim: usize, max_r: f64) -> Point {
        loop {
            let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-3 && n <= 1.0 {
                let r = max_r * rng.random_range(0.0..1.0f64);
                let t = (0.5 * r).tanh() / n;
                let scaled: Vec<f64> = c.iter().map(|x| x * t).collect();
                return Point::new(&scaled).unwrap();
            }
        }
    }

    #[test]
    fn distance_identity_and_half_radius() {
        let o = Point::origin(2);
        assert_eq!(geodesic_distance(&o, &o).unwrap(), 0.0);
        let p = Point::new(&[0.5, 0.0]).unwrap();
        // Oracle: integrate 2/(1 − t²) along the radius with composite Simpson.
        let n = 2000;
        let h = 0.5 / n as f64;
        let g = |t: f64| 2.0 / (1.0 - t * t);
        let mut s = g(0.0) + g(0.5);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        let oracle = s * h / 3.0;
        assert_relative_eq!(oracle, 3f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(geodesic_distance(&o, &p).unwrap(), oracle, max_relative = 1e-12);
    }

    #[test]
    fn bracket_on_and_against_the_ray() {
        let x = Point::new(&[0.5, 0.0]).unwrap();
        let b = BoundaryPoint::new(&[1.0, 0.0]).unwrap();
        let bm = BoundaryPoint::new(&[-1.0, 0.0]).unwrap();
        let d = geodesic_distance(&Point::origin(2), &x).unwrap();
        assert_relative_eq!(horocycle_bracket(&x, &b).unwrap(), d, max_relative = 1e-14);
        assert_relative_eq!(horocycle_bracket(&x, &bm).unwrap(), -(3f64.ln()), max_relative = 1e-14);
        assert_eq!(horocycle_bracket(&Point::origin(3), &BoundaryPoint::axis(3)).unwrap(), 0.0);
    }

    #[test]
    fn invalid_norms_are_domain_errors() {
        assert!(Point::new(&[1.0, 0.0]).is_err());
        assert!(Point::new(&[0.1, 0.2, 0.3, 0.4]).is_err());
        assert!(BoundaryPoint::new(&[0.9, 0.0]).is_err());
        let x = Point::new(&[0.2, 0.1]).unwrap();
        let y = Point::new(&[0.2, 0.1, 0.0]).unwrap();
        assert!(geodesic_distance(&x, &y).is_err());
    }

    #[test]
    fn translate_fixes_identity_cases() {
        for dim in [2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let a = random_point(&mut rng, dim, 2.0);
            let z = random_point(&mut rng, dim, 2.0);
            let o = Point::origin(dim);
            let t = translate(&o, &z).unwrap();
            for i in 0..dim {
                assert_relative_eq!(t.coords()[i], z.coords()[i], epsilon = 1e-15);
            }
            let t = translate(&a, &o).unwrap();
            for i in 0..dim {
                assert_relative_eq!(t.coords()[i], a.coords()[i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn translate_is_an_isometry() {
        for dim in [2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(11 + dim as u64);
            for _ in 0..100 {
                let a = random_point(&mut rng, dim, 2.5);
                let x = random_point(&mut rng, dim, 2.5);
                let y = random_point(&mut rng, dim, 2.5);
                let d0 = geodesic_distance(&x, &y).unwrap();
                let d1 = geodesic_distance(&translate(&a, &x).unwrap(), &translate(&a, &y).unwrap()).unwrap();
                assert!((d0 - d1).abs() <= 1e-12 * (1.0 + d0), "dim {dim}: {d0} vs {d1}");
                // Origin maps to a, so d(a, a ⊕ z) = d(o, z).
                let dz = geodesic_distance(&Point::origin(dim), &x).unwrap();
                let da = geodesic_distance(&a, &translate(&a, &x).unwrap()).unwrap();
                assert!((dz - da).abs() <= 1e-12 * (1.0 + dz));
            }
        }
    }

    #[test]
    fn metric_axioms_on_sampled_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in [2, 3] {
            for _ in 0..200 {
                let x = random_point(&mut rng, dim, 3.0);
                let y = random_point(&mut rng, dim, 3.0);
                let z = random_point(&mut rng, dim, 3.0);
                let dxy = geodesic_distance(&x, &y).unwrap();
                assert_eq!(dxy, geodesic_distance(&y, &x).unwrap());
                let dxz = geodesic_distance(&x, &z).unwrap();
                let dzy = geodesic_distance(&z, &y).unwrap();
                assert!(dxy <= dxz + dzy + 1e-12);
            }
        }
    }

    #[test]
    fn at_distance_round_trips_radius() {
        let b = BoundaryPoint::from_polar(0.3, 1.1);
        let p = Point::at_distance(&b, 1.7).unwrap();
        assert_relative_eq!(p.radius(), 1.7, max_relative = 1e-14);
        assert_relative_eq!(horocycle_bracket(&p, &b).unwrap(), 1.7, max_relative = 1e-13);
    }

    #[test]
    fn bracket_cocycle_under_translation() {
        for dim in [2, 3] {
            let mut rng = ChaCha8Rng::seed_from_u64(29 + dim as u64);
            for _ in 0..50 {
                let p = random_point(&mut rng, dim, 1.5);
                let z = random_point(&mut rng, dim, 2.0);
                let dir = random_point(&mut rng, dim, 1.0);
                let b = BoundaryPoint::new(&dir.coords().iter().map(|c| c / dir.norm()).collect::<Vec<_>>()).unwrap();
                let lhs = horocycle_bracket(&translate(&p, &z).unwrap(), &b).unwrap();
                let b_back = translate_boundary(&p.neg(), &b).unwrap();
                let rhs = horocycle_bracket(&z, &b_back).unwrap() + horocycle_bracket(&p, &b).unwrap();
                assert!((lhs - rhs).abs() <= 1e-11, "dim {dim}: {lhs} vs {rhs}");
            }
        }
    }
}
