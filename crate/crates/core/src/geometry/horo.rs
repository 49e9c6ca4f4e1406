//! Horocyclic coordinates adapted to a boundary direction.
//!
//! Send `b` to infinity in the upper half-space model. Horocycles tangent at
//! `b` become the planes `t = e^s` with `s = ⟨x, b⟩`, the volume element
//! becomes `e^{−2ρs} du ds`, and the geodesic ball `B_ρ(o)` cuts each plane in
//! a Euclidean disc of radius `sqrt(sinh²ρ − (e^s − cosh ρ)²)`. Integrating
//! `f` over each slice first leaves a one-dimensional integral in `s`, which
//! is where all of the λ-dependence of the Helgason kernel lives.

use serde::{Deserialize, Serialize};

use super::quadrature::Rule1d;
use super::{BoundaryPoint, Model, Point};
use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Node counts of the horocyclic rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoroSizes {
    /// Gauss–Legendre nodes in `s`.
    pub slices: usize,
    /// Gauss–Legendre nodes across a slice (the line in 2D, the disc radius in 3D).
    pub radial: usize,
    /// Equispaced azimuths on a slice disc; ignored in 2D.
    pub azimuth: usize,
}

impl HoroSizes {
    pub fn defaults(model: Model) -> Self {
        match model {
            Model::H2 => Self { slices: 96, radial: 96, azimuth: 1 },
            Model::H3 => Self { slices: 48, radial: 40, azimuth: 16 },
        }
    }

    pub(crate) fn validate(&self, model: Model) -> Result<()> {
        let az_ok = model == Model::H2 || self.azimuth >= 4;
        if self.slices < 4 || self.radial < 4 || !az_ok {
            return Err(Error::Size(format!("horocyclic sizes {self:?} are below 4 nodes per direction")));
        }
        Ok(())
    }

    pub fn nodes_per_direction(&self, model: Model) -> usize {
        match model {
            Model::H2 => self.slices * self.radial,
            Model::H3 => self.slices * self.radial * self.azimuth,
        }
    }
}

/// One horocycle slice: its bracket value and reference nodes.
#[derive(Clone, Debug)]
pub struct HoroSlice {
    pub s: f64,
    /// Gauss weight in `s` times the density `e^{−2ρs}`.
    pub weight: f64,
    /// Ball coordinates for the reference direction `−e_n`.
    points: Vec<[f64; 3]>,
    /// Euclidean slice weights `du`.
    weights: Vec<f64>,
}

/// Horocyclic quadrature over `B_support(o)`.
#[derive(Clone, Debug)]
pub struct HoroRule {
    model: Model,
    support: f64,
    slices: Vec<HoroSlice>,
}

impl HoroRule {
    pub fn new(model: Model, support: f64, sizes: HoroSizes) -> Result<Self> {
        if !(support.is_finite() && support > 0.0) {
            return Err(Error::Domain(format!("support radius must be positive, got {support}")));
        }
        sizes.validate(model)?;
        let dim = model.dim();
        let rho = model.rho();
        let s_rule = Rule1d::gauss_legendre(sizes.slices, -support, support)?;
        let (sh, ch) = (support.sinh(), support.cosh());
        let mut slices = Vec::with_capacity(s_rule.len());
        for (s, ws) in s_rule.nodes.iter().zip(&s_rule.weights) {
            let t = s.exp();
            let ru2 = sh * sh - (t - ch) * (t - ch);
            if ru2 <= 0.0 {
                continue;
            }
            let ru = ru2.sqrt();
            let mut points = Vec::new();
            let mut weights = Vec::new();
            match dim {
                2 => {
                    let u_rule = Rule1d::gauss_legendre(sizes.radial, -ru, ru)?;
                    for (u, wu) in u_rule.nodes.iter().zip(&u_rule.weights) {
                        points.push(half_space_to_ball(&[*u, 0.0], t, 2));
                        weights.push(*wu);
                    }
                }
                _ => {
                    let q_rule = Rule1d::gauss_legendre(sizes.radial, 0.0, ru)?;
                    let step = 2.0 * std::f64::consts::PI / sizes.azimuth as f64;
                    for (q, wq) in q_rule.nodes.iter().zip(&q_rule.weights) {
                        for k in 0..sizes.azimuth {
                            let a = step * (k as f64 + 0.5);
                            points.push(half_space_to_ball(&[q * a.cos(), q * a.sin()], t, 3));
                            weights.push(wq * q * step);
                        }
                    }
                }
            }
            slices.push(HoroSlice { s: *s, weight: ws * (-2.0 * rho * s).exp(), points, weights });
        }
        Ok(Self { model, support, slices })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn slices(&self) -> &[HoroSlice] {
        &self.slices
    }

    pub fn node_count(&self) -> usize {
        self.slices.iter().map(|s| s.points.len()).sum()
    }

    /// Visits every node mapped to direction `b` with its full volume weight
    /// and slice index.
    pub fn for_each_node<F: FnMut(usize, &Point, f64)>(&self, b: &BoundaryPoint, mut visit: F) {
        let reflect = Reflection::to(b);
        let dim = self.model.dim();
        for (i, slice) in self.slices.iter().enumerate() {
            for (p, w) in slice.points.iter().zip(&slice.weights) {
                let x = Point::from_array_unchecked(reflect.apply(p), dim);
                visit(i, &x, slice.weight * w);
            }
        }
    }

    /// Slice integrals `w_i e^{−2ρ s_i} ∫ f du` for direction `b`, so that
    /// `f̃(λ, b) = Σ_i coef_i e^{(−iλ+ρ) s_i}`.
    pub fn profile<F: Fn(&Point) -> f64>(&self, f: F, b: &BoundaryPoint) -> Vec<f64> {
        let reflect = Reflection::to(b);
        let dim = self.model.dim();
        self.slices
            .iter()
            .map(|slice| {
                let mut acc = NeumaierSum::new();
                for (p, w) in slice.points.iter().zip(&slice.weights) {
                    let x = Point::from_array_unchecked(reflect.apply(p), dim);
                    acc.add(w * f(&x));
                }
                slice.weight * acc.value()
            })
            .collect()
    }

    pub fn s_values(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.s).collect()
    }
}

/// Cayley-type map from the upper half-space `(u, t)` to the ball: inversion
/// in the sphere of radius √2 about `−e_n`. Sends `(0, 1)` to the origin and
/// infinity to `−e_n`.
fn half_space_to_ball(u: &[f64; 2], t: f64, dim: usize) -> [f64; 3] {
    let mut w = [0.0; 3];
    let last = dim - 1;
    w[..last].copy_from_slice(&u[..last]);
    w[last] = t + 1.0;
    let n2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    let mut x = [0.0; 3];
    for i in 0..dim {
        x[i] = 2.0 * w[i] / n2;
    }
    x[last] = (2.0 * w[last] - n2) / n2;
    x
}

/// Householder reflection taking `−e_n` to `b`.
struct Reflection {
    v: [f64; 3],
    scale: f64,
}

impl Reflection {
    fn to(b: &BoundaryPoint) -> Self {
        let dim = b.dim();
        let bc = b.raw();
        let mut v = [0.0; 3];
        for i in 0..dim {
            v[i] = -bc[i];
        }
        v[dim - 1] -= 1.0;
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let scale = if n2 < 1e-24 { 0.0 } else { 2.0 / n2 };
        Self { v, scale }
    }

    #[inline]
    fn apply(&self, p: &[f64; 3]) -> [f64; 3] {
        let d = (self.v[0] * p[0] + self.v[1] * p[1] + self.v[2] * p[2]) * self.scale;
        [p[0] - d * self.v[0], p[1] - d * self.v[1], p[2] - d * self.v[2]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{geodesic_distance, horocycle_bracket};
    use approx::assert_relative_eq;

    #[test]
    fn nodes_lie_on_their_horocycles_inside_the_ball() {
        for model in [Model::H2, Model::H3] {
            let dim = model.dim();
            let sizes = HoroSizes { slices: 8, radial: 6, azimuth: 6 };
            let rule = HoroRule::new(model, 1.5, sizes).unwrap();
            let b = if dim == 2 { BoundaryPoint::from_angle(0.7) } else { BoundaryPoint::from_polar(0.2, 2.0) };
            let s = rule.s_values();
            rule.for_each_node(&b, |i, x, w| {
                assert!(w > 0.0);
                assert_relative_eq!(horocycle_bracket(x, &b).unwrap(), s[i], epsilon = 1e-12);
                assert!(geodesic_distance(&Point::origin(dim), x).unwrap() <= 1.5 + 1e-12);
            });
        }
    }

    #[test]
    fn volume_of_the_ball() {
        let h2 = HoroRule::new(Model::H2, 2.0, HoroSizes { slices: 64, radial: 64, azimuth: 1 }).unwrap();
        let h3 = HoroRule::new(Model::H3, 2.0, HoroSizes { slices: 64, radial: 48, azimuth: 8 }).unwrap();
        let b2 = BoundaryPoint::axis(2);
        let b3 = BoundaryPoint::from_polar(-0.4, 0.3);
        let v2: f64 = h2.profile(|_| 1.0, &b2).iter().sum();
        let v3: f64 = h3.profile(|_| 1.0, &b3).iter().sum();
        let pi = std::f64::consts::PI;
        // The slice radius has a square-root edge, so only algebraic accuracy here.
        assert_relative_eq!(v2, 2.0 * pi * (2f64.cosh() - 1.0), max_relative = 1e-4);
        assert_relative_eq!(v3, 4.0 * pi * ((4f64).sinh() / 4.0 - 1.0), max_relative = 1e-4);
    }

    #[test]
    fn reflection_hits_the_target_direction() {
        let sizes = HoroSizes { slices: 4, radial: 4, azimuth: 4 };
        let rule = HoroRule::new(Model::H3, 1.0, sizes).unwrap();
        let b = BoundaryPoint::from_polar(0.5, -1.0);
        // The deepest slice point on the axis sits on the ray toward b.
        let mut best = (f64::NEG_INFINITY, [0.0; 3]);
        rule.for_each_node(&b, |_, x, _| {
            let s = horocycle_bracket(x, &b).unwrap();
            if s > best.0 {
                best = (s, [x.coords()[0], x.coords()[1], x.coords()[2]]);
            }
        });
        let n = (best.1[0].powi(2) + best.1[1].powi(2) + best.1[2].powi(2)).sqrt();
        let cosang = (best.1[0] * b.coords()[0] + best.1[1] * b.coords()[1] + best.1[2] * b.coords()[2]) / n;
        assert!(cosang > 0.9);
        // Direction −e is a fixed point of the identity reflection.
        let south = BoundaryPoint::new(&[0.0, 0.0, -1.0]).unwrap();
        let r = Reflection::to(&south);
        assert_eq!(r.apply(&[0.1, 0.2, 0.3]), [0.1, 0.2, 0.3]);
    }
}
