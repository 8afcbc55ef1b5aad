//! Quadrature rules for integrals over the Bloch ball.
//!
//! Both the radial and the polar (`μ = cos θ`) directions use Gauss-Legendre
//! nodes pulled through the map `x = (3u - u³)/2`. The map has zero slope at
//! `u = ±1`, so nodes cluster at the interval ends where integrands such as
//! `t log t` (pure states, `μ → -1`) or `√(1-b²)` (`b → 1`) lose smoothness.
//! Polynomials in `x` of degree `≤ (2·order - 1)/3` are still integrated
//! exactly and all weights stay positive. The azimuth uses the periodic
//! trapezoid rule.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::str::FromStr;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding the default orders, formatted `r,mu,phi`.
pub const ORDERS_ENV: &str = "QEL_QUAD_ORDERS";

/// Radial, polar and azimuthal quadrature sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureOrders {
    pub radial: usize,
    pub mu: usize,
    pub phi: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        Self {
            radial: 64,
            mu: 64,
            phi: 128,
        }
    }
}

impl QuadratureOrders {
    pub fn new(radial: usize, mu: usize, phi: usize) -> Result<Self> {
        if radial == 0 || mu == 0 || phi == 0 {
            return Err(Error::InvalidArgument(
                "quadrature orders must be positive".into(),
            ));
        }
        Ok(Self { radial, mu, phi })
    }

    pub fn doubled(self) -> Self {
        Self {
            radial: 2 * self.radial,
            mu: 2 * self.mu,
            phi: 2 * self.phi,
        }
    }

    /// Defaults, overridden by `QEL_QUAD_ORDERS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ORDERS_ENV) {
            Ok(s) => s.parse(),
            Err(_) => Ok(Self::default()),
        }
    }
}

impl FromStr for QuadratureOrders {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!(
                "quadrature orders '{s}' must be 'r,mu,phi'"
            )));
        }
        let num = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad quadrature order '{p}'")))
        };
        Self::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

/// One-dimensional rule `∫ g ≈ Σ w_k g(x_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn extend(&mut self, other: Rule1D) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }
}

/// Plain Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Rule1D {
    let order = NonZeroUsize::new(order).expect("quadrature order must be positive");
    let rule = GaussLegendre::new(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let (nodes, weights) = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(u, w)| (mid + half * u, half * w))
        .unzip();
    Rule1D { nodes, weights }
}

/// Gauss-Legendre rule on `[a, b]` with nodes clustered at both ends.
pub fn clustered_gauss_legendre(order: usize, a: f64, b: f64) -> Rule1D {
    let order = NonZeroUsize::new(order).expect("quadrature order must be positive");
    let rule = GaussLegendre::new(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let (nodes, weights) = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(u, w)| {
            let x = 0.5 * u * (3.0 - u * u);
            let jac = 1.5 * (1.0 - u * u);
            (mid + half * x, half * w * jac)
        })
        .unzip();
    Rule1D { nodes, weights }
}

/// Clustered rule applied on each interval `[breaks[k], breaks[k+1]]`.
pub fn composite_clustered(breaks: &[f64], order_per_segment: usize) -> Rule1D {
    let mut out = Rule1D {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    for pair in breaks.windows(2) {
        if pair[1] > pair[0] {
            out.extend(clustered_gauss_legendre(
                order_per_segment,
                pair[0],
                pair[1],
            ));
        }
    }
    out
}

/// Uniform azimuthal nodes `2πk/count` with weights `2π/count`.
pub fn azimuth_rule(count: usize) -> Rule1D {
    assert!(count > 0, "azimuthal node count must be positive");
    let w = 2.0 * PI / count as f64;
    Rule1D {
        nodes: (0..count).map(|k| w * k as f64).collect(),
        weights: vec![w; count],
    }
}

/// Orthonormal frame whose third axis is the polar axis of an angular grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    /// Columns are the images of x̂, ŷ, ẑ.
    axes: [[f64; 3]; 3],
}

impl Default for Frame {
    fn default() -> Self {
        Self::identity()
    }
}

impl Frame {
    pub fn identity() -> Self {
        Self {
            axes: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// A right-handed frame with `pole` as its third axis.
    pub fn with_pole(pole: [f64; 3]) -> Self {
        let norm = (pole[0] * pole[0] + pole[1] * pole[1] + pole[2] * pole[2]).sqrt();
        assert!(norm > 0.0, "frame pole must be nonzero");
        let e3 = [pole[0] / norm, pole[1] / norm, pole[2] / norm];
        // seed with the coordinate axis least aligned with the pole
        let k = (0..3)
            .min_by(|&i, &j| e3[i].abs().total_cmp(&e3[j].abs()))
            .unwrap();
        let mut seed = [0.0; 3];
        seed[k] = 1.0;
        let d = dot(seed, e3);
        let mut e1 = [
            seed[0] - d * e3[0],
            seed[1] - d * e3[1],
            seed[2] - d * e3[2],
        ];
        let n1 = dot(e1, e1).sqrt();
        e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
        let e2 = cross(e3, e1);
        Self { axes: [e1, e2, e3] }
    }

    pub fn pole(&self) -> [f64; 3] {
        self.axes[2]
    }

    /// Maps grid-local coordinates to lab coordinates.
    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let [e1, e2, e3] = self.axes;
        [
            v[0] * e1[0] + v[1] * e2[0] + v[2] * e3[0],
            v[0] * e1[1] + v[1] * e2[1] + v[2] * e3[1],
            v[0] * e1[2] + v[1] * e2[2] + v[2] * e3[2],
        ]
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Product grid on the unit sphere: clustered Gauss-Legendre in `μ`, trapezoid in `φ`.
#[derive(Clone, Debug)]
pub struct AngularGrid {
    mu: Rule1D,
    phi: Rule1D,
    /// Unit vectors, `μ`-major.
    points: Vec<[f64; 3]>,
    /// Solid-angle weights; they sum to `4π`.
    weights: Vec<f64>,
}

impl AngularGrid {
    pub fn new(mu_order: usize, phi_count: usize, frame: &Frame) -> Self {
        let mu = clustered_gauss_legendre(mu_order, -1.0, 1.0);
        let phi = azimuth_rule(phi_count);
        let mut points = Vec::with_capacity(mu.len() * phi.len());
        let mut weights = Vec::with_capacity(mu.len() * phi.len());
        for (&m, &wm) in mu.nodes.iter().zip(&mu.weights) {
            let st = (1.0 - m * m).max(0.0).sqrt();
            for (&p, &wp) in phi.nodes.iter().zip(&phi.weights) {
                points.push(frame.apply([st * p.cos(), st * p.sin(), m]));
                weights.push(wm * wp);
            }
        }
        Self {
            mu,
            phi,
            points,
            weights,
        }
    }

    pub fn from_orders(orders: &QuadratureOrders, frame: &Frame) -> Self {
        Self::new(orders.mu, orders.phi, frame)
    }

    pub fn mu_rule(&self) -> &Rule1D {
        &self.mu
    }

    pub fn phi_rule(&self) -> &Rule1D {
        &self.phi
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of azimuthal points per polar ring.
    pub fn ring_len(&self) -> usize {
        self.phi.len()
    }

    /// `(1/4π) ∫ dΩ g`
    pub fn average(&self, g: impl Fn([f64; 3]) -> f64) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * g(p))
            .sum();
        s / (4.0 * PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_full_solid_angle() {
        let g = AngularGrid::new(64, 128, &Frame::identity());
        let total: f64 = g.weights().iter().sum();
        assert_abs_diff_eq!(total, 4.0 * PI, epsilon = 1e-12);
        assert_eq!(g.len(), 64 * 128);
    }

    #[test]
    fn clustered_rule_is_exact_on_low_degree_polynomials() {
        let r = clustered_gauss_legendre(16, 0.0, 1.0);
        for deg in 0..=9 {
            let got = r.integrate(|x| x.powi(deg));
            assert_abs_diff_eq!(got, 1.0 / f64::from(deg + 1), epsilon = 1e-14);
        }
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn clustered_rule_handles_endpoint_log() {
        // ∫₀² t ln t dt = 2 ln 2 - 1
        let r = clustered_gauss_legendre(64, 0.0, 2.0);
        let got = r.integrate(|t| if t > 0.0 { t * t.ln() } else { 0.0 });
        assert_abs_diff_eq!(got, 2.0 * 2f64.ln() - 1.0, epsilon = 1e-12);
        let plain = gauss_legendre(64, 0.0, 2.0).integrate(|t| t * t.ln());
        assert!((plain - (2.0 * 2f64.ln() - 1.0)).abs() > 1e-9);
    }

    #[test]
    fn spherical_moments() {
        let frame = Frame::with_pole([0.3, -0.4, 0.8]);
        let g = AngularGrid::new(32, 64, &frame);
        assert_abs_diff_eq!(g.average(|p| p[0] * p[0]), 1.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(g.average(|p| p[0] * p[1]), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(g.average(|p| p[2].powi(4)), 0.2, epsilon = 1e-13);
        for p in g.points() {
            assert_abs_diff_eq!(dot(*p, *p), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let f = Frame::with_pole([1.0, 2.0, -0.5]);
        let ex = f.apply([1.0, 0.0, 0.0]);
        let ey = f.apply([0.0, 1.0, 0.0]);
        let ez = f.apply([0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(dot(ex, ey), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dot(ex, ez), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dot(ey, ey), 1.0, epsilon = 1e-15);
        assert_eq!(
            cross(ex, ey).map(|v| (v * 1e12).round()),
            ez.map(|v| (v * 1e12).round())
        );
    }

    #[test]
    fn parse_orders() {
        let o: QuadratureOrders = "32, 48,96".parse().unwrap();
        assert_eq!(o, QuadratureOrders::new(32, 48, 96).unwrap());
        assert!("32,48".parse::<QuadratureOrders>().is_err());
        assert!("0,1,1".parse::<QuadratureOrders>().is_err());
        assert_eq!(QuadratureOrders::default().doubled().phi, 256);
    }
}
