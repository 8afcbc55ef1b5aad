//! Closed-form gains for isotropic priors: Kullback gains for one and two
//! copies, mean fidelity gains, the gain of the Schmidt-state family of
//! two-copy measurements, and the pure-state capacity table.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::priors::{IsotropicPrior, RadialMeasure};
use crate::quadrature::{azimuth_rule, clustered_gauss_legendre, QuadratureOrders, Rule1D};

/// `log₂ e`
pub const LOG2_E: f64 = 1.0 / LN_2;

/// Largest `n` accepted by [`capacity_table`].
pub const MAX_CAPACITY_N: usize = 1_000_000;

const SERIES_CUTOFF: f64 = 1e-3;

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() * LOG2_E
}

/// `[(1+b)² log₂(1+b) - (1-b)² log₂(1-b)] / b`, continuous on `[0, 1]`.
pub fn bracket1(b: f64) -> f64 {
    if b < SERIES_CUTOFF {
        let b2 = b * b;
        return 2.0 * LOG2_E * (1.0 + b2 / 3.0 + b2 * b2 / 30.0);
    }
    let minus = if b >= 1.0 {
        0.0
    } else {
        (1.0 - b).powi(2) * log2_1p(-b)
    };
    ((1.0 + b).powi(2) * log2_1p(b) - minus) / b
}

/// `(1+b)³ log₂(1+b)/b - (1-b)³ log₂(1-b)/b + (1-b²) log₂(1-b²)`, continuous on `[0, 1]`.
pub fn bracket2(b: f64) -> f64 {
    let tail = if b >= 1.0 {
        0.0
    } else {
        (1.0 - b * b) * log2_1p(-b * b)
    };
    let odd = if b < SERIES_CUTOFF {
        let b2 = b * b;
        2.0 * LOG2_E * (1.0 + 11.0 * b2 / 6.0 - b2 * b2 / 20.0)
    } else {
        let minus = if b >= 1.0 {
            0.0
        } else {
            (1.0 - b).powi(3) * log2_1p(-b)
        };
        ((1.0 + b).powi(3) * log2_1p(b) - minus) / b
    };
    odd + tail
}

/// Gain in bits of a projective measurement on one copy.
pub fn delta_i1(prior: &IsotropicPrior) -> f64 {
    0.25 * prior.radial_measure().expectation(bracket1) - 0.5 * LOG2_E
}

/// Gain in bits of the optimal two-copy measurement.
pub fn delta_i2(prior: &IsotropicPrior) -> f64 {
    let i1 = prior.moment(1.0);
    let rest = 1.0 - i1;
    let rest_term = if rest > 0.0 {
        rest * (2.0 * LOG2_E / 3.0 + (rest / 3.0).log2())
    } else {
        0.0
    };
    let i1_term = if i1 > 0.0 { i1 * i1.log2() } else { 0.0 };
    0.25 * prior.radial_measure().expectation(bracket2) - rest_term - i1_term - 2.0
}

/// Mean fidelity of the best guess without measuring: `1/2 + I_{1/2}`.
pub fn f_ap(prior: &IsotropicPrior) -> f64 {
    0.5 + prior.moment(0.5)
}

/// Mean fidelity gain of the best one-copy strategy.
pub fn delta_f1(prior: &IsotropicPrior) -> f64 {
    let ih = prior.moment(0.5);
    let i1 = prior.moment(1.0);
    (ih * ih + (1.0 - 4.0 * i1).powi(2) / 36.0).sqrt() - ih
}

/// Mean fidelity gain of the best two-copy strategy.
pub fn delta_f2(prior: &IsotropicPrior) -> f64 {
    let ih = prior.moment(0.5);
    let i1 = prior.moment(1.0);
    let i3h = prior.moment(1.5);
    ((ih - i3h).powi(2) + (1.0 - 4.0 * i1).powi(2) / 16.0).sqrt() + i3h - ih
}

/// Parameters of `h = k + l cos 2φ` at one radius for the Schmidt state
/// `√p|++⟩ + √(1-p)|--⟩`.
#[derive(Clone, Copy, Debug)]
struct SchmidtShape {
    b: f64,
    q: f64,
    s: f64,
}

impl SchmidtShape {
    fn new(p: f64, b: f64) -> Self {
        Self {
            b,
            q: 2.0 * (p * (1.0 - p)).sqrt(),
            s: 2.0 * p - 1.0,
        }
    }

    fn k(&self, mu: f64) -> f64 {
        let bm = self.b * mu;
        1.0 + bm * bm + 2.0 * self.s * bm
    }

    fn l(&self, mu: f64) -> f64 {
        self.q * self.b * self.b * (1.0 - mu * mu)
    }

    /// `μ` rule on `[-1, 1]` split where the minimum of `h` over `φ` touches zero
    /// for pure states.
    fn mu_rule(&self, order: usize) -> Rule1D {
        let split = if self.b > 0.0 {
            -self.s / (self.b * (1.0 + self.q))
        } else {
            f64::NAN
        };
        if split > -1.0 && split < 1.0 {
            let lo = clustered_gauss_legendre(order, -1.0, split);
            let hi = clustered_gauss_legendre(order, split, 1.0);
            Rule1D {
                nodes: lo.nodes.into_iter().chain(hi.nodes).collect(),
                weights: lo.weights.into_iter().chain(hi.weights).collect(),
            }
        } else {
            clustered_gauss_legendre(order, -1.0, 1.0)
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::SchmidtParamOutOfRange(p))
    }
}

fn radial_for(prior: &IsotropicPrior, orders: &QuadratureOrders) -> RadialMeasure {
    prior
        .clone()
        .with_radial_nodes(orders.radial)
        .radial_measure()
}

/// Contribution of the singlet outcome, `E[(1-b²)/4 · log₂((1-b²)/(4 I₁))]`.
fn singlet_term(radial: &RadialMeasure, i1: f64) -> f64 {
    if i1 <= 0.0 {
        return 0.0;
    }
    radial.expectation(|b| {
        let p = 0.25 * (1.0 - b * b);
        if p > 0.0 {
            p * (p / i1).log2()
        } else {
            0.0
        }
    })
}

/// Average gain in bits of the two-copy measurement made of the singlet
/// projector and the rotated copies of `3|ψ⟩⟨ψ|`, `|ψ⟩ = √p|++⟩ + √(1-p)|--⟩`,
/// with the azimuth integrated in closed form.
pub fn schmidt_gain(p: f64, prior: &IsotropicPrior) -> Result<f64> {
    schmidt_gain_with(p, prior, &QuadratureOrders::default())
}

pub fn schmidt_gain_with(p: f64, prior: &IsotropicPrior, orders: &QuadratureOrders) -> Result<f64> {
    check_p(p)?;
    let radial = radial_for(prior, orders);
    let i1 = prior.moment(1.0);
    let c = 4.0 * (1.0 - i1) / 3.0;
    let log_2c = (2.0 * c).log2();
    let triplet = radial.expectation(|b| {
        let shape = SchmidtShape::new(p, b);
        shape.mu_rule(orders.mu).integrate(|mu| {
            let k = shape.k(mu);
            let l = shape.l(mu);
            let r = (k * k - l * l).max(0.0).sqrt();
            let head = if k + r > 0.0 { k * (k + r).log2() } else { 0.0 };
            head - k * log_2c + (k - r) * LOG2_E
        })
    });
    Ok(singlet_term(&radial, i1) + 0.375 * triplet)
}

/// Same quantity as [`schmidt_gain`] with the azimuth integrated numerically.
pub fn schmidt_gain_brute(p: f64, prior: &IsotropicPrior) -> Result<f64> {
    schmidt_gain_brute_with(p, prior, &QuadratureOrders::default())
}

pub fn schmidt_gain_brute_with(
    p: f64,
    prior: &IsotropicPrior,
    orders: &QuadratureOrders,
) -> Result<f64> {
    check_p(p)?;
    let radial = radial_for(prior, orders);
    let i1 = prior.moment(1.0);
    let c = 4.0 * (1.0 - i1) / 3.0;
    let phi = azimuth_rule(orders.phi);
    let triplet = radial.expectation(|b| {
        let shape = SchmidtShape::new(p, b);
        shape.mu_rule(orders.mu).integrate(|mu| {
            let k = shape.k(mu);
            let l = shape.l(mu);
            phi.integrate(|angle| {
                let h = (k + l * (2.0 * angle).cos()).max(0.0);
                if h > 0.0 {
                    h * (h / c).log2()
                } else {
                    0.0
                }
            })
        })
    });
    let triplet = triplet / (4.0 * std::f64::consts::PI);
    Ok(singlet_term(&radial, i1) + 0.75 * triplet)
}

/// One row of the pure-state capacity table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapacityRow {
    pub n: usize,
    pub gain_bits: f64,
    pub compressed_qubits: f64,
    pub bits_per_raw_qubit: f64,
    pub bits_per_compressed_qubit: f64,
}

/// `log₂(n+1) - n/(n+1) log₂ e`: the optimal gain on `n` pure copies.
pub fn capacity_gain(n: usize) -> f64 {
    let nf = n as f64;
    (nf + 1.0).log2() - nf / (nf + 1.0) * LOG2_E
}

impl CapacityRow {
    pub fn new(n: usize) -> Self {
        let gain_bits = capacity_gain(n);
        let compressed_qubits = (n as f64 + 1.0).log2();
        Self {
            n,
            gain_bits,
            compressed_qubits,
            bits_per_raw_qubit: gain_bits / n as f64,
            bits_per_compressed_qubit: gain_bits / compressed_qubits,
        }
    }
}

/// Rows for `n = 1..=n_max`.
pub fn capacity_table(n_max: usize) -> Result<Vec<CapacityRow>> {
    if n_max == 0 || n_max > MAX_CAPACITY_N {
        return Err(Error::InvalidArgument(format!(
            "n_max must lie in 1..={MAX_CAPACITY_N}, got {n_max}"
        )));
    }
    Ok((1..=n_max).map(CapacityRow::new).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::{prior_point_mass, prior_pure, prior_uniform_ball};
    use approx::assert_abs_diff_eq;

    fn pure_two_copy() -> f64 {
        3f64.log2() - 2.0 / 3.0 * LOG2_E
    }

    #[test]
    fn brackets_are_continuous_at_cutoff() {
        for b in [SERIES_CUTOFF * (1.0 - 1e-12), SERIES_CUTOFF] {
            let direct = ((1.0 + b).powi(2) * log2_1p(b) - (1.0 - b).powi(2) * log2_1p(-b)) / b;
            assert_abs_diff_eq!(bracket1(b), direct, epsilon = 1e-13);
            let direct2 = ((1.0 + b).powi(3) * log2_1p(b) - (1.0 - b).powi(3) * log2_1p(-b)) / b
                + (1.0 - b * b) * log2_1p(-b * b);
            assert_abs_diff_eq!(bracket2(b), direct2, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(bracket1(1.0), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bracket2(1.0), 8.0, epsilon = 1e-15);
    }

    #[test]
    fn one_copy_gain() {
        assert_abs_diff_eq!(delta_i1(&prior_pure()), 1.0 - LOG2_E / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            delta_i1(&prior_point_mass(0.0).unwrap()),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn two_copy_gain() {
        assert_abs_diff_eq!(delta_i2(&prior_pure()), pure_two_copy(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            delta_i2(&prior_point_mass(0.0).unwrap()),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(capacity_gain(2), pure_two_copy(), epsilon = 1e-15);
    }

    #[test]
    fn fidelities() {
        let pure = prior_pure();
        assert_abs_diff_eq!(f_ap(&pure), 0.5);
        assert_abs_diff_eq!(delta_f1(&pure), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_f2(&pure), 0.25, epsilon = 1e-15);
        let center = prior_point_mass(0.0).unwrap();
        assert_abs_diff_eq!(f_ap(&center), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_f1(&center), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_f2(&center), 0.0, epsilon = 1e-15);
        let uniform = prior_uniform_ball();
        assert_abs_diff_eq!(
            f_ap(&uniform),
            0.5 + 3.0 * std::f64::consts::PI / 32.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn schmidt_endpoints_reduce_to_product_measurement() {
        for prior in [prior_pure(), prior_uniform_ball()] {
            let target = delta_i2(&prior);
            assert_abs_diff_eq!(schmidt_gain(0.0, &prior).unwrap(), target, epsilon = 1e-12);
            assert_abs_diff_eq!(schmidt_gain(1.0, &prior).unwrap(), target, epsilon = 1e-12);
        }
    }

    #[test]
    fn schmidt_symmetry_and_paths() {
        let prior = prior_uniform_ball();
        for p in [0.1, 0.3, 0.5] {
            let a = schmidt_gain(p, &prior).unwrap();
            let b = schmidt_gain(1.0 - p, &prior).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            let brute = schmidt_gain_brute(p, &prior).unwrap();
            assert_abs_diff_eq!(a, brute, epsilon = 1e-6);
        }
        assert!(
            schmidt_gain(0.5, &prior_pure()).unwrap() < schmidt_gain(1.0, &prior_pure()).unwrap()
        );
        assert!(matches!(
            schmidt_gain(1.5, &prior),
            Err(Error::SchmidtParamOutOfRange(_))
        ));
    }

    #[test]
    fn capacity_rows() {
        let t = capacity_table(3).unwrap();
        assert_abs_diff_eq!(t[0].gain_bits, 1.0 - LOG2_E / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t[2].gain_bits, 2.0 - 0.75 * LOG2_E, epsilon = 1e-15);
        assert_abs_diff_eq!(t[2].compressed_qubits, 2.0);
        assert_abs_diff_eq!(
            t[2].bits_per_compressed_qubit,
            (2.0 - 0.75 * LOG2_E) / 2.0,
            epsilon = 1e-15
        );
        assert!(capacity_table(0).is_err());
    }
}
