//! Bayesian information gain of a measurement on `n` copies of a qubit drawn
//! from an isotropic prior.
//!
//! Everything is computed in the prior-measure form: with `x = P_i(b⃗)/P_ap(i)`
//! the Kullback of outcome `i` is `∫ d³b f(b) x log₂ x`, so point-mass priors
//! need no density at all. Integrals run over a radial rule from the prior and
//! an angular product grid whose pole can follow the measurement.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{Povm, PovmElement};
use crate::priors::{IsotropicPrior, RadialMeasure};
use crate::qmat::CMatrix;
use crate::quadrature::{AngularGrid, Frame, QuadratureOrders};
use crate::states::{n_copies, rho_from_bloch, BlochVector, MAX_COPIES};

/// Outcomes whose a-priori probability is at or below this are null.
pub const NULL_OUTCOME_P: f64 = 1e-14;

/// Smallest argument passed to a logarithm.
const LOG_FLOOR: f64 = 1e-300;

/// Relative tolerance used when picking the element that fixes the grid pole.
const DOMINANT_REL_TOL: f64 = 1e-9;

/// Below this the measurement has no preferred axis and the lab frame is used.
const AXIS_FLOOR: f64 = 1e-12;

/// Orientation of the angular grid.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum FramePolicy {
    /// Point the grid pole along the Bloch axis of the element with the
    /// largest single-site polarization. This makes the result covariant
    /// under global rotations of the measurement.
    #[default]
    Auto,
    Fixed(Frame),
}

/// Quadrature configuration for gain evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GainSettings {
    pub orders: QuadratureOrders,
    pub frame: FramePolicy,
}

impl GainSettings {
    pub fn with_orders(orders: QuadratureOrders) -> Self {
        Self {
            orders,
            ..Self::default()
        }
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = FramePolicy::Fixed(frame);
        self
    }
}

/// A-priori probability and Kullback of one outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeGain {
    pub label: String,
    pub p_ap: f64,
    pub k_bits: f64,
    /// Set when `p_ap` is too small for the posterior to exist; `k_bits` is then 0.
    pub null_outcome: bool,
}

/// Result of [`average_gain`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub outcomes: Vec<OutcomeGain>,
    pub average_gain: f64,
    /// `H[f] - H̄[f_c]`, evaluated from the densities; `None` for point masses.
    pub entropy_difference: Option<f64>,
    pub n_copies: usize,
    pub orders: QuadratureOrders,
}

impl GainReport {
    /// `Σ_i P_ap(i)`
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.p_ap).sum()
    }

    pub fn p_ap(&self) -> Vec<f64> {
        self.outcomes.iter().map(|o| o.p_ap).collect()
    }

    /// Pretty JSON with the field names of this struct.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// `label,p_ap,k_bits` rows with a header.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "p_ap", "k_bits"])?;
        for o in &self.outcomes {
            w.write_record([o.label.clone(), fmt_f64(o.p_ap), fmt_f64(o.k_bits)])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.15e}")
}

/// `Tr[M ρ(b⃗)^{⊗n}]`, clamped to `[0, 1]`.
pub fn outcome_prob(element: &PovmElement, b: BlochVector, n: usize) -> Result<f64> {
    let rho = n_copies(&rho_from_bloch(b), n)?;
    if rho.dim() != element.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: element.dim(),
        });
    }
    Ok(rho.trace_product(element.operator()).re.clamp(0.0, 1.0))
}

/// An element written as a multilinear polynomial in the Bloch components:
/// `Tr[M ρ^{⊗n}] = Σ_s c_s Π_k b_{s_k}` with `b_0 = 1` and `c_s = Tr[M σ_s]/2^n`.
#[derive(Clone, Debug)]
pub(crate) struct PauliExpansion {
    n: usize,
    /// `(digits of s in base 4, site 1 most significant; coefficient)`
    terms: Vec<(usize, f64)>,
}

impl PauliExpansion {
    pub(crate) fn new(m: &CMatrix, n: usize) -> Self {
        let dim = 1usize << n;
        assert_eq!(m.dim(), dim, "element dimension must be 2^n");
        let norm = 1.0 / dim as f64;
        let mut terms = Vec::new();
        for s in 0..(1usize << (2 * n)) {
            let c = pauli_trace(m, s, n) * norm;
            if c.abs() > 1e-15 {
                terms.push((s, c));
            }
        }
        Self { n, terms }
    }

    #[inline]
    pub(crate) fn eval(&self, b: &[f64; 4]) -> f64 {
        let mut total = 0.0;
        for &(s, c) in &self.terms {
            let mut prod = c;
            let mut code = s;
            for _ in 0..self.n {
                prod *= b[code & 3];
                code >>= 2;
            }
            total += prod;
        }
        total
    }

    /// `(Tr[M Σ_k σ_x^{(k)}], Tr[M Σ_k σ_y^{(k)}], Tr[M Σ_k σ_z^{(k)}])`
    pub(crate) fn polarization(&self) -> [f64; 3] {
        let scale = (1usize << self.n) as f64;
        let mut v = [0.0; 3];
        for &(s, c) in &self.terms {
            let mut code = s;
            let mut axis = None;
            let mut single = true;
            for _ in 0..self.n {
                let d = code & 3;
                if d != 0 {
                    if axis.is_some() {
                        single = false;
                    }
                    axis = Some(d);
                }
                code >>= 2;
            }
            if let (true, Some(a)) = (single, axis) {
                v[a - 1] += c * scale;
            }
        }
        v
    }
}

/// `Re Tr[M σ_s]` for the Pauli string encoded by `s`; its lowest base-4 digit
/// is the last site.
fn pauli_trace(m: &CMatrix, s: usize, n: usize) -> f64 {
    let dim = 1usize << n;
    let mut flip = 0usize;
    for site in 0..n {
        let d = (s >> (2 * site)) & 3;
        if d == 1 || d == 2 {
            flip |= 1 << site;
        }
    }
    let mut acc = 0.0;
    for i in 0..dim {
        let j = i ^ flip;
        // σ_s[j, i] as a product of single-site factors
        let mut re = 1.0;
        let mut im = 0.0;
        for site in 0..n {
            let bit = (i >> site) & 1;
            match (s >> (2 * site)) & 3 {
                2 => {
                    // σ_y[1,0] = i, σ_y[0,1] = -i
                    let sign = if bit == 0 { 1.0 } else { -1.0 };
                    let (r, q) = (-im * sign, re * sign);
                    re = r;
                    im = q;
                }
                3 if bit == 1 => {
                    re = -re;
                    im = -im;
                }
                _ => {}
            }
        }
        let z = m.get(i, j);
        acc += z.re * re - z.im * im;
    }
    acc
}

fn check_copies(m: &Povm, n: usize) -> Result<()> {
    if n == 0 || n > MAX_COPIES {
        return Err(Error::CopyCountOutOfRange(n));
    }
    if m.dim() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: m.dim(),
        });
    }
    Ok(())
}

/// Grid orientation that [`FramePolicy::Auto`] picks for `m`.
pub fn dominant_frame(m: &Povm, n: usize) -> Result<Frame> {
    check_copies(m, n)?;
    let expansions: Vec<PauliExpansion> = m
        .elements()
        .iter()
        .map(|e| PauliExpansion::new(e.operator(), n))
        .collect();
    Ok(frame_from_expansions(&expansions))
}

fn frame_from_expansions(expansions: &[PauliExpansion]) -> Frame {
    let axes: Vec<[f64; 3]> = expansions.iter().map(|e| e.polarization()).collect();
    let norm = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let max = axes.iter().map(norm).fold(0.0, f64::max);
    if max < AXIS_FLOOR {
        return Frame::identity();
    }
    let pole = axes
        .iter()
        .find(|v| norm(v) >= max * (1.0 - DOMINANT_REL_TOL))
        .expect("maximum is attained");
    Frame::with_pole(*pole)
}

/// Compiled integration problem shared by the gain passes.
struct Integrator {
    expansions: Vec<PauliExpansion>,
    radial: RadialMeasure,
    grid: AngularGrid,
}

/// Per-element sums over one work unit.
#[derive(Clone, Default)]
struct UnitSums {
    first: Vec<f64>,
    second: Vec<f64>,
}

impl Integrator {
    fn new(m: &Povm, prior: &IsotropicPrior, n: usize, settings: &GainSettings) -> Result<Self> {
        check_copies(m, n)?;
        let expansions: Vec<PauliExpansion> = m
            .elements()
            .iter()
            .map(|e| PauliExpansion::new(e.operator(), n))
            .collect();
        let frame = match settings.frame {
            FramePolicy::Auto => frame_from_expansions(&expansions),
            FramePolicy::Fixed(f) => f,
        };
        let radial = prior
            .clone()
            .with_radial_nodes(settings.orders.radial)
            .radial_measure();
        let grid = AngularGrid::from_orders(&settings.orders, &frame);
        Ok(Self {
            expansions,
            radial,
            grid,
        })
    }

    /// Sums `W · g(element, P, f)` per element over all nodes, where `W` is the
    /// probability mass of the node and `f` the radial density (0 for point
    /// masses). Work is split by (radial node, polar ring) and reduced in a
    /// fixed order.
    fn sum<G>(&self, g: G) -> UnitSums
    where
        G: Fn(usize, f64, f64) -> (f64, f64) + Sync,
    {
        let rings = self.grid.mu_rule().len();
        let ring_len = self.grid.ring_len();
        let k = self.expansions.len();
        let units: Vec<UnitSums> = (0..self.radial.len() * rings)
            .into_par_iter()
            .map(|unit| {
                let (r, ring) = (unit / rings, unit % rings);
                let b = self.radial.radii[r];
                let wr = self.radial.weights[r] / (4.0 * PI);
                let f = self.radial.densities.as_ref().map_or(0.0, |d| d[r]);
                let mut out = UnitSums {
                    first: vec![0.0; k],
                    second: vec![0.0; k],
                };
                if wr == 0.0 {
                    return out;
                }
                let start = ring * ring_len;
                for idx in start..start + ring_len {
                    let p = self.grid.points()[idx];
                    let w = wr * self.grid.weights()[idx];
                    let bv = [1.0, b * p[0], b * p[1], b * p[2]];
                    for (e, exp) in self.expansions.iter().enumerate() {
                        let prob = exp.eval(&bv).clamp(0.0, 1.0);
                        let (a, c) = g(e, prob, f);
                        out.first[e] += w * a;
                        out.second[e] += w * c;
                    }
                }
                out
            })
            .collect();
        let mut total = UnitSums {
            first: vec![0.0; k],
            second: vec![0.0; k],
        };
        for u in units {
            for e in 0..k {
                total.first[e] += u.first[e];
                total.second[e] += u.second[e];
            }
        }
        total
    }

    fn apriori(&self) -> Vec<f64> {
        self.sum(|_, p, _| (p, 0.0)).first
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.max(LOG_FLOOR).log2()
    }
}

/// `P_ap(i) = ∫ d³b f(b) P_i(b⃗)` for every outcome.
pub fn apriori_prob(m: &Povm, prior: &IsotropicPrior, n: usize) -> Result<Vec<f64>> {
    apriori_prob_with(m, prior, n, &GainSettings::default())
}

pub fn apriori_prob_with(
    m: &Povm,
    prior: &IsotropicPrior,
    n: usize,
    settings: &GainSettings,
) -> Result<Vec<f64>> {
    Ok(Integrator::new(m, prior, n, settings)?.apriori())
}

/// Kullback of outcome `i` in bits; null outcomes are an error here.
pub fn kullback_outcome(m: &Povm, i: usize, prior: &IsotropicPrior, n: usize) -> Result<f64> {
    let report = average_gain(m, prior, n)?;
    let o = report.outcomes.get(i).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "outcome index {i} out of range for {} outcomes",
            m.len()
        ))
    })?;
    if o.null_outcome {
        return Err(Error::NullOutcome {
            label: o.label.clone(),
            p_ap: o.p_ap,
        });
    }
    Ok(o.k_bits)
}

/// Average Kullback `K̄ = Σ_i P_ap(i) K_i` at default quadrature orders.
pub fn average_gain(m: &Povm, prior: &IsotropicPrior, n: usize) -> Result<GainReport> {
    average_gain_with(m, prior, n, &GainSettings::default())
}

pub fn average_gain_with(
    m: &Povm,
    prior: &IsotropicPrior,
    n: usize,
    settings: &GainSettings,
) -> Result<GainReport> {
    let integ = Integrator::new(m, prior, n, settings)?;
    let p_ap = integ.apriori();
    let has_density = integ.radial.densities.is_some();
    let inv: Vec<f64> = p_ap
        .iter()
        .map(|&p| if p > NULL_OUTCOME_P { 1.0 / p } else { 0.0 })
        .collect();
    let sums = integ.sum(|e, prob, f| {
        let x = prob * inv[e];
        let kl = xlog2x(x);
        // ∫ f_c log₂ f_c with f_c = f x; nodes with f = 0 carry no mass
        let ent = if has_density && f > 0.0 && x > 0.0 {
            x * (f * x).max(LOG_FLOOR).log2()
        } else {
            0.0
        };
        (kl, ent)
    });

    let mut outcomes = Vec::with_capacity(m.len());
    let mut average = 0.0;
    let mut posterior_entropy = 0.0;
    for (e, el) in m.elements().iter().enumerate() {
        let null = p_ap[e] <= NULL_OUTCOME_P;
        let k = if null { 0.0 } else { sums.first[e] };
        average += p_ap[e] * k;
        if !null {
            posterior_entropy -= p_ap[e] * sums.second[e];
        }
        outcomes.push(OutcomeGain {
            label: el.label().to_string(),
            p_ap: p_ap[e],
            k_bits: k,
            null_outcome: null,
        });
    }
    let entropy_difference = has_density.then(|| {
        let densities = integ.radial.densities.as_ref().expect("density prior");
        let prior_entropy: f64 = -integ
            .radial
            .weights
            .iter()
            .zip(densities)
            .filter(|(_, &f)| f > 0.0)
            .map(|(&w, &f)| w * f.log2())
            .sum::<f64>();
        prior_entropy - posterior_entropy
    });
    Ok(GainReport {
        outcomes,
        average_gain: average,
        entropy_difference,
        n_copies: n,
        orders: settings.orders,
    })
}

/// `(x₁+x₂) ln((x₁+x₂)/(y₁+y₂)) ≤ x₁ ln(x₁/y₁) + x₂ ln(x₂/y₂)`, returned as
/// right minus left side (nonnegative). Uses `0 ln 0 = 0`.
pub fn log_sum_gap(x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    term(x1, y1) + term(x2, y2) - term(x1 + x2, y1 + y2)
}
