//! Isotropic priors `f(b)` on the Bloch ball.
//!
//! A prior is described by its radial law. Densities are normalized so that
//! `4π ∫₀¹ b² f(b) db = 1`; a point mass at `b₀` is the shell
//! `δ(b - b₀)/(4π b₀²)`. Every prior exposes a discrete radial measure
//! (`radii`, probability `weights`) so that `∫d³b f(b) g(b⃗)` becomes
//! `Σ_k weights[k] · ⟨g(radii[k] n̂)⟩_sphere`.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::quadrature::{clustered_gauss_legendre, composite_clustered, gauss_legendre};

/// Default number of radial nodes.
pub const DEFAULT_RADIAL_NODES: usize = 64;

/// Smallest per-segment order used for table priors.
const MIN_SEGMENT_ORDER: usize = 8;

/// Piecewise-linear radial density from tabulated rows.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTable {
    b: Vec<f64>,
    f: Vec<f64>,
    scale: f64,
}

impl RadialTable {
    pub fn abscissae(&self) -> &[f64] {
        &self.b
    }

    /// Raw (unnormalized) densities as given.
    pub fn raw_values(&self) -> &[f64] {
        &self.f
    }

    /// Factor applied to the raw values to reach unit normalization.
    pub fn rescale_factor(&self) -> f64 {
        self.scale
    }

    /// Normalized density; zero outside the tabulated range.
    pub fn density(&self, b: f64) -> f64 {
        let n = self.b.len();
        if b < self.b[0] || b > self.b[n - 1] {
            return 0.0;
        }
        let k = match self.b.partition_point(|&x| x <= b) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (b0, b1) = (self.b[k], self.b[k + 1]);
        let t = (b - b0) / (b1 - b0);
        self.scale * (self.f[k] + t * (self.f[k + 1] - self.f[k]))
    }
}

/// Radial part of an isotropic prior.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialLaw {
    /// All mass on the shell `|b⃗| = b₀`.
    PointMass(f64),
    /// Constant density `3/(4π)` on the unit ball.
    UniformBall,
    Table(RadialTable),
}

/// Isotropic prior plus its radial quadrature size.
#[derive(Clone, Debug, PartialEq)]
pub struct IsotropicPrior {
    law: RadialLaw,
    radial_nodes: usize,
}

/// Discrete radial probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialMeasure {
    pub radii: Vec<f64>,
    /// Probability mass per node (`4π b² f(b)` times the quadrature weight).
    pub weights: Vec<f64>,
    /// `f(b)` at each node; `None` for point masses.
    pub densities: Option<Vec<f64>>,
}

impl RadialMeasure {
    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.radii
            .iter()
            .zip(&self.weights)
            .map(|(&b, &w)| w * g(b))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Isotropic distribution of pure states, `δ(b - 1)/4π`.
pub fn prior_pure() -> IsotropicPrior {
    IsotropicPrior {
        law: RadialLaw::PointMass(1.0),
        radial_nodes: DEFAULT_RADIAL_NODES,
    }
}

/// Uniform density on the Bloch ball.
pub fn prior_uniform_ball() -> IsotropicPrior {
    IsotropicPrior {
        law: RadialLaw::UniformBall,
        radial_nodes: DEFAULT_RADIAL_NODES,
    }
}

pub fn prior_point_mass(b0: f64) -> Result<IsotropicPrior> {
    if !(0.0..=1.0).contains(&b0) {
        return Err(Error::RadiusOutOfRange(b0));
    }
    Ok(IsotropicPrior {
        law: RadialLaw::PointMass(b0),
        radial_nodes: DEFAULT_RADIAL_NODES,
    })
}

/// Piecewise-linear prior through `(b, f)` rows, rescaled to unit mass.
pub fn prior_from_table(rows: &[(f64, f64)]) -> Result<IsotropicPrior> {
    if rows.len() < 2 {
        return Err(Error::EmptyTable);
    }
    for (k, &(b, f)) in rows.iter().enumerate() {
        let ordered = k == 0 || b > rows[k - 1].0;
        if !b.is_finite() || !(0.0..=1.0).contains(&b) || !ordered {
            return Err(Error::NonMonotonicAbscissa { row: k });
        }
        if !f.is_finite() || f < 0.0 {
            return Err(Error::NegativeDensity { row: k });
        }
    }
    let b: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let f: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let mut table = RadialTable { b, f, scale: 1.0 };
    // b² times a linear function is cubic on every segment, so this is exact.
    let mass: f64 = 4.0
        * PI
        * table
            .b
            .windows(2)
            .map(|seg| gauss_legendre(2, seg[0], seg[1]).integrate(|x| x * x * table.density(x)))
            .sum::<f64>();
    if mass <= 0.0 || !mass.is_finite() {
        return Err(Error::NormalizationImpossible);
    }
    table.scale = 1.0 / mass;
    Ok(IsotropicPrior {
        law: RadialLaw::Table(table),
        radial_nodes: DEFAULT_RADIAL_NODES,
    })
}

#[derive(Deserialize)]
struct TableRow {
    b: f64,
    f: f64,
}

/// Reads a `b,f` CSV table.
pub fn prior_from_csv_reader(reader: impl Read) -> Result<IsotropicPrior> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "b" || &headers[1] != "f" {
        return Err(Error::Parse(format!(
            "prior table header must be 'b,f', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize::<TableRow>() {
        let r = rec?;
        rows.push((r.b, r.f));
    }
    prior_from_table(&rows)
}

pub fn prior_from_csv_path(path: impl AsRef<Path>) -> Result<IsotropicPrior> {
    let file = std::fs::File::open(path)?;
    prior_from_csv_reader(file)
}

impl IsotropicPrior {
    pub fn law(&self) -> &RadialLaw {
        &self.law
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_nodes
    }

    pub fn with_radial_nodes(mut self, nodes: usize) -> Self {
        assert!(nodes > 0, "radial node count must be positive");
        self.radial_nodes = nodes;
        self
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self.law, RadialLaw::PointMass(_))
    }

    /// Radial density `f(b)`; `None` for point masses.
    pub fn density(&self, b: f64) -> Option<f64> {
        match &self.law {
            RadialLaw::PointMass(_) => None,
            RadialLaw::UniformBall => Some(if (0.0..=1.0).contains(&b) {
                3.0 / (4.0 * PI)
            } else {
                0.0
            }),
            RadialLaw::Table(t) => Some(t.density(b)),
        }
    }

    /// Rescale factor applied to a table prior (1 for built-ins).
    pub fn rescale_factor(&self) -> f64 {
        match &self.law {
            RadialLaw::Table(t) => t.rescale_factor(),
            _ => 1.0,
        }
    }

    /// Discrete radial measure with this prior's node count.
    pub fn radial_measure(&self) -> RadialMeasure {
        let rule = match &self.law {
            RadialLaw::PointMass(b0) => {
                return RadialMeasure {
                    radii: vec![*b0],
                    weights: vec![1.0],
                    densities: None,
                }
            }
            RadialLaw::UniformBall => clustered_gauss_legendre(self.radial_nodes, 0.0, 1.0),
            RadialLaw::Table(t) => {
                let segments = t.b.len() - 1;
                let per = self.radial_nodes.div_ceil(segments).max(MIN_SEGMENT_ORDER);
                composite_clustered(&t.b, per)
            }
        };
        let densities: Vec<f64> = rule
            .nodes
            .iter()
            .map(|&b| self.density(b).expect("density prior"))
            .collect();
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .zip(&densities)
            .map(|((&b, &w), &f)| 4.0 * PI * b * b * f * w)
            .collect();
        RadialMeasure {
            radii: rule.nodes,
            weights,
            densities: Some(densities),
        }
    }

    /// `I_α = 4π ∫ b² f(b) ((1 - b²)/4)^α db`
    pub fn moment(&self, alpha: f64) -> f64 {
        match self.law {
            RadialLaw::PointMass(b0) => (0.25 * (1.0 - b0 * b0)).powf(alpha),
            _ => self
                .radial_measure()
                .expectation(|b| (0.25 * (1.0 - b * b)).max(0.0).powf(alpha)),
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match &self.law {
            RadialLaw::PointMass(b0) if *b0 == 1.0 => "pure".to_string(),
            RadialLaw::PointMass(b0) => format!("point:{b0}"),
            RadialLaw::UniformBall => "uniform".to_string(),
            RadialLaw::Table(t) => format!("table({} rows)", t.b.len()),
        }
    }
}

/// Free-function form of [`IsotropicPrior::moment`].
pub fn moment(prior: &IsotropicPrior, alpha: f64) -> f64 {
    prior.moment(alpha)
}
