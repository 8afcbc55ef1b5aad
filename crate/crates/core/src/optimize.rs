//! Parameter sweeps over the Schmidt family and over prior purity, plus the
//! rotation-invariance check for measurements.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{delta_f1, delta_f2, delta_i1, delta_i2, schmidt_gain_with};
use crate::error::{Error, Result};
use crate::infogain::{average_gain_with, fmt_f64, GainSettings};
use crate::povm::Povm;
use crate::priors::{prior_point_mass, IsotropicPrior};
use crate::quadrature::QuadratureOrders;
use crate::sampling::{random_unitary, seeded_rng};

/// Values within this of the maximum count as maximal.
pub const TIE_TOL: f64 = 1e-9;

/// Sampled curve with the indices of its maxima.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax: Vec<usize>,
}

impl SweepResult {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: abscissae.len(),
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sweep value at x = {} is not finite",
                abscissae[bad]
            )));
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let argmax = (0..values.len())
            .filter(|&i| values[i] >= max - TIE_TOL)
            .collect();
        Ok(Self {
            abscissae,
            values,
            argmax,
        })
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|v_i - v_{n-1-i}|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|i| (self.values[i] - self.values[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// True if each value is at least the previous one minus `tol`.
    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// CSV with the given column names.
    pub fn to_csv_with(&self, x_name: &str, value_name: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([x_name, value_name])?;
        for (x, v) in self.abscissae.iter().zip(&self.values) {
            w.write_record([fmt_f64(*x), fmt_f64(*v)])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// `x,value` CSV.
    pub fn to_csv(&self) -> Result<String> {
        self.to_csv_with("x", "value")
    }
}

/// Evenly spaced points on `[0, 1]`, both ends included.
pub fn unit_grid(points: usize) -> Vec<f64> {
    let last = (points - 1) as f64;
    (0..points).map(|i| i as f64 / last).collect()
}

/// Schmidt-state gain on an odd number of evenly spaced `p ∈ [0, 1]`.
pub fn schmidt_sweep(prior: &IsotropicPrior, points: usize) -> Result<SweepResult> {
    schmidt_sweep_with(prior, points, &QuadratureOrders::default())
}

pub fn schmidt_sweep_with(
    prior: &IsotropicPrior,
    points: usize,
    orders: &QuadratureOrders,
) -> Result<SweepResult> {
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sweep needs an odd number of points >= 3, got {points}"
        )));
    }
    let grid = unit_grid(points);
    let values = grid
        .par_iter()
        .map(|&p| schmidt_gain_with(p, prior, orders))
        .collect::<Result<Vec<f64>>>()?;
    SweepResult::new(grid, values)
}

/// Closed-form gain evaluated on point-mass priors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GainFunctional {
    DeltaI1,
    DeltaI2,
    DeltaF1,
    DeltaF2,
}

impl GainFunctional {
    pub const ALL: [GainFunctional; 4] = [
        GainFunctional::DeltaI1,
        GainFunctional::DeltaI2,
        GainFunctional::DeltaF1,
        GainFunctional::DeltaF2,
    ];

    pub fn eval(self, prior: &IsotropicPrior) -> f64 {
        match self {
            GainFunctional::DeltaI1 => delta_i1(prior),
            GainFunctional::DeltaI2 => delta_i2(prior),
            GainFunctional::DeltaF1 => delta_f1(prior),
            GainFunctional::DeltaF2 => delta_f2(prior),
        }
    }
}

impl fmt::Display for GainFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GainFunctional::DeltaI1 => "di1",
            GainFunctional::DeltaI2 => "di2",
            GainFunctional::DeltaF1 => "df1",
            GainFunctional::DeltaF2 => "df2",
        })
    }
}

impl FromStr for GainFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "di1" => Ok(GainFunctional::DeltaI1),
            "di2" => Ok(GainFunctional::DeltaI2),
            "df1" => Ok(GainFunctional::DeltaF1),
            "df2" => Ok(GainFunctional::DeltaF2),
            other => Err(Error::Parse(format!(
                "unknown gain '{other}', expected di1, di2, df1 or df2"
            ))),
        }
    }
}

/// `gain` over point-mass priors at each radius in `grid`.
pub fn purity_scan(gain: GainFunctional, grid: &[f64]) -> Result<SweepResult> {
    let values = grid
        .iter()
        .map(|&b0| prior_point_mass(b0).map(|p| gain.eval(&p)))
        .collect::<Result<Vec<f64>>>()?;
    SweepResult::new(grid.to_vec(), values)
}

/// Largest change of the average gain over `trials` random global rotations
/// `U^{⊗n}` of the measurement.
pub fn rotation_invariance_check(
    m: &Povm,
    prior: &IsotropicPrior,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    rotation_invariance_check_with(m, prior, n, trials, seed, &GainSettings::default())
}

pub fn rotation_invariance_check_with(
    m: &Povm,
    prior: &IsotropicPrior,
    n: usize,
    trials: usize,
    seed: u64,
    settings: &GainSettings,
) -> Result<f64> {
    let base = average_gain_with(m, prior, n, settings)?.average_gain;
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let u = random_unitary(&mut rng, 2);
        let gain = average_gain_with(&m.rotated(&u)?, prior, n, settings)?.average_gain;
        worst = worst.max((gain - base).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{von_neumann_z, PovmElement};
    use crate::priors::{prior_pure, prior_uniform_ball};
    use crate::qmat::CMatrix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn argmax_and_ties() {
        let s = SweepResult::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.5, 1.0 - 1e-12]).unwrap();
        assert_eq!(s.argmax, vec![0, 2]);
        assert!(SweepResult::new(vec![0.0], vec![f64::NAN]).is_err());
        assert!(SweepResult::new(vec![0.0], vec![]).is_err());
        assert_eq!(s.to_csv().unwrap().lines().next(), Some("x,value"));
    }

    #[test]
    fn schmidt_sweep_prefers_products() {
        for prior in [prior_pure(), prior_uniform_ball()] {
            let s = schmidt_sweep(&prior, 11).unwrap();
            assert_eq!(s.argmax, vec![0, 10]);
            assert!(s.asymmetry() < 1e-8);
        }
        assert!(schmidt_sweep(&prior_pure(), 4).is_err());
        assert!(schmidt_sweep(&prior_pure(), 1).is_err());
    }

    #[test]
    fn purity_scan_examples() {
        let s = purity_scan(GainFunctional::DeltaI1, &[0.0, 0.5, 1.0]).unwrap();
        assert!(s.is_nondecreasing(0.0));
        assert_eq!(s.argmax, vec![2]);
        assert_abs_diff_eq!(s.values[0], 0.0, epsilon = 1e-15);
        let s = purity_scan(GainFunctional::DeltaF2, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(s.argmax, vec![2]);
        assert!(purity_scan(GainFunctional::DeltaI1, &[1.5]).is_err());
        assert_eq!(
            "df1".parse::<GainFunctional>().unwrap(),
            GainFunctional::DeltaF1
        );
    }

    #[test]
    fn rotations() {
        let dev = rotation_invariance_check(&von_neumann_z(), &prior_pure(), 1, 10, 3).unwrap();
        assert!(dev <= 1e-8, "{dev}");
        let trivial = Povm::new(vec![PovmElement::new("1", CMatrix::identity(2))]).unwrap();
        let dev = rotation_invariance_check(&trivial, &prior_uniform_ball(), 1, 3, 3).unwrap();
        assert_eq!(dev, 0.0);
    }
}
