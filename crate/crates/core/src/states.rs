//! Bloch-parameterized qubit states, their `n`-copy products, and the fidelity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::Povm;
use crate::qmat::{c, herm_eig, kron_power, psd_sqrt, CMatrix};

/// Slack allowed on `|b| ≤ 1`.
pub const BLOCH_NORM_TOL: f64 = 1e-12;

/// Largest supported number of copies (`2^8 = 256` dimensional registers).
pub const MAX_COPIES: usize = 8;

const DET_CLAMP: f64 = 1e-14;

/// Bloch vector `b⃗` with `|b⃗| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + BLOCH_NORM_TOL {
            return Err(Error::BlochNormExceeded(norm));
        }
        Ok(v)
    }

    /// `b (sinθ cosφ, sinθ sinφ, cosθ)` with `μ = cosθ`.
    pub fn from_polar(b: f64, mu: f64, phi: f64) -> Result<Self> {
        let st = (1.0 - mu * mu).max(0.0).sqrt();
        Self::new(b * st * phi.cos(), b * st * phi.sin(), b * mu)
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(self, other: BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn scaled(self, s: f64) -> Result<Self> {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// `(I + x σx + y σy + z σz)/2` as a dense 2×2 matrix. No norm check.
pub fn bloch_matrix(v: [f64; 3]) -> CMatrix {
    let [x, y, z] = v;
    CMatrix::from_row_major(&[
        c(0.5 * (1.0 + z), 0.0),
        c(0.5 * x, -0.5 * y),
        c(0.5 * x, 0.5 * y),
        c(0.5 * (1.0 - z), 0.0),
    ])
}

/// A qubit density matrix together with its Bloch vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitState {
    bloch: BlochVector,
    matrix: CMatrix,
}

impl QubitState {
    pub fn new(bloch: BlochVector) -> Self {
        Self {
            bloch,
            matrix: bloch_matrix(bloch.to_array()),
        }
    }

    pub fn bloch(&self) -> BlochVector {
        self.bloch
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `det ρ = (1 - b²)/4`
    pub fn det(&self) -> f64 {
        0.25 * (1.0 - self.bloch.dot(self.bloch))
    }

    /// `Tr ρ² = (1 + b²)/2`
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.bloch.dot(self.bloch))
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.bloch.norm() - 1.0).abs() <= tol
    }

    /// `ρ` is invertible iff `b < 1`.
    pub fn is_invertible(&self) -> bool {
        self.bloch.norm() < 1.0
    }
}

pub fn rho_from_bloch(b: BlochVector) -> QubitState {
    QubitState::new(b)
}

/// `ρ^{⊗n}` for `1 ≤ n ≤ MAX_COPIES`.
pub fn n_copies(rho: &QubitState, n: usize) -> Result<CMatrix> {
    if n == 0 || n > MAX_COPIES {
        return Err(Error::CopyCountOutOfRange(n));
    }
    Ok(kron_power(rho.matrix(), n))
}

/// Qubit fidelity through `Tr(ρρ') + 2√(det ρ · det ρ')`.
pub fn fidelity(a: &QubitState, b: &QubitState) -> f64 {
    let overlap = 0.5 * (1.0 + a.bloch.dot(b.bloch));
    let det_a = clamp_det(a.det());
    let det_b = clamp_det(b.det());
    (overlap + 2.0 * (det_a * det_b).sqrt()).clamp(0.0, 1.0)
}

/// Determinants within a few ulps of zero are roundoff from `1 - b²` and are
/// treated as exactly zero; their square root would otherwise be `~1e-8`.
fn clamp_det(d: f64) -> f64 {
    debug_assert!(d > -DET_CLAMP, "determinant {d} below roundoff");
    if d <= 4.0 * f64::EPSILON {
        0.0
    } else {
        d
    }
}

/// General fidelity `(Tr √(√ρ σ √ρ))²` for density matrices of any dimension.
pub fn uhlmann_fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let root = psd_sqrt(rho)?;
    let inner = root.conjugate(sigma).hermitian_part();
    let spectrum = herm_eig(&inner)?;
    let tr: f64 = spectrum.values.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(tr * tr)
}

/// `(Σ_j √Tr[ρM_j] √Tr[ρ'M_j])²` for a single-qubit POVM.
pub fn wootters_overlap(a: &QubitState, b: &QubitState, m: &Povm) -> Result<f64> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.dim(),
        });
    }
    let sum: f64 = m
        .elements()
        .iter()
        .map(|e| {
            let pa = a.matrix.trace_product(e.operator()).re.max(0.0);
            let pb = b.matrix.trace_product(e.operator()).re.max(0.0);
            pa.sqrt() * pb.sqrt()
        })
        .sum();
    Ok(sum * sum)
}
