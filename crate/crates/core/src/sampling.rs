//! Seeded random states, unitaries, measurements and priors for invariance
//! checks.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::povm::{Povm, PovmElement};
use crate::priors::{prior_from_table, IsotropicPrior};
use crate::qmat::{c, herm_eig, CMatrix};
use crate::states::BlochVector;

/// Deterministic generator used throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random `d`-dimensional complex vector with Gaussian entries.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<num_complex::Complex64> {
    (0..d).map(|_| gaussian_complex(rng)).collect()
}

/// Random unitary from a complex Gaussian matrix by Gram-Schmidt on its columns.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let mut cols: Vec<Vec<num_complex::Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = random_vector(rng, d);
        for u in &cols {
            let proj: num_complex::Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    CMatrix::from_fn(d, |i, j| cols[j][i])
}

/// The rotation `R` with `U σ⃗·n̂ U† = σ⃗·(R n̂)` for a qubit unitary `U`.
pub fn bloch_rotation(u: &CMatrix) -> [[f64; 3]; 3] {
    let paulis = [
        crate::qmat::pauli::x(),
        crate::qmat::pauli::y(),
        crate::qmat::pauli::z(),
    ];
    let mut r = [[0.0; 3]; 3];
    for (j, pj) in paulis.iter().enumerate() {
        let rotated = u.conjugate(pj);
        for (i, pi) in paulis.iter().enumerate() {
            r[i][j] = 0.5 * pi.trace_product(&rotated).re;
        }
    }
    r
}

/// Uniform point in the unit ball.
pub fn random_bloch_in_ball<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    let dir = random_pure_bloch(rng);
    let radius = rng.random::<f64>().cbrt();
    BlochVector {
        x: dir.x * radius,
        y: dir.y * radius,
        z: dir.z * radius,
    }
}

/// Uniform point on the unit sphere.
pub fn random_pure_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-8 {
            return BlochVector {
                x: v[0] / norm,
                y: v[1] / norm,
                z: v[2] / norm,
            };
        }
    }
}

/// Random positive operator `G G†` of the given rank.
pub fn random_positive<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d);
    for _ in 0..rank {
        m = &m + &CMatrix::outer(&random_vector(rng, d));
    }
    m
}

/// `S^{-1/2} A_j S^{-1/2}` with `S = Σ A_j`, which resolves the identity.
pub fn normalize_to_povm(parts: Vec<CMatrix>) -> Result<Povm> {
    let d = parts[0].dim();
    let mut total = CMatrix::zeros(d);
    for a in &parts {
        total = &total + a;
    }
    let inv_root = herm_eig(&total)?.map_spectrum(|l| 1.0 / l.sqrt());
    let elements = parts
        .iter()
        .enumerate()
        .map(|(j, a)| {
            PovmElement::new(
                format!("m{}", j + 1),
                inv_root.conjugate(a).hermitian_part(),
            )
        })
        .collect();
    Povm::new(elements)
}

/// Random POVM on `d` dimensions with `outcomes` elements of rank `rank`.
/// Needs `outcomes · rank ≥ d` for the elements to span the space.
pub fn random_povm<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    outcomes: usize,
    rank: usize,
) -> Result<Povm> {
    let parts = (0..outcomes)
        .map(|_| random_positive(rng, d, rank))
        .collect();
    normalize_to_povm(parts)
}

/// Splits `M` into `M^{1/2} T M^{1/2}` and `M^{1/2} (I - T) M^{1/2}` for a random `0 ≤ T ≤ I`.
pub fn random_split<R: Rng + ?Sized>(rng: &mut R, m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let d = m.dim();
    let u = random_unitary(rng, d);
    let diag: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let t = u.conjugate(&CMatrix::from_real_diagonal(&diag));
    let root = crate::qmat::psd_sqrt(m)?;
    let first = root.conjugate(&t).hermitian_part();
    let second = (m - &first).hermitian_part();
    Ok((first, second))
}

/// Table prior on an even grid of `rows` points with random nonnegative values.
pub fn random_table_prior<R: Rng + ?Sized>(rng: &mut R, rows: usize) -> Result<IsotropicPrior> {
    let last = (rows - 1) as f64;
    let table: Vec<(f64, f64)> = (0..rows)
        .map(|k| (k as f64 / last, 0.05 + rng.random::<f64>()))
        .collect();
    prior_from_table(&table)
}
