//! Spin operators on `n` qubits and the decomposition of the register into
//! simultaneous eigenspaces of the partial Casimirs `S²_(α)`.
//!
//! Sites are numbered `1..=n` (site 1 is `A`). The partial spin `S_(α)` sums
//! the local spins of sites `1..=α`; `S_(n)` is the total spin. Because every
//! `S²_(α)` commutes with `ρ^{⊗n}` and with each other, the register splits
//! into blocks labeled by the chain `(s_(n), …, s_(2))`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{c, herm_eig, kron, pauli, CMatrix, ONE, ZERO};
use crate::states::MAX_COPIES;

/// Largest `n` for which the full block decomposition is built.
pub const MAX_BLOCK_COPIES: usize = 6;

/// Tolerance when matching an eigenvalue to `s(s+1)`.
pub const CASIMIR_TOL: f64 = 1e-8;

/// Cartesian components of a spin operator.
#[derive(Clone, Debug)]
pub struct SpinVector {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl SpinVector {
    /// `Sx² + Sy² + Sz²`
    pub fn squared(&self) -> CMatrix {
        let xx = &self.x * &self.x;
        let yy = &self.y * &self.y;
        let zz = &self.z * &self.z;
        &(&xx + &yy) + &zz
    }

    fn add(&self, other: &SpinVector) -> SpinVector {
        SpinVector {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
            z: &self.z + &other.z,
        }
    }
}

/// A spin quantum number stored as `2s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin(pub u32);

impl Spin {
    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// `s(s+1)`
    pub fn casimir(self) -> f64 {
        let s = self.value();
        s * (s + 1.0)
    }

    /// Inverts `λ = s(s+1)`; fails if `λ` is not within `CASIMIR_TOL` of such a value.
    pub fn from_casimir(lambda: f64) -> Result<Spin> {
        let twice = ((1.0 + 4.0 * lambda.max(0.0)).sqrt() - 1.0).round();
        let spin = Spin(twice as u32);
        if (spin.casimir() - lambda).abs() > CASIMIR_TOL {
            return Err(Error::NotACasimirValue(lambda));
        }
        Ok(spin)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn check_site(n: usize, site: usize) -> Result<()> {
    if n == 0 || n > MAX_COPIES {
        return Err(Error::CopyCountOutOfRange(n));
    }
    if site == 0 || site > n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    Ok(())
}

fn embed(op: &CMatrix, n: usize, site: usize) -> CMatrix {
    let left = 1usize << (site - 1);
    let right = 1usize << (n - site);
    let mut out = kron(&CMatrix::identity(left), op);
    out = kron(&out, &CMatrix::identity(right));
    out
}

/// `σ/2` acting on `site`, identity elsewhere.
pub fn local_spin(n: usize, site: usize) -> Result<SpinVector> {
    check_site(n, site)?;
    Ok(SpinVector {
        x: embed(&pauli::x().scale(0.5), n, site),
        y: embed(&pauli::y().scale(0.5), n, site),
        z: embed(&pauli::z().scale(0.5), n, site),
    })
}

/// `S_(upto) = Σ_{β ≤ upto} S_β`
pub fn partial_spin(n: usize, upto: usize) -> Result<SpinVector> {
    check_site(n, upto)?;
    let mut acc = local_spin(n, 1)?;
    for site in 2..=upto {
        acc = acc.add(&local_spin(n, site)?);
    }
    Ok(acc)
}

/// `S²_(upto)`
pub fn partial_spin_sq(n: usize, upto: usize) -> Result<CMatrix> {
    Ok(partial_spin(n, upto)?.squared())
}

/// A simultaneous eigenspace of `S²_(2), …, S²_(n)`.
#[derive(Clone, Debug)]
pub struct SpinBlock {
    /// `(s_(n), s_(n-1), …, s_(2))`; empty for a single qubit.
    labels: Vec<Spin>,
    projector: CMatrix,
    dimension: usize,
}

impl SpinBlock {
    pub fn labels(&self) -> &[Spin] {
        &self.labels
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Total spin `s_(n)`; `1/2` for a single qubit.
    pub fn total_spin(&self) -> Spin {
        self.labels.first().copied().unwrap_or(Spin(1))
    }

    pub fn label_string(&self) -> String {
        if self.labels.is_empty() {
            return "s=1/2".to_string();
        }
        let parts: Vec<String> = self.labels.iter().map(|s| s.to_string()).collect();
        format!("s=({})", parts.join(","))
    }
}

struct PartialBlock {
    // labels in increasing α order while refining
    labels: Vec<Spin>,
    basis: Vec<Vec<Complex64>>,
}

fn column_matrix(dim: usize, basis: &[Vec<Complex64>]) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(dim, basis.len(), |i, k| basis[k][i])
}

/// Simultaneous eigenspaces of all `S²_(α)`, `α = 2..=n`, ordered by
/// decreasing label chain (largest total spin first).
pub fn spin_blocks(n: usize) -> Result<Vec<SpinBlock>> {
    if n == 0 || n > MAX_BLOCK_COPIES {
        return Err(Error::CopyCountOutOfRange(n));
    }
    let dim = 1usize << n;
    let identity_basis: Vec<Vec<Complex64>> = (0..dim)
        .map(|k| (0..dim).map(|i| if i == k { ONE } else { ZERO }).collect())
        .collect();
    let mut blocks = vec![PartialBlock {
        labels: Vec::new(),
        basis: identity_basis,
    }];

    for alpha in 2..=n {
        let casimir = partial_spin_sq(n, alpha)?;
        let casimir = casimir.as_dmatrix();
        let mut refined = Vec::new();
        for block in blocks {
            let v = column_matrix(dim, &block.basis);
            let restricted = CMatrix::from_dmatrix(v.adjoint() * casimir * &v);
            let eig = herm_eig(&restricted.hermitian_part())?;
            let mut groups: Vec<(Spin, Vec<Vec<Complex64>>)> = Vec::new();
            for (k, &lam) in eig.values.iter().enumerate() {
                let spin = Spin::from_casimir(lam)?;
                let w = eig.vector(k);
                let lifted: Vec<Complex64> = (0..dim)
                    .map(|i| (0..w.len()).map(|j| v[(i, j)] * w[j]).sum())
                    .collect();
                match groups.iter_mut().find(|(s, _)| *s == spin) {
                    Some((_, vs)) => vs.push(lifted),
                    None => groups.push((spin, vec![lifted])),
                }
            }
            for (spin, basis) in groups {
                let mut labels = block.labels.clone();
                labels.push(spin);
                refined.push(PartialBlock { labels, basis });
            }
        }
        blocks = refined;
    }

    let mut out: Vec<SpinBlock> = blocks
        .into_iter()
        .map(|b| {
            let v = column_matrix(dim, &b.basis);
            let projector = CMatrix::from_dmatrix(&v * v.adjoint());
            let mut labels = b.labels;
            labels.reverse();
            SpinBlock {
                labels,
                dimension: b.basis.len(),
                projector,
            }
        })
        .collect();
    out.sort_by(|a, b| b.labels.cmp(&a.labels));
    for pair in out.windows(2) {
        if pair[0].labels == pair[1].labels {
            return Err(Error::DuplicateSpinLabels(pair[0].label_string()));
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Projector onto the fully symmetric subspace of `n` qubits (rank `n+1`),
/// assembled from normalized Dicke states.
pub fn symmetric_projector(n: usize) -> Result<CMatrix> {
    if n == 0 || n > MAX_COPIES {
        return Err(Error::CopyCountOutOfRange(n));
    }
    let dim = 1usize << n;
    let weights: Vec<f64> = (0..=n).map(|k| 1.0 / binomial(n, k)).collect();
    Ok(CMatrix::from_fn(dim, |i, j| {
        let (wi, wj) = (i.count_ones(), j.count_ones());
        if wi == wj {
            c(weights[wi as usize], 0.0)
        } else {
            ZERO
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::commutator;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_qubit_spin() {
        let s = local_spin(1, 1).unwrap();
        assert!(s.z.max_abs_diff(&pauli::z().scale(0.5)) < 1e-15);
        assert!(
            partial_spin_sq(1, 1)
                .unwrap()
                .max_abs_diff(&CMatrix::identity(2).scale(0.75))
                < 1e-15
        );
    }

    #[test]
    fn site_a_of_two() {
        let s = local_spin(2, 1).unwrap();
        assert!(s.z.max_abs_diff(&CMatrix::from_real_diagonal(&[0.5, 0.5, -0.5, -0.5])) < 1e-15);
        assert!(
            partial_spin_sq(2, 1)
                .unwrap()
                .max_abs_diff(&CMatrix::identity(4).scale(0.75))
                < 1e-15
        );
    }

    #[test]
    fn su2_algebra() {
        for site in 1..=3 {
            let s = local_spin(3, site).unwrap();
            let lhs = commutator(&s.x, &s.y);
            assert!(lhs.max_abs_diff(&s.z.scale_complex(c(0.0, 1.0))) < 1e-14);
        }
    }

    #[test]
    fn site_errors() {
        assert!(matches!(
            local_spin(2, 3),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            local_spin(2, 0),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            partial_spin_sq(9, 1),
            Err(Error::CopyCountOutOfRange(9))
        ));
    }

    #[test]
    fn two_qubit_total_spin_spectrum() {
        let e = herm_eig(&partial_spin_sq(2, 2).unwrap()).unwrap();
        let expect = [0.0, 2.0, 2.0, 2.0];
        for (got, want) in e.values.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn block_dimensions() {
        let dims = |n| -> Vec<usize> {
            spin_blocks(n)
                .unwrap()
                .iter()
                .map(|b| b.dimension())
                .collect()
        };
        assert_eq!(dims(1), vec![2]);
        assert_eq!(dims(2), vec![3, 1]);
        assert_eq!(dims(3), vec![4, 2, 2]);
        let n3 = spin_blocks(3).unwrap();
        assert_eq!(n3[0].labels(), &[Spin(3), Spin(2)]);
        assert_eq!(n3[1].labels(), &[Spin(1), Spin(2)]);
        assert_eq!(n3[2].labels(), &[Spin(1), Spin(0)]);
        assert_eq!(dims(4).iter().sum::<usize>(), 16);
        assert!(matches!(spin_blocks(7), Err(Error::CopyCountOutOfRange(7))));
    }

    #[test]
    fn blocks_resolve_identity() {
        for n in 1..=4 {
            let blocks = spin_blocks(n).unwrap();
            let dim = 1 << n;
            let mut sum = CMatrix::zeros(dim);
            for (i, a) in blocks.iter().enumerate() {
                let p = a.projector();
                assert!((p * p).max_abs_diff(p) < 1e-10);
                assert!(p.is_hermitian(1e-12));
                assert_abs_diff_eq!(p.trace().re, a.dimension() as f64, epsilon = 1e-10);
                for b in &blocks[i + 1..] {
                    assert!((p * b.projector()).max_abs() < 1e-10);
                }
                sum = &sum + p;
            }
            assert!(sum.max_abs_diff(&CMatrix::identity(dim)) < 1e-10);
        }
    }

    #[test]
    fn symmetric_projector_ranks() {
        assert_eq!(symmetric_projector(1).unwrap(), CMatrix::identity(2));
        for n in 1..=8 {
            let p = symmetric_projector(n).unwrap();
            assert_abs_diff_eq!(p.trace().re, (n + 1) as f64, epsilon = 1e-10);
        }
        for n in 2..=5 {
            let top = &spin_blocks(n).unwrap()[0];
            assert_eq!(top.total_spin(), Spin(n as u32));
            assert!(
                top.projector()
                    .max_abs_diff(&symmetric_projector(n).unwrap())
                    < 1e-10
            );
        }
    }

    #[test]
    fn spin_display() {
        assert_eq!(Spin(3).to_string(), "3/2");
        assert_eq!(Spin(2).to_string(), "1");
        assert!(Spin::from_casimir(0.5).is_err());
    }
}
