//! POVM construction, validation, and the two refinement procedures that
//! never lower the average information gain: spectral (rank-one) splitting
//! and projection onto spin blocks.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{c, herm_eig, kron, kron_power, CMatrix, ZERO};
use crate::spin::spin_blocks;
use crate::states::{bloch_matrix, BlochVector, MAX_COPIES};

/// Completeness and positivity tolerance applied by [`Povm::new`].
pub const POVM_TOL: f64 = 1e-10;

/// Spectral pieces or block projections with trace below this are dropped.
pub const NEGLIGIBLE_TRACE: f64 = 1e-12;

/// Eigenvalues above this count towards an element's rank.
pub const RANK_TOL: f64 = 1e-10;

/// A labeled positive operator.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmElement {
    label: String,
    operator: CMatrix,
}

impl PovmElement {
    pub fn new(label: impl Into<String>, operator: CMatrix) -> Self {
        Self {
            label: label.into(),
            operator,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn operator(&self) -> &CMatrix {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }
}

/// Per-element minimum eigenvalues and the completeness residual.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub min_eigenvalues: Vec<f64>,
    /// `max |Σ_i M_i - I|` entrywise.
    pub completeness_residual: f64,
    /// Worst `max |M_i - M_i†|` over elements.
    pub hermiticity_residual: f64,
}

impl ValidationReport {
    pub fn is_valid(&self, tol: f64) -> bool {
        self.hermiticity_residual <= tol
            && self.completeness_residual <= tol
            && self.min_eigenvalues.iter().all(|&l| l >= -tol)
    }
}

/// An ordered set of positive operators resolving the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<PovmElement>,
}

/// Inspects arbitrary elements without rejecting them.
pub fn validate_elements(elements: &[PovmElement]) -> ValidationReport {
    let dim = elements.first().map_or(1, |e| e.dim());
    let mut sum = CMatrix::zeros(dim);
    let mut min_eigenvalues = Vec::with_capacity(elements.len());
    let mut herm = 0.0f64;
    for e in elements {
        let op = e.operator();
        if op.dim() != dim {
            min_eigenvalues.push(f64::NAN);
            herm = f64::INFINITY;
            continue;
        }
        herm = herm.max(op.hermiticity_residual());
        let min = herm_eig(&op.hermitian_part()).map_or(f64::NAN, |eig| eig.min());
        min_eigenvalues.push(min);
        sum = &sum + op;
    }
    ValidationReport {
        min_eigenvalues,
        completeness_residual: sum.max_abs_diff(&CMatrix::identity(dim)),
        hermiticity_residual: herm,
    }
}

impl Povm {
    /// Builds a POVM, rejecting non-positive elements and incomplete sets.
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("a POVM needs at least one element".into()))?;
        let dim = first.dim();
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            e.operator().ensure_hermitian()?;
        }
        let report = validate_elements(&elements);
        for (e, &min) in elements.iter().zip(&report.min_eigenvalues) {
            if min.is_nan() || min < -POVM_TOL {
                return Err(Error::NonPositiveElement {
                    label: e.label().to_string(),
                    min_eigenvalue: min,
                });
            }
        }
        if report.completeness_residual > POVM_TOL {
            return Err(Error::IncompletePovm {
                residual: report.completeness_residual,
            });
        }
        Ok(Self { dim, elements })
    }

    /// Wraps elements without validation; use [`Povm::validate`] to inspect them.
    pub fn new_unchecked(elements: Vec<PovmElement>) -> Self {
        let dim = elements.first().map_or(1, |e| e.dim());
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of qubit copies `n` with `dim = 2^n`, if `dim` is a power of two.
    pub fn copies(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
            .filter(|&n| n >= 1)
    }

    pub fn validate(&self, _tol: f64) -> ValidationReport {
        validate_elements(&self.elements)
    }

    /// Conjugates every element by `U^{⊗n}` for a single-qubit unitary `u`.
    pub fn rotated(&self, u: &CMatrix) -> Result<Povm> {
        let n = self.copies().ok_or(Error::DimensionMismatch {
            expected: 2,
            found: self.dim,
        })?;
        let un = kron_power(u, n);
        let elements = self
            .elements
            .iter()
            .map(|e| PovmElement::new(e.label(), un.conjugate(e.operator()).hermitian_part()))
            .collect();
        Ok(Povm {
            dim: self.dim,
            elements,
        })
    }

    /// Reads `label,row,col,re,im` rows; an optional header line is skipped.
    pub fn from_csv_reader(reader: impl Read) -> Result<Povm> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut order: Vec<String> = Vec::new();
        let mut entries: Vec<(usize, usize, usize, Complex64)> = Vec::new();
        let mut max_index = 0usize;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 5 {
                return Err(Error::Parse(format!(
                    "POVM row {} has {} fields, expected 5",
                    line + 1,
                    rec.len()
                )));
            }
            if line == 0 && &rec[0] == "label" {
                continue;
            }
            let num = |k: usize| -> Result<f64> {
                rec[k].parse::<f64>().map_err(|_| {
                    Error::Parse(format!("row {}: bad number '{}'", line + 1, &rec[k]))
                })
            };
            let idx = |k: usize| -> Result<usize> {
                rec[k]
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("row {}: bad index '{}'", line + 1, &rec[k])))
            };
            let label = rec[0].to_string();
            let slot = match order.iter().position(|l| *l == label) {
                Some(p) => p,
                None => {
                    order.push(label);
                    order.len() - 1
                }
            };
            let (row, col) = (idx(1)?, idx(2)?);
            max_index = max_index.max(row).max(col);
            entries.push((slot, row, col, c(num(3)?, num(4)?)));
        }
        if order.is_empty() {
            return Err(Error::Parse("POVM file has no entries".into()));
        }
        let dim = max_index + 1;
        if !dim.is_power_of_two() || !(2..=1 << MAX_COPIES).contains(&dim) {
            return Err(Error::Parse(format!(
                "POVM dimension {dim} is not 2^n with 1 <= n <= {MAX_COPIES}"
            )));
        }
        let mut ops = vec![CMatrix::zeros(dim); order.len()];
        for (slot, row, col, z) in entries {
            ops[slot].set(row, col, z);
        }
        Povm::new(
            order
                .into_iter()
                .zip(ops)
                .map(|(l, m)| PovmElement::new(l, m))
                .collect(),
        )
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Povm> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Serializes nonzero entries as `label,row,col,re,im` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,row,col,re,im\n");
        for e in &self.elements {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let z = e.operator().get(i, j);
                    if z != ZERO {
                        let _ = writeln!(out, "{},{},{},{:e},{:e}", e.label(), i, j, z.re, z.im);
                    }
                }
            }
        }
        out
    }
}

/// Projective measurement of `σ_z`: outcomes `+` and `-`.
pub fn von_neumann_z() -> Povm {
    Povm {
        dim: 2,
        elements: vec![
            PovmElement::new("+", CMatrix::from_real_diagonal(&[1.0, 0.0])),
            PovmElement::new("-", CMatrix::from_real_diagonal(&[0.0, 1.0])),
        ],
    }
}

/// Unit vectors to the vertices of the even-parity regular tetrahedron.
pub fn tetrahedron_vertices() -> [BlochVector; 4] {
    let s = 1.0 / 3f64.sqrt();
    [
        BlochVector { x: s, y: s, z: s },
        BlochVector { x: s, y: -s, z: -s },
        BlochVector { x: -s, y: s, z: -s },
        BlochVector { x: -s, y: -s, z: s },
    ]
}

/// `|σ⟩⟨σ|` with `|σ⟩ = (|01⟩ - |10⟩)/√2`.
pub fn singlet_projector() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::outer(&[ZERO, c(s, 0.0), c(-s, 0.0), ZERO])
}

/// Two-copy measurement: the singlet projector plus `(3/4)(|n̂⟩⟨n̂|)^{⊗2}`
/// for the four given directions. The directions must form a regular
/// tetrahedron for the elements to resolve the identity.
pub fn tetrahedron_povm_with(vertices: &[BlochVector; 4]) -> Result<Povm> {
    let mut elements = vec![PovmElement::new("singlet", singlet_projector())];
    for (k, n) in vertices.iter().enumerate() {
        let p = bloch_matrix(n.to_array());
        elements.push(PovmElement::new(
            format!("n{}", k + 1),
            kron(&p, &p).scale(0.75),
        ));
    }
    Povm::new(elements)
}

pub fn tetrahedron_povm() -> Povm {
    tetrahedron_povm_with(&tetrahedron_vertices()).expect("tetrahedron resolves the identity")
}

/// Replaces each element by its spectral pieces `λ_k |v_k⟩⟨v_k|`.
pub fn rank_one_refinement(m: &Povm) -> Result<Povm> {
    let mut out = Vec::new();
    for e in m.elements() {
        let eig = herm_eig(e.operator())?;
        let mut pieces: Vec<(f64, Vec<Complex64>)> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > NEGLIGIBLE_TRACE)
            .map(|(k, &l)| (l, eig.vector(k)))
            .collect();
        pieces.reverse();
        let single = pieces.len() == 1;
        for (k, (lam, v)) in pieces.into_iter().enumerate() {
            let label = if single {
                e.label().to_string()
            } else {
                format!("{}#{}", e.label(), k + 1)
            };
            out.push(PovmElement::new(label, CMatrix::outer(&v).scale(lam)));
        }
    }
    Povm::new(out)
}

/// Projects each rank-one element onto every spin block of `n` copies.
pub fn spin_block_refinement(m: &Povm, n: usize) -> Result<Povm> {
    let dim = 1usize << n.min(usize::BITS as usize - 1);
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    let blocks = spin_blocks(n)?;
    let mut out = Vec::new();
    for e in m.elements() {
        let eig = herm_eig(e.operator())?;
        let rank = eig.rank(RANK_TOL);
        if rank > 1 {
            return Err(Error::RankNotOne {
                label: e.label().to_string(),
                rank,
            });
        }
        let pieces: Vec<(String, CMatrix)> = blocks
            .iter()
            .map(|b| {
                let p = b.projector();
                let piece = p.conjugate(e.operator()).hermitian_part();
                (b.label_string(), piece)
            })
            .filter(|(_, piece)| piece.trace().re >= NEGLIGIBLE_TRACE)
            .collect();
        let single = pieces.len() == 1;
        for (block_label, piece) in pieces {
            let label = if single {
                e.label().to_string()
            } else {
                format!("{}|{}", e.label(), block_label)
            };
            out.push(PovmElement::new(label, piece));
        }
    }
    Povm::new(out)
}
