//! The verification suite: every invariant of every module, checked against
//! closed forms or exact identities, reported as a pass/fail table.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, RngExt};
use serde::Serialize;

use crate::analytic::{
    capacity_gain, delta_f1, delta_f2, delta_i1, delta_i2, f_ap, schmidt_gain, schmidt_gain_brute,
    CapacityRow, LOG2_E,
};
use crate::error::Result;
use crate::infogain::{average_gain_with, log_sum_gap, GainReport, GainSettings};
use crate::optimize::{purity_scan, rotation_invariance_check, schmidt_sweep, GainFunctional};
use crate::povm::{
    rank_one_refinement, spin_block_refinement, tetrahedron_povm, tetrahedron_povm_with,
    tetrahedron_vertices, von_neumann_z, Povm, PovmElement,
};
use crate::priors::{prior_point_mass, prior_pure, prior_uniform_ball, IsotropicPrior};
use crate::qmat::{commutator, herm_eig, kron, psd_sqrt, CMatrix};
use crate::quadrature::{Frame, QuadratureOrders};
use crate::sampling::{
    bloch_rotation, random_bloch_in_ball, random_povm, random_pure_bloch, random_split,
    random_table_prior, random_unitary, random_vector, seeded_rng,
};
use crate::spin::{partial_spin_sq, spin_blocks, symmetric_projector};
use crate::states::{
    fidelity, n_copies, rho_from_bloch, uhlmann_fidelity, wootters_overlap, BlochVector, QubitState,
};

/// Default seed for the random parts of the suite.
pub const DEFAULT_SEED: u64 = 7;

/// One line of the verification table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub module: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(module: &'static str, name: &str, passed: bool, detail: String) -> Check {
    Check {
        module,
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Largest deviation and whether it stays within `tol`.
fn within(module: &'static str, name: &str, deviation: f64, tol: f64) -> Check {
    check(
        module,
        name,
        deviation <= tol,
        format!("max deviation {deviation:.3e} (tol {tol:.0e})"),
    )
}

/// The full table of checks.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status}  {:<9} {}: {}", c.module, c.name, c.detail);
        }
        let _ = writeln!(
            out,
            "{} checks, {} passed, {} failed",
            self.checks.len(),
            self.checks.len() - self.failures(),
            self.failures()
        );
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Runs every check with the given seed.
pub fn run_suite(seed: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    checks.extend(qmat_checks(seed)?);
    checks.extend(state_checks(seed)?);
    checks.extend(spin_checks(seed)?);
    checks.extend(prior_checks(seed)?);
    checks.extend(povm_checks(seed)?);
    checks.extend(gain_checks(seed)?);
    checks.extend(theorem_checks(seed)?);
    checks.extend(analytic_checks(seed)?);
    checks.extend(optimize_checks(seed)?);
    Ok(VerifyReport { checks })
}

fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, |_, _| random_vector(rng, 1)[0]);
    (&g + &g.adjoint()).scale(0.5)
}

fn state(b: BlochVector) -> QubitState {
    rho_from_bloch(b)
}

pub fn qmat_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = seeded_rng(seed);
    let mut assoc = 0.0f64;
    let mut trace = 0.0f64;
    for _ in 0..50 {
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 2);
        let c = random_hermitian(&mut rng, 2);
        assoc = assoc.max(kron(&kron(&a, &b), &c).max_abs_diff(&kron(&a, &kron(&b, &c))));
        trace = trace.max((kron(&a, &b).trace() - a.trace() * b.trace()).norm());
    }
    let mut recon = 0.0f64;
    let mut ortho = 0.0f64;
    let mut root = 0.0f64;
    for k in 0..200 {
        let d = [2, 4, 8, 16][k % 4];
        let a = random_hermitian(&mut rng, d);
        let eig = herm_eig(&a)?;
        recon = recon.max(eig.map_spectrum(|l| l).max_abs_diff(&a));
        ortho =
            ortho.max((&eig.vectors.adjoint() * &eig.vectors).max_abs_diff(&CMatrix::identity(d)));
        let p = &a * &a;
        let r = psd_sqrt(&p)?;
        root = root.max((&r * &r).max_abs_diff(&p) / p.max_abs().max(1.0));
    }
    Ok(vec![
        within("qmat", "kron associativity", assoc, 1e-12),
        within("qmat", "kron trace product", trace, 1e-12),
        within("qmat", "eigen reconstruction", recon, 1e-10),
        within("qmat", "eigenvector orthonormality", ortho, 1e-10),
        within("qmat", "psd root squares back", root, 1e-9),
    ])
}

pub fn state_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = seeded_rng(seed.wrapping_add(1));
    let (mut range, mut sym, mut unitary, mut pure, mut copies, mut concave, mut closed) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut overlap = 0.0f64;
    for _ in 0..200 {
        let a = state(random_bloch_in_ball(&mut rng));
        let b = state(random_bloch_in_ball(&mut rng));
        let f = fidelity(&a, &b);
        range = range.max((-f).max(f - 1.0));
        sym = sym.max((f - fidelity(&b, &a)).abs());
        closed = closed.max((uhlmann_fidelity(a.matrix(), b.matrix())? - f).abs());

        let u = random_unitary(&mut rng, 2);
        let fu = uhlmann_fidelity(&u.conjugate(a.matrix()), &u.conjugate(b.matrix()))?;
        unitary = unitary.max((fu - f).abs());

        let dir = random_pure_bloch(&mut rng);
        let psi = state(dir);
        pure = pure.max((fidelity(&psi, &b) - 0.5 * (1.0 + dir.dot(b.bloch()))).abs());

        for n in [2, 3] {
            let fn_ = uhlmann_fidelity(&n_copies(&a, n)?, &n_copies(&b, n)?)?;
            copies = copies.max((fn_ - f.powi(n as i32)).abs());
        }

        let c = state(random_bloch_in_ball(&mut rng));
        let p: f64 = rng.random();
        let mix = BlochVector::from_array(
            [0, 1, 2].map(|k| p * b.bloch().to_array()[k] + (1.0 - p) * c.bloch().to_array()[k]),
        )?;
        let lhs = fidelity(&a, &state(mix));
        let rhs = p * f + (1.0 - p) * fidelity(&a, &c);
        concave = concave.max(rhs - lhs);

        for _ in 0..50 {
            let outcomes = rng.random_range(2..=4);
            let m = random_povm(&mut rng, 2, outcomes, 1)?;
            overlap = overlap.max(f - wootters_overlap(&a, &b, &m)?);
        }
    }
    Ok(vec![
        within("states", "fidelity in [0,1]", range, 1e-9),
        within("states", "fidelity symmetric", sym, 1e-9),
        within("states", "fidelity unitary invariant", unitary, 1e-9),
        within("states", "fidelity with pure state", pure, 1e-9),
        within("states", "fidelity multiplicative on copies", copies, 1e-9),
        within("states", "fidelity concave", concave, 1e-9),
        within("states", "closed form vs matrix root", closed, 1e-10),
        within("states", "overlap bounds fidelity", overlap, 1e-9),
    ])
}

pub fn spin_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = seeded_rng(seed.wrapping_add(2));
    let mut comm_state = 0.0f64;
    let mut comm_mutual = 0.0f64;
    for n in [2usize, 3, 4] {
        let casimirs: Vec<CMatrix> = (1..=n)
            .map(|upto| partial_spin_sq(n, upto))
            .collect::<Result<_>>()?;
        for a in &casimirs {
            for b in &casimirs {
                comm_mutual = comm_mutual.max(commutator(a, b).max_abs());
            }
        }
        for _ in 0..50 {
            let rho = n_copies(&state(random_bloch_in_ball(&mut rng)), n)?;
            for s in &casimirs {
                comm_state = comm_state.max(commutator(s, &rho).max_abs());
            }
        }
    }
    let two: Vec<usize> = spin_blocks(2)?.iter().map(|b| b.dimension()).collect();
    let three: Vec<usize> = spin_blocks(3)?.iter().map(|b| b.dimension()).collect();
    let mut resolution = 0.0f64;
    for n in 1..=4 {
        let blocks = spin_blocks(n)?;
        let mut sum = CMatrix::zeros(1 << n);
        for b in &blocks {
            sum = &sum + b.projector();
            resolution =
                resolution.max((b.projector() * b.projector()).max_abs_diff(b.projector()));
        }
        resolution = resolution.max(sum.max_abs_diff(&CMatrix::identity(1 << n)));
    }
    let mut ranks_ok = true;
    let mut ranks = Vec::new();
    for n in 1..=8 {
        let r = symmetric_projector(n)?.trace().re.round() as usize;
        ranks_ok &= r == n + 1;
        ranks.push(r);
    }
    let top = symmetric_projector(3)?.max_abs_diff(spin_blocks(3)?[0].projector());
    Ok(vec![
        within("spin", "casimirs commute with copies", comm_state, 1e-10),
        within("spin", "casimirs commute mutually", comm_mutual, 1e-10),
        check(
            "spin",
            "two-copy block dimensions",
            two == [3, 1],
            format!("{two:?}"),
        ),
        check(
            "spin",
            "three-copy block dimensions",
            three == [4, 2, 2],
            format!("{three:?}"),
        ),
        within("spin", "blocks resolve identity", resolution, 1e-10),
        check(
            "spin",
            "symmetric projector ranks",
            ranks_ok,
            format!("{ranks:?} for n = 1..8"),
        ),
        within("spin", "symmetric projector is top block", top, 1e-10),
    ])
}

fn sample_priors(seed: u64, tables: usize) -> Result<Vec<IsotropicPrior>> {
    let mut rng = seeded_rng(seed);
    let mut priors = vec![prior_pure(), prior_uniform_ball(), prior_point_mass(0.3)?];
    for _ in 0..tables {
        let rows = rng.random_range(3..=9);
        priors.push(random_table_prior(&mut rng, rows)?);
    }
    Ok(priors)
}

fn random_tables(seed: u64, count: usize) -> Result<Vec<IsotropicPrior>> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let rows = rng.random_range(3..=9);
            random_table_prior(&mut rng, rows)
        })
        .collect()
}

pub fn prior_checks(seed: u64) -> Result<Vec<Check>> {
    let u = prior_uniform_ball();
    let i1 = (u.moment(1.0) - 0.1).abs();
    let ih = (u.moment(0.5) - 3.0 * PI / 32.0).abs();
    let mut norm = 0.0f64;
    let mut ladder = f64::NEG_INFINITY;
    for p in sample_priors(seed.wrapping_add(3), 5)? {
        norm = norm.max((p.moment(0.0) - 1.0).abs());
        for a in [0.0, 0.5, 1.0, 1.5] {
            ladder = ladder.max(4.0 * p.moment(a + 1.0) - p.moment(a));
        }
    }
    Ok(vec![
        within("priors", "uniform ball I_1 = 1/10", i1, 1e-9),
        within("priors", "uniform ball I_1/2 = 3pi/32", ih, 1e-9),
        within("priors", "normalization I_0 = 1", norm, 1e-8),
        within(
            "priors",
            "moment ladder I_a >= 4 I_(a+1)",
            ladder.max(0.0),
            1e-12,
        ),
    ])
}

pub fn povm_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = seeded_rng(seed.wrapping_add(4));
    let t = tetrahedron_povm();
    let residual = t.validate(1e-12).completeness_residual;
    let verts = tetrahedron_vertices();
    let mut posterior = 0.0f64;
    for _ in 0..100 {
        let b = random_bloch_in_ball(&mut rng);
        let rho2 = n_copies(&state(b), 2)?;
        let bb = b.dot(b);
        posterior = posterior
            .max((rho2.trace_product(t.elements()[0].operator()).re - 0.25 * (1.0 - bb)).abs());
        for (e, n) in t.elements()[1..].iter().zip(verts) {
            let want = 3.0 / 16.0 * (1.0 + b.dot(n)).powi(2);
            posterior = posterior.max((rho2.trace_product(e.operator()).re - want).abs());
        }
    }
    let mut completeness = 0.0f64;
    let mut sum_rule = 0.0f64;
    for _ in 0..20 {
        let m = random_povm(&mut rng, 4, 3, 2)?;
        let r1 = rank_one_refinement(&m)?;
        let r2 = spin_block_refinement(&r1, 2)?;
        for r in [&r1, &r2] {
            let rep = r.validate(1e-10);
            completeness = completeness.max(rep.completeness_residual);
            completeness =
                completeness.max(-rep.min_eigenvalues.iter().copied().fold(0.0, f64::min));
        }
        let rho = n_copies(&state(random_bloch_in_ball(&mut rng)), 2)?;
        for (parent, e) in m.elements().iter().enumerate() {
            let whole = rho.trace_product(e.operator()).re;
            let prefix = format!("m{}", parent + 1);
            let pieces: f64 = r2
                .elements()
                .iter()
                .filter(|p| {
                    let rest = p.label().strip_prefix(&prefix);
                    matches!(rest, Some(r) if r.is_empty() || r.starts_with(['#', '|']))
                })
                .map(|p| rho.trace_product(p.operator()).re)
                .sum();
            sum_rule = sum_rule.max((whole - pieces).abs());
        }
    }
    Ok(vec![
        within("povm", "tetrahedron completeness", residual, 1e-12),
        within(
            "povm",
            "tetrahedron outcome probabilities",
            posterior,
            1e-12,
        ),
        within(
            "povm",
            "refinements stay complete and positive",
            completeness,
            1e-10,
        ),
        within("povm", "refinement probability sum rule", sum_rule, 1e-10),
    ])
}

fn gain(m: &Povm, prior: &IsotropicPrior, n: usize) -> Result<GainReport> {
    average_gain_with(m, prior, n, &GainSettings::default())
}

pub fn gain_checks(seed: u64) -> Result<Vec<Check>> {
    let vn_pure = gain(&von_neumann_z(), &prior_pure(), 1)?.average_gain;
    let tet_pure = gain(&tetrahedron_povm(), &prior_pure(), 2)?.average_gain;
    let mut apriori = 0.0f64;
    let mut kl_min = 0.0f64;
    let mut entropy = 0.0f64;
    let mut tetra_ap = 0.0f64;
    let mut priors = vec![prior_uniform_ball()];
    priors.extend(random_tables(seed.wrapping_add(5), 3)?);
    for p in priors
        .iter()
        .chain([prior_pure(), prior_point_mass(0.4)?].iter())
    {
        for (m, n) in [(von_neumann_z(), 1), (tetrahedron_povm(), 2)] {
            let r = gain(&m, p, n)?;
            apriori = apriori.max((r.total_probability() - 1.0).abs());
            for o in &r.outcomes {
                kl_min = kl_min.max(-o.k_bits);
            }
            if let Some(h) = r.entropy_difference {
                entropy = entropy.max((h - r.average_gain).abs());
            }
            if n == 2 {
                let i1 = p.moment(1.0);
                tetra_ap = tetra_ap.max((r.outcomes[0].p_ap - i1).abs());
                for o in &r.outcomes[1..] {
                    tetra_ap = tetra_ap.max((o.p_ap - 0.25 * (1.0 - i1)).abs());
                }
            }
        }
    }
    let mut convergence = 0.0f64;
    let doubled = GainSettings::with_orders(QuadratureOrders::default().doubled());
    for p in [prior_pure(), prior_uniform_ball()] {
        for (m, n) in [(von_neumann_z(), 1), (tetrahedron_povm(), 2)] {
            let base = gain(&m, &p, n)?.average_gain;
            let fine = average_gain_with(&m, &p, n, &doubled)?.average_gain;
            convergence = convergence.max((fine - base).abs());
        }
    }
    Ok(vec![
        within(
            "infogain",
            "one copy, pure prior",
            (vn_pure - (1.0 - LOG2_E / 2.0)).abs(),
            1e-9,
        ),
        within(
            "infogain",
            "tetrahedron, pure prior",
            (tet_pure - (3f64.log2() - 2.0 / 3.0 * LOG2_E)).abs(),
            1e-6,
        ),
        within("infogain", "a-priori probabilities sum to 1", apriori, 1e-8),
        within("infogain", "Kullback nonnegative", kl_min.max(0.0), 1e-9),
        within("infogain", "entropy identity", entropy, 1e-6),
        within(
            "infogain",
            "tetrahedron a-priori probabilities",
            tetra_ap,
            1e-8,
        ),
        within(
            "infogain",
            "convergence under doubled orders",
            convergence,
            1e-8,
        ),
    ])
}

/// Coarse orders for the monotonicity checks; these are exact properties of
/// any positive discrete measure, so fine grids add nothing.
fn coarse_settings() -> GainSettings {
    GainSettings {
        orders: QuadratureOrders::new(16, 24, 48).expect("positive orders"),
        ..GainSettings::default()
    }
    .with_frame(Frame::identity())
}

pub fn theorem_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = seeded_rng(seed.wrapping_add(6));
    let mut scalar = f64::NEG_INFINITY;
    for k in 0..10_000 {
        let mut x1: f64 = rng.random();
        let x2: f64 = rng.random();
        let y1: f64 = rng.random::<f64>() + 1e-3;
        let y2: f64 = rng.random::<f64>() + 1e-3;
        if k % 10 == 0 {
            x1 = 0.0;
        }
        scalar = scalar.max(-log_sum_gap(x1, x2, y1, y2));
    }

    let settings = coarse_settings();
    let priors = {
        let mut v = vec![prior_pure(), prior_uniform_ball()];
        v.extend(random_tables(seed.wrapping_add(7), 3)?);
        v
    };
    let mut split = f64::NEG_INFINITY;
    for case in 0..20 {
        let prior = &priors[case % priors.len()];
        let m = random_povm(&mut rng, 4, 4, 2)?;
        let target = case % m.len();
        let (a, b) = random_split(&mut rng, m.elements()[target].operator())?;
        let mut elements: Vec<PovmElement> = m.elements().to_vec();
        elements[target] = PovmElement::new("part1", a);
        elements.push(PovmElement::new("part2", b));
        let refined = Povm::new(elements)?;
        let before = average_gain_with(&m, prior, 2, &settings)?;
        let after = average_gain_with(&refined, prior, 2, &settings)?;
        let whole = &before.outcomes[target];
        let parts: f64 = [target, refined.len() - 1]
            .iter()
            .map(|&i| after.outcomes[i].p_ap * after.outcomes[i].k_bits)
            .sum();
        split = split.max(whole.p_ap * whole.k_bits - parts);
    }

    let mut refine = f64::NEG_INFINITY;
    for case in 0..50 {
        let prior = if case % 5 == 4 {
            prior_point_mass(rng.random())?
        } else {
            priors[case % priors.len()].clone()
        };
        let (n, m) = if case % 2 == 0 {
            (1, random_povm(&mut rng, 2, 2, 2)?)
        } else {
            (2, random_povm(&mut rng, 4, 3, 2)?)
        };
        let base = average_gain_with(&m, &prior, n, &settings)?.average_gain;
        let r1 = rank_one_refinement(&m)?;
        let g1 = average_gain_with(&r1, &prior, n, &settings)?.average_gain;
        let r2 = spin_block_refinement(&r1, n)?;
        let g2 = average_gain_with(&r2, &prior, n, &settings)?.average_gain;
        refine = refine.max(base - g1).max(g1 - g2);
    }
    Ok(vec![
        within("infogain", "log-sum inequality", scalar.max(0.0), 0.0),
        within(
            "infogain",
            "splitting an outcome never loses",
            split.max(0.0),
            1e-9,
        ),
        within("infogain", "refinements never lose", refine.max(0.0), 1e-9),
    ])
}

pub fn analytic_checks(seed: u64) -> Result<Vec<Check>> {
    let mut one = 0.0f64;
    let mut two = 0.0f64;
    let mut priors = vec![prior_uniform_ball()];
    priors.extend(random_tables(seed.wrapping_add(8), 3)?);
    for p in &priors {
        one = one.max((delta_i1(p) - gain(&von_neumann_z(), p, 1)?.average_gain).abs());
        two = two.max((delta_i2(p) - gain(&tetrahedron_povm(), p, 2)?.average_gain).abs());
    }

    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let mut monotone = true;
    let mut detail = String::new();
    for g in GainFunctional::ALL {
        let s = purity_scan(g, &grid)?;
        let ok = s.is_nondecreasing(0.0) && s.argmax == vec![grid.len() - 1];
        monotone &= ok;
        let _ = write!(detail, "{g}={:.6} ", s.max_value());
    }
    let pure = prior_pure();
    let fid = (delta_f1(&pure) - 1.0 / 6.0)
        .abs()
        .max((delta_f2(&pure) - 0.25).abs())
        .max((f_ap(&pure) - 0.5).abs());

    let rows = [
        (1, 1.0 - LOG2_E / 2.0, 0.2786525),
        (2, 3f64.log2() - 2.0 / 3.0 * LOG2_E, 0.6231658),
        (3, 2.0 - 0.75 * LOG2_E, 0.9179787),
    ];
    let mut table = 0.0f64;
    for (n, exact, printed) in rows {
        let row = CapacityRow::new(n);
        table = table.max((row.gain_bits - exact).abs());
        table = table.max((row.gain_bits - printed).abs() - 5e-8);
    }
    table = table.max((CapacityRow::new(3).bits_per_compressed_qubit - 0.4589894).abs() - 5e-8);
    table = table.max((capacity_gain(2) - delta_i2(&pure)).abs());
    let mut increasing = true;
    let mut prev = 0.0;
    for n in 1..=100_000 {
        let v = CapacityRow::new(n).bits_per_compressed_qubit;
        increasing &= v > prev && v < 1.0;
        prev = v;
    }
    let big = CapacityRow::new(1000);
    let reference = 1000f64.log2() / 1000.0;
    let ratio = big.bits_per_raw_qubit / reference;

    Ok(vec![
        within("analytic", "one-copy closed form vs quadrature", one, 1e-7),
        within("analytic", "two-copy closed form vs quadrature", two, 1e-6),
        check(
            "analytic",
            "gains maximal for pure priors",
            monotone,
            detail.trim_end().to_string(),
        ),
        within("analytic", "pure-prior fidelity gains", fid, 1e-12),
        within(
            "analytic",
            "capacity table n = 1, 2, 3",
            table.max(0.0),
            1e-9,
        ),
        check(
            "analytic",
            "bits per compressed qubit increase below 1",
            increasing,
            format!("value at n = 1e5: {prev:.6}"),
        ),
        check(
            "analytic",
            "bits per raw qubit within 10% of log2(n)/n at n = 1000",
            (ratio - 1.0).abs() <= 0.1,
            format!("ratio {ratio:.4}"),
        ),
    ])
}

pub fn optimize_checks(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (name, prior) in [("pure", prior_pure()), ("uniform", prior_uniform_ball())] {
        let s = schmidt_sweep(&prior, 101)?;
        let bound = delta_i2(&prior);
        checks.push(check(
            "optimize",
            &format!("Schmidt sweep argmax at product states ({name})"),
            s.argmax == vec![0, 100],
            format!("argmax {:?}, max {:.9}", s.argmax, s.max_value()),
        ));
        checks.push(within(
            "optimize",
            &format!("Schmidt sweep symmetric ({name})"),
            s.asymmetry(),
            1e-8,
        ));
        checks.push(within(
            "optimize",
            &format!("Schmidt sweep bounded by two-copy optimum ({name})"),
            (s.max_value() - bound).max(0.0),
            1e-9,
        ));
        let mut paths = 0.0f64;
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            paths = paths.max((schmidt_gain(p, &prior)? - schmidt_gain_brute(p, &prior)?).abs());
        }
        checks.push(within(
            "optimize",
            &format!("Schmidt azimuth closed form vs brute force ({name})"),
            paths,
            1e-6,
        ));
    }
    let vn = rotation_invariance_check(&von_neumann_z(), &prior_uniform_ball(), 1, 10, seed)?;
    let tet = rotation_invariance_check(&tetrahedron_povm(), &prior_pure(), 2, 10, seed)?;
    let trivial = Povm::new(vec![PovmElement::new("1", CMatrix::identity(2))])?;
    let triv = rotation_invariance_check(&trivial, &prior_uniform_ball(), 1, 3, seed)?;
    checks.push(within(
        "optimize",
        "rotation invariance, one copy",
        vn,
        1e-8,
    ));
    checks.push(within(
        "optimize",
        "rotation invariance, tetrahedron",
        tet,
        1e-8,
    ));
    checks.push(within(
        "optimize",
        "rotation invariance, trivial",
        triv,
        0.0,
    ));

    let mut rng = seeded_rng(seed.wrapping_add(9));
    let r = bloch_rotation(&random_unitary(&mut rng, 2));
    let turned = tetrahedron_vertices().map(|v| {
        let a = v.to_array();
        BlochVector {
            x: r[0][0] * a[0] + r[0][1] * a[1] + r[0][2] * a[2],
            y: r[1][0] * a[0] + r[1][1] * a[1] + r[1][2] * a[2],
            z: r[2][0] * a[0] + r[2][1] * a[1] + r[2][2] * a[2],
        }
    });
    let prior = prior_uniform_ball();
    let orientation = (gain(&tetrahedron_povm_with(&turned)?, &prior, 2)?.average_gain
        - gain(&tetrahedron_povm(), &prior, 2)?.average_gain)
        .abs();
    checks.push(within(
        "optimize",
        "tetrahedron orientation irrelevant",
        orientation,
        1e-8,
    ));
    Ok(checks)
}
