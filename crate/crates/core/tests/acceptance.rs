//! Acceptance gate: one test per criterion, each printing a single
//! `criterion NN PASS|FAIL` line with the measured figures.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use qel::analytic::{
    delta_f1, delta_f2, delta_i1, delta_i2, schmidt_gain, schmidt_gain_brute, CapacityRow, LOG2_E,
};
use qel::infogain::{average_gain, log_sum_gap};
use qel::optimize::{purity_scan, schmidt_sweep, GainFunctional};
use qel::povm::{
    rank_one_refinement, spin_block_refinement, tetrahedron_povm, tetrahedron_vertices,
    von_neumann_z,
};
use qel::priors::{prior_point_mass, prior_pure, prior_uniform_ball, IsotropicPrior};
use qel::qmat::commutator;
use qel::sampling::{
    random_bloch_in_ball, random_povm, random_pure_bloch, random_table_prior, random_unitary,
    seeded_rng,
};
use qel::spin::{partial_spin_sq, spin_blocks, symmetric_projector};
use qel::states::{
    fidelity, n_copies, rho_from_bloch, uhlmann_fidelity, wootters_overlap, BlochVector,
};
use qel::{GainSettings, Povm};
use rand::RngExt;

struct Criterion {
    id: u32,
    title: &'static str,
    items: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            items: Vec::new(),
        }
    }

    fn item(&mut self, text: String, ok: bool) {
        self.items.push((text, ok));
    }

    fn within(&mut self, what: &str, deviation: f64, tol: f64) {
        self.item(
            format!("{what} {deviation:.2e} <= {tol:.0e}"),
            deviation <= tol,
        );
    }

    fn time(&mut self, what: &str, elapsed: Duration, limit: Duration) {
        self.item(
            format!(
                "{what} {:.3}s < {}s",
                elapsed.as_secs_f64(),
                limit.as_secs_f64()
            ),
            elapsed < limit,
        );
    }

    /// Prints the verdict line past the test harness' capture, then asserts.
    fn finish(self) {
        let passed = self.items.iter().all(|(_, ok)| *ok);
        let failed: Vec<&str> = self
            .items
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(t, _)| t.as_str())
            .collect();
        let details: Vec<&str> = self.items.iter().map(|(t, _)| t.as_str()).collect();
        let line = format!(
            "criterion {:>2} {}: {} [{}]\n",
            self.id,
            if passed { "PASS" } else { "FAIL" },
            self.title,
            details.join("; ")
        );
        let _ = std::io::stdout().lock().write_all(line.as_bytes());
        assert!(
            passed,
            "criterion {} failed: {}",
            self.id,
            failed.join("; ")
        );
    }
}

fn table_priors(seed: u64, count: usize) -> Vec<IsotropicPrior> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let rows = rng.random_range(3..=9);
            random_table_prior(&mut rng, rows).unwrap()
        })
        .collect()
}

fn pure_two_copy() -> f64 {
    3f64.log2() - 2.0 / 3.0 * LOG2_E
}

#[test]
fn criterion_01_one_copy_pure_prior() {
    let mut c = Criterion::new(1, "one-copy gain for the pure prior");
    let start = Instant::now();
    let g = average_gain(&von_neumann_z(), &prior_pure(), 1)
        .unwrap()
        .average_gain;
    let elapsed = start.elapsed();
    c.within(
        "|K - (1 - log2e/2)|",
        (g - (1.0 - LOG2_E / 2.0)).abs(),
        1e-9,
    );
    c.within("|K - 0.2786524795|", (g - 0.2786524795).abs(), 1e-9);
    c.time("runtime", elapsed, Duration::from_secs(1));
    c.finish();
}

#[test]
fn criterion_02_tetrahedron_pure_prior() {
    let mut c = Criterion::new(2, "tetrahedron gain for the pure prior");
    let start = Instant::now();
    let g = average_gain(&tetrahedron_povm(), &prior_pure(), 2)
        .unwrap()
        .average_gain;
    let elapsed = start.elapsed();
    c.within(
        "|K - (log2 3 - 2/3 log2e)|",
        (g - pure_two_copy()).abs(),
        1e-6,
    );
    c.within("|K - 0.6231658068|", (g - 0.6231658068).abs(), 1e-6);
    c.within(
        "|delta_i2 - capacity(2)|",
        (delta_i2(&prior_pure()) - CapacityRow::new(2).gain_bits).abs(),
        1e-9,
    );
    c.time("runtime", elapsed, Duration::from_secs(10));
    c.finish();
}

#[test]
fn criterion_03_closed_forms_match_quadrature() {
    let mut c = Criterion::new(3, "closed-form gains match quadrature");
    let mut priors = vec![prior_uniform_ball()];
    priors.extend(table_priors(303, 3));
    let (mut one, mut two) = (0.0f64, 0.0f64);
    for p in &priors {
        let q1 = average_gain(&von_neumann_z(), p, 1).unwrap().average_gain;
        let q2 = average_gain(&tetrahedron_povm(), p, 2)
            .unwrap()
            .average_gain;
        one = one.max((delta_i1(p) - q1).abs());
        two = two.max((delta_i2(p) - q2).abs());
    }
    c.within("max |delta_i1 - K|", one, 1e-7);
    c.within("max |delta_i2 - K|", two, 1e-6);
    c.finish();
}

#[test]
fn criterion_04_moments() {
    let mut c = Criterion::new(4, "prior moments");
    let u = prior_uniform_ball();
    c.within("|I_1 - 0.1|", (u.moment(1.0) - 0.1).abs(), 1e-9);
    c.within(
        "|I_1/2 - 3pi/32|",
        (u.moment(0.5) - 3.0 * PI / 32.0).abs(),
        1e-9,
    );
    let mut priors = vec![
        prior_pure(),
        u,
        prior_point_mass(0.0).unwrap(),
        prior_point_mass(0.7).unwrap(),
    ];
    priors.extend(table_priors(404, 6));
    let mut norm = 0.0f64;
    let mut ladder = f64::NEG_INFINITY;
    for p in &priors {
        norm = norm.max((p.moment(0.0) - 1.0).abs());
        for a in [0.0, 0.5, 1.0, 1.5, 2.0] {
            ladder = ladder.max(4.0 * p.moment(a + 1.0) - p.moment(a));
        }
    }
    c.within("max |I_0 - 1|", norm, 1e-8);
    c.item(
        format!("max (4 I_(a+1) - I_a) = {ladder:.2e} <= 0"),
        ladder <= 0.0,
    );
    c.finish();
}

#[test]
fn criterion_05_fidelity_axioms() {
    let mut c = Criterion::new(5, "fidelity axioms");
    let mut rng = seeded_rng(505);
    let (mut p1, mut p3, mut p4, mut p5, mut p6, mut closed, mut overlap) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let a = rho_from_bloch(random_bloch_in_ball(&mut rng));
        let b = rho_from_bloch(random_bloch_in_ball(&mut rng));
        let f = fidelity(&a, &b);
        p1 = p1.max((-f).max(f - 1.0)).max((f - fidelity(&b, &a)).abs());

        let u = random_unitary(&mut rng, 2);
        p3 = p3.max(
            (uhlmann_fidelity(&u.conjugate(a.matrix()), &u.conjugate(b.matrix())).unwrap() - f)
                .abs(),
        );

        let dir = random_pure_bloch(&mut rng);
        p4 = p4.max((fidelity(&rho_from_bloch(dir), &b) - 0.5 * (1.0 + dir.dot(b.bloch()))).abs());

        for n in [2, 3] {
            let fn_ =
                uhlmann_fidelity(&n_copies(&a, n).unwrap(), &n_copies(&b, n).unwrap()).unwrap();
            p5 = p5.max((fn_ - f.powi(n as i32)).abs());
        }

        let third = random_bloch_in_ball(&mut rng);
        let t: f64 = rng.random();
        let bb = b.bloch();
        let mix = BlochVector::new(
            t * bb.x + (1.0 - t) * third.x,
            t * bb.y + (1.0 - t) * third.y,
            t * bb.z + (1.0 - t) * third.z,
        )
        .unwrap();
        let lhs = fidelity(&a, &rho_from_bloch(mix));
        let rhs = t * f + (1.0 - t) * fidelity(&a, &rho_from_bloch(third));
        p6 = p6.max(rhs - lhs);

        closed = closed.max((uhlmann_fidelity(a.matrix(), b.matrix()).unwrap() - f).abs());

        for _ in 0..50 {
            let outcomes = rng.random_range(2..=4);
            let m = random_povm(&mut rng, 2, outcomes, 1).unwrap();
            overlap = overlap.max(f - wootters_overlap(&a, &b, &m).unwrap());
        }
    }
    c.within("property 1", p1, 1e-9);
    c.within("property 3", p3, 1e-9);
    c.within("property 4", p4, 1e-9);
    c.within("property 5", p5, 1e-9);
    c.within("property 6", p6.max(0.0), 1e-9);
    c.within("overlap - fidelity deficit", overlap.max(0.0), 1e-9);
    c.within("closed form vs matrix root", closed, 1e-10);
    c.finish();
}

#[test]
fn criterion_06_theorem_suite() {
    let mut c = Criterion::new(6, "splitting theorem and refinements");
    let mut rng = seeded_rng(606);
    let mut scalar = f64::NEG_INFINITY;
    for k in 0..10_000 {
        let x1: f64 = if k % 7 == 0 { 0.0 } else { rng.random() };
        let x2: f64 = rng.random();
        let y1: f64 = rng.random::<f64>() + 1e-6;
        let y2: f64 = rng.random::<f64>() + 1e-6;
        scalar = scalar.max(-log_sum_gap(x1, x2, y1, y2));
    }
    c.item(
        format!("log-sum violations {scalar:.2e} <= 0"),
        scalar <= 0.0,
    );

    let settings =
        GainSettings::with_orders(qel::quadrature::QuadratureOrders::new(24, 32, 64).unwrap())
            .with_frame(qel::quadrature::Frame::identity());
    let mut priors = vec![
        prior_pure(),
        prior_uniform_ball(),
        prior_point_mass(0.6).unwrap(),
    ];
    priors.extend(table_priors(616, 2));
    let mut drift = f64::NEG_INFINITY;
    for case in 0..50 {
        let prior = &priors[case % priors.len()];
        let (n, m): (usize, Povm) = if case % 2 == 0 {
            (1, random_povm(&mut rng, 2, 3, 2).unwrap())
        } else {
            (2, random_povm(&mut rng, 4, 3, 2).unwrap())
        };
        let k0 = qel::infogain::average_gain_with(&m, prior, n, &settings)
            .unwrap()
            .average_gain;
        let r1 = rank_one_refinement(&m).unwrap();
        let k1 = qel::infogain::average_gain_with(&r1, prior, n, &settings)
            .unwrap()
            .average_gain;
        let r2 = spin_block_refinement(&r1, n).unwrap();
        let k2 = qel::infogain::average_gain_with(&r2, prior, n, &settings)
            .unwrap()
            .average_gain;
        drift = drift.max(k0 - k1).max(k1 - k2);
    }
    c.within("refinement loss", drift.max(0.0), 1e-9);
    c.finish();
}

#[test]
fn criterion_07_spin_structure() {
    let mut c = Criterion::new(7, "spin structure");
    let mut rng = seeded_rng(707);
    let mut comm = 0.0f64;
    for n in [2usize, 3, 4] {
        let casimirs: Vec<_> = (1..=n).map(|a| partial_spin_sq(n, a).unwrap()).collect();
        for _ in 0..50 {
            let rho = n_copies(&rho_from_bloch(random_bloch_in_ball(&mut rng)), n).unwrap();
            for s in &casimirs {
                comm = comm.max(commutator(s, &rho).max_abs());
            }
        }
    }
    c.within("max |[S2_(a), rho^n]|", comm, 1e-10);
    let dims: Vec<usize> = spin_blocks(2)
        .unwrap()
        .iter()
        .map(|b| b.dimension())
        .collect();
    c.item(format!("two-copy blocks {dims:?}"), dims == [3, 1]);
    let ranks: Vec<usize> = (1..=8)
        .map(|n| symmetric_projector(n).unwrap().trace().re.round() as usize)
        .collect();
    c.item(
        format!("symmetric ranks {ranks:?}"),
        ranks.iter().enumerate().all(|(k, &r)| r == k + 2),
    );
    c.finish();
}

#[test]
fn criterion_08_tetrahedron_outcomes() {
    let mut c = Criterion::new(8, "tetrahedron outcome probabilities");
    let mut rng = seeded_rng(808);
    let t = tetrahedron_povm();
    let verts = tetrahedron_vertices();
    let mut local = 0.0f64;
    for _ in 0..100 {
        let b = random_bloch_in_ball(&mut rng);
        let rho = n_copies(&rho_from_bloch(b), 2).unwrap();
        let singlet = rho.trace_product(t.elements()[0].operator()).re;
        local = local.max((singlet - 0.25 * (1.0 - b.dot(b))).abs());
        for (e, n) in t.elements()[1..].iter().zip(verts) {
            let p = rho.trace_product(e.operator()).re;
            local = local.max((p - 3.0 / 16.0 * (1.0 + b.dot(n)).powi(2)).abs());
        }
    }
    c.within("pointwise", local, 1e-12);
    let mut priors = vec![
        prior_pure(),
        prior_uniform_ball(),
        prior_point_mass(0.5).unwrap(),
    ];
    priors.extend(table_priors(818, 2));
    let mut apriori = 0.0f64;
    for p in &priors {
        let r = average_gain(&t, p, 2).unwrap();
        let i1 = p.moment(1.0);
        apriori = apriori.max((r.outcomes[0].p_ap - i1).abs());
        for o in &r.outcomes[1..] {
            apriori = apriori.max((o.p_ap - 0.25 * (1.0 - i1)).abs());
        }
    }
    c.within("a priori", apriori, 1e-8);
    c.finish();
}

#[test]
fn criterion_09_schmidt_optimality() {
    let mut c = Criterion::new(9, "product states maximize the Schmidt family");
    for (name, prior) in [("pure", prior_pure()), ("uniform", prior_uniform_ball())] {
        let s = schmidt_sweep(&prior, 101).unwrap();
        c.item(
            format!("{name} argmax {:?}", s.argmax),
            s.argmax == vec![0, 100],
        );
        c.within(&format!("{name} asymmetry"), s.asymmetry(), 1e-8);
        let mut paths = 0.0f64;
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            paths = paths.max(
                (schmidt_gain(p, &prior).unwrap() - schmidt_gain_brute(p, &prior).unwrap()).abs(),
            );
        }
        c.within(&format!("{name} azimuth forms"), paths, 1e-6);
    }
    c.finish();
}

#[test]
fn criterion_10_purity_maximization() {
    let mut c = Criterion::new(10, "gains are maximal for pure priors");
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    for g in GainFunctional::ALL {
        let s = purity_scan(g, &grid).unwrap();
        c.item(
            format!("{g} nondecreasing, argmax {:?}", s.argmax),
            s.is_nondecreasing(0.0) && s.argmax == vec![10],
        );
    }
    let pure = prior_point_mass(1.0).unwrap();
    c.within("|dF1 - 1/6|", (delta_f1(&pure) - 1.0 / 6.0).abs(), 1e-12);
    c.within("|dF2 - 1/4|", (delta_f2(&pure) - 0.25).abs(), 1e-12);
    c.finish();
}

#[test]
fn criterion_11_capacity() {
    let mut c = Criterion::new(11, "capacity table");
    let rows: Vec<CapacityRow> = (1..=3).map(CapacityRow::new).collect();
    c.within(
        "|n=1 - 0.2786525|",
        (rows[0].gain_bits - 0.2786524795).abs(),
        1e-9,
    );
    c.within(
        "|n=2 - 0.6231658|",
        (rows[1].gain_bits - 0.6231658068).abs(),
        1e-9,
    );
    c.within(
        "|n=3 - 0.9179787|",
        (rows[2].gain_bits - (2.0 - 0.75 * LOG2_E)).abs(),
        1e-12,
    );
    c.within(
        "|n=3 per compressed - 0.4589894|",
        (rows[2].bits_per_compressed_qubit - 0.4589894).abs(),
        5e-8,
    );
    c.within(
        "|n=2 - delta_i2(pure)|",
        (rows[1].gain_bits - delta_i2(&prior_pure())).abs(),
        1e-9,
    );
    let mut prev = 0.0;
    let mut increasing = true;
    for n in 1..=100_000 {
        let v = CapacityRow::new(n).bits_per_compressed_qubit;
        increasing &= v > prev && v < 1.0;
        prev = v;
    }
    c.item(
        format!("per compressed qubit increasing, < 1 (n=1e5: {prev:.6})"),
        increasing,
    );
    let ratio = CapacityRow::new(1000).bits_per_raw_qubit / (1000f64.log2() / 1000.0);
    c.item(
        format!("per raw qubit / (log2 n / n) at n=1000 = {ratio:.4}, within 10%"),
        (ratio - 1.0).abs() <= 0.1,
    );
    c.finish();
}

#[test]
fn criterion_12_entropy_identity() {
    let mut c = Criterion::new(12, "gain equals entropy difference");
    let mut priors = vec![prior_uniform_ball()];
    priors.extend(table_priors(1212, 3));
    let mut worst = 0.0f64;
    for p in &priors {
        for (m, n) in [(von_neumann_z(), 1), (tetrahedron_povm(), 2)] {
            let r = average_gain(&m, p, n).unwrap();
            let h = r.entropy_difference.expect("density prior");
            worst = worst.max((r.average_gain - h).abs());
        }
    }
    c.within("max |K - (H - H_c)|", worst, 1e-6);
    c.finish();
}

fn run_to_file(args: &[&str], dir: &std::path::Path, name: &str) -> (Vec<u8>, Option<i32>) {
    let path = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_qel"))
        .args(args)
        .arg("--output")
        .arg(&path)
        .env_remove("QEL_QUAD_ORDERS")
        .status()
        .expect("binary runs");
    (std::fs::read(&path).unwrap_or_default(), status.code())
}

#[test]
fn criterion_13_determinism() {
    let mut c = Criterion::new(13, "repeated runs are byte-identical");
    let dir = tempfile::tempdir().unwrap();
    let gain = [
        "--format", "json", "gain", "--n", "2", "--povm", "tetra", "--prior", "uniform",
    ];
    let (a, ca) = run_to_file(&gain, dir.path(), "gain1.json");
    let (b, cb) = run_to_file(&gain, dir.path(), "gain2.json");
    c.item(
        format!("gain: {} bytes, exit {ca:?}/{cb:?}", a.len()),
        !a.is_empty() && a == b && ca == Some(0) && cb == Some(0),
    );
    let (a, ca) = run_to_file(&["verify"], dir.path(), "verify1.txt");
    let (b, cb) = run_to_file(&["verify"], dir.path(), "verify2.txt");
    c.item(
        format!("verify: {} bytes, exit {ca:?}/{cb:?}", a.len()),
        !a.is_empty() && a == b && ca == cb,
    );
    c.finish();
}
