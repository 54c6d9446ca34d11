//! Acceptance run: ten end-to-end property checks at fixed counts and
//! tolerances. Prints one PASS/FAIL line per check and exits non-zero if any
//! fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use seqeffects::criteria::{
    criterion1_check, criterion2_check, criterion2_fixed_state, criterion3_check, sample_pair,
    search_normal_commutation, GapClass, GapProtocol, PairKind,
};
use seqeffects::matcore::ComplexMatrix;
use seqeffects::quantum::{
    sample_commuting_povm_pair, sample_compatible_sharp_pair, sample_density, sample_effect, sample_povm,
    sample_projection, validate_density, validate_povm,
};
use seqeffects::rng::substream;
use seqeffects::seqprod::{
    probability_via_channel, sample_sequential, sequential_product_matrix, verify_axioms, verify_phase_calculus,
};
use seqeffects::{DensityOperator, PhaseFamily, Povm, Tolerances};

const PI: f64 = std::f64::consts::PI;

fn families() -> [PhaseFamily; 4] {
    [
        PhaseFamily::new(0.0, 0.0),
        PhaseFamily::new(0.7, PI / 5.0),
        PhaseFamily::new(-1.3, 0.0),
        PhaseFamily::new(2.5, 1.0),
    ]
}

// Oracles computed straight from matrix entries.

fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let (a, b) = (a.as_inner(), b.as_inner());
    (a * b - b * a).norm()
}

fn scale(x: &Povm, y: &Povm) -> f64 {
    let mut m = 1.0_f64;
    for e in x.elements().iter().chain(y.elements()) {
        m = m.max(e.matrix().as_inner().norm());
    }
    x.dim() as f64 * m
}

fn compat_oracle(x: &Povm, y: &Povm) -> f64 {
    let mut m = 0.0_f64;
    for a in x.elements() {
        for b in y.elements() {
            m = m.max(commutator(a.matrix(), b.matrix()));
        }
    }
    m / scale(x, y)
}

/// `‖B² − B‖_F`, zero exactly on projections.
fn idempotence_defect(b: &ComplexMatrix) -> f64 {
    let b = b.as_inner();
    (b * b - b).norm()
}

fn sharp_compat_oracle(x: &Povm, y: &Povm) -> f64 {
    let s = scale(x, y);
    let sharp = y
        .elements()
        .iter()
        .map(|b| idempotence_defect(b.matrix()))
        .fold(0.0_f64, f64::max);
    compat_oracle(x, y).max(sharp / s)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn axiom_suite() -> Outcome {
    let mut worst = 0.0_f64;
    let mut ok = true;
    for (f, fam) in families().iter().enumerate() {
        for dim in 2..=4 {
            let r = verify_axioms(fam, dim, 1000, 1000 + 10 * f as u64 + dim as u64);
            ok &= r.passed() && r.properties.len() == 11;
            for p in &r.properties {
                ok &= p.samples == 1000 && p.max_residual < 1e-9;
                worst = worst.max(p.max_residual);
            }
        }
    }
    outcome(ok, format!("12 runs x 1000 instances, worst residual {worst:.2e} (< 1e-9)"))
}

fn phase_calculus_suite() -> Outcome {
    let mut worst = 0.0_f64;
    let mut worst_kernel = 0.0_f64;
    let mut ok = true;
    for (f, fam) in families().iter().enumerate() {
        for dim in 2..=4 {
            let r = verify_phase_calculus(fam, dim, 1000, 2000 + 10 * f as u64 + dim as u64);
            ok &= r.passed() && r.properties.len() == 7;
            for p in &r.properties {
                if p.name.contains("kernel") {
                    ok &= p.max_residual < 1e-10;
                    worst_kernel = worst_kernel.max(p.max_residual);
                } else {
                    ok &= p.max_residual < 1e-9;
                    worst = worst.max(p.max_residual);
                }
            }
        }
    }
    outcome(
        ok,
        format!("12 runs x 1000, worst residual {worst:.2e} (< 1e-9), kernel {worst_kernel:.2e} (< 1e-10)"),
    )
}

struct GapTally {
    cases: u64,
    mismatches: u64,
    ambiguous: u64,
    positives: u64,
    negatives: u64,
}

impl GapTally {
    fn new() -> Self {
        Self {
            cases: 0,
            mismatches: 0,
            ambiguous: 0,
            positives: 0,
            negatives: 0,
        }
    }

    fn record(&mut self, gap: &GapProtocol, verdict_residual: f64, oracle_residual: f64) {
        self.cases += 1;
        let v = gap.classify(verdict_residual);
        let o = gap.classify(oracle_residual);
        match (v, o) {
            (GapClass::Zero, GapClass::Zero) => self.positives += 1,
            (GapClass::NonZero, GapClass::NonZero) => self.negatives += 1,
            (GapClass::Zero, GapClass::NonZero) | (GapClass::NonZero, GapClass::Zero) => self.mismatches += 1,
            _ => self.ambiguous += 1,
        }
    }

    fn passed(&self, expected: u64) -> bool {
        self.cases == expected && self.mismatches == 0 && self.positives > 0 && self.negatives > 0
    }

    fn describe(&self) -> String {
        format!(
            "{} pairs: {} agree-true, {} agree-false, {} mismatched, {} in the gap band",
            self.cases, self.positives, self.negatives, self.mismatches, self.ambiguous
        )
    }
}

fn order_independence_iff_compatible() -> Outcome {
    let gap = GapProtocol::default();
    let fams = families();
    let mut tally = GapTally::new();
    for i in 0..10_000u64 {
        let mut rng = substream(3000, i);
        let dim = 2 + (i % 3) as usize;
        let fam = &fams[(i / 3 % 3) as usize];
        let kind = if i % 2 == 0 { PairKind::Commuting } else { PairKind::Generic };
        let (x, y) = sample_pair(kind, dim, &mut rng);
        let r = criterion3_check(fam, &x, &y, gap.check).expect("criterion (III)");
        tally.record(&gap, r.normalized_residual(), compat_oracle(&x, &y));
    }
    outcome(tally.passed(10_000) && tally.ambiguous == 0, tally.describe())
}

fn repeatability_iff_compatible_and_sharp() -> Outcome {
    let gap = GapProtocol::default();
    let fams = families();
    let mut tally = GapTally::new();
    for i in 0..10_000u64 {
        let mut rng = substream(4000, i);
        let dim = 2 + (i % 3) as usize;
        let fam = &fams[(i / 3 % 3) as usize];
        // Y alternates PVM / POVM; every other pair of draws commutes.
        let kind = match i % 4 {
            0 => PairKind::CommutingSharp,
            1 => PairKind::Commuting,
            2 => PairKind::GenericSharp,
            _ => PairKind::Generic,
        };
        let (x, y) = sample_pair(kind, dim, &mut rng);
        let r = criterion1_check(fam, &x, &y, gap.check).expect("criterion (I)");
        tally.record(&gap, r.normalized_residual(), sharp_compat_oracle(&x, &y));
    }
    outcome(tally.passed(10_000) && tally.ambiguous == 0, tally.describe())
}

fn compatible_pairs_keep_statistics() -> Outcome {
    let fams = families();
    let mut worst = 0.0_f64;
    let mut compat_worst = 0.0_f64;
    for i in 0..10_000u64 {
        let mut rng = substream(5000, i);
        let dim = 2 + (i % 3) as usize;
        let m = rng.random_range(1..=4);
        let n = rng.random_range(1..=4);
        let (x, y) = if i % 2 == 0 {
            sample_commuting_povm_pair(dim, m, n, &mut rng)
        } else {
            sample_compatible_sharp_pair(dim, m, n.min(dim), &mut rng)
        };
        compat_worst = compat_worst.max(compat_oracle(&x, &y));
        let r = criterion2_check(&fams[(i % 4) as usize], &x, &y, 1e-9).expect("criterion (II)");
        worst = worst.max(r.max_residual);
    }
    outcome(
        worst < 1e-9 && compat_worst <= 1e-8,
        format!("10000 compatible pairs, worst residual {worst:.2e} (< 1e-9)"),
    )
}

fn maximally_mixed_hides_disturbance() -> Outcome {
    let fams = families();
    let mut worst = 0.0_f64;
    let mut min_incompat = f64::INFINITY;
    let mut all_true = true;
    let mut count = 0;
    let mut i = 0u64;
    while count < 1000 {
        let mut rng = substream(6000, i);
        i += 1;
        let dim = 2 + (i % 5) as usize;
        let x = sample_povm(dim, rng.random_range(2..=4), &mut rng);
        let y = sample_povm(dim, rng.random_range(2..=4), &mut rng);
        let incompat = compat_oracle(&x, &y);
        if incompat <= 1e-6 {
            continue;
        }
        count += 1;
        min_incompat = min_incompat.min(incompat);
        let w = DensityOperator::maximally_mixed(dim);
        let r = criterion2_fixed_state(&fams[count % 4], &x, &y, &w, 1e-10).expect("fixed state");
        all_true &= r.verdict;
        worst = worst.max(r.max_residual);
    }
    outcome(
        all_true && worst < 1e-10,
        format!("1000 incompatible pairs (min incompatibility {min_incompat:.2e}), worst residual {worst:.2e} (< 1e-10)"),
    )
}

fn normal_commutation_search() -> Outcome {
    let r = search_normal_commutation(100_000, 7000, &[2, 3, 4, 5, 6], &GapProtocol::default()).expect("search");
    outcome(
        r.attempts == 100_000 && r.violations.is_empty(),
        format!(
            "{} attempts, {} on the AB = BAB surface, {} with AB != BA",
            r.attempts,
            r.hypothesis_hits,
            r.violations.len()
        ),
    )
}

fn projection_products() -> Outcome {
    let mut worst = 0.0_f64;
    for i in 0..1000u64 {
        let mut rng = substream(8000, i);
        let dim = 2 + (i % 5) as usize;
        let p = sample_projection(dim, &mut rng);
        let q = sample_projection(dim, &mut rng);
        let (pi, qi) = (p.matrix().as_inner(), q.matrix().as_inner());
        let pqp = pi * qi * pi;
        for fam in families() {
            let d = sequential_product_matrix(&fam, &p, q.matrix()).expect("product");
            worst = worst.max((d.as_inner() - &pqp).norm());
        }
    }
    outcome(worst < 1e-10, format!("1000 pairs x 4 families, worst ‖P⋄Q − PQP‖ {worst:.2e} (< 1e-10)"))
}

fn phase_independence() -> Outcome {
    let fams = families();
    let mut worst = 0.0_f64;
    for i in 0..1000u64 {
        let mut rng = substream(9000, i);
        let dim = 2 + (i % 5) as usize;
        let w = sample_density(dim, &mut rng);
        let a = sample_effect(dim, &mut rng);
        let direct = (a.matrix().as_inner() * w.matrix().as_inner()).trace().re;
        for fam in &fams {
            let p = probability_via_channel(fam, &w, &a).expect("probability");
            worst = worst.max((p - direct).abs());
        }
    }
    let tol = Tolerances::default().mat_eq;
    let mut disagreements = 0;
    for i in 0..1000u64 {
        let mut rng = substream(9500, i);
        let dim = 2 + (i % 3) as usize;
        let (x, y) = sample_pair(PairKind::ALL[(i % 4) as usize], dim, &mut rng);
        let verdicts = |fam: &PhaseFamily| {
            [
                criterion1_check(fam, &x, &y, tol).expect("(I)").verdict,
                criterion2_check(fam, &x, &y, tol).expect("(II)").verdict,
                criterion3_check(fam, &x, &y, tol).expect("(III)").verdict,
            ]
        };
        let first = verdicts(&fams[0]);
        if fams[1..].iter().any(|f| verdicts(f) != first) {
            disagreements += 1;
        }
    }
    outcome(
        worst < 1e-10 && disagreements == 0,
        format!(
            "1000 (W, A) x 4 families, worst |p − tr(AW)| {worst:.2e} (< 1e-10); {disagreements} of 1000 pairs change verdict"
        ),
    )
}

fn diagonal(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(values).expect("finite")
}

/// Random diagonal POVM with `m` outcomes; rows of a column-stochastic matrix.
fn diagonal_povm(dim: usize, m: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut cols = vec![vec![0.0; dim]; m];
    for i in 0..dim {
        let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.05).collect();
        let s: f64 = raw.iter().sum();
        for (col, r) in cols.iter_mut().zip(&raw) {
            col[i] = r / s;
        }
    }
    // Fix the last outcome so each diagonal sums to exactly one.
    let (head, last) = cols.split_at_mut(m - 1);
    for (i, v) in last[0].iter_mut().enumerate() {
        *v = 1.0 - head.iter().map(|c| c[i]).sum::<f64>();
    }
    cols
}

fn sampler_soundness() -> Outcome {
    let tol = Tolerances::default();
    let fams = families();
    let trials = 100_000u64;
    let mut worst_z = 0.0_f64;
    let mut replay_ok = true;
    let mut sums_ok = true;
    for fixture in 0..20u64 {
        let mut rng = substream(10_000, fixture);
        let dim = 2 + (fixture % 3) as usize;
        let m = 2 + (fixture % 2) as usize;
        let n = 2 + (fixture / 2 % 2) as usize;
        let raw_w: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = raw_w.iter().sum();
        let w_diag: Vec<f64> = raw_w.iter().map(|v| v / total).collect();
        let a = diagonal_povm(dim, m, &mut rng);
        let b = diagonal_povm(dim, n, &mut rng);

        let w = validate_density(&diagonal(&w_diag), &tol).expect("state");
        let x = validate_povm(&a.iter().map(|v| diagonal(v)).collect::<Vec<_>>(), &tol).expect("X");
        let y = validate_povm(&b.iter().map(|v| diagonal(v)).collect::<Vec<_>>(), &tol).expect("Y");
        let fam = &fams[(fixture % 4) as usize];

        let table = sample_sequential(fam, &w, &x, &y, trials, 11 * fixture + 1).expect("sampling");
        let counted: u64 = table.counts.iter().flatten().sum();
        sums_ok &= counted == trials;
        for (k, ak) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                let p: f64 = (0..dim).map(|i| w_diag[i] * ak[i] * bj[i]).sum();
                let c = table.counts[k][j] as f64;
                let nt = trials as f64;
                let z = (c - nt * p) / (nt * p * (1.0 - p)).sqrt();
                worst_z = worst_z.max(z.abs());
                sums_ok &= (table.exact[k][j] - p).abs() < 1e-12;
            }
        }
        let again = sample_sequential(fam, &w, &x, &y, trials, 11 * fixture + 1).expect("sampling");
        let (s1, s2) = (format!("{table:?}"), format!("{again:?}"));
        replay_ok &= s1.as_bytes() == s2.as_bytes() && table == again;
    }
    outcome(
        worst_z < 5.0 && replay_ok && sums_ok,
        format!("20 fixtures x 100000 trials, worst |z| {worst_z:.2} (< 5), replay identical: {replay_ok}"),
    )
}

type Check = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let checks: [Check; 10] = [
        ("axioms S1-S5", axiom_suite, Duration::from_secs(30)),
        ("phase calculus properties", phase_calculus_suite, Duration::from_secs(20)),
        ("order independence iff compatible", order_independence_iff_compatible, Duration::from_secs(60)),
        (
            "repeatability iff compatible and sharp",
            repeatability_iff_compatible_and_sharp,
            Duration::from_secs(60),
        ),
        ("compatible pairs keep Y statistics", compatible_pairs_keep_statistics, Duration::from_secs(30)),
        ("maximally mixed state hides disturbance", maximally_mixed_hides_disturbance, Duration::from_secs(10)),
        ("normal commutation search", normal_commutation_search, Duration::from_secs(120)),
        ("projection products are PQP", projection_products, Duration::MAX),
        ("phase independence", phase_independence, Duration::MAX),
        ("sampler soundness and replay", sampler_soundness, Duration::MAX),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, (name, run, limit)) in checks.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = o.passed && in_time;
        failed += usize::from(!pass);
        let budget = if *limit == Duration::MAX {
            String::new()
        } else {
            format!(" / {}s", limit.as_secs())
        };
        println!(
            "[{}] {:>2}. {name}: {} ({:.1}s{budget})",
            if pass { "PASS" } else { "FAIL" },
            n + 1,
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: all checks passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} check(s) failed");
        ExitCode::FAILURE
    }
}
