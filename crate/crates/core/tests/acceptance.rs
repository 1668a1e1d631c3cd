//! Acceptance gate. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line per criterion and exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use qclone::analytic::{
    aligned_reduced, leaked_words, missing_pair_reduced, n1_reduced_S, three_pair_reduced,
    AlignedDescriptor, ThreePairSubset,
};
use qclone::classify::{
    classify_subset, distance_from_maximally_mixed, max_pairwise_distance, trace_distance, Verdict,
    WITNESS_TOL,
};
use qclone::linalg::{self, is_unitary, kron_all, max_abs_diff, ComplexMatrix};
use qclone::modnum::{enumerate_system, solve_aligned_system};
use qclone::pauli::{
    enc_coefficient, expectation, random_states, word_dagger, word_matrix, word_product, PauliWord,
};
use qclone::protocol::{build_encoder, encode, oracle_reduced, RegisterState, RegisterSubset};
use qclone::Dim;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_2026;

fn dim(d: u32) -> Dim {
    Dim::new(d).unwrap()
}

fn subset(n: usize, s: &str) -> RegisterSubset {
    RegisterSubset::parse(n, s).unwrap()
}

type Criterion = (&'static str, &'static str, fn() -> Check);

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new() -> Self {
        Check {
            pass: true,
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            if self.pass {
                self.detail = what();
            }
            self.pass = false;
        }
    }

    fn summary(mut self, s: String) -> Self {
        if self.pass {
            self.detail = s;
        }
        self
    }
}

/// Criterion 1: Encoder unitarity within 1e-10.
fn encoder_unitarity() -> Check {
    let mut c = Check::new();
    let mut cases: Vec<(u32, usize)> = (2..=7).map(|d| (d, 1)).collect();
    cases.extend([(2, 2), (2, 3), (3, 2), (3, 3)]);
    let mut worst: f64 = 0.0;
    for &(d, n) in &cases {
        let u = build_encoder(dim(d), n).unwrap();
        let err = max_abs_diff(&(&u * u.adjoint()), &linalg::identity(u.nrows()));
        worst = worst.max(err);
        c.require(is_unitary(&u, 1e-10), || {
            format!("d={d} n={n}: |UU^+ - I| = {err:.3e}")
        });
    }
    c.summary(format!(
        "{} encoders, max |UU^+ - I| = {worst:.2e}",
        cases.len()
    ))
}

/// Criterion 2: n = 1: {N1} = I/d within 1e-12, {S1} = closed form within 1e-10.
fn single_pair() -> Check {
    let mut c = Check::new();
    let (mut worst_n, mut worst_s): (f64, f64) = (0.0, 0.0);
    for d in 2..=6u32 {
        for psi in random_states(dim(d), 10, SEED + d as u64) {
            let state = encode(&psi, 1).unwrap();
            let noise = state.reduce(&subset(1, "N1")).unwrap();
            let en = max_abs_diff(&noise.matrix, &linalg::maximally_mixed(d as usize));
            worst_n = worst_n.max(en);
            c.require(en <= 1e-12, || format!("d={d}: |rho_N1 - I/d| = {en:.3e}"));

            let signal = state.reduce(&subset(1, "S1")).unwrap();
            let es = max_abs_diff(&signal.matrix, &n1_reduced_S(&psi).matrix);
            worst_s = worst_s.max(es);
            c.require(es <= 1e-10, || {
                format!("d={d}: |rho_S1 - closed form| = {es:.3e}")
            });
        }
    }
    c.summary(format!(
        "max |N1 - I/d| = {worst_n:.2e}, max |S1 - closed| = {worst_s:.2e}"
    ))
}

/// Criterion 3: n = 2: {S1,N2} and {S1,S2} maximally mixed within 1e-10.
fn two_pairs() -> Check {
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    for d in 2..=6u32 {
        let mixed = linalg::maximally_mixed((d * d) as usize);
        for psi in random_states(dim(d), 10, SEED + 10 + d as u64) {
            let state = encode(&psi, 2).unwrap();
            for s in ["S1,N2", "S1,S2"] {
                let r = state.reduce(&subset(2, s)).unwrap();
                let e = max_abs_diff(&r.matrix, &mixed);
                worst = worst.max(e);
                c.require(e <= 1e-10, || format!("d={d} {s}: |rho - I/d^2| = {e:.3e}"));
            }
        }
    }
    c.summary(format!("max |rho - I/d^2| = {worst:.2e}"))
}

/// Criterion 4: n = 3 explicit states vs the oracle within 1e-9 (trace distance).
fn three_pairs() -> Check {
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    let cases = [
        (ThreePairSubset::TwoSignals, "S1,S2,N3"),
        (ThreePairSubset::OneSignal, "S1,N2,N3"),
        (ThreePairSubset::ThreeSignals, "S1,S2,S3"),
    ];
    let mut nontrivial = 0;
    for d in 2..=6u32 {
        for psi in random_states(dim(d), 5, SEED + 20 + d as u64) {
            let state = encode(&psi, 3).unwrap();
            for (which, s) in cases {
                let explicit = three_pair_reduced(&psi, which).unwrap();
                let oracle = state.reduce(&subset(3, s)).unwrap();
                let dist = trace_distance(&explicit, &oracle).unwrap();
                worst = worst.max(dist);
                c.require(dist <= 1e-9, || format!("d={d} {s}: distance {dist:.3e}"));
                if distance_from_maximally_mixed(&oracle) > WITNESS_TOL {
                    nontrivial += 1;
                }
            }
        }
    }
    // the gcd(d,3)=3 and gcd(d,2)=2 branches must actually be exercised
    c.require(nontrivial > 0, || "no leaking branch was exercised".into());
    c.summary(format!(
        "max distance {worst:.2e}, {nontrivial} leaking cases"
    ))
}

/// Criterion 5: Full aligned grid: gcd verdict vs numeric independence at 1e-9 and
/// closed form vs oracle within 1e-9.
fn aligned_grid() -> Check {
    let mut c = Check::new();
    let (mut worst_analytic, mut worst_uninf, mut min_leak): (f64, f64, f64) =
        (0.0, 0.0, f64::INFINITY);
    let mut rows = 0;
    for d in 2..=6u32 {
        for n in 1..=3usize {
            let inputs = random_states(dim(d), 10, SEED + 100 * d as u64 + n as u64);
            let encoded: Vec<RegisterState> =
                inputs.iter().map(|psi| encode(psi, n).unwrap()).collect();
            for p in 0..=n {
                rows += 1;
                let s = RegisterSubset::aligned(n, p).unwrap();
                let desc = AlignedDescriptor::new(dim(d), n as u32, p as u32).unwrap();
                let class = classify_subset(dim(d), &s);
                let oracle: Vec<_> = encoded.iter().map(|e| e.reduce(&s).unwrap()).collect();
                let spread = max_pairwise_distance(&oracle).unwrap();
                let independent = spread <= 1e-9;
                let g = desc.g();
                c.require((g == 1) == independent, || {
                    format!("d={d} n={n} p={p}: g={g} but spread={spread:.3e}")
                });
                c.require(
                    (g == 1) == (class.verdict == Verdict::CompletelyUninformative),
                    || {
                        format!(
                            "d={d} n={n} p={p}: classifier says {:?} with g={g}",
                            class.verdict
                        )
                    },
                );
                if g == 1 {
                    worst_uninf = worst_uninf.max(spread);
                    for o in &oracle {
                        let m = distance_from_maximally_mixed(o);
                        c.require(m <= 1e-9, || {
                            format!("d={d} n={n} p={p}: not maximally mixed ({m:.3e})")
                        });
                    }
                } else {
                    min_leak = min_leak.min(spread);
                    c.require(spread > WITNESS_TOL, || {
                        format!("d={d} n={n} p={p}: leak not witnessed")
                    });
                }
                for (psi, o) in inputs.iter().zip(&oracle) {
                    let a = aligned_reduced(psi, &desc).unwrap();
                    let dist = trace_distance(&a, o).unwrap();
                    worst_analytic = worst_analytic.max(dist);
                    c.require(dist <= 1e-9, || {
                        format!("d={d} n={n} p={p}: closed form off by {dist:.3e}")
                    });
                }
            }
        }
    }
    c.summary(format!(
        "{rows} configs; closed form <= {worst_analytic:.2e}; g=1 spread <= {worst_uninf:.2e}; g>1 spread >= {min_leak:.2e}"
    ))
}

/// Criterion 6: Congruence solver vs enumeration, plus the n = 3 example solution sets.
fn congruence_solver() -> Check {
    let mut c = Check::new();
    let mut count = 0;
    for d in 2..=30u32 {
        for p in 0..=6u32 {
            for q in 0..=6u32 {
                if p + q == 0 {
                    continue;
                }
                count += 1;
                let closed = solve_aligned_system(dim(d), p, q).unwrap();
                let brute = enumerate_system(dim(d), p, q).unwrap();
                c.require(closed.as_set() == brute.as_set(), || {
                    format!("d={d} p={p} q={q}")
                });
            }
        }
    }
    for d in [3u32, 6, 9] {
        let t = d / 3;
        let want = [(0, 0), (t, t), (2 * t, 2 * t)];
        let got = solve_aligned_system(dim(d), 2, 1).unwrap();
        c.require(got.as_set() == want.iter().copied().collect(), || {
            format!("thirds at d={d}: {:?}", got.solutions)
        });
    }
    for d in [2u32, 4, 6] {
        let h = d / 2;
        for (p, q) in [(1, 2), (3, 0)] {
            let got = solve_aligned_system(dim(d), p, q).unwrap();
            c.require(
                got.as_set() == [(0, 0), (h, h)].into_iter().collect(),
                || format!("halves at d={d} p={p} q={q}: {:?}", got.solutions),
            );
        }
    }
    c.summary(format!(
        "{count} systems agree; n=3 example sets reproduced"
    ))
}

/// Criterion 7: Qubits: leak iff n odd and p odd, operator (XZ)^n with sign (-1)^(n-p+1).
fn qubit_parity() -> Check {
    let mut c = Check::new();
    let d = dim(2);
    let xz = PauliWord::new(d, 1, 1);
    let mut leaking = 0;
    for n in 1..=5usize {
        let inputs = random_states(d, 6, SEED + 700 + n as u64);
        let encoded: Vec<RegisterState> =
            inputs.iter().map(|psi| encode(psi, n).unwrap()).collect();
        for p in 0..=n {
            let desc = AlignedDescriptor::new(d, n as u32, p as u32).unwrap();
            let expect_leak = n % 2 == 1 && p % 2 == 1;
            let leak = leaked_words(&desc);
            c.require(leak.is_empty() != expect_leak, || {
                format!("n={n} p={p}: leak list {:?}", leak.len())
            });
            let s = RegisterSubset::aligned(n, p).unwrap();
            let oracle: Vec<_> = encoded.iter().map(|e| e.reduce(&s).unwrap()).collect();
            let spread = max_pairwise_distance(&oracle).unwrap();
            c.require(expect_leak == (spread > WITNESS_TOL), || {
                format!("n={n} p={p}: spread {spread:.3e}")
            });
            let sign = if (n - p + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let op = kron_all(std::iter::repeat_n(&word_matrix(&xz), n).collect::<Vec<_>>());
            for (psi, o) in inputs.iter().zip(&oracle) {
                let mut want: ComplexMatrix = linalg::identity(1 << n);
                if expect_leak {
                    want += &op * (Complex64::new(sign, 0.0) * expectation(psi, &xz).unwrap());
                }
                want /= Complex64::new((1 << n) as f64, 0.0);
                let e = max_abs_diff(&o.matrix, &want);
                c.require(e <= 1e-10, || {
                    format!("n={n} p={p}: parity formula off by {e:.3e}")
                });
            }
            if expect_leak {
                leaking += 1;
                let t = &leak[0];
                let coeff = t.coefficient.to_complex();
                c.require(leak.len() == 1 && (t.a, t.b) == (1, 1), || {
                    format!("n={n} p={p}: leak {:?}", (t.a, t.b))
                });
                c.require((coeff - Complex64::new(sign, 0.0)).norm() < 1e-12, || {
                    format!("n={n} p={p}: sign {coeff} != {sign}")
                });
            }
        }
    }
    c.summary(format!(
        "n=1..5 all p; {leaking} leaking configurations, all with the predicted sign"
    ))
}

/// Criterion 8a: Every subset missing a pair is input-independent at 1e-9.
fn missing_pair_independence() -> Check {
    let mut c = Check::new();
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for d in 2..=3u32 {
        for n in 2..=3usize {
            let encoded: Vec<RegisterState> =
                random_states(dim(d), 10, SEED + 800 + 10 * d as u64 + n as u64)
                    .iter()
                    .map(|psi| encode(psi, n).unwrap())
                    .collect();
            for s in RegisterSubset::all(n)
                .into_iter()
                .filter(|s| !s.touches_all_pairs())
            {
                count += 1;
                let oracle: Vec<_> = encoded.iter().map(|e| e.reduce(&s).unwrap()).collect();
                let spread = max_pairwise_distance(&oracle).unwrap();
                worst = worst.max(spread);
                c.require(spread <= 1e-9, || {
                    format!("d={d} n={n} {s}: spread {spread:.3e}")
                });
                c.require(
                    classify_subset(dim(d), &s).verdict == Verdict::CompletelyUninformative,
                    || format!("d={d} n={n} {s}: misclassified"),
                );
            }
        }
    }
    c.summary(format!("{count} subsets, max spread {worst:.2e}"))
}

/// Criterion 8b: Closed-form missing-pair state vs the oracle within 1e-9.
fn missing_pair_closed_form() -> Check {
    let mut c = Check::new();
    let mut worst: f64 = 0.0;
    for d in 2..=3u32 {
        for n in 2..=3usize {
            for missing in 1..=n {
                let closed = missing_pair_reduced(dim(d), n, missing).unwrap();
                let kept: Vec<usize> = (1..=n).filter(|&i| i != missing).collect();
                let labels: Vec<String> = kept
                    .iter()
                    .flat_map(|i| [format!("S{i}"), format!("N{i}")])
                    .collect();
                let s = subset(n, &labels.join(","));
                for psi in random_states(dim(d), 5, SEED + 900 + missing as u64) {
                    let o = oracle_reduced(&psi, n, &s).unwrap();
                    let dist = trace_distance(&closed, &o).unwrap();
                    worst = worst.max(dist);
                    c.require(dist <= 1e-9, || {
                        format!("d={d} n={n} missing={missing}: {dist:.3e}")
                    });
                }
            }
        }
    }
    c.summary(format!("max distance {worst:.2e}"))
}

/// Criterion 8c: Missing-pair subsets that retain a full pair are not maximally mixed
/// (trace distance from I/d^m above 1e-3).
fn missing_pair_not_mixed() -> Check {
    let mut c = Check::new();
    let mut checked = 0;
    let mut failures: Vec<String> = Vec::new();
    let mut full_pairs_of_failures = std::collections::BTreeSet::new();
    for d in 2..=3u32 {
        for n in 2..=3usize {
            let psi = &random_states(dim(d), 1, SEED + 1000 + d as u64)[0];
            let state = encode(psi, n).unwrap();
            for s in RegisterSubset::all(n)
                .into_iter()
                .filter(|s| !s.touches_all_pairs() && s.has_complete_pair())
            {
                checked += 1;
                let dist = distance_from_maximally_mixed(&state.reduce(&s).unwrap());
                if dist <= 1e-3 {
                    full_pairs_of_failures.insert(s.complete_pairs());
                    failures.push(format!(
                        "d={d} n={n} {s} ({} full pair): {dist:.1e}",
                        s.complete_pairs()
                    ));
                }
            }
        }
    }
    let total = failures.len();
    c.require(failures.is_empty(), || {
        format!(
            "{total}/{checked} subsets are maximally mixed, e.g. {}; full pairs retained by these: {:?}",
            failures.iter().take(3).cloned().collect::<Vec<_>>().join("; "),
            full_pairs_of_failures
        )
    });
    c.summary(format!("{checked} subsets, all at distance > 1e-3"))
}

/// Criterion 9: Pauli algebra at the matrix level within 1e-12, and exhaustive
/// coefficient products for d <= 5.
fn pauli_exactness() -> Check {
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut count = 0;
    for d in 2..=7u32 {
        let dd = dim(d);
        let m = d as i64;
        for _ in 0..1000 {
            let mut word = || {
                PauliWord::with_phase(
                    dd,
                    rng.random_range(0..m),
                    rng.random_range(0..m),
                    rng.random_range(0..2 * m),
                )
            };
            let (w1, w2) = (word(), word());
            let prod = word_matrix(&word_product(&w1, &w2).unwrap());
            let e1 = max_abs_diff(&prod, &(word_matrix(&w1) * word_matrix(&w2)));
            let e2 = max_abs_diff(&word_matrix(&word_dagger(&w1)), &word_matrix(&w1).adjoint());
            c.require(e1 <= 1e-12 && e2 <= 1e-12, || {
                format!("d={d}: {w1} * {w2}: {e1:.3e} / {e2:.3e}")
            });
            c.require(
                word_product(&w1, &word_dagger(&w1)).unwrap().is_identity(),
                || format!("d={d}: w w^+ != I for {w1}"),
            );
            count += 1;
        }
    }
    let mut products = 0;
    for d in 2..=5u32 {
        let delta = (d % 2) as f64;
        let f = |x: u32| x as f64 * (x as f64 + delta);
        for k in 0..d {
            for l in 0..d {
                for mm in 0..d {
                    for t in 0..d {
                        let got = (enc_coefficient(dim(d), k, l)
                            * enc_coefficient(dim(d), mm, t).conj())
                        .to_complex();
                        let want = Complex64::from_polar(
                            1.0,
                            -PI * (f(k) + f(l) - f(mm) - f(t)) / d as f64,
                        );
                        c.require((got - want).norm() <= 1e-12, || {
                            format!("d={d} k={k} l={l} m={mm} t={t}")
                        });
                        products += 1;
                    }
                }
            }
        }
    }
    c.summary(format!(
        "{count} word identities, {products} coefficient products"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1", "encoder unitarity", encoder_unitarity),
        ("2", "n=1 reduced states", single_pair),
        ("3", "n=2 reduced states", two_pairs),
        ("4", "n=3 explicit states", three_pairs),
        (
            "5",
            "gcd classification on the aligned grid",
            aligned_grid,
        ),
        ("6", "congruence solver", congruence_solver),
        ("7", "qubit parity law", qubit_parity),
        (
            "8a",
            "missing-pair subsets are input-independent",
            missing_pair_independence,
        ),
        ("8b", "missing-pair closed form", missing_pair_closed_form),
        (
            "8c",
            "retained full pair is not maximally mixed",
            missing_pair_not_mixed,
        ),
        ("9", "Pauli algebra exactness", pauli_exactness),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let check = run();
        let tag = if check.pass { "PASS" } else { "FAIL" };
        if !check.pass {
            failed += 1;
        }
        println!(
            "[{tag}] criterion {id:<3} {name}: {} ({:.1}s)",
            check.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
