//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! nonzero if any of them failed.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use gencover::bounds::{
    check_ball_entropy, check_entropy_identity, check_phi, entropy_identity_residual,
    inverse_binomial_moment, phi,
};
use gencover::pool::{pool_guaranteed, pool_verify, PoolInstance};
use gencover::probmodel::{
    estimate_uncovered, janson_certificate, lemma3_family, n_a_exact, s_set_size, s_size, CoverPair,
};
use gencover::radius::reference;
use gencover::search::{
    alpha_exact, greedy_cover, min_code_size, sample_alpha, sphere_lower_bound,
};
use gencover::{is_covering, t_covering_radius, Code, MatrixWord, Word};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

// Digit-level oracles, independent of the library's packed engines.

fn digits(index: u64, n: usize, q: u32) -> Vec<u8> {
    let mut out = vec![0u8; n];
    let mut x = index;
    for d in out.iter_mut().rev() {
        *d = (x % q as u64) as u8;
        x /= q as u64;
    }
    out
}

fn all_words(n: usize, q: u32) -> Vec<Vec<u8>> {
    (0..(q as u64).pow(n as u32))
        .map(|i| digits(i, n, q))
        .collect()
}

fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Columns where either row disagrees.
fn d2(a: &[u8], b: &[u8], v1: &[u8], v2: &[u8]) -> usize {
    (0..a.len())
        .filter(|&j| a[j] != v1[j] || b[j] != v2[j])
        .count()
}

fn covers(a: &[u8], b: &[u8], v1: &[u8], v2: &[u8], r: usize) -> bool {
    a != b && (d2(a, b, v1, v2) <= r || d2(b, a, v1, v2) <= r)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

fn choose(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn ball(t: u32, r: usize, n: usize, q: u32) -> BigUint {
    let base = BigUint::from(q).pow(t) - 1u32;
    (0..=r.min(n))
        .map(|i| choose(n as u64, i as u64) * base.pow(i as u32))
        .sum()
}

fn entropy(q: f64, x: f64) -> f64 {
    let mut h = 0.0;
    if x > 0.0 {
        h += x * ((q - 1.0) / x).log2();
    }
    if x < 1.0 {
        h += (1.0 - x) * (1.0 / (1.0 - x)).log2();
    }
    h / q.log2()
}

fn word(d: &[u8], q: u32) -> Word {
    Word::new(d.to_vec(), q).unwrap()
}

fn matrix(v1: &[u8], v2: &[u8], q: u32) -> MatrixWord {
    MatrixWord::new(vec![word(v1, q), word(v2, q)]).unwrap()
}

fn oracle_radius(code: &[Vec<u8>], n: usize, q: u32) -> usize {
    let words = all_words(n, q);
    let mut worst = 0;
    for v1 in &words {
        for v2 in &words {
            let best = code
                .iter()
                .flat_map(|a| code.iter().map(move |b| d2(a, b, v1, v2)))
                .min()
                .unwrap();
            worst = worst.max(best);
        }
    }
    worst
}

fn subsets(total: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, total: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..total {
            cur.push(i);
            rec(i + 1, total, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, total, k, &mut Vec::new(), &mut out);
    out
}

fn c1_curves() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_gencover"))
        .args(["bounds", "curve", "--q", "2", "--points", "1001"])
        .output()
        .expect("run gencover");
    if !out.status.success() {
        return outcome(false, format!("binary exited with {}", out.status));
    }
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    if lines.next() != Some("rho,lower,kappa2,upper_trivial,upper_better") {
        return outcome(false, "unexpected header");
    }
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    if rows.len() != 1001 {
        return outcome(false, format!("{} rows", rows.len()));
    }
    let num = |s: &str| s.parse::<f64>().unwrap();
    let mut lower_neq_kappa = 0;
    let mut oracle_misses = 0;
    let mut order_violations = Vec::new();
    let mut tail_nonzero = 0;
    let mut tail_trivial_nonzero = 0;
    for row in &rows {
        let rho = num(&row[0]);
        let (lower, kappa, triv, better) = (num(&row[1]), num(&row[2]), num(&row[3]), num(&row[4]));
        if rho < 0.75 {
            if row[1] != row[2] {
                lower_neq_kappa += 1;
            }
            if (kappa - (1.0 - entropy(4.0, rho))).abs() > 1e-11 {
                oracle_misses += 1;
            }
            if lower > better + 1e-12 || better > triv + 1e-12 {
                order_violations.push(rho);
            }
        } else {
            if lower != 0.0 || kappa != 0.0 || better != 0.0 {
                tail_nonzero += 1;
            }
            if triv != 0.0 {
                tail_trivial_nonzero += 1;
            }
        }
    }
    let endpoint = rows[0].join(",") == "0,1,1,1,1";
    let passed = lower_neq_kappa == 0
        && oracle_misses == 0
        && order_violations.is_empty()
        && endpoint
        && tail_nonzero == 0
        && tail_trivial_nonzero == 0;
    let span = match (order_violations.first(), order_violations.last()) {
        (Some(a), Some(b)) => format!("rho in [{a}, {b}]"),
        _ => "none".into(),
    };
    outcome(
        passed,
        format!(
            "lower!=kappa2 {lower_neq_kappa}, kappa2 oracle misses {oracle_misses}, ordering violations {} ({span}), \
             endpoint {}, nonzero lower/kappa2/upper_better past 3/4 {tail_nonzero}, nonzero upper_trivial past 3/4 {tail_trivial_nonzero}",
            order_violations.len(),
            if endpoint { "ok" } else { "wrong" },
        ),
    )
}

fn c2_identity() -> Outcome {
    let qs = [2u64, 3, 4, 5];
    let report = check_entropy_identity(&qs, 1000, 1e-10);
    let mut oracle_max: f64 = 0.0;
    let mut lib_max: f64 = 0.0;
    for &q in &qs {
        let qf = q as f64;
        let top = 1.0 - 1.0 / (qf * qf);
        for i in 0..1000 {
            let rho = top * i as f64 / 999.0;
            let mu = qf * rho / (qf + 1.0);
            let lhs = entropy(qf, mu) + mu + (1.0 - mu) * entropy(qf, (rho - mu) / (1.0 - mu));
            oracle_max = oracle_max.max((lhs - 2.0 * entropy(qf * qf, rho)).abs());
            lib_max = lib_max.max(entropy_identity_residual(rho, q));
        }
    }
    let passed = report.passed && oracle_max < 1e-10 && lib_max < 1e-10;
    outcome(
        passed,
        format!("suite max {:.3e} over {} points, library grid max {lib_max:.3e}, oracle max {oracle_max:.3e}", report.extremum, report.checked),
    )
}

fn c3_phi() -> Outcome {
    let qs = [2u64, 3, 4, 5];
    let report = check_phi(&qs, 1000, 1e-12);
    let mut min_interior = f64::INFINITY;
    let mut max_endpoint: f64 = 0.0;
    let mut oracle_bad = 0;
    for &q in &qs {
        let qf = q as f64;
        let top = 1.0 - 1.0 / (qf * qf);
        for i in 1..=1000 {
            let rho = top * i as f64 / 1001.0;
            let value = phi(rho, q);
            min_interior = min_interior.min(value);
            let oracle = entropy(qf, qf * rho / (qf + 1.0)) - entropy(qf * qf, rho);
            if oracle <= 0.0 || (oracle - value).abs() > 1e-12 {
                oracle_bad += 1;
            }
        }
        max_endpoint = max_endpoint.max(phi(0.0, q).abs()).max(phi(top, q).abs());
    }
    let passed = report.passed && min_interior > 0.0 && max_endpoint < 1e-12 && oracle_bad == 0;
    outcome(
        passed,
        format!("min interior {min_interior:.3e}, max endpoint {max_endpoint:.3e}, oracle disagreements {oracle_bad}"),
    )
}

/// Exact `V <= 2^e` with `2^e` rounded up to a 53-bit integer multiple.
fn big_le_pow2(v: &BigUint, e: f64) -> bool {
    if e < 64.0 {
        return v.to_f64().unwrap() <= e.exp2() * (1.0 + 1e-15);
    }
    let whole = e.floor();
    let frac = (e - whole).exp2();
    let mantissa = BigUint::from((frac * (1u64 << 52) as f64).ceil() as u64 + 1);
    v <= &(mantissa << (whole as usize - 52))
}

fn c4_ball_entropy() -> Outcome {
    let report = match check_ball_entropy(&[1, 2], &[2, 3], 5..=30, 20) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut checked = 0;
    let mut violations = 0;
    for t in [1u32, 2] {
        for q in [2u32, 3] {
            let qt = (q as f64).powi(t as i32);
            let top = 1.0 - 1.0 / qt;
            for n in 5..=30usize {
                for i in 0..20 {
                    let rho = top * i as f64 / 19.0;
                    let r = ((rho * n as f64) + 1e-9).floor() as usize;
                    let v = ball(t, r, n, q);
                    let e = t as f64 * n as f64 * entropy(qt, rho) * (q as f64).log2();
                    checked += 1;
                    if !big_le_pow2(&v, e) {
                        violations += 1;
                    }
                }
            }
        }
    }
    let passed = report.passed && report.violations == 0 && violations == 0;
    outcome(
        passed,
        format!(
            "library {} checks / {} violations, exact oracle {checked} checks / {violations} violations",
            report.checked, report.violations
        ),
    )
}

fn c5_radius() -> Outcome {
    let mut codes = 0;
    let mut mismatches = 0;
    for q in [2u32, 3] {
        for n in 1..=3usize {
            let total = (q as u64).pow(n as u32) as usize;
            for size in 1..=3.min(total) {
                for subset in subsets(total, size) {
                    let idx: Vec<u64> = subset.iter().map(|&i| i as u64).collect();
                    let code = Code::from_indices(n, q, &idx).unwrap();
                    let fast = t_covering_radius(&code, 2).unwrap();
                    let slow = reference::t_covering_radius(&code, 2).unwrap();
                    codes += 1;
                    if fast.radius != slow.radius || fast.deep_hole != slow.deep_hole {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let rep = Code::from_indices(3, 2, &[0, 7]).unwrap();
    let r2 = t_covering_radius(&rep, 2).unwrap().radius;
    let r1 = t_covering_radius(&rep, 1).unwrap().radius;
    let rep_digits = vec![digits(0, 3, 2), digits(7, 3, 2)];
    let oracle = oracle_radius(&rep_digits, 3, 2);
    let passed = mismatches == 0 && r2 == 2 && r1 == 1 && oracle == 2;
    outcome(passed, format!("{codes} codes, {mismatches} mismatches, R2(rep3) {r2}, R1(rep3) {r1}, oracle R2 {oracle}"))
}

fn c6_search() -> Outcome {
    let mut problems = Vec::new();
    for (n, t, r, q, want) in [(3usize, 1usize, 1usize, 2u32, 2usize), (3, 2, 2, 2, 2)] {
        let res = min_code_size(n, t, r, q).unwrap();
        if res.m_min != want || res.witness.len() != want {
            problems.push(format!("({n},{t},{r},{q}) gave {}", res.m_min));
        }
        let radius = reference::t_covering_radius(&res.witness, t)
            .unwrap()
            .radius;
        if radius > r {
            problems.push(format!("({n},{t},{r},{q}) witness has radius {radius}"));
        }
    }
    let mut instances = 0;
    for n in 1..=4usize {
        for r in 0..=n {
            let res = min_code_size(n, 2, r, 2).unwrap();
            let sphere = sphere_lower_bound(n, 2, r, 2).unwrap();
            let greedy = greedy_cover(n, 2, r, 2, 0).unwrap().len();
            instances += 1;
            if sphere > BigUint::from(res.m_min) || res.m_min > greedy {
                problems.push(format!(
                    "n={n} r={r}: {sphere} <= {} <= {greedy} fails",
                    res.m_min
                ));
            }
            if !is_covering(&res.witness, 2, r).unwrap().is_covered() {
                problems.push(format!("n={n} r={r}: witness does not cover"));
            }
            let rows: Vec<Vec<u8>> = res
                .witness
                .words()
                .iter()
                .map(|w| w.digits().to_vec())
                .collect();
            if oracle_radius(&rows, n, 2) > r {
                problems.push(format!("n={n} r={r}: oracle rejects witness"));
            }
        }
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("examples ok, {instances} sweep instances sandwiched and verified")
    } else {
        problems.join("; ")
    };
    outcome(passed, detail)
}

fn c7_alpha_monotone() -> Outcome {
    let words = all_words(2, 2);
    let mut problems = Vec::new();
    let mut table = Vec::new();
    for r in 0..=2usize {
        let rho = r as f64 / 2.0;
        let mut prev = BigRational::zero();
        let mut row = Vec::new();
        for m in 0..=4usize {
            let exact = alpha_exact(2, rho, m, 2).unwrap().ratio();
            let subsets = subsets(4, m);
            let hits = subsets
                .iter()
                .filter(|s| {
                    !s.is_empty() && {
                        let code: Vec<Vec<u8>> = s.iter().map(|&i| words[i].clone()).collect();
                        oracle_radius(&code, 2, 2) <= r
                    }
                })
                .count();
            let oracle = BigRational::new(hits.into(), subsets.len().into());
            if exact != oracle {
                problems.push(format!("r={r} M={m}: {exact} vs oracle {oracle}"));
            }
            if exact < prev {
                problems.push(format!("r={r}: drops at M={m}"));
            }
            row.push(exact.to_string());
            prev = exact;
        }
        table.push(format!("r={r} [{}]", row.join(" ")));
    }
    let passed = problems.is_empty();
    outcome(
        passed,
        if passed {
            table.join(", ")
        } else {
            problems.join("; ")
        },
    )
}

fn c8_alpha_trend() -> Outcome {
    let rho = 0.5;
    let eps = 0.1;
    let mut points = Vec::new();
    for n in 2..=6usize {
        let nf = n as f64;
        let exponent = nf * (1.0 - entropy(4.0, rho) + eps + 1.0 / nf);
        let m = exponent.exp2().floor() as usize;
        let est = sample_alpha(n, rho, m, 2, 10_000, 2024).unwrap();
        points.push((n, m, est.estimate, est.sigma()));
    }
    let mut drops = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let sigma = (a.3 * a.3 + b.3 * b.3).sqrt();
        if b.2 < a.2 - 3.0 * sigma {
            drops.push(format!("n={}->{}", a.0, b.0));
        }
    }
    let listing: Vec<String> = points
        .iter()
        .map(|(n, m, e, s)| format!("n={n} M={m} a={e:.4}+-{s:.4}"))
        .collect();
    let passed = drops.is_empty();
    let mut detail = listing.join(", ");
    if !passed {
        detail.push_str(&format!("; drops beyond 3 sigma at {}", drops.join(" ")));
    }
    outcome(passed, detail)
}

fn c9_janson() -> Outcome {
    let words = all_words(2, 2);
    let mut exact_checked = 0;
    let mut exact_violations = Vec::new();
    let mut tightest = f64::INFINITY;
    for p in [0.25, 0.5, 0.75] {
        for v1 in &words {
            for v2 in &words {
                for r in 0..=2usize {
                    let cert = janson_certificate(&matrix(v1, v2, 2), r, p).unwrap();
                    let mut prob = 0.0;
                    for mask in 0u32..16 {
                        let code: Vec<&Vec<u8>> = (0..4)
                            .filter(|i| mask >> i & 1 == 1)
                            .map(|i| &words[i])
                            .collect();
                        let hit = code
                            .iter()
                            .any(|a| code.iter().any(|b| covers(a, b, v1, v2, r)));
                        if !hit {
                            let k = mask.count_ones() as i32;
                            prob += p.powi(k) * (1.0 - p).powi(4 - k);
                        }
                    }
                    exact_checked += 1;
                    tightest = tightest.min(cert.bound - prob);
                    if prob > cert.bound + 1e-15 {
                        exact_violations.push(format!("p={p} v=[{v1:?};{v2:?}] r={r}"));
                    }
                }
            }
        }
    }
    let mut mc_checked = 0;
    let mut mc_violations = Vec::new();
    let targets = [
        (0u64, 0u64),
        (0, 1),
        (0, 3),
        (0, 7),
        (0, 15),
        (5, 9),
        (6, 6),
    ];
    for (i, &(a, b)) in targets.iter().enumerate() {
        let v = MatrixWord::from_row_indices(&[a, b], 4, 2).unwrap();
        for r in [1usize, 2] {
            for p in [0.25, 0.5, 0.75] {
                let cert = janson_certificate(&v, r, p).unwrap();
                let est = estimate_uncovered(&v, r, p, 100_000, 7 + i as u64).unwrap();
                mc_checked += 1;
                if est.estimate > cert.bound + 3.0 * est.sigma {
                    mc_violations.push(format!(
                        "v=({a},{b}) r={r} p={p}: {} > {}",
                        est.estimate, cert.bound
                    ));
                }
            }
        }
    }
    let passed = exact_violations.is_empty() && mc_violations.is_empty();
    let mut detail = format!(
        "n=2 exact {exact_checked} cases, min slack {tightest:.3e}; n=4 Monte Carlo {mc_checked} cases"
    );
    for v in exact_violations.iter().chain(&mc_violations) {
        detail.push_str(&format!("; {v}"));
    }
    outcome(passed, detail)
}

fn c10_pair_statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut instances = 0;
    let mut problems = Vec::new();
    while instances < 200 {
        let n = rng.gen_range(1..=6usize);
        let q = 2u32;
        let r = rng.gen_range(0..=n);
        let size = (q as u64).pow(n as u32);
        let pick = |rng: &mut ChaCha8Rng| digits(rng.gen_range(0..size), n, q);
        let (v1, v2, a, b) = (
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
            pick(&mut rng),
        );
        if !covers(&a, &b, &v1, &v2, r) {
            continue;
        }
        instances += 1;
        let v = matrix(&v1, &v2, q);
        let pair = CoverPair::new(word(&a, q), word(&b, q)).unwrap();
        let (u1, u2) = (
            pair.first().digits().to_vec(),
            pair.second().digits().to_vec(),
        );
        let all = all_words(n, q);
        let mut largest = 0u64;
        for i in 1..=2usize {
            for j in 1..=2usize {
                let (vi, vo) = if i == 1 { (&v1, &v2) } else { (&v2, &v1) };
                let uj = if j == 1 { &u1 } else { &u2 };
                let count = all.iter().filter(|w| d2(w, uj, vi, vo) <= r).count() as u64;
                let formula = s_size(hamming(uj, vo), r, n, q).unwrap();
                let lib = s_set_size(&v, &pair, i, j, r, false).unwrap();
                if BigUint::from(count) != formula || lib != count {
                    problems.push(format!(
                        "S({i},{j}) n={n} r={r}: {count} vs {formula} vs {lib}"
                    ));
                }
                largest = largest.max(count);
            }
        }
        let w_a = [&u1, &u2]
            .iter()
            .flat_map(|u| [hamming(u, &v1), hamming(u, &v2)])
            .min()
            .unwrap();
        if pair.w(&v).unwrap() != w_a {
            problems.push(format!("w_A mismatch n={n}"));
        }
        let base = s_size(w_a, r, n, q).unwrap().to_u64().unwrap();
        if largest != base {
            problems.push(format!("max |S| {largest} vs s_size(w_A) {base}"));
        }
        let n_a = all
            .iter()
            .filter(|w| {
                **w != u1
                    && **w != u2
                    && (covers(w, &u1, &v1, &v2, r) || covers(w, &u2, &v1, &v2, r))
            })
            .count() as u64;
        let lib_n_a = n_a_exact(&v, &pair, r).unwrap();
        if lib_n_a != n_a {
            problems.push(format!("n_A {lib_n_a} vs oracle {n_a}"));
        }
        if n_a + 2 < base || n_a > 4 * base {
            problems.push(format!("sandwich fails: base {base}, n_A {n_a}"));
        }
    }
    let mut ibm_worst: f64 = 0.0;
    for m in 0..=20u64 {
        for p in [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0] {
            let direct: f64 = (0..=m)
                .map(|k| {
                    let ln =
                        ln_choose(m, k) + k as f64 * f64::ln(p) + (m - k) as f64 * (1.0 - p).ln();
                    let prob = if p == 1.0 {
                        if k == m {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        ln.exp()
                    };
                    prob / (k as f64 + 1.0)
                })
                .sum();
            ibm_worst = ibm_worst.max((inverse_binomial_moment(m, p).unwrap() - direct).abs());
        }
    }
    if ibm_worst > 1e-12 {
        problems.push(format!("inverse binomial moment off by {ibm_worst:.3e}"));
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!("{instances} random instances, S sets exact, sandwich holds, ibm max error {ibm_worst:.3e}")
    } else {
        problems.join("; ")
    };
    outcome(passed, detail)
}

fn c11_four_zone() -> Outcome {
    let n = 12;
    let rho = 0.5;
    let mu_n = 2.0 * rho / 3.0 * n as f64;
    let v1 = digits(0b1011_0010_0110, n, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut emitted = 0;
    let mut problems = Vec::new();
    for d in [0usize, 4, 8, 12] {
        let mut flips: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            flips.swap(i, rng.gen_range(0..=i));
        }
        let mut v2 = v1.clone();
        for &j in &flips[..d] {
            v2[j] ^= 1;
        }
        let family = match lemma3_family(&matrix(&v1, &v2, 2), rho, Some(20_000)) {
            Ok(f) => f,
            Err(e) => {
                problems.push(format!("d={d}: {e}"));
                continue;
            }
        };
        let r = family.instance.r;
        for pair in &family.pairs {
            let (a, b) = (pair.u1.digits(), pair.u2.digits());
            let w = [a, b]
                .iter()
                .flat_map(|u| [hamming(u, &v1), hamming(u, &v2)])
                .min()
                .unwrap();
            emitted += 1;
            if !covers(a, b, &v1, &v2, r) {
                problems.push(format!("d={d}: pair does not cover"));
                break;
            }
            if (w as f64) < mu_n - 11.0 || w as f64 > mu_n || w != pair.w {
                problems.push(format!("d={d}: w {w} (reported {})", pair.w));
                break;
            }
        }
    }
    let passed = problems.is_empty() && emitted > 0;
    outcome(
        passed,
        if passed {
            format!("{emitted} pairs over d in {{0,4,8,12}}")
        } else {
            problems.join("; ")
        },
    )
}

fn c12_pool() -> Outcome {
    let mut cases = 0;
    let mut mismatches = 0;
    for n in 1..=3usize {
        let words = all_words(n, 2);
        let total = words.len();
        for mask in 1u32..(1 << total) {
            let idx: Vec<u64> = (0..total as u64).filter(|i| mask >> i & 1 == 1).collect();
            let code = Code::from_indices(n, 2, &idx).unwrap();
            for r in 0..=n {
                let wins = words.iter().all(|a| {
                    words.iter().all(|b| {
                        let inst =
                            PoolInstance::new(code.clone(), word(a, 2), word(b, 2), r).unwrap();
                        pool_verify(&inst).unwrap().win
                    })
                });
                cases += 1;
                if wins != is_covering(&code, 2, r).unwrap().is_covered()
                    || wins != pool_guaranteed(&code, r).unwrap()
                {
                    mismatches += 1;
                }
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{cases} ticket sets x radii, {mismatches} mismatches"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 12] = [
        ("rate curves", Duration::from_secs(1), c1_curves),
        ("entropy identity", Duration::from_secs(1), c2_identity),
        ("phi positivity", Duration::from_secs(1), c3_phi),
        (
            "ball entropy bound",
            Duration::from_secs(10),
            c4_ball_entropy,
        ),
        (
            "radius oracle equivalence",
            Duration::from_secs(60),
            c5_radius,
        ),
        ("exact search", Duration::from_secs(300), c6_search),
        (
            "alpha monotone in M",
            Duration::from_secs(10),
            c7_alpha_monotone,
        ),
        ("alpha trend in n", Duration::from_secs(600), c8_alpha_trend),
        ("janson soundness", Duration::from_secs(300), c9_janson),
        (
            "pair statistics",
            Duration::from_secs(60),
            c10_pair_statistics,
        ),
        (
            "four-zone construction",
            Duration::from_secs(60),
            c11_four_zone,
        ),
        ("pool equivalence", Duration::from_secs(60), c12_pool),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let passed = result.passed && in_time;
        if !passed {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {name}: {} ({:.2?} of {:?})",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            elapsed,
            limit,
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
