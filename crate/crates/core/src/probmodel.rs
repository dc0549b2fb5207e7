//! Finite-length counterparts of the random-code covering argument for
//! second-order covering.
//!
//! A target is a 2-row matrix `v = [v1; v2]`. An unordered pair of distinct
//! words covers it when one of its two row orders is within 2-distance `r`.
//! The family of all covering pairs drives a Janson-type upper bound on the
//! probability that a Bernoulli random code leaves `v` uncovered.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::inverse_binomial_moment;
use crate::error::{Error, Result};
use crate::radius::map_chunks;
use crate::words::{
    ball_size, binomial, hamming_distance, space_size, MatrixWord, PackedLayout, Word,
};

/// Default cap on enumerated candidate pairs.
pub const DEFAULT_FAMILY_BUDGET: f64 = 1e8;

const MAX_WORDS: u64 = 1 << 16;

/// Unordered pair of distinct words, stored in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CoverPair {
    u1: Word,
    u2: Word,
}

impl CoverPair {
    pub fn new(a: Word, b: Word) -> Result<Self> {
        if a.len() != b.len() || a.q() != b.q() {
            return Err(Error::ShapeMismatch(format!("{a} and {b}")));
        }
        if a == b {
            return Err(Error::Domain(format!(
                "pair needs distinct words, got {a} twice"
            )));
        }
        Ok(if a < b {
            CoverPair { u1: a, u2: b }
        } else {
            CoverPair { u1: b, u2: a }
        })
    }

    pub fn first(&self) -> &Word {
        &self.u1
    }

    pub fn second(&self) -> &Word {
        &self.u2
    }

    /// `min_{i,j} d(u_i, v_j)`.
    pub fn w(&self, v: &MatrixWord) -> Result<usize> {
        check_target(v)?;
        let mut best = usize::MAX;
        for u in [&self.u1, &self.u2] {
            for row in v.rows() {
                best = best.min(hamming_distance(u, row)?);
            }
        }
        Ok(best)
    }
}

fn check_target(v: &MatrixWord) -> Result<()> {
    if v.t() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "target must have 2 rows, got {}",
            v.t()
        )));
    }
    Ok(())
}

fn stack(a: &Word, b: &Word) -> Result<MatrixWord> {
    MatrixWord::new(vec![a.clone(), b.clone()])
}

/// `u1 != u2` and some row order of the pair is within `r` of `v`.
pub fn covers(u1: &Word, u2: &Word, v: &MatrixWord, r: usize) -> Result<bool> {
    check_target(v)?;
    let forward = stack(u1, u2)?;
    if forward.n() != v.n() || forward.q() != v.q() {
        return Err(Error::ShapeMismatch(format!(
            "pair {u1},{u2} against target {v}"
        )));
    }
    if u1 == u2 {
        return Ok(false);
    }
    let d1 = crate::words::t_distance(&forward, v)?;
    let d2 = crate::words::t_distance(&stack(u2, u1)?, v)?;
    Ok(d1.min(d2) <= r)
}

/// Precomputed distances from every word to each target row.
struct TargetTable {
    n: usize,
    q: u32,
    r: u32,
    words: u64,
    to_v1: Vec<u64>,
    to_v2: Vec<u64>,
}

impl TargetTable {
    fn new(v: &MatrixWord, r: usize) -> Result<Self> {
        check_target(v)?;
        let (n, q) = (v.n(), v.q());
        if r > n {
            return Err(Error::RadiusOutOfRange { r, n });
        }
        let words = space_size(n, q)
            .filter(|&w| w <= MAX_WORDS)
            .ok_or_else(|| {
                Error::UnsupportedInstance(format!(
                    "{q}^{n} words exceed the enumeration limit {MAX_WORDS}"
                ))
            })?;
        let layout = PackedLayout::new(n, q)?;
        let (p1, p2) = (v.rows()[0].packed(), v.rows()[1].packed());
        let mut to_v1 = Vec::with_capacity(words as usize);
        let mut to_v2 = Vec::with_capacity(words as usize);
        for i in 0..words {
            let w = Word::from_index(i, n, q)?.packed();
            to_v1.push(layout.diff_support(&w, &p1));
            to_v2.push(layout.diff_support(&w, &p2));
        }
        Ok(TargetTable {
            n,
            q,
            r: r as u32,
            words,
            to_v1,
            to_v2,
        })
    }

    fn ordered(&self, a: u64, b: u64) -> bool {
        (self.to_v1[a as usize] | self.to_v2[b as usize]).count_ones() <= self.r
    }

    fn covers(&self, a: u64, b: u64) -> bool {
        a != b && (self.ordered(a, b) || self.ordered(b, a))
    }

    fn near(&self, masks: &[u64]) -> Vec<u64> {
        (0..self.words)
            .filter(|&i| masks[i as usize].count_ones() <= self.r)
            .collect()
    }

    /// Covering pairs as index pairs `(a, b)` with `a < b`, ascending.
    fn family(&self, budget: f64) -> Result<Vec<(u64, u64)>> {
        let first = self.near(&self.to_v1);
        let second = self.near(&self.to_v2);
        let estimate = first.len() as f64 * second.len() as f64;
        if estimate > budget {
            return Err(Error::BudgetExceeded { estimate, budget });
        }
        let mut set = BTreeSet::new();
        for &a in &first {
            for &b in &second {
                if a != b && self.ordered(a, b) {
                    set.insert((a.min(b), a.max(b)));
                }
            }
        }
        Ok(set.into_iter().collect())
    }

    fn n_a(&self, a: u64, b: u64) -> u64 {
        (0..self.words)
            .filter(|&w| w != a && w != b && (self.covers(w, a) || self.covers(w, b)))
            .count() as u64
    }

    fn word(&self, i: u64) -> Word {
        Word::from_index(i, self.n, self.q).expect("index in range")
    }

    fn index_pair(&self, pair: &CoverPair) -> Result<(u64, u64)> {
        for u in [&pair.u1, &pair.u2] {
            if u.len() != self.n || u.q() != self.q {
                return Err(Error::ShapeMismatch(format!(
                    "{u} against a target of length {}",
                    self.n
                )));
            }
        }
        Ok((pair.u1.index(), pair.u2.index()))
    }
}

/// Every unordered pair of distinct words covering `v` within `r`.
pub fn enumerate_family(v: &MatrixWord, r: usize) -> Result<Vec<CoverPair>> {
    enumerate_family_with(v, r, DEFAULT_FAMILY_BUDGET)
}

pub fn enumerate_family_with(v: &MatrixWord, r: usize, budget: f64) -> Result<Vec<CoverPair>> {
    let table = TargetTable::new(v, r)?;
    Ok(table
        .family(budget)?
        .into_iter()
        .map(|(a, b)| CoverPair {
            u1: table.word(a),
            u2: table.word(b),
        })
        .collect())
}

/// Number of third words forming a covering pair with either member.
pub fn n_a_exact(v: &MatrixWord, pair: &CoverPair, r: usize) -> Result<u64> {
    let table = TargetTable::new(v, r)?;
    let (a, b) = table.index_pair(pair)?;
    if !table.covers(a, b) {
        return Err(Error::PairNotInFamily);
    }
    Ok(table.n_a(a, b))
}

/// `q^m V^{(1)}_{r-m, n-m, q}`, or 0 when `m > r`.
pub fn s_size(m: usize, r: usize, n: usize, q: u32) -> Result<BigUint> {
    if r > n {
        return Err(Error::RadiusOutOfRange { r, n });
    }
    if m > r {
        return Ok(BigUint::zero());
    }
    Ok(BigUint::from(q).pow(m as u32) * ball_size(1, r - m, n - m, q)?)
}

/// Words `w` with `[w; u_j]` within `r` of `[v_i; v_{3-i}]`, for
/// `i, j in {1, 2}`. With `exclude_pair` the pair's own words are dropped.
pub fn s_set_size(
    v: &MatrixWord,
    pair: &CoverPair,
    i: usize,
    j: usize,
    r: usize,
    exclude_pair: bool,
) -> Result<u64> {
    if !(1..=2).contains(&i) || !(1..=2).contains(&j) {
        return Err(Error::Domain(format!(
            "S index ({i}, {j}) outside {{1, 2}}"
        )));
    }
    let table = TargetTable::new(v, r)?;
    let (a, b) = table.index_pair(pair)?;
    let partner = if j == 1 { a } else { b };
    let (top, bottom) = if i == 1 {
        (&table.to_v1, &table.to_v2)
    } else {
        (&table.to_v2, &table.to_v1)
    };
    Ok((0..table.words)
        .filter(|&w| !(exclude_pair && (w == a || w == b)))
        .filter(|&w| (top[w as usize] | bottom[partner as usize]).count_ones() <= table.r)
        .count() as u64)
}

/// One family member's share of the certificate exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub pair: CoverPair,
    pub w: usize,
    pub n_a: u64,
    pub contribution: f64,
}

/// Upper bound on the probability that the random code leaves `v` uncovered
/// by any pair of distinct codewords.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JansonCertificate {
    pub target: MatrixWord,
    pub r: usize,
    pub p: f64,
    pub family_size: usize,
    pub bound: f64,
    /// No pair covers the target; the bound is then 1.
    pub empty_family: bool,
    pub w_histogram: BTreeMap<usize, usize>,
    #[serde(skip)]
    pub records: Vec<PairRecord>,
}

/// `exp(-sum_A p^2 / 2 * E[1/(Bin(n_A, p) + 1)])` over the covering family.
pub fn janson_certificate(v: &MatrixWord, r: usize, p: f64) -> Result<JansonCertificate> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must be in (0, 1], got {p}")));
    }
    let table = TargetTable::new(v, r)?;
    let family = table.family(DEFAULT_FAMILY_BUDGET)?;
    let mut records = Vec::with_capacity(family.len());
    let mut exponent = 0.0;
    let mut w_histogram = BTreeMap::new();
    for (a, b) in family {
        let pair = CoverPair {
            u1: table.word(a),
            u2: table.word(b),
        };
        let w = pair.w(v)?;
        let n_a = table.n_a(a, b);
        let contribution = p * p * 0.5 * inverse_binomial_moment(n_a, p)?;
        exponent += contribution;
        *w_histogram.entry(w).or_insert(0) += 1;
        records.push(PairRecord {
            pair,
            w,
            n_a,
            contribution,
        });
    }
    Ok(JansonCertificate {
        target: v.clone(),
        r,
        p,
        family_size: records.len(),
        bound: (-exponent).exp(),
        empty_family: records.is_empty(),
        w_histogram,
        records,
    })
}

/// Empirical probability that no pair of distinct codewords covers `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncoveredEstimate {
    pub trials: u64,
    pub uncovered: u64,
    pub estimate: f64,
    pub sigma: f64,
}

/// Trial `k` draws the Bernoulli(`p`) code from ChaCha8 seeded with `seed`
/// on stream `k`, one draw per word in index order.
pub fn estimate_uncovered(
    v: &MatrixWord,
    r: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<UncoveredEstimate> {
    estimate_uncovered_with(v, r, p, trials, seed, 1)
}

pub fn estimate_uncovered_with(
    v: &MatrixWord,
    r: usize,
    p: f64,
    trials: u64,
    seed: u64,
    threads: usize,
) -> Result<UncoveredEstimate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must be in [0, 1], got {p}")));
    }
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let table = TargetTable::new(v, r)?;
    let family = table.family(DEFAULT_FAMILY_BUDGET)?;
    let words = table.words as usize;
    let uncovered: u64 = map_chunks(trials, threads, |start, end| {
        let mut member = vec![false; words];
        (start..end)
            .filter(|&trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                for slot in member.iter_mut() {
                    *slot = rng.gen::<f64>() < p;
                }
                !family
                    .iter()
                    .any(|&(a, b)| member[a as usize] && member[b as usize])
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    let estimate = uncovered as f64 / trials as f64;
    Ok(UncoveredEstimate {
        trials,
        uncovered,
        estimate,
        sigma: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
    })
}

/// Zone sizes and placement counts of the four-zone pair construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Instance {
    pub v1: Word,
    pub v2: Word,
    pub d: usize,
    pub delta: f64,
    pub rho: f64,
    pub mu: f64,
    /// `floor(mu n)`.
    pub mu_n_floor: usize,
    /// Covering radius `floor(rho n)`.
    pub r: usize,
    pub l_nu: usize,
    pub l_nc: usize,
    pub l_zc: usize,
    pub l_zu: usize,
    /// Entries of `u2` changed to a different nonzero value inside the changed zone.
    pub u2_nonzero_changes: usize,
    /// Nonzero entries of `u1` per zone, in the order NU, NC, ZC, ZU.
    pub u1_nonzero: [usize; 4],
    /// Nonzero entries of `u1` disagreeing with `v2` in NU and NC.
    pub u1_disagree: [usize; 2],
    /// Coordinates of the normalized word, listed as original positions.
    pub normalization: Vec<usize>,
    /// Number of (u1, u2) constructions, counted with multiplicity.
    #[serde(serialize_with = "as_decimal")]
    pub constructions: BigUint,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// An emitted pair with its zone sets in original coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Pair {
    /// Row order that meets the target: `u1` faces `v1`.
    pub u1: Word,
    pub u2: Word,
    pub w: usize,
    /// Zones NU, NC, ZC, ZU.
    pub zones: [Vec<usize>; 4],
}

impl Lemma3Pair {
    pub fn pair(&self) -> CoverPair {
        CoverPair::new(self.u1.clone(), self.u2.clone()).expect("emitted pairs are distinct")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Family {
    pub instance: Lemma3Instance,
    pub pairs: Vec<Lemma3Pair>,
    /// Distinct unordered pairs among the emitted ones.
    pub distinct: usize,
    /// Constructions visited that produced `u1 == u2`.
    pub degenerate: u64,
    /// The cap was hit; `pairs` holds an evenly strided sample of constructions.
    pub truncated: bool,
}

/// Decimal rational of the shortest round-trip representation.
fn decimal_rational(x: f64) -> BigRational {
    let text = format!("{x}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("decimal digits");
    BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32))
}

fn floor_usize(x: &BigRational) -> Result<usize> {
    x.floor()
        .to_integer()
        .to_usize()
        .ok_or_else(|| Error::UnsupportedInstance(format!("zone count {x} is negative")))
}

enum Factor {
    /// Choose `k` of `m` slots.
    Subset { m: usize, k: usize },
    /// `k` independent digits in `0..radix`.
    Digits { radix: u32, k: usize },
}

impl Factor {
    fn size(&self) -> Option<u128> {
        match *self {
            Factor::Subset { m, k } => binomial(m as u64, k as u64).to_u128(),
            Factor::Digits { radix, k } => u128::from(radix).checked_pow(k as u32),
        }
    }
}

/// Lexicographic unranking of a `k`-subset of `0..m`.
fn unrank_subset(m: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    while out.len() < k {
        let rest = binomial((m - x - 1) as u64, (k - out.len() - 1) as u64)
            .to_u128()
            .expect("fits when the total fits");
        if rank < rest {
            out.push(x);
        } else {
            rank -= rest;
        }
        x += 1;
    }
    out
}

fn unrank_digits(radix: u32, k: usize, mut rank: u128) -> Vec<u32> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = (rank % u128::from(radix)) as u32;
        rank /= u128::from(radix);
    }
    out
}

/// Pair construction for one target at normalized radius `rho`.
pub struct Lemma3Construction {
    instance: Lemma3Instance,
    q: u32,
    n: usize,
    v1: Vec<u8>,
    v2n: Vec<u8>,
    factors: Vec<Factor>,
    sizes: Vec<u128>,
    total: u128,
}

impl Lemma3Construction {
    pub fn new(v: &MatrixWord, rho: f64) -> Result<Self> {
        check_target(v)?;
        let (n, q) = (v.n(), v.q());
        let qq = BigRational::from_integer(BigInt::from(q));
        let top = BigRational::one() - BigRational::one() / (&qq * &qq);
        let rho_exact = decimal_rational(rho);
        if !(rho_exact > BigRational::zero() && rho_exact < top) {
            return Err(Error::UnsupportedInstance(format!(
                "rho = {rho} outside (0, 1 - 1/q^2)"
            )));
        }
        let nn = BigRational::from_integer(BigInt::from(n));
        let mu = &qq * &rho_exact / (&qq + BigRational::one());
        let mu_n_floor = floor_usize(&(&mu * &nn))?;
        let r = floor_usize(&(&rho_exact * &nn))?;
        let ratio = (&rho_exact - &mu) / (BigRational::one() - &mu);

        let (v1, v2) = (&v.rows()[0], &v.rows()[1]);
        let shifted = v2.sub(v1)?;
        let d = shifted.weight();
        let mut normalization: Vec<usize> = (0..n).filter(|&i| shifted.digits()[i] != 0).collect();
        normalization.extend((0..n).filter(|&i| shifted.digits()[i] == 0));
        let v2n: Vec<u8> = normalization.iter().map(|&i| shifted.digits()[i]).collect();

        let l_nc = d * mu_n_floor / n;
        let l_zc = mu_n_floor - l_nc;
        let l_nu = d - l_nc;
        let l_zu = (n - d).checked_sub(l_zc).ok_or_else(|| {
            Error::UnsupportedInstance(format!("changed zero zone {l_zc} exceeds {}", n - d))
        })?;
        let q_us = q as usize;
        let fraction =
            |len: usize| floor_usize(&(&ratio * BigRational::from_integer(BigInt::from(len))));
        let disagree = |count: usize| (q_us - 2) * count / (q_us - 1);
        let k2 = disagree(l_nc);
        let a = fraction(l_nu)?;
        let b = (q_us - 1) * l_nc / q_us;
        let c = (q_us - 1) * l_zc / q_us;
        let e = fraction(l_zu)?;
        let (a2, b2) = (disagree(a), disagree(b));
        if a > l_nu || e > l_zu {
            return Err(Error::UnsupportedInstance(
                "placement count exceeds its zone".into(),
            ));
        }

        let factors = vec![
            Factor::Subset { m: d, k: l_nc },
            Factor::Subset { m: l_nc, k: k2 },
            Factor::Digits {
                radix: q - 2,
                k: k2,
            },
            Factor::Subset { m: n - d, k: l_zc },
            Factor::Digits {
                radix: q - 1,
                k: l_zc,
            },
            Factor::Subset { m: l_nu, k: a },
            Factor::Subset { m: a, k: a2 },
            Factor::Digits {
                radix: q - 2,
                k: a2,
            },
            Factor::Subset { m: l_nc, k: b },
            Factor::Subset { m: b, k: b2 },
            Factor::Digits {
                radix: q - 2,
                k: b2,
            },
            Factor::Subset { m: l_zc, k: c },
            Factor::Digits { radix: q - 1, k: c },
            Factor::Subset { m: l_zu, k: e },
            Factor::Digits { radix: q - 1, k: e },
        ];
        let constructions = factors.iter().fold(BigUint::one(), |acc, f| match *f {
            Factor::Subset { m, k } => acc * binomial(m as u64, k as u64),
            Factor::Digits { radix, k } => acc * BigUint::from(radix).pow(k as u32),
        });
        let sizes: Vec<u128> = factors
            .iter()
            .map(Factor::size)
            .collect::<Option<_>>()
            .ok_or_else(|| {
                Error::UnsupportedInstance("construction count overflows u128".into())
            })?;
        let total = constructions.to_u128().ok_or_else(|| {
            Error::UnsupportedInstance("construction count overflows u128".into())
        })?;

        let to_f64 = |x: &BigRational| {
            x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
        };
        let instance = Lemma3Instance {
            v1: v1.clone(),
            v2: v2.clone(),
            d,
            delta: d as f64 / n as f64,
            rho,
            mu: to_f64(&mu),
            mu_n_floor,
            r,
            l_nu,
            l_nc,
            l_zc,
            l_zu,
            u2_nonzero_changes: k2,
            u1_nonzero: [a, b, c, e],
            u1_disagree: [a2, b2],
            normalization,
            constructions,
        };
        Ok(Lemma3Construction {
            instance,
            q,
            n,
            v1: v1.digits().to_vec(),
            v2n,
            factors,
            sizes,
            total,
        })
    }

    pub fn instance(&self) -> &Lemma3Instance {
        &self.instance
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    /// The `rank`-th construction, or `None` when it yields `u1 == u2`.
    pub fn build(&self, rank: u128) -> Option<Lemma3Pair> {
        assert!(rank < self.total, "construction rank out of range");
        let mut parts = vec![0u128; self.sizes.len()];
        let mut rest = rank;
        for (slot, &size) in parts.iter_mut().zip(&self.sizes).rev() {
            *slot = rest % size;
            rest /= size;
        }
        let subset = |i: usize| match self.factors[i] {
            Factor::Subset { m, k } => unrank_subset(m, k, parts[i]),
            Factor::Digits { .. } => unreachable!(),
        };
        let digits = |i: usize| match self.factors[i] {
            Factor::Digits { radix, k } => unrank_digits(radix, k, parts[i]),
            Factor::Subset { .. } => unreachable!(),
        };
        let d = self.instance.d;
        let q = self.q;
        let other_nonzero = |avoid: u8, digit: u32| -> u8 {
            (1..q as u8)
                .filter(|&x| x != avoid)
                .nth(digit as usize)
                .expect("digit below q - 2")
        };

        let nc = subset(0);
        let nu: Vec<usize> = (0..d).filter(|i| !nc.contains(i)).collect();
        let zc: Vec<usize> = subset(3).iter().map(|&i| d + i).collect();
        let zu: Vec<usize> = (d..self.n).filter(|i| !zc.contains(i)).collect();

        let mut u2 = self.v2n.clone();
        for &pos in &nc {
            u2[pos] = 0;
        }
        for (&k, &digit) in subset(1).iter().zip(&digits(2)) {
            let pos = nc[k];
            u2[pos] = other_nonzero(self.v2n[pos], digit);
        }
        for (&pos, &digit) in zc.iter().zip(&digits(4)) {
            u2[pos] = (digit + 1) as u8;
        }

        let mut u1 = vec![0u8; self.n];
        let mut place_mixed =
            |zone: &[usize], nonzero: Vec<usize>, disagree: Vec<usize>, values: Vec<u32>| {
                for &k in &nonzero {
                    u1[zone[k]] = self.v2n[zone[k]];
                }
                for (&j, &digit) in disagree.iter().zip(&values) {
                    let pos = zone[nonzero[j]];
                    u1[pos] = other_nonzero(self.v2n[pos], digit);
                }
            };
        place_mixed(&nu, subset(5), subset(6), digits(7));
        place_mixed(&nc, subset(8), subset(9), digits(10));
        for (zone, (si, di)) in [(&zc, (11, 12)), (&zu, (13, 14))] {
            for (&k, &digit) in subset(si).iter().zip(&digits(di)) {
                u1[zone[k]] = (digit + 1) as u8;
            }
        }

        if u1 == u2 {
            return None;
        }
        let perm = &self.instance.normalization;
        let restore = |normalized: &[u8]| -> Word {
            let mut out = vec![0u8; self.n];
            for (j, &x) in normalized.iter().enumerate() {
                let i = perm[j];
                out[i] = ((u32::from(x) + u32::from(self.v1[i])) % q) as u8;
            }
            Word::new(out, q).expect("digits reduced mod q")
        };
        let zone = |z: &[usize]| {
            let mut out: Vec<usize> = z.iter().map(|&j| perm[j]).collect();
            out.sort_unstable();
            out
        };
        let (u1, u2) = (restore(&u1), restore(&u2));
        let v = [&self.instance.v1, &self.instance.v2];
        let w = [&u1, &u2]
            .iter()
            .flat_map(|u| {
                v.iter()
                    .map(move |row| hamming_distance(u, row).expect("same shape"))
            })
            .min()
            .expect("four distances");
        Some(Lemma3Pair {
            u1,
            u2,
            w,
            zones: [zone(&nu), zone(&nc), zone(&zc), zone(&zu)],
        })
    }

    /// Emits every construction, or an evenly strided sample of `cap` of
    /// them when there are more.
    pub fn collect(&self, cap: Option<usize>) -> Lemma3Family {
        let truncated = cap.is_some_and(|c| (c as u128) < self.total);
        let count = if truncated {
            cap.expect("checked") as u128
        } else {
            self.total
        };
        let mut pairs = Vec::new();
        let mut degenerate = 0;
        let mut seen = BTreeSet::new();
        for i in 0..count {
            let rank = if truncated { i * self.total / count } else { i };
            match self.build(rank) {
                Some(p) => {
                    seen.insert(p.pair());
                    pairs.push(p);
                }
                None => degenerate += 1,
            }
        }
        Lemma3Family {
            instance: self.instance.clone(),
            distinct: seen.len(),
            pairs,
            degenerate,
            truncated,
        }
    }
}

/// Pairs from the four-zone construction for target `v`, with diagnostics.
pub fn lemma3_family(v: &MatrixWord, rho: f64, cap: Option<usize>) -> Result<Lemma3Family> {
    let construction = Lemma3Construction::new(v, rho)?;
    let family = construction.collect(cap);
    if family.pairs.is_empty() {
        return Err(Error::UnsupportedInstance(format!(
            "length {} is too short: every construction gives u1 = u2",
            construction.n
        )));
    }
    Ok(family)
}

/// Exact number of constructions, without materializing them.
pub fn lemma3_count(v: &MatrixWord, rho: f64) -> Result<BigUint> {
    check_target(v)?;
    Ok(Lemma3Construction::new(v, rho)?.instance.constructions)
}
