//! Minimal covering codes by exhaustive search, greedy upper-bound codes,
//! the Bernoulli random-code model and covering-fraction estimates.
//!
//! All searches work on word indices. A [`CoverTable`] holds the support
//! mask of `u - c` for every pair of words, so a target is covered when some
//! choice of t rows from the code ORs to at most `r` set bits.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{h, phi};
use crate::error::{Error, Result};
use crate::radius::map_chunks;
use crate::words::{
    ball_size, binomial, radius_from_rho, space_size, Alphabet, Code, PackedLayout, Word,
};

/// Default enumeration budget in leaves (candidate codes).
pub const DEFAULT_BUDGET: f64 = 2e8;

const MAX_TABLE_WORDS: u64 = 1024;
const MAX_TARGETS: u64 = 1 << 24;

/// Pairwise support masks over all of `Z_q^n`.
pub(crate) struct CoverTable {
    n: usize,
    q: u32,
    t: usize,
    words: u64,
    masks: Vec<u64>,
}

impl CoverTable {
    pub(crate) fn new(n: usize, q: u32, t: usize) -> Result<Self> {
        Alphabet::new(q)?;
        if n == 0 {
            return Err(Error::EmptyWord);
        }
        if t == 0 {
            return Err(Error::Domain("t must be at least 1".into()));
        }
        let words = space_size(n, q)
            .filter(|&w| w <= MAX_TABLE_WORDS)
            .ok_or_else(|| {
                Error::UnsupportedInstance(format!(
                    "{q}^{n} words exceed the table limit {MAX_TABLE_WORDS}"
                ))
            })?;
        let layout = PackedLayout::new(n, q)?;
        let packed: Vec<_> = (0..words)
            .map(|i| Word::from_index(i, n, q).expect("index in range").packed())
            .collect();
        let mut masks = Vec::with_capacity((words * words) as usize);
        for u in &packed {
            for c in &packed {
                masks.push(layout.diff_support(u, c));
            }
        }
        Ok(CoverTable {
            n,
            q,
            t,
            words,
            masks,
        })
    }

    pub(crate) fn words(&self) -> u64 {
        self.words
    }

    fn targets(&self) -> Result<u64> {
        self.words
            .checked_pow(self.t as u32)
            .filter(|&total| total <= MAX_TARGETS)
            .ok_or_else(|| {
                Error::UnsupportedInstance("target space too large for exhaustive search".into())
            })
    }

    fn mask(&self, u: u64, c: u64) -> u64 {
        self.masks[(u * self.words + c) as usize]
    }

    fn rows_of(&self, index: u64, rows: &mut [u64]) {
        let mut rest = index;
        for slot in rows.iter_mut().rev() {
            *slot = rest % self.words;
            rest /= self.words;
        }
    }

    /// Some row assignment from `code` lies within `r` of the target.
    pub(crate) fn covers(&self, rows: &[u64], code: &[u64], r: u32) -> bool {
        self.covers_from(rows, code, r, 0, 0)
    }

    fn covers_from(&self, rows: &[u64], code: &[u64], r: u32, depth: usize, acc: u64) -> bool {
        code.iter().any(|&c| {
            let m = acc | self.mask(rows[depth], c);
            m.count_ones() <= r
                && (depth + 1 == rows.len() || self.covers_from(rows, code, r, depth + 1, m))
        })
    }

    /// First uncovered target index, trying `hints` before the full scan.
    pub(crate) fn first_uncovered(&self, code: &[u64], r: u32, hints: &[u64]) -> Option<u64> {
        let mut rows = vec![0; self.t];
        for &index in hints {
            self.rows_of(index, &mut rows);
            if !self.covers(&rows, code, r) {
                return Some(index);
            }
        }
        let total = self.words.pow(self.t as u32);
        (0..total).find(|&index| {
            self.rows_of(index, &mut rows);
            !self.covers(&rows, code, r)
        })
    }

    #[cfg(test)]
    fn is_covering(&self, code: &[u64], r: u32) -> bool {
        !code.is_empty() && self.first_uncovered(code, r, &[]).is_none()
    }
}

/// Smallest `M` with `M^t * V^{(t)}_{r,n,q} >= q^{tn}`.
pub fn sphere_lower_bound(n: usize, t: u32, r: usize, q: u32) -> Result<BigUint> {
    if t == 0 {
        return Err(Error::Domain("t must be at least 1".into()));
    }
    let volume = ball_size(t, r, n, q)?;
    let space = BigUint::from(q).pow(t * n as u32);
    let need = (&space + &volume - 1u32) / &volume;
    let mut m = need.nth_root(t);
    if m.pow(t) < need {
        m += 1u32;
    }
    Ok(m)
}

/// Exact minimum code size for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    pub q: u32,
    pub t: usize,
    pub r: usize,
    pub m_min: usize,
    pub witness: Code,
    pub k: f64,
    pub nodes: u64,
    /// Lower bound from ball counting, and size of the greedy code.
    pub sphere_bound: u64,
    pub greedy_size: usize,
    /// Exhaustive small-length data; not a reproduction of published tables.
    pub note: &'static str,
}

pub const EXACT_DATA_NOTE: &str = "computed by exhaustive search";

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Maximum number of candidate codes the search may visit.
    pub budget: f64,
    /// Word forced into every candidate code; zero word when `None`.
    pub anchor: Option<Word>,
    /// Seed for the greedy upper bound.
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            anchor: None,
            seed: 0,
        }
    }
}

/// Minimum size of a code with `R_t <= r`, with a witness.
pub fn min_code_size(n: usize, t: usize, r: usize, q: u32) -> Result<SearchResult> {
    min_code_size_with(n, t, r, q, &SearchOptions::default())
}

pub fn min_code_size_with(
    n: usize,
    t: usize,
    r: usize,
    q: u32,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if r > n {
        return Err(Error::RadiusOutOfRange { r, n });
    }
    let table = CoverTable::new(n, q, t)?;
    table.targets()?;
    let anchor = match &opts.anchor {
        Some(w) if w.len() != n || w.q() != q => {
            return Err(Error::ShapeMismatch(format!(
                "anchor {w} is not a word of Z_{q}^{n}"
            )))
        }
        Some(w) => w.index(),
        None => 0,
    };
    let sphere = sphere_lower_bound(n, t as u32, r, q)?
        .to_u64()
        .expect("bound at most q^n");
    let greedy = greedy_cover(n, t, r, q, opts.seed)?;

    let others = table.words() - 1;
    let leaves = |m: u64| binomial(others, m - 1).to_f64().unwrap_or(f64::INFINITY);
    let estimate: f64 = (sphere.max(1)..greedy.len() as u64).map(leaves).sum();
    if estimate > opts.budget {
        return Err(Error::BudgetExceeded {
            estimate,
            budget: opts.budget,
        });
    }
    let last = if estimate + leaves(greedy.len() as u64) <= opts.budget {
        greedy.len() as u64
    } else {
        greedy.len() as u64 - 1
    };

    let greedy_size = greedy.len();
    let finish = |code: Code, nodes: u64| SearchResult {
        n,
        q,
        t,
        r,
        m_min: code.len(),
        k: (code.len() as f64).ln() / f64::from(q).ln(),
        witness: code,
        nodes,
        sphere_bound: sphere,
        greedy_size,
        note: EXACT_DATA_NOTE,
    };

    let pool: Vec<u64> = (0..table.words()).filter(|&i| i != anchor).collect();
    let mut search = Exhaustive::new(&table, r as u32, pool, anchor);
    for m in sphere.max(1)..=last {
        if let Some(found) = search.find(m as usize) {
            let code = Code::from_indices(n, q, &found)?;
            return Ok(finish(code, search.nodes));
        }
    }
    let nodes = search.nodes;
    let anchor = Word::from_index(anchor, n, q)?;
    let shift = anchor.sub(&greedy.words()[0])?;
    Ok(finish(greedy.translate(&shift)?, nodes))
}

/// Depth-first search over codes `{anchor} + increasing subsets of pool`.
struct Exhaustive<'a> {
    table: &'a CoverTable,
    r: u32,
    pool: Vec<u64>,
    /// `reach[u]`: largest pool position within first-order distance `r` of u.
    reach: Vec<Option<usize>>,
    ball: u64,
    anchor: u64,
    hints: Vec<u64>,
    nodes: u64,
}

impl<'a> Exhaustive<'a> {
    fn new(table: &'a CoverTable, r: u32, pool: Vec<u64>, anchor: u64) -> Self {
        let reach = (0..table.words())
            .map(|u| {
                pool.iter()
                    .rposition(|&c| table.mask(u, c).count_ones() <= r)
            })
            .collect();
        let ball = ball_size(1, r as usize, table.n, table.q)
            .ok()
            .and_then(|b| b.to_u64())
            .unwrap_or(u64::MAX);
        Exhaustive {
            table,
            r,
            pool,
            reach,
            ball,
            anchor,
            hints: Vec::new(),
            nodes: 0,
        }
    }

    fn find(&mut self, m: usize) -> Option<Vec<u64>> {
        let mut code = Vec::with_capacity(m);
        code.push(self.anchor);
        if self.extend(&mut code, 0, m) {
            Some(code)
        } else {
            None
        }
    }

    fn extend(&mut self, code: &mut Vec<u64>, from: usize, m: usize) -> bool {
        self.nodes += 1;
        if code.len() == m {
            return match self.table.first_uncovered(code, self.r, &self.hints) {
                None => true,
                Some(index) => {
                    if !self.hints.contains(&index) {
                        if self.hints.len() == 8 {
                            self.hints.remove(0);
                        }
                        self.hints.push(index);
                    }
                    false
                }
            };
        }
        if !self.first_order_feasible(code, from, m - code.len()) {
            return false;
        }
        let slots = m - code.len();
        for pos in from..self.pool.len() {
            if self.pool.len() - pos < slots {
                break;
            }
            code.push(self.pool[pos]);
            let found = self.extend(code, pos + 1, m);
            if found {
                return true;
            }
            code.pop();
        }
        false
    }

    /// Every word needs a codeword within `r` (diagonal targets); checks that
    /// the remaining slots and pool positions can still provide one.
    fn first_order_feasible(&self, code: &[u64], from: usize, slots: usize) -> bool {
        let mut uncovered = 0u64;
        for u in 0..self.table.words() {
            if code
                .iter()
                .any(|&c| self.table.mask(u, c).count_ones() <= self.r)
            {
                continue;
            }
            match self.reach[u as usize] {
                Some(last) if last >= from => uncovered += 1,
                _ => return false,
            }
        }
        uncovered <= self.ball.saturating_mul(slots as u64)
    }
}

/// Greedy code with `R_t <= r`: repeatedly adds the word covering the most
/// uncovered targets, candidates visited in a seed-shuffled order.
pub fn greedy_cover(n: usize, t: usize, r: usize, q: u32, seed: u64) -> Result<Code> {
    if r > n {
        return Err(Error::RadiusOutOfRange { r, n });
    }
    let table = CoverTable::new(n, q, t)?;
    let total = table.targets()?;
    let r = r as u32;
    let mut order: Vec<u64> = (0..table.words()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut code: Vec<u64> = Vec::new();
    let mut uncovered: Vec<u64> = (0..total).collect();
    let mut rows = vec![0; t];
    while !uncovered.is_empty() {
        let mut best: Option<(usize, u64)> = None;
        let mut trial = code.clone();
        trial.push(0);
        for &w in order.iter().filter(|w| !code.contains(w)) {
            *trial.last_mut().expect("nonempty") = w;
            let gain = uncovered
                .iter()
                .filter(|&&index| {
                    table.rows_of(index, &mut rows);
                    table.covers(&rows, &trial, r)
                })
                .count();
            if gain > best.map_or(0, |(g, _)| g) {
                best = Some((gain, w));
            }
        }
        let pick = match best {
            Some((_, w)) => w,
            None => {
                table.rows_of(uncovered[0], &mut rows);
                *rows
                    .iter()
                    .find(|w| !code.contains(w))
                    .expect("an uncovered target has a row outside the code")
            }
        };
        code.push(pick);
        uncovered.retain(|&index| {
            table.rows_of(index, &mut rows);
            !table.covers(&rows, &code, r)
        });
    }
    Code::from_indices(n, q, &code)
}

/// Whether a model's parameters sit inside the range where the covering
/// guarantee holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelStatus {
    Valid,
    /// `epsilon` outside `(0, phi(rho))`.
    OutsideGuarantee,
}

/// Each word of `Z_q^n` enters the code independently with probability `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomModel {
    pub n: usize,
    pub q: u32,
    pub p: f64,
    pub seed: u64,
    pub rho: Option<f64>,
    pub epsilon: Option<f64>,
    pub status: ModelStatus,
}

impl RandomModel {
    pub fn new(n: usize, q: u32, p: f64, seed: u64) -> Result<Self> {
        Alphabet::new(q)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "inclusion probability {p} outside [0, 1]"
            )));
        }
        Ok(RandomModel {
            n,
            q,
            p,
            seed,
            rho: None,
            epsilon: None,
            status: ModelStatus::Valid,
        })
    }

    /// `p = q^{-n (H_{q^2}(rho) - epsilon)}`, capped at 1.
    pub fn from_rate(n: usize, q: u32, rho: f64, epsilon: f64, seed: u64) -> Result<Self> {
        Alphabet::new(q)?;
        let q64 = u64::from(q);
        let top = 1.0 - 1.0 / (q64 * q64) as f64;
        if !(rho > 0.0 && rho < top) {
            return Err(Error::Domain(format!("rho = {rho} outside (0, {top})")));
        }
        let exponent = -(n as f64) * (h(q64 * q64, rho) - epsilon);
        let p = f64::from(q).powf(exponent).min(1.0);
        let status = if epsilon > 0.0 && epsilon < phi(rho, q64) {
            ModelStatus::Valid
        } else {
            ModelStatus::OutsideGuarantee
        };
        Ok(RandomModel {
            n,
            q,
            p,
            seed,
            rho: Some(rho),
            epsilon: Some(epsilon),
            status,
        })
    }
}

/// Draws the random code. Word `i` uses the `i`-th 64-bit output of
/// ChaCha8 seeded from `seed`, so membership depends only on `(seed, i)`.
pub fn random_code(model: &RandomModel) -> Result<Code> {
    let words = space_size(model.n, model.q).ok_or_else(|| {
        Error::UnsupportedInstance(format!("{}^{} overflows u64", model.q, model.n))
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let chosen: Vec<u64> = (0..words).filter(|_| rng.gen::<f64>() < model.p).collect();
    Code::from_indices(model.n, model.q, &chosen)
}

/// Monte Carlo estimate of the fraction of M-word codes with `R_2 <= floor(rho n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub n: usize,
    pub q: u32,
    pub rho: f64,
    pub m: usize,
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci95: f64,
}

impl AlphaEstimate {
    pub fn sigma(&self) -> f64 {
        self.ci95 / 1.96
    }
}

/// Each trial seeds ChaCha8 with `seed` on stream `trial`, then takes the
/// first M entries of a partial Fisher-Yates shuffle of all word indices.
pub fn sample_alpha(
    n: usize,
    rho: f64,
    m: usize,
    q: u32,
    trials: u64,
    seed: u64,
) -> Result<AlphaEstimate> {
    sample_alpha_with(n, rho, m, q, trials, seed, 1)
}

pub fn sample_alpha_with(
    n: usize,
    rho: f64,
    m: usize,
    q: u32,
    trials: u64,
    seed: u64,
    threads: usize,
) -> Result<AlphaEstimate> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let r = checked_radius(rho, n)?;
    let table = CoverTable::new(n, q, 2)?;
    table.targets()?;
    if m as u64 > table.words() {
        return Err(Error::Domain(format!("M = {m} exceeds {q}^{n}")));
    }
    let hits: u64 = map_chunks(trials, threads, |start, end| {
        let mut indices: Vec<u64> = (0..table.words()).collect();
        let mut hints = Vec::new();
        (start..end)
            .filter(|&trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                indices.sort_unstable();
                let (chosen, _) = indices.partial_shuffle(&mut rng, m);
                if chosen.is_empty() {
                    return false;
                }
                match table.first_uncovered(chosen, r, &hints) {
                    None => true,
                    Some(index) => {
                        if !hints.contains(&index) {
                            hints.insert(0, index);
                            hints.truncate(4);
                        }
                        false
                    }
                }
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    let estimate = hits as f64 / trials as f64;
    Ok(AlphaEstimate {
        n,
        q,
        rho,
        m,
        trials,
        hits,
        estimate,
        ci95: 1.96 * (estimate * (1.0 - estimate) / trials as f64).sqrt(),
    })
}

fn checked_radius(rho: f64, n: usize) -> Result<u32> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho = {rho} outside [0, 1]")));
    }
    Ok(radius_from_rho(rho, n) as u32)
}

/// Exact covering fraction: `covering / total` over all M-subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaExact {
    #[serde(serialize_with = "as_decimal")]
    pub covering: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub total: BigUint,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl AlphaExact {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.covering.clone().into(), self.total.clone().into())
    }
}

pub fn alpha_exact(n: usize, rho: f64, m: usize, q: u32) -> Result<AlphaExact> {
    alpha_exact_with(n, rho, m, q, DEFAULT_BUDGET)
}

pub fn alpha_exact_with(n: usize, rho: f64, m: usize, q: u32, budget: f64) -> Result<AlphaExact> {
    let r = checked_radius(rho, n)?;
    let table = CoverTable::new(n, q, 2)?;
    table.targets()?;
    let words = table.words();
    if m as u64 > words {
        return Err(Error::Domain(format!("M = {m} exceeds {q}^{n}")));
    }
    let total = binomial(words, m as u64);
    let estimate = total.to_f64().unwrap_or(f64::INFINITY);
    if estimate > budget {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    let mut covering = BigUint::zero();
    if m > 0 {
        let mut subset: Vec<u64> = (0..m as u64).collect();
        let mut hints = Vec::new();
        loop {
            match table.first_uncovered(&subset, r, &hints) {
                None => covering += 1u32,
                Some(index) if !hints.contains(&index) => {
                    hints.insert(0, index);
                    hints.truncate(4);
                }
                Some(_) => {}
            }
            if !next_combination(&mut subset, words) {
                break;
            }
        }
    }
    debug_assert!(m > 0 || total.is_one());
    Ok(AlphaExact { covering, total })
}

/// Advances an increasing index vector to the next combination of `0..n`.
fn next_combination(subset: &mut [u64], n: u64) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < n - (k - i) as u64 {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
