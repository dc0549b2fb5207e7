//! Exact t-th covering radius of a code, early-exit covering tests and
//! deep-hole extraction.
//!
//! The fast engine precomputes, for every possible target row `u` and
//! codeword `c`, the support mask of `u - c` and keeps those masks sorted by
//! weight. The t-distance from a target to a matrix of codewords is then the
//! popcount of the OR of t masks, and a depth-first search over rows prunes
//! as soon as a single mask is already as heavy as the running minimum.
//!
//! The target space `Z_q^{t x n}` is scanned in lexicographic chunks; chunk
//! results are merged by chunk order, so the output does not depend on the
//! number of worker threads.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::words::{space_size, Code, MatrixWord, PackedLayout, PackedWord, Word};

/// Parallelism knob for target-space scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub threads: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { threads: 1 }
    }
}

impl ScanOptions {
    pub fn with_threads(threads: usize) -> Self {
        ScanOptions {
            threads: threads.max(1),
        }
    }
}

/// Covering radius together with a witness attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusReport {
    pub radius: usize,
    /// Lexicographically first target at distance `radius` from `C^t`.
    pub deep_hole: MatrixWord,
    pub scanned: u64,
}

/// Outcome of [`is_covering`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coverage {
    Covered,
    /// The lexicographically first target farther than `r` from `C^t`.
    Uncovered {
        witness: MatrixWord,
        distance: usize,
    },
}

impl Coverage {
    pub fn is_covered(&self) -> bool {
        matches!(self, Coverage::Covered)
    }
}

/// Mask tables for one code and one order t.
pub(crate) struct Engine {
    t: usize,
    n: usize,
    q: u32,
    row_space: u64,
    total: u64,
    /// `table[u]` = (mask of u - c, weight) over codewords c, lightest first.
    table: Vec<Vec<(u64, u32)>>,
}

impl Engine {
    pub(crate) fn new(code: &Code, t: usize) -> Result<Self> {
        if code.is_empty() {
            return Err(Error::EmptyCode);
        }
        if t == 0 {
            return Err(Error::Domain("t must be at least 1".into()));
        }
        let (n, q) = (code.n(), code.q());
        let layout = PackedLayout::new(n, q)?;
        let row_space =
            space_size(n, q).ok_or_else(|| Error::Domain(format!("{q}^{n} overflows u64")))?;
        let total = row_space
            .checked_pow(t as u32)
            .ok_or_else(|| Error::Domain(format!("{q}^({t}*{n}) overflows u64")))?;
        let packed_code: Vec<PackedWord> = code.words().iter().map(Word::packed).collect();
        let table = (0..row_space)
            .map(|u| {
                let target = Word::from_index(u, n, q).expect("index in range").packed();
                let mut row: Vec<(u64, u32)> = packed_code
                    .iter()
                    .map(|c| {
                        let mask = layout.diff_support(&target, c);
                        (mask, mask.count_ones())
                    })
                    .collect();
                row.sort_by_key(|&(mask, weight)| (weight, mask));
                row.dedup();
                row
            })
            .collect();
        Ok(Engine {
            t,
            n,
            q,
            row_space,
            total,
            table,
        })
    }

    pub(crate) fn total(&self) -> u64 {
        self.total
    }

    fn rows_of(&self, index: u64, rows: &mut [u64]) {
        let mut rest = index;
        for slot in rows.iter_mut().rev() {
            *slot = rest % self.row_space;
            rest /= self.row_space;
        }
    }

    fn matrix_of(&self, index: u64) -> MatrixWord {
        let mut rows = vec![0; self.t];
        self.rows_of(index, &mut rows);
        MatrixWord::from_row_indices(&rows, self.n, self.q).expect("index in range")
    }

    /// Minimum t-distance from the target (given by row indices) to `C^t`,
    /// except that the search stops as soon as the minimum is known to be
    /// `<= stop`; the returned value is then some distance `<= stop`.
    fn min_distance(&self, rows: &[u64], stop: u32) -> u32 {
        let mut best = self.n as u32 + 1;
        self.descend(rows, 0, 0, &mut best, stop);
        best
    }

    fn descend(&self, rows: &[u64], depth: usize, acc: u64, best: &mut u32, stop: u32) -> bool {
        for &(mask, weight) in &self.table[rows[depth] as usize] {
            if weight >= *best {
                break;
            }
            let combined = acc | mask;
            let w = combined.count_ones();
            if w >= *best {
                continue;
            }
            if depth + 1 == rows.len() {
                *best = w;
                if w <= stop {
                    return true;
                }
            } else if self.descend(rows, depth + 1, combined, best, stop) {
                return true;
            }
        }
        false
    }

    /// Exact minimum distance of the target with flattened index `index`.
    pub(crate) fn exact_distance(&self, index: u64) -> u32 {
        let mut rows = vec![0; self.t];
        self.rows_of(index, &mut rows);
        self.min_distance(&rows, 0)
    }

    /// Radius over `[start, end)`: (max distance, first index attaining it).
    fn scan_max(&self, start: u64, end: u64) -> Option<(u32, u64)> {
        let mut rows = vec![0; self.t];
        let mut best: Option<(u32, u64)> = None;
        for index in start..end {
            self.rows_of(index, &mut rows);
            let stop = best.map_or(0, |(d, _)| d);
            let d = self.min_distance(&rows, stop);
            if best.map_or(true, |(m, _)| d > m) {
                best = Some((d, index));
            }
        }
        best
    }

    /// First index in `[start, end)` farther than `r`, giving up once `limit`
    /// drops to or below the current index.
    fn scan_uncovered(&self, start: u64, end: u64, r: u32, limit: &AtomicU64) -> Option<u64> {
        let mut rows = vec![0; self.t];
        for index in start..end {
            if index >= limit.load(Ordering::Relaxed) {
                return None;
            }
            self.rows_of(index, &mut rows);
            if self.min_distance(&rows, r) > r {
                return Some(index);
            }
        }
        None
    }

    /// Indices in `[start, end)` with distance at least `radius`.
    fn scan_at_least(&self, start: u64, end: u64, radius: u32) -> Vec<u64> {
        let mut rows = vec![0; self.t];
        let stop = radius.saturating_sub(1);
        (start..end)
            .filter(|&index| {
                self.rows_of(index, &mut rows);
                radius == 0 || self.min_distance(&rows, stop) >= radius
            })
            .collect()
    }

    pub(crate) fn is_covering(&self, r: usize, threads: usize) -> Option<u64> {
        let limit = AtomicU64::new(u64::MAX);
        let r = r as u32;
        for_each_chunk(self.total, threads, |start, end| {
            if let Some(index) = self.scan_uncovered(start, end, r, &limit) {
                limit.fetch_min(index, Ordering::Relaxed);
            }
        });
        match limit.into_inner() {
            u64::MAX => None,
            index => Some(index),
        }
    }

    pub(crate) fn radius(&self, threads: usize) -> (u32, u64) {
        let parts = map_chunks(self.total, threads, |start, end| self.scan_max(start, end));
        let mut best: Option<(u32, u64)> = None;
        for (d, index) in parts.into_iter().flatten() {
            if best.map_or(true, |(m, _)| d > m) {
                best = Some((d, index));
            }
        }
        best.expect("target space is nonempty")
    }
}

/// Splits `[0, total)` into contiguous chunks and maps them in parallel.
/// Results come back in chunk order.
pub(crate) fn map_chunks<T, F>(total: u64, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let threads = threads.max(1);
    if threads == 1 || total < 2 {
        return vec![f(0, total)];
    }
    let chunks = (threads as u64 * 8).min(total);
    let bounds: Vec<(u64, u64)> = (0..chunks)
        .map(|i| {
            let cut = |k: u64| (u128::from(total) * u128::from(k) / u128::from(chunks)) as u64;
            (cut(i), cut(i + 1))
        })
        .collect();
    let next = AtomicUsize::new(0);
    let mut results: Vec<Option<T>> = (0..chunks).map(|_| None).collect();
    let collected: Vec<Vec<(usize, T)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= bounds.len() {
                            break;
                        }
                        let (s, e) = bounds[i];
                        local.push((i, f(s, e)));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    for (i, value) in collected.into_iter().flatten() {
        results[i] = Some(value);
    }
    results
        .into_iter()
        .map(|r| r.expect("every chunk ran"))
        .collect()
}

fn for_each_chunk<F>(total: u64, threads: usize, f: F)
where
    F: Fn(u64, u64) + Sync,
{
    map_chunks(total, threads, f);
}

/// Ordinary (t = 1) covering radius.
pub fn covering_radius(code: &Code) -> Result<RadiusReport> {
    t_covering_radius(code, 1)
}

/// t-th covering radius: covering radius of `C^t` under the t-metric, rows
/// drawn from the code with repetition.
pub fn t_covering_radius(code: &Code, t: usize) -> Result<RadiusReport> {
    t_covering_radius_with(code, t, ScanOptions::default())
}

pub fn t_covering_radius_with(code: &Code, t: usize, opts: ScanOptions) -> Result<RadiusReport> {
    let engine = Engine::new(code, t)?;
    let (radius, index) = engine.radius(opts.threads);
    Ok(RadiusReport {
        radius: radius as usize,
        deep_hole: engine.matrix_of(index),
        scanned: engine.total(),
    })
}

/// True iff `R_t(code) <= r`. Stops at the first uncovered target.
pub fn is_covering(code: &Code, t: usize, r: usize) -> Result<Coverage> {
    is_covering_with(code, t, r, ScanOptions::default())
}

pub fn is_covering_with(code: &Code, t: usize, r: usize, opts: ScanOptions) -> Result<Coverage> {
    if r > code.n() {
        return Err(Error::RadiusOutOfRange { r, n: code.n() });
    }
    let engine = Engine::new(code, t)?;
    Ok(match engine.is_covering(r, opts.threads) {
        None => Coverage::Covered,
        Some(index) => Coverage::Uncovered {
            witness: engine.matrix_of(index),
            distance: engine.exact_distance(index) as usize,
        },
    })
}

/// Every target attaining `R_t(code)`, in lexicographic order.
pub fn deep_holes(code: &Code, t: usize) -> Result<Vec<MatrixWord>> {
    deep_holes_with(code, t, ScanOptions::default())
}

pub fn deep_holes_with(code: &Code, t: usize, opts: ScanOptions) -> Result<Vec<MatrixWord>> {
    let engine = Engine::new(code, t)?;
    let (radius, _) = engine.radius(opts.threads);
    let parts = map_chunks(engine.total(), opts.threads, |s, e| {
        engine.scan_at_least(s, e, radius)
    });
    Ok(parts
        .into_iter()
        .flatten()
        .map(|index| engine.matrix_of(index))
        .collect())
}

/// Distance from one target matrix to `C^t`, rows with repetition.
pub fn distance_to_power(code: &Code, target: &MatrixWord) -> Result<usize> {
    if code.is_empty() {
        return Err(Error::EmptyCode);
    }
    if target.n() != code.n() || target.q() != code.q() {
        return Err(Error::ShapeMismatch("target does not match code".into()));
    }
    let layout = PackedLayout::new(code.n(), code.q())?;
    let packed: Vec<PackedWord> = code.words().iter().map(Word::packed).collect();
    let rows: Vec<Vec<(u64, u32)>> = target
        .rows()
        .iter()
        .map(|row| {
            let p = row.packed();
            let mut v: Vec<(u64, u32)> = packed
                .iter()
                .map(|c| {
                    let m = layout.diff_support(&p, c);
                    (m, m.count_ones())
                })
                .collect();
            v.sort_by_key(|&(m, w)| (w, m));
            v
        })
        .collect();
    fn go(rows: &[Vec<(u64, u32)>], depth: usize, acc: u64, best: &mut u32) {
        for &(mask, weight) in &rows[depth] {
            if weight >= *best {
                break;
            }
            let c = acc | mask;
            let w = c.count_ones();
            if w >= *best {
                continue;
            }
            if depth + 1 == rows.len() {
                *best = w;
            } else {
                go(rows, depth + 1, c, best);
            }
        }
    }
    let mut best = code.n() as u32 + 1;
    go(&rows, 0, 0, &mut best);
    Ok(best as usize)
}

/// Naive digit-level reference: enumerate every target and every matrix of
/// `C^t` and take the t-distance directly. Exponentially slow; for checks.
pub mod reference {
    use super::RadiusReport;
    use crate::error::{Error, Result};
    use crate::words::{enumerate_matrices, t_distance, Code, MatrixWord};

    fn power_matrices(code: &Code, t: usize) -> Vec<MatrixWord> {
        let m = code.len();
        let mut out = Vec::with_capacity(m.pow(t as u32));
        let mut odometer = vec![0usize; t];
        loop {
            let rows = odometer.iter().map(|&i| code.words()[i].clone()).collect();
            out.push(MatrixWord::new(rows).expect("rows share shape"));
            let mut pos = t;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                odometer[pos] += 1;
                if odometer[pos] < m {
                    break;
                }
                odometer[pos] = 0;
            }
        }
    }

    pub fn min_distance(code: &Code, target: &MatrixWord) -> Result<usize> {
        if code.is_empty() {
            return Err(Error::EmptyCode);
        }
        let mut best = usize::MAX;
        for c in power_matrices(code, target.t()) {
            best = best.min(t_distance(&c, target)?);
        }
        Ok(best)
    }

    pub fn t_covering_radius(code: &Code, t: usize) -> Result<RadiusReport> {
        if code.is_empty() {
            return Err(Error::EmptyCode);
        }
        let powers = power_matrices(code, t);
        let mut best: Option<(usize, MatrixWord)> = None;
        let mut scanned = 0u64;
        for target in enumerate_matrices(t, code.n(), code.q()) {
            scanned += 1;
            let mut d = usize::MAX;
            for c in &powers {
                d = d.min(t_distance(c, &target)?);
            }
            if best.as_ref().map_or(true, |(m, _)| d > *m) {
                best = Some((d, target));
            }
        }
        let (radius, deep_hole) = best.expect("nonempty target space");
        Ok(RadiusReport {
            radius,
            deep_hole,
            scanned,
        })
    }
}
