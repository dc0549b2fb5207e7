//! Football pool with a rematch: a bettor buys tickets, each a guess for all
//! `n` games, and wins if some ordered pair of tickets (the same ticket may
//! be used twice) guesses both the match and the rematch outcomes correctly
//! in all but at most `r` games, counted jointly per game.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::radius::{is_covering, Coverage};
use crate::search::{
    greedy_cover, min_code_size_with, sphere_lower_bound, SearchOptions, SearchResult,
};
use crate::words::{t_distance, Code, MatrixWord, Word};

#[derive(Debug, Clone, PartialEq)]
pub struct PoolInstance {
    pub r: usize,
    pub tickets: Code,
    pub outcomes_match: Word,
    pub outcomes_rematch: Word,
}

impl PoolInstance {
    pub fn new(
        tickets: Code,
        outcomes_match: Word,
        outcomes_rematch: Word,
        r: usize,
    ) -> Result<Self> {
        for w in [&outcomes_match, &outcomes_rematch] {
            if w.len() != tickets.n() || w.q() != tickets.q() {
                return Err(Error::ShapeMismatch(format!(
                    "outcome {w} does not match tickets of length {} over Z_{}",
                    tickets.n(),
                    tickets.q()
                )));
            }
        }
        if r > tickets.n() {
            return Err(Error::RadiusOutOfRange { r, n: tickets.n() });
        }
        Ok(PoolInstance {
            r,
            tickets,
            outcomes_match,
            outcomes_rematch,
        })
    }

    pub fn n(&self) -> usize {
        self.tickets.n()
    }

    pub fn q(&self) -> u32 {
        self.tickets.q()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolVerdict {
    pub win: bool,
    /// Tickets played on the match and on the rematch.
    pub witness: Option<(Word, Word)>,
    /// Games missed by the witness pair.
    pub misses: Option<usize>,
    pub empty_ticket_set: bool,
}

/// Best ordered ticket pair against the two outcome vectors.
pub fn pool_verify(instance: &PoolInstance) -> Result<PoolVerdict> {
    if instance.tickets.is_empty() {
        return Ok(PoolVerdict {
            win: false,
            witness: None,
            misses: None,
            empty_ticket_set: true,
        });
    }
    let outcome = MatrixWord::new(vec![
        instance.outcomes_match.clone(),
        instance.outcomes_rematch.clone(),
    ])?;
    let mut best: Option<(usize, &Word, &Word)> = None;
    'outer: for a in instance.tickets.words() {
        for b in instance.tickets.words() {
            let d = t_distance(&MatrixWord::new(vec![a.clone(), b.clone()])?, &outcome)?;
            if best.map_or(true, |(m, _, _)| d < m) {
                best = Some((d, a, b));
                if d == 0 {
                    break 'outer;
                }
            }
        }
    }
    let (d, a, b) = best.expect("nonempty ticket set");
    let win = d <= instance.r;
    Ok(PoolVerdict {
        win,
        witness: win.then(|| (a.clone(), b.clone())),
        misses: Some(d),
        empty_ticket_set: false,
    })
}

/// Outcome of [`pool_solve`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PoolSolution {
    Solved {
        tickets: Code,
        search: SearchResult,
        /// Every outcome pair was checked against the returned tickets.
        verified: bool,
    },
    /// Exact search would exceed its budget; the optimum lies in `[lower, upper]`.
    Bracket {
        lower: u64,
        upper: usize,
        upper_tickets: Code,
        estimate: f64,
        budget: f64,
    },
}

/// Minimal ticket set winning against every outcome pair.
pub fn pool_solve(n: usize, q: u32, r: usize) -> Result<PoolSolution> {
    pool_solve_with(n, q, r, &SearchOptions::default(), 1)
}

pub fn pool_solve_with(
    n: usize,
    q: u32,
    r: usize,
    opts: &SearchOptions,
    threads: usize,
) -> Result<PoolSolution> {
    match min_code_size_with(n, 2, r, q, opts) {
        Ok(search) => {
            let tickets = search.witness.clone();
            let check = crate::radius::is_covering_with(
                &tickets,
                2,
                r,
                crate::radius::ScanOptions::with_threads(threads),
            )?;
            Ok(PoolSolution::Solved {
                verified: check == Coverage::Covered,
                tickets,
                search,
            })
        }
        Err(Error::BudgetExceeded { estimate, budget }) => {
            let upper_tickets = greedy_cover(n, 2, r, q, opts.seed)?;
            let lower = sphere_lower_bound(n, 2, r, q)?.to_u64().unwrap_or(u64::MAX);
            Ok(PoolSolution::Bracket {
                lower,
                upper: upper_tickets.len(),
                upper_tickets,
                estimate,
                budget,
            })
        }
        Err(e) => Err(e),
    }
}

/// True iff the tickets win against every outcome pair.
pub fn pool_guaranteed(tickets: &Code, r: usize) -> Result<bool> {
    Ok(is_covering(tickets, 2, r)?.is_covered())
}
