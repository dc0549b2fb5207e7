//! Words over `Z_q`, t-row matrices, the Hamming and t-metrics, lexicographic
//! enumeration and exact ball sizes.
//!
//! Every external contract is digit-level. Engines that need speed go
//! through [`PackedWord`], which packs digits into a `u128` and keeps the
//! support as a `u64` bitmask (bit `n - 1 - i` for position `i`, so for
//! `q = 2` the mask of a word equals its lexicographic index).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Alphabet `Z_q`, `2 <= q <= 256`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(u32);

impl Alphabet {
    pub fn new(q: u32) -> Result<Self> {
        if !(2..=256).contains(&q) {
            return Err(Error::InvalidAlphabet(q));
        }
        Ok(Alphabet(q))
    }

    pub fn size(self) -> u32 {
        self.0
    }

    /// Bits used per digit in the packed encoding.
    pub fn digit_bits(self) -> u32 {
        32 - (self.0 - 1).leading_zeros()
    }
}

/// A length-`n` word over `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    digits: Vec<u8>,
    q: u32,
}

impl Word {
    pub fn new(digits: Vec<u8>, q: u32) -> Result<Self> {
        Alphabet::new(q)?;
        if digits.is_empty() {
            return Err(Error::EmptyWord);
        }
        if let Some(&d) = digits.iter().find(|&&d| u32::from(d) >= q) {
            return Err(Error::DigitOutOfRange {
                digit: u32::from(d),
                q,
            });
        }
        Ok(Word { digits, q })
    }

    pub fn zero(n: usize, q: u32) -> Result<Self> {
        Word::new(vec![0; n], q)
    }

    /// Word with lexicographic rank `index` among all `q^n` words.
    pub fn from_index(index: u64, n: usize, q: u32) -> Result<Self> {
        Alphabet::new(q)?;
        let mut digits = vec![0u8; n];
        let mut rest = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % u64::from(q)) as u8;
            rest /= u64::from(q);
        }
        if rest != 0 {
            return Err(Error::Domain(format!("index {index} exceeds {q}^{n}")));
        }
        Word::new(digits, q)
    }

    /// Lexicographic rank of the word. Panics if `q^n` does not fit in `u64`.
    pub fn index(&self) -> u64 {
        self.digits.iter().fold(0u64, |acc, &d| {
            acc.checked_mul(u64::from(self.q))
                .and_then(|v| v.checked_add(u64::from(d)))
                .expect("word index overflows u64")
        })
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn weight(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.digits[i] != 0).collect()
    }

    fn check_same_shape(&self, other: &Word) -> Result<()> {
        if self.len() != other.len() || self.q != other.q {
            return Err(Error::ShapeMismatch(format!(
                "(n={}, q={}) vs (n={}, q={})",
                self.len(),
                self.q,
                other.len(),
                other.q
            )));
        }
        Ok(())
    }

    /// Digit-wise sum mod q.
    pub fn add(&self, other: &Word) -> Result<Word> {
        self.check_same_shape(other)?;
        let q = self.q;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| ((u32::from(a) + u32::from(b)) % q) as u8)
            .collect();
        Ok(Word { digits, q })
    }

    /// Digit-wise difference `self - other` mod q.
    pub fn sub(&self, other: &Word) -> Result<Word> {
        self.check_same_shape(other)?;
        let q = self.q;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| ((u32::from(a) + q - u32::from(b)) % q) as u8)
            .collect();
        Ok(Word { digits, q })
    }

    /// Applies a coordinate permutation: position `i` of the result holds
    /// position `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Word> {
        if perm.len() != self.len() {
            return Err(Error::ShapeMismatch("permutation length".into()));
        }
        let digits = perm.iter().map(|&p| self.digits[p]).collect();
        Ok(Word { digits, q: self.q })
    }

    pub fn packed(&self) -> PackedWord {
        PackedWord::from_word(self)
    }
}

fn digit_char(d: u8) -> char {
    std::char::from_digit(u32::from(d), 36).expect("digit below 36")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q <= 36 {
            for &d in &self.digits {
                write!(f, "{}", digit_char(d))?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl serde::Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.words.iter().map(|w| w.to_string()))
    }
}

impl serde::Serialize for MatrixWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.rows.iter().map(|r| r.to_string()))
    }
}

/// Parses an unseparated digit string (`0-9`, then `a-z`) into a word over `Z_q`.
pub fn parse_word(s: &str, q: u32) -> Result<Word> {
    Alphabet::new(q)?;
    let mut digits = Vec::with_capacity(s.len());
    for c in s.chars() {
        let d = c.to_digit(36).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("invalid digit character {c:?}"),
        })?;
        if d >= q {
            return Err(Error::DigitOutOfRange { digit: d, q });
        }
        digits.push(d as u8);
    }
    Word::new(digits, q)
}

/// Hamming distance between two words of the same shape.
pub fn hamming_distance(u: &Word, v: &Word) -> Result<usize> {
    u.check_same_shape(v)?;
    Ok(u.digits
        .iter()
        .zip(&v.digits)
        .filter(|(a, b)| a != b)
        .count())
}

/// A `t x n` matrix over `Z_q`, stored as its rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixWord {
    rows: Vec<Word>,
}

impl MatrixWord {
    pub fn new(rows: Vec<Word>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::ShapeMismatch("matrix needs at least one row".into()))?;
        for row in &rows[1..] {
            first.check_same_shape(row)?;
        }
        Ok(MatrixWord { rows })
    }

    pub fn zero(t: usize, n: usize, q: u32) -> Result<Self> {
        MatrixWord::new(vec![Word::zero(n, q)?; t])
    }

    /// Matrix with rows given by lexicographic word indices.
    pub fn from_row_indices(indices: &[u64], n: usize, q: u32) -> Result<Self> {
        let rows = indices
            .iter()
            .map(|&i| Word::from_index(i, n, q))
            .collect::<Result<Vec<_>>>()?;
        MatrixWord::new(rows)
    }

    pub fn rows(&self) -> &[Word] {
        &self.rows
    }

    pub fn t(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn q(&self) -> u32 {
        self.rows[0].q()
    }

    fn check_same_shape(&self, other: &MatrixWord) -> Result<()> {
        if self.t() != other.t() {
            return Err(Error::ShapeMismatch(format!(
                "t={} vs t={}",
                self.t(),
                other.t()
            )));
        }
        self.rows[0].check_same_shape(&other.rows[0])
    }

    pub fn sub(&self, other: &MatrixWord) -> Result<MatrixWord> {
        self.check_same_shape(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixWord { rows })
    }

    /// Adds the word `shift` to every row.
    pub fn translate(&self, shift: &Word) -> Result<MatrixWord> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.add(shift))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixWord { rows })
    }

    pub fn permute_columns(&self, perm: &[usize]) -> Result<MatrixWord> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.permute(perm))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixWord { rows })
    }
}

impl fmt::Display for MatrixWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

/// Number of columns holding at least one nonzero entry.
pub fn t_weight(m: &MatrixWord) -> usize {
    (0..m.n())
        .filter(|&i| m.rows.iter().any(|r| r.digits[i] != 0))
        .count()
}

/// t-distance: t-weight of the column-wise difference.
pub fn t_distance(a: &MatrixWord, b: &MatrixWord) -> Result<usize> {
    Ok(t_weight(&b.sub(a)?))
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Size of a t-ball of radius `r` in `Z_q^{t x n}`: `sum_{i<=r} C(n,i) (q^t - 1)^i`.
pub fn ball_size(t: u32, r: usize, n: usize, q: u32) -> Result<BigUint> {
    if r > n {
        return Err(Error::RadiusOutOfRange { r, n });
    }
    if q < 2 {
        return Err(Error::InvalidAlphabet(q));
    }
    let base = BigUint::from(q).pow(t) - 1u32;
    let mut total = BigUint::zero();
    let mut power = BigUint::one();
    for i in 0..=r {
        total += binomial(n as u64, i as u64) * &power;
        power *= &base;
    }
    Ok(total)
}

/// `q^n` as `u64`, if it fits.
pub fn space_size(n: usize, q: u32) -> Option<u64> {
    u64::from(q).checked_pow(u32::try_from(n).ok()?)
}

/// Radius `floor(rho n)` for a normalized radius. Products within `1e-9`
/// of an integer snap to it, so `0.3 * 10` gives 3 rather than 2.
pub fn radius_from_rho(rho: f64, n: usize) -> usize {
    let x = rho * n as f64;
    let nearest = x.round();
    let r = if (x - nearest).abs() < 1e-9 {
        nearest
    } else {
        x.floor()
    };
    r.max(0.0) as usize
}

/// Restartable lexicographic stream over all words of `Z_q^n`.
#[derive(Debug, Clone)]
pub struct WordStream {
    n: usize,
    q: u32,
    next: u64,
    end: u64,
}

impl WordStream {
    /// Restarts the stream at the word of rank `index`.
    pub fn starting_at(mut self, index: u64) -> Self {
        self.next = index.min(self.end);
        self
    }

    pub fn total(&self) -> u64 {
        self.end
    }
}

impl Iterator for WordStream {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.next >= self.end {
            return None;
        }
        let w = Word::from_index(self.next, self.n, self.q).expect("index in range");
        self.next += 1;
        Some(w)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = (self.end - self.next) as usize;
        (rest, Some(rest))
    }
}

/// All `q^n` words in lexicographic order. Panics if `q^n` overflows `u64`.
pub fn enumerate_words(n: usize, q: u32) -> WordStream {
    let end = space_size(n, q).expect("q^n overflows u64");
    WordStream { n, q, next: 0, end }
}

/// Restartable lexicographic stream over `Z_q^{t x n}` (row-major flattening).
#[derive(Debug, Clone)]
pub struct MatrixStream {
    t: usize,
    n: usize,
    q: u32,
    row_space: u64,
    next: u64,
    end: u64,
}

impl MatrixStream {
    pub fn starting_at(mut self, index: u64) -> Self {
        self.next = index.min(self.end);
        self
    }

    pub fn total(&self) -> u64 {
        self.end
    }

    /// Row indices of the matrix with flattened rank `index`.
    pub fn row_indices(&self, index: u64) -> Vec<u64> {
        let mut rows = vec![0u64; self.t];
        let mut rest = index;
        for slot in rows.iter_mut().rev() {
            *slot = rest % self.row_space;
            rest /= self.row_space;
        }
        rows
    }
}

impl Iterator for MatrixStream {
    type Item = MatrixWord;

    fn next(&mut self) -> Option<MatrixWord> {
        if self.next >= self.end {
            return None;
        }
        let rows = self.row_indices(self.next);
        self.next += 1;
        Some(MatrixWord::from_row_indices(&rows, self.n, self.q).expect("index in range"))
    }
}

/// All `q^{tn}` matrices in lexicographic order of their flattened digits.
pub fn enumerate_matrices(t: usize, n: usize, q: u32) -> MatrixStream {
    let row_space = space_size(n, q).expect("q^n overflows u64");
    let end = row_space
        .checked_pow(t as u32)
        .expect("q^(tn) overflows u64");
    MatrixStream {
        t,
        n,
        q,
        row_space,
        next: 0,
        end,
    }
}

/// Packed digits (`digit_bits` per digit, position 0 most significant) plus
/// a support bitmask. Requires `n <= 64` and `n * digit_bits <= 128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PackedWord {
    pub digits: u128,
    pub support: u64,
}

impl PackedWord {
    pub fn from_word(w: &Word) -> Self {
        let bits = Alphabet(w.q).digit_bits();
        let n = w.len();
        assert!(n <= 64 && n as u32 * bits <= 128, "word too long to pack");
        let mut digits = 0u128;
        let mut support = 0u64;
        for (i, &d) in w.digits.iter().enumerate() {
            digits = (digits << bits) | u128::from(d);
            if d != 0 {
                support |= 1u64 << (n - 1 - i);
            }
        }
        PackedWord { digits, support }
    }
}

/// Packing layout shared by every word of one space.
#[derive(Debug, Clone)]
pub struct PackedLayout {
    n: usize,
    bits: u32,
    low: u128,
}

impl PackedLayout {
    pub fn new(n: usize, q: u32) -> Result<Self> {
        let bits = Alphabet::new(q)?.digit_bits();
        if n > 64 || n as u32 * bits > 128 {
            return Err(Error::Domain(format!("n={n} too long for packed engines")));
        }
        let mut low = 0u128;
        for i in 0..n {
            low |= 1u128 << (i as u32 * bits);
        }
        Ok(PackedLayout { n, bits, low })
    }

    /// Support mask of `a - b`: positions where the digits differ.
    pub fn diff_support(&self, a: &PackedWord, b: &PackedWord) -> u64 {
        if self.bits == 1 {
            return (a.digits ^ b.digits) as u64;
        }
        let x = a.digits ^ b.digits;
        let mut folded = x;
        for k in 1..self.bits {
            folded |= x >> k;
        }
        folded &= self.low;
        let mut mask = 0u64;
        for i in 0..self.n {
            if (folded >> (i as u32 * self.bits)) & 1 == 1 {
                mask |= 1u64 << i;
            }
        }
        mask
    }
}

/// A set of distinct words sharing `n` and `q`, kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Code {
    n: usize,
    q: u32,
    words: Vec<Word>,
}

impl Code {
    /// Builds a code; rejects shape mismatches and duplicates.
    pub fn new(n: usize, q: u32, mut words: Vec<Word>) -> Result<Self> {
        Alphabet::new(q)?;
        if n == 0 {
            return Err(Error::EmptyWord);
        }
        for w in &words {
            if w.len() != n || w.q() != q {
                return Err(Error::ShapeMismatch(format!(
                    "word {w} does not match n={n}, q={q}"
                )));
            }
        }
        words.sort();
        if let Some(pair) = words.windows(2).find(|p| p[0] == p[1]) {
            return Err(Error::DuplicateWord(pair[0].to_string()));
        }
        Ok(Code { n, q, words })
    }

    /// Code from lexicographic indices; duplicates are rejected.
    pub fn from_indices(n: usize, q: u32, indices: &[u64]) -> Result<Self> {
        let words = indices
            .iter()
            .map(|&i| Word::from_index(i, n, q))
            .collect::<Result<Vec<_>>>()?;
        Code::new(n, q, words)
    }

    /// The whole space `Z_q^n`.
    pub fn full_space(n: usize, q: u32) -> Result<Self> {
        Alphabet::new(q)?;
        Code::new(n, q, enumerate_words(n, q).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    pub fn indices(&self) -> Vec<u64> {
        self.words.iter().map(Word::index).collect()
    }

    /// `C + shift`.
    pub fn translate(&self, shift: &Word) -> Result<Code> {
        let words = self
            .words
            .iter()
            .map(|w| w.add(shift))
            .collect::<Result<Vec<_>>>()?;
        Code::new(self.n, self.q, words)
    }

    /// Serializes to the text code-file format.
    pub fn to_code_file(&self) -> String {
        let mut out = format!("q={} n={}\n", self.q, self.n);
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text code-file format: a `q=<q> n=<n>` header, then one
    /// codeword per line as `n` unseparated digits.
    pub fn parse_code_file(text: &str) -> Result<Code> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let (q, n) = parse_header(header)?;
        if q > 36 {
            return Err(Error::Parse {
                line: 1,
                message: "code files support q <= 36".into(),
            });
        }
        let mut words = Vec::new();
        for (i, raw) in lines {
            let line = raw.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if line.chars().count() != n {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {n} digits, found {}", line.chars().count()),
                });
            }
            let w = parse_word(line, q).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            words.push(w);
        }
        Code::new(n, q, words)
    }
}

impl FromStr for Code {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Code::parse_code_file(s)
    }
}

fn parse_header(header: &str) -> Result<(u32, usize)> {
    let bad = |message: String| Error::Parse { line: 1, message };
    let mut q = None;
    let mut n = None;
    for field in header.split_whitespace() {
        match field.split_once('=') {
            Some(("q", v)) => q = Some(v.parse::<u32>().map_err(|e| bad(e.to_string()))?),
            Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            _ => return Err(bad(format!("unexpected header field {field:?}"))),
        }
    }
    match (q, n) {
        (Some(q), Some(n)) if n > 0 => {
            Alphabet::new(q).map_err(|e| bad(e.to_string()))?;
            Ok((q, n))
        }
        _ => Err(bad("header must be `q=<q> n=<n>`".into())),
    }
}
