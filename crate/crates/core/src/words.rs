//! Words over an arbitrary alphabet: prime factorizations, condensed forms,
//! expansions and compressions.
//!
//! A word is any finite slice. The alphabet only needs an equality
//! predicate, so the same code condenses real-valued time series (exactly
//! or with an anchored tolerance) and warping walks over grid points.
//!
//! Every `*_by` function takes the equality predicate explicitly. Runs are
//! anchored: a candidate joins the current run iff it equals the run's
//! *first* element, which keeps runs well defined for tolerance predicates
//! that are not transitive.

use crate::error::{Error, Result};

/// A maximal run `symbol^multiplicity` inside a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor<A> {
    pub symbol: A,
    pub multiplicity: usize,
}

/// The unique decomposition of a word into maximal runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactorization<A> {
    factors: Vec<Factor<A>>,
}

impl<A> PrimeFactorization<A> {
    pub fn factors(&self) -> &[Factor<A>] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &A> {
        self.factors.iter().map(|f| &f.symbol)
    }

    pub fn multiplicities(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|f| f.multiplicity)
    }
}

impl<A: Clone> PrimeFactorization<A> {
    /// Concatenates `symbol^multiplicity` over all factors.
    pub fn to_word(&self) -> Vec<A> {
        let mut out = Vec::with_capacity(self.multiplicities().sum());
        for f in &self.factors {
            out.extend(std::iter::repeat_n(f.symbol.clone(), f.multiplicity));
        }
        out
    }
}

pub fn prime_factorize<A: PartialEq + Clone>(w: &[A]) -> PrimeFactorization<A> {
    prime_factorize_by(w, |a, b| a == b)
}

pub fn prime_factorize_by<A, F>(w: &[A], eq: F) -> PrimeFactorization<A>
where
    A: Clone,
    F: Fn(&A, &A) -> bool,
{
    let mut factors: Vec<Factor<A>> = Vec::new();
    for a in w {
        match factors.last_mut() {
            Some(run) if eq(&run.symbol, a) => run.multiplicity += 1,
            _ => factors.push(Factor {
                symbol: a.clone(),
                multiplicity: 1,
            }),
        }
    }
    PrimeFactorization { factors }
}

/// The condensed form: every maximal run collapsed to its first element.
pub fn condense<A: PartialEq + Clone>(w: &[A]) -> Vec<A> {
    condense_by(w, |a, b| a == b)
}

pub fn condense_by<A, F>(w: &[A], eq: F) -> Vec<A>
where
    A: Clone,
    F: Fn(&A, &A) -> bool,
{
    let mut out: Vec<A> = Vec::with_capacity(w.len());
    let mut anchor: Option<&A> = None;
    for a in w {
        if anchor.is_some_and(|s| eq(s, a)) {
            continue;
        }
        anchor = Some(a);
        out.push(a.clone());
    }
    out
}

/// Number of elements of the condensed form, without allocating it.
pub fn condensed_len_by<A, F>(w: &[A], eq: F) -> usize
where
    F: Fn(&A, &A) -> bool,
{
    let mut count = 0;
    let mut anchor: Option<&A> = None;
    for a in w {
        if anchor.is_some_and(|s| eq(s, a)) {
            continue;
        }
        anchor = Some(a);
        count += 1;
    }
    count
}

pub fn is_irreducible<A: PartialEq>(w: &[A]) -> bool {
    w.windows(2).all(|p| p[0] != p[1])
}

/// True iff `x` is an expansion of `y`, i.e. `x = y_1^a_1 ... y_m^a_m` with
/// every `a_i >= 1`.
pub fn is_expansion<A: PartialEq + Clone>(x: &[A], y: &[A]) -> bool {
    is_expansion_by(x, y, |a, b| a == b)
}

pub fn is_expansion_by<A, F>(x: &[A], y: &[A], eq: F) -> bool
where
    A: Clone,
    F: Fn(&A, &A) -> bool,
{
    let px = prime_factorize_by(x, &eq);
    let py = prime_factorize_by(y, &eq);
    px.len() == py.len()
        && px
            .factors
            .iter()
            .zip(&py.factors)
            .all(|(p, q)| eq(&p.symbol, &q.symbol) && p.multiplicity >= q.multiplicity)
}

/// Replicates `y_i` exactly `multiplicities[i]` times.
pub fn expand<A: Clone>(y: &[A], multiplicities: &[usize]) -> Result<Vec<A>> {
    if y.len() != multiplicities.len() {
        return Err(Error::invalid(format!(
            "expand: {} multiplicities for a word of length {}",
            multiplicities.len(),
            y.len()
        )));
    }
    if multiplicities.contains(&0) {
        return Err(Error::invalid("expand: multiplicities must be >= 1"));
    }
    let mut out = Vec::with_capacity(multiplicities.iter().sum());
    for (a, &k) in y.iter().zip(multiplicities) {
        out.extend(std::iter::repeat_n(a.clone(), k));
    }
    Ok(out)
}

/// Iterator over all expansions of a word up to a maximum length.
///
/// Multiplicity vectors are visited in lexicographic order, starting from
/// all ones (the word itself).
#[derive(Debug, Clone)]
pub struct Expansions<'a, A> {
    word: &'a [A],
    max_len: usize,
    alpha: Vec<usize>,
    sum: usize,
    done: bool,
}

impl<A> Expansions<'_, A> {
    fn advance(&mut self) {
        let m = self.alpha.len();
        if m == 0 {
            self.done = true;
            return;
        }
        if self.sum < self.max_len {
            self.alpha[m - 1] += 1;
            self.sum += 1;
            return;
        }
        // Rightmost position that can be bumped once everything after it is reset to 1.
        let mut prefix: usize = self.alpha.iter().sum();
        for i in (0..m - 1).rev() {
            prefix -= self.alpha[i + 1];
            let tail = m - 1 - i;
            if prefix + 1 + tail <= self.max_len {
                self.alpha[i] += 1;
                for a in &mut self.alpha[i + 1..] {
                    *a = 1;
                }
                self.sum = prefix + 1 + tail;
                return;
            }
        }
        self.done = true;
    }
}

impl<A: Clone> Iterator for Expansions<'_, A> {
    type Item = Vec<A>;

    fn next(&mut self) -> Option<Vec<A>> {
        if self.done {
            return None;
        }
        let out = expand(self.word, &self.alpha).expect("multiplicities are valid by construction");
        self.advance();
        Some(out)
    }
}

/// Every expansion of `y` with length at most `max_len`, each exactly once.
/// Yields nothing when `max_len < |y|`.
pub fn enumerate_expansions<A: Clone>(y: &[A], max_len: usize) -> Expansions<'_, A> {
    Expansions {
        word: y,
        max_len,
        alpha: vec![1; y.len()],
        sum: y.len(),
        done: max_len < y.len(),
    }
}

/// The shortest common compression of `x` and `y`, which exists iff both
/// share a condensed form.
pub fn common_compression<A: PartialEq + Clone>(x: &[A], y: &[A]) -> Option<Vec<A>> {
    common_compression_by(x, y, |a, b| a == b)
}

pub fn common_compression_by<A, F>(x: &[A], y: &[A], eq: F) -> Option<Vec<A>>
where
    A: Clone,
    F: Fn(&A, &A) -> bool,
{
    let cx = condense_by(x, &eq);
    let cy = condense_by(y, &eq);
    (cx.len() == cy.len() && cx.iter().zip(&cy).all(|(a, b)| eq(a, b))).then_some(cx)
}
