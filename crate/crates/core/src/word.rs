//! Words in the generators of `A_Γ` and their commutation normal form.
//!
//! A word is reduced when no letter `x^e` is followed, after a stretch of
//! letters that all commute with `x`, by `x^-e`. Reduced words for the same
//! element differ only by swapping adjacent commuting letters, so the
//! lexicographically least reduced word is a canonical representative.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, Vertex};

/// A generator or its inverse. Ordering is vertex order with `v^-1`
/// immediately after `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub vertex: Vertex,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(vertex: Vertex) -> Self {
        Letter { vertex, inverse: false }
    }

    pub fn neg(vertex: Vertex) -> Self {
        Letter { vertex, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter {
            vertex: self.vertex,
            inverse: !self.inverse,
        }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    /// Index in `L = V ∪ V^-1` with `v -> 2v`, `v^-1 -> 2v + 1`.
    pub fn index(self) -> usize {
        2 * self.vertex + self.inverse as usize
    }

    pub fn from_index(i: usize) -> Self {
        Letter {
            vertex: i / 2,
            inverse: i % 2 == 1,
        }
    }

    pub fn render(self, g: &SimpleGraph) -> String {
        if self.inverse {
            format!("{}^-1", g.name(self.vertex))
        } else {
            g.name(self.vertex).to_string()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(v: Vertex) -> Self {
        Word(vec![Letter::pos(v)])
    }

    pub fn gen_inv(v: Vertex) -> Self {
        Word(vec![Letter::neg(v)])
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, n: usize) -> Word {
        Word(self.0.iter().copied().cycle().take(self.len() * n).collect())
    }

    pub fn check(&self, g: &SimpleGraph) -> Result<()> {
        for l in &self.0 {
            g.check_vertex(l.vertex)?;
        }
        Ok(())
    }

    /// Parse whitespace-separated tokens `v` and `v^-1`.
    pub fn parse(g: &SimpleGraph, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            if name.is_empty() {
                return Err(Error::Parse(format!("bad token `{tok}`")));
            }
            out.push(Letter {
                vertex: g.index_of(name)?,
                inverse,
            });
        }
        Ok(Word(out))
    }

    pub fn render(&self, g: &SimpleGraph) -> String {
        if self.is_empty() {
            return "1".into();
        }
        self.0.iter().map(|l| l.render(g)).collect::<Vec<_>>().join(" ")
    }

    pub fn display<'a>(&'a self, g: &'a SimpleGraph) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Word, &'a SimpleGraph);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.render(self.1))
            }
        }
        D(self, g)
    }
}

#[inline]
fn commute(g: &SimpleGraph, a: Letter, b: Letter) -> bool {
    g.adjacent(a.vertex, b.vertex)
}

/// Cancel every pair `x^e ... x^-e` whose interior commutes with `x`.
fn reduce(g: &SimpleGraph, letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        // Scan back through letters commuting with `l`; a cancelling partner
        // can only sit inside that stretch.
        let mut cancelled = false;
        for i in (0..out.len()).rev() {
            let m = out[i];
            if m == l.inv() {
                out.remove(i);
                cancelled = true;
                break;
            }
            if !commute(g, m, l) {
                break;
            }
        }
        if !cancelled {
            out.push(l);
        }
    }
    out
}

/// Lexicographically least word among the commutation class of a reduced word.
fn lex_least(g: &SimpleGraph, mut rest: Vec<Letter>) -> Vec<Letter> {
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            if rest[..i].iter().all(|&m| commute(g, m, rest[i]))
                && best.is_none_or(|b| rest[i] < rest[b])
            {
                best = Some(i);
            }
        }
        out.push(rest.remove(best.unwrap()));
    }
    out
}

/// Canonical representative: reduced, then lexicographically least.
pub fn normal_form(g: &SimpleGraph, w: &Word) -> Result<Word> {
    w.check(g)?;
    Ok(nf(g, w))
}

pub(crate) fn nf(g: &SimpleGraph, w: &Word) -> Word {
    let reduced = reduce(g, &w.0);
    Word(lex_least(g, reduced))
}

pub fn words_equal(g: &SimpleGraph, u: &Word, v: &Word) -> Result<bool> {
    Ok(normal_form(g, u)? == normal_form(g, v)?)
}

pub fn is_trivial(g: &SimpleGraph, w: &Word) -> bool {
    reduce(g, &w.0).is_empty()
}

/// Exponent sums, one coordinate per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianVector(pub Vec<i64>);

impl AbelianVector {
    pub fn zero(n: usize) -> Self {
        AbelianVector(vec![0; n])
    }
}

pub fn abelianize(g: &SimpleGraph, w: &Word) -> Result<AbelianVector> {
    w.check(g)?;
    Ok(abelianize_unchecked(g.order(), w))
}

pub(crate) fn abelianize_unchecked(n: usize, w: &Word) -> AbelianVector {
    let mut v = vec![0i64; n];
    for l in &w.0 {
        v[l.vertex] += l.sign();
    }
    AbelianVector(v)
}

/// Upper limit on the number of search nodes `nth_roots` will visit.
pub const ROOT_SEARCH_LIMIT: u64 = 20_000_000;

/// Every element `u` with a representative of length at most `radius` such
/// that `u^n = w`, as normal forms. Unique root property: at most one.
pub fn nth_roots(g: &SimpleGraph, w: &Word, n: usize, radius: usize) -> Result<Vec<Word>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    w.check(g)?;
    let letters = 2 * g.order() as u64;
    let worst: u64 = (0..=radius as u32)
        .map(|k| letters.saturating_pow(k))
        .fold(0u64, |a, b| a.saturating_add(b));
    if worst > ROOT_SEARCH_LIMIT {
        return Err(Error::BoundExceeded {
            what: "root search space",
            actual: worst.min(usize::MAX as u64) as usize,
            bound: ROOT_SEARCH_LIMIT as usize,
        });
    }
    let target_ab = abelianize_unchecked(g.order(), w).0;
    if target_ab.iter().any(|&c| c % n as i64 != 0) {
        return Ok(Vec::new());
    }
    let want: Vec<i64> = target_ab.iter().map(|&c| c / n as i64).collect();
    let target = nf(g, w);

    let mut found: Vec<Word> = Vec::new();
    let mut current: Vec<Letter> = Vec::new();
    let mut ab = vec![0i64; g.order()];
    search_roots(g, n, radius, &want, &target, &mut current, &mut ab, &mut found);
    found.sort();
    found.dedup();
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn search_roots(
    g: &SimpleGraph,
    n: usize,
    radius: usize,
    want: &[i64],
    target: &Word,
    current: &mut Vec<Letter>,
    ab: &mut Vec<i64>,
    found: &mut Vec<Word>,
) {
    let distance: i64 = want.iter().zip(ab.iter()).map(|(a, b)| (a - b).abs()).sum();
    let remaining = (radius - current.len()) as i64;
    // Abelianisation prunes: the remaining letters must close the gap.
    if distance > remaining {
        return;
    }
    if distance == 0 {
        let u = Word(current.clone());
        if nf(g, &u.pow(n)) == *target {
            found.push(nf(g, &u));
        }
    }
    if current.len() == radius {
        return;
    }
    for i in 0..2 * g.order() {
        let l = Letter::from_index(i);
        if current.last() == Some(&l.inv()) {
            continue;
        }
        current.push(l);
        ab[l.vertex] += l.sign();
        search_roots(g, n, radius, want, target, current, ab, found);
        ab[l.vertex] -= l.sign();
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(g: &SimpleGraph, s: &str) -> Word {
        Word::parse(g, s).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let k2 = SimpleGraph::new(&["x", "y"], &[("x", "y")]).unwrap();
        assert_eq!(normal_form(&k2, &w(&k2, "y x")).unwrap(), w(&k2, "x y"));
        assert_eq!(normal_form(&k2, &w(&k2, "x x^-1")).unwrap(), Word::empty());
        let p3 = SimpleGraph::path(3);
        assert_eq!(normal_form(&p3, &w(&p3, "c a")).unwrap(), w(&p3, "c a"));
    }

    #[test]
    fn cancellation_across_commuting_letters() {
        let p3 = SimpleGraph::path(3);
        // a commutes with b, so a b a^-1 = b
        assert_eq!(normal_form(&p3, &w(&p3, "a b a^-1")).unwrap(), w(&p3, "b"));
        // c does not commute with a
        assert_eq!(normal_form(&p3, &w(&p3, "a c a^-1")).unwrap(), w(&p3, "a c a^-1"));
    }

    #[test]
    fn lex_least_needs_non_adjacent_moves() {
        // a < b < c, a commutes with b and c, b and c do not commute. A word
        // `c b a` only reaches `a c b` by moving `a` past a larger letter.
        let g = SimpleGraph::new(&["c", "a", "b"], &[("a", "b"), ("a", "c")]).unwrap();
        let nfw = normal_form(&g, &w(&g, "b c a")).unwrap();
        assert_eq!(nfw, w(&g, "a b c"));
    }

    #[test]
    fn equality_examples() {
        let k2 = SimpleGraph::complete(2);
        let n2 = SimpleGraph::null(2);
        let p3 = SimpleGraph::path(3);
        assert!(words_equal(&k2, &w(&k2, "a b"), &w(&k2, "b a")).unwrap());
        assert!(!words_equal(&n2, &w(&n2, "a b"), &w(&n2, "b a")).unwrap());
        let ab = w(&p3, "a b");
        assert!(words_equal(&p3, &ab.concat(&ab.inverse()), &Word::empty()).unwrap());
    }

    #[test]
    fn abelianize_examples() {
        let g = SimpleGraph::null(2);
        assert_eq!(abelianize(&g, &w(&g, "a b a")).unwrap().0, vec![2, 1]);
        assert_eq!(abelianize(&g, &w(&g, "a a^-1")).unwrap().0, vec![0, 0]);
        assert_eq!(abelianize(&g, &w(&g, "b")).unwrap().0, vec![0, 1]);
    }

    #[test]
    fn root_examples() {
        let n2 = SimpleGraph::null(2);
        assert_eq!(nth_roots(&n2, &w(&n2, "a a"), 2, 2).unwrap(), vec![w(&n2, "a")]);
        assert!(nth_roots(&n2, &w(&n2, "a b"), 2, 2).unwrap().is_empty());
        assert_eq!(nth_roots(&n2, &Word::empty(), 3, 2).unwrap(), vec![Word::empty()]);
        assert!(nth_roots(&SimpleGraph::null(5), &Word::empty(), 2, 12).is_err());
    }

    #[test]
    fn parse_rejects_unknown() {
        let g = SimpleGraph::null(2);
        assert!(matches!(Word::parse(&g, "a q"), Err(Error::UnknownVertex(_))));
        assert!(normal_form(&g, &Word::gen(5)).is_err());
    }
}
