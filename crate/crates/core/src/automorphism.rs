//! Automorphisms of `A_Γ` as generator substitutions: Laurence–Servatius
//! generators, Whitehead automorphisms, and Day's relations among the latter.
//!
//! Products follow function composition: `[f, g]` as a factor list means
//! `f ∘ g`, so `g` acts first. Commutators are `[x, y] = x y x^-1 y^-1`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Permutation, SimpleGraph, Vertex, VertexSet};
use crate::word::{nf, Letter, Word};

/// Vertex bound for exhaustive Whitehead enumeration.
pub const DEFAULT_WHITEHEAD_BOUND: usize = 5;
const LETTERSET_MAX_VERTICES: usize = 32;

/// A homomorphism `A_Γ -> A_Γ` given by the images of the generators, kept in
/// normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    pub images: Vec<Word>,
}

impl Endomorphism {
    pub fn identity(n: usize) -> Self {
        Endomorphism {
            images: (0..n).map(Word::gen).collect(),
        }
    }

    pub fn from_images(g: &SimpleGraph, images: Vec<Word>) -> Result<Self> {
        if images.len() != g.order() {
            return Err(Error::InvalidArgument(format!(
                "expected {} images, got {}",
                g.order(),
                images.len()
            )));
        }
        for w in &images {
            w.check(g)?;
        }
        Ok(Endomorphism {
            images: images.iter().map(|w| nf(g, w)).collect(),
        })
    }

    pub fn image_of(&self, l: Letter) -> Word {
        if l.inverse {
            self.images[l.vertex].inverse()
        } else {
            self.images[l.vertex].clone()
        }
    }

    pub fn render(&self, g: &SimpleGraph) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(v, w)| format!("{} -> {}", g.name(v), w.render(g)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Substitute generator images into `w` and normalise.
pub fn apply(g: &SimpleGraph, e: &Endomorphism, w: &Word) -> Word {
    let mut letters = Vec::new();
    for &l in w.letters() {
        letters.extend(e.image_of(l).0);
    }
    nf(g, &Word(letters))
}

/// `f ∘ e`.
pub fn compose(g: &SimpleGraph, f: &Endomorphism, e: &Endomorphism) -> Endomorphism {
    Endomorphism {
        images: e.images.iter().map(|w| apply(g, f, w)).collect(),
    }
}

pub fn compose_all(g: &SimpleGraph, factors: &[&Endomorphism]) -> Endomorphism {
    let mut acc = Endomorphism::identity(g.order());
    for f in factors.iter().rev() {
        acc = compose(g, f, &acc);
    }
    acc
}

pub fn endos_equal(g: &SimpleGraph, f: &Endomorphism, e: &Endomorphism) -> bool {
    first_difference(g, f, e).is_none()
}

/// First generator on which the two maps disagree.
pub fn first_difference(g: &SimpleGraph, f: &Endomorphism, e: &Endomorphism) -> Option<Vertex> {
    (0..g.order()).find(|&v| nf(g, &f.images[v]) != nf(g, &e.images[v]))
}

/// Whether every defining commutator maps to the identity.
pub fn respects_relators(g: &SimpleGraph, e: &Endomorphism) -> bool {
    g.edges().into_iter().all(|(u, v)| {
        let (a, b) = (&e.images[u], &e.images[v]);
        let rel = a.concat(b).concat(&a.inverse()).concat(&b.inverse());
        nf(g, &rel).is_empty()
    })
}

/// Certify `e` as an automorphism through an explicit two-sided inverse.
pub fn certify_automorphism(g: &SimpleGraph, e: &Endomorphism, inverse: &Endomorphism) -> bool {
    let id = Endomorphism::identity(g.order());
    respects_relators(g, e)
        && respects_relators(g, inverse)
        && endos_equal(g, &compose(g, e, inverse), &id)
        && endos_equal(g, &compose(g, inverse, e), &id)
}

/// Laurence–Servatius generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LSGenerator {
    /// `ι_v`: `v -> v^-1`.
    Inversion(Vertex),
    /// `σ̄`: `v -> σ(v)`.
    GraphSymmetry(Permutation),
    /// `λ_{v,w}`: `w -> v w`, requires `w <= v`, `v != w`.
    Transvection { v: Vertex, w: Vertex },
    /// `γ_{v,A}`: `u -> v u v^-1` for `u ∈ A`, `A ∈ CC(v)`.
    PartialConjugation { v: Vertex, component: VertexSet },
}

impl LSGenerator {
    pub fn validate(&self, g: &SimpleGraph) -> Result<()> {
        match self {
            LSGenerator::Inversion(v) => g.check_vertex(*v),
            LSGenerator::GraphSymmetry(p) => {
                if p.len() != g.order() || !is_permutation(p) {
                    return Err(Error::InvalidArgument("not a vertex permutation".into()));
                }
                let preserves = g.edges().into_iter().all(|(u, v)| g.adjacent(p[u], p[v]));
                if !preserves {
                    return Err(Error::InvalidArgument("permutation is not a graph automorphism".into()));
                }
                Ok(())
            }
            LSGenerator::Transvection { v, w } => {
                g.check_vertex(*v)?;
                g.check_vertex(*w)?;
                if v == w || !g.leq(*w, *v) {
                    return Err(Error::InvalidArgument(format!(
                        "transvection needs {} >= {} with distinct vertices",
                        g.name(*v),
                        g.name(*w)
                    )));
                }
                Ok(())
            }
            LSGenerator::PartialConjugation { v, component } => {
                g.check_vertex(*v)?;
                if !g.cc(*v).contains(component) {
                    return Err(Error::InvalidArgument(format!(
                        "{{{}}} is not a component of Γ - st({})",
                        g.set_names(component).join(","),
                        g.name(*v)
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn endomorphism(&self, g: &SimpleGraph) -> Endomorphism {
        let mut e = Endomorphism::identity(g.order());
        match self {
            LSGenerator::Inversion(v) => e.images[*v] = Word::gen_inv(*v),
            LSGenerator::GraphSymmetry(p) => {
                for (v, img) in e.images.iter_mut().enumerate() {
                    *img = Word::gen(p[v]);
                }
            }
            LSGenerator::Transvection { v, w } => e.images[*w] = Word(vec![Letter::pos(*v), Letter::pos(*w)]),
            LSGenerator::PartialConjugation { v, component } => {
                for &u in component {
                    e.images[u] = Word(vec![Letter::pos(*v), Letter::pos(u), Letter::neg(*v)]);
                }
            }
        }
        e
    }

    pub fn inverse_endomorphism(&self, g: &SimpleGraph) -> Endomorphism {
        let mut e = Endomorphism::identity(g.order());
        match self {
            LSGenerator::Inversion(v) => e.images[*v] = Word::gen_inv(*v),
            LSGenerator::GraphSymmetry(p) => {
                for (v, &pv) in p.iter().enumerate() {
                    e.images[pv] = Word::gen(v);
                }
            }
            LSGenerator::Transvection { v, w } => e.images[*w] = Word(vec![Letter::neg(*v), Letter::pos(*w)]),
            LSGenerator::PartialConjugation { v, component } => {
                for &u in component {
                    e.images[u] = Word(vec![Letter::neg(*v), Letter::pos(u), Letter::pos(*v)]);
                }
            }
        }
        e
    }

    pub fn render(&self, g: &SimpleGraph) -> String {
        match self {
            LSGenerator::Inversion(v) => format!("inv {}", g.name(*v)),
            LSGenerator::GraphSymmetry(p) => format!("sym {}", render_cycles(g, p)),
            LSGenerator::Transvection { v, w } => format!("transv {} {}", g.name(*v), g.name(*w)),
            LSGenerator::PartialConjugation { v, component } => {
                format!("pconj {} {{{}}}", g.name(*v), g.set_names(component).join(" "))
            }
        }
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

fn render_cycles(g: &SimpleGraph, p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cyc = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cyc.push(g.name(x));
            x = p[x];
        }
        out.push_str(&format!("({})", cyc.join(" ")));
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// All inversions, graph symmetries (identity included), transvections and
/// partial conjugations.
pub fn ls_generators(g: &SimpleGraph, aut_bound: usize) -> Result<Vec<LSGenerator>> {
    let n = g.order();
    let mut out: Vec<LSGenerator> = (0..n).map(LSGenerator::Inversion).collect();
    out.extend(g.automorphisms(aut_bound)?.into_iter().map(LSGenerator::GraphSymmetry));
    for v in 0..n {
        for w in 0..n {
            if v != w && g.leq(w, v) {
                out.push(LSGenerator::Transvection { v, w });
            }
        }
    }
    for v in 0..n {
        for component in g.cc(v) {
            out.push(LSGenerator::PartialConjugation { v, component });
        }
    }
    Ok(out)
}

/// Right transvection `ρ_{v,w}`: `w -> w v`.
pub fn right_transvection(g: &SimpleGraph, v: Vertex, w: Vertex) -> Endomorphism {
    let mut e = Endomorphism::identity(g.order());
    e.images[w] = Word(vec![Letter::pos(w), Letter::pos(v)]);
    e
}

/// Inner automorphism `u -> v u v^-1`.
pub fn conjugation(g: &SimpleGraph, v: Vertex) -> Endomorphism {
    let images = (0..g.order())
        .map(|u| nf(g, &Word(vec![Letter::pos(v), Letter::pos(u), Letter::neg(v)])))
        .collect();
    Endomorphism { images }
}

/// Subset of `L = V ∪ V^-1` as a bitmask over letter indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterSet(pub u64);

impl LetterSet {
    pub fn full(n: usize) -> Self {
        assert!(n <= LETTERSET_MAX_VERTICES);
        if n == 32 {
            LetterSet(u64::MAX)
        } else {
            LetterSet((1u64 << (2 * n)) - 1)
        }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut s = LetterSet(0);
        for l in letters {
            s = s.with(l);
        }
        s
    }

    pub fn contains(self, l: Letter) -> bool {
        self.0 >> l.index() & 1 == 1
    }

    pub fn with(self, l: Letter) -> Self {
        LetterSet(self.0 | 1 << l.index())
    }

    pub fn without(self, l: Letter) -> Self {
        LetterSet(self.0 & !(1 << l.index()))
    }

    pub fn union(self, o: Self) -> Self {
        LetterSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        LetterSet(self.0 & o.0)
    }

    pub fn minus(self, o: Self) -> Self {
        LetterSet(self.0 & !o.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// `A^-1`.
    pub fn inverse(self) -> Self {
        const EVEN: u64 = 0x5555_5555_5555_5555;
        LetterSet((self.0 & EVEN) << 1 | (self.0 >> 1) & EVEN)
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..64).filter(move |i| self.0 >> i & 1 == 1).map(Letter::from_index)
    }

    pub fn render(self, g: &SimpleGraph) -> String {
        let names: Vec<String> = self.letters().map(|l| l.render(g)).collect();
        format!("{{{}}}", names.join(" "))
    }
}

/// Type (1) Whitehead automorphism `v -> σ(v)^{±1}`: `signs[v]` set means the
/// image of `v` is `σ(v)^-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    pub signs: Vec<bool>,
    pub perm: Permutation,
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        SignedPermutation {
            signs: vec![false; n],
            perm: (0..n).collect(),
        }
    }

    pub fn apply_letter(&self, l: Letter) -> Letter {
        Letter {
            vertex: self.perm[l.vertex],
            inverse: self.signs[l.vertex] ^ l.inverse,
        }
    }

    pub fn apply_set(&self, s: LetterSet) -> LetterSet {
        LetterSet::from_letters(s.letters().map(|l| self.apply_letter(l)))
    }

    /// Group product `self ∘ other` in `Z_2^V ⋊ Aut(Γ)`.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.perm.len();
        SignedPermutation {
            perm: (0..n).map(|v| self.perm[other.perm[v]]).collect(),
            signs: (0..n).map(|v| self.signs[other.perm[v]] ^ other.signs[v]).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut signs = vec![false; n];
        for v in 0..n {
            perm[self.perm[v]] = v;
            signs[self.perm[v]] = self.signs[v];
        }
        SignedPermutation { signs, perm }
    }

    pub fn endomorphism(&self) -> Endomorphism {
        Endomorphism {
            images: (0..self.perm.len())
                .map(|v| Word::letter(self.apply_letter(Letter::pos(v))))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|s| !s) && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WhiteheadAuto {
    Type1(SignedPermutation),
    /// `(A, a)`.
    Type2 { set: LetterSet, multiplier: Letter },
}

impl WhiteheadAuto {
    pub fn type2(set: LetterSet, multiplier: Letter) -> Self {
        WhiteheadAuto::Type2 { set, multiplier }
    }

    pub fn render(&self, g: &SimpleGraph) -> String {
        match self {
            WhiteheadAuto::Type1(s) => {
                let inv: Vec<&str> = (0..s.signs.len()).filter(|&v| s.signs[v]).map(|v| g.name(v)).collect();
                format!("type1 sym {} inv {{{}}}", render_cycles(g, &s.perm), inv.join(" "))
            }
            WhiteheadAuto::Type2 { set, multiplier } => {
                format!("({}, {})", set.render(g), multiplier.render(g))
            }
        }
    }
}

/// The four-case substitution for `(A, a)`, without any well-definedness check.
pub fn type2_formula(g: &SimpleGraph, set: LetterSet, a: Letter) -> Endomorphism {
    let mut e = Endomorphism::identity(g.order());
    for v in 0..g.order() {
        if v == a.vertex {
            continue;
        }
        let fwd = set.contains(Letter::pos(v));
        let back = set.contains(Letter::neg(v));
        let mut w = Vec::with_capacity(3);
        if back {
            w.push(a.inv());
        }
        w.push(Letter::pos(v));
        if fwd {
            w.push(a);
        }
        e.images[v] = nf(g, &Word(w));
    }
    e
}

/// Outcome of the well-definedness criterion for `(A, a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellDefinedness {
    pub well_defined: bool,
    pub reason: String,
}

fn check_type2_symbol(g: &SimpleGraph, set: LetterSet, a: Letter) -> Result<()> {
    if g.order() > LETTERSET_MAX_VERTICES {
        return Err(Error::BoundExceeded {
            what: "vertex count for letter sets",
            actual: g.order(),
            bound: LETTERSET_MAX_VERTICES,
        });
    }
    g.check_vertex(a.vertex)?;
    if set.minus(LetterSet::full(g.order())).0 != 0 {
        return Err(Error::InvalidArgument("letter set mentions unknown vertices".into()));
    }
    if !set.contains(a) || set.contains(a.inv()) {
        return Err(Error::InvalidArgument(format!(
            "multiplier {} must lie in A with its inverse outside A",
            a.render(g)
        )));
    }
    Ok(())
}

/// `(A, a)` is well defined iff (1) the vertices `v` with `v, v^-1 ∈ A`,
/// outside `lk(ā)`, form a union of components of `Γ - st(ā)`, and (2) every
/// `x ∈ A` with `x^-1 ∉ A` satisfies `x̄ <= ā`.
pub fn whitehead_well_defined(g: &SimpleGraph, set: LetterSet, a: Letter) -> Result<WellDefinedness> {
    check_type2_symbol(g, set, a)?;
    Ok(well_defined_unchecked(g, set, a))
}

fn well_defined_unchecked(g: &SimpleGraph, set: LetterSet, a: Letter) -> WellDefinedness {
    let av = a.vertex;
    let two_sided: VertexSet = (0..g.order())
        .filter(|&v| set.contains(Letter::pos(v)) && set.contains(Letter::neg(v)) && !g.adjacent(av, v))
        .collect();
    for comp in g.cc(av) {
        let inside = comp.iter().filter(|v| two_sided.contains(v)).count();
        if inside != 0 && inside != comp.len() {
            return WellDefinedness {
                well_defined: false,
                reason: format!(
                    "two-sided part meets component {{{}}} of Γ - st({}) without containing it",
                    g.set_names(&comp).join(","),
                    g.name(av)
                ),
            };
        }
    }
    // Covered vertices outside every component can only be ā itself, which is
    // excluded by a^-1 ∉ A.
    for x in set.minus(set.inverse()).letters() {
        if !g.leq(x.vertex, av) {
            return WellDefinedness {
                well_defined: false,
                reason: format!("{} is not dominated by {}", g.name(x.vertex), g.name(av)),
            };
        }
    }
    WellDefinedness {
        well_defined: true,
        reason: "both conditions hold".into(),
    }
}

pub fn endo_of_whitehead(g: &SimpleGraph, wa: &WhiteheadAuto) -> Result<Endomorphism> {
    match wa {
        WhiteheadAuto::Type1(s) => {
            let p = LSGenerator::GraphSymmetry(s.perm.clone());
            p.validate(g)?;
            if s.signs.len() != g.order() {
                return Err(Error::InvalidArgument("sign vector length".into()));
            }
            Ok(s.endomorphism())
        }
        WhiteheadAuto::Type2 { set, multiplier } => {
            let wd = whitehead_well_defined(g, *set, *multiplier)?;
            if !wd.well_defined {
                return Err(Error::NotWellDefined {
                    set: set.render(g),
                    multiplier: multiplier.render(g),
                    reason: wd.reason,
                });
            }
            Ok(type2_formula(g, *set, *multiplier))
        }
    }
}

/// Inverse through the explicit formulas: the signed-permutation inverse for
/// type (1), `(A - a + a^-1, a^-1)` for type (2).
pub fn whitehead_inverse(wa: &WhiteheadAuto) -> WhiteheadAuto {
    match wa {
        WhiteheadAuto::Type1(s) => WhiteheadAuto::Type1(s.inv()),
        WhiteheadAuto::Type2 { set, multiplier } => WhiteheadAuto::Type2 {
            set: set.without(*multiplier).with(multiplier.inv()),
            multiplier: multiplier.inv(),
        },
    }
}

fn endo_unchecked(g: &SimpleGraph, wa: &WhiteheadAuto) -> Endomorphism {
    match wa {
        WhiteheadAuto::Type1(s) => s.endomorphism(),
        WhiteheadAuto::Type2 { set, multiplier } => type2_formula(g, *set, *multiplier),
    }
}

fn check_whitehead_bound(g: &SimpleGraph, bound: usize) -> Result<()> {
    let bound = bound.min(LETTERSET_MAX_VERTICES);
    if g.order() > bound {
        return Err(Error::BoundExceeded {
            what: "vertex count",
            actual: g.order(),
            bound,
        });
    }
    Ok(())
}

pub fn type1_elements(g: &SimpleGraph, bound: usize) -> Result<Vec<SignedPermutation>> {
    check_whitehead_bound(g, bound)?;
    let n = g.order();
    let mut out = Vec::new();
    for perm in g.automorphisms(bound.max(n))? {
        for mask in 0u32..(1 << n) {
            out.push(SignedPermutation {
                signs: (0..n).map(|v| mask >> v & 1 == 1).collect(),
                perm: perm.clone(),
            });
        }
    }
    Ok(out)
}

/// Every symbol `(A, a)` with `a ∈ A`, `a^-1 ∉ A`, well defined or not.
pub fn type2_symbols(n: usize) -> Vec<(LetterSet, Letter)> {
    let mut out = Vec::new();
    for ai in 0..2 * n {
        let a = Letter::from_index(ai);
        let others: Vec<usize> = (0..2 * n).filter(|&i| i != ai && i != a.inv().index()).collect();
        for mask in 0u64..(1 << others.len()) {
            let mut s = LetterSet(0).with(a);
            for (bit, &li) in others.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    s = s.with(Letter::from_index(li));
                }
            }
            out.push((s, a));
        }
    }
    out
}

/// All type (1) elements and all well-defined `(A, a)`.
pub fn enumerate_whitehead(g: &SimpleGraph, bound: usize) -> Result<Vec<WhiteheadAuto>> {
    let mut out: Vec<WhiteheadAuto> = type1_elements(g, bound)?
        .into_iter()
        .map(WhiteheadAuto::Type1)
        .collect();
    out.extend(
        type2_symbols(g.order())
            .into_iter()
            .filter(|&(s, a)| well_defined_unchecked(g, s, a).well_defined)
            .map(|(s, a)| WhiteheadAuto::type2(s, a)),
    );
    Ok(out)
}

/// One factor of a relation side: a Whitehead automorphism or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub auto: WhiteheadAuto,
    pub inverse: bool,
}

impl Factor {
    pub fn plain(auto: WhiteheadAuto) -> Self {
        Factor { auto, inverse: false }
    }

    pub fn inv(auto: WhiteheadAuto) -> Self {
        Factor { auto, inverse: true }
    }

    /// The automorphism this factor denotes, with inverses made explicit.
    pub fn resolved(&self) -> WhiteheadAuto {
        if self.inverse {
            whitehead_inverse(&self.auto)
        } else {
            self.auto.clone()
        }
    }

    fn render(&self, g: &SimpleGraph) -> String {
        if self.inverse {
            format!("{}^-1", self.auto.render(g))
        } else {
            self.auto.render(g)
        }
    }
}

/// An instance `left = right` of one of Day's ten relation families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayInstance {
    pub relation: u8,
    pub left: Vec<Factor>,
    pub right: Vec<Factor>,
}

impl DayInstance {
    pub fn materialize(&self, g: &SimpleGraph) -> (Endomorphism, Endomorphism) {
        let side = |fs: &[Factor]| {
            let endos: Vec<Endomorphism> = fs.iter().map(|f| endo_unchecked(g, &f.resolved())).collect();
            compose_all(g, &endos.iter().collect::<Vec<_>>())
        };
        (side(&self.left), side(&self.right))
    }

    pub fn render(&self, g: &SimpleGraph) -> String {
        let side = |fs: &[Factor]| {
            if fs.is_empty() {
                "e".to_string()
            } else {
                fs.iter().map(|f| f.render(g)).collect::<Vec<_>>().join(" . ")
            }
        };
        format!("R{}: {} = {}", self.relation, side(&self.left), side(&self.right))
    }
}

/// Instances grouped by relation, plus symbols skipped because a derived
/// Whitehead symbol was not well defined.
#[derive(Clone, Debug, Default)]
pub struct DayInstances {
    pub instances: Vec<DayInstance>,
    pub skipped: [usize; 10],
}

fn commutator(x: WhiteheadAuto, y: WhiteheadAuto) -> Vec<Factor> {
    vec![
        Factor::plain(x.clone()),
        Factor::plain(y.clone()),
        Factor::inv(x),
        Factor::inv(y),
    ]
}

/// Every instance of the ten relation families whose side conditions hold and
/// whose symbols are all well-defined Whitehead automorphisms.
pub fn day_relation_instances(g: &SimpleGraph, bound: usize) -> Result<DayInstances> {
    let n = g.order();
    let t1 = type1_elements(g, bound)?;
    let t2: Vec<(LetterSet, Letter)> = type2_symbols(n)
        .into_iter()
        .filter(|&(s, a)| well_defined_unchecked(g, s, a).well_defined)
        .collect();
    let omega: HashSet<(LetterSet, Letter)> = t2.iter().copied().collect();
    let full = LetterSet::full(n);
    let wh = |s: LetterSet, a: Letter| WhiteheadAuto::type2(s, a);
    let bar_adjacent = |a: Letter, b: Letter| g.adjacent(a.vertex, b.vertex);

    let mut out = DayInstances::default();
    let push = |out: &mut DayInstances, rel: u8, left: Vec<Factor>, right: Vec<Factor>| {
        out.instances.push(DayInstance {
            relation: rel,
            left,
            right,
        })
    };

    // R1: (A, a)^-1 = (A - a + a^-1, a^-1), checked as (A, a)(A - a + a^-1, a^-1) = e.
    for &(s, a) in &t2 {
        let inv = (s.without(a).with(a.inv()), a.inv());
        if omega.contains(&inv) {
            push(&mut out, 1, vec![Factor::plain(wh(s, a)), Factor::plain(wh(inv.0, inv.1))], vec![]);
        } else {
            out.skipped[0] += 1;
        }
    }

    // R2: (A, a)(B, a) = (A ∪ B, a) when A ∩ B = {a}.
    for &(s, a) in &t2 {
        for &(b_set, b) in &t2 {
            if b != a || s.intersection(b_set) != LetterSet(0).with(a) {
                continue;
            }
            let u = s.union(b_set);
            if omega.contains(&(u, a)) {
                push(
                    &mut out,
                    2,
                    vec![Factor::plain(wh(s, a)), Factor::plain(wh(b_set, a))],
                    vec![Factor::plain(wh(u, a))],
                );
            } else {
                out.skipped[1] += 1;
            }
        }
    }

    // R3 and R4.
    for &(s, a) in &t2 {
        for &(b_set, b) in &t2 {
            if b_set.contains(a) || b_set.contains(a.inv()) {
                continue;
            }
            if !(s.intersection(b_set).is_empty() || bar_adjacent(a, b)) {
                continue;
            }
            if !s.contains(b) && !s.contains(b.inv()) {
                push(&mut out, 3, commutator(wh(s, a), wh(b_set, b)), vec![]);
            } else if !s.contains(b) && s.contains(b.inv()) {
                let r = (b_set.without(b).with(a), a);
                if omega.contains(&r) {
                    push(
                        &mut out,
                        4,
                        commutator(wh(s, a), wh(b_set, b)),
                        vec![Factor::inv(wh(r.0, r.1))],
                    );
                } else {
                    out.skipped[3] += 1;
                }
            }
        }
    }

    // R5: (A - a + a^-1, b)(A, a) = (A - b + b^-1, a) σ_{a,b}.
    let dom = g.domination_structure();
    for &(s, a) in &t2 {
        for b in s.letters() {
            if b == a || s.contains(b.inv()) || b.vertex == a.vertex || !dom.equivalent(a.vertex, b.vertex) {
                continue;
            }
            let l1 = (s.without(a).with(a.inv()), b);
            let r1 = (s.without(b).with(b.inv()), a);
            if !(omega.contains(&l1) && omega.contains(&r1)) {
                out.skipped[4] += 1;
                continue;
            }
            let sigma = sigma_ab(n, a, b);
            push(
                &mut out,
                5,
                vec![Factor::plain(wh(l1.0, l1.1)), Factor::plain(wh(s, a))],
                vec![Factor::plain(wh(r1.0, r1.1)), Factor::plain(WhiteheadAuto::Type1(sigma))],
            );
        }
    }

    // R6: σ (A, a) σ^-1 = (σ(A), σ(a)).
    for sigma in &t1 {
        for &(s, a) in &t2 {
            let img = (sigma.apply_set(s), sigma.apply_letter(a));
            if !omega.contains(&img) {
                out.skipped[5] += 1;
                continue;
            }
            let sg = WhiteheadAuto::Type1(sigma.clone());
            push(
                &mut out,
                6,
                vec![Factor::plain(sg.clone()), Factor::plain(wh(s, a)), Factor::inv(sg)],
                vec![Factor::plain(wh(img.0, img.1))],
            );
        }
    }

    // R7: multiplication table of type (1).
    for x in &t1 {
        for y in &t1 {
            push(
                &mut out,
                7,
                vec![Factor::plain(WhiteheadAuto::Type1(x.clone())), Factor::plain(WhiteheadAuto::Type1(y.clone()))],
                vec![Factor::plain(WhiteheadAuto::Type1(x.mul(y)))],
            );
        }
    }

    // R8: (A, a) = (L - a^-1, a)(L - A, a^-1).
    for &(s, a) in &t2 {
        let p = (full.without(a.inv()), a);
        let q = (full.minus(s), a.inv());
        if omega.contains(&p) && omega.contains(&q) {
            push(
                &mut out,
                8,
                vec![Factor::plain(wh(s, a))],
                vec![Factor::plain(wh(p.0, p.1)), Factor::plain(wh(q.0, q.1))],
            );
        } else {
            out.skipped[7] += 1;
        }
    }

    // R9 and R10 with the inner automorphism (L - b^-1, b).
    for &(s, a) in &t2 {
        for bi in 0..2 * n {
            let b = Letter::from_index(bi);
            let y = (full.without(b.inv()), b);
            let r9 = !s.contains(b) && !s.contains(b.inv());
            let r10 = b != a && s.contains(b) && !s.contains(b.inv());
            if !(r9 || r10) {
                continue;
            }
            if !omega.contains(&y) {
                out.skipped[if r9 { 8 } else { 9 }] += 1;
                continue;
            }
            if r9 {
                push(&mut out, 9, commutator(wh(s, a), wh(y.0, y.1)), vec![]);
            } else {
                let r = (full.without(a.inv()), a);
                if omega.contains(&r) {
                    push(&mut out, 10, commutator(wh(s, a), wh(y.0, y.1)), vec![Factor::plain(wh(r.0, r.1))]);
                } else {
                    out.skipped[9] += 1;
                }
            }
        }
    }
    Ok(out)
}

/// `σ_{a,b}`: `a -> b^-1`, `b -> a`, other vertices fixed.
pub fn sigma_ab(n: usize, a: Letter, b: Letter) -> SignedPermutation {
    let mut s = SignedPermutation::identity(n);
    // σ(a) = b^-1 on letters; translate to the vertex ā.
    s.perm[a.vertex] = b.vertex;
    s.signs[a.vertex] = a.inverse ^ b.inv().inverse;
    s.perm[b.vertex] = a.vertex;
    s.signs[b.vertex] = b.inverse ^ a.inverse;
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayFailure {
    pub relation: u8,
    pub instance: String,
    pub witness: String,
}

#[derive(Clone, Debug, Default)]
pub struct DayReport {
    pub checked: usize,
    pub per_relation: [usize; 10],
    pub skipped: [usize; 10],
    pub failures: Vec<DayFailure>,
}

impl DayReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check both sides of every Day relation instance as endomorphisms.
pub fn verify_day_presentation(g: &SimpleGraph, bound: usize) -> Result<DayReport> {
    let inst = day_relation_instances(g, bound)?;
    let mut cache: HashMap<WhiteheadAuto, Endomorphism> = HashMap::new();
    for i in &inst.instances {
        for f in i.left.iter().chain(&i.right) {
            let r = f.resolved();
            if !cache.contains_key(&r) {
                let e = endo_unchecked(g, &r);
                cache.insert(r, e);
            }
        }
    }
    let side = |fs: &[Factor]| {
        let endos: Vec<&Endomorphism> = fs.iter().map(|f| &cache[&f.resolved()]).collect();
        compose_all(g, &endos)
    };
    let failures: Vec<DayFailure> = inst
        .instances
        .par_iter()
        .filter_map(|i| {
            let (l, r) = (side(&i.left), side(&i.right));
            first_difference(g, &l, &r).map(|v| DayFailure {
                relation: i.relation,
                instance: i.render(g),
                witness: format!(
                    "{}: {} vs {}",
                    g.name(v),
                    l.images[v].render(g),
                    r.images[v].render(g)
                ),
            })
        })
        .collect();
    let mut report = DayReport {
        checked: inst.instances.len(),
        skipped: inst.skipped,
        failures,
        ..Default::default()
    };
    for i in &inst.instances {
        report.per_relation[i.relation as usize - 1] += 1;
    }
    Ok(report)
}

/// Parsed CLI generator syntax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Ls(LSGenerator),
    Whitehead(WhiteheadAuto),
}

impl GeneratorSpec {
    /// `inv v`, `sym (a b)(c d)`, `transv v w`, `pconj v {A...}`, `wh {letters} a`.
    pub fn parse(g: &SimpleGraph, text: &str) -> Result<GeneratorSpec> {
        let text = text.trim();
        let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let spec = match head {
            "inv" => GeneratorSpec::Ls(LSGenerator::Inversion(g.index_of(rest)?)),
            "sym" => GeneratorSpec::Ls(LSGenerator::GraphSymmetry(parse_cycles(g, rest)?)),
            "transv" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [v, w] = parts.as_slice() else {
                    return Err(Error::Parse("transv takes two vertices".into()));
                };
                GeneratorSpec::Ls(LSGenerator::Transvection {
                    v: g.index_of(v)?,
                    w: g.index_of(w)?,
                })
            }
            "pconj" => {
                let (v, set) = rest
                    .split_once('{')
                    .ok_or_else(|| Error::Parse("pconj v {A...}".into()))?;
                let set = set.trim_end().strip_suffix('}').ok_or_else(|| Error::Parse("missing }".into()))?;
                let component = set
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| g.index_of(s))
                    .collect::<Result<VertexSet>>()?;
                GeneratorSpec::Ls(LSGenerator::PartialConjugation {
                    v: g.index_of(v.trim())?,
                    component,
                })
            }
            "wh" => {
                let rest = rest.strip_prefix('{').ok_or_else(|| Error::Parse("wh {letters} a".into()))?;
                let (set, a) = rest.split_once('}').ok_or_else(|| Error::Parse("missing }".into()))?;
                let letters = Word::parse(g, &set.replace(',', " "))?;
                let a = Word::parse(g, a)?;
                let [a] = a.letters() else {
                    return Err(Error::Parse("multiplier must be a single letter".into()));
                };
                GeneratorSpec::Whitehead(WhiteheadAuto::type2(LetterSet::from_letters(letters.0), *a))
            }
            other => return Err(Error::Parse(format!("unknown generator kind `{other}`"))),
        };
        match &spec {
            GeneratorSpec::Ls(l) => l.validate(g)?,
            GeneratorSpec::Whitehead(w) => {
                endo_of_whitehead(g, w)?;
            }
        }
        Ok(spec)
    }

    pub fn endomorphism(&self, g: &SimpleGraph) -> Result<Endomorphism> {
        match self {
            GeneratorSpec::Ls(l) => Ok(l.endomorphism(g)),
            GeneratorSpec::Whitehead(w) => endo_of_whitehead(g, w),
        }
    }
}

fn parse_cycles(g: &SimpleGraph, text: &str) -> Result<Permutation> {
    let mut perm: Permutation = (0..g.order()).collect();
    let mut rest = text.trim();
    let mut moved = vec![false; g.order()];
    while !rest.is_empty() {
        let inner = rest.strip_prefix('(').ok_or_else(|| Error::Parse(format!("bad cycle `{rest}`")))?;
        let (cyc, tail) = inner.split_once(')').ok_or_else(|| Error::Parse("missing )".into()))?;
        let verts = cyc
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| g.index_of(s))
            .collect::<Result<Vec<_>>>()?;
        for (i, &v) in verts.iter().enumerate() {
            if std::mem::replace(&mut moved[v], true) {
                return Err(Error::Parse(format!("vertex {} repeated in cycles", g.name(v))));
            }
            perm[v] = verts[(i + 1) % verts.len()];
        }
        rest = tail.trim_start();
    }
    Ok(perm)
}

impl fmt::Display for DayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instances: {}, failures: {}", self.checked, self.failures.len())
    }
}
