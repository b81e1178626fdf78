//! Finite-index subgroups: Reidemeister–Schreier presentations of kernels of
//! maps onto finite groups, recognition of the result as a RAAG, and the
//! closed-form kernel structures for free and direct products.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::graph::{Cotree, P4Witness, SimpleGraph, Vertex};
use crate::word::{nf, Letter, Word};

/// Default cap on the order of the finite quotient.
pub const DEFAULT_QUOTIENT_BOUND: usize = 512;

/// Groups built from `Z` by free and direct products.
///
/// Variant order is the canonical sort order of factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupExpr {
    /// `Z^i`.
    FreeAbelian(u64),
    /// `F_k`; `F_0` is the trivial group and `F_1` is `Z`.
    Free(u64),
    FreeProduct(Vec<GroupExpr>),
    DirectProduct(Vec<GroupExpr>),
}

impl GroupExpr {
    pub fn z() -> Self {
        GroupExpr::Free(1)
    }

    pub fn free_power(e: GroupExpr, k: u64) -> Self {
        GroupExpr::FreeProduct(vec![e; k as usize]).canonical()
    }

    pub fn is_trivial(&self) -> bool {
        *self == GroupExpr::Free(0)
    }

    /// Flatten nested products, merge free and abelian pieces, drop trivial
    /// factors and sort.
    pub fn canonical(&self) -> GroupExpr {
        match self {
            GroupExpr::FreeAbelian(0) => GroupExpr::Free(0),
            GroupExpr::FreeAbelian(1) => GroupExpr::Free(1),
            GroupExpr::FreeAbelian(_) | GroupExpr::Free(_) => self.clone(),
            GroupExpr::FreeProduct(cs) => {
                let mut rank = 0;
                let mut rest = Vec::new();
                for c in cs.iter().map(GroupExpr::canonical) {
                    match c {
                        GroupExpr::Free(k) => rank += k,
                        GroupExpr::FreeProduct(inner) => {
                            for x in inner {
                                match x {
                                    GroupExpr::Free(k) => rank += k,
                                    other => rest.push(other),
                                }
                            }
                        }
                        other => rest.push(other),
                    }
                }
                if rank > 0 {
                    rest.push(GroupExpr::Free(rank));
                }
                finish(rest, GroupExpr::FreeProduct)
            }
            GroupExpr::DirectProduct(cs) => {
                let mut rank = 0;
                let mut rest = Vec::new();
                let mut absorb = |c: GroupExpr, rest: &mut Vec<GroupExpr>| match c {
                    GroupExpr::Free(0) => {}
                    GroupExpr::Free(1) => rank += 1,
                    GroupExpr::FreeAbelian(i) => rank += i,
                    other => rest.push(other),
                };
                for c in cs.iter().map(GroupExpr::canonical) {
                    match c {
                        GroupExpr::DirectProduct(inner) => inner.into_iter().for_each(|x| absorb(x, &mut rest)),
                        other => absorb(other, &mut rest),
                    }
                }
                match rank {
                    0 => {}
                    1 => rest.push(GroupExpr::Free(1)),
                    i => rest.push(GroupExpr::FreeAbelian(i)),
                }
                finish(rest, GroupExpr::DirectProduct)
            }
        }
    }

    /// `χ(F_k) = 1 - k`, `χ(Z^i) = 0`, `χ(A * B) = χA + χB - 1`, `χ(A x B) = χA χB`.
    pub fn euler_characteristic(&self) -> Ratio<i128> {
        match self {
            GroupExpr::FreeAbelian(0) => Ratio::from_integer(1),
            GroupExpr::FreeAbelian(_) => Ratio::from_integer(0),
            GroupExpr::Free(k) => Ratio::from_integer(1 - *k as i128),
            GroupExpr::FreeProduct(cs) => cs
                .iter()
                .fold(Ratio::from_integer(1), |acc, c| acc + c.euler_characteristic() - 1),
            GroupExpr::DirectProduct(cs) => cs
                .iter()
                .fold(Ratio::from_integer(1), |acc, c| acc * c.euler_characteristic()),
        }
    }

    fn render_into(&self, out: &mut String, nested: bool) {
        match self {
            GroupExpr::Free(0) | GroupExpr::FreeAbelian(0) => out.push('1'),
            GroupExpr::Free(1) | GroupExpr::FreeAbelian(1) => out.push('Z'),
            GroupExpr::Free(k) => out.push_str(&format!("F_{k}")),
            GroupExpr::FreeAbelian(i) => out.push_str(&format!("Z^{i}")),
            GroupExpr::FreeProduct(cs) => {
                if nested {
                    out.push('(');
                }
                let mut first = true;
                let mut i = 0;
                while i < cs.len() {
                    let run = cs[i..].iter().take_while(|c| **c == cs[i]).count();
                    if !first {
                        out.push_str(" * ");
                    }
                    first = false;
                    if run > 1 {
                        out.push('(');
                        cs[i].render_into(out, false);
                        out.push_str(&format!(")^{{*{run}}}"));
                    } else {
                        cs[i].render_into(out, true);
                    }
                    i += run;
                }
                if nested {
                    out.push(')');
                }
            }
            GroupExpr::DirectProduct(cs) => {
                if nested {
                    out.push('(');
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" x ");
                    }
                    c.render_into(out, true);
                }
                if nested {
                    out.push(')');
                }
            }
        }
    }
}

fn finish(mut rest: Vec<GroupExpr>, wrap: fn(Vec<GroupExpr>) -> GroupExpr) -> GroupExpr {
    rest.sort();
    match rest.len() {
        0 => GroupExpr::Free(0),
        1 => rest.pop().unwrap(),
        _ => wrap(rest),
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render_into(&mut s, false);
        f.write_str(&s)
    }
}

/// `χ(A_Γ) = Σ_{cliques C} (-1)^{|C|}`, the empty clique included.
pub fn raag_euler_characteristic(g: &SimpleGraph) -> Ratio<i128> {
    fn extend(g: &SimpleGraph, clique: &mut Vec<Vertex>, next: Vertex, acc: &mut i128) {
        *acc += if clique.len() % 2 == 0 { 1 } else { -1 };
        for v in next..g.order() {
            if clique.iter().all(|&u| g.adjacent(u, v)) {
                clique.push(v);
                extend(g, clique, v + 1, acc);
                clique.pop();
            }
        }
    }
    let mut acc = 0;
    extend(g, &mut Vec::new(), 0, &mut acc);
    Ratio::from_integer(acc)
}

/// The RAAG of a cograph as a product expression.
pub fn cograph_expr(g: &SimpleGraph) -> std::result::Result<GroupExpr, P4Witness> {
    fn walk(t: &Cotree) -> GroupExpr {
        match t {
            Cotree::Leaf(_) => GroupExpr::z(),
            Cotree::Union(cs) => GroupExpr::FreeProduct(cs.iter().map(walk).collect()),
            Cotree::Join(cs) => GroupExpr::DirectProduct(cs.iter().map(walk).collect()),
        }
    }
    if g.order() == 0 {
        return Ok(GroupExpr::Free(0));
    }
    Ok(walk(&g.cograph_decompose()?).canonical())
}

/// A homomorphism from `A_Γ` onto a finite group, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteQuotientSpec {
    /// `images[v]` is a residue vector over `moduli`.
    Abelian { moduli: Vec<u64>, images: Vec<Vec<i64>> },
    /// `Z_p ⋊ Z_d` with `1 ∈ Z_d` acting by `x -> m x`, `m = g^{(p-1)/d}` for a
    /// primitive root `g`. `to_cyclic` sends `cyclic_vertex` to the generator
    /// of `Z_d`, `prime_vertex` to the generator of `Z_p`, the rest to 0.
    Metacyclic { p: u64, d: u64, cyclic_vertex: Vertex, prime_vertex: Vertex },
}

impl FiniteQuotientSpec {
    /// `v -> 1 ∈ Z_{r_v}` into `∏ Z_{r_v}`.
    pub fn residues(residues: &[u64]) -> Self {
        let n = residues.len();
        FiniteQuotientSpec::Abelian {
            moduli: residues.to_vec(),
            images: (0..n).map(|v| (0..n).map(|u| i64::from(u == v)).collect()).collect(),
        }
    }

    /// `v -> 1 ∈ Z_d`, all other generators to 0.
    pub fn cyclic(n: usize, v: Vertex, d: u64) -> Self {
        FiniteQuotientSpec::Abelian {
            moduli: vec![d],
            images: (0..n).map(|u| vec![i64::from(u == v)]).collect(),
        }
    }

    fn validate(&self, g: &SimpleGraph) -> Result<()> {
        match self {
            FiniteQuotientSpec::Abelian { moduli, images } => {
                if moduli.iter().any(|&m| m == 0) {
                    return Err(Error::InvalidArgument("moduli must be positive".into()));
                }
                if images.len() != g.order() || images.iter().any(|i| i.len() != moduli.len()) {
                    return Err(Error::InvalidArgument("one residue vector per generator expected".into()));
                }
                Ok(())
            }
            FiniteQuotientSpec::Metacyclic {
                p,
                d,
                cyclic_vertex,
                prime_vertex,
            } => {
                g.check_vertex(*cyclic_vertex)?;
                g.check_vertex(*prime_vertex)?;
                if !is_prime(*p) || *d == 0 || (p - 1) % d != 0 {
                    return Err(Error::InvalidArgument(format!("need a prime p ≡ 1 mod d, got p={p}, d={d}")));
                }
                if cyclic_vertex == prime_vertex {
                    return Err(Error::InvalidArgument("the two distinguished vertices must differ".into()));
                }
                Ok(())
            }
        }
    }

    fn multiplier(p: u64, d: u64) -> u64 {
        let g = primitive_root(p);
        mod_pow(g, (p - 1) / d, p)
    }

    fn identity(&self) -> Vec<i64> {
        match self {
            FiniteQuotientSpec::Abelian { moduli, .. } => vec![0; moduli.len()],
            FiniteQuotientSpec::Metacyclic { .. } => vec![0, 0],
        }
    }

    fn image(&self, v: Vertex) -> Vec<i64> {
        match self {
            FiniteQuotientSpec::Abelian { moduli, images } => images[v]
                .iter()
                .zip(moduli)
                .map(|(x, &m)| x.rem_euclid(m as i64))
                .collect(),
            FiniteQuotientSpec::Metacyclic {
                cyclic_vertex,
                prime_vertex,
                ..
            } => {
                if v == *cyclic_vertex {
                    vec![0, 1]
                } else if v == *prime_vertex {
                    vec![1, 0]
                } else {
                    vec![0, 0]
                }
            }
        }
    }

    fn mul(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        match self {
            FiniteQuotientSpec::Abelian { moduli, .. } => x
                .iter()
                .zip(y)
                .zip(moduli)
                .map(|((a, b), &m)| (a + b).rem_euclid(m as i64))
                .collect(),
            FiniteQuotientSpec::Metacyclic { p, d, .. } => {
                // (a, b)(a', b') = (a + m^b a', b + b')
                let m = Self::multiplier(*p, *d);
                let twist = mod_pow(m, x[1] as u64, *p) as i64;
                vec![(x[0] + twist * y[0]).rem_euclid(*p as i64), (x[1] + y[1]).rem_euclid(*d as i64)]
            }
        }
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let phi = p - 1;
    let factors: Vec<u64> = (2..=phi).filter(|&q| is_prime(q) && phi % q == 0).collect();
    (2..p)
        .find(|&g| factors.iter().all(|&q| mod_pow(g, phi / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Generators with relators as letter lists over generator indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<Letter>>,
}

impl Presentation {
    pub fn render_relator(&self, r: &[Letter]) -> String {
        if r.is_empty() {
            return "1".into();
        }
        r.iter()
            .map(|l| {
                let n = &self.generators[l.vertex];
                if l.inverse {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn cyclic_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == w[w.len() - 1].inv() {
        w.pop();
        w.remove(0);
    }
    w
}

/// Kernel presentation with its index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelPresentation {
    pub presentation: Presentation,
    pub index: usize,
}

/// Cosets are found breadth first from the identity, multiplying by the
/// generators in input order; the Schreier generators on tree edges are
/// trivial and omitted.
pub fn reidemeister_schreier(g: &SimpleGraph, q: &FiniteQuotientSpec, bound: usize) -> Result<KernelPresentation> {
    q.validate(g)?;
    let n = g.order();
    for (u, v) in g.edges() {
        let (a, b) = (q.image(u), q.image(v));
        if q.mul(&a, &b) != q.mul(&b, &a) {
            return Err(Error::InvalidArgument(format!(
                "images of adjacent {} and {} do not commute",
                g.name(u),
                g.name(v)
            )));
        }
    }
    let images: Vec<Vec<i64>> = (0..n).map(|v| q.image(v)).collect();
    let mut index_of: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut cosets = vec![q.identity()];
    let mut tree_parent: Vec<Option<(usize, Vertex)>> = vec![None];
    index_of.insert(q.identity(), 0);
    let mut act: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        let mut row = Vec::with_capacity(n);
        for (x, img) in images.iter().enumerate() {
            let y = q.mul(&cosets[c], img);
            let k = match index_of.get(&y) {
                Some(&k) => k,
                None => {
                    let k = cosets.len();
                    if k >= bound {
                        return Err(Error::BoundExceeded {
                            what: "quotient order",
                            actual: k + 1,
                            bound,
                        });
                    }
                    index_of.insert(y.clone(), k);
                    cosets.push(y);
                    tree_parent.push(Some((c, x)));
                    queue.push_back(k);
                    k
                }
            };
            row.push(k);
        }
        act.push(row);
    }
    let index = cosets.len();
    let mut inv_act = vec![vec![0; n]; index];
    for c in 0..index {
        for x in 0..n {
            inv_act[act[c][x]][x] = c;
        }
    }
    // Schreier symbol (c, x) stands for t_c x t_{cx}^-1.
    let mut symbol: HashMap<(usize, Vertex), usize> = HashMap::new();
    let mut generators = Vec::new();
    for c in 0..index {
        for x in 0..n {
            if tree_parent[act[c][x]] == Some((c, x)) {
                continue;
            }
            symbol.insert((c, x), generators.len());
            generators.push(format!("{}_{}", g.name(x), c));
        }
    }
    let mut relators = Vec::new();
    for (u, v) in g.edges() {
        let rel = [Letter::pos(u), Letter::pos(v), Letter::neg(u), Letter::neg(v)];
        for start in 0..index {
            let mut k = start;
            let mut word = Vec::new();
            for l in rel {
                let (from, next) = if l.inverse {
                    let prev = inv_act[k][l.vertex];
                    (prev, prev)
                } else {
                    (k, act[k][l.vertex])
                };
                if let Some(&s) = symbol.get(&(from, l.vertex)) {
                    word.push(Letter {
                        vertex: s,
                        inverse: l.inverse,
                    });
                }
                k = next;
            }
            let word = free_reduce(&word);
            if !word.is_empty() {
                relators.push(word);
            }
        }
    }
    Ok(KernelPresentation {
        presentation: Presentation { generators, relators },
        index,
    })
}

/// Replace every occurrence of generator `x` by `w` and cyclically reduce.
fn substitute(relators: &mut [Vec<Letter>], x: usize, w: &[Letter]) {
    let w_inv: Vec<Letter> = w.iter().rev().map(|l| l.inv()).collect();
    for rel in relators.iter_mut() {
        if rel.iter().all(|l| l.vertex != x) {
            continue;
        }
        let mut out = Vec::with_capacity(rel.len() + w.len());
        for &l in rel.iter() {
            match (l.vertex == x, l.inverse) {
                (false, _) => out.push(l),
                (true, false) => out.extend_from_slice(w),
                (true, true) => out.extend_from_slice(&w_inv),
            }
        }
        *rel = cyclic_reduce(&out);
    }
}

fn occurrences(r: &[Letter], x: usize) -> usize {
    r.iter().filter(|l| l.vertex == x).count()
}

fn is_generator_commutator(r: &[Letter]) -> bool {
    r.len() == 4 && r[2] == r[0].inv() && r[3] == r[1].inv() && r[0].vertex != r[1].vertex
}

/// Split a cyclic rotation of `r` as `U V U^-1 V^-1`.
fn commutator_split(r: &[Letter]) -> Option<(Vec<Letter>, Vec<Letter>)> {
    let n = r.len();
    if n % 2 != 0 || n < 4 {
        return None;
    }
    let m = n / 2;
    for k in 0..n {
        let rot: Vec<Letter> = r[k..].iter().chain(&r[..k]).copied().collect();
        for u in 1..m {
            let (uu, vv) = (&rot[..u], &rot[u..m]);
            let back = rot[m..m + u].iter().rev().zip(uu).all(|(a, b)| *a == b.inv())
                && rot[m + u..].iter().rev().zip(vv).all(|(a, b)| *a == b.inv());
            if back {
                return Some((uu.to_vec(), vv.to_vec()));
            }
        }
    }
    None
}

/// Tietze elimination: some generator occurs once in a relator, so the
/// relator defines it in terms of the others.
fn eliminate_once(relators: &mut Vec<Vec<Letter>>, alive: &mut [bool]) -> bool {
    let mut total = vec![0usize; alive.len()];
    for l in relators.iter().flatten() {
        total[l.vertex] += 1;
    }
    let mut best: Option<((usize, usize), usize, usize)> = None;
    let mut local = vec![0usize; alive.len()];
    for (i, r) in relators.iter().enumerate() {
        for l in r {
            local[l.vertex] += 1;
        }
        for (pos, l) in r.iter().enumerate() {
            if local[l.vertex] == 1 {
                let key = (r.len(), total[l.vertex]);
                if best.map_or(true, |(b, _, _)| key < b) {
                    best = Some((key, i, pos));
                }
            }
        }
        for l in r {
            local[l.vertex] = 0;
        }
    }
    let Some((_, i, pos)) = best else { return false };
    let r = relators.swap_remove(i);
    let x = r[pos];
    // x S = 1 with S the rest of the rotation, so x = S^-1.
    let rest: Vec<Letter> = r[pos + 1..].iter().chain(&r[..pos]).copied().collect();
    let mut value: Vec<Letter> = rest.iter().rev().map(|l| l.inv()).collect();
    if x.inverse {
        value = value.iter().rev().map(|l| l.inv()).collect();
    }
    alive[x.vertex] = false;
    substitute(relators, x.vertex, &value);
    true
}

/// Nielsen move: in a relator `[U, V]` with `|V| > 1`, a generator `z`
/// occurring once in `V` and not in `U` is traded for `V` itself.
fn straighten_commutator(relators: &mut [Vec<Letter>]) -> bool {
    for i in 0..relators.len() {
        if is_generator_commutator(&relators[i]) {
            continue;
        }
        let Some((u, v)) = commutator_split(&relators[i]) else { continue };
        for (w, other) in [(&v, &u), (&u, &v)] {
            if w.len() < 2 {
                continue;
            }
            let candidate = w
                .iter()
                .enumerate()
                .filter(|(_, l)| occurrences(w, l.vertex) == 1 && occurrences(other, l.vertex) == 0)
                .min_by_key(|(_, l)| relators.iter().map(|r| occurrences(r, l.vertex)).sum::<usize>());
            let Some((pos, &z)) = candidate else { continue };
            // W = P z^e S; the new z is W, so z^e = P^-1 z S^-1.
            let p_inv = w[..pos].iter().rev().map(|l| l.inv());
            let s_inv = w[pos + 1..].iter().rev().map(|l| l.inv());
            let mut value: Vec<Letter> = p_inv.chain([Letter::pos(z.vertex)]).chain(s_inv).collect();
            if z.inverse {
                value = value.iter().rev().map(|l| l.inv()).collect();
            }
            substitute(relators, z.vertex, &value);
            return true;
        }
    }
    false
}

/// Replace each unsettled relator by its shortest rotation in normal form
/// over the commutations already found, dropping those that vanish.
fn reduce_modulo_settled(relators: &mut Vec<Vec<Letter>>, n_gens: usize) -> bool {
    let edges: BTreeSet<(usize, usize)> = relators
        .iter()
        .filter(|r| is_generator_commutator(r))
        .map(|r| (r[0].vertex.min(r[1].vertex), r[0].vertex.max(r[1].vertex)))
        .collect();
    if edges.is_empty() {
        return false;
    }
    let names = (0..n_gens).map(|i| i.to_string()).collect();
    let Ok(settled) = SimpleGraph::from_indices(names, &edges.into_iter().collect::<Vec<_>>()) else {
        return false;
    };
    let mut changed = false;
    for r in relators.iter_mut().filter(|r| !is_generator_commutator(r)) {
        let best = (0..r.len())
            .map(|k| {
                let rot: Vec<Letter> = r[k..].iter().chain(&r[..k]).copied().collect();
                cyclic_reduce(&nf(&settled, &Word(rot)).0)
            })
            .min_by_key(Vec::len)
            .unwrap_or_default();
        if best.len() < r.len() {
            *r = best;
            changed = true;
        }
    }
    relators.retain(|r| !r.is_empty());
    changed
}

type Move = (usize, Vec<Letter>);

/// Elementary Nielsen moves suggested by adjacent letters `p q` of unsettled
/// relators: `p -> p q^-1` and `q -> p^-1 q`, each cancelling the pair.
fn candidate_moves(relators: &[Vec<Letter>]) -> Vec<Move> {
    let mut moves = BTreeSet::new();
    for r in relators.iter().filter(|r| !is_generator_commutator(r)) {
        for k in 0..r.len() {
            let (p, q) = (r[k], r[(k + 1) % r.len()]);
            if p.vertex == q.vertex {
                continue;
            }
            // Values for the positive generator after the move.
            let on_p = if p.inverse { vec![q, Letter::pos(p.vertex)] } else { vec![Letter::pos(p.vertex), q.inv()] };
            let on_q = if q.inverse { vec![Letter::pos(q.vertex), p] } else { vec![p.inv(), Letter::pos(q.vertex)] };
            moves.insert((p.vertex, on_p));
            moves.insert((q.vertex, on_q));
        }
    }
    moves.into_iter().collect()
}

fn total_length(relators: &[Vec<Letter>]) -> usize {
    relators.iter().map(Vec::len).sum()
}

/// Greedy Nielsen reduction with one step of lookahead: apply the move (or
/// pair of moves, the first not lengthening) that shortens the relators most.
/// Moves only touch relators containing the moved generator.
fn nielsen_shorten(relators: &mut [Vec<Letter>]) -> bool {
    let involved: BTreeSet<usize> = relators
        .iter()
        .filter(|r| !is_generator_commutator(r))
        .flatten()
        .map(|l| l.vertex)
        .collect();
    if involved.is_empty() {
        return false;
    }
    // Work on the relators sharing a generator with an unsettled one.
    let idx: Vec<usize> = (0..relators.len())
        .filter(|&i| relators[i].iter().any(|l| involved.contains(&l.vertex)))
        .collect();
    let local: Vec<Vec<Letter>> = idx.iter().map(|&i| relators[i].clone()).collect();
    let before = total_length(&local);
    let mut best: Option<(usize, Vec<Move>)> = None;
    for m1 in candidate_moves(&local) {
        let mut one = local.clone();
        substitute(&mut one, m1.0, &m1.1);
        let len1 = total_length(&one);
        if len1 < before && best.as_ref().map_or(true, |(b, _)| len1 < *b) {
            best = Some((len1, vec![m1.clone()]));
        }
        if len1 > before || best.is_some() {
            continue;
        }
        for m2 in candidate_moves(&one) {
            let mut two = one.clone();
            substitute(&mut two, m2.0, &m2.1);
            let len2 = total_length(&two);
            if len2 < before && best.as_ref().map_or(true, |(b, _)| len2 < *b) {
                best = Some((len2, vec![m1.clone(), m2]));
            }
        }
    }
    let Some((_, moves)) = best else { return false };
    for (x, value) in moves {
        substitute(relators, x, &value);
    }
    true
}

/// Moves that collapse a cyclic subword `A z^e B` of an unsettled relator,
/// with `z` occurring once in it, to the single letter `z^e`.
fn segment_moves(relators: &[Vec<Letter>]) -> Vec<Move> {
    let mut moves = BTreeSet::new();
    for r in relators.iter().filter(|r| !is_generator_commutator(r)) {
        let n = r.len();
        for start in 0..n {
            for len in 2..n {
                let seg: Vec<Letter> = (0..len).map(|i| r[(start + i) % n]).collect();
                for (pos, z) in seg.iter().enumerate() {
                    if occurrences(&seg, z.vertex) != 1 {
                        continue;
                    }
                    let a_inv = seg[..pos].iter().rev().map(|l| l.inv());
                    let b_inv = seg[pos + 1..].iter().rev().map(|l| l.inv());
                    let mut value: Vec<Letter> = a_inv.chain([Letter::pos(z.vertex)]).chain(b_inv).collect();
                    if z.inverse {
                        value = value.iter().rev().map(|l| l.inv()).collect();
                    }
                    moves.insert((z.vertex, value));
                }
            }
        }
    }
    moves.into_iter().collect()
}

/// Fallback for plateaus of `nielsen_shorten`: two segment moves, scored by
/// length after reduction over the settled commutations.
fn segment_shorten(relators: &mut Vec<Vec<Letter>>, n_gens: usize) -> bool {
    let score = |rels: &[Vec<Letter>], m: &Move| {
        let mut next = rels.to_vec();
        substitute(&mut next, m.0, &m.1);
        reduce_modulo_settled(&mut next, n_gens);
        (total_length(&next), next)
    };
    let before = total_length(relators);
    let mut best: Option<(usize, Vec<Vec<Letter>>)> = None;
    for m1 in segment_moves(relators) {
        let (len1, one) = score(relators, &m1);
        if len1 < before {
            if best.as_ref().map_or(true, |(b, _)| len1 < *b) {
                best = Some((len1, one));
            }
            continue;
        }
        if len1 > before || best.is_some() {
            continue;
        }
        for m2 in segment_moves(&one) {
            let (len2, two) = score(&one, &m2);
            if len2 < before && best.as_ref().map_or(true, |(b, _)| len2 < *b) {
                best = Some((len2, two));
            }
        }
    }
    let Some((_, next)) = best else { return false };
    *relators = next;
    true
}

/// Simplify by Tietze eliminations and Nielsen moves until every relator is a
/// commutator of two generators; give up otherwise. Only free-basis changes
/// and eliminations are used, so a returned graph always defines a group
/// isomorphic to the presented one.
pub fn recognize_raag(p: &Presentation) -> Option<SimpleGraph> {
    const MAX_STEPS: usize = 10_000;
    let mut alive = vec![true; p.generators.len()];
    let mut relators: Vec<Vec<Letter>> = p.relators.iter().map(|r| cyclic_reduce(r)).collect();
    for _ in 0..MAX_STEPS {
        relators.retain(|r| !r.is_empty());
        if eliminate_once(&mut relators, &mut alive)
            || reduce_modulo_settled(&mut relators, alive.len())
            || nielsen_shorten(&mut relators)
            || segment_shorten(&mut relators, alive.len())
        {
            continue;
        }
        if !straighten_commutator(&mut relators) {
            break;
        }
    }
    let keep: Vec<usize> = (0..alive.len()).filter(|&i| alive[i]).collect();
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut edges = BTreeSet::new();
    for r in &relators {
        if !is_generator_commutator(r) {
            return None;
        }
        let (a, b) = (pos[&r[0].vertex], pos[&r[1].vertex]);
        edges.insert((a.min(b), a.max(b)));
    }
    let names = keep.iter().map(|&i| p.generators[i].clone()).collect();
    SimpleGraph::from_indices(names, &edges.into_iter().collect::<Vec<_>>()).ok()
}

/// `N1^{*a2} * N2^{*a1} * F_{(a1-1)(a2-1)}`.
pub fn kernel_structure_free_product(n1: &GroupExpr, n2: &GroupExpr, a1: u64, a2: u64) -> GroupExpr {
    let mut parts = vec![n1.clone(); a2 as usize];
    parts.extend(std::iter::repeat(n2.clone()).take(a1 as usize));
    parts.push(GroupExpr::Free((a1 - 1) * (a2 - 1)));
    GroupExpr::FreeProduct(parts).canonical()
}

/// Kernel of `A_Γ -> ∏ Z_{r_v}` over the cotree, with its index.
pub fn kernel_structure_cograph(g: &SimpleGraph, residues: &[u64]) -> Result<std::result::Result<(GroupExpr, u64), P4Witness>> {
    if residues.len() != g.order() || residues.iter().any(|&r| r == 0) {
        return Err(Error::InvalidArgument("one positive residue per vertex expected".into()));
    }
    fn walk(t: &Cotree, r: &[u64]) -> (GroupExpr, u64) {
        match t {
            Cotree::Leaf(v) => (GroupExpr::z(), r[*v]),
            Cotree::Union(cs) => {
                let mut it = cs.iter().map(|c| walk(c, r));
                let first = it.next().expect("unions have children");
                it.fold(first, |(n1, a1), (n2, a2)| (kernel_structure_free_product(&n1, &n2, a1, a2), a1 * a2))
            }
            Cotree::Join(cs) => {
                let parts: Vec<(GroupExpr, u64)> = cs.iter().map(|c| walk(c, r)).collect();
                let index = parts.iter().map(|p| p.1).product();
                (GroupExpr::DirectProduct(parts.into_iter().map(|p| p.0).collect()).canonical(), index)
            }
        }
    }
    Ok(g.cograph_decompose().map(|t| walk(&t, residues)))
}

/// Whether `ker(A_Γ -> ∏ Z_{r_v})` is characteristic: its image `⊕ r_v Z` in
/// the abelianisation must be preserved by every Laurence–Servatius
/// generator. Returns the first generator that moves it.
pub fn is_characteristic_kernel(
    g: &SimpleGraph,
    residues: &[u64],
    aut_bound: usize,
) -> Result<Option<crate::automorphism::LSGenerator>> {
    if residues.len() != g.order() || residues.iter().any(|&r| r == 0) {
        return Err(Error::InvalidArgument("one positive residue per vertex expected".into()));
    }
    for gen in crate::automorphism::ls_generators(g, aut_bound)? {
        let m = crate::lift::abelianization_matrix(g, &gen.endomorphism(g))?;
        let moved = (0..g.order()).any(|u| {
            (0..g.order()).any(|v| (residues[u] as i64 * m.get(v, u)).rem_euclid(residues[v] as i64) != 0)
        });
        if moved {
            return Ok(Some(gen));
        }
    }
    Ok(None)
}

/// Target graph `Γ^d_{st(v)}` and the least prime `p ≡ 1 (mod d)`.
pub fn virtual_embed_target(g: &SimpleGraph, v: Vertex, d: usize) -> Result<(SimpleGraph, u64)> {
    g.check_vertex(v)?;
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let target = g.amalgam(&g.st(v), d)?;
    let p = (2u64..).find(|&p| is_prime(p) && (p - 1) % d as u64 == 0).expect("Dirichlet");
    Ok((target, p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideCondition {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingTarget {
    pub source: GroupExpr,
    pub target: GroupExpr,
    pub conditions: Vec<SideCondition>,
}

impl EmbeddingTarget {
    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }
}

/// Group factors given as `(rank, residue)` pairs into `rank -> (count, residue)`.
fn tally(factors: &[(u64, u64)], min_rank: u64) -> Result<BTreeMap<u64, (u64, u64)>> {
    let mut out: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for &(i, r) in factors {
        if i < min_rank || r == 0 {
            return Err(Error::InvalidArgument(format!(
                "factor {i}:{r} needs rank >= {min_rank} and positive residue"
            )));
        }
        let e = out.entry(i).or_insert((0, r));
        if e.1 != r {
            return Err(Error::InvalidArgument(format!("conflicting residues for rank {i}")));
        }
        e.0 += 1;
    }
    Ok(out)
}

fn gcd_all(xs: impl IntoIterator<Item = u64>) -> u64 {
    xs.into_iter().fold(0, |a, b| a.gcd(&b))
}

/// Free products of free abelian groups: each factor `Z^i` is given as
/// `(i, r_i)`. The kernel of `A_Γ -> ∏ (Z_{r_i}^i)^{e_i}` is
/// `F_f * *_i (Z^i)^{*c_i}` with `R = ∏ r_i^{i e_i}`, `E = Σ e_i`,
/// `c_i = e_i R / r_i^i` and `f = (E - 1) R - Σ c_i + 1`.
pub fn embed_target_fpa(factors: &[(u64, u64)]) -> Result<EmbeddingTarget> {
    let t = tally(factors, 1)?;
    if t.is_empty() {
        return Err(Error::InvalidArgument("at least one factor expected".into()));
    }
    let big_r: u64 = t.iter().map(|(&i, &(e, r))| r.pow((i * e) as u32)).product();
    let big_e: u64 = t.values().map(|&(e, _)| e).sum();
    let mut parts = Vec::new();
    let mut abelian_total = 0;
    for (&i, &(e, r)) in &t {
        let c = e * big_r / r.pow(i as u32);
        abelian_total += c;
        parts.extend(std::iter::repeat(GroupExpr::FreeAbelian(i)).take(c as usize));
    }
    parts.push(GroupExpr::Free((big_e - 1) * big_r + 1 - abelian_total));
    let target = GroupExpr::FreeProduct(parts).canonical();
    let source = GroupExpr::FreeProduct(
        t.iter()
            .flat_map(|(&i, &(e, _))| std::iter::repeat(GroupExpr::FreeAbelian(i)).take(e as usize))
            .collect(),
    )
    .canonical();

    let mut conditions = Vec::new();
    if let Some(&(_, r1)) = t.get(&1) {
        conditions.push(SideCondition {
            name: format!("gcd(E-1, r_1) = gcd({}, {r1}) = 1", big_e - 1),
            holds: (big_e - 1).gcd(&r1) == 1,
        });
        for (&i, &(_, r)) in t.iter().filter(|(&i, _)| i > 1) {
            conditions.push(SideCondition {
                name: format!("r_{i} = {r} divides r_1 = {r1}"),
                holds: r1 % r == 0,
            });
        }
    } else {
        for (&i, &(e_i, r_i)) in &t {
            let g = gcd_all(t.iter().map(|(&j, &(e_j, _))| if j == i { e_i - 1 } else { e_j }).chain([r_i]));
            conditions.push(SideCondition {
                name: format!("gcd(e_j with e_{i} - 1, r_{i}) = {g} = 1"),
                holds: g == 1,
            });
        }
    }
    Ok(EmbeddingTarget {
        source,
        target,
        conditions,
    })
}

/// Direct products of free groups: each factor `F_i` (`i >= 2`) is given as
/// `(i, r_i)` and maps to `F_{r_i^i (i - 1) + 1}`.
pub fn embed_target_dpf(factors: &[(u64, u64)]) -> Result<EmbeddingTarget> {
    let t = tally(factors, 2)?;
    if t.is_empty() {
        return Err(Error::InvalidArgument("at least one factor expected".into()));
    }
    let mut source = Vec::new();
    let mut target = Vec::new();
    let mut conditions = Vec::new();
    for (&i, &(e, r)) in &t {
        source.extend(std::iter::repeat(GroupExpr::Free(i)).take(e as usize));
        target.extend(std::iter::repeat(GroupExpr::Free(r.pow(i as u32) * (i - 1) + 1)).take(e as usize));
        conditions.push(SideCondition {
            name: format!("gcd({}, r_{i} = {r}) = 1", i - 1),
            holds: (i - 1).gcd(&r) == 1,
        });
    }
    Ok(EmbeddingTarget {
        source: GroupExpr::DirectProduct(source).canonical(),
        target: GroupExpr::DirectProduct(target).canonical(),
        conditions,
    })
}

/// Disjoint union of cliques realising `*_i (Z^i)^{*e_i}`, with one residue per vertex.
pub fn clique_union(factors: &[(u64, u64)]) -> (SimpleGraph, Vec<u64>) {
    let mut names = Vec::new();
    let mut edges = Vec::new();
    let mut residues = Vec::new();
    for (k, &(i, r)) in factors.iter().enumerate() {
        let base = names.len();
        for j in 0..i as usize {
            names.push(format!("c{k}_{j}"));
            residues.push(r);
            for l in 0..j {
                edges.push((base + l, base + j));
            }
        }
    }
    (SimpleGraph::from_indices(names, &edges).expect("fresh names"), residues)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(cs: Vec<GroupExpr>) -> GroupExpr {
        GroupExpr::FreeProduct(cs).canonical()
    }

    #[test]
    fn canonical_rendering() {
        let e = fp(vec![GroupExpr::Free(3), GroupExpr::FreeAbelian(2), GroupExpr::z(), GroupExpr::FreeAbelian(2)]);
        assert_eq!(e.to_string(), "(Z^2)^{*2} * F_4");
        let d = GroupExpr::DirectProduct(vec![GroupExpr::Free(5), GroupExpr::Free(5)]).canonical();
        assert_eq!(d.to_string(), "F_5 x F_5");
        assert_eq!(GroupExpr::DirectProduct(vec![GroupExpr::z(), GroupExpr::z()]).canonical().to_string(), "Z^2");
        assert_eq!(fp(vec![GroupExpr::Free(0)]).to_string(), "1");
        assert_eq!(fp(vec![GroupExpr::FreeAbelian(1)]).to_string(), "Z");
        let nested = fp(vec![GroupExpr::FreeProduct(vec![GroupExpr::z(), GroupExpr::FreeAbelian(2)]), GroupExpr::z()]);
        assert_eq!(nested.to_string(), "Z^2 * F_2");
        let mixed = fp(vec![d.clone(), GroupExpr::z()]);
        assert_eq!(mixed.to_string(), "Z * (F_5 x F_5)");
    }

    #[test]
    fn euler_examples() {
        assert_eq!(GroupExpr::Free(5).euler_characteristic(), Ratio::from_integer(-4));
        assert_eq!(GroupExpr::FreeAbelian(2).euler_characteristic(), Ratio::from_integer(0));
        let e = fp(vec![GroupExpr::FreeAbelian(2), GroupExpr::FreeAbelian(2), GroupExpr::Free(7)]);
        assert_eq!(e.euler_characteristic(), Ratio::from_integer(-8));
        assert_eq!(raag_euler_characteristic(&SimpleGraph::null(2)), Ratio::from_integer(-1));
        assert_eq!(raag_euler_characteristic(&SimpleGraph::cycle(4)), Ratio::from_integer(1));
    }

    fn rs_rank(n: usize, residues: &[u64]) -> usize {
        let g = SimpleGraph::null(n);
        let k = reidemeister_schreier(&g, &FiniteQuotientSpec::residues(residues), 512).unwrap();
        assert!(k.presentation.relators.is_empty());
        k.presentation.generators.len()
    }

    #[test]
    fn free_kernel_ranks() {
        let g = SimpleGraph::null(2);
        let k = reidemeister_schreier(&g, &FiniteQuotientSpec::cyclic(2, 0, 3), 512).unwrap();
        assert_eq!(k.presentation.generators.len(), 4);
        assert_eq!(rs_rank(2, &[2, 2]), 5);
        assert_eq!(rs_rank(2, &[3, 3]), 10);
        assert_eq!(rs_rank(3, &[2, 2, 2]), 17);
    }

    #[test]
    fn abelian_kernel_of_z2() {
        let k2 = SimpleGraph::complete(2);
        let k = reidemeister_schreier(&k2, &FiniteQuotientSpec::cyclic(2, 0, 2), 512).unwrap();
        let g = recognize_raag(&k.presentation).unwrap();
        assert!(g.is_isomorphic(&SimpleGraph::complete(2), 10).unwrap());
        let k = reidemeister_schreier(&k2, &FiniteQuotientSpec::residues(&[2, 2]), 512).unwrap();
        let g = recognize_raag(&k.presentation).unwrap();
        assert!(g.is_isomorphic(&SimpleGraph::complete(2), 10).unwrap());
    }

    #[test]
    fn recognition() {
        let g = SimpleGraph::null(2);
        let k = reidemeister_schreier(&g, &FiniteQuotientSpec::cyclic(2, 0, 3), 512).unwrap();
        assert!(recognize_raag(&k.presentation).unwrap().is_isomorphic(&SimpleGraph::null(4), 10).unwrap());
        let bad = Presentation {
            generators: vec!["a".into(), "b".into()],
            relators: vec![vec![Letter::pos(0), Letter::pos(1), Letter::pos(0), Letter::neg(1), Letter::pos(0)]],
        };
        assert!(recognize_raag(&bad).is_none());
    }

    #[test]
    fn metacyclic_quotient_on_path() {
        let p3 = SimpleGraph::path(3);
        // v = a, w = c (outside st(a))
        let q = FiniteQuotientSpec::Metacyclic {
            p: 7,
            d: 3,
            cyclic_vertex: 0,
            prime_vertex: 2,
        };
        let k = reidemeister_schreier(&p3, &q, 512).unwrap();
        assert_eq!(k.index, 21);
        let composite = reidemeister_schreier(&p3, &FiniteQuotientSpec::cyclic(3, 0, 3), 512).unwrap();
        let got = recognize_raag(&composite.presentation).unwrap();
        let (target, p) = virtual_embed_target(&p3, 0, 3).unwrap();
        assert_eq!(p, 7);
        assert!(got.is_isomorphic(&target, 12).unwrap());
    }

    #[test]
    fn metacyclic_relators_checked() {
        let k2 = SimpleGraph::complete(2);
        let q = FiniteQuotientSpec::Metacyclic {
            p: 3,
            d: 2,
            cyclic_vertex: 0,
            prime_vertex: 1,
        };
        assert!(reidemeister_schreier(&k2, &q, 512).is_err());
    }

    #[test]
    fn free_product_kernels() {
        assert_eq!(kernel_structure_free_product(&GroupExpr::z(), &GroupExpr::z(), 2, 2), GroupExpr::Free(5));
        let e = kernel_structure_free_product(&GroupExpr::FreeAbelian(2), &GroupExpr::z(), 2, 4);
        assert_eq!(e.to_string(), "(Z^2)^{*4} * F_5");
        let e = kernel_structure_free_product(&GroupExpr::FreeAbelian(2), &GroupExpr::z(), 1, 3);
        assert_eq!(e.to_string(), "(Z^2)^{*3} * Z");
    }

    #[test]
    fn cograph_kernels() {
        let k = kernel_structure_cograph(&SimpleGraph::null(2), &[2, 2]).unwrap().unwrap();
        assert_eq!(k, (GroupExpr::Free(5), 4));
        let k = kernel_structure_cograph(&SimpleGraph::cycle(4), &[2; 4]).unwrap().unwrap();
        assert_eq!(k.0.to_string(), "F_5 x F_5");
        assert!(kernel_structure_cograph(&SimpleGraph::path(4), &[2; 4]).unwrap().is_err());
        let k = kernel_structure_cograph(&SimpleGraph::null(3), &[3; 3]).unwrap().unwrap();
        assert_eq!(k.0, GroupExpr::Free(27 * 2 + 1));
    }

    #[test]
    fn characteristic_examples() {
        assert!(is_characteristic_kernel(&SimpleGraph::null(2), &[2, 2], 10).unwrap().is_none());
        let (g, _) = clique_union(&[(2, 2), (1, 2)]);
        assert!(is_characteristic_kernel(&g, &[2, 2, 2], 10).unwrap().is_none());
        let w = is_characteristic_kernel(&g, &[2, 2, 3], 10).unwrap();
        assert!(matches!(w, Some(crate::automorphism::LSGenerator::Transvection { .. })));
    }

    #[test]
    fn virtual_targets() {
        let (t, p) = virtual_embed_target(&SimpleGraph::null(3), 0, 3).unwrap();
        assert_eq!(t.order(), 7);
        assert!(t.edges().is_empty());
        assert_eq!(p, 7);
        let (t, p) = virtual_embed_target(&SimpleGraph::path(3), 1, 1).unwrap();
        assert_eq!(t, SimpleGraph::path(3));
        assert_eq!(p, 2);
    }

    #[test]
    fn fpa_examples() {
        let t = embed_target_fpa(&[(2, 2), (1, 2)]).unwrap();
        assert_eq!(t.source.to_string(), "Z^2 * Z");
        assert_eq!(t.target.to_string(), "(Z^2)^{*2} * F_7");
        assert!(t.conditions_hold());
        assert_eq!(embed_target_fpa(&[(2, 3), (1, 3)]).unwrap().target.to_string(), "(Z^2)^{*3} * F_25");
        let t = embed_target_fpa(&[(2, 2), (2, 2)]).unwrap();
        assert_eq!(t.target.to_string(), "(Z^2)^{*8} * F_9");
        assert!(t.conditions_hold());
        let t = embed_target_fpa(&[(2, 3), (1, 3), (1, 3)]).unwrap();
        assert_eq!(t.target.to_string(), "(Z^2)^{*9} * F_154");
        assert!(t.conditions_hold());
        assert!(!embed_target_fpa(&[(1, 2), (1, 2), (1, 2)]).unwrap().conditions_hold());
        assert!(!embed_target_fpa(&[(2, 2), (1, 3)]).unwrap().conditions_hold());
    }

    #[test]
    fn dpf_examples() {
        assert_eq!(embed_target_dpf(&[(2, 2), (2, 2)]).unwrap().target.to_string(), "F_5 x F_5");
        assert_eq!(embed_target_dpf(&[(2, 3), (2, 3)]).unwrap().target.to_string(), "F_10 x F_10");
        let t = embed_target_dpf(&[(2, 3), (3, 3)]).unwrap();
        assert_eq!(t.target.to_string(), "F_10 x F_55");
        assert_eq!(t.source.to_string(), "F_2 x F_3");
        assert!(t.conditions_hold());
        assert!(!embed_target_dpf(&[(3, 2)]).unwrap().conditions_hold());
        assert!(embed_target_dpf(&[(1, 2)]).is_err());
    }

    #[test]
    fn fpa_matches_cograph_kernel() {
        for f in [vec![(2, 2), (1, 2)], vec![(2, 3), (1, 3)], vec![(2, 2), (2, 2)]] {
            let (g, r) = clique_union(&f);
            let (k, _) = kernel_structure_cograph(&g, &r).unwrap().unwrap();
            assert_eq!(k, embed_target_fpa(&f).unwrap().target);
        }
    }
}
