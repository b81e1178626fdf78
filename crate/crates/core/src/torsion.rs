//! Torsion invariants: p-adic valuations and `Z_p`-ranks of automorphism
//! groups, Minkowski's bound, and necessary conditions for embeddings
//! between outer automorphism groups.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::graph::{ClassKind, Permutation, SimpleGraph};
use crate::subgroup::is_prime;

/// Order cap for finite permutation groups.
pub const FINITE_GROUP_BOUND: usize = 10_000;

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// `Σ_{k>=0} ⌊n / (p^k (p - 1))⌋`; also the value for `Aut(F_n)` and `Out(F_n)`.
pub fn nu_p_gl(n: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    let mut total = 0;
    let mut d = p - 1;
    while d <= n {
        total += n / d;
        d *= p;
    }
    Ok(total)
}

/// `⌊n / (p - 1)⌋`.
pub fn rank_p_gl(n: u64, p: u64) -> Result<u64> {
    check_prime(p)?;
    Ok(n / (p - 1))
}

/// `M(n) = ∏_p p^{ν_p(GL(n, Z))}` over primes `p <= n + 1`.
pub fn minkowski(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut m = BigUint::from(1u32);
    for p in (2..=n + 1).filter(|&p| is_prime(p)) {
        m *= BigUint::from(p).pow(nu_p_gl(n, p)? as u32);
    }
    Ok(m)
}

/// Exponent of `p` in `x`.
pub fn valuation(x: &BigUint, p: u64) -> u64 {
    let p = BigUint::from(p);
    let zero = BigUint::from(0u32);
    let mut x = x.clone();
    let mut k = 0;
    if x == zero {
        return 0;
    }
    loop {
        let (q, r) = x.div_rem(&p);
        if r != zero {
            return k;
        }
        x = q;
        k += 1;
    }
}

fn class_sizes(g: &SimpleGraph) -> Vec<u64> {
    g.domination_structure().class_sizes().into_iter().map(|s| s as u64).collect()
}

/// `ν_p` of the pure (outer) automorphism group.
pub fn nu_p_pure(g: &SimpleGraph, p: u64) -> Result<u64> {
    class_sizes(g).into_iter().map(|s| nu_p_gl(s, p)).sum()
}

/// `Z_p`-rank of the pure (outer) automorphism group.
pub fn rank_p_pure(g: &SimpleGraph, p: u64) -> Result<u64> {
    class_sizes(g).into_iter().map(|s| rank_p_gl(s, p)).sum()
}

/// Factor of the product group embedded in the pure automorphism group:
/// `Aut(F_k)` for null classes with more than one vertex, `GL(k, Z)` for the
/// complete ones (singletons included).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassFactor {
    AutFree(u64),
    GeneralLinear(u64),
}

pub fn class_factors(g: &SimpleGraph) -> Vec<ClassFactor> {
    let ds = g.domination_structure();
    ds.classes
        .iter()
        .zip(&ds.kinds)
        .map(|(c, k)| match k {
            ClassKind::Null => ClassFactor::AutFree(c.len() as u64),
            ClassKind::Singleton | ClassKind::Complete => ClassFactor::GeneralLinear(c.len() as u64),
        })
        .collect()
}

/// `ν_p` of the class product, read off the p-part of Minkowski's bound for
/// each factor and added up.
pub fn nu_p_class_product(g: &SimpleGraph, p: u64) -> Result<u64> {
    check_prime(p)?;
    class_factors(g)
        .into_iter()
        .map(|f| {
            let (ClassFactor::AutFree(k) | ClassFactor::GeneralLinear(k)) = f;
            Ok(valuation(&minkowski(k)?, p))
        })
        .sum()
}

/// Closure of a set of permutations under composition.
pub fn permutation_closure(gens: &[Permutation], bound: usize) -> Result<Vec<Permutation>> {
    let n = gens.first().map_or(0, Vec::len);
    if gens.iter().any(|g| g.len() != n) {
        return Err(Error::InvalidArgument("permutations of different degree".into()));
    }
    let id: Permutation = (0..n).collect();
    let mut seen: HashMap<Permutation, usize> = HashMap::from([(id.clone(), 0)]);
    let mut elems = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in gens {
            let x: Permutation = (0..n).map(|v| g[elems[i][v]]).collect();
            if !seen.contains_key(&x) {
                if elems.len() >= bound {
                    return Err(Error::BoundExceeded {
                        what: "finite group order",
                        actual: elems.len() + 1,
                        bound,
                    });
                }
                seen.insert(x.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(x);
            }
        }
    }
    Ok(elems)
}

/// `ν_p` of the group generated by `gens`, via its order.
pub fn nu_p_finite_group(gens: &[Permutation], p: u64) -> Result<u64> {
    check_prime(p)?;
    let order = permutation_closure(gens, FINITE_GROUP_BOUND)?.len();
    Ok(valuation(&BigUint::from(order), p))
}

fn compose_perm(a: &Permutation, b: &Permutation) -> Permutation {
    b.iter().map(|&x| a[x]).collect()
}

/// Largest rank of an elementary abelian p-subgroup, by exhaustive search
/// over commuting order-p elements taken in increasing enumeration order.
pub fn rank_p_finite_group(gens: &[Permutation], p: u64) -> Result<u64> {
    check_prime(p)?;
    let elems = permutation_closure(gens, FINITE_GROUP_BOUND)?;
    let n = elems.first().map_or(0, Vec::len);
    let id: Permutation = (0..n).collect();
    let order_p: Vec<usize> = (1..elems.len())
        .filter(|&i| {
            let mut x = elems[i].clone();
            for _ in 1..p {
                x = compose_perm(&x, &elems[i]);
            }
            x == id
        })
        .collect();
    fn search(
        elems: &[Permutation],
        cands: &[usize],
        from: usize,
        subgroup: &[Permutation],
        gens: &mut Vec<usize>,
        p: u64,
        best: &mut u64,
    ) {
        *best = (*best).max(gens.len() as u64);
        for (ci, &c) in cands.iter().enumerate().skip(from) {
            let x = &elems[c];
            if subgroup.contains(x) || gens.iter().any(|&g| compose_perm(x, &elems[g]) != compose_perm(&elems[g], x)) {
                continue;
            }
            // Extend the subgroup by powers of x.
            let mut bigger = Vec::with_capacity(subgroup.len() * p as usize);
            let mut power = x.clone();
            bigger.extend(subgroup.iter().cloned());
            for _ in 1..p {
                bigger.extend(subgroup.iter().map(|h| compose_perm(&power, h)));
                power = compose_perm(&power, x);
            }
            gens.push(c);
            search(elems, cands, ci + 1, &bigger, gens, p, best);
            gens.pop();
        }
    }
    let mut best = 0;
    search(&elems, &order_p, 0, &[id], &mut Vec::new(), p, &mut best);
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorsionProfile {
    pub p: u64,
    pub outer: bool,
    pub nu: Interval,
    pub rank: Interval,
}

/// Sandwich bounds for `Aut(A_Γ)` (or `Out(A_Γ)` when `outer`): pure values
/// below, pure plus the labelled quotient symmetries (capped by
/// `GL(|V|, Z)`) above.
pub fn full_group_bounds(g: &SimpleGraph, p: u64, outer: bool, bound: usize) -> Result<TorsionProfile> {
    let nu_lo = nu_p_pure(g, p)?;
    let rank_lo = rank_p_pure(g, p)?;
    let q = g.quotient_graph();
    let lab = q.automorphisms(bound)?;
    let n = g.order() as u64;
    let nu_hi = (nu_lo + nu_p_finite_group(&lab, p)?).min(nu_p_gl(n, p)?);
    let rank_hi = (rank_lo + rank_p_finite_group(&lab, p)?).min(rank_p_gl(n, p)?);
    Ok(TorsionProfile {
        p,
        outer,
        nu: Interval { lo: nu_lo, hi: nu_hi },
        rank: Interval {
            lo: rank_lo,
            hi: rank_hi,
        },
    })
}

/// Whether `∏ Z_{q_i}` (each `q_i` a prime power) embeds in `Aut(F_n)`:
/// `Σ (q_i - q_i / p_i) <= n`.
pub fn abelian_fits_aut_fn(prime_powers: &[u64], n: u64) -> Result<bool> {
    let mut total = 0;
    for &q in prime_powers {
        let p = (2..=q).find(|&d| q % d == 0).filter(|_| q >= 2);
        let Some(p) = p else {
            return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
        };
        let mut r = q;
        while r % p == 0 {
            r /= p;
        }
        if r != 1 {
            return Err(Error::InvalidArgument(format!("{q} is not a prime power")));
        }
        total += q - q / p;
    }
    Ok(total <= n)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCheck {
    pub name: &'static str,
    pub blocked: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub checks: Vec<ObstructionCheck>,
}

impl ObstructionReport {
    pub fn blocked(&self) -> bool {
        self.checks.iter().any(|c| c.blocked)
    }

    pub fn violations(&self) -> Vec<&ObstructionCheck> {
        self.checks.iter().filter(|c| c.blocked).collect()
    }
}

/// Necessary conditions for an embedding `Out(A_source) -> Out(A_target)`.
/// Primes up to `|V(target)| + 1` are scanned.
pub fn obstruction_report(source: &SimpleGraph, target: &SimpleGraph, bound: usize) -> Result<ObstructionReport> {
    let (ns, nt) = (source.order(), target.order());
    let mut checks = vec![ObstructionCheck {
        name: "vertex-count",
        blocked: ns > nt,
        detail: format!("|V(source)| = {ns}, |V(target)| = {nt}"),
    }];

    let aut_s = source.automorphisms(bound)?;
    let aut_t = target.automorphisms(bound)?;
    let asym_t = aut_t.len() == 1;
    let asym_s = aut_s.len() == 1;
    checks.push(ObstructionCheck {
        name: "asymmetry",
        blocked: asym_t && !asym_s,
        detail: format!(
            "target {}asymmetric, source {}asymmetric",
            if asym_t { "" } else { "not " },
            if asym_s { "" } else { "not " }
        ),
    });

    let primes: Vec<u64> = (2..=nt as u64 + 1).filter(|&p| is_prime(p)).collect();
    let order_s = BigUint::from(aut_s.len());
    let order_t = BigUint::from(aut_t.len());
    let sizes_t = class_sizes(target);
    let mut graph_sym = None;
    for &p in &primes {
        let (vs, vt) = (valuation(&order_s, p), valuation(&order_t, p));
        if vs > vt && sizes_t.iter().all(|&s| s + 1 < p) {
            graph_sym = Some(format!("p = {p}: ν_p(Aut source graph) = {vs} > {vt}, target classes all below p - 1"));
            break;
        }
    }
    checks.push(ObstructionCheck {
        name: "graph-symmetry",
        blocked: graph_sym.is_some(),
        detail: graph_sym.unwrap_or_else(|| "no prime separates the graph symmetry groups".into()),
    });

    let mut interval = None;
    for &p in &primes {
        let s = full_group_bounds(source, p, true, bound)?;
        let t = full_group_bounds(target, p, true, bound)?;
        if s.nu.lo > t.nu.hi {
            interval = Some(format!("p = {p}: ν_p source >= {} > target <= {}", s.nu.lo, t.nu.hi));
        } else if s.rank.lo > t.rank.hi {
            interval = Some(format!("p = {p}: Z_p-rank source >= {} > target <= {}", s.rank.lo, t.rank.hi));
        }
        if interval.is_some() {
            break;
        }
    }
    checks.push(ObstructionCheck {
        name: "torsion-bounds",
        blocked: interval.is_some(),
        detail: interval.unwrap_or_else(|| "bounds overlap for every scanned prime".into()),
    });
    Ok(ObstructionReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minkowski_values() {
        let v: Vec<u64> = (1..=4).map(|n| minkowski(n).unwrap().try_into().unwrap()).collect();
        assert_eq!(v, vec![2, 24, 48, 5760]);
    }

    #[test]
    fn gl_values() {
        assert_eq!(nu_p_gl(2, 2).unwrap(), 3);
        assert_eq!(rank_p_gl(2, 2).unwrap(), 2);
        assert_eq!(nu_p_gl(2, 3).unwrap(), 1);
        assert!(nu_p_gl(2, 4).is_err());
    }

    #[test]
    fn pure_values() {
        let p3 = SimpleGraph::path(3);
        assert_eq!((nu_p_pure(&p3, 2).unwrap(), rank_p_pure(&p3, 2).unwrap()), (4, 3));
        for n in 1..6 {
            assert_eq!(nu_p_pure(&SimpleGraph::null(n), 2).unwrap(), nu_p_gl(n as u64, 2).unwrap());
        }
        assert_eq!(nu_p_pure(&SimpleGraph::null(1), 2).unwrap(), 1);
        assert_eq!(nu_p_pure(&SimpleGraph::null(1), 3).unwrap(), 0);
    }

    fn s3() -> Vec<Permutation> {
        vec![vec![1, 0, 2], vec![1, 2, 0]]
    }

    #[test]
    fn finite_groups() {
        assert_eq!(nu_p_finite_group(&s3(), 2).unwrap(), 1);
        assert_eq!(nu_p_finite_group(&s3(), 3).unwrap(), 1);
        assert_eq!(nu_p_finite_group(&[vec![0, 1]], 5).unwrap(), 0);
        let klein = vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]];
        assert_eq!(rank_p_finite_group(&klein, 2).unwrap(), 2);
        assert_eq!(rank_p_finite_group(&s3(), 3).unwrap(), 1);
        assert_eq!(rank_p_finite_group(&[vec![1, 2, 3, 0]], 2).unwrap(), 1);
        let s4 = vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]];
        assert_eq!(rank_p_finite_group(&s4, 2).unwrap(), 2);
        assert_eq!(nu_p_finite_group(&s4, 2).unwrap(), 3);
    }

    #[test]
    fn bounds_examples() {
        let b = full_group_bounds(&SimpleGraph::path(3), 2, false, 10).unwrap();
        assert_eq!(b.nu, Interval { lo: 4, hi: 4 });
        let b = full_group_bounds(&SimpleGraph::null(2), 2, false, 10).unwrap();
        assert_eq!(b.nu, Interval { lo: 3, hi: 3 });
        let b = full_group_bounds(&SimpleGraph::cycle(4), 2, false, 10).unwrap();
        assert_eq!(b.nu, Interval { lo: 6, hi: 7 });
    }

    #[test]
    fn abelian_criterion() {
        assert!(abelian_fits_aut_fn(&[4], 2).unwrap());
        assert!(!abelian_fits_aut_fn(&[5], 2).unwrap());
        assert!(abelian_fits_aut_fn(&[2, 2], 2).unwrap());
        assert!(abelian_fits_aut_fn(&[6], 2).is_err());
        assert!(abelian_fits_aut_fn(&[1], 2).is_err());
    }

    fn spider() -> SimpleGraph {
        // legs of length 1, 2, 3 around the centre h
        SimpleGraph::new(
            &["h", "a1", "b1", "b2", "c1", "c2", "c3"],
            &[("h", "a1"), ("h", "b1"), ("b1", "b2"), ("h", "c1"), ("c1", "c2"), ("c2", "c3")],
        )
        .unwrap()
    }

    #[test]
    fn obstruction_examples() {
        let r = obstruction_report(&SimpleGraph::path(3), &SimpleGraph::null(2), 10).unwrap();
        assert!(r.violations().iter().any(|c| c.name == "vertex-count"));
        let t = spider();
        assert_eq!(t.automorphism_count(10).unwrap(), 1);
        let r = obstruction_report(&SimpleGraph::null(2), &t, 10).unwrap();
        assert!(r.violations().iter().any(|c| c.name == "asymmetry"));
        for g in [SimpleGraph::path(3), SimpleGraph::cycle(4), t] {
            assert!(!obstruction_report(&g, &g, 10).unwrap().blocked());
        }
    }

    #[test]
    fn class_product_matches_pure() {
        for g in [SimpleGraph::path(3), SimpleGraph::cycle(4), SimpleGraph::null(4), SimpleGraph::complete(3)] {
            for p in [2, 3, 5] {
                assert_eq!(nu_p_class_product(&g, p).unwrap(), nu_p_pure(&g, p).unwrap());
            }
        }
    }
}
