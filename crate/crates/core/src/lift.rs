//! Affine lifts of automorphisms to the lattice `Z^V` and the shift integers
//! that make those lifts respect Day's relations.
//!
//! A lift is a pair `(M, s)` acting by `x -> M x + s`. Composition follows the
//! automorphism convention: `f.compose(g)` acts as `g` first.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphism::{
    day_relation_instances, DayInstances, whitehead_well_defined, Endomorphism, Factor, LSGenerator, WhiteheadAuto,
};
use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, Vertex, VertexSet};
use crate::intmat::{integer_kernel, solve_integer, IntMatrix};
use crate::word::abelianize_unchecked;

/// Column `v` is the abelianised image of `v`.
pub fn abelianization_matrix(g: &SimpleGraph, e: &Endomorphism) -> Result<IntMatrix> {
    let n = g.order();
    let cols: Vec<Vec<i64>> = e.images.iter().map(|w| abelianize_unchecked(n, w).0).collect();
    let m = IntMatrix::from_cols(n, &cols);
    let det = m.determinant();
    if det.abs() != 1 {
        return Err(Error::NotUnimodular(det));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineLift {
    pub linear: IntMatrix,
    pub shift: Vec<i64>,
}

impl AffineLift {
    pub fn identity(n: usize) -> Self {
        AffineLift {
            linear: IntMatrix::identity(n),
            shift: vec![0; n],
        }
    }

    pub fn translation(shift: Vec<i64>) -> Self {
        AffineLift {
            linear: IntMatrix::identity(shift.len()),
            shift,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineLift) -> AffineLift {
        let mut shift = self.linear.mul_vec(&other.shift);
        for (s, t) in shift.iter_mut().zip(&self.shift) {
            *s += t;
        }
        AffineLift {
            linear: self.linear.mul(&other.linear),
            shift,
        }
    }

    pub fn inverse(&self) -> Result<AffineLift> {
        let inv = self.linear.unimodular_inverse()?;
        let shift = inv.mul_vec(&self.shift).into_iter().map(|x| -x).collect();
        Ok(AffineLift { linear: inv, shift })
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.linear.mul_vec(x).iter().zip(&self.shift).map(|(a, b)| a + b).collect()
    }

    pub fn render(&self) -> String {
        format!("linear: {}, shift: {:?}", self.linear, self.shift)
    }
}

fn unit(n: usize, v: Vertex, len: i64) -> Vec<i64> {
    let mut s = vec![0; n];
    s[v] = len;
    s
}

/// `I + k E_{vw}`.
fn elementary(n: usize, v: Vertex, w: Vertex, k: i64) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    m.set(v, w, m.get(v, w) + k);
    m
}

/// Residues `r_v` and shift integers `s_{v,A}` for every `A ∈ CC(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSystem {
    pub residues: Vec<i64>,
    /// `components[v]` lists `CC(v)`; `shifts[v][i]` belongs to `components[v][i]`.
    pub components: Vec<Vec<VertexSet>>,
    pub shifts: Vec<Vec<i64>>,
}

impl ShiftSystem {
    pub fn zero(g: &SimpleGraph, residues: Vec<i64>) -> Result<Self> {
        if residues.len() != g.order() {
            return Err(Error::InvalidArgument(format!(
                "expected {} residues, got {}",
                g.order(),
                residues.len()
            )));
        }
        if let Some(r) = residues.iter().find(|&&r| r < 1) {
            return Err(Error::InvalidArgument(format!("residue {r} is not positive")));
        }
        let components: Vec<Vec<VertexSet>> = (0..g.order()).map(|v| g.cc(v)).collect();
        let shifts = components.iter().map(|c| vec![0; c.len()]).collect();
        Ok(ShiftSystem {
            residues,
            components,
            shifts,
        })
    }

    pub fn shift(&self, v: Vertex, a: &VertexSet) -> Option<i64> {
        let i = self.components[v].iter().position(|c| c == a)?;
        Some(self.shifts[v][i])
    }

    pub fn set_shift(&mut self, v: Vertex, a: &VertexSet, value: i64) -> Result<()> {
        let i = self.components[v]
            .iter()
            .position(|c| c == a)
            .ok_or_else(|| Error::InvalidArgument("not a component of Γ - st(v)".into()))?;
        self.shifts[v][i] = value;
        Ok(())
    }

    /// `S_v`, the total shift of conjugation by `v`.
    pub fn total(&self, v: Vertex) -> i64 {
        self.shifts[v].iter().sum()
    }

    /// `s_{[v]}`: `s_{w,{v}}` for a non-adjacent `w >= v` (the first one), else 0.
    pub fn class_shift(&self, g: &SimpleGraph, v: Vertex) -> i64 {
        let single: VertexSet = [v].into();
        (0..g.order())
            .filter(|&w| w != v && !g.adjacent(v, w) && g.leq(v, w))
            .find_map(|w| self.shift(w, &single))
            .unwrap_or(0)
    }

    pub fn to_document(&self, g: &SimpleGraph) -> ShiftDocument {
        let residues = (0..g.order()).map(|v| (g.name(v).to_string(), self.residues[v])).collect();
        let class_shifts = (0..g.order())
            .map(|v| (g.name(v).to_string(), self.class_shift(g, v)))
            .collect();
        let mut shifts = Vec::new();
        for v in 0..g.order() {
            for (c, &s) in self.components[v].iter().zip(&self.shifts[v]) {
                shifts.push(ShiftEntry {
                    vertex: g.name(v).to_string(),
                    component: g.set_names(c).iter().map(|s| s.to_string()).collect(),
                    shift: s,
                });
            }
        }
        ShiftDocument {
            residues,
            shifts,
            class_shifts,
        }
    }

    pub fn to_json(&self, g: &SimpleGraph) -> String {
        serde_json::to_string_pretty(&self.to_document(g)).expect("shift documents serialise")
    }

    /// Unlisted shifts default to zero; class shifts are recomputed.
    pub fn from_document(g: &SimpleGraph, doc: &ShiftDocument) -> Result<Self> {
        let mut residues = vec![1; g.order()];
        for (name, &r) in &doc.residues {
            residues[g.index_of(name)?] = r;
        }
        let mut s = ShiftSystem::zero(g, residues)?;
        for e in &doc.shifts {
            let v = g.index_of(&e.vertex)?;
            let comp = e.component.iter().map(|n| g.index_of(n)).collect::<Result<VertexSet>>()?;
            s.set_shift(v, &comp, e.shift)?;
        }
        Ok(s)
    }

    pub fn from_json(g: &SimpleGraph, text: &str) -> Result<Self> {
        let doc: ShiftDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(g, &doc)
    }
}

/// Serialised form of a [`ShiftSystem`], keyed by vertex name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftDocument {
    pub residues: BTreeMap<String, i64>,
    pub shifts: Vec<ShiftEntry>,
    #[serde(default)]
    pub class_shifts: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftEntry {
    pub vertex: String,
    pub component: Vec<String>,
    pub shift: i64,
}

pub fn lift_of_generator(g: &SimpleGraph, gen: &LSGenerator, s: &ShiftSystem) -> AffineLift {
    let n = g.order();
    match gen {
        LSGenerator::Inversion(v) => AffineLift {
            linear: elementary(n, *v, *v, -2),
            shift: unit(n, *v, s.class_shift(g, *v)),
        },
        LSGenerator::GraphSymmetry(p) => {
            let mut m = IntMatrix::zeros(n, n);
            for (v, &pv) in p.iter().enumerate() {
                m.set(pv, v, 1);
            }
            AffineLift {
                linear: m,
                shift: vec![0; n],
            }
        }
        LSGenerator::Transvection { v, w } => AffineLift {
            linear: elementary(n, *v, *w, 1),
            shift: vec![0; n],
        },
        LSGenerator::PartialConjugation { v, component } => {
            AffineLift::translation(unit(n, *v, s.shift(*v, component).unwrap_or(0)))
        }
    }
}

/// `ρ_{v,w}` is `λ_{v,w}` when `v`, `w` commute and `λ_{v,w} γ_{v,{w}}^-1` otherwise.
fn right_transvection_lift(g: &SimpleGraph, s: &ShiftSystem, v: Vertex, w: Vertex) -> AffineLift {
    let n = g.order();
    let shift = if g.adjacent(v, w) {
        0
    } else {
        -s.shift(v, &[w].into()).unwrap_or(0)
    };
    AffineLift {
        linear: elementary(n, v, w, 1),
        shift: unit(n, v, shift),
    }
}

/// Lift of a Whitehead automorphism through its factorisation into
/// commuting transvections and partial conjugations.
pub fn lift_of_whitehead(g: &SimpleGraph, s: &ShiftSystem, wa: &WhiteheadAuto) -> Result<AffineLift> {
    let n = g.order();
    match wa {
        WhiteheadAuto::Type1(sp) => {
            let mut acc = lift_of_generator(g, &LSGenerator::GraphSymmetry(sp.perm.clone()), s);
            for v in (0..n).filter(|&v| sp.signs[v]) {
                acc = acc.compose(&lift_of_generator(g, &LSGenerator::Inversion(v), s));
            }
            Ok(acc)
        }
        WhiteheadAuto::Type2 { set, multiplier: a } => {
            let wd = whitehead_well_defined(g, *set, *a)?;
            if !wd.well_defined {
                return Err(Error::NotWellDefined {
                    set: set.render(g),
                    multiplier: a.render(g),
                    reason: wd.reason,
                });
            }
            let v = a.vertex;
            let mut acc = AffineLift::identity(n);
            for b in set.letters() {
                if b == *a || set.contains(b.inv()) {
                    continue;
                }
                let w = b.vertex;
                let piece = match (a.inverse, b.inverse) {
                    (false, false) => right_transvection_lift(g, s, v, w),
                    (false, true) => AffineLift {
                        linear: elementary(n, v, w, -1),
                        shift: vec![0; n],
                    },
                    (true, false) => right_transvection_lift(g, s, v, w).inverse()?,
                    (true, true) => AffineLift {
                        linear: elementary(n, v, w, 1),
                        shift: vec![0; n],
                    },
                };
                acc = acc.compose(&piece);
            }
            let sign = if a.inverse { 1 } else { -1 };
            for (c, &sh) in s.components[v].iter().zip(&s.shifts[v]) {
                let first = *c.iter().next().expect("components are non-empty");
                if set.contains(crate::word::Letter::pos(first)) && set.contains(crate::word::Letter::neg(first)) {
                    acc = acc.compose(&AffineLift::translation(unit(n, v, sign * sh)));
                }
            }
            Ok(acc)
        }
    }
}

/// Per-condition verdict with a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionVerdict {
    pub condition: u8,
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftReport {
    pub verdicts: Vec<ConditionVerdict>,
}

impl ShiftReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn failed(&self) -> Vec<u8> {
        self.verdicts.iter().filter(|v| !v.holds).map(|v| v.condition).collect()
    }
}

/// One homogeneous linear constraint `Σ coeff · s_{v,A} = 0` over the shift
/// variables, tagged with its condition number and a witness.
struct Constraint {
    condition: u8,
    coeffs: Vec<(usize, i64)>,
    witness: String,
}

struct Variables {
    index: HashMap<(Vertex, VertexSet), usize>,
    list: Vec<(Vertex, VertexSet)>,
}

impl Variables {
    fn new(g: &SimpleGraph) -> Self {
        let mut list = Vec::new();
        for v in 0..g.order() {
            for c in g.cc(v) {
                list.push((v, c));
            }
        }
        let index = list.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Variables { index, list }
    }

    fn of(&self, v: Vertex, c: &VertexSet) -> usize {
        self.index[&(v, c.clone())]
    }

    fn total(&self, v: Vertex) -> Vec<(usize, i64)> {
        self.list
            .iter()
            .enumerate()
            .filter(|(_, (u, _))| *u == v)
            .map(|(i, _)| (i, 1))
            .collect()
    }
}

fn homogeneous_constraints(g: &SimpleGraph, vars: &Variables, aut_bound: usize) -> Result<Vec<Constraint>> {
    let n = g.order();
    let mut out = Vec::new();
    let render = |c: &VertexSet| format!("{{{}}}", g.set_names(c).join(","));
    for v in 0..n {
        for w in 0..n {
            if v == w || !g.leq(v, w) {
                continue;
            }
            // 1: S_v = S_w.
            let mut coeffs = vars.total(v);
            coeffs.extend(vars.total(w).into_iter().map(|(i, k)| (i, -k)));
            out.push(Constraint {
                condition: 1,
                coeffs,
                witness: format!("v={}, w={}", g.name(v), g.name(w)),
            });
            // 2: s_{v,A} = Σ_{B ⊆ A} s_{w,B} for w ∉ A.
            for a in g.cc(v) {
                if a.contains(&w) {
                    continue;
                }
                let mut coeffs = vec![(vars.of(v, &a), 1)];
                for b in g.cc(w) {
                    if b.is_subset(&a) {
                        coeffs.push((vars.of(w, &b), -1));
                    }
                }
                out.push(Constraint {
                    condition: 2,
                    coeffs,
                    witness: format!("v={}, w={}, A={}", g.name(v), g.name(w), render(&a)),
                });
            }
        }
    }
    // 3: invariance under graph symmetries.
    for sigma in g.automorphisms(aut_bound)? {
        for (i, (v, a)) in vars.list.iter().enumerate() {
            let image: VertexSet = a.iter().map(|&u| sigma[u]).collect();
            let j = vars.of(sigma[*v], &image);
            if i != j {
                out.push(Constraint {
                    condition: 3,
                    coeffs: vec![(i, 1), (j, -1)],
                    witness: format!("v={}, A={}", g.name(*v), render(a)),
                });
            }
        }
    }
    // 4: s_{w,{v}} independent of w, and zero when v has an adjacent dominator.
    for v in 0..n {
        let single: VertexSet = [v].into();
        let owners: Vec<Vertex> = (0..n).filter(|&w| vars.index.contains_key(&(w, single.clone()))).collect();
        for pair in owners.windows(2) {
            out.push(Constraint {
                condition: 4,
                coeffs: vec![(vars.of(pair[0], &single), 1), (vars.of(pair[1], &single), -1)],
                witness: format!("v={}, w={}, w'={}", g.name(v), g.name(pair[0]), g.name(pair[1])),
            });
        }
        if let Some(w2) = (0..n).find(|&w2| w2 != v && g.adjacent(v, w2) && g.leq(v, w2)) {
            for &w in &owners {
                out.push(Constraint {
                    condition: 4,
                    coeffs: vec![(vars.of(w, &single), 1)],
                    witness: format!("v={}, w={}, adjacent dominator {}", g.name(v), g.name(w), g.name(w2)),
                });
            }
        }
    }
    Ok(out)
}

pub fn check_shift_conditions(g: &SimpleGraph, s: &ShiftSystem, aut_bound: usize) -> Result<ShiftReport> {
    let vars = Variables::new(g);
    let values: Vec<i64> = vars.list.iter().map(|(v, c)| s.shift(*v, c).unwrap_or(0)).collect();
    let mut witnesses: [Option<String>; 5] = Default::default();
    for c in homogeneous_constraints(g, &vars, aut_bound)? {
        let total: i64 = c.coeffs.iter().map(|&(i, k)| k * values[i]).sum();
        let slot = &mut witnesses[c.condition as usize - 1];
        if total != 0 && slot.is_none() {
            *slot = Some(c.witness);
        }
    }
    for v in 0..g.order() {
        if (s.total(v) + 1).rem_euclid(s.residues[v]) != 0 && witnesses[4].is_none() {
            witnesses[4] = Some(format!("v={}: S_v = {}, r_v = {}", g.name(v), s.total(v), s.residues[v]));
        }
    }
    Ok(ShiftReport {
        verdicts: witnesses
            .into_iter()
            .enumerate()
            .map(|(i, w)| ConditionVerdict {
                condition: i as u8 + 1,
                holds: w.is_none(),
                witness: w,
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShiftOutcome {
    Feasible(ShiftSystem),
    Infeasible {
        conditions: Vec<u8>,
        vertices: Vec<Vertex>,
        reason: String,
    },
}

impl ShiftOutcome {
    pub fn feasible(&self) -> Option<&ShiftSystem> {
        match self {
            ShiftOutcome::Feasible(s) => Some(s),
            ShiftOutcome::Infeasible { .. } => None,
        }
    }
}

/// Conditions 1–4 cut out a lattice `t = K y`; condition 5 becomes the exact
/// system `D K y + diag(r) z = -1`, solved over the integers.
pub fn solve_shift_system(g: &SimpleGraph, residues: &[i64], aut_bound: usize) -> Result<ShiftOutcome> {
    let mut sys = ShiftSystem::zero(g, residues.to_vec())?;
    let n = g.order();
    let vars = Variables::new(g);
    let nv = vars.list.len();
    let constraints = homogeneous_constraints(g, &vars, aut_bound)?;
    let mut c = IntMatrix::zeros(constraints.len(), nv);
    for (row, con) in constraints.iter().enumerate() {
        for &(i, k) in &con.coeffs {
            c.set(row, i, c.get(row, i) + k);
        }
    }
    let kernel = integer_kernel(&c);
    let kdim = kernel.len();
    // Row v: S_v restricted to the lattice, then r_v in its own column.
    let mut system = IntMatrix::zeros(n, kdim + n);
    for v in 0..n {
        for (j, basis) in kernel.iter().enumerate() {
            let sv: i64 = vars.total(v).iter().map(|&(i, _)| basis[i]).sum();
            system.set(v, j, sv);
        }
        system.set(v, kdim + v, residues[v]);
    }
    let Some(sol) = solve_integer(&system, &vec![-1; n]) else {
        let mut vertices: Vec<Vertex> = (0..n)
            .filter(|&v| {
                let content = (0..kdim).fold(0i64, |acc, j| acc.gcd(&system.get(v, j)));
                content.gcd(&residues[v]) > 1
            })
            .collect();
        if vertices.is_empty() {
            vertices = (0..n).filter(|&v| residues[v] > 1).collect();
        }
        return Ok(ShiftOutcome::Infeasible {
            conditions: vec![5],
            vertices,
            reason: "the congruences S_v ≡ -1 (mod r_v) have no solution on the lattice of conditions 1-4".into(),
        });
    };
    let period = residues.iter().fold(1i64, |acc, r| acc.lcm(r));
    let y: Vec<i64> = sol[..kdim].iter().map(|x| x.rem_euclid(period)).collect();
    for (i, (v, comp)) in vars.list.iter().enumerate() {
        let value = kernel.iter().zip(&y).map(|(b, k)| b[i] * k).sum();
        sys.set_shift(*v, comp, value)?;
    }
    Ok(ShiftOutcome::Feasible(sys))
}

/// Shifts `s` on components of `Γ` itself and 0 elsewhere, with
/// `s (m - 1) ≡ -1 (mod r)` for `m` connected components.
pub fn corollary_ff_shifts(g: &SimpleGraph, r: i64) -> Result<ShiftOutcome> {
    if r < 1 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let comps = g.components();
    let m = comps.len() as i64;
    let Some(value) = (0..r).find(|x| (x * (m - 1) + 1).rem_euclid(r) == 0) else {
        return Ok(ShiftOutcome::Infeasible {
            conditions: vec![5],
            vertices: (0..g.order()).collect(),
            reason: format!("gcd({r}, {}) = {} > 1", m - 1, r.gcd(&(m - 1))),
        });
    };
    let mut sys = ShiftSystem::zero(g, vec![r; g.order()])?;
    for v in 0..g.order() {
        for c in &comps {
            if !c.contains(&v) {
                sys.set_shift(v, c, value)?;
            }
        }
    }
    Ok(ShiftOutcome::Feasible(sys))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiftReport {
    pub checked: usize,
    pub failures: Vec<(u8, String)>,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compare both sides of every Day relation instance as exact affine maps.
pub fn verify_relations_on_lifts(g: &SimpleGraph, s: &ShiftSystem, bound: usize) -> Result<LiftReport> {
    verify_instances_on_lifts(g, s, &day_relation_instances(g, bound)?)
}

/// Same check against precomputed instances, for sweeps over many shift
/// systems on one graph.
pub fn verify_instances_on_lifts(g: &SimpleGraph, s: &ShiftSystem, inst: &DayInstances) -> Result<LiftReport> {
    let mut cache: HashMap<WhiteheadAuto, AffineLift> = HashMap::new();
    for i in &inst.instances {
        for f in i.left.iter().chain(&i.right) {
            let r = f.resolved();
            if !cache.contains_key(&r) {
                let l = lift_of_whitehead(g, s, &r)?;
                cache.insert(r, l);
            }
        }
    }
    let side = |fs: &[Factor]| {
        fs.iter()
            .fold(AffineLift::identity(g.order()), |acc, f| acc.compose(&cache[&f.resolved()]))
    };
    let failures: Vec<(u8, String)> = inst
        .instances
        .par_iter()
        .filter_map(|i| {
            let (l, r) = (side(&i.left), side(&i.right));
            (l != r).then(|| (i.relation, format!("{}: {} vs {}", i.render(g), l.render(), r.render())))
        })
        .collect();
    Ok(LiftReport {
        checked: inst.instances.len(),
        failures,
    })
}

/// Conjugation by `v` lifts to a translation by `S_v x_v`; composed with the
/// deck translation by `x_v` it must land in `∏ r_u Z`.
pub fn verify_inner_killed(g: &SimpleGraph, s: &ShiftSystem) -> LiftReport {
    let n = g.order();
    let mut report = LiftReport::default();
    for v in 0..n {
        report.checked += 1;
        let lift = s.components[v]
            .iter()
            .map(|c| {
                lift_of_generator(
                    g,
                    &LSGenerator::PartialConjugation {
                        v,
                        component: c.clone(),
                    },
                    s,
                )
            })
            .fold(AffineLift::translation(unit(n, v, 1)), |acc, l| acc.compose(&l));
        let in_lattice = lift.linear == IntMatrix::identity(n)
            && lift.shift.iter().zip(&s.residues).all(|(x, r)| x.rem_euclid(*r) == 0);
        if !in_lattice {
            report.failures.push((
                0,
                format!("{}: S_v + 1 = {} not divisible by {}", g.name(v), s.total(v) + 1, s.residues[v]),
            ));
        }
    }
    report
}

/// No vertex is adjacent to every other vertex.
pub fn center_trivial(g: &SimpleGraph) -> bool {
    (0..g.order()).all(|v| g.degree(v) + 1 < g.order())
}
