mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use raag::automorphism::{
    self, endo_of_whitehead, ls_generators, verify_day_presentation, whitehead_well_defined, GeneratorSpec, LetterSet,
    DEFAULT_WHITEHEAD_BOUND,
};
use raag::graph::DEFAULT_AUT_BOUND;
use raag::lift::{self, ShiftOutcome, ShiftSystem};
use raag::subgroup::{self, FiniteQuotientSpec, DEFAULT_QUOTIENT_BOUND};
use raag::torsion;
use raag::{Error, SimpleGraph, VertexSet, Word};
use serde_json::{json, Value};

use output::{CommandResult, Status};

#[derive(Parser)]
#[command(name = "raag", version, about = "Right-angled Artin group toolkit")]
struct Cli {
    /// Emit structured JSON instead of key: value lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Defining-graph combinatorics.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Words in the group.
    #[command(subcommand)]
    Word(WordCmd),
    /// Automorphisms and Day's presentation.
    #[command(subcommand)]
    Auto(AutoCmd),
    /// Day's presentation check (same as `auto day`).
    #[command(subcommand)]
    Day(DayCmd),
    /// Shift systems for lifts to the universal abelian cover.
    #[command(subcommand)]
    Shifts(ShiftsCmd),
    /// Relations among lifted generators.
    #[command(subcommand)]
    Lifts(LiftsCmd),
    /// Finite-index subgroups.
    #[command(subcommand)]
    Subgroup(SubgroupCmd),
    /// Embedding targets.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Torsion invariants of automorphism groups.
    #[command(subcommand)]
    Torsion(TorsionCmd),
    /// Necessary conditions for an embedding Out(A_source) -> Out(A_target).
    Obstruct(ObstructArgs),
}

#[derive(Args)]
struct GraphArg {
    /// Graph file: {"vertices": [...], "edges": [[u, v], ...]}.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct AutBound {
    /// Vertex bound for exhaustive automorphism search.
    #[arg(long, default_value_t = DEFAULT_AUT_BOUND)]
    aut_bound: usize,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Print the graph in canonical file form (or DOT).
    Show {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        dot: bool,
    },
    /// Domination order and equivalence classes.
    Domination(GraphArg),
    /// Quotient by domination equivalence with class labels.
    Quotient(GraphArg),
    /// Cotree of a cograph, or an induced P4.
    Cograph(GraphArg),
    /// `copies` copies of the graph glued along the full subgraph on `along`.
    Amalgam {
        #[command(flatten)]
        g: GraphArg,
        /// Comma-separated vertex names.
        #[arg(long, default_value = "")]
        along: String,
        #[arg(long)]
        copies: usize,
        /// Also write the result to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graph automorphisms.
    Aut {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        b: AutBound,
    },
}

#[derive(Subcommand)]
enum WordCmd {
    /// Normal form.
    Nf {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        word: String,
    },
    /// Equality in the group.
    Equal {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        word: String,
        #[arg(long)]
        other: String,
    },
    /// n-th roots up to a length radius.
    Roots {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        word: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
}

#[derive(Subcommand)]
enum AutoCmd {
    /// Laurence–Servatius generators.
    Ls {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        b: AutBound,
    },
    /// Images of one generator, e.g. `wh {a b^-1} a` or `transv a b`.
    Whitehead {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        gen: String,
    },
    /// Well-definedness of the Whitehead symbol (set, multiplier).
    Welldef {
        #[command(flatten)]
        g: GraphArg,
        /// Letters of the set, e.g. "a b^-1".
        #[arg(long)]
        set: String,
        #[arg(long)]
        multiplier: String,
    },
    /// Check Day's relations on the enumerated Whitehead automorphisms.
    Day(DayArgs),
}

#[derive(Args)]
struct DayArgs {
    #[command(flatten)]
    g: GraphArg,
    /// Vertex bound for Whitehead enumeration.
    #[arg(long, default_value_t = DEFAULT_WHITEHEAD_BOUND)]
    bound: usize,
}

#[derive(Subcommand)]
enum DayCmd {
    Verify(DayArgs),
}

#[derive(Args)]
struct ResidueArgs {
    #[command(flatten)]
    g: GraphArg,
    /// Residues in vertex order (`2,3`) or by name (`a=2,b=3`).
    #[arg(long)]
    residues: String,
}

#[derive(Subcommand)]
enum ShiftsCmd {
    /// Solve for a shift system.
    Solve {
        #[command(flatten)]
        r: ResidueArgs,
        #[command(flatten)]
        b: AutBound,
        /// Write the solution to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the conditions on a shift-system file.
    Check {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        shifts: PathBuf,
        #[command(flatten)]
        b: AutBound,
    },
}

#[derive(Args)]
struct ShiftSource {
    #[command(flatten)]
    g: GraphArg,
    /// Shift-system file.
    #[arg(long, conflicts_with = "residues")]
    shifts: Option<PathBuf>,
    /// Solve for a shift system with these residues instead.
    #[arg(long)]
    residues: Option<String>,
}

#[derive(Subcommand)]
enum LiftsCmd {
    /// Day's relations on the affine lifts.
    Verify {
        #[command(flatten)]
        s: ShiftSource,
        #[arg(long, default_value_t = DEFAULT_WHITEHEAD_BOUND)]
        bound: usize,
    },
    /// Lifts of inner automorphisms are translations by the residues.
    Inner {
        #[command(flatten)]
        s: ShiftSource,
    },
}

#[derive(Subcommand)]
enum SubgroupCmd {
    /// Reidemeister–Schreier presentation of the kernel onto ∏ Z_r.
    Rs {
        #[command(flatten)]
        r: ResidueArgs,
        /// Index bound.
        #[arg(long, default_value_t = DEFAULT_QUOTIENT_BOUND)]
        bound: usize,
    },
    /// Kernel isomorphism type for a cograph.
    #[command(alias = "cograph-kernel")]
    Kernel(ResidueArgs),
    /// Whether the kernel is characteristic.
    Char {
        #[command(flatten)]
        r: ResidueArgs,
        #[command(flatten)]
        b: AutBound,
    },
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Free product of free abelian groups, factors `rank:residue,...`.
    Fpa {
        #[arg(long)]
        factors: String,
    },
    /// Direct product of free groups, factors `rank:residue,...`.
    Dpf {
        #[arg(long)]
        factors: String,
    },
    /// Amalgam target for the cyclic quotient at one vertex.
    Virtual {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        copies: usize,
    },
}

#[derive(Subcommand)]
enum TorsionCmd {
    /// Pure-group values and class factors.
    Profile {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        p: u64,
    },
    /// Bounds for the full automorphism group.
    Bounds {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        p: u64,
        /// Outer automorphisms instead of all automorphisms.
        #[arg(long)]
        outer: bool,
        #[command(flatten)]
        b: AutBound,
    },
}

#[derive(Args)]
struct ObstructArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[command(flatten)]
    b: AutBound,
}

type CmdResult = Result<CommandResult, String>;

fn fail(e: Error) -> String {
    e.to_string()
}

fn load_graph(path: &Path) -> Result<SimpleGraph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    SimpleGraph::from_json(&text).map_err(|e| format!("malformed graph file {}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn vertex_set(g: &SimpleGraph, list: &str) -> Result<VertexSet, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| g.index_of(s).map_err(fail))
        .collect()
}

/// `2,3` in vertex order or `a=2,b=3` by name (unnamed vertices must all be given).
fn parse_residues(g: &SimpleGraph, text: &str) -> Result<Vec<i64>, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let num = |s: &str| s.trim().parse::<i64>().map_err(|_| format!("bad residue `{s}`"));
    if parts.iter().any(|p| p.contains('=')) {
        let mut out = vec![None; g.order()];
        for p in parts {
            let (name, r) = p.split_once('=').ok_or_else(|| format!("expected name=residue, got `{p}`"))?;
            out[g.index_of(name.trim()).map_err(fail)?] = Some(num(r)?);
        }
        out.into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or_else(|| format!("no residue for {}", g.name(v))))
            .collect()
    } else {
        let rs = parts.into_iter().map(num).collect::<Result<Vec<_>, _>>()?;
        if rs.len() != g.order() {
            return Err(format!("{} residues given for {} vertices", rs.len(), g.order()));
        }
        Ok(rs)
    }
}

fn positive(rs: &[i64]) -> Result<Vec<u64>, String> {
    rs.iter()
        .map(|&r| u64::try_from(r).ok().filter(|&r| r > 0).ok_or_else(|| format!("residue {r} must be positive")))
        .collect()
}

fn parse_factors(text: &str) -> Result<Vec<(u64, u64)>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|f| {
            let (i, r) = f.split_once(':').ok_or_else(|| format!("expected rank:residue, got `{f}`"))?;
            let p = |s: &str| s.trim().parse::<u64>().map_err(|_| format!("bad number in `{f}`"));
            Ok((p(i)?, p(r)?))
        })
        .collect()
}

fn strings<I: IntoIterator<Item = String>>(it: I) -> Value {
    Value::Array(it.into_iter().map(Value::String).collect())
}

fn names(g: &SimpleGraph, vs: impl IntoIterator<Item = usize>) -> String {
    format!("{{{}}}", vs.into_iter().map(|v| g.name(v)).collect::<Vec<_>>().join(","))
}

fn graph_cmd(cmd: GraphCmd) -> CmdResult {
    match cmd {
        GraphCmd::Show { g, dot } => {
            let g = load_graph(&g.graph)?;
            let text = if dot { g.to_dot() } else { g.to_json() };
            Ok(CommandResult::ok().put("graph", text))
        }
        GraphCmd::Domination(a) => {
            let g = load_graph(&a.graph)?;
            let ds = g.domination_structure();
            let classes = ds
                .classes
                .iter()
                .zip(&ds.kinds)
                .map(|(c, k)| format!("{} {:?}", names(&g, c.iter().copied()), k).to_lowercase());
            let mut order = Vec::new();
            for v in 0..g.order() {
                for w in 0..g.order() {
                    if v != w && ds.leq[v][w] {
                        order.push(format!("{} <= {}", g.name(v), g.name(w)));
                    }
                }
            }
            Ok(CommandResult::ok().put("classes", strings(classes)).put("domination", strings(order)))
        }
        GraphCmd::Quotient(a) => {
            let g = load_graph(&a.graph)?;
            let q = g.quotient_graph();
            let labels = q
                .classes
                .iter()
                .zip(&q.labels)
                .map(|(c, l)| format!("{} {}", names(&g, c.iter().copied()), l));
            let edges = q
                .graph
                .edges()
                .into_iter()
                .map(|(u, v)| format!("{} - {}", names(&g, q.classes[u].iter().copied()), names(&g, q.classes[v].iter().copied())));
            Ok(CommandResult::ok().put("vertices", strings(labels)).put("edges", strings(edges)))
        }
        GraphCmd::Cograph(a) => {
            let g = load_graph(&a.graph)?;
            Ok(match g.cograph_decompose() {
                Ok(t) => CommandResult::ok()
                    .put("cotree", t.render(&g))
                    .put("group", subgroup::cograph_expr(&g).map(|e| e.to_string()).unwrap_or_default()),
                Err(w) => CommandResult::new(Status::NotRecognized).put("p4", names(&g, w.0)),
            })
        }
        GraphCmd::Amalgam { g, along, copies, out } => {
            let g = load_graph(&g.graph)?;
            let lam = vertex_set(&g, &along)?;
            let amalgam = g.amalgam(&lam, copies).map_err(fail)?;
            if let Some(path) = out {
                write_file(&path, &amalgam.to_json())?;
            }
            Ok(CommandResult::ok()
                .put("vertices", amalgam.order())
                .put("edges", amalgam.edges().len())
                .put("graph", amalgam.to_string()))
        }
        GraphCmd::Aut { g, b } => {
            let g = load_graph(&g.graph)?;
            let auts = g.automorphisms(b.aut_bound).map_err(fail)?;
            let rendered = auts.iter().map(|p| {
                (0..g.order())
                    .map(|v| format!("{}->{}", g.name(v), g.name(p[v])))
                    .collect::<Vec<_>>()
                    .join(" ")
            });
            Ok(CommandResult::ok().put("order", auts.len()).put("automorphisms", strings(rendered)))
        }
    }
}

fn word_cmd(cmd: WordCmd) -> CmdResult {
    match cmd {
        WordCmd::Nf { g, word } => {
            let g = load_graph(&g.graph)?;
            let w = Word::parse(&g, &word).map_err(fail)?;
            let nf = raag::word::normal_form(&g, &w).map_err(fail)?;
            Ok(CommandResult::ok().put("normal_form", nf.render(&g)).put("length", nf.len()))
        }
        WordCmd::Equal { g, word, other } => {
            let g = load_graph(&g.graph)?;
            let u = Word::parse(&g, &word).map_err(fail)?;
            let v = Word::parse(&g, &other).map_err(fail)?;
            Ok(CommandResult::ok().put("equal", raag::word::words_equal(&g, &u, &v).map_err(fail)?))
        }
        WordCmd::Roots { g, word, n, radius } => {
            let g = load_graph(&g.graph)?;
            let w = Word::parse(&g, &word).map_err(fail)?;
            let roots = raag::word::nth_roots(&g, &w, n, radius).map_err(fail)?;
            Ok(CommandResult::ok()
                .put("count", roots.len())
                .put("roots", strings(roots.iter().map(|r| r.render(&g)))))
        }
    }
}

fn day_report(a: DayArgs) -> CmdResult {
    let g = load_graph(&a.g.graph)?;
    let report = verify_day_presentation(&g, a.bound).map_err(fail)?;
    let mut r = CommandResult::ok()
        .put("summary", report.to_string())
        .put("instances", report.checked)
        .put("failures", report.failures.len())
        .put("per_relation", json!(report.per_relation))
        .put("skipped", json!(report.skipped));
    for f in report.failures.iter().take(10) {
        r = r.note(format!("R{} {}: {}", f.relation, f.instance, f.witness));
    }
    Ok(r)
}

fn auto_cmd(cmd: AutoCmd) -> CmdResult {
    match cmd {
        AutoCmd::Ls { g, b } => {
            let g = load_graph(&g.graph)?;
            let gens = ls_generators(&g, b.aut_bound).map_err(fail)?;
            Ok(CommandResult::ok()
                .put("count", gens.len())
                .put("generators", strings(gens.iter().map(|x| x.render(&g)))))
        }
        AutoCmd::Whitehead { g, gen } => {
            let g = load_graph(&g.graph)?;
            let spec = GeneratorSpec::parse(&g, &gen).map_err(fail)?;
            let e = spec.endomorphism(&g).map_err(fail)?;
            let inverse = match &spec {
                GeneratorSpec::Ls(l) => l.inverse_endomorphism(&g),
                GeneratorSpec::Whitehead(w) => endo_of_whitehead(&g, &automorphism::whitehead_inverse(w)).map_err(fail)?,
            };
            let images = (0..g.order()).map(|v| format!("{} -> {}", g.name(v), e.images[v].render(&g)));
            Ok(CommandResult::ok()
                .put("images", strings(images))
                .put("automorphism", automorphism::certify_automorphism(&g, &e, &inverse)))
        }
        AutoCmd::Welldef { g, set, multiplier } => {
            let g = load_graph(&g.graph)?;
            let letters = Word::parse(&g, &set.replace(',', " ")).map_err(fail)?;
            let a = Word::parse(&g, &multiplier).map_err(fail)?;
            let [a] = a.letters() else {
                return Err("multiplier must be a single letter".into());
            };
            let verdict = whitehead_well_defined(&g, LetterSet::from_letters(letters.0), *a).map_err(fail)?;
            Ok(CommandResult::ok()
                .put("well_defined", verdict.well_defined)
                .put("reason", verdict.reason))
        }
        AutoCmd::Day(a) => day_report(a),
    }
}

fn shifts_cmd(cmd: ShiftsCmd) -> CmdResult {
    match cmd {
        ShiftsCmd::Solve { r, b, out } => {
            let g = load_graph(&r.g.graph)?;
            let rs = parse_residues(&g, &r.residues)?;
            match lift::solve_shift_system(&g, &rs, b.aut_bound).map_err(fail)? {
                ShiftOutcome::Feasible(s) => {
                    let text = s.to_json(&g);
                    if let Some(path) = out {
                        write_file(&path, &text)?;
                    }
                    let doc = serde_json::to_value(s.to_document(&g)).unwrap();
                    Ok(CommandResult::ok().put("shifts", doc))
                }
                ShiftOutcome::Infeasible { conditions, vertices, reason } => Ok(CommandResult::new(Status::Infeasible)
                    .put("conditions", json!(conditions))
                    .put("vertices", strings(vertices.iter().map(|&v| g.name(v).to_string())))
                    .put("reason", reason)),
            }
        }
        ShiftsCmd::Check { g, shifts, b } => {
            let g = load_graph(&g.graph)?;
            let s = load_shifts(&g, &shifts)?;
            let report = lift::check_shift_conditions(&g, &s, b.aut_bound).map_err(fail)?;
            let mut r = CommandResult::new(if report.all_hold() { Status::Ok } else { Status::Infeasible })
                .put("failed", json!(report.failed()));
            for v in report.verdicts.iter().filter(|v| !v.holds) {
                if let Some(w) = &v.witness {
                    r = r.note(format!("condition {}: {w}", v.condition));
                }
            }
            Ok(r)
        }
    }
}

fn load_shifts(g: &SimpleGraph, path: &Path) -> Result<ShiftSystem, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ShiftSystem::from_json(g, &text).map_err(|e| format!("malformed shift file {}: {e}", path.display()))
}

/// The shift system named on the command line, or `None` when solving failed.
fn shift_source(src: &ShiftSource) -> Result<(SimpleGraph, Option<ShiftSystem>), String> {
    let g = load_graph(&src.g.graph)?;
    let s = match (&src.shifts, &src.residues) {
        (Some(path), _) => Some(load_shifts(&g, path)?),
        (None, Some(r)) => {
            let rs = parse_residues(&g, r)?;
            lift::solve_shift_system(&g, &rs, DEFAULT_AUT_BOUND).map_err(fail)?.feasible().cloned()
        }
        (None, None) => return Err("either --shifts or --residues is required".into()),
    };
    Ok((g, s))
}

fn lift_result(report: lift::LiftReport) -> CommandResult {
    let mut r = CommandResult::ok()
        .put("checked", report.checked)
        .put("failures", report.failures.len());
    for (rel, what) in report.failures.iter().take(10) {
        r = r.note(format!("R{rel}: {what}"));
    }
    r
}

fn lifts_cmd(cmd: LiftsCmd) -> CmdResult {
    let (src, bound) = match &cmd {
        LiftsCmd::Verify { s, bound } => (s, Some(*bound)),
        LiftsCmd::Inner { s } => (s, None),
    };
    let (g, s) = shift_source(src)?;
    let Some(s) = s else {
        return Ok(CommandResult::new(Status::Infeasible).note("no shift system for these residues"));
    };
    Ok(lift_result(match bound {
        Some(b) => lift::verify_relations_on_lifts(&g, &s, b).map_err(fail)?,
        None => lift::verify_inner_killed(&g, &s),
    }))
}

fn subgroup_cmd(cmd: SubgroupCmd) -> CmdResult {
    match cmd {
        SubgroupCmd::Rs { r, bound } => {
            let g = load_graph(&r.g.graph)?;
            let rs = positive(&parse_residues(&g, &r.residues)?)?;
            let kp = subgroup::reidemeister_schreier(&g, &FiniteQuotientSpec::residues(&rs), bound).map_err(fail)?;
            let p = &kp.presentation;
            let base = CommandResult::ok()
                .put("index", kp.index)
                .put("generators", p.generators.len())
                .put("relators", p.relators.len());
            Ok(match subgroup::recognize_raag(p) {
                Some(k) => {
                    let group = subgroup::cograph_expr(&k).map(|e| e.to_string()).ok();
                    let mut r = base
                        .put("kernel_vertices", k.order())
                        .put("kernel_edges", k.edges().len());
                    if let Some(e) = group {
                        r = r.put("kernel", e);
                    }
                    r
                }
                None => {
                    let rels = p.relators.iter().take(20).map(|x| p.render_relator(x));
                    base.with_status(Status::NotRecognized).put("sample_relators", strings(rels))
                }
            })
        }
        SubgroupCmd::Kernel(r) => {
            let g = load_graph(&r.g.graph)?;
            let rs = positive(&parse_residues(&g, &r.residues)?)?;
            Ok(match subgroup::kernel_structure_cograph(&g, &rs).map_err(fail)? {
                Ok((e, index)) => CommandResult::ok()
                    .put("kernel", e.to_string())
                    .put("index", index)
                    .put("euler_characteristic", e.euler_characteristic().to_string()),
                Err(w) => CommandResult::new(Status::NotRecognized).put("p4", names(&g, w.0)),
            })
        }
        SubgroupCmd::Char { r, b } => {
            let g = load_graph(&r.g.graph)?;
            let rs = positive(&parse_residues(&g, &r.residues)?)?;
            Ok(match subgroup::is_characteristic_kernel(&g, &rs, b.aut_bound).map_err(fail)? {
                None => CommandResult::ok().put("characteristic", true),
                Some(gen) => CommandResult::ok()
                    .put("characteristic", false)
                    .put("witness", gen.render(&g)),
            })
        }
    }
}

fn embedding(t: subgroup::EmbeddingTarget) -> CommandResult {
    let conds = t
        .conditions
        .iter()
        .map(|c| format!("{}: {}", c.name, if c.holds { "holds" } else { "fails" }));
    CommandResult::ok()
        .put("source", t.source.to_string())
        .put("target", t.target.to_string())
        .put("characteristic", t.conditions_hold())
        .put("conditions", strings(conds))
}

fn embed_cmd(cmd: EmbedCmd) -> CmdResult {
    match cmd {
        EmbedCmd::Fpa { factors } => Ok(embedding(subgroup::embed_target_fpa(&parse_factors(&factors)?).map_err(fail)?)),
        EmbedCmd::Dpf { factors } => Ok(embedding(subgroup::embed_target_dpf(&parse_factors(&factors)?).map_err(fail)?)),
        EmbedCmd::Virtual { g, vertex, copies } => {
            let g = load_graph(&g.graph)?;
            let v = g.index_of(&vertex).map_err(fail)?;
            let (target, p) = subgroup::virtual_embed_target(&g, v, copies).map_err(fail)?;
            Ok(CommandResult::ok()
                .put("prime", p)
                .put("target_vertices", target.order())
                .put("target", target.to_string()))
        }
    }
}

fn torsion_cmd(cmd: TorsionCmd) -> CmdResult {
    match cmd {
        TorsionCmd::Profile { g, p } => {
            let g = load_graph(&g.graph)?;
            let factors = torsion::class_factors(&g).into_iter().map(|f| match f {
                torsion::ClassFactor::AutFree(k) => format!("Aut(F_{k})"),
                torsion::ClassFactor::GeneralLinear(k) => format!("GL({k},Z)"),
            });
            Ok(CommandResult::ok()
                .put("p", p)
                .put("nu_pure", torsion::nu_p_pure(&g, p).map_err(fail)?)
                .put("rank_pure", torsion::rank_p_pure(&g, p).map_err(fail)?)
                .put("class_factors", strings(factors)))
        }
        TorsionCmd::Bounds { g, p, outer, b } => {
            let g = load_graph(&g.graph)?;
            let t = torsion::full_group_bounds(&g, p, outer, b.aut_bound).map_err(fail)?;
            Ok(CommandResult::ok()
                .put("group", if outer { "Out" } else { "Aut" })
                .put("p", p)
                .put("nu", t.nu.to_string())
                .put("rank", t.rank.to_string()))
        }
    }
}

fn obstruct_cmd(a: ObstructArgs) -> CmdResult {
    let s = load_graph(&a.source)?;
    let t = load_graph(&a.target)?;
    let report = torsion::obstruction_report(&s, &t, a.b.aut_bound).map_err(fail)?;
    let blocked: Vec<String> = report.violations().iter().map(|c| c.name.to_string()).collect();
    let mut r = CommandResult::new(if report.blocked() { Status::Blocked } else { Status::Ok });
    r = r.put("blocked", if blocked.is_empty() { "none".to_string() } else { blocked.join(", ") });
    for c in &report.checks {
        r = r.note(format!("{}: {}", c.name, c.detail));
    }
    Ok(r)
}

fn run(cli: Cli) -> CommandResult {
    let out = match cli.command {
        Command::Graph(c) => graph_cmd(c),
        Command::Word(c) => word_cmd(c),
        Command::Auto(c) => auto_cmd(c),
        Command::Day(DayCmd::Verify(a)) => day_report(a),
        Command::Shifts(c) => shifts_cmd(c),
        Command::Lifts(c) => lifts_cmd(c),
        Command::Subgroup(c) => subgroup_cmd(c),
        Command::Embed(c) => embed_cmd(c),
        Command::Torsion(c) => torsion_cmd(c),
        Command::Obstruct(a) => obstruct_cmd(a),
    };
    out.unwrap_or_else(CommandResult::error)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let result = run(cli);
    let text = if json { result.render_json() } else { result.render_text() };
    print!("{text}");
    ExitCode::from(result.status.exit_code() as u8)
}
