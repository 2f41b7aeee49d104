use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use preproj_core::algebra::{omega_tensor_dims, pi_table, sigma_prime_table, sigma_table, GradedAlgebraTable, Grading};
use preproj_core::fill::{default_base_sink, fill, lambda_feasibility, verify_lambda_relations, Feasibility};
use preproj_core::iso::{build_delta, build_eta, build_eta_prime, correspondence, verify_graded_iso, IsoReport};
use preproj_core::knit::{knit, verify_meshes, KnitState};
use preproj_core::mesh::MeshEngine;
use preproj_core::{parse_quiver, Field, Quiver, Scalar};
use serde_json::json;

const SCHEMA: &str = "preproj/1";

#[derive(Parser)]
#[command(name = "preproj", version, about = "Preprojective components, fillings and preprojective algebras of quivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Quiver file, or the quiver text itself (e.g. "1; 2; a:2->1").
    #[arg(long)]
    quiver: String,
    /// Q, or Fp:<p> for the prime field with p elements.
    #[arg(long, default_value = "Q")]
    field: String,
    #[arg(long, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Json,
    Dot,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Knit the preprojective component and re-verify every mesh.
    Knit {
        #[command(flatten)]
        common: Common,
        /// Last level to knit (default: until every orbit is injective, Dynkin only).
        #[arg(long)]
        max_level: Option<usize>,
    },
    /// Build G_ij for a given λ and check every λ-relation.
    Fill {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        /// Last level to check (default: all levels for Dynkin quivers, 4 otherwise).
        #[arg(long)]
        max_level: Option<usize>,
        #[arg(long)]
        base_sink: Option<String>,
    },
    /// Decide whether nonzero rescalings of the irreducible maps can satisfy the λ-relations.
    Feasible {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
    },
    /// Print Π, Σ, Σ′ and the tensor powers of Ω, with the Π/Σ/Σ′ correspondence.
    Tables {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        base_sink: Option<String>,
    },
    /// Verify that η, η′ and δ are graded algebra isomorphisms.
    VerifyIso {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        base_sink: Option<String>,
    },
}

enum Failure {
    Usage(String),
}

impl From<preproj_core::Error> for Failure {
    fn from(e: preproj_core::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

fn load_quiver(spec: &str) -> Result<Arc<Quiver>, Failure> {
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec).map_err(|e| Failure::Usage(format!("cannot read {spec}: {e}")))?
    } else {
        spec.to_string()
    };
    Ok(Arc::new(parse_quiver(&text)?))
}

fn load(common: &Common) -> Result<(Arc<Quiver>, Field), Failure> {
    let field: Field = common.field.parse()?;
    Ok((load_quiver(&common.quiver)?, field))
}

fn parse_lambda(field: Field, text: &str) -> Result<Scalar, Failure> {
    let l = field.parse_scalar(text)?;
    if l.is_zero() {
        return Err(Failure::Usage(format!("λ = {text} is zero in {field}")));
    }
    Ok(l)
}

fn base_sink(q: &Quiver, id: &Option<String>) -> Result<usize, Failure> {
    match id {
        Some(id) => {
            let v = q
                .vertex(id)
                .ok_or_else(|| Failure::Usage(format!("unknown vertex `{id}`")))?;
            if !q.arrows_from(v).is_empty() {
                return Err(Failure::Usage(format!("vertex `{id}` is not a sink")));
            }
            Ok(v)
        }
        None => default_base_sink(q).ok_or_else(|| Failure::Usage("the quiver has no sink".into())),
    }
}

fn knit_levels(q: &Arc<Quiver>, field: Field, max_level: Option<usize>) -> Result<KnitState, Failure> {
    if max_level.is_none() && q.dynkin_type().is_none() {
        return Err(Failure::Usage("the quiver is not of Dynkin type; pass --max-level".into()));
    }
    Ok(knit(q, field, max_level)?)
}

fn pretty(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

fn no_dot() -> Failure {
    Failure::Usage("--emit dot is only available for `knit`".into())
}

fn dims_text(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

fn cmd_knit(common: &Common, max_level: Option<usize>) -> Outcome {
    let (q, field) = load(common)?;
    let st = knit_levels(&q, field, max_level)?;
    let report = verify_meshes(&st);
    let ok = report.all_ok();
    let out = match common.emit {
        Emit::Dot => st.to_dot(),
        Emit::Json => pretty(json!({
            "schema": SCHEMA,
            "command": "knit",
            "field": field,
            "quiver": q.to_text(),
            "knit": st.to_json(),
            "meshes": report,
            "pass": ok,
        })),
        Emit::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "quiver {}  field {field}", q.to_text());
            for (n, i, m) in st.representatives() {
                let _ = writeln!(s, "  τ^-{n} P_{:<4} {}", q.vertex_id(i), dims_text(m.dims()));
            }
            let _ = writeln!(s, "representatives {}  complete {}", st.num_representatives(), st.is_complete());
            for c in &report.checks {
                let verdict = if c.ok { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "  mesh ({}, {}) {verdict}", c.level, c.vertex);
            }
            let _ = writeln!(s, "meshes {}", if ok { "PASS" } else { "FAIL" });
            s
        }
    };
    Ok((out, ok))
}

fn cmd_fill(common: &Common, lambda: &str, max_level: Option<usize>, base: &Option<String>) -> Outcome {
    let (q, field) = load(common)?;
    let lambda = parse_lambda(field, lambda)?;
    let base = base_sink(&q, base)?;
    let max_level = max_level.or(if q.dynkin_type().is_some() { None } else { Some(4) });
    let st = knit_levels(&q, field, max_level)?;
    let res = fill(&st, &lambda, base)?;
    let report = verify_lambda_relations(&res, st.levels())?;
    let ok = report.all_zero();
    let out = match common.emit {
        Emit::Dot => return Err(no_dot()),
        Emit::Json => pretty(json!({
            "schema": SCHEMA,
            "command": "fill",
            "field": field,
            "quiver": q.to_text(),
            "filling": res.to_json(),
            "relations": report,
            "pass": ok,
        })),
        Emit::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "λ = {lambda}  field {field}  base sink {}", q.vertex_id(base));
            for (a, c) in q.arrows().iter().zip(&res.c) {
                let note = if c.determined { "" } else { " (no level-1 map; normalized to 1)" };
                let _ = writeln!(s, "  c_{} = {}{note}", a.id, c.value);
            }
            for (j, p) in res.phi_at_vertex.iter().enumerate() {
                let _ = writeln!(s, "  φ(w({}, {})) = {p}", q.vertex_id(j), q.vertex_id(base));
            }
            for c in &report.checks {
                let verdict = if c.zero { "PASS" } else { "FAIL" };
                let _ = writeln!(s, "  relation ({}, {}) {verdict}", c.level, c.vertex);
            }
            let _ = writeln!(s, "relations {}", if ok { "PASS" } else { "FAIL" });
            s
        }
    };
    Ok((out, ok))
}

fn cmd_feasible(common: &Common, lambda: &str) -> Outcome {
    let (q, field) = load(common)?;
    let lambda = parse_lambda(field, lambda)?;
    let st = knit(&q, field, Some(2))?;
    let report = lambda_feasibility(&st, &lambda)?;
    let ok = report.is_feasible();
    let verdict = match &report.result {
        Feasibility::Feasible { .. } => "FEASIBLE",
        Feasibility::Infeasible { .. } => "INFEASIBLE",
        Feasibility::Undetermined { .. } => "UNDETERMINED",
    };
    let out = match common.emit {
        Emit::Dot => return Err(no_dot()),
        Emit::Json => pretty(json!({
            "schema": SCHEMA,
            "command": "feasible",
            "field": field,
            "quiver": q.to_text(),
            "verdict": verdict,
            "report": report,
        })),
        Emit::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "λ = {lambda}  field {field}");
            let _ = writeln!(
                s,
                "  {} equations in {} unknowns, solution space of dimension {}",
                report.equations.len(),
                report.arrows.len(),
                report.solution_space_dim
            );
            match &report.result {
                Feasibility::Feasible { witness } => {
                    for (a, x) in report.arrows.iter().zip(witness) {
                        let _ = writeln!(s, "  x_{a} = {x}");
                    }
                }
                Feasibility::Infeasible { certificates, exhaustive } => {
                    for c in certificates {
                        let terms: Vec<String> = c.combination.iter().map(|(k, v)| format!("{v}·E{k}")).collect();
                        let _ = writeln!(s, "  x_{} = {}  forces x_{} = 0", c.arrow, terms.join(" + "), c.arrow);
                    }
                    if *exhaustive {
                        let _ = writeln!(s, "  every point of the solution space has a zero coordinate");
                    }
                }
                Feasibility::Undetermined { tries } => {
                    let _ = writeln!(s, "  no nonvanishing point among {tries} random samples");
                }
            }
            let _ = writeln!(s, "{verdict}");
            s
        }
    };
    Ok((out, ok))
}

struct Algebras {
    pi_starred: Arc<GradedAlgebraTable>,
    pi_unstarred: Arc<GradedAlgebraTable>,
    sigma: Arc<GradedAlgebraTable>,
    sigma_prime: Arc<GradedAlgebraTable>,
}

fn build_algebras(q: &Arc<Quiver>, field: Field, max_degree: Option<usize>, base: usize) -> Result<Algebras, Failure> {
    if max_degree.is_none() && q.dynkin_type().is_none() {
        return Err(Failure::Usage("the quiver is not of Dynkin type; pass --max-degree".into()));
    }
    q.require_tree()?;
    let st = knit(q, field, Some(2))?;
    let res = fill(&st, &(-field.one()), base)?;
    let engine = Arc::new(MeshEngine::commutativity(q.clone(), field, base)?);
    Ok(Algebras {
        pi_starred: Arc::new(pi_table(q, &field.one(), Grading::Starred, max_degree)?),
        pi_unstarred: Arc::new(pi_table(q, &field.one(), Grading::Unstarred, max_degree)?),
        sigma: Arc::new(sigma_table(&engine, max_degree)?),
        sigma_prime: Arc::new(sigma_prime_table(&res, max_degree)?),
    })
}

fn cmd_tables(common: &Common, max_degree: Option<usize>, base: &Option<String>) -> Outcome {
    let (q, field) = load(common)?;
    let base = base_sink(&q, base)?;
    let alg = build_algebras(&q, field, max_degree, base)?;
    let om_max = max_degree.unwrap_or_else(|| alg.sigma_prime.degree_dims().len());
    let omega = omega_tensor_dims(&q, field, om_max)?;
    let eta = build_eta(&alg.sigma, &alg.pi_starred)?;
    let eta_prime = build_eta_prime(&alg.sigma_prime, &alg.pi_starred)?;
    let rows = correspondence(&eta, &eta_prime)?;
    let out = match common.emit {
        Emit::Dot => return Err(no_dot()),
        Emit::Json => pretty(json!({
            "schema": SCHEMA,
            "command": "tables",
            "field": field,
            "quiver": q.to_text(),
            "base_sink": q.vertex_id(base),
            "pi": alg.pi_starred.to_json(true)?,
            "sigma": alg.sigma.to_json(true)?,
            "sigma_prime": alg.sigma_prime.to_json(true)?,
            "omega_tensor_dims": omega,
            "correspondence": rows,
        })),
        Emit::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "quiver {}  field {field}  base sink {}", q.to_text(), q.vertex_id(base));
            let _ = writeln!(s, "  Π   by starred letters   {}", dims_text(&alg.pi_starred.degree_dims()));
            let _ = writeln!(s, "  Σ   by degree            {}", dims_text(&alg.sigma.degree_dims()));
            let _ = writeln!(s, "  Σ′  by degree            {}", dims_text(&alg.sigma_prime.degree_dims()));
            let _ = writeln!(s, "  Ω^⊗t                     {}", dims_text(&omega));
            let width = |f: fn(&preproj_core::iso::CorrespondenceRow) -> &String| {
                rows.iter().map(|r| f(r).chars().count()).max().unwrap_or(0).max(4)
            };
            let (w1, w2) = (width(|r| &r.pi), width(|r| &r.sigma));
            let mut current = None;
            for r in &rows {
                if current.as_ref() != Some(&r.vertex) {
                    current = Some(r.vertex.clone());
                    let head = format!("Πe{}", r.vertex);
                    let _ = writeln!(s, "\n  {:<w1$} | {:<w2$} | Σ′", head, "Σ");
                }
                let _ = writeln!(s, "  {:<w1$} | {:<w2$} | {}", r.pi, r.sigma, r.sigma_prime);
            }
            s
        }
    };
    Ok((out, true))
}

fn iso_line(r: &IsoReport) -> String {
    let verdict = if r.passed() { "PASS" } else { "FAIL" };
    format!(
        "{:<6} {verdict}  dims {} -> {}  pieces {}  relations {}  products {}{}",
        r.map,
        dims_text(&r.source_dims),
        dims_text(&r.target_dims),
        r.pieces.len(),
        r.relations.len(),
        r.products_checked,
        if r.product_mismatches.is_empty() {
            String::new()
        } else {
            format!("  ({} mismatches)", r.product_mismatches.len())
        }
    )
}

fn cmd_verify(common: &Common, max_degree: Option<usize>, base: &Option<String>) -> Outcome {
    let (q, field) = load(common)?;
    let base = base_sink(&q, base)?;
    let alg = build_algebras(&q, field, max_degree, base)?;
    let reports = [
        verify_graded_iso(&build_eta(&alg.sigma, &alg.pi_starred)?)?,
        verify_graded_iso(&build_eta_prime(&alg.sigma_prime, &alg.pi_unstarred)?)?,
        verify_graded_iso(&build_delta(&alg.sigma, &alg.sigma_prime)?)?,
    ];
    let ok = reports.iter().all(IsoReport::passed);
    let out = match common.emit {
        Emit::Dot => return Err(no_dot()),
        Emit::Json => pretty(json!({
            "schema": SCHEMA,
            "command": "verify-iso",
            "field": field,
            "quiver": q.to_text(),
            "base_sink": q.vertex_id(base),
            "max_degree": max_degree,
            "reports": reports,
            "pass": ok,
        })),
        Emit::Table => {
            let mut s = String::new();
            let scope = match max_degree {
                Some(d) => format!("up to degree {d}"),
                None => "in all degrees".into(),
            };
            let _ = writeln!(s, "quiver {}  field {field}  {scope}", q.to_text());
            for r in &reports {
                let _ = writeln!(s, "  {}", iso_line(r));
                for m in r.product_mismatches.iter().take(5) {
                    let _ = writeln!(s, "    {} · {}: expected {}, found {}", m.left, m.right, m.expected, m.found);
                }
            }
            let _ = writeln!(s, "{}", if ok { "PASS" } else { "FAIL" });
            s
        }
    };
    Ok((out, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Knit { common, max_level } => cmd_knit(common, *max_level),
        Command::Fill { common, lambda, max_level, base_sink } => cmd_fill(common, lambda, *max_level, base_sink),
        Command::Feasible { common, lambda } => cmd_feasible(common, lambda),
        Command::Tables { common, max_degree, base_sink } => cmd_tables(common, *max_degree, base_sink),
        Command::VerifyIso { common, max_degree, base_sink } => cmd_verify(common, *max_degree, base_sink),
    };
    match outcome {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
