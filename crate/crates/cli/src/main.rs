use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ghat::action::{fixed_point_algebra, freeness_obstruction};
use ghat::cocycle::{
    coboundary_residual, small_coboundary, trivialize_1cocycle, vanish2_explicit,
};
use ghat::crossed::CrossedProduct;
use ghat::double::{double_from_commuting, DoubleDual, QuantumDouble};
use ghat::group::{Group, GroupJson, PermGenerators, DEFAULT_ORDER_CAP};
use ghat::instances;
use ghat::io;
use ghat::model::{product_model_action, stabilization_residual, DEFAULT_LEVEL_CAP};
use ghat::rep::Dual;
use ghat::twisted::{perturbation_comparison, TwistedCrossedProduct};
use ghat::verify::run_verify_suite;

#[derive(Parser)]
#[command(name = "ghat", version, about = "Actions of finite group duals on matrix algebras")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Pass threshold for residuals.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Write the full result as JSON to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Irreducible representations and their checks.
    Irreps {
        #[arg(long)]
        group: String,
    },
    /// Fusion coefficients N_{πρ}^σ and the intertwiner calculus.
    Fusion {
        #[arg(long)]
        group: String,
    },
    /// Product model action at a finite level.
    Model {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Crossed product by the model action.
    Crossed {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
    },
    /// Twisted crossed product of a perturbation cocycle.
    Twisted {
        /// Run the built-in perturbed example.
        #[arg(long)]
        demo: bool,
        #[arg(long, default_value = "S3")]
        group: String,
    },
    /// Quantum double inclusion inside the crossed product by Ĝ×Ĝ.
    Double {
        #[arg(long)]
        group: String,
    },
    /// Trivialization of 1- and 2-cocycles on seeded examples.
    CocycleDemo {
        #[arg(long, default_value = "S3")]
        group: String,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "Z2,Z3,Z4,S3,D4,Q8")]
        groups: Vec<String>,
        /// Leave timings out of the JSON output.
        #[arg(long)]
        deterministic: bool,
    },
}

/// Builtin name, or a JSON file holding a table `{"order","table"}` or `{"degree","generators"}`.
fn load_group(arg: &str) -> Result<Group> {
    let path = Path::new(arg);
    if !path.exists() {
        return Ok(Group::builtin(arg, DEFAULT_ORDER_CAP)?);
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    let value: Value = serde_json::from_str(&text).map_err(io::IoError::from)?;
    if value.get("generators").is_some() {
        let p: PermGenerators = io::parse(&text)?;
        Ok(Group::from_permutations(&p, DEFAULT_ORDER_CAP)?)
    } else {
        let g: GroupJson = io::parse(&text)?;
        Ok(io::group_from_json(&g)?)
    }
}

fn load_dual(arg: &str, seed: u64, tol: f64) -> Result<Arc<Dual>> {
    let g = load_group(arg)?;
    Ok(Arc::new(Dual::compute(&g, seed, tol)?))
}

/// A named residual compared against its bound.
struct Line {
    name: String,
    residual: f64,
    bound: f64,
}

impl Line {
    fn new(name: impl Into<String>, residual: f64, bound: f64) -> Line {
        Line { name: name.into(), residual, bound }
    }

    fn pass(&self) -> bool {
        self.residual < self.bound
    }
}

struct Outcome {
    lines: Vec<Line>,
    info: Vec<String>,
    json: Value,
}

impl Outcome {
    fn pass(&self) -> bool {
        self.lines.iter().all(Line::pass)
    }

    fn print(&self) {
        for s in &self.info {
            println!("{s}");
        }
        for l in &self.lines {
            let tag = if l.pass() { "ok  " } else { "FAIL" };
            println!("{tag} {:<40} {:>10.3e}  (< {:.1e})", l.name, l.residual, l.bound);
        }
    }

    fn with_checks(mut self) -> Value {
        let checks: Vec<Value> = self
            .lines
            .iter()
            .map(|l| json!({"check": l.name, "residual": l.residual, "bound": l.bound, "pass": l.pass()}))
            .collect();
        let pass = self.pass();
        if let Value::Object(m) = &mut self.json {
            m.insert("checks".into(), Value::Array(checks));
            m.insert("pass".into(), Value::Bool(pass));
        }
        self.json
    }
}

fn irreps(group: &str, seed: u64, tol: f64) -> Result<Outcome> {
    let dual = load_dual(group, seed, tol)?;
    let rep = dual.check_irreps();
    let mut info = vec![format!("{}: order {}, {} classes", dual.group.label(), dual.order(), dual.num_classes())];
    let reps: Vec<usize> = dual.group.conjugacy_classes().iter().map(|c| c[0]).collect();
    info.push(format!("  class representatives {reps:?}"));
    for r in &dual.irreps {
        let ch: Vec<String> = reps.iter().map(|&x| r.character[x]).map(|z| format!("{:.3}{:+.3}i", z.re, z.im)).collect();
        info.push(format!("  class {} dim {}  χ = [{}]", r.class_index, r.dim, ch.join(", ")));
    }
    let sq = rep.sum_of_squares.abs_diff(dual.order()) as f64;
    Ok(Outcome {
        lines: vec![Line::new("irreps", rep.max_residual(), tol), Line::new("sum of squares", sq, 0.5)],
        info,
        json: json!({"dual": io::dual_to_json(&dual)}),
    })
}

fn fusion(group: &str, seed: u64, tol: f64) -> Result<Outcome> {
    let dual = load_dual(group, seed, tol)?;
    let k = dual.num_classes();
    let mut info = vec![format!("{}: fusion rules over classes 0..{k}", dual.group.label())];
    let mut table = Vec::new();
    for pi in 0..k {
        let mut row = Vec::new();
        for rho in 0..k {
            let f = dual.fusion_coefficients(pi, rho);
            let terms: Vec<String> = f
                .iter()
                .map(|(s, m)| if *m == 1 { format!("{s}") } else { format!("{m}·{s}") })
                .collect();
            info.push(format!("  {pi} ⊗ {rho} = {}", terms.join(" + ")));
            row.push(f.into_iter().map(|(s, m)| json!({"class": s, "multiplicity": m})).collect::<Vec<_>>());
        }
        table.push(row);
    }
    let c = dual.check_calculus();
    let b = 10.0 * tol;
    Ok(Outcome {
        lines: vec![
            Line::new("onb orthonormality", c.orthonormality, b),
            Line::new("onb completeness", c.completeness, b),
            Line::new("intertwining", c.intertwining, b),
            Line::new("dual sum", c.dual_sum, b),
            Line::new("frobenius basis", c.frobenius, b),
            Line::new("recoupling unitarity", c.recoupling, b),
            Line::new("dimension count", if c.dimension_count_ok { 0.0 } else { 1.0 }, 0.5),
        ],
        info,
        json: json!({"group": dual.group.label(), "dims": dual.dims(), "fusion": table}),
    })
}

fn model(group: &str, level: usize, seed: u64, tol: f64) -> Result<Outcome> {
    let dual = load_dual(group, seed, tol)?;
    let m = product_model_action(dual.clone(), level, DEFAULT_LEVEL_CAP)?;
    let rep = m.action.check();
    let stab = stabilization_residual(dual.clone(), level, DEFAULT_LEVEL_CAP)?;
    let mut info = vec![format!("{}: model action level {level} on M_{}", dual.group.label(), m.action.n)];
    let mut obstruction = Vec::new();
    let mut fixed = None;
    if m.action.n <= 16 {
        let f = fixed_point_algebra(&m.action).len();
        info.push(format!("  fixed-point algebra dimension {f}"));
        fixed = Some(f);
        for pi in 0..dual.num_classes() {
            obstruction.push(freeness_obstruction(&m.action, pi));
        }
        info.push(format!("  freeness obstruction per class {obstruction:?}"));
    }
    Ok(Outcome {
        lines: vec![Line::new("action", rep.max_residual(), 100.0 * tol), Line::new("stabilization", stab, 100.0 * tol)],
        info,
        json: json!({
            "group": dual.group.label(),
            "level": level,
            "N": m.action.n,
            "fixed_point_dimension": fixed,
            "freeness_obstruction": obstruction,
            "action": io::action_to_json(&m.action),
        }),
    })
}

fn crossed(group: &str, level: usize, seed: u64, tol: f64) -> Result<Outcome> {
    let dual = load_dual(group, seed, tol)?;
    let m = product_model_action(dual.clone(), level, DEFAULT_LEVEL_CAP)?;
    let cp = CrossedProduct::build(&m.action, tol.max(1e-9))?;
    let rep = cp.report();
    let n = cp.n;
    let want = n * n * dual.order();
    let fixed = cp.dual_fixed_point_dimension();
    let b = 100.0 * tol;
    Ok(Outcome {
        lines: vec![
            Line::new("dimension", rep.basis_rank.abs_diff(want) as f64, 0.5),
            Line::new("implementing", rep.implementing, b),
            Line::new("lambda representation", rep.representation, b),
            Line::new("expectation of lambda", rep.expectation_of_lambda, b),
            Line::new("jones projection", rep.jones_projection, b),
            Line::new("E(e) = 1/|G|", rep.jones_expectation, b),
            Line::new("dual fixed points = M", fixed.abs_diff(n * n) as f64, 0.5),
        ],
        info: vec![format!("{}: crossed product of M_{n}, dimension {}", dual.group.label(), rep.basis_rank)],
        json: json!({"group": dual.group.label(), "N": n, "dimension": rep.basis_rank, "dual_fixed_points": fixed}),
    })
}

fn twisted(group: &str, demo: bool, seed: u64, tol: f64) -> Result<Outcome> {
    if !demo {
        bail!("only the built-in example is available; pass --demo");
    }
    let dual = load_dual(group, seed, tol)?;
    let (alpha, w, ta) = instances::perturbed_twisted(&dual, seed);
    let tcp = TwistedCrossedProduct::build(&ta, tol.max(1e-9))?;
    let rep = tcp.report();
    let cp = CrossedProduct::build(&alpha, tol.max(1e-9))?;
    let b = 10.0 * tol;
    Ok(Outcome {
        lines: vec![
            Line::new("twisted action", ta.check().max_residual(), b),
            Line::new("unitarity", rep.unitarity, b),
            Line::new("implementing", rep.implementing, b),
            Line::new("product rule", rep.product, b),
            Line::new("conjugate", rep.conjugate, b),
            Line::new("expectation", rep.expectation, b),
            Line::new("U identity", rep.conjugate_identity.max(rep.conjugate_identity_intermediate), tol),
            Line::new("identification with crossed product", perturbation_comparison(&tcp, &cp, &w), b),
        ],
        info: vec![format!(
            "{}: perturbed action on M_2, twisted crossed product of dimension {}",
            dual.group.label(),
            rep.dimension
        )],
        json: json!({"group": dual.group.label(), "dimension": rep.dimension, "cocycle": io::cocycle_to_json(&ta)}),
    })
}

fn double(group: &str, seed: u64, tol: f64) -> Result<Outcome> {
    let dual = load_dual(group, seed, tol)?;
    let dd = DoubleDual::build(dual.clone(), DEFAULT_ORDER_CAP)?;
    let mut lines = Vec::new();
    let mut info = Vec::new();
    let mut out = Vec::new();
    let mut cases = vec![("trivial on C", ghat::action::DualAction::trivial(dd.dual.clone(), 1))];
    if dual.order() <= 6 {
        let lam = ghat::model::model_representation(&dual);
        cases.push(("Ad λ ⊗ Ad λ", double_from_commuting(&dd, &lam, &lam, tol.max(1e-9))?));
    }
    for (name, action) in cases {
        let qd = QuantumDouble::build(&dd, &action, tol.max(1e-9))?;
        let rep = qd.report();
        let b = 10.0 * tol;
        info.push(format!(
            "{name}: dim M = {}, dim N = {}, fixed points of the diagonal = {}{}",
            qd.cp.n * qd.cp.n,
            rep.dimension,
            rep.fixed_dimension,
            rep.ambient_fixed_dimension.map(|d| format!(" (ambient solve {d})")).unwrap_or_default()
        ));
        lines.push(Line::new(format!("{name}: w representation"), rep.representation.max_residual(), b));
        lines.push(Line::new(format!("{name}: u representation"), rep.u_representation.max_residual(), b));
        lines.push(Line::new(format!("{name}: diagonal invariance"), rep.invariance, b));
        lines.push(Line::new(format!("{name}: factorization"), rep.factorization, b));
        lines.push(Line::new(format!("{name}: expectation"), rep.expectation, b));
        lines.push(Line::new(
            format!("{name}: N = fixed points"),
            rep.dimension.abs_diff(rep.fixed_dimension) as f64,
            0.5,
        ));
        out.push(json!({
            "action": name,
            "dim_M": qd.cp.n * qd.cp.n,
            "dim_N": rep.dimension,
            "fixed_point_dimension": rep.fixed_dimension,
            "ambient_fixed_point_dimension": rep.ambient_fixed_dimension,
        }));
    }
    Ok(Outcome { lines, info, json: json!({"group": dual.group.label(), "cases": out}) })
}

fn cocycle_demo(group: &str, seed: u64, tol: f64) -> Result<Outcome> {
    let dual = load_dual(group, seed, tol)?;
    let b = 100.0 * tol;
    let mut lines = Vec::new();
    let (alpha, _, w) = instances::coboundary_instance(&dual, seed);
    let v = trivialize_1cocycle(&alpha, &w, seed)?;
    lines.push(Line::new("1-cocycle trivialized", coboundary_residual(&alpha, &w, &v), b));
    let (ta, f) = instances::product_form_instance(&dual, seed);
    let r = vanish2_explicit(&ta, &f)?;
    lines.push(Line::new("2-cocycle explicit coboundary", r.residual.max(r.unitarity), b));
    let mut sweep = Vec::new();
    let mut info = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3] {
        let (ta, k) = instances::model_cocycle_instance(&dual, seed, Some(eps));
        let s = small_coboundary(&ta, &k, seed)?;
        info.push(format!(
            "δ = {:.3e}: ‖w̄ − 1‖₂ = {:.3e}, ‖f² − f‖₂ = {:.3e} ≤ Cδ = {:.3e}",
            s.delta,
            s.distance,
            s.f_defect,
            s.constant * s.delta
        ));
        lines.push(Line::new(format!("small coboundary (eps {eps:.0e})"), s.residual, b));
        sweep.push(json!({"delta": s.delta, "distance": s.distance, "f_defect": s.f_defect, "constant": s.constant}));
    }
    Ok(Outcome { lines, info, json: json!({"group": dual.group.label(), "small_coboundary": sweep}) })
}

fn run(cli: &Cli) -> Result<bool> {
    let (seed, tol) = (cli.seed, cli.tol);
    let outcome = match &cli.command {
        Command::Verify { groups, deterministic } => {
            let report = run_verify_suite(groups, seed, tol);
            for c in &report.checks {
                let tag = if c.pass { "ok  " } else { "FAIL" };
                let note = c.note.as_deref().map(|n| format!("  [{n}]")).unwrap_or_default();
                println!("{tag} {:<48} {:>10.3e}  (< {:.1e}){note}", c.check, c.residual, c.bound);
            }
            let failed = report.failures().count();
            println!("{} checks, {failed} failed", report.checks.len());
            if let Some(path) = &cli.json {
                let text = if *deterministic { report.body() } else { report.to_json() };
                std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            return Ok(report.passed);
        }
        Command::Irreps { group } => irreps(group, seed, tol)?,
        Command::Fusion { group } => fusion(group, seed, tol)?,
        Command::Model { group, level } => model(group, *level, seed, tol)?,
        Command::Crossed { group, level } => crossed(group, *level, seed, tol)?,
        Command::Twisted { demo, group } => twisted(group, *demo, seed, tol)?,
        Command::Double { group } => double(group, seed, tol)?,
        Command::CocycleDemo { group } => cocycle_demo(group, seed, tol)?,
    };
    outcome.print();
    let pass = outcome.pass();
    if let Some(path) = &cli.json {
        io::export_json(&outcome.with_checks(), path)?;
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
