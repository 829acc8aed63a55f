use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use holonomy_core::flatten::{flatten, FlattenProblem, Objective};
use holonomy_core::generate::{generate, GenMode};
use holonomy_core::graph::{BipartiteGraph, CycleFamily, Edge, FamilyPolicy, Vertex};
use holonomy_core::group::{GroupContext, GroupKind, MetricKind};
use holonomy_core::holonomy::{loop_report, trace_phase, BerrySummary, ContextReport, Weighting};
use holonomy_core::io::{
    human, write_atomic, ClosedFormEntry, CoherenceReport, FlattenSummary, InstanceDocument, InstanceSummary,
    ReportDocument,
};
use holonomy_core::scenarios;
use holonomy_core::stochastic::{estimate_kappa_stoch, z2_cycle_odds, DistributionSpec};
use holonomy_core::tolerances;

#[derive(Parser)]
#[command(name = "holonomy", version, about = "Holonomy and contextuality of group-valued bipartite networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Contextuality index of an instance.
    Index(IndexArgs),
    /// Search for a global section.
    Coherence(CoherenceArgs),
    /// Monte Carlo estimate of the stochastic index.
    Sample(SampleArgs),
    /// Minimize the index by gradient descent on the free edges.
    Flatten(FlattenArgs),
    /// Run a built-in reference scenario.
    Scenario(ScenarioArgs),
    /// Generate a random instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct CycleOpts {
    /// four-cycles, simple-cycles:L or fundamental-basis.
    #[arg(long)]
    family: Option<FamilyPolicy>,
    /// discrete, frobenius, operator, trace, schatten:P, geodesic, log-operator, hilbert-schmidt.
    #[arg(long)]
    metric: Option<MetricKind>,
    /// Count every cycle in both traversal directions.
    #[arg(long)]
    both_orientations: bool,
}

#[derive(Args)]
struct IndexArgs {
    instance: PathBuf,
    #[command(flatten)]
    cycles: CycleOpts,
    #[arg(long)]
    flat_tol: Option<f64>,
    /// Also report trace phases.
    #[arg(long)]
    berry: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoherenceArgs {
    instance: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(id = "dist", required = true, multiple = false)]
struct DistOpts {
    #[arg(long, group = "dist")]
    bernoulli: Option<f64>,
    #[arg(long, group = "dist")]
    haar_ball: Option<f64>,
    #[arg(long, group = "dist")]
    mat_gauss: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    /// Instance supplying the graph (weights are ignored).
    instance: Option<PathBuf>,
    #[command(flatten)]
    dist: DistOpts,
    /// Group for --mat-gauss without an instance.
    #[arg(long)]
    group: Option<GroupKind>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 2)]
    visible: usize,
    #[arg(long, default_value_t = 2)]
    hidden: usize,
    #[command(flatten)]
    cycles: CycleOpts,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep every per-sample index in the report.
    #[arg(long)]
    keep_samples: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlattenArgs {
    instance: PathBuf,
    #[command(flatten)]
    cycles: CycleOpts,
    /// Edges held fixed: `v0-h1,v1-h0`, `0:1,1:0`, or `all`.
    #[arg(long)]
    freeze: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    kappa_stop: f64,
    #[arg(long, default_value = "kappa")]
    objective: Objective,
    /// Final weighting as an instance document.
    #[arg(long)]
    out_instance: Option<PathBuf>,
    /// Iteration trace; defaults to the instance output with a `.csv` extension.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// z2-paper, su2-triangle, oddclass-s1 or su3-random.
    name: String,
    /// su2-triangle angles.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.3, 0.4, 0.5])]
    theta: Vec<f64>,
    /// oddclass-s1 truncation.
    #[arg(long, default_value_t = 10)]
    truncation: usize,
    /// oddclass-s1 exponents.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.4, -0.5, 0.7], allow_hyphen_values = true)]
    eps: Vec<f64>,
    /// oddclass-s1: use i·A.
    #[arg(long)]
    skew: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(id = "mode", multiple = false)]
struct ModeOpts {
    #[arg(long, group = "mode")]
    coherent: bool,
    #[arg(long, group = "mode")]
    noise: Option<f64>,
    #[arg(long, group = "mode")]
    random: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    group: GroupKind,
    /// Matrix size; the truncation N for diagop (dimension 2N+1).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 2)]
    visible: usize,
    #[arg(long, default_value_t = 2)]
    hidden: usize,
    #[command(flatten)]
    mode: ModeOpts,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome with an exit status: `Ok(true)` maps to 0, `Ok(false)` to 1.
type Outcome = Result<bool>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Index(a) => index(a),
        Command::Coherence(a) => coherence(a),
        Command::Sample(a) => sample(a),
        Command::Flatten(a) => run_flatten(a),
        Command::Scenario(a) => scenario(a),
        Command::Gen(a) => gen(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn context(kind: GroupKind, dim: Option<usize>) -> Result<GroupContext> {
    Ok(match kind {
        GroupKind::Z2 => GroupContext::z2(),
        GroupKind::SU2 => GroupContext::su2(),
        GroupKind::DiagOp => GroupContext::diag_op(dim.unwrap_or(1)),
        k => GroupContext::new(k, dim.ok_or_else(|| anyhow!("--dim is required for {}", k.name()))?)?,
    })
}

fn read_instance(path: &Path) -> Result<InstanceDocument> {
    InstanceDocument::read(path).with_context(|| format!("cannot load instance {}", path.display()))
}

fn family_for(graph: &BipartiteGraph, doc_family: Option<FamilyPolicy>, opts: &CycleOpts, doc_both: bool) -> Result<CycleFamily> {
    let policy = opts.family.or(doc_family).unwrap_or(FamilyPolicy::FourCycles);
    let fam = CycleFamily::generate(graph, policy)?;
    if fam.is_empty() {
        bail!("the {policy} family of this graph is empty; choose another with --family");
    }
    Ok(if opts.both_orientations || doc_both { fam.with_both_orientations() } else { fam })
}

fn emit_report(report: &ReportDocument, out: Option<&Path>) -> Result<()> {
    if let Some(path) = out {
        write_atomic(path, &report.emit()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn print_index(r: &ContextReport) {
    for c in &r.per_cycle {
        let mark = if c.fallback { "  (frobenius fallback)" } else { "" };
        println!("{:>3}  {}  iota = {}{}", c.id, c.cycle, human(c.iota), mark);
    }
    println!("kappa = {}  metric = {}  cycles = {}", human(r.kappa), r.metric, r.per_cycle.len());
    if let Some(b) = &r.berry {
        println!("kappa_berry = {}  signed = {}", human(b.kappa_berry), human(b.kappa_berry_signed));
    }
    println!("{}", if r.flat { "flat" } else { "not flat" });
}

fn index(a: IndexArgs) -> Outcome {
    let doc = read_instance(&a.instance)?;
    let metric = a.cycles.metric.or(doc.metric).unwrap_or_else(|| MetricKind::default_for(doc.group.kind()));
    let flat_tol = a.flat_tol.or(doc.flat_tol).unwrap_or(tolerances().flat);
    let mut report = if doc.is_loop() {
        let factors = doc.loop_factors()?;
        let labels = &doc.path_loop.as_ref().expect("loop").labels;
        let mut r = loop_report(&doc.group, labels, &factors, metric, flat_tol)?;
        if a.berry {
            let hol = holonomy_core::holonomy::ordered_product(&doc.group, &factors)?;
            r.berry = Some(BerrySummary::from_phases(vec![trace_phase(&hol)?]));
        }
        r
    } else {
        let w = doc.weighting()?;
        let fam = family_for(w.graph(), doc.family, &a.cycles, doc.both_orientations.unwrap_or(false))?;
        let mut r = w.contextuality_index(&fam, metric, flat_tol)?;
        if a.berry {
            r.berry = Some(w.berry_index(&fam)?);
        }
        r
    };
    report.flat_tol = flat_tol;
    print_index(&report);
    let flat = report.flat;
    let mut doc_out = ReportDocument::new("index");
    doc_out.instance = Some(InstanceSummary::of(&doc));
    doc_out.index = Some(report);
    emit_report(&doc_out, a.out.as_deref())?;
    Ok(flat)
}

fn coherence(a: CoherenceArgs) -> Outcome {
    let doc = read_instance(&a.instance)?;
    let w = doc.weighting()?;
    let tol = a.tol.unwrap_or(tolerances().flat);
    let result = w.find_section(tol)?;
    let rep = CoherenceReport::new(&result, tol);
    if rep.coherent {
        println!("coherent: max residual {}", human(rep.max_residual.unwrap_or(0.0)));
        let section = rep.section.as_deref().unwrap_or_default();
        if doc.group.kind() == GroupKind::Z2 {
            for e in section {
                let bit = e.value.bit.and_then(|b| b.value().ok()).unwrap_or(false);
                println!("  s({}) = {}", e.vertex, bit as u8);
            }
        } else {
            println!("  section over {} vertices (values in the --out report)", section.len());
        }
    } else {
        let v = rep.violation.expect("violation");
        println!(
            "not coherent: edge {}-{} residual {}",
            Vertex::Visible(v.edge.0),
            Vertex::Hidden(v.edge.1),
            human(v.residual)
        );
    }
    let coherent = rep.coherent;
    let mut out = ReportDocument::new("coherence");
    out.instance = Some(InstanceSummary::of(&doc));
    out.coherence = Some(rep);
    emit_report(&out, a.out.as_deref())?;
    Ok(coherent)
}

fn sample(a: SampleArgs) -> Outcome {
    let doc = a.instance.as_deref().map(read_instance).transpose()?;
    let graph = match &doc {
        Some(d) => d.weighting()?.graph().clone(),
        None => BipartiteGraph::complete(a.visible, a.hidden),
    };
    let dist = if let Some(p) = a.dist.bernoulli {
        DistributionSpec::bernoulli(p)
    } else if let Some(eps) = a.dist.haar_ball {
        DistributionSpec::haar_ball(eps)
    } else {
        let scale = a.dist.mat_gauss.expect("one distribution flag is required");
        let ctx = match (&doc, a.group) {
            (_, Some(kind)) => context(kind, a.dim)?,
            (Some(d), None) => d.group,
            (None, None) => bail!("--mat-gauss needs --group (and --dim) or an instance"),
        };
        DistributionSpec::gaussian(ctx, scale)
    };
    let ctx = dist.ctx();
    if let Some(d) = &doc {
        dist.validate_for(&d.group)?;
    }
    let metric = a.cycles.metric.or(doc.as_ref().and_then(|d| d.metric)).unwrap_or_else(|| MetricKind::default_for(ctx.kind()));
    let fam = family_for(&graph, doc.as_ref().and_then(|d| d.family), &a.cycles, false)?;
    let est = estimate_kappa_stoch(&graph, &dist, &fam, metric, a.n, a.seed, a.keep_samples)?;
    println!("kappa_stoch = {} +- {}  (n = {}, seed = {}, {})", human(est.mean), human(est.std_error), est.n_samples, est.seed, est.rng);

    let mut report = ReportDocument::new("sample");
    report.seed = Some(a.seed);
    if let DistributionSpec::BernoulliZ2 { p } = dist {
        let mut by_len: BTreeMap<usize, usize> = BTreeMap::new();
        for c in &fam.cycles {
            *by_len.entry(c.len()).or_default() += 1;
        }
        let entries: Vec<ClosedFormEntry> = by_len
            .into_iter()
            .map(|(length, cycles)| ClosedFormEntry { length, cycles, odds: z2_cycle_odds(p, length as u32) })
            .collect();
        let exact = entries.iter().map(|e| e.odds * e.cycles as f64).sum::<f64>() / fam.len() as f64;
        for e in &entries {
            println!("closed form, length {}: {} ({} cycles)", e.length, human(e.odds), e.cycles);
        }
        println!("closed-form kappa_stoch = {}", human(exact));
        report.closed_form = Some(entries);
    }
    report.instance = doc.as_ref().map(InstanceSummary::of);
    report.estimate = Some(est);
    emit_report(&report, a.out.as_deref())?;
    Ok(true)
}

fn parse_edge(token: &str) -> Result<Edge> {
    let t = token.trim();
    if let Some((v, h)) = t.split_once(':').filter(|(v, _)| !v.starts_with('v')) {
        return Ok((v.parse()?, h.parse()?));
    }
    let (v, h) = t.split_once(['-', ':']).ok_or_else(|| anyhow!("bad edge `{t}`"))?;
    match (v.parse::<Vertex>()?, h.parse::<Vertex>()?) {
        (Vertex::Visible(v), Vertex::Hidden(h)) => Ok((v, h)),
        _ => bail!("edge `{t}` must join a visible and a hidden vertex"),
    }
}

fn run_flatten(a: FlattenArgs) -> Outcome {
    let doc = read_instance(&a.instance)?;
    let w: Weighting = doc.weighting()?;
    let metric = a.cycles.metric.or(doc.metric).unwrap_or_else(|| MetricKind::default_for(doc.group.kind()));
    let fam = family_for(w.graph(), doc.family, &a.cycles, doc.both_orientations.unwrap_or(false))?;
    let mut prob = FlattenProblem::new(w.clone(), fam.clone(), metric);
    prob.eta = a.eta;
    prob.max_iter = a.max_iter;
    prob.kappa_stop = a.kappa_stop;
    prob.objective = a.objective;
    if let Some(spec) = &a.freeze {
        prob.frozen = if spec.trim() == "all" {
            w.graph().edges().iter().copied().collect()
        } else {
            spec.split(',').filter(|t| !t.trim().is_empty()).map(parse_edge).collect::<Result<_>>()?
        };
    }
    let trace = flatten(&prob)?;
    let initial = trace.iterates.first().map_or(f64::NAN, |i| i.kappa);
    println!(
        "kappa {} -> {} after {} iterations ({})",
        human(initial),
        human(trace.final_kappa()),
        trace.iterates.len().saturating_sub(1),
        if trace.converged { "converged" } else { "not converged" }
    );

    if let Some(path) = &a.out_instance {
        let mut out = InstanceDocument::from_weighting(&trace.weighting);
        out.family = Some(fam.policy);
        out.metric = Some(metric);
        out.both_orientations = fam.both_orientations.then_some(true);
        out.flat_tol = doc.flat_tol;
        write_atomic(path, &out.emit()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let trace_path = a.trace.clone().or_else(|| a.out_instance.as_ref().map(|p| p.with_extension("csv")));
    if let Some(path) = trace_path {
        write_atomic(&path, &trace.to_csv()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let mut report = ReportDocument::new("flatten");
    report.instance = Some(InstanceSummary::of(&doc));
    report.flatten = Some(FlattenSummary {
        objective: a.objective,
        converged: trace.converged,
        iterations: trace.iterates.len().saturating_sub(1),
        initial_kappa: initial,
        final_kappa: trace.final_kappa(),
    });
    emit_report(&report, a.out.as_deref())?;
    Ok(trace.converged)
}

fn scenario(a: ScenarioArgs) -> Outcome {
    let mut report = ReportDocument::new("scenario");
    let (summary, value) = match a.name.as_str() {
        "z2-paper" => {
            let r = scenarios::z2_paper()?;
            (r.summary(), serde_json::to_value(&r)?)
        }
        "su2-triangle" => {
            let r = scenarios::su2_triangle([a.theta[0], a.theta[1], a.theta[2]])?;
            (r.summary(), serde_json::to_value(&r)?)
        }
        "oddclass-s1" => {
            let r = scenarios::oddclass_s1(a.truncation, [a.eps[0], a.eps[1], a.eps[2]], a.skew)?;
            (r.summary(), serde_json::to_value(&r)?)
        }
        "su3-random" => {
            report.seed = Some(a.seed);
            let r = scenarios::su3_random(a.seed)?;
            (r.summary(), serde_json::to_value(&r)?)
        }
        other => return Err(scenarios::unknown(other).into()),
    };
    print!("{summary}");
    report.scenario = Some(serde_json::json!({ "name": a.name, "result": value }));
    emit_report(&report, a.out.as_deref())?;
    Ok(true)
}

fn gen(a: GenArgs) -> Outcome {
    let ctx = context(a.group, a.dim)?;
    let mode = match (a.mode.coherent, a.mode.noise, a.mode.random) {
        (_, Some(s), _) => GenMode::Noise(s),
        (_, _, true) => GenMode::Random,
        _ => GenMode::Coherent,
    };
    let w = generate(ctx, a.visible, a.hidden, mode, a.seed)?;
    let text = InstanceDocument::from_weighting(&w).emit();
    match &a.out {
        Some(path) => write_atomic(path, &text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(true)
}
