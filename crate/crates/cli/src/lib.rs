//! The `dst` command-line tool.

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dst_core::model::routes::format_nis;
use dst_core::network::validate_network;
use dst_core::nis::{load_salinity, load_species_table, McmcConfig, PriorConfig, SurvivalRule};
use dst_core::{LockSet, ModelBundle, Network, ScenarioResult};
use dst_service::api;

/// Exit code for a valid run whose scenario has zero probability.
pub const EXIT_INCONSISTENT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "dst", version, about = "Ship biofouling decision support for the Baltic Sea")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a model bundle and report structural problems.
    Validate(ModelArgs),
    /// Run one scenario and print expected utilities and posteriors.
    Query(QueryArgs),
    /// Evaluate several scenarios side by side.
    Compare(CompareArgs),
    /// Salinity-tolerance model.
    #[command(subcommand)]
    Nis(NisCommand),
    /// Print the conditional probability table of a node.
    ExportCpt(ExportArgs),
    /// Model bundle utilities.
    #[command(subcommand)]
    Bundle(BundleCommand),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model bundle directory; the built-in model when omitted.
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Lock a node to a state, as Node=State. Repeatable.
    #[arg(long = "lock", value_name = "NODE=STATE")]
    pub locks: Vec<String>,
    /// Print the service's JSON response body instead of tables.
    #[arg(long)]
    pub json: bool,
    /// Only print posteriors for these nodes. Repeatable.
    #[arg(long = "show", value_name = "NODE")]
    pub show: Vec<String>,
    /// Print expected utilities only.
    #[arg(long, conflicts_with = "show")]
    pub utilities_only: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// JSON file holding a list of lock sets, e.g. [{"locks": {"Routes": "2A"}}].
    #[arg(long)]
    pub scenario_file: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum NisCommand {
    /// Fit the salinity model and write posterior draws.
    Fit(FitArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RuleArg {
    Containment,
    Overlap,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Species tolerance table; the built-in table when omitted.
    #[arg(long)]
    pub species: Option<PathBuf>,
    /// Monthly salinity observations; the built-in file when omitted.
    #[arg(long)]
    pub salinity: Option<PathBuf>,
    #[arg(long, default_value_t = 50_000)]
    pub iters: u64,
    #[arg(long, default_value_t = 3)]
    pub chains: u32,
    /// Burn-in iterations per chain; 40 % of --iters when omitted.
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Thinning interval; chosen to keep 3000 draws per chain when omitted.
    #[arg(long)]
    pub thin: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Posterior draws output (tab-separated).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the per-route NIS distributions in bundle format.
    #[arg(long)]
    pub nis_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "containment")]
    pub rule: RuleArg,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Chance, decision-admissibility or utility node id.
    #[arg(long)]
    pub node: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum BundleCommand {
    /// Write the built-in model as a bundle directory.
    Init {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Static files for the browser UI.
    #[arg(long)]
    pub ui_dir: Option<PathBuf>,
    /// Scenario store file.
    #[arg(long)]
    pub store: Option<PathBuf>,
}

pub fn load_bundle(args: &ModelArgs) -> Result<ModelBundle> {
    match &args.model_dir {
        Some(dir) => ModelBundle::load(dir).with_context(|| format!("loading model bundle {}", dir.display())),
        None => Ok(ModelBundle::default_bundle()?),
    }
}

/// Runs a parsed command, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> Result<ExitCode> {
    match cli.command {
        Command::Validate(a) => validate(&a, out),
        Command::Query(a) => run_query(&a, out),
        Command::Compare(a) => compare(&a, out),
        Command::Nis(NisCommand::Fit(a)) => nis_fit(&a, out),
        Command::ExportCpt(a) => export_cpt(&a, out),
        Command::Bundle(BundleCommand::Init { out: dir }) => {
            ModelBundle::default_bundle()?.save(&dir)?;
            writeln!(out, "wrote model bundle to {}", dir.display())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve(a) => serve(a),
    }
}

fn validate(a: &ModelArgs, out: &mut dyn std::io::Write) -> Result<ExitCode> {
    if let Some(dir) = &a.model_dir {
        let path = dir.join(dst_core::bundle::NETWORK_FILE);
        if path.exists() {
            let text = std::fs::read_to_string(&path)?;
            let net = Network::from_json(&text).with_context(|| format!("reading {}", path.display()))?;
            let diags = validate_network(&net);
            if !diags.is_empty() {
                for d in &diags {
                    writeln!(out, "{}: {d}", path.display())?;
                }
                bail!("{} problem(s) in {}", diags.len(), path.display());
            }
        }
    }
    let b = load_bundle(a)?;
    let net = &b.network;
    writeln!(
        out,
        "ok: {} decisions, {} chance nodes, {} utilities; {} routes, {} species; model {}",
        net.decision_ids().len(),
        net.chance_ids().len(),
        net.utilities().len(),
        b.routes.len(),
        b.species.len(),
        net.fingerprint()
    )?;
    let doc = net.to_doc();
    let rec: Vec<&str> = doc
        .cpts
        .iter()
        .filter(|c| c.reconstructed)
        .map(|c| c.node.as_str())
        .collect();
    if !rec.is_empty() {
        writeln!(out, "reconstructed CPT columns in: {}", rec.join(", "))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_query(a: &QueryArgs, out: &mut dyn std::io::Write) -> Result<ExitCode> {
    let locks = LockSet::parse_pairs(a.locks.iter().map(String::as_str)).map_err(|e| anyhow!(e))?;
    let b = load_bundle(&a.model)?;
    let version = api::model_version(&b);
    let r = api::query_response(&b, &version, &locks)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string(&r)?)?;
    } else {
        let show: Vec<String> = if a.utilities_only {
            Vec::new()
        } else if a.show.is_empty() {
            b.network
                .chance_ids()
                .iter()
                .map(|v| b.network.variable(*v).id.clone())
                .collect()
        } else {
            for s in &a.show {
                if b.network.var_id(s).is_none() {
                    bail!("unknown node `{s}` in --show");
                }
            }
            a.show.clone()
        };
        out.write_all(render_result(&b.network, &r.result, &show).as_bytes())?;
    }
    if r.result.consistent {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "inconsistent scenario: {}",
            r.result.reason.as_deref().unwrap_or("zero probability")
        );
        Ok(ExitCode::from(EXIT_INCONSISTENT))
    }
}

/// Utility table followed by the requested posteriors.
pub fn render_result(net: &Network, r: &ScenarioResult, show: &[String]) -> String {
    let mut s = String::new();
    if !r.consistent {
        let _ = writeln!(s, "INCONSISTENT: {}", r.reason.as_deref().unwrap_or("zero probability"));
        return s;
    }
    let w = net.utilities().iter().map(|u| u.name.len()).max().unwrap_or(0);
    let _ = writeln!(s, "{:<w$}  {:<12}  {:>16}", "utility", "units", "expected");
    for u in net.utilities() {
        let _ = writeln!(s, "{:<w$}  {:<12}  {:>16.4}", u.name, u.units, r.utilities[&u.id]);
    }
    for node in show {
        let (Some(id), Some(p)) = (net.var_id(node), r.posteriors.get(node)) else {
            continue;
        };
        let v = net.variable(id);
        let _ = writeln!(s, "\n{} ({})", v.id, v.name);
        for (i, p) in p.iter().enumerate() {
            let _ = writeln!(s, "  {:<28} {:.6}", v.states.label(i), p);
        }
    }
    s
}

fn compare(a: &CompareArgs, out: &mut dyn std::io::Write) -> Result<ExitCode> {
    let text =
        std::fs::read_to_string(&a.scenario_file).with_context(|| format!("reading {}", a.scenario_file.display()))?;
    let scenarios: Vec<LockSet> = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a JSON list of lock sets", a.scenario_file.display()))?;
    let b = load_bundle(&a.model)?;
    let version = api::model_version(&b);
    let c = api::compare_response(&b, &version, &scenarios)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string(&c)?)?;
        return Ok(ExitCode::SUCCESS);
    }
    write!(out, "{:<10}", "scenario")?;
    for u in &c.utilities {
        write!(out, " {u:>16}")?;
    }
    writeln!(out)?;
    for (i, row) in c.rows.iter().enumerate() {
        write!(out, "{:<10}", i + 1)?;
        if !row.consistent {
            writeln!(out, " inconsistent: {}", row.reason.as_deref().unwrap_or(""))?;
            continue;
        }
        for v in &row.values {
            write!(out, " {:>16.4}", v.unwrap_or(f64::NAN))?;
        }
        writeln!(out)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Schedule for `--iters`: 40 % burn-in and thinning to about 3000 draws
/// per chain, unless given explicitly.
pub fn fit_schedule(iters: u64, chains: u32, burn_in: Option<u64>, thin: Option<u64>, seed: u64) -> McmcConfig {
    let burn_in = burn_in.unwrap_or(iters * 2 / 5);
    let thin = thin.unwrap_or_else(|| (iters.saturating_sub(burn_in) / 3000).max(1));
    McmcConfig {
        iterations: iters,
        chains,
        thin,
        burn_in,
        seed,
    }
}

fn nis_fit(a: &FitArgs, out: &mut dyn std::io::Write) -> Result<ExitCode> {
    let mut b = ModelBundle::default_bundle()?;
    if let Some(p) = &a.species {
        b.species = load_species_table(p)?;
    }
    if let Some(p) = &a.salinity {
        b.salinity = load_salinity(p)?;
    }
    let mcmc = fit_schedule(a.iters, a.chains, a.burn_in, a.thin, a.seed);
    let rule = match a.rule {
        RuleArg::Containment => SurvivalRule::Containment,
        RuleArg::Overlap => SurvivalRule::Overlap,
    };
    let (fitted, post) = b.refit_nis(&PriorConfig::default(), &mcmc, rule)?;
    write_file(&a.out, &post.to_tsv())?;
    if let Some(p) = &a.nis_out {
        write_file(p, &format_nis(&fitted.routes, &fitted.nis))?;
    }
    let d = &post.diagnostics;
    writeln!(
        out,
        "{} draws ({} chains); max R-hat {:.4}{}",
        post.draws.len(),
        mcmc.chains,
        d.max_rhat(),
        if d.divergent { " (not converged)" } else { "" }
    )?;
    for (name, r) in &d.rhat {
        log::info!("R-hat {name}: {r:.4}");
    }
    for (area, f) in &d.mu_order_violations {
        if *f > 0.0 {
            writeln!(out, "warning: {area}: mu_x > mu_y in {:.1} % of draws", 100.0 * f)?;
        }
    }
    for r in &fitted.routes {
        writeln!(
            out,
            "{:<4} E[survivors] {:>6.2}",
            r.id,
            fitted.nis[&r.id].expected_count()
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn export_cpt(a: &ExportArgs, out: &mut dyn std::io::Write) -> Result<ExitCode> {
    let b = load_bundle(&a.model)?;
    let net = &b.network;
    let doc = net.to_doc();
    if a.json {
        let v = if let Some(c) = doc.cpts.iter().find(|c| c.node == a.node) {
            serde_json::to_value(c)?
        } else if let Some(c) = doc.constraints.iter().find(|c| c.node == a.node) {
            serde_json::to_value(c)?
        } else if let Some(u) = net.utility(&a.node) {
            serde_json::to_value(u)?
        } else {
            bail!("`{}` has no table", a.node);
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        return Ok(ExitCode::SUCCESS);
    }
    out.write_all(table_text(net, &a.node)?.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

/// A node's table as tab-separated text: one row per parent configuration,
/// one column per state (or a single `value` column for utilities).
pub fn table_text(net: &Network, node: &str) -> Result<String> {
    let mut s = String::new();
    if let Some(u) = net.utility(node) {
        let cards: Vec<usize> = u.parent_ids.iter().map(|p| net.variable(*p).card()).collect();
        let _ = writeln!(s, "{}\tvalue", u.parents.join("\t"));
        for (i, v) in u.table.iter().enumerate() {
            let states = unravel(i, &cards);
            for (p, st) in u.parent_ids.iter().zip(&states) {
                let _ = write!(s, "{}\t", net.variable(*p).states.label(*st));
            }
            let _ = writeln!(s, "{v}");
        }
        return Ok(s);
    }
    let id = match net.var_id(node) {
        Some(id) => id,
        None => bail!(net.resolve_state(node, "").expect_err("node is unknown")),
    };
    let factor = match (net.cpt(id), net.constraint(id)) {
        (Some(c), _) => &c.factor,
        (None, Some(c)) => &c.factor,
        (None, None) => bail!("`{node}` is a decision without an admissibility table"),
    };
    let scope = factor.scope();
    let (parents, child) = scope.split_at(scope.len() - 1);
    let child_var = net.variable(child[0]);
    let parent_cards: Vec<usize> = parents.iter().map(|p| net.variable(*p).card()).collect();
    let header: Vec<String> = parents.iter().map(|p| net.variable(*p).id.clone()).collect();
    let _ = writeln!(
        s,
        "{}{}{}",
        header.join("\t"),
        if header.is_empty() { "" } else { "\t" },
        child_var.states.labels().join("\t")
    );
    let k = child_var.card();
    for (row, chunk) in factor.data().chunks(k).enumerate() {
        for (p, st) in parents.iter().zip(unravel(row, &parent_cards)) {
            let _ = write!(s, "{}\t", net.variable(*p).states.label(st));
        }
        let cells: Vec<String> = chunk.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{}", cells.join("\t"));
    }
    Ok(s)
}

/// Row-major index to per-variable states, last variable fastest.
fn unravel(mut i: usize, cards: &[usize]) -> Vec<usize> {
    let mut out = vec![0; cards.len()];
    for (slot, c) in out.iter_mut().zip(cards).rev() {
        *slot = i % c;
        i /= c;
    }
    out
}

fn serve(a: ServeArgs) -> Result<ExitCode> {
    let cfg = dst_service::ServeConfig {
        addr: a.addr,
        model_dir: a.model.model_dir,
        ui_dir: a.ui_dir,
        store: a.store,
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(dst_service::serve(cfg)).map_err(|e| anyhow!(e))?;
    Ok(ExitCode::SUCCESS)
}
