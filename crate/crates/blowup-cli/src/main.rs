//! Command line front end: spec ingestion, tiling generation, address
//! tables, SVG rendering, and the verification and rigidity drivers.
//!
//! Exit codes: 0 when every requested check passes (or the command has
//! nothing to check), 1 when a verification ran and failed, 2 for
//! usage and configuration errors.

use std::io::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blowup::algebra::{rigidity_check, strong_rigidity_check, RigidityVerdict, SearchBounds};
use blowup::io::{self, presets, CheckReport};
use blowup::render::{render_to_file, ColorBy, RenderStyle};
use blowup::verify;
use blowup::{canonical_tiling, pi_prefix, Error, IfsSpec, Tiling, Word};

#[derive(Parser)]
#[command(name = "blowup", version, about = "Self-similar tilings of fractal blow-ups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the word set Omega_k, one word per line, sorted.
    Omega {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(short)]
        k: u32,
    },
    /// Emit tiling data: a header line, then one record per tile.
    Tiles {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        source: SourceArg,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Render a tiling to SVG.
    Render {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        source: SourceArg,
        #[arg(long)]
        out: String,
        /// Label each tile with its absolute address.
        #[arg(long)]
        labels: bool,
        #[arg(long, value_enum, default_value_t = ColorChoice::Proto)]
        color_by: ColorChoice,
        #[arg(long, default_value_t = 0.002)]
        stroke_width: f64,
        /// World-coordinate window "x0,y0,x1,y1"; fits the support when
        /// omitted.
        #[arg(long)]
        viewport: Option<String>,
    },
    /// Print the relative and absolute address of every tile.
    Addresses {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        source: SourceArg,
    },
    /// Run verification checks and write a machine-readable report.
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        /// Run every check below.
        #[arg(long)]
        all: bool,
        /// Pairwise tile overlap audit on the canonical tiling.
        #[arg(long)]
        nonoverlap: bool,
        /// Self-similarity audit of pi(alpha beta beta ...).
        #[arg(long)]
        selfsim: bool,
        /// Patch recurrence and covering radius probe.
        #[arg(long)]
        quasi: bool,
        /// Injectivity precondition over letter pairs.
        #[arg(long)]
        inject: bool,
        /// Canonical level the nonoverlap audit runs at.
        #[arg(long, default_value_t = 6)]
        level: u32,
        /// Head word alpha for the self-similarity audit.
        #[arg(long, default_value = "")]
        alpha: String,
        /// Period word beta for the self-similarity audit.
        #[arg(long, default_value = "12")]
        beta: String,
        /// Prefix length of theta = alpha beta beta ... to audit.
        #[arg(long, default_value_t = 6)]
        window: usize,
        /// Canonical level the recurrence patch is drawn from.
        #[arg(long, default_value_t = 2)]
        patch_level: u32,
        /// Canonical level the patch is searched in.
        #[arg(long, default_value_t = 8)]
        target_level: u32,
        /// Also write the JSON report to this path.
        #[arg(long)]
        report: Option<String>,
    },
    /// Run the rigidity counterexample search.
    Rigidity {
        #[command(flatten)]
        spec: SpecArg,
        /// Search over distinct blow-up pairs instead of canonical
        /// levels.
        #[arg(long)]
        strong: bool,
        /// Also write the JSON report to this path.
        #[arg(long)]
        report: Option<String>,
    },
}

#[derive(Args)]
struct SpecArg {
    /// Preset name (goldenb, cantor, squaregrid) or path to a spec file.
    #[arg(long = "spec")]
    spec: String,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArg {
    /// Canonical tiling level k.
    #[arg(long)]
    level: Option<u32>,
    /// Blow-up prefix theta for pi(theta).
    #[arg(long)]
    theta: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ColorChoice {
    Proto,
    Depth,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => std::process::ExitCode::SUCCESS,
        Ok(false) => std::process::ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(2)
        }
    }
}

fn resolve_spec(arg: &SpecArg) -> blowup::Result<Arc<IfsSpec>> {
    let mut spec = match presets::by_name(&arg.spec) {
        Some(s) => s,
        None => {
            if std::path::Path::new(&arg.spec).exists() {
                io::load_spec(&arg.spec)?
            } else {
                return Err(Error::Precondition(format!(
                    "spec {:?} is neither a preset ({}) nor a file",
                    arg.spec,
                    presets::NAMES.join(", ")
                )));
            }
        }
    };
    if let Ok(v) = std::env::var("BLOWUP_MAX_LEVEL") {
        let cap: u32 = v
            .parse()
            .map_err(|_| Error::Precondition(format!("BLOWUP_MAX_LEVEL={v:?} is not a level")))?;
        spec = spec.with_max_level(cap);
    }
    Ok(spec)
}

fn build_tiling(spec: &Arc<IfsSpec>, source: &SourceArg) -> blowup::Result<Tiling> {
    match (&source.level, &source.theta) {
        (Some(k), None) => canonical_tiling(*k, spec),
        (None, Some(theta)) => pi_prefix(&Word::from_str(theta)?, spec),
        _ => unreachable!("clap enforces exactly one source"),
    }
}

fn run(cli: Cli) -> blowup::Result<bool> {
    match cli.command {
        Command::Omega { spec, k } => {
            let spec = resolve_spec(&spec)?;
            let mut words = blowup::symbolic::omega_level_capped(k, spec.pv(), spec.max_level())?;
            words.sort();
            let mut out = std::io::stdout().lock();
            for w in &words {
                writeln!(out, "{w}")?;
            }
            Ok(true)
        }
        Command::Tiles { spec, source, out } => {
            let spec = resolve_spec(&spec)?;
            let t = build_tiling(&spec, &source)?;
            match out {
                Some(path) => io::export_tiles_to_file(&t, path)?,
                None => io::export_tiles(&t, &mut std::io::stdout().lock())?,
            }
            Ok(true)
        }
        Command::Render { spec, source, out, labels, color_by, stroke_width, viewport } => {
            let spec = resolve_spec(&spec)?;
            let t = build_tiling(&spec, &source)?;
            let style = RenderStyle {
                color_by: match color_by {
                    ColorChoice::Proto => ColorBy::ProtoIndex,
                    ColorChoice::Depth => ColorBy::AddressDepth,
                },
                stroke_width,
                label_addresses: labels,
                viewport: viewport.as_deref().map(parse_viewport).transpose()?,
            };
            render_to_file(&t, &style, out)?;
            Ok(true)
        }
        Command::Addresses { spec, source } => {
            let spec = resolve_spec(&spec)?;
            let t = build_tiling(&spec, &source)?;
            let mut out = std::io::stdout().lock();
            writeln!(out, "# relative\tabsolute\tproto")?;
            for tile in t.tiles() {
                writeln!(out, "{}\t{}\t{}", tile.rel_word(), tile.address(), tile.proto_index())?;
            }
            Ok(true)
        }
        Command::Verify {
            spec,
            all,
            nonoverlap,
            selfsim,
            quasi,
            inject,
            level,
            alpha,
            beta,
            window,
            patch_level,
            target_level,
            report,
        } => {
            let spec = resolve_spec(&spec)?;
            let alpha = Word::from_str(&alpha)?;
            let beta = Word::from_str(&beta)?;
            alpha.validate_for(spec.pv())?;
            beta.validate_for(spec.pv())?;
            let mut wanted = Vec::new();
            if all || nonoverlap {
                wanted.push(CheckKind::Nonoverlap);
            }
            if all || selfsim {
                wanted.push(CheckKind::SelfSim);
            }
            if all || quasi {
                wanted.push(CheckKind::Quasi);
            }
            if all || inject {
                wanted.push(CheckKind::Inject);
            }
            if wanted.is_empty() {
                return Err(Error::Precondition(
                    "nothing to verify; pass --all or at least one check flag".into(),
                ));
            }
            let mut checks = Vec::new();
            for kind in wanted {
                checks.push(run_check(
                    kind,
                    &spec,
                    level,
                    &alpha,
                    &beta,
                    window,
                    patch_level,
                    target_level,
                ));
            }
            let value = io::report_json(&checks);
            println!("{}", serde_json::to_string_pretty(&value)?);
            if let Some(path) = report {
                io::write_report(&checks, path)?;
            }
            Ok(checks.iter().all(|c| c.pass))
        }
        Command::Rigidity { spec, strong, report } => {
            let spec = resolve_spec(&spec)?;
            let bounds = SearchBounds::default();
            let rep = if strong {
                strong_rigidity_check(&spec, &bounds)?
            } else {
                rigidity_check(&spec, &bounds)?
            };
            let pass = matches!(rep.verdict, RigidityVerdict::Rigid);
            let mut check = CheckReport::new(if strong { "strong_rigidity" } else { "rigidity" }, pass)
                .metric("verdict", format!("{:?}", rep.verdict))
                .metric("candidates_examined", rep.candidates_examined)
                .metric("note", rep.note.clone());
            if let Some(w) = &rep.witness {
                check = check.metric("witness", w.detail.clone());
            }
            let checks = vec![check];
            println!("{}", serde_json::to_string_pretty(&io::report_json(&checks))?);
            if let Some(path) = report {
                io::write_report(&checks, path)?;
            }
            Ok(pass)
        }
    }
}

enum CheckKind {
    Nonoverlap,
    SelfSim,
    Quasi,
    Inject,
}

/// Runs one check, folding any library error into a failing report
/// rather than aborting the run: a check that cannot be carried out has
/// not verified anything.
#[allow(clippy::too_many_arguments)]
fn run_check(
    kind: CheckKind,
    spec: &Arc<IfsSpec>,
    level: u32,
    alpha: &Word,
    beta: &Word,
    window: usize,
    patch_level: u32,
    target_level: u32,
) -> CheckReport {
    let result = match kind {
        CheckKind::Nonoverlap => canonical_tiling(level, spec)
            .and_then(|t| verify::nonoverlap_check(&t))
            .map(|r| {
                CheckReport::new("nonoverlap", r.pass)
                    .metric("level", level)
                    .metric("max_overlap", r.max_overlap)
                    .metric("threshold", r.threshold)
                    .metric("pairs_examined", r.pairs_examined)
                    .metric("authoritative", r.authoritative)
                    .metric(
                        "min_separation",
                        r.min_separation.map_or(serde_json::Value::Null, Into::into),
                    )
            }),
        CheckKind::SelfSim => verify::self_similarity_check(alpha, beta, window, spec).map(|r| {
            CheckReport::new("self_similarity", r.ok)
                .metric("alpha", alpha.to_string())
                .metric("beta", beta.to_string())
                .metric("psi_power", r.psi.power())
                .metric("prefix_len", r.prefix_len)
                .metric("target_prefix_len", r.target_prefix_len)
                .metric("core_tiles", r.core_tiles)
                .metric("failures", r.failures.len())
        }),
        CheckKind::Quasi => canonical_tiling(patch_level, spec)
            .and_then(|patch| {
                let target = canonical_tiling(target_level, spec)?;
                verify::quasiperiodicity_probe(patch.tiles(), &target)
            })
            .map(|r| {
                CheckReport::new("quasiperiodicity", !r.copies.is_empty())
                    .metric("patch_level", patch_level)
                    .metric("target_level", target_level)
                    .metric("copies", r.copies.len())
                    .metric(
                        "covering_radius",
                        r.covering_radius.map_or(serde_json::Value::Null, Into::into),
                    )
                    .metric("centers_sampled", r.centers_sampled)
            }),
        CheckKind::Inject => verify::injectivity_precondition(spec).map(|r| {
            let worst = r
                .pairs
                .iter()
                .map(|p| p.uncovered_fraction)
                .fold(f64::INFINITY, f64::min);
            CheckReport::new("injectivity", r.holds)
                .metric("pairs", r.pairs.len())
                .metric(
                    "min_uncovered_fraction",
                    if worst.is_finite() { worst.into() } else { serde_json::Value::Null },
                )
                .metric("tiled_pair_found", r.pairs.iter().any(|p| p.tiles_intersection))
        }),
    };
    result.unwrap_or_else(|e| {
        let name = match kind {
            CheckKind::Nonoverlap => "nonoverlap",
            CheckKind::SelfSim => "self_similarity",
            CheckKind::Quasi => "quasiperiodicity",
            CheckKind::Inject => "injectivity",
        };
        CheckReport::new(name, false).metric("error", e.to_string())
    })
}

fn parse_viewport(s: &str) -> blowup::Result<([f64; 2], [f64; 2])> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Precondition(format!("viewport {s:?} is not x0,y0,x1,y1")))?;
    if parts.len() != 4 {
        return Err(Error::Precondition(format!("viewport {s:?} is not x0,y0,x1,y1")));
    }
    Ok(([parts[0], parts[1]], [parts[2], parts[3]]))
}
