mod output;
mod recipes;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use output::{render, write_bytes, Format, Run};
use rrm::entanglement::{schmidt_verdict, FiredRule};
use rrm::imaginarity::{
    estimate_imaginarity_gaps, imaginarity_gaps, imaginarity_verdict, multipartite_imaginarity_scan, ImagCondition,
};
use rrm::moments::{estimate_moments_mc, exact_moment, MeasurementKind};
use rrm::overlap::{default_params, estimate_overlap, validate_overlap_params, OverlapVariant};
use rrm::zoo::{named_state, StateSpec};
use rrm::DensityMatrix;

#[derive(Parser, Debug)]
#[command(name = "rrm", version, about = "Randomized orthogonal measurement experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Master seed; required by stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of random settings.
    #[arg(long, global = true)]
    pub settings: Option<usize>,
    /// Shots per setting (0 = exact expectation values).
    #[arg(long, global = true, default_value_t = 0)]
    pub shots: usize,
    /// Independent repetitions.
    #[arg(long, global = true)]
    pub runs: Option<usize>,
    /// Output file (single commands) or directory (recipes).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; json by default, csv for `shadow`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl Common {
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| anyhow!(Validation("--seed is required for this command".into())))
    }
}

#[derive(Subcommand, Debug, Serialize)]
enum Command {
    /// Write a catalog state as a JSON state file.
    Zoo {
        name: String,
        /// Parameter as key=value; repeatable.
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
    },
    /// Exact or Monte-Carlo randomized-measurement moment.
    Moments {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value = "RRM")]
        kind: String,
        #[arg(long, default_value_t = 2)]
        t: u32,
    },
    /// Schmidt-number certificate from (C2, C4).
    Schmidt {
        #[arg(long, conflicts_with_all = ["c2", "c4"])]
        state: Option<PathBuf>,
        #[arg(long, requires_all = ["c4", "d"])]
        c2: Option<f64>,
        #[arg(long)]
        c4: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Imaginarity gaps, verdict and robustness bounds.
    Imaginarity {
        #[arg(long)]
        state: PathBuf,
        /// Blocks for the multipartite scan, e.g. "0|1,2" (0-based parties).
        #[arg(long)]
        partition: Option<String>,
        /// Estimate the gaps by simulation instead of exactly.
        #[arg(long)]
        mc: bool,
    },
    /// Shadow fidelity-error experiment on noisy GHZ states.
    Shadow(recipes::ShadowArgs),
    /// Overlap tr(ρ₁ρ₂) estimate.
    Overlap {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        state2: PathBuf,
        #[arg(long, default_value = "local_combo")]
        variant: String,
        /// α₁,α₂,β₁,β₂; defaults to (0, 1, 1, −(d+1)/(d−1)).
        #[arg(long, value_delimiter = ',', num_args = 4)]
        params: Option<Vec<f64>>,
    },
    /// Monte-Carlo check of the orthogonal Haar sampler.
    VerifyHaar {
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// (C2, C4) placements of the two-qutrit examples with boundary curves.
    Fig2,
    /// Global orthogonal vs unitary shadow error over the noise grid.
    Fig3a,
    /// Local orthogonal vs unitary shadow error over setting counts.
    Fig3b,
    /// The three two-qutrit imaginarity rows.
    Table1,
    /// Bell-diagonal and 4⊗4 placements with boundary curves.
    Sfig1,
    /// Overlap error against the number of settings.
    Sfig1c,
    /// Monte-Carlo scatter of chessboard moments for RMs and RRMs.
    Sfig2 {
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
}

fn parse_kv(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.to_string(), v))
}

/// Error class mapped to exit code 1.
#[derive(Debug)]
pub struct Validation(pub String);

impl std::fmt::Display for Validation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Validation {}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
        if let Some(rrm::Error::Io(_)) = cause.downcast_ref::<rrm::Error>() {
            return 2;
        }
        if cause.downcast_ref::<csv::Error>().is_some_and(|c| c.is_io_error()) {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(x) => x,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let common = cli.common;
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn load_state(path: &Path) -> Result<DensityMatrix> {
    rrm::io::read_state(path).with_context(|| format!("loading state {}", path.display()))
}

#[derive(Serialize)]
struct MomentRow {
    kind: MeasurementKind,
    t: u32,
    mode: &'static str,
    value: f64,
    std_err: Option<f64>,
    n_settings: Option<usize>,
    n_shots: usize,
    seed: Option<u64>,
    d: usize,
    n: usize,
}

#[derive(Serialize)]
struct SchmidtRow {
    #[serde(rename = "C2")]
    c2: f64,
    #[serde(rename = "C4")]
    c4: f64,
    d: usize,
    bound: usize,
    fired_rule: FiredRule,
    boundary_flag: bool,
    f_min_curve: Vec<(usize, Option<f64>)>,
}

#[derive(Serialize)]
struct ImagRow {
    #[serde(rename = "QhatA")]
    qhat_a: f64,
    #[serde(rename = "QhatB")]
    qhat_b: f64,
    #[serde(rename = "G_AB")]
    g_ab: f64,
    #[serde(rename = "F_LB")]
    f_lb: f64,
    #[serde(rename = "F_R")]
    f_r: f64,
    verdict: &'static str,
    fired_conditions: String,
}

#[derive(Serialize)]
struct OverlapRow {
    variant: OverlapVariant,
    value: f64,
    std_err: f64,
    exact: f64,
    n_settings: usize,
    params: [f64; 4],
    seed: u64,
    precondition_warning: bool,
}

fn emit<T: Serialize>(rows: &[T], common: &Common) -> Result<()> {
    write_bytes(
        common.out.as_deref(),
        &render(rows, common.format.unwrap_or(Format::Json))?,
    )
}

fn run(command: Command, common: &Common) -> Result<()> {
    let config = serde_json::to_value(&command)?;
    let mut run = Run::start(command_name(&command));
    let seed = common.seed;
    match command {
        Command::Zoo { name, params } => {
            let mut spec = StateSpec::new(&name);
            for (k, v) in params {
                spec = spec.with(&k, v);
            }
            let rho: DensityMatrix = named_state(&spec).map_err(|e| anyhow!(Validation(e.to_string())))?;
            let json = rrm::io::state_to_json(&rho) + "\n";
            write_bytes(common.out.as_deref(), json.as_bytes())?;
        }
        Command::Moments { state, kind, t } => {
            let rho = load_state(&state)?;
            let kind: MeasurementKind = kind.parse().map_err(validation)?;
            let dims = rho.dims();
            let row = match common.settings {
                None => MomentRow {
                    kind,
                    t,
                    mode: "exact",
                    value: exact_moment(&rho, kind, t).map_err(validation)?,
                    std_err: None,
                    n_settings: None,
                    n_shots: 0,
                    seed: None,
                    d: dims.d,
                    n: dims.n,
                },
                Some(n_settings) => {
                    let seed = common.require_seed()?;
                    let e =
                        estimate_moments_mc(&rho, kind, &[t], n_settings, common.shots, seed).map_err(validation)?[0];
                    MomentRow {
                        kind,
                        t,
                        mode: "mc",
                        value: e.value,
                        std_err: Some(e.std_err),
                        n_settings: Some(n_settings),
                        n_shots: common.shots,
                        seed: Some(seed),
                        d: dims.d,
                        n: dims.n,
                    }
                }
            };
            emit(&[row], common)?;
        }
        Command::Schmidt { state, c2, c4, d } => {
            let (c2, c4, d) = match (state, c2, c4, d) {
                (Some(path), _, _, _) => {
                    let rho = load_state(&path)?;
                    if rho.dims().n != 2 {
                        bail!(Validation("schmidt needs a bipartite state".into()));
                    }
                    let d = rho.dims().d;
                    match common.settings {
                        None => {
                            let (c2, c4) = rrm::zoo::rrm_point(&rho).map_err(validation)?;
                            (c2, c4, d)
                        }
                        Some(n) => {
                            let seed = common.require_seed()?;
                            let e = estimate_moments_mc(&rho, MeasurementKind::Rrm, &[2, 4], n, common.shots, seed)
                                .map_err(validation)?;
                            (e[0].value.max(0.0), e[1].value.max(0.0), d)
                        }
                    }
                }
                (None, Some(c2), Some(c4), Some(d)) => (c2, c4, d),
                _ => bail!(Validation("give --state or all of --c2 --c4 --d".into())),
            };
            let v = schmidt_verdict(c2, c4, d).map_err(validation)?;
            let row = SchmidtRow {
                c2,
                c4,
                d,
                bound: v.certified_sn_lower_bound,
                fired_rule: v.fired_rule,
                boundary_flag: v.boundary_flag,
                f_min_curve: v.f_min_values.iter().enumerate().map(|(i, f)| (i + 1, *f)).collect(),
            };
            emit(&[row], common)?;
        }
        Command::Imaginarity { state, partition, mc } => {
            let rho = load_state(&state)?;
            if let Some(p) = partition {
                let blocks = parse_partition(&p)?;
                let rows = multipartite_imaginarity_scan(&rho, &blocks).map_err(validation)?;
                emit(&rows, common)?;
            } else if mc {
                let seed = common.require_seed()?;
                let n = common.settings.unwrap_or(10_000);
                let g = estimate_imaginarity_gaps(&rho, n, seed).map_err(validation)?;
                #[derive(Serialize)]
                struct McRow {
                    #[serde(flatten)]
                    gaps: rrm::imaginarity::EstimatedGaps,
                    significant: Vec<ImagCondition>,
                    n_settings: usize,
                    seed: u64,
                }
                let significant = g.significant_conditions();
                emit(
                    &[McRow {
                        gaps: g,
                        significant,
                        n_settings: n,
                        seed,
                    }],
                    common,
                )?;
            } else {
                emit(&[imag_row(&rho)?], common)?;
            }
        }
        Command::Shadow(args) => {
            let files = recipes::shadow(&args, common)?;
            run.command = "shadow";
            return run.finish(&config, seed, common.out.as_deref(), &files);
        }
        Command::Overlap {
            state,
            state2,
            variant,
            params,
        } => {
            let r1 = load_state(&state)?;
            let r2 = load_state(&state2)?;
            let variant: OverlapVariant = variant.parse().map_err(validation)?;
            let dim = match variant {
                OverlapVariant::Global => r1.dims().total(),
                _ => r1.dims().d,
            };
            let p = match params {
                Some(v) => validate_overlap_params(v[0], v[1], v[2], v[3], dim, variant),
                None => default_params(dim, variant),
            }
            .map_err(validation)?;
            let seed = common.require_seed()?;
            let n = common.settings.unwrap_or(10_000);
            let e = estimate_overlap(&r1, &r2, &p, n, seed).map_err(validation)?;
            if e.precondition_warning {
                eprintln!("warning: the second state lacks the symmetry this variant assumes; the estimate is biased");
            }
            emit(
                &[OverlapRow {
                    variant,
                    value: e.value,
                    std_err: e.std_err,
                    exact: r1.overlap(&r2),
                    n_settings: n,
                    params: [p.alpha1, p.alpha2, p.beta1, p.beta2],
                    seed,
                    precondition_warning: e.precondition_warning,
                }],
                common,
            )?;
        }
        Command::VerifyHaar { d } => {
            let seed = common.require_seed()?;
            let n = common.settings.unwrap_or(10_000);
            let checks = rrm::haar::verify_haar_sampler(d, n, seed).map_err(validation)?;
            emit(&checks, common)?;
        }
        Command::Fig2 => return recipe(&run, &config, common, recipes::fig2(common)?),
        Command::Fig3a => return recipe(&run, &config, common, recipes::fig3a(common)?),
        Command::Fig3b => return recipe(&run, &config, common, recipes::fig3b(common)?),
        Command::Table1 => {
            let rows = (1..=3)
                .map(|k| imag_row(&rrm::zoo::table1(k).map_err(validation)?))
                .collect::<Result<Vec<_>>>()?;
            emit(&rows, common)?;
        }
        Command::Sfig1 => return recipe(&run, &config, common, recipes::sfig1(common)?),
        Command::Sfig1c => return recipe(&run, &config, common, recipes::sfig1c(common)?),
        Command::Sfig2 { points } => return recipe(&run, &config, common, recipes::sfig2(common, points)?),
    }
    run.finish(&config, seed, common.out.as_deref(), &[])
}

fn recipe(run: &Run, config: &serde_json::Value, common: &Common, out: (PathBuf, Vec<String>)) -> Result<()> {
    let (dir, files) = out;
    run.finish(&(config, common), common.seed, Some(&dir), &files)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Zoo { .. } => "zoo",
        Command::Moments { .. } => "moments",
        Command::Schmidt { .. } => "schmidt",
        Command::Imaginarity { .. } => "imaginarity",
        Command::Shadow(_) => "shadow",
        Command::Overlap { .. } => "overlap",
        Command::VerifyHaar { .. } => "verify-haar",
        Command::Fig2 => "fig2",
        Command::Fig3a => "fig3a",
        Command::Fig3b => "fig3b",
        Command::Table1 => "table1",
        Command::Sfig1 => "sfig1",
        Command::Sfig1c => "sfig1c",
        Command::Sfig2 { .. } => "sfig2",
    }
}

pub fn validation(e: rrm::Error) -> anyhow::Error {
    match e {
        rrm::Error::Io(_) => anyhow::Error::new(e),
        other => anyhow!(Validation(other.to_string())),
    }
}

fn imag_row(rho: &DensityMatrix) -> Result<ImagRow> {
    let g = imaginarity_gaps(rho).map_err(validation)?;
    let v = imaginarity_verdict(&g, Some(rho)).map_err(validation)?;
    Ok(ImagRow {
        qhat_a: g.qhat_a,
        qhat_b: g.qhat_b,
        g_ab: g.g_ab,
        f_lb: v.f_lb,
        f_r: v.f_r_exact.unwrap_or(f64::NAN),
        verdict: if v.is_imaginary { "imaginary" } else { "real" },
        fired_conditions: v
            .fired_conditions
            .iter()
            .map(|c| serde_json::to_value(c).map(|v| v.as_str().unwrap_or_default().to_string()))
            .collect::<serde_json::Result<Vec<_>>>()?
            .join(";"),
    })
}

fn parse_partition(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split('|')
        .map(|block| {
            block
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|e| anyhow!(Validation(format!("bad party '{p}': {e}"))))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_parse_into_blocks() {
        assert_eq!(parse_partition("0|1, 2").unwrap(), vec![vec![0], vec![1, 2]]);
        assert!(parse_partition("0|x").is_err());
    }

    #[test]
    fn key_values_parse() {
        assert_eq!(parse_kv("p=0.5").unwrap(), ("p".to_string(), 0.5));
        assert!(parse_kv("p").is_err());
        assert!(parse_kv("p=abc").is_err());
    }
}
