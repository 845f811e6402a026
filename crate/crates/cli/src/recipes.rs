//! Composite recipes; each writes CSV data into an output directory.
//!
//! Column schemas:
//! - `fig2/points.csv`, `sfig1/points.csv`: panel, state_id, param, C2, C4, physical, detected
//! - `*/curves.csv`: panel, r, C2, F_min
//! - `fig3a|fig3b/errors.csv`: grid_value, ensemble, mean_error, std, n_settings, n_runs, seed
//! - `sfig1c/errors.csv`: n_settings, mean_abs_error, std, runs, seed
//! - `sfig2/points.csv`: kind, point, C2, C4; `sfig2/exact.csv`: kind, C2, C4

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::Args;
use serde::Serialize;

use crate::output::{csv_bytes, recipe_dir, render, write_bytes, write_in, Format};
use crate::{validation, Common, Validation};
use rrm::entanglement::{f_min, second_moment_cap};
use rrm::moments::{estimate_moments_mc, exact_moment, MeasurementKind};
use rrm::overlap::{default_params, estimate_overlap, OverlapVariant};
use rrm::rng::{derive_path, SeedPath};
use rrm::shadows::{
    draw_snapshot, fidelity_error_experiment, Ensemble, GridKind, ShadowErrorPoint, ShadowExperimentConfig,
};
use rrm::zoo;
use rrm::DensityMatrix;

#[derive(Args, Debug, Clone, Serialize)]
pub struct ShadowArgs {
    #[arg(long, default_value_t = 5)]
    pub qubits: usize,
    #[arg(long, value_enum, default_value = "probability")]
    pub grid_kind: GridArg,
    /// Comma-separated grid of p values or setting counts.
    #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5,0.75,1")]
    pub grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "global_orthogonal,global_unitary")]
    pub ensembles: Vec<String>,
    /// Noise parameter for settings grids.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Also write run-0 snapshots of each grid point as JSON lines.
    #[arg(long)]
    pub snapshots_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridArg {
    Probability,
    Settings,
}

fn seed_or(common: &Common) -> Result<u64> {
    common.require_seed()
}

fn shadow_rows(points: &[ShadowErrorPoint]) -> Vec<ShadowRow> {
    points
        .iter()
        .map(|p| ShadowRow {
            grid_value: p.grid_value,
            ensemble: p.ensemble.name(),
            mean_error: p.mean_error,
            std: p.std,
            n_settings: p.n_settings,
            n_runs: p.n_runs,
            seed: p.seed,
        })
        .collect()
}

#[derive(Serialize)]
struct ShadowRow {
    grid_value: f64,
    ensemble: &'static str,
    mean_error: f64,
    std: f64,
    n_settings: usize,
    n_runs: usize,
    seed: u64,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    grid_value: f64,
    #[serde(flatten)]
    record: &'a rrm::shadows::SnapshotRecord,
}

pub fn shadow(args: &ShadowArgs, common: &Common) -> Result<Vec<String>> {
    let seed = seed_or(common)?;
    let ensembles = args
        .ensembles
        .iter()
        .map(|s| s.parse::<Ensemble>().map_err(validation))
        .collect::<Result<Vec<_>>>()?;
    let config = ShadowExperimentConfig {
        n_qubits: args.qubits,
        ensembles: ensembles.clone(),
        grid_kind: match args.grid_kind {
            GridArg::Probability => GridKind::Probability,
            GridArg::Settings => GridKind::Settings,
        },
        grid: args.grid.clone(),
        n_settings: common.settings.unwrap_or(2000),
        p: args.p,
        n_runs: common.runs.unwrap_or(100),
        seed,
    };
    let points = fidelity_error_experiment(&config).map_err(validation)?;
    let format = common.format.unwrap_or(Format::Csv);
    write_bytes(common.out.as_deref(), &render(&shadow_rows(&points), format)?)?;
    let mut files: Vec<String> = common.out.iter().map(|p| p.display().to_string()).collect();
    if let Some(path) = &args.snapshots_out {
        let mut text = String::new();
        for (gi, &gv) in config.grid.iter().enumerate() {
            let (p, count) = match config.grid_kind {
                GridKind::Probability => (gv, config.n_settings),
                GridKind::Settings => (config.p, gv as usize),
            };
            let rho: DensityMatrix = zoo::noisy_ghz(config.n_qubits, p).map_err(validation)?;
            for &ens in &ensembles {
                let run_seed = derive_path(seed, &[gi as u64, ens.tag(), 0]);
                for i in 0..count {
                    let s = draw_snapshot(&rho, ens, SeedPath::new(run_seed, i as u64)).map_err(validation)?;
                    let line = RecordLine {
                        grid_value: gv,
                        record: &s.record(),
                    };
                    text.push_str(&serde_json::to_string(&line)?);
                    text.push('\n');
                }
            }
        }
        write_bytes(Some(path), text.as_bytes())?;
        files.push(path.display().to_string());
    }
    Ok(files)
}

#[derive(Serialize)]
struct PointRow {
    panel: &'static str,
    state_id: String,
    param: Option<f64>,
    #[serde(rename = "C2")]
    c2: f64,
    #[serde(rename = "C4")]
    c4: f64,
    physical: bool,
    detected: bool,
}

#[derive(Serialize)]
struct CurveRow {
    panel: &'static str,
    r: usize,
    #[serde(rename = "C2")]
    c2: f64,
    #[serde(rename = "F_min")]
    f_min: f64,
}

fn point(
    panel: &'static str,
    id: &str,
    param: Option<f64>,
    c2: f64,
    c4: f64,
    physical: bool,
    d: usize,
) -> Result<PointRow> {
    let detected =
        c2 > second_moment_cap(1, d) || c4 < f_min(1, c2, d).map_err(validation)? - rrm::entanglement::BOUNDARY_TOL;
    Ok(PointRow {
        panel,
        state_id: id.into(),
        param,
        c2,
        c4,
        physical,
        detected,
    })
}

fn state_point(panel: &'static str, id: &str, param: Option<f64>, rho: &DensityMatrix) -> Result<PointRow> {
    let (c2, c4) = zoo::rrm_point(rho).map_err(validation)?;
    point(panel, id, param, c2, c4, true, rho.dims().d)
}

/// F_min(r, ·) sampled at 200 points on [0, cap(r)] for r = 1..d.
fn curves(panel: &'static str, d: usize) -> Result<Vec<CurveRow>> {
    let mut out = Vec::new();
    for r in 1..=d {
        let cap = second_moment_cap(r, d);
        for i in 0..200 {
            let y = cap * i as f64 / 199.0;
            out.push(CurveRow {
                panel,
                r,
                c2: y,
                f_min: f_min(r, y, d).map_err(validation)?,
            });
        }
    }
    Ok(out)
}

const P_GRID: [f64; 5] = [1.0, 0.9, 0.8, 0.7, 0.6];

pub fn fig2(common: &Common) -> Result<(PathBuf, Vec<String>)> {
    let dir = recipe_dir(common.out.as_deref(), "fig2")?;
    let mut rows = Vec::new();
    for p in P_GRID {
        rows.push(state_point(
            "a",
            "isotropic",
            Some(p),
            &zoo::isotropic(3, p).map_err(validation)?,
        )?);
    }
    for u in P_GRID {
        // ϱ(u) is not positive semidefinite; its moments are still placed from the operator
        let op = zoo::rho_u_operator::<f64>(u).map_err(validation)?;
        let (c2, c4) = zoo::rrm_point_operator(&op, 3).map_err(validation)?;
        rows.push(point("a", "rho_u", Some(u), c2, c4, false, 3)?);
    }
    rows.push(state_point("a", "upb", None, &zoo::upb_tiles().map_err(validation)?)?);
    let cb = zoo::detected_chessboard_params();
    rows.push(state_point(
        "a",
        "chessboard",
        None,
        &zoo::chessboard(&cb).map_err(validation)?,
    )?);
    let mut files = Vec::new();
    write_in(&dir, "points.csv", &csv_bytes(&rows)?, &mut files)?;
    write_in(&dir, "curves.csv", &csv_bytes(&curves("a", 3)?)?, &mut files)?;
    write_in(
        &dir,
        "chessboard_params.json",
        &(serde_json::to_string_pretty(&cb)? + "\n").into_bytes(),
        &mut files,
    )?;
    Ok((dir, files))
}

pub fn sfig1(common: &Common) -> Result<(PathBuf, Vec<String>)> {
    let dir = recipe_dir(common.out.as_deref(), "sfig1")?;
    let mut rows = Vec::new();
    for (i, probs) in zoo::bell_examples().iter().enumerate() {
        let rho = zoo::bell_diagonal(probs).map_err(validation)?;
        rows.push(state_point("a", &format!("P{}", i + 1), None, &rho)?);
    }
    for p in P_GRID {
        rows.push(state_point(
            "b",
            "isotropic",
            Some(p),
            &zoo::isotropic(4, p).map_err(validation)?,
        )?);
    }
    rows.push(state_point("b", "piani", None, &zoo::piani().map_err(validation)?)?);
    let mut all_curves = curves("a", 3)?;
    all_curves.extend(curves("b", 4)?);
    let mut files = Vec::new();
    write_in(&dir, "points.csv", &csv_bytes(&rows)?, &mut files)?;
    write_in(&dir, "curves.csv", &csv_bytes(&all_curves)?, &mut files)?;
    Ok((dir, files))
}

fn fig3(common: &Common, name: &str, config: ShadowExperimentConfig) -> Result<(PathBuf, Vec<String>)> {
    let dir = recipe_dir(common.out.as_deref(), name)?;
    let points = fidelity_error_experiment(&config).map_err(validation)?;
    let mut files = Vec::new();
    write_in(&dir, "errors.csv", &csv_bytes(&shadow_rows(&points))?, &mut files)?;
    Ok((dir, files))
}

pub fn fig3a(common: &Common) -> Result<(PathBuf, Vec<String>)> {
    let config = ShadowExperimentConfig {
        n_qubits: 5,
        ensembles: vec![Ensemble::GlobalOrthogonal, Ensemble::GlobalUnitary],
        grid_kind: GridKind::Probability,
        grid: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        n_settings: common.settings.unwrap_or(2000),
        p: 0.0,
        n_runs: common.runs.unwrap_or(100),
        seed: seed_or(common)?,
    };
    fig3(common, "fig3a", config)
}

pub fn fig3b(common: &Common) -> Result<(PathBuf, Vec<String>)> {
    let config = ShadowExperimentConfig {
        n_qubits: 5,
        ensembles: vec![Ensemble::LocalOrthogonal, Ensemble::LocalUnitary],
        grid_kind: GridKind::Settings,
        grid: vec![100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0],
        n_settings: 0,
        p: 0.5,
        n_runs: common.runs.unwrap_or(100),
        seed: seed_or(common)?,
    };
    fig3(common, "fig3b", config)
}

#[derive(Serialize)]
struct OverlapErrorRow {
    n_settings: usize,
    mean_abs_error: f64,
    std: f64,
    runs: usize,
    seed: u64,
}

pub fn sfig1c(common: &Common) -> Result<(PathBuf, Vec<String>)> {
    let seed = seed_or(common)?;
    let runs = common.runs.unwrap_or(100);
    let dir = recipe_dir(common.out.as_deref(), "sfig1c")?;
    let r1: DensityMatrix = zoo::overlap_family(0.1).map_err(validation)?;
    let r2: DensityMatrix = zoo::overlap_family(0.9).map_err(validation)?;
    let exact = r1.overlap(&r2);
    let params = default_params(5, OverlapVariant::LocalCombo).map_err(validation)?;
    let grid = [100usize, 316, 1000, 3162, 10000];
    let mut rows = Vec::new();
    for (gi, &n) in grid.iter().enumerate() {
        let errors = (0..runs)
            .map(|r| {
                let s = derive_path(seed, &[gi as u64, r as u64]);
                estimate_overlap(&r1, &r2, &params, n, s)
                    .map(|e| (e.value - exact).abs())
                    .map_err(validation)
            })
            .collect::<Result<Vec<f64>>>()?;
        let m = errors.iter().sum::<f64>() / runs as f64;
        let sd = (errors.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (runs.max(2) - 1) as f64).sqrt();
        rows.push(OverlapErrorRow {
            n_settings: n,
            mean_abs_error: m,
            std: sd,
            runs,
            seed,
        });
    }
    let mut files = Vec::new();
    write_in(&dir, "errors.csv", &csv_bytes(&rows)?, &mut files)?;
    Ok((dir, files))
}

#[derive(Serialize)]
struct ScatterRow {
    kind: MeasurementKind,
    point: usize,
    #[serde(rename = "C2")]
    c2: f64,
    #[serde(rename = "C4")]
    c4: f64,
}

#[derive(Serialize)]
struct ExactRow {
    kind: MeasurementKind,
    #[serde(rename = "C2")]
    c2: f64,
    /// No closed form is implemented for the unitary fourth moment.
    #[serde(rename = "C4")]
    c4: Option<f64>,
}

pub fn sfig2(common: &Common, points: usize) -> Result<(PathBuf, Vec<String>)> {
    let seed = seed_or(common)?;
    let n = common.settings.unwrap_or(1000);
    if points == 0 {
        return Err(anyhow!(Validation("--points must be positive".into())));
    }
    let dir = recipe_dir(common.out.as_deref(), "sfig2")?;
    let rho: DensityMatrix = zoo::chessboard(&zoo::detected_chessboard_params()).map_err(validation)?;
    let mut rows = Vec::new();
    for kind in [MeasurementKind::Rm, MeasurementKind::Rrm] {
        for i in 0..points {
            let s = derive_path(seed, &[kind as u64, i as u64]);
            let e = estimate_moments_mc(&rho, kind, &[2, 4], n, common.shots, s).map_err(validation)?;
            rows.push(ScatterRow {
                kind,
                point: i,
                c2: e[0].value,
                c4: e[1].value,
            });
        }
    }
    let exact = vec![
        ExactRow {
            kind: MeasurementKind::Rm,
            c2: exact_moment(&rho, MeasurementKind::Rm, 2).map_err(validation)?,
            c4: None,
        },
        ExactRow {
            kind: MeasurementKind::Rrm,
            c2: exact_moment(&rho, MeasurementKind::Rrm, 2).map_err(validation)?,
            c4: Some(exact_moment(&rho, MeasurementKind::Rrm, 4).map_err(validation)?),
        },
    ];
    let mut files = Vec::new();
    write_in(&dir, "points.csv", &csv_bytes(&rows)?, &mut files)?;
    write_in(&dir, "exact.csv", &csv_bytes(&exact)?, &mut files)?;
    Ok((dir, files))
}
