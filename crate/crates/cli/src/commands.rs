//! Command implementations. Each returns a JSON summary that embeds its
//! config; files go to the configured output directory.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use rodlab::critical::{energy_level, family, predicted_knot, singular_u, spectrum, FamilyParams};
use rodlab::export::{tube_mesh, write_framed_csv, write_invariants_csv, write_obj, write_pd, write_trajectory_csv};
use rodlab::framed::{closure_report, hopf, invariants};
use rodlab::knot::{
    classify_diagram, classify_path, diagram_of_path, find_base_double_points, linking, Classification, Direction,
    KnotTable,
};
use rodlab::variational::{energy, fit_lambda, flow, StiefelPoint};
use rodlab::{normal_form, Error, FramedCurve, Parity};

use crate::config::{
    CommandConfig, CurveConfig, CurveSpec, ExperimentConfig, ExportConfig, ExportFormat, FamilyConfig, FlowConfig,
    FlowInit, ParityChoice, SpectrumConfig,
};
use crate::error::{CliError, CliResult};

pub fn run(cfg: &ExperimentConfig) -> CliResult<Value> {
    if cfg.grid_size < 2 {
        return Err(CliError::Input(format!("grid size must be at least 2, got {}", cfg.grid_size)));
    }
    fs::create_dir_all(&cfg.output_dir)?;
    let body = match &cfg.command {
        CommandConfig::Family(c) => run_family(cfg, c)?,
        CommandConfig::Flow(c) => run_flow(cfg, c)?,
        CommandConfig::Classify(c) => run_classify(cfg, c)?,
        CommandConfig::Invariants(c) => run_invariants(cfg, c)?,
        CommandConfig::Spectrum(c) => run_spectrum(c)?,
        CommandConfig::Export(c) => run_export(cfg, c)?,
    };
    let summary = json!({ "config": cfg, "result": &body });
    let path = cfg.output_dir.join(format!("{}_summary.json", cfg.command.name()));
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    log::info!("wrote {}", path.display());
    if let CommandConfig::Flow(_) = cfg.command {
        if body["status"] != "converged" {
            return Err(Error::NoConvergence {
                iterations: body["iterations"].as_u64().unwrap_or(0) as usize,
                residual: body["residual"].as_f64().unwrap_or(f64::NAN),
            }
            .into());
        }
    }
    Ok(summary)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn err_text(e: &Error) -> Value {
    json!({ "error": e.to_string() })
}

fn knot_summary(c: &Classification) -> Value {
    json!({
        "label": c.label,
        "alexander": c.alexander.to_string(),
        "alexander_terms": c.alexander,
        "determinant": c.determinant,
        "crossings": c.crossings,
        "writhe": c.writhe,
        "torus": c.torus,
        "table_matches": c.table_matches,
        "chirality": c.chirality,
        "projection_direction": c.projection_direction,
    })
}

fn write_curve_files(dir: &Path, stem: &str, fc: &FramedCurve, grid: usize, tube_scale: f64) -> CliResult<Value> {
    let curve = dir.join(format!("{stem}_curve.csv"));
    write_framed_csv(create(&curve)?, fc)?;
    let inv = dir.join(format!("{stem}_invariants.csv"));
    write_invariants_csv(create(&inv)?, &invariants(fc.source(), grid)?)?;
    let mesh = dir.join(format!("{stem}_tube.obj"));
    write_obj(create(&mesh)?, &tube_mesh(fc, tube_scale))?;
    Ok(json!({ "curve": file_name(&curve), "invariants": file_name(&inv), "mesh": file_name(&mesh) }))
}

fn run_family(cfg: &ExperimentConfig, c: &FamilyConfig) -> CliResult<Value> {
    if c.u.is_empty() {
        return Err(CliError::Input("no u values given".into()));
    }
    FamilyParams::new(c.h, c.k, c.u[0]).validate()?;
    let us = singular_u(c.h, c.k);
    let members: Vec<Value> = c
        .u
        .par_iter()
        .map(|&u| family_member(cfg, c, u))
        .collect::<CliResult<_>>()?;
    Ok(json!({
        "h": c.h,
        "k": c.k,
        "c": c.h + c.k,
        "d": c.h - c.k,
        "singular_u": us,
        "energy_level": energy_level(c.h + c.k, c.h - c.k)?,
        "members": members,
    }))
}

fn family_member(cfg: &ExperimentConfig, c: &FamilyConfig, u: f64) -> CliResult<Value> {
    let fp = FamilyParams::new(c.h, c.k, u);
    let (q, fc) = family(&fp, cfg.grid_size)?;
    let stem = format!("family_h{}_k{}_u{u}", c.h, c.k);
    let files = write_curve_files(&cfg.output_dir, &stem, &fc, cfg.grid_size, c.tube_scale)?;
    let dir = Direction::Auto { seed: cfg.seed };
    let predicted = match predicted_knot(&fp) {
        Ok(p) => json!({ "label": p.to_string(), "value": p, "canonical": p.canonical() }),
        Err(e) => err_text(&e),
    };
    let double_points = match find_base_double_points(q.q()) {
        Ok(d) => json!({ "continuum": false, "points": d }),
        Err(Error::ContinuumCoincidence) => json!({ "continuum": true, "points": [] }),
        Err(e) => err_text(&e),
    };
    let knot = match rodlab::knot::family_diagram(&fp, dir).and_then(|dg| classify_diagram(&dg, &KnotTable::builtin())) {
        Ok(k) => knot_summary(&k),
        Err(e) => err_text(&e),
    };
    let lk = match linking(&fc, c.epsilon, dir) {
        Ok(r) => json!(r),
        Err(e) => err_text(&e),
    };
    log::info!("family ({}, {}) u = {u} done", c.h, c.k);
    Ok(json!({
        "u": u,
        "energy": energy(q.q()),
        "predicted": predicted,
        "double_points": double_points,
        "knot": knot,
        "linking": lk,
        "files": files,
    }))
}

fn nearest_levels(e: f64) -> Value {
    let levels = spectrum(64);
    let best = levels.iter().map(|l| (e - l.energy).abs() / l.energy).fold(f64::INFINITY, f64::min);
    let matches: Vec<_> = levels.iter().filter(|l| (e - l.energy).abs() / l.energy <= best + 1e-12).collect();
    json!({ "relative_distance": best, "levels": matches })
}

fn run_flow(cfg: &ExperimentConfig, c: &FlowConfig) -> CliResult<Value> {
    let q0 = match &c.init {
        FlowInit::Random { parity, max_freq } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let parity = match parity {
                ParityChoice::Odd => Parity::Odd,
                ParityChoice::Even => Parity::Even,
                ParityChoice::Random if rng.random_bool(0.5) => Parity::Odd,
                ParityChoice::Random => Parity::Even,
            };
            StiefelPoint::random(&mut rng, parity, *max_freq)?
        }
        FlowInit::Curve(spec) => StiefelPoint::new(spec.resolve()?)?,
    };
    let r = flow(&q0, &c.params)?;
    let traj = cfg.output_dir.join("flow_trajectory.csv");
    write_trajectory_csv(create(&traj)?, &r.trajectory)?;
    let limit = cfg.output_dir.join("flow_limit.json");
    fs::write(&limit, serde_json::to_string_pretty(&CurveSpec::QuatPath(r.limit.q().clone()))? + "\n")?;
    let e = energy(r.limit.q());
    let nf = if r.converged() && !r.degenerate {
        match normal_form(&r.limit) {
            Ok(nf) => json!(nf),
            Err(e) => err_text(&e),
        }
    } else {
        json!(null)
    };
    Ok(json!({
        "status": r.status,
        "iterations": r.trajectory.last().map_or(0, |s| s.iteration),
        "initial_energy": energy(q0.q()),
        "energy": e,
        "residual": r.residual,
        "fit_residual": r.fit_residual,
        "degenerate": r.degenerate,
        "nearest_level": nearest_levels(e),
        "normal_form": nf,
        "files": { "trajectory": file_name(&traj), "limit": file_name(&limit) },
    }))
}

fn run_classify(cfg: &ExperimentConfig, c: &CurveConfig) -> CliResult<Value> {
    let q = c.curve.resolve()?;
    let closure = closure_report(&q);
    let mut out = json!({
        "closure": closure,
        "closed": closure.is_closed(1e-10),
        "energy": energy(&q),
    });
    match StiefelPoint::new(q.clone()) {
        Ok(p) => {
            let (lambda, residual) = fit_lambda(&p);
            out["stiefel"] = json!(true);
            out["fit_residual"] = json!(residual);
            out["lambda"] = json!(lambda);
            out["normal_form"] = match normal_form(&p) {
                Ok(nf) => json!(nf),
                Err(Error::NotCritical { residual }) => json!({ "not_critical": true, "residual": residual }),
                Err(e) => err_text(&e),
            };
        }
        Err(e) => {
            out["stiefel"] = json!(false);
            out["normal_form"] = json!({ "not_critical": true, "reason": e.to_string() });
        }
    }
    if closure.is_closed(1e-10) {
        out["knot"] = match classify_path(&q, Direction::Auto { seed: cfg.seed }) {
            Ok(k) => knot_summary(&k),
            Err(e) => err_text(&e),
        };
    }
    Ok(out)
}

fn summarize(v: &[f64]) -> Value {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    json!({ "min": min, "max": max })
}

fn run_invariants(cfg: &ExperimentConfig, c: &CurveConfig) -> CliResult<Value> {
    let q = c.curve.resolve()?;
    let fc = hopf(&q, cfg.grid_size)?;
    let tr = invariants(&q, cfg.grid_size)?;
    let curve = cfg.output_dir.join("curve.csv");
    write_framed_csv(create(&curve)?, &fc)?;
    let inv = cfg.output_dir.join("invariants.csv");
    write_invariants_csv(create(&inv)?, &tr)?;
    Ok(json!({
        "kappa1": summarize(&tr.kappa1),
        "kappa2": summarize(&tr.kappa2),
        "tw": summarize(&tr.tw),
        "st": summarize(&tr.st),
        "files": { "curve": file_name(&curve), "invariants": file_name(&inv) },
    }))
}

fn run_spectrum(c: &SpectrumConfig) -> CliResult<Value> {
    if c.c_max < 1 {
        return Err(CliError::Input(format!("c-max must be positive, got {}", c.c_max)));
    }
    Ok(json!({ "levels": spectrum(c.c_max) }))
}

fn run_export(cfg: &ExperimentConfig, c: &ExportConfig) -> CliResult<Value> {
    let q = c.curve.resolve()?;
    let path: PathBuf = match c.format {
        ExportFormat::Csv => {
            let p = cfg.output_dir.join("curve.csv");
            write_framed_csv(create(&p)?, &hopf(&q, cfg.grid_size)?)?;
            p
        }
        ExportFormat::Obj => {
            let p = cfg.output_dir.join("tube.obj");
            write_obj(create(&p)?, &tube_mesh(&hopf(&q, cfg.grid_size)?, c.tube_scale))?;
            p
        }
        ExportFormat::Pd => {
            let p = cfg.output_dir.join("diagram.pd");
            write_pd(create(&p)?, &diagram_of_path(&q, Direction::Auto { seed: cfg.seed })?)?;
            p
        }
        ExportFormat::Json => {
            let p = cfg.output_dir.join("curve.json");
            fs::write(&p, serde_json::to_string_pretty(&CurveSpec::QuatPath(q))? + "\n")?;
            p
        }
    };
    Ok(json!({ "file": file_name(&path) }))
}
