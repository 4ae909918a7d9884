use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use syzq_core::abelian::{
    automorphy_check, concentration_profile, intersection_points, semiflat::monomial_match, theta_function, theta_rank,
    AbelianError, AbelianInput,
};
use syzq_core::lattice::PointLocation;
use syzq_core::numerics::{tensor_grid, NumericsConfig};
use syzq_core::syz::FiberSamples;
use syzq_core::toric::{
    basis_and_character, bs_fibers, character_rank, condition_star_report, extendability_sweep, moment_limit_check,
    prequantum_residual, ToricError, ToricInput,
};
use thiserror::Error;

use crate::config::RunConfig;
use crate::report::VerificationReport;

/// Points per axis at which theta grids are sampled on the base.
const THETA_BASE_POINTS: usize = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    /// The payload could not be parsed or failed validation.
    #[error("{message}")]
    Invalid {
        kind: String,
        message: String,
        check: String,
    },
    /// A module raised an error while a check was running.
    #[error("{message}")]
    Check {
        kind: String,
        message: String,
        check: String,
    },
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl PipelineError {
    fn invalid(check: &str, kind: &str, message: impl ToString) -> Self {
        Self::Invalid {
            kind: kind.into(),
            message: message.to_string(),
            check: check.into(),
        }
    }

    fn abelian(check: &str, e: AbelianError) -> Self {
        Self::Check {
            kind: e.kind().into(),
            message: e.to_string(),
            check: check.into(),
        }
    }

    fn toric(check: &str, e: ToricError) -> Self {
        Self::Check {
            kind: e.kind().into(),
            message: e.to_string(),
            check: check.into(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err<E: std::error::Error + Send + Sync + 'static>(path: &Path) -> impl FnOnce(E) -> PipelineError + '_ {
    move |e| PipelineError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, PipelineError> {
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(io_err(&path))
}

fn write_metadata(out: &mut impl Write, meta: &[(String, String)]) -> std::io::Result<()> {
    meta.iter().try_for_each(|(k, v)| writeln!(out, "# {k}={v}"))
}

fn numeric_metadata(cfg: &NumericsConfig) -> Vec<(String, String)> {
    [
        ("truncation", cfg.truncation.to_string()),
        ("grid", cfg.grid.to_string()),
        ("fd_step", cfg.fd_step.to_string()),
        ("fd_order", cfg.fd_order.order().to_string()),
        ("hbar", cfg.hbar.to_string()),
        ("residual_tol", cfg.residual_tol.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<(), PipelineError> {
    let path = dir.join(name);
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(std::io::Error::from)
        .and_then(|_| writeln!(out))
        .and_then(|_| out.flush())
        .map_err(io_err(&path))
}

fn point_label(p: &[i64]) -> String {
    p.iter().map(i64::to_string).collect::<Vec<_>>().join("_")
}

pub fn run_abelian(config: &RunConfig, dir: &Path, report: &mut VerificationReport) -> Result<(), PipelineError> {
    let cfg = &config.numerics;
    let input: AbelianInput = serde_json::from_value(config.datum.clone())
        .map_err(|e| PipelineError::invalid("parse", "InvalidPayload", e))?;
    let datum = input
        .validate()
        .map_err(|e| PipelineError::invalid("validate", e.kind(), e))?;
    let det_q = datum.det_q();
    report.set("detQ", det_q);

    let points = intersection_points(&datum);
    report.set("num_points", points.len());
    report.holds("num_points == |det Q|", points.len() as i64 == det_q.abs());

    let mut thetas = Vec::with_capacity(points.len());
    for p in &points {
        let check = format!("theta[{}]", p.index);
        let t = theta_function(&datum, &p.to_f64(), cfg).map_err(|e| PipelineError::abelian(&check, e))?;
        report.at_most(
            &format!("{check}.dbar_residual"),
            t.residual.residual,
            t.residual.tolerance,
        );
        report.note_truncation_bound(t.section.truncation_bound());
        let auto = automorphy_check(&t, cfg).map_err(|e| PipelineError::abelian(&format!("{check}.automorphy"), e))?;
        let deviation = auto
            .factors
            .iter()
            .map(|f| f.frame_deviation.max(f.unitary_deviation))
            .fold(auto.fiber_periodicity, f64::max);
        report.push_check(&format!("{check}.automorphy"), deviation, auto.tolerance, auto.pass);
        thetas.push(t);
    }
    let dbar_max = thetas.iter().map(|t| t.residual.residual).fold(0.0, f64::max);
    report.set("dbar_residual", dbar_max);

    let rank = theta_rank(&thetas, cfg);
    report.holds("rank == |det Q|", rank.rank as i64 == det_q.abs());
    report.set("rank", rank.rank);
    report.set("rank_report", &rank);

    if config.emit.theta_grid {
        let base = tensor_grid(datum.dim(), THETA_BASE_POINTS, 0.0, 1.0, 0.0);
        for (p, t) in points.iter().zip(&thetas) {
            let mut samples = FiberSamples::from_section(&t.section, &base, cfg.grid, true);
            samples.push_metadata("point", format!("{:?}", t.point));
            samples.push_metadata("dbar_residual", t.residual.residual);
            samples.push_metadata("residual_tol", t.residual.tolerance);
            let name = format!("theta_grid_{}.csv", p.index);
            let path = dir.join(&name);
            let out = create(dir, &name)?;
            samples.write_csv(out).map_err(csv_err(&path))?;
        }
    }

    if config.emit.concentration_table {
        let settings = &config.concentration;
        let x0 = points
            .first()
            .map(|p| p.to_f64())
            .unwrap_or_else(|| vec![0.0; datum.dim()]);
        let table = concentration_profile(&datum, &x0, &settings.radii, &settings.hbars, cfg)
            .map_err(|e| PipelineError::abelian("concentration", e))?;
        report.holds("concentration.monotone", table.monotone);
        let name = "concentration_table.csv";
        let path = dir.join(name);
        let mut out = create(dir, name)?;
        let meta = [
            ("point".to_string(), format!("{x0:?}")),
            ("quadrature_points".to_string(), table.quadrature_points.to_string()),
            ("truncation".to_string(), table.truncation.to_string()),
        ];
        write_metadata(&mut out, &meta).map_err(io_err(&path))?;
        table.write_csv(&mut out).map_err(csv_err(&path))?;
        report.set("concentration", &table.rows);
    }
    Ok(())
}

pub fn run_toric(config: &RunConfig, dir: &Path, report: &mut VerificationReport) -> Result<(), PipelineError> {
    let cfg = &config.numerics;
    let input: ToricInput = serde_json::from_value(config.datum.clone())
        .map_err(|e| PipelineError::invalid("parse", "InvalidPayload", e))?;
    let datum = input
        .build()
        .map_err(|e| PipelineError::invalid("validate", e.kind(), e))?;

    let lattice = datum.lattice_points();
    let interior = lattice.iter().filter(|p| p.location == PointLocation::Interior).count();
    report.set("lattice", lattice.len());
    report.set("interior", interior);
    {
        let path = dir.join("lattice_points.csv");
        let out = create(dir, "lattice_points.csv")?;
        datum.polytope().write_lattice_points_csv(out).map_err(csv_err(&path))?;
    }

    let pre = prequantum_residual(&datum, cfg);
    report.at_most("prequantum.hessian_residual", pre.residual, pre.tolerance);
    report.at_most("prequantum.kahler_imaginary", pre.kahler_imaginary, pre.tolerance);
    report.set("prequantum", &pre);

    let limits: Vec<_> = (0..datum.fan().num_rays())
        .map(|j| moment_limit_check(&datum, j))
        .collect();
    for m in &limits {
        let last = m.residuals.last().copied().unwrap_or(0.0);
        report.push_check(&format!("moment_limit[{}]", m.generator), last, 1e-3, m.pass);
    }
    report.set("moment_limits", &limits);

    let fibers = bs_fibers(&datum, cfg).map_err(|e| PipelineError::toric("bs_fibers", e))?;
    report.set("bs_fibers", fibers.len());
    report.holds("bs_fibers == lattice", fibers.len() == lattice.len());
    write_json(
        dir,
        "bs_fibers.json",
        &json!({ "newton_tol": cfg.newton_tol, "fibers": fibers }),
    )?;

    let meta = numeric_metadata(cfg);
    let mut worst = 0.0f64;
    for p in lattice {
        let check = format!("character[{}]", point_label(&p.coords));
        let (_, matched) = basis_and_character(&datum, &p.coords, cfg).map_err(|e| PipelineError::toric(&check, e))?;
        report.at_most(&check, matched.residual, matched.tolerance);
        worst = worst.max(matched.residual);
        if config.emit.character_grid {
            let name = format!("character_{}.csv", point_label(&p.coords));
            let path = dir.join(&name);
            let mut m = meta.clone();
            m.push(("u".into(), format!("{:?}", p.coords)));
            m.push(("tolerance".into(), matched.tolerance.to_string()));
            let out = create(dir, &name)?;
            matched.write_csv(out, &m).map_err(io_err(&path))?;
        }
    }
    report.set("character_residual", worst);

    let rank = character_rank(&datum, cfg).map_err(|e| PipelineError::toric("character_rank", e))?;
    report.holds("rank == lattice", rank.rank == lattice.len());
    report.set("rank", rank.rank);
    report.set("rank_report", &rank);

    let sweep = extendability_sweep(&datum);
    let misclassified = sweep
        .iter()
        .filter(|r| r.bounded != datum.polytope().contains(&r.m))
        .count();
    report.at_most("extendability.misclassified", misclassified as f64, 0.0);
    report.set(
        "extendability",
        json!({ "probes": sweep.len(), "misclassified": misclassified }),
    );

    let star = condition_star_report(&datum, datum.lambda()).map_err(|e| PipelineError::toric("condition_star", e))?;
    let gap = star
        .generators
        .iter()
        .flat_map(|g| g.gaps.last().copied())
        .chain(star.mixed.iter().flat_map(|m| m.values.last().map(|v| v.abs())))
        .fold(0.0, f64::max);
    report.push_check("condition_star", gap, star.tolerance, star.pass);
    report.set("condition_star", &star);
    Ok(())
}

pub fn run_demo(config: &RunConfig, dir: &Path, report: &mut VerificationReport) -> Result<(), PipelineError> {
    let cfg = &config.numerics;
    let mut rows = Vec::with_capacity(config.demo.k.len());
    for &k in &config.demo.k {
        let check = format!("monomial[{k}]");
        let m = monomial_match(k, cfg).map_err(|e| PipelineError::abelian(&check, e))?;
        report.push_check(&check, m.residual, cfg.residual_tol, m.pass && m.degree == k);
        rows.push(m);
    }
    report.set("table", &rows);

    let name = "demo_table.csv";
    let path = dir.join(name);
    let mut out = create(dir, name)?;
    write_metadata(&mut out, &numeric_metadata(cfg)).map_err(io_err(&path))?;
    let mut w = csv::Writer::from_writer(out);
    let written: Result<(), csv::Error> = (|| {
        w.write_record(["k", "degree", "coefficient", "residual", "dbar_residual", "pass"])?;
        for m in &rows {
            w.write_record(&[
                m.k.to_string(),
                m.degree.to_string(),
                format!("{:e}", m.coefficient),
                format!("{:e}", m.residual),
                format!("{:e}", m.dbar_residual),
                m.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })();
    written.map_err(csv_err(&path))?;
    report.set("rows", Value::from(rows.len()));
    Ok(())
}
