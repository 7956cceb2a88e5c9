//! Scenario execution: one resolved config in, one table plus a short
//! human-readable summary out.

use super::config::{Command, Figure, RunConfig, Scale};
use super::output::{Cell, Table};
use crate::dispersion::validate_model;
use crate::error::{Error, Result};
use crate::matsubara::{abel_plana_correction, energy_for_model, free_energy_matsubara};
use crate::realaxis::{dump_hi, dump_tm, free_energy_real, linspace, require_dissipative};
use crate::thermo::{classify_anomaly, free_energy, log_grid, nernst_probe, scan, Engine};

/// Largest pairwise relative difference accepted by the cross-check.
pub const CROSS_CHECK_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub summary: Vec<String>,
    /// False when a check embedded in the command (cross-check) failed.
    pub passed: bool,
}

impl Report {
    fn ok(table: Table, summary: Vec<String>) -> Self {
        Self {
            table,
            summary,
            passed: true,
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::FreeEnergy => run_free_energy(cfg),
        Command::EntropyScan => run_entropy_scan(cfg),
        Command::IntegrandDump => run_dump(cfg),
        Command::CrossCheck => cross_check(cfg),
        Command::Validate => run_validate(cfg),
    }
}

fn run_free_energy(cfg: &RunConfig) -> Result<Report> {
    let cavity = cfg.cavity_config();
    let engine = cfg.plan.engine;
    let f = free_energy(&cavity, engine, &cfg.plans())?;
    let mut t = Table::new(&["engine", "T_K", "F_J_per_m2", "err_F"]);
    t.push(vec![engine.name().into(), cavity.temperature.into(), f.value.into(), f.error.into()]);
    let line = format!("F = {:.10e} ± {:.2e} J/m² ({})", f.value, f.error, engine.name());
    Ok(Report::ok(t, vec![line]))
}

fn run_entropy_scan(cfg: &RunConfig) -> Result<Report> {
    let cavity = cfg.cavity_config();
    let grid = log_grid(cfg.plan.T_min_K.unwrap(), cfg.plan.T_max_K.unwrap(), cfg.plan.n_T)?;
    let sc = scan(&cavity, &grid, cfg.plan.engine, &cfg.plans(), cfg.plan.with_integral)?;
    let mut t = Table::new(&["T_K", "F_J_per_m2", "S_fd", "S_int", "err_F", "err_S"]);
    for p in &sc.points {
        t.push(vec![
            p.temperature.into(),
            p.free_energy.into(),
            p.s_fd.into(),
            p.s_int.into(),
            p.err_f.into(),
            p.err_s.into(),
        ]);
    }
    let mut summary = vec![format!(
        "structural prediction: {:?}",
        classify_anomaly(&cavity.model, &cavity.law)
    )];
    match nernst_probe(&sc) {
        Ok(v) => summary.push(format!(
            "S0 = {:.4e} ± {:.2e} J/(K m²), S0·16πa²/k_B = {:.4e}, alpha = {:.3}: {:?}",
            v.s0, v.s0_uncertainty, v.s0_reduced, v.alpha, v.classification
        )),
        Err(e) => summary.push(format!("no T → 0 extrapolation: {e}")),
    }
    Ok(Report::ok(t, summary))
}

fn dump_grid(cfg: &RunConfig) -> Vec<f64> {
    let d = &cfg.dump;
    let (lo, hi, n) = (d.x_min.unwrap(), d.x_max.unwrap(), d.n_x.unwrap());
    match d.x_scale.unwrap() {
        Scale::Linear => linspace(lo, hi, n),
        Scale::Log => linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect(),
    }
}

fn run_dump(cfg: &RunConfig) -> Result<Report> {
    let xs = dump_grid(cfg);
    let d = &cfg.dump;
    let table = match d.figure.unwrap() {
        Figure::Fig1 => {
            let mut t = Table::new(&["x", "t", "H", "I"]);
            for r in dump_hi(&xs, d.t.as_deref().unwrap_or_default()) {
                t.push(vec![r.x.into(), r.t.into(), r.h.into(), r.i.into()]);
            }
            t
        }
        Figure::Fig2 => {
            let mut t = Table::new(&["x", "s", "re_r2_tm", "im_r2_tm"]);
            for r in dump_tm(&xs, d.s.as_deref().unwrap_or_default(), d.eps_inf.unwrap()) {
                t.push(vec![r.x.into(), r.s.into(), r.re_r2_tm.into(), r.im_r2_tm.into()]);
            }
            t
        }
    };
    let line = format!("{} rows", table.rows.len());
    Ok(Report::ok(table, vec![line]))
}

fn rel_diff(x: f64, reference: f64) -> f64 {
    if x == reference {
        0.0
    } else {
        (x - reference).abs() / reference.abs()
    }
}

/// F by the Matsubara sum, the real-axis integral and E plus the
/// sum-minus-integral correction, with pairwise relative differences.
pub fn cross_check(cfg: &RunConfig) -> Result<Report> {
    let cavity = cfg.cavity_config();
    cavity.check()?;
    if !cavity.law.is_constant() {
        return Err(Error::InvalidInput(
            "cross-check needs temperature-independent parameters (model.law = \"constant\")".into(),
        ));
    }
    require_dissipative(&cavity.model)?;
    let plans = cfg.plans();
    let m = free_energy_matsubara(&cavity, &plans.matsubara)?;
    let r = free_energy_real(&cavity, &plans.real_axis)?;
    let e = energy_for_model(&cavity.model, cavity.gap, &plans.matsubara)?;
    let ap = e + abel_plana_correction(&cavity, &plans.matsubara)?;
    let rows = [
        (Engine::Matsubara.name(), m.value, m.error),
        (Engine::RealAxis.name(), r.value, r.error),
        ("matsubara+abelplana", ap.value, ap.error),
    ];
    let mut t = Table::new(&["engine", "F_J_per_m2", "err", "rel_diff_vs_matsubara"]);
    for (name, v, err) in rows {
        t.push(vec![name.into(), v.into(), err.into(), rel_diff(v, m.value).into()]);
    }
    let mut worst: f64 = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            worst = worst.max(rel_diff(rows[j].1, rows[i].1));
        }
    }
    let passed = worst < CROSS_CHECK_TOL;
    let line = format!(
        "max pairwise relative difference {worst:.3e} (tolerance {CROSS_CHECK_TOL:e}): {}",
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(Report {
        table: t,
        summary: vec![line],
        passed,
    })
}

fn run_validate(cfg: &RunConfig) -> Result<Report> {
    let r = validate_model(&cfg.model.model());
    let mut t = Table::new(&["quantity", "value"]);
    let rows: Vec<(&str, Cell)> = vec![
        ("model", r.model.name().into()),
        ("grid_points", Cell::Text(r.grid_points.to_string())),
        ("symmetry_residual", r.symmetry_residual.into()),
        ("min_im_eps", r.min_im_eps.into()),
        ("max_relative_jump", r.max_relative_jump.into()),
        ("all_finite", r.all_finite.into()),
        ("criterion_1_symmetry", r.criterion_symmetry.into()),
        ("criterion_2_dissipation", r.criterion_dissipation.into()),
        ("criterion_3_continuity", r.criterion_continuity.into()),
        ("nernst_safe", r.nernst_safe().into()),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v]);
    }
    let mut summary = Vec::new();
    for (n, ok) in [
        (1, r.criterion_symmetry),
        (2, r.criterion_dissipation),
        (3, r.criterion_continuity),
    ] {
        summary.push(format!("criterion {n}: {}", if ok { "pass" } else { "FAIL" }));
    }
    Ok(Report::ok(t, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Overrides;

    fn config(text: &str) -> RunConfig {
        RunConfig::parse(text).unwrap().resolve(&Overrides::default()).unwrap()
    }

    #[test]
    fn vacuum_cross_check_is_all_zero() {
        let cfg = config("command = \"cross-check\"\n[cavity]\ngap_um = 1.0\n[model]\nkind = \"drude\"\n");
        let rep = cross_check(&cfg).unwrap();
        assert!(rep.passed);
        for row in &rep.table.rows {
            assert_eq!(row[1], Cell::Num(0.0));
            assert_eq!(row[3], Cell::Num(0.0));
        }
    }

    #[test]
    fn plasma_is_rejected_before_any_engine_runs() {
        let cfg = config(
            "command = \"cross-check\"\n[cavity]\ngap_um = 1.0\n[model]\nkind = \"plasma\"\nomega_p = 1.37e16\n",
        );
        let err = cross_check(&cfg).unwrap_err();
        assert!(!err.is_numerical());
        assert!(err.to_string().contains("criterion 2"), "{err}");
    }

    #[test]
    fn fig2_static_limit() {
        let cfg = config(
            "command = \"integrand-dump\"\n[cavity]\ngap_um = 1.0\n[model]\nkind = \"semiconductor_dc\"\neps_inf = 11.66\nomega_0 = 6.6e15\n[dump]\nfigure = \"fig2\"\nx_min = 1e-2\nx_max = 1e6\n",
        );
        let rep = execute(&cfg).unwrap();
        let Cell::Num(re) = rep.table.rows.last().unwrap()[2] else { panic!() };
        assert!((re - 0.709).abs() < 1e-3, "{re}");
    }
}
