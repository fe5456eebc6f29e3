//! The workflows behind each subcommand. They return their CSV and text
//! rather than printing, so runs can be compared and replayed.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{RunConfig, PER_KM2};
use super::output::{
    render_table, to_csv, AnalyzeRow, ProfileRow, SimulateRow, TableRow,
};
use super::CliError;
use crate::montecarlo::{estimate_rate, RateMode};
use crate::optimize::{optimal_density, DensityOptimum, DensitySearch, OptimumStatus};
use crate::rate::{aggregate_rates, QuadratureConfig, RateComponent, Setup};
use crate::scenario::{OperatorId, OperatorParams, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CommandSpec {
    Analyze,
    Simulate,
    Optimize { objective: Setup },
    Table { w_ratios: Vec<f64>, p_ratios: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    pub csv: String,
    pub text: String,
}

pub fn execute(config: &RunConfig, spec: &CommandSpec) -> Result<Outputs, CliError> {
    let scenario = config.scenario()?;
    let qc = config.quadrature()?;
    match spec {
        CommandSpec::Analyze => analyze(&scenario, &qc),
        CommandSpec::Simulate => simulate(config, &scenario, &qc),
        CommandSpec::Optimize { objective } => optimize(config, &scenario, &qc, *objective),
        CommandSpec::Table { w_ratios, p_ratios } => table(config, &scenario, &qc, w_ratios, p_ratios),
    }
}

fn component_row(name: &str, c: &RateComponent) -> AnalyzeRow {
    AnalyzeRow {
        quantity: name.to_string(),
        unit: "bit/s/Hz".to_string(),
        value: c.value,
        abs_error: c.abs_error,
        x_lower: Some(c.x_lower),
        x_upper: Some(c.x_upper),
        evaluations: Some(c.evaluations),
    }
}

fn aggregate_row(name: &str, value: f64, abs_error: f64) -> AnalyzeRow {
    AnalyzeRow {
        quantity: name.to_string(),
        unit: "bit/s".to_string(),
        value,
        abs_error,
        x_lower: None,
        x_upper: None,
        evaluations: None,
    }
}

fn describe(scenario: &Scenario) -> String {
    let mut out = String::new();
    for op in OperatorId::ALL {
        let p = scenario.operator(op);
        let _ = writeln!(
            out,
            "operator {}: {:.4} BS/km^2, W = {:.3} MHz, P = {} W",
            op.number(),
            p.density() / PER_KM2,
            p.bandwidth() / 1e6,
            p.power()
        );
    }
    out
}

fn analyze(scenario: &Scenario, qc: &QuadratureConfig) -> Result<Outputs, CliError> {
    let report = aggregate_rates(scenario, qc)?;
    let d = &report.diagnostics;
    let rows = vec![
        component_row("r_bar_1", &d.r_bar_1),
        component_row("r_bar_2", &d.r_bar_2),
        component_row("r_tilde_1", &d.r_tilde_1),
        component_row("r_tilde_2", &d.r_tilde_2),
        aggregate_row("r_nsh", report.r_nsh, report.r_nsh_error(scenario)),
        aggregate_row("r_sh", report.r_sh, report.r_sh_error(scenario)),
    ];
    let mut text = describe(scenario);
    for row in &rows[..4] {
        let _ = writeln!(text, "{:<10} {:>12.6} bit/s/Hz  (+/- {:.1e})", row.quantity, row.value, row.abs_error);
    }
    for row in &rows[4..] {
        let _ = writeln!(text, "{:<10} {:>12.3} Mbit/s", row.quantity, row.value / 1e6);
    }
    let _ = writeln!(text, "ratio      {:>12.4}", report.r_sh / report.r_nsh);
    Ok(Outputs {
        csv: to_csv(&rows)?,
        text,
    })
}

fn simulate(config: &RunConfig, scenario: &Scenario, qc: &QuadratureConfig) -> Result<Outputs, CliError> {
    let report = aggregate_rates(scenario, qc)?;
    let sim = config.simulation(scenario)?;
    let modes = [
        (RateMode::NonSharing(OperatorId::One), report.r_bar_1),
        (RateMode::NonSharing(OperatorId::Two), report.r_bar_2),
        (RateMode::Sharing, report.r_tilde_1 + report.r_tilde_2),
    ];
    let mut rows = Vec::new();
    for (mode, analytic) in modes {
        let mc = estimate_rate(scenario, &sim, mode)?;
        rows.push(SimulateRow {
            mode: mode.label().to_string(),
            analytic,
            mc_mean: mc.mean,
            mc_stderr: mc.stderr,
            rel_gap: (mc.mean - analytic) / analytic,
            no_coverage_fraction: mc.no_coverage_fraction,
        });
    }
    let mut text = describe(scenario);
    let _ = writeln!(
        text,
        "{} realizations, seed {}, window {:.1} m",
        sim.num_realizations, sim.rng_seed, sim.window_radius
    );
    let _ = writeln!(text, "{:<16} {:>10} {:>10} {:>10} {:>9}", "mode", "analytic", "mc", "stderr", "gap");
    for r in &rows {
        let _ = writeln!(
            text,
            "{:<16} {:>10.5} {:>10.5} {:>10.5} {:>8.2}%",
            r.mode,
            r.analytic,
            r.mc_mean,
            r.mc_stderr,
            100.0 * r.rel_gap
        );
    }
    Ok(Outputs {
        csv: to_csv(&rows)?,
        text,
    })
}

fn search(config: &RunConfig, objective: Setup) -> Result<DensitySearch, CliError> {
    let s = &config.search;
    let search = DensitySearch {
        lambda_min: s.lambda_min_per_km2 * PER_KM2,
        lambda_max: s.lambda_max_per_km2 * PER_KM2,
        grid_points: s.grid_points,
        refine_iters: s.refine_iters,
        objective,
        sweep: s.sweep.into(),
    };
    search.validate()?;
    Ok(search)
}

fn optimum_line(label: &str, opt: &DensityOptimum) -> String {
    let mut line = format!(
        "{label}: lambda* = {:.4} BS/km^2, rate* = {:.3} Mbit/s, {}",
        opt.lambda_star / PER_KM2,
        opt.rate_star / 1e6,
        opt.status.label()
    );
    if !opt.neighbor_check.passed {
        line.push_str(", neighbour check failed");
    }
    line.push('\n');
    line
}

fn optimize(config: &RunConfig, scenario: &Scenario, qc: &QuadratureConfig, objective: Setup) -> Result<Outputs, CliError> {
    let search = search(config, objective)?;
    let opt = optimal_density(scenario, &search, qc)?;
    let rows: Vec<ProfileRow> = opt
        .profile
        .iter()
        .map(|p| ProfileRow {
            lambda: p.lambda,
            rate_bit_s: p.rate,
        })
        .collect();
    let mut text = describe(scenario);
    text.push_str(&optimum_line(objective.label(), &opt));
    if opt.status == OptimumStatus::Boundary {
        text.push_str("maximum at the edge of the search range; extend --lambda-range\n");
    }
    Ok(Outputs {
        csv: to_csv(&rows)?,
        text,
    })
}

fn cell_scenario(template: &Scenario, w_ratio: f64, p_ratio: f64) -> crate::Result<Scenario> {
    let op1 = template.operator(OperatorId::One);
    let op2 = template.operator(OperatorId::Two);
    let params = OperatorParams::new(
        op2.density(),
        w_ratio * op1.bandwidth(),
        p_ratio * op1.power(),
        op2.noise_figure(),
    )?;
    Ok(template.with_operator(OperatorId::Two, params))
}

fn table(
    config: &RunConfig,
    template: &Scenario,
    qc: &QuadratureConfig,
    w_ratios: &[f64],
    p_ratios: &[f64],
) -> Result<Outputs, CliError> {
    if w_ratios.is_empty() || p_ratios.is_empty() {
        return Err(CliError::Config("ratio lists must be nonempty".into()));
    }
    for &r in w_ratios.iter().chain(p_ratios) {
        if !(r.is_finite() && r >= 0.0) {
            return Err(CliError::Config(format!("ratio {r} must be finite and >= 0")));
        }
    }
    let searches = [search(config, Setup::NonSharing)?, search(config, Setup::Sharing)?];
    let cells: Vec<(f64, f64)> = p_ratios
        .iter()
        .flat_map(|&p| w_ratios.iter().map(move |&w| (w, p)))
        .collect();

    let results: Vec<[Result<DensityOptimum, String>; 2]> = cells
        .par_iter()
        .map(|&(w, p)| {
            let run = |search: &DensitySearch| {
                cell_scenario(template, w, p)
                    .and_then(|s| optimal_density(&s, search, qc))
                    .map_err(|e| e.to_string())
            };
            [run(&searches[0]), run(&searches[1])]
        })
        .collect();

    if results.iter().flatten().all(Result::is_err) {
        let first = results[0][0].as_ref().err().cloned().unwrap_or_default();
        return Err(CliError::Numerical(format!("every table cell failed; first: {first}")));
    }
    let mut rows = Vec::new();
    let mut notes = String::new();
    for (&(w, p), [nsh, sh]) in cells.iter().zip(&results) {
        for (label, result) in [("non-sharing", nsh), ("sharing", sh)] {
            match result {
                Err(e) => {
                    let _ = writeln!(notes, "W2/W1={w} P2/P1={p} {label}: {e}");
                }
                Ok(opt) if opt.status != OptimumStatus::Interior => {
                    let _ = write!(notes, "W2/W1={w} P2/P1={p} {}", optimum_line(label, opt));
                }
                Ok(_) => {}
            }
        }
        let r_nsh = nsh.as_ref().ok().map(|o| o.rate_star / 1e6);
        let r_sh = sh.as_ref().ok().map(|o| o.rate_star / 1e6);
        rows.push(TableRow {
            w_ratio: w,
            p_ratio: p,
            r_nsh_mbit_s: r_nsh,
            r_sh_mbit_s: r_sh,
            ratio: r_nsh.zip(r_sh).map(|(a, b)| b / a),
        });
    }
    let mut text = render_table(&rows, w_ratios, p_ratios);
    if !notes.is_empty() {
        text.push('\n');
        text.push_str(&notes);
    }
    Ok(Outputs {
        csv: to_csv(&rows)?,
        text,
    })
}
