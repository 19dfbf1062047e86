//! Subcommand implementations.
//!
//! Sweep rows are computed in parallel and assembled in grid order; every
//! artifact goes through a single atomic writer. Human-facing status lines
//! go to stderr so stdout stays a clean data channel when no output path
//! is given.

use std::env;
use std::f64::consts::{FRAC_PI_8, SQRT_2};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::bounds::{
    chsh_bound_kappa, chsh_pair_sum, correlation, max_corr_search, qm_correlation_sum,
    theorem_bound, ChshSettings, SearchBudget, TripartiteScenario,
};
use crate::hilbert::{pauli_x, pauli_z};
use crate::mdr::{kappa, region_boundary, EnsembleContext, MdrId};
use crate::verify::{run_suites, SuiteOutcome, VerifySettings};

use super::output::{write_atomic, Column, Table};
use super::{Cli, CliError, Command, Result, RunConfig};

/// Residual allowed in the live identity assertions on sweep rows.
const LIVE_CHECK_TOL: f64 = 1e-9;
/// Allowed gap between the optimizer bound and the catalog-constant bound.
const CATALOG_TOL_EXACT: f64 = 1e-9;
/// Same, for the one two-digit catalog constant.
const CATALOG_TOL_TWO_DIGIT: f64 = 5e-3;

/// Relations ordered by ascending correlation bound, the canonical
/// presentation order for tables and bound columns.
fn display_order() -> [MdrId; 6] {
    [
        MdrId::He,
        MdrId::B2,
        MdrId::B1,
        MdrId::We,
        MdrId::Ha,
        MdrId::Oz,
    ]
}

/// Selected relations in display order.
fn selected(config: &RunConfig) -> Vec<MdrId> {
    display_order()
        .into_iter()
        .filter(|m| config.mdrs.contains(m))
        .collect()
}

fn fail<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Failure(e.to_string())
}

/// Entry point: applies the thread cap and dispatches the subcommand.
pub fn run(cli: Cli) -> Result<()> {
    init_thread_pool()?;
    match &cli.command {
        Command::Regions(args) => cmd_regions(&RunConfig::resolve(args, None)?),
        Command::Fig3a(args) => cmd_fig3a(&RunConfig::resolve(args, None)?),
        Command::Fig3b(args) => cmd_fig3b(&RunConfig::resolve(args, None)?),
        Command::BoundsTable(args) => cmd_bounds_table(&RunConfig::resolve(args, None)?),
        Command::Verify(args) => cmd_verify(&RunConfig::resolve(&args.common, Some(args))?),
        Command::MaxSearch(args) => cmd_max_search(&RunConfig::resolve(args, None)?),
    }
}

/// Applies the `MDRLAB_THREADS` cap to the global worker pool.
fn init_thread_pool() -> Result<()> {
    let Ok(raw) = env::var("MDRLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            CliError::Config(format!(
                "MDRLAB_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(())
}

/// Emits a table to the configured output path, or stdout.
fn emit(table: &Table, config: &RunConfig) -> Result<()> {
    let text = table.render(config.format);
    match &config.out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Uniform half-open meter-angle grid with the exact peak angle pi/8
/// spliced in, since the uniform grid never lands on it.
fn theta_grid(config: &RunConfig) -> Vec<f64> {
    let count = config.sweep_count();
    let (start, stop) = (config.theta_start, config.theta_stop);
    let mut thetas: Vec<f64> = (0..count)
        .map(|k| start + (stop - start) * k as f64 / count as f64)
        .collect();
    if FRAC_PI_8 >= start && FRAC_PI_8 < stop && !thetas.contains(&FRAC_PI_8) {
        thetas.push(FRAC_PI_8);
        thetas.sort_by(f64::total_cmp);
    }
    thetas
}

/// One boundary-trace file per selected relation, at the reference
/// ensemble context (both deviations 1, commutator mean 1).
fn cmd_regions(config: &RunConfig) -> Result<()> {
    let Some(dir) = &config.out else {
        return Err(CliError::Config(
            "regions writes one file per relation; --out must name a directory".into(),
        ));
    };
    let ctx = EnsembleContext::new(1.0, 1.0, 1.0);
    for mdr in selected(config) {
        let points = region_boundary(mdr, &ctx, config.boundary_count()).map_err(fail)?;
        let mut table = Table::new();
        table.push("eps", Column::Floats(points.iter().map(|p| p.eps).collect()));
        table.push("eta", Column::Floats(points.iter().map(|p| p.eta).collect()));
        let name = format!(
            "region_{}.{}",
            mdr.label().to_ascii_lowercase(),
            config.format.extension()
        );
        write_atomic(&dir.join(name), &table.render(config.format))?;
    }
    Ok(())
}

/// Correlation bounds, one per selected relation, computed from the basis
/// search on the maximally entangled qubit source at the peak meter angle.
fn correlation_bounds(config: &RunConfig) -> Result<Vec<(MdrId, f64)>> {
    let scenario = TripartiteScenario::qubit_cnot(FRAC_PI_8).map_err(fail)?;
    let budget = SearchBudget::default();
    selected(config)
        .into_iter()
        .map(|mdr| {
            let report = theorem_bound(&scenario, mdr, &budget).map_err(fail)?;
            Ok((mdr, report.rhs()))
        })
        .collect()
}

/// Meter-angle sweep of the simulated correlation sum against each
/// relation's bound; the bounds are meter-independent constants.
fn cmd_fig3a(config: &RunConfig) -> Result<()> {
    let thetas = theta_grid(config);
    let sums: Vec<f64> = thetas
        .par_iter()
        .map(|&t| qm_correlation_sum(t).map_err(fail))
        .collect::<Result<Vec<_>>>()?;
    let bounds = correlation_bounds(config)?;

    let mut table = Table::new();
    table.push("theta3", Column::Floats(thetas.clone()));
    table.push("qm_sum", Column::Floats(sums));
    for (mdr, rhs) in bounds {
        table.push(
            &format!("bound_{}", mdr.label()),
            Column::Floats(vec![rhs; thetas.len()]),
        );
    }
    emit(&table, config)
}

/// Meter-angle sweep of the CHSH pair sum against each relation's cap.
/// Every row is cross-checked against the four-correlation expansion of
/// the pair sum before it is written.
fn cmd_fig3b(config: &RunConfig) -> Result<()> {
    let thetas = theta_grid(config);
    let settings = ChshSettings::default();
    let sums: Vec<f64> = thetas
        .par_iter()
        .map(|&t| {
            let scenario = TripartiteScenario::qubit_cnot(t).map_err(fail)?;
            let chsh = chsh_pair_sum(&scenario, &settings).map_err(fail)?;
            let psi = scenario.psi123();
            let (z, x) = (pauli_z(), pauli_x());
            let four_term = correlation(psi, &z, 1, &z, 2).map_err(fail)?
                + correlation(psi, &x, 0, &x, 1).map_err(fail)?
                + correlation(psi, &x, 1, &x, 2).map_err(fail)?
                + correlation(psi, &z, 0, &z, 1).map_err(fail)?;
            if (chsh - SQRT_2 * four_term).abs() > LIVE_CHECK_TOL {
                return Err(CliError::Failure(format!(
                    "CHSH pair sum {chsh} disagrees with its four-correlation \
                     expansion {} at theta3 = {t}",
                    SQRT_2 * four_term
                )));
            }
            Ok(chsh)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new();
    table.push("theta3", Column::Floats(thetas.clone()));
    table.push("chsh_sum", Column::Floats(sums));
    for mdr in selected(config) {
        table.push(
            &format!("bound_{}", mdr.label()),
            Column::Floats(vec![chsh_bound_kappa(mdr); thetas.len()]),
        );
    }
    // Largest pair sum any state allows under the quadratic (monogamy) cap.
    table.push("qm_quadratic_max", Column::Floats(vec![4.0; thetas.len()]));
    emit(&table, config)
}

/// Catalog constants and the correlation/CHSH caps they induce, with the
/// optimizer-computed bound alongside for cross-checking.
fn cmd_bounds_table(config: &RunConfig) -> Result<()> {
    let computed = correlation_bounds(config)?;
    let mut labels = Vec::new();
    let mut kappas = Vec::new();
    let mut corr_bounds = Vec::new();
    let mut corr_computed = Vec::new();
    let mut chsh_bounds = Vec::new();
    let mut two_digit = Vec::new();
    for (mdr, rhs) in computed {
        let quoted = 2.0 - 0.5 * kappa(mdr);
        let tol = if mdr == MdrId::We {
            CATALOG_TOL_TWO_DIGIT
        } else {
            CATALOG_TOL_EXACT
        };
        if (rhs - quoted).abs() > tol {
            return Err(CliError::Failure(format!(
                "computed {mdr} bound {rhs} drifted from its catalog value {quoted}"
            )));
        }
        labels.push(mdr.label().to_string());
        kappas.push(kappa(mdr));
        corr_bounds.push(quoted);
        corr_computed.push(rhs);
        chsh_bounds.push(chsh_bound_kappa(mdr));
        two_digit.push(mdr == MdrId::We);
    }
    let mut table = Table::new();
    table.push("mdr", Column::Texts(labels));
    table.push("kappa", Column::Floats(kappas));
    table.push("corr_bound", Column::Floats(corr_bounds));
    table.push("corr_bound_computed", Column::Floats(corr_computed));
    table.push("chsh_bound", Column::Floats(chsh_bounds));
    table.push("kappa_two_digit", Column::Flags(two_digit));
    emit(&table, config)
}

fn metric_text(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1e15 {
        format!("{value}")
    } else {
        format!("{value:.3e}")
    }
}

fn outcome_detail(outcome: &SuiteOutcome) -> String {
    let mut detail = String::new();
    for (name, value) in outcome.metrics() {
        if !detail.is_empty() {
            detail.push_str("; ");
        }
        let _ = write!(detail, "{name}={}", metric_text(*value));
    }
    detail
}

/// Runs the selected property suites, reports one line per suite, writes
/// the optional report file, and fails (exit 1) if any suite failed.
fn cmd_verify(config: &RunConfig) -> Result<()> {
    let settings = VerifySettings {
        dims: config.dims.clone(),
        trials: config.trials,
        seed: config.seed,
        restarts: config.restarts,
        negative_control: config.negative_control,
    };
    let outcomes = run_suites(&config.suites, &settings).map_err(fail)?;

    for outcome in &outcomes {
        println!(
            "suite {:<11} {}  max residual {:.3e}  [{}]",
            outcome.suite().label(),
            if outcome.passed() { "PASS" } else { "FAIL" },
            outcome.max_residual(),
            outcome_detail(outcome),
        );
    }

    if config.out.is_some() {
        let mut table = Table::new();
        table.push(
            "suite",
            Column::Texts(outcomes.iter().map(|o| o.suite().label().to_string()).collect()),
        );
        table.push(
            "passed",
            Column::Flags(outcomes.iter().map(SuiteOutcome::passed).collect()),
        );
        table.push(
            "max_residual",
            Column::Floats(outcomes.iter().map(SuiteOutcome::max_residual).collect()),
        );
        table.push(
            "detail",
            Column::Texts(outcomes.iter().map(outcome_detail).collect()),
        );
        emit(&table, config)?;
    }

    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.suite().label())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "suites failed: {}",
            failed.join(", ")
        )))
    }
}

/// Random-restart search for the maximal correlation sum; one row per
/// restart, summary on stderr.
fn cmd_max_search(config: &RunConfig) -> Result<()> {
    let report = max_corr_search(config.restarts, config.seed).map_err(fail)?;
    eprintln!(
        "max-search: best {:.12} over {} restarts (reduced-form maximum {:.12})",
        report.best(),
        report.restart_values().len(),
        report.reduced_form(),
    );
    let mut table = Table::new();
    table.push(
        "restart",
        Column::Ints((0..report.restart_values().len() as i64).collect()),
    );
    table.push("value", Column::Floats(report.restart_values().to_vec()));
    emit(&table, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::CommonArgs;

    fn config_with(args: CommonArgs) -> RunConfig {
        RunConfig::resolve(&args, None).unwrap()
    }

    #[test]
    fn theta_grid_is_half_open_and_contains_the_exact_peak() {
        let config = config_with(CommonArgs {
            theta_count: Some(8),
            ..CommonArgs::default()
        });
        let grid = theta_grid(&config);
        assert_eq!(grid.len(), 9, "8 uniform points plus the spliced peak");
        assert!(grid.contains(&FRAC_PI_8));
        assert_eq!(grid[0], 0.0);
        let last = *grid.last().unwrap();
        assert!(last < std::f64::consts::TAU, "grid must exclude the stop angle");
        assert!(grid.windows(2).all(|w| w[0] < w[1]), "rows must stay ordered");
    }

    #[test]
    fn regions_without_an_output_directory_is_a_config_error() {
        let config = config_with(CommonArgs::default());
        let err = cmd_regions(&config).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
    }

    #[test]
    fn region_files_land_per_relation_with_the_requested_format() {
        let dir = tempfile::tempdir().unwrap();
        let config = config_with(CommonArgs {
            out: Some(dir.path().to_path_buf()),
            mdr: Some("he,b1".into()),
            theta_count: Some(64),
            format: Some("json".into()),
            ..CommonArgs::default()
        });
        cmd_regions(&config).unwrap();
        let he = std::fs::read_to_string(dir.path().join("region_he.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&he).unwrap();
        assert_eq!(v["eps"].as_array().unwrap().len(), 64);
        assert!(dir.path().join("region_b1.json").exists());
        assert!(!dir.path().join("region_oz.json").exists());
    }

    #[test]
    fn selected_relations_keep_display_order_regardless_of_flag_order() {
        let config = config_with(CommonArgs {
            mdr: Some("oz,he,we".into()),
            ..CommonArgs::default()
        });
        assert_eq!(selected(&config), vec![MdrId::He, MdrId::We, MdrId::Oz]);
    }

    #[test]
    fn metric_text_keeps_counts_readable() {
        assert_eq!(metric_text(800.0), "800");
        assert_eq!(metric_text(3.25e-12), "3.250e-12");
    }
}
