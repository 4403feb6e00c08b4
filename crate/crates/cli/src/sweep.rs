//! The sweep engine: one row per (game, N), computed in parallel,
//! reported as CSV or JSON with a fixed column order.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use stackrobust::ensembles::{example_game, generate_ensemble};
use stackrobust::observation::{
    brute_force_optimum_2xn, exact_expected_payoff, mc_expected_payoff, PayoffEstimate,
    DEFAULT_ENUM_LIMIT,
};
use stackrobust::rng::derive_stream;
use stackrobust::robust::{build_robust_from_solution, payoff_gap_bound};
use stackrobust::{solve_stackelberg, Error, EvalMethod, MixedStrategy, NormalFormGame};

use crate::config::{EvalSpec, GameSource, ReportFormat, SweepConfig};
use crate::error::{CliError, Result};
use crate::load::load_game_file;

/// Brute-force grid for the m=2 optimum column.
const BRUTE_GRID: usize = 1000;
/// Golden-section refinement iterations around the best grid cell.
const BRUTE_REFINE: usize = 64;

/// One sweep cell. Numeric fields are absent (empty CSV cell / JSON null)
/// when the cell failed; the failure itself lands in `error`. The stderr
/// fields are present only for Monte Carlo evaluations, and `f_N_brute`
/// only for two-row games.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub game_id: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub f_star_inf: Option<f64>,
    #[serde(rename = "f_N_stackelberg")]
    pub f_n_stackelberg: Option<f64>,
    #[serde(rename = "f_N_robust")]
    pub f_n_robust: Option<f64>,
    pub delta: Option<f64>,
    pub l1_step: Option<f64>,
    pub epsilon: Option<f64>,
    pub epsilon_valid: Option<bool>,
    pub gap_bound: Option<f64>,
    #[serde(rename = "f_N_brute")]
    pub f_n_brute: Option<f64>,
    #[serde(rename = "f_N_stackelberg_stderr")]
    pub f_n_stackelberg_stderr: Option<f64>,
    #[serde(rename = "f_N_robust_stderr")]
    pub f_n_robust_stderr: Option<f64>,
    pub error: Option<String>,
}

const CSV_HEADER: &str = "game_id,N,f_star_inf,f_N_stackelberg,f_N_robust,delta,l1_step,\
                          epsilon,epsilon_valid,gap_bound,f_N_brute,f_N_stackelberg_stderr,\
                          f_N_robust_stderr,error";

impl SweepRow {
    fn empty(game_id: String, n: u64) -> Self {
        SweepRow {
            game_id,
            n,
            f_star_inf: None,
            f_n_stackelberg: None,
            f_n_robust: None,
            delta: None,
            l1_step: None,
            epsilon: None,
            epsilon_valid: None,
            gap_bound: None,
            f_n_brute: None,
            f_n_stackelberg_stderr: None,
            f_n_robust_stderr: None,
            error: None,
        }
    }
}

/// Materialize the configured game list in order (ensembles expand in
/// place), so game indices — and therefore derived seeds — are stable.
pub fn load_sources(sources: &[GameSource]) -> Result<Vec<NormalFormGame>> {
    let mut games = Vec::new();
    for source in sources {
        match source {
            GameSource::File(path) => games.push(load_game_file(path)?),
            GameSource::Example(id) => {
                games.push(example_game(*id).map_err(|e| CliError::GameLoad(e.to_string()))?);
            }
            GameSource::Ensemble { count, targets, seed } => {
                let ensemble = generate_ensemble(*count, *targets, *seed)
                    .map_err(|e| CliError::GameLoad(e.to_string()))?;
                games.extend(ensemble);
            }
        }
    }
    Ok(games)
}

/// Run every (game, N) cell. Cells are independent and run on the rayon
/// pool; all randomness is derived from `(seed, game index, N index)`, so
/// results are identical regardless of scheduling. Per-cell computation
/// failures are recorded in the row's `error` field, not raised.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let games = load_sources(&config.games)?;
    let n_count = config.n_values.len();
    let rows = (0..games.len() * n_count)
        .into_par_iter()
        .map(|index| {
            let game = &games[index / n_count];
            let n_index = index % n_count;
            let mut row = SweepRow::empty(game.name.clone(), config.n_values[n_index]);
            if let Err(error) =
                compute_cell(config, game, index / n_count, n_index, &mut row)
            {
                row.error = Some(error.to_string());
            }
            row
        })
        .collect();
    Ok(rows)
}

fn compute_cell(
    config: &SweepConfig,
    game: &NormalFormGame,
    game_index: usize,
    n_index: usize,
    row: &mut SweepRow,
) -> stackrobust::Result<()> {
    let n = config.n_values[n_index];
    let solution = solve_stackelberg(game)?;
    row.f_star_inf = Some(solution.value);
    let robust = build_robust_from_solution(game, &solution, n, config.p_exponent)?;
    row.delta = Some(robust.delta);
    row.l1_step = Some(robust.l1_step);
    row.epsilon = Some(robust.epsilon);
    row.epsilon_valid = Some(robust.epsilon_valid);
    row.gap_bound =
        Some(payoff_gap_bound(game, solution.value, robust.l1_step, robust.epsilon));

    let cell_key = derive_stream(derive_stream(config.seed, game_index as u64), n_index as u64);
    let ideal = evaluate(config.eval, game, &solution.commitment, n, derive_stream(cell_key, 0))?;
    row.f_n_stackelberg = Some(ideal.mean);
    if ideal.method == EvalMethod::MonteCarlo {
        row.f_n_stackelberg_stderr = Some(ideal.stderr);
    }
    let retreated = evaluate(config.eval, game, &robust.commitment, n, derive_stream(cell_key, 1))?;
    row.f_n_robust = Some(retreated.mean);
    if retreated.method == EvalMethod::MonteCarlo {
        row.f_n_robust_stderr = Some(retreated.stderr);
    }

    if game.num_strategies() == 2 {
        let (_, brute_value) = brute_force_optimum_2xn(game, n, BRUTE_GRID, BRUTE_REFINE)?;
        row.f_n_brute = Some(brute_value);
    }
    Ok(())
}

fn evaluate(
    spec: EvalSpec,
    game: &NormalFormGame,
    x: &MixedStrategy,
    n: u64,
    seed: u64,
) -> stackrobust::Result<PayoffEstimate> {
    match spec {
        EvalSpec::Exact => exact_expected_payoff(game, x, n, DEFAULT_ENUM_LIMIT),
        EvalSpec::Mc { trials } => mc_expected_payoff(game, x, n, trials, seed),
        EvalSpec::Auto { enum_limit, trials } => {
            match exact_expected_payoff(game, x, n, enum_limit) {
                Err(Error::EnumerationTooLarge { .. }) => {
                    mc_expected_payoff(game, x, n, trials, seed)
                }
                other => other,
            }
        }
    }
}

/// Write the report atomically (temp file + rename in the target directory).
/// CSV columns follow [`SweepRow`] field order with 12 significant digits;
/// JSON is a pretty-printed array of row objects.
pub fn emit_report(rows: &[SweepRow], format: ReportFormat, path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(CliError::Config("refusing to write an empty report".into()));
    }
    let body = match format {
        ReportFormat::Csv => render_csv(rows),
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(rows)
                .map_err(|e| CliError::Config(format!("serializing report: {e}")))?;
            text.push('\n');
            text
        }
    };
    atomic_write(path, body.as_bytes())
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(path, e))?;
    let mut file =
        tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    file.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    file.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        push_text(&mut out, &row.game_id);
        out.push(',');
        out.push_str(&row.n.to_string());
        for value in [
            row.f_star_inf,
            row.f_n_stackelberg,
            row.f_n_robust,
            row.delta,
            row.l1_step,
            row.epsilon,
        ] {
            out.push(',');
            push_float(&mut out, value);
        }
        out.push(',');
        if let Some(valid) = row.epsilon_valid {
            out.push_str(if valid { "true" } else { "false" });
        }
        for value in [
            row.gap_bound,
            row.f_n_brute,
            row.f_n_stackelberg_stderr,
            row.f_n_robust_stderr,
        ] {
            out.push(',');
            push_float(&mut out, value);
        }
        out.push(',');
        if let Some(error) = &row.error {
            push_text(&mut out, error);
        }
        out.push('\n');
    }
    out
}

/// 12 significant digits, exponent notation: enough to reconstruct every
/// plotted quantity, stable across runs.
fn push_float(out: &mut String, value: Option<f64>) {
    if let Some(v) = value {
        out.push_str(&format!("{v:.11e}"));
    }
}

/// Minimal CSV quoting: wrap in quotes when the text contains a comma,
/// quote or newline; double any quotes inside.
fn push_text(out: &mut String, text: &str) {
    if text.contains([',', '"', '\n']) {
        out.push('"');
        out.push_str(&text.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(text);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_config(eval: EvalSpec, format: ReportFormat) -> SweepConfig {
        SweepConfig {
            games: vec![GameSource::Example(2)],
            n_values: vec![1, 3, 5],
            p_exponent: 0.25,
            eval,
            seed: 7,
            output: "unused.csv".into(),
            format,
        }
    }

    #[test]
    fn example_2_exact_sweep_zeroes_the_stackelberg_column() {
        let config = example_config(EvalSpec::Exact, ReportFormat::Csv);
        let rows = run_sweep(&config).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_eq!(row.game_id, "example2");
            assert!(row.error.is_none());
            assert!(row.f_n_stackelberg.unwrap().abs() < 1e-12);
            assert!((row.f_star_inf.unwrap() - 0.5).abs() < 1e-9);
            assert!(row.f_n_robust.unwrap() > 0.0);
            assert!(row.f_n_brute.is_some());
            assert!(row.f_n_stackelberg_stderr.is_none()); // exact: no stderr
        }
    }

    #[test]
    fn sweeps_are_deterministic_across_runs() {
        let config = example_config(EvalSpec::Mc { trials: 64 }, ReportFormat::Csv);
        let a = run_sweep(&config).unwrap();
        let b = run_sweep(&config).unwrap();
        assert_eq!(render_csv(&a), render_csv(&b));
        assert!(a[0].f_n_robust_stderr.is_some());
    }

    #[test]
    fn auto_switches_to_mc_above_the_enumeration_limit() {
        let mut config =
            example_config(EvalSpec::Auto { enum_limit: 4, trials: 32 }, ReportFormat::Csv);
        config.n_values = vec![2, 50];
        let rows = run_sweep(&config).unwrap();
        // N=2 enumerates 3 count vectors; N=50 needs 51 > 4 -> MC
        assert!(rows[0].f_n_stackelberg_stderr.is_none());
        assert!(rows[1].f_n_stackelberg_stderr.is_some());
    }

    #[test]
    fn certificate_columns_are_consistent_where_valid() {
        // At N = 250000 the two-strategy schedule satisfies the sample-size
        // condition, so the certificate columns must be populated and the
        // certified bound must dominate the realized gap.
        let mut config = example_config(EvalSpec::Exact, ReportFormat::Csv);
        config.n_values = vec![250_000];
        let rows = run_sweep(&config).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!(row.error.is_none());
        assert_eq!(row.epsilon_valid, Some(true));
        let epsilon = row.epsilon.unwrap();
        assert!(epsilon > 0.0 && epsilon < 1.0);
        let gap = row.f_star_inf.unwrap() - row.f_n_robust.unwrap();
        assert!(
            gap <= row.gap_bound.unwrap(),
            "realized gap {gap} above the certified bound {:?}",
            row.gap_bound
        );
    }

    #[test]
    fn per_cell_failures_land_in_the_error_column() {
        let mut config = example_config(EvalSpec::Exact, ReportFormat::Csv);
        config.n_values = vec![10_000_000]; // enumeration cannot fit
        let rows = run_sweep(&config).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error.is_some());
        assert!(rows[0].f_n_stackelberg.is_none());
        // the solve itself succeeded before the evaluation failed
        assert!(rows[0].f_star_inf.is_some());
    }

    #[test]
    fn csv_shape_and_quoting() {
        let mut row = SweepRow::empty("weird,\"name\"".into(), 5);
        row.f_star_inf = Some(0.5);
        let text = render_csv(&[row]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap().split(',').count(), 14);
        let data = lines.next().unwrap();
        assert!(data.starts_with("\"weird,\"\"name\"\"\",5,5.00000000000e-1,"));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn report_files_are_written_and_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let config = example_config(EvalSpec::Exact, ReportFormat::Json);
        let rows = run_sweep(&config).unwrap();
        emit_report(&rows, ReportFormat::Json, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_slice(&first).expect("report must be valid JSON");
        assert_eq!(parsed.as_array().unwrap().len(), 3);
        assert!(parsed[0].get("f_N_stackelberg").is_some());
        emit_report(&rows, ReportFormat::Json, &path).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
        assert!(emit_report(&[], ReportFormat::Json, &path).is_err());
    }

    #[test]
    fn ensemble_sources_expand_in_order() {
        let games = load_sources(&[
            GameSource::Ensemble { count: 3, targets: 5, seed: 11 },
            GameSource::Example(1),
        ])
        .unwrap();
        assert_eq!(games.len(), 4);
        assert_eq!(games[0].name, "security-e11-g0-m5");
        assert_eq!(games[2].name, "security-e11-g2-m5");
        assert_eq!(games[3].name, "example1");
    }
}
