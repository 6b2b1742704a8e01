//! Grid scenarios, the BS-density sweep, and its CSV / plot-data outputs.
//!
//! For every `(K, α)` sweep point three solutions are compared:
//!
//! * `proposed`: PSO powers maximizing the potential, LP allocation;
//! * `ref1`: every BS at `p_max`, equal split of the server;
//! * `ref2`: every BS at `p_max`, equal split capped at demand.
//!
//! Each point gets its own PSO seed, `splitmix64(splitmix64(seed ^ K) ^ bits(α))`,
//! so points are independent of each other and of evaluation order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{AllocationResult, Scheme};
use crate::demand::DemandProfile;
use crate::error::{Error, Result};
use crate::game::{evaluate_with_deltas, GameEvaluation};
use crate::netmodel::{ChannelParams, NetworkScenario, PowerProfile, ScenarioParams};
use crate::pso::{optimize_powers, PsoConfig};

/// Sweep configuration, read from a flat JSON object. Missing keys take
/// their defaults; the SINR threshold is given in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Side of the square deployment zone in meters.
    pub zone_side: f64,
    pub bs_counts: Vec<usize>,
    pub alphas: Vec<f64>,
    pub f_ue: f64,
    pub rho: f64,
    pub mu: f64,
    pub threshold_db: f64,
    pub sigma2: f64,
    pub p_max: f64,
    pub p_floor: f64,
    pub r_max: f64,
    pub server_capacity: f64,
    pub epsilon: f64,
    pub b: f64,
    pub n_particles: usize,
    pub max_iters: usize,
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            zone_side: 100.0,
            bs_counts: vec![4, 9, 16, 25],
            alphas: vec![3.0, 4.0, 5.0],
            f_ue: 1.0,
            rho: 1e-2,
            mu: 1.0,
            threshold_db: 10.0,
            sigma2: 1e-15,
            p_max: 5.0,
            p_floor: 1e-6,
            r_max: 100.0,
            server_capacity: 1.0,
            epsilon: 0.5,
            b: 0.5,
            n_particles: 6,
            max_iters: 5,
            inertia: 0.8,
            c1: 0.9,
            c2: 0.9,
            seed: 2019,
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.bs_counts.is_empty() || self.bs_counts.contains(&0) {
            return Err(Error::Config(
                "bs_counts must be nonempty and each >= 1".into(),
            ));
        }
        if self.alphas.is_empty() {
            return Err(Error::Config("alphas must be nonempty".into()));
        }
        if !(self.zone_side.is_finite() && self.zone_side > 0.0) {
            return Err(Error::Config("zone_side must be > 0".into()));
        }
        for &alpha in &self.alphas {
            self.scenario_params(alpha)
                .map_err(|e| Error::Config(format!("alpha = {alpha}: {e}")))?;
        }
        self.pso_config(1, 0).validate()
    }

    /// Model parameters for one path-loss exponent.
    pub fn scenario_params(&self, alpha: f64) -> Result<ScenarioParams<f64>> {
        let params = ScenarioParams {
            channel: ChannelParams::with_threshold_db(
                self.mu,
                self.sigma2,
                self.threshold_db,
                alpha,
            )?,
            rho: self.rho,
            f_ue: self.f_ue,
            r_max: self.r_max,
            p_max: self.p_max,
            p_floor: self.p_floor,
            epsilon: self.epsilon,
            b: self.b,
            server_capacity: self.server_capacity,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn pso_config(&self, dim: usize, seed: u64) -> PsoConfig<f64> {
        PsoConfig {
            n_particles: self.n_particles,
            max_iters: self.max_iters,
            inertia: self.inertia,
            c1: self.c1,
            c2: self.c2,
            dim,
            lower_bound: self.p_floor,
            upper_bound: self.p_max,
            seed,
        }
    }

    pub fn zone_area(&self) -> f64 {
        self.zone_side * self.zone_side
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// PSO seed for one sweep point.
pub fn point_seed(master: u64, k_count: usize, alpha: f64) -> u64 {
    splitmix64(splitmix64(master ^ k_count as u64) ^ alpha.to_bits())
}

/// `K` stations at cell centers of a `⌈√K⌉ × ⌈√K⌉` grid over the zone,
/// filled row-major.
pub fn make_grid_scenario(
    k_count: usize,
    zone_side: f64,
    params: ScenarioParams<f64>,
) -> Result<NetworkScenario<f64>> {
    if k_count == 0 {
        return Err(Error::argument("grid needs at least one base station"));
    }
    let per_side = (1..).find(|n| n * n >= k_count).expect("finite");
    let cell = zone_side / per_side as f64;
    let positions = (0..k_count)
        .map(|i| {
            let (col, row) = (i % per_side, i / per_side);
            [(col as f64 + 0.5) * cell, (row as f64 + 0.5) * cell]
        })
        .collect();
    NetworkScenario::from_positions(positions, params)
}

/// Everything computed for one solution at one sweep point.
#[derive(Debug, Clone)]
pub struct SolutionOutcome {
    pub scheme: Scheme,
    pub powers: PowerProfile<f64>,
    pub demand: DemandProfile<f64>,
    pub allocation: AllocationResult<f64>,
    pub game: GameEvaluation<f64>,
    /// Number of ordered pairs with a negative demand delta.
    pub negative_deltas: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub k_count: usize,
    pub alpha: f64,
    pub density: f64,
    pub server_capacity: f64,
    pub solutions: Vec<SolutionOutcome>,
}

fn solve_with_powers(
    scenario: &NetworkScenario<f64>,
    scheme: Scheme,
    powers: PowerProfile<f64>,
    started: Instant,
) -> Result<SolutionOutcome> {
    let demand = DemandProfile::evaluate(scenario, &powers)?;
    let allocation = scheme.allocate(&demand.f_bs, scenario.params().server_capacity)?;
    let (game, deltas) = evaluate_with_deltas(scenario, &powers)?;
    let negative_deltas = deltas.iter().filter(|&&d| d < 0.0).count();
    Ok(SolutionOutcome {
        scheme,
        powers,
        demand,
        allocation,
        game,
        negative_deltas,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

/// Runs all three solutions at one `(K, α)` point.
pub fn run_point(config: &ExperimentConfig, k_count: usize, alpha: f64) -> Result<PointOutcome> {
    let params = config.scenario_params(alpha)?;
    let scenario = make_grid_scenario(k_count, config.zone_side, params)?;

    let started = Instant::now();
    let pso = config.pso_config(k_count, point_seed(config.seed, k_count, alpha));
    let (best, _) = optimize_powers(&scenario, &pso)?;
    let proposed = solve_with_powers(&scenario, Scheme::Proposed, best, started)?;

    let mut solutions = vec![proposed];
    for scheme in [Scheme::Ref1, Scheme::Ref2] {
        let started = Instant::now();
        let powers = PowerProfile::max_power(&scenario);
        solutions.push(solve_with_powers(&scenario, scheme, powers, started)?);
    }
    log::debug!("K = {k_count}, alpha = {alpha}: done");

    Ok(PointOutcome {
        k_count,
        alpha,
        density: k_count as f64 / config.zone_area(),
        server_capacity: params.server_capacity,
        solutions,
    })
}

/// One CSV row: metrics for one solution at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub k_count: usize,
    /// Stations per square meter.
    pub density: f64,
    pub alpha: f64,
    pub solution: Scheme,
    /// Mean utility over stations.
    pub avg_utility: f64,
    /// Mean over stations of demand / transmit power.
    pub avg_compute_efficiency: f64,
    /// Total demand / total transmit power.
    pub agg_compute_efficiency: f64,
    pub sat: f64,
    pub avg_power: f64,
    pub total_demand: f64,
    /// Whether total demand fit within the server capacity.
    pub case1: bool,
    pub negative_deltas: usize,
    /// Not written to the main CSV; see [`write_timings_csv`].
    pub wall_time_s: f64,
}

impl SweepRecord {
    fn from_outcome(point: &PointOutcome, sol: &SolutionOutcome) -> Self {
        let k = point.k_count as f64;
        let powers = sol.powers.as_slice();
        let f = &sol.demand.f_bs;
        let total_power: f64 = powers.iter().sum();
        let total_demand = sol.demand.total();
        Self {
            k_count: point.k_count,
            density: point.density,
            alpha: point.alpha,
            solution: sol.scheme,
            avg_utility: sol.game.mean_utility(),
            avg_compute_efficiency: f.iter().zip(powers).map(|(f, p)| f / p).sum::<f64>() / k,
            agg_compute_efficiency: total_demand / total_power,
            sat: sol.allocation.sat,
            avg_power: total_power / k,
            total_demand,
            case1: total_demand <= point.server_capacity,
            negative_deltas: sol.negative_deltas,
            wall_time_s: sol.wall_time_s,
        }
    }

    fn sort_key(&self) -> (usize, u64, Scheme) {
        // alphas are validated > 1, so the bit pattern orders like the value
        (self.k_count, self.alpha.to_bits(), self.solution)
    }
}

impl PointOutcome {
    pub fn records(&self) -> Vec<SweepRecord> {
        self.solutions
            .iter()
            .map(|sol| SweepRecord::from_outcome(self, sol))
            .collect()
    }
}

/// Runs every `(K, α)` point in parallel and returns the records sorted by
/// `K`, then `α`, then solution.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let points: Vec<(usize, f64)> = config
        .bs_counts
        .iter()
        .flat_map(|&k| config.alphas.iter().map(move |&a| (k, a)))
        .collect();
    let outcomes = points
        .par_iter()
        .map(|&(k, alpha)| run_point(config, k, alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<SweepRecord> = outcomes.iter().flat_map(PointOutcome::records).collect();
    records.sort_by_key(SweepRecord::sort_key);
    Ok(records)
}

pub const CSV_HEADER: &str = "k_count,density,alpha,solution,avg_utility,avg_compute_efficiency,\
agg_compute_efficiency,sat,avg_power,total_demand,case1,negative_deltas";

/// Renders records as CSV. Floats use the shortest representation that
/// parses back to the same value, so output is byte-stable.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.k_count,
            r.density,
            r.alpha,
            r.solution,
            r.avg_utility,
            r.avg_compute_efficiency,
            r.agg_compute_efficiency,
            r.sat,
            r.avg_power,
            r.total_demand,
            r.case1,
            r.negative_deltas
        )
        .expect("writing to a String");
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_sweep_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &sweep_csv(records))
}

/// Wall-clock times go to their own file so the main CSV stays reproducible.
pub fn write_timings_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("k_count,alpha,solution,wall_time_s\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            r.k_count, r.alpha, r.solution, r.wall_time_s
        )
        .expect("writing to a String");
    }
    write_file(path.as_ref(), &out)
}

/// Metrics exported as plot series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    AvgUtility,
    AvgComputeEfficiency,
    Sat,
}

impl Metric {
    pub const ALL: [Metric; 3] = [
        Metric::AvgUtility,
        Metric::AvgComputeEfficiency,
        Metric::Sat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::AvgUtility => "avg_utility",
            Metric::AvgComputeEfficiency => "avg_compute_efficiency",
            Metric::Sat => "sat",
        }
    }

    pub fn of(self, r: &SweepRecord) -> f64 {
        match self {
            Metric::AvgUtility => r.avg_utility,
            Metric::AvgComputeEfficiency => r.avg_compute_efficiency,
            Metric::Sat => r.sat,
        }
    }

    fn from_name(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::argument(format!("unknown metric {s:?}")))
    }
}

/// One plotted line: a metric against BS density for fixed `α` and solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub metric: Metric,
    pub alpha: f64,
    pub solution: Scheme,
    /// `(density, k_count, value)`, ascending in density.
    pub points: Vec<(f64, usize, f64)>,
}

impl PlotSeries {
    pub fn file_name(&self) -> String {
        format!(
            "{}__alpha_{}__{}.dat",
            self.metric.name(),
            self.alpha,
            self.solution
        )
    }

    /// Whitespace-separated columns `density k_count value` after a `#` header.
    pub fn render(&self) -> String {
        let mut out = format!(
            "# metric: {}\n# alpha: {}\n# solution: {}\n# columns: density k_count value\n",
            self.metric.name(),
            self.alpha,
            self.solution
        );
        for (x, k, y) in &self.points {
            writeln!(out, "{x} {k} {y}").expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::argument(format!("malformed series file: {msg}"));
        let mut metric = None;
        let mut alpha = None;
        let mut solution = None;
        let mut points = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(header) = line.strip_prefix('#') {
                let Some((key, value)) = header.split_once(':') else {
                    continue;
                };
                let value = value.trim();
                match key.trim() {
                    "metric" => metric = Some(Metric::from_name(value)?),
                    "alpha" => alpha = Some(value.parse::<f64>().map_err(|_| bad("alpha"))?),
                    "solution" => solution = Some(value.parse::<Scheme>()?),
                    _ => {}
                }
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let [x, k, y] = cols[..] else {
                return Err(bad("expected three columns"));
            };
            points.push((
                x.parse().map_err(|_| bad("density"))?,
                k.parse().map_err(|_| bad("k_count"))?,
                y.parse().map_err(|_| bad("value"))?,
            ));
        }
        Ok(Self {
            metric: metric.ok_or_else(|| bad("missing metric"))?,
            alpha: alpha.ok_or_else(|| bad("missing alpha"))?,
            solution: solution.ok_or_else(|| bad("missing solution"))?,
            points,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Groups records into one series per `(metric, α, solution)`.
pub fn plot_series(records: &[SweepRecord]) -> Vec<PlotSeries> {
    let mut alphas: Vec<f64> = records.iter().map(|r| r.alpha).collect();
    alphas.sort_by(|a, b| a.total_cmp(b));
    alphas.dedup();
    let mut series = Vec::new();
    for metric in Metric::ALL {
        for &alpha in &alphas {
            for solution in Scheme::ALL {
                let mut points: Vec<(f64, usize, f64)> = records
                    .iter()
                    .filter(|r| r.alpha == alpha && r.solution == solution)
                    .map(|r| (r.density, r.k_count, metric.of(r)))
                    .collect();
                if points.is_empty() {
                    continue;
                }
                points.sort_by(|a, b| a.0.total_cmp(&b.0));
                series.push(PlotSeries {
                    metric,
                    alpha,
                    solution,
                    points,
                });
            }
        }
    }
    series
}

/// Writes one `.dat` file per series into `output_dir`.
pub fn emit_plot_data(
    records: &[SweepRecord],
    output_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::argument("no records to plot"));
    }
    let dir = output_dir.as_ref();
    ensure_dir(dir)?;
    plot_series(records)
        .iter()
        .map(|s| {
            let path = dir.join(s.file_name());
            write_file(&path, &s.render())?;
            Ok(path)
        })
        .collect()
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub sweep_csv: PathBuf,
    pub timings_csv: PathBuf,
    pub plot_files: Vec<PathBuf>,
}

/// Writes `sweep.csv`, `timings.csv` and `plot/*.dat` under `output_dir`.
pub fn write_outputs(records: &[SweepRecord], output_dir: impl AsRef<Path>) -> Result<OutputFiles> {
    let dir = output_dir.as_ref();
    ensure_dir(dir)?;
    let sweep_csv = dir.join("sweep.csv");
    let timings_csv = dir.join("timings.csv");
    write_sweep_csv(records, &sweep_csv)?;
    write_timings_csv(records, &timings_csv)?;
    let plot_files = emit_plot_data(records, dir.join("plot"))?;
    Ok(OutputFiles {
        sweep_csv,
        timings_csv,
        plot_files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_station_grid_is_centered() {
        let sc = make_grid_scenario(1, 100.0, ScenarioParams::default()).unwrap();
        assert_eq!(sc.positions(), &[[50.0, 50.0]]);
    }

    #[test]
    fn four_station_grid() {
        let sc = make_grid_scenario(4, 100.0, ScenarioParams::default()).unwrap();
        assert_eq!(
            sc.positions(),
            &[[25.0, 25.0], [75.0, 25.0], [25.0, 75.0], [75.0, 75.0]]
        );
        let nearest = (1..4)
            .map(|n| sc.distance(0, n))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(nearest, 50.0);
    }

    #[test]
    fn grid_distance_matrix_is_symmetric() {
        let sc = make_grid_scenario(9, 100.0, ScenarioParams::default()).unwrap();
        for m in 0..9 {
            assert_eq!(sc.distance(m, m), 0.0);
            for n in 0..9 {
                assert_eq!(sc.distance(m, n), sc.distance(n, m));
                if m != n {
                    assert!(sc.distance(m, n) > 0.0);
                }
            }
        }
    }

    #[test]
    fn partial_grid_fills_row_major() {
        let sc = make_grid_scenario(3, 100.0, ScenarioParams::default()).unwrap();
        assert_eq!(sc.positions(), &[[25.0, 25.0], [75.0, 25.0], [25.0, 75.0]]);
        assert!(make_grid_scenario(0, 100.0, ScenarioParams::default()).is_err());
    }

    #[test]
    fn config_parses_partial_json() {
        let cfg =
            ExperimentConfig::from_json(r#"{"bs_counts": [1, 4], "threshold_db": 0}"#).unwrap();
        assert_eq!(cfg.bs_counts, vec![1, 4]);
        assert_eq!(cfg.alphas, vec![3.0, 4.0, 5.0]);
        assert_eq!(cfg.scenario_params(4.0).unwrap().channel.threshold, 1.0);
        let default_t = ExperimentConfig::default()
            .scenario_params(4.0)
            .unwrap()
            .channel
            .threshold;
        assert!((default_t - 10.0).abs() < 1e-12);
    }

    #[test]
    fn config_rejects_bad_values() {
        assert!(ExperimentConfig::from_json(r#"{"bs_counts": []}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"bs_counts": [0]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"alphas": [1.0]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"b": 2.0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"n_particles": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"unknown_key": 1}"#).is_err());
        assert!(ExperimentConfig::from_json("not json").is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = ExperimentConfig {
            seed: 99,
            alphas: vec![3.5],
            ..ExperimentConfig::default()
        };
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn point_seeds_differ() {
        let a = point_seed(1, 4, 3.0);
        assert_ne!(a, point_seed(1, 4, 4.0));
        assert_ne!(a, point_seed(1, 9, 3.0));
        assert_ne!(a, point_seed(2, 4, 3.0));
        assert_eq!(a, point_seed(1, 4, 3.0));
    }

    #[test]
    fn series_parse_rejects_garbage() {
        assert!(PlotSeries::parse("# metric: sat\n1 2\n").is_err());
        assert!(PlotSeries::parse("1 2 3\n").is_err());
        assert!(PlotSeries::parse("# metric: nope\n").is_err());
    }
}
