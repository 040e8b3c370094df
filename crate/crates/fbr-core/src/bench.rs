//! Benchmark orchestration: algorithm dispatch, seeded instance sweeps,
//! and CSV emission.

use crate::augment::{edge_augmentation, AugmentationSet};
use crate::baselines::{bt, cr};
use crate::error::{FbrError, Result};
use crate::geometry::RobotConfig;
use crate::graph::comm_graph;
use crate::instance::{gen_instance, Instance};
use crate::relocate::{mm_opt_with_upper, scr, EdgeConstraintSet, MoveSolution};
use crate::verify::{opt_oracle_small_n, verify_solution};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    EaScr,
    EaOpt,
    Bt,
    Cr,
    Opt,
}

pub const ALL_ALGORITHMS: [Algorithm; 5] = [
    Algorithm::EaScr,
    Algorithm::EaOpt,
    Algorithm::Bt,
    Algorithm::Cr,
    Algorithm::Opt,
];

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Algorithm::EaScr => "ea-scr",
            Algorithm::EaOpt => "ea-opt",
            Algorithm::Bt => "bt",
            Algorithm::Cr => "cr",
            Algorithm::Opt => "opt",
        };
        f.write_str(name)
    }
}

impl FromStr for Algorithm {
    type Err = FbrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ea-scr" => Ok(Algorithm::EaScr),
            "ea-opt" => Ok(Algorithm::EaOpt),
            "bt" => Ok(Algorithm::Bt),
            "cr" => Ok(Algorithm::Cr),
            "opt" => Ok(Algorithm::Opt),
            other => Err(FbrError::InvalidInput(format!(
                "unknown algorithm '{other}' (expected ea-scr, ea-opt, bt, cr, or opt)"
            ))),
        }
    }
}

/// Edge augmentation followed by sequential cascaded relocation.
pub fn ea_scr(config: &RobotConfig) -> Result<MoveSolution> {
    let ea = edge_augmentation(config)?;
    scr(config, &ea)
}

/// Edge augmentation followed by the optimal movement solver, bracketed by
/// the cascaded-relocation solution.
pub fn ea_opt(config: &RobotConfig) -> Result<MoveSolution> {
    let ea = edge_augmentation(config)?;
    let upper = scr(config, &ea)?;
    let constraints = EdgeConstraintSet::from_graph_and_augmentation(&comm_graph(config), &ea);
    Ok(mm_opt_with_upper(
        config,
        &constraints,
        Some((upper.minmax, upper.new_positions)),
    ))
}

/// A solved instance: the movement solution plus the augmentation edges
/// that were realized (empty for algorithms that pick none explicitly).
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub algorithm: Algorithm,
    pub solution: MoveSolution,
    pub augmentation: AugmentationSet,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct AugEdgeFile {
    i: usize,
    j: usize,
    cost: f64,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct SolutionFile {
    algorithm: String,
    minmax: f64,
    iterations: u32,
    new_positions: Vec<[f64; 2]>,
    augmentation: Vec<AugEdgeFile>,
}

impl SolveOutput {
    pub fn to_json(&self) -> Result<String> {
        let file = SolutionFile {
            algorithm: self.algorithm.to_string(),
            minmax: self.solution.minmax,
            iterations: self.solution.iterations,
            new_positions: self
                .solution
                .new_positions
                .iter()
                .map(|p| [p.x, p.y])
                .collect(),
            augmentation: self
                .augmentation
                .edges
                .iter()
                .map(|e| AugEdgeFile {
                    i: e.i,
                    j: e.j,
                    cost: e.cost,
                })
                .collect(),
        };
        crate::instance::to_precise_json(&file)
    }

    pub fn from_json(text: &str) -> Result<SolveOutput> {
        use crate::augment::CandidateEdge;
        use crate::geometry::Point;
        let file: SolutionFile = serde_json::from_str(text)?;
        let algorithm: Algorithm = file.algorithm.parse()?;
        let new_positions: Vec<Point> = file
            .new_positions
            .iter()
            .map(|&[x, y]| Point::new(x, y))
            .collect();
        let edges: Vec<CandidateEdge> = file
            .augmentation
            .iter()
            .map(|e| CandidateEdge {
                i: e.i,
                j: e.j,
                cost: e.cost,
            })
            .collect();
        let bottleneck = edges.iter().map(|e| e.cost).fold(0.0, f64::max);
        Ok(SolveOutput {
            algorithm,
            solution: MoveSolution {
                new_positions,
                minmax: file.minmax,
                iterations: file.iterations,
            },
            augmentation: AugmentationSet { edges, bottleneck },
        })
    }
}

/// Runs one algorithm on an instance.
pub fn solve_instance(instance: &Instance, algorithm: Algorithm) -> Result<SolveOutput> {
    let config = instance.config()?;
    let (solution, augmentation) = match algorithm {
        Algorithm::EaScr => {
            let ea = edge_augmentation(&config)?;
            (scr(&config, &ea)?, ea)
        }
        Algorithm::EaOpt => {
            let ea = edge_augmentation(&config)?;
            let upper = scr(&config, &ea)?;
            let constraints =
                EdgeConstraintSet::from_graph_and_augmentation(&comm_graph(&config), &ea);
            let sol = mm_opt_with_upper(
                &config,
                &constraints,
                Some((upper.minmax, upper.new_positions)),
            );
            (sol, ea)
        }
        Algorithm::Bt => (bt(&config)?, AugmentationSet::empty()),
        Algorithm::Cr => {
            let removed = instance.removed.as_ref().ok_or_else(|| {
                FbrError::InvalidInput(
                    "cr needs the removed-vertex record carried by generated instances".into(),
                )
            })?;
            (cr(&config, removed)?, AugmentationSet::empty())
        }
        Algorithm::Opt => (opt_oracle_small_n(&config)?, AugmentationSet::empty()),
    };
    Ok(SolveOutput {
        algorithm,
        solution,
        augmentation,
    })
}

/// Constraint set the verifier should hold an algorithm's output to.
pub fn verification_constraints(
    instance: &Instance,
    algorithm: Algorithm,
    augmentation: &AugmentationSet,
) -> Result<Option<EdgeConstraintSet>> {
    let config = instance.config()?;
    let g = comm_graph(&config);
    Ok(match algorithm {
        Algorithm::EaScr | Algorithm::EaOpt => Some(
            EdgeConstraintSet::from_graph_and_augmentation(&g, augmentation),
        ),
        // cr must retain the surviving edges; bt and opt only promise
        // biconnectivity
        Algorithm::Cr => Some(EdgeConstraintSet::new(g.edges().iter().copied())),
        Algorithm::Bt | Algorithm::Opt => None,
    })
}

/// One benchmark row. `minmax` is present only for verified successes and
/// always comes from the independent verifier, never the solver's claim.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub algorithm: String,
    pub n: usize,
    pub seed: u64,
    pub minmax: Option<f64>,
    pub runtime_s: f64,
    pub succeeded: bool,
    pub repair_passes: u32,
}

pub const CSV_HEADER: &str = "algorithm,n,seed,minmax,runtime_s,succeeded,repair_passes";

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let minmax = r.minmax.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.algorithm, r.n, r.seed, minmax, r.runtime_s, r.succeeded, r.repair_passes
        ));
    }
    out
}

/// Per-trial seed derivation (splitmix64 over the sweep coordinates) so
/// trials are independent and reproducible.
pub fn derive_seed(seed0: u64, n: usize, trial: usize) -> u64 {
    let mut z = seed0
        .wrapping_add((n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((trial as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(0x94D0_49BB_1331_11EB);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_single(instance: &Instance, algorithm: Algorithm) -> BenchRecord {
    let start = Instant::now();
    let outcome = solve_instance(instance, algorithm);
    let runtime_s = start.elapsed().as_secs_f64();

    let (succeeded, minmax, repair_passes) = match outcome {
        Ok(out) => {
            let verified = instance
                .config()
                .and_then(|config| {
                    let constraints =
                        verification_constraints(instance, algorithm, &out.augmentation)?;
                    verify_solution(&config, &out.solution, constraints.as_ref())
                })
                .ok()
                .filter(|report| report.biconnected && report.violated_pairs.is_empty());
            match verified {
                Some(report) => (true, Some(report.minmax), out.solution.iterations),
                None => (false, None, out.solution.iterations),
            }
        }
        Err(_) => (false, None, 0),
    };
    BenchRecord {
        algorithm: algorithm.to_string(),
        n: instance.n,
        seed: instance.seed,
        minmax,
        runtime_s,
        succeeded,
        repair_passes,
    }
}

/// Runs every requested algorithm on the same generated instances: one
/// instance per (n, trial), seeds derived from `seed0`. Rows are sorted by
/// (n, seed, algorithm) regardless of execution order; per-run failures
/// are recorded, not fatal.
pub fn run_benchmark(
    algorithms: &[Algorithm],
    n_values: &[usize],
    trials: usize,
    seed0: u64,
    side_factor: f64,
) -> Result<Vec<BenchRecord>> {
    if algorithms.is_empty() || n_values.is_empty() || trials == 0 {
        return Err(FbrError::InvalidInput(
            "benchmark needs algorithms, sizes, and at least one trial".into(),
        ));
    }
    if algorithms.contains(&Algorithm::Opt) {
        if let Some(&n) = n_values.iter().find(|&&n| n > 6) {
            return Err(FbrError::InvalidInput(format!(
                "opt is exhaustive and capped at n = 6; requested n = {n}"
            )));
        }
    }

    let jobs: Vec<(usize, usize)> = n_values
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();

    let mut records: Vec<BenchRecord> = jobs
        .par_iter()
        .map(|&(n, trial)| -> Result<Vec<BenchRecord>> {
            let seed = derive_seed(seed0, n, trial);
            let instance = gen_instance(n, 1.0, seed, side_factor)?;
            Ok(algorithms
                .iter()
                .map(|&algo| run_single(&instance, algo))
                .collect())
        })
        .collect::<Result<Vec<Vec<BenchRecord>>>>()?
        .into_iter()
        .flatten()
        .collect();

    records.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.seed.cmp(&b.seed))
            .then(a.algorithm.cmp(&b.algorithm))
    });
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DEFAULT_SIDE_FACTOR;

    #[test]
    fn algorithm_names_round_trip() {
        for algo in ALL_ALGORITHMS {
            assert_eq!(algo, algo.to_string().parse().unwrap());
        }
        assert!("quantum".parse::<Algorithm>().is_err());
    }

    #[test]
    fn records_share_instance_seed() {
        let records = run_benchmark(
            &[Algorithm::EaScr, Algorithm::Bt],
            &[8],
            1,
            99,
            DEFAULT_SIDE_FACTOR,
        )
        .unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].seed, records[1].seed);
        assert_eq!(records[0].n, 8);
    }

    #[test]
    fn csv_has_exact_header_and_shape() {
        let records = run_benchmark(
            &[Algorithm::EaScr],
            &[8],
            2,
            5,
            DEFAULT_SIDE_FACTOR,
        )
        .unwrap();
        let csv = records_to_csv(&records);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "algorithm,n,seed,minmax,runtime_s,succeeded,repair_passes"
        );
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn benchmark_rejects_opt_at_large_n() {
        let err = run_benchmark(&[Algorithm::Opt], &[8], 1, 1, DEFAULT_SIDE_FACTOR);
        assert!(err.is_err());
    }

    #[test]
    fn verified_minmax_comes_from_the_verifier() {
        let records = run_benchmark(
            &[Algorithm::EaScr],
            &[8],
            3,
            11,
            DEFAULT_SIDE_FACTOR,
        )
        .unwrap();
        for r in &records {
            assert!(r.succeeded, "seed {} failed", r.seed);
            assert!(r.minmax.unwrap() > 0.0);
        }
    }

    #[test]
    fn n_sweep_produces_expected_row_count() {
        let records = run_benchmark(
            &[Algorithm::EaScr, Algorithm::Bt],
            &[8, 16],
            2,
            3,
            DEFAULT_SIDE_FACTOR,
        )
        .unwrap();
        assert_eq!(records.len(), 2 * 2 * 2);
        // sorted by (n, seed, algorithm)
        let mut sorted = records.clone();
        sorted.sort_by(|a, b| {
            a.n.cmp(&b.n)
                .then(a.seed.cmp(&b.seed))
                .then(a.algorithm.cmp(&b.algorithm))
        });
        for (a, b) in records.iter().zip(&sorted) {
            assert_eq!(a.algorithm, b.algorithm);
            assert_eq!(a.seed, b.seed);
        }
    }
}
