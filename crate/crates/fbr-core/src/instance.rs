//! Problem instances: seeded generation of barely connected configurations
//! and the on-disk JSON format.

use crate::baselines::RemovedVertexInfo;
use crate::error::{FbrError, Result};
use crate::geometry::{Point, RobotConfig};
use crate::graph::{comm_graph, is_biconnected, is_connected};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SIDE_FACTOR: f64 = 0.5;
const MAX_REJECTIONS: usize = 10_000;

/// A generated problem instance: the surviving robots form a connected but
/// not biconnected communication graph.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n: usize,
    pub h: f64,
    pub positions: Vec<Point>,
    pub removed: Option<RemovedVertexInfo>,
    pub seed: u64,
}

impl Instance {
    pub fn config(&self) -> Result<RobotConfig> {
        RobotConfig::new(self.positions.clone(), self.h)
    }
}

#[derive(Serialize, Deserialize)]
struct RemovedFile {
    position: [f64; 2],
    neighbors: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    n: usize,
    h: f64,
    positions: Vec<[f64; 2]>,
    removed: Option<RemovedFile>,
    seed: u64,
}

/// JSON serializer that prints every float with 17 significant digits so
/// coordinates round-trip exactly.
struct PreciseFormatter;

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub(crate) fn to_precise_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits utf-8"))
}

impl Instance {
    pub fn to_json(&self) -> Result<String> {
        let file = InstanceFile {
            n: self.n,
            h: self.h,
            positions: self.positions.iter().map(|p| [p.x, p.y]).collect(),
            removed: self.removed.as_ref().map(|r| RemovedFile {
                position: [r.position.x, r.position.y],
                neighbors: r.neighbor_indices.clone(),
            }),
            seed: self.seed,
        };
        to_precise_json(&file)
    }

    pub fn from_json(text: &str) -> Result<Instance> {
        let file: InstanceFile = serde_json::from_str(text)?;
        if file.positions.len() != file.n {
            return Err(FbrError::InvalidInput(format!(
                "instance declares n={} but has {} positions",
                file.n,
                file.positions.len()
            )));
        }
        let positions: Vec<Point> = file
            .positions
            .iter()
            .map(|&[x, y]| Point::new(x, y))
            .collect();
        // validate through the config constructor
        RobotConfig::new(positions.clone(), file.h)?;
        if let Some(r) = &file.removed {
            if let Some(&bad) = r.neighbors.iter().find(|&&v| v >= file.n) {
                return Err(FbrError::InvalidInput(format!(
                    "removed-vertex neighbor {bad} out of range"
                )));
            }
        }
        Ok(Instance {
            n: file.n,
            h: file.h,
            positions,
            removed: file.removed.map(|r| RemovedVertexInfo {
                position: Point::new(r.position[0], r.position[1]),
                neighbor_indices: r.neighbors,
            }),
            seed: file.seed,
        })
    }
}

/// Rejection-samples an instance: `n + 1` points uniform in a square of
/// side `side_factor * h * sqrt(n + 1)` whose communication graph is
/// biconnected, minus one vertex whose removal leaves the graph connected
/// but not biconnected. Identical `(n, h, seed)` yield identical output.
pub fn gen_instance(n: usize, h: f64, seed: u64, side_factor: f64) -> Result<Instance> {
    if n < 4 {
        return Err(FbrError::InvalidInput(format!(
            "instance generation needs n >= 4, got {n}"
        )));
    }
    if !(h > 0.0) || !(side_factor > 0.0) {
        return Err(FbrError::InvalidInput(
            "h and side factor must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = side_factor * h * ((n + 1) as f64).sqrt();
    let mut rejections = 0usize;

    loop {
        if rejections >= MAX_REJECTIONS {
            return Err(FbrError::SamplingExhausted(rejections));
        }
        let cloud: Vec<Point> = (0..n + 1)
            .map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side))
            .collect();
        let full = RobotConfig::new(cloud.clone(), h)?;
        let g = comm_graph(&full);
        if !is_biconnected(&g) {
            rejections += 1;
            continue;
        }
        // resample the removed vertex up to n times before rejecting the cloud
        let mut accepted = None;
        for _ in 0..n {
            let k = rng.gen_range(0..n + 1);
            let survivors: Vec<Point> = cloud
                .iter()
                .enumerate()
                .filter(|&(v, _)| v != k)
                .map(|(_, &p)| p)
                .collect();
            let reduced = RobotConfig::new(survivors.clone(), h)?;
            let g2 = comm_graph(&reduced);
            if is_connected(&g2) && !is_biconnected(&g2) {
                let neighbors: Vec<usize> = g
                    .neighbors(k)
                    .iter()
                    .map(|&v| if v > k { v - 1 } else { v })
                    .collect();
                accepted = Some(Instance {
                    n,
                    h,
                    positions: survivors,
                    removed: Some(RemovedVertexInfo {
                        position: cloud[k],
                        neighbor_indices: neighbors,
                    }),
                    seed,
                });
                break;
            }
            rejections += 1;
        }
        match accepted {
            Some(instance) => return Ok(instance),
            None => {
                rejections += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_instance_is_barely_connected() {
        let inst = gen_instance(8, 1.0, 42, DEFAULT_SIDE_FACTOR).unwrap();
        let g = comm_graph(&inst.config().unwrap());
        assert!(is_connected(&g));
        assert!(!is_biconnected(&g));
        let removed = inst.removed.as_ref().unwrap();
        assert!(!removed.neighbor_indices.is_empty());
        // every recorded neighbor really was within range of the removed robot
        for &v in &removed.neighbor_indices {
            assert!(inst.positions[v].dist(removed.position) <= inst.h + crate::TAU_GEO);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_instance(8, 1.0, 7, DEFAULT_SIDE_FACTOR).unwrap();
        let b = gen_instance(8, 1.0, 7, DEFAULT_SIDE_FACTOR).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn generated_batch_all_barely_connected() {
        for seed in 0..40 {
            let inst = gen_instance(8, 1.0, seed, DEFAULT_SIDE_FACTOR).unwrap();
            let g = comm_graph(&inst.config().unwrap());
            assert!(is_connected(&g) && !is_biconnected(&g), "seed {seed}");
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let inst = gen_instance(10, 1.0, 3, DEFAULT_SIDE_FACTOR).unwrap();
        let text = inst.to_json().unwrap();
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back.n, inst.n);
        assert_eq!(back.seed, inst.seed);
        for (a, b) in inst.positions.iter().zip(&back.positions) {
            assert_eq!(a.x, b.x);
            assert_eq!(a.y, b.y);
        }
        assert_eq!(text, back.to_json().unwrap());
    }

    #[test]
    fn from_json_rejects_inconsistent_n() {
        let bad = r#"{"n": 5, "h": 1.0, "positions": [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], "removed": null, "seed": 1}"#;
        assert!(Instance::from_json(bad).is_err());
    }

    #[test]
    fn gen_rejects_small_n() {
        assert!(gen_instance(3, 1.0, 1, DEFAULT_SIDE_FACTOR).is_err());
    }
}
