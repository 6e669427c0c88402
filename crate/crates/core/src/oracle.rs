//! Balls in `Out(F_n)` for the word metric of the symmetrized generating
//! set, built breadth first over outer canonical forms.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphism::{symmetric_generator_set, AutError, Automorphism, Generator, OuterClass};
use crate::translen::TauEstimate;
use crate::word::WordRepr;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error("node budget {budget} exceeded; radius {completed_radius} complete, layers {layers:?}")]
    BudgetExceeded {
        budget: usize,
        completed_radius: usize,
        layers: Vec<usize>,
    },
    #[error("rank mismatch: ball has rank {ball}, input has rank {input}")]
    RankMismatch { ball: usize, input: usize },
    #[error("bad snapshot: {0}")]
    Snapshot(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

pub const SNAPSHOT_FORMAT: &str = "outfn-ball";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const GENERATOR_CONVENTION: &str =
    "symmetrized: permutations (i j), inversions, Dehn twists x_i -> x_i x_j and their inverses";

#[derive(Clone, Debug)]
pub struct BallIndex {
    rank: usize,
    radius: usize,
    table: HashMap<OuterClass, u32>,
    layers: Vec<usize>,
}

/// Snapshot header; the first line of the file.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    rank: usize,
    radius: usize,
    generators: String,
    layers: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Entry {
    images: Vec<WordRepr>,
    distance: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "distance", rename_all = "snake_case")]
pub enum Norm {
    Known(u32),
    /// Outside the ball.
    Unknown,
}

impl Norm {
    pub fn known(self) -> Option<u32> {
        match self {
            Norm::Known(d) => Some(d),
            Norm::Unknown => None,
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, OracleError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| OracleError::Pool(e.to_string()))
}

/// Ball of radius `radius` about the identity. `workers = 0` uses the
/// default thread count; results do not depend on it.
pub fn build_ball(rank: usize, radius: usize, node_budget: usize, workers: usize) -> Result<BallIndex, OracleError> {
    let gens = symmetric_generator_set(rank)?;
    let identity = Automorphism::identity(rank).outer_canonical()?;
    let mut table = HashMap::new();
    table.insert(identity.clone(), 0u32);
    let mut layers = vec![1];
    let mut frontier = vec![identity];
    let pool = pool(workers)?;
    for r in 0..radius {
        let candidates: Vec<OuterClass> = pool.install(|| {
            frontier
                .par_iter()
                .map(|c| gens.iter().map(|&g| c.right_multiply(g)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<Vec<_>>, _>>()
        })?
        .into_iter()
        .flatten()
        .collect();
        let mut next = Vec::new();
        for c in candidates {
            if table.contains_key(&c) {
                continue;
            }
            if table.len() >= node_budget {
                return Err(OracleError::BudgetExceeded {
                    budget: node_budget,
                    completed_radius: r,
                    layers,
                });
            }
            table.insert(c.clone(), r as u32 + 1);
            next.push(c);
        }
        layers.push(next.len());
        frontier = next;
    }
    Ok(BallIndex {
        rank,
        radius,
        table,
        layers,
    })
}

impl BallIndex {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Sphere sizes for radii `0..=radius`.
    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn distance(&self, class: &OuterClass) -> Option<u32> {
        self.table.get(class).copied()
    }

    /// Entries ordered by distance, then by tuple.
    pub fn entries(&self) -> Vec<(&OuterClass, u32)> {
        let mut v: Vec<(&OuterClass, u32)> = self.table.iter().map(|(c, &d)| (c, d)).collect();
        v.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        v
    }

    pub fn generators(&self) -> Vec<Generator> {
        symmetric_generator_set(self.rank).expect("rank >= 2")
    }

    pub fn save(&self, path: &Path) -> Result<(), OracleError> {
        let mut out = BufWriter::new(File::create(path)?);
        let header = Header {
            format: SNAPSHOT_FORMAT.into(),
            version: SNAPSHOT_VERSION,
            rank: self.rank,
            radius: self.radius,
            generators: GENERATOR_CONVENTION.into(),
            layers: self.layers.clone(),
        };
        writeln!(out, "{}", serde_json::to_string(&header).expect("header serializes"))?;
        for (class, d) in self.entries() {
            let line = serde_json::json!({ "images": class.images(), "distance": d });
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<BallIndex, OracleError> {
        let bad = |m: String| OracleError::Snapshot(m);
        let mut lines = BufReader::new(File::open(path)?).lines();
        let first = lines.next().ok_or_else(|| bad("empty file".into()))??;
        let header: Header = serde_json::from_str(&first).map_err(|e| bad(format!("header: {e}")))?;
        if header.format != SNAPSHOT_FORMAT || header.version != SNAPSHOT_VERSION {
            return Err(bad(format!("unsupported format {} v{}", header.format, header.version)));
        }
        if header.generators != GENERATOR_CONVENTION {
            return Err(bad(format!("generator convention {:?}", header.generators)));
        }
        let mut table = HashMap::new();
        let mut layers = vec![0usize; header.radius + 1];
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: Entry = serde_json::from_str(&line).map_err(|e| bad(format!("line {}: {e}", n + 2)))?;
            let class = Automorphism::from_repr(header.rank, e.images)?.outer_canonical()?;
            let d = e.distance as usize;
            if d > header.radius {
                return Err(bad(format!("line {}: distance {d} beyond radius", n + 2)));
            }
            layers[d] += 1;
            if table.insert(class, e.distance).is_some() {
                return Err(bad(format!("line {}: duplicate class", n + 2)));
            }
        }
        if layers != header.layers {
            return Err(bad(format!("layer sizes {layers:?} disagree with header {:?}", header.layers)));
        }
        Ok(BallIndex {
            rank: header.rank,
            radius: header.radius,
            table,
            layers,
        })
    }
}

pub fn exact_norm(index: &BallIndex, o: &Automorphism) -> Result<Norm, OracleError> {
    if o.rank() != index.rank {
        return Err(OracleError::RankMismatch {
            ball: index.rank,
            input: o.rank(),
        });
    }
    let class = o.outer_canonical()?;
    Ok(index.distance(&class).map_or(Norm::Unknown, Norm::Known))
}

/// Slack for floating-point lower bounds.
pub const EPS_NUM: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerCheck {
    pub k: u64,
    pub norm: u32,
    pub required_min: u64,
    pub allowed_max: Option<u64>,
    pub ratio: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauBoundsReport {
    pub norm_of_o: Option<u32>,
    pub lower: f64,
    pub checks: Vec<PowerCheck>,
    pub violations: usize,
    /// First `k` whose power left the ball, if any before `k_max`.
    pub left_ball_at: Option<u64>,
}

/// Checks `||O^k|| >= ceil(k lower)` and `||O^k|| <= k ||O||` for every
/// `k <= k_max` with `O^k` in the ball.
pub fn verify_tau_bounds(
    index: &BallIndex,
    o: &Automorphism,
    estimate: &TauEstimate,
    k_max: usize,
) -> Result<TauBoundsReport, OracleError> {
    verify_lower_bound(index, o, estimate.lower, k_max)
}

pub fn verify_lower_bound(index: &BallIndex, o: &Automorphism, lower: f64, k_max: usize) -> Result<TauBoundsReport, OracleError> {
    let norm_of_o = exact_norm(index, o)?.known();
    let o = o.outer_canonical()?.to_automorphism();
    let mut checks = Vec::new();
    let mut left_ball_at = None;
    let mut pk = Automorphism::identity(o.rank());
    for k in 1..=k_max as u64 {
        let class = pk.compose_unchecked(&o).outer_canonical()?;
        pk = class.to_automorphism();
        let Some(norm) = index.distance(&class) else {
            left_ball_at = Some(k);
            break;
        };
        let required_min = (k as f64 * lower - EPS_NUM).ceil().max(0.0) as u64;
        let allowed_max = norm_of_o.map(|n| k * n as u64);
        let ok = norm as u64 >= required_min && allowed_max.map_or(true, |m| norm as u64 <= m);
        checks.push(PowerCheck {
            k,
            norm,
            required_min,
            allowed_max,
            ratio: norm as f64 / k as f64,
            ok,
        });
    }
    let violations = checks.iter().filter(|c| !c.ok).count();
    Ok(TauBoundsReport {
        norm_of_o,
        lower,
        checks,
        violations,
        left_ball_at,
    })
}
