//! Trip and compatibility data, synthetic stand-ins for both, and the
//! sampling loop that turns a dataset into a dynamic instance.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::coins::data_rng;
use crate::market::{DepartureModel, DynamicInstance, InstanceError};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// A ride from `pickup` to `dropoff` in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripRecord {
    pub pickup: (f64, f64),
    pub dropoff: (f64, f64),
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

impl TripRecord {
    pub fn new(pickup: (f64, f64), dropoff: (f64, f64)) -> Option<Self> {
        let finite = [pickup.0, pickup.1, dropoff.0, dropoff.1].iter().all(|x| x.is_finite());
        finite.then_some(Self { pickup, dropoff })
    }

    pub fn length(&self) -> f64 {
        dist(self.pickup, self.dropoff)
    }
}

/// Distance saved when one vehicle serves both trips: both pickups first
/// (either order), then both dropoffs (either order), against two solo
/// rides. Clipped at zero.
pub fn shared_ride_value(a: &TripRecord, b: &TripRecord) -> f64 {
    let solo = a.length() + b.length();
    let mut best = f64::INFINITY;
    for (p1, p2) in [(a.pickup, b.pickup), (b.pickup, a.pickup)] {
        for (d1, d2) in [(a.dropoff, b.dropoff), (b.dropoff, a.dropoff)] {
            let route = dist(p1, p2) + dist(p2, d1) + dist(d1, d2);
            best = best.min(route);
        }
    }
    (solo - best).max(0.0)
}

/// Reads trips as CSV records `pickup_x,pickup_y,dropoff_x,dropoff_y`. A
/// first record that does not parse as numbers is taken as a header.
pub fn read_trip_csv<R: std::io::Read>(reader: R) -> Result<Vec<TripRecord>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(idx + 1, |p| p.line() as usize);
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let nums = match parsed {
            Ok(n) => n,
            Err(_) if idx == 0 => continue,
            Err(e) => {
                return Err(DataError::Parse {
                    line,
                    message: e.to_string(),
                })
            }
        };
        if nums.len() != 4 {
            return Err(DataError::Parse {
                line,
                message: format!("expected 4 columns, found {}", nums.len()),
            });
        }
        let trip = TripRecord::new((nums[0], nums[1]), (nums[2], nums[3])).ok_or(DataError::Parse {
            line,
            message: "non-finite coordinate".into(),
        })?;
        out.push(trip);
    }
    Ok(out)
}

pub fn write_trip_csv<W: std::io::Write>(w: W, trips: &[TripRecord]) -> Result<(), DataError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["pickup_x", "pickup_y", "dropoff_x", "dropoff_y"])?;
    for t in trips {
        wtr.serialize((t.pickup.0, t.pickup.1, t.dropoff.0, t.dropoff.1))?;
    }
    wtr.flush()?;
    Ok(())
}

/// A synthetic city: pickups and dropoffs scattered around a handful of
/// hubs, so trips between the same hubs can share most of their route.
pub fn synthetic_trips(count: usize, seed: u64) -> Vec<TripRecord> {
    let mut rng = data_rng(seed);
    let hubs: Vec<(f64, f64)> = (0..6)
        .map(|_| (rng.random_range(0.0..20.0), rng.random_range(0.0..20.0)))
        .collect();
    let spread = Normal::new(0.0, 1.5).expect("valid spread");
    let near = |rng: &mut ChaCha8Rng, hub: (f64, f64)| {
        (hub.0 + spread.sample(rng), hub.1 + spread.sample(rng))
    };
    (0..count)
        .map(|_| {
            let from = *hubs.choose(&mut rng).expect("hubs");
            let to = *hubs.choose(&mut rng).expect("hubs");
            let pickup = near(&mut rng, from);
            let dropoff = near(&mut rng, to);
            TripRecord { pickup, dropoff }
        })
        .collect()
}

/// Resolves the deadline model for a sampled instance: uniform models are
/// kept as they are, anything else is drawn once and stored per vertex.
fn resolve_departure(departure: &DepartureModel, horizon: usize, rng: &mut ChaCha8Rng) -> DepartureModel {
    if departure.uniform().is_some() {
        departure.clone()
    } else {
        DepartureModel::per_vertex(departure.sample(horizon, rng)).with_knowledge(departure.knowledge)
    }
}

/// Samples `horizon` arrivals with replacement and gives every pair that
/// is ever simultaneously present the value returned by `value`.
fn sample_instance<T, F>(
    pool: &[T],
    horizon: usize,
    departure: &DepartureModel,
    seed: u64,
    mut value: F,
) -> Result<DynamicInstance<f64>, DataError>
where
    F: FnMut(&T, &T) -> f64,
{
    if pool.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut rng = data_rng(seed);
    let picks: Vec<&T> = (0..horizon)
        .map(|_| &pool[rng.random_range(0..pool.len())])
        .collect();
    let resolved = resolve_departure(departure, horizon, &mut rng);
    let deadlines = resolved.sample(horizon, &mut rng);
    let mut edges = Vec::new();
    for i in 1..=horizon {
        let last = (i + deadlines[i - 1] as usize).min(horizon);
        for j in (i + 1)..=last {
            let v = value(picks[i - 1], picks[j - 1]);
            if v > 0.0 {
                edges.push((i, j, v));
            }
        }
    }
    Ok(DynamicInstance::new(horizon, edges, resolved)?)
}

pub fn ingest_trips(
    records: &[TripRecord],
    horizon: usize,
    departure: &DepartureModel,
    seed: u64,
) -> Result<DynamicInstance<f64>, DataError> {
    Ok(sample_instance(records, horizon, departure, seed, shared_ride_value)?.with_meta("source", "trips"))
}

/// Symmetric 0/1 compatibility among `types` agent types, each pair
/// compatible with probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatTable {
    types: usize,
    compatible: Vec<bool>,
}

impl CompatTable {
    pub fn random(types: usize, p: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut compatible = vec![false; types * types];
        for a in 0..types {
            for b in (a + 1)..types {
                let c = rng.random_bool(p);
                compatible[a * types + b] = c;
                compatible[b * types + a] = c;
            }
        }
        Self { types, compatible }
    }

    pub fn types(&self) -> usize {
        self.types
    }

    pub fn compatible(&self, a: usize, b: usize) -> bool {
        self.compatible[a * self.types + b]
    }
}

pub fn ingest_compat(
    types: usize,
    p: f64,
    horizon: usize,
    departure: &DepartureModel,
    seed: u64,
) -> Result<DynamicInstance<f64>, DataError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DataError::Parse {
            line: 0,
            message: format!("compatibility density {p} outside [0, 1]"),
        });
    }
    let mut rng = data_rng(seed ^ 0x5eed_c0de);
    let table = CompatTable::random(types, p, &mut rng);
    let ids: Vec<usize> = (0..types).collect();
    let inst = sample_instance(&ids, horizon, departure, seed, |&a, &b| {
        if a != b && table.compatible(a, b) {
            1.0
        } else {
            0.0
        }
    })?;
    Ok(inst.with_meta("source", "compat"))
}
