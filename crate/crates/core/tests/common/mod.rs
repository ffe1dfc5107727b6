#![allow(dead_code)]

use dynmatch::{DepartureModel, DynamicInstance, Rational, Role};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Integer-valued instance with edges inside a window of `d`.
pub fn int_instance(seed: u64, horizon: usize, d: u32, density: f64, max_value: i64) -> DynamicInstance<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 1..=horizon {
        for j in (i + 1)..=(i + d as usize).min(horizon) {
            if rng.random_bool(density) {
                edges.push((i, j, rng.random_range(1..=max_value)));
            }
        }
    }
    DynamicInstance::new(horizon, edges, DepartureModel::constant(d)).unwrap()
}

pub fn random_roles(seed: u64, horizon: usize) -> Vec<Role> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..horizon)
        .map(|_| if rng.random_bool(0.5) { Role::Seller } else { Role::Buyer })
        .collect()
}

pub fn to_f64(inst: &DynamicInstance<i64>) -> DynamicInstance<f64> {
    convert(inst, |v| v as f64)
}

pub fn to_rational(inst: &DynamicInstance<i64>) -> DynamicInstance<Rational> {
    convert(inst, Rational::from_integer)
}

fn convert<T: dynmatch::Scalar>(inst: &DynamicInstance<i64>, f: impl Fn(i64) -> T) -> DynamicInstance<T> {
    let edges: Vec<_> = inst.edges().map(|(i, j, v)| (i, j, f(v))).collect();
    let mut out = DynamicInstance::new(inst.horizon(), edges, inst.departure().clone()).unwrap();
    for (k, v) in inst.metadata() {
        out = out.with_meta(k.clone(), v.clone());
    }
    out
}

/// Same graph under explicit per-vertex deadlines drawn from `0..=max_d`,
/// keeping only edges whose later endpoint arrives in time.
pub fn with_random_deadlines(inst: &DynamicInstance<f64>, seed: u64, max_d: u32) -> (DynamicInstance<f64>, Vec<u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
    let ds: Vec<u32> = (0..inst.horizon()).map(|_| rng.random_range(0..=max_d)).collect();
    let edges: Vec<_> = inst.edges().collect();
    let out = DynamicInstance::new(inst.horizon(), edges, DepartureModel::per_vertex(ds.clone())).unwrap();
    (out, ds)
}
