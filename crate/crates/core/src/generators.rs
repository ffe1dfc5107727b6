//! Instance families: the small hand-built examples, the adversarial
//! constructions, random graphs and the data-driven samplers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::coins::data_rng;
use crate::data::{ingest_compat, ingest_trips, synthetic_trips, DataError};
use crate::market::{DepartureKnowledge, DepartureModel, DynamicInstance, InstanceError, Role};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Data(#[from] DataError),
}

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParameters(msg.into())
}

/// How the data-driven families draw deadlines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepartureMode {
    /// Every vertex stays exactly `d` steps.
    Deterministic,
    /// Exponential stays with mean `d`.
    Stochastic,
}

impl DepartureMode {
    pub fn model(self, d: u32) -> DepartureModel {
        match self {
            DepartureMode::Deterministic => DepartureModel::constant(d),
            DepartureMode::Stochastic => DepartureModel::exponential(d as f64),
        }
    }
}

impl fmt::Display for DepartureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepartureMode::Deterministic => "det",
            DepartureMode::Stochastic => "stoch",
        })
    }
}

impl FromStr for DepartureMode {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "det" | "deterministic" => Ok(DepartureMode::Deterministic),
            "stoch" | "stochastic" | "exp" => Ok(DepartureMode::Stochastic),
            _ => Err(bad(format!("unknown departure mode {s:?}"))),
        }
    }
}

/// Edge value distribution for the random family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueDist {
    Unit,
    /// Integers uniform on `1..=max`.
    Int(u32),
    Uniform(f64, f64),
    Exp(f64),
}

impl ValueDist {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            ValueDist::Unit => 1.0,
            ValueDist::Int(max) => rng.random_range(1..=max) as f64,
            ValueDist::Uniform(lo, hi) => rng.random_range(lo..=hi),
            ValueDist::Exp(mean) => Exp::new(1.0 / mean).expect("validated mean").sample(rng),
        }
    }
}

impl fmt::Display for ValueDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueDist::Unit => write!(f, "unit"),
            ValueDist::Int(m) => write!(f, "int:{m}"),
            ValueDist::Uniform(lo, hi) => write!(f, "uniform:{lo}:{hi}"),
            ValueDist::Exp(m) => write!(f, "exp:{m}"),
        }
    }
}

impl FromStr for ValueDist {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, GenError> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad(format!("bad number {t:?} in {s:?}")));
        let dist = match parts.as_slice() {
            ["unit"] => ValueDist::Unit,
            ["int", m] => ValueDist::Int(m.parse().map_err(|_| bad(format!("bad integer bound in {s:?}")))?),
            ["uniform", lo, hi] => ValueDist::Uniform(num(lo)?, num(hi)?),
            ["exp", m] => ValueDist::Exp(num(m)?),
            _ => return Err(bad(format!("unknown value distribution {s:?}"))),
        };
        match dist {
            ValueDist::Int(0) => Err(bad("int bound must be positive")),
            ValueDist::Uniform(lo, hi) if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) => {
                Err(bad(format!("uniform range {lo}..{hi} invalid")))
            }
            ValueDist::Exp(m) if !(m > 0.0 && m.is_finite()) => Err(bad("exp mean must be positive")),
            d => Ok(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Three vertices, `d = 1`, `v12 = 1`, `v23 = y`.
    Figure1 { y: f64 },
    /// Sellers {1,2}, buyers {3,4}, `d = 2`, `v13 = (sqrt 5 - 1)/2`.
    ConstrainedDet { x: f64 },
    /// As above with `v13 = 1/2`.
    ConstrainedRand { x: f64 },
    Tightness { eps: f64 },
    /// `v_{1j} = M^j` for `2 <= j <= K`; vertex 1 stays `n` steps, the rest leave at once.
    AdvDepartures { n: usize, k: usize, m: f64 },
    /// Deadlines are `n^2` with probability `1/n`, else 0.
    Add { n: usize, k: usize, m: f64 },
    /// The adversarial-departure graph with geometric stays revealed only when critical.
    Sud { n: usize, k: usize, m: f64, delta: f64 },
    Random {
        horizon: usize,
        d: u32,
        density: f64,
        values: ValueDist,
        seed: u64,
        /// Attach seeded seller/buyer labels.
        roles: bool,
    },
    Trips {
        n: usize,
        d: u32,
        seed: u64,
        mode: DepartureMode,
        pool: usize,
    },
    Compat {
        n: usize,
        d: u32,
        p: f64,
        seed: u64,
        mode: DepartureMode,
        types: usize,
    },
}

pub const FAMILIES: &[&str] = &[
    "figure1",
    "constrained-det",
    "constrained-rand",
    "tightness",
    "adv-departures",
    "add",
    "sud",
    "random",
    "trips",
    "compat",
];

struct Params<'a> {
    family: &'a str,
    pairs: Vec<(String, &'a str)>,
}

impl<'a> Params<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    fn get<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T, GenError> {
        match self.raw(key) {
            Some(v) => v
                .parse()
                .map_err(|_| bad(format!("{}: cannot parse {key}={v:?}", self.family))),
            None => default.ok_or_else(|| bad(format!("{}: missing parameter {key}", self.family))),
        }
    }

    fn check_known(&self, known: &[&str]) -> Result<(), GenError> {
        match self.pairs.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            Some((k, _)) => Err(bad(format!("{}: unknown parameter {k}", self.family))),
            None => Ok(()),
        }
    }
}

fn floor_n_ln_n(n: usize) -> usize {
    (n as f64 * (n as f64).ln()).floor() as usize
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl GeneratorSpec {
    /// Builds a spec from a family name and `key=value` parameters. Keys
    /// are case-insensitive.
    pub fn parse<'a, I>(family: &str, params: I) -> Result<Self, GenError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let p = Params {
            family,
            pairs: params.into_iter().map(|(k, v)| (k.to_ascii_lowercase(), v)).collect(),
        };
        let spec = match family {
            "figure1" => {
                p.check_known(&["y"])?;
                GeneratorSpec::Figure1 { y: p.get("y", Some(2.0))? }
            }
            "constrained-det" => {
                p.check_known(&["x"])?;
                GeneratorSpec::ConstrainedDet { x: p.get("x", Some(1.0))? }
            }
            "constrained-rand" => {
                p.check_known(&["x"])?;
                GeneratorSpec::ConstrainedRand { x: p.get("x", Some(1.0))? }
            }
            "tightness" => {
                p.check_known(&["eps"])?;
                GeneratorSpec::Tightness { eps: p.get("eps", None)? }
            }
            "adv-departures" | "add" | "sud" => {
                let n: usize = p.get("n", None)?;
                let m: f64 = p.get("m", Some(n as f64 + 1.0))?;
                match family {
                    "adv-departures" => {
                        p.check_known(&["n", "k", "m"])?;
                        GeneratorSpec::AdvDepartures { n, k: p.get("k", None)?, m }
                    }
                    "add" => {
                        p.check_known(&["n", "k", "m"])?;
                        GeneratorSpec::Add { n, k: p.get("k", Some(isqrt(n)))?, m }
                    }
                    _ => {
                        p.check_known(&["n", "k", "m", "delta"])?;
                        GeneratorSpec::Sud {
                            n,
                            k: p.get("k", None)?,
                            m,
                            delta: p.get("delta", None)?,
                        }
                    }
                }
            }
            "random" => {
                p.check_known(&["t", "d", "density", "values", "seed", "roles"])?;
                GeneratorSpec::Random {
                    horizon: p.get("t", None)?,
                    d: p.get("d", None)?,
                    density: p.get("density", Some(0.5))?,
                    values: p.get("values", Some(ValueDist::Uniform(0.0, 1.0)))?,
                    seed: p.get("seed", Some(0))?,
                    roles: p.get("roles", Some(false))?,
                }
            }
            "trips" => {
                p.check_known(&["n", "d", "seed", "mode", "pool"])?;
                GeneratorSpec::Trips {
                    n: p.get("n", None)?,
                    d: p.get("d", None)?,
                    seed: p.get("seed", Some(0))?,
                    mode: p.get("mode", Some(DepartureMode::Deterministic))?,
                    pool: p.get("pool", Some(5000))?,
                }
            }
            "compat" => {
                p.check_known(&["n", "d", "p", "seed", "mode", "types"])?;
                let n: usize = p.get("n", None)?;
                GeneratorSpec::Compat {
                    n,
                    d: p.get("d", None)?,
                    p: p.get("p", None)?,
                    seed: p.get("seed", Some(0))?,
                    mode: p.get("mode", Some(DepartureMode::Deterministic))?,
                    types: p.get("types", Some(n.max(1)))?,
                }
            }
            other => return Err(bad(format!("unknown family {other:?}; expected one of {}", FAMILIES.join(", ")))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::Figure1 { .. } => "figure1",
            GeneratorSpec::ConstrainedDet { .. } => "constrained-det",
            GeneratorSpec::ConstrainedRand { .. } => "constrained-rand",
            GeneratorSpec::Tightness { .. } => "tightness",
            GeneratorSpec::AdvDepartures { .. } => "adv-departures",
            GeneratorSpec::Add { .. } => "add",
            GeneratorSpec::Sud { .. } => "sud",
            GeneratorSpec::Random { .. } => "random",
            GeneratorSpec::Trips { .. } => "trips",
            GeneratorSpec::Compat { .. } => "compat",
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(bad(format!("{name} must be finite and non-negative, got {v}")))
            }
        };
        match *self {
            GeneratorSpec::Figure1 { y } => finite_nonneg("y", y),
            GeneratorSpec::ConstrainedDet { x } | GeneratorSpec::ConstrainedRand { x } => {
                if x == 0.0 || x == 1.0 {
                    Ok(())
                } else {
                    Err(bad(format!("x must be 0 or 1, got {x}")))
                }
            }
            GeneratorSpec::Tightness { eps } => {
                if (0.0..1.0).contains(&eps) {
                    Ok(())
                } else {
                    Err(bad(format!("eps must lie in [0, 1), got {eps}")))
                }
            }
            GeneratorSpec::AdvDepartures { n, k, m } | GeneratorSpec::Sud { n, k, m, .. } => {
                if n < 2 || k < 2 || k > n {
                    return Err(bad(format!("need 2 <= K <= n, got n={n} K={k}")));
                }
                if !(m >= 1.0 && m.powi(k as i32).is_finite()) {
                    return Err(bad(format!("M={m} must be at least 1 with M^K finite")));
                }
                if let GeneratorSpec::Sud { delta, .. } = *self {
                    if !(delta > 0.0 && delta < 1.0) {
                        return Err(bad(format!("delta must lie in (0, 1), got {delta}")));
                    }
                }
                Ok(())
            }
            GeneratorSpec::Add { n, k, m } => {
                if n < 2 {
                    return Err(bad("add needs n >= 2"));
                }
                if k > isqrt(n) {
                    return Err(bad(format!("add needs K <= floor(sqrt n) = {}, got {k}", isqrt(n))));
                }
                if !(m >= 1.0 && m.powi(k as i32).is_finite()) {
                    return Err(bad(format!("M={m} must be at least 1 with M^K finite")));
                }
                if (n as u64).checked_mul(n as u64).is_none_or(|sq| sq > u32::MAX as u64) {
                    return Err(bad("n^2 does not fit a deadline"));
                }
                Ok(())
            }
            GeneratorSpec::Random { d, density, values, .. } => {
                if d == 0 {
                    return Err(bad("d must be positive"));
                }
                if !(0.0..=1.0).contains(&density) {
                    return Err(bad(format!("density must lie in [0, 1], got {density}")));
                }
                values.to_string().parse::<ValueDist>().map(|_| ())
            }
            GeneratorSpec::Trips { d, pool, .. } => {
                if d == 0 || pool == 0 {
                    Err(bad("trips needs d > 0 and a non-empty pool"))
                } else {
                    Ok(())
                }
            }
            GeneratorSpec::Compat { d, p, types, .. } => {
                if d == 0 || types == 0 {
                    Err(bad("compat needs d > 0 and at least one type"))
                } else if !(0.0..=1.0).contains(&p) {
                    Err(bad(format!("p must lie in [0, 1], got {p}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn generate(&self) -> Result<DynamicInstance<f64>, GenError> {
        self.validate()?;
        use Role::{Buyer, Seller};
        let inst = match *self {
            GeneratorSpec::Figure1 { y } => {
                DynamicInstance::new(3, [(1, 2, 1.0), (2, 3, y)], DepartureModel::constant(1))?
            }
            GeneratorSpec::ConstrainedDet { x } | GeneratorSpec::ConstrainedRand { x } => {
                let v13 = if matches!(self, GeneratorSpec::ConstrainedDet { .. }) {
                    (5f64.sqrt() - 1.0) / 2.0
                } else {
                    0.5
                };
                let edges = [(1, 3, v13), (2, 3, 1.0), (2, 4, x)].into_iter().filter(|e| e.2 > 0.0);
                DynamicInstance::new(4, edges, DepartureModel::constant(2))?
                    .with_roles(&[Seller, Seller, Buyer, Buyer])
            }
            GeneratorSpec::Tightness { eps } => DynamicInstance::new(
                4,
                [(1, 3, 1.0 - eps), (2, 3, 1.0), (2, 4, 1.0)],
                DepartureModel::constant(2),
            )?
            .with_roles(&[Seller, Seller, Buyer, Buyer]),
            GeneratorSpec::AdvDepartures { n, k, m } => {
                let mut deadlines = vec![0u32; n];
                deadlines[0] = n as u32;
                DynamicInstance::new(n, star_edges(k, m), DepartureModel::per_vertex(deadlines))?
            }
            GeneratorSpec::Sud { n, k, m, delta } => DynamicInstance::new(
                n,
                star_edges(k, m),
                DepartureModel::geometric(delta).with_knowledge(DepartureKnowledge::RevealedWhenCritical),
            )?,
            GeneratorSpec::Add { n, k, m } => {
                let prefix = floor_n_ln_n(n);
                let horizon = prefix + isqrt(n);
                let mut edges = Vec::new();
                for i in 1..=prefix {
                    for j in (prefix + 1)..=(prefix + k) {
                        edges.push((i, j, m.powi((j - prefix) as i32)));
                    }
                }
                let mut law = vec![0u32; n];
                law[0] = (n * n) as u32;
                DynamicInstance::new(horizon, edges, DepartureModel::empirical(law))?
            }
            GeneratorSpec::Random {
                horizon,
                d,
                density,
                values,
                seed,
                roles,
            } => {
                let mut rng = data_rng(seed);
                let mut edges = Vec::new();
                for i in 1..=horizon {
                    for j in (i + 1)..=(i + d as usize).min(horizon) {
                        if rng.random_bool(density) {
                            let v = values.sample(&mut rng);
                            if v > 0.0 {
                                edges.push((i, j, v));
                            }
                        }
                    }
                }
                let inst = DynamicInstance::new(horizon, edges, DepartureModel::constant(d))?;
                if roles {
                    let labels: Vec<Role> = (0..horizon)
                        .map(|_| if rng.random_bool(0.5) { Seller } else { Buyer })
                        .collect();
                    inst.with_roles(&labels)
                } else {
                    inst
                }
            }
            GeneratorSpec::Trips { n, d, seed, mode, pool } => {
                let trips = synthetic_trips(pool, seed);
                ingest_trips(&trips, n, &mode.model(d), seed)?
            }
            GeneratorSpec::Compat {
                n,
                d,
                p,
                seed,
                mode,
                types,
            } => ingest_compat(types, p, n, &mode.model(d), seed)?,
        };
        Ok(inst.with_meta("generator", self.to_string()))
    }
}

fn star_edges(k: usize, m: f64) -> Vec<(usize, usize, f64)> {
    (2..=k).map(|j| (1, j, m.powi(j as i32))).collect()
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family())?;
        match self {
            GeneratorSpec::Figure1 { y } => write!(f, " y={y}"),
            GeneratorSpec::ConstrainedDet { x } | GeneratorSpec::ConstrainedRand { x } => write!(f, " x={x}"),
            GeneratorSpec::Tightness { eps } => write!(f, " eps={eps}"),
            GeneratorSpec::AdvDepartures { n, k, m } | GeneratorSpec::Add { n, k, m } => {
                write!(f, " n={n} K={k} M={m}")
            }
            GeneratorSpec::Sud { n, k, m, delta } => write!(f, " n={n} K={k} M={m} delta={delta}"),
            GeneratorSpec::Random {
                horizon,
                d,
                density,
                values,
                seed,
                roles,
            } => write!(
                f,
                " T={horizon} d={d} density={density} values={values} seed={seed} roles={roles}"
            ),
            GeneratorSpec::Trips { n, d, seed, mode, pool } => {
                write!(f, " n={n} d={d} seed={seed} mode={mode} pool={pool}")
            }
            GeneratorSpec::Compat {
                n,
                d,
                p,
                seed,
                mode,
                types,
            } => write!(f, " n={n} d={d} p={p} seed={seed} mode={mode} types={types}"),
        }
    }
}

/// Accepts `family key=value ...`, with commas or whitespace between parameters.
impl FromStr for GeneratorSpec {
    type Err = GenError;
    fn from_str(s: &str) -> Result<Self, GenError> {
        let mut tokens = s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty());
        let family = tokens.next().ok_or_else(|| bad("empty generator spec"))?;
        let mut params = Vec::new();
        for t in tokens {
            let (k, v) = t.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {t:?}")))?;
            params.push((k, v));
        }
        Self::parse(family, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::DepartureKind;

    fn gen(s: &str) -> DynamicInstance<f64> {
        s.parse::<GeneratorSpec>().unwrap().generate().unwrap()
    }

    #[test]
    fn tightness_structure() {
        let inst = gen("tightness eps=0.1");
        assert_eq!(inst.horizon(), 4);
        assert_eq!(inst.uniform_deadline(), Some(2));
        assert_eq!(inst.value(1, 3), Some(0.9));
        assert_eq!(inst.value(2, 3), Some(1.0));
        assert_eq!(inst.value(2, 4), Some(1.0));
        assert_eq!(inst.edge_count(), 3);
        let roles = inst.roles().unwrap().unwrap();
        assert_eq!(roles, vec![Role::Seller, Role::Seller, Role::Buyer, Role::Buyer]);
    }

    #[test]
    fn constrained_families() {
        let det = gen("constrained-det x=1");
        assert!((det.value(1, 3).unwrap() - 0.618_033_988_749_895).abs() < 1e-15);
        assert_eq!(det.value(2, 4), Some(1.0));
        let det0 = gen("constrained-det x=0");
        assert_eq!(det0.value(2, 4), None);
        let rand = gen("constrained-rand x=1");
        assert_eq!(rand.value(1, 3), Some(0.5));
        assert!("constrained-rand x=0.5".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn figure1_structure() {
        let inst = gen("figure1 y=3");
        assert_eq!(inst.value(1, 2), Some(1.0));
        assert_eq!(inst.value(2, 3), Some(3.0));
        assert_eq!(inst.value(1, 3), None);
    }

    #[test]
    fn adv_departures_small() {
        let inst = gen("adv-departures n=5 K=3 M=5");
        assert_eq!(inst.value(1, 2), Some(25.0));
        assert_eq!(inst.value(1, 3), Some(125.0));
        assert_eq!(inst.edge_count(), 2);
        assert_eq!(inst.departure().kind, DepartureKind::ExplicitPerVertex(vec![5, 0, 0, 0, 0]));
    }

    #[test]
    fn add_structure() {
        let inst = gen("add n=16 K=4");
        let prefix = floor_n_ln_n(16);
        assert_eq!(prefix, 44);
        assert_eq!(inst.horizon(), prefix + 4);
        assert_eq!(inst.edge_count(), prefix * 4);
        assert_eq!(inst.value(1, prefix + 1), Some(17.0));
        assert_eq!(inst.value(3, prefix + 4), Some(17f64.powi(4)));
        assert_eq!(inst.value(1, 2), None);
        match &inst.departure().kind {
            DepartureKind::Empirical(law) => {
                assert_eq!(law.len(), 16);
                assert_eq!(law.iter().filter(|&&d| d == 256).count(), 1);
                assert_eq!(law.iter().filter(|&&d| d == 0).count(), 15);
            }
            other => panic!("unexpected departure {other:?}"),
        }
        assert!("add n=16 K=5".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn sud_structure() {
        let inst = gen("sud n=6 K=4 M=10 delta=0.3");
        assert_eq!(inst.value(1, 4), Some(10_000.0));
        assert_eq!(inst.value(1, 5), None);
        assert_eq!(inst.departure().knowledge, DepartureKnowledge::RevealedWhenCritical);
        assert_eq!(inst.departure().kind, DepartureKind::Geometric { delta: 0.3 });
    }

    #[test]
    fn bad_parameters() {
        for s in [
            "nope",
            "tightness",
            "tightness eps=1.5",
            "adv-departures n=4 K=5",
            "sud n=4 K=3 delta=1",
            "random T=5 d=0",
            "random T=5 d=2 density=2",
            "random T=5 d=2 values=int:0",
            "compat n=5 d=2 p=1.1",
            "figure1 z=1",
        ] {
            assert!(s.parse::<GeneratorSpec>().is_err(), "{s} should be rejected");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "figure1 y=2.5",
            "tightness eps=0.01",
            "add n=9 K=3 M=10",
            "sud n=6 K=4 M=7 delta=0.5",
            "random T=30 d=3 density=0.4 values=int:100 seed=4 roles=true",
            "trips n=50 d=5 seed=2 mode=stoch pool=200",
            "compat n=40 d=5 p=0.1 seed=1 mode=det types=30",
        ] {
            let spec: GeneratorSpec = s.parse().unwrap();
            assert_eq!(spec.to_string().parse::<GeneratorSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn outputs_are_reproducible() {
        for s in [
            "random T=40 d=4 density=0.5 values=exp:2 seed=9 roles=true",
            "trips n=60 d=6 seed=3 mode=stoch pool=100",
            "compat n=60 d=6 p=0.2 seed=3",
        ] {
            assert_eq!(gen(s), gen(s));
        }
        assert_ne!(gen("random T=40 d=4 seed=1"), gen("random T=40 d=4 seed=2"));
    }

    #[test]
    fn random_respects_window() {
        let inst = gen("random T=50 d=3 density=1 values=unit");
        assert_eq!(inst.edge_count(), 3 * 50 - 6);
        assert!(inst.edges().all(|(i, j, v)| j - i <= 3 && v == 1.0));
    }
}
