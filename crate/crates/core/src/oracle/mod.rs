//! Offline optimum, dual certificates and competitive-ratio statistics.

mod matching;

pub use matching::{max_weight_bipartite, max_weight_matching_exhaustive, max_weight_matching_heuristic};

use std::fmt;

use crate::auction::{BuyerId, DualLedger, SellerId};
use crate::market::{AuditRecord, DynamicInstance, Matching, Role, VertexId};
use crate::Scalar;

/// Largest horizon solved by exhaustive search over vertex subsets.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMethod {
    BitmaskExact,
    BipartiteExact,
    Heuristic,
}

impl OptMethod {
    pub fn is_exact(self) -> bool {
        self != OptMethod::Heuristic
    }
}

impl fmt::Display for OptMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptMethod::BitmaskExact => "bitmask-exact",
            OptMethod::BipartiteExact => "bipartite-exact",
            OptMethod::Heuristic => "heuristic",
        })
    }
}

#[derive(Debug, Clone)]
pub struct OptResult<S> {
    pub value: S,
    pub witness: Matching<S>,
    pub method: OptMethod,
}

/// Maximum-weight matching of the instance in hindsight, restricted to
/// pairs that are simultaneously present under `deadlines`.
pub fn offline_opt<S: Scalar>(instance: &DynamicInstance<S>, deadlines: &[u32]) -> OptResult<S> {
    let t = instance.horizon();
    let edges: Vec<(usize, usize, S)> = instance
        .usable_edges(deadlines)
        .filter(|&(_, _, v)| v > S::zero())
        .map(|(i, j, v)| (i - 1, j - 1, v))
        .collect();

    let (value, pairs, method) = if t <= EXHAUSTIVE_LIMIT {
        let (v, p) = max_weight_matching_exhaustive(t, &edges);
        (v, p, OptMethod::BitmaskExact)
    } else if let Some(Ok(roles)) = instance.roles() {
        if let Some((v, p)) = bipartite_opt(&roles, &edges) {
            (v, p, OptMethod::BipartiteExact)
        } else {
            let (v, p) = max_weight_matching_heuristic(t, &edges);
            (v, p, OptMethod::Heuristic)
        }
    } else {
        let (v, p) = max_weight_matching_heuristic(t, &edges);
        (v, p, OptMethod::Heuristic)
    };

    let mut witness = Matching::new();
    for (a, b) in pairs {
        let (k, l) = (a + 1, b + 1);
        let v = instance.value(k, l).expect("witness uses instance edges");
        witness
            .insert(k, l, k.max(l) as u64, v)
            .expect("witness is a matching");
    }
    OptResult {
        value,
        witness,
        method,
    }
}

/// Exact optimum when every positive edge joins a seller and a buyer.
fn bipartite_opt<S: Scalar>(
    roles: &[Role],
    edges: &[(usize, usize, S)],
) -> Option<(S, Vec<(usize, usize)>)> {
    let mut index = vec![0usize; roles.len()];
    let mut sellers = Vec::new();
    let mut buyers = Vec::new();
    for (k, role) in roles.iter().enumerate() {
        match role {
            Role::Seller => {
                index[k] = sellers.len();
                sellers.push(k);
            }
            Role::Buyer => {
                index[k] = buyers.len();
                buyers.push(k);
            }
        }
    }
    let mut bip = Vec::with_capacity(edges.len());
    for &(a, b, v) in edges {
        match (roles[a], roles[b]) {
            (Role::Seller, Role::Buyer) => bip.push((index[a], index[b], v)),
            (Role::Buyer, Role::Seller) => bip.push((index[b], index[a], v)),
            _ => return None,
        }
    }
    let (value, pairs) = max_weight_bipartite(sellers.len(), buyers.len(), &bip);
    let pairs = pairs
        .into_iter()
        .map(|(s, b)| {
            let (x, y) = (sellers[s], buyers[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    Some((value, pairs))
}

/// A per-vertex dual vector for the offline matching LP (index `k - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate<S> {
    pub lambda: Vec<S>,
}

impl<S: Scalar> DualCertificate<S> {
    pub fn zeros(horizon: usize) -> Self {
        Self {
            lambda: vec![S::zero(); horizon],
        }
    }

    /// `λ_k = max` value incident to `k`; feasible on any instance.
    pub fn max_incident(instance: &DynamicInstance<S>) -> Self {
        let lambda = (1..=instance.horizon())
            .map(|k| {
                instance
                    .neighbors(k)
                    .iter()
                    .fold(S::zero(), |acc, &(_, v)| acc.max_of(v))
            })
            .collect();
        Self { lambda }
    }

    /// Bipartite certificate: final price for sellers, initial margin for
    /// buyers. Vertex `k` is seller `SellerId(k)` or buyer `BuyerId(k)`.
    pub fn from_bipartite(roles: &[Role], ledger: &DualLedger<S>) -> Self {
        let lambda = roles
            .iter()
            .enumerate()
            .map(|(i, role)| {
                let k = i + 1;
                match role {
                    Role::Seller => ledger.final_price(SellerId(k)),
                    Role::Buyer => ledger.initial_margin(BuyerId(k)),
                }
                .unwrap_or(S::zero())
            })
            .collect();
        Self { lambda }
    }

    /// General-graph certificate from a virtual market in which each real
    /// vertex `k` has a seller copy `SellerId(k)` and a buyer copy `BuyerId(k)`.
    pub fn from_virtual(horizon: usize, ledger: &DualLedger<S>) -> Self {
        let lambda = (1..=horizon)
            .map(|k| {
                ledger.final_price(SellerId(k)).unwrap_or(S::zero())
                    + ledger.initial_margin(BuyerId(k)).unwrap_or(S::zero())
            })
            .collect();
        Self { lambda }
    }

    pub fn get(&self, k: VertexId) -> S {
        self.lambda[k - 1]
    }

    pub fn total(&self) -> S {
        crate::scalar::total(self.lambda.iter().copied())
    }
}

/// Checks feasibility on every instance edge, nonnegativity, and weak
/// duality against `opt` when one is given.
pub fn verify_certificate<S: Scalar>(
    instance: &DynamicInstance<S>,
    certificate: &DualCertificate<S>,
    opt: Option<S>,
) -> AuditRecord {
    const NAME: &str = "dual-certificate";
    if certificate.lambda.len() != instance.horizon() {
        return AuditRecord::fail(
            NAME,
            format!(
                "certificate has {} entries for {} vertices",
                certificate.lambda.len(),
                instance.horizon()
            ),
        );
    }
    let tol = S::tolerance();
    if let Some((i, x)) = certificate
        .lambda
        .iter()
        .enumerate()
        .find(|&(_, &x)| x < S::zero() - tol)
    {
        return AuditRecord::fail(NAME, format!("lambda_{} = {x} is negative", i + 1));
    }
    for (k, l, v) in instance.edges() {
        let cover = certificate.get(k) + certificate.get(l);
        if !v.approx_le(cover) {
            return AuditRecord::fail(
                NAME,
                format!("edge ({k},{l}) value {v} exceeds lambda sum {cover}"),
            );
        }
    }
    let total = certificate.total();
    if let Some(o) = opt {
        if !o.approx_le(total) {
            return AuditRecord::fail(NAME, format!("lambda total {total} below OPT {o}"));
        }
    }
    AuditRecord::pass(NAME, format!("feasible, total {total}"))
}

/// Mean collected value over replications relative to the offline optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub mean: f64,
    pub std_err: f64,
    /// 95% normal-approximation interval for the ratio.
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

pub fn competitive_ratio(values: &[f64], opt: f64) -> RatioEstimate {
    let stats = SampleStats::from_values(values);
    if opt <= 0.0 {
        return RatioEstimate {
            ratio: 1.0,
            mean: stats.mean,
            std_err: stats.std_err,
            ci_low: 1.0,
            ci_high: 1.0,
            samples: stats.n,
        };
    }
    let half = 1.96 * stats.std_err / opt;
    let ratio = stats.mean / opt;
    RatioEstimate {
        ratio,
        mean: stats.mean,
        std_err: stats.std_err,
        ci_low: ratio - half,
        ci_high: ratio + half,
        samples: stats.n,
    }
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub std_err: f64,
}

impl SampleStats {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                n,
                mean: 0.0,
                std_err: 0.0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_err = if n > 1 {
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { n, mean, std_err }
    }
}
