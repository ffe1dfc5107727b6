//! Maximum-weight bipartite matching maintained online under seller and
//! buyer arrivals, with seller prices and buyer margins as dual variables.
//!
//! A new buyer runs an ascending auction in its exact (zero-increment)
//! form: starting from the current duals, grow an alternating forest over
//! tight edges (blue buyers, red sellers), augment when a free seller is
//! reached, otherwise move every red price up and every blue margin down by
//! the largest step that keeps the duals feasible. Prices never decrease and
//! margins never increase, and the dual sum of the vertices already present
//! is unchanged by the auction.

mod ledger;

pub use ledger::DualLedger;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::market::AuditRecord;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SellerId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BuyerId(pub usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("seller {0} is already present")]
    DuplicateSeller(usize),
    #[error("buyer {0} is already present")]
    DuplicateBuyer(usize),
    #[error("seller {0} is not present")]
    UnknownSeller(usize),
    #[error("buyer {0} is not present")]
    UnknownBuyer(usize),
    #[error("buyer {buyer} lists seller {seller} twice")]
    DuplicateEdge { seller: usize, buyer: usize },
    #[error("edge ({seller},{buyer}) has a negative value")]
    NegativeValue { seller: usize, buyer: usize },
    #[error("buyer {0} is still tentatively matched")]
    BuyerStillMatched(usize),
    #[error("dual step {delta} is negative")]
    NumericalInstability { delta: f64 },
}

/// One simultaneous dual move of the exact auction.
#[derive(Debug, Clone, PartialEq)]
pub struct DualUpdate<S> {
    /// The arriving buyer whose auction produced this step.
    pub buyer: BuyerId,
    pub delta: S,
    pub red_sellers: Vec<SellerId>,
    pub blue_buyers: Vec<BuyerId>,
}

/// Result of one buyer arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionOutcome<S> {
    /// Margin of the new buyer when its auction terminated.
    pub initial_margin: S,
    /// Dual sum of the previously present vertices after minus before.
    pub conservation_gap: S,
    pub dual_updates: usize,
    pub matched_to: Option<SellerId>,
}

/// A seller leaving the market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SellerExit<S> {
    pub final_price: S,
    /// The tentative partner, finalized together with the seller, and the
    /// value of their edge.
    pub partner: Option<(BuyerId, S)>,
}

#[derive(Debug, Clone)]
struct Seller<S> {
    price: S,
    mate: Option<BuyerId>,
    bidders: Vec<BuyerId>,
}

#[derive(Debug, Clone)]
struct Buyer<S> {
    margin: S,
    mate: Option<SellerId>,
    // Present sellers only, ascending by id.
    edges: Vec<(SellerId, S)>,
}

#[derive(Debug, Clone)]
pub struct AuctionState<S> {
    sellers: BTreeMap<SellerId, Seller<S>>,
    buyers: BTreeMap<BuyerId, Buyer<S>>,
    ledger: DualLedger<S>,
    monotonicity_violations: usize,
    color_mismatches: usize,
    dual_update_count: usize,
    step_trace: Option<Vec<DualUpdate<S>>>,
    price_history: Option<BTreeMap<SellerId, Vec<S>>>,
    margin_history: Option<BTreeMap<BuyerId, Vec<S>>>,
}

impl<S: Scalar> Default for AuctionState<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> AuctionState<S> {
    pub fn new() -> Self {
        Self {
            sellers: BTreeMap::new(),
            buyers: BTreeMap::new(),
            ledger: DualLedger::default(),
            monotonicity_violations: 0,
            color_mismatches: 0,
            dual_update_count: 0,
            step_trace: None,
            price_history: None,
            margin_history: None,
        }
    }

    /// Records one [`DualUpdate`] per dual move.
    pub fn with_step_trace(mut self) -> Self {
        self.step_trace = Some(Vec::new());
        self
    }

    /// Keeps every price and margin value each vertex ever held.
    pub fn with_history(mut self) -> Self {
        self.price_history = Some(BTreeMap::new());
        self.margin_history = Some(BTreeMap::new());
        self
    }

    pub fn add_seller(&mut self, id: SellerId) -> Result<(), EngineError> {
        if self.sellers.contains_key(&id) {
            return Err(EngineError::DuplicateSeller(id.0));
        }
        self.sellers.insert(
            id,
            Seller {
                price: S::zero(),
                mate: None,
                bidders: Vec::new(),
            },
        );
        if let Some(h) = &mut self.price_history {
            h.insert(id, vec![S::zero()]);
        }
        Ok(())
    }

    /// Adds a buyer with edges to present sellers and runs its auction.
    pub fn add_buyer<I>(&mut self, id: BuyerId, edges: I) -> Result<AuctionOutcome<S>, EngineError>
    where
        I: IntoIterator<Item = (SellerId, S)>,
    {
        if self.buyers.contains_key(&id) {
            return Err(EngineError::DuplicateBuyer(id.0));
        }
        let mut edges: Vec<(SellerId, S)> = edges.into_iter().collect();
        edges.sort_by_key(|&(s, _)| s);
        for w in edges.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(EngineError::DuplicateEdge {
                    seller: w[0].0 .0,
                    buyer: id.0,
                });
            }
        }
        for &(s, v) in &edges {
            if !self.sellers.contains_key(&s) {
                return Err(EngineError::UnknownSeller(s.0));
            }
            if v < S::zero() {
                return Err(EngineError::NegativeValue {
                    seller: s.0,
                    buyer: id.0,
                });
            }
        }

        let before = self.dual_sum();
        let best = edges
            .iter()
            .map(|&(s, v)| v - self.sellers[&s].price)
            .fold(S::zero(), S::max_of);
        let start = if best > S::tolerance() { best } else { S::zero() };
        for &(s, _) in &edges {
            self.sellers.get_mut(&s).expect("checked").bidders.push(id);
        }
        self.buyers.insert(
            id,
            Buyer {
                margin: start,
                mate: None,
                edges,
            },
        );
        if let Some(h) = &mut self.margin_history {
            h.insert(id, vec![start]);
        }

        let updates_before = self.dual_update_count;
        if start > S::zero() {
            self.run_auction(id)?;
        }
        let buyer = &self.buyers[&id];
        let initial_margin = buyer.margin;
        let matched_to = buyer.mate;
        self.ledger.record_initial(id, initial_margin);
        let after = self.dual_sum() - initial_margin;
        Ok(AuctionOutcome {
            initial_margin,
            conservation_gap: after - before,
            dual_updates: self.dual_update_count - updates_before,
            matched_to,
        })
    }

    fn run_auction(&mut self, root: BuyerId) -> Result<(), EngineError> {
        let tol = S::tolerance();
        loop {
            // Alternating forest over tight edges. `parent[s]` is the blue
            // buyer that colored seller s red.
            let mut parent: BTreeMap<SellerId, BuyerId> = BTreeMap::new();
            let mut blue: Vec<BuyerId> = vec![root];
            let mut free_seller = None;
            let mut head = 0;
            'grow: while head < blue.len() {
                let b = blue[head];
                head += 1;
                let buyer = &self.buyers[&b];
                for &(s, v) in &buyer.edges {
                    if parent.contains_key(&s) || buyer.mate == Some(s) {
                        continue;
                    }
                    let seller = &self.sellers[&s];
                    if seller.price + buyer.margin - v <= tol {
                        parent.insert(s, b);
                        match seller.mate {
                            None => {
                                free_seller = Some(s);
                                break 'grow;
                            }
                            Some(next) => blue.push(next),
                        }
                    }
                }
            }

            if let Some(s) = free_seller {
                self.rematch_along(s, &parent);
                return Ok(());
            }

            // Smallest blue margin; the newest buyer gives way on ties.
            let (delta1, loser) = blue
                .iter()
                .map(|&b| (self.buyers[&b].margin, b))
                .fold(None, |acc: Option<(S, BuyerId)>, (q, b)| match acc {
                    Some((best, who)) if best < q || (best == q && who > b) => Some((best, who)),
                    _ => Some((q, b)),
                })
                .expect("root is blue");
            if delta1 <= tol {
                self.release(loser, root, &parent);
                return Ok(());
            }

            let mut delta2: Option<S> = None;
            for &b in &blue {
                let buyer = &self.buyers[&b];
                for &(s, v) in &buyer.edges {
                    if parent.contains_key(&s) {
                        continue;
                    }
                    let slack = self.sellers[&s].price + buyer.margin - v;
                    delta2 = Some(match delta2 {
                        Some(d) => d.min_of(slack),
                        None => slack,
                    });
                }
            }
            if let Some(d2) = delta2 {
                if d2 < S::zero() - tol {
                    return Err(EngineError::NumericalInstability {
                        delta: d2.to_f64_lossy(),
                    });
                }
            }
            let terminal = match delta2 {
                None => true,
                Some(d2) => delta1 <= d2 + tol,
            };
            let delta = if terminal { delta1 } else { delta2.expect("non-terminal step") };

            let red: Vec<SellerId> = parent.keys().copied().collect();
            if red.len() + 1 != blue.len() {
                self.color_mismatches += 1;
            }
            for &s in &red {
                let seller = self.sellers.get_mut(&s).expect("red seller present");
                seller.price = seller.price + delta;
                if let Some(h) = &mut self.price_history {
                    h.entry(s).or_default().push(seller.price);
                }
            }
            for &b in &blue {
                let buyer = self.buyers.get_mut(&b).expect("blue buyer present");
                let old = buyer.margin;
                let mut q = old - delta;
                if q.approx_eq(S::zero()) || q < S::zero() {
                    q = S::zero();
                }
                if q > old {
                    self.monotonicity_violations += 1;
                }
                buyer.margin = q;
                if let Some(h) = &mut self.margin_history {
                    h.entry(b).or_default().push(q);
                }
            }
            if delta < S::zero() {
                self.monotonicity_violations += 1;
            }
            self.dual_update_count += 1;
            if let Some(trace) = &mut self.step_trace {
                trace.push(DualUpdate {
                    buyer: root,
                    delta,
                    red_sellers: red,
                    blue_buyers: blue.clone(),
                });
            }

            if terminal {
                self.release(loser, root, &parent);
                return Ok(());
            }
        }
    }

    /// Flips the alternating path that ends at red seller `s`: each seller on
    /// the path is matched to the blue buyer that colored it, which frees
    /// that buyer's previous seller for the next step back toward the root.
    fn rematch_along(&mut self, mut s: SellerId, parent: &BTreeMap<SellerId, BuyerId>) {
        loop {
            let b = parent[&s];
            let previous = self.buyers[&b].mate;
            self.sellers.get_mut(&s).expect("path seller").mate = Some(b);
            self.buyers.get_mut(&b).expect("path buyer").mate = Some(s);
            match previous {
                Some(prev) => s = prev,
                None => return,
            }
        }
    }

    /// Ends an auction in which blue buyer `loser` reached zero margin: it
    /// gives up its seller and the path from the root shifts by one.
    fn release(&mut self, loser: BuyerId, root: BuyerId, parent: &BTreeMap<SellerId, BuyerId>) {
        if loser == root {
            return;
        }
        let s = self.buyers[&loser].mate.expect("non-root blue buyer is matched");
        self.buyers.get_mut(&loser).expect("loser").mate = None;
        self.rematch_along(s, parent);
    }

    /// Removes a seller (and its tentative partner, if any), recording
    /// their final duals.
    pub fn finalize_seller(&mut self, id: SellerId) -> Result<SellerExit<S>, EngineError> {
        let seller = self.sellers.remove(&id).ok_or(EngineError::UnknownSeller(id.0))?;
        self.ledger.record_final_price(id, seller.price);
        let partner = match seller.mate {
            Some(b) => {
                let buyer = self.buyers.remove(&b).expect("mate is present");
                let value = buyer
                    .edges
                    .iter()
                    .find(|&&(s, _)| s == id)
                    .map(|&(_, v)| v)
                    .expect("matched pair has an edge");
                self.ledger.record_final_margin(b, buyer.margin);
                self.ledger.record_match(id, b, value);
                for &(s, _) in &buyer.edges {
                    if let Some(other) = self.sellers.get_mut(&s) {
                        other.bidders.retain(|&x| x != b);
                    }
                }
                Some((b, value))
            }
            None => None,
        };
        for b in &seller.bidders {
            if let Some(buyer) = self.buyers.get_mut(b) {
                buyer.edges.retain(|&(s, _)| s != id);
            }
        }
        Ok(SellerExit {
            final_price: seller.price,
            partner,
        })
    }

    /// Removes an unmatched buyer, recording its final margin.
    pub fn remove_buyer(&mut self, id: BuyerId) -> Result<S, EngineError> {
        let buyer = self.buyers.get(&id).ok_or(EngineError::UnknownBuyer(id.0))?;
        if buyer.mate.is_some() {
            return Err(EngineError::BuyerStillMatched(id.0));
        }
        let buyer = self.buyers.remove(&id).expect("checked");
        self.ledger.record_final_margin(id, buyer.margin);
        for &(s, _) in &buyer.edges {
            if let Some(seller) = self.sellers.get_mut(&s) {
                seller.bidders.retain(|&x| x != id);
            }
        }
        Ok(buyer.margin)
    }

    /// Unmatched buyers with no present seller left to bid on.
    pub fn stranded_buyers(&self) -> Vec<BuyerId> {
        self.buyers
            .iter()
            .filter(|(_, b)| b.mate.is_none() && b.edges.is_empty())
            .map(|(&id, _)| id)
            .collect()
    }

    pub fn has_seller(&self, id: SellerId) -> bool {
        self.sellers.contains_key(&id)
    }

    pub fn has_buyer(&self, id: BuyerId) -> bool {
        self.buyers.contains_key(&id)
    }

    pub fn price(&self, id: SellerId) -> Option<S> {
        self.sellers.get(&id).map(|s| s.price)
    }

    pub fn margin(&self, id: BuyerId) -> Option<S> {
        self.buyers.get(&id).map(|b| b.margin)
    }

    pub fn seller_mate(&self, id: SellerId) -> Option<BuyerId> {
        self.sellers.get(&id).and_then(|s| s.mate)
    }

    pub fn buyer_mate(&self, id: BuyerId) -> Option<SellerId> {
        self.buyers.get(&id).and_then(|b| b.mate)
    }

    pub fn sellers(&self) -> impl Iterator<Item = SellerId> + '_ {
        self.sellers.keys().copied()
    }

    pub fn buyers(&self) -> impl Iterator<Item = BuyerId> + '_ {
        self.buyers.keys().copied()
    }

    /// Edges between present vertices, `(seller, buyer, value)`.
    pub fn present_edges(&self) -> Vec<(SellerId, BuyerId, S)> {
        self.buyers
            .iter()
            .flat_map(|(&b, buyer)| buyer.edges.iter().map(move |&(s, v)| (s, b, v)))
            .collect()
    }

    /// Tentative pairs `(seller, buyer, value)`.
    pub fn tentative_pairs(&self) -> Vec<(SellerId, BuyerId, S)> {
        self.sellers
            .iter()
            .filter_map(|(&s, seller)| {
                let b = seller.mate?;
                let v = self.buyers[&b]
                    .edges
                    .iter()
                    .find(|&&(x, _)| x == s)
                    .map(|&(_, v)| v)?;
                Some((s, b, v))
            })
            .collect()
    }

    pub fn tentative_weight(&self) -> S {
        crate::scalar::total(self.tentative_pairs().into_iter().map(|(_, _, v)| v))
    }

    /// Sum of all present prices and margins.
    pub fn dual_sum(&self) -> S {
        crate::scalar::total(
            self.sellers
                .values()
                .map(|s| s.price)
                .chain(self.buyers.values().map(|b| b.margin)),
        )
    }

    pub fn ledger(&self) -> &DualLedger<S> {
        &self.ledger
    }

    pub fn into_ledger(self) -> DualLedger<S> {
        self.ledger
    }

    pub fn step_trace(&self) -> &[DualUpdate<S>] {
        self.step_trace.as_deref().unwrap_or(&[])
    }

    pub fn dual_update_count(&self) -> usize {
        self.dual_update_count
    }

    pub fn price_history(&self, id: SellerId) -> Option<&[S]> {
        self.price_history.as_ref()?.get(&id).map(Vec::as_slice)
    }

    pub fn margin_history(&self, id: BuyerId) -> Option<&[S]> {
        self.margin_history.as_ref()?.get(&id).map(Vec::as_slice)
    }

    /// Checks dual feasibility, the three complementary-slackness
    /// conditions and the monotonicity of every recorded dual.
    pub fn audit(&self) -> Vec<AuditRecord> {
        let tol = S::tolerance();
        let mut records = Vec::with_capacity(6);

        let infeasible = self.present_edges().into_iter().find(|&(s, b, v)| {
            !v.approx_le(self.sellers[&s].price + self.buyers[&b].margin)
        });
        records.push(match infeasible {
            Some((s, b, v)) => AuditRecord::fail(
                "dual-feasibility",
                format!("edge ({},{}) value {v} exceeds p+q", s.0, b.0),
            ),
            None => AuditRecord::pass("dual-feasibility", "all present edges covered"),
        });

        let negative = self
            .sellers
            .iter()
            .map(|(&s, x)| (s.0, x.price))
            .chain(self.buyers.iter().map(|(&b, x)| (b.0, x.margin)))
            .find(|&(_, x)| x < S::zero() - tol);
        records.push(AuditRecord::check(
            "dual-nonnegative",
            negative.is_none(),
            negative.map_or_else(String::new, |(id, x)| format!("vertex {id} has dual {x}")),
        ));

        let loose = self
            .tentative_pairs()
            .into_iter()
            .find(|&(s, b, v)| !v.approx_eq(self.sellers[&s].price + self.buyers[&b].margin));
        records.push(match loose {
            Some((s, b, v)) => AuditRecord::fail(
                "cs1-tight-matches",
                format!("matched pair ({},{}) value {v} is not tight", s.0, b.0),
            ),
            None => AuditRecord::pass("cs1-tight-matches", ""),
        });

        let priced = self
            .sellers
            .iter()
            .find(|(_, x)| x.mate.is_none() && !x.price.approx_eq(S::zero()));
        records.push(AuditRecord::check(
            "cs2-free-sellers-unpriced",
            priced.is_none(),
            priced.map_or_else(String::new, |(s, x)| format!("seller {} price {}", s.0, x.price)),
        ));

        let margined = self
            .buyers
            .iter()
            .find(|(_, x)| x.mate.is_none() && !x.margin.approx_eq(S::zero()));
        records.push(AuditRecord::check(
            "cs3-free-buyers-zero-margin",
            margined.is_none(),
            margined.map_or_else(String::new, |(b, x)| format!("buyer {} margin {}", b.0, x.margin)),
        ));

        let mut violations = self.monotonicity_violations;
        if let Some(h) = &self.price_history {
            violations += h
                .values()
                .map(|xs| xs.windows(2).filter(|w| w[1] < w[0] - tol).count())
                .sum::<usize>();
        }
        if let Some(h) = &self.margin_history {
            violations += h
                .values()
                .map(|xs| xs.windows(2).filter(|w| w[1] > w[0] + tol).count())
                .sum::<usize>();
        }
        records.push(AuditRecord::check(
            "monotonicity",
            violations == 0,
            format!("{violations} violations"),
        ));

        records.push(AuditRecord::check(
            "red-blue-balance",
            self.color_mismatches == 0,
            format!("{} of {} dual updates unbalanced", self.color_mismatches, self.dual_update_count),
        ));
        records
    }

    #[cfg(test)]
    pub(crate) fn force_margin(&mut self, id: BuyerId, margin: S) {
        self.buyers.get_mut(&id).expect("buyer").margin = margin;
    }

    /// Every seller and buyer that is present and matched, as seen from the
    /// seller side; used to cross-check the mate maps.
    pub fn mates_consistent(&self) -> bool {
        let from_sellers: BTreeSet<(SellerId, BuyerId)> = self
            .sellers
            .iter()
            .filter_map(|(&s, x)| x.mate.map(|b| (s, b)))
            .collect();
        let from_buyers: BTreeSet<(SellerId, BuyerId)> = self
            .buyers
            .iter()
            .filter_map(|(&b, x)| x.mate.map(|s| (s, b)))
            .collect();
        from_sellers == from_buyers
    }
}

#[cfg(test)]
mod tests;
