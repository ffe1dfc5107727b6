use std::collections::{BTreeMap, BTreeSet};

use super::{BuyerId, SellerId};
use crate::market::AuditRecord;
use crate::Scalar;

/// Initial and final duals of every vertex that passed through an auction
/// market: `q^i` when a buyer's arrival auction ends, `q^f` and `p^f` when
/// a vertex is matched or leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLedger<S> {
    initial_margin: BTreeMap<BuyerId, S>,
    final_margin: BTreeMap<BuyerId, S>,
    final_price: BTreeMap<SellerId, S>,
    matches: Vec<(SellerId, BuyerId, S)>,
}

impl<S> Default for DualLedger<S> {
    fn default() -> Self {
        Self {
            initial_margin: BTreeMap::new(),
            final_margin: BTreeMap::new(),
            final_price: BTreeMap::new(),
            matches: Vec::new(),
        }
    }
}

impl<S: Scalar> DualLedger<S> {
    pub(crate) fn record_initial(&mut self, b: BuyerId, q: S) {
        self.initial_margin.insert(b, q);
    }

    pub(crate) fn record_final_margin(&mut self, b: BuyerId, q: S) {
        self.final_margin.insert(b, q);
    }

    pub(crate) fn record_final_price(&mut self, s: SellerId, p: S) {
        self.final_price.insert(s, p);
    }

    pub(crate) fn record_match(&mut self, s: SellerId, b: BuyerId, v: S) {
        self.matches.push((s, b, v));
    }

    pub fn initial_margin(&self, b: BuyerId) -> Option<S> {
        self.initial_margin.get(&b).copied()
    }

    pub fn final_margin(&self, b: BuyerId) -> Option<S> {
        self.final_margin.get(&b).copied()
    }

    pub fn final_price(&self, s: SellerId) -> Option<S> {
        self.final_price.get(&s).copied()
    }

    /// Finalized seller/buyer pairs with their edge values.
    pub fn matches(&self) -> &[(SellerId, BuyerId, S)] {
        &self.matches
    }

    pub fn sum_final_prices(&self) -> S {
        crate::scalar::total(self.final_price.values().copied())
    }

    pub fn sum_final_margins(&self) -> S {
        crate::scalar::total(self.final_margin.values().copied())
    }

    pub fn sum_initial_margins(&self) -> S {
        crate::scalar::total(self.initial_margin.values().copied())
    }

    /// `sum p^f + sum q^f - sum q^i`; zero once every vertex is resolved.
    pub fn identity_gap(&self) -> S {
        self.sum_final_prices() + self.sum_final_margins() - self.sum_initial_margins()
    }

    /// Whether every buyer that arrived has a final margin.
    pub fn is_complete(&self) -> bool {
        self.initial_margin.keys().all(|b| self.final_margin.contains_key(b))
    }

    /// Ledger identity plus the per-vertex complementary-slackness facts.
    pub fn check(&self) -> Vec<AuditRecord> {
        let mut out = Vec::with_capacity(3);
        let gap = self.identity_gap();
        out.push(AuditRecord::check(
            "ledger-identity",
            self.is_complete() && gap.approx_eq(S::zero()),
            format!(
                "sum p^f {} + sum q^f {} - sum q^i {} = {gap}{}",
                self.sum_final_prices(),
                self.sum_final_margins(),
                self.sum_initial_margins(),
                if self.is_complete() { "" } else { " (unresolved buyers)" }
            ),
        ));

        let split = self.matches.iter().find(|&&(s, b, v)| {
            let p = self.final_price[&s];
            let q = self.final_margin[&b];
            !v.approx_eq(p + q)
        });
        out.push(AuditRecord::check(
            "ledger-match-split",
            split.is_none(),
            split.map_or_else(String::new, |&(s, b, v)| {
                format!("pair ({},{}) value {v} != p^f + q^f", s.0, b.0)
            }),
        ));

        let matched_sellers: BTreeSet<SellerId> = self.matches.iter().map(|m| m.0).collect();
        let matched_buyers: BTreeSet<BuyerId> = self.matches.iter().map(|m| m.1).collect();
        let stray_seller = self
            .final_price
            .iter()
            .find(|(s, p)| !matched_sellers.contains(s) && !p.approx_eq(S::zero()));
        let stray_buyer = self
            .final_margin
            .iter()
            .find(|(b, q)| !matched_buyers.contains(b) && !q.approx_eq(S::zero()));
        let detail = match (stray_seller, stray_buyer) {
            (Some((s, p)), _) => format!("unmatched seller {} left with price {p}", s.0),
            (None, Some((b, q))) => format!("unmatched buyer {} left with margin {q}", b.0),
            (None, None) => String::new(),
        };
        out.push(AuditRecord::check(
            "ledger-unmatched-zero",
            stray_seller.is_none() && stray_buyer.is_none(),
            detail,
        ));
        out
    }
}
