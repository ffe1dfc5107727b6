//! Static maximum-weight matching solvers used as offline references.

use std::collections::HashMap;

use crate::Scalar;

/// Exact maximum-weight matching of a general graph on vertices
/// `0..n` by memoized search over used-vertex subsets. Practical up to a
/// few dozen vertices on sparse graphs; `n` must be at most 64.
pub fn max_weight_matching_exhaustive<S: Scalar>(
    n: usize,
    edges: &[(usize, usize, S)],
) -> (S, Vec<(usize, usize)>) {
    assert!(n <= 64, "exhaustive matching supports at most 64 vertices");
    let mut adjacency: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
    for &(a, b, v) in edges {
        if a == b || v <= S::zero() {
            continue;
        }
        adjacency[a].push((b, v));
        adjacency[b].push((a, v));
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut search = Exhaustive {
        adjacency: &adjacency,
        full,
        memo: HashMap::new(),
    };
    let value = search.best(0);

    let mut pairs = Vec::new();
    let mut used = 0u64;
    while used != full {
        let (_, choice) = search.memo[&used];
        let i = (!used).trailing_zeros() as usize;
        used |= 1 << i;
        if let Some(j) = choice {
            used |= 1 << j;
            pairs.push((i.min(j), i.max(j)));
        }
    }
    (value, pairs)
}

struct Exhaustive<'a, S> {
    adjacency: &'a [Vec<(usize, S)>],
    full: u64,
    memo: HashMap<u64, (S, Option<usize>)>,
}

impl<S: Scalar> Exhaustive<'_, S> {
    fn best(&mut self, used: u64) -> S {
        if used == self.full {
            return S::zero();
        }
        if let Some(&(v, _)) = self.memo.get(&used) {
            return v;
        }
        let i = (!used).trailing_zeros() as usize;
        let with_i = used | (1 << i);
        let mut best = self.best(with_i);
        let mut choice = None;
        for &(j, v) in &self.adjacency[i] {
            if used & (1 << j) != 0 {
                continue;
            }
            let candidate = v + self.best(with_i | (1 << j));
            if candidate > best {
                best = candidate;
                choice = Some(j);
            }
        }
        self.memo.insert(used, (best, choice));
        best
    }
}

/// Exact maximum-weight bipartite matching (not necessarily perfect) by the
/// Hungarian method on the square completion of the weight matrix. Edges
/// are `(left, right, value)` with `left < n_left`, `right < n_right`.
pub fn max_weight_bipartite<S: Scalar>(
    n_left: usize,
    n_right: usize,
    edges: &[(usize, usize, S)],
) -> (S, Vec<(usize, usize)>) {
    let n = n_left.max(n_right);
    if n == 0 {
        return (S::zero(), Vec::new());
    }
    let mut weight = vec![vec![S::zero(); n]; n];
    let mut is_edge = vec![vec![false; n]; n];
    for &(a, b, v) in edges {
        if v > weight[a][b] || !is_edge[a][b] {
            weight[a][b] = weight[a][b].max_of(v);
            is_edge[a][b] = true;
        }
    }

    // Minimize cost = -weight. Rows/columns 1-based; p[j] is the row
    // assigned to column j.
    let cost = |i: usize, j: usize| S::zero() - weight[i - 1][j - 1];
    let mut u = vec![S::zero(); n + 1];
    let mut v = vec![S::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<S>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<S> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if minv[j].is_none_or(|m| cur < m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let m = minv[j].expect("set above");
                if delta.is_none_or(|d| m < d) {
                    delta = Some(m);
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else if let Some(m) = minv[j] {
                    minv[j] = Some(m - delta);
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut total = S::zero();
    let mut pairs = Vec::new();
    for (j, &i) in p.iter().enumerate().skip(1) {
        if i == 0 {
            continue;
        }
        let (a, b) = (i - 1, j - 1);
        if a < n_left && b < n_right && is_edge[a][b] && weight[a][b] > S::zero() {
            total = total + weight[a][b];
            pairs.push((a, b));
        }
    }
    pairs.sort_unstable();
    (total, pairs)
}

/// Greedy by descending value followed by pairwise-swap local search.
/// Not exact; used only where nothing exact is affordable.
pub fn max_weight_matching_heuristic<S: Scalar>(
    n: usize,
    edges: &[(usize, usize, S)],
) -> (S, Vec<(usize, usize)>) {
    let mut sorted: Vec<(usize, usize, S)> = edges
        .iter()
        .copied()
        .filter(|&(a, b, v)| a != b && v > S::zero())
        .collect();
    sorted.sort_by(|x, y| {
        y.2.partial_cmp(&x.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((x.0, x.1).cmp(&(y.0, y.1)))
    });
    let mut weight: HashMap<(usize, usize), S> = HashMap::new();
    for &(a, b, v) in &sorted {
        weight.insert((a.min(b), a.max(b)), v);
    }
    let w = |a: usize, b: usize| weight.get(&(a.min(b), a.max(b))).copied();

    let mut mate: Vec<Option<usize>> = vec![None; n];
    for &(a, b, _) in &sorted {
        if mate[a].is_none() && mate[b].is_none() {
            mate[a] = Some(b);
            mate[b] = Some(a);
        }
    }

    let gain_tol = S::tolerance();
    let mut improved = true;
    let mut passes = 0;
    while improved && passes < 50 {
        improved = false;
        passes += 1;
        // Single-edge moves: take edge (a,b), dropping the current pairs of a and b.
        for &(a, b, v) in &sorted {
            if mate[a] == Some(b) {
                continue;
            }
            let loss_a = mate[a].and_then(|m| w(a, m)).unwrap_or(S::zero());
            let loss_b = mate[b].and_then(|m| w(b, m)).unwrap_or(S::zero());
            if v > loss_a + loss_b + gain_tol {
                for x in [a, b] {
                    if let Some(m) = mate[x].take() {
                        mate[m] = None;
                    }
                }
                mate[a] = Some(b);
                mate[b] = Some(a);
                improved = true;
            }
        }
        // Two-pair swaps.
        let pairs: Vec<(usize, usize)> = (0..n)
            .filter_map(|a| mate[a].filter(|&b| a < b).map(|b| (a, b)))
            .collect();
        for x in 0..pairs.len() {
            for y in (x + 1)..pairs.len() {
                let (a, b) = pairs[x];
                let (c, d) = pairs[y];
                if mate[a] != Some(b) || mate[c] != Some(d) {
                    continue;
                }
                let current = w(a, b).unwrap_or(S::zero()) + w(c, d).unwrap_or(S::zero());
                for (p, q, r, s) in [(a, c, b, d), (a, d, b, c)] {
                    let alt = w(p, q).map(|x| x + w(r, s).unwrap_or(S::zero()));
                    let alt2 = w(r, s).map(|x| x + w(p, q).unwrap_or(S::zero()));
                    let best = match (alt, alt2) {
                        (Some(x), _) | (None, Some(x)) => x,
                        (None, None) => continue,
                    };
                    if best > current + gain_tol {
                        for z in [a, b, c, d] {
                            mate[z] = None;
                        }
                        if w(p, q).is_some() {
                            mate[p] = Some(q);
                            mate[q] = Some(p);
                        }
                        if w(r, s).is_some() {
                            mate[r] = Some(s);
                            mate[s] = Some(r);
                        }
                        improved = true;
                        break;
                    }
                }
            }
        }
    }

    let mut total = S::zero();
    let mut pairs = Vec::new();
    for (a, m) in mate.iter().enumerate().take(n) {
        if let Some(b) = *m {
            if a < b {
                total = total + w(a, b).expect("matched along an edge");
                pairs.push((a, b));
            }
        }
    }
    (total, pairs)
}
