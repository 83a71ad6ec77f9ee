//! Random DAG generators calibrated to a total edge count.
//!
//! Preferential attachment and forest fire grow the graph one node at a time
//! and orient every edge from the new node to an older one, so acyclicity
//! holds by construction. The IC-DAG generator walks a Markov chain over
//! weakly connected DAGs. Node labels are shuffled afterwards so that the
//! index order carries no information about edge directions.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use super::config::{edge_band, EdgeBand, StructureType};
use super::SynthError;
use crate::graph::Dag;

/// Calibration attempts (forest fire) or chain rounds (IC-DAG) before giving up.
const MAX_ATTEMPTS: usize = 50;
/// Backward burning probability as a fraction of the forward probability.
const BACKWARD_BURN_RATIO: f64 = 0.5;

/// Draws a DAG whose edge count lies within ±15% of `complexity * num_variables`.
pub fn gen_dag<R: Rng + ?Sized>(
    structure_type: StructureType,
    num_variables: usize,
    complexity: u32,
    rng: &mut R,
) -> Result<Dag, SynthError> {
    if num_variables < 2 {
        return Err(SynthError::InvalidConfig("num_variables must be at least 2".into()));
    }
    if complexity == 0 {
        return Err(SynthError::InvalidConfig("complexity must be positive".into()));
    }
    let band = edge_band(num_variables, complexity);
    let failed = || SynthError::CalibrationFailed {
        structure_type,
        num_variables,
        complexity,
        band,
        attempts: MAX_ATTEMPTS,
    };
    let edges = match structure_type {
        StructureType::PreferentialAttachment => {
            preferential_attachment(num_variables, complexity as usize, band.target, rng)
        }
        StructureType::ForestFire => forest_fire_calibrated(num_variables, band, rng).ok_or_else(failed)?,
        StructureType::IcDag => ic_dag(num_variables, band, rng).ok_or_else(failed)?,
    };
    debug_assert!(band.contains(edges.len()));
    let mut label: Vec<usize> = (0..num_variables).collect();
    label.shuffle(rng);
    let edges = edges.into_iter().map(|(u, v)| (label[u], label[v]));
    Ok(Dag::new(num_variables, edges).expect("generators emit acyclic edge sets"))
}

/// Node `t` links to `quota[t]` older nodes drawn with probability proportional to
/// `degree + 1`. Quotas start at `min(t, m)`; the shortfall of the first `m` nodes
/// is handed out one edge at a time to random nodes that still have room.
fn preferential_attachment<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    target: usize,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    let mut quota: Vec<usize> = (0..n).map(|t| t.min(m)).collect();
    let mut total: usize = quota.iter().sum();
    while total < target {
        let open: Vec<usize> = (0..n).filter(|&t| quota[t] < t).collect();
        let t = open[rng.random_range(0..open.len())];
        quota[t] += 1;
        total += 1;
    }
    let mut degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(total);
    for t in 1..n {
        let mut chosen = vec![false; t];
        for _ in 0..quota[t] {
            let weight_sum: usize = (0..t).filter(|&s| !chosen[s]).map(|s| degree[s] + 1).sum();
            let mut draw = rng.random_range(0..weight_sum);
            let pick = (0..t)
                .filter(|&s| !chosen[s])
                .find(|&s| {
                    let w = degree[s] + 1;
                    if draw < w {
                        true
                    } else {
                        draw -= w;
                        false
                    }
                })
                .expect("draw falls inside the weight sum");
            chosen[pick] = true;
        }
        for s in (0..t).filter(|&s| chosen[s]) {
            degree[s] += 1;
            degree[t] += 1;
            edges.push((t, s));
        }
    }
    edges
}

/// Bisects the forward burning probability until one draw lands in the band.
fn forest_fire_calibrated<R: Rng + ?Sized>(
    n: usize,
    band: EdgeBand,
    rng: &mut R,
) -> Option<Vec<(usize, usize)>> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..MAX_ATTEMPTS {
        let p = 0.5 * (lo + hi);
        let edges = forest_fire(n, p, rng);
        if band.contains(edges.len()) {
            return Some(edges);
        }
        if edges.len() < band.min {
            lo = p;
        } else {
            hi = p;
        }
    }
    None
}

fn geometric_count<R: Rng + ?Sized>(p: f64, rng: &mut R) -> usize {
    let mut k = 0;
    while rng.random::<f64>() < p {
        k += 1;
    }
    k
}

fn pick_unvisited<R: Rng + ?Sized>(
    pool: &[usize],
    visited: &[bool],
    count: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut open: Vec<usize> = pool.iter().copied().filter(|&u| !visited[u]).collect();
    let k = count.min(open.len());
    // partial Fisher-Yates
    for i in 0..k {
        let j = rng.random_range(i..open.len());
        open.swap(i, j);
    }
    open.truncate(k);
    open
}

/// Ambassador-based burning: a new node links to a random ambassador, then
/// spreads through geometric numbers of its out-links (probability `p`) and
/// in-links (probability `p * BACKWARD_BURN_RATIO`), linking to every burned node.
fn forest_fire<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut out_links: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut in_links: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for v in 1..n {
        let mut visited = vec![false; v];
        let ambassador = rng.random_range(0..v);
        visited[ambassador] = true;
        let mut burned = vec![ambassador];
        let mut queue = VecDeque::from([ambassador]);
        while let Some(w) = queue.pop_front() {
            let forward = geometric_count(p, rng);
            let backward = geometric_count(p * BACKWARD_BURN_RATIO, rng);
            let mut next = pick_unvisited(&out_links[w], &visited, forward, rng);
            for u in &next {
                visited[*u] = true;
            }
            let back = pick_unvisited(&in_links[w], &visited, backward, rng);
            for u in &back {
                visited[*u] = true;
            }
            next.extend(back);
            burned.extend(next.iter().copied());
            queue.extend(next);
        }
        burned.sort_unstable();
        for u in burned {
            out_links[v].push(u);
            in_links[u].push(v);
            edges.push((v, u));
        }
    }
    edges
}

/// Markov chain over weakly connected DAGs started from the path `0 -> 1 -> ... -> n-1`.
///
/// Each move draws an ordered pair `(i, j)`: an existing arc `i -> j` is removed
/// when the graph stays connected, otherwise the arc is added when it keeps the
/// graph acyclic. Moves that would take the edge count out of the band in the
/// direction away from it are rejected. One round is `10 n^2` moves.
fn ic_dag<R: Rng + ?Sized>(n: usize, band: EdgeBand, rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut adj = vec![false; n * n];
    let mut count = 0usize;
    for v in 1..n {
        adj[(v - 1) * n + v] = true;
        count += 1;
    }
    let moves = 10 * n * n;
    for _ in 0..MAX_ATTEMPTS {
        for _ in 0..moves {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            if adj[i * n + j] {
                if count > band.min && stays_connected_without(&adj, n, i, j) {
                    adj[i * n + j] = false;
                    count -= 1;
                }
            } else if !adj[j * n + i] && count < band.max && !reaches(&adj, n, j, i) {
                adj[i * n + j] = true;
                count += 1;
            }
        }
        if band.contains(count) {
            let mut edges = Vec::with_capacity(count);
            for i in 0..n {
                for j in 0..n {
                    if adj[i * n + j] {
                        edges.push((i, j));
                    }
                }
            }
            return Some(edges);
        }
    }
    None
}

/// Directed reachability `from ~> to`.
fn reaches(adj: &[bool], n: usize, from: usize, to: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        for v in 0..n {
            if adj[u * n + v] && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    false
}

/// Whether `i` and `j` stay weakly connected once the arc `i -> j` is dropped.
fn stays_connected_without(adj: &[bool], n: usize, i: usize, j: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![i];
    seen[i] = true;
    while let Some(u) = stack.pop() {
        if u == j {
            return true;
        }
        for v in 0..n {
            let skip = (u == i && v == j) || (u == j && v == i);
            if !skip && !seen[v] && (adj[u * n + v] || adj[v * n + u]) {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    false
}
