use std::cmp::Ordering;

use super::{check_input, pick_best, subsets_of_size, Deadline, LearnError, LearnOutput, LearnStats, LearnerConfig, SCORE_EPSILON};
use crate::graph::{dag_to_cpdag, Dag};
use crate::score::{g2_test, BdeuScorer, CiTestError};
use crate::synth::Dataset;

/// Strength of a conditional dependence: `-ln p`, then the G² statistic to
/// separate p-values that underflow to zero. Independence is `ZERO`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Assoc(f64, f64);

impl Assoc {
    const ZERO: Assoc = Assoc(0.0, 0.0);

    fn is_zero(self) -> bool {
        self == Assoc::ZERO
    }

    fn cmp(self, other: Assoc) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.total_cmp(&other.1))
    }
}

struct Tester<'a> {
    data: &'a Dataset,
    significance: f64,
    stats: LearnStats,
    deadline: Deadline,
}

impl Tester<'_> {
    fn assoc(&mut self, x: usize, t: usize, z: &[usize]) -> Result<Assoc, LearnError> {
        self.deadline.check()?;
        self.stats.ci_tests += 1;
        match g2_test(self.data, x, t, z, self.significance) {
            Ok(r) if !r.independent => Ok(Assoc(-r.p_value.max(f64::MIN_POSITIVE).ln(), r.statistic)),
            Ok(_) => Ok(Assoc::ZERO),
            Err(CiTestError::InsufficientData { .. }) => {
                self.stats.insufficient_data += 1;
                Ok(Assoc::ZERO)
            }
        }
    }

    /// Minimum association of `x` with `t` over subsets of `cpc` that contain
    /// `must` (or over all subsets when `must` is `None`), stopping at zero.
    fn min_assoc(
        &mut self,
        x: usize,
        t: usize,
        cpc: &[usize],
        must: Option<usize>,
        cap: usize,
        mut current: Assoc,
    ) -> Result<Assoc, LearnError> {
        let pool: Vec<usize> = cpc.iter().copied().filter(|&v| Some(v) != must).collect();
        let extra = usize::from(must.is_some());
        for k in 0..=cap.saturating_sub(extra).min(pool.len()) {
            for mut s in subsets_of_size(&pool, k) {
                if let Some(m) = must {
                    s.push(m);
                    s.sort_unstable();
                }
                let a = self.assoc(x, t, &s)?;
                if a.cmp(current) == Ordering::Less {
                    current = a;
                }
                if current.is_zero() {
                    return Ok(current);
                }
            }
        }
        Ok(current)
    }

    /// Max-min parents and children of `t`.
    fn mmpc(&mut self, t: usize, cap: usize) -> Result<Vec<usize>, LearnError> {
        let n = self.data.num_variables();
        let mut cpc: Vec<usize> = Vec::new();
        let mut open: Vec<(usize, Assoc)> = Vec::new();
        for x in (0..n).filter(|&x| x != t) {
            let a = self.assoc(x, t, &[])?;
            if !a.is_zero() {
                open.push((x, a));
            }
        }
        // forward: admit the candidate whose minimum association is largest
        while !open.is_empty() {
            let (pos, _) = open
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .expect("open is nonempty");
            let (chosen, _) = open.remove(pos);
            cpc.push(chosen);
            let mut still_open = Vec::with_capacity(open.len());
            for (x, a) in open {
                let a = self.min_assoc(x, t, &cpc, Some(chosen), cap, a)?;
                if !a.is_zero() {
                    still_open.push((x, a));
                }
            }
            open = still_open;
        }
        // backward: drop members made independent by the rest of the set
        let mut i = 0;
        while i < cpc.len() {
            let x = cpc[i];
            let rest: Vec<usize> = cpc.iter().copied().filter(|&v| v != x).collect();
            if self.min_assoc(x, t, &rest, None, cap, Assoc(f64::INFINITY, f64::INFINITY))?.is_zero() {
                cpc.remove(i);
            } else {
                i += 1;
            }
        }
        cpc.sort_unstable();
        Ok(cpc)
    }
}

/// Max-Min Hill-Climbing: MMPC skeleton discovery (kept symmetric by
/// requiring both endpoints to list each other) followed by greedy BDeu
/// hill-climbing from the empty graph over add, delete and reverse moves.
pub fn learn_mmhc(data: &Dataset, config: &LearnerConfig) -> Result<LearnOutput, LearnError> {
    check_input(data, config)?;
    let n = data.num_variables();
    let deadline = Deadline::new(config.time_budget_seconds);
    let mut tester = Tester { data, significance: config.significance, stats: LearnStats::default(), deadline };
    let mut pc = Vec::with_capacity(n);
    for t in 0..n {
        pc.push(tester.mmpc(t, config.max_conditioning_size)?);
    }
    let allowed: Vec<Vec<bool>> =
        (0..n).map(|x| (0..n).map(|y| pc[x].contains(&y) && pc[y].contains(&x)).collect()).collect();

    let scorer = BdeuScorer::new(data, config.score);
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    loop {
        deadline.check()?;
        let reach = reachability(&parents);
        let mut moves: Vec<(f64, Move)> = Vec::new();
        for y in 0..n {
            let base = scorer.local(y, &parents[y]);
            for x in 0..n {
                if x == y || !allowed[x][y] {
                    continue;
                }
                if parents[y].contains(&x) {
                    let without: Vec<usize> = parents[y].iter().copied().filter(|&p| p != x).collect();
                    let delete = scorer.local(y, &without) - base;
                    if delete > SCORE_EPSILON {
                        moves.push((delete, Move::Delete(x, y)));
                    }
                    if parents[x].len() < config.max_parents {
                        let mut grown = parents[x].clone();
                        grown.push(y);
                        let reverse = delete + scorer.local(x, &grown) - scorer.local(x, &parents[x]);
                        if reverse > SCORE_EPSILON {
                            moves.push((reverse, Move::Reverse(x, y)));
                        }
                    }
                } else if !parents[x].contains(&y) && parents[y].len() < config.max_parents && !reach[y][x] {
                    let mut grown = parents[y].clone();
                    grown.push(x);
                    let add = scorer.local(y, &grown) - base;
                    if add > SCORE_EPSILON {
                        moves.push((add, Move::Add(x, y)));
                    }
                }
            }
        }
        let valid = |(_, m): &(f64, Move)| match *m {
            Move::Reverse(x, y) => !reaches_avoiding_edge(&parents, x, y),
            _ => true,
        };
        let Some((_, chosen)) = pick_best(moves, |m| m.0, |m| m.1, valid) else {
            break;
        };
        match chosen {
            Move::Add(x, y) => parents[y].push(x),
            Move::Delete(x, y) => parents[y].retain(|&p| p != x),
            Move::Reverse(x, y) => {
                parents[y].retain(|&p| p != x);
                parents[x].push(y);
            }
        }
        for p in &mut parents {
            p.sort_unstable();
        }
    }

    let edges = (0..n).flat_map(|y| parents[y].iter().map(move |&x| (x, y))).collect::<Vec<_>>();
    let dag = Dag::with_names(data.variable_names().to_vec(), edges).expect("hill-climbing keeps the graph acyclic");
    let mut stats = tester.stats;
    stats.score_evaluations = scorer.evaluations();
    Ok(LearnOutput { cpdag: dag_to_cpdag(&dag), stats })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Move {
    Add(usize, usize),
    Delete(usize, usize),
    Reverse(usize, usize),
}

/// `reach[u][v]`: a directed path leads from `u` to `v` (`u != v`).
fn reachability(parents: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let n = parents.len();
    let mut children = vec![Vec::new(); n];
    for (v, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(v);
        }
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = children[s].clone();
            while let Some(u) = stack.pop() {
                if !seen[u] {
                    seen[u] = true;
                    stack.extend(&children[u]);
                }
            }
            seen
        })
        .collect()
}

/// Whether `x` reaches `y` other than through the edge `x -> y` itself,
/// which is exactly when reversing that edge would close a cycle.
fn reaches_avoiding_edge(parents: &[Vec<usize>], x: usize, y: usize) -> bool {
    let n = parents.len();
    let mut seen = vec![false; n];
    let mut stack = vec![y];
    // walk backwards from y along parent links
    while let Some(u) = stack.pop() {
        for &p in &parents[u] {
            if u == y && p == x {
                continue;
            }
            if p == x {
                return true;
            }
            if !seen[p] {
                seen[p] = true;
                stack.push(p);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversal_cycle_check() {
        // 0 -> 1 -> 2 and 0 -> 2: reversing 0 -> 2 would close 2 -> 0 -> 1 -> 2
        let parents = vec![vec![], vec![0], vec![0, 1]];
        assert!(reaches_avoiding_edge(&parents, 0, 2));
        assert!(!reaches_avoiding_edge(&parents, 1, 2));
        let reach = reachability(&parents);
        assert!(reach[0][2] && reach[1][2] && !reach[2][0]);
    }
}
