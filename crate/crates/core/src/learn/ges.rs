use std::collections::VecDeque;

use super::{check_input, complete, pick_best, Deadline, LearnError, LearnOutput, LearnStats, LearnerConfig, SCORE_EPSILON};
use crate::graph::Cpdag;
use crate::score::BdeuScorer;
use crate::synth::Dataset;

/// A scored GES operator: insert or delete the edge `x -> y` together with
/// the orientation set `T` (insert) or `H` (delete).
struct Candidate {
    delta: f64,
    x: usize,
    y: usize,
    set: Vec<usize>,
}

/// Greedy Equivalence Search over CPDAGs with the BDeu score.
///
/// The forward phase applies the best valid insertion until none improves
/// the score, the backward phase then does the same with deletions. A
/// target's parent set never grows beyond `max_parents`.
pub fn learn_ges(data: &Dataset, config: &LearnerConfig) -> Result<LearnOutput, LearnError> {
    check_input(data, config)?;
    let deadline = Deadline::new(config.time_budget_seconds);
    let scorer = BdeuScorer::new(data, config.score);
    let mut g = Cpdag::empty(data.variable_names().to_vec());

    loop {
        deadline.check()?;
        let candidates = insertions(&g, &scorer, config.max_parents, &deadline)?;
        let Some(best) = choose(candidates, |c| insert_is_valid(&g, c)) else { break };
        g = apply_insert(&g, &best);
    }

    loop {
        deadline.check()?;
        let Some(best) = choose(deletions(&g, &scorer), |_| true) else { break };
        g = apply_delete(&g, &best);
    }

    let stats = LearnStats { score_evaluations: scorer.evaluations(), ..LearnStats::default() };
    Ok(LearnOutput { cpdag: g, stats })
}

fn apply_insert(g: &Cpdag, c: &Candidate) -> Cpdag {
    let mut g = g.clone();
    g.add_directed(c.x, c.y);
    for &t in &c.set {
        g.orient(t, c.y);
    }
    complete(&g)
}

fn apply_delete(g: &Cpdag, c: &Candidate) -> Cpdag {
    let mut g = g.clone();
    g.remove_edge(c.x, c.y);
    for &h in &c.set {
        g.orient(c.y, h);
        if g.is_undirected(c.x, h) {
            g.orient(c.x, h);
        }
    }
    complete(&g)
}

/// Highest gain first; ties go to the lowest `(x, y, set)`.
fn choose(candidates: Vec<Candidate>, valid: impl FnMut(&Candidate) -> bool) -> Option<Candidate> {
    pick_best(candidates, |c| c.delta, |c| (c.x, c.y, c.set.clone()), valid)
}

fn sorted_union(parts: &[&[usize]]) -> Vec<usize> {
    let mut v: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn insertions(
    g: &Cpdag,
    scorer: &BdeuScorer,
    max_parents: usize,
    deadline: &Deadline,
) -> Result<Vec<Candidate>, LearnError> {
    let n = g.node_count();
    let mut out = Vec::new();
    for y in 0..n {
        deadline.check()?;
        let pa = g.parents(y);
        let ne = g.neighbors(y);
        for x in 0..n {
            if x == y || g.is_adjacent(x, y) {
                continue;
            }
            let (na, free): (Vec<usize>, Vec<usize>) = ne.iter().partition(|&&t| g.is_adjacent(t, x));
            if !g.is_clique(&na) || pa.len() + na.len() + 1 > max_parents {
                continue;
            }
            // grow T one node at a time, keeping NA ∪ T a clique
            let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
            while let Some((t, next)) = stack.pop() {
                let without = sorted_union(&[&pa, &na, &t]);
                let with = sorted_union(&[&without, &[x]]);
                let delta = scorer.local(y, &with) - scorer.local(y, &without);
                if delta > SCORE_EPSILON {
                    out.push(Candidate { delta, x, y, set: t.clone() });
                }
                if with.len() >= max_parents {
                    continue;
                }
                for j in (next..free.len()).rev() {
                    let c = free[j];
                    if na.iter().chain(&t).all(|&m| g.is_adjacent(m, c)) {
                        let mut grown = t.clone();
                        grown.push(c);
                        stack.push((grown, j + 1));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every semi-directed path from `y` to `x` must meet `NA ∪ T`.
fn insert_is_valid(g: &Cpdag, c: &Candidate) -> bool {
    let n = g.node_count();
    let mut blocked = vec![false; n];
    for v in g.neighbors(c.y).into_iter().filter(|&v| g.is_adjacent(v, c.x)).chain(c.set.iter().copied()) {
        blocked[v] = true;
    }
    let mut seen = vec![false; n];
    seen[c.y] = true;
    let mut queue = VecDeque::from([c.y]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if seen[v] || blocked[v] || !(g.is_directed(u, v) || g.is_undirected(u, v)) {
                continue;
            }
            if v == c.x {
                return false;
            }
            seen[v] = true;
            queue.push_back(v);
        }
    }
    true
}

fn deletions(g: &Cpdag, scorer: &BdeuScorer) -> Vec<Candidate> {
    let n = g.node_count();
    let mut out = Vec::new();
    for y in 0..n {
        let pa = g.parents(y);
        let ne = g.neighbors(y);
        for x in 0..n {
            if !(g.is_directed(x, y) || g.is_undirected(x, y)) {
                continue;
            }
            let na: Vec<usize> = ne.iter().copied().filter(|&h| h != x && g.is_adjacent(h, x)).collect();
            // enumerate the kept part K = NA \ H over cliques of NA
            let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
            while let Some((kept, next)) = stack.pop() {
                let mut without = sorted_union(&[&pa, &kept]);
                without.retain(|&v| v != x);
                let with = sorted_union(&[&without, &[x]]);
                let delta = scorer.local(y, &without) - scorer.local(y, &with);
                if delta > SCORE_EPSILON {
                    let h: Vec<usize> = na.iter().copied().filter(|v| !kept.contains(v)).collect();
                    out.push(Candidate { delta, x, y, set: h });
                }
                for j in (next..na.len()).rev() {
                    let c = na[j];
                    if kept.iter().all(|&m| g.is_adjacent(m, c)) {
                        let mut grown = kept.clone();
                        grown.push(c);
                        stack.push((grown, j + 1));
                    }
                }
            }
        }
    }
    out
}
