use std::collections::{BTreeMap, BTreeSet};

use super::{check_input, complete, subsets_of_size, Deadline, LearnError, LearnOutput, LearnStats, LearnerConfig};
use crate::graph::{apply_meek_rules, Cpdag};
use crate::score::{g2_test, CiTestError};
use crate::synth::Dataset;

/// PC with order-independent ("stable") adjacency search and G² tests.
///
/// Tests lacking data are counted as independence. Colliders are oriented
/// from the recorded separating sets; an edge that two colliders would orient
/// in opposite directions stays undirected. Meek's rules then run to
/// fixpoint and the result is completed to a CPDAG.
pub fn learn_pc(data: &Dataset, config: &LearnerConfig) -> Result<LearnOutput, LearnError> {
    check_input(data, config)?;
    let deadline = Deadline::new(config.time_budget_seconds);
    let n = data.num_variables();
    let mut stats = LearnStats::default();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|x| (0..n).filter(|&y| y != x).collect()).collect();
    let mut sepsets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    for level in 0..=config.max_conditioning_size {
        let frozen: Vec<Vec<usize>> = adj.iter().map(|a| a.iter().copied().collect()).collect();
        if frozen.iter().all(|a| a.len() <= level) {
            break;
        }
        for x in 0..n {
            for &y in &frozen[x] {
                if !adj[x].contains(&y) {
                    continue;
                }
                let others: Vec<usize> = frozen[x].iter().copied().filter(|&v| v != y).collect();
                for s in subsets_of_size(&others, level) {
                    deadline.check()?;
                    stats.ci_tests += 1;
                    let independent = match g2_test(data, x, y, &s, config.significance) {
                        Ok(r) => r.independent,
                        Err(CiTestError::InsufficientData { .. }) => {
                            stats.insufficient_data += 1;
                            true
                        }
                    };
                    if independent {
                        adj[x].remove(&y);
                        adj[y].remove(&x);
                        sepsets.insert((x.min(y), x.max(y)), s);
                        break;
                    }
                }
            }
        }
    }

    let undirected = (0..n).flat_map(|x| adj[x].iter().filter(move |&&y| x < y).map(move |&y| (x, y)));
    let mut g = Cpdag::with_names(data.variable_names().to_vec(), [], undirected.collect::<Vec<_>>())
        .expect("adjacency sets are symmetric and loop-free");

    let mut proposals: BTreeSet<(usize, usize)> = BTreeSet::new();
    for z in 0..n {
        let nbrs: Vec<usize> = adj[z].iter().copied().collect();
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[i + 1..] {
                if adj[x].contains(&y) {
                    continue;
                }
                let sep = sepsets.get(&(x.min(y), x.max(y)));
                if sep.is_some_and(|s| !s.contains(&z)) {
                    proposals.insert((x, z));
                    proposals.insert((y, z));
                }
            }
        }
    }
    for &(u, v) in &proposals {
        if !proposals.contains(&(v, u)) {
            g.orient(u, v);
        }
    }
    apply_meek_rules(&mut g);
    Ok(LearnOutput { cpdag: complete(&g), stats })
}
