//! CPDAG completion (v-structures + Meek rules) and DAG extension (Dor–Tarsi).

use super::{v_structures, Cpdag, Dag, GraphError};

/// Completed PDAG of the Markov equivalence class of `dag`.
pub fn dag_to_cpdag(dag: &Dag) -> Cpdag {
    let mut g = Cpdag::skeleton_of(dag);
    for vs in v_structures(dag) {
        g.orient(vs.parents.0, vs.collider);
        g.orient(vs.parents.1, vs.collider);
    }
    apply_meek_rules(&mut g);
    g
}

/// Applies Meek's orientation rules 1-4 until no undirected edge changes.
pub fn apply_meek_rules(g: &mut Cpdag) {
    let n = g.node_count();
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if a != b && g.is_undirected(a, b) && meek_orients(g, a, b) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Whether any rule forces the undirected edge `a - b` into `a -> b`.
fn meek_orients(g: &Cpdag, a: usize, b: usize) -> bool {
    let n = g.node_count();
    // R1: c -> a - b, c and b non-adjacent
    if (0..n).any(|c| c != b && g.is_directed(c, a) && !g.is_adjacent(c, b)) {
        return true;
    }
    // R2: a -> c -> b
    if (0..n).any(|c| g.is_directed(a, c) && g.is_directed(c, b)) {
        return true;
    }
    // R3: a - c -> b, a - d -> b, c and d non-adjacent
    let kites: Vec<usize> =
        (0..n).filter(|&c| g.is_undirected(a, c) && g.is_directed(c, b)).collect();
    for (i, &c) in kites.iter().enumerate() {
        if kites[i + 1..].iter().any(|&d| !g.is_adjacent(c, d)) {
            return true;
        }
    }
    // R4: c -> d -> b with a adjacent to c and d, c and b non-adjacent
    for d in 0..n {
        if d == a || !g.is_directed(d, b) || !g.is_adjacent(a, d) {
            continue;
        }
        if (0..n).any(|c| {
            c != a && c != b && g.is_directed(c, d) && g.is_adjacent(a, c) && !g.is_adjacent(c, b)
        }) {
            return true;
        }
    }
    false
}

/// A DAG in the class represented by `cpdag`: same skeleton, same
/// v-structures, every directed edge kept.
///
/// Dor–Tarsi: repeatedly remove the lowest-index node that has no outgoing
/// directed edge and whose undirected neighbours are adjacent to all of its
/// other adjacent nodes, orienting its undirected edges towards it.
pub fn cpdag_to_dag(cpdag: &Cpdag) -> Result<Dag, GraphError> {
    extend(cpdag, true)
}

/// Like [`cpdag_to_dag`] but never fails: when no admissible sink exists the
/// lowest-index node without outgoing edges (or, failing that, the lowest
/// remaining node) is taken and all of its remaining edges point into it.
pub(crate) fn force_extension(cpdag: &Cpdag) -> Dag {
    extend(cpdag, false).expect("relaxed extension always succeeds")
}

fn extend(g: &Cpdag, strict: bool) -> Result<Dag, GraphError> {
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut edges = Vec::new();
    for _ in 0..n {
        let has_alive_child =
            |x: usize, alive: &[bool]| (0..n).any(|y| alive[y] && g.is_directed(x, y));
        let admissible = |x: usize, alive: &[bool]| {
            if has_alive_child(x, alive) {
                return false;
            }
            let adjacent: Vec<usize> =
                (0..n).filter(|&y| alive[y] && g.is_adjacent(x, y)).collect();
            adjacent.iter().filter(|&&y| g.is_undirected(x, y)).all(|&y| {
                adjacent.iter().all(|&z| z == y || g.is_adjacent(y, z))
            })
        };
        let pick = (0..n).find(|&x| alive[x] && admissible(x, &alive));
        let x = match pick {
            Some(x) => x,
            None if strict => return Err(GraphError::NoConsistentExtension),
            None => (0..n)
                .find(|&x| alive[x] && !has_alive_child(x, &alive))
                .or_else(|| (0..n).find(|&x| alive[x]))
                .expect("a node remains"),
        };
        for y in 0..n {
            if alive[y] && y != x && g.is_adjacent(x, y) {
                edges.push((y, x));
            }
        }
        alive[x] = false;
    }
    Dag::with_names(g.names().to_vec(), edges)
}
