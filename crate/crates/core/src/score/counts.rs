use crate::synth::Dataset;

/// Dense tables up to this many cells, or four per sample, use a flat array.
const DENSE_LIMIT: u128 = 1 << 12;

/// Counts `N_jk` of one observed parent configuration `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    /// Mixed-radix index of the configuration, first parent most significant.
    pub config: u128,
    /// `N_jk` for every child cell `k`.
    pub counts: Vec<u32>,
    /// `N_j`
    pub total: u32,
}

/// Sufficient statistics of a family: child cells against parent configurations.
///
/// Only configurations that occur in the data are stored, in ascending
/// configuration order. The "child" may combine several variables (mixed
/// radix, first variable most significant), as the G² test does for `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyCounts {
    child_cardinality: usize,
    parent_config_count: u128,
    rows: Vec<CountRow>,
}

impl ContingencyCounts {
    /// Counts for a single child variable given its parents.
    pub fn family(data: &Dataset, child: usize, parents: &[usize]) -> Self {
        Self::tabulate(data, &[child], parents)
    }

    /// Counts of the joint cells of `cell_vars` within each configuration of `parent_vars`.
    pub fn tabulate(data: &Dataset, cell_vars: &[usize], parent_vars: &[usize]) -> Self {
        let n = data.num_samples();
        let r: usize = cell_vars.iter().map(|&v| data.cardinality(v)).product();
        let q: u128 = parent_vars.iter().fold(1u128, |acc, &v| {
            acc.checked_mul(data.cardinality(v) as u128)
                .expect("parent configuration space exceeds 2^128")
        });
        let mut cells = vec![0usize; n];
        for &v in cell_vars {
            let card = data.cardinality(v);
            for (c, &code) in cells.iter_mut().zip(data.column(v)) {
                *c = *c * card + code as usize;
            }
        }
        let dense = q.checked_mul(r as u128).is_some_and(|size| size <= DENSE_LIMIT.max(4 * n as u128));
        let rows = if dense {
            let q = q as usize;
            let mut configs = vec![0usize; n];
            for &v in parent_vars {
                let card = data.cardinality(v);
                for (c, &code) in configs.iter_mut().zip(data.column(v)) {
                    *c = *c * card + code as usize;
                }
            }
            let mut table = vec![0u32; q * r];
            for (&j, &k) in configs.iter().zip(&cells) {
                table[j * r + k] += 1;
            }
            table
                .chunks(r.max(1))
                .enumerate()
                .filter_map(|(j, counts)| {
                    let total: u32 = counts.iter().sum();
                    (total > 0).then(|| CountRow { config: j as u128, counts: counts.to_vec(), total })
                })
                .collect()
        } else {
            let mut configs = vec![0u128; n];
            for &v in parent_vars {
                let card = data.cardinality(v) as u128;
                for (c, &code) in configs.iter_mut().zip(data.column(v)) {
                    *c = *c * card + code as u128;
                }
            }
            let mut keyed: Vec<(u128, usize)> = configs.into_iter().zip(cells).collect();
            keyed.sort_unstable();
            let mut rows: Vec<CountRow> = Vec::new();
            for (j, k) in keyed {
                match rows.last_mut() {
                    Some(row) if row.config == j => {
                        row.counts[k] += 1;
                        row.total += 1;
                    }
                    _ => {
                        let mut counts = vec![0u32; r];
                        counts[k] = 1;
                        rows.push(CountRow { config: j, counts, total: 1 });
                    }
                }
            }
            rows
        };
        ContingencyCounts { child_cardinality: r, parent_config_count: q, rows }
    }

    /// Builds counts directly from observed rows (ascending, distinct configs).
    pub fn from_rows(child_cardinality: usize, parent_config_count: u128, rows: Vec<CountRow>) -> Self {
        ContingencyCounts { child_cardinality, parent_config_count, rows }
    }

    pub fn child_cardinality(&self) -> usize {
        self.child_cardinality
    }

    /// `q`: all parent configurations, observed or not.
    pub fn parent_config_count(&self) -> u128 {
        self.parent_config_count
    }

    pub fn rows(&self) -> &[CountRow] {
        &self.rows
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.total as u64).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Dataset {
        Dataset::from_codes(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1, 1, 0, 1], vec![2, 0, 0, 2, 1], vec![1, 1, 0, 0, 1]],
            &[2, 3, 2],
        )
        .unwrap()
    }

    #[test]
    fn family_counts() {
        let c = ContingencyCounts::family(&data(), 2, &[0, 1]);
        assert_eq!(c.parent_config_count(), 6);
        assert_eq!(c.child_cardinality(), 2);
        assert_eq!(c.total(), 5);
        let summary: Vec<(u128, Vec<u32>)> = c.rows().iter().map(|r| (r.config, r.counts.clone())).collect();
        // configs: a*3 + b -> (0,2)=2 twice, (1,0)=3 twice, (1,1)=4 once
        assert_eq!(summary, vec![(2, vec![1, 1]), (3, vec![1, 1]), (4, vec![0, 1])]);
        for row in c.rows() {
            assert_eq!(row.total, row.counts.iter().sum::<u32>());
        }
    }

    #[test]
    fn empty_parent_set_is_one_row() {
        let c = ContingencyCounts::family(&data(), 1, &[]);
        assert_eq!(c.rows().len(), 1);
        assert_eq!(c.rows()[0].counts, vec![2, 1, 2]);
    }

    #[test]
    fn sparse_path_matches_dense_path() {
        // 10 variables with 4 levels: 4^9 parent configurations forces the sorted path
        let n = 200;
        let cols: Vec<Vec<u16>> =
            (0..10).map(|v| (0..n).map(|i| ((i * (v + 3) + v * v) % 4) as u16).collect()).collect();
        let d = Dataset::from_codes((0..10).map(|i| format!("v{i}")).collect(), cols, &[4; 10]).unwrap();
        let sparse = ContingencyCounts::family(&d, 0, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let dense = ContingencyCounts::family(&d, 0, &[1, 2]);
        assert_eq!(sparse.total(), n as u64);
        assert_eq!(dense.total(), n as u64);
        // brute-force recount of the sparse table
        for row in sparse.rows() {
            let mut expected = vec![0u32; 4];
            for i in 0..n {
                let cfg = (1..10).fold(0u128, |acc, v| acc * 4 + d.column(v)[i] as u128);
                if cfg == row.config {
                    expected[d.column(0)[i] as usize] += 1;
                }
            }
            assert_eq!(row.counts, expected);
        }
    }
}
