use rand::Rng;

const MEAN_TOLERANCE: f64 = 0.25;

/// Per-variable cardinalities drawn from `{avg-1, avg, avg+1}` (never below 2).
///
/// While the sample mean is more than 0.25 away from `avg_levels`, a random
/// entry on the offending side of the average is redrawn.
pub fn assign_levels<R: Rng + ?Sized>(num_variables: usize, avg_levels: u32, rng: &mut R) -> Vec<usize> {
    let avg = avg_levels.max(2) as usize;
    let draw = |rng: &mut R| (avg - 1 + rng.random_range(0..3usize)).max(2);
    let mut levels: Vec<usize> = (0..num_variables).map(|_| draw(rng)).collect();
    if num_variables == 0 {
        return levels;
    }
    loop {
        let mean = levels.iter().sum::<usize>() as f64 / num_variables as f64;
        let gap = mean - avg as f64;
        if gap.abs() <= MEAN_TOLERANCE {
            return levels;
        }
        let outliers: Vec<usize> = (0..num_variables)
            .filter(|&i| if gap > 0.0 { levels[i] > avg } else { levels[i] < avg })
            .collect();
        let i = outliers[rng.random_range(0..outliers.len())];
        levels[i] = draw(rng);
    }
}
