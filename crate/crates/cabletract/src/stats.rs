//! Small descriptive statistics shared by the samplers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Linear-interpolation percentile (Hyndman-Fan type 7) of unsorted data.
pub fn percentile(data: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = data.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    percentile_sorted(&v, q)
}

pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty slice");
    assert!((0.0..=100.0).contains(&q), "percentile out of range");
    let h = (sorted.len() - 1) as f64 * q / 100.0;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(data: &[f64]) -> f64 {
    percentile(data, 50.0)
}

pub fn mean(data: &[f64]) -> f64 {
    data.iter().sum::<f64>() / data.len() as f64
}

pub fn variance(data: &[f64]) -> f64 {
    let m = mean(data);
    data.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / data.len() as f64
}

/// Independent generator for sample `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_matches_hand_values() {
        let d = [15.0, 20.0, 35.0, 40.0, 50.0];
        assert_eq!(percentile(&d, 40.0), 29.0);
        assert_eq!(percentile(&d, 50.0), 35.0);
        assert_eq!(percentile(&d, 0.0), 15.0);
        assert_eq!(percentile(&d, 100.0), 50.0);
        assert_eq!(percentile(&[1.0, 2.0], 50.0), 1.5);
    }
}
