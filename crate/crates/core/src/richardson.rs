//! Polynomial (Richardson) extrapolation of sampled limits to `h -> 0`.

use crate::quad::QuadValue;

/// Extrapolated limit and an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Extrapolated<V> {
    pub value: V,
    /// Difference between the two highest-order extrapolants.
    pub error: f64,
    /// Largest sample magnitude; sets the round-off floor of the estimate.
    pub sample_scale: f64,
}

/// Neville extrapolation of `(h_k, v_k)` pairs to `h = 0`.
///
/// The samples are assumed to follow `v(h) = v0 + c1 h + c2 h^2 + ...`.
pub fn extrapolate<V: QuadValue>(h: &[f64], v: &[V]) -> Extrapolated<V> {
    assert_eq!(h.len(), v.len());
    assert!(h.len() >= 2, "need at least two samples");
    let n = h.len();
    let sample_scale = v.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
    // table[i] holds the order-k extrapolant built from samples i..=i+k.
    let mut table: Vec<V> = v.to_vec();
    let mut prev_best = table[n - 1];
    let mut best = table[n - 1];
    for k in 1..n {
        for i in 0..n - k {
            let hi = h[i];
            let hk = h[i + k];
            table[i] = table[i + 1] + (table[i + 1] - table[i]) * (hk / (hi - hk));
        }
        prev_best = best;
        best = table[0];
    }
    Extrapolated {
        value: best,
        error: (best - prev_best).magnitude(),
        sample_scale,
    }
}

/// Geometric sequence `start, start/ratio, ...` of `len` terms.
pub fn geometric(start: f64, ratio: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| start / ratio.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_is_extrapolated_exactly() {
        let h = geometric(0.1, 2.0, 4);
        let v: Vec<f64> = h
            .iter()
            .map(|&x| 3.0 + 2.0 * x - x * x + 5.0 * x * x * x)
            .collect();
        let e = extrapolate(&h, &v);
        assert!((e.value - 3.0).abs() < 1e-13);
    }

    #[test]
    fn divergent_samples_give_large_error() {
        let h = geometric(0.1, 2.0, 4);
        let v: Vec<f64> = h.iter().map(|&x| 1.0 / x).collect();
        let e = extrapolate(&h, &v);
        assert!(e.error > 1e-2 * e.value.abs());
    }
}
