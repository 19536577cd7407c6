use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Extraction {
    /// Selected indices `j₁ < j₂ < …` into the input.
    pub indices: Vec<usize>,
    /// The selected values are strictly decreasing from this position of
    /// `indices` onward.
    pub discarded_prefix: usize,
    /// Estimated limit of `a_j · m_j` (mean over the last `window` entries).
    pub c_estimate: f64,
    /// Some window ran past the end of the data, so its maxima cover fewer
    /// than `window + 1` terms.
    pub truncated: bool,
}

/// Extracts a subsequence with strictly decreasing `a` and slowly growing
/// `m`. Suprema over infinite tails are replaced by maxima over
/// `[j_i, j_i + window]`; `ϑ_i = √η_i` and `j_{i+1}` is the first index with
/// `m ≥ (1 + ϑ_i)·m_{j_i}`.
pub fn extract_decreasing(m_values: &[u64], a_values: &[f64], window: usize) -> Result<Extraction> {
    let len = m_values.len();
    ensure!(
        len == a_values.len(),
        Parameter,
        "m and a have different lengths"
    );
    ensure!(len >= 2, Parameter, "need at least two terms");
    ensure!(window >= 1, Parameter, "window must be positive");
    ensure!(
        m_values.windows(2).all(|w| w[0] < w[1]),
        Parameter,
        "m values must be strictly ascending"
    );
    ensure!(m_values[0] > 0, Parameter, "m values must be positive");
    ensure!(
        a_values.iter().all(|&a| a > 0.0 && a.is_finite()),
        Parameter,
        "a values must be positive"
    );

    let tail = window.min(len);
    let c_estimate = (len - tail..len)
        .map(|j| a_values[j] * m_values[j] as f64)
        .sum::<f64>()
        / tail as f64;
    let eps = |j: usize| (a_values[j] * m_values[j] as f64 - c_estimate).abs();
    let growth = |j: usize| m_values[j + 1] as f64 / m_values[j] as f64 - 1.0;

    let mut indices = vec![0usize];
    let mut truncated = false;
    loop {
        let i = indices.len();
        let ji = *indices.last().unwrap();
        let end = (ji + window).min(len - 1);
        truncated |= ji + window > len - 1;
        let sup_eps = (ji..=end).map(eps).fold(0.0, f64::max);
        let sup_growth = (ji..end).map(growth).fold(0.0, f64::max);
        let eta = sup_eps.max(sup_growth).max(1.0 / (i * i) as f64);
        let target = (1.0 + eta.sqrt()) * m_values[ji] as f64;
        match (ji + 1..len).find(|&j| m_values[j] as f64 >= target) {
            Some(next) => indices.push(next),
            None => break,
        }
    }

    let mut discarded_prefix = indices.len() - 1;
    while discarded_prefix > 0
        && a_values[indices[discarded_prefix - 1]] > a_values[indices[discarded_prefix]]
    {
        discarded_prefix -= 1;
    }
    Ok(Extraction {
        indices,
        discarded_prefix,
        c_estimate,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strictly_decreasing(e: &Extraction, a: &[f64]) -> bool {
        e.indices[e.discarded_prefix..]
            .windows(2)
            .all(|w| a[w[0]] > a[w[1]])
    }

    #[test]
    fn harmonic_sequence() {
        let m: Vec<u64> = (10..=200).collect();
        let a: Vec<f64> = m.iter().map(|&x| 1.0 / x as f64).collect();
        let e = extract_decreasing(&m, &a, 64).unwrap();
        assert_eq!(e.discarded_prefix, 0);
        assert!(strictly_decreasing(&e, &a));
        assert!(e.indices.len() >= 4 && e.truncated);
        assert!((e.c_estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillating_sequence() {
        let m: Vec<u64> = (10..=200).collect();
        let a: Vec<f64> = m
            .iter()
            .enumerate()
            .map(|(j, &x)| (1.0 + if j % 2 == 0 { 0.01 } else { -0.01 }) / x as f64)
            .collect();
        let e = extract_decreasing(&m, &a, 64).unwrap();
        assert!(strictly_decreasing(&e, &a));
        assert!(e.indices.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn guards() {
        assert!(extract_decreasing(&[5, 5], &[1.0, 1.0], 4).is_err());
        assert!(extract_decreasing(&[5, 6], &[1.0], 4).is_err());
        assert!(extract_decreasing(&[5, 6], &[1.0, -1.0], 4).is_err());
    }
}
