use crate::error::{domain, Error, Result};

/// Fractional ranks (1-based); ties share the average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        let r = 0.5 * ((i + 1) + j) as f64;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation. A constant sequence has no ranks to correlate and
/// is reported as [`Error::Undefined`].
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(domain(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(domain(format!("need >= 3 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(domain("NaN in correlation input"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::Undefined("constant input has no rank correlation".into()))
}

/// Ordinary least squares over the points with P >= P_max - tail (P_max - P_min).
/// Returns (slope, intercept).
pub fn asymptotic_linear_fit(powers: &[f64], values: &[f64], tail: f64) -> Result<(f64, f64)> {
    if powers.len() != values.len() {
        return Err(domain("powers and values differ in length"));
    }
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(domain(format!("tail fraction must be in (0, 1], got {tail}")));
    }
    if powers.is_empty() {
        return Err(domain("no data"));
    }
    let lo = powers.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = powers.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cut = hi - tail * (hi - lo);
    let pts: Vec<(f64, f64)> = powers.iter().zip(values).filter(|(p, _)| **p >= cut).map(|(p, v)| (*p, *v)).collect();
    if pts.len() < 3 {
        return Err(domain(format!("only {} points in the tail, need >= 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(domain("tail powers are all equal"));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_sequences() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(spearman(&x, &[2.0, 4.0, 8.0, 9.0, 20.0]).unwrap(), 1.0);
        assert_eq!(spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn hand_computed_value() {
        let rho = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((rho - (1.0 - 6.0 * 2.0 / (4.0 * 15.0))).abs() < 1e-15);
        assert!((rho - 0.8).abs() < 1e-15);
    }

    #[test]
    fn ties_get_average_rank() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn constant_and_short_inputs() {
        assert!(matches!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::Undefined(_))));
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn linear_tail() {
        let p: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let v: Vec<f64> = p.iter().map(|x| 3.0 * x - 1.0).collect();
        let (s, b) = asymptotic_linear_fit(&p, &v, 1.0).unwrap();
        assert!((s - 3.0).abs() < 1e-13 && (b + 1.0).abs() < 1e-12);
        // plateau below 8 then slope 2
        let w: Vec<f64> = p.iter().map(|&x| if x < 8.0 { 10.0 } else { 10.0 + 2.0 * (x - 8.0) }).collect();
        let (s, _) = asymptotic_linear_fit(&p, &w, 0.5).unwrap();
        assert!((s / 2.0 - 1.0).abs() < 0.02);
        assert!(asymptotic_linear_fit(&p, &w, 0.05).is_err());
        assert!(asymptotic_linear_fit(&p, &w, 0.0).is_err());
    }
}
