//! Information measures over discrete distributions. All results in bits.

use ndarray::{ArrayView2, Axis};

use crate::error::{invalid, Error, Result};

/// Tolerance on the total mass of a joint distribution.
const JOINT_NORM_TOL: f64 = 1e-9;

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.log2()).sum::<f64>()
}

/// I(X;Y) of a joint distribution given as a matrix `p(x, y)`.
pub fn mutual_information(joint: ArrayView2<'_, f64>) -> Result<f64> {
    let mut total = 0.0;
    for &v in joint.iter() {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(invalid(format!("joint entry {v} is not a probability")));
        }
        total += v;
    }
    if (total - 1.0).abs() > JOINT_NORM_TOL {
        return Err(invalid(format!("joint sums to {total}, expected 1")));
    }
    let px = joint.sum_axis(Axis(1));
    let py = joint.sum_axis(Axis(0));
    let mut mi = 0.0;
    for ((i, j), &v) in joint.indexed_iter() {
        if v > 0.0 {
            mi += v * (v / (px[i] * py[j])).log2();
        }
    }
    Ok(mi.max(0.0))
}

/// D[p‖q] in bits. Fails explicitly when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    let mut d = 0.0;
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::InfiniteDivergence { index: i });
            }
            d += a * (a / b).log2();
        }
    }
    Ok(d.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn mi_examples() {
        let indep = array![[0.12, 0.28], [0.18, 0.42]];
        assert_abs_diff_eq!(mutual_information(indep.view()).unwrap(), 0.0, epsilon = 1e-15);
        let diag = array![[0.5, 0.0], [0.0, 0.5]];
        assert_eq!(mutual_information(diag.view()).unwrap(), 1.0);
        // 2·0.4·log2(0.4/0.25) + 2·0.1·log2(0.1/0.25)
        let corr = array![[0.4, 0.1], [0.1, 0.4]];
        let want = 0.8 * 1.6f64.log2() + 0.2 * 0.4f64.log2();
        assert_abs_diff_eq!(mutual_information(corr.view()).unwrap(), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, 0.2781, epsilon = 1e-4);
    }

    #[test]
    fn mi_rejects_bad_joint() {
        assert!(mutual_information(array![[0.5, -0.1], [0.3, 0.3]].view()).is_err());
        assert!(mutual_information(array![[0.5, 0.1], [0.3, 0.3]].view()).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        assert_eq!(kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 1.0);
        let want = 0.7 * 1.4f64.log2() + 0.3 * 0.6f64.log2();
        assert_abs_diff_eq!(kl_divergence(&[0.7, 0.3], &[0.5, 0.5]).unwrap(), want, epsilon = 1e-15);
        assert_abs_diff_eq!(want, 0.1187, epsilon = 1e-4);
    }

    #[test]
    fn kl_infinite_is_signalled() {
        match kl_divergence(&[0.5, 0.5], &[1.0, 0.0]) {
            Err(Error::InfiniteDivergence { index }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }
}
