//! Random smooth fields and quasi-random sample clouds.
//!
//! Fields are expression trees so they can be evaluated to any Taylor order
//! at any point of a chart.

use rand::Rng;

use crate::error::Result;
use crate::expr::{Expr, Func};
use crate::metric::{MetricField, Signature};
use crate::scalar::Mat;
use crate::taylor::Taylor;

/// Quadratic polynomial in `x − c` plus `a sin(k·x + φ)`.
pub fn random_scalar<R: Rng>(rng: &mut R, center: &[f64], amp: f64) -> Expr {
    let n = center.len();
    let mut c = || rng.gen_range(-amp..amp);
    let shifted: Vec<Expr> = (0..n).map(|i| Expr::var(i) - Expr::num(center[i])).collect();
    let mut e = Expr::num(c());
    for i in 0..n {
        e = e + Expr::num(c()) * shifted[i].clone();
        for j in i..n {
            e = e + Expr::num(0.5 * c()) * shifted[i].clone() * shifted[j].clone();
        }
    }
    let mut phase = Expr::num(c());
    for i in 0..n {
        phase = phase + Expr::num(c()) * Expr::var(i);
    }
    e + Expr::num(0.5 * c()) * Expr::call(Func::Sin, phase)
}

pub fn random_covector<R: Rng>(rng: &mut R, center: &[f64], amp: f64) -> Vec<Expr> {
    (0..center.len()).map(|_| random_scalar(rng, center, amp)).collect()
}

/// Evaluates a list of expressions as Taylor fields.
pub fn taylor_vec(es: &[Expr], at: &[f64], order: usize) -> Result<Vec<Taylor>> {
    es.iter().map(|e| e.eval_taylor(at, order)).collect()
}

/// Square matrix of expressions.
#[derive(Clone, Debug)]
pub struct MatrixField {
    pub size: usize,
    pub entries: Vec<Expr>,
}

impl MatrixField {
    pub fn taylor(&self, at: &[f64], order: usize) -> Result<Mat<Taylor>> {
        let k = self.size;
        let vals: Vec<Taylor> = taylor_vec(&self.entries, at, order)?;
        Ok(Mat::from_fn(k, k, |i, j| vals[i * k + j]))
    }
}

/// Group-valued field `exp(X(x))` with `X` in a matrix Lie algebra.
#[derive(Clone, Debug)]
pub struct GroupField {
    pub generator: MatrixField,
}

impl GroupField {
    pub fn taylor(&self, at: &[f64], order: usize) -> Result<Mat<Taylor>> {
        Ok(self.generator.taylor(at, order)?.exp())
    }
}

/// `exp` of a field with values in `so(η)`.
pub fn random_lorentz_field<R: Rng>(rng: &mut R, eta: &Mat<f64>, center: &[f64], amp: f64) -> GroupField {
    let n = eta.rows();
    let mut entries = vec![Expr::num(0.0); n * n];
    for a in 0..n {
        for b in a + 1..n {
            let f = random_scalar(rng, center, amp);
            // K^a_b = −η^{aa} η_{bb} K^b_a keeps η K antisymmetric.
            entries[a * n + b] = f.clone();
            entries[b * n + a] = Expr::num(-eta[(b, b)] * eta[(a, a)]) * f;
        }
    }
    GroupField {
        generator: MatrixField { size: n, entries },
    }
}

/// `exp` of an arbitrary `gl(n)` field, so the determinant stays positive.
pub fn random_gl_field<R: Rng>(rng: &mut R, n: usize, center: &[f64], amp: f64) -> GroupField {
    GroupField {
        generator: MatrixField {
            size: n,
            entries: (0..n * n).map(|_| random_scalar(rng, center, amp)).collect(),
        },
    }
}

/// `exp(f(x))`, a positive scale field.
pub fn random_positive<R: Rng>(rng: &mut R, center: &[f64], amp: f64) -> Expr {
    Expr::call(Func::Exp, random_scalar(rng, center, amp))
}

/// `η + amp S(x)` with `S` a random symmetric field.
pub fn random_metric<R: Rng>(rng: &mut R, signature: Signature, center: &[f64], amp: f64) -> Result<MetricField> {
    let n = center.len();
    let eta = signature.eta_diag(n);
    let mut upper = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let base = if i == j { eta[i] } else { 0.0 };
            upper.push(Expr::num(base) + Expr::num(amp) * random_scalar(rng, center, 1.0));
        }
    }
    MetricField::from_upper("random", n, signature, upper)
}

/// Radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const HALTON_BASES: [u64; 5] = [2, 3, 5, 7, 11];

/// Halton points `center + halfwidth (2h − 1)`, skipping index 0.
pub fn halton_cloud(center: &[f64], halfwidth: &[f64], count: usize) -> Vec<Vec<f64>> {
    (1..=count as u64)
        .map(|i| {
            center
                .iter()
                .zip(halfwidth)
                .zip(HALTON_BASES)
                .map(|((c, w), b)| c + w * (2.0 * radical_inverse(i, b) - 1.0))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lorentz_field_preserves_eta() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let eta = Mat::diag(&[-1.0, 1.0, 1.0]);
        let at = [0.3, -0.2, 0.1];
        let s = random_lorentz_field(&mut rng, &eta, &at, 0.4).taylor(&at, 3).unwrap();
        let e = eta.constant_field(3);
        let st = s.transpose();
        assert!((&(&st * &e) * &s).max_abs_diff(&e) < 1e-12);
    }

    #[test]
    fn halton_stays_in_box() {
        let pts = halton_cloud(&[1.0, 2.0], &[0.5, 0.1], 50);
        assert_eq!(pts.len(), 50);
        assert!(pts
            .iter()
            .all(|p| (p[0] - 1.0).abs() <= 0.5 && (p[1] - 2.0).abs() <= 0.1));
        assert!((radical_inverse(3, 2) - 0.75).abs() < 1e-15);
    }
}
