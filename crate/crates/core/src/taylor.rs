//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor`] holds the coefficients `∂^α f(x₀) / α!` of a function of `n`
//! variables for all multi-indices with `|α| ≤ order`. Coefficients are stored
//! degree by degree, so truncating to a lower order is a prefix operation.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 5;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 3;
/// Number of monomials of degree at most 3 in 5 variables.
pub const MAX_COEFFS: usize = 56;

type Exponent = [u8; MAX_DIM];

struct Basis {
    exps: Vec<Exponent>,
    /// `count[k]`: number of monomials of degree `≤ k`.
    count: [usize; MAX_ORDER + 1],
    /// `raise[i][v]`: index of `α + e_v`, if it has degree `≤ MAX_ORDER`.
    raise: Vec<[Option<u16>; MAX_DIM]>,
    /// Product table `(i, j, k)` with `α_i + α_j = α_k`, sorted by `deg α_k`.
    products: Vec<(u16, u16, u16)>,
    /// `prod_count[k]`: number of products whose result has degree `≤ k`.
    prod_count: [usize; MAX_ORDER + 1],
}

impl Basis {
    fn build(n: usize) -> Basis {
        let mut exps: Vec<Exponent> = Vec::new();
        for deg in 0..=MAX_ORDER {
            let mut cur = [0u8; MAX_DIM];
            Self::enumerate(n, deg, 0, &mut cur, &mut exps);
        }
        let degree: Vec<u8> = exps.iter().map(|e| e.iter().sum()).collect();
        let mut count = [0usize; MAX_ORDER + 1];
        for k in 0..=MAX_ORDER {
            count[k] = degree.iter().filter(|&&d| d as usize <= k).count();
        }
        let find = |e: &Exponent| exps.iter().position(|x| x == e);
        let mut raise = vec![[None; MAX_DIM]; exps.len()];
        for (i, e) in exps.iter().enumerate() {
            for v in 0..n {
                let mut r = *e;
                r[v] += 1;
                raise[i][v] = find(&r).map(|p| p as u16);
            }
        }
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                if degree[i] + degree[j] > MAX_ORDER as u8 {
                    continue;
                }
                let mut s = [0u8; MAX_DIM];
                for v in 0..MAX_DIM {
                    s[v] = a[v] + b[v];
                }
                let k = find(&s).expect("monomial of admissible degree");
                products.push((i as u16, j as u16, k as u16));
            }
        }
        products.sort_by_key(|&(_, _, k)| degree[k as usize]);
        let mut prod_count = [0usize; MAX_ORDER + 1];
        for k in 0..=MAX_ORDER {
            prod_count[k] = products
                .iter()
                .filter(|&&(_, _, r)| degree[r as usize] as usize <= k)
                .count();
        }
        Basis {
            exps,
            count,
            raise,
            products,
            prod_count,
        }
    }

    fn enumerate(n: usize, deg: usize, var: usize, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if var + 1 >= n {
            if n == 0 {
                if deg == 0 {
                    out.push(*cur);
                }
                return;
            }
            cur[var] = deg as u8;
            out.push(*cur);
            cur[var] = 0;
            return;
        }
        for k in (0..=deg).rev() {
            cur[var] = k as u8;
            Self::enumerate(n, deg - k, var + 1, cur, out);
        }
        cur[var] = 0;
    }

    fn index_of(&self, e: &Exponent) -> Option<usize> {
        self.exps.iter().position(|x| x == e)
    }
}

fn basis(n: usize) -> &'static Basis {
    static BASES: OnceLock<Vec<Basis>> = OnceLock::new();
    &BASES.get_or_init(|| (0..=MAX_DIM).map(Basis::build).collect())[n]
}

/// Number of Taylor coefficients for `n` variables at order `k`.
pub fn coefficient_count(n: usize, k: usize) -> usize {
    basis(n).count[k]
}

/// Truncated Taylor expansion of a scalar function at a fixed point.
#[derive(Clone, Copy)]
pub struct Taylor {
    n: u8,
    order: u8,
    c: [f64; MAX_COEFFS],
}

impl Taylor {
    /// Constant function. Constants are exact to every order, so they carry
    /// the maximal order and never lower the order of a result.
    pub fn constant(n: usize, v: f64) -> Taylor {
        assert!(n <= MAX_DIM, "chart dimension {n} exceeds {MAX_DIM}");
        let mut c = [0.0; MAX_COEFFS];
        c[0] = v;
        Taylor {
            n: n as u8,
            order: MAX_ORDER as u8,
            c,
        }
    }

    /// The coordinate function `x_i` expanded around `x_i = at`.
    pub fn variable(n: usize, i: usize, at: f64) -> Taylor {
        let mut t = Taylor::constant(n, at);
        let mut e = [0u8; MAX_DIM];
        e[i] = 1;
        let idx = basis(n).index_of(&e).expect("variable index");
        t.c[idx] = 1.0;
        t
    }

    /// Builds a value from raw coefficients listed in storage order.
    pub fn from_coeffs(n: usize, order: usize, coeffs: &[f64]) -> Taylor {
        let mut t = Taylor::constant(n, 0.0);
        let len = basis(n).count[order];
        assert_eq!(coeffs.len(), len, "coefficient count mismatch");
        t.c[..len].copy_from_slice(coeffs);
        t.order = order as u8;
        t
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    /// Value at the expansion point.
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Stored coefficients (`∂^α f / α!`).
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..basis(self.n as usize).count[self.order as usize]]
    }

    /// Multi-indices matching [`Taylor::coeffs`].
    pub fn exponents(&self) -> Vec<Vec<u8>> {
        let b = basis(self.n as usize);
        b.exps[..b.count[self.order as usize]]
            .iter()
            .map(|e| e[..self.n as usize].to_vec())
            .collect()
    }

    /// Coefficient of the monomial with exponent `alpha`, zero if absent.
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        let mut e = [0u8; MAX_DIM];
        e[..alpha.len()].copy_from_slice(alpha);
        let deg: usize = alpha.iter().map(|&a| a as usize).sum();
        if deg > self.order as usize {
            return 0.0;
        }
        basis(self.n as usize).index_of(&e).map(|i| self.c[i]).unwrap_or(0.0)
    }

    /// Partial derivative `∂_{v₁}…∂_{v_k} f` at the expansion point.
    pub fn partial(&self, vars: &[usize]) -> f64 {
        let mut e = [0u8; self::MAX_DIM];
        for &v in vars {
            e[v] += 1;
        }
        let fact: f64 = e.iter().map(|&k| factorial(k as usize)).product();
        self.coeff(&e[..self.n as usize]) * fact
    }

    /// Lowers the truncation order.
    pub fn truncate(&self, order: usize) -> Taylor {
        let mut t = *self;
        if order < t.order as usize {
            let b = basis(self.n as usize);
            for v in &mut t.c[b.count[order]..b.count[t.order as usize]] {
                *v = 0.0;
            }
            t.order = order as u8;
        }
        t
    }

    /// Partial derivative `∂_v` as a field, one order lower.
    pub fn deriv(&self, v: usize) -> Taylor {
        assert!(self.order > 0, "cannot differentiate an order-0 expansion");
        let b = basis(self.n as usize);
        let order = self.order as usize - 1;
        let mut out = Taylor::constant(self.n as usize, 0.0);
        out.order = order as u8;
        for i in 0..b.count[order] {
            if let Some(j) = b.raise[i][v] {
                let j = j as usize;
                let k = b.exps[j][v] as f64;
                out.c[i] = k * self.c[j];
            }
        }
        out
    }

    /// Gradient at the expansion point.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.n as usize).map(|v| self.partial(&[v])).collect()
    }

    /// Applies a univariate function given its derivatives `f, f', f'', f'''`
    /// at the value of `self`.
    pub fn compose(&self, d: [f64; MAX_ORDER + 1]) -> Taylor {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut out = Taylor::constant(self.n as usize, d[0]);
        out.order = self.order;
        let mut pow = delta;
        let mut fact = 1.0;
        for (k, dk) in d.iter().enumerate().skip(1) {
            if k > self.order as usize {
                break;
            }
            fact *= k as f64;
            if k > 1 {
                pow = pow * delta;
            }
            let s = dk / fact;
            if s != 0.0 {
                for i in 0..basis(self.n as usize).count[self.order as usize] {
                    out.c[i] += s * pow.c[i];
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Taylor {
        let a = self.value();
        let r = 1.0 / a;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn exp(&self) -> Taylor {
        let e = self.value().exp();
        self.compose([e; 4])
    }

    pub fn ln(&self) -> Taylor {
        let a = self.value();
        self.compose([a.ln(), 1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a)])
    }

    pub fn sqrt(&self) -> Taylor {
        let a = self.value();
        let s = a.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * a), 0.375 / (s * a * a)])
    }

    pub fn sin(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(&self) -> Taylor {
        let t = self.value().tan();
        let u = 1.0 + t * t;
        self.compose([t, u, 2.0 * t * u, u * (2.0 + 6.0 * t * t)])
    }

    pub fn sinh(&self) -> Taylor {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Taylor {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([c, s, c, s])
    }

    /// Integer power by repeated multiplication (valid for any sign of the base).
    pub fn powi(&self, p: i32) -> Taylor {
        let base = if p < 0 { self.recip() } else { *self };
        let mut out = Taylor::constant(self.n as usize, 1.0);
        out.order = self.order;
        for _ in 0..p.unsigned_abs() {
            out = out * base;
        }
        out
    }

    /// Real power; the base value must be positive unless `p` is an integer.
    pub fn powf(&self, p: f64) -> Taylor {
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            return self.powi(p as i32);
        }
        let a = self.value();
        self.compose([
            a.powf(p),
            p * a.powf(p - 1.0),
            p * (p - 1.0) * a.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * a.powf(p - 3.0),
        ])
    }

    /// Largest coefficient difference over the common truncation order.
    pub fn max_abs_diff(&self, other: &Taylor) -> f64 {
        let k = self.order.min(other.order) as usize;
        let len = basis(self.n as usize).count[k];
        self.c[..len]
            .iter()
            .zip(&other.c[..len])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn zip_with(self, rhs: Taylor, f: impl Fn(f64, f64) -> f64) -> Taylor {
        debug_assert_eq!(self.n, rhs.n, "mixed chart dimensions");
        let order = self.order.min(rhs.order);
        let mut out = Taylor::constant(self.n as usize, 0.0);
        out.order = order;
        let len = basis(self.n as usize).count[order as usize];
        for i in 0..len {
            out.c[i] = f(self.c[i], rhs.c[i]);
        }
        out
    }

    fn scale(mut self, s: f64) -> Taylor {
        let len = basis(self.n as usize).count[self.order as usize];
        for v in &mut self.c[..len] {
            *v *= s;
        }
        self
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

impl fmt::Debug for Taylor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Taylor(order {}, {:?})", self.order, self.coeffs())
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        debug_assert_eq!(self.n, rhs.n, "mixed chart dimensions");
        let order = self.order.min(rhs.order);
        let b = basis(self.n as usize);
        let mut out = Taylor::constant(self.n as usize, 0.0);
        out.order = order;
        for &(i, j, k) in &b.products[..b.prod_count[order as usize]] {
            out.c[k as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        out
    }
}

impl Div for Taylor {
    type Output = Taylor;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Taylor) -> Taylor {
        self * rhs.recip()
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl Add<f64> for Taylor {
    type Output = Taylor;
    fn add(mut self, rhs: f64) -> Taylor {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Taylor {
    type Output = Taylor;
    fn sub(mut self, rhs: f64) -> Taylor {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        self.scale(rhs)
    }
}

impl Div<f64> for Taylor {
    type Output = Taylor;
    fn div(self, rhs: f64) -> Taylor {
        self.scale(1.0 / rhs)
    }
}

impl AddAssign for Taylor {
    fn add_assign(&mut self, rhs: Taylor) {
        *self = *self + rhs;
    }
}

impl SubAssign for Taylor {
    fn sub_assign(&mut self, rhs: Taylor) {
        *self = *self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(coefficient_count(5, 3), MAX_COEFFS);
        assert_eq!(coefficient_count(4, 2), 15);
        assert_eq!(coefficient_count(1, 3), 4);
    }

    #[test]
    fn square_of_shifted_variable() {
        let x = Taylor::variable(1, 0, 3.0).truncate(2);
        let y = x * x;
        assert_eq!(y.coeffs(), &[9.0, 6.0, 1.0]);
    }

    #[test]
    fn exp_at_origin() {
        let x = Taylor::variable(1, 0, 0.0);
        let y = x.exp();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (a, b) in y.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_drops_order() {
        let n = 2;
        let x = Taylor::variable(n, 0, 1.0);
        let y = Taylor::variable(n, 1, 2.0);
        let f = x * x * y;
        let fx = f.deriv(0);
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - 4.0).abs() < 1e-15);
        assert!((f.partial(&[0, 0, 1]) - 2.0).abs() < 1e-15);
        assert!((f.partial(&[0, 1]) - 2.0 * 1.0).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_inverts() {
        let x = Taylor::variable(3, 1, 0.7) + Taylor::variable(3, 2, 0.2) * 0.5;
        let one = x * x.recip();
        assert!((one.value() - 1.0).abs() < 1e-15);
        assert!(one.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
    }
}
