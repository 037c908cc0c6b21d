//! Metric fields and the tensors derived from them: Christoffel symbols,
//! curvature, Schouten tensors, the gauge-fixing covector `Υ`, the invariant
//! pair `Π`, and orthonormal co-frames.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalar::{Mat, Tensor3, Tensor4};
use crate::taylor::{Taylor, MAX_DIM, MAX_ORDER};

/// Which parabolic geometry a computation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Conformal,
    Projective,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Conformal => "conformal",
            Flavor::Projective => "projective",
        }
    }

    pub fn both() -> [Flavor; 2] {
        [Flavor::Conformal, Flavor::Projective]
    }
}

/// Metric signature of the model inner product `η`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    /// `η = diag(-1, 1, …, 1)`.
    Lorentzian,
    /// `η = diag(1, …, 1)`.
    Riemannian,
}

impl Signature {
    pub fn eta_diag(self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|a| match self {
                Signature::Lorentzian if a == 0 => -1.0,
                _ => 1.0,
            })
            .collect()
    }

    pub fn eta(self, n: usize) -> Mat<f64> {
        Mat::diag(&self.eta_diag(n))
    }

    pub fn negative_count(self) -> usize {
        match self {
            Signature::Lorentzian => 1,
            Signature::Riemannian => 0,
        }
    }
}

/// A symmetric matrix of expressions on an `n`-dimensional chart.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    pub name: String,
    pub n: usize,
    pub signature: Signature,
    entries: Vec<Expr>,
}

impl MetricField {
    /// Builds a metric from its upper triangle `(μ ≤ ν)` in row-major order.
    pub fn from_upper(name: &str, n: usize, signature: Signature, upper: Vec<Expr>) -> Result<MetricField> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::Dimension(format!("chart dimension {n} outside 1..={MAX_DIM}")));
        }
        if upper.len() != n * (n + 1) / 2 {
            return Err(Error::Dimension(format!(
                "expected {} upper-triangle entries, found {}",
                n * (n + 1) / 2,
                upper.len()
            )));
        }
        for e in &upper {
            if let Some(v) = e.max_var() {
                if v >= n {
                    return Err(Error::UnknownIdentifier {
                        name: format!("x{v}"),
                        offset: 0,
                    });
                }
            }
        }
        let mut entries = vec![Expr::Num(0.0); n * n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i..n {
                let e = it.next().unwrap();
                entries[i * n + j] = e.clone();
                entries[j * n + i] = e;
            }
        }
        Ok(MetricField {
            name: name.to_string(),
            n,
            signature,
            entries,
        })
    }

    /// Builds a metric from a full table, rejecting asymmetric input.
    pub fn from_table(name: &str, n: usize, signature: Signature, table: Vec<Vec<Expr>>) -> Result<MetricField> {
        for i in 0..n {
            for j in i + 1..n {
                if table[i][j].canonical() != table[j][i].canonical() {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        let upper = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| table[i][j].clone())
            .collect();
        Self::from_upper(name, n, signature, upper)
    }

    /// Diagonal metric `diag(d₀, …)`.
    pub fn diagonal(name: &str, signature: Signature, diag: Vec<Expr>) -> Result<MetricField> {
        let n = diag.len();
        let mut upper = Vec::new();
        for i in 0..n {
            for j in i..n {
                upper.push(if i == j { diag[i].clone() } else { Expr::Num(0.0) });
            }
        }
        Self::from_upper(name, n, signature, upper)
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i * self.n + j]
    }

    /// Taylor expansion of `g_{μν}` at `x`, validated for non-degeneracy and
    /// signature.
    pub fn eval(&self, x: &[f64], order: usize) -> Result<MetricValue> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, metric expects {}",
                x.len(),
                self.n
            )));
        }
        let mut cells = Vec::with_capacity(self.n * self.n);
        for e in &self.entries {
            cells.push(e.eval_taylor(x, order)?);
        }
        let g = Mat::from_fn(self.n, self.n, |i, j| cells[i * self.n + j]);
        MetricValue::new(self.signature, g, x)
    }
}

/// A metric expanded at one point.
#[derive(Clone, Debug)]
pub struct MetricValue {
    pub n: usize,
    pub signature: Signature,
    pub g: Mat<Taylor>,
    pub ginv: Mat<Taylor>,
}

impl MetricValue {
    pub fn new(signature: Signature, g: Mat<Taylor>, at: &[f64]) -> Result<MetricValue> {
        let n = g.rows();
        let g0 = g.values();
        let m = DMatrix::from_fn(n, n, |i, j| g0[(i, j)]);
        let eig = SymmetricEigen::new(m);
        let scale = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if eig.eigenvalues.iter().any(|v| v.abs() <= 1e-12 * scale.max(1e-300)) {
            return Err(Error::DegenerateMetric { point: at.to_vec() });
        }
        let neg = eig.eigenvalues.iter().filter(|v| **v < 0.0).count();
        if neg != signature.negative_count() {
            return Err(Error::Signature(format!(
                "metric has {neg} negative eigenvalue(s) at {at:?}, {signature:?} requires {}",
                signature.negative_count()
            )));
        }
        let ginv = g
            .inverse()
            .ok_or_else(|| Error::DegenerateMetric { point: at.to_vec() })?;
        Ok(MetricValue { n, signature, g, ginv })
    }

    pub fn order(&self) -> usize {
        self.g[(0, 0)].order()
    }

    pub fn eta(&self) -> Mat<f64> {
        self.signature.eta(self.n)
    }

    fn require(&self, need: usize) -> Result<()> {
        if self.order() < need {
            Err(Error::Order {
                have: self.order(),
                need,
            })
        } else {
            Ok(())
        }
    }

    /// `Γ^ρ_{μν}`, indexed `(ρ, μ, ν)`, one order lower than the metric.
    pub fn christoffel(&self) -> Result<Tensor3<Taylor>> {
        self.require(1)?;
        let n = self.n;
        let dg: Vec<Mat<Taylor>> = (0..n).map(|l| self.g.deriv(l)).collect();
        let ginv = self.ginv.truncate(self.order() - 1);
        Ok(Tensor3::from_fn(n, |r, m, v| {
            let mut s = Taylor::constant(n, 0.0);
            for l in 0..n {
                let bracket = dg[m][(l, v)] + dg[v][(l, m)] - dg[l][(m, v)];
                s += ginv[(r, l)] * bracket;
            }
            s * 0.5
        }))
    }

    /// `R^ρ_{σμν} = ∂_μΓ^ρ_{νσ} − ∂_νΓ^ρ_{μσ} + Γ^ρ_{μλ}Γ^λ_{νσ} − Γ^ρ_{νλ}Γ^λ_{μσ}`.
    pub fn riemann(&self) -> Result<Tensor4<Taylor>> {
        self.require(2)?;
        Ok(riemann_of(&self.christoffel()?))
    }

    /// `Ric_{σν} = R^ρ_{σρν}`.
    pub fn ricci(&self) -> Result<Mat<Taylor>> {
        let r = self.riemann()?;
        Ok(ricci_of(&r))
    }

    pub fn scalar_curvature(&self) -> Result<Taylor> {
        let ric = self.ricci()?;
        Ok(trace_with(&self.ginv, &ric))
    }

    /// Schouten tensor for the given flavor.
    ///
    /// Conformal: `P = −(Ric − R g / (2(n−1))) / (n−2)`.
    /// Projective: `P = −Ric / (n−1)`.
    pub fn schouten(&self, flavor: Flavor) -> Result<Mat<Taylor>> {
        let n = self.n as f64;
        let ric = self.ricci()?;
        match flavor {
            Flavor::Conformal => {
                if self.n < 3 {
                    return Err(Error::Dimension("conformal Schouten tensor needs n ≥ 3".into()));
                }
                let r = trace_with(&self.ginv, &ric);
                let k = r * (1.0 / (2.0 * (n - 1.0)));
                Ok(Mat::from_fn(self.n, self.n, |i, j| {
                    (ric[(i, j)] - k * self.g[(i, j)]) * (-1.0 / (n - 2.0))
                }))
            }
            Flavor::Projective => {
                if self.n < 2 {
                    return Err(Error::Dimension("projective Schouten tensor needs n ≥ 2".into()));
                }
                Ok(ric.scale(-1.0 / (n - 1.0)))
            }
        }
    }

    /// `Υ_μ = −Γ^λ_{λμ}/n` (conformal) or `−Γ^λ_{λμ}/(n+1)` (projective).
    pub fn upsilon(&self, flavor: Flavor) -> Result<Vec<Taylor>> {
        Ok(upsilon_of(&self.christoffel()?, flavor))
    }

    /// Levi-Civita covariant derivative of a covector, `∇_μ v_ν`.
    pub fn nabla_covector(&self, gamma: &Tensor3<Taylor>, v: &[Taylor]) -> Mat<Taylor> {
        nabla_covector(gamma, v)
    }

    /// The invariant connection coefficients `Π^ρ_{μν}`.
    pub fn pi_connection(&self, flavor: Flavor) -> Result<Tensor3<Taylor>> {
        let gamma = self.christoffel()?;
        let ups = upsilon_of(&gamma, flavor);
        Ok(self.pi_connection_from(&gamma, &ups, flavor))
    }

    fn pi_connection_from(&self, gamma: &Tensor3<Taylor>, ups: &[Taylor], flavor: Flavor) -> Tensor3<Taylor> {
        let n = self.n;
        Tensor3::from_fn(n, |r, m, v| {
            let mut s = gamma[(r, m, v)];
            if r == m {
                s += ups[v];
            }
            if r == v {
                s += ups[m];
            }
            if flavor == Flavor::Conformal {
                let mut up = Taylor::constant(n, 0.0);
                for l in 0..n {
                    up += self.ginv[(r, l)] * ups[l];
                }
                s -= up * self.g[(m, v)];
            }
            s
        })
    }

    /// The invariant tensor `Π_{μν}`.
    pub fn pi_tensor(&self, flavor: Flavor) -> Result<Mat<Taylor>> {
        let gamma = self.christoffel()?;
        let ups = upsilon_of(&gamma, flavor);
        let p = self.schouten(flavor)?;
        Ok(self.pi_tensor_from(&gamma, &ups, &p, flavor))
    }

    fn pi_tensor_from(&self, gamma: &Tensor3<Taylor>, ups: &[Taylor], p: &Mat<Taylor>, flavor: Flavor) -> Mat<Taylor> {
        let n = self.n;
        let nab = nabla_covector(gamma, ups);
        let mut half_sq = Taylor::constant(n, 0.0);
        if flavor == Flavor::Conformal {
            for a in 0..n {
                for b in 0..n {
                    half_sq += self.ginv[(a, b)] * ups[a] * ups[b];
                }
            }
            half_sq = half_sq * 0.5;
        }
        Mat::from_fn(n, n, |m, v| {
            let mut s = p[(m, v)] + nab[(m, v)] - ups[m] * ups[v];
            if flavor == Flavor::Conformal {
                s += half_sq * self.g[(m, v)];
            }
            s
        })
    }

    /// Orthonormal co-frame `θ^a_μ` (rows `a`, columns `μ`) obtained by
    /// Gram–Schmidt on the coordinate basis, timelike direction first.
    pub fn orthonormal_coframe(&self, at: &[f64]) -> Result<Mat<Taylor>> {
        let frame = self.orthonormal_frame(at)?;
        frame
            .inverse()
            .ok_or_else(|| Error::SingularFrame { point: at.to_vec() })
    }

    /// Orthonormal frame `e^μ_a` (rows `μ`, columns `a`).
    pub fn orthonormal_frame(&self, at: &[f64]) -> Result<Mat<Taylor>> {
        let n = self.n;
        let eta = self.signature.eta_diag(n);
        let zero = Taylor::constant(n, 0.0);
        let inner = |u: &[Taylor], v: &[Taylor]| {
            let mut s = zero;
            for i in 0..n {
                for j in 0..n {
                    s += u[i] * self.g[(i, j)] * v[j];
                }
            }
            s
        };
        let mut frame: Vec<Vec<Taylor>> = Vec::with_capacity(n);
        for a in 0..n {
            let mut v: Vec<Taylor> = (0..n)
                .map(|m| Taylor::constant(n, if m == a { 1.0 } else { 0.0 }))
                .collect();
            for (b, eb) in frame.iter().enumerate() {
                let c = inner(&v, eb) * eta[b];
                for m in 0..n {
                    v[m] -= c * eb[m];
                }
            }
            let norm = inner(&v, &v);
            let scale = self.g.values().as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if norm.value().abs() <= 1e-12 * scale {
                return Err(Error::SingularFrame { point: at.to_vec() });
            }
            if norm.value().signum() != eta[a] {
                return Err(Error::Signature(format!(
                    "coordinate direction {a} has the wrong causal character at {at:?}"
                )));
            }
            let s = (norm * eta[a]).sqrt().recip();
            frame.push(v.into_iter().map(|c| c * s).collect());
        }
        Ok(Mat::from_fn(n, n, |m, a| frame[a][m]))
    }

    /// All derived quantities at once.
    pub fn geometry(&self, flavor: Flavor) -> Result<Geometry> {
        self.require(2)?;
        let gamma = self.christoffel()?;
        let ups = upsilon_of(&gamma, flavor);
        let p = self.schouten(flavor)?;
        let pi_conn = self.pi_connection_from(&gamma, &ups, flavor);
        let pi_tensor = self.pi_tensor_from(&gamma, &ups, &p, flavor);
        Ok(Geometry {
            flavor,
            metric: self.clone(),
            gamma,
            schouten: p,
            upsilon: ups,
            pi_conn,
            pi_tensor,
        })
    }
}

/// Metric plus the derived fields used by connection assembly.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub flavor: Flavor,
    pub metric: MetricValue,
    pub gamma: Tensor3<Taylor>,
    pub schouten: Mat<Taylor>,
    pub upsilon: Vec<Taylor>,
    pub pi_conn: Tensor3<Taylor>,
    pub pi_tensor: Mat<Taylor>,
}

impl Geometry {
    pub fn n(&self) -> usize {
        self.metric.n
    }
}

/// Riemann tensor of an arbitrary connection, indexed `(ρ, σ, μ, ν)`.
pub fn riemann_of(gamma: &Tensor3<Taylor>) -> Tensor4<Taylor> {
    let n = gamma.dim();
    let dgamma: Vec<Tensor3<Taylor>> = (0..n).map(|l| gamma.map(|t| t.deriv(l))).collect();
    Tensor4::from_fn(n, |r, s, m, v| {
        let mut t = dgamma[m][(r, v, s)] - dgamma[v][(r, m, s)];
        for l in 0..n {
            t += gamma[(r, m, l)] * gamma[(l, v, s)] - gamma[(r, v, l)] * gamma[(l, m, s)];
        }
        t
    })
}

pub fn ricci_of(riem: &Tensor4<Taylor>) -> Mat<Taylor> {
    let n = riem.dim();
    Mat::from_fn(n, n, |s, v| {
        let mut t = Taylor::constant(n, 0.0);
        for r in 0..n {
            t += riem[(r, s, r, v)];
        }
        t
    })
}

pub fn upsilon_of(gamma: &Tensor3<Taylor>, flavor: Flavor) -> Vec<Taylor> {
    let n = gamma.dim();
    let k = match flavor {
        Flavor::Conformal => -1.0 / n as f64,
        Flavor::Projective => -1.0 / (n as f64 + 1.0),
    };
    (0..n)
        .map(|m| {
            let mut t = Taylor::constant(n, 0.0);
            for l in 0..n {
                t += gamma[(l, l, m)];
            }
            t * k
        })
        .collect()
}

/// `∇_μ v_ν = ∂_μ v_ν − Γ^λ_{μν} v_λ`.
pub fn nabla_covector(gamma: &Tensor3<Taylor>, v: &[Taylor]) -> Mat<Taylor> {
    let n = gamma.dim();
    Mat::from_fn(n, n, |m, nu| {
        let mut t = v[nu].deriv(m);
        for l in 0..n {
            t -= gamma[(l, m, nu)] * v[l];
        }
        t
    })
}

/// `h^{μν} t_{μν}`.
pub fn trace_with(hinv: &Mat<Taylor>, t: &Mat<Taylor>) -> Taylor {
    let n = t.rows();
    let mut s = Taylor::constant(t[(0, 0)].dim(), 0.0);
    for i in 0..n {
        for j in 0..n {
            s += hinv[(i, j)] * t[(i, j)];
        }
    }
    s
}

/// Expansion order used throughout: enough for curvature of connections
/// assembled from second derivatives of the metric.
pub const FIELD_ORDER: usize = MAX_ORDER;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn sphere() -> MetricField {
        let d = ["1", "sin(x0)^2", "sin(x0)^2*sin(x1)^2"]
            .iter()
            .map(|s| parse(s, 3).unwrap())
            .collect();
        MetricField::diagonal("s3", Signature::Riemannian, d).unwrap()
    }

    #[test]
    fn round_sphere_curvature() {
        let x = [1.1, 0.7, 0.3];
        let m = sphere().eval(&x, 3).unwrap();
        let ric = m.ricci().unwrap();
        let r = m.scalar_curvature().unwrap();
        assert!((r.value() - 6.0).abs() < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                assert!((ric[(i, j)].value() - 2.0 * m.g[(i, j)].value()).abs() < 1e-10);
            }
        }
        let pc = m.schouten(Flavor::Conformal).unwrap();
        let pp = m.schouten(Flavor::Projective).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((pc[(i, j)].value() + 0.5 * m.g[(i, j)].value()).abs() < 1e-8);
                assert!((pp[(i, j)].value() + m.g[(i, j)].value()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn coframe_reproduces_metric() {
        let x = [1.1, 0.7, 0.3];
        let m = sphere().eval(&x, 3).unwrap();
        let th = m.orthonormal_coframe(&x).unwrap();
        let eta = m.eta().constant_field(3);
        let back = &(&th.transpose() * &eta) * &th;
        assert!(back.max_abs_diff(&m.g) < 1e-12);
    }

    #[test]
    fn rejects_wrong_signature() {
        let d = vec![Expr::Num(1.0), Expr::Num(1.0), Expr::Num(1.0)];
        let m = MetricField::diagonal("e3", Signature::Lorentzian, d).unwrap();
        assert!(matches!(m.eval(&[0.0; 3], 2), Err(Error::Signature(_))));
    }

    #[test]
    fn rejects_degenerate() {
        let d = vec![Expr::Num(-1.0), Expr::Num(0.0), Expr::Num(1.0)];
        let m = MetricField::diagonal("deg", Signature::Lorentzian, d).unwrap();
        assert!(matches!(m.eval(&[0.0; 3], 2), Err(Error::DegenerateMetric { .. })));
    }
}
