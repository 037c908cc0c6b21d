//! Matrix models: the Möbius group `O(n,2)` preserving `Σ`, its parabolic
//! subgroup `H_C`, `PSL(n+1)` with its stabilizer `H_P`, the graded Lie
//! algebras, and the homomorphisms onto the jet groups and jet algebra.
//!
//! Conformal matrices use index `0` for the first row, `1..=n` for fiber
//! indices and `n+1` for the last row. Projective matrices use `0..n` for fiber
//! indices and `n` for the last row and column.

use rand::Rng;

use crate::error::{Error, Result};
use crate::jets::{raise, trace_factor, JetAlgebra, ParamJet};
use crate::metric::Flavor;
use crate::scalar::{Mat, Scalar};

/// `Σ = [[0, 0, −1], [0, η, 0], [−1, 0, 0]]`.
pub fn sigma(eta: &Mat<f64>) -> Mat<f64> {
    let n = eta.rows();
    let mut s = Mat::zeros(n + 2, n + 2);
    s[(0, n + 1)] = -1.0;
    s[(n + 1, 0)] = -1.0;
    for a in 0..n {
        for b in 0..n {
            s[(a + 1, b + 1)] = eta[(a, b)];
        }
    }
    s
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn eta_sq_up(eta: &Mat<f64>, t: &[f64]) -> f64 {
    (0..t.len()).map(|a| eta[(a, a)] * t[a] * t[a]).sum()
}

/// Element `(S, z, r)` of the conformal parabolic subgroup.
#[derive(Clone, Debug)]
pub struct HcElement {
    pub s: Mat<f64>,
    pub z: f64,
    pub r: Vec<f64>,
}

/// Factors of a decomposable Möbius matrix `T(t) Z(S, z) K(r)`.
#[derive(Clone, Debug)]
pub struct MobiusFactors {
    pub t: Vec<f64>,
    pub h: HcElement,
}

impl HcElement {
    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn identity(n: usize) -> HcElement {
        HcElement {
            s: Mat::identity(n),
            z: 1.0,
            r: vec![0.0; n],
        }
    }

    /// `Z(S, z) K(r)`.
    pub fn matrix(&self, eta: &Mat<f64>) -> Mat<f64> {
        &z_matrix(&self.s, self.z) * &k_matrix(&self.r, eta)
    }

    /// Closed group law `(S′S, z′z, r + z⁻¹ r′S)`.
    pub fn compose(&self, h: &HcElement) -> HcElement {
        let n = self.n();
        HcElement {
            s: &self.s * &h.s,
            z: self.z * h.z,
            r: (0..n)
                .map(|b| h.r[b] + (0..n).map(|c| self.r[c] * h.s[(c, b)]).sum::<f64>() / h.z)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, o: &HcElement) -> f64 {
        let d = self.r.iter().zip(&o.r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        self.s.max_abs_diff(&o.s).max((self.z - o.z).abs()).max(d)
    }
}

/// `T(t) = [[1, 0, 0], [t^a, δ, 0], [t²/2, t_c, 1]]`.
pub fn t_matrix(t: &[f64], eta: &Mat<f64>) -> Mat<f64> {
    let n = t.len();
    let mut m = Mat::identity(n + 2);
    for a in 0..n {
        m[(a + 1, 0)] = t[a];
        m[(n + 1, a + 1)] = eta[(a, a)] * t[a];
    }
    m[(n + 1, 0)] = 0.5 * eta_sq_up(eta, t);
    m
}

/// `Z(S, z) = diag(z, S, 1/z)`.
pub fn z_matrix(s: &Mat<f64>, z: f64) -> Mat<f64> {
    let n = s.rows();
    let mut m = Mat::zeros(n + 2, n + 2);
    m[(0, 0)] = z;
    m[(n + 1, n + 1)] = 1.0 / z;
    for a in 0..n {
        for b in 0..n {
            m[(a + 1, b + 1)] = s[(a, b)];
        }
    }
    m
}

/// `K(r) = [[1, r_b, r²/2], [0, δ, r^d], [0, 0, 1]]`.
pub fn k_matrix(r: &[f64], eta: &Mat<f64>) -> Mat<f64> {
    let n = r.len();
    let r_up = raise(eta, r);
    let mut m = Mat::identity(n + 2);
    for b in 0..n {
        m[(0, b + 1)] = r[b];
        m[(b + 1, n + 1)] = r_up[b];
    }
    m[(0, n + 1)] = 0.5 * dot(r, &r_up);
    m
}

/// Same matrix with Taylor-valued `r`.
pub fn k_matrix_field<T: Scalar>(r: &[T], eta: &Mat<f64>) -> Mat<T> {
    let n = r.len();
    let proto = r[0];
    let mut m = Mat::identity_like(n + 2, proto);
    let mut sq = proto.zero_like();
    for b in 0..n {
        let up = r[b] * (1.0 / eta[(b, b)]);
        m[(0, b + 1)] = r[b];
        m[(b + 1, n + 1)] = up;
        sq = sq + r[b] * up;
    }
    m[(0, n + 1)] = sq * 0.5;
    m
}

impl MobiusFactors {
    pub fn matrix(&self, eta: &Mat<f64>) -> Mat<f64> {
        &t_matrix(&self.t, eta) * &self.h.matrix(eta)
    }

    /// The closed product formula for `z″`, `t″`, `r″`.
    pub fn compose_closed(&self, a: &MobiusFactors) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.t.len();
        let (hp, h) = (&self.h, &a.h);
        let rt = dot(&hp.r, &a.t);
        let z = hp.z * h.z * (2.0 + rt).powi(2) / 4.0;
        let den = 1.0 + 0.5 * rt;
        let t = (0..n)
            .map(|k| self.t[k] + (0..n).map(|b| hp.s[(k, b)] * a.t[b]).sum::<f64>() / (hp.z * den))
            .collect();
        let r = (0..n)
            .map(|b| h.r[b] + (0..n).map(|c| hp.r[c] * h.s[(c, b)]).sum::<f64>() / (h.z * den))
            .collect();
        (z, t, r)
    }
}

/// Checks `Mᵀ Σ M = Σ`.
pub fn check_mobius(m: &Mat<f64>, eta: &Mat<f64>, tol: f64) -> Result<f64> {
    let s = sigma(eta);
    let resid = (&(&m.transpose() * &s) * m).max_abs_diff(&s);
    if resid > tol * m.max_abs().powi(2).max(1.0) {
        return Err(Error::NotInGroup(format!("MᵀΣM differs from Σ by {resid:.3e}")));
    }
    Ok(resid)
}

/// Splits a Möbius matrix as `T(t) Z(S, z) K(r)`.
pub fn refactor(m: &Mat<f64>, eta: &Mat<f64>) -> Result<MobiusFactors> {
    let n = m.rows() - 2;
    let z = m[(0, 0)];
    if z.abs() <= 1e-12 * m.max_abs() {
        return Err(Error::NotDecomposable("top-left entry vanishes".into()));
    }
    let t: Vec<f64> = (0..n).map(|a| m[(a + 1, 0)] / z).collect();
    let r: Vec<f64> = (0..n).map(|b| m[(0, b + 1)] / z).collect();
    let s = Mat::from_fn(n, n, |a, b| m[(a + 1, b + 1)] - z * t[a] * r[b]);
    let f = MobiusFactors {
        t,
        h: HcElement { s, z, r },
    };
    let resid = f.matrix(eta).max_abs_diff(m);
    if resid > 1e-9 * m.max_abs().max(1.0) {
        return Err(Error::NotDecomposable(format!("refactorization residual {resid:.3e}")));
    }
    Ok(f)
}

/// Action of `H_C` on the chart:
/// `x′ = (S x + S r^♯ x²/2) / (z (1 + r·x + r² x²/4))`.
pub fn mobius_action<T: Scalar>(h: &HcElement, x: &[T], eta: &Mat<f64>) -> Vec<T> {
    let n = h.n();
    let r_up = raise(eta, &h.r);
    let r_sq = dot(&h.r, &r_up);
    let proto = x[0];
    let mut x_sq = proto.zero_like();
    let mut rx = proto.zero_like();
    for a in 0..n {
        x_sq = x_sq + x[a] * x[a] * eta[(a, a)];
        rx = rx + x[a] * h.r[a];
    }
    let den = ((rx + 1.0) + x_sq * (r_sq / 4.0)) * h.z;
    let inv = den.recip();
    (0..n)
        .map(|a| {
            let mut num = proto.zero_like();
            for b in 0..n {
                num = num + (x[b] + x_sq * (r_up[b] * 0.5)) * h.s[(a, b)];
            }
            num * inv
        })
        .collect()
}

/// Jet of the `H_C` action at the origin: `(z⁻¹S, r)`.
pub fn conf_jet_of(h: &HcElement) -> ParamJet {
    ParamJet {
        flavor: Flavor::Conformal,
        first: h.s.scale(1.0 / h.z),
        low: h.r.clone(),
    }
}

/// `Ad(h⁻¹)ω̃` for `h = Z(S, z)K(r)` in graded components:
/// `(z S⁻¹ω̃)^a`,
/// `S⁻¹ω̃S + z r_b S⁻¹ω̃ − z r^♯ (S⁻¹ω̃)^♭ + z (r·S⁻¹ω̃) δ`,
/// `z⁻¹ω̃S − r S⁻¹ω̃S − z (r·S⁻¹ω̃) r + ½ z r² (S⁻¹ω̃)^♭`.
pub fn ad_inv_closed(h: &HcElement, w: &JetAlgebra, eta: &Mat<f64>) -> Result<JetAlgebra> {
    let n = h.n();
    let sinv =
        h.s.inverse()
            .ok_or_else(|| Error::NotInGroup("singular Lorentz block".into()))?;
    let z = h.z;
    let r = &h.r;
    let r_up = raise(eta, r);
    let r_sq = dot(r, &r_up);
    let sw: Vec<f64> = (0..n).map(|a| (0..n).map(|d| sinv[(a, d)] * w.up[d]).sum()).collect();
    let sw_flat: Vec<f64> = (0..n).map(|b| eta[(b, b)] * sw[b]).collect();
    let rsw = dot(r, &sw);
    let conj = &(&sinv * &w.mid) * &h.s;
    let up = sw.iter().map(|v| z * v).collect();
    let mid = Mat::from_fn(n, n, |a, b| {
        let mut v = conj[(a, b)] + z * r[b] * sw[a] - z * r_up[a] * sw_flat[b];
        if a == b {
            v += z * rsw;
        }
        v
    });
    let low = (0..n)
        .map(|b| {
            let ws: f64 = (0..n).map(|d| w.low[d] * h.s[(d, b)]).sum();
            let rc: f64 = (0..n).map(|c| r[c] * conj[(c, b)]).sum();
            ws / z - rc - z * rsw * r[b] + 0.5 * z * r_sq * sw_flat[b]
        })
        .collect();
    Ok(JetAlgebra { up, mid, low })
}

/// Element of `PSL(n+1)`, stored with unit determinant and a canonical sign.
#[derive(Clone, Debug)]
pub struct PslElement {
    m: Mat<f64>,
}

impl PslElement {
    /// Normalizes an invertible matrix to unit determinant and canonical sign.
    pub fn from_matrix(m: &Mat<f64>) -> Result<PslElement> {
        let k = m.rows();
        let det = m.det();
        if det.abs() < 1e-300 {
            return Err(Error::NotInGroup("singular matrix".into()));
        }
        let mut scaled = m.scale(det.abs().powf(-1.0 / k as f64));
        if det < 0.0 {
            if k.is_multiple_of(2) {
                return Err(Error::NotInGroup(
                    "negative determinant cannot be normalized in even size".into(),
                ));
            }
            scaled = scaled.scale(-1.0);
        }
        if k.is_multiple_of(2) {
            let d = scaled[(k - 1, k - 1)];
            let lead = if d != 0.0 {
                d
            } else {
                *scaled.as_slice().iter().find(|v| **v != 0.0).unwrap()
            };
            if lead < 0.0 {
                scaled = scaled.scale(-1.0);
            }
        }
        Ok(PslElement { m: scaled })
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.rows() - 1
    }

    pub fn compose(&self, o: &PslElement) -> Result<PslElement> {
        PslElement::from_matrix(&(&self.m * &o.m))
    }

    /// Blocks `[[S, c], [b, d]]`.
    pub fn blocks(&self) -> (Mat<f64>, Vec<f64>, Vec<f64>, f64) {
        let n = self.n();
        (
            self.m.block(0, 0, n, n),
            (0..n).map(|a| self.m[(a, n)]).collect(),
            (0..n).map(|b| self.m[(n, b)]).collect(),
            self.m[(n, n)],
        )
    }
}

/// Projective action `y′ = (S y + c) / (b·y + d)`.
pub fn psl_action<T: Scalar>(h: &PslElement, y: &[T]) -> Vec<T> {
    let (s, c, b, d) = h.blocks();
    let n = h.n();
    let proto = y[0];
    let mut den = proto.lift(d);
    for i in 0..n {
        den = den + y[i] * b[i];
    }
    let inv = den.recip();
    (0..n)
        .map(|a| {
            let mut num = proto.lift(c[a]);
            for j in 0..n {
                num = num + y[j] * s[(a, j)];
            }
            num * inv
        })
        .collect()
}

/// Jet at the origin of an element of the stabilizer `H_P`:
/// `h^a_b = d⁻¹S`, `h_b = d⁻¹ b_b`.
pub fn proj_jet_of(h: &PslElement) -> Result<ParamJet> {
    let (s, c, b, d) = h.blocks();
    let scale = h.m.max_abs();
    if c.iter().any(|v| v.abs() > 1e-12 * scale) {
        return Err(Error::NotInGroup("element does not fix the origin".into()));
    }
    Ok(ParamJet {
        flavor: Flavor::Projective,
        first: s.scale(1.0 / d),
        low: b.iter().map(|v| v / d).collect(),
    })
}

/// Matrix of `H_P` with jet `(h^a_b, h_b)` and unit last diagonal entry.
pub fn hp_matrix(j: &ParamJet) -> Mat<f64> {
    let n = j.n();
    let mut m = Mat::zeros(n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            m[(a, b)] = j.first[(a, b)];
        }
        m[(n, a)] = j.low[a];
    }
    m[(n, n)] = 1.0;
    m
}

/// Assembles a conformal algebra matrix from graded pieces.
pub fn conf_algebra_matrix<T: Scalar>(up: &[T], a00: T, mid: &Mat<T>, low: &[T], eta: &Mat<f64>) -> Mat<T> {
    let n = up.len();
    let mut m = Mat::zeros_like(n + 2, n + 2, a00);
    m[(0, 0)] = a00;
    m[(n + 1, n + 1)] = -a00;
    for a in 0..n {
        m[(a + 1, 0)] = up[a];
        m[(0, a + 1)] = low[a];
        m[(a + 1, n + 1)] = low[a] * (1.0 / eta[(a, a)]);
        m[(n + 1, a + 1)] = up[a] * eta[(a, a)];
        for b in 0..n {
            m[(a + 1, b + 1)] = mid[(a, b)];
        }
    }
    m
}

/// Assembles a projective algebra matrix `[[ω^a_b, ω^a], [ω_b, ω⁰₀]]`.
pub fn proj_algebra_matrix<T: Scalar>(up: &[T], a00: T, mid: &Mat<T>, low: &[T]) -> Mat<T> {
    let n = up.len();
    let mut m = Mat::zeros_like(n + 1, n + 1, a00);
    m[(n, n)] = a00;
    for a in 0..n {
        m[(a, n)] = up[a];
        m[(n, a)] = low[a];
        for b in 0..n {
            m[(a, b)] = mid[(a, b)];
        }
    }
    m
}

/// Validates the shape of an algebra element and returns its residual.
pub fn check_algebra_shape<T: Scalar>(flavor: Flavor, m: &Mat<T>, eta: &Mat<f64>) -> f64 {
    match flavor {
        Flavor::Conformal => {
            let n = m.rows() - 2;
            let mut r = m[(0, n + 1)].max_abs().max(m[(n + 1, 0)].max_abs());
            r = r.max((m[(n + 1, n + 1)] + m[(0, 0)]).max_abs());
            let mut tr = m[(1, 1)].zero_like();
            for a in 0..n {
                r = r.max((m[(a + 1, n + 1)] - m[(0, a + 1)] * (1.0 / eta[(a, a)])).max_abs());
                r = r.max((m[(n + 1, a + 1)] - m[(a + 1, 0)] * eta[(a, a)]).max_abs());
                tr = tr + m[(a + 1, a + 1)];
            }
            r.max(tr.max_abs())
        }
        Flavor::Projective => m.trace().max_abs(),
    }
}

/// The three graded pieces `(ξ₋₁, ξ₀, ξ₁)` of an algebra matrix.
pub fn graded_split(flavor: Flavor, m: &Mat<f64>, eta: &Mat<f64>) -> Result<[Mat<f64>; 3]> {
    let resid = check_algebra_shape(flavor, m, eta);
    if resid > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::Shape(format!("algebra shape residual {resid:.3e}")));
    }
    let j = alg_hom(flavor, m);
    let n = j.n();
    let a00 = match flavor {
        Flavor::Conformal => m[(0, 0)],
        Flavor::Projective => m[(n, n)],
    };
    let zero = vec![0.0; n];
    let zm = Mat::zeros(n, n);
    let mid_full = Mat::from_fn(n, n, |a, b| j.mid[(a, b)] + if a == b { a00 } else { 0.0 });
    let build = |up: &[f64], a00: f64, mid: &Mat<f64>, low: &[f64]| match flavor {
        Flavor::Conformal => conf_algebra_matrix(up, a00, mid, low, eta),
        Flavor::Projective => proj_algebra_matrix(up, a00, mid, low),
    };
    Ok([
        build(&j.up, 0.0, &zm, &zero),
        build(&zero, a00, &mid_full, &zero),
        build(&zero, 0.0, &zm, &j.low),
    ])
}

/// Algebra homomorphism onto the graded jet algebra:
/// `Ã^a = α^a₀`, `Ã^a_b = α^a_b − δ^a_b α⁰₀`, `Ã_b = α⁰_b`.
pub fn alg_hom_field<T: Scalar>(flavor: Flavor, m: &Mat<T>) -> (Vec<T>, Mat<T>, Vec<T>) {
    match flavor {
        Flavor::Conformal => {
            let n = m.rows() - 2;
            let a00 = m[(0, 0)];
            (
                (0..n).map(|a| m[(a + 1, 0)]).collect(),
                Mat::from_fn(n, n, |a, b| {
                    if a == b {
                        m[(a + 1, b + 1)] - a00
                    } else {
                        m[(a + 1, b + 1)]
                    }
                }),
                (0..n).map(|b| m[(0, b + 1)]).collect(),
            )
        }
        Flavor::Projective => {
            let n = m.rows() - 1;
            let a00 = m[(n, n)];
            (
                (0..n).map(|a| m[(a, n)]).collect(),
                Mat::from_fn(n, n, |a, b| if a == b { m[(a, b)] - a00 } else { m[(a, b)] }),
                (0..n).map(|b| m[(n, b)]).collect(),
            )
        }
    }
}

pub fn alg_hom(flavor: Flavor, m: &Mat<f64>) -> JetAlgebra {
    let (up, mid, low) = alg_hom_field(flavor, m);
    JetAlgebra { up, mid, low }
}

/// Inverse homomorphism: `α⁰₀ = −Tr Ã / n` (conformal) or `/(n+1)`
/// (projective), `α^a_b = Ã^a_b + δ^a_b α⁰₀`.
pub fn alg_hom_inv_field<T: Scalar>(flavor: Flavor, up: &[T], mid: &Mat<T>, low: &[T], eta: &Mat<f64>) -> Mat<T> {
    let n = up.len();
    let a00 = mid.trace() * (-trace_factor(flavor, n));
    let full = Mat::from_fn(n, n, |a, b| if a == b { mid[(a, b)] + a00 } else { mid[(a, b)] });
    match flavor {
        Flavor::Conformal => conf_algebra_matrix(up, a00, &full, low, eta),
        Flavor::Projective => proj_algebra_matrix(up, a00, &full, low),
    }
}

pub fn alg_hom_inv(flavor: Flavor, a: &JetAlgebra, eta: &Mat<f64>) -> Mat<f64> {
    alg_hom_inv_field(flavor, &a.up, &a.mid, &a.low, eta)
}

/// Matrix of the parabolic element whose jet is `j`: `Z(S, z)K(r)` for
/// conformal jets, the `H_P` matrix for projective ones.
pub fn parabolic_matrix(j: &ParamJet, eta: &Mat<f64>) -> Result<Mat<f64>> {
    match j.flavor {
        Flavor::Conformal => {
            let lambda = crate::jets::check_conformal(&j.first, eta, 1e-9)?;
            let z = 1.0 / lambda.sqrt();
            let h = HcElement {
                s: j.first.scale(z),
                z,
                r: j.low.clone(),
            };
            Ok(h.matrix(eta))
        }
        Flavor::Projective => Ok(hp_matrix(j)),
    }
}

/// Random element of `so(η)`.
pub fn random_so<R: Rng>(rng: &mut R, eta: &Mat<f64>, scale: f64) -> Mat<f64> {
    let n = eta.rows();
    let mut k = Mat::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            let v = rng.gen_range(-scale..scale);
            k[(a, b)] = v;
            k[(b, a)] = -v;
        }
    }
    Mat::from_fn(n, n, |a, b| k[(a, b)] / eta[(a, a)])
}

/// Random element of `O(η)` near the identity, as an exponential.
pub fn random_orthogonal<R: Rng>(rng: &mut R, eta: &Mat<f64>, scale: f64) -> Mat<f64> {
    random_so(rng, eta, scale).exp()
}

fn random_vec<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn random_hc<R: Rng>(rng: &mut R, eta: &Mat<f64>) -> HcElement {
    let n = eta.rows();
    HcElement {
        s: random_orthogonal(rng, eta, 0.6),
        z: rng.gen_range(-0.5f64..0.5).exp(),
        r: random_vec(rng, n, 0.6),
    }
}

pub fn random_mobius<R: Rng>(rng: &mut R, eta: &Mat<f64>) -> MobiusFactors {
    let n = eta.rows();
    MobiusFactors {
        t: random_vec(rng, n, 0.6),
        h: random_hc(rng, eta),
    }
}

/// Random conformal algebra matrix with `α^a_b ∈ so(η)`.
pub fn random_conf_algebra<R: Rng>(rng: &mut R, eta: &Mat<f64>) -> Mat<f64> {
    let n = eta.rows();
    let up = random_vec(rng, n, 1.0);
    let low = random_vec(rng, n, 1.0);
    let a00 = rng.gen_range(-1.0..1.0);
    conf_algebra_matrix(&up, a00, &random_so(rng, eta, 1.0), &low, eta)
}

/// Random traceless `(n+1)×(n+1)` matrix.
pub fn random_proj_algebra<R: Rng>(rng: &mut R, n: usize) -> Mat<f64> {
    let mut m = Mat::from_fn(n + 1, n + 1, |_, _| rng.gen_range(-1.0..1.0));
    let tr = m.trace() / (n as f64 + 1.0);
    for i in 0..=n {
        m[(i, i)] -= tr;
    }
    m
}

/// Random element of `PSL(n+1)` near the identity.
pub fn random_psl<R: Rng>(rng: &mut R, n: usize) -> PslElement {
    let m = Mat::from_fn(n + 1, n + 1, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) + rng.gen_range(-0.3..0.3)
    });
    PslElement::from_matrix(&m).expect("near-identity matrix is invertible")
}

/// Random element of the stabilizer `H_P`.
pub fn random_hp<R: Rng>(rng: &mut R, n: usize) -> PslElement {
    let mut m = Mat::from_fn(n + 1, n + 1, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) + rng.gen_range(-0.3..0.3)
    });
    for a in 0..n {
        m[(a, n)] = 0.0;
    }
    PslElement::from_matrix(&m).expect("near-identity matrix is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eta(n: usize) -> Mat<f64> {
        let mut d = vec![1.0; n];
        d[0] = -1.0;
        Mat::diag(&d)
    }

    #[test]
    fn factors_preserve_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = eta(4);
        let f = random_mobius(&mut rng, &e);
        check_mobius(&t_matrix(&f.t, &e), &e, 1e-12).unwrap();
        check_mobius(&k_matrix(&f.h.r, &e), &e, 1e-12).unwrap();
        check_mobius(&z_matrix(&f.h.s, f.h.z), &e, 1e-12).unwrap();
        let back = refactor(&f.matrix(&e), &e).unwrap();
        assert!(back.h.max_abs_diff(&f.h) < 1e-12);
    }

    #[test]
    fn pure_weyl_action_scales() {
        let e = eta(3);
        let h = HcElement {
            s: Mat::identity(3),
            z: 2.0,
            r: vec![0.0; 3],
        };
        let x = [0.2, -0.4, 1.0];
        let y = mobius_action(&h, &x, &e);
        for a in 0..3 {
            assert!((y[a] - x[a] / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn weyl_generator_maps_to_minus_identity() {
        let e = eta(3);
        let m = conf_algebra_matrix(&[0.0; 3], 1.0, &Mat::zeros(3, 3), &[0.0; 3], &e);
        let j = alg_hom(Flavor::Conformal, &m);
        assert!(j.mid.max_abs_diff(&Mat::identity(3).scale(-1.0)) < 1e-15);
        let back = alg_hom_inv(Flavor::Conformal, &j, &e);
        assert!(back.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn closed_inverse_adjoint_matches_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = eta(4);
        for _ in 0..20 {
            let h = random_hc(&mut rng, &e);
            let w = random_conf_algebra(&mut rng, &e);
            let hm = h.matrix(&e);
            let conj = &(&hm.inverse().unwrap() * &w) * &hm;
            let want = alg_hom(Flavor::Conformal, &conj);
            let got = ad_inv_closed(&h, &alg_hom(Flavor::Conformal, &w), &e).unwrap();
            assert!(got.max_abs_diff(&want) < 1e-10);
        }
    }

    #[test]
    fn psl_sign_is_canonical() {
        let m = Mat::identity(4).scale(-2.0);
        let p = PslElement::from_matrix(&m).unwrap();
        assert!(p.matrix().max_abs_diff(&Mat::identity(4)) < 1e-14);
    }
}
