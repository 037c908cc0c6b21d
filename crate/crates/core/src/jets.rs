//! Jet groups of maps `(ℝⁿ, 0) → (ℝⁿ, 0)`, their conformal and projective
//! subgroups, and the graded jet algebra.
//!
//! Jet coefficients are derivatives: `h^a_{bc} = ∂_b∂_c h^a(0)`, so a jet is
//! the map `x ↦ h^a_b x^b + ½ h^a_{bc} x^b x^c + ⅙ h^a_{bcd} x^b x^c x^d`.

use crate::error::{Error, Result};
use crate::metric::Flavor;
use crate::scalar::{Mat, Tensor3, Tensor4};

/// Second-order jet.
#[derive(Clone, Debug)]
pub struct Jet2 {
    pub first: Mat<f64>,
    pub second: Tensor3<f64>,
}

/// Third-order jet.
#[derive(Clone, Debug)]
pub struct Jet3 {
    pub first: Mat<f64>,
    pub second: Tensor3<f64>,
    pub third: Tensor4<f64>,
}

impl Jet2 {
    pub fn n(&self) -> usize {
        self.first.rows()
    }

    pub fn identity(n: usize) -> Jet2 {
        Jet2 {
            first: Mat::identity(n),
            second: Tensor3::from_fn(n, |_, _, _| 0.0),
        }
    }

    pub fn max_abs_diff(&self, o: &Jet2) -> f64 {
        self.first
            .max_abs_diff(&o.first)
            .max(self.second.max_abs_diff(&o.second))
    }

    pub fn max_abs(&self) -> f64 {
        self.first.max_abs().max(self.second.max_abs())
    }
}

impl Jet3 {
    pub fn n(&self) -> usize {
        self.first.rows()
    }

    pub fn identity(n: usize) -> Jet3 {
        Jet3 {
            first: Mat::identity(n),
            second: Tensor3::from_fn(n, |_, _, _| 0.0),
            third: Tensor4::from_fn(n, |_, _, _, _| 0.0),
        }
    }

    pub fn to_jet2(&self) -> Jet2 {
        Jet2 {
            first: self.first.clone(),
            second: self.second.clone(),
        }
    }

    pub fn max_abs_diff(&self, o: &Jet3) -> f64 {
        self.first
            .max_abs_diff(&o.first)
            .max(self.second.max_abs_diff(&o.second))
            .max(self.third.max_abs_diff(&o.third))
    }

    pub fn max_abs(&self) -> f64 {
        self.first
            .max_abs()
            .max(self.second.max_abs())
            .max(self.third.max_abs())
    }
}

/// Composition `u ∘ s` of 2-jets.
pub fn compose2(u: &Jet2, s: &Jet2) -> Jet2 {
    let n = u.n();
    let first = &u.first * &s.first;
    let second = Tensor3::from_fn(n, |a, b, c| {
        let mut t = 0.0;
        for d in 0..n {
            t += u.first[(a, d)] * s.second[(d, b, c)];
            for e in 0..n {
                t += u.second[(a, d, e)] * s.first[(d, b)] * s.first[(e, c)];
            }
        }
        t
    });
    Jet2 { first, second }
}

/// Composition `u ∘ s` of 3-jets (Faà di Bruno).
pub fn compose3(u: &Jet3, s: &Jet3) -> Jet3 {
    let n = u.n();
    let j2 = compose2(&u.to_jet2(), &s.to_jet2());
    // u^a_{de} s^e_m, reused by the mixed terms
    let us = Tensor3::from_fn(n, |a, d, m| {
        (0..n).map(|e| u.second[(a, d, e)] * s.first[(e, m)]).sum::<f64>()
    });
    let third = Tensor4::from_fn(n, |a, b, c, m| {
        let mut t = 0.0f64;
        for d in 0..n {
            t += u.first[(a, d)] * s.third[(d, b, c, m)];
            t += us[(a, d, m)] * s.second[(d, b, c)]
                + us[(a, d, c)] * s.second[(d, b, m)]
                + us[(a, d, b)] * s.second[(d, c, m)];
        }
        for d in 0..n {
            for e in 0..n {
                for f in 0..n {
                    t += u.third[(a, d, e, f)] * s.first[(d, b)] * s.first[(e, c)] * s.first[(f, m)];
                }
            }
        }
        t
    });
    Jet3 {
        first: j2.first,
        second: j2.second,
        third,
    }
}

fn inverse_first(m: &Mat<f64>) -> Result<Mat<f64>> {
    m.inverse()
        .ok_or_else(|| Error::NotInGroup("first-order part is singular".into()))
}

/// Inverse 2-jet: `h̄^k_{ℓm} = −h̄^k_r h^r_{st} h̄^s_ℓ h̄^t_m`.
pub fn invert2(h: &Jet2) -> Result<Jet2> {
    let n = h.n();
    let hb = inverse_first(&h.first)?;
    let second = Tensor3::from_fn(n, |k, l, m| {
        let mut t = 0.0;
        for r in 0..n {
            for s in 0..n {
                for u in 0..n {
                    t -= hb[(k, r)] * h.second[(r, s, u)] * hb[(s, l)] * hb[(u, m)];
                }
            }
        }
        t
    });
    Ok(Jet2 { first: hb, second })
}

/// Inverse 3-jet, solving `h ∘ h̄ = id` order by order.
pub fn invert3(h: &Jet3) -> Result<Jet3> {
    let n = h.n();
    let j2 = invert2(&h.to_jet2())?;
    let hb = &j2.first;
    let hb2 = &j2.second;
    // Third order of h ∘ h̄ with h̄'s third-order part set to zero.
    let partial = compose3(
        h,
        &Jet3 {
            first: hb.clone(),
            second: hb2.clone(),
            third: Tensor4::from_fn(n, |_, _, _, _| 0.0),
        },
    );
    let third = Tensor4::from_fn(n, |k, c, d, e| {
        -(0..n).map(|a| hb[(k, a)] * partial.third[(a, c, d, e)]).sum::<f64>()
    });
    Ok(Jet3 {
        first: j2.first,
        second: j2.second,
        third,
    })
}

/// A conformal or projective jet in its reduced parametrization
/// `(h^a_b, h_b)`; higher orders follow by prolongation.
#[derive(Clone, Debug)]
pub struct ParamJet {
    pub flavor: Flavor,
    pub first: Mat<f64>,
    pub low: Vec<f64>,
}

impl ParamJet {
    pub fn n(&self) -> usize {
        self.first.rows()
    }

    pub fn identity(flavor: Flavor, n: usize) -> ParamJet {
        ParamJet {
            flavor,
            first: Mat::identity(n),
            low: vec![0.0; n],
        }
    }

    /// Group law `(h′, h′_b)(h, h_b) = (h′h, h_b + h′_c h^c_b)`.
    pub fn compose(&self, h: &ParamJet) -> ParamJet {
        let n = self.n();
        let low = (0..n)
            .map(|b| h.low[b] + (0..n).map(|c| self.low[c] * h.first[(c, b)]).sum::<f64>())
            .collect();
        ParamJet {
            flavor: self.flavor,
            first: &self.first * &h.first,
            low,
        }
    }

    /// Inverse element; `h̄_j = −h_r h̄^r_j`.
    pub fn inverse(&self) -> Result<ParamJet> {
        let n = self.n();
        let hb = inverse_first(&self.first)?;
        let low = (0..n)
            .map(|j| -(0..n).map(|r| self.low[r] * hb[(r, j)]).sum::<f64>())
            .collect();
        Ok(ParamJet {
            flavor: self.flavor,
            first: hb,
            low,
        })
    }

    pub fn max_abs_diff(&self, o: &ParamJet) -> f64 {
        let d = self
            .low
            .iter()
            .zip(&o.low)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.first.max_abs_diff(&o.first).max(d)
    }
}

/// Checks `η_{ab} h^a_c h^b_d = λ η_{cd}` with `λ > 0`.
pub fn check_conformal(first: &Mat<f64>, eta: &Mat<f64>, tol: f64) -> Result<f64> {
    let n = first.rows();
    let q = &(&first.transpose() * eta) * first;
    let lambda = q[(n - 1, n - 1)] / eta[(n - 1, n - 1)];
    let scale = q.max_abs().max(1.0);
    let resid = q.max_abs_diff(&eta.scale(lambda));
    if lambda.is_nan() || lambda <= 0.0 || resid > tol * scale {
        return Err(Error::Shape(format!(
            "first-order part is not conformal (residual {resid:.3e})"
        )));
    }
    Ok(lambda)
}

/// Second-order prolongation of a parametrized jet.
///
/// Conformal: `h^a_{bc} = η^{de}η_{bc} h_d h^a_e − h^a_b h_c − h^a_c h_b`.
/// Projective: `h^a_{bc} = −h^a_b h_c − h^a_c h_b`.
pub fn prolong2(p: &ParamJet, eta: &Mat<f64>) -> Result<Jet2> {
    let n = p.n();
    if p.flavor == Flavor::Conformal {
        check_conformal(&p.first, eta, 1e-9)?;
    }
    let h = &p.first;
    let r = &p.low;
    let eta_inv_h = raise(eta, r);
    let second = Tensor3::from_fn(n, |a, b, c| {
        let mut t = -h[(a, b)] * r[c] - h[(a, c)] * r[b];
        if p.flavor == Flavor::Conformal {
            let hr: f64 = (0..n).map(|e| h[(a, e)] * eta_inv_h[e]).sum();
            t += eta[(b, c)] * hr;
        }
        t
    });
    Ok(Jet2 {
        first: h.clone(),
        second,
    })
}

/// Third-order prolongation.
///
/// Conformal: `h^k_{ijm} = ∮_{ijm} (2 h^k_i h_j h_m − h^k_r η^{rs} h_s η_{ij} h_m
/// − ½ η^{rs} h_r h_s η_{ij} h^k_m)`; projective keeps the first term only.
pub fn prolong3(p: &ParamJet, eta: &Mat<f64>) -> Result<Jet3> {
    let j2 = prolong2(p, eta)?;
    let n = p.n();
    let h = &p.first;
    let r = &p.low;
    let r_up = raise(eta, r);
    let r_sq: f64 = (0..n).map(|a| r[a] * r_up[a]).sum();
    let hr: Vec<f64> = (0..n).map(|k| (0..n).map(|e| h[(k, e)] * r_up[e]).sum()).collect();
    let conf = p.flavor == Flavor::Conformal;
    let term = |k: usize, i: usize, j: usize, m: usize| {
        let mut t = 2.0 * h[(k, i)] * r[j] * r[m];
        if conf {
            t -= hr[k] * eta[(i, j)] * r[m];
            t -= 0.5 * r_sq * eta[(i, j)] * h[(k, m)];
        }
        t
    };
    let third = Tensor4::from_fn(n, |k, i, j, m| term(k, i, j, m) + term(k, j, m, i) + term(k, m, i, j));
    Ok(Jet3 {
        first: j2.first,
        second: j2.second,
        third,
    })
}

/// Recovers `h_b` from a prolonged 2-jet: `h_b = −c · h^a_{bc} h̄^c_a` with
/// `c = 1/n` (conformal) or `1/(n+1)` (projective).
pub fn recover_low(flavor: Flavor, j: &Jet2) -> Result<Vec<f64>> {
    let n = j.n();
    let hb = inverse_first(&j.first)?;
    let k = trace_factor(flavor, n);
    Ok((0..n)
        .map(|b| {
            let mut t = 0.0;
            for a in 0..n {
                for c in 0..n {
                    t += j.second[(a, b, c)] * hb[(c, a)];
                }
            }
            -k * t
        })
        .collect())
}

/// `1/n` for conformal, `1/(n+1)` for projective.
pub fn trace_factor(flavor: Flavor, n: usize) -> f64 {
    match flavor {
        Flavor::Conformal => 1.0 / n as f64,
        Flavor::Projective => 1.0 / (n as f64 + 1.0),
    }
}

pub(crate) fn raise(eta: &Mat<f64>, v: &[f64]) -> Vec<f64> {
    // η is diagonal with entries ±1, so η^{-1} = η.
    (0..v.len()).map(|a| v[a] / eta[(a, a)]).collect()
}

/// Element of the graded jet algebra: translation part `A^k` (grade −1),
/// linear part `A^k_ℓ` (grade 0) and the parameter `A_m` (grade +1).
#[derive(Clone, Debug)]
pub struct JetAlgebra {
    pub up: Vec<f64>,
    pub mid: Mat<f64>,
    pub low: Vec<f64>,
}

impl JetAlgebra {
    pub fn zero(n: usize) -> JetAlgebra {
        JetAlgebra {
            up: vec![0.0; n],
            mid: Mat::zeros(n, n),
            low: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.up.len()
    }

    pub fn max_abs_diff(&self, o: &JetAlgebra) -> f64 {
        let v = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        v(&self.up, &o.up)
            .max(self.mid.max_abs_diff(&o.mid))
            .max(v(&self.low, &o.low))
    }

    pub fn max_abs(&self) -> f64 {
        let v = |a: &[f64]| a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        v(&self.up).max(self.mid.max_abs()).max(v(&self.low))
    }

    pub fn add(&self, o: &JetAlgebra) -> JetAlgebra {
        JetAlgebra {
            up: self.up.iter().zip(&o.up).map(|(a, b)| a + b).collect(),
            mid: &self.mid + &o.mid,
            low: self.low.iter().zip(&o.low).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> JetAlgebra {
        JetAlgebra {
            up: self.up.iter().map(|a| a * s).collect(),
            mid: self.mid.scale(s),
            low: self.low.iter().map(|a| a * s).collect(),
        }
    }

    /// Second-order coefficients of the associated vector field:
    /// `A^k_{ℓm} = η^{kr}A_r η_{ℓm} − δ^k_ℓ A_m − δ^k_m A_ℓ` (conformal),
    /// without the `η` term for projective.
    pub fn second_order(&self, flavor: Flavor, eta: &Mat<f64>) -> Tensor3<f64> {
        let n = self.n();
        let a_up = raise(eta, &self.low);
        Tensor3::from_fn(n, |k, l, m| {
            let mut t = 0.0;
            if k == l {
                t -= self.low[m];
            }
            if k == m {
                t -= self.low[l];
            }
            if flavor == Flavor::Conformal {
                t += a_up[k] * eta[(l, m)];
            }
            t
        })
    }
}

/// Pushforward `h_* A` of a vector field jet by a 3-jet `h`, returning the
/// constant, linear and quadratic coefficients.
pub fn pushforward(
    h: &Jet3,
    a_up: &[f64],
    a_mid: &Mat<f64>,
    a_second: &Tensor3<f64>,
) -> Result<(Vec<f64>, Mat<f64>, Tensor3<f64>)> {
    let n = h.n();
    let hb = invert2(&h.to_jet2())?;
    // P(x) = Dh(x)·A(x) at the origin: constant, linear and quadratic parts.
    let p0: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|r| h.first[(k, r)] * a_up[r]).sum())
        .collect();
    let p1 = Mat::from_fn(n, n, |k, s| {
        (0..n)
            .map(|r| h.first[(k, r)] * a_mid[(r, s)] + h.second[(k, r, s)] * a_up[r])
            .sum()
    });
    let p2 = Tensor3::from_fn(n, |k, s, t| {
        (0..n)
            .map(|r| {
                h.first[(k, r)] * a_second[(r, s, t)]
                    + h.second[(k, r, s)] * a_mid[(r, t)]
                    + h.second[(k, r, t)] * a_mid[(r, s)]
                    + h.third[(k, r, s, t)] * a_up[r]
            })
            .sum::<f64>()
    });
    // X = P ∘ h̄.
    let b1 = &p1 * &hb.first;
    let b2 = Tensor3::from_fn(n, |k, l, m| {
        let mut t = 0.0f64;
        for a in 0..n {
            t += p1[(k, a)] * hb.second[(a, l, m)];
            for b in 0..n {
                t += p2[(k, a, b)] * hb.first[(a, l)] * hb.first[(b, m)];
            }
        }
        t
    });
    Ok((p0, b1, b2))
}

/// Adjoint action `Ad(h)A` on the graded jet algebra.
///
/// `B^k = h^k_ℓ A^ℓ`, `B^k_ℓ = h^k_r A^r_s h̄^s_ℓ + h^k_{rs} A^r h̄^s_ℓ`, and
/// `B_m = (A_t + h_r A^r_t − h_r A^r h_t + ½ η^{ij} h_i h_j η_{rt} A^r) h̄^t_m`,
/// where the last term is absent for projective jets.
pub fn adjoint_jet(h: &ParamJet, a: &JetAlgebra, eta: &Mat<f64>) -> Result<JetAlgebra> {
    let n = h.n();
    let j2 = prolong2(h, eta)?;
    let hb = inverse_first(&h.first)?;
    let up: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|l| h.first[(k, l)] * a.up[l]).sum())
        .collect();
    let inner = Mat::from_fn(n, n, |k, s| {
        (0..n)
            .map(|r| h.first[(k, r)] * a.mid[(r, s)] + j2.second[(k, r, s)] * a.up[r])
            .sum()
    });
    let mid = &inner * &hb;
    let r = &h.low;
    let r_up = raise(eta, r);
    let r_sq: f64 = (0..n).map(|i| r[i] * r_up[i]).sum();
    let ra: f64 = (0..n).map(|i| r[i] * a.up[i]).sum();
    let a_flat: Vec<f64> = (0..n).map(|t| eta[(t, t)] * a.up[t]).collect();
    let pre: Vec<f64> = (0..n)
        .map(|t| {
            let mut v = a.low[t] + (0..n).map(|q| r[q] * a.mid[(q, t)]).sum::<f64>() - ra * r[t];
            if h.flavor == Flavor::Conformal {
                v += 0.5 * r_sq * a_flat[t];
            }
            v
        })
        .collect();
    let low = (0..n).map(|m| (0..n).map(|t| pre[t] * hb[(t, m)]).sum()).collect();
    Ok(JetAlgebra { up, mid, low })
}

/// Maurer–Cartan form `h⁻¹dh` evaluated on a tangent `(dh^a_b, dh_b)`:
/// grade 0 `h̄^k_r dh^r_ℓ`, grade +1 `dh_m − h_s h̄^s_r dh^r_m`.
pub fn maurer_cartan(h: &ParamJet, dfirst: &Mat<f64>, dlow: &[f64]) -> Result<JetAlgebra> {
    let n = h.n();
    let hb = inverse_first(&h.first)?;
    let mid = &hb * dfirst;
    let low = (0..n)
        .map(|m| {
            let mut t = dlow[m];
            for s in 0..n {
                for r in 0..n {
                    t -= h.low[s] * hb[(s, r)] * dfirst[(r, m)];
                }
            }
            t
        })
        .collect();
    Ok(JetAlgebra {
        up: vec![0.0; n],
        mid,
        low,
    })
}

/// Point of the reduced 2-frame bundle: a frame `e^μ_a` (rows `μ`) and the
/// covector `e_a` parametrizing its second-order part.
#[derive(Clone, Debug)]
pub struct ReducedFrame {
    pub frame: Mat<f64>,
    pub low: Vec<f64>,
}

/// Right action of a parametrized jet on reduced frames:
/// `(e, e_b) · h = (e h, h_b + e_c h^c_b)`.
pub fn reduced_right_action(p: &ReducedFrame, h: &ParamJet) -> ReducedFrame {
    let n = h.n();
    ReducedFrame {
        frame: &p.frame * &h.first,
        low: (0..n)
            .map(|b| h.low[b] + (0..n).map(|c| p.low[c] * h.first[(c, b)]).sum::<f64>())
            .collect(),
    }
}

/// Full second-order frame `(e^μ_a, e^μ_{ab})`.
#[derive(Clone, Debug)]
pub struct FrameJet {
    pub frame: Mat<f64>,
    pub second: Tensor3<f64>,
}

/// Right action on 2-frames: `(e^μ_c s^c_a, e^μ_c s^c_{ab} + e^μ_{cd} s^c_a s^d_b)`.
pub fn jet_right_action(e: &FrameJet, s: &Jet2) -> FrameJet {
    let j = compose2(
        &Jet2 {
            first: e.frame.clone(),
            second: e.second.clone(),
        },
        s,
    );
    FrameJet {
        frame: j.first,
        second: j.second,
    }
}

/// Second-order frame coordinates of a reduced frame:
/// `e^μ_{ab} = η_{ab}η^{cd} e^μ_c e_d − e^μ_a e_b − e^μ_b e_a` (conformal).
pub fn expand_reduced(flavor: Flavor, p: &ReducedFrame, eta: &Mat<f64>) -> FrameJet {
    let j = prolong_unchecked(flavor, &p.frame, &p.low, eta);
    FrameJet {
        frame: j.first,
        second: j.second,
    }
}

fn prolong_unchecked(flavor: Flavor, h: &Mat<f64>, r: &[f64], eta: &Mat<f64>) -> Jet2 {
    let n = h.rows();
    let r_up = raise(eta, r);
    let second = Tensor3::from_fn(n, |a, b, c| {
        let mut t = -h[(a, b)] * r[c] - h[(a, c)] * r[b];
        if flavor == Flavor::Conformal {
            let hr: f64 = (0..n).map(|e| h[(a, e)] * r_up[e]).sum();
            t += eta[(b, c)] * hr;
        }
        t
    });
    Jet2 {
        first: h.clone(),
        second,
    }
}

/// Recovers the jet relating a trivializing section `σ` to a frame `e`:
/// `h̄^k_ℓ = θ^k_μ σ^μ_ℓ`, `h_m = e_m − σ_ℓ h^ℓ_m`.
pub fn frame_recovery(flavor: Flavor, sigma: &ReducedFrame, target: &ReducedFrame) -> Result<ParamJet> {
    let n = sigma.frame.rows();
    let sinv = inverse_first(&sigma.frame)?;
    let first = &sinv * &target.frame;
    let low = (0..n)
        .map(|m| target.low[m] - (0..n).map(|l| sigma.low[l] * first[(l, m)]).sum::<f64>())
        .collect();
    Ok(ParamJet { flavor, first, low })
}

/// Assembles the connection at `σ·h` from its pull-back along `σ`:
/// `Ad(h⁻¹) σ*ω̃ + h⁻¹dh`, direction by direction.
pub fn reconstruct(
    sigma_pullback: &[JetAlgebra],
    h: &ParamJet,
    dh: &[(Mat<f64>, Vec<f64>)],
    eta: &Mat<f64>,
) -> Result<Vec<JetAlgebra>> {
    let hinv = h.inverse()?;
    sigma_pullback
        .iter()
        .zip(dh)
        .map(|(w, (df, dl))| Ok(adjoint_jet(&hinv, w, eta)?.add(&maurer_cartan(h, df, dl)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(n: usize) -> Mat<f64> {
        let mut d = vec![1.0; n];
        d[0] = -1.0;
        Mat::diag(&d)
    }

    #[test]
    fn identity_is_neutral() {
        let n = 3;
        let p = ParamJet {
            flavor: Flavor::Conformal,
            first: Mat::identity(n).scale(2.0),
            low: vec![0.1, -0.2, 0.3],
        };
        let j = prolong3(&p, &eta(n)).unwrap();
        let id = Jet3::identity(n);
        assert!(compose3(&j, &id).max_abs_diff(&j) < 1e-15);
        assert!(compose3(&id, &j).max_abs_diff(&j) < 1e-15);
        let inv = invert3(&j).unwrap();
        assert!(compose3(&j, &inv).max_abs_diff(&id) < 1e-13);
        assert!(compose3(&inv, &j).max_abs_diff(&id) < 1e-13);
    }

    #[test]
    fn recovery_inverts_prolongation() {
        let n = 4;
        for flavor in Flavor::both() {
            let p = ParamJet {
                flavor,
                first: Mat::identity(n).scale(0.7),
                low: vec![0.1, -0.2, 0.3, 0.05],
            };
            let j = prolong2(&p, &eta(n)).unwrap();
            let r = recover_low(flavor, &j).unwrap();
            for b in 0..n {
                assert!((r[b] - p.low[b]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_non_conformal_first_order() {
        let n = 3;
        let mut m = Mat::identity(n);
        m[(0, 1)] = 0.5;
        let p = ParamJet {
            flavor: Flavor::Conformal,
            first: m,
            low: vec![0.0; n],
        };
        assert!(matches!(prolong2(&p, &eta(n)), Err(Error::Shape(_))));
    }
}
