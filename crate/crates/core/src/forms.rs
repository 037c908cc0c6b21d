//! Canonical form, normal Cartan connections in graded and matrix form,
//! curvature, gauge transformations and the normality and equivariance checks.
//!
//! A 1-form is stored as one coefficient per coordinate direction `λ`, each
//! coefficient a Taylor field so exterior derivatives are exact. Wedge
//! products follow `(α∧β)_{λρ} = α_λ β_ρ − α_ρ β_λ`.

use crate::error::{Error, Result};
use crate::groups::{alg_hom_field, alg_hom_inv_field, conf_algebra_matrix, proj_algebra_matrix};
use crate::jets::{adjoint_jet, maurer_cartan, JetAlgebra, ParamJet};
use crate::metric::{Flavor, Geometry, MetricValue};
use crate::scalar::{Mat, Tensor3};
use crate::taylor::Taylor;

fn zero(n: usize) -> Taylor {
    Taylor::constant(n, 0.0)
}

/// Local section `x ↦ (x, e^μ_a(x), e_a(x))` of the reduced 2-frame bundle.
#[derive(Clone, Debug)]
pub struct SectionField {
    pub flavor: Flavor,
    pub eta: Mat<f64>,
    /// `e^μ_a`, rows `μ`.
    pub frame: Mat<Taylor>,
    /// `θ^a_μ`, rows `a`.
    pub coframe: Mat<Taylor>,
    pub low: Vec<Taylor>,
}

impl SectionField {
    pub fn new(
        flavor: Flavor,
        eta: Mat<f64>,
        frame: Mat<Taylor>,
        low: Vec<Taylor>,
        at: &[f64],
    ) -> Result<SectionField> {
        let n = frame.rows();
        if frame.cols() != n || low.len() != n || eta.rows() != n {
            return Err(Error::Shape(format!("section of dimension {n} has mismatched parts")));
        }
        let coframe = frame
            .inverse()
            .ok_or_else(|| Error::SingularFrame { point: at.to_vec() })?;
        Ok(SectionField {
            flavor,
            eta,
            frame,
            coframe,
            low,
        })
    }

    /// Orthonormal frame of the metric with `e_a ≡ 0`.
    pub fn orthonormal(flavor: Flavor, metric: &MetricValue, at: &[f64]) -> Result<SectionField> {
        let frame = metric.orthonormal_frame(at)?;
        let n = metric.n;
        SectionField::new(flavor, metric.eta(), frame, vec![zero(n); n], at)
    }

    pub fn with_low(mut self, low: Vec<Taylor>) -> SectionField {
        self.low = low;
        self
    }

    pub fn n(&self) -> usize {
        self.frame.rows()
    }

    /// Right action by a jet-valued field `(h^a_b(x), h_b(x))`:
    /// `(e h, h_b + e_c h^c_b)`.
    pub fn act(&self, first: &Mat<Taylor>, low: &[Taylor], at: &[f64]) -> Result<SectionField> {
        let n = self.n();
        let frame = &self.frame * first;
        let low = (0..n)
            .map(|b| {
                let mut t = low[b];
                for c in 0..n {
                    t += self.low[c] * first[(c, b)];
                }
                t
            })
            .collect();
        SectionField::new(self.flavor, self.eta.clone(), frame, low, at)
    }

    /// Right action by a constant parametrized jet.
    pub fn act_constant(&self, h: &ParamJet, at: &[f64]) -> Result<SectionField> {
        let n = self.n();
        let first = h.first.constant_field(n);
        let low: Vec<Taylor> = h.low.iter().map(|v| Taylor::constant(n, *v)).collect();
        self.act(&first, &low, at)
    }

    /// `θ^a_μ e^μ_b − δ^a_b`.
    pub fn inverse_residual(&self) -> f64 {
        let n = self.n();
        (&self.coframe * &self.frame).max_abs_diff(&Mat::identity(n).constant_field(n))
    }

    /// `η_{ab} θ^a_μ θ^b_ν − g_{μν}` over all shared Taylor coefficients.
    pub fn metric_residual(&self, metric: &MetricValue) -> f64 {
        let n = self.n();
        let g = Mat::from_fn(n, n, |m, v| {
            let mut t = zero(n);
            for a in 0..n {
                t += self.coframe[(a, m)] * self.coframe[(a, v)] * self.eta[(a, a)];
            }
            t
        });
        g.max_abs_diff(&metric.g)
    }

    /// Second-order frame coordinates `e^μ_{ab}` indexed `(μ, a, b)`.
    pub fn second_order(&self) -> Tensor3<Taylor> {
        let n = self.n();
        let low_up: Vec<Taylor> = (0..n).map(|a| self.low[a] * (1.0 / self.eta[(a, a)])).collect();
        Tensor3::from_fn(n, |m, a, b| {
            let mut t = -(self.frame[(m, a)] * self.low[b]) - self.frame[(m, b)] * self.low[a];
            if self.flavor == Flavor::Conformal && a == b {
                let mut s = zero(n);
                for c in 0..n {
                    s += self.frame[(m, c)] * low_up[c];
                }
                t += s * self.eta[(a, b)];
            }
            t
        })
    }

    /// `e_a` expressed in coordinates through the frame: `v_μ ↦ v_μ e^μ_a`.
    pub fn frame_components(&self, v: &[Taylor]) -> Vec<Taylor> {
        let n = self.n();
        (0..n)
            .map(|a| {
                let mut t = zero(n);
                for m in 0..n {
                    t += v[m] * self.frame[(m, a)];
                }
                t
            })
            .collect()
    }

    pub fn at_values(&self) -> (Mat<f64>, Vec<f64>) {
        (self.frame.values(), self.low.iter().map(|t| t.value()).collect())
    }
}

/// Matrix-valued 1-form, `comps[λ]` the coefficient of `dx^λ`.
#[derive(Clone, Debug)]
pub struct MatrixForm {
    pub comps: Vec<Mat<Taylor>>,
}

impl MatrixForm {
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// Largest difference over all shared Taylor coefficients.
    pub fn max_abs_diff(&self, o: &MatrixForm) -> f64 {
        self.comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// Largest difference of point values.
    pub fn value_diff(&self, o: &MatrixForm) -> f64 {
        self.comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| a.values().max_abs_diff(&b.values()))
            .fold(0.0, f64::max)
    }

    pub fn values(&self) -> Vec<Mat<f64>> {
        self.comps.iter().map(|m| m.values()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    /// Adds a constant matrix to every direction scaled by `eps`.
    pub fn perturb(&self, delta: &Mat<f64>, eps: f64) -> MatrixForm {
        let n = self.dim();
        MatrixForm {
            comps: self
                .comps
                .iter()
                .map(|m| m + &delta.scale(eps).constant_field(n))
                .collect(),
        }
    }

    /// Trace-free part, `ϖ − (Tr ϖ / size) 1`.
    pub fn trace_free(&self) -> MatrixForm {
        MatrixForm {
            comps: self
                .comps
                .iter()
                .map(|m| {
                    let k = m.rows();
                    let tr = m.trace() * (1.0 / k as f64);
                    Mat::from_fn(k, k, |i, j| if i == j { m[(i, j)] - tr } else { m[(i, j)] })
                })
                .collect(),
        }
    }
}

/// Graded-jet 1-form `(ω̃^a, ω̃^a_b, ω̃_b)`, indexed by direction first.
#[derive(Clone, Debug)]
pub struct GradedForm {
    pub up: Vec<Vec<Taylor>>,
    pub mid: Vec<Mat<Taylor>>,
    pub low: Vec<Vec<Taylor>>,
}

impl GradedForm {
    pub fn dim(&self) -> usize {
        self.up.len()
    }

    /// Point values along direction `λ`.
    pub fn direction(&self, l: usize) -> JetAlgebra {
        JetAlgebra {
            up: self.up[l].iter().map(|t| t.value()).collect(),
            mid: self.mid[l].values(),
            low: self.low[l].iter().map(|t| t.value()).collect(),
        }
    }

    pub fn directions(&self) -> Vec<JetAlgebra> {
        (0..self.dim()).map(|l| self.direction(l)).collect()
    }

    pub fn max_abs_diff(&self, o: &GradedForm) -> f64 {
        let v = |a: &[Taylor], b: &[Taylor]| a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max);
        (0..self.dim())
            .map(|l| {
                v(&self.up[l], &o.up[l])
                    .max(self.mid[l].max_abs_diff(&o.mid[l]))
                    .max(v(&self.low[l], &o.low[l]))
            })
            .fold(0.0, f64::max)
    }

    /// Image under the inverse algebra homomorphism.
    pub fn to_matrix(&self, flavor: Flavor, eta: &Mat<f64>) -> MatrixForm {
        MatrixForm {
            comps: (0..self.dim())
                .map(|l| alg_hom_inv_field(flavor, &self.up[l], &self.mid[l], &self.low[l], eta))
                .collect(),
        }
    }

    pub fn from_matrix(flavor: Flavor, m: &MatrixForm) -> GradedForm {
        let mut g = GradedForm {
            up: Vec::new(),
            mid: Vec::new(),
            low: Vec::new(),
        };
        for c in &m.comps {
            let (u, mi, lo) = alg_hom_field(flavor, c);
            g.up.push(u);
            g.mid.push(mi);
            g.low.push(lo);
        }
        g
    }
}

/// Canonical form `(θ^a, θ^a_b)` of a section: `θ^a_b = θ^a_μ(de^μ_b − e^μ_{bc}θ^c)`.
pub fn canonical_form(sec: &SectionField) -> (Vec<Vec<Taylor>>, Vec<Mat<Taylor>>) {
    let n = sec.n();
    let second = sec.second_order();
    let theta: Vec<Vec<Taylor>> = (0..n).map(|l| (0..n).map(|a| sec.coframe[(a, l)]).collect()).collect();
    let mids = (0..n)
        .map(|l| {
            let de = sec.frame.deriv(l);
            Mat::from_fn(n, n, |a, b| {
                let mut t = zero(n);
                for m in 0..n {
                    let mut inner = de[(m, b)];
                    for c in 0..n {
                        inner -= second[(m, b, c)] * sec.coframe[(c, l)];
                    }
                    t += sec.coframe[(a, m)] * inner;
                }
                t
            })
        })
        .collect();
    (theta, mids)
}

/// Largest coefficient of `dθ^a + θ^a_b ∧ θ^b`.
pub fn canonical_identity_residual(sec: &SectionField) -> f64 {
    let n = sec.n();
    let (theta, mids) = canonical_form(sec);
    let mut worst = 0.0f64;
    for a in 0..n {
        for l in 0..n {
            for r in 0..n {
                let mut t = theta[r][a].deriv(l) - theta[l][a].deriv(r);
                for b in 0..n {
                    t += mids[l][(a, b)] * theta[r][b] - mids[r][(a, b)] * theta[l][b];
                }
                worst = worst.max(t.max_abs());
            }
        }
    }
    worst
}

/// Invariant coefficients `(Π^μ_{νλ}, Π_{μν})` fed into connection assembly.
#[derive(Clone, Debug)]
pub struct PiData {
    pub conn: Tensor3<Taylor>,
    pub tensor: Mat<Taylor>,
}

impl PiData {
    pub fn of(geom: &Geometry) -> PiData {
        PiData {
            conn: geom.pi_conn.clone(),
            tensor: geom.pi_tensor.clone(),
        }
    }

    /// `Π_{μν} + eps δ_{μν}`, the normality probe.
    pub fn perturbed(&self, eps: f64) -> PiData {
        let n = self.tensor.rows();
        PiData {
            conn: self.conn.clone(),
            tensor: &self.tensor + &Mat::identity(n).scale(eps).constant_field(n),
        }
    }
}

/// Normal connection in both representations.
#[derive(Clone, Debug)]
pub struct Connection {
    pub flavor: Flavor,
    pub graded: GradedForm,
    pub matrix: MatrixForm,
}

fn trace_factor(flavor: Flavor, n: usize) -> f64 {
    crate::jets::trace_factor(flavor, n)
}

/// Graded components:
/// `ω̃^a = θ^a`, `ω̃^a_b = θ^a_b + θ^a_μ Π^μ_{νλ} e^ν_b dx^λ`,
/// `ω̃_b = de_b − e_c ω̃^c_b + e_cθ^c e_b + e^μ_b Π_{μν}dx^ν − ½ e² θ_b`,
/// the last term only for conformal sections.
pub fn normal_connection_graded(pi: &PiData, sec: &SectionField) -> GradedForm {
    let n = sec.n();
    let (theta, canon) = canonical_form(sec);
    let e = &sec.frame;
    let th = &sec.coframe;
    let conformal = sec.flavor == Flavor::Conformal;
    let e_sq = {
        let mut s = zero(n);
        for c in 0..n {
            s += sec.low[c] * sec.low[c] * (1.0 / sec.eta[(c, c)]);
        }
        s
    };
    let mut g = GradedForm {
        up: Vec::new(),
        mid: Vec::new(),
        low: Vec::new(),
    };
    for l in 0..n {
        let mid = Mat::from_fn(n, n, |a, b| {
            let mut t = canon[l][(a, b)];
            for m in 0..n {
                for v in 0..n {
                    t += th[(a, m)] * pi.conn[(m, v, l)] * e[(v, b)];
                }
            }
            t
        });
        let mut etheta = zero(n);
        for c in 0..n {
            etheta += sec.low[c] * theta[l][c];
        }
        let low = (0..n)
            .map(|b| {
                let mut t = sec.low[b].deriv(l) + etheta * sec.low[b];
                for c in 0..n {
                    t -= sec.low[c] * mid[(c, b)];
                }
                for m in 0..n {
                    t += e[(m, b)] * pi.tensor[(m, l)];
                }
                if conformal {
                    t -= e_sq * theta[l][b] * (0.5 * sec.eta[(b, b)]);
                }
                t
            })
            .collect();
        g.up.push(theta[l].clone());
        g.mid.push(mid);
        g.low.push(low);
    }
    g
}

/// Matrix components assembled directly:
/// `ω^a_0 = θ^a`, `ω^0_0 = −e_aθ^a − T`,
/// `ω^a_b = θ^a_μ de^μ_b (− η^{ac}η_{bd}e_cθ^d) + e_bθ^a + θ^a_μΠ^μ_{νλ}e^ν_b dx^λ − T δ^a_b`,
/// `ω^0_b = de_b − e_cθ^c_μ de^μ_b − e_cθ^c e_b (+ ½e²θ_b) − e_cθ^c_μΠ^μ_{νλ}e^ν_b dx^λ + e^μ_bΠ_{μλ}dx^λ`,
/// with `T = k(θ^a_μ de^μ_a + Π^μ_{μλ}dx^λ)` and `k = 1/n` or `1/(n+1)`.
pub fn normal_connection_matrix(pi: &PiData, sec: &SectionField) -> MatrixForm {
    let n = sec.n();
    let e = &sec.frame;
    let th = &sec.coframe;
    let eta = &sec.eta;
    let conformal = sec.flavor == Flavor::Conformal;
    let k = trace_factor(sec.flavor, n);
    let e_sq = {
        let mut s = zero(n);
        for c in 0..n {
            s += sec.low[c] * sec.low[c] * (1.0 / eta[(c, c)]);
        }
        s
    };
    let comps = (0..n)
        .map(|l| {
            let de = e.deriv(l);
            // θ^a_μ ∂_λ e^μ_b and θ^a_μ Π^μ_{νλ} e^ν_b.
            let thde = th * &de;
            let pi_l = Mat::from_fn(n, n, |m, v| pi.conn[(m, v, l)]);
            let thpie = &(th * &pi_l) * e;
            let mut tt = zero(n);
            for a in 0..n {
                tt += thde[(a, a)] + pi.conn[(a, a, l)];
            }
            let t = tt * k;
            let mut etheta = zero(n);
            for c in 0..n {
                etheta += sec.low[c] * th[(c, l)];
            }
            let up: Vec<Taylor> = (0..n).map(|a| th[(a, l)]).collect();
            let a00 = -etheta - t;
            let mid = Mat::from_fn(n, n, |a, b| {
                let mut v = thde[(a, b)] + sec.low[b] * th[(a, l)] + thpie[(a, b)];
                if conformal {
                    v -= sec.low[a] * th[(b, l)] * (eta[(b, b)] / eta[(a, a)]);
                }
                if a == b {
                    v -= t;
                }
                v
            });
            let low: Vec<Taylor> = (0..n)
                .map(|b| {
                    let mut v = sec.low[b].deriv(l) - etheta * sec.low[b];
                    for c in 0..n {
                        v -= sec.low[c] * (thde[(c, b)] + thpie[(c, b)]);
                    }
                    for m in 0..n {
                        v += e[(m, b)] * pi.tensor[(m, l)];
                    }
                    if conformal {
                        v += e_sq * th[(b, l)] * (0.5 * eta[(b, b)]);
                    }
                    v
                })
                .collect();
            match sec.flavor {
                Flavor::Conformal => conf_algebra_matrix(&up, a00, &mid, &low, eta),
                Flavor::Projective => proj_algebra_matrix(&up, a00, &mid, &low),
            }
        })
        .collect();
    MatrixForm { comps }
}

pub fn normal_connection(pi: &PiData, sec: &SectionField) -> Connection {
    Connection {
        flavor: sec.flavor,
        graded: normal_connection_graded(pi, sec),
        matrix: normal_connection_matrix(pi, sec),
    }
}

/// Largest disagreement between the two representations under the algebra
/// homomorphism.
pub fn representation_residual(c: &Connection, eta: &Mat<f64>) -> f64 {
    c.graded.to_matrix(c.flavor, eta).max_abs_diff(&c.matrix)
}

/// Local form written with `Γ`, `P` and `ẽ_a = e_a + Υ_μ e^μ_a`; valid for
/// sections whose co-frame realizes the metric.
pub fn local_form(geom: &Geometry, sec: &SectionField) -> MatrixForm {
    let n = sec.n();
    let e = &sec.frame;
    let th = &sec.coframe;
    let eta = &sec.eta;
    let conformal = sec.flavor == Flavor::Conformal;
    let et = e_tilde(geom, sec);
    let et_sq = {
        let mut s = zero(n);
        for c in 0..n {
            s += et[c] * et[c] * (1.0 / eta[(c, c)]);
        }
        s
    };
    let comps = (0..n)
        .map(|l| {
            let de = e.deriv(l);
            let thde = th * &de;
            let gam_l = Mat::from_fn(n, n, |m, v| geom.gamma[(m, v, l)]);
            let thge = &(th * &gam_l) * e;
            let mut etheta = zero(n);
            for c in 0..n {
                etheta += et[c] * th[(c, l)];
            }
            let up: Vec<Taylor> = (0..n).map(|a| th[(a, l)]).collect();
            let a00 = -etheta;
            let mid = Mat::from_fn(n, n, |a, b| {
                let mut v = thde[(a, b)] + et[b] * th[(a, l)] + thge[(a, b)];
                if conformal {
                    v -= et[a] * th[(b, l)] * (eta[(b, b)] / eta[(a, a)]);
                }
                v
            });
            let low: Vec<Taylor> = (0..n)
                .map(|b| {
                    let mut v = et[b].deriv(l) - etheta * et[b];
                    for c in 0..n {
                        v -= et[c] * (thde[(c, b)] + thge[(c, b)]);
                    }
                    for m in 0..n {
                        v += e[(m, b)] * geom.schouten[(m, l)];
                    }
                    if conformal {
                        v += et_sq * th[(b, l)] * (0.5 * eta[(b, b)]);
                    }
                    v
                })
                .collect();
            match sec.flavor {
                Flavor::Conformal => conf_algebra_matrix(&up, a00, &mid, &low, eta),
                Flavor::Projective => proj_algebra_matrix(&up, a00, &mid, &low),
            }
        })
        .collect();
    MatrixForm { comps }
}

/// `ẽ_a = e_a + Υ_μ e^μ_a`.
pub fn e_tilde(geom: &Geometry, sec: &SectionField) -> Vec<Taylor> {
    let ups = sec.frame_components(&geom.upsilon);
    sec.low.iter().zip(ups).map(|(a, b)| *a + b).collect()
}

/// Curvature 2-form `Ω_{λρ} = ∂_λϖ_ρ − ∂_ρϖ_λ + [ϖ_λ, ϖ_ρ]`, indexed `[λ][ρ]`.
#[derive(Clone, Debug)]
pub struct Curvature {
    pub comps: Vec<Vec<Mat<Taylor>>>,
}

impl Curvature {
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|r| r.iter().map(|m| m.max_abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, o: &Curvature) -> f64 {
        self.comps
            .iter()
            .zip(&o.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)))
            .fold(0.0, f64::max)
    }

    /// `Ω_{λρ} + Ω_{ρλ}`, identically zero by construction.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.comps.len();
        let mut worst = 0.0f64;
        for l in 0..n {
            for r in 0..n {
                worst = worst.max((&self.comps[l][r] + &self.comps[r][l]).max_abs());
            }
        }
        worst
    }

    pub fn values(&self) -> Vec<Vec<Mat<f64>>> {
        self.comps
            .iter()
            .map(|r| r.iter().map(|m| m.values()).collect())
            .collect()
    }
}

pub fn curvature(form: &MatrixForm) -> Result<Curvature> {
    let n = form.dim();
    if form.comps.iter().any(|m| m[(0, 0)].order() == 0) {
        return Err(Error::Order { have: 0, need: 1 });
    }
    let d: Vec<Vec<Mat<Taylor>>> = (0..n)
        .map(|l| form.comps.iter().map(|m| m.deriv(l)).collect())
        .collect();
    let comps = (0..n)
        .map(|l| {
            (0..n)
                .map(|r| {
                    let ext = &d[l][r] - &d[r][l];
                    &ext + &form.comps[l].commutator(&form.comps[r])
                })
                .collect()
        })
        .collect();
    Ok(Curvature { comps })
}

/// `γ⁻¹ϖγ + γ⁻¹dγ`; dressing uses the same map with a dressing field.
pub fn gauge_transform(form: &MatrixForm, gamma: &Mat<Taylor>) -> Result<MatrixForm> {
    let gi = gamma
        .inverse()
        .ok_or_else(|| Error::NotInGroup("gauge field is singular at the evaluation point".into()))?;
    Ok(MatrixForm {
        comps: form
            .comps
            .iter()
            .enumerate()
            .map(|(l, w)| &(&(&gi * w) * gamma) + &(&gi * &gamma.deriv(l)))
            .collect(),
    })
}

/// Torsion and Ricci-type trace of the curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalityNorms {
    pub torsion: f64,
    pub k_trace: f64,
}

/// `Ω̃^a` and `K^a_{bac}` where `Ω̃^a_b = ½ K^a_{bcd} θ^c∧θ^d`, so that
/// `K^a_{bcd} = Ω̃^a_{b,λρ} e^λ_c e^ρ_d`.
pub fn normality(flavor: Flavor, form: &MatrixForm, frame: &Mat<f64>) -> Result<NormalityNorms> {
    let n = form.dim();
    if frame.inverse().is_none() {
        return Err(Error::SingularFrame { point: vec![] });
    }
    let omega = curvature(form)?;
    let mut torsion = 0.0f64;
    let mut mids: Vec<Vec<Mat<f64>>> = vec![Vec::with_capacity(n); n];
    for l in 0..n {
        for r in 0..n {
            let (up, mid, _) = alg_hom_field(flavor, &omega.comps[l][r].values());
            torsion = torsion.max(up.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            mids[l].push(mid);
        }
    }
    let mut k_trace = 0.0f64;
    for b in 0..n {
        for c in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                for l in 0..n {
                    for r in 0..n {
                        s += mids[l][r][(a, b)] * frame[(l, a)] * frame[(r, c)];
                    }
                }
            }
            k_trace = k_trace.max(s.abs());
        }
    }
    Ok(NormalityNorms { torsion, k_trace })
}

/// Recovers `(Π^μ_{νλ}, Π_{μν})` at the point from connection values along
/// a section by removing the canonical and `e`-dependent parts.
pub fn extract_pi(values: &[JetAlgebra], sec: &SectionField) -> (Tensor3<f64>, Mat<f64>) {
    let n = sec.n();
    let (theta, canon) = canonical_form(sec);
    let e = sec.frame.values();
    let th = sec.coframe.values();
    let low: Vec<f64> = sec.low.iter().map(|t| t.value()).collect();
    let eta = &sec.eta;
    let phi: Vec<Mat<f64>> = (0..n).map(|l| &values[l].mid - &canon[l].values()).collect();
    let conn = Tensor3::from_fn(n, |m, v, l| {
        let mut s = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                s += e[(m, a)] * phi[l][(a, b)] * th[(b, v)];
            }
        }
        s
    });
    let e_sq: f64 = (0..n).map(|c| low[c] * low[c] / eta[(c, c)]).sum();
    let tensor = Mat::from_fn(n, n, |m, l| {
        let etheta: f64 = (0..n).map(|c| low[c] * theta[l][c].value()).sum();
        let mut s = 0.0;
        for b in 0..n {
            let mut r = values[l].low[b] - sec.low[b].deriv(l).value() - etheta * low[b];
            for c in 0..n {
                r += low[c] * values[l].mid[(c, b)];
            }
            if sec.flavor == Flavor::Conformal {
                r += 0.5 * e_sq * eta[(b, b)] * th[(b, l)];
            }
            s += th[(b, m)] * r;
        }
        s
    });
    (conn, tensor)
}

/// Residual of `r_h^*ω̃ = Ad(h⁻¹)ω̃` for a constant `h`, comparing the
/// connection assembled at `σ·h` with the adjoint image of the one at `σ`.
pub fn equivariance_residual(pi: &PiData, sec: &SectionField, h: &ParamJet, at: &[f64]) -> Result<f64> {
    let moved = sec.act_constant(h, at)?;
    let here = normal_connection_graded(pi, sec).directions();
    let there = normal_connection_graded(pi, &moved).directions();
    let hinv = h.inverse()?;
    let mut worst = 0.0f64;
    for (w, w2) in here.iter().zip(&there) {
        worst = worst.max(adjoint_jet(&hinv, w, &sec.eta)?.max_abs_diff(w2));
    }
    Ok(worst)
}

/// Π recovered from `Ad(h⁻¹)ω̃` along the translated section `σ·h`, compared
/// with Π at the base point.
pub fn base_only_residual(pi: &PiData, sec: &SectionField, h: &ParamJet, at: &[f64]) -> Result<f64> {
    let moved = sec.act_constant(h, at)?;
    let hinv = h.inverse()?;
    let here = normal_connection_graded(pi, sec).directions();
    let transported: Vec<JetAlgebra> = here
        .iter()
        .map(|w| adjoint_jet(&hinv, w, &sec.eta))
        .collect::<Result<_>>()?;
    let (conn, tensor) = extract_pi(&transported, &moved);
    let want_conn = pi.conn.map(|t| t.value());
    let want_tensor = pi.tensor.values();
    Ok(conn.max_abs_diff(&want_conn).max(tensor.max_abs_diff(&want_tensor)))
}

/// Trivializing section used for reconstruction: the orthonormal frame with
/// `σ_a = −Υ_μ σ^μ_a`, which is `(x, δ, 0)` on flat charts.
pub fn trivializing_section(geom: &Geometry, at: &[f64]) -> Result<SectionField> {
    let sec = SectionField::orthonormal(geom.flavor, &geom.metric, at)?;
    let ups = sec.frame_components(&geom.upsilon);
    let low = ups.into_iter().map(|t| -t).collect();
    Ok(sec.with_low(low))
}

/// Connection at `target` rebuilt from the pull-back along `sigma` as
/// `Ad(h⁻¹)σ*ω̃ + h⁻¹dh` with `σ·h = target`.
pub fn reconstruct_along(pi: &PiData, sigma: &SectionField, target: &SectionField) -> Result<Vec<JetAlgebra>> {
    let n = sigma.n();
    let first = &sigma.coframe * &target.frame;
    let low: Vec<Taylor> = (0..n)
        .map(|m| {
            let mut t = target.low[m];
            for l in 0..n {
                t -= sigma.low[l] * first[(l, m)];
            }
            t
        })
        .collect();
    let h = ParamJet {
        flavor: sigma.flavor,
        first: first.values(),
        low: low.iter().map(|t| t.value()).collect(),
    };
    let dh: Vec<(Mat<f64>, Vec<f64>)> = (0..n)
        .map(|l| {
            (
                first.deriv(l).values(),
                low.iter().map(|t| t.deriv(l).value()).collect(),
            )
        })
        .collect();
    let pulled = normal_connection_graded(pi, sigma).directions();
    crate::jets::reconstruct(&pulled, &h, &dh, &sigma.eta)
}

/// Largest gap between the reconstruction and the direct assembly.
pub fn reconstruction_residual(pi: &PiData, sigma: &SectionField, target: &SectionField) -> Result<f64> {
    let rebuilt = reconstruct_along(pi, sigma, target)?;
    let direct = normal_connection_graded(pi, target).directions();
    Ok(rebuilt
        .iter()
        .zip(&direct)
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max))
}

/// Maurer–Cartan check for a jet path, used by tests: the finite-difference
/// derivative of `h⁻¹∘γ(t)` versus the closed form.
pub fn maurer_cartan_at(h: &ParamJet, dfirst: &Mat<f64>, dlow: &[f64]) -> Result<JetAlgebra> {
    maurer_cartan(h, dfirst, dlow)
}

/// Riemann–Cartan (Poincaré) connection `[[A, θ], [0, 0]]` of an orthonormal
/// section, with the spin connection solved from `dθ + A∧θ = 0`.
pub fn poincare_connection(metric: &MetricValue, sec: &SectionField, tol: f64) -> Result<MatrixForm> {
    let n = sec.n();
    let resid = sec.metric_residual(metric);
    if resid > tol {
        return Err(Error::NotInGroup(format!(
            "section is not orthonormal (residual {resid:.3e})"
        )));
    }
    let th = &sec.coframe;
    let e = &sec.frame;
    let eta = &sec.eta;
    // c^a_{cd} = (dθ^a)_{λρ} e^λ_c e^ρ_d, then lowered with η.
    let dth: Vec<Mat<Taylor>> = (0..n).map(|l| th.deriv(l)).collect();
    let e_low = e.truncate(th[(0, 0)].order().saturating_sub(1));
    let c = Tensor3::from_fn(n, |a, cc, d| {
        let mut s = zero(n);
        for l in 0..n {
            for r in 0..n {
                let dt = dth[l][(a, r)] - dth[r][(a, l)];
                s += dt * e_low[(l, cc)] * e_low[(r, d)];
            }
        }
        s * eta[(a, a)]
    });
    // A_{abc} = −½(c_{acb} − c_{cba} + c_{bac}), frame index c.
    let a_low = Tensor3::from_fn(n, |a, b, cc| (c[(a, cc, b)] - c[(cc, b, a)] + c[(b, a, cc)]) * -0.5);
    let comps = (0..n)
        .map(|l| {
            let mut m = Mat::zeros_like(n + 1, n + 1, zero(n));
            for a in 0..n {
                for b in 0..n {
                    let mut s = zero(n);
                    for cc in 0..n {
                        s += a_low[(a, b, cc)] * th[(cc, l)];
                    }
                    m[(a, b)] = s * (1.0 / eta[(a, a)]);
                }
                m[(a, n)] = th[(a, l)];
            }
            m
        })
        .collect();
    Ok(MatrixForm { comps })
}

/// `diag(θ, 1)`, the Poincaré dressing field.
pub fn poincare_dressing(sec: &SectionField) -> Mat<Taylor> {
    let n = sec.n();
    let proto = sec.coframe[(0, 0)];
    let mut u = Mat::identity_like(n + 1, proto);
    for a in 0..n {
        for m in 0..n {
            u[(a, m)] = sec.coframe[(a, m)];
        }
    }
    u
}

/// Values of the Christoffel block `(ϖ₀)^μ_{ν}` and the translation block
/// of a Poincaré-dressed form.
pub fn poincare_blocks(dressed: &MatrixForm) -> (Tensor3<f64>, Vec<Mat<f64>>) {
    let n = dressed.dim();
    let v = dressed.values();
    (
        Tensor3::from_fn(n, |m, nu, l| v[l][(m, nu)]),
        v.iter().map(|w| w.block(0, n, n + 1, 1)).collect(),
    )
}

/// Sup-norm of a geometry's Christoffel symbols against a Poincaré-dressed
/// connection, plus the translation block against `δ^μ_λ`.
pub fn poincare_residual(geom: &Geometry, sec: &SectionField, tol: f64) -> Result<f64> {
    let n = sec.n();
    let w = poincare_connection(&geom.metric, sec, tol)?;
    let dressed = gauge_transform(&w, &poincare_dressing(sec))?;
    let (gam, trans) = poincare_blocks(&dressed);
    let mut worst = gam.max_abs_diff(&geom.gamma.map(|t| t.value()));
    for (l, t) in trans.iter().enumerate() {
        for m in 0..=n {
            let want = if m == l { 1.0 } else { 0.0 };
            worst = worst.max((t[(m, 0)] - want).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::metric::{MetricField, Signature, FIELD_ORDER};

    fn conf_flat(n: usize) -> MetricField {
        let diag = (0..n)
            .map(|i| parse(if i == 0 { "-exp(2*x0)" } else { "exp(2*x0)" }, n).unwrap())
            .collect();
        MetricField::diagonal("conf", Signature::Lorentzian, diag).unwrap()
    }

    #[test]
    fn flat_identity_section_gives_flat_connection() {
        let n = 4;
        let m = MetricField::diagonal(
            "flat",
            Signature::Lorentzian,
            (0..n)
                .map(|i| parse(if i == 0 { "-1" } else { "1" }, n).unwrap())
                .collect(),
        )
        .unwrap();
        let at = [0.1, 0.2, -0.3, 0.4];
        let g = m.eval(&at, FIELD_ORDER).unwrap();
        let geom = g.geometry(Flavor::Conformal).unwrap();
        let sec = SectionField::orthonormal(Flavor::Conformal, &g, &at).unwrap();
        let c = normal_connection(&PiData::of(&geom), &sec);
        for l in 0..n {
            let v = c.matrix.comps[l].values();
            for i in 0..n + 2 {
                for j in 0..n + 2 {
                    let want = if j == 0 && i == l + 1 {
                        1.0
                    } else if i == n + 1 && j == l + 1 {
                        sec.eta[(l, l)]
                    } else {
                        0.0
                    };
                    assert!((v[(i, j)] - want).abs() < 1e-14);
                }
            }
        }
        assert!(curvature(&c.matrix).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn conformally_flat_is_normal_in_both_flavors() {
        let n = 4;
        let at = [0.2, -0.1, 0.3, 0.05];
        let g = conf_flat(n).eval(&at, FIELD_ORDER).unwrap();
        for flavor in Flavor::both() {
            let geom = g.geometry(flavor).unwrap();
            let sec = SectionField::orthonormal(flavor, &g, &at).unwrap();
            let c = normal_connection(&PiData::of(&geom), &sec);
            assert!(representation_residual(&c, &g.eta()) < 1e-12);
            let nn = normality(flavor, &c.matrix, &sec.frame.values()).unwrap();
            assert!(nn.torsion < 1e-10 && nn.k_trace < 1e-10, "{flavor:?} {nn:?}");
            assert!(local_form(&geom, &sec).max_abs_diff(&c.matrix) < 1e-11);
        }
    }

    use crate::fields::{
        random_covector, random_gl_field, random_lorentz_field, random_metric, random_positive, taylor_vec,
    };
    use crate::groups::random_orthogonal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Case {
        geom: Geometry,
        sec: SectionField,
        at: Vec<f64>,
    }

    fn generic(flavor: Flavor, seed: u64, orthonormal: bool) -> Case {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let at: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let m = random_metric(&mut rng, Signature::Lorentzian, &at, 0.1).unwrap();
        let g = m.eval(&at, FIELD_ORDER).unwrap();
        let geom = g.geometry(flavor).unwrap();
        let eta = g.eta();
        let base = g.orthonormal_frame(&at).unwrap();
        let twist = match (flavor, orthonormal) {
            (Flavor::Projective, false) => random_gl_field(&mut rng, n, &at, 0.3).taylor(&at, FIELD_ORDER).unwrap(),
            _ => random_lorentz_field(&mut rng, &eta, &at, 0.3)
                .taylor(&at, FIELD_ORDER)
                .unwrap(),
        };
        let mut frame = &base * &twist;
        if flavor == Flavor::Conformal && !orthonormal {
            let z = random_positive(&mut rng, &at, 0.3)
                .eval_taylor(&at, FIELD_ORDER)
                .unwrap();
            frame = frame.scale_by(Taylor::constant(n, 1.0) / z);
        }
        let low = taylor_vec(&random_covector(&mut rng, &at, 0.5), &at, FIELD_ORDER).unwrap();
        let sec = SectionField::new(flavor, eta, frame, low, &at).unwrap();
        Case { geom, sec, at }
    }

    fn random_jet(flavor: Flavor, eta: &Mat<f64>, rng: &mut ChaCha8Rng) -> ParamJet {
        let n = eta.rows();
        let first = match flavor {
            Flavor::Conformal => random_orthogonal(rng, eta, 0.5).scale(rng.gen_range(0.6..1.6)),
            Flavor::Projective => Mat::from_fn(n, n, |i, j| (i == j) as u8 as f64 + rng.gen_range(-0.3..0.3)),
        };
        ParamJet {
            flavor,
            first,
            low: (0..n).map(|_| rng.gen_range(-0.7..0.7)).collect(),
        }
    }

    #[test]
    fn generic_section_is_normal_and_consistent() {
        for flavor in Flavor::both() {
            for seed in 0..3 {
                let c = generic(flavor, seed, false);
                let pi = PiData::of(&c.geom);
                let conn = normal_connection(&pi, &c.sec);
                assert!(representation_residual(&conn, &c.sec.eta) < 1e-11);
                assert!(canonical_identity_residual(&c.sec) < 1e-11);
                let nn = normality(flavor, &conn.matrix, &c.sec.frame.values()).unwrap();
                assert!(nn.torsion < 1e-10 && nn.k_trace < 1e-9, "{flavor:?} {nn:?}");
                let bad = normal_connection_matrix(&pi.perturbed(0.1), &c.sec);
                let nb = normality(flavor, &bad, &c.sec.frame.values()).unwrap();
                assert!(nb.k_trace > 1e-2, "{flavor:?} {nb:?}");
            }
        }
    }

    #[test]
    fn local_form_matches_on_orthonormal_sections() {
        for flavor in Flavor::both() {
            let c = generic(flavor, 7, true);
            let conn = normal_connection_matrix(&PiData::of(&c.geom), &c.sec);
            assert!(local_form(&c.geom, &c.sec).max_abs_diff(&conn) < 1e-11);
        }
    }

    #[test]
    fn equivariance_base_only_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for flavor in Flavor::both() {
            let c = generic(flavor, 11, false);
            let pi = PiData::of(&c.geom);
            for _ in 0..3 {
                let h = random_jet(flavor, &c.sec.eta, &mut rng);
                assert!(equivariance_residual(&pi, &c.sec, &h, &c.at).unwrap() < 1e-11);
                assert!(base_only_residual(&pi, &c.sec, &h, &c.at).unwrap() < 1e-11);
            }
            let sigma = trivializing_section(&c.geom, &c.at).unwrap();
            assert!(reconstruction_residual(&pi, &sigma, &c.sec).unwrap() < 1e-11);
        }
    }

    #[test]
    fn poincare_dressing_recovers_christoffel() {
        let c = generic(Flavor::Conformal, 3, true);
        assert!(poincare_residual(&c.geom, &c.sec, 1e-10).unwrap() < 1e-11);
    }
}
