//! Dressing fields, dressed connections, residual Weyl transformations and
//! tractors.
//!
//! Conformal matrices use the `(0, a, n+1)` block layout, projective ones put
//! the fiber indices first and the extra index last.

use crate::error::{Error, Result};
use crate::forms::{e_tilde, gauge_transform, normal_connection_matrix, MatrixForm, PiData, SectionField};
use crate::groups::{conf_algebra_matrix, k_matrix_field, proj_algebra_matrix};
use crate::metric::{nabla_covector, upsilon_of, Flavor, Geometry, MetricValue};
use crate::scalar::{Mat, Tensor3};
use crate::taylor::Taylor;

fn zero(n: usize) -> Taylor {
    Taylor::constant(n, 0.0)
}

fn one(n: usize) -> Taylor {
    Taylor::constant(n, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DressingStage {
    U1Conformal,
    U1Projective,
    U0Coframe,
    Combined,
}

#[derive(Clone, Debug)]
pub struct DressingField {
    pub stage: DressingStage,
    pub matrix: Mat<Taylor>,
}

/// `u⁻¹ϖu + u⁻¹du`, the same map as a gauge transformation.
pub fn dress(form: &MatrixForm, u: &DressingField) -> Result<MatrixForm> {
    gauge_transform(form, &u.matrix)
}

/// Conformal `K(−ẽ)` or projective `[[δ, 0], [−ẽ, 1]]`.
pub fn u1_matrix(flavor: Flavor, et: &[Taylor], eta: &Mat<f64>) -> Mat<Taylor> {
    let n = et.len();
    let neg: Vec<Taylor> = et.iter().map(|t| -*t).collect();
    match flavor {
        Flavor::Conformal => k_matrix_field(&neg, eta),
        Flavor::Projective => {
            let mut m = Mat::identity_like(n + 1, et[0]);
            for b in 0..n {
                m[(n, b)] = neg[b];
            }
            m
        }
    }
}

/// `diag(1, θ, 1)` or `diag(θ, 1)`.
pub fn u0_matrix(flavor: Flavor, coframe: &Mat<Taylor>) -> Mat<Taylor> {
    let n = coframe.rows();
    let off = match flavor {
        Flavor::Conformal => 1,
        Flavor::Projective => 0,
    };
    let size = match flavor {
        Flavor::Conformal => n + 2,
        Flavor::Projective => n + 1,
    };
    let mut m = Mat::identity_like(size, coframe[(0, 0)]);
    for a in 0..n {
        for mu in 0..n {
            m[(a + off, mu + off)] = coframe[(a, mu)];
        }
    }
    m
}

pub fn build_dressings(geom: &Geometry, sec: &SectionField) -> (DressingField, DressingField) {
    let et = e_tilde(geom, sec);
    let stage = match sec.flavor {
        Flavor::Conformal => DressingStage::U1Conformal,
        Flavor::Projective => DressingStage::U1Projective,
    };
    (
        DressingField {
            stage,
            matrix: u1_matrix(sec.flavor, &et, &sec.eta),
        },
        DressingField {
            stage: DressingStage::U0Coframe,
            matrix: u0_matrix(sec.flavor, &sec.coframe),
        },
    )
}

pub fn combine(u1: &DressingField, u0: &DressingField) -> DressingField {
    DressingField {
        stage: DressingStage::Combined,
        matrix: &u1.matrix * &u0.matrix,
    }
}

/// Normal connection along a section with both dressing stages applied.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub flavor: Flavor,
    pub omega: MatrixForm,
    pub u1: DressingField,
    pub u0: DressingField,
    pub w1: MatrixForm,
    pub w0: MatrixForm,
}

pub fn pipeline_with(pi: &PiData, geom: &Geometry, sec: &SectionField) -> Result<Pipeline> {
    let omega = normal_connection_matrix(pi, sec);
    let (u1, u0) = build_dressings(geom, sec);
    let w1 = dress(&omega, &u1)?;
    let w0 = dress(&w1, &u0)?;
    Ok(Pipeline {
        flavor: sec.flavor,
        omega,
        u1,
        u0,
        w1,
        w0,
    })
}

pub fn pipeline(geom: &Geometry, sec: &SectionField) -> Result<Pipeline> {
    pipeline_with(&PiData::of(geom), geom, sec)
}

fn raise_schouten(metric: &MetricValue, p: &Mat<Taylor>) -> Mat<Taylor> {
    &metric.ginv * p
}

/// Expected `ϖ₁`: `θ`, a vanishing scalar block, `θ(de + Γe)` and `e^μ_b P_{μλ}`.
pub fn expected_stage1(geom: &Geometry, sec: &SectionField) -> MatrixForm {
    let n = sec.n();
    let e = &sec.frame;
    let th = &sec.coframe;
    let comps = (0..n)
        .map(|l| {
            let gam_l = Mat::from_fn(n, n, |m, v| geom.gamma[(m, v, l)]);
            let inner = &e.deriv(l) + &(&gam_l * e);
            let mid = th * &inner;
            let up: Vec<Taylor> = (0..n).map(|a| th[(a, l)]).collect();
            let low: Vec<Taylor> = (0..n)
                .map(|b| {
                    let mut t = zero(n);
                    for m in 0..n {
                        t += e[(m, b)] * geom.schouten[(m, l)];
                    }
                    t
                })
                .collect();
            match sec.flavor {
                Flavor::Conformal => conf_algebra_matrix(&up, zero(n), &mid, &low, &sec.eta),
                Flavor::Projective => proj_algebra_matrix(&up, zero(n), &mid, &low),
            }
        })
        .collect();
    MatrixForm { comps }
}

/// Expected `ϖ₀` from `Γ`, `P` and `g` alone.
pub fn expected_dressed(
    flavor: Flavor,
    metric: &MetricValue,
    gamma: &Tensor3<Taylor>,
    schouten: &Mat<Taylor>,
) -> MatrixForm {
    let n = metric.n;
    let p_up = raise_schouten(metric, schouten);
    let comps = (0..n)
        .map(|l| match flavor {
            Flavor::Conformal => {
                let mut m = Mat::zeros_like(n + 2, n + 2, zero(n));
                for mu in 0..n {
                    m[(mu + 1, 0)] = if mu == l { one(n) } else { zero(n) };
                    m[(0, mu + 1)] = schouten[(mu, l)];
                    m[(mu + 1, n + 1)] = p_up[(mu, l)];
                    m[(n + 1, mu + 1)] = metric.g[(mu, l)];
                    for v in 0..n {
                        m[(mu + 1, v + 1)] = gamma[(mu, v, l)];
                    }
                }
                m
            }
            Flavor::Projective => {
                let mut m = Mat::zeros_like(n + 1, n + 1, zero(n));
                for mu in 0..n {
                    m[(mu, n)] = if mu == l { one(n) } else { zero(n) };
                    m[(n, mu)] = schouten[(mu, l)];
                    for v in 0..n {
                        m[(mu, v)] = gamma[(mu, v, l)];
                    }
                }
                m
            }
        })
        .collect();
    MatrixForm { comps }
}

/// Point values of the `Γ^μ_{νλ}`, `P_{μλ}` and (conformal) `g_{μλ}` blocks of
/// a dressed connection.
pub fn dressed_blocks(flavor: Flavor, w0: &MatrixForm) -> (Tensor3<f64>, Mat<f64>, Option<Mat<f64>>) {
    let n = w0.dim();
    let vals = w0.values();
    match flavor {
        Flavor::Conformal => (
            Tensor3::from_fn(n, |m, v, l| vals[l][(m + 1, v + 1)]),
            Mat::from_fn(n, n, |m, l| vals[l][(0, m + 1)]),
            Some(Mat::from_fn(n, n, |m, l| vals[l][(n + 1, m + 1)])),
        ),
        Flavor::Projective => (
            Tensor3::from_fn(n, |m, v, l| vals[l][(m, v)]),
            Mat::from_fn(n, n, |m, l| vals[l][(n, m)]),
            None,
        ),
    }
}

pub fn expected_w0(geom: &Geometry) -> MatrixForm {
    expected_dressed(geom.flavor, &geom.metric, &geom.gamma, &geom.schouten)
}

/// Point-value gaps of `ϖ₁` and `ϖ₀` from their expected block content.
pub fn content_residuals(geom: &Geometry, sec: &SectionField, p: &Pipeline) -> (f64, f64) {
    (
        p.w1.value_diff(&expected_stage1(geom, sec)),
        p.w0.value_diff(&expected_w0(geom)),
    )
}

/// Largest gap between staged and one-step dressing.
pub fn staged_residual(p: &Pipeline) -> Result<f64> {
    let once = dress(&p.omega, &combine(&p.u1, &p.u0))?;
    Ok(once.max_abs_diff(&p.w0))
}

/// Gauge field valued in a reduced subgroup, given as a jet field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeKind {
    /// `K(r(x))` or `ℝⁿ*`: `first = δ`.
    Special,
    /// Lorentz `S(x)` or `GL` `M(x)`: `low = 0`.
    Rotation,
}

#[derive(Clone, Debug)]
pub struct GaugeField {
    pub kind: GaugeKind,
    pub first: Mat<Taylor>,
    pub low: Vec<Taylor>,
}

impl GaugeField {
    pub fn special(r: Vec<Taylor>) -> GaugeField {
        let n = r.len();
        let dim = r[0].dim();
        GaugeField {
            kind: GaugeKind::Special,
            first: Mat::identity(n).constant_field(dim),
            low: r,
        }
    }

    pub fn rotation(m: Mat<Taylor>) -> GaugeField {
        let n = m.rows();
        let dim = m[(0, 0)].dim();
        GaugeField {
            kind: GaugeKind::Rotation,
            first: m,
            low: vec![zero(dim); n],
        }
    }

    /// Matrix realization: `K(r)`, `diag(1, S, 1)`, `[[δ,0],[r,1]]` or `diag(M, 1)`.
    pub fn matrix(&self, flavor: Flavor, eta: &Mat<f64>) -> Mat<Taylor> {
        match (flavor, self.kind) {
            (Flavor::Conformal, GaugeKind::Special) => k_matrix_field(&self.low, eta),
            (_, GaugeKind::Rotation) => u0_matrix(flavor, &self.first),
            (Flavor::Projective, GaugeKind::Special) => {
                let n = self.low.len();
                let mut m = Mat::identity_like(n + 1, self.low[0]);
                for b in 0..n {
                    m[(n, b)] = self.low[b];
                }
                m
            }
        }
    }
}

/// Residuals of one gauge draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvarianceReport {
    /// Recomputed `ϖ` at `σ·γ` against `γ⁻¹ϖγ + γ⁻¹dγ`.
    pub connection: f64,
    /// Dressing field recomputed at `σ·γ` against its expected transform.
    pub dressing: f64,
    /// `ϖ₀` recomputed at `σ·γ` against the original.
    pub dressed: f64,
}

impl InvarianceReport {
    pub fn max(&self) -> f64 {
        self.connection.max(self.dressing).max(self.dressed)
    }
}

/// Rebuilds the pipeline from the gauge-transformed section and compares.
/// The projective `GL` stage acts through `diag(M, 1)`, which is only
/// projectively equivalent to its `SL` representative, so that case compares
/// trace-free parts of the connections.
pub fn invariance(geom: &Geometry, sec: &SectionField, gauge: &GaugeField, at: &[f64]) -> Result<InvarianceReport> {
    let flavor = sec.flavor;
    let base = pipeline(geom, sec)?;
    let moved_sec = sec.act(&gauge.first, &gauge.low, at)?;
    let moved = pipeline(geom, &moved_sec)?;
    let gm = gauge.matrix(flavor, &sec.eta);
    let transformed = gauge_transform(&base.omega, &gm)?;
    let projective_gl = flavor == Flavor::Projective && gauge.kind == GaugeKind::Rotation;
    let connection = if projective_gl {
        transformed.trace_free().max_abs_diff(&moved.omega.trace_free())
    } else {
        transformed.max_abs_diff(&moved.omega)
    };
    let gi = gm
        .inverse()
        .ok_or_else(|| Error::NotInGroup("gauge field is singular".into()))?;
    let dressing = match gauge.kind {
        GaugeKind::Special => (&gi * &base.u1.matrix).max_abs_diff(&moved.u1.matrix),
        GaugeKind::Rotation => {
            let u0 = (&gi * &base.u0.matrix).max_abs_diff(&moved.u0.matrix);
            let u1 = (&(&gi * &base.u1.matrix) * &gm).max_abs_diff(&moved.u1.matrix);
            u0.max(u1)
        }
    };
    let dressed = if projective_gl {
        base.w0.trace_free().max_abs_diff(&moved.w0.trace_free())
    } else {
        base.w0.max_abs_diff(&moved.w0)
    };
    Ok(InvarianceReport {
        connection,
        dressing,
        dressed,
    })
}

/// Largest gap between `ϖ₀` along `sec` and along the same frame with `e_a ≡ 0`.
pub fn low_independence(geom: &Geometry, sec: &SectionField) -> Result<f64> {
    let n = sec.n();
    let bare = sec.clone().with_low(vec![zero(n); n]);
    Ok(pipeline(geom, sec)?.w0.max_abs_diff(&pipeline(geom, &bare)?.w0))
}

/// Weyl factor `z(x)` with `ζ_μ = z⁻¹∂_μz`, the same field conformal
/// formulas call `γ_μ = ∂_μ ln z`.
#[derive(Clone, Debug)]
pub struct WeylFactor {
    pub z: Taylor,
    pub zeta: Vec<Taylor>,
}

impl WeylFactor {
    pub fn new(z: Taylor, at: &[f64]) -> Result<WeylFactor> {
        if z.value().abs() < 1e-300 || !z.value().is_finite() {
            return Err(Error::Domain {
                node: "z".into(),
                reason: format!("Weyl factor vanishes at {at:?}"),
            });
        }
        let zi = z.recip();
        let zeta = (0..z.dim()).map(|m| z.deriv(m) * zi).collect();
        Ok(WeylFactor { z, zeta })
    }

    /// `ζ − ∂ ln z`, zero up to rounding.
    pub fn zeta_residual(&self) -> f64 {
        let l = self.z.ln();
        self.zeta
            .iter()
            .enumerate()
            .map(|(m, t)| t.max_abs_diff(&l.deriv(m)))
            .fold(0.0, f64::max)
    }
}

/// `diag(z, δ, 1/z)` or `diag(δ, z)`.
pub fn z_matrix_field(flavor: Flavor, z: Taylor, n: usize) -> Mat<Taylor> {
    let one = one(z.dim());
    match flavor {
        Flavor::Conformal => {
            let mut m = Mat::identity_like(n + 2, one);
            m[(0, 0)] = z;
            m[(n + 1, n + 1)] = z.recip();
            m
        }
        Flavor::Projective => {
            let mut m = Mat::identity_like(n + 1, one);
            m[(n, n)] = z;
            m
        }
    }
}

/// Residual factor `C(z)`.
///
/// Conformal: `[[z, zγ_ν, γ²/(2z)], [0, zδ, z⁻¹g^{μν}γ_ν], [0, 0, 1/z]]`.
/// Projective: `z [[δ, 0], [ζ_ν, 1]]`.
pub fn c_matrix(flavor: Flavor, w: &WeylFactor, metric: &MetricValue) -> Mat<Taylor> {
    let n = metric.n;
    let z = w.z;
    let zi = z.recip();
    match flavor {
        Flavor::Conformal => {
            let up: Vec<Taylor> = (0..n)
                .map(|m| {
                    let mut t = zero(n);
                    for v in 0..n {
                        t += metric.ginv[(m, v)] * w.zeta[v];
                    }
                    t
                })
                .collect();
            let mut sq = zero(n);
            for m in 0..n {
                sq += up[m] * w.zeta[m];
            }
            let mut c = Mat::zeros_like(n + 2, n + 2, zero(n));
            c[(0, 0)] = z;
            c[(n + 1, n + 1)] = zi;
            c[(0, n + 1)] = sq * zi * 0.5;
            for m in 0..n {
                c[(0, m + 1)] = z * w.zeta[m];
                c[(m + 1, m + 1)] = z;
                c[(m + 1, n + 1)] = zi * up[m];
            }
            c
        }
        Flavor::Projective => {
            let mut c = Mat::zeros_like(n + 1, n + 1, zero(n));
            c[(n, n)] = z;
            for m in 0..n {
                c[(m, m)] = z;
                c[(n, m)] = z * w.zeta[m];
            }
            c
        }
    }
}

/// Outcome of a residual Weyl transformation.
#[derive(Clone, Debug)]
pub struct WeylReport {
    /// `C⁻¹ϖ₀C + C⁻¹dC`.
    pub transformed: MatrixForm,
    pub gamma_z: Tensor3<f64>,
    pub schouten_z: Mat<f64>,
    /// Gap from the transformation law of `Γ` and `P`.
    pub law: f64,
    /// Gap of `u^Z = Z⁻¹uC`.
    pub factorization: f64,
    /// Gap from the dressed connection rebuilt along the rescaled section.
    pub recompute: f64,
}

/// Expected `(Γ^Z, P^Z)`: the projective laws
/// `Γ + δ^μ_λζ_ν + δ^μ_νζ_λ` and `P + ∇_λζ_ν − ζ_λζ_ν`, or the
/// Levi-Civita data of `z²g` in the conformal case.
pub fn weyl_targets(
    geom: &Geometry,
    w: &WeylFactor,
    at: &[f64],
) -> Result<(MetricValue, Tensor3<Taylor>, Mat<Taylor>)> {
    let n = geom.n();
    match geom.flavor {
        Flavor::Projective => {
            let gamma = Tensor3::from_fn(n, |m, v, l| {
                let mut t = geom.gamma[(m, v, l)];
                if m == l {
                    t += w.zeta[v];
                }
                if m == v {
                    t += w.zeta[l];
                }
                t
            });
            let nz = nabla_covector(&geom.gamma, &w.zeta);
            let p = Mat::from_fn(n, n, |v, l| geom.schouten[(v, l)] + nz[(l, v)] - w.zeta[l] * w.zeta[v]);
            Ok((geom.metric.clone(), gamma, p))
        }
        Flavor::Conformal => {
            let z2 = w.z * w.z;
            let g = geom.metric.g.scale_by(z2);
            let m = MetricValue::new(geom.metric.signature, g, at)?;
            let gamma = m.christoffel()?;
            let p = m.schouten(Flavor::Conformal)?;
            Ok((m, gamma, p))
        }
    }
}

pub fn residual_weyl(geom: &Geometry, sec: &SectionField, w: &WeylFactor, at: &[f64]) -> Result<WeylReport> {
    let flavor = geom.flavor;
    let n = geom.n();
    let base = pipeline(geom, sec)?;
    let c = c_matrix(flavor, w, &geom.metric);
    let transformed = gauge_transform(&base.w0, &c)?;
    let (metric_z, gamma_z, p_z) = weyl_targets(geom, w, at)?;
    let expected = expected_dressed(flavor, &metric_z, &gamma_z, &p_z);
    let law = transformed.value_diff(&expected);

    let values = transformed.values();
    let (gz, pz) = match flavor {
        Flavor::Conformal => (
            Tensor3::from_fn(n, |m, v, l| values[l][(m + 1, v + 1)]),
            Mat::from_fn(n, n, |v, l| values[l][(0, v + 1)]),
        ),
        Flavor::Projective => (
            Tensor3::from_fn(n, |m, v, l| values[l][(m, v)]),
            Mat::from_fn(n, n, |v, l| values[l][(n, v)]),
        ),
    };

    // The rescaled section `σ·Z` and the shifted `Υ` of the transformed data.
    let zi = w.z.recip();
    let scaled = Mat::identity(n).constant_field(n).scale_by(zi);
    let moved = sec.act(&scaled, &vec![zero(n); n], at)?;
    let ups_z = match flavor {
        Flavor::Conformal => metric_z.upsilon(Flavor::Conformal)?,
        Flavor::Projective => upsilon_of(&gamma_z, Flavor::Projective),
    };
    let et: Vec<Taylor> = {
        let comps = moved.frame_components(&ups_z);
        moved.low.iter().zip(comps).map(|(a, b)| *a + b).collect()
    };
    let u_z = &u1_matrix(flavor, &et, &sec.eta) * &u0_matrix(flavor, &moved.coframe);
    let zm = z_matrix_field(flavor, w.z, n);
    let zmi = zm
        .inverse()
        .ok_or_else(|| Error::NotInGroup("Weyl factor is singular".into()))?;
    let u = &base.u1.matrix * &base.u0.matrix;
    let factorization = (&(&zmi * &u) * &c).max_abs_diff(&u_z);

    let geom_z = match flavor {
        Flavor::Conformal => metric_z.geometry(Flavor::Conformal)?,
        Flavor::Projective => geom.clone(),
    };
    let omega_z = normal_connection_matrix(&PiData::of(&geom_z), &moved);
    let w0_z = gauge_transform(&omega_z, &u_z)?;
    let recompute = match flavor {
        Flavor::Conformal => w0_z.max_abs_diff(&transformed),
        Flavor::Projective => w0_z.trace_free().max_abs_diff(&transformed.trace_free()),
    };

    Ok(WeylReport {
        transformed,
        gamma_z: gz,
        schouten_z: pz,
        law,
        factorization,
        recompute,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TractorStage {
    Raw,
    Stage1,
    Stage0,
}

/// Conformal `(ρ, l, σ)` or projective `(l, σ)`.
#[derive(Clone, Debug)]
pub struct TractorField {
    pub flavor: Flavor,
    pub stage: TractorStage,
    pub comps: Vec<Taylor>,
}

impl TractorField {
    pub fn new(flavor: Flavor, stage: TractorStage, comps: Vec<Taylor>, n: usize) -> Result<TractorField> {
        let want = match flavor {
            Flavor::Conformal => n + 2,
            Flavor::Projective => n + 1,
        };
        if comps.len() != want {
            return Err(Error::Shape(format!(
                "{} tractor in dimension {n} needs {want} components, found {}",
                flavor.name(),
                comps.len()
            )));
        }
        Ok(TractorField { flavor, stage, comps })
    }

    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(|t| t.value()).collect()
    }

    pub fn max_abs_diff(&self, o: &TractorField) -> f64 {
        self.comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

fn apply(m: &Mat<Taylor>, v: &[Taylor]) -> Vec<Taylor> {
    crate::scalar::mat_vec(m, v)
}

/// `φ₁ = u₁⁻¹φ`, then `φ₀ = u₀⁻¹φ₁`.
pub fn tractor_dress(phi: &TractorField, u1: &DressingField, u0: &DressingField) -> Result<TractorField> {
    if phi.stage != TractorStage::Raw {
        return Err(Error::Shape("tractor dressing starts from a raw tractor".into()));
    }
    let inv = |u: &DressingField| {
        u.matrix
            .inverse()
            .ok_or_else(|| Error::NotInGroup("dressing field is singular".into()))
    };
    let phi1 = apply(&inv(u1)?, &phi.comps);
    let phi0 = apply(&inv(u0)?, &phi1);
    Ok(TractorField {
        flavor: phi.flavor,
        stage: TractorStage::Stage0,
        comps: phi0,
    })
}

/// Closed form of the dressed tractor: projective `(e^μ_a l^a, σ + ẽ_a l^a)`,
/// conformal `(ρ + ẽ_a l^a + ½ẽ²σ, e^μ_a(l^a + ẽ^a σ), σ)`.
pub fn tractor_dress_closed(phi: &TractorField, geom: &Geometry, sec: &SectionField) -> TractorField {
    let n = sec.n();
    let et = e_tilde(geom, sec);
    let e = &sec.frame;
    let comps = match phi.flavor {
        Flavor::Projective => {
            let l = &phi.comps[..n];
            let mut out: Vec<Taylor> = (0..n)
                .map(|m| {
                    let mut t = zero(n);
                    for a in 0..n {
                        t += e[(m, a)] * l[a];
                    }
                    t
                })
                .collect();
            let mut s = phi.comps[n];
            for a in 0..n {
                s += et[a] * l[a];
            }
            out.push(s);
            out
        }
        Flavor::Conformal => {
            let rho = phi.comps[0];
            let l = &phi.comps[1..=n];
            let sigma = phi.comps[n + 1];
            let et_up: Vec<Taylor> = (0..n).map(|a| et[a] * (1.0 / sec.eta[(a, a)])).collect();
            let mut r = rho;
            let mut sq = zero(n);
            for a in 0..n {
                r += et[a] * l[a];
                sq += et[a] * et_up[a];
            }
            r += sq * sigma * 0.5;
            let mut out = vec![r];
            for m in 0..n {
                let mut t = zero(n);
                for a in 0..n {
                    t += e[(m, a)] * (l[a] + et_up[a] * sigma);
                }
                out.push(t);
            }
            out.push(sigma);
            out
        }
    };
    TractorField {
        flavor: phi.flavor,
        stage: TractorStage::Stage0,
        comps,
    }
}

/// `D₀φ₀ = dφ₀ + ϖ₀φ₀`, one vector per direction.
pub fn tractor_derivative(w0: &MatrixForm, phi0: &TractorField) -> Vec<Vec<Taylor>> {
    w0.comps
        .iter()
        .enumerate()
        .map(|(l, w)| {
            let wphi = apply(w, &phi0.comps);
            phi0.comps.iter().zip(wphi).map(|(p, q)| p.deriv(l) + q).collect()
        })
        .collect()
}

/// Componentwise `D₀φ₀` from `Γ`, `P` and `g`.
/// Projective: `(∇_λl^μ + σδ^μ_λ, ∂_λσ + P_{νλ}l^ν)`.
/// Conformal: `(∂_λρ + P_{νλ}l^ν, ∇_λl^μ + ρδ^μ_λ + P^μ_λσ, ∂_λσ + g_{νλ}l^ν)`.
pub fn tractor_derivative_components(geom: &Geometry, phi0: &TractorField) -> Vec<Vec<Taylor>> {
    let n = geom.n();
    let l_of: &[Taylor] = match phi0.flavor {
        Flavor::Conformal => &phi0.comps[1..=n],
        Flavor::Projective => &phi0.comps[..n],
    };
    let sigma = *phi0.comps.last().unwrap();
    let p_up = raise_schouten(&geom.metric, &geom.schouten);
    (0..n)
        .map(|l| {
            let nabla: Vec<Taylor> = (0..n)
                .map(|m| {
                    let mut t = l_of[m].deriv(l);
                    for v in 0..n {
                        t += geom.gamma[(m, v, l)] * l_of[v];
                    }
                    t
                })
                .collect();
            let contract = |t: &Mat<Taylor>| {
                let mut s = zero(n);
                for v in 0..n {
                    s += t[(v, l)] * l_of[v];
                }
                s
            };
            match phi0.flavor {
                Flavor::Projective => {
                    let mut out: Vec<Taylor> = (0..n)
                        .map(|m| if m == l { nabla[m] + sigma } else { nabla[m] })
                        .collect();
                    out.push(sigma.deriv(l) + contract(&geom.schouten));
                    out
                }
                Flavor::Conformal => {
                    let rho = phi0.comps[0];
                    let mut out = vec![rho.deriv(l) + contract(&geom.schouten)];
                    for m in 0..n {
                        let mut t = nabla[m] + p_up[(m, l)] * sigma;
                        if m == l {
                            t += rho;
                        }
                        out.push(t);
                    }
                    out.push(sigma.deriv(l) + contract(&geom.metric.g));
                    out
                }
            }
        })
        .collect()
}

/// Residual Weyl law of a dressed tractor.
/// Projective `(z⁻¹l, z⁻¹(σ − ζ_νl^ν))`; conformal
/// `(z⁻¹(ρ − γ_μl^μ + ½γ²σ), z⁻¹(l^μ − g^{μν}γ_νσ), zσ)`.
pub fn tractor_weyl(phi0: &TractorField, w: &WeylFactor, metric: &MetricValue) -> TractorField {
    let n = metric.n;
    let zi = w.z.recip();
    let comps = match phi0.flavor {
        Flavor::Projective => {
            let l = &phi0.comps[..n];
            let mut s = phi0.comps[n];
            for v in 0..n {
                s -= w.zeta[v] * l[v];
            }
            let mut out: Vec<Taylor> = l.iter().map(|t| *t * zi).collect();
            out.push(s * zi);
            out
        }
        Flavor::Conformal => {
            let rho = phi0.comps[0];
            let l = &phi0.comps[1..=n];
            let sigma = phi0.comps[n + 1];
            let up: Vec<Taylor> = (0..n)
                .map(|m| {
                    let mut t = zero(n);
                    for v in 0..n {
                        t += metric.ginv[(m, v)] * w.zeta[v];
                    }
                    t
                })
                .collect();
            let mut r = rho;
            let mut sq = zero(n);
            for m in 0..n {
                r -= w.zeta[m] * l[m];
                sq += w.zeta[m] * up[m];
            }
            r += sq * sigma * 0.5;
            let mut out = vec![r * zi];
            for m in 0..n {
                out.push((l[m] - up[m] * sigma) * zi);
            }
            out.push(w.z * sigma);
            out
        }
    };
    TractorField {
        flavor: phi0.flavor,
        stage: TractorStage::Stage0,
        comps,
    }
}

/// Residuals of the tractor checks at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TractorReport {
    /// Matrix dressing against the closed form.
    pub dressing: f64,
    /// `D₀φ₀` by matrix action against the component display.
    pub derivative: f64,
    /// Weyl law against `C⁻¹φ₀`.
    pub weyl: f64,
    /// `D₀^Zφ₀^Z` against `C⁻¹D₀φ₀`.
    pub covariance: f64,
}

pub fn tractor_checks(
    geom: &Geometry,
    sec: &SectionField,
    phi: &TractorField,
    w: &WeylFactor,
) -> Result<TractorReport> {
    let p = pipeline(geom, sec)?;
    let phi0 = tractor_dress(phi, &p.u1, &p.u0)?;
    let dressing = phi0.max_abs_diff(&tractor_dress_closed(phi, geom, sec));
    let d_matrix = tractor_derivative(&p.w0, &phi0);
    let d_comp = tractor_derivative_components(geom, &phi0);
    let gap = |a: &[Vec<Taylor>], b: &[Vec<Taylor>]| {
        a.iter()
            .zip(b)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(s, t)| s.max_abs_diff(t)))
            .fold(0.0, f64::max)
    };
    let derivative = gap(&d_matrix, &d_comp);
    let c = c_matrix(geom.flavor, w, &geom.metric);
    let ci = c
        .inverse()
        .ok_or_else(|| Error::NotInGroup("residual factor is singular".into()))?;
    let phi_z = tractor_weyl(&phi0, w, &geom.metric);
    let weyl = phi_z.max_abs_diff(&TractorField {
        flavor: phi0.flavor,
        stage: TractorStage::Stage0,
        comps: apply(&ci, &phi0.comps),
    });
    let w0_z = gauge_transform(&p.w0, &c)?;
    let lhs = tractor_derivative(&w0_z, &phi_z);
    let rhs: Vec<Vec<Taylor>> = d_matrix.iter().map(|v| apply(&ci, v)).collect();
    let covariance = gap(&lhs, &rhs);
    Ok(TractorReport {
        dressing,
        derivative,
        weyl,
        covariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::fields::{random_covector, random_gl_field, random_lorentz_field, random_metric, taylor_vec};
    use crate::metric::{MetricField, Signature, FIELD_ORDER};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(flavor: Flavor, seed: u64) -> (Geometry, SectionField, Vec<f64>, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let at: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.4..0.4)).collect();
        let m = random_metric(&mut rng, Signature::Lorentzian, &at, 0.1).unwrap();
        let g = m.eval(&at, FIELD_ORDER).unwrap();
        let geom = g.geometry(flavor).unwrap();
        let low = taylor_vec(&random_covector(&mut rng, &at, 0.4), &at, FIELD_ORDER).unwrap();
        let sec = SectionField::orthonormal(flavor, &g, &at).unwrap().with_low(low);
        (geom, sec, at, rng)
    }

    #[test]
    fn dressed_content_and_staging() {
        for flavor in Flavor::both() {
            let (geom, sec, _, _) = setup(flavor, 1);
            let p = pipeline(&geom, &sec).unwrap();
            let (s1, s0) = content_residuals(&geom, &sec, &p);
            assert!(s1 < 1e-11 && s0 < 1e-11, "{flavor:?} {s1} {s0}");
            assert!(staged_residual(&p).unwrap() < 1e-12);
            assert!(low_independence(&geom, &sec).unwrap() < 1e-11);
        }
    }

    #[test]
    fn dress_is_gauge_transform() {
        let (geom, sec, _, _) = setup(Flavor::Conformal, 2);
        let p = pipeline(&geom, &sec).unwrap();
        let a = dress(&p.omega, &p.u1).unwrap();
        let b = gauge_transform(&p.omega, &p.u1.matrix).unwrap();
        for (x, y) in a.comps.iter().zip(&b.comps) {
            for i in 0..x.rows() {
                for j in 0..x.cols() {
                    assert_eq!(x[(i, j)].coeffs(), y[(i, j)].coeffs());
                }
            }
        }
    }

    #[test]
    fn invariance_under_reduced_gauges() {
        for flavor in Flavor::both() {
            let (geom, sec, at, mut rng) = setup(flavor, 3);
            let n = at.len();
            let special =
                GaugeField::special(taylor_vec(&random_covector(&mut rng, &at, 0.4), &at, FIELD_ORDER).unwrap());
            let rot = match flavor {
                Flavor::Conformal => random_lorentz_field(&mut rng, &sec.eta, &at, 0.3),
                Flavor::Projective => random_gl_field(&mut rng, n, &at, 0.3),
            };
            let rotation = GaugeField::rotation(rot.taylor(&at, FIELD_ORDER).unwrap());
            for g in [special, rotation] {
                let r = invariance(&geom, &sec, &g, &at).unwrap();
                assert!(r.max() < 1e-10, "{flavor:?} {:?} {r:?}", g.kind);
            }
        }
    }

    #[test]
    fn residual_weyl_laws() {
        for flavor in Flavor::both() {
            let (geom, sec, at, _) = setup(flavor, 4);
            let n = at.len();
            for src in ["exp(x0)", "1 + 0.2*x1"] {
                let z = parse(src, n).unwrap().eval_taylor(&at, FIELD_ORDER).unwrap();
                let w = WeylFactor::new(z, &at).unwrap();
                assert!(w.zeta_residual() < 1e-13);
                let r = residual_weyl(&geom, &sec, &w, &at).unwrap();
                assert!(r.law < 1e-10, "{flavor:?} {src} law {}", r.law);
                assert!(r.factorization < 1e-11, "{flavor:?} {src} fact {}", r.factorization);
                assert!(r.recompute < 1e-10, "{flavor:?} {src} recompute {}", r.recompute);
            }
        }
    }

    #[test]
    fn tractor_identities() {
        for flavor in Flavor::both() {
            let (geom, sec, at, mut rng) = setup(flavor, 5);
            let n = at.len();
            let k = if flavor == Flavor::Conformal { n + 2 } else { n + 1 };
            let comps: Vec<Taylor> = (0..k)
                .map(|_| {
                    crate::fields::random_scalar(&mut rng, &at, 0.5)
                        .eval_taylor(&at, FIELD_ORDER)
                        .unwrap()
                })
                .collect();
            let phi = TractorField::new(flavor, TractorStage::Raw, comps, n).unwrap();
            let z = parse("exp(x0)", n).unwrap().eval_taylor(&at, FIELD_ORDER).unwrap();
            let w = WeylFactor::new(z, &at).unwrap();
            let r = tractor_checks(&geom, &sec, &phi, &w).unwrap();
            assert!(
                r.dressing < 1e-12 && r.derivative < 1e-11 && r.weyl < 1e-12 && r.covariance < 1e-10,
                "{flavor:?} {r:?}"
            );
        }
    }

    #[test]
    fn flat_identity_dressings_are_trivial() {
        let n = 4;
        let m = MetricField::diagonal(
            "flat",
            Signature::Lorentzian,
            (0..n)
                .map(|i| parse(if i == 0 { "-1" } else { "1" }, n).unwrap())
                .collect(),
        )
        .unwrap();
        let at = [0.0; 4];
        let g = m.eval(&at, FIELD_ORDER).unwrap();
        for flavor in Flavor::both() {
            let geom = g.geometry(flavor).unwrap();
            let sec = SectionField::orthonormal(flavor, &g, &at).unwrap();
            let (u1, u0) = build_dressings(&geom, &sec);
            let k = u1.matrix.rows();
            let id = Mat::identity(k).constant_field(n);
            assert!(u1.matrix.max_abs_diff(&id) < 1e-15 && u0.matrix.max_abs_diff(&id) < 1e-15);
        }
    }
}
