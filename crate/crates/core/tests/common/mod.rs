//! Test-side oracles, independent of the library's arithmetic: truncated
//! polynomials in sparse monomial form, polynomial maps and Levi-Civita
//! geometry computed from them.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use cartan_dress::jets::{Jet2, Jet3};
use cartan_dress::scalar::{Mat, Tensor3, Tensor4};
use rand::Rng;

/// Polynomial in displacements `h_0 … h_{n-1}`, truncated above `deg`.
#[derive(Clone, Debug)]
pub struct Poly {
    pub n: usize,
    pub deg: usize,
    pub terms: BTreeMap<Vec<u8>, f64>,
}

impl Poly {
    pub fn constant(n: usize, deg: usize, c: f64) -> Poly {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(vec![0; n], c);
        }
        Poly { n, deg, terms }
    }

    /// `at + h_i`.
    pub fn var(n: usize, deg: usize, i: usize, at: f64) -> Poly {
        let mut p = Poly::constant(n, deg, at);
        if deg >= 1 {
            let mut e = vec![0; n];
            e[i] = 1;
            p.terms.insert(e, 1.0);
        }
        p
    }

    /// The `i`-th displacement `h_i`.
    pub fn h(n: usize, deg: usize, i: usize) -> Poly {
        Poly::var(n, deg, i, 0.0)
    }

    pub fn zero(&self) -> Poly {
        Poly::constant(self.n, self.deg, 0.0)
    }

    pub fn value(&self) -> f64 {
        self.terms.get(&vec![0; self.n]).copied().unwrap_or(0.0)
    }

    fn c(&self, c: f64) -> Poly {
        Poly::constant(self.n, self.deg, c)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly {
            n: self.n,
            deg: self.deg,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    /// `∂/∂h_i`, one degree lower.
    pub fn d(&self, i: usize) -> Poly {
        let mut out = Poly::constant(self.n, self.deg.saturating_sub(1), 0.0);
        for (k, v) in &self.terms {
            if k[i] > 0 {
                let mut e = k.clone();
                e[i] -= 1;
                *out.terms.entry(e).or_insert(0.0) += v * k[i] as f64;
            }
        }
        out
    }

    /// `∂^α` at the origin for the multi-index listing `vars`.
    pub fn partial(&self, vars: &[usize]) -> f64 {
        let mut e = vec![0u8; self.n];
        for &v in vars {
            e[v] += 1;
        }
        let fact: f64 = e.iter().map(|k| (1..=*k as u32).product::<u32>() as f64).product();
        self.terms.get(&e).copied().unwrap_or(0.0) * fact
    }

    fn series(&self, coeffs: &[f64]) -> Poly {
        // Σ c_k q^k with q = self − value.
        let q = self.clone() - self.c(self.value());
        let mut out = self.c(coeffs[0]);
        let mut pow = self.c(1.0);
        for ck in coeffs.iter().skip(1) {
            pow = &pow * &q;
            out = out + pow.scale(*ck);
        }
        out
    }

    pub fn recip(&self) -> Poly {
        let v = self.value();
        let coeffs: Vec<f64> = (0..=self.deg)
            .map(|k| (-1f64).powi(k as i32) / v.powi(k as i32 + 1))
            .collect();
        self.series(&coeffs)
    }

    pub fn exp(&self) -> Poly {
        let v = self.value().exp();
        let mut f = 1.0;
        let coeffs: Vec<f64> = (0..=self.deg)
            .map(|k| {
                if k > 0 {
                    f *= k as f64;
                }
                v / f
            })
            .collect();
        self.series(&coeffs)
    }

    pub fn sin(&self) -> Poly {
        let (s, c) = self.value().sin_cos();
        let derivs = [s, c, -s, -c];
        self.taylor_of(|k| derivs[k % 4])
    }

    pub fn cos(&self) -> Poly {
        let (s, c) = self.value().sin_cos();
        let derivs = [c, -s, -c, s];
        self.taylor_of(|k| derivs[k % 4])
    }

    pub fn cosh(&self) -> Poly {
        let (a, b) = (self.value().cosh(), self.value().sinh());
        self.taylor_of(|k| if k % 2 == 0 { a } else { b })
    }

    /// Composition with a scalar function given by its derivatives at the value.
    fn taylor_of(&self, f: impl Fn(usize) -> f64) -> Poly {
        let mut fact = 1.0;
        let coeffs: Vec<f64> = (0..=self.deg)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                f(k) / fact
            })
            .collect();
        self.series(&coeffs)
    }

    pub fn powi(&self, k: u32) -> Poly {
        let mut out = self.c(1.0);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, o: Poly) -> Poly {
        for (k, v) in o.terms {
            *self.terms.entry(k).or_insert(0.0) += v;
        }
        self.deg = self.deg.min(o.deg);
        let d = self.deg;
        self.terms
            .retain(|k, _| k.iter().map(|x| *x as usize).sum::<usize>() <= d);
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        self + (-o)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let deg = self.deg.min(o.deg);
        let mut terms = BTreeMap::new();
        for (ka, va) in &self.terms {
            let da: usize = ka.iter().map(|x| *x as usize).sum();
            for (kb, vb) in &o.terms {
                let db: usize = kb.iter().map(|x| *x as usize).sum();
                if da + db > deg {
                    continue;
                }
                let k: Vec<u8> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                *terms.entry(k).or_insert(0.0) += va * vb;
            }
        }
        Poly { n: self.n, deg, terms }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}

impl Mul<f64> for Poly {
    type Output = Poly;
    fn mul(self, s: f64) -> Poly {
        self.scale(s)
    }
}

impl Add<f64> for Poly {
    type Output = Poly;
    fn add(self, s: f64) -> Poly {
        let c = self.c(s);
        self + c
    }
}

pub type PMat = Vec<Vec<Poly>>;

/// Gauss–Jordan inverse of a polynomial matrix with invertible value.
pub fn pinv(m: &PMat) -> PMat {
    let k = m.len();
    let z = m[0][0].zero();
    let mut a = m.clone();
    let mut inv: PMat = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { z.clone() + 1.0 } else { z.clone() })
                .collect()
        })
        .collect();
    for col in 0..k {
        let piv = (col..k)
            .max_by(|x, y| a[*x][col].value().abs().total_cmp(&a[*y][col].value().abs()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let r = a[col][col].recip();
        for j in 0..k {
            a[col][j] = &a[col][j] * &r;
            inv[col][j] = &inv[col][j] * &r;
        }
        for i in 0..k {
            if i != col {
                let f = a[i][col].clone();
                for j in 0..k {
                    a[i][j] = a[i][j].clone() - &f * &a[col][j];
                    inv[i][j] = inv[i][j].clone() - &f * &inv[col][j];
                }
            }
        }
    }
    inv
}

/// Connection coefficients `Γ^m_{vl}` as polynomials, indexed `[m][v][l]`.
pub type PConn = Vec<Vec<Vec<Poly>>>;

pub fn levi_civita(g: &PMat) -> PConn {
    let n = g.len();
    let gi = pinv(g);
    let dg: Vec<PMat> = (0..n)
        .map(|l| g.iter().map(|row| row.iter().map(|e| e.d(l)).collect()).collect())
        .collect();
    (0..n)
        .map(|m| {
            (0..n)
                .map(|v| {
                    (0..n)
                        .map(|l| {
                            let mut s = dg[0][0][0].zero();
                            for r in 0..n {
                                let t = dg[v][r][l].clone() + dg[l][r][v].clone() - dg[r][v][l].clone();
                                s = s + &gi[m][r] * &t;
                            }
                            s * 0.5
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `Ric_{sv} = ∂_r Γ^r_{vs} − ∂_v Γ^r_{rs} + Γ^r_{rl} Γ^l_{vs} − Γ^r_{vl} Γ^l_{rs}` at the point.
pub fn ricci_of(gam: &PConn) -> Mat<f64> {
    let n = gam.len();
    let val = |p: &Poly| p.value();
    Mat::from_fn(n, n, |s, v| {
        let mut t = 0.0;
        for r in 0..n {
            t += gam[r][v][s].d(r).value() - gam[r][r][s].d(v).value();
            for l in 0..n {
                t += val(&gam[r][r][l]) * val(&gam[l][v][s]) - val(&gam[r][v][l]) * val(&gam[l][r][s]);
            }
        }
        t
    })
}

pub fn conn_values(gam: &PConn) -> Tensor3<f64> {
    Tensor3::from_fn(gam.len(), |m, v, l| gam[m][v][l].value())
}

/// Levi-Civita data at a point, from the metric as a polynomial matrix.
pub struct OracleGeometry {
    pub n: usize,
    pub g: Mat<f64>,
    pub ginv: Mat<f64>,
    pub gamma: Tensor3<f64>,
    /// `∂_l Γ^m_{vk}`, indexed by `l`.
    pub dgamma: Vec<Tensor3<f64>>,
    pub ricci: Mat<f64>,
    pub scalar: f64,
}

pub type MetricFn = fn(&[Poly]) -> PMat;

pub fn poly_point(x: &[f64]) -> Vec<Poly> {
    let n = x.len();
    (0..n).map(|i| Poly::var(n, 2, i, x[i])).collect()
}

impl OracleGeometry {
    pub fn new(metric: &dyn Fn(&[Poly]) -> PMat, x: &[f64]) -> OracleGeometry {
        let n = x.len();
        let g = metric(&poly_point(x));
        let gam = levi_civita(&g);
        let ricci = ricci_of(&gam);
        let gi = pinv(&g);
        let gm = Mat::from_fn(n, n, |i, j| g[i][j].value());
        let ginv = Mat::from_fn(n, n, |i, j| gi[i][j].value());
        let scalar = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| ginv[(i, j)] * ricci[(i, j)])
            .sum();
        OracleGeometry {
            n,
            g: gm,
            ginv,
            gamma: conn_values(&gam),
            dgamma: (0..n)
                .map(|l| Tensor3::from_fn(n, |m, v, k| gam[m][v][k].d(l).value()))
                .collect(),
            ricci,
            scalar,
        }
    }

    /// `−(Ric − R g/(2(n−1)))/(n−2)`.
    pub fn schouten_conformal(&self) -> Mat<f64> {
        let n = self.n as f64;
        Mat::from_fn(self.n, self.n, |i, j| {
            -(self.ricci[(i, j)] - self.scalar * self.g[(i, j)] / (2.0 * (n - 1.0))) / (n - 2.0)
        })
    }

    /// `−Ric/(n−1)`.
    pub fn schouten_projective(&self) -> Mat<f64> {
        self.ricci.scale(-1.0 / (self.n as f64 - 1.0))
    }

    pub fn schouten(&self, conformal: bool) -> Mat<f64> {
        if conformal {
            self.schouten_conformal()
        } else {
            self.schouten_projective()
        }
    }

    /// `Υ_μ = −Γ^λ_{λμ}/k` with `k = n` (conformal) or `n + 1`, and its
    /// partial derivatives `∂_ν Υ_μ` indexed `[(ν, μ)]`.
    pub fn upsilon(&self, conformal: bool) -> (Vec<f64>, Mat<f64>) {
        let n = self.n;
        let k = if conformal { n as f64 } else { n as f64 + 1.0 };
        let ups = (0..n)
            .map(|m| -(0..n).map(|l| self.gamma[(l, l, m)]).sum::<f64>() / k)
            .collect();
        let dups = Mat::from_fn(n, n, |v, m| -(0..n).map(|l| self.dgamma[v][(l, l, m)]).sum::<f64>() / k);
        (ups, dups)
    }

    /// `(Π^ρ_{μν}, Π_{μν})`.
    pub fn pi(&self, conformal: bool) -> (Tensor3<f64>, Mat<f64>) {
        let n = self.n;
        let (ups, dups) = self.upsilon(conformal);
        let ups_up: Vec<f64> = (0..n)
            .map(|r| (0..n).map(|l| self.ginv[(r, l)] * ups[l]).sum())
            .collect();
        let sq: f64 = (0..n).map(|a| ups[a] * ups_up[a]).sum();
        let conn = Tensor3::from_fn(n, |r, m, v| {
            let mut s = self.gamma[(r, m, v)];
            if r == m {
                s += ups[v];
            }
            if r == v {
                s += ups[m];
            }
            if conformal {
                s -= ups_up[r] * self.g[(m, v)];
            }
            s
        });
        let p = self.schouten(conformal);
        let tensor = Mat::from_fn(n, n, |m, v| {
            let nab = dups[(m, v)] - (0..n).map(|l| self.gamma[(l, m, v)] * ups[l]).sum::<f64>();
            let mut s = p[(m, v)] + nab - ups[m] * ups[v];
            if conformal {
                s += 0.5 * sq * self.g[(m, v)];
            }
            s
        });
        (conn, tensor)
    }

    /// Expected fully dressed connection, one matrix per direction.
    pub fn dressed(&self, conformal: bool) -> Vec<Mat<f64>> {
        let n = self.n;
        let p = self.schouten(conformal);
        let p_up = &self.ginv * &p;
        (0..n)
            .map(|l| {
                if conformal {
                    let mut m = Mat::zeros(n + 2, n + 2);
                    m[(l + 1, 0)] = 1.0;
                    for mu in 0..n {
                        m[(0, mu + 1)] = p[(mu, l)];
                        m[(mu + 1, n + 1)] = p_up[(mu, l)];
                        m[(n + 1, mu + 1)] = self.g[(mu, l)];
                        for v in 0..n {
                            m[(mu + 1, v + 1)] = self.gamma[(mu, v, l)];
                        }
                    }
                    m
                } else {
                    let mut m = Mat::zeros(n + 1, n + 1);
                    m[(l, n)] = 1.0;
                    for mu in 0..n {
                        m[(n, mu)] = p[(mu, l)];
                        for v in 0..n {
                            m[(mu, v)] = self.gamma[(mu, v, l)];
                        }
                    }
                    m
                }
            })
            .collect()
    }
}

/// Largest entry of `|a − b|`.
pub fn mdiff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    a.max_abs_diff(b)
}

pub fn tdiff(a: &Tensor3<f64>, b: &Tensor3<f64>) -> f64 {
    a.max_abs_diff(b)
}

/// Evaluates the jet map `x ↦ h¹x + ½h²xx + ⅙h³xxx` on polynomials.
pub fn apply_jet3(j: &Jet3, x: &[Poly]) -> Vec<Poly> {
    let n = x.len();
    (0..n)
        .map(|a| {
            let mut s = x[0].zero();
            for b in 0..n {
                s = s + x[b].clone() * j.first[(a, b)];
                for c in 0..n {
                    let xbc = &x[b] * &x[c];
                    s = s + xbc.clone() * (0.5 * j.second[(a, b, c)]);
                    for d in 0..n {
                        s = s + (&xbc * &x[d]) * (j.third[(a, b, c, d)] / 6.0);
                    }
                }
            }
            s
        })
        .collect()
}

/// 3-jet at the origin of a polynomial map.
pub fn jet3_of(f: &[Poly]) -> Jet3 {
    let n = f.len();
    Jet3 {
        first: Mat::from_fn(n, n, |a, b| f[a].partial(&[b])),
        second: Tensor3::from_fn(n, |a, b, c| f[a].partial(&[b, c])),
        third: Tensor4::from_fn(n, |a, b, c, d| f[a].partial(&[b, c, d])),
    }
}

pub fn jet2_of(f: &[Poly]) -> Jet2 {
    let n = f.len();
    Jet2 {
        first: Mat::from_fn(n, n, |a, b| f[a].partial(&[b])),
        second: Tensor3::from_fn(n, |a, b, c| f[a].partial(&[b, c])),
    }
}

pub fn identity_map(n: usize, deg: usize) -> Vec<Poly> {
    (0..n).map(|i| Poly::h(n, deg, i)).collect()
}

/// Random 3-jet with symmetric higher coefficients and a well-conditioned
/// first-order part.
pub fn random_jet3<R: Rng>(rng: &mut R, n: usize) -> Jet3 {
    let first = Mat::from_fn(n, n, |i, j| (i == j) as u8 as f64 + rng.gen_range(-0.4..0.4));
    let mut s2 = vec![0.0; n * n * n];
    let mut s3 = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let v = rng.gen_range(-1.0..1.0);
                s2[(a * n + b) * n + c] = v;
                s2[(a * n + c) * n + b] = v;
                for d in c..n {
                    let w = rng.gen_range(-1.0..1.0);
                    for (p, q, r) in [(b, c, d), (b, d, c), (c, b, d), (c, d, b), (d, b, c), (d, c, b)] {
                        s3[((a * n + p) * n + q) * n + r] = w;
                    }
                }
            }
        }
    }
    Jet3 {
        first,
        second: Tensor3::from_fn(n, |a, b, c| s2[(a * n + b) * n + c]),
        third: Tensor4::from_fn(n, |a, b, c, d| s3[((a * n + b) * n + c) * n + d]),
    }
}

/// Diagonal metric helper.
pub fn diag_metric(d: Vec<Poly>) -> PMat {
    let n = d.len();
    let z = d[0].zero();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { z.clone() }).collect())
        .collect()
}

/// Symmetric metric from its upper triangle, row-major.
pub fn upper_metric(n: usize, upper: Vec<Poly>) -> PMat {
    let mut it = upper.into_iter();
    let mut m: Vec<Vec<Option<Poly>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i..n {
            let p = it.next().expect("upper triangle");
            m[j][i] = Some(p.clone());
            m[i][j] = Some(p);
        }
    }
    m.into_iter()
        .map(|r| r.into_iter().map(|p| p.unwrap()).collect())
        .collect()
}

/// Corpus metrics, transcribed by hand.
pub fn corpus_metric(name: &str) -> MetricFn {
    match name {
        "flat3" | "flat4" | "flat5" => |x| {
            let n = x.len();
            diag_metric((0..n).map(|i| x[0].zero() + if i == 0 { -1.0 } else { 1.0 }).collect())
        },
        "conf_flat" => |x| {
            let e = (x[0].clone() * 2.0).exp();
            diag_metric(vec![-e.clone(), e.clone(), e.clone(), e])
        },
        "conf_wave" => |x| {
            let e = (x[1].sin() * 0.6).exp();
            diag_metric(vec![-e.clone(), e.clone(), e.clone(), e])
        },
        "sphere3" => |x| {
            let s0 = x[0].sin().powi(2);
            let s1 = x[1].sin().powi(2);
            diag_metric(vec![x[0].zero() + 1.0, s0.clone(), &s0 * &s1])
        },
        "perturbed4" => |x| {
            let [x0, x1, x2, x3] = [&x[0], &x[1], &x[2], &x[3]];
            let one = x0.zero() + 1.0;
            upper_metric(
                4,
                vec![
                    -one.clone() + (x1 * x2 - (x0 * x0) * 0.5 + (x3.clone() + x0.clone() * 0.3).sin()) * 0.1,
                    (x2.clone() * 0.4 - x0 * x3) * 0.1,
                    ((x1 * x1) + 0.2) * 0.1,
                    (x0.clone() - x2.clone()).cos() * 0.1,
                    one.clone() + ((x0 * x3) + (x2 * x2) * 0.7) * 0.1,
                    (x3.clone() - (x0 * x1) * 0.5) * 0.1,
                    (x1.clone() + x2.clone() * 2.0).sin() * 0.1,
                    one.clone() + (x0.clone() * 0.3 - x1 * x3 + (x2 * x2) * 0.2) * 0.1,
                    ((x0 * x0) - x1.clone() * 0.4) * 0.1,
                    one + ((x1 * x2) * 0.5 + x0.sin()) * 0.1,
                ],
            )
        },
        "riemann4" => |x| {
            let [x0, x1, x2, x3] = [&x[0], &x[1], &x[2], &x[3]];
            let z = x0.zero();
            upper_metric(
                4,
                vec![
                    (x1 * x1) * 0.3 + 1.0,
                    x2.clone() * 0.2,
                    z.clone(),
                    x3.sin() * 0.1,
                    (x0.clone() * 0.4).exp(),
                    (x0 * x3) * 0.1,
                    z,
                    (x0 * x1) * 0.2 + 1.0,
                    x1.clone() * 0.15,
                    (x2.clone() * 0.5).cosh(),
                ],
            )
        },
        other => panic!("no oracle metric for {other}"),
    }
}
