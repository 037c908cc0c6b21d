//! Metric spec files.
//!
//! A spec is a TOML document:
//!
//! ```toml
//! name = "conf_flat"
//! dimension = 4
//! signature = "lorentzian"          # or "riemannian"
//! coordinates = ["t", "x", "y", "z"] # informational
//! base_point = [0.0, 0.0, 0.0, 0.0]  # default: origin
//! box = [0.5, 0.5, 0.5, 0.5]         # sample half-widths, default 0.5
//!
//! [metric]                           # every gIJ with I <= J is required
//! g00 = "-exp(2*x0)"
//! g01 = "0"
//! # ...
//!
//! [section]                          # optional
//! frame = [["1", "0", ...], ...]     # e^mu_a, row mu
//! low = ["0", "0", "0", "0"]         # e_a
//! ```
//!
//! Entries use the expression grammar over `x0 … x{n-1}`. A lower entry
//! `gJI` may be given as well but must match `gIJ`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::fields::halton_cloud;
use crate::forms::SectionField;
use crate::metric::{Flavor, MetricField, MetricValue, Signature, FIELD_ORDER};
use crate::scalar::Mat;
use crate::taylor::Taylor;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    dimension: usize,
    signature: Signature,
    #[serde(default)]
    coordinates: Vec<String>,
    base_point: Option<Vec<f64>>,
    #[serde(rename = "box")]
    half_width: Option<Vec<f64>>,
    metric: BTreeMap<String, String>,
    section: Option<RawSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSection {
    frame: Option<Vec<Vec<String>>>,
    low: Option<Vec<String>>,
}

/// Optional section overrides.
#[derive(Clone, Debug, Default)]
pub struct SectionSpec {
    pub frame: Option<Vec<Vec<Expr>>>,
    pub low: Option<Vec<Expr>>,
}

/// A validated metric spec.
#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub n: usize,
    pub signature: Signature,
    pub coordinates: Vec<String>,
    pub base_point: Vec<f64>,
    pub half_width: Vec<f64>,
    pub metric: MetricField,
    pub section: SectionSpec,
}

fn field_err(field: &str, e: Error) -> Error {
    Error::Spec(format!("{field}: {e}"))
}

fn parse_at(field: &str, src: &str, n: usize) -> Result<Expr> {
    parse(src, n).map_err(|e| field_err(field, e))
}

fn metric_key(key: &str, n: usize) -> Option<(usize, usize)> {
    let d = key.strip_prefix('g')?;
    let b = d.as_bytes();
    if b.len() != 2 || !b.iter().all(u8::is_ascii_digit) {
        return None;
    }
    let (i, j) = ((b[0] - b'0') as usize, (b[1] - b'0') as usize);
    (i < n && j < n).then_some((i, j))
}

impl MetricSpec {
    pub fn parse(text: &str, origin: &str) -> Result<MetricSpec> {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| Error::Spec(format!("{origin}: {}", e.to_string().trim_end())))?;
        let n = raw.dimension;
        if !(3..=5).contains(&n) {
            return Err(Error::Spec(format!("{origin}: dimension must be 3, 4 or 5, found {n}")));
        }
        let sized = |field: &str, v: Option<Vec<f64>>, default: f64| -> Result<Vec<f64>> {
            match v {
                None => Ok(vec![default; n]),
                Some(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => Ok(v),
                Some(v) => Err(Error::Spec(format!(
                    "{origin}: {field} needs {n} finite entries, found {}",
                    v.len()
                ))),
            }
        };
        let base_point = sized("base_point", raw.base_point, 0.0)?;
        let half_width = sized("box", raw.half_width, 0.5)?;
        if half_width.iter().any(|w| *w < 0.0) {
            return Err(Error::Spec(format!("{origin}: box half-widths must be non-negative")));
        }
        if !raw.coordinates.is_empty() && raw.coordinates.len() != n {
            return Err(Error::Spec(format!(
                "{origin}: coordinates lists {} names for dimension {n}",
                raw.coordinates.len()
            )));
        }

        let mut cells: BTreeMap<(usize, usize), Expr> = BTreeMap::new();
        for (key, src) in &raw.metric {
            let (i, j) = metric_key(key, n).ok_or_else(|| {
                Error::Spec(format!(
                    "{origin}: metric.{key}: expected g<i><j> with indices below {n}"
                ))
            })?;
            cells.insert((i, j), parse_at(&format!("{origin}: metric.{key}"), src, n)?);
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let e = cells
                    .get(&(i, j))
                    .ok_or_else(|| Error::Spec(format!("{origin}: metric.g{i}{j} is missing")))?;
                if let Some(lower) = cells.get(&(j, i)) {
                    if i != j && lower.canonical() != e.canonical() {
                        return Err(Error::Spec(format!("{origin}: {}", Error::Asymmetric { i, j })));
                    }
                }
                upper.push(e.clone());
            }
        }
        let metric = MetricField::from_upper(&raw.name, n, raw.signature, upper).map_err(|e| field_err(origin, e))?;

        let section = match raw.section {
            None => SectionSpec::default(),
            Some(s) => {
                let frame = match s.frame {
                    None => None,
                    Some(rows) => {
                        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                            return Err(Error::Spec(format!("{origin}: section.frame must be {n}x{n}")));
                        }
                        let mut out = Vec::with_capacity(n);
                        for (m, row) in rows.iter().enumerate() {
                            let mut r = Vec::with_capacity(n);
                            for (a, src) in row.iter().enumerate() {
                                r.push(parse_at(&format!("{origin}: section.frame[{m}][{a}]"), src, n)?);
                            }
                            out.push(r);
                        }
                        Some(out)
                    }
                };
                let low = match s.low {
                    None => None,
                    Some(v) => {
                        if v.len() != n {
                            return Err(Error::Spec(format!("{origin}: section.low needs {n} entries")));
                        }
                        Some(
                            v.iter()
                                .enumerate()
                                .map(|(a, src)| parse_at(&format!("{origin}: section.low[{a}]"), src, n))
                                .collect::<Result<_>>()?,
                        )
                    }
                };
                SectionSpec { frame, low }
            }
        };

        let spec = MetricSpec {
            name: raw.name,
            n,
            signature: raw.signature,
            coordinates: raw.coordinates,
            base_point,
            half_width,
            metric,
            section,
        };
        spec.eval(&spec.base_point)
            .map_err(|e| Error::Spec(format!("{origin}: at base point: {e}")))?;
        Ok(spec)
    }

    /// Metric expanded at `x` to the order connection assembly needs.
    pub fn eval(&self, x: &[f64]) -> Result<MetricValue> {
        self.metric.eval(x, FIELD_ORDER)
    }

    /// Quasi-random points in the sample box around the base point.
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        halton_cloud(&self.base_point, &self.half_width, count)
    }

    /// Section at `x`: the override if given, else the orthonormal frame with
    /// `e_a ≡ 0`.
    pub fn section(&self, flavor: Flavor, metric: &MetricValue, x: &[f64]) -> Result<SectionField> {
        let n = self.n;
        let frame = match &self.section.frame {
            Some(rows) => {
                let mut cells = Vec::with_capacity(n * n);
                for row in rows {
                    for e in row {
                        cells.push(e.eval_taylor(x, FIELD_ORDER)?);
                    }
                }
                Mat::from_fn(n, n, |m, a| cells[m * n + a])
            }
            None => metric.orthonormal_frame(x)?,
        };
        let low: Vec<Taylor> = match &self.section.low {
            Some(v) => v.iter().map(|e| e.eval_taylor(x, FIELD_ORDER)).collect::<Result<_>>()?,
            None => vec![Taylor::constant(n, 0.0); n],
        };
        SectionField::new(flavor, metric.eta(), frame, low, x)
    }
}

pub fn load_spec(path: &Path) -> Result<MetricSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    MetricSpec::parse(&text, &path.display().to_string())
}

const CORPUS: [(&str, &str); 8] = [
    ("flat3.toml", include_str!("../corpus/flat3.toml")),
    ("flat4.toml", include_str!("../corpus/flat4.toml")),
    ("flat5.toml", include_str!("../corpus/flat5.toml")),
    ("conf_flat.toml", include_str!("../corpus/conf_flat.toml")),
    ("conf_wave.toml", include_str!("../corpus/conf_wave.toml")),
    ("sphere3.toml", include_str!("../corpus/sphere3.toml")),
    ("perturbed4.toml", include_str!("../corpus/perturbed4.toml")),
    ("riemann4.toml", include_str!("../corpus/riemann4.toml")),
];

/// The built-in corpus, in a fixed order.
pub fn builtin_corpus() -> Vec<MetricSpec> {
    CORPUS
        .iter()
        .map(|(name, text)| MetricSpec::parse(text, name).expect("built-in corpus parses"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT4: &str = r#"
name = "flat4"
dimension = 4
signature = "lorentzian"
[metric]
g00 = "-1"
g01 = "0"
g02 = "0"
g03 = "0"
g11 = "1"
g12 = "0"
g13 = "0"
g22 = "1"
g23 = "0"
g33 = "1"
"#;

    #[test]
    fn loads_minimal_flat() {
        let s = MetricSpec::parse(FLAT4, "flat4").unwrap();
        assert_eq!(s.name, "flat4");
        assert_eq!(s.base_point, vec![0.0; 4]);
    }

    #[test]
    fn rejects_asymmetric_and_bad_dimension() {
        let bad = FLAT4.replace("[metric]", "[metric]\ng10 = \"0.5\"");
        assert!(matches!(MetricSpec::parse(&bad, "x"), Err(Error::Spec(m)) if m.contains("not symmetric")));
        let small = FLAT4.replace("dimension = 4", "dimension = 2");
        assert!(MetricSpec::parse(&small, "x").is_err());
    }

    #[test]
    fn rejects_signature_mismatch_and_syntax() {
        let riem = FLAT4.replace("lorentzian", "riemannian");
        assert!(matches!(MetricSpec::parse(&riem, "x"), Err(Error::Spec(m)) if m.contains("signature")));
        let broken = FLAT4.replace("g33 = \"1\"", "g33 = \"1 +\"");
        let err = MetricSpec::parse(&broken, "f.toml").unwrap_err().to_string();
        assert!(err.contains("metric.g33"), "{err}");
        let toml_err = MetricSpec::parse("name = ", "f.toml").unwrap_err().to_string();
        assert!(toml_err.contains("line"), "{toml_err}");
    }

    #[test]
    fn corpus_loads() {
        assert_eq!(builtin_corpus().len(), CORPUS.len());
    }
}
