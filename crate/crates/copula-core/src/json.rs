//! JSON descriptors for copulas.
//!
//! Shuffles: `{"n": 3, "splits": [0.25, 0.75], "pi": [3, 2, 1], "omega": [-1, 1, -1]}`
//! (splits exclude the implicit 0 and 1). Builtins: `{"builtin": "M"|"W"|"Pi"}`.
//! Mixtures: `{"mixture": [{"weight": w, "copula": {...}}, ...]}`. Families:
//! `{"family": "Ca", "a": 0.25}`, `{"family": "Cn", "n": 3}`,
//! `{"family": "Kdelta_a", "a": 0.25}`, `{"family": "smooth", "s": 0.5}`,
//! `{"family": "ordinal", "intervals": [[a, b], ...], "components": [...]}`.
//! Bernstein smoothing: `{"bernstein": {"n": 20, "base": {...}}}`.

use crate::bernstein::BernsteinCopula;
use crate::copula::{Copula, Mixture};
use crate::error::{CopulaError, Result};
use crate::extremal;
use crate::shuffle::ShuffleOfM;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CopulaDescriptor {
    Builtin { builtin: String },
    Family(FamilyDescriptor),
    Bernstein { bernstein: BernsteinDescriptor },
    Mixture { mixture: Vec<MixtureEntry> },
    Shuffle(ShuffleDescriptor),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShuffleDescriptor {
    pub n: usize,
    pub splits: Vec<f64>,
    pub pi: Vec<usize>,
    pub omega: Vec<i8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureEntry {
    pub weight: f64,
    pub copula: CopulaDescriptor,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BernsteinDescriptor {
    pub n: usize,
    pub base: Box<CopulaDescriptor>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum FamilyDescriptor {
    #[serde(rename = "Ca")]
    Ca { a: f64 },
    #[serde(rename = "Cn")]
    Cn { n: usize },
    #[serde(rename = "Kdelta_a")]
    KdeltaA { a: f64 },
    #[serde(rename = "smooth")]
    Smooth { s: f64 },
    #[serde(rename = "ordinal")]
    Ordinal {
        intervals: Vec<(f64, f64)>,
        components: Vec<CopulaDescriptor>,
    },
}

impl CopulaDescriptor {
    pub fn to_copula(&self) -> Result<Copula> {
        match self {
            CopulaDescriptor::Builtin { builtin } => match builtin.as_str() {
                "M" => Ok(Copula::M),
                "W" => Ok(Copula::W),
                "Pi" => Ok(Copula::Pi),
                other => Err(CopulaError::Descriptor(format!(
                    "unknown builtin {other:?} (expected \"M\", \"W\" or \"Pi\")"
                ))),
            },
            CopulaDescriptor::Shuffle(s) => Ok(Copula::Shuffle(ShuffleOfM::new(
                s.n, &s.splits, &s.pi, &s.omega,
            )?)),
            CopulaDescriptor::Mixture { mixture } => {
                let comps = mixture
                    .iter()
                    .map(|e| Ok((e.weight, e.copula.to_copula()?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Copula::Mixture(Mixture::new(comps)?))
            }
            CopulaDescriptor::Bernstein { bernstein } => {
                let base = bernstein.base.to_copula()?;
                Ok(Copula::Bernstein(BernsteinCopula::new(&base, bernstein.n)?))
            }
            CopulaDescriptor::Family(f) => f.to_copula(),
        }
    }

    /// Descriptor for a concrete copula value, when it has a JSON form.
    pub fn from_copula(c: &Copula) -> Option<CopulaDescriptor> {
        match c {
            Copula::M => Some(CopulaDescriptor::Builtin { builtin: "M".into() }),
            Copula::W => Some(CopulaDescriptor::Builtin { builtin: "W".into() }),
            Copula::Pi => Some(CopulaDescriptor::Builtin { builtin: "Pi".into() }),
            Copula::Shuffle(s) => Some(CopulaDescriptor::Shuffle(shuffle_descriptor(s))),
            Copula::Mixture(m) => {
                let mixture = m
                    .components()
                    .iter()
                    .map(|(w, c)| {
                        CopulaDescriptor::from_copula(c).map(|d| MixtureEntry {
                            weight: *w,
                            copula: d,
                        })
                    })
                    .collect::<Option<Vec<_>>>()?;
                Some(CopulaDescriptor::Mixture { mixture })
            }
            _ => None,
        }
    }
}

impl FamilyDescriptor {
    pub fn to_copula(&self) -> Result<Copula> {
        match self {
            FamilyDescriptor::Ca { a } => Ok(Copula::Shuffle(extremal::family_ca(*a)?)),
            FamilyDescriptor::Cn { n } => Ok(Copula::Shuffle(extremal::family_cn(*n)?)),
            FamilyDescriptor::KdeltaA { a } => Ok(Copula::Diagonal(extremal::kdelta_a(*a)?)),
            FamilyDescriptor::Smooth { s } => Ok(Copula::Diagonal(extremal::diagonal_copula(
                extremal::smooth_diagonal_family(*s)?,
            )?)),
            FamilyDescriptor::Ordinal { intervals, components } => {
                let comps = components
                    .iter()
                    .map(|d| d.to_copula())
                    .collect::<Result<Vec<_>>>()?;
                extremal::ordinal_sum(intervals, &comps)
            }
        }
    }
}

pub fn shuffle_descriptor(s: &ShuffleOfM) -> ShuffleDescriptor {
    ShuffleDescriptor {
        n: s.n(),
        splits: s.interior_splits().to_vec(),
        pi: s.pi_one_based(),
        omega: (0..s.n()).map(|i| s.omega(i)).collect(),
    }
}

/// Parse a copula from descriptor JSON.
pub fn parse_copula(json: &str) -> Result<Copula> {
    let desc: CopulaDescriptor = serde_json::from_str(json)
        .map_err(|e| CopulaError::Descriptor(format!("malformed copula JSON: {e}")))?;
    desc.to_copula()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_formats() {
        let c = parse_copula(r#"{"builtin": "Pi"}"#).unwrap();
        assert!(matches!(c, Copula::Pi));
        let c = parse_copula(
            r#"{"n": 3, "splits": [0.25, 0.75], "pi": [3, 2, 1], "omega": [-1, 1, -1]}"#,
        )
        .unwrap();
        assert!(matches!(c, Copula::Shuffle(_)));
        let c = parse_copula(
            r#"{"mixture": [{"weight": 0.5, "copula": {"builtin": "M"}},
                            {"weight": 0.5, "copula": {"family": "Cn", "n": 2}}]}"#,
        )
        .unwrap();
        assert!(matches!(c, Copula::Mixture(_)));
        let c = parse_copula(r#"{"family": "Kdelta_a", "a": 0.25}"#).unwrap();
        assert!(matches!(c, Copula::Diagonal(_)));
        let c = parse_copula(r#"{"family": "smooth", "s": 0.5}"#).unwrap();
        assert!(matches!(c, Copula::Diagonal(_)));
        let c = parse_copula(
            r#"{"family": "ordinal", "intervals": [[0.0, 0.5], [0.5, 1.0]],
                "components": [{"builtin": "W"}, {"builtin": "W"}]}"#,
        )
        .unwrap();
        assert!(matches!(c, Copula::Shuffle(_)));
        let c = parse_copula(r#"{"bernstein": {"n": 3, "base": {"builtin": "M"}}}"#).unwrap();
        assert!(matches!(c, Copula::Bernstein(_)));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_copula("not json").is_err());
        assert!(parse_copula(r#"{"builtin": "X"}"#).is_err());
        assert!(parse_copula(r#"{"family": "Ca", "a": 0.7}"#).is_err());
        assert!(parse_copula(r#"{"n": 2, "splits": [0.5], "pi": [1, 1], "omega": [1, 1]}"#).is_err());
        assert!(parse_copula(r#"{"unrelated": 1}"#).is_err());
    }

    #[test]
    fn shuffle_round_trip() {
        let s = extremal::family_ca(0.25).unwrap();
        let json = serde_json::to_string(&CopulaDescriptor::Shuffle(shuffle_descriptor(&s))).unwrap();
        let back = parse_copula(&json).unwrap();
        let back = back.as_shuffle().unwrap();
        assert_eq!(back, s);
    }
}
