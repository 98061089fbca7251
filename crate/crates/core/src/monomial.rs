//! Monomial tags such as `sigma*z`, `w^2` or `sigma2*rho1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::tree::IndexBundle;

/// Largest total degree a tag may have.
pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Sigma,
    Sigma1,
    Sigma2,
    Z,
    Z1,
    Z2,
    Rho,
    Rho1,
    Rho2,
    D,
    W,
}

impl Factor {
    pub const ALL: [Factor; 11] = [
        Factor::Sigma,
        Factor::Sigma1,
        Factor::Sigma2,
        Factor::Z,
        Factor::Z1,
        Factor::Z2,
        Factor::Rho,
        Factor::Rho1,
        Factor::Rho2,
        Factor::D,
        Factor::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Factor::Sigma => "sigma",
            Factor::Sigma1 => "sigma1",
            Factor::Sigma2 => "sigma2",
            Factor::Z => "z",
            Factor::Z1 => "z1",
            Factor::Z2 => "z2",
            Factor::Rho => "rho",
            Factor::Rho1 => "rho1",
            Factor::Rho2 => "rho2",
            Factor::D => "d",
            Factor::W => "w",
        }
    }

    pub fn eval(self, b: &IndexBundle) -> BigUint {
        match self {
            Factor::Sigma => b.sigma(),
            Factor::Sigma1 => b.sigma1.clone(),
            Factor::Sigma2 => b.sigma2.clone(),
            Factor::Z => b.z(),
            Factor::Z1 => b.z1.clone(),
            Factor::Z2 => b.z2.clone(),
            Factor::Rho => b.rho(),
            Factor::Rho1 => b.rho1.clone(),
            Factor::Rho2 => b.rho2.clone(),
            Factor::D => b.d.clone(),
            Factor::W => b.w.clone(),
        }
    }

    /// Whether the factor is a path-length quantity (may vanish).
    pub fn is_distance(self) -> bool {
        matches!(self, Factor::D | Factor::W)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("unknown monomial {tag:?}: expected factors from {{{}}} joined by '*', each optionally raised with '^k'", valid_factor_list())]
    Unknown { tag: String },
    #[error("monomial {tag:?} exceeds the maximum degree {MAX_DEGREE}")]
    DegreeTooHigh { tag: String },
}

fn valid_factor_list() -> String {
    Factor::ALL.map(Factor::name).join(", ")
}

/// A product of index factors with positive exponents, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    powers: BTreeMap<Factor, u32>,
}

impl Monomial {
    pub fn new(factors: impl IntoIterator<Item = (Factor, u32)>) -> Self {
        let mut powers = BTreeMap::new();
        for (f, e) in factors {
            if e > 0 {
                *powers.entry(f).or_insert(0) += e;
            }
        }
        Monomial { powers }
    }

    pub fn powers(&self) -> impl Iterator<Item = (Factor, u32)> + '_ {
        self.powers.iter().map(|(&f, &e)| (f, e))
    }

    pub fn degree(&self) -> u32 {
        self.powers.values().sum()
    }

    pub fn involves_distance(&self) -> bool {
        self.powers.keys().any(|f| f.is_distance())
    }

    pub fn only_distances(&self) -> bool {
        self.powers.keys().all(|f| f.is_distance())
    }

    pub fn eval(&self, b: &IndexBundle) -> BigUint {
        self.powers
            .iter()
            .fold(BigUint::one(), |acc, (f, &e)| acc * f.eval(b).pow(e))
    }
}

impl FromStr for Monomial {
    type Err = TagError;

    fn from_str(tag: &str) -> Result<Self, TagError> {
        let unknown = || TagError::Unknown {
            tag: tag.to_string(),
        };
        if tag.is_empty() {
            return Err(unknown());
        }
        let mut powers: BTreeMap<Factor, u32> = BTreeMap::new();
        let mut degree: u32 = 0;
        for part in tag.split('*') {
            let (name, exp) = match part.split_once('^') {
                Some((name, exp)) => {
                    if exp.is_empty() || !exp.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(unknown());
                    }
                    let e: u32 = exp.parse().map_err(|_| TagError::DegreeTooHigh {
                        tag: tag.to_string(),
                    })?;
                    (name, e)
                }
                None => (part, 1),
            };
            if exp == 0 {
                return Err(unknown());
            }
            let factor = Factor::ALL
                .into_iter()
                .find(|f| f.name() == name)
                .ok_or_else(unknown)?;
            degree = degree.saturating_add(exp);
            if degree > MAX_DEGREE {
                return Err(TagError::DegreeTooHigh {
                    tag: tag.to_string(),
                });
            }
            *powers.entry(factor).or_insert(0) += exp;
        }
        Ok(Monomial { powers })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.powers.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .powers
            .iter()
            .map(|(factor, &e)| match e {
                1 => factor.name().to_string(),
                _ => format!("{}^{e}", factor.name()),
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Parse a comma-separated list of tags.
pub fn parse_tag_list(list: &str) -> Result<Vec<Monomial>, TagError> {
    list.split(',').map(|t| t.trim().parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let m: Monomial = "sigma*z".parse().unwrap();
        assert_eq!(m.degree(), 2);
        let m: Monomial = "w^2".parse().unwrap();
        assert_eq!(m.powers().collect::<Vec<_>>(), [(Factor::W, 2)]);
        let m: Monomial = "rho*rho".parse().unwrap();
        assert_eq!(m, "rho^2".parse().unwrap());
        assert_eq!("w*rho".parse::<Monomial>().unwrap().to_string(), "rho*w");
    }

    #[test]
    fn rejects_unknown_tags() {
        for bad in ["", "sigma3", "sigma**z", "w^", "w^0", "w^-1", "Sigma", "z^x"] {
            let err = bad.parse::<Monomial>().unwrap_err();
            assert!(matches!(err, TagError::Unknown { .. }), "{bad}");
            assert!(err.to_string().contains("sigma1"));
        }
        assert!(matches!(
            "w^17".parse::<Monomial>(),
            Err(TagError::DegreeTooHigh { .. })
        ));
        assert!(matches!(
            "w^99999999999".parse::<Monomial>(),
            Err(TagError::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn tag_lists() {
        let tags = parse_tag_list("sigma, z ,w^2").unwrap();
        assert_eq!(tags.len(), 3);
        assert!(parse_tag_list("sigma,,z").is_err());
    }
}
