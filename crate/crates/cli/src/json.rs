//! JSON wire formats. Exact rationals travel as reduced `"a/b"` strings
//! (`/b` omitted when the denominator is 1); distributions carry an
//! explicit `n` that must match the parameter count.

use serde::{Deserialize, Serialize};
use tvlab_core::reduction::{CaseTag, PmfEqualsInstance, ReductionArtifacts, SubsetProdInstance};
use tvlab_core::{BigUint, ProductDistribution, Rational};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductJson {
    pub n: usize,
    pub params: Vec<String>,
}

impl ProductJson {
    pub fn from_core(dist: &ProductDistribution) -> Self {
        ProductJson {
            n: dist.n(),
            params: dist.params().iter().map(|p| p.to_string()).collect(),
        }
    }

    pub fn to_core(&self) -> Result<ProductDistribution, CliError> {
        if self.n != self.params.len() {
            return Err(CliError::input(format!(
                "declared n = {} but {} parameters given",
                self.n,
                self.params.len()
            )));
        }
        let params = parse_rationals(&self.params)?;
        Ok(ProductDistribution::new(params)?)
    }
}

/// Input shape of the `tv`, `membership`, and `divergence` commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    pub p: ProductJson,
    pub q: ProductJson,
}

impl PairJson {
    pub fn to_core(&self) -> Result<(ProductDistribution, ProductDistribution), CliError> {
        Ok((self.p.to_core()?, self.q.to_core()?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetProdJson {
    pub a: Vec<u64>,
    #[serde(rename = "T")]
    pub t: u64,
}

impl SubsetProdJson {
    pub fn from_core(inst: &SubsetProdInstance) -> Self {
        // generation and the CLI surface stay within u64; the core type is
        // wider on purpose
        SubsetProdJson {
            a: inst.items().iter().map(|a| u64::try_from(a).expect("generator range")).collect(),
            t: u64::try_from(inst.target()).expect("generator range"),
        }
    }

    pub fn to_core(&self) -> Result<SubsetProdInstance, CliError> {
        Ok(SubsetProdInstance::new(
            self.a.iter().map(|&x| BigUint::from(x)).collect(),
            BigUint::from(self.t),
        )?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmfEqualsJson {
    pub p: Vec<String>,
    pub v: String,
}

impl PmfEqualsJson {
    pub fn from_core(inst: &PmfEqualsInstance) -> Self {
        PmfEqualsJson {
            p: inst.params().iter().map(|p| p.to_string()).collect(),
            v: inst.value().to_string(),
        }
    }

    pub fn to_core(&self) -> Result<PmfEqualsInstance, CliError> {
        Ok(PmfEqualsInstance::new(parse_rationals(&self.p)?, parse_rational(&self.v)?)?)
    }
}

/// Serialized gadget pack: both distribution pairs plus the recovery data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactsJson {
    pub case: String,
    pub source_n: usize,
    pub beta: String,
    pub hat_p: ProductJson,
    pub hat_q: ProductJson,
    pub prime_p: ProductJson,
    pub prime_q: ProductJson,
    pub recovery_coefficient: String,
}

impl ArtifactsJson {
    pub fn from_core(art: &ReductionArtifacts) -> Self {
        ArtifactsJson {
            case: match art.case_tag {
                CaseTag::A => "A".into(),
                CaseTag::B => "B".into(),
            },
            source_n: art.source_n(),
            beta: art.beta.to_string(),
            hat_p: ProductJson::from_core(&art.hat_p),
            hat_q: ProductJson::from_core(&art.hat_q),
            prime_p: ProductJson::from_core(&art.prime_p),
            prime_q: ProductJson::from_core(&art.prime_q),
            recovery_coefficient: art.recovery_coefficient.to_string(),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.parse::<Rational>().map_err(CliError::from)
}

pub fn parse_rationals(strings: &[String]) -> Result<Vec<Rational>, CliError> {
    strings.iter().map(|s| parse_rational(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_round_trip() {
        let json = r#"{"n":2,"params":["1/2","3/4"]}"#;
        let parsed: ProductJson = serde_json::from_str(json).unwrap();
        let dist = parsed.to_core().unwrap();
        assert_eq!(dist.n(), 2);
        assert_eq!(serde_json::to_string(&ProductJson::from_core(&dist)).unwrap(), json);
    }

    #[test]
    fn product_rejects_mismatched_n() {
        let parsed: ProductJson =
            serde_json::from_str(r#"{"n":3,"params":["1/2"]}"#).unwrap();
        let err = parsed.to_core().unwrap_err();
        assert_eq!(err.code, crate::exit_code::INPUT);
    }

    #[test]
    fn subsetprod_uses_capital_t() {
        let parsed: SubsetProdJson = serde_json::from_str(r#"{"a":[2,3],"T":6}"#).unwrap();
        let inst = parsed.to_core().unwrap();
        assert_eq!(inst.n(), 2);
        assert!(serde_json::to_string(&SubsetProdJson::from_core(&inst))
            .unwrap()
            .contains("\"T\":6"));
    }

    #[test]
    fn pmfequals_round_trip() {
        let parsed: PmfEqualsJson =
            serde_json::from_str(r#"{"p":["2/3","3/4"],"v":"1/2"}"#).unwrap();
        let inst = parsed.to_core().unwrap();
        assert_eq!(inst.value(), &Rational::new(1, 2).unwrap());
        let back = PmfEqualsJson::from_core(&inst);
        assert_eq!(back.v, "1/2");
    }

    #[test]
    fn integer_valued_rationals_drop_denominator() {
        let inst = PmfEqualsInstance::new(
            vec![Rational::new(1, 1).unwrap()],
            Rational::new(0, 5).unwrap(),
        )
        .unwrap();
        let json = PmfEqualsJson::from_core(&inst);
        assert_eq!(json.p, vec!["1"]);
        assert_eq!(json.v, "0");
    }
}
