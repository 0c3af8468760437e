//! Job input from flags or a JSON file; flags take precedence.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use fsig_core::wpoly::{parse_poly, Polynomial, WeightedRing};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub prime: Option<u64>,
    pub variables: Option<Vec<VarSpec>>,
    pub poly: Option<String>,
    pub e_max: Option<u32>,
    pub budget: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSpec {
    pub name: String,
    #[serde(default = "one")]
    pub weight: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// Characteristic of the coefficient field.
    #[arg(short = 'p', long = "prime")]
    pub prime: Option<u64>,
    /// Variables with weights, e.g. `x:3,y:3,z:2` (weight defaults to 1).
    #[arg(short = 'v', long = "vars")]
    pub vars: Option<String>,
    /// Defining polynomial, e.g. `x^2+y^2+z^3`.
    #[arg(short = 'f', long = "poly", allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// JSON job file with fields prime, variables, poly, e_max, budget.
    #[arg(long = "job")]
    pub job: Option<PathBuf>,
}

pub fn parse_vars(text: &str) -> Result<Vec<VarSpec>, Failure> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let (name, weight) = match item.split_once(':') {
                Some((n, w)) => {
                    let w = w
                        .trim()
                        .parse::<u32>()
                        .map_err(|_| Failure::input(format!("bad weight in `{item}`")))?;
                    (n.trim(), w)
                }
                None => (item, 1),
            };
            if name.is_empty() {
                return Err(Failure::input(format!("empty variable name in `{text}`")));
            }
            Ok(VarSpec {
                name: name.to_string(),
                weight,
            })
        })
        .collect()
}

pub fn read_job_file(path: &Path) -> Result<JobSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

impl JobArgs {
    /// File values overridden by any flag given on the command line.
    pub fn resolve(&self) -> Result<JobSpec, Failure> {
        let mut spec = match &self.job {
            Some(path) => read_job_file(path)?,
            None => JobSpec::default(),
        };
        if let Some(p) = self.prime {
            spec.prime = Some(p);
        }
        if let Some(v) = &self.vars {
            spec.variables = Some(parse_vars(v)?);
        }
        if let Some(f) = &self.poly {
            spec.poly = Some(f.clone());
        }
        Ok(spec)
    }
}

impl JobSpec {
    pub fn ring(&self) -> Result<Arc<WeightedRing>, Failure> {
        let prime = self
            .prime
            .ok_or_else(|| Failure::input("missing prime (-p)"))?;
        let vars = self
            .variables
            .as_ref()
            .ok_or_else(|| Failure::input("missing variables (-v)"))?;
        let ring = WeightedRing::new(
            prime,
            vars.iter().map(|v| (v.name.clone(), v.weight)),
            vec![],
        )
        .map_err(Failure::from_poly)?;
        Ok(Arc::new(ring))
    }

    pub fn polynomial(&self) -> Result<Polynomial, Failure> {
        let ring = self.ring()?;
        let text = self
            .poly
            .as_ref()
            .ok_or_else(|| Failure::input("missing polynomial (-f)"))?;
        parse_poly(text, &ring).map_err(Failure::from_poly)
    }
}
