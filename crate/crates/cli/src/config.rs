use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use hypcompact_core::{ReparamMap, Tolerances};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Everything a run depends on; embedded verbatim in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub f: String,
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub tol: Tolerances,
}

impl RunConfig {
    pub fn new(
        n: usize,
        seed: u64,
        f: &str,
        tol: Tolerances,
        output: Option<PathBuf>,
        format: Format,
    ) -> Result<Self, CliError> {
        if n < 2 {
            return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
        }
        parse_f(f)?;
        Ok(Self {
            n,
            seed,
            f: f.to_string(),
            tolerances: tol.iter().map(|(k, v)| (k.to_string(), v)).collect(),
            output,
            format,
            tol,
        })
    }

    pub fn map(&self) -> ReparamMap {
        parse_f(&self.f).expect("validated at construction")
    }
}

/// `p=<int>`, `f1` or `f2`.
pub fn parse_f(spec: &str) -> Result<ReparamMap, CliError> {
    let ok = spec == "f1"
        || spec == "f2"
        || spec
            .strip_prefix("p=")
            .is_some_and(|p| p.parse::<u32>().is_ok_and(|p| p >= 1));
    if !ok {
        return Err(CliError::Usage(format!(
            "bad --f value {spec:?}: expected p=<positive int>, f1 or f2"
        )));
    }
    ReparamMap::from_str(spec).map_err(|e| CliError::Usage(e.to_string()))
}

/// Pulls `--tol.<name> <value>` and `--tol.<name>=<value>` out of the
/// argument list, since their names are not known to the parser.
pub fn split_tolerances(args: Vec<String>) -> Result<(Vec<String>, Tolerances), CliError> {
    let mut tol = Tolerances::default();
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let Some(spec) = arg.strip_prefix("--tol.") else {
            rest.push(arg);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((name, value)) => (name.to_string(), value.to_string()),
            None => {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("--tol.{spec} needs a value")))?;
                (spec.to_string(), value)
            }
        };
        let v: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("--tol.{name}: {value:?} is not a number")))?;
        tol.set(&name, v).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok((rest, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(a: &[&str]) -> Vec<String> {
        a.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tolerance_flags_are_extracted() {
        let (rest, tol) =
            split_tolerances(args(&["x", "--tol.action=1e-8", "smoothness", "--tol.endpoint", "1e-5"]))
                .unwrap();
        assert_eq!(rest, args(&["x", "smoothness"]));
        assert_eq!(tol.get("action"), 1e-8);
        assert_eq!(tol.get("endpoint"), 1e-5);
        assert!(split_tolerances(args(&["--tol.nope=1"])).is_err());
        assert!(split_tolerances(args(&["--tol.action=-1"])).is_err());
        assert!(split_tolerances(args(&["--tol.action"])).is_err());
    }

    #[test]
    fn f_specs() {
        assert!(parse_f("p=3").is_ok());
        assert!(parse_f("f2").is_ok());
        assert!(parse_f("p=0").is_err());
        assert!(parse_f("g").is_err());
    }
}
