//! Family registry: (name, parameter vector) -> model, the dispatch
//! surface used by the CLI and JSON serialization.

use serde::{Deserialize, Serialize};

use crate::archimedean;
use crate::error::{Error, Result};
use crate::families::{self, BoundedFn, FrechetParams, MFamily, MardiaParams, T3Family, TableDensitySpec};
use crate::grid::Grid;
use crate::model::CopulaModel;

/// Serializable family handle.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FamilySpec {
    pub family: String,
    pub params: Vec<f64>,
}

impl FamilySpec {
    pub fn new(family: impl Into<String>, params: Vec<f64>) -> Self {
        FamilySpec { family: family.into(), params }
    }

    /// Parses the compact form `name:p1,p2,...`.
    pub fn parse(text: &str) -> Result<FamilySpec> {
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n, r),
            None => (text, ""),
        };
        let mut params = Vec::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            params.push(part.parse::<f64>().map_err(|_| {
                Error::InvalidInput(format!("bad parameter '{part}' in family spec '{text}'"))
            })?);
        }
        Ok(FamilySpec::new(name, params))
    }

    pub fn build(&self, grid: &Grid) -> Result<CopulaModel> {
        make_family(&self.family, &self.params, grid)
    }
}

/// Names and parameter counts of the built-in families.
pub const FAMILY_USAGE: &[(&str, &str)] = &[
    ("independence", "no parameters (alias: p)"),
    ("fgm", "theta in [-1,1]"),
    ("frechet", "a b with a,b >= 0, a+b <= 1"),
    ("mardia", "theta in [-1,1]"),
    ("mh", "a in (0,1]"),
    ("m1 | m2 | m3 | m4", "no parameters (g(x)=x, h(y)=y) or two constants gamma eta"),
    ("t3_1", "a in (0,1]"),
    ("t3_2", "a theta, |theta| <= 2a"),
    ("t3_3", "a theta c, c >= 0"),
    ("t3_4", "a c"),
    ("example2", "theta in (0,1) (log-type generator)"),
    ("example3", "theta > 1 (rational self-inverse generator)"),
];

fn want(params: &[f64], n: usize, usage: &str) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} parameter(s): {usage}; got {}",
            params.len()
        )));
    }
    Ok(())
}

/// Builds a model by family name. The grid is used by families whose
/// construction involves validation or scanning (table densities).
pub fn make_family(name: &str, params: &[f64], grid: &Grid) -> Result<CopulaModel> {
    match name {
        "p" | "independence" => {
            want(params, 0, "independence")?;
            Ok(families::independence())
        }
        "fgm" => {
            want(params, 1, "fgm theta")?;
            families::fgm(params[0])
        }
        "frechet" => {
            want(params, 2, "frechet a b")?;
            families::frechet(FrechetParams { a: params[0], b: params[1] })
        }
        "mardia" => {
            want(params, 1, "mardia theta")?;
            families::mardia(MardiaParams { theta: params[0] })
        }
        "mh" => {
            want(params, 1, "mh a")?;
            families::mh_copula(params[0])
        }
        "m1" | "m2" | "m3" | "m4" => {
            let which = match name {
                "m1" => MFamily::M1,
                "m2" => MFamily::M2,
                "m3" => MFamily::M3,
                _ => MFamily::M4,
            };
            let (g, h) = match params.len() {
                0 => (BoundedFn::identity(), BoundedFn::identity()),
                2 => (BoundedFn::constant(params[0]), BoundedFn::constant(params[1])),
                _ => {
                    return Err(Error::InvalidInput(
                        "m-families take no parameters (g(x)=x, h(y)=y) or two constants".into(),
                    ))
                }
            };
            let (model, _) = families::table_density(&TableDensitySpec::m(which, g, h), grid)?;
            Ok(model)
        }
        "t3_1" | "t3-1" => {
            want(params, 1, "t3_1 a")?;
            let spec = TableDensitySpec::T3 { which: T3Family::T31, a: params[0], theta: 0.0, c: 0.0 };
            Ok(families::table_density(&spec, grid)?.0)
        }
        "t3_2" | "t3-2" => {
            want(params, 2, "t3_2 a theta")?;
            let spec =
                TableDensitySpec::T3 { which: T3Family::T32, a: params[0], theta: params[1], c: 0.0 };
            Ok(families::table_density(&spec, grid)?.0)
        }
        "t3_3" | "t3-3" => {
            want(params, 3, "t3_3 a theta c")?;
            let spec = TableDensitySpec::T3 {
                which: T3Family::T33,
                a: params[0],
                theta: params[1],
                c: params[2],
            };
            Ok(families::table_density(&spec, grid)?.0)
        }
        "t3_4" | "t3-4" => {
            want(params, 2, "t3_4 a c")?;
            let spec =
                TableDensitySpec::T3 { which: T3Family::T34, a: params[0], theta: 0.0, c: params[1] };
            Ok(families::table_density(&spec, grid)?.0)
        }
        "example2" => {
            want(params, 1, "example2 theta")?;
            archimedean::archimedean_copula(&archimedean::log_family(params[0])?)
        }
        "example3" => {
            want(params, 1, "example3 theta")?;
            archimedean::archimedean_copula(&archimedean::rational_family(params[0])?)
        }
        other => Err(Error::InvalidInput(format!(
            "unknown family '{other}'; known families: {}",
            FAMILY_USAGE.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Parameterized generator families selectable by name for the
/// critical-parameter search.
pub fn generator_family(
    name: &str,
) -> Result<Box<dyn Fn(f64) -> Result<crate::archimedean::Generator>>> {
    match name {
        "example2" => Ok(Box::new(archimedean::log_family)),
        "example3" => Ok(Box::new(archimedean::rational_family)),
        other => Err(Error::InvalidInput(format!(
            "unknown generator family '{other}'; known: example2, example3"
        ))),
    }
}
