//! Compact model notation for the `cumulants` subcommand.
//!
//! ```text
//! gaussian | gaussian:<mean>:<variance> | rademacher | shifted_exponential
//! poisson:<lambda> | geometric:<p> | deterministic:<n>
//! <index>+<summand>          random sum with alpha = 0
//! ```

use randsum::models::{IndexModel, RandomSumSpec, SummandModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Summand(SummandModel),
    Index(IndexModel),
    RandomSum(RandomSumSpec),
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("cannot read {what} from `{s}`"))
}

fn summand(s: &str) -> Result<SummandModel, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let m = match parts.as_slice() {
        ["gaussian"] => SummandModel::standard_gaussian(),
        ["gaussian", mean, var] => {
            SummandModel::Gaussian { mean: number(mean, "mean")?, variance: number(var, "variance")? }
        }
        ["rademacher"] => SummandModel::Rademacher,
        ["shifted_exponential"] => SummandModel::ShiftedExponential,
        _ => return Err(format!("unknown summand `{s}`")),
    };
    m.validate().map_err(|e| e.to_string())?;
    Ok(m)
}

fn index(s: &str) -> Result<IndexModel, String> {
    let (family, param) =
        s.split_once(':').ok_or_else(|| format!("index `{s}` needs a parameter, e.g. poisson:100"))?;
    let value = number(param, "index parameter")?;
    let proto = match family {
        "poisson" => IndexModel::Poisson { lambda: 1.0 },
        "geometric" => IndexModel::Geometric { p: 0.5 },
        "deterministic" => IndexModel::Deterministic { n: 1 },
        _ => return Err(format!("unknown index family `{family}`")),
    };
    proto.with_parameter(value).map_err(|e| e.to_string())
}

fn is_index(s: &str) -> bool {
    ["poisson:", "geometric:", "deterministic:"].iter().any(|p| s.starts_with(p))
}

pub fn parse(s: &str) -> Result<ModelSpec, String> {
    let s = s.trim();
    if let Some((i, x)) = s.split_once('+') {
        let spec = RandomSumSpec::standardized(summand(x)?, index(i)?, 0.0).map_err(|e| e.to_string())?;
        return Ok(ModelSpec::RandomSum(spec));
    }
    if is_index(s) {
        Ok(ModelSpec::Index(index(s)?))
    } else {
        Ok(ModelSpec::Summand(summand(s)?))
    }
}
