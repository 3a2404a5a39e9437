use std::path::Path;

use anyhow::{bail, Context, Result};
use prisyn_core::fixtures::{self, RandomParams};
use prisyn_core::model::{parse_system, System};
use prisyn_core::monitor::{parse_dfa, Dfa};

/// Builtin model names accepted wherever a model path is expected.
pub fn builtin(name: &str) -> Option<String> {
    if let Some(n) = name
        .strip_prefix("phil-")
        .or_else(|| name.strip_prefix("philosophers-"))
    {
        let n: usize = n.parse().ok()?;
        return (n >= 2).then(|| fixtures::philosophers_text(n));
    }
    if let Some(seed) = name.strip_prefix("random-") {
        let seed: u64 = seed.parse().ok()?;
        return Some(fixtures::random_system(seed, &RandomParams::default()).to_string());
    }
    fixtures::figure(name).map(str::to_string)
}

/// Reads a model from a file, falling back to the builtin names.
pub fn load_model(arg: &str) -> Result<System> {
    let text = if Path::new(arg).exists() {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    } else if let Some(t) = builtin(arg) {
        t
    } else {
        bail!("no such file or builtin model: {arg}");
    };
    parse_system(&text).with_context(|| format!("parsing {arg}"))
}

pub fn load_dfa(arg: &str) -> Result<Dfa> {
    let text = if Path::new(arg).exists() {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    } else if arg == "fig6-spec" {
        fixtures::FIG6_SPEC.to_string()
    } else {
        bail!("no such file: {arg}");
    };
    parse_dfa(&text).with_context(|| format!("parsing {arg}"))
}

/// Text of a generated model or automaton.
pub fn generate(family: &str, param: Option<u64>) -> Result<String> {
    Ok(match family {
        "philosophers" | "phil" => {
            let n = param.context("philosophers needs a size")?;
            if n < 2 {
                bail!("philosophers needs at least 2, got {n}");
            }
            fixtures::philosophers_text(n as usize)
        }
        "random" => {
            let seed = param.context("random needs a seed")?;
            fixtures::random_system(seed, &RandomParams::default()).to_string()
        }
        "fig6-spec" => fixtures::FIG6_SPEC.to_string(),
        name => match fixtures::figure(name) {
            Some(t) => t.to_string(),
            None => bail!(
                "unknown family `{name}`; expected philosophers, random, fig6-spec or one of {}",
                fixtures::FIGURES.join(", ")
            ),
        },
    })
}
