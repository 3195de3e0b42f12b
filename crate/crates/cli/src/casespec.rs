//! Spec files for the bundled case studies: line-oriented `key = value`
//! statements, `#` comments, tuples in parentheses.

use crate::workspace::split_top_level;
use skewform::casestudies::{EmSpec, FlowSpec, HamiltonianSpec, MaxwellSpec, ThermoSpec};
use skewform::{parse_expr, Expr};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct SpecError(pub String);

fn parse_pairs(src: &str) -> Result<BTreeMap<String, String>, SpecError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in src.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        // bare clauses like `preset vacuum` or `space (x, y)`
        let (key, value) = match text.split_once('=') {
            Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
            None => match text.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
                None => {
                    return Err(SpecError(format!(
                        "line {}: expected 'key = value'",
                        idx + 1
                    )))
                }
            },
        };
        if out.insert(key.clone(), value).is_some() {
            return Err(SpecError(format!("line {}: duplicate key '{key}'", idx + 1)));
        }
    }
    Ok(out)
}

fn expr_of(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<Expr>, SpecError> {
    match pairs.get(key) {
        None => Ok(None),
        Some(v) => parse_expr(v)
            .map(Some)
            .map_err(|e| SpecError(format!("bad expression for '{key}': {e}"))),
    }
}

fn require(v: Option<Expr>, key: &str) -> Result<Expr, SpecError> {
    v.ok_or_else(|| SpecError(format!("missing required key '{key}'")))
}

fn tuple_of(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<Expr>>, SpecError> {
    let Some(v) = pairs.get(key) else {
        return Ok(None);
    };
    let inner = v
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| SpecError(format!("'{key}' must be a parenthesized tuple")))?;
    let mut out = Vec::new();
    for piece in split_top_level(inner, ',') {
        out.push(
            parse_expr(&piece)
                .map_err(|e| SpecError(format!("bad component '{piece}' in '{key}': {e}")))?,
        );
    }
    Ok(Some(out))
}

fn check_keys(pairs: &BTreeMap<String, String>, allowed: &[&str]) -> Result<(), SpecError> {
    for k in pairs.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(SpecError(format!("unknown key '{k}'")));
        }
    }
    Ok(())
}

pub fn parse_thermo(src: &str) -> Result<ThermoSpec, SpecError> {
    let pairs = parse_pairs(src)?;
    check_keys(&pairs, &["c_v", "R"])?;
    let mut spec = ThermoSpec::default();
    if let Some(e) = expr_of(&pairs, "c_v")? {
        spec.c_v = e;
    }
    if let Some(e) = expr_of(&pairs, "R")? {
        spec.r = e;
    }
    Ok(spec)
}

pub fn parse_gas(src: &str) -> Result<FlowSpec, SpecError> {
    let pairs = parse_pairs(src)?;
    check_keys(
        &pairs,
        &["space", "velocity", "force", "h0", "temperature", "transport", "time"],
    )?;
    let space_raw = pairs
        .get("space")
        .ok_or_else(|| SpecError("missing required key 'space'".into()))?;
    let inner = space_raw
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| SpecError("'space' must be a parenthesized name tuple".into()))?;
    let space: Vec<String> = split_top_level(inner, ',')
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect();
    let n = space.len();
    let velocity = tuple_of(&pairs, "velocity")?
        .ok_or_else(|| SpecError("missing required key 'velocity'".into()))?;
    let force = tuple_of(&pairs, "force")?.unwrap_or_else(|| vec![Expr::zero(); n]);
    Ok(FlowSpec {
        space,
        velocity,
        force,
        h0: require(expr_of(&pairs, "h0")?, "h0")?,
        temperature: require(expr_of(&pairs, "temperature")?, "temperature")?,
        transport: expr_of(&pairs, "transport")?,
        time: pairs.get("time").cloned().unwrap_or_else(|| "t".into()),
    })
}

pub fn parse_em(src: &str) -> Result<EmSpec, SpecError> {
    let pairs = parse_pairs(src)?;
    if pairs.get("preset").map(String::as_str) == Some("vacuum") {
        check_keys(&pairs, &["preset", "Q_e", "Q_i_prime"])?;
        let mut spec = EmSpec::vacuum_wave();
        if let Some(e) = expr_of(&pairs, "Q_e")? {
            spec.q_e = e;
        }
        if let Some(e) = expr_of(&pairs, "Q_i_prime")? {
            spec.q_i_prime = e;
        }
        return Ok(spec);
    }
    check_keys(&pairs, &["S", "I", "Q_e", "Q_i_prime"])?;
    Ok(EmSpec {
        s: require(expr_of(&pairs, "S")?, "S")?,
        i: require(expr_of(&pairs, "I")?, "I")?,
        q_e: expr_of(&pairs, "Q_e")?.unwrap_or_else(Expr::zero),
        q_i_prime: expr_of(&pairs, "Q_i_prime")?.unwrap_or_else(Expr::zero),
    })
}

pub fn parse_maxwell(src: &str) -> Result<MaxwellSpec, SpecError> {
    let pairs = parse_pairs(src)?;
    check_keys(&pairs, &["E", "H"])?;
    let take3 = |key: &str| -> Result<[Expr; 3], SpecError> {
        let v = tuple_of(&pairs, key)?
            .ok_or_else(|| SpecError(format!("missing required key '{key}'")))?;
        <[Expr; 3]>::try_from(v)
            .map_err(|v| SpecError(format!("'{key}' needs 3 components, got {}", v.len())))
    };
    Ok(MaxwellSpec {
        e: take3("E")?,
        h: take3("H")?,
    })
}

pub fn parse_hamiltonian(src: &str) -> Result<HamiltonianSpec, SpecError> {
    let pairs = parse_pairs(src)?;
    check_keys(&pairs, &["H", "pairs"])?;
    let pairs_n = match pairs.get("pairs") {
        None => 1,
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| SpecError(format!("bad pair count '{v}'")))?,
    };
    Ok(HamiltonianSpec {
        h: require(expr_of(&pairs, "H")?, "H")?,
        pairs: pairs_n,
    })
}
