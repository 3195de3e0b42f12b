//! Line-oriented workspace file: `chart`, `form`, `domain`, `connection`,
//! `metric`, `relation`, and `restrict` statements. `#` starts a comment.

use num::BigRational;
use skewform::forms::{Chart, DForm, ParamMap};
use skewform::geometry::{Connection, Metric};
use skewform::{parse_expr, Domain, Expr};
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        msg: msg.into(),
    })
}

/// How a stored restriction maps back onto the relation's chart.
#[derive(Debug, Clone)]
pub enum Restriction {
    /// `on { x = e }`: substitute the coordinate, keep the others
    On { coord: String, value: Expr },
    /// `along (t, ...) -> (e1, ..., en)`: explicit parametrization
    Along { params: Vec<String>, exprs: Vec<Expr> },
}

#[derive(Debug, Default)]
pub struct Workspace {
    pub charts: Vec<Chart>,
    pub forms: BTreeMap<String, DForm>,
    pub connections: BTreeMap<String, Connection>,
    pub metrics: BTreeMap<String, Metric>,
    /// relation name → (ψ form name, ω form name)
    pub relations: BTreeMap<String, (String, String)>,
    /// derived-relation name → (base relation name, restriction)
    pub restrictions: BTreeMap<String, (String, Restriction)>,
    pub domain: Domain,
    pub has_domain: bool,
}

impl Workspace {
    pub fn current_chart(&self) -> Option<&Chart> {
        self.charts.last()
    }

    /// Domain used for zero-testing: the declared one, else generic.
    pub fn effective_domain(&self) -> Domain {
        if self.has_domain {
            self.domain.clone()
        } else {
            Domain::generic()
        }
    }
}

/// Splits at top-level commas (parentheses and brackets balanced).
pub fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' | '{' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' | '}' => {
                depth -= 1;
                cur.push(ch);
            }
            c if c == sep && depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            c => cur.push(c),
        }
    }
    out.push(cur.trim().to_string());
    out
}

/// Parses a rational bound: integer, fraction `a/b`, or finite decimal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Some(r);
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let whole: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().ok()?
        };
        let digits: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let r = BigRational::from_integer(whole.into())
            + BigRational::new((sign * digits).into(), scale.into());
        return Some(r);
    }
    None
}

/// Parses one term of a form expression: coefficient factors times
/// differential factors (`dx`, `dT^dV`, ...), in written order.
fn parse_form_term(
    chart: &Chart,
    term: &str,
    line: usize,
) -> Result<(Vec<usize>, Expr), ParseError> {
    let mut indices = Vec::new();
    let mut coeff_factors = Vec::new();
    for factor in split_top_level(term, '*') {
        // a factor is a differential chain when every ^-joined piece is
        // `d<coordinate>`; otherwise it belongs to the coefficient
        let pieces: Vec<String> = split_top_level(&factor, '^');
        let as_diffs: Option<Vec<usize>> = pieces
            .iter()
            .map(|p| p.strip_prefix('d').and_then(|name| chart.index_of(name)))
            .collect();
        match as_diffs {
            Some(ids) if !factor.is_empty() => indices.extend(ids),
            _ => coeff_factors.push(factor),
        }
    }
    let coeff_src = if coeff_factors.is_empty() {
        "1".to_string()
    } else {
        coeff_factors.join("*")
    };
    let coeff = parse_expr(&coeff_src)
        .map_err(|e| ParseError {
            line,
            msg: format!("bad coefficient '{coeff_src}': {e}"),
        })?;
    Ok((indices, coeff))
}

/// Parses a full form expression: a signed sum of terms.
pub fn parse_form_expr(
    chart: &Chart,
    degree: usize,
    src: &str,
    line: usize,
) -> Result<DForm, ParseError> {
    let mut w = DForm::zero(chart.clone(), degree);
    // split into signed terms at top level
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut sign = 1i64;
    for (i, ch) in src.chars().enumerate() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || ch == '-') && i > 0 && !cur.trim().is_empty() {
            // not a unary sign or an exponent sign: previous char decides
            let prev = cur.chars().rev().find(|c| !c.is_whitespace());
            if !matches!(prev, Some('*') | Some('^') | Some('/') | Some('(')) {
                terms.push((sign, cur.trim().to_string()));
                cur = String::new();
                sign = if ch == '+' { 1 } else { -1 };
                continue;
            }
        }
        if depth == 0 && (ch == '+' || ch == '-') && cur.trim().is_empty() {
            if ch == '-' {
                sign = -sign;
            }
            continue;
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        terms.push((sign, cur.trim().to_string()));
    }
    if terms.is_empty() {
        return err(line, "empty form expression");
    }
    for (sgn, term) in terms {
        if term == "0" {
            continue;
        }
        let (indices, coeff) = parse_form_term(chart, &term, line)?;
        if indices.len() != degree {
            return err(
                line,
                format!(
                    "term '{term}' has {} differential factors, form degree is {degree}",
                    indices.len()
                ),
            );
        }
        let coeff = if sgn < 0 { Expr::neg(coeff) } else { coeff };
        if degree == 0 {
            let prev = w.coeff(&[]);
            w = DForm::scalar(chart.clone(), Expr::add(prev, coeff));
        } else {
            w.add_term(&indices, coeff).map_err(|e| ParseError {
                line,
                msg: format!("term '{term}': {e}"),
            })?;
        }
    }
    Ok(w)
}

/// Parses `{ x = 0 }` into a coordinate/value pair.
pub fn parse_on_clause(chart: &Chart, clause: &str, line: usize) -> Result<Restriction, ParseError> {
    let inner = clause
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .unwrap_or(clause)
        .trim();
    let Some((lhs, rhs)) = inner.split_once('=') else {
        return err(line, format!("locus '{inner}' must be 'coordinate = expression'"));
    };
    let coord = lhs.trim().to_string();
    if chart.index_of(&coord).is_none() {
        return err(line, format!("'{coord}' is not a coordinate of the active chart"));
    }
    let value = parse_expr(rhs.trim()).map_err(|e| ParseError {
        line,
        msg: format!("bad locus expression: {e}"),
    })?;
    if value.free_symbols().contains(&coord) {
        return err(line, format!("locus for '{coord}' must not mention '{coord}'"));
    }
    Ok(Restriction::On { coord, value })
}

/// Parses `(t) -> (c*t + k, t)` into a parametrization.
pub fn parse_along_clause(clause: &str, line: usize) -> Result<Restriction, ParseError> {
    let Some((lhs, rhs)) = clause.split_once("->") else {
        return err(line, "expected '(params) -> (expressions)'");
    };
    let strip = |s: &str| -> Option<String> {
        let t = s.trim();
        t.strip_prefix('(')
            .and_then(|u| u.strip_suffix(')'))
            .map(|u| u.to_string())
    };
    let (Some(lhs), Some(rhs)) = (strip(lhs), strip(rhs)) else {
        return err(line, "both sides of '->' must be parenthesized tuples");
    };
    let params: Vec<String> = split_top_level(&lhs, ',')
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect();
    let mut exprs = Vec::new();
    for piece in split_top_level(&rhs, ',') {
        exprs.push(parse_expr(&piece).map_err(|e| ParseError {
            line,
            msg: format!("bad map component '{piece}': {e}"),
        })?);
    }
    if params.is_empty() || exprs.is_empty() {
        return err(line, "parametrization needs parameters and components");
    }
    Ok(Restriction::Along { params, exprs })
}

/// Realizes a restriction as a pullback map onto the relation's chart.
pub fn restriction_map(
    chart: &Chart,
    r: &Restriction,
) -> Result<ParamMap, String> {
    match r {
        Restriction::On { coord, value } => {
            let remaining: Vec<String> = chart
                .names()
                .iter()
                .filter(|n| n.as_str() != coord.as_str())
                .cloned()
                .collect();
            let source = Chart::new(remaining).map_err(|e| e.to_string())?;
            let exprs: Vec<Expr> = chart
                .names()
                .iter()
                .map(|n| {
                    if n == coord {
                        value.clone()
                    } else {
                        Expr::sym(n.clone())
                    }
                })
                .collect();
            ParamMap::new(source, chart.clone(), exprs).map_err(|e| e.to_string())
        }
        Restriction::Along { params, exprs } => {
            let source = Chart::new(params.clone()).map_err(|e| e.to_string())?;
            ParamMap::new(source, chart.clone(), exprs.clone()).map_err(|e| e.to_string())
        }
    }
}

fn chart_of_form<'a>(
    ws: &'a Workspace,
    name: &str,
    line: usize,
) -> Result<&'a Chart, ParseError> {
    match ws.forms.get(name) {
        Some(f) => Ok(f.chart()),
        None => err(line, format!("unknown form '{name}'")),
    }
}

/// Parses a complete workspace file.
pub fn parse_workspace(src: &str) -> Result<Workspace, ParseError> {
    let mut ws = Workspace::default();
    let mut lines = src.lines().enumerate().peekable();
    while let Some((idx, raw)) = lines.next() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim().to_string();
        if text.is_empty() {
            continue;
        }
        let (head, rest) = match text.split_once(char::is_whitespace) {
            Some((h, r)) => (h, r.trim().to_string()),
            None => (text.as_str(), String::new()),
        };
        let head = head.to_string();
        match head.as_str() {
            "chart" => {
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or(ParseError {
                        line,
                        msg: "chart needs a parenthesized coordinate list".into(),
                    })?;
                let names: Vec<String> = split_top_level(inner, ',')
                    .into_iter()
                    .filter(|s| !s.is_empty())
                    .collect();
                let chart = Chart::new(names).map_err(|e| ParseError {
                    line,
                    msg: e.to_string(),
                })?;
                ws.charts.push(chart);
            }
            "form" => {
                let Some((name_deg, expr_src)) = rest.split_once('=') else {
                    return err(line, "expected 'form NAME : DEGREE = expression'");
                };
                let Some((name, deg)) = name_deg.split_once(':') else {
                    return err(line, "expected 'form NAME : DEGREE = expression'");
                };
                let name = name.trim().to_string();
                let degree: usize = deg.trim().parse().map_err(|_| ParseError {
                    line,
                    msg: format!("bad degree '{}'", deg.trim()),
                })?;
                if ws.forms.contains_key(&name) {
                    return err(line, format!("duplicate form name '{name}'"));
                }
                let chart = ws
                    .current_chart()
                    .ok_or(ParseError {
                        line,
                        msg: "form declared before any chart".into(),
                    })?
                    .clone();
                let w = parse_form_expr(&chart, degree, expr_src.trim(), line)?;
                ws.forms.insert(name, w);
            }
            "domain" => {
                parse_domain_clauses(&mut ws, &rest, line)?;
                ws.has_domain = true;
            }
            "connection" => {
                let Some((name, tail)) = rest.split_once('{') else {
                    return err(line, "expected 'connection NAME { ... }'");
                };
                let name = name.trim().to_string();
                if ws.connections.contains_key(&name) {
                    return err(line, format!("duplicate connection name '{name}'"));
                }
                let chart = ws
                    .current_chart()
                    .ok_or(ParseError {
                        line,
                        msg: "connection declared before any chart".into(),
                    })?
                    .clone();
                let mut body = vec![(line, tail.trim().to_string())];
                let mut closed = tail.contains('}');
                while !closed {
                    let Some((jdx, jraw)) = lines.next() else {
                        return err(line, format!("connection '{name}' is never closed"));
                    };
                    let jtext = jraw.split('#').next().unwrap_or("").trim().to_string();
                    closed = jtext.contains('}');
                    body.push((jdx + 1, jtext));
                }
                let mut conn = Connection::zero(chart.clone());
                for (bline, btext) in body {
                    for entry in split_top_level(&btext.replace('}', ""), ';') {
                        let entry = entry.trim();
                        if entry.is_empty() {
                            continue;
                        }
                        parse_connection_entry(&mut conn, &chart, &name, entry, bline)?;
                    }
                }
                ws.connections.insert(name, conn);
            }
            "metric" => {
                let Some((name, body)) = rest.split_once('=') else {
                    return err(line, "expected 'metric NAME = diag(...)'");
                };
                let name = name.trim().to_string();
                if ws.metrics.contains_key(&name) {
                    return err(line, format!("duplicate metric name '{name}'"));
                }
                let chart = ws
                    .current_chart()
                    .ok_or(ParseError {
                        line,
                        msg: "metric declared before any chart".into(),
                    })?
                    .clone();
                let body = body.trim();
                let inner = body
                    .strip_prefix("diag(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or(ParseError {
                        line,
                        msg: "only 'diag(e1, ..., en)' metrics are accepted".into(),
                    })?;
                let mut diag = Vec::new();
                for piece in split_top_level(inner, ',') {
                    diag.push(parse_expr(&piece).map_err(|e| ParseError {
                        line,
                        msg: format!("bad metric entry '{piece}': {e}"),
                    })?);
                }
                if diag.len() != chart.dim() {
                    return err(
                        line,
                        format!(
                            "metric has {} entries, chart has {} coordinates",
                            diag.len(),
                            chart.dim()
                        ),
                    );
                }
                ws.metrics.insert(name, Metric::diagonal(chart, diag));
            }
            "relation" => {
                // relation r : d(psi) = omega
                let Some((name, body)) = rest.split_once(':') else {
                    return err(line, "expected 'relation NAME : d(PSI) = OMEGA'");
                };
                let name = name.trim().to_string();
                if ws.relations.contains_key(&name) {
                    return err(line, format!("duplicate relation name '{name}'"));
                }
                let Some((lhs, rhs)) = body.split_once('=') else {
                    return err(line, "expected 'relation NAME : d(PSI) = OMEGA'");
                };
                let psi = lhs
                    .trim()
                    .strip_prefix("d(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or(ParseError {
                        line,
                        msg: "left side must be d(PSI) with PSI a named form".into(),
                    })?
                    .trim()
                    .to_string();
                let omega = rhs.trim().to_string();
                chart_of_form(&ws, &psi, line)?;
                chart_of_form(&ws, &omega, line)?;
                ws.relations.insert(name, (psi, omega));
            }
            "restrict" => {
                // restrict r on { x = 0 } [as NAME]
                // restrict r along (t) -> (c*t + k, t) [as NAME]
                let (body, new_name) = match rest.rsplit_once(" as ") {
                    Some((b, n)) => (b.trim().to_string(), n.trim().to_string()),
                    None => (rest.clone(), String::new()),
                };
                let Some((rname, clause)) = body.split_once(char::is_whitespace) else {
                    return err(line, "expected 'restrict RELATION on|along ...'");
                };
                let rname = rname.to_string();
                let Some((psi_name, _)) = ws.relations.get(&rname) else {
                    return err(line, format!("unknown relation '{rname}'"));
                };
                let chart = ws.forms[psi_name].chart().clone();
                let clause = clause.trim();
                let restriction = if let Some(c) = clause.strip_prefix("on") {
                    parse_on_clause(&chart, c.trim(), line)?
                } else if let Some(c) = clause.strip_prefix("along") {
                    parse_along_clause(c.trim(), line)?
                } else {
                    return err(line, "expected 'on {{ ... }}' or 'along (..) -> (..)'");
                };
                let new_name = if new_name.is_empty() {
                    format!("{rname}_restricted")
                } else {
                    new_name
                };
                if ws.restrictions.contains_key(&new_name) {
                    return err(line, format!("duplicate restriction name '{new_name}'"));
                }
                ws.restrictions.insert(new_name, (rname, restriction));
            }
            other => {
                return err(line, format!("unknown statement '{other}'"));
            }
        }
    }
    Ok(ws)
}

fn parse_domain_clauses(ws: &mut Workspace, rest: &str, line: usize) -> Result<(), ParseError> {
    let mut tokens = rest.split_whitespace().peekable();
    while let Some(tok) = tokens.next() {
        match tok {
            "box" => {
                let sym = tokens
                    .next()
                    .ok_or(ParseError {
                        line,
                        msg: "box clause needs a symbol".into(),
                    })?
                    .to_string();
                let kw = tokens.next().unwrap_or("");
                if kw != "in" {
                    return err(line, "expected 'box SYMBOL in [lo, hi]'");
                }
                // gather the bracketed range (may contain a space after the comma)
                let mut range = String::new();
                while !range.contains(']') {
                    let Some(piece) = tokens.next() else {
                        return err(line, "unterminated range bracket");
                    };
                    range.push_str(piece);
                }
                let inner = range
                    .strip_prefix('[')
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or(ParseError {
                        line,
                        msg: format!("bad range '{range}'"),
                    })?;
                let parts: Vec<&str> = inner.split(',').collect();
                if parts.len() != 2 {
                    return err(line, format!("range '{inner}' needs two bounds"));
                }
                let lo = parse_rational(parts[0]).ok_or(ParseError {
                    line,
                    msg: format!("bad bound '{}'", parts[0]),
                })?;
                let hi = parse_rational(parts[1]).ok_or(ParseError {
                    line,
                    msg: format!("bad bound '{}'", parts[1]),
                })?;
                ws.domain.set_box(sym, lo, hi);
            }
            "exclude" => {
                let mut tuple = String::new();
                while !tuple.contains(')') {
                    let Some(piece) = tokens.next() else {
                        return err(line, "unterminated exclude tuple");
                    };
                    tuple.push_str(piece);
                }
                let inner = tuple
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or(ParseError {
                        line,
                        msg: format!("bad exclude tuple '{tuple}'"),
                    })?;
                let chart = ws
                    .current_chart()
                    .ok_or(ParseError {
                        line,
                        msg: "exclude needs a chart for coordinate order".into(),
                    })?
                    .clone();
                let values: Vec<&str> = inner.split(',').collect();
                if values.len() != chart.dim() {
                    return err(
                        line,
                        format!(
                            "exclude tuple has {} entries, chart has {}",
                            values.len(),
                            chart.dim()
                        ),
                    );
                }
                let mut point = BTreeMap::new();
                for (name, v) in chart.names().iter().zip(values) {
                    let r = parse_rational(v).ok_or(ParseError {
                        line,
                        msg: format!("bad excluded value '{v}'"),
                    })?;
                    point.insert(name.clone(), r);
                }
                ws.domain.exclude(point);
            }
            other => return err(line, format!("unknown domain clause '{other}'")),
        }
    }
    Ok(())
}

fn parse_connection_entry(
    conn: &mut Connection,
    chart: &Chart,
    cname: &str,
    entry: &str,
    line: usize,
) -> Result<(), ParseError> {
    // NAME[a][b][c] = expr, indices by coordinate name
    let Some((lhs, rhs)) = entry.split_once('=') else {
        return err(line, format!("bad connection entry '{entry}'"));
    };
    let lhs = lhs.trim();
    let Some(idx_part) = lhs.strip_prefix(cname) else {
        return err(line, format!("entry '{lhs}' must start with '{cname}['"));
    };
    let mut ids = Vec::new();
    let mut s = idx_part.trim();
    while let Some(open) = s.strip_prefix('[') {
        let Some((name, tail)) = open.split_once(']') else {
            return err(line, format!("unbalanced index brackets in '{lhs}'"));
        };
        let name = name.trim();
        let id = chart.index_of(name).ok_or(ParseError {
            line,
            msg: format!("'{name}' is not a coordinate of the active chart"),
        })?;
        ids.push(id);
        s = tail.trim();
    }
    if ids.len() != 3 || !s.is_empty() {
        return err(line, format!("connection entry '{lhs}' needs exactly three indices"));
    }
    let e = parse_expr(rhs.trim()).map_err(|e| ParseError {
        line,
        msg: format!("bad connection value: {e}"),
    })?;
    conn.set(ids[0], ids[1], ids[2], e).map_err(|e| ParseError {
        line,
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use skewform::simplify;

    #[test]
    fn parses_chart_form_domain() {
        let src = "\
# ideal gas
chart (T, V)
form omega : 1 = c_v*dT + (R*T/V)*dV
domain box T in [1, 2] box V in [1, 2]
";
        let ws = parse_workspace(src).unwrap();
        let w = &ws.forms["omega"];
        assert_eq!(w.degree(), 1);
        assert_eq!(w.coeff(&[0]), Expr::sym("c_v"));
        assert_eq!(
            w.coeff(&[1]),
            simplify(&parse_expr("R*T/V").unwrap())
        );
        assert!(ws.has_domain);
    }

    #[test]
    fn reparses_printed_form() {
        let src = "chart (x, y, z)\nform w : 2 = (x*y)*dx^dy + (-z)*dy^dz\n";
        let ws = parse_workspace(src).unwrap();
        let w = &ws.forms["w"];
        let printed = w.to_string();
        let again = parse_form_expr(w.chart(), 2, &printed, 0).unwrap();
        assert_eq!(*w, again);
    }

    #[test]
    fn written_order_signs() {
        // dy^dx = -dx^dy
        let src = "chart (x, y)\nform w : 2 = a*dy^dx\n";
        let ws = parse_workspace(src).unwrap();
        assert_eq!(
            ws.forms["w"].coeff(&[0, 1]),
            simplify(&Expr::neg(Expr::sym("a")))
        );
    }

    #[test]
    fn forward_reference_rejected() {
        let src = "chart (x, y)\nrelation r : d(psi) = omega\n";
        let e = parse_workspace(src).unwrap_err();
        assert!(e.msg.contains("unknown form"), "{e}");
    }

    #[test]
    fn connection_block_and_metric() {
        let src = "\
chart (theta, phi)
connection G {
  G[theta][phi][phi] = -sin(theta)*cos(theta)
  G[phi][theta][phi] = cos(theta)/sin(theta)
}
metric g = diag(1, sin(theta)^2)
";
        let ws = parse_workspace(src).unwrap();
        let g = &ws.connections["G"];
        assert_eq!(
            g.get(0, 1, 1),
            simplify(&parse_expr("-sin(theta)*cos(theta)").unwrap())
        );
        assert!(ws.metrics.contains_key("g"));
    }

    #[test]
    fn restrict_statements() {
        let src = "\
chart (x, y)
form psi : 0 = 0
form w : 1 = x*y*dx
relation r : d(psi) = w
restrict r on { x = 0 } as r0
restrict r along (t) -> (t, t^2)
";
        let ws = parse_workspace(src).unwrap();
        assert!(ws.restrictions.contains_key("r0"));
        assert!(ws.restrictions.contains_key("r_restricted"));
        let (base, r) = &ws.restrictions["r0"];
        assert_eq!(base, "r");
        let phi = restriction_map(ws.forms["w"].chart(), r).unwrap();
        assert_eq!(phi.source().dim(), 1);
    }

    #[test]
    fn excluded_point_parsed() {
        let src = "chart (x, y)\ndomain box x in [-1, 1] box y in [-1, 1] exclude (0, 0)\n";
        let ws = parse_workspace(src).unwrap();
        assert_eq!(ws.domain.excluded_points().len(), 1);
    }

    #[test]
    fn decimal_and_fraction_bounds() {
        assert_eq!(
            parse_rational("0.5"),
            Some(BigRational::new(1.into(), 2.into()))
        );
        assert_eq!(
            parse_rational("-1/4"),
            Some(BigRational::new((-1).into(), 4.into()))
        );
    }
}
