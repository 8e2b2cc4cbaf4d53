//! A small line-oriented model format.
//!
//! ```text
//! # comment
//! name cover
//! min : 1*x + 2*y
//! var x int 0 1
//! var y 0 inf
//! row c1 >= 1 : x + y
//! ```
//!
//! The objective line may come before or after the variables. Bounds
//! default to `0 inf`; numbers may be written as `p/q` or `inf`. `bin` is
//! short for `int 0 1`.

use std::fmt::Write;

use conbranch_core::{Model, Row, RowKind, Sense, Variable};

use crate::error::ParseError;

pub fn parse_number(token: &str) -> Option<f64> {
    let value = match token {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => match token.split_once('/') {
            Some((p, q)) => p.parse::<f64>().ok()? / q.parse::<f64>().ok()?,
            None => token.parse().ok()?,
        },
    };
    (!value.is_nan()).then_some(value)
}

fn number(line: usize, token: &str) -> Result<f64, ParseError> {
    parse_number(token).ok_or_else(|| ParseError::syntax(line, format!("invalid number {token}")))
}

/// Terms such as `3*x`, `-x`, `+ 1/2*y`, `- 2 * z`.
fn parse_terms(line: usize, text: &str, model: &Model) -> Result<Vec<(usize, f64)>, ParseError> {
    let spaced = text.replace('*', " * ");
    let tokens: Vec<&str> = spaced.split_whitespace().collect();
    let mut terms = Vec::new();
    let mut k = 0;
    while k < tokens.len() {
        let mut sign = 1.0;
        while k < tokens.len() && (tokens[k] == "+" || tokens[k] == "-") {
            if tokens[k] == "-" {
                sign = -sign;
            }
            k += 1;
        }
        let Some(&token) = tokens.get(k) else {
            return Err(ParseError::syntax(line, "dangling sign"));
        };
        let (coefficient, name) = if tokens.get(k + 1) == Some(&"*") {
            let name = tokens
                .get(k + 2)
                .ok_or_else(|| ParseError::syntax(line, "missing variable after *"))?;
            k += 3;
            (number(line, token)?, *name)
        } else {
            k += 1;
            match token.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, token),
            }
        };
        let n = model
            .variable_index(name)
            .ok_or_else(|| ParseError::syntax(line, format!("unknown variable {name}")))?;
        terms.push((n, sign * coefficient));
    }
    Ok(terms)
}

pub fn parse_native(text: &str) -> Result<Model, ParseError> {
    let mut model: Option<Model> = None;
    let mut name = String::new();
    let mut objective: Option<(usize, String)> = None;
    let mut seen_any = false;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        seen_any = true;
        let (head, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match head {
            "name" => name = rest.trim().to_owned(),
            "min" | "max" | "min:" | "max:" => {
                if model.is_some() {
                    return Err(ParseError::syntax(line, "objective sense given twice"));
                }
                let sense = if head.starts_with("min") {
                    Sense::Minimize
                } else {
                    Sense::Maximize
                };
                model = Some(Model::new(name.clone(), sense));
                let terms = if head.ends_with(':') {
                    rest
                } else {
                    match rest.trim().strip_prefix(':') {
                        Some(terms) => terms,
                        None if rest.trim().is_empty() => "",
                        None => return Err(ParseError::syntax(line, "expected ':' before objective terms")),
                    }
                };
                objective = Some((line, terms.to_owned()));
            }
            "var" => {
                let model = model
                    .as_mut()
                    .ok_or_else(|| ParseError::syntax(line, "objective sense must come first"))?;
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                let Some((&id, flags)) = tokens.split_first() else {
                    return Err(ParseError::syntax(line, "expected variable id"));
                };
                let (integer, bounds) = match flags.first() {
                    Some(&"int") => (true, &flags[1..]),
                    Some(&"bin") if flags.len() == 1 => (true, &["0", "1"][..]),
                    _ => (false, flags),
                };
                let (lower, upper) = match bounds {
                    [] => (0.0, f64::INFINITY),
                    [lb] => (number(line, lb)?, f64::INFINITY),
                    [lb, ub] => (number(line, lb)?, number(line, ub)?),
                    _ => return Err(ParseError::syntax(line, "too many fields in var line")),
                };
                let variable = Variable {
                    id: id.to_owned(),
                    lower,
                    upper,
                    objective: 0.0,
                    integer,
                };
                model
                    .add_variable(variable)
                    .map_err(|source| ParseError::Model { line, source })?;
            }
            "row" => {
                let model = model
                    .as_mut()
                    .ok_or_else(|| ParseError::syntax(line, "objective sense must come first"))?;
                let (lhs, terms) = rest
                    .split_once(':')
                    .ok_or_else(|| ParseError::syntax(line, "expected ':' in row"))?;
                let tokens: Vec<&str> = lhs.split_whitespace().collect();
                let [id, op, rhs] = tokens[..] else {
                    return Err(ParseError::syntax(line, "expected row <id> <op> <rhs> : <terms>"));
                };
                let kind = match op {
                    ">=" => RowKind::Ge,
                    "<=" => RowKind::Le,
                    "=" | "==" => RowKind::Eq,
                    other => return Err(ParseError::syntax(line, format!("unknown relation {other}"))),
                };
                let terms = parse_terms(line, terms, model)?;
                model
                    .add_row(Row::new(id, kind, terms, number(line, rhs)?))
                    .map_err(|source| ParseError::Model { line, source })?;
            }
            other => return Err(ParseError::syntax(line, format!("unknown keyword {other}"))),
        }
    }
    if !seen_any {
        return Err(ParseError::Empty);
    }
    let mut model = model.ok_or_else(|| ParseError::syntax(0, "missing min or max line"))?;
    model.name = name;
    if let Some((line, terms)) = objective {
        for (n, c) in parse_terms(line, &terms, &model)? {
            let current = model.variables()[n].objective;
            model.set_objective(n, current + c);
        }
    }
    Ok(model)
}

fn format_number(value: f64) -> String {
    if value == f64::INFINITY {
        "inf".into()
    } else if value == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{value}")
    }
}

fn format_terms(model: &Model, terms: impl IntoIterator<Item = (usize, f64)>) -> String {
    let mut out = String::new();
    for (k, (n, c)) in terms.into_iter().enumerate() {
        let id = &model.variables()[n].id;
        if k == 0 {
            write!(out, "{}*{id}", format_number(c)).unwrap();
        } else if c < 0.0 {
            write!(out, " - {}*{id}", format_number(-c)).unwrap();
        } else {
            write!(out, " + {}*{id}", format_number(c)).unwrap();
        }
    }
    out
}

/// One row in native syntax, using `model`'s variable ids.
pub fn format_row(model: &Model, row: &Row) -> String {
    let op = match row.kind {
        RowKind::Ge => ">=",
        RowKind::Le => "<=",
        RowKind::Eq => "=",
    };
    format!(
        "row {} {op} {} : {}",
        row.id,
        format_number(row.rhs),
        format_terms(model, row.coefficients.iter().copied())
    )
}

pub fn write_native(model: &Model) -> String {
    let mut out = String::new();
    if !model.name.is_empty() {
        writeln!(out, "name {}", model.name).unwrap();
    }
    let sense = match model.sense {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    };
    let objective = model
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.objective != 0.0)
        .map(|(n, v)| (n, v.objective));
    writeln!(out, "{sense} : {}", format_terms(model, objective)).unwrap();
    for v in model.variables() {
        let kind = if v.integer { " int" } else { "" };
        writeln!(
            out,
            "var {}{kind} {} {}",
            v.id,
            format_number(v.lower),
            format_number(v.upper)
        )
        .unwrap();
    }
    for row in model.rows() {
        writeln!(out, "{}", format_row(model, row)).unwrap();
    }
    out
}
