//! Reader for a subset of the MPS format.
//!
//! Supported sections are NAME, OBJSENSE, ROWS, COLUMNS (with integer
//! markers), RHS, BOUNDS and ENDATA, all in free format. RANGES and SOS are
//! rejected.

use std::collections::HashMap;

use conbranch_core::{Model, Row, RowKind, Sense, Variable};

use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Bounds,
}

struct RowDef {
    id: String,
    kind: RowKind,
    coefficients: Vec<(usize, f64)>,
    rhs: f64,
}

struct ColumnDef {
    id: String,
    integer: bool,
    lower: f64,
    upper: f64,
    objective: f64,
}

enum RowRef {
    Objective,
    Free,
    Constraint(usize),
}

#[derive(Default)]
struct Builder {
    name: String,
    sense: Option<Sense>,
    objective: Option<String>,
    free_rows: Vec<String>,
    rows: Vec<RowDef>,
    row_index: HashMap<String, usize>,
    columns: Vec<ColumnDef>,
    column_index: HashMap<String, usize>,
    integer_block: bool,
}

impl Builder {
    fn row(&self, line: usize, id: &str) -> Result<RowRef, ParseError> {
        if self.objective.as_deref() == Some(id) {
            Ok(RowRef::Objective)
        } else if let Some(&m) = self.row_index.get(id) {
            Ok(RowRef::Constraint(m))
        } else if self.free_rows.iter().any(|r| r == id) {
            Ok(RowRef::Free)
        } else {
            Err(ParseError::syntax(line, format!("unknown row {id}")))
        }
    }

    fn column(&self, line: usize, id: &str) -> Result<usize, ParseError> {
        self.column_index
            .get(id)
            .copied()
            .ok_or_else(|| ParseError::syntax(line, format!("unknown column {id}")))
    }

    fn add_row(&mut self, line: usize, kind: &str, id: &str) -> Result<(), ParseError> {
        let kind = match kind {
            "N" => {
                if self.objective.is_none() {
                    self.objective = Some(id.to_owned());
                } else {
                    self.free_rows.push(id.to_owned());
                }
                return Ok(());
            }
            "E" => RowKind::Eq,
            "L" => RowKind::Le,
            "G" => RowKind::Ge,
            other => return Err(ParseError::syntax(line, format!("unknown row type {other}"))),
        };
        if self.row_index.contains_key(id) || self.objective.as_deref() == Some(id) {
            return Err(ParseError::syntax(line, format!("duplicate row {id}")));
        }
        self.row_index.insert(id.to_owned(), self.rows.len());
        self.rows.push(RowDef {
            id: id.to_owned(),
            kind,
            coefficients: Vec::new(),
            rhs: 0.0,
        });
        Ok(())
    }

    fn add_entry(&mut self, line: usize, column: &str, row: &str, value: &str) -> Result<(), ParseError> {
        let value = number(line, value)?;
        let n = match self.columns.last() {
            Some(last) if last.id == column => self.columns.len() - 1,
            _ => {
                if self.column_index.contains_key(column) {
                    return Err(ParseError::syntax(line, format!("duplicate column {column}")));
                }
                self.column_index.insert(column.to_owned(), self.columns.len());
                self.columns.push(ColumnDef {
                    id: column.to_owned(),
                    integer: self.integer_block,
                    lower: 0.0,
                    upper: f64::INFINITY,
                    objective: 0.0,
                });
                self.columns.len() - 1
            }
        };
        match self.row(line, row)? {
            RowRef::Objective => self.columns[n].objective += value,
            RowRef::Free => {}
            RowRef::Constraint(m) => self.rows[m].coefficients.push((n, value)),
        }
        Ok(())
    }

    fn add_rhs(&mut self, line: usize, row: &str, value: &str) -> Result<(), ParseError> {
        let value = number(line, value)?;
        match self.row(line, row)? {
            RowRef::Objective => Err(ParseError::Unsupported {
                line,
                section: "RHS on the objective row".into(),
            }),
            RowRef::Free => Ok(()),
            RowRef::Constraint(m) => {
                self.rows[m].rhs = value;
                Ok(())
            }
        }
    }

    fn add_bound(&mut self, line: usize, kind: &str, column: &str, value: Option<&str>) -> Result<(), ParseError> {
        let n = self.column(line, column)?;
        let needs_value = !matches!(kind, "FR" | "MI" | "PL" | "BV");
        let value = match (needs_value, value) {
            (true, Some(v)) => number(line, v)?,
            (true, None) => return Err(ParseError::syntax(line, format!("bound {kind} needs a value"))),
            (false, _) => 0.0,
        };
        let c = &mut self.columns[n];
        match kind {
            "UP" => {
                if value < 0.0 && c.lower == 0.0 {
                    c.lower = f64::NEG_INFINITY;
                }
                c.upper = value;
            }
            "LO" => c.lower = value,
            "FX" => {
                c.lower = value;
                c.upper = value;
            }
            "FR" => {
                c.lower = f64::NEG_INFINITY;
                c.upper = f64::INFINITY;
            }
            "MI" => c.lower = f64::NEG_INFINITY,
            "PL" => c.upper = f64::INFINITY,
            "BV" => {
                c.integer = true;
                c.lower = 0.0;
                c.upper = 1.0;
            }
            "LI" => {
                c.integer = true;
                c.lower = value;
            }
            "UI" => {
                c.integer = true;
                c.upper = value;
            }
            other => return Err(ParseError::syntax(line, format!("unknown bound type {other}"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<Model, ParseError> {
        let mut model = Model::new(self.name, self.sense.unwrap_or(Sense::Minimize));
        for c in self.columns {
            let variable = Variable {
                id: c.id,
                lower: c.lower,
                upper: c.upper,
                objective: c.objective,
                integer: c.integer,
            };
            model
                .add_variable(variable)
                .map_err(|source| ParseError::Model { line: 0, source })?;
        }
        for r in self.rows {
            model
                .add_row(Row::new(r.id, r.kind, r.coefficients, r.rhs))
                .map_err(|source| ParseError::Model { line: 0, source })?;
        }
        Ok(model)
    }
}

fn number(line: usize, token: &str) -> Result<f64, ParseError> {
    let value: f64 = token
        .parse()
        .map_err(|_| ParseError::syntax(line, format!("invalid number {token}")))?;
    if value.is_nan() {
        return Err(ParseError::syntax(line, "NaN is not a valid coefficient"));
    }
    Ok(value)
}

fn sense(line: usize, token: &str) -> Result<Sense, ParseError> {
    match token.to_ascii_uppercase().as_str() {
        "MIN" | "MINIMIZE" => Ok(Sense::Minimize),
        "MAX" | "MAXIMIZE" => Ok(Sense::Maximize),
        other => Err(ParseError::syntax(line, format!("unknown objective sense {other}"))),
    }
}

/// Value pairs `(row, value)` after an optional leading set name.
fn pairs<'a>(line: usize, tokens: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>, ParseError> {
    let body = if tokens.len() % 2 == 1 { &tokens[1..] } else { tokens };
    if body.is_empty() {
        return Err(ParseError::syntax(line, "expected row/value pairs"));
    }
    Ok(body.chunks(2).map(|p| (p[0], p[1])).collect())
}

pub fn parse_mps(text: &str) -> Result<Model, ParseError> {
    let mut builder = Builder::default();
    let mut section: Option<Section> = None;
    let mut ended = false;
    let mut seen_any = false;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        seen_any = true;
        if ended {
            return Err(ParseError::syntax(line, "data after ENDATA"));
        }
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(char::is_whitespace) {
            let keyword = tokens[0];
            section = match keyword {
                "NAME" => {
                    builder.name = tokens.get(1).copied().unwrap_or("").to_owned();
                    Some(Section::Name)
                }
                "OBJSENSE" => {
                    if let Some(token) = tokens.get(1) {
                        builder.sense = Some(sense(line, token)?);
                    }
                    Some(Section::ObjSense)
                }
                "ROWS" => Some(Section::Rows),
                "COLUMNS" => Some(Section::Columns),
                "RHS" => Some(Section::Rhs),
                "BOUNDS" => Some(Section::Bounds),
                "RANGES" | "SOS" => {
                    return Err(ParseError::Unsupported {
                        line,
                        section: keyword.to_owned(),
                    })
                }
                "ENDATA" => {
                    ended = true;
                    None
                }
                other => return Err(ParseError::syntax(line, format!("unknown section {other}"))),
            };
            continue;
        }
        match section {
            None | Some(Section::Name) => {
                return Err(ParseError::syntax(line, "data line outside a section"));
            }
            Some(Section::ObjSense) => builder.sense = Some(sense(line, tokens[0])?),
            Some(Section::Rows) => {
                let [kind, id] = tokens[..] else {
                    return Err(ParseError::syntax(line, "expected <type> <row>"));
                };
                builder.add_row(line, kind, id)?;
            }
            Some(Section::Columns) => {
                if tokens.iter().any(|t| t.trim_matches('\'') == "MARKER") {
                    let marker = tokens.iter().map(|t| t.trim_matches('\'')).find(|t| *t == "INTORG" || *t == "INTEND");
                    match marker {
                        Some("INTORG") => builder.integer_block = true,
                        Some(_) => builder.integer_block = false,
                        None => return Err(ParseError::syntax(line, "unknown marker")),
                    }
                    continue;
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(ParseError::syntax(line, "expected <column> <row> <value> [<row> <value>]"));
                }
                for pair in tokens[1..].chunks(2) {
                    builder.add_entry(line, tokens[0], pair[0], pair[1])?;
                }
            }
            Some(Section::Rhs) => {
                for (row, value) in pairs(line, &tokens)? {
                    builder.add_rhs(line, row, value)?;
                }
            }
            Some(Section::Bounds) => {
                let kind = tokens[0];
                let rest = &tokens[1..];
                let (column, value) = if matches!(kind, "FR" | "MI" | "PL" | "BV") {
                    match rest {
                        [column] | [_, column] => (*column, None),
                        [_, column, value] => (*column, Some(*value)),
                        _ => return Err(ParseError::syntax(line, "malformed bound")),
                    }
                } else {
                    match rest {
                        [column, value] => (*column, Some(*value)),
                        [_, column, value] => (*column, Some(*value)),
                        _ => return Err(ParseError::syntax(line, "malformed bound")),
                    }
                };
                builder.add_bound(line, kind, column, value)?;
            }
        }
    }
    if !seen_any {
        return Err(ParseError::Empty);
    }
    if !ended {
        return Err(ParseError::syntax(text.lines().count(), "missing ENDATA"));
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
NAME          small
ROWS
 N  cost
 G  lim
COLUMNS
    x         cost      1.0        lim       1.0
    y         cost      2.0        lim       1.0
RHS
    rhs       lim       1.5
ENDATA
";

    #[test]
    fn minimal_model() {
        let m = parse_mps(SMALL).unwrap();
        assert_eq!(m.name, "small");
        assert_eq!(m.variables().len(), 2);
        assert_eq!(m.rows().len(), 1);
        assert_eq!(m.rows()[0].kind, RowKind::Ge);
        assert_eq!(m.rows()[0].rhs, 1.5);
        assert_eq!(m.variables()[1].objective, 2.0);
        assert_eq!(m.variables()[0].upper, f64::INFINITY);
    }

    #[test]
    fn integer_markers() {
        let text = "\
NAME m
ROWS
 N obj
 L c
COLUMNS
 M1 'MARKER' 'INTORG'
 a obj 1 c 1
 M2 'MARKER' 'INTEND'
 b obj 1 c 1
RHS
 c 4
BOUNDS
 UP bnd a 3
 BV bnd b
ENDATA
";
        let m = parse_mps(text).unwrap();
        assert!(m.variables()[0].integer);
        assert_eq!(m.variables()[0].upper, 3.0);
        assert!(m.variables()[1].integer);
        assert_eq!((m.variables()[1].lower, m.variables()[1].upper), (0.0, 1.0));
    }

    #[test]
    fn objsense_and_bounds() {
        let text = "\
NAME m
OBJSENSE
    MAX
ROWS
 N obj
 E e
COLUMNS
 a obj 1 e 1
 b obj 1 e 1
 c e 1
RHS
 rhs e 2
BOUNDS
 FR bnd a
 MI bnd b
 FX bnd c 0.5
ENDATA
";
        let m = parse_mps(text).unwrap();
        assert_eq!(m.sense, Sense::Maximize);
        assert_eq!(m.variables()[0].lower, f64::NEG_INFINITY);
        assert_eq!(m.variables()[1].lower, f64::NEG_INFINITY);
        assert_eq!((m.variables()[2].lower, m.variables()[2].upper), (0.5, 0.5));
    }

    #[test]
    fn ranges_are_rejected() {
        let text = SMALL.replace("ENDATA", "RANGES\n    rng lim 1\nENDATA");
        let err = parse_mps(&text).unwrap_err();
        assert_eq!(
            err,
            ParseError::Unsupported {
                line: 10,
                section: "RANGES".into()
            }
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = SMALL.replace("lim       1.5", "lim       abc");
        assert!(matches!(parse_mps(&text), Err(ParseError::Syntax { line: 9, .. })));
        let dup = SMALL.replace(" G  lim", " G  lim\n G  lim");
        assert!(matches!(parse_mps(&dup), Err(ParseError::Syntax { line: 5, .. })));
        let split = SMALL.replace(
            "    y         cost      2.0        lim       1.0",
            "    y         cost      2.0\n    x         lim       1.0",
        );
        assert!(matches!(parse_mps(&split), Err(ParseError::Syntax { line: 8, .. })));
        assert_eq!(parse_mps(""), Err(ParseError::Empty));
        assert!(parse_mps(&SMALL.replace("ENDATA\n", "")).is_err());
    }
}
