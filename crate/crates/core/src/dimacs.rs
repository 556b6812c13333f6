//! DIMACS CNF reader.
//!
//! Accepts the standard format: optional `c` comment lines, one `p cnf
//! <vars> <clauses>` header, then whitespace-separated literals with `0`
//! terminating each clause; clauses may span lines. The reader is lenient
//! by default: a clause count that disagrees with the header, or a literal
//! past the declared universe, is recorded as a warning and parsing
//! continues. Strict mode turns those warnings into errors.

use crate::formula::Formula;
use crate::parser::ParseError;
use crate::var::VarId;

/// Parsed CNF file: the declared universe and one clause formula each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimacsCnf {
    /// Universe size from the header, grown if lenient parsing saw larger
    /// literals.
    pub num_vars: u32,
    /// Each clause as a disjunction of literals; the empty clause parses to
    /// `false`.
    pub clauses: Vec<Formula>,
    /// Deviations tolerated in lenient mode.
    pub warnings: Vec<String>,
}

/// Parses DIMACS CNF text; see the module docs for the dialect.
pub fn parse_dimacs(text: &str, strict: bool) -> Result<DimacsCnf, ParseError> {
    let mut num_vars: Option<u32> = None;
    let mut declared_clauses = 0usize;
    let mut clauses = Vec::new();
    let mut warnings = Vec::new();
    let mut literals: Vec<Formula> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |col: usize, message: String| ParseError {
            line: lineno + 1,
            col,
            message,
        };
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if num_vars.is_some() {
                return Err(err(1, "duplicate 'p' header".into()));
            }
            let fields: Vec<&str> = rest.split_ascii_whitespace().collect();
            if fields.len() != 3 || fields[0] != "cnf" {
                return Err(err(1, format!("malformed header {line:?}")));
            }
            let vars: u32 = fields[1]
                .parse()
                .map_err(|_| err(1, format!("bad variable count {:?}", fields[1])))?;
            declared_clauses = fields[2]
                .parse()
                .map_err(|_| err(1, format!("bad clause count {:?}", fields[2])))?;
            num_vars = Some(vars);
            continue;
        }
        let Some(vars) = num_vars.as_mut() else {
            return Err(err(1, "clause before 'p cnf' header".into()));
        };
        for token in line.split_ascii_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| err(1, format!("bad literal {token:?}")))?;
            if lit == 0 {
                clauses.push(close_clause(&mut literals));
                continue;
            }
            let id = lit.unsigned_abs() as u32;
            if id > *vars {
                let message =
                    format!("line {}: literal {lit} exceeds declared universe {vars}", lineno + 1);
                if strict {
                    return Err(err(1, message));
                }
                warnings.push(message);
                *vars = id;
            }
            let var = Formula::var(VarId::new(id).expect("nonzero literal"));
            literals.push(if lit > 0 { var } else { Formula::not(var) });
        }
    }

    let Some(num_vars) = num_vars else {
        return Err(ParseError {
            line: text.lines().count().max(1),
            col: 1,
            message: "missing 'p cnf' header".into(),
        });
    };
    if !literals.is_empty() {
        let message = "last clause is not terminated by 0".to_string();
        if strict {
            return Err(ParseError {
                line: text.lines().count(),
                col: 1,
                message,
            });
        }
        warnings.push(message);
        clauses.push(close_clause(&mut literals));
    }
    if clauses.len() != declared_clauses {
        let message = format!(
            "header declares {declared_clauses} clauses, found {}",
            clauses.len()
        );
        if strict {
            return Err(ParseError {
                line: 1,
                col: 1,
                message,
            });
        }
        warnings.push(message);
    }
    Ok(DimacsCnf {
        num_vars,
        clauses,
        warnings,
    })
}

fn close_clause(literals: &mut Vec<Formula>) -> Formula {
    match literals.len() {
        0 => Formula::False,
        _ => Formula::Or(std::mem::take(literals)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_clauses_across_lines() {
        let cnf = parse_dimacs("c demo\np cnf 3 2\n1 -2 0 2\n3 0\n", true).unwrap();
        assert_eq!(cnf.num_vars, 3);
        assert_eq!(cnf.clauses.len(), 2);
        assert_eq!(cnf.clauses[0].to_string(), "E1 | !E2");
        assert_eq!(cnf.clauses[1].to_string(), "E2 | E3");
        assert!(cnf.warnings.is_empty());
    }

    #[test]
    fn empty_clause_is_false() {
        let cnf = parse_dimacs("p cnf 1 1\n0\n", true).unwrap();
        assert_eq!(cnf.clauses, vec![Formula::False]);
    }

    #[test]
    fn clause_count_mismatch_warns_when_lenient() {
        let text = "p cnf 2 3\n1 0\n2 0\n";
        let cnf = parse_dimacs(text, false).unwrap();
        assert_eq!(cnf.clauses.len(), 2);
        assert_eq!(cnf.warnings.len(), 1);
        assert!(cnf.warnings[0].contains("declares 3"));
        assert!(parse_dimacs(text, true).is_err());
    }

    #[test]
    fn oversized_literal_grows_universe_when_lenient() {
        let cnf = parse_dimacs("p cnf 1 1\n1 5 0\n", false).unwrap();
        assert_eq!(cnf.num_vars, 5);
        assert_eq!(cnf.warnings.len(), 1);
        assert!(parse_dimacs("p cnf 1 1\n1 5 0\n", true).is_err());
    }

    #[test]
    fn header_is_required() {
        assert!(parse_dimacs("1 2 0\n", false).is_err());
        assert!(parse_dimacs("", false).is_err());
    }
}
