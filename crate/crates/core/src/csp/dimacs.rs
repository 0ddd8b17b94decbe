use super::{CspError, CspInstance};

/// Parses DIMACS CNF: `p cnf <n> <m>` then `m` zero-terminated clauses.
///
/// Lines starting with `c` are comments; a lone `%` ends the clause list.
pub fn parse_dimacs(text: &str) -> Result<CspInstance, CspError> {
    let mut header: Option<(usize, usize)> = None;
    let mut instance = CspInstance::new(0);
    let mut clause: Vec<i64> = Vec::new();
    let mut clauses = 0usize;

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line == "%" {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(CspError::MalformedHeader("duplicate header".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", n, m] => n.parse().ok().zip(m.parse().ok()),
                _ => None,
            };
            let (n, m) = parsed.ok_or_else(|| CspError::MalformedHeader(line.to_string()))?;
            header = Some((n, m));
            instance = CspInstance::new(n);
            continue;
        }
        let Some((n, _)) = header else {
            return Err(CspError::MalformedHeader("clause before header".into()));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| CspError::Malformed(format!("bad literal `{tok}`")))?;
            if lit == 0 {
                instance.add_clause(&clause)?;
                clause.clear();
                clauses += 1;
            } else if lit.unsigned_abs() as usize > n {
                return Err(CspError::LiteralOutOfRange { literal: lit, n });
            } else {
                clause.push(lit);
            }
        }
    }
    let Some((_, m)) = header else {
        return Err(CspError::MalformedHeader("missing `p cnf` line".into()));
    };
    if !clause.is_empty() {
        return Err(CspError::UnterminatedClause);
    }
    if clauses != m {
        return Err(CspError::MalformedHeader(format!(
            "header declares {m} clauses, found {clauses}"
        )));
    }
    Ok(instance)
}

/// DIMACS text for an instance of disjunctions.
pub fn to_dimacs(instance: &CspInstance) -> Option<String> {
    let mut out = format!("p cnf {} {}\n", instance.n(), instance.constraints().len());
    for c in instance.constraints() {
        if !c.relation.is_or() {
            return None;
        }
        for (&v, &neg) in c.vars.iter().zip(&c.negated) {
            let lit = v as i64 + 1;
            out += &format!("{} ", if neg { -lit } else { lit });
        }
        out += "0\n";
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let inst = parse_dimacs("p cnf 3 1\n1 -2 3 0").unwrap();
        assert_eq!(inst.n(), 3);
        let c = &inst.constraints()[0];
        assert_eq!(c.vars, vec![0, 1, 2]);
        assert_eq!(c.negated, vec![false, true, false]);
        assert!(c.relation.is_or());

        let inst = parse_dimacs("c unsat\np cnf 1 2\n1 0\n-1 0\n").unwrap();
        assert_eq!(inst.constraints().len(), 2);
    }

    #[test]
    fn clauses_may_span_lines() {
        let inst = parse_dimacs("p cnf 4 2\n1 2\n3 0 -4\n0\n%\n0\n").unwrap();
        assert_eq!(inst.constraints()[0].vars, vec![0, 1, 2]);
        assert_eq!(inst.constraints()[1].vars, vec![3]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n3 0"),
            Err(CspError::LiteralOutOfRange { literal: 3, n: 2 })
        ));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2"), Err(CspError::UnterminatedClause)));
        assert!(matches!(parse_dimacs("p dnf 2 1\n1 0"), Err(CspError::MalformedHeader(_))));
        assert!(matches!(parse_dimacs("1 0"), Err(CspError::MalformedHeader(_))));
        assert!(matches!(parse_dimacs("p cnf 2 2\n1 0"), Err(CspError::MalformedHeader(_))));
        assert!(matches!(parse_dimacs("p cnf 2 1\n0"), Err(CspError::EmptyClause)));
        assert!(matches!(parse_dimacs("p cnf 2 1\nx 0"), Err(CspError::Malformed(_))));
    }

    #[test]
    fn roundtrip() {
        let text = "p cnf 3 2\n1 -2 3 0\n-1 0\n";
        let inst = parse_dimacs(text).unwrap();
        assert_eq!(to_dimacs(&inst).unwrap(), "p cnf 3 2\n1 -2 3 0\n-1 0\n");
    }
}
