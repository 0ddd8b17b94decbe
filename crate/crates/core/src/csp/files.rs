//! Template, instance and scheme files.
//!
//! Template: `{"relations": {"name": ["100", "010", "001"]}}`.
//! Instance: `{"n": 3, "constraints": [{"relation": "name", "vars": [1, 2, 3],
//! "negated": "000"}]}` with 1-indexed variables and an optional mask.
//! Scheme: the interval set on the first line, `η` as a 0/1 string on the second.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{CspError, CspInstance, CspTemplate, Relation, ThresholdScheme};
use crate::domain::IntervalSet;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    relations: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintEntry {
    relation: String,
    vars: Vec<usize>,
    #[serde(default)]
    negated: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    constraints: Vec<ConstraintEntry>,
}

fn bits(text: &str) -> Result<Vec<bool>, CspError> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CspError::Malformed(format!("`{text}` is not a 0/1 string"))),
        })
        .collect()
}

pub fn parse_template_json(text: &str) -> Result<CspTemplate, CspError> {
    let file: TemplateFile =
        serde_json::from_str(text).map_err(|e| CspError::Malformed(e.to_string()))?;
    let mut relations = Vec::with_capacity(file.relations.len());
    for (name, rows) in file.relations {
        let tuples = rows.iter().map(|r| bits(r)).collect::<Result<Vec<_>, _>>()?;
        let arity = tuples.first().map_or(0, Vec::len);
        relations.push(Relation::new(name, arity, tuples)?);
    }
    Ok(CspTemplate::new(relations))
}

pub fn parse_instance_json(text: &str, template: &CspTemplate) -> Result<CspInstance, CspError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| CspError::Malformed(e.to_string()))?;
    let mut instance = CspInstance::new(file.n);
    for (index, c) in file.constraints.into_iter().enumerate() {
        let relation = template
            .relation(&c.relation)
            .ok_or_else(|| CspError::UnknownRelation(c.relation.clone()))?
            .clone();
        if c.vars.contains(&0) {
            return Err(CspError::BadConstraint {
                index,
                msg: "variables are 1-indexed".into(),
            });
        }
        let vars = c.vars.iter().map(|v| v - 1).collect();
        let negated = c.negated.as_deref().map(bits).transpose()?;
        instance.add(relation, vars, negated)?;
    }
    Ok(instance)
}

pub fn parse_scheme(text: &str) -> Result<ThresholdScheme, CspError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let (Some(e), Some(eta), None) = (lines.next(), lines.next(), lines.next()) else {
        return Err(CspError::BadScheme("expected two lines: interval set and labels".into()));
    };
    let e: IntervalSet = e.parse()?;
    ThresholdScheme::new(e, bits(eta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::verify_assignment;

    const TEMPLATE: &str = r#"{"relations": {"one_in_three": ["100", "010", "001"], "or2": ["01", "10", "11"]}}"#;

    #[test]
    fn template_and_instance() {
        let t = parse_template_json(TEMPLATE).unwrap();
        assert_eq!(t.relation("one_in_three").unwrap().arity(), 3);
        assert!(t.relation("or2").unwrap().is_or());
        let inst = parse_instance_json(
            r#"{"n": 3, "constraints": [
                {"relation": "one_in_three", "vars": [1, 2, 3]},
                {"relation": "or2", "vars": [1, 3], "negated": "10"}]}"#,
            &t,
        )
        .unwrap();
        assert!(verify_assignment(&inst, &[false, true, false]));
        assert!(!verify_assignment(&inst, &[true, false, false]));
    }

    #[test]
    fn bad_inputs() {
        assert!(parse_template_json(r#"{"relations": {"r": ["10", "1"]}}"#).is_err());
        assert!(parse_template_json(r#"{"relations": {"r": ["12"]}}"#).is_err());
        assert!(parse_template_json("[]").is_err());
        let t = parse_template_json(TEMPLATE).unwrap();
        let unknown = r#"{"n": 1, "constraints": [{"relation": "nope", "vars": [1]}]}"#;
        assert!(matches!(parse_instance_json(unknown, &t), Err(CspError::UnknownRelation(_))));
        let zero = r#"{"n": 3, "constraints": [{"relation": "or2", "vars": [0, 1]}]}"#;
        assert!(parse_instance_json(zero, &t).is_err());
        let arity = r#"{"n": 3, "constraints": [{"relation": "or2", "vars": [1]}]}"#;
        assert!(parse_instance_json(arity, &t).is_err());
    }

    #[test]
    fn scheme_file() {
        let s = parse_scheme("0,1/3;2/3,1\n01\n").unwrap();
        assert_eq!(s, ThresholdScheme::ksat(3).unwrap());
        assert_eq!(parse_scheme(&s.to_string()).unwrap(), s);
        assert!(parse_scheme("0,1/3;2/3,1\n").is_err());
        assert!(parse_scheme("0,1/3;2/3,1\n10\n").is_err());
    }
}
