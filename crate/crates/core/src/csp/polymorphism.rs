use num_traits::Zero;

use super::{bits_to_string, CspError, CspTemplate, ThresholdScheme};
use crate::domain::Rational;

/// A multiset of tuples of one relation whose threshold image leaves it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub relation: String,
    pub rows: Vec<String>,
    pub image: String,
}

fn check_endpoints(scheme: &ThresholdScheme, l: usize) -> Result<(), CspError> {
    let lr = Rational::from_integer(l.into());
    let integral = scheme
        .e()
        .intervals()
        .iter()
        .flat_map(|(c, d)| [c, d])
        .filter(|v| !v.is_zero() && *v != &Rational::from_integer(1.into()))
        .any(|v| (v * &lr).is_integer());
    if l == 0 || integral {
        return Err(CspError::EndpointIntegral(l));
    }
    Ok(())
}

/// All multisets of size `l` from `0..m`, as nondecreasing index vectors.
fn multisets(m: usize, l: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    let mut idx = vec![0usize; l];
    loop {
        if !visit(&idx) {
            return;
        }
        let Some(pos) = (0..l).rev().find(|&p| idx[p] + 1 < m) else {
            return;
        };
        let v = idx[pos] + 1;
        for slot in &mut idx[pos..] {
            *slot = v;
        }
    }
}

/// First violation of the `(E, η)` threshold function of arity `l`.
///
/// Column counts are order-independent, so multisets of `l` tuples cover
/// every `l`-tuple of tuples.
pub fn find_polymorphism_violation(
    template: &CspTemplate,
    scheme: &ThresholdScheme,
    l: usize,
) -> Result<Option<Violation>, CspError> {
    check_endpoints(scheme, l)?;
    let lr = Rational::from_integer(l.into());
    for rel in template.relations() {
        let tuples: Vec<&Vec<bool>> = rel.tuples().iter().collect();
        let mut found = None;
        let mut failure = None;
        multisets(tuples.len(), l, |pick| {
            let mut image = Vec::with_capacity(rel.arity());
            for j in 0..rel.arity() {
                let ones = pick.iter().filter(|&&t| tuples[t][j]).count();
                let frac = Rational::from_integer(ones.into()) / &lr;
                match scheme.label(&frac) {
                    Ok(Some(b)) => image.push(b),
                    Ok(None) => return true,
                    Err(e) => {
                        failure = Some(e);
                        return false;
                    }
                }
            }
            if rel.contains(&image) {
                return true;
            }
            found = Some(Violation {
                relation: rel.name().to_string(),
                rows: pick.iter().map(|&t| bits_to_string(tuples[t])).collect(),
                image: bits_to_string(&image),
            });
            false
        });
        if let Some(e) = failure {
            return Err(e.into());
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Does the threshold function of arity `l` preserve every relation?
pub fn partial_polymorphism_check(
    template: &CspTemplate,
    scheme: &ThresholdScheme,
    l: usize,
) -> Result<bool, CspError> {
    Ok(find_polymorphism_violation(template, scheme, l)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Relation;

    #[test]
    fn multiset_count() {
        let mut count = 0;
        multisets(4, 3, |_| {
            count += 1;
            true
        });
        // C(4 + 3 - 1, 3)
        assert_eq!(count, 20);
    }

    #[test]
    fn ksat_scheme_is_preserved() {
        let s = ThresholdScheme::ksat(3).unwrap();
        assert!(partial_polymorphism_check(&CspTemplate::ksat(3), &s, 4).unwrap());
        assert_eq!(
            partial_polymorphism_check(&CspTemplate::ksat(3), &s, 3),
            Err(CspError::EndpointIntegral(3))
        );
    }

    #[test]
    fn threshold_preserves_xor() {
        // columns of any stack of 01 and 10 rows have fractions f and 1 - f
        let xor = Relation::new("xor", 2, [vec![false, true], vec![true, false]]).unwrap();
        let s = ThresholdScheme::ksat(3).unwrap();
        for l in [4, 5, 7, 8] {
            assert!(partial_polymorphism_check(&CspTemplate::new([xor.clone()]), &s, l).unwrap());
        }
    }

    #[test]
    fn three_of_four_is_broken() {
        let r = Relation::new(
            "three_of_four",
            4,
            ["0111", "1011", "1101", "1110"]
                .iter()
                .map(|t| t.chars().map(|c| c == '1').collect()),
        )
        .unwrap();
        let s = ThresholdScheme::ksat(3).unwrap();
        let v = find_polymorphism_violation(&CspTemplate::new([r]), &s, 4)
            .unwrap()
            .unwrap();
        assert_eq!(v.image, "1111");
        assert_eq!(v.rows.len(), 4);
    }
}
