use super::{build_context, ResidueField};
use crate::error::{Error, Result};
use crate::gf::{smallest_irreducible, FqSpec, Poly};

/// Parsed form of the field spec string "p^e^r:F-coeffs", where the
/// coefficient tail ("1,2,0,1" = 1 + 2X + X^3) is optional when the caller
/// allows automatic modulus selection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub r: usize,
    pub modulus_coeffs: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn parse(s: &str) -> Result<FieldSpec> {
        let bad = |detail: &str| Error::BadFieldSpec {
            spec: s.into(),
            detail: detail.into(),
        };
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let parts: Vec<&str> = head.split('^').collect();
        if parts.len() != 3 {
            return Err(bad("expected p^e^r before the optional ':coeffs' tail"));
        }
        let p: u64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad("p is not an integer"))?;
        let e: u32 = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad("e is not an integer"))?;
        let r: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("r is not an integer"))?;
        if r == 0 {
            return Err(bad("need r >= 1"));
        }
        let modulus_coeffs = match tail {
            None => None,
            Some(t) => {
                let mut coeffs = Vec::new();
                for part in t.split(',') {
                    coeffs.push(
                        part.trim()
                            .parse::<u64>()
                            .map_err(|_| bad("modulus coefficient is not an integer"))?,
                    );
                }
                Some(coeffs)
            }
        };
        Ok(FieldSpec {
            p,
            e,
            r,
            modulus_coeffs,
        })
    }

    /// Builds the residue field. Without explicit modulus coefficients,
    /// `auto_modulus` selects the smallest-encoding monic irreducible of
    /// degree r.
    pub fn build(&self, auto_modulus: bool, table_budget: u64) -> Result<ResidueField> {
        let (fq, modulus) = self.resolve(auto_modulus)?;
        build_context(&fq, &modulus, table_budget)
    }

    pub fn resolve(&self, auto_modulus: bool) -> Result<(std::sync::Arc<FqSpec>, Poly)> {
        let fq = FqSpec::new(self.p, self.e)?;
        let modulus = match &self.modulus_coeffs {
            Some(coeffs) => {
                if coeffs.iter().any(|&c| c >= fq.q()) {
                    return Err(Error::BadFieldSpec {
                        spec: self.to_string(),
                        detail: format!("modulus coefficient not below q = {}", fq.q()),
                    });
                }
                let f = Poly::from_coeffs(&fq, coeffs.clone());
                if f.degree() != Some(self.r) {
                    return Err(Error::BadFieldSpec {
                        spec: self.to_string(),
                        detail: format!("modulus degree {:?} != r = {}", f.degree(), self.r),
                    });
                }
                f
            }
            None => {
                if !auto_modulus {
                    return Err(Error::BadFieldSpec {
                        spec: self.to_string(),
                        detail: "no modulus coefficients; pass --auto-modulus to pick the \
                                 smallest monic irreducible of degree r"
                            .into(),
                    });
                }
                smallest_irreducible(&fq, self.r)?
            }
        };
        Ok((fq, modulus))
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}^{}^{}", self.p, self.e, self.r)?;
        if let Some(coeffs) = &self.modulus_coeffs {
            let parts: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            write!(f, ":{}", parts.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_spec() {
        let spec = FieldSpec::parse("3^1^3:1,2,0,1").unwrap();
        assert_eq!(
            spec,
            FieldSpec {
                p: 3,
                e: 1,
                r: 3,
                modulus_coeffs: Some(vec![1, 2, 0, 1]),
            }
        );
        let ctx = spec.build(false, 1 << 24).unwrap();
        assert_eq!(ctx.size(), 27);
        assert_eq!(ctx.spec_string(), "3^1^3:1,2,0,1");
    }

    #[test]
    fn auto_modulus_selects_smallest() {
        let spec = FieldSpec::parse("3^1^2").unwrap();
        assert!(spec.build(false, 1 << 24).is_err());
        let ctx = spec.build(true, 1 << 24).unwrap();
        // Smallest monic irreducible quadratic over F_3 is X^2 + 1.
        assert_eq!(ctx.modulus().to_string(), "1,0,1");
    }

    #[test]
    fn rejects_malformed() {
        assert!(FieldSpec::parse("3^1").is_err());
        assert!(FieldSpec::parse("3^1^0").is_err());
        assert!(FieldSpec::parse("x^1^2").is_err());
        let spec = FieldSpec::parse("3^1^2:1,0,3").unwrap();
        assert!(spec.build(false, 1 << 24).is_err());
    }

    #[test]
    fn prime_power_field_spec() {
        let spec = FieldSpec::parse("3^2^2").unwrap();
        let ctx = spec.build(true, 1 << 24).unwrap();
        assert_eq!(ctx.q(), 9);
        assert_eq!(ctx.size(), 81);
    }
}
