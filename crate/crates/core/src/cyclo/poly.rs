//! Dense univariate polynomials with cyclotomic coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{CycloError, CycloNum};

/// Polynomial over `Q(zeta)`, coefficients ascending, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CPoly {
    coeffs: Vec<CycloNum>,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<CycloNum>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, CycloNum::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(CycloNum::zero());
        }
        CPoly { coeffs }
    }

    pub fn zero() -> Self {
        CPoly { coeffs: vec![CycloNum::zero()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[CycloNum] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> CycloNum {
        self.coeffs.get(i).cloned().unwrap_or_else(CycloNum::zero)
    }

    pub fn leading(&self) -> &CycloNum {
        self.coeffs.last().unwrap()
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[CycloNum]) -> Self {
        let mut p = CPoly::new(vec![CycloNum::one()]);
        for r in roots {
            p = p.mul(&CPoly::new(vec![r.neg(), CycloNum::one()]));
        }
        p
    }

    pub fn eval(&self, x: &CycloNum) -> CycloNum {
        let mut acc = CycloNum::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return CPoly::zero();
        }
        let mut out = vec![CycloNum::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        CPoly::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return CPoly::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.scale(&num_rational::BigRational::from_integer(i.into())))
            .collect();
        CPoly::new(out)
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divrem(&self, den: &Self) -> Result<(Self, Self), CycloError> {
        let dd = match den.degree() {
            Some(d) => d,
            None => return Err(CycloError::DivisionByZero { n: 1 }),
        };
        let lead_inv = den.leading().inv()?;
        let mut rem = self.coeffs.clone();
        let nd = self.degree().unwrap_or(0);
        if self.is_zero() || nd < dd {
            return Ok((CPoly::zero(), self.clone()));
        }
        let mut q = vec![CycloNum::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = rem[i + dd].mul(&lead_inv);
            if !c.is_zero() {
                for j in 0..=dd {
                    rem[i + j] = rem[i + j].sub(&den.coeffs[j].mul(&c));
                }
            }
            q[i] = c;
        }
        Ok((CPoly::new(q), CPoly::new(rem)))
    }

    /// Rescales by a positive rational so every power-basis coordinate is an
    /// integer and their collective gcd is one. The zero polynomial stays
    /// unchanged. The result differs from the input by a unit, which is all
    /// the remainder sequence below cares about.
    fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        for c in &self.coeffs {
            for coord in c.coeffs() {
                denom_lcm = denom_lcm.lcm(coord.denom());
            }
        }
        let mut numer_gcd = BigInt::zero();
        for c in &self.coeffs {
            for coord in c.coeffs() {
                numer_gcd = numer_gcd.gcd(&(coord.numer() * (&denom_lcm / coord.denom())));
            }
        }
        let scale = num_rational::BigRational::new(denom_lcm, numer_gcd);
        CPoly::new(self.coeffs.iter().map(|c| c.scale(&scale)).collect())
    }

    /// Monic gcd. Remainders are rescaled to primitive integral form at each
    /// step, which keeps the denominators introduced by the leading-term
    /// inversions from compounding.
    pub fn gcd(&self, other: &Self) -> Result<Self, CycloError> {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b)?;
            a = b;
            b = r.primitive();
        }
        if a.is_zero() {
            return Ok(a);
        }
        let inv = a.leading().inv()?;
        Ok(CPoly::new(a.coeffs.iter().map(|c| c.mul(&inv)).collect()))
    }

    /// The largest conductor appearing among the coefficients.
    pub fn coeff_conductor_lcm(&self) -> u32 {
        self.coeffs
            .iter()
            .fold(1u64, |acc, c| crate::arith::lcm_u64(acc, c.conductor() as u64)) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> CycloNum {
        CycloNum::from_int(v)
    }

    #[test]
    fn from_roots_expands_correctly() {
        // (x - 1)(x - 2) = x^2 - 3x + 2
        let p = CPoly::from_roots(&[c(1), c(2)]);
        assert_eq!(p.coeffs(), &[c(2), c(-3), c(1)]);
        assert!(p.eval(&c(1)).is_zero());
        assert!(p.eval(&c(2)).is_zero());
        assert_eq!(p.eval(&c(3)), c(2));
    }

    #[test]
    fn divrem_recovers_factors() {
        let g = CycloNum::gauss_sum(7).unwrap();
        let p = CPoly::from_roots(&[g.clone(), g.neg(), c(4)]);
        let (q, r) = p.divrem(&CPoly::from_roots(&[g.clone()])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, CPoly::from_roots(&[g.neg(), c(4)]));
    }

    #[test]
    fn gcd_detects_repeated_roots() {
        let z = CycloNum::zeta(5);
        let p = CPoly::from_roots(&[z.clone(), z.clone(), c(2)]);
        let g = p.gcd(&p.derivative()).unwrap();
        assert_eq!(g, CPoly::from_roots(&[z]));
    }

    #[test]
    fn derivative_of_cubic() {
        // d/dx (x^3 - 2x) = 3x^2 - 2
        let p = CPoly::new(vec![c(0), c(-2), c(0), c(1)]);
        assert_eq!(p.derivative(), CPoly::new(vec![c(-2), c(0), c(3)]));
    }
}
