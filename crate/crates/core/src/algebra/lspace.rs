//! L-space slopes by additivity of filling orders, and the Bezout
//! certificates for the lens-order families.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisViolated {
    #[error("orders {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("orders must be positive")]
    NonPositive,
}

/// Two L-space slopes `α`, `β` with `α·β = 1` and coprime filling orders. The
/// order of `aα + bβ` for `a, b ≥ 0` is `a·|α| + b·|β|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LSpaceCone {
    pub order_alpha: u64,
    pub order_beta: u64,
}

/// One step of the induction: `slope = parent + alpha`, where both parents
/// are L-spaces whose orders add up to the child's.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionStep {
    /// Coefficients `(a, b)` of `aα + bβ`.
    pub slope: (u64, u64),
    pub order: u64,
    pub parent: (u64, u64),
    pub parent_order: u64,
    pub alpha_order: u64,
    pub additive: bool,
}

impl LSpaceCone {
    /// Order of `aα + bβ`.
    pub fn order(&self, a: u64, b: u64) -> u64 {
        a * self.order_alpha + b * self.order_beta
    }

    /// Slopes `α + β, 2α + β, …, nα + β`, each derived from the previous one
    /// and `α` (the basis `⟨kα + β, α⟩` has intersection one).
    pub fn enumerate(&self, n: u64) -> Vec<InductionStep> {
        let mut out = Vec::new();
        let mut parent = (0, 1);
        let mut parent_order = self.order_beta;
        for k in 1..=n {
            let slope = (k, 1);
            let order = self.order(k, 1);
            out.push(InductionStep {
                slope,
                order,
                parent,
                parent_order,
                alpha_order: self.order_alpha,
                additive: parent_order + self.order_alpha == order,
            });
            parent = slope;
            parent_order = order;
        }
        out
    }
}

pub fn lspace_cone(order_alpha: u64, order_beta: u64) -> Result<LSpaceCone, HypothesisViolated> {
    if order_alpha == 0 || order_beta == 0 {
        return Err(HypothesisViolated::NonPositive);
    }
    if order_alpha.gcd(&order_beta) != 1 {
        return Err(HypothesisViolated::NotCoprime(order_alpha, order_beta));
    }
    Ok(LSpaceCone { order_alpha, order_beta })
}

/// Integer polynomial in `k`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<BigInt>);

impl Poly {
    pub fn new(coeffs: &[i64]) -> Self {
        let mut p = Poly(coeffs.iter().map(|&c| BigInt::from(c)).collect());
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.0
    }

    pub fn eval(&self, k: &BigInt) -> BigInt {
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * k + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let z = BigInt::zero();
        let mut p = Poly((0..n).map(|i| self.0.get(i).unwrap_or(&z) + other.0.get(i).unwrap_or(&z)).collect());
        p.trim();
        p
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(vec![]);
        }
        let mut c = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        let mut p = Poly(c);
        p.trim();
        p
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match deg {
                0 => write!(f, "{a}")?,
                1 if a.is_one() => write!(f, "k")?,
                1 => write!(f, "{a}k")?,
                _ if a.is_one() => write!(f, "k^{deg}")?,
                _ => write!(f, "{a}k^{deg}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// The two lens-order families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `(6k + 1, 15k + 4)`
    Plus,
    /// `(6k - 1, 15k - 4)`
    Minus,
}

/// `c1·p1 + c2·p2 = 1` as polynomials in `k`.
#[derive(Clone, Debug)]
pub struct BezoutCertificate {
    pub p1: Poly,
    pub p2: Poly,
    pub c1: Poly,
    pub c2: Poly,
    pub expansion: Poly,
    pub symbolic: bool,
    /// Range of `k` checked numerically, with `gcd(p1(k), p2(k)) = 1` and the
    /// identity holding at each.
    pub numeric_range: (i64, i64),
    pub numeric: bool,
}

impl BezoutCertificate {
    pub fn holds(&self) -> bool {
        self.symbolic && self.numeric
    }
}

pub fn verify_family_coprimality(family: Family) -> BezoutCertificate {
    let (p1, p2, c1, c2) = match family {
        Family::Plus => (Poly::new(&[1, 6]), Poly::new(&[4, 15]), Poly::new(&[-3, -5]), Poly::new(&[1, 2])),
        Family::Minus => (Poly::new(&[-1, 6]), Poly::new(&[-4, 15]), Poly::new(&[3, -5]), Poly::new(&[-1, 2])),
    };
    let expansion = c1.mul(&p1).add(&c2.mul(&p2));
    let symbolic = expansion.is_one();
    let range = (-100, 100);
    let numeric = (range.0..=range.1).all(|k| {
        let k = BigInt::from(k);
        let (a, b) = (p1.eval(&k), p2.eval(&k));
        c1.eval(&k) * &a + c2.eval(&k) * &b == BigInt::one() && a.gcd(&b).is_one()
    });
    BezoutCertificate { p1, p2, c1, c2, expansion, symbolic, numeric_range: range, numeric }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_seven_and_nineteen() {
        let cone = lspace_cone(7, 19).unwrap();
        let steps = cone.enumerate(3);
        assert_eq!(steps.iter().map(|s| s.order).collect::<Vec<_>>(), vec![26, 33, 40]);
        assert!(steps.iter().all(|s| s.additive));
    }

    #[test]
    fn unit_orders() {
        let steps = lspace_cone(1, 1).unwrap().enumerate(5);
        assert_eq!(steps.iter().map(|s| s.order).collect::<Vec<_>>(), vec![2, 3, 4, 5, 6]);
    }

    #[test]
    fn non_coprime_orders_rejected() {
        assert_eq!(lspace_cone(4, 6), Err(HypothesisViolated::NotCoprime(4, 6)));
        assert_eq!(lspace_cone(0, 1), Err(HypothesisViolated::NonPositive));
    }

    #[test]
    fn bezout_identities() {
        for fam in [Family::Plus, Family::Minus] {
            let cert = verify_family_coprimality(fam);
            assert!(cert.holds(), "{fam:?}: {}", cert.expansion);
        }
        let cert = verify_family_coprimality(Family::Plus);
        assert_eq!(cert.c1.to_string(), "-5k - 3");
        assert_eq!(cert.p2.to_string(), "15k + 4");
    }

    #[test]
    fn poly_arithmetic() {
        let p = Poly::new(&[1, 1]).mul(&Poly::new(&[-1, 1]));
        assert_eq!(p, Poly::new(&[-1, 0, 1]));
        assert_eq!(p.to_string(), "k^2 - 1");
        assert_eq!(p.eval(&BigInt::from(3)), BigInt::from(8));
    }
}
