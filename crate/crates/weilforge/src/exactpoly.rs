//! Exact polynomial arithmetic over the integers and rationals.
//!
//! Every certification step downstream (Sturm counts, disc tests, Newton
//! polygons, divisibility of certificate factors) reduces to arithmetic in
//! `Z[x]` and `Q[x]`. This module provides those primitives with no
//! floating point anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactPolyError {
    #[error("division left a nonzero remainder or a non-integer quotient")]
    NotDivisible,
}

/// Dense integer polynomial with coefficients stored by ascending power.
///
/// Canonical form: no trailing zero coefficients, so the zero polynomial is
/// the empty vector and `degree()` of a nonzero polynomial is
/// `coeffs.len() - 1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds a polynomial from ascending coefficients, trimming trailing
    /// zeros to canonical form.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        IntPoly { coeffs }
    }

    pub fn x() -> Self {
        IntPoly::monomial(BigInt::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree of a nonzero polynomial; `None` marks the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree under the convention that callers have excluded zero.
    pub fn deg(&self) -> usize {
        self.degree().expect("degree of the zero polynomial")
    }

    /// Coefficient of `x^i` (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rat::from_integer(c.clone());
        }
        acc
    }

    /// Sign of `self(x)` at a rational point, avoiding a final division.
    pub fn sign_at(&self, x: &Rat) -> i32 {
        // p/q in lowest terms with q > 0, so sign(self(x)) equals the sign
        // of sum c_i p^i q^(d-i).
        let d = match self.degree() {
            None => return 0,
            Some(d) => d,
        };
        let p = x.numer();
        let q = x.denom();
        // Horner in homogeneous form: acc_i = acc_{i-1} * p + c_{d-i} * q^i.
        let mut acc = self.coeffs[d].clone();
        let mut qpow = BigInt::one();
        for i in (0..d).rev() {
            qpow *= q;
            acc = acc * p + &self.coeffs[i] * &qpow;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigInt::from(i + 1))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplication by `x^k`.
    pub fn mul_xk(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        IntPoly { coeffs }
    }

    /// Content: nonnegative gcd of the coefficients (zero for the zero
    /// polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = num_integer::gcd(g, c.clone());
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content, preserving signs.
    pub fn primitive_part(&self) -> IntPoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Primitive part normalized to a positive leading coefficient.
    pub fn primitive_positive(&self) -> IntPoly {
        let p = self.primitive_part();
        if p.leading().is_negative() {
            -&p
        } else {
            p
        }
    }

    /// Quotient and remainder for a divisor with invertible (unit) leading
    /// coefficient; panics if `lc(div)` is not a unit in `Z`.
    pub fn div_rem_monic(&self, div: &IntPoly) -> (IntPoly, IntPoly) {
        let dd = div.degree().expect("division by zero polynomial");
        let lc = div.leading();
        assert!(
            lc.is_one() || (-&lc).is_one(),
            "div_rem_monic needs a unit leading coefficient"
        );
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (IntPoly::zero(), self.clone());
        }
        let mut quo = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let q = &rem[i] * &lc; // lc is +-1, so this is rem[i] / lc
            if !q.is_zero() {
                for j in 0..dd {
                    let t = &q * &div.coeffs[j];
                    rem[i - dd + j] -= t;
                }
                rem[i] = BigInt::zero();
            }
            quo[i - dd] = q;
        }
        (IntPoly::new(quo), IntPoly::new(rem))
    }

    /// Exact division in `Z[x]`: returns the quotient only when the
    /// remainder is exactly zero and the quotient has integer coefficients.
    pub fn exact_div(&self, div: &IntPoly) -> Result<IntPoly, ExactPolyError> {
        let dd = match div.degree() {
            None => return Err(ExactPolyError::NotDivisible),
            Some(d) => d,
        };
        if self.is_zero() {
            return Ok(IntPoly::zero());
        }
        if self.deg() < dd {
            return Err(ExactPolyError::NotDivisible);
        }
        let lc = div.leading();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let (q, r) = num_integer::div_rem(rem[i].clone(), lc.clone());
            if !r.is_zero() {
                return Err(ExactPolyError::NotDivisible);
            }
            for j in 0..dd {
                let t = &q * &div.coeffs[j];
                rem[i - dd + j] -= t;
            }
            rem[i] = BigInt::zero();
            quo[i - dd] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(ExactPolyError::NotDivisible);
        }
        Ok(IntPoly::new(quo))
    }

    /// `P(s*x + b)` for `s` in `{+1, -1}`.
    pub fn substitute_linear(&self, s: i64, b: &BigInt) -> IntPoly {
        assert!(s == 1 || s == -1, "substitute_linear needs s = +-1");
        let lin = IntPoly::new(vec![b.clone(), BigInt::from(s)]);
        let mut acc = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &IntPoly::constant(c.clone());
        }
        acc
    }

    /// Reduces `Q(x)` modulo `x^2 - t*x + 2`, returning `(A, B)` in `Z[t]`
    /// with `Q(x) = A(t)*x + B(t)` modulo that relation.
    ///
    /// When `x = z` with `z + 2/z = t` (so `z` times its conjugate is 2),
    /// this evaluates `Q` on the circle of radius `sqrt(2)` parametrized by
    /// the real trace `t`.
    pub fn quad_reduce(&self) -> (IntPoly, IntPoly) {
        // Invariant: x^j = a_j(t)*x + b_j(t) with
        //   a_{j+1} = t*a_j + b_j,  b_{j+1} = -2*a_j.
        let t = IntPoly::x();
        let mut aj = IntPoly::zero();
        let mut bj = IntPoly::one();
        let mut res_a = IntPoly::zero();
        let mut res_b = IntPoly::zero();
        for c in &self.coeffs {
            if !c.is_zero() {
                res_a = &res_a + &aj.scale(c);
                res_b = &res_b + &bj.scale(c);
            }
            let next_a = &(&t * &aj) + &bj;
            let next_b = aj.scale(&BigInt::from(-2));
            aj = next_a;
            bj = next_b;
        }
        (res_a, res_b)
    }

    /// Coefficientwise reduction modulo a positive integer, mapped to the
    /// least nonnegative residues.
    pub fn mod_coeffs(&self, modulus: &BigInt) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(modulus))
            .collect()
    }
}

use num_integer::Integer as _;

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        IntPoly::new(out)
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntPoly::new(out)
    }
}

/// Pseudo-remainder of `p` by `q`, scaled so the result is a positive
/// multiple of the true remainder: returns `r` with `r = c * (p mod q)` for
/// some rational `c > 0`. Sign fidelity is what Sturm chains need.
pub(crate) fn pseudo_rem_positive(p: &IntPoly, q: &IntPoly) -> IntPoly {
    let dq = q.deg();
    let lc = q.leading();
    let mut rem = p.clone();
    while let Some(dr) = rem.degree() {
        if dr < dq {
            break;
        }
        // rem := lc(q)^2 * rem - (lc(q) * lead(rem)) * x^(dr-dq) * q keeps
        // the scaling factor a positive square at every step.
        let lead = rem.leading();
        let shift = q.mul_xk(dr - dq);
        rem = &rem.scale(&(&lc * &lc)) - &shift.scale(&(&lc * &lead));
        debug_assert!(rem.degree().map_or(true, |d| d < dr));
    }
    rem
}

/// Gcd in `Z[x]` via a primitive-part pseudo-remainder sequence; the result
/// is primitive with positive leading coefficient (or zero when both inputs
/// are zero).
pub fn poly_gcd(p: &IntPoly, q: &IntPoly) -> IntPoly {
    let mut a = p.primitive_positive();
    let mut b = q.primitive_positive();
    if a.is_zero() {
        return b;
    }
    while !b.is_zero() {
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let r = pseudo_rem_positive(&a, &b).primitive_positive();
        a = b;
        b = r;
    }
    a
}

/// Squarefree part `p / gcd(p, p')`, primitive with positive leading
/// coefficient.
pub fn squarefree_part(p: &IntPoly) -> IntPoly {
    let pp = p.primitive_positive();
    if pp.degree().map_or(true, |d| d == 0) {
        return pp;
    }
    let g = poly_gcd(&pp, &pp.derivative());
    pp.exact_div(&g)
        .expect("gcd(p, p') divides p")
        .primitive_positive()
}

impl fmt::Display for IntPoly {
    /// Renders with descending powers: `x^6 - 2*x^5 + x^4 + 2*x^2 - 8*x + 8`.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(out, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(out, " - ")?;
            } else {
                write!(out, " + ")?;
            }
            match (i, mag.is_one()) {
                (0, _) => write!(out, "{mag}")?,
                (1, true) => write!(out, "x")?,
                (1, false) => write!(out, "{mag}*x")?,
                (_, true) => write!(out, "x^{i}")?,
                (_, false) => write!(out, "{mag}*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "IntPoly({self})")
    }
}
