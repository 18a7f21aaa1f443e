//! Recurrent polynomial families and signed binary digit expansions.
//!
//! The trace polynomials `T_n` satisfy `T_n(z + 1/z) = z^n + z^-n`
//! (`T_0 = 2`, `T_1 = x`, `T_n = x*T_{n-1} - T_{n-2}`). From them,
//!
//! * `f_n(x) = x^n * T_n(x + 1/x - 4)`, monic of degree `2n` for `n >= 1`,
//!   with `f_n = (x^2 - 4x + 1) f_{n-1} - x^2 f_{n-2}`;
//! * `g_{n,k}(x) = (x-1)^{-k} * sum_j binom(k,j) f_{n+j}(x)`, monic of
//!   degree `2n + k`, computed here by the three-term recurrence
//!   `g_{n,k} = (x-3) g_{n,k-1} - 2 g_{n,k-2}` from `g_{n,0} = f_n` and
//!   `g_{n,1} = (f_n + f_{n+1})/(x - 1)` (the binomial definition is kept
//!   as a cross-check oracle in the tests).
//!
//! A digit expansion `m = sum a_i 2^i` with top digit `a_k = 1` is turned
//! into the candidate `P_n = sum (-1)^(i+k) a_i g_{n,i}`, monic of degree
//! `2n + k` with constant term `(-1)^k m`. All roots of `P_n` land in
//! `[3 - 2*sqrt(2), 3 + 2*sqrt(2)]` whenever the digit polynomial
//! `sum a_i z^i` has all complex roots in the open disc `|z| < sqrt(2)`;
//! the nonadjacent form (NAF) of any `m` satisfies this via the weight
//! bound `sum_{i<k} |a_i| 2^((i-k)/2) < 1`.

use crate::exactpoly::IntPoly;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("the combination is defined only for n >= 1")]
    RequiresPositiveN,
    #[error("the modified expansion requires v2(m) >= 4, got v2 = {0}")]
    WrongValuation(u64),
    #[error("invalid digit expansion: {0}")]
    InvalidRep(String),
}

/// `T_n` with `T_n(z + 1/z) = z^n + z^-n`.
pub fn chebyshev_t(n: usize) -> IntPoly {
    let mut prev = IntPoly::constant(BigInt::from(2));
    if n == 0 {
        return prev;
    }
    let x = IntPoly::x();
    let mut cur = x.clone();
    for _ in 1..n {
        let next = &(&x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(1+i)^k + (1-i)^k`, the value `(-1)^(n-k) g_{n,k}(1)`, by the integer
/// recurrence `w_k = 2 w_{k-1} - 2 w_{k-2}` with `w_0 = w_1 = 2`.
pub fn w_const(k: usize) -> BigInt {
    let mut prev = BigInt::from(2);
    if k == 0 {
        return prev;
    }
    let mut cur = BigInt::from(2);
    for _ in 1..k {
        let next = BigInt::from(2) * (&cur - &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Kind of digit expansion backing a construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepKind {
    /// Nonadjacent form: digits in `{-1, 0, 1}`, no two adjacent nonzero.
    Naf,
    /// NAF of an `m` with `v2(m) >= 4`, with the low end replaced by
    /// `(2, -1, 0, 0, ...)`; same value, same digit magnitudes as the
    /// weight bound requires, and it shifts the low-order 2-adic behaviour
    /// of the combination without changing the constant term.
    NafV2Ge4Variant,
    /// Coefficients of a compliant representation: a monic `Q` with
    /// `Q(2) = m`, `Q = (z-1)^deg Q mod 2`, and all roots in `|z| < sqrt(2)`
    /// (the disc condition is certified in `discquality`, not here).
    Compliant,
}

impl RepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RepKind::Naf => "naf",
            RepKind::NafV2Ge4Variant => "naf-v2ge4-variant",
            RepKind::Compliant => "compliant",
        }
    }

    pub fn parse(s: &str) -> Option<RepKind> {
        match s {
            "naf" => Some(RepKind::Naf),
            "naf-v2ge4-variant" => Some(RepKind::NafV2Ge4Variant),
            "compliant" => Some(RepKind::Compliant),
            _ => None,
        }
    }
}

/// A digit expansion `m = sum digits[i] * 2^i` with `digits[k] = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryRep {
    pub m: BigInt,
    pub digits: Vec<BigInt>,
    pub kind: RepKind,
}

impl BinaryRep {
    /// Index of the top digit.
    pub fn k(&self) -> usize {
        self.digits.len() - 1
    }

    /// The digit polynomial `sum digits[i] z^i`.
    pub fn digit_poly(&self) -> IntPoly {
        IntPoly::new(self.digits.clone())
    }

    /// Checks the expansion-level invariants for the rep kind. The disc
    /// condition of compliant reps is a semantic property certified by
    /// `discquality::is_compliant` and is not re-checked here.
    pub fn validate(&self) -> Result<(), FamilyError> {
        if self.digits.is_empty() {
            return Err(FamilyError::InvalidRep("empty digit list".into()));
        }
        if !self.m.is_positive() {
            return Err(FamilyError::InvalidRep("m must be positive".into()));
        }
        if !self.digits.last().unwrap().is_one() {
            return Err(FamilyError::InvalidRep("top digit must be 1".into()));
        }
        let mut value = BigInt::zero();
        for d in self.digits.iter().rev() {
            value = value * 2 + d;
        }
        if value != self.m {
            return Err(FamilyError::InvalidRep(format!(
                "digits evaluate to {value} at 2, expected {}",
                self.m
            )));
        }
        match self.kind {
            RepKind::Naf => {
                check_naf_shape(&self.digits)?;
                let expect_k = naf_top_index(&self.m);
                if self.k() != expect_k {
                    return Err(FamilyError::InvalidRep(format!(
                        "NAF top index {} differs from floor(log2(3m)) - 1 = {expect_k}",
                        self.k()
                    )));
                }
            }
            RepKind::NafV2Ge4Variant => {
                let v2 = self.m.trailing_zeros().unwrap_or(0);
                if v2 < 4 {
                    return Err(FamilyError::InvalidRep(format!(
                        "variant expansion requires v2(m) >= 4, got {v2}"
                    )));
                }
                let expect = variant_rep(&self.m)?;
                if expect.digits != self.digits {
                    return Err(FamilyError::InvalidRep(
                        "variant digits do not match (2, -1, 0, 0, NAF tail)".into(),
                    ));
                }
            }
            RepKind::Compliant => {
                if !mod2_is_power_of_z_minus_one(&self.digits) {
                    return Err(FamilyError::InvalidRep(
                        "coefficients are not congruent to (z-1)^k mod 2".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn check_naf_shape(digits: &[BigInt]) -> Result<(), FamilyError> {
    for (i, d) in digits.iter().enumerate() {
        if d.abs() > BigInt::one() {
            return Err(FamilyError::InvalidRep(format!(
                "NAF digit {d} at index {i} is outside {{-1, 0, 1}}"
            )));
        }
        if i + 1 < digits.len() && !d.is_zero() && !digits[i + 1].is_zero() {
            return Err(FamilyError::InvalidRep(format!(
                "adjacent nonzero NAF digits at indices {i}, {}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// `floor(log2(3m)) - 1`, the top index of the NAF of `m >= 1`.
fn naf_top_index(m: &BigInt) -> usize {
    ((m * 3u8).bits() - 2) as usize
}

/// Coefficientwise test for `sum c_i z^i = (z-1)^k mod 2`, i.e.
/// `c_i = binom(k, i) mod 2`, via Lucas: `binom(k, i)` is odd iff the bits
/// of `i` are a submask of the bits of `k`.
pub fn mod2_is_power_of_z_minus_one(coeffs: &[BigInt]) -> bool {
    if coeffs.is_empty() {
        return false;
    }
    let k = coeffs.len() - 1;
    coeffs.iter().enumerate().all(|(i, c)| {
        let want_odd = i & k == i;
        c.is_odd() == want_odd
    })
}

use num_integer::Integer as _;

/// Nonadjacent form of `m >= 1`: the unique expansion with digits in
/// `{-1, 0, 1}` and no two adjacent nonzero digits.
pub fn naf(m: &BigInt) -> BinaryRep {
    assert!(m.is_positive(), "NAF is defined for positive m");
    let mut digits = Vec::new();
    let mut rest = m.clone();
    let four = BigInt::from(4);
    while rest.is_positive() {
        if rest.is_odd() {
            let r = rest.mod_floor(&four);
            let digit = if r.is_one() { BigInt::one() } else { -BigInt::one() };
            rest -= &digit;
            digits.push(digit);
        } else {
            digits.push(BigInt::zero());
        }
        rest /= 2;
    }
    let rep = BinaryRep {
        m: m.clone(),
        digits,
        kind: RepKind::Naf,
    };
    debug_assert_eq!(rep.k(), naf_top_index(m));
    rep
}

/// The modified expansion for `v2(m) >= 4`: digits `(2, -1, 0, 0, a_4,
/// ..., a_k)` where `(a_i)` is the NAF of `m`. The added low digits cancel
/// (`2*2^0 - 1*2^1 = 0`), so the value and the top index are unchanged,
/// while the signed combination gains the term `(-1)^k (2 g_{n,0} + g_{n,1})`.
pub fn variant_rep(m: &BigInt) -> Result<BinaryRep, FamilyError> {
    let v2 = m.trailing_zeros().unwrap_or(0);
    if m.is_zero() || v2 < 4 {
        return Err(FamilyError::WrongValuation(v2));
    }
    let base = naf(m);
    debug_assert!(base.digits[..4].iter().all(|d| d.is_zero()));
    let mut digits = vec![
        BigInt::from(2),
        BigInt::from(-1),
        BigInt::zero(),
        BigInt::zero(),
    ];
    digits.extend_from_slice(&base.digits[4..]);
    Ok(BinaryRep {
        m: m.clone(),
        digits,
        kind: RepKind::NafV2Ge4Variant,
    })
}

/// Memoizing computer for the `f` and `g` families.
///
/// Instances are cheap; hot paths keep one per construction session, so the
/// cache never needs synchronization and results are bit-identical
/// regardless of call order.
#[derive(Default)]
pub struct Family {
    f_cache: Vec<IntPoly>,
    g_cache: HashMap<(usize, usize), IntPoly>,
}

impl Family {
    pub fn new() -> Self {
        Family::default()
    }

    /// `f_n`, degree `2n`, monic for `n >= 1` (`f_0 = 2`).
    pub fn f(&mut self, n: usize) -> IntPoly {
        if self.f_cache.is_empty() {
            self.f_cache.push(IntPoly::constant(BigInt::from(2)));
            self.f_cache.push(IntPoly::from_i64(&[1, -4, 1]));
        }
        while self.f_cache.len() <= n {
            let len = self.f_cache.len();
            let f1 = &self.f_cache[len - 1];
            let f2 = &self.f_cache[len - 2];
            let step = IntPoly::from_i64(&[1, -4, 1]);
            let next = &(&step * f1) - &f2.mul_xk(2);
            self.f_cache.push(next);
        }
        self.f_cache[n].clone()
    }

    /// `g_{n,k}`, degree `2n + k`.
    pub fn g(&mut self, n: usize, k: usize) -> IntPoly {
        if k == 0 {
            return self.f(n);
        }
        if let Some(hit) = self.g_cache.get(&(n, k)) {
            return hit.clone();
        }
        let result = if k == 1 {
            let sum = &self.f(n) + &self.f(n + 1);
            sum.exact_div(&IntPoly::from_i64(&[-1, 1]))
                .expect("f_n + f_{n+1} is divisible by x - 1")
        } else {
            let a = self.g(n, k - 1);
            let b = self.g(n, k - 2);
            let shift = IntPoly::from_i64(&[-3, 1]);
            &(&shift * &a) - &b.scale(&BigInt::from(2))
        };
        debug_assert_eq!(result.degree(), Some(2 * n + k));
        self.g_cache.insert((n, k), result.clone());
        result
    }

    /// `sum_i (-1)^(i+k) digits[i] * g_{n,i}`, monic of degree `2n + k`,
    /// with constant term `(-1)^k m` for `n >= 1`.
    pub fn signed_combination(
        &mut self,
        rep: &BinaryRep,
        n: usize,
    ) -> Result<IntPoly, FamilyError> {
        if n == 0 {
            return Err(FamilyError::RequiresPositiveN);
        }
        let k = rep.k();
        let mut acc = IntPoly::zero();
        for (i, a) in rep.digits.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let term = self.g(n, i).scale(a);
            acc = if (k - i) % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            };
        }
        debug_assert_eq!(acc.degree(), Some(2 * n + k));
        debug_assert!(acc.is_monic());
        Ok(acc)
    }

    /// `h_{n,m}`: the signed combination of the NAF of `m`.
    pub fn h(&mut self, m: &BigInt, n: usize) -> Result<IntPoly, FamilyError> {
        self.signed_combination(&naf(m), n)
    }

    /// `h'_{n,m}` for `v2(m) >= 4`: the signed combination of the modified
    /// expansion, equal to `h_{n,m} + (-1)^k (2 g_{n,0} + g_{n,1})`.
    pub fn h_prime(&mut self, m: &BigInt, n: usize) -> Result<IntPoly, FamilyError> {
        self.signed_combination(&variant_rep(m)?, n)
    }
}
