//! Shared suites for the integration tests: each function checks one
//! documented identity or shape over its stated range and reports the
//! first violation. The acceptance gate reuses them wholesale.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use weilforge::discquality;
use weilforge::exactpoly::{poly_gcd, IntPoly};
use weilforge::family::{self, Family};
use weilforge::padic::{self, NewtonPolygon};
use weilforge::realroots;

pub fn p(coeffs: &[i64]) -> IntPoly {
    IntPoly::from_i64(coeffs)
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn eval_rational(q: &IntPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in q.coeffs().iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

fn sign_pow(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

// ---------- recurrences ----------

pub fn chebyshev_basics() -> Result<(), String> {
    if family::chebyshev_t(0) != p(&[2]) {
        return Err("T_0 != 2".into());
    }
    if family::chebyshev_t(1) != p(&[0, 1]) {
        return Err("T_1 != x".into());
    }
    if family::chebyshev_t(3) != p(&[0, -3, 0, 1]) {
        return Err("T_3 != x^3 - 3x".into());
    }
    let x = IntPoly::x();
    for n in 2..=12 {
        let lhs = family::chebyshev_t(n);
        let rhs = &(&x * &family::chebyshev_t(n - 1)) - &family::chebyshev_t(n - 2);
        if lhs != rhs {
            return Err(format!("three-term recurrence fails at T_{n}"));
        }
    }
    Ok(())
}

pub fn f_recurrence() -> Result<(), String> {
    let mut fam = Family::new();
    if fam.f(0) != p(&[2]) || fam.f(1) != p(&[1, -4, 1]) || fam.f(2) != p(&[1, -8, 16, -8, 1]) {
        return Err("f_0, f_1, f_2 do not match their closed forms".into());
    }
    let step = p(&[1, -4, 1]);
    for n in 2..=12 {
        let lhs = fam.f(n);
        let rhs = &(&step * &fam.f(n - 1)) - &fam.f(n - 2).mul_xk(2);
        if lhs != rhs {
            return Err(format!("f recurrence fails at n = {n}"));
        }
        if fam.f(n).deg() != 2 * n {
            return Err(format!("f_{n} does not have degree {}", 2 * n));
        }
    }
    Ok(())
}

pub fn f_matches_laurent_specialization() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_f00d);
    let mut fam = Family::new();
    for _ in 0..20 {
        let num: i64 = loop {
            let v = rng.gen_range(-20..=20);
            if v != 0 {
                break v;
            }
        };
        let den: i64 = rng.gen_range(1..=10);
        let x0 = BigRational::new(BigInt::from(num), BigInt::from(den));
        let arg = &x0 + x0.recip() - BigRational::from_integer(big(4));
        for n in 0..=10usize {
            let lhs = eval_rational(&fam.f(n), &x0);
            let t = eval_rational(&family::chebyshev_t(n), &arg);
            let rhs = x0.pow(n as i32) * t;
            if lhs != rhs {
                return Err(format!("f_{n}({x0}) != x0^n T_n(x0 + 1/x0 - 4)"));
            }
        }
    }
    Ok(())
}

pub fn g_adjacent_sum_recurrence() -> Result<(), String> {
    let mut fam = Family::new();
    let xm1 = p(&[-1, 1]);
    for n in 0..=8 {
        for k in 1..=8 {
            let lhs = &xm1 * &fam.g(n, k);
            let rhs = &fam.g(n, k - 1) + &fam.g(n + 1, k - 1);
            if lhs != rhs {
                return Err(format!("(x-1) g({n},{k}) identity fails"));
            }
        }
    }
    Ok(())
}

pub fn g_step_recurrence() -> Result<(), String> {
    let mut fam = Family::new();
    let shift = p(&[-3, 1]);
    for n in 0..=8 {
        for k in 2..=8 {
            let lhs = fam.g(n, k);
            let rhs = &(&shift * &fam.g(n, k - 1)) - &fam.g(n, k - 2).scale(&big(2));
            if lhs != rhs {
                return Err(format!("g({n},{k}) step recurrence fails"));
            }
        }
    }
    Ok(())
}

pub fn g_double_shift_recurrence() -> Result<(), String> {
    let mut fam = Family::new();
    for n in 1..=8 {
        for k in 2..=8 {
            let lhs = &(&fam.g(n, k) + &fam.g(n, k - 1).scale(&big(4)))
                + &fam.g(n, k - 2).scale(&big(4));
            let rhs = fam.g(n - 1, k).mul_xk(2);
            if lhs != rhs {
                return Err(format!("g({n},{k}) descent identity fails"));
            }
        }
    }
    Ok(())
}

pub fn g_three_term_in_n() -> Result<(), String> {
    let mut fam = Family::new();
    let step = p(&[1, -4, 1]);
    for n in 2..=8 {
        for k in 0..=8 {
            let lhs = fam.g(n, k);
            let rhs = &(&step * &fam.g(n - 1, k)) - &fam.g(n - 2, k).mul_xk(2);
            if lhs != rhs {
                return Err(format!("g({n},{k}) three-term recurrence in n fails"));
            }
        }
    }
    for m in [5i64, 6, 7, 45] {
        let rep = family::naf(&big(m));
        for n in 3..=8 {
            let lhs = fam.signed_combination(&rep, n).map_err(|e| e.to_string())?;
            let a = fam
                .signed_combination(&rep, n - 1)
                .map_err(|e| e.to_string())?;
            let b = fam
                .signed_combination(&rep, n - 2)
                .map_err(|e| e.to_string())?;
            let rhs = &(&step * &a) - &b.mul_xk(2);
            if lhs != rhs {
                return Err(format!(
                    "signed combination of m = {m} fails the recurrence at n = {n}"
                ));
            }
        }
    }
    Ok(())
}

// ---------- values and congruences ----------

pub fn constant_term_values() -> Result<(), String> {
    let mut fam = Family::new();
    for n in 1..=8usize {
        if fam.f(n).constant_term() != BigInt::one() {
            return Err(format!("f_{n}(0) != 1"));
        }
        for k in 0..=8usize {
            let want = (-big(2)).pow(k as u32);
            if fam.g(n, k).constant_term() != want {
                return Err(format!("g({n},{k})(0) != (-2)^{k}"));
            }
        }
    }
    Ok(())
}

pub fn values_at_one() -> Result<(), String> {
    let w: Vec<BigInt> = (0..=10).map(family::w_const).collect();
    for (k, want) in [
        (0usize, 2i64),
        (1, 2),
        (2, 0),
        (3, -4),
        (4, -8),
        (5, -8),
        (6, 0),
        (7, 16),
        (8, 32),
    ] {
        if w[k] != big(want) {
            return Err(format!("w_{k} != {want}"));
        }
    }
    let one = BigInt::one();
    let mut fam = Family::new();
    for n in 0..=10 {
        for k in 0..=10 {
            let got = fam.g(n, k).eval(&one);
            let want = sign_pow(n as i64 - k as i64) * &w[k];
            if got != want {
                return Err(format!("g({n},{k})(1) != (-1)^(n-k) w_k"));
            }
        }
    }
    Ok(())
}

pub fn f_mod8_shape() -> Result<(), String> {
    let mut fam = Family::new();
    for n in 1..=8usize {
        let f = fam.f(n);
        for i in 0..=2 * n {
            let c = f.coeff(i);
            let want = if i == 2 * n {
                big(1)
            } else if i == 0 {
                big(1)
            } else if i % 2 == 1 {
                big(4 * n as i64)
            } else {
                big(0)
            };
            if (c - want) % big(8) != BigInt::zero() {
                return Err(format!("f_{n} coefficient {i} violates the mod-8 shape"));
            }
        }
    }
    Ok(())
}

pub fn g_mod2_shape() -> Result<(), String> {
    let mut fam = Family::new();
    let xp1 = p(&[1, 1]);
    for n in 0..=6usize {
        for k in 0..=6usize {
            let mut pw = IntPoly::one();
            for _ in 0..k {
                pw = &pw * &xp1;
            }
            let model = &pw.mul_xk(2 * n) + &IntPoly::constant(big(2).pow(k as u32));
            let diff = &fam.g(n, k) - &model;
            if !diff.coeffs().iter().all(|c| (c % big(2)).is_zero()) {
                return Err(format!("g({n},{k}) mod 2 shape fails"));
            }
        }
    }
    Ok(())
}

pub fn g_low_coefficients_divisibility() -> Result<(), String> {
    let mut fam = Family::new();
    for n in 0..=6usize {
        for k in 0..=6usize {
            let g = fam.g(n, k);
            let modulus = big(2).pow(k as u32);
            for i in 0..(2 * n).min(g.deg() + 1) {
                if !(g.coeff(i) % &modulus).is_zero() {
                    return Err(format!(
                        "g({n},{k}) coefficient {i} is not divisible by 2^{k}"
                    ));
                }
            }
        }
    }
    Ok(())
}

pub fn g_k1_k2_mod8_shapes() -> Result<(), String> {
    let mut fam = Family::new();
    for n in 1..=6usize {
        let g1 = fam.g(n, 1);
        for i in 0..2 * n {
            let want = sign_pow((i as i64 - 1).div_euclid(2)) * big(2);
            if ((g1.coeff(i) - want) % big(8)) != BigInt::zero() {
                return Err(format!("g({n},1) coefficient {i} violates its mod-8 form"));
            }
        }
        let g2 = fam.g(n, 2);
        for i in 0..2 * n {
            let want = if i % 2 == 0 { big(4) } else { big(0) };
            if ((g2.coeff(i) - want) % big(8)) != BigInt::zero() {
                return Err(format!("g({n},2) coefficient {i} violates its mod-8 form"));
            }
        }
    }
    Ok(())
}

pub fn h_valuation2_mod8_shape() -> Result<(), String> {
    let mut fam = Family::new();
    // m = 4, 12, 20, ..., 60: exactly the orders here with 2-adic valuation 2.
    for m in (4..=60i64).step_by(8) {
        for n in 1..=6usize {
            let h = fam.h(&big(m), n).map_err(|e| e.to_string())?;
            for i in 0..2 * n {
                let want = if i % 2 == 0 { big(4) } else { big(0) };
                if ((h.coeff(i) - want) % big(8)) != BigInt::zero() {
                    return Err(format!(
                        "h for m = {m}, n = {n}: coefficient {i} violates the mod-8 form"
                    ));
                }
            }
        }
    }
    Ok(())
}

pub fn h_odd_value_at_one_mod4() -> Result<(), String> {
    let mut fam = Family::new();
    for m in (1..=99i64).step_by(2) {
        for n in 1..=6usize {
            let v = fam.h(&big(m), n).map_err(|e| e.to_string())?.eval(&big(1));
            if ((v % big(4)) + big(4)) % big(4) != big(2) {
                return Err(format!("h(1) for m = {m}, n = {n} is not 2 mod 4"));
            }
        }
    }
    Ok(())
}

pub fn naf_weight_bound_holds() -> Result<(), String> {
    for m in 1..=10000i64 {
        let rep = family::naf(&big(m));
        if !discquality::weight_condition_holds(&rep.digit_poly()) {
            return Err(format!("weight bound fails for the digits of {m}"));
        }
    }
    Ok(())
}

pub fn cross_index_common_factors_unimodular() -> Result<(), String> {
    let mut fam = Family::new();
    for m in 1..=30i64 {
        let polys: Vec<IntPoly> = (1..=6usize)
            .map(|n| fam.h(&big(m), n))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for i in 0..polys.len() {
            for j in (i + 1)..polys.len() {
                let gcd = poly_gcd(&polys[i], &polys[j]);
                if gcd.deg() >= 1 && gcd.constant_term().abs() != BigInt::one() {
                    return Err(format!(
                        "common factor of indices {} and {} for m = {m} has constant term {}",
                        i + 1,
                        j + 1,
                        gcd.constant_term()
                    ));
                }
            }
        }
    }
    Ok(())
}

// ---------- real root locations ----------

pub fn family_roots_in_interval() -> Result<(), String> {
    let mut fam = Family::new();
    for m in 1..=50i64 {
        for n in 1..=8usize {
            let h = fam.h(&big(m), n).map_err(|e| e.to_string())?;
            let report = realroots::verify_roots_in_ab(&h).map_err(|e| e.to_string())?;
            if !(report.all_in && report.distinct) {
                return Err(format!(
                    "roots of the m = {m}, n = {n} member are not distinct inside the interval: {report:?}"
                ));
            }
        }
    }
    Ok(())
}

// ---------- polygon shapes ----------

fn polygon_value_at(np: &NewtonPolygon, x: usize) -> Option<BigRational> {
    let verts = &np.vertices;
    for w in verts.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        if x1 <= x && x <= x2 {
            let num = BigInt::from(y1) * BigInt::from(x2 - x1)
                + BigInt::from(y2 - y1) * BigInt::from(x - x1);
            return Some(BigRational::new(num, BigInt::from(x2 - x1)));
        }
    }
    if verts.len() == 1 && verts[0].0 == x {
        return Some(BigRational::from_integer(BigInt::from(verts[0].1)));
    }
    None
}

/// For even orders the polygon of the family member settles, from some
/// index on, into exactly (0,0), (k-d, 0), (2n+k, v2(m)).
pub fn even_polygon_shape() -> Result<(), String> {
    let mut fam = Family::new();
    for m in (2..=40i64).step_by(2) {
        let mb = big(m);
        let rep = family::naf(&mb);
        let k = rep.k();
        let d = padic::f2_multiplicity_at_one(&rep.digits);
        let v = padic::v2(&mb).map_err(|e| e.to_string())?;
        let expected = |n: usize| {
            let mut verts = vec![(0usize, 0u64)];
            if k > d {
                verts.push((k - d, 0));
            }
            verts.push((2 * n + k, v));
            verts
        };
        let mut settled_from = None;
        for n in 1..=8usize {
            let h = fam.h(&mb, n).map_err(|e| e.to_string())?;
            let np = NewtonPolygon::new(&h).map_err(|e| e.to_string())?;
            if np.vertices == expected(n) {
                if settled_from.is_none() {
                    settled_from = Some(n);
                }
            } else if settled_from.is_some() && settled_from.unwrap() <= n {
                settled_from = None; // must hold for every later n as well
            }
        }
        match settled_from {
            Some(n0) if n0 <= 4 => {}
            other => {
                return Err(format!(
                    "m = {m}: polygon never settles into the three-vertex shape by index 4 (got {other:?})"
                ))
            }
        }
    }
    Ok(())
}

/// For orders with 2-adic valuation at least 4 the modified expansion's
/// polygon is (0,0), (k-d, 0), (2n+k-1, 1), (2n+k, v2(m)).
pub fn variant_polygon_shape() -> Result<(), String> {
    let mut fam = Family::new();
    for m in [16i64, 48, 80] {
        let mb = big(m);
        let rep = family::variant_rep(&mb).map_err(|e| e.to_string())?;
        let k = rep.k();
        let d = padic::f2_multiplicity_at_one(&rep.digits);
        let v = padic::v2(&mb).map_err(|e| e.to_string())?;
        for n in 4..=8usize {
            let h = fam.h_prime(&mb, n).map_err(|e| e.to_string())?;
            let np = NewtonPolygon::new(&h).map_err(|e| e.to_string())?;
            let want = vec![(0usize, 0u64), (k - d, 0), (2 * n + k - 1, 1), (2 * n + k, v)];
            if np.vertices != want {
                return Err(format!(
                    "m = {m}, n = {n}: polygon {:?} differs from {want:?}",
                    np.vertices
                ));
            }
        }
    }
    Ok(())
}

pub fn random_polygon_hull_properties() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0xca11_ab1e);
    for trial in 0..200 {
        let deg = rng.gen_range(3..=10usize);
        let mut coeffs: Vec<BigInt> = Vec::with_capacity(deg + 1);
        for i in 0..=deg {
            if i == deg {
                coeffs.push(BigInt::one());
                break;
            }
            let odd = 2 * rng.gen_range(-8..=8i64) + 1;
            let e = rng.gen_range(0..=6u32);
            let zeroish: bool = i != 0 && rng.gen_bool(0.2);
            coeffs.push(if zeroish {
                BigInt::zero()
            } else {
                big(odd) << e
            });
        }
        let q = IntPoly::new(coeffs);
        let np = NewtonPolygon::new(&q).map_err(|e| e.to_string())?;
        let verts = &np.vertices;
        if verts.first() != Some(&(0, 0)) {
            return Err(format!("trial {trial}: polygon does not start at (0,0)"));
        }
        if verts.last().map(|v| v.0) != Some(q.deg()) {
            return Err(format!("trial {trial}: polygon does not end at the degree"));
        }
        let total_height = verts.last().unwrap().1;
        if Ok(total_height) != padic::v2(&q.constant_term()) {
            return Err(format!(
                "trial {trial}: total height differs from the constant-term valuation"
            ));
        }
        // Every coefficient point lies on or above the hull.
        for i in 0..=q.deg() {
            let c = q.coeff(q.deg() - i);
            if c.is_zero() {
                continue;
            }
            let y = padic::v2(&c).map_err(|e| e.to_string())?;
            let hull = polygon_value_at(&np, i)
                .ok_or_else(|| format!("trial {trial}: abscissa {i} outside the hull"))?;
            if BigRational::from_integer(BigInt::from(y)) < hull {
                return Err(format!("trial {trial}: point {i} dips below the hull"));
            }
        }
        // Vertices are extreme: slopes strictly increase.
        for w in verts.windows(3) {
            let s1 = BigRational::new(
                BigInt::from(w[1].1) - BigInt::from(w[0].1),
                BigInt::from(w[1].0 - w[0].0),
            );
            let s2 = BigRational::new(
                BigInt::from(w[2].1) - BigInt::from(w[1].1),
                BigInt::from(w[2].0 - w[1].0),
            );
            if s1 >= s2 {
                return Err(format!("trial {trial}: collinear or concave vertices"));
            }
        }
    }
    Ok(())
}
