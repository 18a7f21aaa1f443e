//! 2-adic tools: valuations, Newton polygons, and the segment certificates
//! that bound the degree of an irreducible factor from below.
//!
//! Polygons here use the reversed convention: abscissa `i` carries the
//! valuation of the coefficient of `x^(deg - i)`, so hull slopes increase
//! left to right and equal the 2-adic valuations of the roots, with the
//! final segment holding the roots of largest valuation. A final segment
//! from `(x0, y0)` to `(x1, y1)` with `gcd(x1 - x0, y1 - y0) = 1` forces a
//! single irreducible factor of degree `x1 - x0` over the 2-adic numbers,
//! hence a rational irreducible factor of degree at least that.

use crate::exactpoly::IntPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("the 2-adic valuation of zero is undefined")]
    ZeroValuation,
    #[error("Newton polygon needs nonzero leading and constant coefficients")]
    UnsupportedPolygon,
}

/// 2-adic valuation of a nonzero integer.
pub fn v2(n: &BigInt) -> Result<u64, PadicError> {
    n.trailing_zeros().ok_or(PadicError::ZeroValuation)
}

/// Lower Newton polygon of `p` at 2, reversed convention: the point at
/// abscissa `i` is `(i, v2(coeff of x^(deg - i)))`, zero coefficients
/// contribute no point. Vertices are minimal (no collinear interior
/// points).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, u64)>,
}

impl NewtonPolygon {
    pub fn new(p: &IntPoly) -> Result<NewtonPolygon, PadicError> {
        if p.is_zero() || p.constant_term().is_zero() {
            return Err(PadicError::UnsupportedPolygon);
        }
        let d = p.deg();
        let mut verts: Vec<(usize, u64)> = Vec::new();
        for i in 0..=d {
            let c = p.coeff(d - i);
            if c.is_zero() {
                continue;
            }
            let y = v2(&c).expect("nonzero coefficient");
            while verts.len() >= 2 {
                let (x1, y1) = verts[verts.len() - 2];
                let (x2, y2) = verts[verts.len() - 1];
                // keep only strict upward turns of the lower hull
                let cross = (x2 as i128 - x1 as i128) * (y as i128 - y1 as i128)
                    - (y2 as i128 - y1 as i128) * (i as i128 - x1 as i128);
                if cross <= 0 {
                    verts.pop();
                } else {
                    break;
                }
            }
            verts.push((i, y));
        }
        Ok(NewtonPolygon { vertices: verts })
    }

    /// Consecutive vertex pairs.
    pub fn segments(&self) -> Vec<((usize, u64), (usize, u64))> {
        self.vertices.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// The segment of largest slope (roots of largest valuation), absent
    /// for constants.
    pub fn final_segment(&self) -> Option<((usize, u64), (usize, u64))> {
        let n = self.vertices.len();
        if n < 2 {
            None
        } else {
            Some((self.vertices[n - 2], self.vertices[n - 1]))
        }
    }
}

/// Whether `p(x + 1)` satisfies the Eisenstein criterion at 2: odd leading
/// coefficient, every other coefficient even, and constant term of 2-adic
/// valuation exactly 1. This certifies irreducibility of `p` over the
/// rationals.
pub fn eisenstein_shifted(p: &IntPoly) -> bool {
    if p.is_zero() || p.deg() == 0 {
        return false;
    }
    let s = p.substitute_linear(1, &BigInt::one());
    if s.leading().is_even() {
        return false;
    }
    let c0 = s.coeff(0);
    if c0.is_zero() || v2(&c0) != Ok(1) {
        return false;
    }
    (0..s.deg()).all(|i| s.coeff(i).is_even())
}

/// Multiplicity of `y = 1` as a root of `sum digits[i] * y^i` over the
/// field with two elements. The digit list must be odd somewhere.
pub fn f2_multiplicity_at_one(digits: &[BigInt]) -> usize {
    let mut bits: Vec<bool> = digits.iter().map(|d| d.is_odd()).collect();
    assert!(bits.iter().any(|&b| b), "digit polynomial vanishes mod 2");
    let mut mult = 0;
    loop {
        if bits.iter().filter(|&&b| b).count() % 2 != 0 {
            return mult; // value at 1 is nonzero mod 2
        }
        // synthetic division by (y + 1) over F_2, top down
        let mut quo = vec![false; bits.len() - 1];
        let mut carry = false;
        for i in (0..bits.len() - 1).rev() {
            carry ^= bits[i + 1];
            quo[i] = carry;
        }
        bits = quo;
        mult += 1;
    }
}

/// Which construction produced the polynomial under certification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// `v2(m)` odd: certify any primitive final segment.
    NafV2Odd,
    /// `v2(m) = 2`: primitive final segment, or the mod-8 split test.
    NafV2Two,
    /// `v2(m) >= 4` with the modified expansion: certify the penultimate
    /// segment ending at ordinate 1.
    NafV2Ge4,
}

/// Inputs the certification step needs beyond the polynomial itself.
#[derive(Clone, Debug)]
pub struct TailContext {
    pub kind: TailKind,
    pub m: BigInt,
    pub n: usize,
    pub k: usize,
    /// Multiplicity of 1 as a mod-2 root of the digit polynomial actually
    /// used (NAF digits, or the modified digits for `v2(m) >= 4`).
    pub d_mod2: usize,
}

/// Evidence that the tested coefficient contradicts the value forced by a
/// split of the valuation-2 tail into two conjugate factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub coeff_index: usize,
    pub coeff_mod8: u8,
    pub forced_mod8: u8,
    pub m_mod16: u8,
}

/// A certified lower bound on the degree of some irreducible rational
/// factor, derived from one polygon segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentCert {
    pub x0: usize,
    pub y0: u64,
    pub x1: usize,
    pub y1: u64,
    /// Some irreducible rational factor has degree at least this.
    pub bound: usize,
    pub split_witness: Option<SplitWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailVerdict {
    Certified(SegmentCert),
    /// Certification failed at this `n`; the reason is diagnostic only.
    Advance(String),
}

fn mod_u8(v: &BigInt, modulus: u32) -> u8 {
    v.mod_floor(&BigInt::from(modulus))
        .to_u8()
        .expect("residue fits in u8")
}

/// Certifies a lower bound on the degree of an irreducible rational factor
/// of `p` from its polygon, following the construction-specific argument.
pub fn certify_tail_segment(p: &IntPoly, np: &NewtonPolygon, ctx: &TailContext) -> TailVerdict {
    let verts = &np.vertices;
    let Some(((x0, y0), (x1, y1))) = np.final_segment() else {
        return TailVerdict::Advance("polygon has no segment".into());
    };
    if x1 != p.deg() {
        return TailVerdict::Advance(format!(
            "polygon ends at abscissa {x1}, expected degree {}",
            p.deg()
        ));
    }
    let vm = match v2(&ctx.m) {
        Ok(v) => v,
        Err(_) => return TailVerdict::Advance("m must be nonzero".into()),
    };
    if y1 != vm {
        return TailVerdict::Advance(format!(
            "final ordinate {y1} differs from v2(m) = {vm}"
        ));
    }
    let dx = x1 - x0;
    let dy = y1 - y0;
    match ctx.kind {
        TailKind::NafV2Odd => {
            if (dx as u64).gcd(&dy) == 1 {
                TailVerdict::Certified(SegmentCert {
                    x0,
                    y0,
                    x1,
                    y1,
                    bound: dx,
                    split_witness: None,
                })
            } else {
                TailVerdict::Advance(format!(
                    "final segment ({x0},{y0})->({x1},{y1}) is imprimitive"
                ))
            }
        }
        TailKind::NafV2Two => {
            if (dx as u64).gcd(&dy) == 1 {
                return TailVerdict::Certified(SegmentCert {
                    x0,
                    y0,
                    x1,
                    y1,
                    bound: dx,
                    split_witness: None,
                });
            }
            if vm != 2 {
                return TailVerdict::Advance(format!("expected v2(m) = 2, got {vm}"));
            }
            if y0 != 0 || dy != 2 {
                return TailVerdict::Advance(format!(
                    "split test needs a segment from ordinate 0 to 2, got ({x0},{y0})->({x1},{y1})"
                ));
            }
            if dx < 2 * ctx.n {
                return TailVerdict::Advance(format!(
                    "segment run {dx} shorter than 2n = {}",
                    2 * ctx.n
                ));
            }
            let d_eff = dx - 2 * ctx.n;
            if d_eff % 2 != 0 {
                return TailVerdict::Advance(format!("tail width {d_eff} is odd"));
            }
            if d_eff != ctx.d_mod2 {
                return TailVerdict::Advance(format!(
                    "tail width {d_eff} disagrees with the mod-2 multiplicity {}",
                    ctx.d_mod2
                ));
            }
            let idx = ctx.n + d_eff / 2;
            let actual = mod_u8(&p.coeff(idx), 8);
            let c0_mod16 = mod_u8(&p.constant_term(), 16);
            let forced: u8 = match c0_mod16 {
                12 => 0,
                4 => 4,
                _ => {
                    return TailVerdict::Advance(format!(
                        "constant term is {c0_mod16} mod 16, expected 4 or 12"
                    ))
                }
            };
            if actual != forced {
                TailVerdict::Certified(SegmentCert {
                    x0,
                    y0,
                    x1,
                    y1,
                    bound: dx,
                    split_witness: Some(SplitWitness {
                        coeff_index: idx,
                        coeff_mod8: actual,
                        forced_mod8: forced,
                        m_mod16: mod_u8(&ctx.m, 16),
                    }),
                })
            } else {
                TailVerdict::Advance(format!(
                    "split test inconclusive: coefficient {idx} is {actual} mod 8, matching the split value"
                ))
            }
        }
        TailKind::NafV2Ge4 => {
            if vm < 4 {
                return TailVerdict::Advance(format!("expected v2(m) >= 4, got {vm}"));
            }
            if verts.len() < 3 {
                return TailVerdict::Advance("polygon lacks the ordinate-1 vertex".into());
            }
            let (xa, ya) = verts[verts.len() - 2];
            if ya != 1 || xa != p.deg() - 1 {
                return TailVerdict::Advance(format!(
                    "expected vertex ({}, 1) before the tail, found ({xa}, {ya})",
                    p.deg() - 1
                ));
            }
            let (xb, yb) = verts[verts.len() - 3];
            if yb != 0 {
                return TailVerdict::Advance(format!(
                    "segment into the ordinate-1 vertex starts at ordinate {yb}, not 0"
                ));
            }
            if ctx.k < xb || ctx.k - xb != ctx.d_mod2 {
                return TailVerdict::Advance(format!(
                    "vertex abscissa {xb} disagrees with k - d = {} - {}",
                    ctx.k, ctx.d_mod2
                ));
            }
            TailVerdict::Certified(SegmentCert {
                x0: xb,
                y0: 0,
                x1: xa,
                y1: 1,
                bound: xa - xb,
                split_witness: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{naf, variant_rep, Family};

    fn p(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_i64(coeffs)
    }

    #[test]
    fn v2_values() {
        assert_eq!(v2(&BigInt::from(8)), Ok(3));
        assert_eq!(v2(&BigInt::from(-12)), Ok(2));
        assert_eq!(v2(&BigInt::from(1)), Ok(0));
        assert_eq!(v2(&BigInt::zero()), Err(PadicError::ZeroValuation));
    }

    #[test]
    fn polygon_frozen_shapes() {
        // x^3 - 7x^2 + 10x - 2: valuations (top down) 0,0,1,1
        let h = p(&[-2, 10, -7, 1]);
        let np = NewtonPolygon::new(&h).unwrap();
        assert_eq!(np.vertices, vec![(0, 0), (1, 0), (3, 1)]);
        assert_eq!(np.final_segment(), Some(((1, 0), (3, 1))));

        let np2 = NewtonPolygon::new(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(np2.vertices, vec![(0, 0), (2, 1)]);

        // x^2 - 2x - 8: keeps the middle vertex (1, 1)
        let np3 = NewtonPolygon::new(&p(&[-8, -2, 1])).unwrap();
        assert_eq!(np3.vertices, vec![(0, 0), (1, 1), (2, 3)]);

        // zero coefficients contribute no points
        let np4 = NewtonPolygon::new(&p(&[-8, 0, 0, 1])).unwrap();
        assert_eq!(np4.vertices, vec![(0, 0), (3, 3)]);
    }

    #[test]
    fn polygon_rejects_zero_constant() {
        assert_eq!(
            NewtonPolygon::new(&p(&[0, 1])),
            Err(PadicError::UnsupportedPolygon)
        );
    }

    #[test]
    fn eisenstein_shift_examples() {
        assert!(eisenstein_shifted(&p(&[1, 0, 1]))); // (x+1)^2 + 1 = x^2 + 2x + 2
        assert!(!eisenstein_shifted(&p(&[-2, 0, 1]))); // shift gives odd constant
        assert!(!eisenstein_shifted(&p(&[-1, 1]))); // shift gives zero constant
        assert!(!eisenstein_shifted(&p(&[2]))); // constants carry no content
    }

    #[test]
    fn f2_multiplicity_examples() {
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        // y^2: value 1 at y=1
        assert_eq!(f2_multiplicity_at_one(&ints(&[0, 0, 1])), 0);
        // y^4 + y = y(y+1)(y^2+y+1)
        assert_eq!(f2_multiplicity_at_one(&ints(&[0, 1, 0, 0, 1])), 1);
        // y^2 + 1 = (y+1)^2
        assert_eq!(f2_multiplicity_at_one(&ints(&[1, 0, 1])), 2);
        // digits of the modified expansion of 16: (2, -1, 0, 0, 1)
        let rep = variant_rep(&BigInt::from(16)).unwrap();
        assert_eq!(f2_multiplicity_at_one(&rep.digits), 1);
    }

    #[test]
    fn certify_odd_valuation_primitive_segment() {
        let mut fam = Family::new();
        let m = BigInt::from(2);
        let h = fam.h(&m, 1).unwrap();
        let np = NewtonPolygon::new(&h).unwrap();
        let ctx = TailContext {
            kind: TailKind::NafV2Odd,
            m: m.clone(),
            n: 1,
            k: naf(&m).k(),
            d_mod2: f2_multiplicity_at_one(&naf(&m).digits),
        };
        match certify_tail_segment(&h, &np, &ctx) {
            TailVerdict::Certified(cert) => {
                assert_eq!((cert.x0, cert.y0, cert.x1, cert.y1), (1, 0, 3, 1));
                assert_eq!(cert.bound, 2);
                assert!(cert.split_witness.is_none());
            }
            TailVerdict::Advance(r) => panic!("expected certification, got: {r}"),
        }
    }

    #[test]
    fn certify_valuation_two_split_test() {
        // m = 4: h_{1,4} = g_{1,2} = x^4 - 10x^3 + 29x^2 - 24x + 4
        let mut fam = Family::new();
        let m = BigInt::from(4);
        let h = fam.h(&m, 1).unwrap();
        assert_eq!(h, p(&[4, -24, 29, -10, 1]));
        let np = NewtonPolygon::new(&h).unwrap();
        assert_eq!(np.vertices, vec![(0, 0), (2, 0), (4, 2)]);
        let rep = naf(&m);
        let ctx = TailContext {
            kind: TailKind::NafV2Two,
            m: m.clone(),
            n: 1,
            k: rep.k(),
            d_mod2: f2_multiplicity_at_one(&rep.digits),
        };
        match certify_tail_segment(&h, &np, &ctx) {
            TailVerdict::Certified(cert) => {
                assert_eq!(cert.bound, 2);
                let w = cert.split_witness.expect("split witness");
                assert_eq!(w.coeff_index, 1);
                assert_eq!(w.coeff_mod8, 0); // -24 mod 8
                assert_eq!(w.forced_mod8, 4); // constant 4 mod 16
                assert_eq!(w.m_mod16, 4);
            }
            TailVerdict::Advance(r) => panic!("expected certification, got: {r}"),
        }
    }

    #[test]
    fn certify_high_valuation_shape() {
        // m = 16, n = 1: the modified expansion gives the ordinate-1 vertex
        let mut fam = Family::new();
        let m = BigInt::from(16);
        let hp = fam.h_prime(&m, 1).unwrap();
        assert_eq!(hp, p(&[16, -126, 284, -247, 94, -16, 1]));
        let np = NewtonPolygon::new(&hp).unwrap();
        assert_eq!(np.vertices, vec![(0, 0), (3, 0), (5, 1), (6, 4)]);
        let rep = variant_rep(&m).unwrap();
        let ctx = TailContext {
            kind: TailKind::NafV2Ge4,
            m: m.clone(),
            n: 1,
            k: rep.k(),
            d_mod2: f2_multiplicity_at_one(&rep.digits),
        };
        match certify_tail_segment(&hp, &np, &ctx) {
            TailVerdict::Certified(cert) => {
                assert_eq!((cert.x0, cert.y0, cert.x1, cert.y1), (3, 0, 5, 1));
                assert_eq!(cert.bound, 2);
            }
            TailVerdict::Advance(r) => panic!("expected certification, got: {r}"),
        }
    }

    #[test]
    fn polygon_slopes_increase() {
        let mut fam = Family::new();
        for m in [2i64, 4, 6, 8, 10, 12, 16, 24, 48] {
            let m = BigInt::from(m);
            for n in 1..=3usize {
                let h = fam.h(&m, n).unwrap();
                let np = NewtonPolygon::new(&h).unwrap();
                for w in np.segments().windows(2) {
                    let ((a0, b0), (a1, b1)) = w[0];
                    let ((c0, d0), (c1, d1)) = w[1];
                    assert_eq!((a1, b1), (c0, d0));
                    // slope comparison via cross-multiplication
                    let s0 = (b1 - b0) as i128 * (c1 - c0) as i128;
                    let s1 = (d1 - d0) as i128 * (a1 - a0) as i128;
                    assert!(s0 < s1, "m={m} n={n}: slopes must strictly increase");
                }
            }
        }
    }
}
