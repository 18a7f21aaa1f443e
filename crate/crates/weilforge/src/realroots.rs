//! Exact real-root location in the interval `[3 - 2*sqrt(2), 3 + 2*sqrt(2)]`.
//!
//! Everything here runs on integer and rational arithmetic only: Sturm
//! chains count distinct real roots in half-open rational intervals, the
//! irrational interval endpoints are handled through shrinking rational
//! brackets around the roots of `x^2 - 6x + 1`, and factor discovery works
//! by enclosing subsets of isolated roots in interval products and snapping
//! to integer polynomials, with exact division as the final arbiter.

use crate::exactpoly::{poly_gcd, pseudo_rem_positive, squarefree_part, IntPoly, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealRootsError {
    #[error("bracket refinement exceeded the iteration cap")]
    RefinementCap,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

const REFINE_CAP: usize = 256;
const NODE_CAP: usize = 1 << 21;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

fn midpoint(lo: &Rat, hi: &Rat) -> Rat {
    (lo + hi) / rat(2, 1)
}

fn ceil_int(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

fn floor_int(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// `x^2 - 6x + 1`, the minimal polynomial of both interval endpoints
/// `3 +- 2*sqrt(2)`.
pub fn endpoint_poly() -> IntPoly {
    IntPoly::from_i64(&[1, -6, 1])
}

/// Rational bounds `(171/1000, 5829/1000)` strictly containing the closed
/// interval `[3 - 2*sqrt(2), 3 + 2*sqrt(2)]`.
pub fn outer_ab_bounds() -> (Rat, Rat) {
    (rat(171, 1000), rat(5829, 1000))
}

/// A shrinking rational bracket `[lo, hi]` around one simple real root of
/// `witness`, with a strict sign change across the bracket unless the root
/// is known exactly.
#[derive(Clone, Debug)]
pub struct RootBracket {
    pub lo: Rat,
    pub hi: Rat,
    /// Set when the root is a known rational number.
    pub exact: Option<Rat>,
    witness: IntPoly,
}

impl RootBracket {
    /// Bracket around a simple root of `witness` in `(lo, hi)`; requires
    /// nonzero opposite signs at the ends.
    pub fn new_sign_change(witness: IntPoly, lo: Rat, hi: Rat) -> Option<RootBracket> {
        let slo = witness.sign_at(&lo);
        let shi = witness.sign_at(&hi);
        if lo < hi && slo != 0 && shi != 0 && slo != shi {
            Some(RootBracket {
                lo,
                hi,
                exact: None,
                witness,
            })
        } else {
            None
        }
    }

    /// Bracket of width `1/512` around a known rational root.
    pub fn new_exact(r: Rat) -> RootBracket {
        let w = rat(1, 1024);
        let witness = IntPoly::new(vec![-r.numer().clone(), r.denom().clone()]);
        RootBracket {
            lo: &r - &w,
            hi: &r + &w,
            exact: Some(r),
            witness,
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    /// Halves the bracket, keeping the root strictly inside.
    pub fn refine(&mut self) {
        if let Some(r) = &self.exact {
            let w = self.width() / rat(4, 1);
            self.lo = r - &w;
            self.hi = r + &w;
            return;
        }
        let mid = midpoint(&self.lo, &self.hi);
        let s = self.witness.sign_at(&mid);
        if s == 0 {
            // The midpoint itself is the root; switch to the exact form.
            self.exact = Some(mid);
            return;
        }
        if s == self.witness.sign_at(&self.lo) {
            self.lo = mid;
        } else {
            self.hi = mid;
        }
    }
}

/// Bracket around the left endpoint `a = 3 - 2*sqrt(2)`.
pub fn bracket_endpoint_a() -> RootBracket {
    RootBracket::new_sign_change(endpoint_poly(), rat(171, 1000), rat(172, 1000))
        .expect("sign change around 3 - 2*sqrt(2)")
}

/// Bracket around the right endpoint `b = 3 + 2*sqrt(2)`.
pub fn bracket_endpoint_b() -> RootBracket {
    RootBracket::new_sign_change(endpoint_poly(), rat(5828, 1000), rat(5829, 1000))
        .expect("sign change around 3 + 2*sqrt(2)")
}

/// Bracket around `2*sqrt(2)` (a root of `t^2 - 8`).
pub fn bracket_two_sqrt2_pos() -> RootBracket {
    RootBracket::new_sign_change(IntPoly::from_i64(&[-8, 0, 1]), rat(2828, 1000), rat(2829, 1000))
        .expect("sign change around 2*sqrt(2)")
}

/// Bracket around `-2*sqrt(2)`.
pub fn bracket_two_sqrt2_neg() -> RootBracket {
    RootBracket::new_sign_change(
        IntPoly::from_i64(&[-8, 0, 1]),
        rat(-2829, 1000),
        rat(-2828, 1000),
    )
    .expect("sign change around -2*sqrt(2)")
}

/// Refines until the two brackets are disjoint and reports which root is
/// smaller. Errors out (at the cap) when the brackets chase the same root.
pub fn separate(b1: &mut RootBracket, b2: &mut RootBracket) -> Result<std::cmp::Ordering, RealRootsError> {
    if let (Some(r1), Some(r2)) = (&b1.exact, &b2.exact) {
        return Ok(r1.cmp(r2));
    }
    for _ in 0..REFINE_CAP {
        if b1.hi < b2.lo {
            return Ok(std::cmp::Ordering::Less);
        }
        if b2.hi < b1.lo {
            return Ok(std::cmp::Ordering::Greater);
        }
        b1.refine();
        b2.refine();
        if let (Some(r1), Some(r2)) = (&b1.exact, &b2.exact) {
            return Ok(r1.cmp(r2));
        }
    }
    Err(RealRootsError::RefinementCap)
}

/// Sturm chain `p, p', -rem(...), ...` with all scalings by positive
/// rationals, so sign patterns match the monic rational chain exactly.
/// Root counts are exact when `p` is squarefree.
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &IntPoly) -> SturmChain {
        assert!(!p.is_zero(), "Sturm chain of the zero polynomial");
        let p0 = p.primitive_part();
        let mut chain = vec![p0.clone()];
        if p0.deg() >= 1 {
            chain.push(p0.derivative().primitive_part());
            loop {
                let n = chain.len();
                let r = pseudo_rem_positive(&chain[n - 2], &chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push((-&r).primitive_part());
            }
        }
        SturmChain { chain }
    }

    /// Sign variations at `x`, ignoring zeros.
    pub fn variations_at(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut last = 0i32;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(c, d]`
    /// (exact for squarefree `p`).
    pub fn count_in_half_open(&self, c: &Rat, d: &Rat) -> usize {
        if c >= d {
            return 0;
        }
        let vc = self.variations_at(c);
        let vd = self.variations_at(d);
        debug_assert!(vc >= vd);
        vc.saturating_sub(vd)
    }
}

/// Distinct real roots of `p` in `(c, d]`, via the Sturm chain of the
/// squarefree part.
pub fn sturm_count(p: &IntPoly, c: &Rat, d: &Rat) -> usize {
    assert!(!p.is_zero());
    SturmChain::new(&squarefree_part(p)).count_in_half_open(c, d)
}

/// Largest `e` with `(x^2 - 6x + 1)^e` dividing `p`, plus the quotient.
pub fn strip_endpoint_factor(p: &IntPoly) -> (usize, IntPoly) {
    let ep = endpoint_poly();
    let mut e = 0;
    let mut cur = p.clone();
    while cur.deg() >= 2 {
        let (q, r) = cur.div_rem_monic(&ep);
        if r.is_zero() {
            cur = q;
            e += 1;
        } else {
            break;
        }
    }
    (e, cur)
}

/// Outcome of the interval membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootReport {
    /// All complex roots are real and lie in `[3 - 2*sqrt(2), 3 + 2*sqrt(2)]`.
    pub all_in: bool,
    /// `p` is squarefree (all roots simple).
    pub distinct: bool,
    /// Multiplicity of the endpoint factor `x^2 - 6x + 1` in `p`.
    pub endpoint_multiplicity: usize,
    /// Distinct roots strictly between the endpoints.
    pub interior_count: usize,
}

/// Decides exactly whether every root of `p` lies in the closed interval
/// `[3 - 2*sqrt(2), 3 + 2*sqrt(2)]`, and whether the roots are distinct.
///
/// The endpoint factor is stripped first (its roots are the endpoints
/// themselves), then the endpoint brackets are shrunk until they contain no
/// root of the remainder, which makes the interior Sturm count over the
/// rational bracket gap exact for the irrational interval.
pub fn verify_roots_in_ab(p: &IntPoly) -> Result<RootReport, RealRootsError> {
    if p.is_zero() {
        return Err(RealRootsError::PreconditionViolated(
            "zero polynomial has no root locus".into(),
        ));
    }
    let (e, stripped) = strip_endpoint_factor(p);
    let sf = squarefree_part(&stripped);
    let distinct = e <= 1
        && (stripped.deg() == 0 || poly_gcd(&stripped, &stripped.derivative()).deg() == 0);
    if sf.deg() == 0 {
        return Ok(RootReport {
            all_in: true,
            distinct,
            endpoint_multiplicity: e,
            interior_count: 0,
        });
    }
    let chain = SturmChain::new(&sf);
    let mut ba = bracket_endpoint_a();
    let mut bb = bracket_endpoint_b();
    let mut settled = false;
    for _ in 0..REFINE_CAP {
        if chain.count_in_half_open(&ba.lo, &ba.hi) == 0
            && chain.count_in_half_open(&bb.lo, &bb.hi) == 0
        {
            settled = true;
            break;
        }
        ba.refine();
        bb.refine();
    }
    if !settled {
        return Err(RealRootsError::RefinementCap);
    }
    let interior = chain.count_in_half_open(&ba.hi, &bb.lo);
    Ok(RootReport {
        all_in: interior == sf.deg(),
        distinct,
        endpoint_multiplicity: e,
        interior_count: interior,
    })
}

fn deflate(p: &IntPoly, root: &Rat) -> IntPoly {
    let lin = IntPoly::new(vec![-root.numer().clone(), root.denom().clone()]);
    p.exact_div(&lin)
        .expect("a rational root certified by a zero sign yields an exact linear factor")
}

/// Isolates the distinct real roots of a squarefree `p` inside `(lo0, hi0]`:
/// one bracket per root, pairwise disjoint, sorted by position. Rational
/// roots encountered during bisection are recorded exactly.
pub fn isolate_in_interval(
    p: &IntPoly,
    lo0: &Rat,
    hi0: &Rat,
) -> Result<Vec<RootBracket>, RealRootsError> {
    if p.is_zero() {
        return Err(RealRootsError::PreconditionViolated(
            "cannot isolate roots of the zero polynomial".into(),
        ));
    }
    debug_assert_eq!(poly_gcd(p, &p.derivative()).deg(), 0, "input must be squarefree");
    let mut work = p.primitive_part();
    let mut exact_roots: Vec<Rat> = Vec::new();
    let mut brackets: Vec<RootBracket> = Vec::new();
    let mut restarts = 0usize;
    'restart: loop {
        restarts += 1;
        if restarts > 2 + p.deg() {
            return Err(RealRootsError::RefinementCap);
        }
        brackets.clear();
        if work.deg() == 0 {
            break;
        }
        let chain = SturmChain::new(&work);
        let total = chain.count_in_half_open(lo0, hi0);
        let mut stack = vec![(lo0.clone(), hi0.clone(), total)];
        let mut nodes = 0usize;
        while let Some((lo, hi, cnt)) = stack.pop() {
            nodes += 1;
            if nodes > NODE_CAP {
                return Err(RealRootsError::RefinementCap);
            }
            if cnt == 0 {
                continue;
            }
            if work.sign_at(&hi) == 0 {
                // `hi` is itself a rational root; peel it off and restart
                // the sweep on the deflated polynomial.
                exact_roots.push(hi.clone());
                work = deflate(&work, &hi);
                continue 'restart;
            }
            if cnt == 1 {
                let slo = work.sign_at(&lo);
                if slo != 0 && slo != work.sign_at(&hi) {
                    brackets.push(RootBracket {
                        lo,
                        hi,
                        exact: None,
                        witness: work.clone(),
                    });
                    continue;
                }
                // `lo` sits on a root that belongs to a neighbouring
                // interval; split once more to get clean signs.
            }
            let mid = midpoint(&lo, &hi);
            if work.sign_at(&mid) == 0 {
                exact_roots.push(mid.clone());
                work = deflate(&work, &mid);
                continue 'restart;
            }
            let cl = chain.count_in_half_open(&lo, &mid);
            stack.push((lo, mid.clone(), cl));
            stack.push((mid, hi, cnt - cl));
        }
        break;
    }
    for r in exact_roots {
        brackets.push(RootBracket::new_exact(r));
    }
    repair_disjoint(&mut brackets)?;
    Ok(brackets)
}

/// Shrinks brackets until they are pairwise strictly disjoint, then sorts
/// them by position.
fn repair_disjoint(brackets: &mut [RootBracket]) -> Result<(), RealRootsError> {
    for _ in 0..REFINE_CAP {
        brackets.sort_by(|x, y| x.lo.cmp(&y.lo).then_with(|| x.hi.cmp(&y.hi)));
        let mut clean = true;
        for i in 0..brackets.len().saturating_sub(1) {
            if brackets[i].hi >= brackets[i + 1].lo {
                let (left, right) = brackets.split_at_mut(i + 1);
                left[i].refine();
                right[0].refine();
                clean = false;
            }
        }
        if clean {
            return Ok(());
        }
    }
    Err(RealRootsError::RefinementCap)
}

/// Extra refinement rounds applied to every bracket.
pub fn refine_root_brackets(brackets: &mut [RootBracket], steps: usize) {
    for b in brackets.iter_mut() {
        for _ in 0..steps {
            b.refine();
        }
    }
}

/// Isolating brackets for all roots of `p`, which must have all roots real,
/// distinct, and inside the closed interval (checked; the endpoint factor
/// contributes brackets around the endpoints themselves).
pub fn isolate_roots(p: &IntPoly) -> Result<Vec<RootBracket>, RealRootsError> {
    let report = verify_roots_in_ab(p)?;
    if !(report.all_in && report.distinct) {
        return Err(RealRootsError::PreconditionViolated(format!(
            "root isolation needs distinct roots inside the interval, got {report:?}"
        )));
    }
    let (e, mut stripped) = strip_endpoint_factor(p);
    let (lo0, hi0) = outer_ab_bounds();
    let mut brackets = Vec::new();
    // The only integers inside the interval are 1..=5; peel integer roots
    // off exactly before the bisection sweep.
    for r in 1i64..=5 {
        if stripped.deg() >= 1 && stripped.eval(&BigInt::from(r)).is_zero() {
            brackets.push(RootBracket::new_exact(rat(r, 1)));
            stripped = deflate(&stripped, &rat(r, 1));
        }
    }
    if stripped.deg() >= 1 {
        brackets.extend(isolate_in_interval(&stripped, &lo0, &hi0)?);
    }
    if e == 1 {
        brackets.push(bracket_endpoint_a());
        brackets.push(bracket_endpoint_b());
    }
    repair_disjoint(&mut brackets)?;
    debug_assert_eq!(brackets.len(), p.deg());
    Ok(brackets)
}

type Interval = (Rat, Rat);

fn imul(a: &Interval, b: &Interval) -> Interval {
    let p1 = &a.0 * &b.0;
    let p2 = &a.0 * &b.1;
    let p3 = &a.1 * &b.0;
    let p4 = &a.1 * &b.1;
    let lo = p1.clone().min(p2.clone()).min(p3.clone()).min(p4.clone());
    let hi = p1.max(p2).max(p3).max(p4);
    (lo, hi)
}

fn iadd(a: &Interval, b: &Interval) -> Interval {
    (&a.0 + &b.0, &a.1 + &b.1)
}

/// Interval enclosure of the coefficients of `prod_{i in subset} (x - r_i)`,
/// ascending order, exact `[1, 1]` leading coefficient.
fn interval_product(brackets: &[RootBracket], subset: &[usize]) -> Vec<Interval> {
    let one = (rat(1, 1), rat(1, 1));
    let mut coeffs = vec![one];
    for &i in subset {
        let b = &brackets[i];
        let neg_root = (-&b.hi, -&b.lo);
        let mut next = Vec::with_capacity(coeffs.len() + 1);
        for t in 0..=coeffs.len() {
            let shifted = if t == 0 {
                (Rat::zero(), Rat::zero())
            } else {
                coeffs[t - 1].clone()
            };
            let scaled = if t == coeffs.len() {
                (Rat::zero(), Rat::zero())
            } else {
                imul(&coeffs[t], &neg_root)
            };
            next.push(iadd(&shifted, &scaled));
        }
        coeffs = next;
    }
    coeffs
}

/// All monic irreducible integer factors of `p` of degree at most `dmax`,
/// plus the cofactor `p` divided by their product.
#[derive(Clone, Debug)]
pub struct SmallFactorSplit {
    /// Canonically sorted: by degree, then lexicographically by ascending
    /// coefficients.
    pub factors: Vec<IntPoly>,
    pub cofactor: IntPoly,
}

struct SplitSearch<'a> {
    brackets: &'a [RootBracket],
    dmax: usize,
    p0_abs: BigInt,
    candidates: Vec<Vec<usize>>,
}

impl SplitSearch<'_> {
    /// The product of the chosen roots must enclose a nonzero integer
    /// dividing `p(0)`, because the constant term of any monic integer
    /// factor is such an integer (all roots here are positive).
    fn constant_plausible(&self, prod: &Interval) -> bool {
        let lo = ceil_int(&prod.0);
        let hi = floor_int(&prod.1);
        if lo > hi {
            return false;
        }
        if &hi - &lo >= BigInt::from(64) {
            // Too wide to enumerate cheaply; defer to the exact stage.
            return true;
        }
        let mut d = lo;
        while d <= hi {
            if d.is_positive() && (&self.p0_abs % &d).is_zero() {
                return true;
            }
            d += 1;
        }
        false
    }

    fn dfs(&mut self, i_next: usize, chosen: &mut Vec<usize>, prod: &Interval) {
        for i in i_next..self.brackets.len() {
            let b = &self.brackets[i];
            let prod2 = (&prod.0 * &b.lo, &prod.1 * &b.hi);
            chosen.push(i);
            if self.constant_plausible(&prod2) {
                self.candidates.push(chosen.clone());
            }
            if chosen.len() < self.dmax {
                self.dfs(i + 1, chosen, &prod2);
            }
            chosen.pop();
        }
    }
}

/// Snaps the interval enclosure of one root subset to an integer polynomial
/// and keeps it when it divides `p` exactly. Refines the subset's brackets
/// while any coefficient enclosure holds more than one integer.
fn resolve_subset(
    p: &IntPoly,
    brackets: &mut [RootBracket],
    subset: &[usize],
    found: &mut BTreeSet<Vec<BigInt>>,
) -> Result<(), RealRootsError> {
    for _ in 0..REFINE_CAP {
        let enclosure = interval_product(brackets, subset);
        let mut coeffs = Vec::with_capacity(enclosure.len());
        let mut ambiguous = false;
        for (lo, hi) in &enclosure {
            let c0 = ceil_int(lo);
            let c1 = floor_int(hi);
            if c0 > c1 {
                // Some coefficient is certainly not an integer: the subset
                // does not form an integer factor.
                return Ok(());
            }
            if c0 < c1 {
                ambiguous = true;
                break;
            }
            coeffs.push(c0);
        }
        if ambiguous {
            for &i in subset {
                brackets[i].refine();
            }
            continue;
        }
        let q = IntPoly::new(coeffs);
        debug_assert!(q.is_monic());
        let (_, rem) = p.div_rem_monic(&q);
        if rem.is_zero() {
            found.insert(q.coeffs().to_vec());
        }
        return Ok(());
    }
    Err(RealRootsError::RefinementCap)
}

/// Finds every monic irreducible integer factor of `p` with degree at most
/// `dmax`. `p` must be monic with all roots real, distinct, and inside the
/// closed interval (checked).
///
/// Completeness: a monic integer factor of degree `j <= dmax` vanishes on a
/// `j`-element subset of the isolated roots; that subset is enumerated, its
/// exact coefficients lie inside every interval enclosure, and once each
/// enclosure holds at most one integer the snap recovers the factor, which
/// exact division then certifies. Irreducibility of the reported factors
/// follows from completeness: a reducible candidate would be divisible by a
/// smaller-degree factor that the search also found.
pub fn small_factor_split(p: &IntPoly, dmax: usize) -> Result<SmallFactorSplit, RealRootsError> {
    if p.is_zero() || !p.is_monic() {
        return Err(RealRootsError::PreconditionViolated(
            "factor search needs a monic polynomial".into(),
        ));
    }
    if dmax == 0 || p.deg() == 0 {
        return Ok(SmallFactorSplit {
            factors: Vec::new(),
            cofactor: p.clone(),
        });
    }
    let mut brackets = isolate_roots(p)?;
    // Tight brackets make the constant-term filter sharp before any
    // interval products are formed.
    let target = rat(1, 1 << 24);
    for b in brackets.iter_mut() {
        let mut steps = 0;
        while b.width() > target && steps < 64 {
            b.refine();
            steps += 1;
        }
        if b.lo <= Rat::zero() {
            return Err(RealRootsError::PreconditionViolated(
                "isolated roots must be positive".into(),
            ));
        }
    }
    let p0_abs = p.constant_term().abs();
    debug_assert!(!p0_abs.is_zero(), "no root at zero inside the interval");
    let dmax = dmax.min(brackets.len());
    let mut search = SplitSearch {
        brackets: &brackets,
        dmax,
        p0_abs,
        candidates: Vec::new(),
    };
    let one = (rat(1, 1), rat(1, 1));
    search.dfs(0, &mut Vec::new(), &one);
    let candidates = std::mem::take(&mut search.candidates);
    let mut found: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for subset in &candidates {
        resolve_subset(p, &mut brackets, subset, &mut found)?;
    }
    let mut factors: Vec<IntPoly> = found.into_iter().map(IntPoly::new).collect();
    factors.sort_by(|a, b| {
        a.deg()
            .cmp(&b.deg())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    let irreducible: Vec<IntPoly> = factors
        .iter()
        .filter(|q| {
            !factors.iter().any(|g| {
                g.deg() >= 1 && g.deg() < q.deg() && q.div_rem_monic(g).1.is_zero()
            })
        })
        .cloned()
        .collect();
    let mut cofactor = p.clone();
    for q in &irreducible {
        let (quo, rem) = cofactor.div_rem_monic(q);
        if !rem.is_zero() {
            return Err(RealRootsError::PreconditionViolated(
                "internal: certified factor does not divide the cofactor".into(),
            ));
        }
        cofactor = quo;
    }
    Ok(SmallFactorSplit {
        factors: irreducible,
        cofactor,
    })
}
