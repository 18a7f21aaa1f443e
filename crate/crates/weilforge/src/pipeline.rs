//! End-to-end construction of certified Weil polynomials of prescribed
//! order: choose a digit representation of `m`, form the family combination
//! `P_n`, certify one irreducible factor `F` by an exact 2-adic argument,
//! strip the complementary small factors, and transform `F` into the
//! characteristic polynomial `R` of Frobenius. Every certificate carries
//! the full intermediate data and can be re-verified from scratch by exact
//! arithmetic alone.

use crate::discquality::{self, DiscQualityError, RepTable};
use crate::exactpoly::IntPoly;
use crate::family::{self, BinaryRep, Family, FamilyError, RepKind};
use crate::jsonint::JInt;
use crate::padic::{
    certify_tail_segment, eisenstein_shifted, f2_multiplicity_at_one, NewtonPolygon, PadicError,
    SegmentCert, SplitWitness, TailContext, TailKind, TailVerdict,
};
use crate::realroots::{small_factor_split, verify_roots_in_ab, RealRootsError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("order must be a positive integer, got {0}")]
    BadOrder(BigInt),
    #[error(
        "construction budget exhausted for m = {m}: {got} of {want} certificates within n <= {n_budget}"
    )]
    BudgetExhausted {
        m: BigInt,
        want: usize,
        got: usize,
        n_budget: usize,
        partial: Vec<WeilCertificate>,
        diagnostics: Vec<String>,
    },
    #[error("the isogeny class of x^2 - 2 is outside the image of this transform")]
    Exceptional,
    #[error("certificate format: {0}")]
    Format(String),
    #[error(transparent)]
    Disc(#[from] DiscQualityError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    RealRoots(#[from] RealRootsError),
    #[error("internal: {0}")]
    Internal(String),
}

/// `(-1)^deg p(0)`: the multiplicative contribution of a factor to the
/// prescribed order of the full polynomial.
pub fn order_value(p: &IntPoly) -> BigInt {
    let c = p.constant_term();
    if p.deg() % 2 == 1 {
        -c
    } else {
        c
    }
}

/// Frobenius data recovered from a polynomial with all roots in
/// `[3 - 2 sqrt(2), 3 + 2 sqrt(2)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilData {
    /// Trace-domain polynomial `(-1)^deg F(3 - x)`, roots in
    /// `[-2 sqrt(2), 2 sqrt(2)]`.
    pub q: IntPoly,
    /// `x^g Q(x + 2/x)`: the characteristic polynomial of Frobenius,
    /// degree `2g`, constant term `2^g`.
    pub r: IntPoly,
    /// `R(1)`, the number of rational points.
    pub order: BigInt,
    pub g: usize,
}

/// Maps a monic `F` (roots in the trace interval shifted by 3) to the Weil
/// polynomial `R` of an abelian variety of dimension `deg F` over the field
/// with two elements, with `R(1) = (-1)^deg F(0)`.
pub fn weil_transform(f: &IntPoly) -> Result<WeilData, PipelineError> {
    if f.is_zero() || f.deg() == 0 || !f.is_monic() {
        return Err(PipelineError::Internal(
            "the transform needs a monic polynomial of positive degree".into(),
        ));
    }
    let mut q = f.substitute_linear(-1, &BigInt::from(3));
    if f.deg() % 2 == 1 {
        q = -&q;
    }
    debug_assert!(q.is_monic());
    let g = q.deg();
    let x2p2 = IntPoly::from_i64(&[2, 0, 1]);
    let mut r = IntPoly::zero();
    let mut pw = IntPoly::one();
    for j in 0..=g {
        let c = q.coeff(j);
        if !c.is_zero() {
            r = &r + &pw.scale(&c).mul_xk(g - j);
        }
        pw = &pw * &x2p2;
    }
    if r == IntPoly::from_i64(&[-2, 0, 1]) {
        return Err(PipelineError::Exceptional);
    }
    // x |-> 2/x permutes the roots of R by construction.
    debug_assert!(functional_equation_holds(&r, g));
    debug_assert_eq!(r.constant_term(), BigInt::one() << g);
    let order = r.eval(&BigInt::one());
    Ok(WeilData { q, r, order, g })
}

/// Checks `2^i c_i = 2^g c_{2g-i}` for all `i`.
pub fn functional_equation_holds(r: &IntPoly, g: usize) -> bool {
    if r.deg() != 2 * g {
        return false;
    }
    (0..=2 * g).all(|i| (r.coeff(i) << i) == (r.coeff(2 * g - i) << g))
}

/// Which construction route produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Odd order: compliant representation, degree a power of two, and the
    /// shifted combination is Eisenstein.
    CompliantEisenstein,
    /// `v2(m)` odd: primitive final polygon segment.
    NafV2Odd,
    /// `v2(m) = 2`: primitive final segment or a mod-8 split witness.
    NafV2Two,
    /// `v2(m) >= 4`: modified digits, penultimate segment at ordinate 1.
    NafV2Ge4,
}

impl Construction {
    pub fn as_str(self) -> &'static str {
        match self {
            Construction::CompliantEisenstein => "compliant-eisenstein",
            Construction::NafV2Odd => "naf-v2-odd",
            Construction::NafV2Two => "naf-v2-2",
            Construction::NafV2Ge4 => "naf-v2-ge4",
        }
    }

    pub fn parse(s: &str) -> Option<Construction> {
        Some(match s {
            "compliant-eisenstein" => Construction::CompliantEisenstein,
            "naf-v2-odd" => Construction::NafV2Odd,
            "naf-v2-2" => Construction::NafV2Two,
            "naf-v2-ge4" => Construction::NafV2Ge4,
            _ => return None,
        })
    }

    fn tail_kind(self) -> Option<TailKind> {
        match self {
            Construction::CompliantEisenstein => None,
            Construction::NafV2Odd => Some(TailKind::NafV2Odd),
            Construction::NafV2Two => Some(TailKind::NafV2Two),
            Construction::NafV2Ge4 => Some(TailKind::NafV2Ge4),
        }
    }

    fn expected_rep_kind(self) -> RepKind {
        match self {
            Construction::CompliantEisenstein => RepKind::Compliant,
            Construction::NafV2Odd | Construction::NafV2Two => RepKind::Naf,
            Construction::NafV2Ge4 => RepKind::NafV2Ge4Variant,
        }
    }
}

/// Why `F` is irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    /// `F(x + 1)` satisfies the Eisenstein criterion at 2.
    EisensteinShift,
    /// A polygon segment forces one irreducible factor of degree at least
    /// `segment.bound`; removing every factor of degree up to
    /// `deg P_n - bound` leaves exactly that factor.
    NpSegment {
        vertices: Vec<(usize, u64)>,
        segment: SegmentCert,
    },
}

/// A fully re-checkable construction record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilCertificate {
    pub version: u32,
    pub m: BigInt,
    pub n: usize,
    pub construction: Construction,
    pub rep: BinaryRep,
    pub p_n: IntPoly,
    pub removed_factors: Vec<IntPoly>,
    pub f: IntPoly,
    pub irreducibility: Irreducibility,
    pub weil: WeilData,
}

impl WeilCertificate {
    /// One-line rendering of the headline result.
    pub fn summary_line(&self) -> String {
        format!(
            "m={} n={} g={} R(x) = {}",
            self.m, self.n, self.weil.g, self.weil.r
        )
    }
}

/// Construction tuning knobs.
#[derive(Clone, Debug)]
pub struct ConstructOptions {
    /// How many certificates (of distinct degree) to produce.
    pub count: usize,
    /// Largest family index `n` to try.
    pub n_budget: usize,
}

impl Default for ConstructOptions {
    fn default() -> ConstructOptions {
        ConstructOptions {
            count: 1,
            n_budget: 64,
        }
    }
}

/// Builds `count` certificates for order `m`, sorted by ascending degree of
/// the certified factor. The table is consulted only for odd `m` (where the
/// compliant representation comes from); even orders use binary digits
/// directly.
pub fn construct(
    m: &BigInt,
    table: &RepTable,
    opts: &ConstructOptions,
) -> Result<Vec<WeilCertificate>, PipelineError> {
    if !m.is_positive() {
        return Err(PipelineError::BadOrder(m.clone()));
    }
    if opts.count == 0 {
        return Ok(Vec::new());
    }
    let mut certs = if m.is_odd() {
        construct_odd(m, table, opts)?
    } else {
        construct_even(m, opts)?
    };
    certs.sort_by_key(|c| (c.f.deg(), c.n));
    Ok(certs)
}

/// Shared completion: exact runtime checks, then the transform. An `Err`
/// is a reason to advance to the next index, never a hard failure.
fn finish_certificate(
    m: &BigInt,
    n: usize,
    construction: Construction,
    rep: BinaryRep,
    p_n: IntPoly,
    removed_factors: Vec<IntPoly>,
    f: IntPoly,
    irreducibility: Irreducibility,
) -> Result<WeilCertificate, String> {
    for r in &removed_factors {
        let v = order_value(r);
        if !v.is_one() {
            return Err(format!(
                "removed factor {r} carries order {v}, so the certified factor was removed"
            ));
        }
    }
    if f.is_one() {
        return Err("every factor was removed; the degree bound failed here".into());
    }
    if &order_value(&f) != m {
        return Err(format!(
            "certified factor carries order {}, expected {m}",
            order_value(&f)
        ));
    }
    let mut prod = f.clone();
    for r in &removed_factors {
        prod = &prod * r;
    }
    if prod != p_n {
        return Err("removed factors and certified factor do not multiply back".into());
    }
    match verify_roots_in_ab(&f) {
        Ok(report) if report.all_in && report.distinct => {}
        Ok(report) => {
            return Err(format!(
                "certified factor fails the root-locus check: {report:?}"
            ))
        }
        Err(e) => return Err(format!("root-locus check failed: {e}")),
    }
    let weil = match weil_transform(&f) {
        Ok(w) => w,
        Err(e) => return Err(format!("transform failed: {e}")),
    };
    if &weil.order != m {
        return Err(format!(
            "transform yields order {}, expected {m}",
            weil.order
        ));
    }
    Ok(WeilCertificate {
        version: 1,
        m: m.clone(),
        n,
        construction,
        rep,
        p_n,
        removed_factors,
        f,
        irreducibility,
        weil,
    })
}

fn construct_odd(
    m: &BigInt,
    table: &RepTable,
    opts: &ConstructOptions,
) -> Result<Vec<WeilCertificate>, PipelineError> {
    let entry = discquality::compliant_rep(m, table)?;
    let mut q = entry.rep;
    if q.deg() % 2 == 1 {
        // Multiplying by z - 1 keeps the value at 2, the parity pattern,
        // and the root locus, and makes the degree even.
        q = &q * &IntPoly::from_i64(&[-1, 1]);
    }
    let rep = BinaryRep {
        m: m.clone(),
        digits: q.coeffs().to_vec(),
        kind: RepKind::Compliant,
    };
    rep.validate()?;
    let half = rep.k() / 2;
    let mut fam = Family::new();
    let mut certs = Vec::new();
    let mut diagnostics = Vec::new();
    let mut j = 0usize;
    while (1usize << j) < half + 1 {
        j += 1;
    }
    loop {
        let n = (1usize << j) - half;
        if n > opts.n_budget || certs.len() >= opts.count {
            break;
        }
        let p_n = fam.signed_combination(&rep, n)?;
        if eisenstein_shifted(&p_n) {
            match finish_certificate(
                m,
                n,
                Construction::CompliantEisenstein,
                rep.clone(),
                p_n.clone(),
                Vec::new(),
                p_n,
                Irreducibility::EisensteinShift,
            ) {
                Ok(c) => certs.push(c),
                Err(r) => diagnostics.push(format!("n = {n}: {r}")),
            }
        } else {
            diagnostics.push(format!("n = {n}: shifted combination is not Eisenstein"));
        }
        j += 1;
    }
    if certs.len() < opts.count {
        return Err(PipelineError::BudgetExhausted {
            m: m.clone(),
            want: opts.count,
            got: certs.len(),
            n_budget: opts.n_budget,
            partial: certs,
            diagnostics,
        });
    }
    Ok(certs)
}

fn construct_even(
    m: &BigInt,
    opts: &ConstructOptions,
) -> Result<Vec<WeilCertificate>, PipelineError> {
    let v = crate::padic::v2(m)?;
    debug_assert!(v >= 1);
    let (kind, construction, rep) = if v % 2 == 1 {
        (TailKind::NafV2Odd, Construction::NafV2Odd, family::naf(m))
    } else if v == 2 {
        (TailKind::NafV2Two, Construction::NafV2Two, family::naf(m))
    } else {
        (
            TailKind::NafV2Ge4,
            Construction::NafV2Ge4,
            family::variant_rep(m)?,
        )
    };
    let d_mod2 = f2_multiplicity_at_one(&rep.digits);
    let k = rep.k();
    let mut fam = Family::new();
    let mut certs = Vec::new();
    let mut diagnostics = Vec::new();
    for n in 1..=opts.n_budget {
        if certs.len() >= opts.count {
            break;
        }
        let p_n = fam.signed_combination(&rep, n)?;
        let np = NewtonPolygon::new(&p_n)?;
        let ctx = TailContext {
            kind,
            m: m.clone(),
            n,
            k,
            d_mod2,
        };
        let segment = match certify_tail_segment(&p_n, &np, &ctx) {
            TailVerdict::Certified(c) => c,
            TailVerdict::Advance(r) => {
                diagnostics.push(format!("n = {n}: {r}"));
                continue;
            }
        };
        let dmax = p_n.deg() - segment.bound;
        let split = match small_factor_split(&p_n, dmax) {
            Ok(s) => s,
            Err(e) => {
                diagnostics.push(format!("n = {n}: factor search failed: {e}"));
                continue;
            }
        };
        match finish_certificate(
            m,
            n,
            construction,
            rep.clone(),
            p_n,
            split.factors,
            split.cofactor,
            Irreducibility::NpSegment {
                vertices: np.vertices.clone(),
                segment,
            },
        ) {
            Ok(c) => certs.push(c),
            Err(r) => diagnostics.push(format!("n = {n}: {r}")),
        }
    }
    if certs.len() < opts.count {
        return Err(PipelineError::BudgetExhausted {
            m: m.clone(),
            want: opts.count,
            got: certs.len(),
            n_budget: opts.n_budget,
            partial: certs,
            diagnostics,
        });
    }
    Ok(certs)
}

/// Re-derives every claim in the certificate by exact arithmetic. Returns
/// whether it verifies and the list of failed checks.
pub fn verify_certificate(cert: &WeilCertificate) -> (bool, Vec<String>) {
    let mut reasons: Vec<String> = Vec::new();

    if cert.version != 1 {
        reasons.push(format!("unsupported version {}", cert.version));
    }
    if let Err(e) = cert.rep.validate() {
        reasons.push(format!("representation invalid: {e}"));
    }
    if cert.rep.m != cert.m {
        reasons.push("representation value differs from m".into());
    }
    if cert.rep.kind != cert.construction.expected_rep_kind() {
        reasons.push(format!(
            "construction {} does not use {} digits",
            cert.construction.as_str(),
            cert.rep.kind.as_str()
        ));
    }

    let mut fam = Family::new();
    match fam.signed_combination(&cert.rep, cert.n) {
        Ok(p) => {
            if p != cert.p_n {
                reasons.push("stated P_n differs from the recomputed combination".into());
            }
        }
        Err(e) => reasons.push(format!("combination failed: {e}")),
    }

    let mut prod = cert.f.clone();
    for r in &cert.removed_factors {
        prod = &prod * r;
    }
    if prod != cert.p_n {
        reasons.push("removed factors times F do not multiply back to P_n".into());
    }
    for r in &cert.removed_factors {
        if !order_value(r).is_one() {
            reasons.push(format!("removed factor {r} carries a nontrivial order"));
        }
    }
    if cert.f.is_one() {
        reasons.push("certified factor is trivial".into());
    }
    if order_value(&cert.f) != cert.m {
        reasons.push("certified factor does not carry order m".into());
    }

    match &cert.irreducibility {
        Irreducibility::EisensteinShift => {
            if cert.construction != Construction::CompliantEisenstein {
                reasons.push("eisenstein evidence under a segment construction".into());
            }
            if !cert.removed_factors.is_empty() {
                reasons.push("eisenstein route must not remove factors".into());
            }
            if !eisenstein_shifted(&cert.f) {
                reasons.push("shifted F is not Eisenstein".into());
            }
        }
        Irreducibility::NpSegment { vertices, segment } => {
            match NewtonPolygon::new(&cert.p_n) {
                Ok(np) => {
                    if &np.vertices != vertices {
                        reasons.push("stated polygon differs from the recomputed one".into());
                    }
                    match cert.construction.tail_kind() {
                        None => reasons.push(
                            "segment evidence under the eisenstein construction".into(),
                        ),
                        Some(kind) => {
                            let ctx = TailContext {
                                kind,
                                m: cert.m.clone(),
                                n: cert.n,
                                k: cert.rep.k(),
                                d_mod2: f2_multiplicity_at_one(&cert.rep.digits),
                            };
                            match certify_tail_segment(&cert.p_n, &np, &ctx) {
                                TailVerdict::Certified(c) => {
                                    if &c != segment {
                                        reasons.push(
                                            "stated segment differs from the recomputed one"
                                                .into(),
                                        );
                                    }
                                }
                                TailVerdict::Advance(r) => {
                                    reasons.push(format!("segment does not certify: {r}"))
                                }
                            }
                        }
                    }
                    let dmax = cert.p_n.deg().saturating_sub(segment.bound);
                    for r in &cert.removed_factors {
                        if r.deg() > dmax {
                            reasons.push(format!(
                                "removed factor {r} exceeds the residual degree bound {dmax}"
                            ));
                        }
                    }
                    match small_factor_split(&cert.p_n, dmax) {
                        Ok(split) => {
                            if split.factors != cert.removed_factors {
                                reasons.push(
                                    "recomputed small-factor set differs from the stated one"
                                        .into(),
                                );
                            }
                            if split.cofactor != cert.f {
                                reasons.push("recomputed cofactor differs from F".into());
                            }
                        }
                        Err(e) => reasons.push(format!("factor search failed: {e}")),
                    }
                }
                Err(e) => reasons.push(format!("polygon rebuild failed: {e}")),
            }
        }
    }

    match verify_roots_in_ab(&cert.f) {
        Ok(report) => {
            if !(report.all_in && report.distinct) {
                reasons.push(format!("root locus check failed: {report:?}"));
            }
        }
        Err(e) => reasons.push(format!("root locus check errored: {e}")),
    }

    match weil_transform(&cert.f) {
        Ok(w) => {
            if w != cert.weil {
                reasons.push("stated transform data differs from the recomputed one".into());
            }
        }
        Err(e) => reasons.push(format!("transform failed: {e}")),
    }
    if !functional_equation_holds(&cert.weil.r, cert.weil.g) {
        reasons.push("functional equation fails for the stated R".into());
    }
    if cert.weil.order != cert.m {
        reasons.push("stated order differs from m".into());
    }

    (reasons.is_empty(), reasons)
}

fn poly_to_jints(p: &IntPoly) -> Vec<JInt> {
    p.coeffs().iter().cloned().map(JInt).collect()
}

fn jints_to_poly(v: Vec<JInt>) -> IntPoly {
    IntPoly::new(v.into_iter().map(|j| j.0).collect())
}

#[derive(Serialize, Deserialize)]
struct RepDto {
    kind: String,
    coeffs: Vec<JInt>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
struct SplitDto {
    coeff_index: usize,
    coeff_mod8: u8,
    forced_mod8: u8,
    m_mod16: u8,
}

#[derive(Serialize, Deserialize)]
struct IrredDto {
    kind: String,
    np_vertices: Vec<(usize, u64)>,
    segment: (usize, u64, usize, u64),
    residual_bound: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    split_witness: Option<SplitDto>,
}

#[derive(Serialize, Deserialize)]
struct WeilDto {
    #[serde(rename = "Q")]
    q: Vec<JInt>,
    #[serde(rename = "R")]
    r: Vec<JInt>,
    order: JInt,
    g: usize,
}

#[derive(Serialize, Deserialize)]
struct CertDto {
    version: u32,
    m: JInt,
    n: usize,
    construction: String,
    rep: RepDto,
    #[serde(rename = "P_n")]
    p_n: Vec<JInt>,
    removed_factors: Vec<Vec<JInt>>,
    #[serde(rename = "F")]
    f: Vec<JInt>,
    irreducibility: IrredDto,
    weil: WeilDto,
}

/// Compact single-line JSON encoding of a certificate.
pub fn certificate_to_json(cert: &WeilCertificate) -> String {
    let irred = match &cert.irreducibility {
        Irreducibility::EisensteinShift => {
            let d = cert.f.deg();
            IrredDto {
                kind: "eisenstein-shift".into(),
                np_vertices: vec![(0, 0), (d, 1)],
                segment: (0, 0, d, 1),
                residual_bound: 0,
                split_witness: None,
            }
        }
        Irreducibility::NpSegment { vertices, segment } => IrredDto {
            kind: "np-segment".into(),
            np_vertices: vertices.clone(),
            segment: (segment.x0, segment.y0, segment.x1, segment.y1),
            residual_bound: cert.p_n.deg() - segment.bound,
            split_witness: segment.split_witness.as_ref().map(|w| SplitDto {
                coeff_index: w.coeff_index,
                coeff_mod8: w.coeff_mod8,
                forced_mod8: w.forced_mod8,
                m_mod16: w.m_mod16,
            }),
        },
    };
    let dto = CertDto {
        version: cert.version,
        m: JInt(cert.m.clone()),
        n: cert.n,
        construction: cert.construction.as_str().into(),
        rep: RepDto {
            kind: cert.rep.kind.as_str().into(),
            coeffs: cert.rep.digits.iter().cloned().map(JInt).collect(),
            k: cert.rep.k(),
        },
        p_n: poly_to_jints(&cert.p_n),
        removed_factors: cert.removed_factors.iter().map(poly_to_jints).collect(),
        f: poly_to_jints(&cert.f),
        irreducibility: irred,
        weil: WeilDto {
            q: poly_to_jints(&cert.weil.q),
            r: poly_to_jints(&cert.weil.r),
            order: JInt(cert.weil.order.clone()),
            g: cert.weil.g,
        },
    };
    serde_json::to_string(&dto).expect("certificate serialization cannot fail")
}

/// JSON array of certificates, compact, element encoding identical to
/// `certificate_to_json`.
pub fn certificates_to_json_array(certs: &[WeilCertificate]) -> String {
    let items: Vec<String> = certs.iter().map(certificate_to_json).collect();
    format!("[{}]", items.join(","))
}

/// Parses a certificate back from its JSON encoding. Structural errors are
/// reported here; semantic validity is the job of `verify_certificate`.
pub fn certificate_from_json(text: &str) -> Result<WeilCertificate, PipelineError> {
    let dto: CertDto =
        serde_json::from_str(text).map_err(|e| PipelineError::Format(e.to_string()))?;
    cert_from_dto(dto)
}

/// Parses an array of certificates (the construction command's JSON shape).
pub fn certificates_from_json_array(text: &str) -> Result<Vec<WeilCertificate>, PipelineError> {
    let dtos: Vec<CertDto> =
        serde_json::from_str(text).map_err(|e| PipelineError::Format(e.to_string()))?;
    dtos.into_iter().map(cert_from_dto).collect()
}

fn cert_from_dto(dto: CertDto) -> Result<WeilCertificate, PipelineError> {
    let construction = Construction::parse(&dto.construction)
        .ok_or_else(|| PipelineError::Format(format!("unknown construction {:?}", dto.construction)))?;
    let rep_kind = RepKind::parse(&dto.rep.kind)
        .ok_or_else(|| PipelineError::Format(format!("unknown rep kind {:?}", dto.rep.kind)))?;
    let digits: Vec<BigInt> = dto.rep.coeffs.into_iter().map(|j| j.0).collect();
    if digits.len() != dto.rep.k + 1 {
        return Err(PipelineError::Format(
            "rep digit count disagrees with k".into(),
        ));
    }
    let p_n = jints_to_poly(dto.p_n);
    let irreducibility = match dto.irreducibility.kind.as_str() {
        "eisenstein-shift" => Irreducibility::EisensteinShift,
        "np-segment" => {
            let (x0, y0, x1, y1) = dto.irreducibility.segment;
            if dto.irreducibility.residual_bound > p_n.deg() {
                return Err(PipelineError::Format("residual bound exceeds degree".into()));
            }
            Irreducibility::NpSegment {
                vertices: dto.irreducibility.np_vertices,
                segment: SegmentCert {
                    x0,
                    y0,
                    x1,
                    y1,
                    bound: p_n.deg() - dto.irreducibility.residual_bound,
                    split_witness: dto.irreducibility.split_witness.map(|w| SplitWitness {
                        coeff_index: w.coeff_index,
                        coeff_mod8: w.coeff_mod8,
                        forced_mod8: w.forced_mod8,
                        m_mod16: w.m_mod16,
                    }),
                },
            }
        }
        other => {
            return Err(PipelineError::Format(format!(
                "unknown irreducibility kind {other:?}"
            )))
        }
    };
    Ok(WeilCertificate {
        version: dto.version,
        m: dto.m.0.clone(),
        n: dto.n,
        construction,
        rep: BinaryRep {
            m: dto.m.0,
            digits,
            kind: rep_kind,
        },
        p_n,
        removed_factors: dto.removed_factors.into_iter().map(jints_to_poly).collect(),
        f: jints_to_poly(dto.f),
        irreducibility,
        weil: WeilData {
            q: jints_to_poly(dto.weil.q),
            r: jints_to_poly(dto.weil.r),
            order: dto.weil.order.0,
            g: dto.weil.g,
        },
    })
}
