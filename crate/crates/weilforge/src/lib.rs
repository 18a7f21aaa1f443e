//! Construction and certification of Weil polynomials over F2 with a
//! prescribed order.
//!
//! For a positive integer `m`, the library produces monic integer
//! polynomials `R(x)` of degree `2g` whose roots all have absolute value
//! `sqrt(2)`, with `R(1) = m`, together with a certificate that `R` is the
//! characteristic polynomial of Frobenius of a *simple* abelian variety
//! over F2 of order `m`. Every certificate can be re-verified from raw
//! coefficients by exact arithmetic: no step of the verification trusts
//! floating point or the construction search.
//!
//! The construction works on the real side of the problem. A monic
//! irreducible `P` with all roots in `[3 - 2*sqrt(2), 3 + 2*sqrt(2)]` maps
//! to a Weil polynomial via `Q(x) = (-1)^(deg P) P(3 - x)` and
//! `R(x) = x^(deg P) Q(x + 2/x)`, with order `(-1)^(deg P) P(0) = R(1)`.
//! Candidate `P` come from a two-parameter family of recurrent polynomials
//! driven by signed binary digit expansions of `m`; irreducibility is
//! certified either by an Eisenstein criterion after the shift `x -> x+1`
//! (odd `m`) or by a 2-adic Newton polygon segment plus exhaustive removal
//! of small rational factors (even `m`).

pub mod cli;
pub mod discquality;
pub mod exactpoly;
pub mod family;
mod jsonint;
pub mod padic;
pub mod pipeline;
pub mod realroots;
