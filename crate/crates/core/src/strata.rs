//! Decorated boundary strata, the map from piecewise polynomials to strata
//! classes, and exact intersection numbers in genus at most one.
//!
//! A stratum class is the pushforward of a ψ-monomial along the gluing map of a
//! dual graph, without dividing by automorphisms; the factor `1/|Aut|` enters
//! only through [`alpha_star`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use itertools::Itertools;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{ComplexKind, ConeComplex, RayLabel};
use crate::dualgraph::{automorphisms, canonical_labeling, local_moves, DualGraph, GraphJson};
use crate::error::{Error, Result};
use crate::plmap::ModuliPair;
use crate::pwpoly::{phi_ray, PiecewisePoly};
use crate::rational::{binomial, factorial, int, to_display_string, to_fraction_string, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Stable,
    Pseudostable,
}

/// A dual graph with a ψ-exponent on each half-edge, kept as the smallest
/// representative of its orbit under automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedStratum {
    graph: DualGraph,
    decorations: Vec<u32>,
}

impl DecoratedStratum {
    pub fn new(graph: &DualGraph, decorations: Vec<u32>) -> Result<Self> {
        if decorations.len() != graph.num_half_edges() {
            return Err(Error::InvalidGraph(format!(
                "expected {} half-edge decorations, got {}",
                graph.num_half_edges(),
                decorations.len()
            )));
        }
        let (canon, lab) = canonical_labeling(graph);
        let mut moved = vec![0; decorations.len()];
        for (h, &d) in decorations.iter().enumerate() {
            moved[lab.half_edge_map[h]] = d;
        }
        let best = automorphisms(&canon)
            .half_edge_perms()
            .iter()
            .map(|perm| {
                let mut v = vec![0; moved.len()];
                for (h, &d) in moved.iter().enumerate() {
                    v[perm[h]] = d;
                }
                v
            })
            .min()
            .unwrap_or(moved);
        Ok(DecoratedStratum { graph: canon, decorations: best })
    }

    pub fn undecorated(graph: &DualGraph) -> Self {
        DecoratedStratum::new(graph, vec![0; graph.num_half_edges()]).expect("lengths agree")
    }

    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn decorations(&self) -> &[u32] {
        &self.decorations
    }

    /// Codimension: one per edge plus the ψ-degree.
    pub fn degree(&self) -> u32 {
        self.graph.num_edges() as u32 + self.decorations.iter().sum::<u32>()
    }

    /// Product over vertices of the ψ-integrals on the vertex moduli spaces.
    pub fn evaluate(&self) -> Result<Rational> {
        let mut acc = Rational::one();
        for v in 0..self.graph.num_vertices() {
            let mut exps: Vec<u32> =
                self.graph.half_edges_at(v).into_iter().map(|h| self.decorations[h]).collect();
            exps.extend(std::iter::repeat_n(0, self.graph.legs_at(v).len()));
            acc *= correlator(&CorrelatorKey::new(self.graph.vertex_genus(v), exps)?)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for DecoratedStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.graph;
        write!(
            f,
            "[genera {:?}; edges {}; legs {:?}]",
            g.genera(),
            g.edges().iter().map(|(a, b)| format!("{a}-{b}")).join(","),
            g.legs()
        )?;
        for (h, &d) in self.decorations.iter().enumerate() {
            if d > 0 {
                write!(f, " psi{h}")?;
                if d > 1 {
                    write!(f, "^{d}")?;
                }
            }
        }
        Ok(())
    }
}

/// Formal combination of decorated strata on one side, plus a multiple of the
/// point class of the cuspidal locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataExpr {
    genus: u32,
    n: usize,
    side: Side,
    /// Produced by pushing forward from the stable side; such expressions can be
    /// evaluated term by term.
    transported: bool,
    terms: BTreeMap<DecoratedStratum, Rational>,
    cusp: Rational,
}

impl StrataExpr {
    pub fn zero(genus: u32, n: usize, side: Side) -> Self {
        StrataExpr { genus, n, side, transported: side == Side::Stable, terms: BTreeMap::new(), cusp: Rational::zero() }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_legs(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedStratum, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &DecoratedStratum) -> Rational {
        self.terms.get(s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn cusp(&self) -> &Rational {
        &self.cusp
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.cusp.is_zero()
    }

    pub fn add_term(&mut self, s: DecoratedStratum, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(s.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add_cusp(&mut self, c: Rational) {
        self.cusp += c;
    }

    pub fn try_add(&self, other: &StrataExpr) -> Result<StrataExpr> {
        if (self.genus, self.n, self.side) != (other.genus, other.n, other.side) {
            return Err(Error::ComplexMismatch);
        }
        let mut out = self.clone();
        out.transported = self.transported && other.transported;
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        out.cusp += &other.cusp;
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> StrataExpr {
        let mut out = StrataExpr { terms: BTreeMap::new(), cusp: &self.cusp * c, ..self.clone() };
        for (s, k) in &self.terms {
            out.add_term(s.clone(), k * c);
        }
        out
    }

    /// Term-by-term degree of the cycle, ignoring where it lives. Correct on the
    /// stable side; on the pseudostable side only for transported expressions.
    pub fn integrate_termwise(&self) -> Result<Rational> {
        if self.genus >= 2 {
            return Err(Error::UnsupportedGenus(self.genus));
        }
        let top = 3 * self.genus + self.n as u32 - 3;
        let mut acc = self.cusp.clone();
        for (s, c) in &self.terms {
            if s.degree() != top {
                return Err(Error::WrongDegree { found: s.degree(), expected: top });
            }
            acc += c * s.evaluate()?;
        }
        Ok(acc)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(s, c)| TermJson {
                graph: GraphJson::from(&s.graph),
                decorations: s
                    .decorations
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d > 0)
                    .map(|(h, &d)| DecorationJson { half_edge: h, exponent: d })
                    .collect(),
                coeff: to_fraction_string(c),
            })
            .collect();
        let mut v = serde_json::json!({ "side": self.side, "terms": terms });
        if !self.cusp.is_zero() {
            v["cusp"] = serde_json::Value::String(to_fraction_string(&self.cusp));
        }
        v
    }
}

impl fmt::Display for StrataExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("{} * {}", to_display_string(c), s)).collect();
        if !self.cusp.is_zero() {
            parts.push(format!("{} * [cusp]", to_display_string(&self.cusp)));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecorationJson {
    pub half_edge: usize,
    pub exponent: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub graph: GraphJson,
    pub decorations: Vec<DecorationJson>,
    pub coeff: String,
}

/// ψ-integral `<τ_{a_1} ... τ_{a_k}>_g` on a single vertex moduli space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorrelatorKey {
    genus: u32,
    exponents: Vec<u32>,
}

impl CorrelatorKey {
    pub fn new(genus: u32, mut exponents: Vec<u32>) -> Result<Self> {
        if genus >= 2 {
            return Err(Error::UnsupportedGenus(genus));
        }
        let min = if genus == 0 { 3 } else { 1 };
        if exponents.len() < min {
            return Err(Error::InvalidGraph(format!("genus {genus} needs at least {min} insertions")));
        }
        exponents.sort_unstable();
        Ok(CorrelatorKey { genus, exponents })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }
}

fn cache() -> &'static Mutex<HashMap<CorrelatorKey, Rational>> {
    static CACHE: OnceLock<Mutex<HashMap<CorrelatorKey, Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn correlator(key: &CorrelatorKey) -> Result<Rational> {
    if let Some(v) = cache().lock().expect("cache lock").get(key) {
        return Ok(v.clone());
    }
    let value = compute_correlator(key.genus, &key.exponents);
    cache().lock().expect("cache lock").insert(key.clone(), value.clone());
    Ok(value)
}

fn compute_correlator(genus: u32, a: &[u32]) -> Rational {
    let n = a.len() as u32;
    let dim = 3 * genus + n - 3;
    if a.iter().sum::<u32>() != dim {
        return Rational::zero();
    }
    if genus == 0 {
        let denom = a.iter().fold(num::BigInt::one(), |acc, &x| acc * factorial(x));
        return Rational::new(factorial(n - 3), denom);
    }
    // genus one: string and dilaton down to <τ_1> = 1/24
    if a == [1] {
        return Rational::new(1.into(), 24.into());
    }
    if let Some(i) = a.iter().position(|&x| x == 0) {
        let rest: Vec<u32> = a.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        let mut acc = Rational::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut b = rest.clone();
                b[j] -= 1;
                b.sort_unstable();
                acc += compute_correlator(1, &b);
            }
        }
        return acc;
    }
    let i = a.iter().position(|&x| x == 1).expect("dimension forces an exponent below two");
    let rest: Vec<u32> = a.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
    int(rest.len() as i64) * compute_correlator(1, &rest)
}

fn side_of(c: &ConeComplex) -> Result<Side> {
    match c.kind() {
        ComplexKind::Stable => Ok(Side::Stable),
        ComplexKind::Pseudostable => Ok(Side::Pseudostable),
        ComplexKind::Weighted(_) => Err(Error::ComplexMismatch),
    }
}

/// Strata class of a piecewise polynomial: each strictly supported piece
/// `c ∏ x_e^{b_e}` on a cone with graph Γ gives `c / |Aut Γ|` times Γ decorated
/// by `∏_e (−ψ − ψ')^{b_e − 1}` on the two half-edges of `e`.
pub fn alpha_star(f: &PiecewisePoly) -> Result<StrataExpr> {
    let c = f.complex();
    let side = side_of(c)?;
    let mut out = StrataExpr::zero(c.genus(), c.num_legs(), side);
    for (cone, p) in f.strict_support_decomposition()? {
        let graph = c.cone(cone).graph();
        let aut = int(c.cone(cone).aut().order() as i64);
        for (exps, coeff) in p.terms() {
            // per edge: list of (ψ exponent on half 2e, on half 2e+1, coefficient)
            let per_edge: Vec<Vec<(u32, u32, Rational)>> = exps
                .iter()
                .map(|&b| {
                    let m = b - 1;
                    let sign = if m % 2 == 0 { int(1) } else { int(-1) };
                    (0..=m).map(|k| (k, m - k, &sign * Rational::from_integer(binomial(m, k)))).collect()
                })
                .collect();
            if per_edge.is_empty() {
                out.add_term(DecoratedStratum::undecorated(graph), coeff / &aut);
                continue;
            }
            for choice in per_edge.iter().map(|v| v.iter()).multi_cartesian_product() {
                let mut dec = vec![0; graph.num_half_edges()];
                let mut k = coeff / &aut;
                for (e, (a, b, w)) in choice.into_iter().enumerate() {
                    dec[2 * e] = *a;
                    dec[2 * e + 1] = *b;
                    k *= w;
                }
                out.add_term(DecoratedStratum::new(graph, dec)?, k);
            }
        }
    }
    Ok(out)
}

/// Degree of a stable-side expression, or of a pushed-forward one.
pub fn integrate(e: &StrataExpr) -> Result<Rational> {
    if e.side == Side::Pseudostable && !e.transported {
        return Err(Error::UnsupportedPushforward(
            "pseudostable classes are integrated by pulling back to the stable side".into(),
        ));
    }
    e.integrate_termwise()
}

/// Degree of `α*(f)` for a top-degree `f` on the pseudostable complex, computed
/// as the degree of `α*(trop(T)* f)` on the stable side.
pub fn integrate_ps(pair: &ModuliPair, f: &PiecewisePoly) -> Result<Rational> {
    if !pair.ps.same_as(f.complex()) {
        return Err(Error::ComplexMismatch);
    }
    let top = pair.ps.moduli_dim() as u32;
    if !f.is_homogeneous_of_degree(top) {
        return Err(Error::WrongDegree { found: f.degree().unwrap_or(0), expected: top });
    }
    integrate(&alpha_star(&pair.trop_t.pullback(f)?)?)
}

fn is_elliptic_tail_divisor(s: &DecoratedStratum) -> bool {
    s.graph.num_edges() == 1
        && !s.graph.is_loop(0)
        && RayLabel::of_graph(&s.graph) == RayLabel::elliptic_tail()
        && s.decorations.iter().all(|&d| d == 0)
}

/// Pushforward along pseudostabilization on the supported shapes: strata of
/// pseudostable graphs are carried over, the undecorated elliptic-tail divisor
/// goes to zero, and top-degree terms on other graphs land on the cuspidal point.
pub fn pushforward_t(e: &StrataExpr) -> Result<StrataExpr> {
    if e.side != Side::Stable {
        return Err(Error::UnsupportedPushforward("input must live on the stable side".into()));
    }
    let top = 3 * e.genus + e.n as u32 - 3;
    let mut out = StrataExpr::zero(e.genus, e.n, Side::Pseudostable);
    out.transported = true;
    out.cusp = e.cusp.clone();
    for (s, c) in &e.terms {
        if local_moves(&s.graph).is_empty() {
            out.add_term(s.clone(), c.clone());
        } else if is_elliptic_tail_divisor(s) {
            continue;
        } else if s.degree() == top {
            out.cusp += c * s.evaluate()?;
        } else {
            return Err(Error::UnsupportedPushforward(format!("term {s} of degree {}", s.degree())));
        }
    }
    Ok(out)
}

fn genus_one_rays(c: &ConeComplex) -> Result<(usize, usize)> {
    let rho0 = c.ray(&RayLabel::Irreducible).ok_or(Error::NotARay(usize::MAX))?;
    let rho1 = c.ray(&RayLabel::elliptic_tail()).ok_or(Error::NotARay(usize::MAX))?;
    Ok((rho0, rho1))
}

/// Intersection numbers `∫δ₀δ₁` and `∫δ₁²` on the stable (1, 2) complex.
pub fn boundary_pairings(pair: &ModuliPair) -> Result<(Rational, Rational)> {
    let c = pair.stable.clone();
    if (c.genus(), c.num_legs()) != (1, 2) {
        return Err(Error::UnsupportedGenus(c.genus()));
    }
    let (rho0, rho1) = genus_one_rays(&c)?;
    let phi0 = phi_ray(c.clone(), rho0)?;
    let phi1 = phi_ray(c, rho1)?;
    let d0d1 = integrate(&alpha_star(&phi0.try_mul(&phi1)?.scale(&int(2)))?)?;
    let d1d1 = integrate(&alpha_star(&phi1.pow(2))?)?;
    Ok((d0d1, d1d1))
}

/// Solves `∫δ₀δ₁ + q ∫δ₁² = 0` for the coefficient of `δ₁` in the pullback of `δ₀^ps`.
pub fn solve_contraction_coefficient() -> Result<Rational> {
    let pair = ModuliPair::new(1, 2)?;
    let (d0d1, d1d1) = boundary_pairings(&pair)?;
    solve_contraction_coefficient_with(&d0d1, &d1d1)
}

pub fn solve_contraction_coefficient_with(d0d1: &Rational, d1d1: &Rational) -> Result<Rational> {
    if d1d1.is_zero() {
        return Err(Error::IllDefinedMap("vanishing self-intersection".into()));
    }
    Ok(-(d0d1 / d1d1))
}

/// `(φ₀^ps)² / 6` on the pseudostable complex of genus one.
pub fn cusp_class(pair: &ModuliPair) -> Result<PiecewisePoly> {
    if pair.ps.genus() != 1 {
        return Err(Error::UnsupportedGenus(pair.ps.genus()));
    }
    let rho0 = pair.ps.ray(&RayLabel::Irreducible).ok_or(Error::NotARay(usize::MAX))?;
    Ok(phi_ray(pair.ps.clone(), rho0)?.pow(2).scale(&Rational::new(1.into(), 6.into())))
}

/// Checks `trop(T)*(φ₀^ps / 12) = φ₀ / 12 + φ₁` in genus one; with two markings
/// also compares the pairings of both sides with `δ₀` and `δ₁`.
pub fn lambda1_check(pair: &ModuliPair) -> Result<bool> {
    if pair.stable.genus() != 1 {
        return Err(Error::UnsupportedGenus(pair.stable.genus()));
    }
    let twelfth = Rational::new(1.into(), 12.into());
    let (rho0, rho1) = genus_one_rays(&pair.stable)?;
    let rho0_ps = pair.ps.ray(&RayLabel::Irreducible).ok_or(Error::NotARay(usize::MAX))?;
    let lhs = pair.trop_t.pullback(&phi_ray(pair.ps.clone(), rho0_ps)?.scale(&twelfth))?;
    let phi0 = phi_ray(pair.stable.clone(), rho0)?;
    let phi1 = phi_ray(pair.stable.clone(), rho1)?;
    let rhs = phi0.scale(&twelfth).try_add(&phi1)?;
    let mut ok = lhs == rhs;
    if pair.stable.num_legs() == 2 {
        for d in [phi0.scale(&int(2)), phi1] {
            let a = integrate(&alpha_star(&lhs.try_mul(&d)?)?)?;
            let b = integrate(&alpha_star(&rhs.try_mul(&d)?)?)?;
            ok &= a == b;
        }
    }
    Ok(ok)
}

/// The same identity with the light-weight reduction map in place of trop(T);
/// true when the two pullbacks differ.
pub fn lambda1_hassett_differs(pair: &ModuliPair) -> Result<bool> {
    let h = pair.hassett()?;
    let twelfth = Rational::new(1.into(), 12.into());
    let w_rho0 = h.target().ray(&RayLabel::Irreducible).ok_or(Error::NotARay(usize::MAX))?;
    let pulled = h.pullback(&phi_ray(h.target().clone(), w_rho0)?.scale(&twelfth))?;
    let (rho0, rho1) = genus_one_rays(&pair.stable)?;
    let target = phi_ray(pair.stable.clone(), rho0)?.scale(&twelfth).try_add(&phi_ray(pair.stable.clone(), rho1)?)?;
    Ok(pulled != target && pulled == phi_ray(pair.stable.clone(), rho0)?.scale(&twelfth))
}
