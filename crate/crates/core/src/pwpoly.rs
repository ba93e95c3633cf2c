//! Piecewise polynomials on a cone complex.
//!
//! A function is one polynomial per cone in that cone's edge coordinates,
//! invariant under the automorphism action and compatible with every face map.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::ConeComplex;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{parse_rational, to_fraction_string, Rational};

#[derive(Clone, Debug)]
pub struct PiecewisePoly {
    complex: Arc<ConeComplex>,
    polys: Vec<Poly>,
}

/// Average of `p` over the edge action of `cone`.
pub fn symmetrize(complex: &ConeComplex, cone: usize, p: &Poly) -> Poly {
    let action = complex.cone(cone).aut().edge_action();
    let mut acc = Poly::zero(p.nvars());
    for perm in action {
        acc = &acc + &p.permute_vars(perm);
    }
    acc.scale(&Rational::new(1.into(), (action.len() as i64).into()))
}

/// `p` on `tau`, read on `sigma` through the face map keeping `mask`. Variable
/// `injection[k]` of `tau` becomes coordinate `kept[k]` of `sigma`.
fn pull_through_face(complex: &ConeComplex, sigma: usize, mask: usize, p: &Poly) -> Poly {
    let f = complex.face(sigma, mask);
    let mut map = vec![0; f.kept.len()];
    for (k, &j) in f.injection.iter().enumerate() {
        map[j] = f.kept[k];
    }
    p.embed(&map, complex.cone(sigma).dim())
}

impl PiecewisePoly {
    pub fn zero(complex: Arc<ConeComplex>) -> Self {
        let polys = complex.cones().iter().map(|c| Poly::zero(c.dim())).collect();
        PiecewisePoly { complex, polys }
    }

    pub fn constant(complex: Arc<ConeComplex>, c: Rational) -> Self {
        let polys = complex.cones().iter().map(|k| Poly::constant(k.dim(), c.clone())).collect();
        PiecewisePoly { complex, polys }
    }

    /// Validates and wraps per-cone polynomials.
    pub fn from_polys(complex: Arc<ConeComplex>, polys: Vec<Poly>) -> Result<Self> {
        let f = PiecewisePoly { complex, polys };
        f.validate()?;
        Ok(f)
    }

    /// Checks automorphism invariance on every cone and compatibility with every
    /// codimension-one face; face maps compose, so this covers all faces.
    pub fn validate(&self) -> Result<()> {
        let c = &*self.complex;
        if self.polys.len() != c.len() {
            return Err(Error::ComplexMismatch);
        }
        for (s, p) in self.polys.iter().enumerate() {
            let d = c.cone(s).dim();
            if p.nvars() != d {
                return Err(Error::InvalidPiecewise { cone: s, reason: format!("expected {d} variables") });
            }
            if &symmetrize(c, s, p) != p {
                return Err(Error::InvalidPiecewise { cone: s, reason: "not invariant under automorphisms".into() });
            }
            for e in 0..d {
                let mask = ((1usize << d) - 1) & !(1 << e);
                let f = c.face(s, mask);
                let restricted = p.restrict(&f.kept, &f.injection, f.kept.len());
                if restricted != self.polys[f.target] {
                    return Err(Error::InvalidPiecewise {
                        cone: s,
                        reason: format!("incompatible with face {} at edge {e}", f.target),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn complex(&self) -> &Arc<ConeComplex> {
        &self.complex
    }

    pub fn on(&self, cone: usize) -> &Poly {
        &self.polys[cone]
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn is_zero(&self) -> bool {
        self.polys.iter().all(Poly::is_zero)
    }

    /// Cones where the function is not identically zero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.polys.len()).filter(|&i| !self.polys[i].is_zero()).collect()
    }

    pub fn evaluate(&self, cone: usize, point: &[Rational]) -> Result<Rational> {
        let d = self.complex.cone(cone).dim();
        if point.len() != d {
            return Err(Error::InvalidPiecewise { cone, reason: format!("point needs {d} coordinates") });
        }
        Ok(self.polys[cone].evaluate(point))
    }

    fn check_same(&self, other: &PiecewisePoly) -> Result<()> {
        if Arc::ptr_eq(&self.complex, &other.complex) || self.complex.same_as(&other.complex) {
            Ok(())
        } else {
            Err(Error::ComplexMismatch)
        }
    }

    fn zip(&self, other: &PiecewisePoly, op: impl Fn(&Poly, &Poly) -> Poly) -> Result<PiecewisePoly> {
        self.check_same(other)?;
        let polys = self.polys.iter().zip(&other.polys).map(|(a, b)| op(a, b)).collect();
        Ok(PiecewisePoly { complex: self.complex.clone(), polys })
    }

    pub fn try_add(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.zip(other, |a, b| a - b)
    }

    pub fn try_mul(&self, other: &PiecewisePoly) -> Result<PiecewisePoly> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: &Rational) -> PiecewisePoly {
        PiecewisePoly { complex: self.complex.clone(), polys: self.polys.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn neg(&self) -> PiecewisePoly {
        PiecewisePoly { complex: self.complex.clone(), polys: self.polys.iter().map(|p| -p).collect() }
    }

    pub fn pow(&self, k: u32) -> PiecewisePoly {
        PiecewisePoly { complex: self.complex.clone(), polys: self.polys.iter().map(|p| p.pow(k)).collect() }
    }

    /// Highest total degree over all cones; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.polys.iter().filter_map(Poly::degree).max()
    }

    pub fn homogeneous_part(&self, d: u32) -> PiecewisePoly {
        PiecewisePoly {
            complex: self.complex.clone(),
            polys: self.polys.iter().map(|p| p.homogeneous_part(d)).collect(),
        }
    }

    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        self.polys.iter().all(|p| p.is_homogeneous_of_degree(d))
    }

    /// Pieces `(cone, s)` with `s` divisible by every coordinate of its cone,
    /// such that the extensions of all pieces add up to `self`.
    pub fn strict_support_decomposition(&self) -> Result<Vec<(usize, Poly)>> {
        let c = &*self.complex;
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.sort_by_key(|&i| c.cone(i).dim());
        let mut parts: Vec<Option<Poly>> = vec![None; c.len()];
        for &s in &order {
            let d = c.cone(s).dim();
            let full = (1usize << d) - 1;
            let mut residue = self.polys[s].clone();
            for mask in 0..full {
                let t = c.face(s, mask).target;
                if let Some(part) = &parts[t] {
                    residue = &residue - &pull_through_face(c, s, mask, part);
                }
            }
            if !residue.divisible_by_all_vars() {
                return Err(Error::Decomposition(s));
            }
            if !residue.is_zero() {
                parts[s] = Some(residue);
            }
        }
        Ok(parts.into_iter().enumerate().filter_map(|(i, p)| p.map(|p| (i, p))).collect())
    }

    /// Extension of a polynomial on `tau`, divisible by all its coordinates,
    /// to the star of `tau`: on `sigma`, the sum over all ways `tau` sits in
    /// `sigma` as a face. Zero off the star.
    pub fn extend_from(complex: Arc<ConeComplex>, tau: usize, p: &Poly) -> Result<PiecewisePoly> {
        let dim = complex.cone(tau).dim();
        if p.nvars() != dim {
            return Err(Error::InvalidPiecewise { cone: tau, reason: format!("expected {dim} variables") });
        }
        let p = symmetrize(&complex, tau, p);
        let polys = (0..complex.len())
            .map(|s| {
                let d = complex.cone(s).dim();
                let mut acc = Poly::zero(d);
                if d >= dim {
                    for mask in 0..1usize << d {
                        if mask.count_ones() as usize == dim && complex.face(s, mask).target == tau {
                            acc = &acc + &pull_through_face(&complex, s, mask, &p);
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(PiecewisePoly { complex, polys })
    }

    pub fn reconstruct(complex: Arc<ConeComplex>, parts: &[(usize, Poly)]) -> Result<PiecewisePoly> {
        let mut acc = PiecewisePoly::zero(complex.clone());
        for (t, p) in parts {
            acc = acc.try_add(&PiecewisePoly::extend_from(complex.clone(), *t, p)?)?;
        }
        Ok(acc)
    }

    /// `{cone id: [{coeff, exponents}]}` with terms in graded-lex order.
    pub fn to_json_value(&self) -> serde_json::Value {
        let map: BTreeMap<String, Vec<TermJson>> = self
            .polys
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let terms = p
                    .graded_terms()
                    .into_iter()
                    .map(|(e, c)| TermJson { coeff: to_fraction_string(c), exponents: e.clone() })
                    .collect();
                (i.to_string(), terms)
            })
            .collect();
        serde_json::to_value(map).expect("piecewise polynomial serializes")
    }

    pub fn from_json_value(complex: Arc<ConeComplex>, v: &serde_json::Value) -> Result<PiecewisePoly> {
        let map: BTreeMap<String, Vec<TermJson>> =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut polys: Vec<Poly> = complex.cones().iter().map(|c| Poly::zero(c.dim())).collect();
        for (key, terms) in map {
            let id: usize = key.parse().map_err(|_| Error::Parse(format!("bad cone id {key}")))?;
            let slot = polys.get_mut(id).ok_or_else(|| Error::UnknownCone(key.clone()))?;
            for t in terms {
                let c = parse_rational(&t.coeff).ok_or_else(|| Error::Parse(format!("bad coefficient {}", t.coeff)))?;
                if t.exponents.len() != slot.nvars() {
                    return Err(Error::Parse(format!("cone {id}: wrong exponent length")));
                }
                slot.add_term(t.exponents, c);
            }
        }
        PiecewisePoly::from_polys(complex, polys)
    }
}

impl PartialEq for PiecewisePoly {
    fn eq(&self, other: &Self) -> bool {
        self.check_same(other).is_ok() && self.polys == other.polys
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub coeff: String,
    pub exponents: Vec<u32>,
}

pub fn phi_ray(complex: Arc<ConeComplex>, ray: usize) -> Result<PiecewisePoly> {
    edge_power_sum(complex, ray, 1)
}

/// Sum of squared coordinates of the edges lying over `ray`.
pub fn power_sum_ray(complex: Arc<ConeComplex>, ray: usize) -> Result<PiecewisePoly> {
    edge_power_sum(complex, ray, 2)
}

fn edge_power_sum(complex: Arc<ConeComplex>, ray: usize, k: u32) -> Result<PiecewisePoly> {
    if ray >= complex.len() || complex.ray_label(ray).is_none() {
        return Err(Error::NotARay(ray));
    }
    let polys = (0..complex.len())
        .map(|s| {
            let d = complex.cone(s).dim();
            let mut p = Poly::zero(d);
            for e in 0..d {
                if complex.edge_ray(s, e) == ray {
                    let mut ex = vec![0; d];
                    ex[e] = k;
                    p.add_term(ex, Rational::from_integer(1.into()));
                }
            }
            p
        })
        .collect();
    Ok(PiecewisePoly { complex, polys })
}

/// Extension of the product of all coordinates of `cone`.
pub fn phi_cone(complex: Arc<ConeComplex>, cone: usize) -> Result<PiecewisePoly> {
    if cone >= complex.len() {
        return Err(Error::UnknownCone(cone.to_string()));
    }
    let d = complex.cone(cone).dim();
    PiecewisePoly::extend_from(complex, cone, &Poly::product_of_vars(d))
}

/// Sum of `f` over a list, treating an empty list as zero.
pub fn sum(complex: Arc<ConeComplex>, fs: &[PiecewisePoly]) -> Result<PiecewisePoly> {
    let mut acc = PiecewisePoly::zero(complex);
    for f in fs {
        acc = acc.try_add(f)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_stable, RayLabel};
    use crate::rational::int;

    fn setup() -> (Arc<ConeComplex>, usize, usize, usize, usize) {
        let c = Arc::new(enumerate_stable(1, 2).unwrap());
        let rho0 = c.ray(&RayLabel::Irreducible).unwrap();
        let rho1 = c.ray(&RayLabel::elliptic_tail()).unwrap();
        let banana = c.cone_by_name("banana").unwrap();
        let lt = c.cone_by_name("loop+tail").unwrap();
        (c, rho0, rho1, banana, lt)
    }

    fn loop_edge(c: &ConeComplex, lt: usize) -> usize {
        (0..2).find(|&e| c.cone(lt).graph().is_loop(e)).unwrap()
    }

    #[test]
    fn generator_values() {
        let (c, rho0, rho1, banana, lt) = setup();
        let phi0 = phi_ray(c.clone(), rho0).unwrap();
        let phi1 = phi_ray(c.clone(), rho1).unwrap();
        phi0.validate().unwrap();
        assert_eq!(phi0.on(banana), &(&Poly::var(2, 0) + &Poly::var(2, 1)));
        let le = loop_edge(&c, lt);
        assert_eq!(phi0.on(lt), &Poly::var(2, le));
        assert!(phi1.on(banana).is_zero());
        let cap0 = power_sum_ray(c.clone(), rho0).unwrap();
        assert_eq!(cap0.on(banana), &(&Poly::var(2, 0).pow(2) + &Poly::var(2, 1).pow(2)));
        assert!(cap0.on(rho1).is_zero());
        let cap1 = power_sum_ray(c.clone(), rho1).unwrap();
        assert_eq!(cap1.on(lt), &Poly::var(2, 1 - le).pow(2));
        assert!(phi_ray(c.clone(), banana).is_err());
    }

    #[test]
    fn phi_cone_matches_rays_and_product() {
        let (c, rho0, rho1, banana, _) = setup();
        let pb = phi_cone(c.clone(), banana).unwrap();
        pb.validate().unwrap();
        assert_eq!(pb.on(banana), &Poly::product_of_vars(2));
        assert!(pb.on(rho0).is_zero());
        for r in [rho0, rho1] {
            assert_eq!(phi_cone(c.clone(), r).unwrap(), phi_ray(c.clone(), r).unwrap());
        }
    }

    #[test]
    fn square_identity() {
        let (c, rho0, rho1, banana, lt) = setup();
        let phi0 = phi_ray(c.clone(), rho0).unwrap();
        let sq = phi0.pow(2);
        let rhs = power_sum_ray(c.clone(), rho0).unwrap().try_add(&phi_cone(c.clone(), banana).unwrap().scale(&int(2))).unwrap();
        assert_eq!(sq, rhs);
        let parts = sq.strict_support_decomposition().unwrap();
        assert_eq!(parts, vec![(rho0, Poly::var(1, 0).pow(2)), (banana, Poly::monomial(vec![1, 1], int(2)))]);
        let prod = phi0.try_mul(&phi_ray(c.clone(), rho1).unwrap()).unwrap();
        assert_eq!(prod.support(), vec![lt]);
        assert_eq!(prod.on(lt), &Poly::product_of_vars(2));
    }

    #[test]
    fn decompositions_of_generators() {
        let (c, rho0, _, banana, _) = setup();
        let cap0 = power_sum_ray(c.clone(), rho0).unwrap();
        assert_eq!(cap0.strict_support_decomposition().unwrap(), vec![(rho0, Poly::var(1, 0).pow(2))]);
        let pb = phi_cone(c.clone(), banana).unwrap();
        assert_eq!(pb.strict_support_decomposition().unwrap(), vec![(banana, Poly::product_of_vars(2))]);
        let phi0 = phi_ray(c.clone(), rho0).unwrap();
        let parts = phi0.strict_support_decomposition().unwrap();
        assert_eq!(parts, vec![(rho0, Poly::var(1, 0))]);
        assert_eq!(PiecewisePoly::reconstruct(c, &parts).unwrap(), phi0);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let (c, _, _, banana, _) = setup();
        let mut polys: Vec<Poly> = c.cones().iter().map(|k| Poly::zero(k.dim())).collect();
        polys[banana] = Poly::var(2, 0);
        assert!(matches!(PiecewisePoly::from_polys(c.clone(), polys.clone()), Err(Error::InvalidPiecewise { .. })));
        polys[banana] = Poly::product_of_vars(2);
        polys[0] = Poly::constant(0, int(1));
        assert!(PiecewisePoly::from_polys(c.clone(), polys).is_err());
        let other = Arc::new(enumerate_stable(1, 3).unwrap());
        assert_eq!(PiecewisePoly::zero(c).try_add(&PiecewisePoly::zero(other)), Err(Error::ComplexMismatch));
    }

    #[test]
    fn codimension_one_checks_cover_every_face() {
        let c = Arc::new(enumerate_stable(1, 3).unwrap());
        let rays = c.rays();
        let f = phi_ray(c.clone(), rays[0])
            .unwrap()
            .try_mul(&power_sum_ray(c.clone(), rays[rays.len() - 1]).unwrap())
            .unwrap()
            .try_add(&phi_cone(c.clone(), c.len() - 1).unwrap())
            .unwrap();
        f.validate().unwrap();
        for s in 0..c.len() {
            for mask in 0..1usize << c.cone(s).dim() {
                let face = c.face(s, mask);
                assert_eq!(f.on(s).restrict(&face.kept, &face.injection, face.kept.len()), *f.on(face.target));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let (c, rho0, _, banana, _) = setup();
        let f = phi_ray(c.clone(), rho0).unwrap().pow(2);
        let v = f.to_json_value();
        assert_eq!(v[banana.to_string()][0]["coeff"], "1/1");
        assert_eq!(v[banana.to_string()][1]["exponents"], serde_json::json!([1, 1]));
        assert_eq!(PiecewisePoly::from_json_value(c, &v).unwrap(), f);
    }
}
