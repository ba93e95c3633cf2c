//! One-shot check of every identity relating the stable and pseudostable
//! complexes, with exact computed values.

use std::fmt;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::complex::{abstractly_isomorphic, enumerate_weighted, ComplexKind, RayLabel};
use crate::dualgraph::pseudostabilize;
use crate::error::Result;
use crate::plmap::{light_weights, ModuliPair};
use crate::pwpoly::{phi_cone, phi_ray, power_sum_ray, sum, PiecewisePoly};
use crate::rational::{frac, int, to_display_string, Rational};
use crate::strata::{
    alpha_star, boundary_pairings, correlator, cusp_class, integrate, integrate_ps, lambda1_check,
    lambda1_hassett_differs, pushforward_t, solve_contraction_coefficient_with, CorrelatorKey, DecoratedStratum,
    StrataExpr,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Informational,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Informational => "informational",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub id: String,
    /// What is being checked, in words.
    pub location: String,
    pub status: Status,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub genus: u32,
    pub n: usize,
    pub entries: Vec<ReportEntry>,
}

impl Report {
    /// True when no entry failed; skipped and informational lines do not count.
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn entry(&self, id: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("verification report for (g, n) = ({}, {})\n", self.genus, self.n);
        for e in &self.entries {
            out.push_str(&format!("[{}] {}: {} ({})\n", e.status, e.id, e.value, e.location));
        }
        out.push_str(if self.all_passed() { "result: all checks passed\n" } else { "result: FAILED\n" });
        out
    }
}

struct Builder {
    entries: Vec<ReportEntry>,
}

impl Builder {
    fn push(&mut self, id: &str, location: &str, status: Status, value: impl Into<String>) {
        self.entries.push(ReportEntry { id: id.into(), location: location.into(), status, value: value.into() });
    }

    fn check(&mut self, id: &str, location: &str, ok: bool, value: impl Into<String>) {
        self.push(id, location, if ok { Status::Pass } else { Status::Fail }, value);
    }

    fn equal(&mut self, id: &str, location: &str, got: &Rational, want: &Rational) {
        let value = format!("{} (expected {})", to_display_string(got), to_display_string(want));
        self.check(id, location, got == want, value);
    }

    /// Runs `f`, turning an error into a failed line.
    fn guard(&mut self, id: &str, location: &str, f: impl FnOnce(&mut Builder) -> Result<()>) {
        if let Err(e) = f(self) {
            self.push(id, location, Status::Fail, format!("error: {e}"));
        }
    }
}

const GENUS_ONE_LINES: &[(&str, &str)] = &[
    ("lambda1-pullback", "pullback of the pseudostable Hodge class"),
    ("hassett-pullback-differs", "light-weight reduction versus pseudostabilization"),
    ("genus-one-base-correlator", "psi integral on the genus-one one-pointed space"),
];

const BASE_CASE_LINES: &[(&str, &str)] = &[
    ("base-case-counts", "cone counts of the genus-one two-pointed complexes"),
    ("hassett-complex-isomorphic", "light-weight complex versus pseudostable complex"),
    ("boundary-pairing-d0d1", "intersection of the irreducible and elliptic-tail divisors"),
    ("boundary-pairing-d1d1", "self-intersection of the elliptic-tail divisor"),
    ("contraction-coefficient", "coefficient of the elliptic-tail divisor in the pullback"),
    ("self-intersection-structure", "strata expansion of the squared irreducible divisor"),
    ("self-intersection-integral", "degree of the squared irreducible divisor; kernel witness"),
    ("ps-self-intersection", "self-intersection of the pseudostable irreducible divisor"),
    ("cusp-pushforward", "degree of the cuspidal class as a pushforward"),
    ("cusp-difference-form", "cuspidal class from the divisor difference over 24"),
    ("cusp-polynomial-form", "cuspidal class as the squared slope function over 6"),
    ("cusp-power-sum-constant", "constant in the power-sum form of the cuspidal class"),
    ("cusp-power-sum-constant-12", "the same form with constant 12"),
    ("banana-ps-integral", "degree of the folded cone class on the pseudostable side"),
];

/// Builds the report for `(genus, n)`. Combinatorial lines run everywhere,
/// intersection lines only in genus one, base-case lines only for two markings.
pub fn verification_report(genus: u32, n: usize) -> Result<Report> {
    let pair = ModuliPair::new(genus, n)?;
    let mut b = Builder { entries: Vec::new() };
    combinatorial_lines(&mut b, &pair);
    if genus == 1 {
        genus_one_lines(&mut b, &pair);
    } else {
        for (id, loc) in GENUS_ONE_LINES {
            b.push(id, loc, Status::Skipped, "skipped: genus>1");
        }
    }
    if genus == 1 && n == 2 {
        base_case_lines(&mut b, &pair);
    } else {
        let reason = if genus != 1 { "skipped: genus>1" } else { "skipped: needs n=2" };
        for (id, loc) in BASE_CASE_LINES {
            b.push(id, loc, Status::Skipped, reason);
        }
    }
    Ok(Report { genus, n, entries: b.entries })
}

fn combinatorial_lines(b: &mut Builder, pair: &ModuliPair) {
    let (st, ps) = (&pair.stable, &pair.ps);
    b.check(
        "ps-subcomplex",
        "pseudostable cones are the complement of the elliptic-tail open star",
        *ps.kind() == ComplexKind::Pseudostable && ps.cones().iter().all(|c| c.graph().is_pseudostable()),
        format!("stable dims {:?} total {}; pseudostable dims {:?} total {}", st.dims(), st.len(), ps.dims(), ps.len()),
    );

    b.guard("pseudostabilize-idempotent", "pseudostabilization is idempotent", |b| {
        let mut ok = true;
        for cone in st.cones() {
            let once = pseudostabilize(cone.graph())?;
            let twice = pseudostabilize(&once.graph)?;
            ok &= once.graph.is_pseudostable() && twice.is_identity() && twice.graph == once.graph;
        }
        b.check("pseudostabilize-idempotent", "pseudostabilization is idempotent", ok, format!("{} graphs", st.len()));
        Ok(())
    });

    let rho1 = st.ray(&RayLabel::elliptic_tail());
    let mut slope_desc = Vec::new();
    let mut rays_ok = true;
    for r in pair.trop_t.ray_images() {
        let label = st.ray_label(r.source).expect("ray").clone();
        let target = r.target.and_then(|t| ps.ray_label(t)).cloned();
        let (want, mult) = if Some(r.source) == rho1 { (RayLabel::Irreducible, 12) } else { (label.clone(), 1) };
        rays_ok &= target.as_ref() == Some(&want) && r.multiplier == mult;
        if Some(r.source) == rho1 {
            slope_desc.push(format!("{label} -> {} {}_ps", r.multiplier, want));
        }
    }
    let value = if slope_desc.is_empty() { "no elliptic-tail ray; all rays fixed".to_string() } else { format!("slope 12: {}; other rays fixed", slope_desc.join(", ")) };
    b.check("trop-t-rays", "elliptic-tail ray goes to 12 times the irreducible ray, other rays fixed", rays_ok, value);

    let star = rho1.map(|r| st.open_star(r)).unwrap_or_default();
    let off_star_ok = (0..st.len()).filter(|s| !star.contains(s)).all(|s| {
        let img = pair.trop_t.image(s);
        ps.cone(img.target).code() == st.cone(s).code()
            && img.matrix.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &m)| m == (i == j) as u32))
    });
    b.check(
        "trop-t-identity-off-star",
        "pseudostabilization map is the identity off the open star",
        off_star_ok,
        format!("{} cones off the star, {} in it", st.len() - star.len(), star.len()),
    );

    b.guard("trop-t-pullback-phi0", "pullback of the irreducible slope function", |b| {
        let rho0_ps = ps.ray(&RayLabel::Irreducible).expect("irreducible ray");
        let pulled = pair.trop_t.pullback(&phi_ray(ps.clone(), rho0_ps)?)?;
        let mut want = phi_ray(st.clone(), st.ray(&RayLabel::Irreducible).expect("irreducible ray"))?;
        if let Some(r1) = rho1 {
            want = want.try_add(&phi_ray(st.clone(), r1)?.scale(&int(12)))?;
        }
        b.check("trop-t-pullback-phi0", "pullback of the irreducible slope function", pulled == want, "phi0 + 12*phi1");
        Ok(())
    });

    b.guard("trop-t-pullback-other-rays", "pullback of every other slope function", |b| {
        let mut ok = true;
        let mut count = 0;
        for r in ps.rays() {
            let label = ps.ray_label(r).expect("ray");
            if *label == RayLabel::Irreducible {
                continue;
            }
            let src = st.ray(label).expect("ray present on the stable side");
            ok &= pair.trop_t.pullback(&phi_ray(ps.clone(), r)?)? == phi_ray(st.clone(), src)?;
            count += 1;
        }
        b.check("trop-t-pullback-other-rays", "pullback of every other slope function", ok, format!("{count} rays"));
        Ok(())
    });

    b.guard("phi-square-identity", "square of the irreducible slope function", |b| {
        let mut ok = true;
        for c in [st, ps] {
            let rho0 = c.ray(&RayLabel::Irreducible).expect("irreducible ray");
            let bananas: Vec<PiecewisePoly> =
                c.banana_cones().into_iter().map(|s| phi_cone(c.clone(), s)).collect::<Result<_>>()?;
            let rhs = power_sum_ray(c.clone(), rho0)?.try_add(&sum(c.clone(), &bananas)?.scale(&int(2)))?;
            ok &= phi_ray(c.clone(), rho0)?.pow(2) == rhs;
        }
        b.check("phi-square-identity", "square of the irreducible slope function", ok, "phi0^2 = Phi0 + 2*sum of banana cones");
        Ok(())
    });
}

fn genus_one_lines(b: &mut Builder, pair: &ModuliPair) {
    let (id, loc) = GENUS_ONE_LINES[0];
    b.guard(id, loc, |b| {
        b.check(id, loc, lambda1_check(pair)?, "pullback of phi0_ps/12 equals phi0/12 + phi1");
        Ok(())
    });
    let (id, loc) = GENUS_ONE_LINES[1];
    b.guard(id, loc, |b| {
        let h = pair.hassett()?;
        let rho1 = pair.stable.ray(&RayLabel::elliptic_tail()).expect("elliptic-tail ray");
        let mut ok = lambda1_hassett_differs(pair)?;
        let t_rays = pair.trop_t.ray_images();
        let h_rays = h.ray_images();
        let mut differing = Vec::new();
        for (t, w) in t_rays.iter().zip(&h_rays) {
            if t.multiplier != w.multiplier {
                differing.push((t.source, w.multiplier, t.multiplier));
            }
        }
        // with more markings, light weights also contract rational tails
        let only_rho1 = differing == [(rho1, 0, 12)];
        ok &= if pair.stable.num_legs() == 2 {
            only_rho1
        } else {
            differing.contains(&(rho1, 0, 12)) && differing.iter().all(|&(r, w, t)| r == rho1 || (w == 0 && t == 1))
        };
        let value = if only_rho1 {
            "maps differ only on rho1: multiplier 0 versus 12".to_string()
        } else {
            format!("maps differ on {} rays, rho1: multiplier 0 versus 12", differing.len())
        };
        b.check(id, loc, ok, value);
        Ok(())
    });
    let (id, loc) = GENUS_ONE_LINES[2];
    b.guard(id, loc, |b| {
        let v = correlator(&CorrelatorKey::new(1, vec![1])?)?;
        b.equal(id, loc, &v, &frac(1, 24));
        Ok(())
    });
}

fn base_case_lines(b: &mut Builder, pair: &ModuliPair) {
    let (st, ps) = (pair.stable.clone(), pair.ps.clone());
    let loc = |id: &str| BASE_CASE_LINES.iter().find(|(i, _)| *i == id).expect("known line").1;
    let run = |b: &mut Builder, id: &str, f: &dyn Fn(&mut Builder, &str, &str) -> Result<()>| {
        b.guard(id, loc(id), |b| f(b, id, loc(id)));
    };

    run(b, "base-case-counts", &|b, id, l| {
        let folded = st.cones().iter().filter(|c| c.folded()).count();
        let ok = st.dims() == [1, 2, 2] && folded == 1 && ps.len() == 3;
        b.check(id, l, ok, format!("stable dims {:?} total {}, {folded} folded; pseudostable total {}", st.dims(), st.len(), ps.len()));
        Ok(())
    });
    run(b, "hassett-complex-isomorphic", &|b, id, l| {
        let w = enumerate_weighted(1, 2, &light_weights(2))?;
        b.check(id, l, abstractly_isomorphic(&w, &ps), format!("{} weighted cones", w.len()));
        Ok(())
    });

    let rho0 = st.ray(&RayLabel::Irreducible).expect("irreducible ray");
    let rho1 = st.ray(&RayLabel::elliptic_tail()).expect("elliptic-tail ray");
    let rho0_ps = ps.ray(&RayLabel::Irreducible).expect("irreducible ray");

    run(b, "boundary-pairing-d0d1", &|b, id, l| {
        b.equal(id, l, &boundary_pairings(pair)?.0, &int(1));
        Ok(())
    });
    run(b, "boundary-pairing-d1d1", &|b, id, l| {
        b.equal(id, l, &boundary_pairings(pair)?.1, &frac(-1, 24));
        Ok(())
    });
    run(b, "contraction-coefficient", &|b, id, l| {
        let (a, c) = boundary_pairings(pair)?;
        b.equal(id, l, &solve_contraction_coefficient_with(&a, &c)?, &int(24));
        Ok(())
    });

    let phi0 = || phi_ray(st.clone(), rho0);
    let phi1 = || phi_ray(st.clone(), rho1);

    run(b, "self-intersection-structure", &|b, id, l| {
        let lhs = alpha_star(&phi0()?.pow(2))?.scale(&int(4));
        let mut rhs = StrataExpr::zero(1, 2, crate::strata::Side::Stable);
        let loop_graph = st.cone(rho0).graph();
        // 2 * gl_*(-psi - psi'), both half-edges of the loop
        rhs.add_term(DecoratedStratum::new(loop_graph, vec![1, 0])?, int(-2));
        rhs.add_term(DecoratedStratum::new(loop_graph, vec![0, 1])?, int(-2));
        let banana = st.cone_by_name("banana")?;
        rhs.add_term(DecoratedStratum::undecorated(st.cone(banana).graph()), int(4));
        b.check(id, l, lhs == rhs, lhs.to_string());
        Ok(())
    });
    run(b, "self-intersection-integral", &|b, id, l| {
        let sq = phi0()?.pow(2);
        let v = integrate(&alpha_star(&sq)?.scale(&int(4)))?;
        b.check(id, l, v.is_zero() && !sq.is_zero(), format!("{} with phi0^2 nonzero", to_display_string(&v)));
        Ok(())
    });
    run(b, "ps-self-intersection", &|b, id, l| {
        let f = phi_ray(ps.clone(), rho0_ps)?.pow(2).scale(&int(4));
        b.equal(id, l, &integrate_ps(pair, &f)?, &int(24));
        Ok(())
    });
    let xi = || -> Result<Rational> { integrate(&pushforward_t(&alpha_star(&phi0()?.try_mul(&phi1()?)?.scale(&int(2)))?)?) };
    run(b, "cusp-pushforward", &|b, id, l| {
        b.equal(id, l, &xi()?, &int(1));
        Ok(())
    });
    run(b, "cusp-difference-form", &|b, id, l| {
        let ps_sq = integrate_ps(pair, &phi_ray(ps.clone(), rho0_ps)?.pow(2).scale(&int(4)))?;
        let pushed = integrate(&pushforward_t(&alpha_star(&phi0()?.pow(2).scale(&int(4)))?)?)?;
        let v = (&ps_sq - &pushed) / int(24);
        b.check(
            id,
            l,
            v == xi()? && v == int(1),
            format!("({} - {})/24 = {}", to_display_string(&ps_sq), to_display_string(&pushed), to_display_string(&v)),
        );
        Ok(())
    });
    run(b, "cusp-polynomial-form", &|b, id, l| {
        b.equal(id, l, &integrate_ps(pair, &cusp_class(pair)?)?, &int(1));
        Ok(())
    });

    let power_sum_parts = || -> Result<(Rational, Rational, Rational)> {
        let ps_side = integrate_ps(pair, &power_sum_ray(ps.clone(), rho0_ps)?)?;
        let pushed = integrate(&pushforward_t(&alpha_star(&power_sum_ray(st.clone(), rho0)?)?)?)?;
        Ok((ps_side, pushed, xi()?))
    };
    run(b, "cusp-power-sum-constant", &|b, id, l| {
        let (a, c, x) = power_sum_parts()?;
        let constant = (&a - &c) / &x;
        b.check(
            id,
            l,
            constant == int(6),
            format!(
                "({} - ({}))/{} = {}",
                to_display_string(&a),
                to_display_string(&c),
                to_display_string(&x),
                to_display_string(&constant)
            ),
        );
        Ok(())
    });
    run(b, "cusp-power-sum-constant-12", &|b, id, l| {
        let (a, c, x) = power_sum_parts()?;
        let v = (&a - &c) / int(12);
        b.push(
            id,
            l,
            Status::Informational,
            format!("with constant 12: ({} - ({}))/12 = {}, not the cuspidal degree {}", to_display_string(&a), to_display_string(&c), to_display_string(&v), to_display_string(&x)),
        );
        Ok(())
    });
    run(b, "banana-ps-integral", &|b, id, l| {
        let banana = ps.cone_by_name("banana")?;
        b.equal(id, l, &integrate_ps(pair, &phi_cone(ps.clone(), banana)?)?, &frac(1, 2));
        Ok(())
    });
}
