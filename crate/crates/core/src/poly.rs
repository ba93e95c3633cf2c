//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are cone coordinates, indexed `0..nvars`. Monomials are stored as
//! dense exponent vectors in a `BTreeMap`, so iteration order is lexicographic;
//! [`Poly::graded_terms`] gives the graded-lex order used for serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Zero};

use crate::rational::{to_display_string, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Poly::monomial(exps, Rational::one())
    }

    pub fn monomial(exponents: Vec<u32>, coeff: Rational) -> Self {
        let mut p = Poly::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    /// Product of all variables; `1` when there are none.
    pub fn product_of_vars(nvars: usize) -> Self {
        Poly::monomial(vec![1; nvars], Rational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    /// Graded-lex order: ascending total degree, then `x1 > x2 > ...` within a degree.
    pub fn graded_terms(&self) -> Vec<(&Vec<u32>, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            da.cmp(&db).then_with(|| b.0.cmp(a.0))
        });
        v
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, coeff: Rational) {
        assert_eq!(exponents.len(), self.nvars, "exponent vector length mismatch");
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    /// Total degree of the highest-degree monomial, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous_of_degree(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Renames variable `i` to `perm[i]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; self.nvars];
            for (i, &x) in e.iter().enumerate() {
                ne[perm[i]] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Sets every variable outside `kept` to zero and renames `kept[k]` to `rename[k]`
    /// in a ring with `nvars_out` variables.
    pub fn restrict(&self, kept: &[usize], rename: &[usize], nvars_out: usize) -> Self {
        assert_eq!(kept.len(), rename.len());
        let mut is_kept = vec![false; self.nvars];
        for &k in kept {
            is_kept[k] = true;
        }
        let mut out = Poly::zero(nvars_out);
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(i, &x)| x > 0 && !is_kept[i]) {
                continue;
            }
            let mut ne = vec![0; nvars_out];
            for (k, &src) in kept.iter().enumerate() {
                ne[rename[k]] = e[src];
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Maps variable `j` to variable `map[j]` of a ring with `nvars_out` variables.
    pub fn embed(&self, map: &[usize], nvars_out: usize) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(nvars_out);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars_out];
            for (j, &x) in e.iter().enumerate() {
                ne[map[j]] += x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Substitutes `y_j = Σ_i images[j][i] x_i`, producing a polynomial in `nvars_out`
    /// variables `x`.
    pub fn linear_substitute(&self, images: &[Vec<u32>], nvars_out: usize) -> Self {
        assert_eq!(images.len(), self.nvars);
        let linear: Vec<Poly> = images
            .iter()
            .map(|row| {
                assert_eq!(row.len(), nvars_out);
                let mut p = Poly::zero(nvars_out);
                for (i, &m) in row.iter().enumerate() {
                    if m != 0 {
                        let mut e = vec![0; nvars_out];
                        e[i] = 1;
                        p.add_term(e, Rational::from_integer(BigInt::from(m)));
                    }
                }
                p
            })
            .collect();
        let mut out = Poly::zero(nvars_out);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(nvars_out, c.clone());
            for (j, &x) in e.iter().enumerate() {
                if x > 0 {
                    term = &term * &linear[j].pow(x);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// True when every monomial involves every variable.
    pub fn divisible_by_all_vars(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 1))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &x) in e.iter().enumerate() {
                for _ in 0..x {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials over different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "multiplying polynomials over different rings");
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.graded_terms() {
            let mut mono = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => mono.push(format!("x{}", i + 1)),
                    _ => mono.push(format!("x{}^{}", i + 1, x)),
                }
            }
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{}", to_display_string(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", to_display_string(&abs), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn square_of_binomial() {
        let x1 = Poly::var(2, 0);
        let x2 = Poly::var(2, 1);
        let s = &x1 + &x2;
        let sq = s.pow(2);
        assert_eq!(sq.coefficient(&[1, 1]), int(2));
        assert_eq!(sq.coefficient(&[2, 0]), int(1));
        assert_eq!(sq.to_string(), "x1^2 + 2*x1*x2 + x2^2");
        assert!((&sq - &sq).is_zero());
    }

    #[test]
    fn substitution_matches_expansion() {
        // y = x1 + 12 x2, y^2
        let y2 = Poly::var(1, 0).pow(2);
        let sub = y2.linear_substitute(&[vec![1, 12]], 2);
        assert_eq!(sub.coefficient(&[2, 0]), int(1));
        assert_eq!(sub.coefficient(&[1, 1]), int(24));
        assert_eq!(sub.coefficient(&[0, 2]), int(144));
    }

    #[test]
    fn restrict_drops_contracted_variables() {
        let p = &(&Poly::var(3, 0) * &Poly::var(3, 2)) + &Poly::var(3, 1).pow(2);
        // keep variables 1 and 2, renamed to 1 and 0
        let r = p.restrict(&[1, 2], &[1, 0], 2);
        assert_eq!(r, Poly::var(2, 1).pow(2));
    }

    #[test]
    fn permute_and_divisibility() {
        let p = Poly::monomial(vec![2, 1], int(3));
        let q = p.permute_vars(&[1, 0]);
        assert_eq!(q, Poly::monomial(vec![1, 2], int(3)));
        assert!(q.divisible_by_all_vars());
        assert!(!Poly::var(2, 0).divisible_by_all_vars());
    }
}
