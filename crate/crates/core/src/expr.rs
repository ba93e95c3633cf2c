//! Small expression language for piecewise polynomials.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' INT)?
//! atom  := INT | NAME | NAME '(' ARG ')' | '(' expr ')'
//! ```
//!
//! Names: `phi0`, `phi1`, `Phi0`, `Phi1`; `phi(ARG)` where `ARG` is a ray label
//! such as `1,{}` or `0,{2,3}` or a cone name such as `banana`; `Phi(ARG)` with a
//! ray label. Division is only by constants.

use std::sync::Arc;

use num::Zero;

use crate::complex::{ConeComplex, RayLabel};
use crate::error::{Error, Result};
use crate::pwpoly::{phi_cone, phi_ray, power_sum_ray, PiecewisePoly};
use crate::rational::Rational;

#[derive(Clone, Debug)]
enum Value {
    Const(Rational),
    Pp(PiecewisePoly),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    complex: Arc<ConeComplex>,
}

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn to_pp(&self, v: Value) -> PiecewisePoly {
        match v {
            Value::Const(c) => PiecewisePoly::constant(self.complex.clone(), c),
            Value::Pp(p) => p,
        }
    }

    fn combine(&self, a: Value, b: Value, op: u8) -> Result<Value> {
        Ok(match (a, b, op) {
            (Value::Const(x), Value::Const(y), b'+') => Value::Const(x + y),
            (Value::Const(x), Value::Const(y), b'-') => Value::Const(x - y),
            (Value::Const(x), Value::Const(y), b'*') => Value::Const(x * y),
            (Value::Const(x), Value::Pp(p), b'*') | (Value::Pp(p), Value::Const(x), b'*') => Value::Pp(p.scale(&x)),
            (a, Value::Const(y), b'/') => {
                if y.is_zero() {
                    return err("division by zero");
                }
                let inv = Rational::from_integer(1.into()) / y;
                match a {
                    Value::Const(x) => Value::Const(x * inv),
                    Value::Pp(p) => Value::Pp(p.scale(&inv)),
                }
            }
            (_, Value::Pp(_), b'/') => return err("division by a piecewise polynomial"),
            (a, b, op) => {
                let (a, b) = (self.to_pp(a), self.to_pp(b));
                Value::Pp(match op {
                    b'+' => a.try_add(&b)?,
                    b'-' => a.try_sub(&b)?,
                    _ => a.try_mul(&b)?,
                })
            }
        })
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            let op = match self.peek() {
                Some(c @ (b'+' | b'-')) => c,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = self.combine(acc, rhs, op)?;
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(c @ (b'*' | b'/')) => c,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            acc = self.combine(acc, rhs, op)?;
        }
    }

    fn unary(&mut self) -> Result<Value> {
        if self.eat(b'-') {
            return Ok(match self.unary()? {
                Value::Const(c) => Value::Const(-c),
                Value::Pp(p) => Value::Pp(p.neg()),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let k: u32 = self.integer()?.parse().map_err(|_| Error::Parse("exponent too large".into()))?;
        Ok(match base {
            Value::Const(c) => Value::Const(num::pow::pow(c, k as usize)),
            Value::Pp(p) => Value::Pp(p.pow(k)),
        })
    }

    fn integer(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(format!("expected an integer at position {start}"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Value> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return err("missing closing parenthesis");
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.integer()?;
                let n: num::BigInt = digits.parse().map_err(|_| Error::Parse(digits.clone()))?;
                Ok(Value::Const(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                let arg = if self.peek() == Some(b'(') { Some(self.raw_argument()?) } else { None };
                self.generator(&name, arg.as_deref()).map(Value::Pp)
            }
            Some(c) => err(format!("unexpected character '{}' at position {}", c as char, self.pos)),
            None => err("unexpected end of expression"),
        }
    }

    /// Text between balanced parentheses, taken verbatim.
    fn raw_argument(&mut self) -> Result<String> {
        self.pos += 1;
        let start = self.pos;
        let mut depth = 1;
        while self.pos < self.src.len() {
            match self.src[self.pos] {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        let arg = String::from_utf8_lossy(&self.src[start..self.pos]).trim().to_string();
                        self.pos += 1;
                        return Ok(arg);
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
        err("unbalanced parenthesis in argument")
    }

    fn ray(&self, label: &RayLabel) -> Result<usize> {
        self.complex.ray(label).ok_or_else(|| Error::UnknownCone(label.to_string()))
    }

    fn generator(&self, name: &str, arg: Option<&str>) -> Result<PiecewisePoly> {
        let c = self.complex.clone();
        match (name, arg) {
            ("phi0", None) => phi_ray(c, self.ray(&RayLabel::Irreducible)?),
            ("phi1", None) => phi_ray(c, self.ray(&RayLabel::elliptic_tail())?),
            ("Phi0", None) => power_sum_ray(c, self.ray(&RayLabel::Irreducible)?),
            ("Phi1", None) => power_sum_ray(c, self.ray(&RayLabel::elliptic_tail())?),
            ("phi", Some(a)) => match RayLabel::parse(&format!("({a})")) {
                Some(label) => phi_ray(c, self.ray(&label)?),
                None => {
                    let cone = self.complex.cone_by_name(a)?;
                    phi_cone(c, cone)
                }
            },
            ("Phi", Some(a)) => {
                let label = RayLabel::parse(&format!("({a})"))
                    .or_else(|| RayLabel::parse(a))
                    .ok_or_else(|| Error::Parse(format!("Phi needs a ray label, got {a}")))?;
                power_sum_ray(c, self.ray(&label)?)
            }
            _ => err(format!("unknown generator {name}{}", arg.map(|a| format!("({a})")).unwrap_or_default())),
        }
    }
}

/// Parses an expression into a piecewise polynomial on `complex`.
pub fn parse_pp(src: &str, complex: Arc<ConeComplex>) -> Result<PiecewisePoly> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, complex };
    let v = p.expr()?;
    if p.peek().is_some() {
        return err(format!("trailing input at position {}", p.pos));
    }
    Ok(p.to_pp(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::enumerate_stable;
    use crate::rational::int;

    #[test]
    fn square_identity_parses_to_zero() {
        let c = Arc::new(enumerate_stable(1, 2).unwrap());
        let ps = Arc::new(c.pseudostable_subcomplex().unwrap());
        assert!(parse_pp("phi0^2 - Phi0 - 2*phi(banana)", ps.clone()).unwrap().is_zero());
        assert!(parse_pp("phi0^2 - Phi0 - 2*phi(banana)", c.clone()).unwrap().is_zero());
        assert!(parse_pp("phi1", ps).is_err());
    }

    #[test]
    fn arithmetic_and_names() {
        let c = Arc::new(enumerate_stable(1, 2).unwrap());
        let a = parse_pp("(phi0 + 12*phi1)/12", c.clone()).unwrap();
        let b = parse_pp("phi0/12 + phi(1,{})", c.clone()).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_pp("phi(rho0)", c.clone()).unwrap(), parse_pp("phi0", c.clone()).unwrap());
        assert_eq!(parse_pp("Phi(1,{})", c.clone()).unwrap(), parse_pp("Phi1", c.clone()).unwrap());
        let lt = c.cone_by_name("loop+tail").unwrap();
        assert_eq!(parse_pp("phi(loop+tail)", c.clone()).unwrap().support(), vec![lt]);
        assert_eq!(parse_pp("-2^2 + 3", c.clone()).unwrap().on(0).coefficient(&[]), int(-1));
        for bad in ["phi0 +", "phi0 / phi1", "foo", "phi(", "phi0 1", "1/0"] {
            assert!(parse_pp(bad, c.clone()).is_err(), "{bad}");
        }
    }
}
