//! Class expressions such as `3*x^2 - y`, `2*k*a + a` or `x*y`.
//!
//! Grammar:
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (['*'] factor)*
//! factor := '-' factor | INT | 'k' | NAME ['^' INT] | '(' expr ')'
//! ```
//!
//! Names are integral generators of the ring. The reserved name `k` is the
//! sweep parameter; an expression must be affine in `k`, and is returned as
//! `base + k * step`. A missing `*` means multiplication, so `2a` is `2*a`;
//! names run over letters and digits, so `x2y` is one name. A plain integer
//! is accepted as a class only when it is `0` (in any degree) or when the
//! target degree is 0.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Cohomology, IntClass, Mod2Class};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Int(BigInt),
    K,
    Name(String, u32),
    Sum(Vec<(bool, Node)>),
    Product(Vec<Node>),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at column {} in `{}`", self.pos + 1, self.src))
    }

    fn expr(&mut self) -> Result<Node> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.peek() == Some('-') {
            self.bump();
            negative = true;
        } else if self.peek() == Some('+') {
            self.bump();
        }
        terms.push((negative, self.term()?));
        while let Some(c) = self.peek() {
            match c {
                '+' | '-' => {
                    self.bump();
                    terms.push((c == '-', self.term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 && !terms[0].0 {
            terms.pop().expect("one term").1
        } else {
            Node::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Node> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                }
                Some(c) if c.is_alphabetic() || c == '_' || c == '(' => {}
                _ => break,
            }
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Node::Product(factors)
        })
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.err("expected an integer"))
    }

    fn factor(&mut self) -> Result<Node> {
        match self.peek() {
            Some('-') => {
                self.bump();
                Ok(Node::Product(vec![Node::Int(BigInt::from(-1)), self.factor()?]))
            }
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                if self.bump() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(Node::Int(self.integer()?)),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        self.pos += c.len_utf8();
                    } else {
                        break;
                    }
                }
                let name = self.src[start..self.pos].to_string();
                let mut exp = 1u32;
                if self.peek() == Some('^') {
                    self.bump();
                    let e = self.integer()?;
                    exp = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
                    if exp == 0 {
                        return Err(self.err("zero exponent"));
                    }
                }
                if name == "k" {
                    if exp != 1 {
                        return Err(self.err("the parameter k must appear linearly"));
                    }
                    return Ok(Node::K);
                }
                Ok(Node::Name(name, exp))
            }
            _ => Err(self.err("expected a number, a generator name or `(`")),
        }
    }
}

fn parse(src: &str) -> Result<Node> {
    let mut p = Parser { src, pos: 0 };
    let node = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(node)
}

/// Affine value `base + k * step`, either scalar or a class.
#[derive(Clone, Debug)]
enum Val {
    Scalar(BigInt, BigInt),
    Class(IntClass, IntClass),
}

/// A class depending affinely on the sweep parameter: `base + k * step`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineClass {
    pub base: IntClass,
    pub step: IntClass,
}

impl AffineClass {
    pub fn constant(c: IntClass, ring: &Cohomology) -> Self {
        let step = ring.zero(c.degree());
        AffineClass { base: c, step }
    }

    pub fn depends_on_k(&self) -> bool {
        !self.step.is_zero()
    }

    pub fn at(&self, ring: &Cohomology, k: &BigInt) -> Result<IntClass> {
        ring.add(&self.base, &ring.scale(k, &self.step))
    }
}

fn nonlinear() -> Error {
    Error::Parse("expression is not affine in k".into())
}

fn mul(ring: &Cohomology, a: Val, b: Val) -> Result<Val> {
    Ok(match (a, b) {
        (Val::Scalar(a0, a1), Val::Scalar(b0, b1)) => {
            if !a1.is_zero() && !b1.is_zero() {
                return Err(nonlinear());
            }
            Val::Scalar(&a0 * &b0, &a0 * &b1 + &a1 * &b0)
        }
        (Val::Scalar(s0, s1), Val::Class(c0, c1)) | (Val::Class(c0, c1), Val::Scalar(s0, s1)) => {
            if !s1.is_zero() && !c1.is_zero() {
                return Err(nonlinear());
            }
            let base = ring.scale(&s0, &c0);
            let step = ring.add(&ring.scale(&s0, &c1), &ring.scale(&s1, &c0))?;
            Val::Class(base, step)
        }
        (Val::Class(a0, a1), Val::Class(b0, b1)) => {
            if !a1.is_zero() && !b1.is_zero() {
                return Err(nonlinear());
            }
            let base = ring.cup(&a0, &b0)?;
            let step = ring.add(&ring.cup(&a0, &b1)?, &ring.cup(&a1, &b0)?)?;
            Val::Class(base, step)
        }
    })
}

fn scalar_to_class(ring: &Cohomology, s0: &BigInt, s1: &BigInt, degree: usize) -> Result<Val> {
    if degree == 0 {
        let one = ring.one();
        return Ok(Val::Class(ring.scale(s0, &one), ring.scale(s1, &one)));
    }
    if s0.is_zero() && s1.is_zero() {
        return Ok(Val::Class(ring.zero(degree), ring.zero(degree)));
    }
    Err(Error::Parse(format!(
        "a bare integer cannot stand for a class of degree {degree}"
    )))
}

fn add(ring: &Cohomology, a: Val, b: Val) -> Result<Val> {
    Ok(match (a, b) {
        (Val::Scalar(a0, a1), Val::Scalar(b0, b1)) => Val::Scalar(a0 + b0, a1 + b1),
        (Val::Scalar(s0, s1), Val::Class(c0, c1)) | (Val::Class(c0, c1), Val::Scalar(s0, s1)) => {
            let Val::Class(d0, d1) = scalar_to_class(ring, &s0, &s1, c0.degree())? else {
                unreachable!()
            };
            Val::Class(ring.add(&c0, &d0)?, ring.add(&c1, &d1)?)
        }
        (Val::Class(a0, a1), Val::Class(b0, b1)) => {
            Val::Class(ring.add(&a0, &b0)?, ring.add(&a1, &b1)?)
        }
    })
}

fn neg(ring: &Cohomology, v: Val) -> Val {
    match v {
        Val::Scalar(a, b) => Val::Scalar(-a, -b),
        Val::Class(a, b) => Val::Class(ring.neg(&a), ring.neg(&b)),
    }
}

fn eval(ring: &Cohomology, node: &Node) -> Result<Val> {
    match node {
        Node::Int(n) => Ok(Val::Scalar(n.clone(), BigInt::zero())),
        Node::K => Ok(Val::Scalar(BigInt::zero(), BigInt::one())),
        Node::Name(name, exp) => {
            let (d, i) = ring
                .find_generator(name)
                .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
            let g = ring.generator(d, i);
            let p = ring.power(&g, *exp)?;
            let zero = ring.zero(p.degree());
            Ok(Val::Class(p, zero))
        }
        Node::Sum(terms) => {
            let mut acc: Option<Val> = None;
            for (negative, t) in terms {
                let mut v = eval(ring, t)?;
                if *negative {
                    v = neg(ring, v);
                }
                acc = Some(match acc {
                    None => v,
                    Some(a) => add(ring, a, v)?,
                });
            }
            acc.ok_or_else(|| Error::Parse("empty sum".into()))
        }
        Node::Product(fs) => {
            let mut acc = Val::Scalar(BigInt::one(), BigInt::zero());
            for f in fs {
                acc = mul(ring, acc, eval(ring, f)?)?;
            }
            Ok(acc)
        }
    }
}

/// Parses an expression into a class of the given degree, affine in `k`.
pub fn parse_affine(ring: &Cohomology, src: &str, degree: usize) -> Result<AffineClass> {
    let node = parse(src)?;
    let (base, step) = match eval(ring, &node)? {
        Val::Scalar(s0, s1) => match scalar_to_class(ring, &s0, &s1, degree)? {
            Val::Class(b, s) => (b, s),
            Val::Scalar(..) => unreachable!(),
        },
        Val::Class(b, s) => (b, s),
    };
    if base.degree() != degree {
        return Err(Error::WrongDegree {
            expected: degree,
            found: base.degree(),
        });
    }
    Ok(AffineClass { base, step })
}

/// Parses an expression that must not mention `k`.
pub fn parse_class(ring: &Cohomology, src: &str, degree: usize) -> Result<IntClass> {
    let a = parse_affine(ring, src, degree)?;
    if a.depends_on_k() {
        return Err(Error::Parse(format!("`{src}` depends on the sweep parameter k")));
    }
    Ok(a.base)
}

/// Parses a mod-2 expression: a `+`-separated list of mod-2 basis names,
/// integral generator names (reduced) or products of them, or `0`.
pub fn parse_mod2(ring: &Cohomology, src: &str, degree: usize) -> Result<Mod2Class> {
    let node = parse(src)?;
    let m = eval_mod2(ring, &node)?;
    let m = match m {
        None => ring.mod2_zero(degree),
        Some(m) => m,
    };
    if m.degree() != degree {
        return Err(Error::WrongDegree {
            expected: degree,
            found: m.degree(),
        });
    }
    Ok(m)
}

/// `None` stands for the zero scalar (compatible with any degree);
/// odd scalars are not classes.
fn eval_mod2(ring: &Cohomology, node: &Node) -> Result<Option<Mod2Class>> {
    match node {
        Node::Int(n) => {
            if n.is_zero() || (n % 2u32).is_zero() {
                Ok(None)
            } else {
                Ok(Some(ring.mod2_generator(0, 0)))
            }
        }
        Node::K => Err(Error::Parse("k is not allowed in a mod-2 expression".into())),
        Node::Name(name, exp) => {
            let base = if let Some((d, i)) = ring.find_mod2(name) {
                ring.mod2_generator(d, i)
            } else if let Some((d, i)) = ring.find_generator(name) {
                ring.rho2(&ring.generator(d, i))
            } else {
                return Err(Error::UnknownGenerator(name.clone()));
            };
            let mut acc = base.clone();
            for _ in 1..*exp {
                acc = ring.cup2(&acc, &base)?;
            }
            Ok(Some(acc))
        }
        Node::Sum(terms) => {
            let mut acc: Option<Mod2Class> = None;
            for (_, t) in terms {
                let v = eval_mod2(ring, t)?;
                acc = match (acc, v) {
                    (None, v) => v,
                    (a, None) => a,
                    (Some(a), Some(b)) => Some(ring.add2(&a, &b)?),
                };
            }
            Ok(acc)
        }
        Node::Product(fs) => {
            let mut acc = Some(ring.mod2_generator(0, 0));
            for f in fs {
                let v = eval_mod2(ring, f)?;
                acc = match (acc, v) {
                    (Some(a), Some(b)) => Some(ring.cup2(&a, &b)?),
                    _ => None,
                };
            }
            Ok(acc)
        }
    }
}
