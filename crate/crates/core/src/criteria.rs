//! Reduction criteria for 8-dimensional real bundles over a model manifold.
//!
//! Each criterion returns a [`CheckReport`] listing every sub-condition with
//! the values that were computed. Conditions with role
//! [`Role::Precondition`] describe the setting in which the criterion is
//! valid; when one of them fails the verdict is
//! [`crate::report::Verdict::PreconditionViolated`].
//!
//! Expressions such as `1/4 (u (p_1 - 2u - l^2))[M]` are integers whenever the
//! remaining hypotheses hold. If such an expression is fractional while every
//! other condition passes, the data is inconsistent and an
//! [`Error::NonIntegral`] is returned; otherwise the fractional value is
//! reported as a failed condition.
//!
//! Throughout, `P = p_1(M)`, `c` is the spin^c class of the model and
//! `Q = q_1(M; c)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bundles::{q1_candidates, ComplexBundleData, RealBundleData};
use crate::catalog::ManifoldModel;
use crate::cohomology::{Cohomology, IntClass, Mod2Class};
use crate::error::{Error, Result};
use crate::report::{CheckReport, Condition, Role, Value};

/// Incremental report builder implementing the integrality policy.
struct Builder<'a> {
    ring: &'a Cohomology,
    rep: CheckReport,
    fractional: Vec<(String, String)>,
}

impl<'a> Builder<'a> {
    fn new(ring: &'a Cohomology, name: &str) -> Self {
        Builder {
            ring,
            rep: CheckReport::new(name),
            fractional: Vec::new(),
        }
    }

    fn push(&mut self, c: Condition) {
        self.rep.push(c);
    }

    fn mod2(&mut self, role: Role, name: &str, lhs: &Mod2Class, rhs: &Mod2Class) -> bool {
        let passed = lhs == rhs;
        self.push(Condition {
            name: name.into(),
            relation: "=".into(),
            role,
            lhs: Value::mod2(lhs),
            rhs: Value::mod2(rhs),
            modulus: None,
            passed,
        });
        passed
    }

    fn class(&mut self, role: Role, name: &str, lhs: &IntClass, rhs: &IntClass) -> bool {
        let passed = lhs == rhs;
        self.push(Condition {
            name: name.into(),
            relation: "=".into(),
            role,
            lhs: Value::class(lhs),
            rhs: Value::class(rhs),
            modulus: None,
            passed,
        });
        passed
    }

    fn zero(&mut self, name: &str, x: &IntClass) -> bool {
        let z = self.ring.zero(x.degree());
        self.class(Role::Condition, name, x, &z)
    }

    fn zero2(&mut self, name: &str, x: &Mod2Class) -> bool {
        let z = self.ring.mod2_zero(x.degree());
        self.mod2(Role::Condition, name, x, &z)
    }

    fn skip(&mut self, name: &str, reason: &str) {
        self.push(Condition {
            name: name.into(),
            relation: "not evaluated".into(),
            role: Role::Condition,
            lhs: Value::skipped(reason),
            rhs: Value::skipped(reason),
            modulus: None,
            passed: false,
        });
    }

    /// `(lhs_num / lhs_den)[M] = (rhs_num / rhs_den)[M] (mod modulus)`.
    fn congruence(&mut self, name: &str, lhs: (&IntClass, i64), rhs: (&IntClass, i64), modulus: i64) -> Result<bool> {
        let l = self.ring.eval_rational(lhs.0, &BigInt::from(lhs.1))?;
        let r = self.ring.eval_rational(rhs.0, &BigInt::from(rhs.1))?;
        let m = BigInt::from(modulus);
        let as_value = |e: &crate::cohomology::RationalEval| match e.integer() {
            Some(n) => Value::int(n),
            None => Value::Rational { value: e.value.clone() },
        };
        let passed = match (l.integer(), r.integer()) {
            (Some(a), Some(b)) => (a - b).mod_floor(&m).is_zero(),
            _ => {
                let bad = if l.is_integer { &r.value } else { &l.value };
                self.fractional.push((name.to_string(), bad.to_string()));
                false
            }
        };
        self.push(Condition {
            name: name.into(),
            relation: "congruent".into(),
            role: Role::Condition,
            lhs: as_value(&l),
            rhs: as_value(&r),
            modulus: Some(m),
            passed,
        });
        Ok(passed)
    }

    fn vanishes_mod(&mut self, name: &str, num: &IntClass, den: i64, modulus: i64) -> Result<bool> {
        let zero = self.ring.zero(8);
        self.congruence(name, (num, den), (&zero, 1), modulus)
    }

    fn witness(&mut self, name: &str, x: &IntClass) {
        self.rep.witness(name, x);
    }

    fn note(&mut self, n: impl Into<String>) {
        self.rep.note(n);
    }

    fn finish(self) -> Result<CheckReport> {
        if let Some((name, value)) = self.fractional.first() {
            let others_pass = self
                .rep
                .conditions
                .iter()
                .all(|c| c.passed || self.fractional.iter().any(|(n, _)| *n == c.name));
            if others_pass {
                return Err(Error::NonIntegral {
                    expression: name.clone(),
                    value: value.clone(),
                });
            }
        }
        Ok(self.rep)
    }
}

/// Polynomial arithmetic on a fixed model.
struct Calc<'a> {
    m: &'a ManifoldModel,
}

impl<'a> Calc<'a> {
    fn ring(&self) -> &'a Cohomology {
        &self.m.ring
    }

    fn p(&self) -> &'a IntClass {
        &self.m.tangent.p1
    }

    fn q(&self) -> &'a IntClass {
        &self.m.tangent.q1_c
    }

    fn c(&self) -> &'a IntClass {
        &self.m.tangent.c
    }

    /// Product of factors.
    fn mul(&self, fs: &[&IntClass]) -> Result<IntClass> {
        let mut acc = fs[0].clone();
        for f in &fs[1..] {
            acc = self.ring().cup(&acc, f)?;
        }
        Ok(acc)
    }

    /// Linear combination of products: `sum n * prod(factors)`.
    fn poly(&self, degree: usize, terms: &[(i64, &[&IntClass])]) -> Result<IntClass> {
        let r = self.ring();
        let mut acc = r.zero(degree);
        for (n, fs) in terms {
            let t = self.mul(fs)?;
            if t.degree() != degree {
                return Err(Error::WrongDegree {
                    expected: degree,
                    found: t.degree(),
                });
            }
            acc = r.add(&acc, &r.scale(&BigInt::from(*n), &t))?;
        }
        Ok(acc)
    }
}

fn need_degree(name: &str, x: &IntClass, d: usize) -> Result<()> {
    if x.degree() != d {
        return Err(Error::Shape(format!("{name} must have degree {d}, got {}", x.degree())));
    }
    Ok(())
}

fn euler(xi: &RealBundleData) -> Result<&IntClass> {
    match &xi.e {
        Some(e) if e.degree() == 8 => Ok(e),
        _ => Err(Error::MissingInput("Euler class of an 8-dimensional bundle".into())),
    }
}

fn check_dim8(xi: &RealBundleData) -> Result<()> {
    if xi.dim != 8 {
        return Err(Error::Shape(format!("criterion needs an 8-dimensional bundle, got {}", xi.dim)));
    }
    Ok(())
}

/// Runs `f` on every admissible `q_1(xi; lift)` and keeps the first passing
/// branch. `f` receives `None` when `rho2(lift) != w_2(xi)`.
fn over_q1<F>(ring: &Cohomology, xi: &RealBundleData, lift: &IntClass, f: F) -> Result<CheckReport>
where
    F: Fn(Option<&IntClass>) -> Result<CheckReport>,
{
    if ring.rho2(lift) != xi.w2 {
        return f(None);
    }
    let cands = q1_candidates(ring, xi, lift)?;
    if cands.len() == 1 {
        return f(Some(&cands[0]));
    }
    let n = cands.len();
    let mut first_ok: Option<CheckReport> = None;
    let mut first_err: Option<Error> = None;
    for (i, q) in cands.iter().enumerate() {
        match f(Some(q)) {
            Ok(mut rep) => {
                if rep.verdict.is_pass() {
                    rep.note(format!("q1 is ambiguous; branch {} of {n} passes: q1 = {}", i + 1, ring.display(q)));
                    rep.witness("q1", q);
                    return Ok(rep);
                }
                if first_ok.is_none() {
                    first_ok = Some(rep);
                }
            }
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match (first_ok, first_err) {
        (Some(mut rep), _) => {
            rep.note(format!("q1 is ambiguous; none of the {n} halvings passes"));
            Ok(rep)
        }
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one q1 candidate"),
    }
}

const NO_Q1: &str = "q1 undefined: lift does not reduce to w2 of the bundle";

// ---- complex bundles over M - B and over M ----------------------------------

/// Chern classes `(l, u, v)` of a 4-dimensional complex bundle over `M` minus a point.
pub fn chern_realizable_punctured(m: &ManifoldModel, l: &IntClass, u: &IntClass, v: &IntClass) -> Result<CheckReport> {
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    need_degree("v", v, 6)?;
    let r = &m.ring;
    let mut b = Builder::new(r, "chern-punctured");
    let lhs = r.add2(&r.sq2(&r.rho2(u))?, &r.rho2(&r.cup(l, u)?))?;
    b.mod2(Role::Condition, "Sq2 rho2(u) + rho2(lu) = rho2(v)", &lhs, &r.rho2(v));
    for (n, x) in [("l", l), ("u", u), ("v", v)] {
        b.witness(n, x);
    }
    b.finish()
}

/// The integer `I` attached to `(l, u, v)`, as a numerator over 2.
fn chern_i(calc: &Calc, l: &IntClass, u: &IntClass, v: &IntClass) -> Result<IntClass> {
    let (q, c) = (calc.q(), calc.c());
    calc.poly(
        8,
        &[
            (1, &[u, u]),
            (1, &[u, q]),
            (-2, &[u, l, l]),
            (-3, &[u, c, l]),
            (-1, &[u, c, c]),
            (2, &[l, v]),
            (3, &[c, v]),
        ],
    )
}

/// Extension of the punctured bundle over `M` with `c_4 = w`.
pub fn chern_realizable_closed(m: &ManifoldModel, l: &IntClass, u: &IntClass, v: &IntClass, w: &IntClass) -> Result<CheckReport> {
    need_degree("w", w, 8)?;
    let r = &m.ring;
    let calc = Calc { m };
    let punct = chern_realizable_punctured(m, l, u, v)?;
    let mut b = Builder::new(r, "chern");
    for mut c in punct.conditions {
        c.role = Role::Precondition;
        b.push(c);
    }
    let i2 = chern_i(&calc, l, u, v)?;
    b.congruence("w[M] = I (mod 6)", (w, 1), (&i2, 2), 6)?;
    for (n, x) in [("l", l), ("u", u), ("v", v), ("w", w)] {
        b.witness(n, x);
    }
    b.finish()
}

// ---- isomorphism ---------------------------------------------------------------

fn lift_check(ring: &Cohomology, xi: &RealBundleData, l: &IntClass, which: &str) -> Result<()> {
    if ring.rho2(l) != xi.w2 {
        return Err(Error::LiftMismatch(format!(
            "rho2(l) = {} but w2({which}) = {}",
            ring.display_mod2(&ring.rho2(l)),
            ring.display_mod2(&xi.w2)
        )));
    }
    Ok(())
}

fn q1_agree(ring: &Cohomology, b: &mut Builder, xi: &RealBundleData, other: &RealBundleData, l: &IntClass) -> Result<()> {
    let a = q1_candidates(ring, xi, l)?;
    let c = q1_candidates(ring, other, l)?;
    let common = a.iter().find(|x| c.contains(x));
    let (lhs, rhs) = match common {
        Some(x) => (x, x),
        None => (&a[0], &c[0]),
    };
    b.class(Role::Condition, "q1(xi; l) = q1(xi'; l)", lhs, rhs);
    Ok(())
}

/// Stable isomorphism: equal `q_1` and `p_2`.
pub fn stably_isomorphic(m: &ManifoldModel, xi: &RealBundleData, other: &RealBundleData, l: &IntClass) -> Result<CheckReport> {
    let r = &m.ring;
    lift_check(r, xi, l, "xi")?;
    lift_check(r, other, l, "xi'")?;
    let mut b = Builder::new(r, "stable");
    q1_agree(r, &mut b, xi, other, l)?;
    b.class(Role::Condition, "p2(xi) = p2(xi')", &xi.p2, &other.p2);
    b.witness("l", l);
    b.finish()
}

/// Isomorphism as oriented bundles: stable isomorphism and equal Euler classes.
pub fn isomorphic_oriented(m: &ManifoldModel, xi: &RealBundleData, other: &RealBundleData, l: &IntClass) -> Result<CheckReport> {
    let r = &m.ring;
    lift_check(r, xi, l, "xi")?;
    lift_check(r, other, l, "xi'")?;
    let mut b = Builder::new(r, "iso");
    q1_agree(r, &mut b, xi, other, l)?;
    b.class(Role::Condition, "p2(xi) = p2(xi')", &xi.p2, &other.p2);
    b.class(Role::Condition, "e(xi) = e(xi')", euler(xi)?, euler(other)?);
    b.witness("l", l);
    b.finish()
}

// ---- U(4) ----------------------------------------------------------------------------

/// `J` as a numerator over 2.
fn complex_j(calc: &Calc, q1: &IntClass, l: &IntClass, v: &IntClass) -> Result<IntClass> {
    let (q, c) = (calc.q(), calc.c());
    calc.poly(
        8,
        &[
            (1, &[q1, q1]),
            (-1, &[q1, q]),
            (2, &[q1, l, l]),
            (3, &[q1, l, c]),
            (1, &[q1, c, c]),
            (3, &[c, v]),
        ],
    )
}

/// Complex structure on `xi` with `c_1 = l` and `c_3 = v`.
pub fn complex_structure(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass, v: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    need_degree("v", v, 6)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    over_q1(r, xi, l, |q1| {
        let mut b = Builder::new(r, "complex");
        b.mod2(Role::Precondition, "rho2(l) = w2(xi)", &r.rho2(l), &xi.w2);
        b.mod2(Role::Condition, "rho2(v) = w6(xi)", &r.rho2(v), &xi.w6);
        match q1 {
            Some(q1) => {
                let d = calc.poly(8, &[(1, &[&xi.p2]), (-1, &[q1, q1])])?;
                let j2 = complex_j(&calc, q1, l, v)?;
                b.congruence("a) 1/2 (p2 - q1^2)[M] = J (mod 2)", (&d, 2), (&j2, 2), 2)?;
                let rhs = calc.poly(8, &[(2, &[e]), (-2, &[l, v])])?;
                b.class(Role::Condition, "b) p2 - q1^2 = 2(e - lv)", &d, &rhs);
            }
            None => {
                b.skip("a) 1/2 (p2 - q1^2)[M] = J (mod 2)", NO_Q1);
                b.skip("b) p2 - q1^2 = 2(e - lv)", NO_Q1);
            }
        }
        if r.w2_pairs_nontrivially_with_h6() {
            b.note("w2(M) H^6(M) is non-zero: a stable complex structure with c1 = l exists as soon as w6(xi) lifts to an integral class");
        }
        b.witness("l", l);
        b.witness("v", v);
        b.finish()
    })
}

/// Integrality diagnostic for `ind(C (x) xi - C^8) - ind(C (x) lambda - C^2)`.
pub fn congruence_4b(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    let r = &m.ring;
    let calc = Calc { m };
    over_q1(r, xi, l, |q1| {
        let mut b = Builder::new(r, "4b");
        b.mod2(Role::Precondition, "rho2(l) = w2(xi)", &r.rho2(l), &xi.w2);
        let name = "(p2 - q1^2)[M] = (q1 (q1 - Q + 2l^2 + c^2))[M] (mod 6)";
        match q1 {
            Some(q1) => {
                let (q, c) = (calc.q(), calc.c());
                let lhs = calc.poly(8, &[(1, &[&xi.p2]), (-1, &[q1, q1])])?;
                let rhs = calc.poly(8, &[(1, &[q1, q1]), (-1, &[q1, q]), (2, &[q1, l, l]), (1, &[q1, c, c])])?;
                b.congruence(name, (&lhs, 1), (&rhs, 1), 6)?;
            }
            None => b.skip(name, NO_Q1),
        }
        b.witness("l", l);
        b.finish()
    })
}

/// Sum of the two mod-3 congruences of the spin^c(4) criterion.
pub fn mod3_combination(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    let r = &m.ring;
    let calc = Calc { m };
    over_q1(r, xi, l, |q1| {
        let mut b = Builder::new(r, "mod3");
        b.mod2(Role::Precondition, "rho2(l) = w2(xi)", &r.rho2(l), &xi.w2);
        let name = "(q1^2 + q1 l^2 + p2 - q1 P)[M] = 0 (mod 3)";
        match q1 {
            Some(q1) => {
                let p = calc.p();
                let x = calc.poly(8, &[(1, &[q1, q1]), (1, &[q1, l, l]), (1, &[&xi.p2]), (-1, &[q1, p])])?;
                b.vanishes_mod(name, &x, 1, 3)?;
            }
            None => b.skip(name, NO_Q1),
        }
        b.witness("l", l);
        b.finish()
    })
}

// ---- Spin^c(6) -----------------------------------------------------------------------

pub fn spinc6_reduction(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass, v: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    need_degree("v", v, 6)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    over_q1(r, xi, l, |q1| {
        let mut b = Builder::new(r, "spinc6");
        b.mod2(Role::Precondition, "rho2(l) = w2(xi)", &r.rho2(l), &xi.w2);
        b.zero("e(xi) = 0", e);
        b.mod2(Role::Condition, "rho2(v) = w6(xi)", &r.rho2(v), &xi.w6);
        let name = "(1/2 (p2 - q1^2) + q1 (q1 - Q + 2l^2 + 3lc + c^2) + 3(l + c) v)[M] = 0 (mod 4)";
        match q1 {
            Some(q1) => {
                let (q, c) = (calc.q(), calc.c());
                // Everything doubled over the common denominator 2.
                let x = calc.poly(
                    8,
                    &[
                        (1, &[&xi.p2]),
                        (-1, &[q1, q1]),
                        (2, &[q1, q1]),
                        (-2, &[q1, q]),
                        (4, &[q1, l, l]),
                        (6, &[q1, l, c]),
                        (2, &[q1, c, c]),
                        (6, &[l, v]),
                        (6, &[c, v]),
                    ],
                )?;
                b.vanishes_mod(name, &x, 2, 4)?;
            }
            None => b.skip(name, NO_Q1),
        }
        b.witness("l", l);
        b.witness("v", v);
        b.finish()
    })
}

// ---- U(3) adjoint and SU(3) ------------------------------------------------------------

pub fn u3_adjoint(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass, u: &IntClass, v: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    need_degree("v", v, 6)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    let zero2 = r.zero(2);
    over_q1(r, xi, &zero2, |q1| {
        let mut b = Builder::new(r, "u3");
        b.zero2("w2(xi) = 0", &xi.w2);
        b.preconditionize_last();
        let v_lu = r.sub(v, &r.cup(l, u)?)?;
        match q1 {
            Some(q1) => {
                let rhs = calc.poly(4, &[(-3, &[u]), (1, &[l, l])])?;
                b.class(Role::Condition, "q1(xi) = -3u + l^2", q1, &rhs);
            }
            None => b.skip("q1(xi) = -3u + l^2", NO_Q1),
        }
        b.mod2(Role::Condition, "rho2(v - lu) = w6(xi)", &r.rho2(&v_lu), &xi.w6);
        match q1 {
            Some(q1) => {
                let sq = r.cup(q1, q1)?;
                b.class(Role::Condition, "p2 = q1^2", &xi.p2, &sq);
            }
            None => b.skip("p2 = q1^2", NO_Q1),
        }
        b.zero("e(xi) = 0", e);
        let (q, c) = (calc.q(), calc.c());
        let x = calc.poly(
            8,
            &[(1, &[u, u]), (1, &[u, q]), (-1, &[u, c, c]), (2, &[l, &v_lu]), (3, &[c, &v_lu])],
        )?;
        b.vanishes_mod("1/2 (u (u + Q - c^2) + (2l + 3c)(v - lu))[M] = 0 (mod 6)", &x, 2, 6)?;
        for (n, x) in [("l", l), ("u", u), ("v", v)] {
            b.witness(n, x);
        }
        b.finish()
    })
}

pub fn su3_structure(m: &ManifoldModel, xi: &RealBundleData, u: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("u", u, 4)?;
    let r = &m.ring;
    if !r.w2().is_zero() {
        return Err(Error::Unsupported(format!("{} is not spin", m.name)));
    }
    let calc = Calc { m };
    let e = euler(xi)?;
    let zero2 = r.zero(2);
    let tangent = m.tangent.as_real_bundle();
    let q_tau = q1_candidates(r, &tangent, &zero2)?;
    over_q1(r, xi, &zero2, |q1| {
        let mut b = Builder::new(r, "su3");
        b.zero2("w2(xi) = 0", &xi.w2);
        b.preconditionize_last();
        let lift = r.reduction_preimage(&xi.w6);
        b.push(Condition {
            name: "w6(xi) is the reduction of an integral class".into(),
            relation: "exists v".into(),
            role: Role::Condition,
            lhs: Value::mod2(&xi.w6),
            rhs: match &lift {
                Some(v) => Value::class(v),
                None => Value::text("no integral lift"),
            },
            modulus: None,
            passed: lift.is_some(),
        });
        if let Some(v) = &lift {
            b.witness("v", v);
        }
        b.zero("e(xi) = 0", e);
        match q1 {
            Some(q1) => {
                let rhs = r.scale(&BigInt::from(-3), u);
                b.class(Role::Condition, "q1(xi) = -3u", q1, &rhs);
                let nine = calc.poly(8, &[(9, &[u, u])])?;
                b.class(Role::Condition, "p2 = 9u^2", &xi.p2, &nine);
            }
            None => {
                b.skip("q1(xi) = -3u", NO_Q1);
                b.skip("p2 = 9u^2", NO_Q1);
            }
        }
        let x = calc.poly(8, &[(1, &[u, u]), (1, &[u, &q_tau[0]])])?;
        b.vanishes_mod("1/2 (u (u + q1(M)))[M] = 0 (mod 6)", &x, 2, 6)?;
        if q_tau.len() > 1 {
            b.note("q1(M) is ambiguous; the canonical halving was used");
        }
        b.witness("u", u);
        b.finish()
    })
}

impl Builder<'_> {
    /// Turns the most recent condition into a precondition.
    fn preconditionize_last(&mut self) {
        if let Some(c) = self.rep.conditions.pop() {
            self.rep.push(Condition {
                role: Role::Precondition,
                ..c
            });
        }
    }
}

// ---- H_lambda ------------------------------------------------------------------

fn lift_of_m(b: &mut Builder, ring: &Cohomology, l: &IntClass) -> bool {
    b.mod2(Role::Precondition, "rho2(l) = w2(M)", &ring.rho2(l), ring.w2())
}

/// Stable `H_lambda`-structure on a 4-dimensional complex bundle over `M - B`.
pub fn hlambda_stable_punctured(m: &ManifoldModel, z: &ComplexBundleData, l: &IntClass) -> Result<CheckReport> {
    need_degree("l", l, 2)?;
    let r = &m.ring;
    let calc = Calc { m };
    let mut b = Builder::new(r, "hlambda-stable");
    let two_l = r.scale(&BigInt::from(2), l);
    b.class(Role::Condition, "c1(z) = 2l", &z.c1, &two_l);
    let x = calc.poly(6, &[(1, &[&z.c3]), (-1, &[l, &z.c2]), (1, &[l, l, l])])?;
    b.zero("c3 - l c2 + l^3 = 0", &x);
    b.witness("l", l);
    b.finish()
}

/// `K` as a numerator over 4.
fn k_numerator(calc: &Calc, l: &IntClass, u: &IntClass) -> Result<IntClass> {
    let p = calc.p();
    calc.poly(
        8,
        &[(1, &[p, u]), (2, &[u, u]), (3, &[l, l, l, l]), (-1, &[l, l, p]), (-5, &[l, l, u])],
    )
}

/// Rank-2 `H_lambda`-bundle over `M` with `c_2 = u` and `c_4 = w`.
pub fn hlambda_realizable(m: &ManifoldModel, l: &IntClass, u: &IntClass, w: &IntClass) -> Result<CheckReport> {
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    need_degree("w", w, 8)?;
    let r = &m.ring;
    let calc = Calc { m };
    let mut b = Builder::new(r, "hlambda-bundle");
    lift_of_m(&mut b, r, l);
    let lu_l3 = calc.poly(6, &[(1, &[l, u]), (-1, &[l, l, l])])?;
    b.mod2(Role::Condition, "Sq2 rho2(u) = rho2(lu - l^3)", &r.sq2(&r.rho2(u))?, &r.rho2(&lu_l3));
    let k4 = k_numerator(&calc, l, u)?;
    b.congruence("w[M] = K (mod 12)", (w, 1), (&k4, 4), 12)?;
    for (n, x) in [("l", l), ("u", u), ("w", w)] {
        b.witness(n, x);
    }
    b.finish()
}

/// `H_lambda`-structure on a 4-dimensional complex bundle.
pub fn hlambda_on_complex(m: &ManifoldModel, z: &ComplexBundleData, l: &IntClass) -> Result<CheckReport> {
    need_degree("l", l, 2)?;
    let r = &m.ring;
    let calc = Calc { m };
    let mut b = Builder::new(r, "hlambda-complex");
    lift_of_m(&mut b, r, l);
    let two_l = r.scale(&BigInt::from(2), l);
    b.class(Role::Condition, "c1 = 2l", &z.c1, &two_l);
    let x = calc.poly(6, &[(1, &[&z.c3]), (-1, &[l, &z.c2]), (1, &[l, l, l])])?;
    b.zero("c3 - l c2 + l^3 = 0", &x);
    let k4 = k_numerator(&calc, l, &z.c2)?;
    b.congruence("K = c4[M] (mod 4)", (&k4, 4), (&z.c4, 1), 4)?;
    b.witness("l", l);
    b.finish()
}

/// `H_lambda`-line bundle with `c_2 = u`.
pub fn hlambda_line_exists(m: &ManifoldModel, l: &IntClass, u: &IntClass) -> Result<CheckReport> {
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    let r = &m.ring;
    let calc = Calc { m };
    let mut b = Builder::new(r, "hlambda-line");
    lift_of_m(&mut b, r, l);
    b.mod2(Role::Condition, "Sq2 rho2(u) = rho2(lu)", &r.sq2(&r.rho2(u))?, &r.rho2(&r.cup(l, u)?));
    let p = calc.p();
    let x = calc.poly(8, &[(1, &[p, u]), (2, &[u, u]), (-1, &[l, l, u])])?;
    b.vanishes_mod("1/4 (P u + 2u^2 - l^2 u)[M] = 0 (mod 12)", &x, 4, 12)?;
    b.witness("l", l);
    b.witness("u", u);
    b.finish()
}

/// `1/4 (u (P + s*2u - l^2))` numerator, `s = +1` or `-1`.
fn line_quarter(calc: &Calc, l: &IntClass, u: &IntClass, sign: i64) -> Result<IntClass> {
    let p = calc.p();
    calc.poly(8, &[(1, &[u, p]), (2 * sign, &[u, u]), (-1, &[u, l, l])])
}

// ---- Spin^c(4), Spin^c(3) --------------------------------------------------------

pub fn spinc4_reduction(
    m: &ManifoldModel,
    xi: &RealBundleData,
    l: &IntClass,
    u_plus: &IntClass,
    u_minus: &IntClass,
) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    need_degree("u+", u_plus, 4)?;
    need_degree("u-", u_minus, 4)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    over_q1(r, xi, l, |q1| {
        let mut b = Builder::new(r, "spinc4");
        b.mod2(Role::Precondition, "rho2(l) = w2(xi)", &r.rho2(l), &xi.w2);
        lift_of_m(&mut b, r, l);
        let sum = r.neg(&r.add(u_plus, u_minus)?);
        match q1 {
            Some(q1) => {
                b.class(Role::Condition, "q1(xi; l) = -(u+ + u-)", q1, &sum);
            }
            None => b.skip("q1(xi; l) = -(u+ + u-)", NO_Q1),
        }
        b.zero2("w6(xi) = 0", &xi.w6);
        b.mod2(
            Role::Condition,
            "Sq2 rho2(u+) = rho2(l u+)",
            &r.sq2(&r.rho2(u_plus))?,
            &r.rho2(&r.cup(l, u_plus)?),
        );
        b.zero("e(xi) = 0", e);
        let diff = r.sub(u_plus, u_minus)?;
        let sq = r.cup(&diff, &diff)?;
        b.class(Role::Condition, "p2 = (u+ - u-)^2", &xi.p2, &sq);
        let xp = line_quarter(&calc, l, u_plus, 1)?;
        b.vanishes_mod("1/4 (u+ (P + 2u+ - l^2))[M] = 0 (mod 12)", &xp, 4, 12)?;
        let xm = line_quarter(&calc, l, u_minus, 1)?;
        let ok = b.vanishes_mod("1/4 (u- (P + 2u- - l^2))[M] = 0 (mod 4)", &xm, 4, 4)?;
        if ok && b.rep.verdict.is_pass() {
            let v = r.eval_rational(&xm, &BigInt::from(4))?;
            if let Some(n) = v.integer() {
                let res = n.mod_floor(&BigInt::from(12));
                if res.is_zero() {
                    b.note("the u- congruence also holds mod 12");
                } else {
                    b.note(format!("the u- expression is {res} mod 12, although it should vanish mod 12 once every condition holds"));
                }
            }
        }
        for (n, x) in [("l", l), ("u+", u_plus), ("u-", u_minus)] {
            b.witness(n, x);
        }
        b.finish()
    })
}

/// 3-dimensional bundle `alpha` with `w_2 = rho2(l)` and `q_1(alpha; l) = 2u`.
pub fn three_dim_bundle_exists(m: &ManifoldModel, l: &IntClass, u: &IntClass) -> Result<CheckReport> {
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    let r = &m.ring;
    let calc = Calc { m };
    let mut b = Builder::new(r, "3dim");
    lift_of_m(&mut b, r, l);
    b.mod2(Role::Condition, "Sq2 rho2(u) = rho2(lu)", &r.sq2(&r.rho2(u))?, &r.rho2(&r.cup(l, u)?));
    let x = line_quarter(&calc, l, u, -1)?;
    b.vanishes_mod("1/4 u (P - 2u - l^2)[M] = 0 (mod 12)", &x, 4, 12)?;
    b.witness("l", l);
    b.witness("u", u);
    b.finish()
}

pub fn spinc3_reduction(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass, u: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    over_q1(r, xi, l, |q1| {
        let mut b = Builder::new(r, "spinc3");
        b.mod2(Role::Precondition, "rho2(l) = w2(xi)", &r.rho2(l), &xi.w2);
        lift_of_m(&mut b, r, l);
        let two_u = r.scale(&BigInt::from(2), u);
        match q1 {
            Some(q1) => {
                b.class(Role::Condition, "q1(xi; l) = 2u", q1, &two_u);
            }
            None => b.skip("q1(xi; l) = 2u", NO_Q1),
        }
        b.zero2("w6(xi) = 0", &xi.w6);
        b.mod2(Role::Condition, "Sq2 rho2(u) = rho2(lu)", &r.sq2(&r.rho2(u))?, &r.rho2(&r.cup(l, u)?));
        b.zero("e(xi) = 0", e);
        b.zero("p2(xi) = 0", &xi.p2);
        let x = line_quarter(&calc, l, u, -1)?;
        b.vanishes_mod("1/4 (u (P - 2u - l^2))[M] = 0 (mod 4)", &x, 4, 4)?;
        b.witness("l", l);
        b.witness("u", u);
        b.finish()
    })
}

// ---- H_lambda and H_alpha on real bundles ------------------------------------------

/// `w_6 + w_4 rho2(l) + rho2(l^3)`.
fn w6_combination(r: &Cohomology, xi: &RealBundleData, l: &IntClass) -> Result<Mod2Class> {
    let l3 = r.cup(l, &r.cup(l, l)?)?;
    let a = r.add2(&xi.w6, &r.cup2(&xi.w4, &r.rho2(l))?)?;
    r.add2(&a, &r.rho2(&l3))
}

pub fn hlambda_on_real(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    let zero2 = r.zero(2);
    over_q1(r, xi, &zero2, |q1| {
        let mut b = Builder::new(r, "hlambda");
        lift_of_m(&mut b, r, l);
        b.zero2("a) w2(xi) = 0", &xi.w2);
        let w2m = r.w2();
        let rhs = r.cup2(w2m, &r.add2(&xi.w4, &r.cup2(w2m, w2m)?)?)?;
        b.mod2(Role::Condition, "a) w6(xi) = w2(M)(w4(xi) + w2(M)^2)", &xi.w6, &rhs);
        let name_b = "b) 1/2 (p2 - q1^2)[M] = 1/4 (2q1^2 - P q1 + l^2 (P - 3q1 + l^2))[M] (mod 4)";
        let name_c = "c) 2e = p2 - q1^2";
        match q1 {
            Some(q1) => {
                let p = calc.p();
                let d = calc.poly(8, &[(1, &[&xi.p2]), (-1, &[q1, q1])])?;
                let quarter = calc.poly(
                    8,
                    &[(2, &[q1, q1]), (-1, &[p, q1]), (1, &[l, l, p]), (-3, &[l, l, q1]), (1, &[l, l, l, l])],
                )?;
                b.congruence(name_b, (&d, 2), (&quarter, 4), 4)?;
                let two_e = r.scale(&BigInt::from(2), e);
                b.class(Role::Condition, name_c, &two_e, &d);
            }
            None => {
                b.skip(name_b, "q1(xi) undefined: xi is not spin");
                b.skip(name_c, "q1(xi) undefined: xi is not spin");
            }
        }
        b.witness("l", l);
        b.finish()
    })
}

/// The degree-4 remainder of the `H_alpha` and 3-subbundle criteria, over 4.
fn alpha_tail(calc: &Calc, q1: &IntClass, l: &IntClass, u: &IntClass) -> Result<Vec<(i64, Vec<IntClass>)>> {
    let p = calc.p().clone();
    let (q1, l, u) = (q1.clone(), l.clone(), u.clone());
    Ok(vec![
        (-1, vec![q1.clone(), p.clone()]),
        (-3, vec![l.clone(), l.clone(), q1.clone()]),
        (1, vec![l.clone(), l.clone(), p.clone()]),
        (1, vec![l.clone(), l.clone(), l.clone(), l.clone()]),
        (20, vec![u.clone(), u.clone()]),
        (10, vec![u.clone(), l.clone(), l.clone()]),
        (2, vec![u.clone(), p]),
        (-12, vec![q1, u]),
    ])
}

fn poly_owned(calc: &Calc, degree: usize, terms: &[(i64, Vec<IntClass>)]) -> Result<IntClass> {
    let refs: Vec<(i64, Vec<&IntClass>)> = terms.iter().map(|(n, v)| (*n, v.iter().collect())).collect();
    let slices: Vec<(i64, &[&IntClass])> = refs.iter().map(|(n, v)| (*n, v.as_slice())).collect();
    calc.poly(degree, &slices)
}

pub fn halpha_structure(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass, u: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    let zero2 = r.zero(2);
    over_q1(r, xi, &zero2, |q1| {
        let mut b = Builder::new(r, "halpha");
        lift_of_m(&mut b, r, l);
        b.zero2("w2(xi) = 0", &xi.w2);
        let name_e = "p2 - q1^2 - 2e = 0";
        let name_big = "1/4 (4q1^2 - 2p2 - q1 P - 3l^2 q1 + l^2 P + l^4 + u(20u + 10l^2 + 2P) - 12 q1 u)[M] = 0 (mod 4)";
        match q1 {
            Some(q1) => {
                let x = calc.poly(8, &[(1, &[&xi.p2]), (-1, &[q1, q1]), (-2, &[e])])?;
                b.zero(name_e, &x);
            }
            None => b.skip(name_e, "q1(xi) undefined: xi is not spin"),
        }
        b.zero2("w6 + w4 rho2(l) + rho2(l^3) = 0", &w6_combination(r, xi, l)?);
        b.mod2(Role::Condition, "Sq2 rho2(u) = rho2(lu)", &r.sq2(&r.rho2(u))?, &r.rho2(&r.cup(l, u)?));
        let x = line_quarter(&calc, l, u, -1)?;
        b.vanishes_mod("1/4 (u (P - 2u - l^2))[M] = 0 (mod 12)", &x, 4, 12)?;
        match q1 {
            Some(q1) => {
                let mut terms = alpha_tail(&calc, q1, l, u)?;
                terms.push((4, vec![q1.clone(), q1.clone()]));
                terms.push((-2, vec![xi.p2.clone()]));
                let big = poly_owned(&calc, 8, &terms)?;
                b.vanishes_mod(name_big, &big, 4, 4)?;
            }
            None => b.skip(name_big, "q1(xi) undefined: xi is not spin"),
        }
        b.witness("l", l);
        b.witness("u", u);
        b.finish()
    })
}

// ---- Spin^c(5), 5- and 3-dimensional bundles ---------------------------------------

pub fn spinc5_reduction(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    over_q1(r, xi, l, |q1| {
        let mut b = Builder::new(r, "spinc5");
        b.mod2(Role::Precondition, "rho2(l) = w2(xi)", &r.rho2(l), &xi.w2);
        lift_of_m(&mut b, r, l);
        b.zero2("w6(xi) = 0", &xi.w6);
        b.zero("e(xi) = 0", e);
        let name = "(1/2 (p2 - q1^2) + 1/2 (2q1^2 - q1 P + q1 l^2))[M] = 0 (mod 8)";
        match q1 {
            Some(q1) => {
                let p = calc.p();
                let x = calc.poly(8, &[(1, &[&xi.p2]), (1, &[q1, q1]), (-1, &[q1, p]), (1, &[q1, l, l])])?;
                b.vanishes_mod(name, &x, 2, 8)?;
            }
            None => b.skip(name, NO_Q1),
        }
        b.witness("l", l);
        b.finish()
    })
}

/// 5-dimensional bundle `beta` with `w_2 = rho2(l)`, `q_1(beta; l) = u`, `p_2 = z`.
pub fn five_dim_bundle_exists(m: &ManifoldModel, l: &IntClass, u: &IntClass, z: &IntClass) -> Result<CheckReport> {
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    need_degree("z", z, 8)?;
    let r = &m.ring;
    let calc = Calc { m };
    let mut b = Builder::new(r, "5dim");
    lift_of_m(&mut b, r, l);
    b.mod2(Role::Condition, "Sq2 rho2(u) = rho2(lu)", &r.sq2(&r.rho2(u))?, &r.rho2(&r.cup(l, u)?));
    let target = r.sub(&r.cup(u, u)?, z)?;
    let sols = r.divide_exact(&target, &BigInt::from(4));
    b.push(Condition {
        name: "4w = u^2 - z solvable".into(),
        relation: "exists w".into(),
        role: Role::Condition,
        lhs: Value::class(&target),
        rhs: Value::int(4),
        modulus: None,
        passed: !sols.is_empty(),
    });
    let name = "w[M] = 1/4 u (2u - P + l^2)[M] (mod 12)";
    let p = calc.p();
    let rhs = calc.poly(8, &[(2, &[u, u]), (-1, &[u, p]), (1, &[u, l, l])])?;
    match sols.first() {
        Some(w) => {
            // Solutions differ by torsion, which [M] does not see.
            b.congruence(name, (w, 1), (&rhs, 4), 12)?;
            b.witness("w", w);
            if sols.len() > 1 {
                b.note(format!("{} solutions of 4w = u^2 - z; all have the same value on [M]", sols.len()));
            }
        }
        None => b.skip(name, "no w with 4w = u^2 - z"),
    }
    for (n, x) in [("l", l), ("u", u), ("z", z)] {
        b.witness(n, x);
    }
    b.finish()
}

pub fn three_subbundle(m: &ManifoldModel, xi: &RealBundleData, l: &IntClass, u: &IntClass) -> Result<CheckReport> {
    check_dim8(xi)?;
    need_degree("l", l, 2)?;
    need_degree("u", u, 4)?;
    let r = &m.ring;
    let calc = Calc { m };
    let e = euler(xi)?;
    let zero2 = r.zero(2);
    over_q1(r, xi, &zero2, |q1| {
        let mut b = Builder::new(r, "3sub");
        lift_of_m(&mut b, r, l);
        b.zero2("w2(xi) = 0", &xi.w2);
        b.preconditionize_last();
        b.zero("e(xi) = 0", e);
        b.zero2("w6 + w4 rho2(l) + rho2(l^3) = 0", &w6_combination(r, xi, l)?);
        b.mod2(Role::Condition, "Sq2 rho2(u) = rho2(lu)", &r.sq2(&r.rho2(u))?, &r.rho2(&r.cup(l, u)?));
        let x = line_quarter(&calc, l, u, -1)?;
        b.vanishes_mod("1/4 (u (P - 2u - l^2))[M] = 0 (mod 12)", &x, 4, 12)?;
        let name = "1/4 (p2 + q1^2 - q1 P - 3l^2 q1 + l^2 P + l^4 + u(20u + 10l^2 + 2P - 12 q1))[M] = 0 (mod 4)";
        match q1 {
            Some(q1) => {
                let mut terms = alpha_tail(&calc, q1, l, u)?;
                terms.push((1, vec![q1.clone(), q1.clone()]));
                terms.push((1, vec![xi.p2.clone()]));
                let big = poly_owned(&calc, 8, &terms)?;
                b.vanishes_mod(name, &big, 4, 4)?;
            }
            None => b.skip(name, "q1(xi) undefined: xi is not spin"),
        }
        b.witness("l", l);
        b.witness("u", u);
        b.finish()
    })
}

// ---- triality ----------------------------------------------------------------------------

/// Image of a spin 8-dimensional bundle under the triality automorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialityImage {
    pub q1: IntClass,
    pub q2: IntClass,
    pub image: RealBundleData,
    pub image_q2: IntClass,
    /// More than one `q_2` solves `4 q_2 = p_2 - q_1^2 - 2e`.
    pub ambiguous: bool,
}

pub fn triality_transform(ring: &Cohomology, xi: &RealBundleData) -> Result<TrialityImage> {
    check_dim8(xi)?;
    if !xi.w2.is_zero() {
        return Err(Error::Inconsistent("triality needs w2(xi) = 0".into()));
    }
    let zero2 = ring.zero(2);
    let q1 = q1_candidates(ring, xi, &zero2)?.remove(0);
    let e = euler(xi)?;
    let q1sq = ring.cup(&q1, &q1)?;
    let rest = ring.combo(&[(1, &xi.p2), (-1, &q1sq), (-2, e)])?;
    let sols = ring.divide_exact(&rest, &BigInt::from(4));
    let Some(q2) = sols.first().cloned() else {
        return Err(Error::NotDivisible {
            what: format!("p2 - q1^2 - 2e = {}", ring.display(&rest)),
            divisor: "4".into(),
        });
    };
    let e_new = ring.neg(&q2);
    let q2_new = ring.neg(e);
    let p2_new = ring.combo(&[(1, &q1sq), (2, &e_new), (4, &q2_new)])?;
    let image = RealBundleData {
        p2: p2_new,
        e: Some(e_new),
        q1: Some(crate::bundles::SpinLift {
            lift: zero2,
            q1: q1.clone(),
        }),
        ..xi.clone()
    };
    Ok(TrialityImage {
        q1,
        q2,
        image,
        image_q2: q2_new,
        ambiguous: sols.len() > 1,
    })
}

// ---- dispatcher ------------------------------------------------------------------------------

/// Criterion names as used on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CriterionKind {
    Complex,
    Spinc6,
    Spinc5,
    Spinc4,
    Spinc3,
    U3,
    Su3,
    Hlambda,
    HlambdaLine,
    Halpha,
    ThreeSub,
    FiveDim,
    ThreeDim,
    Chern,
    Iso,
    ChernPunctured,
    Stable,
    HlambdaBundle,
    HlambdaComplex,
    HlambdaStable,
    Congruence4b,
    Mod3,
}

/// Where a criterion takes its bundle from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BundleInput {
    None,
    Real,
    RealPair,
    Complex,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 22] = [
        CriterionKind::Complex,
        CriterionKind::Spinc6,
        CriterionKind::Spinc5,
        CriterionKind::Spinc4,
        CriterionKind::Spinc3,
        CriterionKind::U3,
        CriterionKind::Su3,
        CriterionKind::Hlambda,
        CriterionKind::HlambdaLine,
        CriterionKind::Halpha,
        CriterionKind::ThreeSub,
        CriterionKind::FiveDim,
        CriterionKind::ThreeDim,
        CriterionKind::Chern,
        CriterionKind::Iso,
        CriterionKind::ChernPunctured,
        CriterionKind::Stable,
        CriterionKind::HlambdaBundle,
        CriterionKind::HlambdaComplex,
        CriterionKind::HlambdaStable,
        CriterionKind::Congruence4b,
        CriterionKind::Mod3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Complex => "complex",
            CriterionKind::Spinc6 => "spinc6",
            CriterionKind::Spinc5 => "spinc5",
            CriterionKind::Spinc4 => "spinc4",
            CriterionKind::Spinc3 => "spinc3",
            CriterionKind::U3 => "u3",
            CriterionKind::Su3 => "su3",
            CriterionKind::Hlambda => "hlambda",
            CriterionKind::HlambdaLine => "hlambda-line",
            CriterionKind::Halpha => "halpha",
            CriterionKind::ThreeSub => "3sub",
            CriterionKind::FiveDim => "5dim",
            CriterionKind::ThreeDim => "3dim",
            CriterionKind::Chern => "chern",
            CriterionKind::Iso => "iso",
            CriterionKind::ChernPunctured => "chern-punctured",
            CriterionKind::Stable => "stable",
            CriterionKind::HlambdaBundle => "hlambda-bundle",
            CriterionKind::HlambdaComplex => "hlambda-complex",
            CriterionKind::HlambdaStable => "hlambda-stable",
            CriterionKind::Congruence4b => "4b",
            CriterionKind::Mod3 => "mod3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown criterion `{s}`")))
    }

    /// Witness class slots and their degrees.
    pub fn slots(self) -> &'static [(&'static str, usize)] {
        use CriterionKind::*;
        match self {
            Complex | Spinc6 => &[("l", 2), ("v", 6)],
            Spinc5 | Hlambda | Iso | Stable | Congruence4b | Mod3 | HlambdaComplex | HlambdaStable => &[("l", 2)],
            Spinc4 => &[("l", 2), ("u_plus", 4), ("u_minus", 4)],
            Spinc3 | Halpha | ThreeSub | HlambdaLine | ThreeDim => &[("l", 2), ("u", 4)],
            U3 => &[("l", 2), ("u", 4), ("v", 6)],
            Su3 => &[("u", 4)],
            FiveDim => &[("l", 2), ("u", 4), ("z", 8)],
            Chern => &[("l", 2), ("u", 4), ("v", 6), ("w", 8)],
            ChernPunctured => &[("l", 2), ("u", 4), ("v", 6)],
            HlambdaBundle => &[("l", 2), ("u", 4), ("w", 8)],
        }
    }

    pub fn bundle(self) -> BundleInput {
        use CriterionKind::*;
        match self {
            Complex | Spinc6 | Spinc5 | Spinc4 | Spinc3 | U3 | Su3 | Hlambda | Halpha | ThreeSub | Congruence4b | Mod3 => {
                BundleInput::Real
            }
            Iso | Stable => BundleInput::RealPair,
            HlambdaComplex | HlambdaStable => BundleInput::Complex,
            HlambdaLine | FiveDim | ThreeDim | Chern | ChernPunctured | HlambdaBundle => BundleInput::None,
        }
    }

    /// Largest modulus in any congruence of the criterion.
    pub fn max_modulus(self) -> u64 {
        use CriterionKind::*;
        match self {
            Complex => 2,
            Spinc6 | Spinc3 | Hlambda | HlambdaComplex => 4,
            Spinc5 => 8,
            Chern | U3 | Su3 | Congruence4b => 6,
            Spinc4 | HlambdaLine | Halpha | ThreeSub | FiveDim | ThreeDim | HlambdaBundle => 12,
            Mod3 => 3,
            Iso | Stable | ChernPunctured | HlambdaStable => 1,
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs of a single criterion evaluation.
#[derive(Clone, Debug, Default)]
pub struct Inputs {
    pub xi: Option<RealBundleData>,
    pub other: Option<RealBundleData>,
    pub complex: Option<ComplexBundleData>,
    pub classes: BTreeMap<String, IntClass>,
}

impl Inputs {
    fn class(&self, name: &str) -> Result<&IntClass> {
        self.classes
            .get(name)
            .ok_or_else(|| Error::MissingInput(format!("class `{name}`")))
    }

    fn real(&self) -> Result<&RealBundleData> {
        self.xi.as_ref().ok_or_else(|| Error::MissingInput("real bundle".into()))
    }

    fn second(&self) -> Result<&RealBundleData> {
        self.other
            .as_ref()
            .ok_or_else(|| Error::MissingInput("second real bundle".into()))
    }

    fn complex(&self) -> Result<&ComplexBundleData> {
        self.complex
            .as_ref()
            .ok_or_else(|| Error::MissingInput("complex bundle".into()))
    }
}

/// Evaluates a criterion by name.
pub fn evaluate(kind: CriterionKind, m: &ManifoldModel, inp: &Inputs) -> Result<CheckReport> {
    use CriterionKind::*;
    let c = |n: &str| inp.class(n);
    match kind {
        Complex => complex_structure(m, inp.real()?, c("l")?, c("v")?),
        Spinc6 => spinc6_reduction(m, inp.real()?, c("l")?, c("v")?),
        Spinc5 => spinc5_reduction(m, inp.real()?, c("l")?),
        Spinc4 => spinc4_reduction(m, inp.real()?, c("l")?, c("u_plus")?, c("u_minus")?),
        Spinc3 => spinc3_reduction(m, inp.real()?, c("l")?, c("u")?),
        U3 => u3_adjoint(m, inp.real()?, c("l")?, c("u")?, c("v")?),
        Su3 => su3_structure(m, inp.real()?, c("u")?),
        Hlambda => hlambda_on_real(m, inp.real()?, c("l")?),
        HlambdaLine => hlambda_line_exists(m, c("l")?, c("u")?),
        Halpha => halpha_structure(m, inp.real()?, c("l")?, c("u")?),
        ThreeSub => three_subbundle(m, inp.real()?, c("l")?, c("u")?),
        FiveDim => five_dim_bundle_exists(m, c("l")?, c("u")?, c("z")?),
        ThreeDim => three_dim_bundle_exists(m, c("l")?, c("u")?),
        Chern => chern_realizable_closed(m, c("l")?, c("u")?, c("v")?, c("w")?),
        Iso => isomorphic_oriented(m, inp.real()?, inp.second()?, c("l")?),
        ChernPunctured => chern_realizable_punctured(m, c("l")?, c("u")?, c("v")?),
        Stable => stably_isomorphic(m, inp.real()?, inp.second()?, c("l")?),
        HlambdaBundle => hlambda_realizable(m, c("l")?, c("u")?, c("w")?),
        HlambdaComplex => hlambda_on_complex(m, inp.complex()?, c("l")?),
        HlambdaStable => hlambda_stable_punctured(m, inp.complex()?, c("l")?),
        Congruence4b => congruence_4b(m, inp.real()?, c("l")?),
        Mod3 => mod3_combination(m, inp.real()?, c("l")?),
    }
}

/// Rational value of `num[M] / den`, exposed for diagnostics.
pub fn evaluate_fraction(ring: &Cohomology, num: &IntClass, den: i64) -> Result<BigRational> {
    Ok(ring.eval_rational(num, &BigInt::from(den))?.value)
}
