//! Characteristic-class data of real and complex bundles over a fixed model,
//! the `q_1` calculus and the spin^c index.
//!
//! Every constructor here only manipulates classes; no bundle is ever built.
//! For a real bundle with `w_2 = rho2(l)` the class `q_1(xi; l)` is defined by
//! `2 q_1 = p_1 - l^2` together with `rho2(q_1) = w_4`. When `H^4` has even
//! torsion the halving is not unique and callers iterate over
//! [`q1_candidates`].

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cohomology::{Cohomology, IntClass, Mod2Class};
use crate::error::{Error, Result};
use crate::report::{CheckReport, Condition, Role, Value};
use crate::serde_int::big_opt;

/// A chosen integral lift `l` of `w_2` and the class `q_1(xi; l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinLift {
    pub lift: IntClass,
    pub q1: IntClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealBundleData {
    pub dim: usize,
    pub w2: Mod2Class,
    pub w4: Mod2Class,
    pub w6: Mod2Class,
    pub p1: IntClass,
    pub p2: IntClass,
    /// Euler class in degree `dim`, carried for even `dim` in `4..=8`.
    pub e: Option<IntClass>,
    pub spin: Option<bool>,
    pub q1: Option<SpinLift>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexBundleData {
    pub rank: usize,
    pub c1: IntClass,
    pub c2: IntClass,
    pub c3: IntClass,
    pub c4: IntClass,
}

/// Tangent data of the model together with its spin^c class `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangentData {
    pub c: IntClass,
    pub p1: IntClass,
    pub q1_c: IntClass,
    pub p2: IntClass,
    pub e: IntClass,
    pub w2: Mod2Class,
    pub w4: Mod2Class,
    pub w6: Mod2Class,
    #[serde(with = "crate::serde_int::big")]
    pub chi: BigInt,
    #[serde(with = "big_opt", default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<BigInt>,
    /// Chern classes of an almost complex structure, when one is recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chern: Option<ComplexBundleData>,
}

/// All halvings of `p_1 - l^2`, canonical first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q1Halving {
    pub all: Vec<IntClass>,
}

impl Q1Halving {
    pub fn canonical(&self) -> &IntClass {
        &self.all[0]
    }

    pub fn ambiguous(&self) -> bool {
        self.all.len() > 1
    }
}

fn expect_degree(x: &IntClass, d: usize) -> Result<()> {
    if x.degree() == d {
        Ok(())
    } else {
        Err(Error::WrongDegree {
            expected: d,
            found: x.degree(),
        })
    }
}

/// `q_1` with `2 q_1 = p_1 - l^2`.
pub fn q1_from_lift(ring: &Cohomology, p1: &IntClass, l: &IntClass) -> Result<Q1Halving> {
    expect_degree(p1, 4)?;
    expect_degree(l, 2)?;
    let diff = ring.sub(p1, &ring.cup(l, l)?)?;
    let all = ring.halve(&diff);
    if all.is_empty() {
        return Err(Error::NotDivisible {
            what: format!("p1 - l^2 = {}", ring.display(&diff)),
            divisor: "2".into(),
        });
    }
    Ok(Q1Halving { all })
}

/// `q_1(xi; l + 2m) = q_1(xi; l) - 2lm - 2m^2`.
pub fn rebase_lift(ring: &Cohomology, q1: &IntClass, l: &IntClass, m: &IntClass) -> Result<IntClass> {
    let lm = ring.cup(l, m)?;
    let mm = ring.cup(m, m)?;
    ring.combo(&[(1, q1), (-2, &lm), (-2, &mm)])
}

/// Every admissible `q_1(xi; l)`, given `rho2(l) = w_2(xi)`.
///
/// A stored lift is transported by [`rebase_lift`]; otherwise `p_1 - l^2` is
/// halved. Candidates must reduce to `w_4(xi)`.
pub fn q1_candidates(ring: &Cohomology, xi: &RealBundleData, l: &IntClass) -> Result<Vec<IntClass>> {
    expect_degree(l, 2)?;
    let mut out: Vec<IntClass> = Vec::new();
    let stored = xi.q1.as_ref().and_then(|s| {
        let diff = ring.sub(l, &s.lift).ok()?;
        let ms = ring.halve(&diff);
        (!ms.is_empty()).then_some((s, ms))
    });
    if let Some((s, ms)) = stored {
        for m in ms {
            let q = rebase_lift(ring, &s.q1, &s.lift, &m)?;
            if !out.contains(&q) {
                out.push(q);
            }
        }
    } else {
        out = q1_from_lift(ring, &xi.p1, l)?.all;
    }
    out.retain(|q| ring.rho2(q) == xi.w4);
    if out.is_empty() {
        return Err(Error::Inconsistent(format!(
            "no halving of p1 - l^2 reduces to w4 = {}",
            ring.display_mod2(&xi.w4)
        )));
    }
    Ok(out)
}

impl ComplexBundleData {
    pub fn trivial(ring: &Cohomology, rank: usize) -> Self {
        ComplexBundleData {
            rank,
            c1: ring.zero(2),
            c2: ring.zero(4),
            c3: ring.zero(6),
            c4: ring.zero(8),
        }
    }

    pub fn line(ring: &Cohomology, c1: &IntClass) -> Result<Self> {
        expect_degree(c1, 2)?;
        Ok(ComplexBundleData {
            c1: c1.clone(),
            ..Self::trivial(ring, 1)
        })
    }

    pub fn new(rank: usize, c1: IntClass, c2: IntClass, c3: IntClass, c4: IntClass) -> Result<Self> {
        expect_degree(&c1, 2)?;
        expect_degree(&c2, 4)?;
        expect_degree(&c3, 6)?;
        expect_degree(&c4, 8)?;
        Ok(ComplexBundleData { rank, c1, c2, c3, c4 })
    }

    pub fn classes(&self) -> [&IntClass; 4] {
        [&self.c1, &self.c2, &self.c3, &self.c4]
    }

    /// Whitney sum, `c(a + b) = c(a) c(b)`.
    pub fn whitney_sum(ring: &Cohomology, a: &Self, b: &Self) -> Result<Self> {
        let ca = total(ring, a);
        let cb = total(ring, b);
        let mut c: Vec<IntClass> = Vec::new();
        for n in 1..=4 {
            let mut acc = ring.zero(2 * n);
            for i in 0..=n {
                acc = ring.add(&acc, &ring.cup(&ca[i], &cb[n - i])?)?;
            }
            c.push(acc);
        }
        let [c1, c2, c3, c4]: [IntClass; 4] = c.try_into().expect("four classes");
        Ok(ComplexBundleData {
            rank: a.rank + b.rank,
            c1,
            c2,
            c3,
            c4,
        })
    }
}

fn total(ring: &Cohomology, z: &ComplexBundleData) -> Vec<IntClass> {
    vec![ring.one(), z.c1.clone(), z.c2.clone(), z.c3.clone(), z.c4.clone()]
}

impl RealBundleData {
    /// The trivial bundle of the given dimension (spin, lift 0).
    pub fn trivial(ring: &Cohomology, dim: usize) -> Self {
        RealBundleData {
            dim,
            w2: ring.mod2_zero(2),
            w4: ring.mod2_zero(4),
            w6: ring.mod2_zero(6),
            p1: ring.zero(4),
            p2: ring.zero(8),
            e: euler_degree(dim).map(|d| ring.zero(d)),
            spin: Some(true),
            q1: Some(SpinLift {
                lift: ring.zero(2),
                q1: ring.zero(4),
            }),
        }
    }

    pub fn euler(&self) -> Option<&IntClass> {
        self.e.as_ref()
    }

    /// Checks the internal consistency of the data.
    pub fn validate(&self, ring: &Cohomology) -> Result<CheckReport> {
        let mut rep = CheckReport::new("bundle data");
        let sq = ring.sq2(&self.w4)?;
        let rhs = ring.add2(&self.w6, &ring.cup2(&self.w2, &self.w4)?)?;
        rep.push(mod2_condition("Sq2 w4 = w6 + w2 w4", &sq, &rhs));
        if let Some(s) = &self.q1 {
            rep.push(mod2_condition("rho2(l) = w2", &ring.rho2(&s.lift), &self.w2));
            let twice = ring.scale(&BigInt::from(2), &s.q1);
            let expected = ring.sub(&self.p1, &ring.cup(&s.lift, &s.lift)?)?;
            rep.push(class_condition("2 q1 = p1 - l^2", &twice, &expected));
            rep.push(mod2_condition("rho2(q1) = w4", &ring.rho2(&s.q1), &self.w4));
            if self.dim == 8 {
                let d = ring.sub(&self.p2, &ring.cup(&s.q1, &s.q1)?)?;
                let ok = !ring.halve(&d).is_empty();
                rep.push(Condition {
                    name: "p2 - q1^2 divisible by 2".into(),
                    relation: "2 | x".into(),
                    role: Role::Condition,
                    lhs: Value::class(&d),
                    rhs: Value::int(2),
                    modulus: None,
                    passed: ok,
                });
            }
        }
        if let Some(e) = &self.e {
            if Some(e.degree()) != euler_degree(self.dim) {
                return Err(Error::WrongDegree {
                    expected: self.dim,
                    found: e.degree(),
                });
            }
        }
        Ok(rep)
    }
}

fn euler_degree(dim: usize) -> Option<usize> {
    (dim % 2 == 0 && (4..=8).contains(&dim)).then_some(dim)
}

pub(crate) fn class_condition(name: &str, lhs: &IntClass, rhs: &IntClass) -> Condition {
    Condition {
        name: name.into(),
        relation: "=".into(),
        role: Role::Condition,
        lhs: Value::class(lhs),
        rhs: Value::class(rhs),
        modulus: None,
        passed: lhs == rhs,
    }
}

pub(crate) fn mod2_condition(name: &str, lhs: &Mod2Class, rhs: &Mod2Class) -> Condition {
    Condition {
        name: name.into(),
        relation: "=".into(),
        role: Role::Condition,
        lhs: Value::mod2(lhs),
        rhs: Value::mod2(rhs),
        modulus: None,
        passed: lhs == rhs,
    }
}

/// Underlying real bundle: `p_1 = c_1^2 - 2c_2`, `p_2 = c_2^2 - 2c_1c_3 + 2c_4`.
pub fn realify(ring: &Cohomology, z: &ComplexBundleData) -> Result<RealBundleData> {
    let c1sq = ring.cup(&z.c1, &z.c1)?;
    let p1 = ring.combo(&[(1, &c1sq), (-2, &z.c2)])?;
    let c2sq = ring.cup(&z.c2, &z.c2)?;
    let c1c3 = ring.cup(&z.c1, &z.c3)?;
    let p2 = ring.combo(&[(1, &c2sq), (-2, &c1c3), (2, &z.c4)])?;
    let dim = 2 * z.rank;
    let e = match z.rank {
        2 => Some(z.c2.clone()),
        3 => Some(z.c3.clone()),
        4 => Some(z.c4.clone()),
        _ => None,
    };
    Ok(RealBundleData {
        dim,
        w2: ring.rho2(&z.c1),
        w4: ring.rho2(&z.c2),
        w6: ring.rho2(&z.c3),
        p1,
        p2,
        e,
        spin: None,
        q1: Some(SpinLift {
            lift: z.c1.clone(),
            q1: ring.neg(&z.c2),
        }),
    })
}

/// Adjoint bundle `su(z)` of a rank-3 complex bundle.
pub fn su_adjoint_bundle(ring: &Cohomology, z: &ComplexBundleData) -> Result<RealBundleData> {
    if z.rank != 3 {
        return Err(Error::Shape(format!("su adjoint needs rank 3, got {}", z.rank)));
    }
    let c1sq = ring.cup(&z.c1, &z.c1)?;
    let q1 = ring.combo(&[(1, &c1sq), (-3, &z.c2)])?;
    let p2 = ring.cup(&q1, &q1)?;
    let w4 = ring.rho2(&ring.add(&c1sq, &z.c2)?);
    let w6 = ring.rho2(&ring.add(&ring.cup(&z.c1, &z.c2)?, &z.c3)?);
    Ok(RealBundleData {
        dim: 8,
        w2: ring.mod2_zero(2),
        w4,
        w6,
        p1: ring.scale(&BigInt::from(2), &q1),
        p2,
        e: Some(ring.zero(8)),
        spin: Some(true),
        q1: Some(SpinLift {
            lift: ring.zero(2),
            q1,
        }),
    })
}

fn require_c1_twice(ring: &Cohomology, z: &ComplexBundleData, l: &IntClass) -> Result<()> {
    expect_degree(l, 2)?;
    let two_l = ring.scale(&BigInt::from(2), l);
    if z.c1 != two_l {
        return Err(Error::LiftMismatch(format!(
            "c1 = {} but 2l = {}",
            ring.display(&z.c1),
            ring.display(&two_l)
        )));
    }
    Ok(())
}

/// The 6-dimensional bundle `eta` attached to a rank-4 complex bundle with `c_1 = 2l`.
pub fn spinc6_eta(ring: &Cohomology, z: &ComplexBundleData, l: &IntClass) -> Result<RealBundleData> {
    require_c1_twice(ring, z, l)?;
    let l2 = ring.cup(l, l)?;
    let q1 = ring.sub(&l2, &z.c2)?;
    let e = ring.add(&z.c3, &ring.cup(l, &q1)?)?;
    let le = ring.cup(l, &e)?;
    let q1sq = ring.cup(&q1, &q1)?;
    let p2 = ring.combo(&[(1, &q1sq), (2, &le), (-4, &z.c4)])?;
    let p1 = ring.combo(&[(2, &q1), (1, &l2)])?;
    Ok(RealBundleData {
        dim: 6,
        w2: ring.rho2(l),
        w4: ring.rho2(&q1),
        w6: ring.rho2(&e),
        p1,
        p2,
        e: Some(e),
        spin: None,
        q1: Some(SpinLift { lift: l.clone(), q1 }),
    })
}

/// The 4-dimensional bundle built from `u_+`, `u_-` and a lift `l`.
pub fn spinc4_eta(ring: &Cohomology, u_plus: &IntClass, u_minus: &IntClass, l: &IntClass) -> Result<RealBundleData> {
    expect_degree(u_plus, 4)?;
    expect_degree(u_minus, 4)?;
    expect_degree(l, 2)?;
    let sum = ring.add(u_plus, u_minus)?;
    let q1 = ring.neg(&sum);
    let e = ring.sub(u_plus, u_minus)?;
    let l2 = ring.cup(l, l)?;
    Ok(RealBundleData {
        dim: 4,
        w2: ring.rho2(l),
        w4: ring.rho2(&sum),
        w6: ring.mod2_zero(6),
        p1: ring.combo(&[(2, &q1), (1, &l2)])?,
        p2: ring.cup(&e, &e)?,
        e: Some(e),
        spin: None,
        q1: Some(SpinLift { lift: l.clone(), q1 }),
    })
}

/// The spin 8-dimensional bundle `eta (x) zeta^*` of an `H_alpha`-structure,
/// where `eta` has Chern classes `(2l, eta_c2, *, eta_c4)` and `c_2(zeta) = -u`.
pub fn halpha_total(
    ring: &Cohomology,
    u: &IntClass,
    eta_c2: &IntClass,
    eta_c4: &IntClass,
    l: &IntClass,
) -> Result<RealBundleData> {
    expect_degree(u, 4)?;
    expect_degree(eta_c2, 4)?;
    expect_degree(eta_c4, 8)?;
    expect_degree(l, 2)?;
    let l2 = ring.cup(l, l)?;
    let l4 = ring.cup(&l2, &l2)?;
    let q1 = ring.combo(&[(2, u), (-1, eta_c2), (2, &l2)])?;
    let c2c2 = ring.cup(eta_c2, eta_c2)?;
    let c2u = ring.cup(eta_c2, u)?;
    let c2l2 = ring.cup(eta_c2, &l2)?;
    let uu = ring.cup(u, u)?;
    let ul2 = ring.cup(u, &l2)?;
    let p2 = ring.combo(&[
        (2, eta_c4),
        (1, &c2c2),
        (-2, &c2u),
        (-4, &c2l2),
        (6, &uu),
        (6, &ul2),
        (4, &l4),
    ])?;
    let e = ring.combo(&[(1, eta_c4), (1, &c2u), (-1, &ul2), (1, &uu)])?;
    let lq1 = ring.cup(l, &q1)?;
    let l3 = ring.cup(l, &l2)?;
    Ok(RealBundleData {
        dim: 8,
        w2: ring.mod2_zero(2),
        w4: ring.rho2(&q1),
        w6: ring.rho2(&ring.add(&lq1, &l3)?),
        p1: ring.scale(&BigInt::from(2), &q1),
        p2,
        e: Some(e),
        spin: Some(true),
        q1: Some(SpinLift {
            lift: ring.zero(2),
            q1,
        }),
    })
}

/// The 5-dimensional bundle attached to a rank-4 complex bundle with `c_1 = 2l`.
pub fn spinc5_eta(ring: &Cohomology, z: &ComplexBundleData, l: &IntClass) -> Result<RealBundleData> {
    require_c1_twice(ring, z, l)?;
    let l2 = ring.cup(l, l)?;
    let q1 = ring.sub(&l2, &z.c2)?;
    let q1sq = ring.cup(&q1, &q1)?;
    let p2 = ring.combo(&[(1, &q1sq), (-4, &z.c4)])?;
    Ok(RealBundleData {
        dim: 5,
        w2: ring.rho2(l),
        w4: ring.add2(&ring.rho2(&l2), &ring.rho2(&z.c2))?,
        w6: ring.mod2_zero(6),
        p1: ring.combo(&[(2, &q1), (1, &l2)])?,
        p2,
        e: None,
        spin: None,
        q1: Some(SpinLift { lift: l.clone(), q1 }),
    })
}

/// Inhomogeneous rational form `sum_i parts[i] / denom` with `parts[i]` in degree `2i`.
struct Form {
    parts: Vec<IntClass>,
    denom: BigInt,
}

impl Form {
    fn mul(&self, ring: &Cohomology, other: &Form) -> Result<Form> {
        let mut parts: Vec<IntClass> = (0..=4).map(|i| ring.zero(2 * i)).collect();
        for (i, a) in self.parts.iter().enumerate() {
            for (j, b) in other.parts.iter().enumerate() {
                if i + j <= 4 && !a.is_zero() && !b.is_zero() {
                    parts[i + j] = ring.add(&parts[i + j], &ring.cup(a, b)?)?;
                }
            }
        }
        Ok(Form {
            parts,
            denom: &self.denom * &other.denom,
        })
    }
}

fn scaled(ring: &Cohomology, terms: &[(i64, &IntClass)], degree: usize) -> Result<IntClass> {
    if terms.is_empty() {
        Ok(ring.zero(degree))
    } else {
        ring.combo(terms)
    }
}

fn exp_half(ring: &Cohomology, c: &IntClass) -> Result<Form> {
    let c2 = ring.cup(c, c)?;
    let c3 = ring.cup(&c2, c)?;
    let c4 = ring.cup(&c3, c)?;
    Ok(Form {
        parts: vec![
            ring.scale(&BigInt::from(384), &ring.one()),
            ring.scale(&BigInt::from(192), c),
            ring.scale(&BigInt::from(48), &c2),
            ring.scale(&BigInt::from(8), &c3),
            c4,
        ],
        denom: BigInt::from(384),
    })
}

fn a_hat(ring: &Cohomology, p1: &IntClass, p2: &IntClass) -> Result<Form> {
    let p1sq = ring.cup(p1, p1)?;
    Ok(Form {
        parts: vec![
            ring.scale(&BigInt::from(5760), &ring.one()),
            ring.zero(2),
            ring.scale(&BigInt::from(-240), p1),
            ring.zero(6),
            ring.combo(&[(7, &p1sq), (-4, p2)])?,
        ],
        denom: BigInt::from(5760),
    })
}

fn chern_character(ring: &Cohomology, z: &ComplexBundleData, reduced: bool) -> Result<Form> {
    let (c1, c2, c3, c4) = (&z.c1, &z.c2, &z.c3, &z.c4);
    let c1_2 = ring.cup(c1, c1)?;
    let c1_3 = ring.cup(&c1_2, c1)?;
    let c1_4 = ring.cup(&c1_3, c1)?;
    let c1c2 = ring.cup(c1, c2)?;
    let c1_2c2 = ring.cup(&c1_2, c2)?;
    let c1c3 = ring.cup(c1, c3)?;
    let c2_2 = ring.cup(c2, c2)?;
    let rank = if reduced { 0 } else { z.rank as i64 };
    Ok(Form {
        parts: vec![
            ring.scale(&BigInt::from(24 * rank), &ring.one()),
            ring.scale(&BigInt::from(24), c1),
            ring.combo(&[(12, &c1_2), (-24, c2)])?,
            ring.combo(&[(4, &c1_3), (-12, &c1c2), (12, c3)])?,
            ring.combo(&[(1, &c1_4), (-4, &c1_2c2), (4, &c1c3), (2, &c2_2), (-4, c4)])?,
        ],
        denom: BigInt::from(24),
    })
}

fn index_of_form(ring: &Cohomology, ch: &Form, c: &IntClass, p1: &IntClass, p2: &IntClass) -> Result<BigRational> {
    let td = exp_half(ring, c)?.mul(ring, &a_hat(ring, p1, p2)?)?;
    let total = td.mul(ring, ch)?;
    let value = ring.evaluate(&total.parts[4])?;
    Ok(BigRational::new(value, total.denom))
}

/// `(e^{c/2} A(M) ch(z))[M]` with an explicit spin^c class `c`.
pub fn spinc_index_with(ring: &Cohomology, z: &ComplexBundleData, c: &IntClass, p1: &IntClass, p2: &IntClass) -> Result<BigRational> {
    expect_degree(c, 2)?;
    let ch = chern_character(ring, z, false)?;
    index_of_form(ring, &ch, c, p1, p2)
}

/// Spin^c index of `z` for the spin^c structure recorded in `tangent`.
pub fn spinc_index(ring: &Cohomology, z: &ComplexBundleData, tangent: &TangentData) -> Result<BigRational> {
    spinc_index_with(ring, z, &tangent.c, &tangent.p1, &tangent.p2)
}

/// Same as [`spinc_index`] for the virtual bundle `z - C^rank`.
pub fn reduced_spinc_index(ring: &Cohomology, z: &ComplexBundleData, c: &IntClass, tangent: &TangentData) -> Result<BigRational> {
    let ch = chern_character(ring, z, true)?;
    index_of_form(ring, &ch, c, &tangent.p1, &tangent.p2)
}

/// Index of the complexification `C (x) x`, full or reduced by `C^dim`.
pub fn index_of_complexified(ring: &Cohomology, x: &RealBundleData, tangent: &TangentData, reduced: bool) -> Result<BigRational> {
    let p1sq = ring.cup(&x.p1, &x.p1)?;
    let dim = if reduced { 0 } else { x.dim as i64 };
    let ch = Form {
        parts: vec![
            ring.scale(&BigInt::from(12 * dim), &ring.one()),
            ring.zero(2),
            ring.scale(&BigInt::from(12), &x.p1),
            ring.zero(6),
            scaled(ring, &[(1, &p1sq), (-2, &x.p2)], 8)?,
        ],
        denom: BigInt::from(12),
    };
    index_of_form(ring, &ch, &tangent.c, &tangent.p1, &tangent.p2)
}

impl TangentData {
    /// The tangent bundle as real bundle data with lift `c`.
    pub fn as_real_bundle(&self) -> RealBundleData {
        RealBundleData {
            dim: 8,
            w2: self.w2.clone(),
            w4: self.w4.clone(),
            w6: self.w6.clone(),
            p1: self.p1.clone(),
            p2: self.p2.clone(),
            e: Some(self.e.clone()),
            spin: Some(self.w2.is_zero()),
            q1: Some(SpinLift {
                lift: self.c.clone(),
                q1: self.q1_c.clone(),
            }),
        }
    }

    /// Checks the tangent invariants against the ring.
    pub fn validate(&self, ring: &Cohomology) -> Result<CheckReport> {
        let mut rep = CheckReport::new("tangent data");
        for (x, d) in [(&self.c, 2), (&self.p1, 4), (&self.q1_c, 4), (&self.p2, 8), (&self.e, 8)] {
            expect_degree(x, d)?;
            ring.check_shape(x)?;
        }
        rep.push(mod2_condition("rho2(c) = w2(M)", &ring.rho2(&self.c), &self.w2));
        rep.push(mod2_condition("w2 recorded in the ring = w2(M)", ring.w2(), &self.w2));
        let twice = ring.scale(&BigInt::from(2), &self.q1_c);
        let expected = ring.sub(&self.p1, &ring.cup(&self.c, &self.c)?)?;
        rep.push(class_condition("2 q1(M; c) = p1 - c^2", &twice, &expected));
        rep.push(mod2_condition("rho2(q1(M; c)) = w4(M)", &ring.rho2(&self.q1_c), &self.w4));
        let euler = ring.evaluate(&self.e)?;
        rep.push(Condition {
            name: "e[M] = Euler characteristic".into(),
            relation: "=".into(),
            role: Role::Condition,
            lhs: Value::int(euler.clone()),
            rhs: Value::int(self.chi.clone()),
            modulus: None,
            passed: euler == self.chi,
        });
        if let Some(sig) = &self.signature {
            let p1sq = ring.cup(&self.p1, &self.p1)?;
            let l = ring.evaluate(&ring.combo(&[(7, &self.p2), (-1, &p1sq)])?)?;
            let r = sig * BigInt::from(45);
            rep.push(Condition {
                name: "(7 p2 - p1^2)[M] = 45 signature".into(),
                relation: "=".into(),
                role: Role::Condition,
                lhs: Value::int(l.clone()),
                rhs: Value::int(r.clone()),
                modulus: None,
                passed: l == r,
            });
        }
        let real = self.as_real_bundle();
        for c in real.validate(ring)?.conditions {
            if !rep.conditions.iter().any(|d| d.name == c.name) {
                rep.push(c);
            }
        }
        if let Some(ch) = &self.chern {
            let r = realify(ring, ch)?;
            rep.push(class_condition("recorded Chern classes: c1 = c", &ch.c1, &self.c));
            rep.push(class_condition("recorded Chern classes: p1", &r.p1, &self.p1));
            rep.push(class_condition("recorded Chern classes: p2", &r.p2, &self.p2));
            rep.push(class_condition("recorded Chern classes: e = c4", &ch.c4, &self.e));
        }
        Ok(rep)
    }
}
