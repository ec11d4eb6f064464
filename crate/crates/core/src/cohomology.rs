//! Exact model of the even-degree cohomology of a closed, connected, oriented
//! 8-manifold.
//!
//! Integral groups are stored in Smith normal form: a free rank plus a list
//! of cyclic orders `d_1 | d_2 | ...`. A class carries one integer per free
//! generator and one residue per cyclic factor, and every operation reduces
//! the residues eagerly so that equality is structural. Mod-2 cohomology is
//! modelled separately (it can be larger than the reduction of integral
//! cohomology) together with the reduction map, a mod-2 cup table and the
//! action of `Sq^2` on degrees 2 and 4. On degree 6 `Sq^2` is cup with the
//! second Wu class, which for an oriented manifold is `w_2(M)`.
//!
//! Odd degrees may be declared but no operation reads them.

pub mod expr;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{CheckReport, Condition, Role, Value};
use crate::serde_int::big_vec;

pub const TOP: usize = 8;

/// `H^k(M; Z)` for a single degree, in Smith normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeGroup {
    pub free_rank: usize,
    #[serde(with = "big_vec", default)]
    pub torsion: Vec<BigInt>,
}

impl DegreeGroup {
    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion.len()
    }
}

/// An element of `H^k(M; Z)`: free coordinates followed by torsion residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntClass {
    degree: usize,
    #[serde(with = "big_vec")]
    free: Vec<BigInt>,
    #[serde(with = "big_vec")]
    torsion: Vec<BigInt>,
}

impl IntClass {
    /// Builds a class from raw coordinates. Residues are not reduced here;
    /// pass the result through [`Cohomology::reduce`] before comparing.
    pub fn from_parts(degree: usize, free: Vec<BigInt>, torsion: Vec<BigInt>) -> Self {
        IntClass {
            degree,
            free,
            torsion,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn free(&self) -> &[BigInt] {
        &self.free
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }

    /// True when the class has no free component.
    pub fn is_torsion(&self) -> bool {
        self.free.iter().all(Zero::is_zero)
    }

    fn coords(&self) -> impl Iterator<Item = &BigInt> {
        self.free.iter().chain(self.torsion.iter())
    }
}

impl fmt::Display for IntClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: Vec<String> = self.free.iter().map(|x| x.to_string()).collect();
        let tors: Vec<String> = self.torsion.iter().map(|x| x.to_string()).collect();
        write!(f, "H{}[{}", self.degree, free.join(","))?;
        if !tors.is_empty() {
            write!(f, "; {}", tors.join(","))?;
        }
        write!(f, "]")
    }
}

/// An element of `H^k(M; F_2)` in the chosen mod-2 basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mod2Class {
    degree: usize,
    #[serde(with = "bits01")]
    bits: Vec<bool>,
}

impl Mod2Class {
    pub fn new(degree: usize, bits: Vec<bool>) -> Self {
        Mod2Class { degree, bits }
    }

    pub fn zero(degree: usize, dim: usize) -> Self {
        Mod2Class {
            degree,
            bits: vec![false; dim],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    fn xor_assign(&mut self, other: &[bool]) {
        for (a, b) in self.bits.iter_mut().zip(other) {
            *a ^= *b;
        }
    }
}

impl fmt::Display for Mod2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
        write!(f, "H{}(F2)[{}]", self.degree, s)
    }
}

pub(crate) mod bits01 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let ints: Vec<u8> = v.iter().map(|b| u8::from(*b)).collect();
        ints.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let ints = Vec::<u8>::deserialize(d)?;
        ints.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {other}"))),
            })
            .collect()
    }
}

/// Mod-2 data for one degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Mod2Degree {
    pub dimension: usize,
    pub names: Vec<String>,
    /// One row per integral generator (free first, then torsion): its reduction.
    pub reduction: Vec<Vec<bool>>,
}

/// Structure-constant key: `(deg_a, gen_a, deg_b, gen_b)`.
pub type CupKey = (usize, usize, usize, usize);

/// The ring: groups, cup tables, reduction, `Sq^2` and `[M]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cohomology {
    groups: Vec<DegreeGroup>,
    names: Vec<Vec<String>>,
    mod2: Vec<Mod2Degree>,
    cup: BTreeMap<CupKey, IntClass>,
    cup2: BTreeMap<CupKey, Mod2Class>,
    sq2: BTreeMap<usize, Vec<Mod2Class>>,
    fundamental: Vec<BigInt>,
    w2: Mod2Class,
}

/// Result of dividing an integer evaluation by a fixed denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalEval {
    pub value: BigRational,
    pub is_integer: bool,
}

impl RationalEval {
    pub fn integer(&self) -> Option<BigInt> {
        self.is_integer.then(|| self.value.to_integer())
    }
}

fn bits_of(n: &BigInt) -> bool {
    n.is_odd()
}

impl Cohomology {
    // ---- structure -------------------------------------------------------

    pub fn group(&self, degree: usize) -> &DegreeGroup {
        &self.groups[degree]
    }

    pub fn groups(&self) -> &[DegreeGroup] {
        &self.groups
    }

    pub fn generator_names(&self, degree: usize) -> &[String] {
        &self.names[degree]
    }

    pub fn mod2_degree(&self, degree: usize) -> &Mod2Degree {
        &self.mod2[degree]
    }

    pub fn mod2_dim(&self, degree: usize) -> usize {
        self.mod2[degree].dimension
    }

    pub fn cup_table(&self) -> &BTreeMap<CupKey, IntClass> {
        &self.cup
    }

    pub fn cup2_table(&self) -> &BTreeMap<CupKey, Mod2Class> {
        &self.cup2
    }

    pub fn sq2_table(&self) -> &BTreeMap<usize, Vec<Mod2Class>> {
        &self.sq2
    }

    pub fn fundamental(&self) -> &[BigInt] {
        &self.fundamental
    }

    /// `w_2(M)`, equal to the second Wu class.
    pub fn w2(&self) -> &Mod2Class {
        &self.w2
    }

    pub fn is_torsion_free(&self) -> bool {
        self.groups.iter().step_by(2).all(|g| g.torsion.is_empty())
    }

    /// Finds a generator by name in any degree: `(degree, index)`.
    pub fn find_generator(&self, name: &str) -> Option<(usize, usize)> {
        self.names
            .iter()
            .enumerate()
            .find_map(|(d, ns)| ns.iter().position(|n| n == name).map(|i| (d, i)))
    }

    pub fn find_mod2(&self, name: &str) -> Option<(usize, usize)> {
        self.mod2
            .iter()
            .enumerate()
            .find_map(|(d, m)| m.names.iter().position(|n| n == name).map(|i| (d, i)))
    }

    // ---- constructors ----------------------------------------------------

    pub fn zero(&self, degree: usize) -> IntClass {
        let g = &self.groups[degree];
        IntClass {
            degree,
            free: vec![BigInt::zero(); g.free_rank],
            torsion: vec![BigInt::zero(); g.torsion.len()],
        }
    }

    pub fn one(&self) -> IntClass {
        self.generator(0, 0)
    }

    /// The `index`-th generator of degree `degree` (free first, then torsion).
    pub fn generator(&self, degree: usize, index: usize) -> IntClass {
        let mut x = self.zero(degree);
        let fr = self.groups[degree].free_rank;
        if index < fr {
            x.free[index] = BigInt::one();
        } else {
            x.torsion[index - fr] = BigInt::one();
        }
        self.reduce(x)
    }

    pub fn generators(&self, degree: usize) -> Vec<IntClass> {
        (0..self.groups[degree].rank())
            .map(|i| self.generator(degree, i))
            .collect()
    }

    pub fn mod2_zero(&self, degree: usize) -> Mod2Class {
        Mod2Class::zero(degree, self.mod2[degree].dimension)
    }

    pub fn mod2_generator(&self, degree: usize, index: usize) -> Mod2Class {
        let mut m = self.mod2_zero(degree);
        m.bits[index] = true;
        m
    }

    /// Reduces torsion residues into `[0, d)`.
    pub fn reduce(&self, mut x: IntClass) -> IntClass {
        let orders = &self.groups[x.degree].torsion;
        for (t, d) in x.torsion.iter_mut().zip(orders) {
            *t = t.mod_floor(d);
        }
        x
    }

    /// Checks that `x` has the coordinate shape of its degree.
    pub fn check_shape(&self, x: &IntClass) -> Result<()> {
        if x.degree > TOP {
            return Err(Error::Shape(format!("degree {} above 8", x.degree)));
        }
        let g = &self.groups[x.degree];
        if x.free.len() != g.free_rank || x.torsion.len() != g.torsion.len() {
            return Err(Error::Shape(format!(
                "degree {} class has {}+{} coordinates, group has {}+{}",
                x.degree,
                x.free.len(),
                x.torsion.len(),
                g.free_rank,
                g.torsion.len()
            )));
        }
        Ok(())
    }

    pub fn check_mod2_shape(&self, m: &Mod2Class) -> Result<()> {
        if m.degree > TOP || m.bits.len() != self.mod2[m.degree].dimension {
            return Err(Error::Shape(format!(
                "mod-2 class of degree {} has {} bits",
                m.degree,
                m.bits.len()
            )));
        }
        Ok(())
    }

    // ---- additive structure ---------------------------------------------

    pub fn add(&self, x: &IntClass, y: &IntClass) -> Result<IntClass> {
        if x.degree != y.degree {
            return Err(Error::DegreeMismatch {
                left: x.degree,
                right: y.degree,
            });
        }
        self.check_shape(x)?;
        self.check_shape(y)?;
        let free = x.free.iter().zip(&y.free).map(|(a, b)| a + b).collect();
        let torsion = x.torsion.iter().zip(&y.torsion).map(|(a, b)| a + b).collect();
        Ok(self.reduce(IntClass {
            degree: x.degree,
            free,
            torsion,
        }))
    }

    pub fn sub(&self, x: &IntClass, y: &IntClass) -> Result<IntClass> {
        self.add(x, &self.neg(y))
    }

    pub fn neg(&self, x: &IntClass) -> IntClass {
        self.scale(&BigInt::from(-1), x)
    }

    pub fn scale(&self, n: &BigInt, x: &IntClass) -> IntClass {
        self.reduce(IntClass {
            degree: x.degree,
            free: x.free.iter().map(|a| a * n).collect(),
            torsion: x.torsion.iter().map(|a| a * n).collect(),
        })
    }

    /// Integer linear combination `sum n_i x_i` of classes of one degree.
    pub fn combo(&self, terms: &[(i64, &IntClass)]) -> Result<IntClass> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Shape("empty linear combination".into()))?;
        let mut acc = self.zero(first.degree);
        for (n, x) in terms {
            acc = self.add(&acc, &self.scale(&BigInt::from(*n), x))?;
        }
        Ok(acc)
    }

    // ---- multiplicative structure ---------------------------------------

    fn table_product(&self, da: usize, i: usize, db: usize, j: usize) -> Option<&IntClass> {
        self.cup.get(&(da, i, db, j))
    }

    pub fn cup(&self, x: &IntClass, y: &IntClass) -> Result<IntClass> {
        let deg = x.degree + y.degree;
        if deg > TOP {
            return Err(Error::DegreeOverflow {
                left: x.degree,
                right: y.degree,
            });
        }
        self.check_shape(x)?;
        self.check_shape(y)?;
        if x.degree == 0 {
            return Ok(self.scale(&x.free[0], y));
        }
        if y.degree == 0 {
            return Ok(self.scale(&y.free[0], x));
        }
        let mut acc = self.zero(deg);
        for (i, a) in x.coords().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coords().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if let Some(p) = self.table_product(x.degree, i, y.degree, j) {
                    let coef = a * b;
                    for (acc_c, p_c) in acc.free.iter_mut().zip(&p.free) {
                        *acc_c += &coef * p_c;
                    }
                    for (acc_c, p_c) in acc.torsion.iter_mut().zip(&p.torsion) {
                        *acc_c += &coef * p_c;
                    }
                }
            }
        }
        Ok(self.reduce(acc))
    }

    /// `x^n` for `n >= 1`.
    pub fn power(&self, x: &IntClass, n: u32) -> Result<IntClass> {
        let mut acc = x.clone();
        for _ in 1..n {
            acc = self.cup(&acc, x)?;
        }
        Ok(acc)
    }

    // ---- mod 2 -----------------------------------------------------------

    pub fn rho2(&self, x: &IntClass) -> Mod2Class {
        let mut m = self.mod2_zero(x.degree);
        for (i, a) in x.coords().enumerate() {
            if bits_of(a) {
                if let Some(row) = self.mod2[x.degree].reduction.get(i) {
                    m.xor_assign(row);
                }
            }
        }
        m
    }

    pub fn add2(&self, a: &Mod2Class, b: &Mod2Class) -> Result<Mod2Class> {
        if a.degree != b.degree {
            return Err(Error::DegreeMismatch {
                left: a.degree,
                right: b.degree,
            });
        }
        self.check_mod2_shape(a)?;
        self.check_mod2_shape(b)?;
        let mut m = a.clone();
        m.xor_assign(&b.bits);
        Ok(m)
    }

    pub fn cup2(&self, a: &Mod2Class, b: &Mod2Class) -> Result<Mod2Class> {
        let deg = a.degree + b.degree;
        if deg > TOP {
            return Err(Error::DegreeOverflow {
                left: a.degree,
                right: b.degree,
            });
        }
        self.check_mod2_shape(a)?;
        self.check_mod2_shape(b)?;
        if a.degree == 0 {
            return Ok(if a.bits.first().copied().unwrap_or(false) {
                b.clone()
            } else {
                self.mod2_zero(deg)
            });
        }
        if b.degree == 0 {
            return self.cup2(b, a);
        }
        let mut m = self.mod2_zero(deg);
        for (i, _) in a.bits.iter().enumerate().filter(|(_, x)| **x) {
            for (j, _) in b.bits.iter().enumerate().filter(|(_, x)| **x) {
                if let Some(p) = self.cup2.get(&(a.degree, i, b.degree, j)) {
                    m.xor_assign(&p.bits);
                }
            }
        }
        Ok(m)
    }

    /// `Sq^2` on degrees 2, 4 (tables) and 6 (cup with `w_2(M)`).
    pub fn sq2(&self, m: &Mod2Class) -> Result<Mod2Class> {
        self.check_mod2_shape(m)?;
        match m.degree {
            2 | 4 => {
                let rows = self.sq2.get(&m.degree);
                let mut out = self.mod2_zero(m.degree + 2);
                for (i, _) in m.bits.iter().enumerate().filter(|(_, x)| **x) {
                    if let Some(row) = rows.and_then(|r| r.get(i)) {
                        out.xor_assign(&row.bits);
                    }
                }
                Ok(out)
            }
            6 => self.cup2(&self.w2, m),
            d => Err(Error::UnsupportedSq2Degree(d)),
        }
    }

    /// Finds an integral class reducing to `m`, if one exists.
    pub fn reduction_preimage(&self, m: &Mod2Class) -> Option<IntClass> {
        let deg = m.degree;
        let rows = &self.mod2[deg].reduction;
        let dim = self.mod2[deg].dimension;
        // Gaussian elimination on the augmented system: columns are generators.
        let ngen = rows.len();
        let mut mat: Vec<Vec<bool>> = (0..dim)
            .map(|r| {
                let mut v: Vec<bool> = rows.iter().map(|row| row[r]).collect();
                v.push(m.bits[r]);
                v
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..ngen {
            if let Some(p) = (row..dim).find(|&r| mat[r][col]) {
                mat.swap(row, p);
                for r in 0..dim {
                    if r != row && mat[r][col] {
                        let src = mat[row].clone();
                        for (a, b) in mat[r].iter_mut().zip(&src) {
                            *a ^= *b;
                        }
                    }
                }
                pivots.push(col);
                row += 1;
            }
        }
        if mat[row..].iter().any(|r| r[ngen]) {
            return None;
        }
        let mut x = self.zero(deg);
        let fr = self.groups[deg].free_rank;
        for (r, &col) in pivots.iter().enumerate() {
            if mat[r][ngen] {
                if col < fr {
                    x.free[col] = BigInt::one();
                } else {
                    x.torsion[col - fr] = BigInt::one();
                }
            }
        }
        Some(self.reduce(x))
    }

    // ---- evaluation ------------------------------------------------------

    pub fn evaluate(&self, x: &IntClass) -> Result<BigInt> {
        if x.degree != TOP {
            return Err(Error::WrongDegree {
                expected: TOP,
                found: x.degree,
            });
        }
        self.check_shape(x)?;
        Ok(x.free.iter().zip(&self.fundamental).map(|(a, f)| a * f).sum())
    }

    pub fn eval_rational(&self, num: &IntClass, denom: &BigInt) -> Result<RationalEval> {
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let n = self.evaluate(num)?;
        let is_integer = n.is_multiple_of(denom);
        Ok(RationalEval {
            value: BigRational::new(n, denom.clone()),
            is_integer,
        })
    }

    /// A degree-8 class with `[M]`-evaluation 1.
    pub fn fundamental_unit(&self) -> Option<IntClass> {
        // Extended Euclid across the coordinates of the functional.
        let mut g = BigInt::zero();
        let mut coeffs: Vec<BigInt> = Vec::new();
        for f in &self.fundamental {
            let e = g.extended_gcd(f);
            for c in coeffs.iter_mut() {
                *c *= &e.x;
            }
            coeffs.push(e.y);
            g = e.gcd;
        }
        if !g.is_one() {
            return None;
        }
        let mut x = self.zero(TOP);
        x.free = coeffs;
        Some(x)
    }

    /// The degree-8 class `n * unit`.
    pub fn top_class_with_value(&self, n: &BigInt) -> Option<IntClass> {
        self.fundamental_unit().map(|u| self.scale(n, &u))
    }

    // ---- division ----------------------------------------------------------

    /// All `y` with `n * y = x`, canonical (smallest residues) first.
    pub fn divide_exact(&self, x: &IntClass, n: &BigInt) -> Vec<IntClass> {
        if n.is_zero() {
            return Vec::new();
        }
        let mut free = Vec::with_capacity(x.free.len());
        for a in &x.free {
            if !a.is_multiple_of(n) {
                return Vec::new();
            }
            free.push(a / n);
        }
        // Per cyclic factor: solutions of n*y = r (mod d).
        let orders = &self.groups[x.degree].torsion;
        let mut per_factor: Vec<Vec<BigInt>> = Vec::new();
        for (r, d) in x.torsion.iter().zip(orders) {
            let g = n.gcd(d);
            if !r.is_multiple_of(&g) {
                return Vec::new();
            }
            let (n1, r1, d1) = (n / &g, r / &g, d / &g);
            let inv = if d1.is_one() {
                BigInt::zero()
            } else {
                let e = n1.mod_floor(&d1).extended_gcd(&d1);
                e.x.mod_floor(&d1)
            };
            let y0 = (r1 * inv).mod_floor(&d1);
            let mut sols: Vec<BigInt> = num_iter(&g).map(|j| &y0 + j * &d1).collect();
            sols.sort();
            per_factor.push(sols);
        }
        let mut out = vec![Vec::new()];
        for sols in &per_factor {
            let mut next = Vec::with_capacity(out.len() * sols.len());
            for prefix in &out {
                for s in sols {
                    let mut p: Vec<BigInt> = prefix.clone();
                    p.push(s.clone());
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|torsion| IntClass {
                degree: x.degree,
                free: free.clone(),
                torsion,
            })
            .collect()
    }

    /// All halvings of `x`, canonical first.
    pub fn halve(&self, x: &IntClass) -> Vec<IntClass> {
        self.divide_exact(x, &BigInt::from(2))
    }

    /// Every pure-torsion class of the given degree.
    pub fn torsion_classes(&self, degree: usize) -> Vec<IntClass> {
        let orders = &self.groups[degree].torsion;
        let mut out = vec![self.zero(degree)];
        for (i, d) in orders.iter().enumerate() {
            let mut next = Vec::new();
            for base in &out {
                for r in num_iter(d) {
                    let mut c = base.clone();
                    c.torsion[i] = r;
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// Whether `w_2(M) * rho2(H^6(M; Z))` is non-zero.
    pub fn w2_pairs_nontrivially_with_h6(&self) -> bool {
        self.generators(6)
            .iter()
            .any(|t| self.cup2(&self.w2, &self.rho2(t)).map(|m| !m.is_zero()).unwrap_or(false))
    }

    // ---- display -------------------------------------------------------------

    pub fn display(&self, x: &IntClass) -> String {
        let names = &self.names[x.degree];
        let mut parts = Vec::new();
        for (i, a) in x.coords().enumerate() {
            if a.is_zero() {
                continue;
            }
            let name = names.get(i).cloned().unwrap_or_else(|| format!("g{}_{}", x.degree, i));
            parts.push(if a.is_one() {
                name
            } else if *a == BigInt::from(-1) {
                format!("-{name}")
            } else {
                format!("{a}*{name}")
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }

    pub fn display_mod2(&self, m: &Mod2Class) -> String {
        let names = &self.mod2[m.degree].names;
        let parts: Vec<String> = m
            .bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| names.get(i).cloned().unwrap_or_else(|| format!("e{}_{}", m.degree, i)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    // ---- validation ------------------------------------------------------

    /// Checks the ring axioms that can be decided from the tables.
    pub fn validate_ring(&self) -> CheckReport {
        let mut report = CheckReport::new("validate_ring");
        let mut axiom = |name: &str, violations: Vec<String>| {
            let passed = violations.is_empty();
            report.push(Condition {
                name: name.into(),
                relation: "no violations".into(),
                role: Role::Condition,
                lhs: Value::text(if passed {
                    "none".to_string()
                } else {
                    violations.join("; ")
                }),
                rhs: Value::text("none"),
                modulus: None,
                passed,
            });
        };

        axiom("degree 0 is Z", {
            let g = &self.groups[0];
            if g.free_rank == 1 && g.torsion.is_empty() {
                vec![]
            } else {
                vec![format!("H0 has free rank {} and {} torsion factors", g.free_rank, g.torsion.len())]
            }
        });
        axiom("degree 8 has free rank 1", {
            if self.groups[TOP].free_rank == 1 {
                vec![]
            } else {
                vec![format!("H8 has free rank {}", self.groups[TOP].free_rank)]
            }
        });
        axiom("torsion in Smith normal form", self.smith_violations());
        axiom("cup well defined on torsion", self.torsion_cup_violations());
        axiom("cup commutative in even degrees", self.commutativity_violations());
        axiom("cup associative", self.associativity_violations());
        axiom("rho2 well defined and injective on H (x) F2", self.reduction_violations());
        axiom("rho2 multiplicative on generators", self.rho2_multiplicative_violations());
        axiom("mod-2 cup commutative", self.mod2_commutativity_violations());
        axiom("Sq2 on degree 2 is squaring", self.sq2_square_violations());
        axiom("Sq2 obeys the Cartan formula on products of integral degree 2 classes", self.sq2_cartan_violations());
        axiom("Sq2 tables are linear maps of the right shape", self.sq2_shape_violations());
        axiom("fundamental evaluation surjective", {
            if self.fundamental.len() != self.groups[TOP].free_rank {
                vec!["functional length differs from free rank of H8".into()]
            } else if self.fundamental_unit().is_none() {
                vec!["gcd of [M] coefficients is not 1".into()]
            } else {
                vec![]
            }
        });
        axiom("degree 2 x degree 6 pairing kills torsion", self.pairing_violations());
        report
    }

    fn smith_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (d, g) in self.groups.iter().enumerate() {
            for (i, t) in g.torsion.iter().enumerate() {
                if *t < BigInt::from(2) {
                    v.push(format!("H{d} torsion order {t} < 2"));
                }
                if let Some(next) = g.torsion.get(i + 1) {
                    if !next.is_multiple_of(t) {
                        v.push(format!("H{d} torsion orders {t} does not divide {next}"));
                    }
                }
            }
        }
        v
    }

    fn even_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in (2..=TOP).step_by(2) {
            for b in (2..=TOP - a).step_by(2) {
                out.push((a, b));
            }
        }
        out
    }

    fn gen_label(&self, d: usize, i: usize) -> String {
        self.names[d].get(i).cloned().unwrap_or_else(|| format!("g{d}_{i}"))
    }

    fn torsion_cup_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (a, b) in self.even_pairs() {
            let fr = self.groups[a].free_rank;
            for (ti, ord) in self.groups[a].torsion.iter().enumerate() {
                let t = self.generator(a, fr + ti);
                for (j, g) in self.generators(b).iter().enumerate() {
                    if let Ok(p) = self.cup(&t, g) {
                        if !self.scale(ord, &p).is_zero() {
                            v.push(format!(
                                "{} (order {ord}) * {}: {ord} * product = {} is not zero",
                                self.gen_label(a, fr + ti),
                                self.gen_label(b, j),
                                self.display(&self.scale(ord, &p))
                            ));
                        }
                    }
                }
            }
        }
        v
    }

    fn commutativity_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (a, b) in self.even_pairs() {
            if a > b {
                continue;
            }
            for (i, x) in self.generators(a).iter().enumerate() {
                for (j, y) in self.generators(b).iter().enumerate() {
                    let (Ok(xy), Ok(yx)) = (self.cup(x, y), self.cup(y, x)) else {
                        continue;
                    };
                    if xy != yx {
                        v.push(format!(
                            "{}*{} = {} but {}*{} = {}",
                            self.gen_label(a, i),
                            self.gen_label(b, j),
                            self.display(&xy),
                            self.gen_label(b, j),
                            self.gen_label(a, i),
                            self.display(&yx)
                        ));
                    }
                }
            }
        }
        v
    }

    fn associativity_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for a in (2..=TOP).step_by(2) {
            for b in (2..=TOP - a).step_by(2) {
                for c in (2..=TOP - a - b).step_by(2) {
                    for (i, x) in self.generators(a).iter().enumerate() {
                        for (j, y) in self.generators(b).iter().enumerate() {
                            for (k, z) in self.generators(c).iter().enumerate() {
                                let left = self.cup(x, y).and_then(|p| self.cup(&p, z));
                                let right = self.cup(y, z).and_then(|p| self.cup(x, &p));
                                if let (Ok(l), Ok(r)) = (left, right) {
                                    if l != r {
                                        v.push(format!(
                                            "({}*{})*{} != {}*({}*{})",
                                            self.gen_label(a, i),
                                            self.gen_label(b, j),
                                            self.gen_label(c, k),
                                            self.gen_label(a, i),
                                            self.gen_label(b, j),
                                            self.gen_label(c, k)
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        v
    }

    fn reduction_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for d in (0..=TOP).step_by(2) {
            let g = &self.groups[d];
            let m = &self.mod2[d];
            let mut independent: Vec<Vec<bool>> = Vec::new();
            for i in 0..g.rank() {
                let row = &m.reduction[i];
                let order = (i >= g.free_rank).then(|| &g.torsion[i - g.free_rank]);
                match order {
                    Some(o) if o.is_odd() => {
                        if row.iter().any(|b| *b) {
                            v.push(format!("odd-order generator {} has non-zero reduction", self.gen_label(d, i)));
                        }
                    }
                    _ => independent.push(row.clone()),
                }
            }
            if f2_rank(&independent) != independent.len() {
                v.push(format!("reduction of H{d} (x) F2 is not injective"));
            }
        }
        v
    }

    fn rho2_multiplicative_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (a, b) in self.even_pairs() {
            for (i, x) in self.generators(a).iter().enumerate() {
                for (j, y) in self.generators(b).iter().enumerate() {
                    let Ok(p) = self.cup(x, y) else { continue };
                    let lhs = self.rho2(&p);
                    let Ok(rhs) = self.cup2(&self.rho2(x), &self.rho2(y)) else { continue };
                    if lhs != rhs {
                        v.push(format!(
                            "rho2({}*{}) = {} but rho2({})*rho2({}) = {}",
                            self.gen_label(a, i),
                            self.gen_label(b, j),
                            self.display_mod2(&lhs),
                            self.gen_label(a, i),
                            self.gen_label(b, j),
                            self.display_mod2(&rhs)
                        ));
                    }
                }
            }
        }
        v
    }

    fn mod2_commutativity_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (a, b) in self.even_pairs() {
            for i in 0..self.mod2[a].dimension {
                for j in 0..self.mod2[b].dimension {
                    let x = self.mod2_generator(a, i);
                    let y = self.mod2_generator(b, j);
                    if let (Ok(xy), Ok(yx)) = (self.cup2(&x, &y), self.cup2(&y, &x)) {
                        if xy != yx {
                            v.push(format!(
                                "mod-2 product of {} and {} is not commutative",
                                self.display_mod2(&x),
                                self.display_mod2(&y)
                            ));
                        }
                    }
                }
            }
        }
        v
    }

    fn sq2_square_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for i in 0..self.mod2[2].dimension {
            let x = self.mod2_generator(2, i);
            if let (Ok(s), Ok(sq)) = (self.sq2(&x), self.cup2(&x, &x)) {
                if s != sq {
                    v.push(format!(
                        "Sq2({}) = {} but its square is {}",
                        self.display_mod2(&x),
                        self.display_mod2(&s),
                        self.display_mod2(&sq)
                    ));
                }
            }
        }
        v
    }

    fn sq2_cartan_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        // Only on reductions of integral classes, where Sq1 vanishes.
        let gens: Vec<Mod2Class> = self.generators(2).iter().map(|g| self.rho2(g)).collect();
        for i in 0..gens.len() {
            for j in i..gens.len() {
                let (x, y) = (&gens[i], &gens[j]);
                let lhs = self.cup2(x, y).and_then(|p| self.sq2(&p));
                let rhs = (|| {
                    let a = self.cup2(&self.cup2(x, x)?, y)?;
                    let b = self.cup2(x, &self.cup2(y, y)?)?;
                    self.add2(&a, &b)
                })();
                if let (Ok(l), Ok(r)) = (lhs, rhs) {
                    if l != r {
                        v.push(format!(
                            "Sq2({} {}) = {} but the Cartan formula gives {}",
                            self.display_mod2(x),
                            self.display_mod2(y),
                            self.display_mod2(&l),
                            self.display_mod2(&r)
                        ));
                    }
                }
            }
        }
        v
    }

    fn sq2_shape_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for d in [2usize, 4] {
            let rows = self.sq2.get(&d).map(Vec::as_slice).unwrap_or(&[]);
            if rows.len() != self.mod2[d].dimension {
                v.push(format!("Sq2 on degree {d} has {} rows, expected {}", rows.len(), self.mod2[d].dimension));
            }
            for r in rows {
                if r.degree != d + 2 || r.bits.len() != self.mod2[d + 2].dimension {
                    v.push(format!("Sq2 row on degree {d} has wrong target shape"));
                }
            }
        }
        v
    }

    fn pairing_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (a, b) in [(2usize, 6usize), (6, 2)] {
            let fr = self.groups[a].free_rank;
            for ti in 0..self.groups[a].torsion.len() {
                let t = self.generator(a, fr + ti);
                for (j, g) in self.generators(b).iter().enumerate() {
                    let val = self.cup(&t, g).and_then(|p| self.evaluate(&p));
                    if let Ok(val) = val {
                        if !val.is_zero() {
                            v.push(format!(
                                "({} * {})[M] = {val}",
                                self.gen_label(a, fr + ti),
                                self.gen_label(b, j)
                            ));
                        }
                    }
                }
            }
        }
        v
    }
}

fn num_iter(n: &BigInt) -> impl Iterator<Item = BigInt> {
    let n = n.clone();
    let mut i = BigInt::zero();
    std::iter::from_fn(move || {
        if i < n {
            let out = i.clone();
            i += 1;
            Some(out)
        } else {
            None
        }
    })
}

fn f2_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if let Some(p) = (rank..m.len()).find(|&r| m[r][col]) {
            m.swap(rank, p);
            let pivot = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[col] {
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= *b;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Builder used by the catalog and the file loader.
///
/// Generators are addressed by name. For torsion-free rings
/// [`RingBuilder::mod2_from_integral`] fills in the mod-2 data by reduction.
#[derive(Clone, Debug, Default)]
pub struct RingBuilder {
    groups: Vec<DegreeGroup>,
    names: Vec<Vec<String>>,
    mod2: Vec<Mod2Degree>,
    mod2_set: Vec<bool>,
    cup: Vec<(String, String, Vec<(String, BigInt)>)>,
    raw_cup: BTreeMap<CupKey, Vec<BigInt>>,
    cup2: Vec<(String, String, Vec<String>)>,
    raw_cup2: BTreeMap<CupKey, Vec<bool>>,
    sq2: Vec<(String, Vec<String>)>,
    raw_sq2: BTreeMap<usize, Vec<Vec<bool>>>,
    fundamental: Option<Vec<BigInt>>,
    derive_mod2: bool,
    w2: Option<Vec<bool>>,
}

impl RingBuilder {
    pub fn new() -> Self {
        let mut b = RingBuilder {
            groups: vec![DegreeGroup::default(); TOP + 1],
            names: vec![Vec::new(); TOP + 1],
            mod2: vec![Mod2Degree::default(); TOP + 1],
            mod2_set: vec![false; TOP + 1],
            ..Default::default()
        };
        b.groups[0].free_rank = 1;
        b.names[0].push("1".into());
        b
    }

    /// Declares free generators of a degree (appended in order).
    pub fn free(&mut self, degree: usize, names: &[&str]) -> &mut Self {
        assert!(self.groups[degree].torsion.is_empty(), "declare free generators before torsion");
        self.groups[degree].free_rank += names.len();
        self.names[degree].extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn torsion(&mut self, degree: usize, name: &str, order: i64) -> &mut Self {
        self.groups[degree].torsion.push(BigInt::from(order));
        self.names[degree].push(name.to_string());
        self
    }

    /// Raw group declaration (file loader path).
    pub fn set_group(&mut self, degree: usize, group: DegreeGroup, names: Vec<String>) -> &mut Self {
        if degree == 0 {
            self.names[0].clear();
        }
        self.groups[degree] = group;
        self.names[degree] = names;
        self
    }

    /// `a * b = sum coeff * gen` (commutative partner added automatically).
    pub fn cup(&mut self, a: &str, b: &str, result: &[(&str, i64)]) -> &mut Self {
        self.cup.push((
            a.into(),
            b.into(),
            result.iter().map(|(n, c)| (n.to_string(), BigInt::from(*c))).collect(),
        ));
        self
    }

    pub fn raw_cup(&mut self, key: CupKey, coords: Vec<BigInt>) -> &mut Self {
        self.raw_cup.insert(key, coords);
        self
    }

    pub fn mod2_basis(&mut self, degree: usize, names: &[&str], reduction: Vec<Vec<bool>>) -> &mut Self {
        self.mod2[degree] = Mod2Degree {
            dimension: names.len(),
            names: names.iter().map(|s| s.to_string()).collect(),
            reduction,
        };
        self.mod2_set[degree] = true;
        self
    }

    pub fn set_mod2(&mut self, degree: usize, data: Mod2Degree) -> &mut Self {
        self.mod2[degree] = data;
        self.mod2_set[degree] = true;
        self
    }

    pub fn cup2(&mut self, a: &str, b: &str, result: &[&str]) -> &mut Self {
        self.cup2.push((a.into(), b.into(), result.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn raw_cup2(&mut self, key: CupKey, bits: Vec<bool>) -> &mut Self {
        self.raw_cup2.insert(key, bits);
        self
    }

    /// `Sq^2(source) = sum of targets` in the mod-2 basis.
    pub fn sq2(&mut self, source: &str, targets: &[&str]) -> &mut Self {
        self.sq2.push((source.into(), targets.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn raw_sq2(&mut self, degree: usize, rows: Vec<Vec<bool>>) -> &mut Self {
        self.raw_sq2.insert(degree, rows);
        self
    }

    pub fn fundamental(&mut self, coeffs: &[i64]) -> &mut Self {
        self.fundamental = Some(coeffs.iter().map(|c| BigInt::from(*c)).collect());
        self
    }

    pub fn raw_fundamental(&mut self, coeffs: Vec<BigInt>) -> &mut Self {
        self.fundamental = Some(coeffs);
        self
    }

    /// Mod-2 data by reduction: valid when every even degree is torsion-free.
    /// `Sq^2` on degree 2 is squaring; `Sq^2` on degree 4 must still be given.
    pub fn mod2_from_integral(&mut self) -> &mut Self {
        self.derive_mod2 = true;
        self
    }

    pub fn w2_bits(&mut self, bits: Vec<bool>) -> &mut Self {
        self.w2 = Some(bits);
        self
    }

    fn lookup(&self, name: &str) -> Result<(usize, usize)> {
        self.names
            .iter()
            .enumerate()
            .find_map(|(d, ns)| ns.iter().position(|n| n == name).map(|i| (d, i)))
            .ok_or_else(|| Error::UnknownGenerator(name.into()))
    }

    fn lookup2(mod2: &[Mod2Degree], name: &str) -> Result<(usize, usize)> {
        mod2.iter()
            .enumerate()
            .find_map(|(d, m)| m.names.iter().position(|n| n == name).map(|i| (d, i)))
            .ok_or_else(|| Error::UnknownGenerator(name.into()))
    }

    pub fn build(&self) -> Result<Cohomology> {
        let mut groups = self.groups.clone();
        groups.resize(TOP + 1, DegreeGroup::default());
        let names = self.names.clone();
        for (d, g) in groups.iter().enumerate() {
            if names[d].len() != g.rank() {
                return Err(Error::Shape(format!(
                    "degree {d}: {} names for {} generators",
                    names[d].len(),
                    g.rank()
                )));
            }
        }
        let mut all_names: Vec<&String> = names.iter().flatten().collect();
        all_names.sort();
        if let Some(w) = all_names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Shape(format!("duplicate generator name `{}`", w[0])));
        }

        let mut ring = Cohomology {
            groups,
            names,
            mod2: self.mod2.clone(),
            cup: BTreeMap::new(),
            cup2: BTreeMap::new(),
            sq2: BTreeMap::new(),
            fundamental: self.fundamental.clone().unwrap_or_default(),
            w2: Mod2Class::zero(2, 0),
        };

        if self.derive_mod2 {
            if !ring.is_torsion_free() {
                return Err(Error::Unsupported("mod-2 derivation needs torsion-free even degrees".into()));
            }
            for d in (0..=TOP).step_by(2) {
                if self.mod2_set[d] {
                    continue;
                }
                let n = ring.groups[d].free_rank;
                ring.mod2[d] = Mod2Degree {
                    dimension: n,
                    names: ring.names[d].clone(),
                    reduction: (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect(),
                };
            }
        }
        for d in 0..=TOP {
            let m = &ring.mod2[d];
            if d % 2 == 0 && m.reduction.len() != ring.groups[d].rank() {
                return Err(Error::Shape(format!(
                    "degree {d}: reduction has {} rows for {} generators",
                    m.reduction.len(),
                    ring.groups[d].rank()
                )));
            }
            if m.reduction.iter().any(|r| r.len() != m.dimension) || m.names.len() != m.dimension {
                return Err(Error::Shape(format!("degree {d}: mod-2 rows or names do not match dimension")));
            }
        }

        for (key, coords) in &self.raw_cup {
            let deg = key.0 + key.2;
            if deg > TOP {
                return Err(Error::DegreeOverflow { left: key.0, right: key.2 });
            }
            let g = &ring.groups[deg];
            if coords.len() != g.rank() {
                return Err(Error::Shape(format!("cup result for {key:?} has {} coordinates", coords.len())));
            }
            let c = IntClass {
                degree: deg,
                free: coords[..g.free_rank].to_vec(),
                torsion: coords[g.free_rank..].to_vec(),
            };
            ring.insert_cup(*key, ring.reduce(c));
        }
        for (a, b, result) in &self.cup {
            let (da, ia) = self.lookup(a)?;
            let (db, ib) = self.lookup(b)?;
            let mut c = ring.zero(da + db);
            for (n, coef) in result {
                let (d, i) = self.lookup(n)?;
                if d != da + db {
                    return Err(Error::Shape(format!("{a}*{b} cannot contain {n}")));
                }
                let g = ring.generator(d, i);
                c = ring.add(&c, &ring.scale(coef, &g))?;
            }
            ring.insert_cup((da, ia, db, ib), c);
        }

        if self.derive_mod2 {
            let keys: Vec<CupKey> = ring.cup.keys().copied().collect();
            for k in keys {
                let p = ring.cup[&k].clone();
                if self.mod2_set[k.0] || self.mod2_set[k.2] {
                    continue;
                }
                ring.cup2.insert(k, ring.rho2(&p));
            }
        }
        for (key, bits) in &self.raw_cup2 {
            let deg = key.0 + key.2;
            if deg > TOP || bits.len() != ring.mod2[deg].dimension {
                return Err(Error::Shape(format!("mod-2 cup result for {key:?} has the wrong shape")));
            }
            ring.insert_cup2(*key, Mod2Class::new(deg, bits.clone()));
        }
        for (a, b, result) in &self.cup2 {
            let (da, ia) = Self::lookup2(&ring.mod2, a)?;
            let (db, ib) = Self::lookup2(&ring.mod2, b)?;
            let mut m = ring.mod2_zero(da + db);
            for n in result {
                let (d, i) = Self::lookup2(&ring.mod2, n)?;
                if d != da + db {
                    return Err(Error::Shape(format!("{a}*{b} cannot contain {n}")));
                }
                m.bits[i] ^= true;
            }
            ring.insert_cup2((da, ia, db, ib), m);
        }

        for d in [2usize, 4] {
            let dim = ring.mod2[d].dimension;
            let rows = match self.raw_sq2.get(&d) {
                Some(raw) => raw
                    .iter()
                    .map(|r| Mod2Class::new(d + 2, r.clone()))
                    .collect(),
                None => vec![ring.mod2_zero(d + 2); dim],
            };
            ring.sq2.insert(d, rows);
        }
        if self.derive_mod2 && !self.raw_sq2.contains_key(&2) {
            let rows: Vec<Mod2Class> = (0..ring.mod2[2].dimension)
                .map(|i| {
                    let x = ring.mod2_generator(2, i);
                    ring.cup2(&x, &x).unwrap_or_else(|_| ring.mod2_zero(4))
                })
                .collect();
            ring.sq2.insert(2, rows);
        }
        for (src, targets) in &self.sq2 {
            let (d, i) = Self::lookup2(&ring.mod2, src)?;
            if d != 2 && d != 4 {
                return Err(Error::UnsupportedSq2Degree(d));
            }
            let mut m = ring.mod2_zero(d + 2);
            for t in targets {
                let (dt, j) = Self::lookup2(&ring.mod2, t)?;
                if dt != d + 2 {
                    return Err(Error::Shape(format!("Sq2({src}) cannot contain {t}")));
                }
                m.bits[j] ^= true;
            }
            ring.sq2.get_mut(&d).expect("sq2 degree")[i] = m;
        }

        let dim2 = ring.mod2[2].dimension;
        ring.w2 = Mod2Class::new(2, self.w2.clone().unwrap_or_else(|| vec![false; dim2]));
        ring.check_mod2_shape(&ring.w2)?;
        Ok(ring)
    }
}

impl Cohomology {
    fn insert_cup(&mut self, key: CupKey, value: IntClass) {
        let (da, ia, db, ib) = key;
        if !value.is_zero() || self.cup.contains_key(&key) {
            self.cup.insert(key, value.clone());
        }
        let swapped = (db, ib, da, ia);
        if swapped != key && !self.cup.contains_key(&swapped) && !value.is_zero() {
            self.cup.insert(swapped, value);
        }
    }

    fn insert_cup2(&mut self, key: CupKey, value: Mod2Class) {
        let (da, ia, db, ib) = key;
        self.cup2.insert(key, value.clone());
        let swapped = (db, ib, da, ia);
        if swapped != key && !self.cup2.contains_key(&swapped) {
            self.cup2.insert(swapped, value);
        }
    }

    /// Replaces `w_2(M)`; used when the tangent data is attached.
    pub fn with_w2(mut self, w2: Mod2Class) -> Result<Self> {
        if w2.degree != 2 {
            return Err(Error::WrongDegree { expected: 2, found: w2.degree });
        }
        self.check_mod2_shape(&w2)?;
        self.w2 = w2;
        Ok(self)
    }

    /// Overwrites one integral structure constant without re-symmetrising.
    /// Intended for building deliberately corrupted tables in tests.
    pub fn set_cup_entry(&mut self, key: CupKey, value: IntClass) {
        self.cup.insert(key, value);
    }

    pub fn set_cup2_entry(&mut self, key: CupKey, value: Mod2Class) {
        self.cup2.insert(key, value);
    }

    pub fn set_sq2_row(&mut self, degree: usize, index: usize, value: Mod2Class) {
        if let Some(rows) = self.sq2.get_mut(&degree) {
            if index < rows.len() {
                rows[index] = value;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    /// `HP^2`: `Z[a]/(a^3)`, `|a| = 4`.
    fn hp2() -> Cohomology {
        let mut r = RingBuilder::new();
        r.free(4, &["a"]).free(8, &["f"]).cup("a", "a", &[("f", 1)]).fundamental(&[1]).mod2_from_integral();
        r.build().unwrap()
    }

    /// A ring with a `Z/24` factor in degree 4 and a `Z/2` in degree 2.
    fn torsion_ring() -> Cohomology {
        let mut r = RingBuilder::new();
        r.torsion(2, "s", 2)
            .free(4, &["a"])
            .torsion(4, "t", 24)
            .free(8, &["f"])
            .cup("a", "a", &[("f", 1)])
            .fundamental(&[1])
            .mod2_basis(0, &["1"], vec![vec![true]])
            .mod2_basis(2, &["s"], vec![vec![true]])
            .mod2_basis(4, &["a", "t"], vec![vec![true, false], vec![false, true]])
            .mod2_basis(6, &[], vec![])
            .mod2_basis(8, &["f"], vec![vec![true]])
            .cup2("a", "a", &["f"]);
        r.build().unwrap()
    }

    #[test]
    fn add_identity_and_scale_zero() {
        let r = hp2();
        let a = r.generator(4, 0);
        assert_eq!(r.add(&a, &r.zero(4)).unwrap(), a);
        assert!(r.scale(&b(0), &a).is_zero());
    }

    #[test]
    fn torsion_residues_reduce() {
        let r = torsion_ring();
        let t20 = r.reduce(IntClass::from_parts(4, vec![b(0)], vec![b(20)]));
        let t8 = r.reduce(IntClass::from_parts(4, vec![b(0)], vec![b(8)]));
        let sum = r.add(&t20, &t8).unwrap();
        assert_eq!(sum.torsion(), &[b(4)]);
        let neg = r.neg(&t8);
        assert_eq!(neg.torsion(), &[b(16)]);
    }

    #[test]
    fn add_rejects_degree_mismatch() {
        let r = hp2();
        assert!(matches!(
            r.add(&r.zero(4), &r.zero(8)),
            Err(Error::DegreeMismatch { left: 4, right: 8 })
        ));
    }

    #[test]
    fn cup_unit_and_overflow() {
        let r = hp2();
        let a = r.generator(4, 0);
        assert_eq!(r.cup(&r.one(), &a).unwrap(), a);
        let f = r.generator(8, 0);
        assert!(matches!(r.cup(&a, &f), Err(Error::DegreeOverflow { .. })));
        assert_eq!(r.evaluate(&r.cup(&a, &a).unwrap()).unwrap(), b(1));
    }

    #[test]
    fn evaluate_needs_top_degree() {
        let r = hp2();
        assert!(matches!(r.evaluate(&r.zero(4)), Err(Error::WrongDegree { .. })));
        assert_eq!(r.evaluate(&r.zero(8)).unwrap(), b(0));
    }

    #[test]
    fn eval_rational_flags_integrality() {
        let r = hp2();
        let a2 = r.cup(&r.generator(4, 0), &r.generator(4, 0)).unwrap();
        let six = r.scale(&b(6), &a2);
        let e = r.eval_rational(&six, &b(2)).unwrap();
        assert!(e.is_integer);
        assert_eq!(e.integer(), Some(b(3)));
        let half = r.eval_rational(&a2, &b(2)).unwrap();
        assert!(!half.is_integer);
        assert_eq!(half.value, BigRational::new(b(1), b(2)));
        assert!(matches!(r.eval_rational(&a2, &b(0)), Err(Error::ZeroDenominator)));
        assert!(r.eval_rational(&r.zero(8), &b(4)).unwrap().is_integer);
    }

    #[test]
    fn rho2_kills_twice_anything() {
        let r = torsion_ring();
        for x in r.generators(4) {
            assert!(r.rho2(&r.scale(&b(2), &x)).is_zero());
        }
        let x = r.generator(4, 0);
        let y = r.generator(4, 1);
        let lhs = r.rho2(&r.add(&x, &y).unwrap());
        assert_eq!(lhs, r.add2(&r.rho2(&x), &r.rho2(&y)).unwrap());
    }

    #[test]
    fn divide_exact_handles_even_torsion() {
        let r = torsion_ring();
        let x = r.reduce(IntClass::from_parts(4, vec![b(6)], vec![b(10)]));
        let halves = r.halve(&x);
        assert_eq!(halves.len(), 2);
        assert_eq!(halves[0].torsion(), &[b(5)]);
        assert_eq!(halves[1].torsion(), &[b(17)]);
        for h in &halves {
            assert_eq!(r.scale(&b(2), h), x);
        }
        let odd = r.reduce(IntClass::from_parts(4, vec![b(6)], vec![b(3)]));
        assert!(r.halve(&odd).is_empty());
        let quarters = r.divide_exact(&x, &b(3));
        assert!(quarters.is_empty(), "6 divisible by 3 but residue 10 is not a multiple of gcd(3,24)");
    }

    #[test]
    fn sq2_degree_six_is_wu_closure() {
        let r = hp2();
        assert!(matches!(r.sq2(&r.mod2_zero(8)), Err(Error::UnsupportedSq2Degree(8))));
        assert!(r.sq2(&r.mod2_zero(6)).unwrap().is_zero());
        assert!(r.sq2(&r.mod2_zero(4)).unwrap().is_zero());
    }

    #[test]
    fn preimage_of_reduction() {
        let r = torsion_ring();
        let m = r.rho2(&r.generator(4, 1));
        let pre = r.reduction_preimage(&m).unwrap();
        assert_eq!(r.rho2(&pre), m);
    }

    #[test]
    fn validate_ring_accepts_models_and_rejects_corruption() {
        assert!(hp2().validate_ring().verdict.is_pass());
        let good = torsion_ring();
        let rep = good.validate_ring();
        assert!(rep.verdict.is_pass(), "{}", rep.render(Some(&good)));

        // order-2 generator squared into a free slot
        let mut bad = good.clone();
        bad.set_cup_entry((2, 0, 2, 0), IntClass::from_parts(4, vec![b(1)], vec![b(0)]));
        let rep = bad.validate_ring();
        assert!(!rep.verdict.is_pass());
        let failing: Vec<&str> = rep.failed().map(|c| c.name.as_str()).collect();
        assert!(failing.contains(&"cup well defined on torsion"), "{failing:?}");
    }

    #[test]
    fn empty_manifold_validates() {
        let mut r = RingBuilder::new();
        r.free(8, &["f"]).fundamental(&[1]).mod2_from_integral();
        assert!(r.build().unwrap().validate_ring().verdict.is_pass());
    }

    #[test]
    fn fundamental_unit_with_composite_functional() {
        let mut r = RingBuilder::new();
        r.free(8, &["f"]).fundamental(&[1]).mod2_from_integral();
        let ring = r.build().unwrap();
        let u = ring.fundamental_unit().unwrap();
        assert_eq!(ring.evaluate(&u).unwrap(), b(1));
    }
}
