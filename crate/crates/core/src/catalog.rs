//! Built-in manifold models, the Künneth product of 4-manifolds, and the JSON
//! manifold and bundle file formats.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bundles::{ComplexBundleData, RealBundleData, SpinLift, TangentData};
use crate::cohomology::expr::{parse_class, parse_mod2};
use crate::cohomology::{Cohomology, DegreeGroup, IntClass, Mod2Class, Mod2Degree, RingBuilder};
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::serde_int::{big, big_opt, big_vec};

/// A closed 8-manifold: cohomology ring, tangent data and provenance notes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldModel {
    pub name: String,
    pub ring: Cohomology,
    pub tangent: TangentData,
    pub provenance: BTreeMap<String, String>,
    pub flags: ModelFlags,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFlags {
    /// Only a subring of the middle cohomology is stored.
    #[serde(default, skip_serializing_if = "is_false")]
    pub partial: bool,
    /// Transcribed data that has only passed consistency checks.
    #[serde(default, skip_serializing_if = "is_false")]
    pub unverified_source: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ManifoldModel {
    /// Ring axioms and tangent invariants in one report.
    pub fn validation_report(&self) -> Result<CheckReport> {
        let mut rep = self.ring.validate_ring();
        rep.criterion = format!("validate {}", self.name);
        for c in self.tangent.validate(&self.ring)?.conditions {
            rep.push(c);
        }
        Ok(rep)
    }

    /// Fails with the first violated axiom.
    pub fn validate(&self) -> Result<()> {
        let rep = self.validation_report()?;
        let failed = rep.failed().next().map(|c| Error::Validation {
            axiom: c.name.clone(),
            detail: format!("{} vs {}", c.lhs.render(Some(&self.ring)), c.rhs.render(Some(&self.ring))),
        });
        failed.map_or(Ok(()), Err)
    }

    pub fn class(&self, src: &str, degree: usize) -> Result<IntClass> {
        parse_class(&self.ring, src, degree)
    }
}

/// Where an expected result comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Stated in the published literature.
    Published,
    /// Computed from the model data by an independent route.
    Computed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub criterion: String,
    pub setting: String,
    pub outcome: String,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub model: ManifoldModel,
    pub expected: Vec<Expected>,
}

pub const BUILTIN_NAMES: [&str; 9] = ["S8", "HP2", "CP4", "S2xS6", "S4xS4", "CP2xCP2", "Gr24", "V6", "G2SO4"];

/// A built-in entry, validated.
pub fn builtin(name: &str) -> Result<CatalogEntry> {
    let entry = match name {
        "S8" => s8(),
        "HP2" => hp2(),
        "CP4" => cp4(),
        "S2xS6" => s2xs6(),
        "S4xS4" => s4xs4(),
        "CP2xCP2" => cp2xcp2(),
        "Gr24" | "V2" => gr24(),
        "V6" => v6(),
        "G2SO4" => g2so4(),
        _ => return Err(Error::UnknownManifold(name.into())),
    }?;
    entry.model.validate()?;
    Ok(entry)
}

pub fn builtin_model(name: &str) -> Result<ManifoldModel> {
    Ok(builtin(name)?.model)
}

/// Tangent data from `c`, `p_1`, `p_2`, `e`. `q_1` is the canonical halving,
/// `w_4 = rho2(q_1)` and `w_6 = Sq^2 w_4 + w_2 w_4`.
pub fn tangent_from(
    ring: &Cohomology,
    c: IntClass,
    p1: IntClass,
    p2: IntClass,
    e: IntClass,
    chi: i64,
    signature: Option<i64>,
) -> Result<TangentData> {
    let d = ring.sub(&p1, &ring.cup(&c, &c)?)?;
    let q1 = ring.halve(&d).into_iter().next().ok_or_else(|| Error::Validation {
        axiom: "2 q1(M; c) = p1 - c^2".into(),
        detail: format!("p1 - c^2 = {} is not divisible by 2", ring.display(&d)),
    })?;
    let w2 = ring.rho2(&c);
    let w4 = ring.rho2(&q1);
    let w6 = ring.add2(&ring.sq2(&w4)?, &ring.cup2(&w2, &w4)?)?;
    Ok(TangentData {
        c,
        p1,
        q1_c: q1,
        p2,
        e,
        w2,
        w4,
        w6,
        chi: BigInt::from(chi),
        signature: signature.map(BigInt::from),
        chern: None,
    })
}

fn model(name: &str, ring: Cohomology, tangent: TangentData, prov: &[(&str, &str)]) -> Result<ManifoldModel> {
    let ring = ring.with_w2(tangent.w2.clone())?;
    Ok(ManifoldModel {
        name: name.into(),
        ring,
        tangent,
        provenance: prov.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        flags: ModelFlags::default(),
    })
}

fn exp(criterion: &str, setting: &str, outcome: &str, source: Source) -> Expected {
    Expected {
        criterion: criterion.into(),
        setting: setting.into(),
        outcome: outcome.into(),
        source,
    }
}

fn cls(ring: &Cohomology, src: &str, degree: usize) -> Result<IntClass> {
    parse_class(ring, src, degree)
}

fn s8() -> Result<CatalogEntry> {
    let ring = RingBuilder::new().free(8, &["f"]).fundamental(&[1]).mod2_from_integral().build()?;
    let t = tangent_from(
        &ring,
        ring.zero(2),
        ring.zero(4),
        ring.zero(8),
        cls(&ring, "2f", 8)?,
        2,
        Some(0),
    )?;
    let m = model(
        "S8",
        ring,
        t,
        &[
            ("ring", "H^0 = H^8 = Z"),
            ("tangent", "stably trivial; e[M] = 2 = Euler characteristic"),
        ],
    )?;
    Ok(CatalogEntry {
        model: m,
        expected: vec![
            exp("complex", "tangent, l = 0, v = 0", "fail: e(xi) != lv", Source::Computed),
            exp("spinc6", "tangent, l = 0, v = 0", "fail: e(xi) = 0", Source::Computed),
            exp("spinc5", "tangent, l = 0", "fail: e(xi) = 0", Source::Computed),
            exp("spinc4", "tangent, l = 0", "fail: e(xi) = 0", Source::Computed),
        ],
    })
}

fn hp2() -> Result<CatalogEntry> {
    let ring = RingBuilder::new()
        .free(4, &["a"])
        .free(8, &["a2"])
        .cup("a", "a", &[("a2", 1)])
        .fundamental(&[1])
        .mod2_from_integral()
        .build()?;
    let t = tangent_from(
        &ring,
        ring.zero(2),
        cls(&ring, "2a", 4)?,
        cls(&ring, "7a2", 8)?,
        cls(&ring, "3a2", 8)?,
        3,
        Some(1),
    )?;
    let m = model(
        "HP2",
        ring,
        t,
        &[
            ("ring", "Z[a]/(a^3), |a| = 4, a^2[M] = 1"),
            ("e", "Euler characteristic 3"),
            ("p1, p2", "solved from A-hat genus 0 and signature 1"),
        ],
    )?;
    Ok(CatalogEntry {
        model: m,
        expected: vec![
            exp("halpha", "tangent, l = 0, u = k a", "k = 1, 9 (mod 24)", Source::Published),
            exp("complex", "tangent, l = 0, v = 0", "fail at a): 3 != 0 (mod 2); b) holds", Source::Published),
            exp("hlambda", "tangent, l = 0", "fail at b)", Source::Published),
            exp("3dim", "l = 0, u = k a", "k = 0, 1, 9, 16 (mod 24)", Source::Computed),
        ],
    })
}

fn cp4() -> Result<CatalogEntry> {
    let ring = RingBuilder::new()
        .free(2, &["x"])
        .free(4, &["x2"])
        .free(6, &["x3"])
        .free(8, &["x4"])
        .cup("x", "x", &[("x2", 1)])
        .cup("x", "x2", &[("x3", 1)])
        .cup("x", "x3", &[("x4", 1)])
        .cup("x2", "x2", &[("x4", 1)])
        .fundamental(&[1])
        .mod2_from_integral()
        .build()?;
    let mut t = tangent_from(
        &ring,
        cls(&ring, "5x", 2)?,
        cls(&ring, "5x2", 4)?,
        cls(&ring, "10x4", 8)?,
        cls(&ring, "5x4", 8)?,
        5,
        Some(1),
    )?;
    t.chern = Some(ComplexBundleData::new(
        4,
        cls(&ring, "5x", 2)?,
        cls(&ring, "10x2", 4)?,
        cls(&ring, "10x3", 6)?,
        cls(&ring, "5x4", 8)?,
    )?);
    let m = model(
        "CP4",
        ring,
        t,
        &[
            ("ring", "Z[x]/(x^5)"),
            ("tangent", "c(T) = (1 + x)^5"),
            ("Sq2", "Sq2 x^n = n x^(n+1)"),
        ],
    )?;
    Ok(CatalogEntry {
        model: m,
        expected: vec![
            exp("complex", "tangent, l = 5x, v = 10x3", "pass", Source::Computed),
            exp("chern", "l = 5x, u = 10x2, v = 10x3, w = 5x4", "pass", Source::Computed),
        ],
    })
}

fn s2xs6() -> Result<CatalogEntry> {
    let ring = RingBuilder::new()
        .free(2, &["s"])
        .free(6, &["t"])
        .free(8, &["st"])
        .cup("s", "t", &[("st", 1)])
        .fundamental(&[1])
        .mod2_from_integral()
        .build()?;
    let t = tangent_from(
        &ring,
        ring.zero(2),
        ring.zero(4),
        ring.zero(8),
        cls(&ring, "4st", 8)?,
        4,
        Some(0),
    )?;
    let m = model(
        "S2xS6",
        ring,
        t,
        &[("ring", "exterior on s (deg 2) and t (deg 6)"), ("tangent", "stably trivial; e = e(S2) e(S6)")],
    )?;
    Ok(CatalogEntry { model: m, expected: vec![] })
}

/// Torsion-free closed 4-manifold data for [`kunneth_product`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourManifold {
    pub name: String,
    /// Names of the degree-2 generators.
    pub h2: Vec<String>,
    /// Name of the degree-4 generator.
    pub top: String,
    /// Intersection form on `H^2`.
    pub form: Vec<Vec<i64>>,
    /// Spin^c class in `H^2` coordinates.
    pub c: Vec<i64>,
    /// `p_1[X]` and `e[X]`.
    pub p1: i64,
    pub euler: i64,
    pub signature: i64,
}

impl FourManifold {
    pub fn sphere(top: &str) -> Self {
        FourManifold {
            name: "S4".into(),
            h2: vec![],
            top: top.into(),
            form: vec![],
            c: vec![],
            p1: 0,
            euler: 2,
            signature: 0,
        }
    }

    pub fn cp2(gen: &str) -> Self {
        FourManifold {
            name: "CP2".into(),
            h2: vec![gen.into()],
            top: format!("{gen}2"),
            form: vec![vec![1]],
            c: vec![3],
            p1: 3,
            euler: 3,
            signature: 1,
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.h2.len();
        if self.form.len() != n || self.form.iter().any(|r| r.len() != n) || self.c.len() != n {
            return Err(Error::Shape(format!("{}: form or c does not match H^2", self.name)));
        }
        Ok(())
    }

    /// Basis `[1, h2..., top]` with degrees.
    fn basis(&self) -> Vec<(usize, String)> {
        let mut b = vec![(0, String::new())];
        b.extend(self.h2.iter().map(|n| (2, n.clone())));
        b.push((4, self.top.clone()));
        b
    }

    /// Product of basis elements `i * j` as `(coefficient, index)`.
    fn mul(&self, i: usize, j: usize) -> Option<(i64, usize)> {
        let n = self.h2.len();
        let top = n + 1;
        match (i, j) {
            (0, k) | (k, 0) => Some((1, k)),
            (a, b) if a <= n && b <= n => {
                let v = self.form[a - 1][b - 1];
                (v != 0).then_some((v, top))
            }
            _ => None,
        }
    }

    /// `Sq^2` of a basis element, as a basis index (mod 2).
    fn sq2(&self, i: usize) -> Option<usize> {
        let n = self.h2.len();
        (1..=n).contains(&i).then(|| self.form[i - 1][i - 1]).filter(|v| v % 2 != 0).map(|_| n + 1)
    }
}

/// Cohomology and tangent data of `A x B`; generator names concatenate.
pub fn kunneth_product(a: &FourManifold, b: &FourManifold) -> Result<ManifoldModel> {
    a.check()?;
    b.check()?;
    let (ba, bb) = (a.basis(), b.basis());
    // Pairs grouped by total degree, ordered by the A-degree descending.
    let mut by_degree: Vec<Vec<(usize, usize)>> = vec![Vec::new(); 9];
    for (i, (da, _)) in ba.iter().enumerate() {
        for (j, (db, _)) in bb.iter().enumerate() {
            by_degree[da + db].push((i, j));
        }
    }
    for v in by_degree.iter_mut() {
        v.sort_by_key(|&(i, j)| (std::cmp::Reverse(ba[i].0), i, j));
    }
    let name = |i: usize, j: usize| -> String {
        let s = format!("{}{}", ba[i].1, bb[j].1);
        if s.is_empty() {
            "1".into()
        } else {
            s
        }
    };
    let mut rb = RingBuilder::new();
    for d in [2usize, 4, 6, 8] {
        let names: Vec<String> = by_degree[d].iter().map(|&(i, j)| name(i, j)).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        rb.free(d, &refs);
    }
    let index = |d: usize, p: (usize, usize)| by_degree[d].iter().position(|&q| q == p).expect("basis pair");
    for d1 in [2usize, 4, 6] {
        for d2 in [2usize, 4, 6] {
            if d1 + d2 > 8 {
                continue;
            }
            for (x, &(i1, j1)) in by_degree[d1].iter().enumerate() {
                for (y, &(i2, j2)) in by_degree[d2].iter().enumerate() {
                    let (Some((ca, ia)), Some((cb, ib))) = (a.mul(i1, i2), b.mul(j1, j2)) else {
                        continue;
                    };
                    let d = d1 + d2;
                    let mut coords = vec![BigInt::from(0); by_degree[d].len()];
                    coords[index(d, (ia, ib))] = BigInt::from(ca * cb);
                    rb.raw_cup((d1, x, d2, y), coords);
                }
            }
        }
    }
    rb.fundamental(&[1]).mod2_from_integral();
    // Cartan formula on degree 4; Sq^1 vanishes on reductions of integral classes.
    let rows: Vec<Vec<bool>> = by_degree[4]
        .iter()
        .map(|&(i, j)| {
            let mut row = vec![false; by_degree[6].len()];
            if let Some(si) = a.sq2(i) {
                if let Some(k) = by_degree[6].iter().position(|&q| q == (si, j)) {
                    row[k] ^= true;
                }
            }
            if let Some(sj) = b.sq2(j) {
                if let Some(k) = by_degree[6].iter().position(|&q| q == (i, sj)) {
                    row[k] ^= true;
                }
            }
            row
        })
        .collect();
    rb.raw_sq2(4, rows);
    let ring = rb.build()?;

    let (na, nb) = (a.h2.len(), b.h2.len());
    let (ta, tb) = (na + 1, nb + 1);
    let at = |d: usize, p: (usize, usize), coef: i64| -> IntClass {
        let mut free = vec![BigInt::from(0); by_degree[d].len()];
        free[index(d, p)] = BigInt::from(coef);
        IntClass::from_parts(d, free, vec![])
    };
    let mut c = ring.zero(2);
    for (k, &v) in a.c.iter().enumerate() {
        c = ring.add(&c, &at(2, (k + 1, 0), v))?;
    }
    for (k, &v) in b.c.iter().enumerate() {
        c = ring.add(&c, &at(2, (0, k + 1), v))?;
    }
    let p1 = ring.add(&at(4, (ta, 0), a.p1), &at(4, (0, tb), b.p1))?;
    let p2 = at(8, (ta, tb), a.p1 * b.p1);
    let e = at(8, (ta, tb), a.euler * b.euler);
    let t = tangent_from(
        &ring,
        c,
        p1,
        p2,
        e,
        a.euler * b.euler,
        Some(a.signature * b.signature),
    )?;
    let name = format!("{}x{}", a.name, b.name);
    model(
        &name,
        ring,
        t,
        &[
            ("ring", "Künneth product of torsion-free factors"),
            ("tangent", "Whitney formula: p1 = p1(A) + p1(B), p2 = p1(A) p1(B), e = e(A) e(B)"),
        ],
    )
}

fn s4xs4() -> Result<CatalogEntry> {
    let model = kunneth_product(&FourManifold::sphere("x"), &FourManifold::sphere("y"))?;
    Ok(CatalogEntry { model, expected: vec![] })
}

fn cp2xcp2() -> Result<CatalogEntry> {
    let model = kunneth_product(&FourManifold::cp2("x"), &FourManifold::cp2("y"))?;
    Ok(CatalogEntry { model, expected: vec![] })
}

fn gr24() -> Result<CatalogEntry> {
    let ring = RingBuilder::new()
        .free(2, &["s1"])
        .free(4, &["s2", "s11"])
        .free(6, &["s21"])
        .free(8, &["s22"])
        .cup("s1", "s1", &[("s2", 1), ("s11", 1)])
        .cup("s1", "s2", &[("s21", 1)])
        .cup("s1", "s11", &[("s21", 1)])
        .cup("s1", "s21", &[("s22", 1)])
        .cup("s2", "s2", &[("s22", 1)])
        .cup("s11", "s11", &[("s22", 1)])
        .fundamental(&[1])
        .mod2_from_integral()
        .sq2("s2", &["s21"])
        .sq2("s11", &["s21"])
        .build()?;
    let mut t = tangent_from(
        &ring,
        cls(&ring, "4s1", 2)?,
        cls(&ring, "2s2 + 2s11", 4)?,
        cls(&ring, "14s22", 8)?,
        cls(&ring, "6s22", 8)?,
        6,
        Some(2),
    )?;
    t.chern = Some(ComplexBundleData::new(
        4,
        cls(&ring, "4s1", 2)?,
        cls(&ring, "7s2 + 7s11", 4)?,
        cls(&ring, "12s21", 6)?,
        cls(&ring, "6s22", 8)?,
    )?);
    let m = model(
        "Gr24",
        ring,
        t,
        &[
            ("ring", "Schubert basis with Pieri products"),
            ("tangent", "Hom(S, Q) from the tautological sequence"),
            ("Sq2", "Wu formula on the tautological Chern classes"),
            ("alias", "also listed as V2"),
        ],
    )?;
    Ok(CatalogEntry {
        model: m,
        expected: vec![
            exp("halpha", "tangent, l = 0, u = k s1^2", "k = 1, 9 (mod 12)", Source::Published),
            exp("hlambda-complex", "complex tangent, l = s1", "fail", Source::Published),
        ],
    })
}

fn v6() -> Result<CatalogEntry> {
    let ring = RingBuilder::new()
        .free(2, &["a"])
        .free(4, &["a2"])
        .free(6, &["b"])
        .free(8, &["f"])
        .cup("a", "a", &[("a2", 1)])
        .cup("a", "a2", &[("b", 6)])
        .cup("a", "b", &[("f", 1)])
        .cup("a2", "a2", &[("f", 6)])
        .fundamental(&[1])
        .mod2_from_integral()
        .build()?;
    let mut t = tangent_from(
        &ring,
        ring.zero(2),
        cls(&ring, "-30a2", 4)?,
        cls(&ring, "6570f", 8)?,
        cls(&ring, "2610f", 8)?,
        2610,
        None,
    )?;
    t.chern = Some(ComplexBundleData::new(
        4,
        ring.zero(2),
        cls(&ring, "15a2", 4)?,
        cls(&ring, "-420b", 6)?,
        cls(&ring, "2610f", 8)?,
    )?);
    let mut m = model(
        "V6",
        ring,
        t,
        &[
            ("ring", "subring generated by the hyperplane class a; a^4[M] = 6, a^3 = 6b"),
            ("tangent", "c(T) = (1 + a)^6 (1 + 6a)^-1"),
            ("chi", "c4[M] = 2610"),
        ],
    )?;
    m.flags.partial = true;
    Ok(CatalogEntry {
        model: m,
        expected: vec![exp("halpha", "tangent, l = 0, u = k a2", "k = 1 (mod 4)", Source::Published)],
    })
}

fn g2so4() -> Result<CatalogEntry> {
    let one = |n: usize, i: usize| (0..n).map(|j| j == i).collect::<Vec<bool>>();
    let mut rb = RingBuilder::new();
    rb.free(4, &["g"])
        .torsion(6, "t", 2)
        .free(8, &["f"])
        .cup("g", "g", &[("f", 1)])
        .fundamental(&[1])
        .mod2_basis(0, &["1"], vec![one(1, 0)])
        .mod2_basis(2, &["x"], vec![])
        .mod2_basis(4, &["x2"], vec![one(1, 0)])
        .mod2_basis(6, &["x3"], vec![one(1, 0)])
        .mod2_basis(8, &["x4"], vec![one(1, 0)])
        .cup2("1", "1", &["1"])
        .cup2("1", "x", &["x"])
        .cup2("1", "x2", &["x2"])
        .cup2("1", "x3", &["x3"])
        .cup2("1", "x4", &["x4"])
        .cup2("x", "x", &["x2"])
        .cup2("x", "x2", &["x3"])
        .cup2("x", "x3", &["x4"])
        .cup2("x2", "x2", &["x4"])
        .sq2("x", &["x2"])
        .sq2("x2", &["x3"]);
    let ring = rb.build()?;
    let t = tangent_from(
        &ring,
        ring.zero(2),
        cls(&ring, "2g", 4)?,
        cls(&ring, "7f", 8)?,
        cls(&ring, "3f", 8)?,
        3,
        Some(1),
    )?;
    let mut m = model(
        "G2SO4",
        ring,
        t,
        &[
            ("ring", "transcribed; mod-2 ring F2[x]/(x^5) with x^2 = rho2(g), x^3 = rho2(t)"),
            ("tangent", "transcribed; checked against Euler characteristic 3 and signature 1"),
        ],
    )?;
    m.flags.unverified_source = true;
    Ok(CatalogEntry {
        model: m,
        expected: vec![exp("halpha", "tangent, l = 0, any u", "fail", Source::Published)],
    })
}

// ---- manifold files ---------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    free_rank: usize,
    #[serde(with = "big_vec", default)]
    torsion: Vec<BigInt>,
    names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Mod2File {
    dimension: usize,
    names: Vec<String>,
    /// One row per integral generator.
    reduction: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CupFile {
    deg_a: usize,
    gen_a: usize,
    deg_b: usize,
    gen_b: usize,
    #[serde(with = "big_vec")]
    result: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Cup2File {
    deg_a: usize,
    gen_a: usize,
    deg_b: usize,
    gen_b: usize,
    result: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChernFile {
    #[serde(with = "big_vec")]
    c1: Vec<BigInt>,
    #[serde(with = "big_vec")]
    c2: Vec<BigInt>,
    #[serde(with = "big_vec")]
    c3: Vec<BigInt>,
    #[serde(with = "big_vec")]
    c4: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TangentFile {
    #[serde(with = "big_vec")]
    c: Vec<BigInt>,
    #[serde(with = "big_vec")]
    p1: Vec<BigInt>,
    #[serde(with = "big_vec")]
    p2: Vec<BigInt>,
    #[serde(with = "big_vec")]
    e: Vec<BigInt>,
    w2: Vec<u8>,
    #[serde(with = "big")]
    chi: BigInt,
    #[serde(with = "big_opt", default, skip_serializing_if = "Option::is_none")]
    signature: Option<BigInt>,
    #[serde(with = "big_vec_opt", default, skip_serializing_if = "Option::is_none")]
    q1: Option<Vec<BigInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w4: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w6: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chern: Option<ChernFile>,
}

mod big_vec_opt {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "crate::serde_int::big_vec")] Vec<BigInt>);

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|x| W(x.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// On-disk layout of a manifold model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifoldFile {
    name: String,
    groups: BTreeMap<usize, GroupFile>,
    mod2: BTreeMap<usize, Mod2File>,
    cup: Vec<CupFile>,
    #[serde(default)]
    cup2: Vec<Cup2File>,
    sq2: BTreeMap<usize, Vec<Vec<u8>>>,
    #[serde(with = "big_vec")]
    fundamental: Vec<BigInt>,
    tangent: TangentFile,
    #[serde(default)]
    provenance: BTreeMap<String, String>,
    #[serde(default)]
    flags: ModelFlags,
}

fn bits_to_file(b: &[bool]) -> Vec<u8> {
    b.iter().map(|&x| x as u8).collect()
}

fn bits_from_file(v: &[u8], what: &str) -> Result<Vec<bool>> {
    v.iter()
        .map(|&x| match x {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::Parse(format!("{what}: mod-2 entries must be 0 or 1, got {x}"))),
        })
        .collect()
}

fn coords(x: &IntClass) -> Vec<BigInt> {
    x.free().iter().chain(x.torsion()).cloned().collect()
}

fn class_from(ring: &Cohomology, degree: usize, v: &[BigInt], what: &str) -> Result<IntClass> {
    let g = ring.group(degree);
    if v.len() != g.rank() {
        return Err(Error::Parse(format!(
            "{what}: expected {} coordinates in degree {degree}, got {}",
            g.rank(),
            v.len()
        )));
    }
    let x = IntClass::from_parts(degree, v[..g.free_rank].to_vec(), v[g.free_rank..].to_vec());
    Ok(ring.reduce(x))
}

fn mod2_from(ring: &Cohomology, degree: usize, v: &[u8], what: &str) -> Result<Mod2Class> {
    let m = Mod2Class::new(degree, bits_from_file(v, what)?);
    ring.check_mod2_shape(&m).map_err(|_| {
        Error::Parse(format!("{what}: expected {} bits in degree {degree}", ring.mod2_dim(degree)))
    })?;
    Ok(m)
}

impl ManifoldFile {
    fn from_model(m: &ManifoldModel) -> Self {
        let r = &m.ring;
        let mut groups = BTreeMap::new();
        let mut mod2 = BTreeMap::new();
        for d in 0..=8 {
            let g = r.group(d);
            if g.rank() > 0 {
                groups.insert(
                    d,
                    GroupFile {
                        free_rank: g.free_rank,
                        torsion: g.torsion.clone(),
                        names: r.generator_names(d).to_vec(),
                    },
                );
            }
            let md = r.mod2_degree(d);
            if md.dimension > 0 || !md.reduction.is_empty() {
                mod2.insert(
                    d,
                    Mod2File {
                        dimension: md.dimension,
                        names: md.names.clone(),
                        reduction: md.reduction.iter().map(|row| bits_to_file(row)).collect(),
                    },
                );
            }
        }
        let cup = r
            .cup_table()
            .iter()
            .map(|(k, v)| CupFile {
                deg_a: k.0,
                gen_a: k.1,
                deg_b: k.2,
                gen_b: k.3,
                result: coords(v),
            })
            .collect();
        let cup2 = r
            .cup2_table()
            .iter()
            .map(|(k, v)| Cup2File {
                deg_a: k.0,
                gen_a: k.1,
                deg_b: k.2,
                gen_b: k.3,
                result: bits_to_file(v.bits()),
            })
            .collect();
        let sq2 = r
            .sq2_table()
            .iter()
            .map(|(d, rows)| (*d, rows.iter().map(|x| bits_to_file(x.bits())).collect()))
            .collect();
        let t = &m.tangent;
        ManifoldFile {
            name: m.name.clone(),
            groups,
            mod2,
            cup,
            cup2,
            sq2,
            fundamental: r.fundamental().to_vec(),
            tangent: TangentFile {
                c: coords(&t.c),
                p1: coords(&t.p1),
                p2: coords(&t.p2),
                e: coords(&t.e),
                w2: bits_to_file(t.w2.bits()),
                chi: t.chi.clone(),
                signature: t.signature.clone(),
                q1: Some(coords(&t.q1_c)),
                w4: Some(bits_to_file(t.w4.bits())),
                w6: Some(bits_to_file(t.w6.bits())),
                chern: t.chern.as_ref().map(|z| ChernFile {
                    c1: coords(&z.c1),
                    c2: coords(&z.c2),
                    c3: coords(&z.c3),
                    c4: coords(&z.c4),
                }),
            },
            provenance: m.provenance.clone(),
            flags: m.flags.clone(),
        }
    }

    fn into_model(self) -> Result<ManifoldModel> {
        let mut rb = RingBuilder::new();
        for (&d, g) in &self.groups {
            if d > 8 {
                return Err(Error::Parse(format!("groups: degree {d} out of range")));
            }
            rb.set_group(
                d,
                DegreeGroup {
                    free_rank: g.free_rank,
                    torsion: g.torsion.clone(),
                },
                g.names.clone(),
            );
        }
        for (&d, m) in &self.mod2 {
            if d > 8 {
                return Err(Error::Parse(format!("mod2: degree {d} out of range")));
            }
            let reduction = m
                .reduction
                .iter()
                .map(|row| bits_from_file(row, &format!("mod2.{d}.reduction")))
                .collect::<Result<Vec<_>>>()?;
            rb.set_mod2(
                d,
                Mod2Degree {
                    dimension: m.dimension,
                    names: m.names.clone(),
                    reduction,
                },
            );
        }
        for (i, c) in self.cup.iter().enumerate() {
            if c.deg_a > 8 || c.deg_b > 8 {
                return Err(Error::Parse(format!("cup[{i}]: degree out of range")));
            }
            rb.raw_cup((c.deg_a, c.gen_a, c.deg_b, c.gen_b), c.result.clone());
        }
        for (i, c) in self.cup2.iter().enumerate() {
            let bits = bits_from_file(&c.result, &format!("cup2[{i}]"))?;
            rb.raw_cup2((c.deg_a, c.gen_a, c.deg_b, c.gen_b), bits);
        }
        for (&d, rows) in &self.sq2 {
            if d != 2 && d != 4 {
                return Err(Error::UnsupportedSq2Degree(d));
            }
            let rows = rows
                .iter()
                .map(|row| bits_from_file(row, &format!("sq2.{d}")))
                .collect::<Result<Vec<_>>>()?;
            rb.raw_sq2(d, rows);
        }
        rb.raw_fundamental(self.fundamental.clone());
        rb.w2_bits(bits_from_file(&self.tangent.w2, "tangent.w2")?);
        let ring = rb.build()?;
        for (i, c) in self.cup.iter().enumerate() {
            let g = |d: usize, k: usize| k < ring.group(d).rank();
            if !g(c.deg_a, c.gen_a) || !g(c.deg_b, c.gen_b) {
                return Err(Error::Parse(format!("cup[{i}]: generator index out of range")));
            }
        }

        let tf = &self.tangent;
        let c = class_from(&ring, 2, &tf.c, "tangent.c")?;
        let p1 = class_from(&ring, 4, &tf.p1, "tangent.p1")?;
        let p2 = class_from(&ring, 8, &tf.p2, "tangent.p2")?;
        let e = class_from(&ring, 8, &tf.e, "tangent.e")?;
        let chi = i64::try_from(&tf.chi).map_err(|_| Error::Parse("tangent.chi out of range".into()))?;
        let sig = match &tf.signature {
            Some(s) => Some(i64::try_from(s).map_err(|_| Error::Parse("tangent.signature out of range".into()))?),
            None => None,
        };
        let mut t = tangent_from(&ring, c, p1, p2, e, chi, sig)?;
        t.w2 = ring.w2().clone();
        if let Some(q) = &tf.q1 {
            t.q1_c = class_from(&ring, 4, q, "tangent.q1")?;
        }
        t.w4 = match &tf.w4 {
            Some(w) => mod2_from(&ring, 4, w, "tangent.w4")?,
            None => ring.rho2(&t.q1_c),
        };
        t.w6 = match &tf.w6 {
            Some(w) => mod2_from(&ring, 6, w, "tangent.w6")?,
            None => ring.add2(&ring.sq2(&t.w4)?, &ring.cup2(&t.w2, &t.w4)?)?,
        };
        if let Some(z) = &tf.chern {
            t.chern = Some(ComplexBundleData::new(
                4,
                class_from(&ring, 2, &z.c1, "tangent.chern.c1")?,
                class_from(&ring, 4, &z.c2, "tangent.chern.c2")?,
                class_from(&ring, 6, &z.c3, "tangent.chern.c3")?,
                class_from(&ring, 8, &z.c4, "tangent.chern.c4")?,
            )?);
        }
        Ok(ManifoldModel {
            name: self.name,
            ring,
            tangent: t,
            provenance: self.provenance,
            flags: self.flags,
        })
    }
}

/// Serializes a model in the manifold file format.
pub fn to_json(m: &ManifoldModel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ManifoldFile::from_model(m))?)
}

/// Parses and validates a model.
pub fn from_json(src: &str) -> Result<ManifoldModel> {
    let file: ManifoldFile = serde_json::from_str(src).map_err(|e| {
        Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let m = file.into_model()?;
    m.validate()?;
    Ok(m)
}

pub fn load(path: &Path) -> Result<ManifoldModel> {
    from_json(&fs::read_to_string(path)?)
}

pub fn save(m: &ManifoldModel, path: &Path) -> Result<()> {
    let mut s = to_json(m)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

// ---- bundle files ------------------------------------------------------------------

/// Bundle description with classes written as expressions in the model's
/// generator names, e.g. `"2a"` or `"s2 + s11"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BundleFile {
    Real {
        dim: usize,
        p1: String,
        p2: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        e: Option<String>,
        #[serde(default = "zero_str")]
        w2: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w4: Option<String>,
        #[serde(default = "zero_str")]
        w6: String,
        /// Integral lift of `w_2` and `q_1` relative to it.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lift: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q1: Option<String>,
    },
    Complex {
        rank: usize,
        c1: String,
        c2: String,
        c3: String,
        c4: String,
    },
}

fn zero_str() -> String {
    "0".into()
}

/// A parsed bundle file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleSpec {
    Real(RealBundleData),
    Complex(ComplexBundleData),
}

impl BundleFile {
    pub fn resolve(&self, ring: &Cohomology) -> Result<BundleSpec> {
        match self {
            BundleFile::Real {
                dim,
                p1,
                p2,
                e,
                w2,
                w4,
                w6,
                lift,
                q1,
            } => {
                let p1 = parse_class(ring, p1, 4)?;
                let p2 = parse_class(ring, p2, 8)?;
                let w2 = parse_mod2(ring, w2, 2)?;
                let spin = match (lift, q1) {
                    (Some(l), Some(q)) => Some(SpinLift {
                        lift: parse_class(ring, l, 2)?,
                        q1: parse_class(ring, q, 4)?,
                    }),
                    (None, None) => None,
                    _ => return Err(Error::MissingInput("`lift` and `q1` must be given together".into())),
                };
                let w4 = match (w4, &spin) {
                    (Some(w), _) => parse_mod2(ring, w, 4)?,
                    (None, Some(s)) => ring.rho2(&s.q1),
                    (None, None) => return Err(Error::MissingInput("w4 (or lift and q1)".into())),
                };
                let e = match e {
                    Some(s) => Some(parse_class(ring, s, *dim)?),
                    None => None,
                };
                let data = RealBundleData {
                    dim: *dim,
                    spin: Some(w2.is_zero()),
                    w2,
                    w4,
                    w6: parse_mod2(ring, w6, 6)?,
                    p1,
                    p2,
                    e,
                    q1: spin,
                };
                let rep = data.validate(ring)?;
                if let Some(c) = rep.failed().next() {
                    return Err(Error::Validation {
                        axiom: c.name.clone(),
                        detail: format!("{} vs {}", c.lhs.render(Some(ring)), c.rhs.render(Some(ring))),
                    });
                }
                Ok(BundleSpec::Real(data))
            }
            BundleFile::Complex { rank, c1, c2, c3, c4 } => Ok(BundleSpec::Complex(ComplexBundleData::new(
                *rank,
                parse_class(ring, c1, 2)?,
                parse_class(ring, c2, 4)?,
                parse_class(ring, c3, 6)?,
                parse_class(ring, c4, 8)?,
            )?)),
        }
    }
}

pub fn load_bundle(path: &Path, ring: &Cohomology) -> Result<BundleSpec> {
    let src = fs::read_to_string(path)?;
    let file: BundleFile = serde_json::from_str(&src)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    file.resolve(ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_validate() {
        for n in BUILTIN_NAMES {
            let e = builtin(n).unwrap_or_else(|e| panic!("{n}: {e}"));
            assert_eq!(e.model.name, n);
        }
    }

    #[test]
    fn hp2_normalization() {
        let m = builtin_model("HP2").unwrap();
        let a = m.class("a", 4).unwrap();
        let a2 = m.ring.cup(&a, &a).unwrap();
        assert_eq!(m.ring.evaluate(&a2).unwrap(), BigInt::from(1));
        assert_eq!(m.tangent.q1_c, a);
    }

    #[test]
    fn products() {
        let m = builtin_model("S4xS4").unwrap();
        assert_eq!(m.ring.group(4).free_rank, 2);
        assert_eq!(m.ring.evaluate(&m.tangent.e).unwrap(), BigInt::from(4));
        let m = builtin_model("CP2xCP2").unwrap();
        assert_eq!(m.tangent.p1, m.class("3x2 + 3y2", 4).unwrap());
        assert_eq!(m.ring.evaluate(&m.tangent.e).unwrap(), BigInt::from(9));
        assert_eq!(m.tangent.w6, parse_mod2(&m.ring, "x2y + xy2", 6).unwrap());
    }

    #[test]
    fn round_trip() {
        for n in BUILTIN_NAMES {
            let m = builtin_model(n).unwrap();
            let back = from_json(&to_json(&m).unwrap()).unwrap();
            assert_eq!(back, m, "{n}");
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let m = builtin_model("HP2").unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&m).unwrap()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(matches!(from_json(&v.to_string()), Err(Error::Parse(_))));
    }

    #[test]
    fn bad_w2_rejected() {
        let m = builtin_model("CP4").unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&m).unwrap()).unwrap();
        v["tangent"]["w2"] = serde_json::json!([0]);
        v["tangent"]["w6"] = serde_json::Value::Null;
        let err = from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }), "{err}");
    }
}
