//! Exhaustive witness search over bounded boxes and residue summaries for
//! one-parameter sweeps.
//!
//! Points are ordered lexicographically: the sweep parameter `k` first, then
//! the box slots in declaration order, free coordinates before torsion. The
//! parallel sweep collects results in that order, so its output is identical
//! to a serial run.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::ManifoldModel;
use crate::cohomology::expr::AffineClass;
use crate::cohomology::IntClass;
use crate::criteria::{evaluate, CriterionKind, Inputs};
use crate::error::{Error, Result};
use crate::report::CheckReport;

pub const DEFAULT_CAP: u128 = 2_000_000;

/// A witness slot enumerated over a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxSlot {
    pub name: String,
    pub degree: usize,
    /// Inclusive bounds, one pair per free coordinate.
    pub bounds: Vec<(i64, i64)>,
    pub include_torsion: bool,
}

/// The sweep parameter `k` and the slots that depend on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameter {
    pub lo: i64,
    pub hi: i64,
    /// Step between evaluated values of `k`; summaries need 1.
    pub stride: i64,
    pub slots: Vec<(String, AffineClass)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchSpace {
    pub parameter: Option<Parameter>,
    pub boxes: Vec<BoxSlot>,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub cap: u128,
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            cap: DEFAULT_CAP,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    pub witnesses: BTreeMap<String, IntClass>,
    pub report: CheckReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointError {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    pub witnesses: BTreeMap<String, IntClass>,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSummary {
    pub modulus: u64,
    pub residues: Vec<u64>,
    pub window: (i64, i64),
    pub certification: String,
    pub rationale: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub criterion: String,
    pub points: u128,
    /// Inclusive range of `k`, when the space has a parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub stride: i64,
    pub solutions: Vec<Solution>,
    pub errors: Vec<PointError>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<ResidueSummary>,
}

fn one() -> i64 {
    1
}

fn is_one(n: &i64) -> bool {
    *n == 1
}

impl SolutionSet {
    /// Values of `k` for which some point passes.
    pub fn passing_k(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.solutions.iter().filter_map(|s| s.k).collect();
        set.into_iter().collect()
    }
}

/// One enumerated coordinate list per box slot.
struct BoxValues {
    name: String,
    values: Vec<IntClass>,
}

fn box_values(m: &ManifoldModel, b: &BoxSlot) -> Result<BoxValues> {
    let r = &m.ring;
    let g = r.group(b.degree);
    if b.bounds.len() != g.free_rank {
        return Err(Error::Shape(format!(
            "slot {}: {} bounds for free rank {}",
            b.name,
            b.bounds.len(),
            g.free_rank
        )));
    }
    if let Some((lo, hi)) = b.bounds.iter().find(|(lo, hi)| lo > hi) {
        return Err(Error::Shape(format!("slot {}: empty range {lo}..{hi}", b.name)));
    }
    let torsion = if b.include_torsion {
        r.torsion_classes(b.degree)
    } else {
        vec![r.zero(b.degree)]
    };
    let mut frees: Vec<Vec<BigInt>> = vec![vec![]];
    for &(lo, hi) in &b.bounds {
        frees = frees
            .into_iter()
            .flat_map(|f| {
                (lo..=hi).map(move |x| {
                    let mut g = f.clone();
                    g.push(BigInt::from(x));
                    g
                })
            })
            .collect();
    }
    let mut values = Vec::with_capacity(frees.len() * torsion.len());
    for f in &frees {
        for t in &torsion {
            values.push(r.reduce(IntClass::from_parts(b.degree, f.clone(), t.torsion().to_vec())));
        }
    }
    Ok(BoxValues {
        name: b.name.clone(),
        values,
    })
}

/// Number of points, before enumeration.
pub fn space_size(m: &ManifoldModel, space: &SearchSpace) -> u128 {
    let mut n: u128 = match &space.parameter {
        Some(p) if p.hi >= p.lo => (p.hi - p.lo) as u128 / p.stride.max(1) as u128 + 1,
        Some(_) => 0,
        None => 1,
    };
    for b in &space.boxes {
        let mut s: u128 = 1;
        for &(lo, hi) in &b.bounds {
            s = s.saturating_mul(if hi >= lo { (hi - lo) as u128 + 1 } else { 0 });
        }
        if b.include_torsion {
            for o in &m.ring.group(b.degree).torsion {
                s = s.saturating_mul(u128::try_from(o).unwrap_or(u128::MAX));
            }
        }
        n = n.saturating_mul(s);
    }
    n
}

/// Evaluates `kind` at every point of `space`, with `base` supplying the
/// bundles and any fixed classes.
pub fn sweep(
    kind: CriterionKind,
    m: &ManifoldModel,
    base: &Inputs,
    space: &SearchSpace,
    opts: SweepOptions,
) -> Result<SolutionSet> {
    let size = space_size(m, space);
    if size > opts.cap {
        return Err(Error::SpaceTooLarge { size, cap: opts.cap });
    }
    let boxes = space
        .boxes
        .iter()
        .map(|b| box_values(m, b))
        .collect::<Result<Vec<_>>>()?;
    let ks: Vec<Option<i64>> = match &space.parameter {
        Some(p) => (p.lo..=p.hi).step_by(p.stride.max(1) as usize).map(Some).collect(),
        None => vec![None],
    };
    let inner: usize = boxes.iter().map(|b| b.values.len()).product();
    let total = ks.len() * inner;

    let point = |idx: usize| -> Result<(Option<i64>, BTreeMap<String, IntClass>)> {
        let k = ks[idx / inner.max(1)];
        let mut rest = idx % inner.max(1);
        let mut w = BTreeMap::new();
        // Mixed radix with the last box varying fastest.
        let mut picks = vec![0usize; boxes.len()];
        for (i, b) in boxes.iter().enumerate().rev() {
            picks[i] = rest % b.values.len();
            rest /= b.values.len();
        }
        for (b, &i) in boxes.iter().zip(&picks) {
            w.insert(b.name.clone(), b.values[i].clone());
        }
        if let (Some(p), Some(k)) = (&space.parameter, k) {
            for (name, a) in &p.slots {
                w.insert(name.clone(), a.at(&m.ring, &BigInt::from(k))?);
            }
        }
        Ok((k, w))
    };
    let eval = |idx: usize| -> (Option<i64>, BTreeMap<String, IntClass>, Result<CheckReport>) {
        match point(idx) {
            Ok((k, w)) => {
                let mut inp = base.clone();
                for (n, c) in &w {
                    inp.classes.insert(n.clone(), c.clone());
                }
                let r = evaluate(kind, m, &inp);
                (k, w, r)
            }
            Err(e) => (None, BTreeMap::new(), Err(e)),
        }
    };
    let results: Vec<_> = if opts.parallel {
        (0..total).into_par_iter().map(eval).collect()
    } else {
        (0..total).map(eval).collect()
    };

    let mut out = SolutionSet {
        criterion: kind.name().into(),
        points: total as u128,
        window: space.parameter.as_ref().map(|p| (p.lo, p.hi)),
        stride: space.parameter.as_ref().map_or(1, |p| p.stride.max(1)),
        solutions: Vec::new(),
        errors: Vec::new(),
        summary: None,
    };
    for (k, witnesses, r) in results {
        match r {
            Ok(report) if report.verdict.is_pass() => out.solutions.push(Solution { k, witnesses, report }),
            Ok(_) => {}
            Err(e) => out.errors.push(PointError {
                k,
                witnesses,
                error: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Divisors of 48 and of `24 * max_modulus`, ascending.
pub fn default_periods(max_modulus: u64) -> Vec<u64> {
    let mut set = BTreeSet::new();
    for n in [48, 24 * max_modulus.max(1)] {
        for d in 1..=n {
            if n % d == 0 {
                set.insert(d);
            }
        }
    }
    set.into_iter().collect()
}

/// Attaches the smallest trial period `P` with `2P <= window` under which
/// membership of `k` is `P`-periodic across the window.
pub fn residue_summary(mut sol: SolutionSet, periods: &[u64]) -> Result<SolutionSet> {
    let (lo, hi) = sol
        .window
        .ok_or_else(|| Error::MissingInput("residue summaries need a one-parameter sweep".into()))?;
    if sol.stride != 1 {
        return Err(Error::Unsupported("residue summaries need stride 1".into()));
    }
    let window = (hi - lo + 1).max(0) as usize;
    let mut ps: Vec<u64> = periods.iter().copied().filter(|&p| p > 0).collect();
    ps.sort_unstable();
    ps.dedup();
    let Some(&smallest) = ps.first() else {
        return Err(Error::MissingInput("no trial periods".into()));
    };
    if 2 * smallest as usize > window {
        return Err(Error::WindowTooSmall {
            window,
            needed: 2 * smallest as usize,
        });
    }
    let members: BTreeSet<i64> = sol.passing_k().into_iter().collect();
    let is_member = |k: i64| members.contains(&k);
    for p in ps.into_iter().filter(|&p| 2 * p as usize <= window) {
        let pi = p as i64;
        if (lo..=hi - pi).all(|k| is_member(k) == is_member(k + pi)) {
            let residues: BTreeSet<u64> = members.iter().map(|k| k.rem_euclid(pi) as u64).collect();
            sol.summary = Some(ResidueSummary {
                modulus: p,
                residues: residues.into_iter().collect(),
                window: (lo, hi),
                certification: "window-verified".into(),
                rationale: format!(
                    "membership is {p}-periodic on every k in [{lo}, {hi}] and the window covers at least two periods; \
                     the criteria depend on k through polynomials of degree at most 2 under fixed-modulus congruences"
                ),
            });
            return Ok(sol);
        }
    }
    Ok(sol)
}

impl ResidueSummary {
    pub fn render(&self) -> String {
        let rs: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        let body = if rs.is_empty() { "none".to_string() } else { rs.join(", ") };
        format!(
            "k = {body} (mod {}), {} on [{}, {}]",
            self.modulus, self.certification, self.window.0, self.window.1
        )
    }
}
