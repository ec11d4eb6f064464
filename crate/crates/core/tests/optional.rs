//! Checks on models whose cohomology data is not independently confirmed.

use obstruct8::catalog::builtin_model;
use obstruct8::cohomology::expr::parse_affine;
use obstruct8::criteria::{CriterionKind, Inputs};
use obstruct8::search::{sweep, Parameter, SearchSpace, SweepOptions};

#[test]
#[ignore = "G2SO4 data is unverified"]
fn g2so4_has_no_halpha_structure_with_spin_alpha() {
    let m = builtin_model("G2SO4").unwrap();
    let mut base = Inputs { xi: Some(m.tangent.as_real_bundle()), ..Inputs::default() };
    base.classes.insert("l".into(), m.ring.zero(2));
    let u = parse_affine(&m.ring, "k*g", 4).unwrap();
    let space = SearchSpace {
        parameter: Some(Parameter { lo: -48, hi: 48, stride: 1, slots: vec![("u".into(), u)] }),
        boxes: vec![],
    };
    let sol = sweep(CriterionKind::Halpha, &m, &base, &space, SweepOptions::default()).unwrap();
    assert!(sol.errors.is_empty(), "{:?}", sol.errors.first());
    assert!(sol.solutions.is_empty(), "passing k: {:?}", sol.passing_k());
}
