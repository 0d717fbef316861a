//! Cross-module checks: parsed input through evaluation, membership,
//! component dimensions and the exhaustive finite-field oracle.

use utstar::expr::parse;
use utstar::matrep::{evaluate_generic, InvolutionKind};
use utstar::spaces::{classify, standard_generators};
use utstar::tideal::{
    brute_force_finite, central_check, Centrality, Engine, Membership, BRUTE_FORCE_CAP,
};
use utstar::{FieldSpec, MultiDegree};

fn field(c: u64) -> FieldSpec {
    FieldSpec::new(c).unwrap()
}

#[test]
fn parsed_members_have_reconstructing_certificates() {
    for c in [0, 3, 5] {
        let f = field(c);
        let engine = Engine::new(f);
        for src in [
            "z1[z2,z3] - z2[z1,z3] + z3[z1,z2]",
            "[y1,y2][y3,y4] - [y3,y4][y1,y2] + 2 z1[z2,z3] - 2 z2[z1,z3] + 2 z3[z1,z2]",
            "y5(z1[z2,z3] - z2[z1,z3] + z3[z1,z2])y6",
            "(z1[z2,z3] - z2[z1,z3] + z3[z1,z2])'",
        ] {
            let p = parse(src, f).unwrap();
            match engine.member_of_i(&p).unwrap() {
                Membership::Member(cert) => assert_eq!(cert.reconstruct(f), p, "{src} over {f}"),
                Membership::NotMember { residue, .. } => panic!("{src} over {f}: residue {residue}"),
            }
            // members of I are identities of UT_3 with the reflection
            assert!(evaluate_generic(&p, 3, InvolutionKind::Star).unwrap().is_zero());
        }
    }
}

#[test]
fn non_identities_are_not_members() {
    let f = field(0);
    let engine = Engine::new(f);
    for src in ["[y1,y2]", "z1z2z3", "[z1,z2][z3,z4]", "y1 - y1' + [y1,y2]"] {
        let p = parse(src, f).unwrap();
        assert!(!engine.member_of_i(&p).unwrap().is_member(), "{src}");
        assert!(!evaluate_generic(&p, 3, InvolutionKind::Star).unwrap().is_zero(), "{src}");
    }
}

#[test]
fn main_theorem_on_relabelled_components() {
    let engine = Engine::new(field(5));
    // an unsorted multidegree is checked on its sorted form
    let a = engine.verify_main_theorem(&"2,1;1".parse::<MultiDegree>().unwrap()).unwrap();
    let b = engine.verify_main_theorem(&"1,2;1".parse::<MultiDegree>().unwrap()).unwrap();
    assert_eq!(a.dims(), b.dims());
    assert!(a.passed());
}

#[test]
fn families_complete_i_to_b() {
    for c in [0, 5] {
        let engine = Engine::new(field(c));
        for md in ["2;0", "0;3", "1,1;1", "1;3", "1;1,1", "2;2", "1,1;1,1"] {
            let md: MultiDegree = md.parse().unwrap();
            let r = engine.verify_main_theorem(&md).unwrap();
            let case = classify(&md, field(c)).unwrap();
            let fam = standard_generators(case, &md, field(c)).unwrap();
            assert_eq!(r.dim_i_b + fam.len(), r.dim_b, "{md} char {c}");
            assert!(r.passed(), "{md} char {c}");
        }
    }
}

#[test]
fn generic_central_check_agrees_with_enumeration() {
    let f = field(3);
    for (src, central) in [
        ("[y1,z1]", false),
        ("z1[z2,z3] - z2[z1,z3] + z3[z1,z2]", true),
        ("2 + z1[z2,z3] - z2[z1,z3] + z3[z1,z2]", true),
        ("2 + [y1,y2]", false),
        ("z1", false),
        ("y1", false),
    ] {
        let p = parse(src, f).unwrap();
        let generic = central_check(&p, 3, InvolutionKind::Star).unwrap();
        assert_eq!(generic != Centrality::NotCentral, central, "{src}");
        let bf = brute_force_finite(&p, 3, InvolutionKind::Star, BRUTE_FORCE_CAP).unwrap();
        assert_eq!(bf.central, central, "{src}");
    }
}

#[test]
fn involution_s_needs_even_size() {
    let p = parse("[z1,z2]", field(0)).unwrap();
    assert!(central_check(&p, 3, InvolutionKind::S).is_err());
    assert!(central_check(&p, 4, InvolutionKind::S).is_ok());
}
