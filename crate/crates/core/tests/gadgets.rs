use surfred::gadget::{corpus, template, verify_exclusions, verify_gadget, GadgetKind, GadgetTemplate};
use surfred::lattice::plane_kind;
use surfred::LetterSet;

fn expected_count(t: &GadgetTemplate) -> usize {
    1 << t.in_ports().count()
}

#[test]
fn every_template_has_exactly_its_witnesses() {
    for t in corpus().unwrap() {
        let r = verify_gadget(&t).unwrap();
        assert!(r.matched, "{} ({}): {:?}", r.id, r.param, r.mismatch);
        assert_eq!(r.count, expected_count(&t), "{}", r.id);
        assert!(r.per_input.iter().all(|(_, c)| *c == 1));
    }
}

#[test]
fn and_gadget_counts() {
    let t = template(GadgetKind::And, None).unwrap();
    assert_eq!(t.noise.len(), 254);
    let r = verify_gadget(&t).unwrap();
    assert_eq!(r.count, 4);
    // output is the AND of the inputs
    for w in &t.witnesses {
        let out = t.out_index("out").unwrap();
        assert_eq!(w.outputs[out], w.inputs[0] && w.inputs[1]);
    }
}

#[test]
fn converters_and_cross_counts() {
    for (k, n) in [(GadgetKind::ConvertXToZ, 2), (GadgetKind::ConvertZToX, 2), (GadgetKind::CrossXZ, 4)] {
        assert_eq!(verify_gadget(&template(k, None).unwrap()).unwrap().count, n);
    }
}

#[test]
fn truth_tables() {
    let not = template(GadgetKind::Not, None).unwrap();
    for b in [false, true] {
        assert_eq!(not.witness(&[b]).unwrap().outputs, vec![!b]);
    }
    let fan = template(GadgetKind::Fanout, Some(25)).unwrap();
    for b in [false, true] {
        let w = fan.witness(&[b]).unwrap();
        assert_eq!(w.outputs[fan.out_index("out1").unwrap()], b);
        assert_eq!(w.outputs[fan.out_index("out2").unwrap()], b);
    }
    let cross = template(GadgetKind::CrossXZ, None).unwrap();
    for a in [false, true] {
        for b in [false, true] {
            let w = cross.witness(&[a, b]).unwrap();
            assert_eq!(w.outputs[cross.out_index("xout").unwrap()], a);
            assert_eq!(w.outputs[cross.out_index("zout").unwrap()], b);
        }
    }
}

#[test]
fn port_plaquettes_detect_the_wire() {
    for t in corpus().unwrap() {
        for p in &t.ports {
            let k = plane_kind(p.plaquette.0, p.plaquette.1);
            assert!(k.detects(p.wire.letter()), "{} port {}", t.kind, p.name);
        }
    }
}

#[test]
fn and_exclusions() {
    let t = template(GadgetKind::And, None).unwrap();
    let r = verify_exclusions(&t).unwrap();
    assert_eq!(r.case1_completions, 0);
    assert_eq!(r.y_at_xz4_completions, 0);
    assert_eq!(r.xz4_domain, LetterSet::parse("IXZ").unwrap());
    assert_eq!(r.unforced_count, 4);
    assert!(r.holds());
    assert!(verify_exclusions(&template(GadgetKind::Not, None).unwrap()).is_err());
}

#[test]
fn tampered_witness_is_caught() {
    let t = template(GadgetKind::And, None).unwrap();
    let mut bad = t.clone();
    let w = &mut bad.witnesses[0];
    let cell = *w.pattern.keys().next().unwrap();
    w.pattern.remove(&cell);
    assert!(!verify_gadget(&bad).unwrap().matched);
    let mut bad = t.clone();
    bad.syndromes.clear();
    assert!(!verify_gadget(&bad).unwrap().matched);
}
