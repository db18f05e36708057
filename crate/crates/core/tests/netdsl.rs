use proptest::prelude::*;
use qnet_core::dup::random_unitary;
use qnet_core::netdsl::{
    parse_document, resolve_document, serialize_document, Analysis, AnalysisKind, NetworkDocument, UncertaintyDecl,
    BUNDLED_CAVITY,
};
use qnet_core::slh::{cascade, identity_system, max_component_residual, random_slh};
use qnet_core::uncertainty::{
    apply_perturbation, cavity_box, cavity_nominal, decompose, Direction, Family, Parameter, UncertaintyBox,
};
use qnet_core::{c64, ComplexMatrix, Coupling, Hamiltonian, SlhModel};

const TOL: f64 = 1e-10;

fn parse(text: &str) -> NetworkDocument {
    parse_document(text.as_bytes(), TOL).unwrap_or_else(|d| panic!("{text}\n{d:#?}"))
}

fn codes(text: &str) -> Vec<(&'static str, usize, usize)> {
    parse_document(text.as_bytes(), TOL)
        .expect_err("document should be rejected")
        .into_iter()
        .map(|d| (d.code, d.line, d.column))
        .collect()
}

#[test]
fn bundled_cavity_document() {
    let doc = parse(BUNDLED_CAVITY);
    assert_eq!(doc.components.len(), 1);
    assert_eq!(doc.uncertainties.len(), 1);
    let decl = &doc.uncertainties["cavity_box"];
    let names: Vec<_> = decl.ubox.parameters().iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["gamma", "delta"]);
    let kinds: Vec<_> = doc.analyses.iter().map(|a| a.kind).collect();
    assert_eq!(
        kinds,
        [AnalysisKind::Decompose, AnalysisKind::Verify, AnalysisKind::Sweep]
    );
    assert_eq!(doc.components["cavity"], cavity_nominal([1.0, 1.0, 1.0]).unwrap());
}

#[test]
fn empty_components_is_valid() {
    let doc = parse(r#"{"qnet_version": 1, "components": {}}"#);
    assert!(doc.components.is_empty());
    assert!(doc.analyses.is_empty());
}

#[test]
fn non_unitary_scattering_is_located() {
    let text = r#"{
  "qnet_version": 1,
  "components": {
    "bad": {
      "modes": 1, "channels": 2,
      "S": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]],
      "C_minus": [[[1, 0]], [[0, 0]]], "C_plus": [[[0, 0]], [[0, 0]]],
      "Omega_minus": [[[0, 0]]], "Omega_plus": [[[0, 0]]]
    }
  }
}"#;
    assert_eq!(codes(text), [("UNITARITY", 6, 12)]);
}

#[test]
fn semantic_errors_are_collected_together() {
    let text = r#"{
  "qnet_version": 1,
  "components": {
    "a": {"modes": 1, "channels": 1, "S": [[[1, 0]]], "C_minus": [[[1, 0]]], "C_plus": [[[0, 0]]],
          "Omega_minus": [[[0, 1]]], "Omega_plus": [[[0, 0]]], "extra": 1}
  },
  "chains": {"c": ["a", "missing"]}
}"#;
    let got = codes(text);
    assert!(got.contains(&("HERMITICITY", 5, 26)), "{got:?}");
    assert!(got.contains(&("UNKNOWN_FIELD", 5, 64)), "{got:?}");
    // `a` is reported once, at its own errors; only the undeclared member dangles
    assert_eq!(got.iter().filter(|(c, _, _)| *c == "DANGLING_REFERENCE").count(), 1);
    assert!(got.contains(&("DANGLING_REFERENCE", 7, 25)), "{got:?}");
}

#[test]
fn chain_dimension_mismatch_names_both_components() {
    let mut doc = NetworkDocument::default();
    doc.components.insert("one".into(), random_slh(1, 2, 1));
    doc.components.insert("two".into(), random_slh(2, 2, 2));
    doc.chains.insert("c".into(), vec!["two".into(), "one".into()]);
    let text = String::from_utf8(serialize_document(&doc)).unwrap();
    let diags = parse_document(text.as_bytes(), TOL).unwrap_err();
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].code, "DIMENSION");
    assert!(diags[0].message.contains("`one`") && diags[0].message.contains("`two`"));
    let err = resolve_document(&doc, TOL).unwrap_err().to_string();
    assert!(err.contains("`one`") && err.contains("`two`"), "{err}");
}

#[test]
fn chain_of_one_is_unchanged() {
    let mut doc = NetworkDocument::default();
    let g = random_slh(2, 2, 3);
    doc.components.insert("g".into(), g.clone());
    doc.chains.insert("solo".into(), vec!["g".into()]);
    let r = resolve_document(&doc, TOL).unwrap();
    assert_eq!(r.models["solo"], g);
}

#[test]
fn chain_of_three_matches_nested_cascade() {
    let mut doc = NetworkDocument::default();
    let gs: Vec<SlhModel> = (0..3).map(|i| random_slh(2, 2, 10 + i)).collect();
    for (i, g) in gs.iter().enumerate() {
        doc.components.insert(format!("g{i}"), g.clone());
    }
    doc.chains
        .insert("c".into(), vec!["g2".into(), "g1".into(), "g0".into()]);
    let r = resolve_document(&doc, TOL).unwrap();
    let nested = cascade(&gs[2], &cascade(&gs[1], &gs[0]).unwrap()).unwrap();
    assert!(max_component_residual(&r.models["c"], &nested) <= 1e-12);
}

#[test]
fn decomposed_cavity_chain_reproduces_plant() {
    let nominal = cavity_nominal([1.0, 1.0, 1.0]).unwrap();
    let b = cavity_box((0.21, 0.21), (0.2, 0.2)).unwrap();
    let p = b.instantiate(&nominal, &[0.21, 0.2]).unwrap();
    let dec = decompose(&nominal, &p).unwrap();
    let mut doc = NetworkDocument::default();
    doc.components.insert("Gn".into(), dec.g_nominal.clone());
    doc.components.insert("Delta".into(), dec.g_delta.clone());
    doc.chains.insert("plant".into(), vec!["Gn".into(), "Delta".into()]);
    let doc = parse(&String::from_utf8(serialize_document(&doc)).unwrap());
    let r = resolve_document(&doc, TOL).unwrap();
    let plant = apply_perturbation(&nominal, &p).unwrap();
    assert!(max_component_residual(&r.models["plant"], &plant) <= 1e-10);
}

#[test]
fn identity_component_serializes_stably() {
    let mut doc = NetworkDocument::default();
    doc.components.insert("id".into(), identity_system(1, 1));
    let a = serialize_document(&doc);
    let b = serialize_document(&doc.clone());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"S\": [\n        [[1, 0]]\n      ]"), "{text}");
}

#[test]
fn bundled_round_trip_fixed_point() {
    let doc = parse(BUNDLED_CAVITY);
    let once = serialize_document(&doc);
    let reparsed = parse_document(&once, TOL).unwrap();
    assert_eq!(reparsed, doc);
    assert_eq!(serialize_document(&reparsed), once);
}

#[test]
fn resolved_tasks_default_to_upper_bounds() {
    let text = BUNDLED_CAVITY.replace(r#", "at": {"gamma": 0.21, "delta": 0.2}"#, "");
    let r = resolve_document(&parse(&text), TOL).unwrap();
    assert_eq!(r.tasks.len(), 3);
    assert_eq!(r.tasks[0].uncertainty.as_ref().unwrap().values, [0.5, 0.3]);
    assert_eq!(r.tasks[2].grid, 11);
}

fn rich_document(seed: u64) -> NetworkDocument {
    let mut doc = NetworkDocument::default();
    let n = 1 + seed as usize % 2;
    let m = 1 + seed as usize / 2 % 3;
    let a = random_slh(n, m, seed);
    let b = random_slh(n, m, seed + 100);
    doc.components.insert("a".into(), a);
    doc.components.insert("b \"quoted\"".into(), b);
    doc.chains.insert("ab".into(), vec!["a".into(), "b \"quoted\"".into()]);
    let h = Hamiltonian::new(
        ComplexMatrix::from_fn(n, n, |i, j| if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) }),
        ComplexMatrix::zeros(n, n),
    );
    let dir = Direction {
        coupling: Coupling::new(
            ComplexMatrix::from_fn(m, n, |i, j| c64(0.1 * i as f64, -0.3 * j as f64)),
            ComplexMatrix::zeros(m, n),
        ),
        hamiltonian: h,
    };
    doc.uncertainties.insert(
        "gen".into(),
        UncertaintyDecl {
            target: "ab".into(),
            ubox: UncertaintyBox::new(
                vec![Parameter::new("t", -0.1 * seed as f64, 1e-3)],
                Family::GenericAdditive { directions: vec![dir] },
            )
            .unwrap(),
        },
    );
    if n == 1 {
        doc.uncertainties.insert(
            "cav".into(),
            UncertaintyDecl {
                target: "a".into(),
                ubox: cavity_box((-0.5, 0.5), (-1e-7, 3.25)).unwrap(),
            },
        );
    }
    doc.analyses.push(Analysis::new(AnalysisKind::Validate, "a"));
    doc.analyses.push(Analysis::new(AnalysisKind::Statespace, "ab"));
    let mut v = Analysis::new(AnalysisKind::Verify, "ab");
    v.uncertainty = Some("gen".into());
    v.at = vec![("t".into(), 0.1 / 3.0)];
    doc.analyses.push(v);
    let mut s = Analysis::new(AnalysisKind::Sweep, "ab");
    s.uncertainty = Some("gen".into());
    s.grid = 2 + seed as usize;
    s.margin = 0.25;
    doc.analyses.push(s);
    doc
}

#[test]
fn crafted_documents_round_trip() {
    for seed in 0..20 {
        let doc = rich_document(seed);
        let once = serialize_document(&doc);
        let back = parse_document(&once, TOL).unwrap_or_else(|d| panic!("{d:#?}"));
        assert_eq!(back, doc, "seed {seed}");
        assert_eq!(serialize_document(&back), once, "seed {seed}");
        resolve_document(&back, TOL).unwrap();
    }
}

#[test]
fn zero_mode_component_round_trips() {
    let mut doc = NetworkDocument::default();
    let u = random_unitary(2, 4).unwrap();
    doc.components.insert(
        "beam_splitter".into(),
        SlhModel::new(u, Coupling::zero(2, 0), Hamiltonian::zero(0)).unwrap(),
    );
    let once = serialize_document(&doc);
    assert_eq!(parse_document(&once, TOL).unwrap(), doc);
}

#[test]
fn malformed_documents() {
    assert_eq!(codes("{\"qnet_version\": 1,, }"), [("SYNTAX", 1, 20)]);
    assert_eq!(codes("\u{feff}{}"), [("ENCODING", 1, 1)]);
    assert_eq!(codes(r#"{"qnet_version": 2, "components": {}}"#), [("VERSION", 1, 18)]);
    assert_eq!(codes(r#"{"qnet_version": 1}"#), [("MISSING_FIELD", 1, 1)]);
    assert_eq!(
        codes(r#"{"qnet_version": 1, "components": {}, "colour": 1}"#),
        [("UNKNOWN_FIELD", 1, 39)]
    );
    assert_eq!(
        codes(r#"{"qnet_version": 1, "components": {}, "chains": {"c": ["nope"]}}"#),
        [("DANGLING_REFERENCE", 1, 56)]
    );
    assert_eq!(
        codes(r#"{"qnet_version": 1, "components": [], "chains": {}}"#),
        [("TYPE", 1, 35)]
    );
    let invalid = parse_document(b"{\"a\xff\": 1}", TOL).unwrap_err();
    assert_eq!(
        (invalid[0].code, invalid[0].line, invalid[0].column),
        ("ENCODING", 1, 4)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mutated_documents_never_panic(edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>(), 0u8..3), 1..8)) {
        let mut bytes = BUNDLED_CAVITY.as_bytes().to_vec();
        for (idx, byte, op) in edits {
            if bytes.is_empty() {
                break;
            }
            let i = idx.index(bytes.len());
            match op {
                0 => bytes[i] = byte,
                1 => { bytes.remove(i); }
                _ => bytes.insert(i, byte),
            }
        }
        if let Err(diags) = parse_document(&bytes, TOL) {
            prop_assert!(!diags.is_empty());
            for d in diags {
                prop_assert!(d.line >= 1 && d.column >= 1);
                prop_assert!(!d.code.is_empty());
            }
        }
    }
}
