use lagdelta::equality::{check_t1, check_t2, random_witness, verify_witness, EqualityParamsJson};
use lagdelta::immersion::{lemma1_roundtrip, potential_from_tensor, second_fundamental_form_numeric};
use lagdelta::inequality::evaluate;
use lagdelta::sampling::seeded_tensor;
use lagdelta::{AmbientConstant, BoundSource, CubicForm, OptimizerOptions, PartitionSpec, Verdict};

#[test]
fn witnesses_are_sharp_and_unflagged() {
    let opts = OptimizerOptions {
        restarts: 6,
        ..Default::default()
    };
    for n in 3..=6 {
        for (i, p) in PartitionSpec::enumerate_all(n).into_iter().enumerate() {
            let h = random_witness(&p, 1.5, (n * 100 + i) as u64);
            for c in [-1.0, 0.0, 1.0] {
                let w = verify_witness(&h, AmbientConstant::new(c).unwrap(), &p, &opts).unwrap();
                assert!(!w.flagged, "{p} c={c}");
                assert!(w.report.sharp, "{p} c={c}: {:?}", w.report.optimal_row());
            }
        }
    }
}

#[test]
fn params_json_builds_known_witness() {
    let p = PartitionSpec::new(3, vec![2]).unwrap();
    let raw: EqualityParamsJson = serde_json::from_str(r#"{"lambda": [2.0]}"#).unwrap();
    let h = lagdelta::equality::build_t1(&raw.to_t1(&p).unwrap()).unwrap();
    assert_eq!(h.get(0, 0, 2), 0.5);
    assert!(check_t1(&h, &p).unwrap().is_empty());
    assert!(lemma1_roundtrip(&h, &[0.0; 3]).unwrap() <= 1e-10);

    let p = PartitionSpec::new(4, vec![2, 2]).unwrap();
    let raw: EqualityParamsJson = serde_json::from_str(
        r#"{"traces": [[3, 1.0]], "inblock": [{"idx": [3, 3, 3], "value": 1.0}]}"#,
    )
    .unwrap();
    let h = lagdelta::equality::build_t2(&raw.to_t2(&p).unwrap()).unwrap();
    assert_eq!(h.get(0, 0, 2), 0.25);
    assert!(check_t2(&h, &p).unwrap().is_empty());
    assert!(serde_json::from_str::<EqualityParamsJson>(r#"{"lambda": [1], "extra": 0}"#).is_err());
}

#[test]
fn tensor_json_roundtrip() {
    for seed in 0..20 {
        let h = seeded_tensor(2 + (seed as usize % 10), 3.0, seed);
        let back = CubicForm::from_json_str(&h.to_json_string()).unwrap();
        assert_eq!(back, h);
    }
}

#[test]
fn recovered_tensor_satisfies_bounds() {
    let opts = OptimizerOptions {
        restarts: 4,
        ..Default::default()
    };
    for seed in 0..10 {
        let a = seeded_tensor(4, 1.0, seed);
        let f = potential_from_tensor(&a);
        let h = second_fundamental_form_numeric(&f, &[0.0; 4]).unwrap().to_cubic_form();
        for p in PartitionSpec::enumerate_all(4) {
            let r = evaluate(&h, AmbientConstant::FLAT, &p, &opts).unwrap();
            for row in &r.rows {
                if let Some(gap) = row.gap {
                    if row.coefficients.as_ref().is_some_and(|c| c.applicable) {
                        assert!(gap >= -1e-9, "{p} {:?}: {gap}", row.source);
                    }
                }
            }
            assert_ne!(r.row(BoundSource::LegacyCdvv).verdict, Verdict::Violated);
        }
    }
}
