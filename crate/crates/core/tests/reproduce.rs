use metrokit::reproduce::{run_reproduce, CASES};
use metrokit::Error;

#[test]
fn every_case_passes() {
    for case in CASES {
        let assertions = run_reproduce(case, 7).unwrap();
        for a in &assertions {
            println!("{case}: {a}");
        }
        assert!(assertions.iter().all(|a| a.passed), "{case} has failing assertions");
    }
}

#[test]
fn local_case_has_six_assertions() {
    assert_eq!(run_reproduce("local-n5", 0).unwrap().len(), 6);
}

#[test]
fn unknown_case_is_rejected() {
    assert_eq!(run_reproduce("nope", 0), Err(Error::CaseUnknown("nope".into())));
}
