use std::path::PathBuf;

use circuitkit::verify::{verify_corpus, VerifyOptions};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn every_corpus_check_passes() {
    let rows = verify_corpus(&corpus_dir(), &VerifyOptions::default()).unwrap();
    assert!(rows.len() > 50, "only {} rows", rows.len());
    let failed: Vec<_> = rows.iter().filter(|r| !r.passed).collect();
    assert!(failed.is_empty(), "failed checks: {failed:#?}");
}
