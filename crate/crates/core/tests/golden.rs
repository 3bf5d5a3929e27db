// SPDX-License-Identifier: MIT OR Apache-2.0

//! Regenerated signals must match the checked-in CSV files byte for byte.
//! Set `WILDSEG_UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::PathBuf;

use wildseg_core::signals::to_csv;
use wildseg_core::{add_noise, test_signal, TestSignal};

const NOISE_SEED: u64 = 20_140_101;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check(name: &str, contents: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("WILDSEG_UPDATE_GOLDEN").is_some() {
        fs::write(&path, contents).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden file {}: {e}", path.display()));
    assert!(expected == contents, "{name} differs from its golden file");
}

#[test]
fn noiseless_signals_match_golden() {
    for sig in TestSignal::ALL {
        let (f, _) = test_signal(sig);
        check(&format!("{sig}.csv"), &to_csv(&f.values()));
    }
}

#[test]
fn noisy_signals_match_golden() {
    for sig in TestSignal::ALL {
        let (f, sigma) = test_signal(sig);
        let x = add_noise(&f.values(), sigma, NOISE_SEED).unwrap();
        check(&format!("{sig}_noisy.csv"), &to_csv(x.values()));
    }
}

#[test]
fn regeneration_is_deterministic() {
    let (f, sigma) = test_signal(TestSignal::Mix);
    let a = to_csv(add_noise(&f.values(), sigma, 7).unwrap().values());
    let b = to_csv(add_noise(&f.values(), sigma, 7).unwrap().values());
    assert_eq!(a, b);
}
