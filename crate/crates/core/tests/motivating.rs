// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exhaustive search over all sub-intervals of the three-change-point
//! example, compared with the full-series CUSUM and with detection.

use wildseg_core::{
    add_noise, binseg, cusum_argmax, detect, motivating_signal, DetectionParams, Interval,
    PrefixSums, TimeSeries,
};

/// `(magnitude, s, e, b)` of the largest CUSUM over every `1 <= s < e <= T`,
/// computed directly from segment means. Earlier `(s, e, b)` wins ties.
fn brute_force_best(x: &[f64]) -> (f64, usize, usize, usize) {
    let len = x.len();
    let mut best = (-1.0, 0, 0, 0);
    for s in 1..len {
        for e in s + 1..=len {
            let seg = &x[s - 1..e];
            let n = seg.len() as f64;
            for b in s..e {
                let (l, r) = seg.split_at(b - s + 1);
                let (nl, nr) = (l.len() as f64, r.len() as f64);
                let ml = l.iter().sum::<f64>() / nl;
                let mr = r.iter().sum::<f64>() / nr;
                let c = ((nl * nr / n).sqrt() * (ml - mr)).abs();
                if c > best.0 + 1e-12 {
                    best = (c, s, e, b);
                }
            }
        }
    }
    best
}

#[test]
fn best_interval_isolates_the_middle_jump() {
    let f = motivating_signal().values();
    let (mag, s, e, b) = brute_force_best(&f);
    assert_eq!((s, e, b), (131, 170, 150));
    // sqrt(20 * 20 / 40) * 2
    assert!((mag - 40f64.sqrt()).abs() < 1e-12);

    let x = TimeSeries::new(f).unwrap();
    let sums = PrefixSums::new(&x);
    let local = cusum_argmax(&sums, Interval::new(s, e).unwrap()).unwrap();
    assert_eq!(local.b, 150);
    assert!((local.magnitude - mag).abs() < 1e-12);

    let global = cusum_argmax(&sums, Interval::new(1, 300).unwrap()).unwrap();
    assert!(
        global.magnitude < 0.5 * mag,
        "full-series CUSUM {}",
        global.magnitude
    );
}

#[test]
fn noisy_excursion_found_by_wbs() {
    let f = motivating_signal();
    let mut hits = 0;
    for seed in 0..20 {
        let x = add_noise(&f.values(), 0.3, seed).unwrap();
        let params = DetectionParams {
            seed,
            zeta: 0.0,
            ..DetectionParams::default()
        };
        let path = detect(&x, &params).unwrap();
        let top: Vec<usize> = path.prefixes(3)[3].iter().collect();
        hits += usize::from(
            top.iter()
                .zip(f.change_points())
                .all(|(a, b)| a.abs_diff(*b) <= 2),
        );
        assert!(binseg(&x, 0.0).unwrap().len() >= 3);
    }
    assert!(
        hits >= 18,
        "WBS isolated all three change-points in {hits}/20 runs"
    );
}
