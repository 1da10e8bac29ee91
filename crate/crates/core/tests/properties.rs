//! Property tests over random inputs.

use proptest::prelude::*;
use rug::{Complex, Float, Integer};
use zero_attractor::harness::{point_polyline_distance, point_segment_distance};
use zero_attractor::partition::{generate, generate_one, ExponentSequence, PartitionPolynomial};
use zero_attractor::phase::{classify, DEFAULT_BOUNDARY_TOL};
use zero_attractor::roots::{find_roots, reconstruction_error, RootOptions};
use zero_attractor::specfun::{complex, dilog, root_dilog, PrecisionPolicy};

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

fn family() -> impl Strategy<Value = ExponentSequence> {
    prop_oneof![
        Just(ExponentSequence::all_parts()),
        Just(ExponentSequence::odd_parts()),
        (2u64..6).prop_map(|p| ExponentSequence::residue(1, p).unwrap()),
        prop::collection::btree_set(2u64..12, 0..4).prop_map(|s| {
            let parts: Vec<u64> = std::iter::once(1).chain(s).collect();
            ExponentSequence::explicit(&parts).unwrap()
        }),
    ]
}

fn reduced((c, d): (i64, i64)) -> (i64, i64) {
    let g = Integer::from(c).gcd(&Integer::from(d)).to_i64().unwrap();
    (c / g, d / g)
}

fn disk_point() -> impl Strategy<Value = (f64, f64)> {
    (0.01f64..0.99, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| (r * t.cos(), r * t.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dilog_commutes_with_conjugation((x, y) in disk_point()) {
        let p = policy();
        let a = dilog(&complex(x, y, 128), &p).unwrap();
        let b = dilog(&complex(x, -y, 128), &p).unwrap();
        let gap = Complex::with_val(128, a.conj_ref()) - &b;
        prop_assert!(Float::with_val(128, gap.abs_ref()) < 1e-30);
    }

    #[test]
    fn root_dilogs_are_bounded((x, y) in disk_point(), k in 1u32..8) {
        let z = complex(x, y, 128);
        let f = root_dilog(k, &z, &policy()).unwrap().to_f64();
        let r = x.hypot(y);
        let bound = std::f64::consts::PI / (k as f64 * 6f64.sqrt()) * r.powf(k as f64 / 2.0);
        prop_assert!(f >= 0.0 && f <= bound * (1.0 + 1e-12), "f_{k} = {f}, bound {bound}");
    }

    #[test]
    fn single_and_batch_generation_agree(seq in family(), n in 1u64..50) {
        let batch = generate(&seq, n).unwrap();
        prop_assert_eq!(batch.last().unwrap(), &generate_one(&seq, n).unwrap());
    }

    #[test]
    fn coefficients_count_partitions_by_length(seq in family(), n in 1u64..20) {
        let poly = generate_one(&seq, n).unwrap();
        // Each partition of n has between 1 and n parts, so F_n(1) is their number.
        let total: Integer = poly.coeffs().iter().sum();
        prop_assert_eq!(total, poly.value_at_one());
        prop_assert!(poly.coeffs().iter().all(|c| *c >= 0));
        if seq.allows(1) {
            prop_assert_eq!(poly.coeff(n as usize), 1);
        }
    }

    #[test]
    fn phase_is_symmetric_under_conjugation((x, y) in disk_point()) {
        let seq = ExponentSequence::all_parts();
        let p = policy();
        let a = classify(&seq, &complex(x, y, 128), DEFAULT_BOUNDARY_TOL, &p).unwrap();
        let b = classify(&seq, &complex(x, -y, 128), DEFAULT_BOUNDARY_TOL, &p).unwrap();
        prop_assert!((a.margin - b.margin).abs() < 1e-12);
        if !a.tie {
            prop_assert_eq!(a.winner, b.winner);
        }
    }

    #[test]
    fn segment_distance_is_bounded_by_endpoints(
        p in (-2.0f64..2.0, -2.0f64..2.0),
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        let d = point_segment_distance(p, a, b);
        let ends = (p.0 - a.0).hypot(p.1 - a.1).min((p.0 - b.0).hypot(p.1 - b.1));
        prop_assert!(d >= 0.0 && d <= ends + 1e-15);
        prop_assert!((point_polyline_distance(p, &[a, b]) - d).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn roots_of_products_of_integer_factors(factors in prop::collection::btree_set((-5i64..=5, 1i64..=4).prop_map(reduced), 1..7)) {
        // prod (d z - c) over distinct reduced fractions, so every root c/d is known and simple.
        let mut coeffs = vec![Integer::from(1)];
        for &(c, d) in &factors {
            let mut next = vec![Integer::new(); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i + 1] += Integer::from(a * d);
                next[i] -= Integer::from(a * c);
            }
            coeffs = next;
        }
        let degree = coeffs.len() - 1;
        let poly = PartitionPolynomial::from_coeffs(degree as u64, coeffs);
        let set = find_roots(&poly, &RootOptions::default()).unwrap();
        let zeros = factors.iter().filter(|f| f.0 == 0).count();
        prop_assert_eq!(set.zero_multiplicity_at_origin, zeros);
        prop_assert_eq!(set.roots.len() + zeros, degree);
        prop_assert!(reconstruction_error(&poly, &set).unwrap() < 1e-10);
        for &(c, d) in factors.iter().filter(|f| f.0 != 0) {
            let target = (c as f64 / d as f64, 0.0);
            let near = set.roots_f64().iter().map(|r| (r.0 - target.0).hypot(r.1)).fold(f64::INFINITY, f64::min);
            prop_assert!(near < 1e-6, "root {} missing ({near:e})", c as f64 / d as f64);
        }
    }
}
