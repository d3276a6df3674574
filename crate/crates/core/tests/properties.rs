use num_complex::Complex;
use proptest::prelude::*;

use lz_integrability::closedform::{chain_transition, oscillator_transition, su11_column_sum, su2_matrix, theta};
use lz_integrability::commutant::{
    bowtie_quadratic_family, commutator_norm, embed_equal_slope, gbt_linear_partner, maximal_linear_family,
    sample_points, FamilyParams,
};
use lz_integrability::linalg::hermitian_eigenvalues;
use lz_integrability::models::{
    build_bowtie, build_bowtie_complex, build_equal_slope, build_generalized_bowtie, degauge,
};
use lz_integrability::pencil::hermitian_defect;
use lz_integrability::spectra::{char_roots, interlaces, SecularSpec};
use lz_integrability::{BargmannIndex, HalfInteger, ModelKind};

fn coupling() -> impl Strategy<Value = f64> {
    (0.2..1.5f64, any::<bool>()).prop_map(|(m, s)| if s { m } else { -m })
}

/// `n` values in `[-3, 3]` with spacing at least `0.15` and magnitude at
/// least `0.15`.
fn spread(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n).prop_filter("well separated, nonzero", |v| {
        v.iter().all(|x| x.abs() >= 0.15)
            && v.iter()
                .enumerate()
                .all(|(i, x)| v[i + 1..].iter().all(|y| (x - y).abs() >= 0.15))
    })
}

fn bowtie_params() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..=8).prop_flat_map(|n| (prop::collection::vec(coupling(), n - 1), spread(n - 1)))
}

fn us() -> Vec<f64> {
    sample_points(20, -5.0, 5.0, 7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maximal_family_commutes(
        (gamma, xi) in (3usize..=8).prop_flat_map(|n| (prop::collection::vec(coupling(), n), spread(n)))
    ) {
        let fam = maximal_linear_family(&FamilyParams { gamma, xi, shift: 0.0 }).unwrap();
        prop_assert!(fam.max_pairwise_commutator(&us()).unwrap() <= 1e-10);
    }

    #[test]
    fn equal_slope_embedding_reconstructs((p, a) in bowtie_params()) {
        let emb = embed_equal_slope(&p, &a).unwrap();
        let h = build_equal_slope(&p, &a, 1.0).unwrap();
        prop_assert_eq!(emb.roots.len(), p.len() + 1);
        prop_assert!(emb.reconstruction_error <= 1e-12 * h.scale());
    }

    #[test]
    fn bowtie_family_commutes_with_h((p, r) in bowtie_params()) {
        let h = build_bowtie(&p, &r).unwrap();
        let fam = bowtie_quadratic_family(&p, &r).unwrap();
        prop_assert!(fam.max_pairwise_commutator(&us()).unwrap() <= 1e-10);
        for m in &fam.members {
            prop_assert!(commutator_norm(m, &h, &us()).unwrap() <= 1e-10);
            prop_assert!(m.coeffs().iter().all(|c| hermitian_defect(c) == 0.0));
        }
    }

    #[test]
    fn gbt_partner_commutes((p, r) in bowtie_params(), eps in 0.3..2.0f64) {
        let h = build_generalized_bowtie(&p, &r, eps).unwrap();
        let partner = gbt_linear_partner(&p, &r, eps).unwrap();
        prop_assert!(commutator_norm(&partner, &h, &us()).unwrap() <= 1e-10);
    }

    #[test]
    fn bowtie_roots_interlace_and_match((p, r) in bowtie_params(), u in 0.1..3.0f64) {
        let spec = SecularSpec::bowtie(&p, &r).unwrap();
        let roots: Vec<f64> = char_roots(&spec, u).unwrap();
        let mut poles: Vec<f64> = r.iter().map(|x| x * u).collect();
        poles.sort_by(|a, b| a.total_cmp(b));
        prop_assert!(interlaces(&roots, &poles));
        let eig = hermitian_eigenvalues(&build_bowtie(&p, &r).unwrap().eval(u));
        let scale = eig.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        for (a, b) in roots.iter().zip(&eig) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn gbt_roots_match((p, r) in bowtie_params(), eps in 0.3..2.0f64, u in -3.0..3.0f64) {
        prop_assume!(u.abs() > 0.05);
        let spec = SecularSpec::generalized_bowtie(&p, &r, eps).unwrap();
        let roots: Vec<f64> = char_roots(&spec, u).unwrap();
        let eig = hermitian_eigenvalues(&build_generalized_bowtie(&p, &r, eps).unwrap().eval(u));
        prop_assert_eq!(roots.len(), eig.len());
        let scale = eig.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        for (a, b) in roots.iter().zip(&eig) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn degauge_keeps_spectrum(
        phases in prop::collection::vec(-3.1..3.1f64, 3),
        (p, r) in (prop::collection::vec(0.2..1.5f64, 3), spread(3)),
        u in -3.0..3.0f64,
    ) {
        let pc: Vec<Complex<f64>> = p.iter().zip(&phases).map(|(&m, &a)| Complex::from_polar(m, a)).collect();
        let raw = build_bowtie_complex(&pc, &r).unwrap();
        let (real, _) = degauge(&raw, ModelKind::BowTie).unwrap();
        prop_assert!(real.is_real(1e-12));
        let a = hermitian_eigenvalues(&raw.eval(u));
        let b = hermitian_eigenvalues(&real.eval(u));
        let scale = a.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn su2_doubly_stochastic_and_symmetric(twice in 1i64..=5, g in 0.05..2.0f64) {
        let m: Vec<Vec<f64>> = su2_matrix(HalfInteger::from_twice(twice), g).unwrap();
        let n = m.len();
        for i in 0..n {
            let row: f64 = m[i].iter().sum();
            let col: f64 = m.iter().map(|r| r[i]).sum();
            prop_assert!((row - 1.0).abs() <= 1e-12 && (col - 1.0).abs() <= 1e-12);
            for j in 0..n {
                prop_assert!(m[i][j] >= 0.0);
                prop_assert!((m[i][j] - m[j][i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn oscillator_rows_normalize(n in 0u64..6, g in 0.05..0.8f64) {
        let total: f64 = (0..200).map(|k| oscillator_transition(n, k, g)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert!((oscillator_transition(n, n + 2, g) - oscillator_transition(n + 2, n, g)).abs() <= 1e-14);
    }

    #[test]
    fn chain_rows_normalize(n in -5i64..5, g in 0.05..1.0f64) {
        let total: f64 = (-80..=80).map(|k| chain_transition(n, k, g)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert_eq!(chain_transition(n, n + 3, g), chain_transition(0, 3, g));
    }

    #[test]
    fn su11_columns_normalize(quarters in 1u32..=4, n in 0u64..4, g in 0.05..0.5f64) {
        let k = BargmannIndex::from_quarters(quarters).unwrap();
        prop_assert!((su11_column_sum(k, n, 200, g).unwrap() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn theta_antisymmetry(quarters in prop::sample::select(vec![1u32, 3, 2, 4, 6, 8]), n in 0u64..12, m in 0u64..12) {
        let k = BargmannIndex::from_quarters(quarters).unwrap();
        let a: f64 = theta(k, n, m);
        let b: f64 = theta(k, m, n);
        let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
