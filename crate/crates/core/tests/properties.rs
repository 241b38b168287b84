use num_complex::Complex64;
use proptest::prelude::*;

use vbslab::block::{block_entropy, block_spectrum, saturation_value};
use vbslab::linalg::{
    kron, partial_trace, partial_transpose, realign, trace_norm, von_neumann_entropy,
    ComplexMatrix, DensityMatrix,
};
use vbslab::two_site::{negativity, pair_measures, realignment, rho_two_site, PairMeasures};
use vbslab::{BoundaryConfig, Distance, Sign};

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| {
        v.into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect()
    })
}

/// Random mixed state `G G^H / Tr` of dimension `n`.
fn density(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_vec(n * n).prop_map(move |data| {
        let g = ComplexMatrix::from_vec(n, n, data).unwrap();
        let m = &g * &g.adjoint();
        let tr = m.trace().re.max(1e-12);
        m.scale(Complex64::new(1.0 / tr, 0.0))
    })
}

fn hermitianize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.adjoint()).scale(Complex64::new(0.5, 0.0))
}

fn distance() -> impl Strategy<Value = Distance> {
    prop_oneof![
        (1u32..8).prop_map(Distance::Finite),
        Just(Distance::Infinite)
    ]
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn config() -> impl Strategy<Value = BoundaryConfig> {
    (distance(), distance(), sign(), sign())
        .prop_map(|(l, r, a, b)| BoundaryConfig::new(l, r).with_signs(a, b))
}

/// Random unitary: Cayley transform of a random Hermitian matrix.
fn unitary(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_vec(n * n).prop_map(move |data| {
        let h = hermitianize(&ComplexMatrix::from_vec(n, n, data).unwrap());
        let i = Complex64::new(0.0, 1.0);
        let id = ComplexMatrix::identity(n);
        let a = &id - &h.scale(i);
        let b = &id + &h.scale(i);
        &a * &inverse(&b)
    })
}

fn inverse(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let na = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let inv = na.try_inverse().expect("Cayley denominator is invertible");
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = inv[(i, j)];
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_of_product_recovers_factor(a in density(2), b in density(3)) {
        let ra = DensityMatrix::new(a.clone(), vec![2]).unwrap();
        let rb = DensityMatrix::new(b.clone(), vec![3]).unwrap();
        let ab = ra.tensor(&rb);
        prop_assert!(partial_trace(&ab, &[0]).unwrap().matrix().max_abs_diff(&a) < 1e-12);
        prop_assert!(partial_trace(&ab, &[1]).unwrap().matrix().max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(m in density(6)) {
        let rho = DensityMatrix::new(m, vec![2, 3]).unwrap();
        for keep in [[0usize], [1]] {
            let r = partial_trace(&rho, &keep).unwrap();
            prop_assert!((r.matrix().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(r.eigenvalues().iter().all(|&x| x > -1e-12));
        }
    }

    #[test]
    fn negativity_equals_negative_eigenvalue_mass(m in density(9)) {
        let rho = DensityMatrix::new(m, vec![3, 3]).unwrap();
        let pt = partial_transpose(&rho, 1).unwrap();
        let ev = vbslab::linalg::hermitian_eigenvalues(&pt).unwrap();
        let neg: f64 = ev.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
        prop_assert!((negativity(&rho).unwrap() - neg).abs() < 1e-10);
        let pt0 = partial_transpose(&rho, 0).unwrap();
        prop_assert!((trace_norm(&pt0) - trace_norm(&pt)).abs() < 1e-10);
    }

    #[test]
    fn product_states_are_undetected(a in density(3), b in density(3)) {
        let rho = DensityMatrix::new(a, vec![3]).unwrap().tensor(&DensityMatrix::new(b, vec![3]).unwrap());
        prop_assert!(negativity(&rho).unwrap() < 1e-10);
        prop_assert!(realignment(&rho).unwrap() < 1e-10);
        prop_assert!(trace_norm(&realign(&rho).unwrap()) <= 1.0 + 1e-10);
    }

    #[test]
    fn local_unitaries_leave_measures_and_entropy_unchanged(
        m in density(9), u in unitary(3), v in unitary(3)
    ) {
        let rho = DensityMatrix::new(m.clone(), vec![3, 3]).unwrap();
        let w = kron(&u, &v);
        let rotated = hermitianize(&(&(&w * &m) * &w.adjoint()));
        let rho2 = DensityMatrix::new(rotated, vec![3, 3]).unwrap();
        prop_assert!((negativity(&rho).unwrap() - negativity(&rho2).unwrap()).abs() < 1e-9);
        prop_assert!((realignment(&rho).unwrap() - realignment(&rho2).unwrap()).abs() < 1e-9);
        prop_assert!((von_neumann_entropy(&rho).unwrap() - von_neumann_entropy(&rho2).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn block_entropy_bounded_and_deterministic(cfg in config(), l in 1u64..40) {
        let s = block_entropy(cfg, l).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&s));
        prop_assert_eq!(s.to_bits(), block_entropy(cfg, l).unwrap().to_bits());
        let spec = block_spectrum(&cfg.end_weights().0, &cfg.end_weights().1, l);
        prop_assert!((spec.lambdas.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(spec.lambdas.iter().all(|&x| x >= -1e-15));
    }

    #[test]
    fn global_flip_is_a_symmetry(l in distance(), r in distance(), a in sign(), b in sign(), len in 2u64..12) {
        let cfg = BoundaryConfig::new(l, r).with_signs(a, b);
        let flipped = cfg.with_signs(a.flipped(), b.flipped());
        prop_assert!((block_entropy(cfg, len).unwrap() - block_entropy(flipped, len).unwrap()).abs() < 1e-12);
        let m1 = pair_measures(cfg, len).unwrap();
        let m2 = pair_measures(flipped, len).unwrap();
        prop_assert!((m1.negativity - m2.negativity).abs() < 1e-12);
        prop_assert!((m1.realignment - m2.realignment).abs() < 1e-12);
    }

    #[test]
    fn mirroring_swaps_ends(cfg in config(), len in 1u64..12) {
        let s = block_entropy(cfg, len).unwrap();
        let m = block_entropy(cfg.mirrored(), len).unwrap();
        prop_assert!((s - m).abs() < 1e-12);
        prop_assert!((saturation_value(cfg) - saturation_value(cfg.mirrored())).abs() < 1e-15);
        if len >= 2 {
            let a = pair_measures(cfg, len).unwrap();
            let b = pair_measures(cfg.mirrored(), len).unwrap();
            prop_assert!((a.negativity - b.negativity).abs() < 1e-12);
            prop_assert!((a.realignment - b.realignment).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_state_is_a_normalised_state(cfg in config(), len in 2u64..10) {
        let rho = rho_two_site(cfg, len).unwrap();
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.eigenvalues().iter().all(|&x| x > -1e-12));
        let m = PairMeasures::from_rho(&rho).unwrap();
        prop_assert!(m.concurrence_lb >= m.negativity && m.concurrence_lb >= m.realignment);
    }

    #[test]
    fn boundaries_never_raise_block_entropy(l in distance(), r in distance(), len in 1u64..30) {
        let cfg = BoundaryConfig::new(l, r);
        let unbounded = block_entropy(BoundaryConfig::unbounded(), len).unwrap();
        prop_assert!(block_entropy(cfg, len).unwrap() <= unbounded + 1e-12);
    }
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

#[test]
fn stronger_boundary_effect_means_more_pair_entanglement() {
    let mut entropy = Vec::new();
    let mut neg = Vec::new();
    for nl in 1..=4 {
        for nr in 1..=4 {
            let cfg = BoundaryConfig::finite(nl, nr).unwrap();
            entropy.push(saturation_value(cfg));
            neg.push(pair_measures(cfg, 2).unwrap().negativity);
        }
    }
    let (re, rn) = (ranks(&entropy), ranks(&neg));
    let n = re.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let cov: f64 = re.iter().zip(&rn).map(|(a, b)| (a - mean) * (b - mean)).sum();
    let var_e: f64 = re.iter().map(|a| (a - mean).powi(2)).sum();
    let var_n: f64 = rn.iter().map(|b| (b - mean).powi(2)).sum();
    let rho = cov / (var_e * var_n).sqrt();
    assert!(rho < 0.0, "rank correlation {rho}");
}
