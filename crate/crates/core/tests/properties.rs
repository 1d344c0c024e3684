//! Randomized structural properties of the region computations.

use proptest::prelude::*;
use secrecy_core::*;

fn pmf(len: usize) -> impl Strategy<Value = Pmf> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(|w| {
        let t: f64 = w.iter().sum();
        Pmf::new(w.iter().map(|v| v / t).collect()).unwrap()
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DistortionMatrix> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, cols), rows)
        .prop_filter_map("redundant columns", |d| DistortionMatrix::new(d).ok())
}

fn instance() -> impl Strategy<Value = ProblemInstance> {
    (2usize..=3, 2usize..=3).prop_flat_map(|(nx, nz)| {
        (pmf(nx), matrix(nx, nz)).prop_map(|(p, d)| ProblemInstance::new(p, d).unwrap())
    })
}

fn channel(u_size: usize, x_size: usize) -> impl Strategy<Value = AuxChannel> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, u_size), x_size).prop_map(move |cols| {
        let rows = (0..u_size)
            .map(|u| {
                cols.iter()
                    .map(|c| {
                        let t: f64 = c.iter().sum();
                        if t > 0.0 {
                            c[u] / t
                        } else if u == 0 {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        AuxChannel::new(rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_concave(p in pmf(4), q in pmf(4), lambda in 0.0f64..1.0) {
        let mix = p.mix(&q, lambda).unwrap();
        prop_assert!(entropy(&mix) >= lambda * entropy(&p) + (1.0 - lambda) * entropy(&q) - 1e-12);
        prop_assert!(entropy(&mix) <= 2.0 + 1e-12);
    }

    #[test]
    fn conditioning_reduces_entropy(inst in instance(), ch in channel(3, 3)) {
        prop_assume!(inst.source.len() == 3);
        let joint = ch.joint(inst.source.probs());
        prop_assert!(conditional_entropy(&joint).unwrap() <= inst.source.entropy() + 1e-12);
    }

    #[test]
    fn lp_is_monotone_and_concave(inst in instance(), a in 0.0f64..1.6, b in 0.0f64..1.6) {
        let region = Region::new(inst.clone()).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f = |r: f64| region.max_distortion(r).unwrap().distortion;
        prop_assert!(f(lo) <= f(hi) + 1e-9);
        prop_assert!(f(0.5 * (lo + hi)) >= 0.5 * (f(lo) + f(hi)) - 1e-9);
        prop_assert!(f(lo) >= inst.revealed_distortion() - 1e-9);
        prop_assert!(f(hi) <= min_distortion(&inst.source, &inst.distortion).unwrap() + 1e-9);
    }

    #[test]
    fn region_is_rectangular_upward(
        inst in instance(),
        r0 in 0.0f64..1.6,
        d in 0.0f64..1.0,
        extra in 0.0f64..0.5,
    ) {
        let region = Region::new(inst.clone()).unwrap();
        let r = inst.source.entropy();
        if region.contains(r0, r, d).unwrap() {
            prop_assert!(region.contains(r0 + extra, r + extra, d).unwrap());
            prop_assert!(region.contains(r0, r, (d - extra).max(0.0)).unwrap());
        } else {
            prop_assert!(!region.contains((r0 - extra).max(0.0), r, d).unwrap() || r0 < extra);
            prop_assert!(!region.contains(r0, r, d + extra).unwrap());
        }
        prop_assert!(!region.contains(r0, r - 1e-3, 0.0).unwrap() || r < 1e-3);
    }

    #[test]
    fn every_channel_lies_inside_the_region(inst in instance(), ch in channel(4, 3)) {
        prop_assume!(inst.source.len() == 3);
        let pt = evaluate_channel(&inst, &ch).unwrap();
        let lp = Region::new(inst.clone()).unwrap().max_distortion(pt.key_rate).unwrap();
        prop_assert!(pt.distortion <= lp.distortion + 1e-9, "{pt:?} above {}", lp.distortion);
    }

    #[test]
    fn distortion_scales_linearly(inst in instance(), r0 in 0.0f64..1.6, c in 0.1f64..5.0) {
        let scaled = ProblemInstance::new(inst.source.clone(), inst.distortion.scaled(c).unwrap()).unwrap();
        let base = Region::new(inst).unwrap().max_distortion(r0).unwrap().distortion;
        let big = Region::new(scaled).unwrap().max_distortion(r0).unwrap().distortion;
        prop_assert!((big - c * base).abs() <= 1e-8 * c.max(1.0));
    }

    #[test]
    fn decomposition_reproduces_source(inst in instance(), r0 in 0.0f64..1.6) {
        let region = Region::new(inst.clone()).unwrap();
        let sol = region.max_distortion(r0).unwrap();
        sol.decomposition.verify(&region.corners, &inst.source).unwrap();
        prop_assert!(sol.decomposition.key_rate(&region.corners) <= r0 + 1e-9);
    }
}

#[test]
fn oracle_never_exceeds_lp_on_small_instances() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    for k in 0..6 {
        let d: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random::<f64>()).collect()).collect();
        let Ok(d) = DistortionMatrix::new(d) else { continue };
        let q = rng.random_range(0.05..0.95);
        let inst = ProblemInstance::new(Pmf::new(vec![q, 1.0 - q]).unwrap(), d).unwrap();
        let region = Region::new(inst.clone()).unwrap();
        for r0 in [0.1, 0.4, 0.9] {
            let lp = region.max_distortion(r0).unwrap().distortion;
            let o = oracle_max_distortion(&inst, r0, region.corners.len(), 40, k).unwrap();
            let found = o.d_lower.unwrap();
            assert!(found <= lp + 1e-6, "oracle {found} above LP {lp}");
            let ch = o.best.unwrap();
            let pt = evaluate_channel(&inst, &ch).unwrap();
            assert!((pt.distortion - found).abs() < 1e-12 && pt.key_rate <= r0 + 1e-6);
        }
    }
}

#[test]
fn oracle_with_permuted_seed_order_is_reproducible() {
    let inst = ProblemInstance::binary_hamming(0.3).unwrap();
    let a = oracle_max_distortion(&inst, 0.4, 3, 16, 5).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| oracle_max_distortion(&inst, 0.4, 3, 16, 5).unwrap());
    assert_eq!(a, b);
}
