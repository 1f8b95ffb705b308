use muntz::prelude::*;
use muntz::operator::finite_sections;
use muntz::{
    apply, distance, distance_sweep, dual_family, evaluate, gram, hereditary_sweep, project_in,
    solve_moments, DomainSpec, ExponentSequence, ExponentSpec, GramOptions, MomentData, MpFloat,
    MuntzSeries, OperatorSpec, PartitionSampling, TargetFunction, WeightedDomain,
};
use proptest::prelude::*;

const P: u32 = 256;

fn mp(x: f64) -> MpFloat {
    MpFloat::from_float(x, P)
}

fn dec(x: f64) -> String {
    format!("{x:.4}")
}

fn tol() -> MpFloat {
    MpFloat::half_precision_tolerance(P)
}

fn rel_close(a: &MpFloat, b: &MpFloat, t: &MpFloat) -> bool {
    (a.clone() - b.clone()).abs() <= t.clone() * (MpFloat::one() + b.abs())
}

fn domain(spec: &DomainSpec) -> WeightedDomain<MpFloat> {
    WeightedDomain::from_spec(spec, P).unwrap()
}

fn squares(n: usize) -> ExponentSequence<MpFloat> {
    ExponentSequence::from_spec(&ExponentSpec::power("1", "2", n), P).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn moments_are_additive_over_pieces(a in 0.0f64..1.0, gap in 0.01f64..1.0, len in 0.01f64..1.0, s in 0.0f64..20.0) {
        let (lo1, hi1) = (dec(a), dec(a + len));
        let (lo2, hi2) = (dec(a + len + gap), dec(a + 2.0 * len + gap));
        let union = domain(&DomainSpec::new(
            vec![(lo1.clone(), hi1.clone()), (lo2.clone(), hi2.clone())],
            vec![("1.5", "0.5"), ("1.5", "0.5")],
        ));
        let first = domain(&DomainSpec::new(vec![(lo1, hi1)], vec![("1.5", "0.5")]));
        let second = domain(&DomainSpec::new(vec![(lo2, hi2)], vec![("1.5", "0.5")]));
        let s = mp(s);
        let total = union.power_moment(&s).unwrap();
        let parts = first.power_moment(&s).unwrap() + second.power_moment(&s).unwrap();
        prop_assert!(rel_close(&total, &parts, &MpFloat::exp2i(-240, P)));
    }

    #[test]
    fn moments_scale_with_the_domain(r in 0.1f64..8.0, s in 0.0f64..30.0) {
        let r_s = dec(r);
        let scaled = domain(&DomainSpec::interval(r_s.as_str()));
        let unit = domain(&DomainSpec::unit_interval());
        let s = mp(s);
        let rr = MpFloat::parse_decimal(&r_s, P).unwrap();
        let want = rr.powf(&(s.clone() + MpFloat::one())) * unit.power_moment(&s).unwrap();
        prop_assert!(rel_close(&scaled.power_moment(&s).unwrap(), &want, &MpFloat::exp2i(-240, P)));
    }

    #[test]
    fn moments_are_monotone_in_order(lo in 0.0f64..0.5, s in 0.0f64..10.0, ds in 0.01f64..5.0) {
        let below = domain(&DomainSpec::new(vec![(dec(lo), "0.9".to_string())], vec![("1", "0")]));
        let above = domain(&DomainSpec::new(vec![(dec(1.0 + lo), "3".to_string())], vec![("1", "0")]));
        let (s0, s1) = (mp(s), mp(s + ds));
        prop_assert!(below.power_moment(&s1).unwrap() < below.power_moment(&s0).unwrap());
        prop_assert!(above.power_moment(&s1).unwrap() > above.power_moment(&s0).unwrap());
    }

    #[test]
    fn distances_follow_the_scaling_law(r in 0.2f64..6.0, c in 0.5f64..2.0, beta in 1.2f64..2.5) {
        let r_s = dec(r);
        let seq = ExponentSequence::from_spec(&ExponentSpec::power(dec(c), dec(beta), 6), P).unwrap();
        let unit = gram(&domain(&DomainSpec::unit_interval()), &seq, 6, &GramOptions::default()).unwrap();
        let scaled = gram(&domain(&DomainSpec::interval(r_s.as_str())), &seq, 6, &GramOptions::default()).unwrap();
        let rr = MpFloat::parse_decimal(&r_s, P).unwrap();
        for n in 0..6 {
            let factor = rr.powf(&(seq.values()[n].clone() + mp(0.5)));
            let want = factor * distance(&unit, n).unwrap();
            prop_assert!(rel_close(&distance(&scaled, n).unwrap(), &want, &MpFloat::exp2i(-150, P)));
        }
    }

    #[test]
    fn gram_adjoint_identity(seed in 0u64..1000, rho in 0.1f64..0.95) {
        let g = gram(&domain(&DomainSpec::new(vec![("0", "0.4"), ("0.5", "1")], vec![("1", "0"), ("2", "1")])),
            &squares(6), 6, &GramOptions::default()).unwrap();
        let t = OperatorSpec::dilation(mp(rho));
        let (m, adj) = finite_sections(&t, &g).unwrap();
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            mp(((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0)
        };
        let x: Vec<MpFloat> = (0..6).map(|_| next()).collect();
        let y: Vec<MpFloat> = (0..6).map(|_| next()).collect();
        let lhs = g.bilinear(&m.mul_vec(&x), &y);
        let rhs = g.bilinear(&x, &adj.mul_vec(&y));
        prop_assert!(rel_close(&lhs, &rhs, &tol()));
    }

    #[test]
    fn projection_residual_is_orthogonal(mu in 0.0f64..6.0) {
        let g = gram(&domain(&DomainSpec::unit_interval()), &squares(8), 8, &GramOptions::default()).unwrap();
        let p = project_in(&g, &TargetFunction::pure_power(mp(mu)).unwrap()).unwrap();
        prop_assert!(p.orthogonality_defect(&g) < tol());
        prop_assert!(!p.residual.is_strictly_negative());
    }

    #[test]
    fn dilation_matches_rescaled_argument(rho in 0.05f64..0.95, x in 0.0f64..0.99, coeffs in proptest::collection::vec(-2.0f64..2.0, 1..8)) {
        let g = gram(&domain(&DomainSpec::unit_interval()), &squares(8), 8, &GramOptions::default()).unwrap();
        let s = MuntzSeries::on_section(&g, coeffs.into_iter().map(mp).collect()).unwrap();
        let t = OperatorSpec::dilation(mp(rho));
        let lhs = evaluate(&apply(&t, &s).unwrap(), &mp(x)).unwrap();
        let rhs = evaluate(&s, &(mp(rho) * mp(x))).unwrap();
        prop_assert!(rel_close(&lhs, &rhs, &tol()));
    }
}

#[test]
fn distances_do_not_increase_with_the_section() {
    let wd = domain(&DomainSpec::new(vec![("0.2", "0.7"), ("0.8", "1.3")], vec![("1", "0.5"), ("0.5", "-1.5")]));
    let seq = squares(10);
    let tiny = MpFloat::exp2i(-40, P);
    for n in 0..3 {
        let sections: Vec<usize> = (n + 1..=10).collect();
        let report = distance_sweep(&wd, &seq, n, &sections, &tiny, &GramOptions::default()).unwrap();
        assert!(report.monotone, "index {n}");
        assert!(report.oracle.is_none());
    }
}

#[test]
fn solution_norms_grow_boundedly_under_admissible_growth() {
    let wd = domain(&DomainSpec::unit_interval());
    let seq = squares(10);
    let a = mp(0.4);
    let d: Vec<MpFloat> = seq.values().iter().map(|l| a.powf(l)).collect();
    let data = MomentData::new(d, &seq, wd.r_w()).unwrap();
    assert!(data.growth_ok);
    let norms: Vec<MpFloat> = (1..=10)
        .map(|n| solve_moments(&wd, &seq, &data, n, &GramOptions::default()).unwrap().solution_norm)
        .collect();
    for w in norms.windows(2) {
        assert!(w[1].clone() >= w[0].clone() * (MpFloat::one() - tol()));
    }
    assert!(norms[9] < mp(10.0));
}

#[test]
fn random_partitions_at_twelve() {
    let g = gram(&domain(&DomainSpec::unit_interval()), &squares(12), 12, &GramOptions::default()).unwrap();
    let summary = hereditary_sweep(&g, PartitionSampling::Random { count: 100, seed: 12 }).unwrap();
    assert_eq!(summary.partitions_checked, 100);
    assert!(summary.all_nonsingular && summary.det_identity_ok);
}

#[test]
fn double_precision_agrees_on_easy_sections() {
    let wd64 = WeightedDomain::<f64>::from_spec(&DomainSpec::unit_interval(), 53).unwrap();
    let seq64 = ExponentSequence::<f64>::from_spec(&ExponentSpec::explicit(["2", "3", "5"]), 53).unwrap();
    let g64 = gram(&wd64, &seq64, 3, &GramOptions::with_precision(64)).unwrap();
    let g = gram(
        &domain(&DomainSpec::unit_interval()),
        &ExponentSequence::from_spec(&ExponentSpec::explicit(["2", "3", "5"]), P).unwrap(),
        3,
        &GramOptions::default(),
    )
    .unwrap();
    let d64 = dual_family(&g64);
    let d = dual_family(&g);
    for n in 0..3 {
        let rel = (d64.distances()[n] - d.distances()[n].to_f64()).abs() / d.distances()[n].to_f64();
        assert!(rel < 1e-10, "n = {n}: {rel}");
    }
}
