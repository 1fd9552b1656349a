//! Property tests of the operator invariants on small meshes.

use bvlab::extension::{build_schedule, extend_l1, lipschitz_approximation, ExtensionOperator, ScheduleOptions};
use bvlab::norms::{besov_seminorm, jn_norm, l1_norm, BesovMethod, FieldFn, JnOptions};
use bvlab::space::{build_domain, Discretization, DomainSpec, Shape, Support};
use bvlab::trace::{trace_at, trace_radii, TraceOptions};
use proptest::prelude::*;
use std::sync::OnceLock;

fn setup() -> &'static (Discretization, ExtensionOperator) {
    static CELL: OnceLock<(Discretization, ExtensionOperator)> = OnceLock::new();
    CELL.get_or_init(|| {
        let d = build_domain(&DomainSpec::new(Shape::UnitSquare, 1.0 / 16.0)).unwrap();
        let op = ExtensionOperator::new(&d).unwrap();
        (d, op)
    })
}

fn data() -> impl Strategy<Value = FieldFn> {
    let n = setup().0.n_boundary();
    prop::collection::vec(-5.0..5.0f64, n).prop_map(|v| FieldFn::new(Support::Boundary, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_is_linear(f in data(), g in data(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let (d, op) = setup();
        let ef = op.apply(&f, d).unwrap();
        let eg = op.apply(&g, d).unwrap();
        let ec = op.apply(&f.axpby(a, &g, b).unwrap(), d).unwrap();
        for i in 0..d.n_interior() {
            let want = a * ef.values.values()[i] + b * eg.values.values()[i];
            prop_assert!((ec.values.values()[i] - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn extension_preserves_range(f in data()) {
        let (d, op) = setup();
        let e = op.apply(&f, d).unwrap();
        prop_assert!(e.values.min() >= f.min() - 1e-12);
        prop_assert!(e.values.max() <= f.max() + 1e-12);
        prop_assert!(e.lip.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn besov_is_a_seminorm(f in data(), c in -10.0..10.0f64, a in -4.0..4.0f64) {
        let (d, _) = setup();
        for m in BesovMethod::ALL {
            let base = besov_seminorm(&f, d, 0.5, 1.0, m).unwrap().seminorm;
            prop_assert!(base >= 0.0);
            let shift = FieldFn::constant(d, Support::Boundary, 1.0).unwrap();
            let shifted = besov_seminorm(&f.axpby(1.0, &shift, c).unwrap(), d, 0.5, 1.0, m).unwrap().seminorm;
            prop_assert!((shifted - base).abs() <= 1e-9 * base.max(1.0));
            let scaled = besov_seminorm(&f.axpby(a, &shift, 0.0).unwrap(), d, 0.5, 1.0, m).unwrap().seminorm;
            prop_assert!((scaled - a.abs() * base).abs() <= 1e-9 * base.max(1.0));
        }
    }

    #[test]
    fn jn_at_theta_zero_is_between_l1_and_three_l1(f in data(), seed in 0u64..1000) {
        let (d, _) = setup();
        let opts = JnOptions { restarts: 4, seed };
        let r = jn_norm(&f, d, 0.0, 1.0, 1.0, &opts).unwrap();
        let l1 = l1_norm(&f, d).unwrap();
        prop_assert!(r.value >= l1 - 1e-12);
        prop_assert!(r.value <= 3.0 * l1 + 1e-9);
    }

    #[test]
    fn lipschitz_approximation_meets_target(f in data(), frac in 0.01..1.0f64) {
        let (d, _) = setup();
        let l1 = l1_norm(&f, d).unwrap();
        prop_assume!(l1 > 0.0);
        let loose = lipschitz_approximation(&f, d, frac * l1).unwrap();
        let tight = lipschitz_approximation(&f, d, 0.5 * frac * l1).unwrap();
        prop_assert!(loose.error <= frac * l1);
        prop_assert!(loose.lip <= loose.lip_bound * (1.0 + 1e-9) + 1e-12);
        prop_assert!(tight.lip_bound >= loose.lip_bound);
    }

    #[test]
    fn schedules_satisfy_their_invariants(f in data()) {
        let (d, _) = setup();
        let s = build_schedule(&f, d, &ScheduleOptions::default()).unwrap();
        let norm = l1_norm(&f, d).unwrap();
        prop_assert!(s.depth() >= 2);
        for w in s.radii.windows(2) {
            prop_assert!(w[1] <= 0.5 * w[0]);
        }
        prop_assert!(s.decay_ratio(d).unwrap() <= 1.0 + 1e-12);
        prop_assert!(s.lip_sum() <= 2.0 * norm + 1e-12);
    }

    #[test]
    fn layered_extension_stays_in_band(f in data()) {
        let (d, op) = setup();
        let e = extend_l1(&f, &op.cover, &op.pou, d, &ScheduleOptions::default()).unwrap();
        let s = e.schedule.as_ref().unwrap();
        let eps = 2f64.powi(2 - s.depth() as i32) * l1_norm(&f, d).unwrap();
        prop_assert!(e.values.min() >= f.min().min(0.0) - eps);
        prop_assert!(e.values.max() <= f.max().max(0.0) + eps);
    }

    #[test]
    fn traces_of_constants_are_exact(c in -100.0..100.0f64, z in 0usize..64) {
        let (d, _) = setup();
        let u = FieldFn::constant(d, Support::Interior, c).unwrap();
        let radii = trace_radii(d, None, 3);
        let t = trace_at(&u, d, z % d.n_boundary(), &radii, &TraceOptions { n_min: 4, osc: 0.0 }).unwrap();
        prop_assert_eq!(t.value, c);
        prop_assert!(t.residuals.iter().all(|r| *r == 0.0));
    }
}
