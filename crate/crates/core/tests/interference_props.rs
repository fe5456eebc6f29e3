use netshare::intensity::IntensityContext;
use netshare::interference::{
    log_mgf_component, log_mgf_nonsharing, log_mgf_sharing, mgf_component, mgf_nonsharing,
    mgf_sharing, MgfQuery,
};
use netshare::quadrature::{integrate, QuadOptions};
use netshare::scenario::pathloss_constant;
use netshare::{LinkState, LinkStateModel, OperatorId, OperatorParams, PathLossParams, Scenario};
use proptest::prelude::*;

fn scenario(l1: f64, l2: f64, p1: f64, p2: f64) -> Scenario {
    Scenario::new(
        OperatorParams::new(l1, 2e7, p1, 10.0).unwrap(),
        OperatorParams::new(l2, 1e7, p2, 10.0).unwrap(),
        LinkStateModel::new(0.7195, 0.0002, 109.8517).unwrap(),
        PathLossParams::new(pathloss_constant(2.1e9), 2.5, 3.5).unwrap(),
        2.1e9,
    )
    .unwrap()
}

/// `-int_x^inf z / (t + z) dLambda_S(t)`, integrated in `ln t`.
fn pgfl_oracle(z: f64, x: f64, ctx: &IntensityContext, state: LinkState) -> f64 {
    let lo = x.ln();
    let hi = x.max(z).ln() + 250.0;
    let mut points = vec![lo, hi];
    for p in [ctx.breakpoint(state).ln(), z.ln()] {
        if p > lo && p < hi {
            points.push(p);
        }
    }
    points.sort_by(f64::total_cmp);
    let opts = QuadOptions {
        rel_tol: 1e-12,
        abs_tol: 0.0,
        max_subdivisions: 4000,
    };
    let q = integrate(
        |u: f64| {
            let t = u.exp();
            Ok(z / (t + z) * ctx.density_at(t, state)? * t)
        },
        &points,
        &opts,
    )
    .unwrap();
    -q.value
}

#[test]
fn unit_at_zero_argument() {
    let s = scenario(1e-4, 3e-5, 40.0, 8.0);
    let ctx = IntensityContext::for_operator(&s, OperatorId::One);
    for i in 0..20 {
        let x = 10f64.powf(6.0 + 0.5 * i as f64);
        for state in LinkState::ALL {
            assert_eq!(mgf_component(&MgfQuery { z: 0.0, x, state }, &ctx).unwrap(), 1.0);
        }
        for op in OperatorId::ALL {
            assert_eq!(mgf_nonsharing(0.0, x, op, &s).unwrap(), 1.0);
        }
        assert_eq!(mgf_sharing(0.0, x, &s).unwrap(), 1.0);
    }
}

#[test]
fn closed_form_matches_direct_functional() {
    let s = scenario(3e-5, 1e-5, 40.0, 8.0);
    let ctx = IntensityContext::for_operator(&s, OperatorId::One);
    for state in LinkState::ALL {
        let b = ctx.breakpoint(state);
        for x in [b * 1e-3, b * 0.5, b * 0.999, b, b * 1.001, b * 30.0] {
            for ratio in [1e-3, 0.3, 1.0, 7.0, 1e3, 1e6] {
                let z = ratio * x;
                let closed = log_mgf_component(z, x, &ctx, state).unwrap();
                let oracle = pgfl_oracle(z, x, &ctx, state);
                let tol = 1e-9 * oracle.abs().max(1e-12);
                assert!((closed - oracle).abs() <= tol, "{state:?} x {x:e} z {z:e}: {closed} vs {oracle}");
            }
        }
    }
}

#[test]
fn identical_operators_give_squared_transform() {
    let s = scenario(2e-5, 2e-5, 10.0, 10.0);
    let s = s.with_operator(OperatorId::Two, *s.operator(OperatorId::One));
    for (z, x) in [(1e8, 1e9), (3e10, 2e11), (1e6, 5e7)] {
        let shared = log_mgf_sharing(z, x, &s).unwrap();
        let single = log_mgf_nonsharing(10.0 * z, x, OperatorId::One, &s).unwrap();
        assert!((shared - 2.0 * single).abs() <= 1e-14 * shared.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bounded_and_decreasing_in_argument(log_x in 5.0f64..16.0, a in -4.0f64..6.0, b in -4.0f64..6.0) {
        let s = scenario(3e-5, 1e-5, 40.0, 8.0);
        let x = 10f64.powf(log_x);
        let (z1, z2) = (x * 10f64.powf(a.min(b)), x * 10f64.powf(a.max(b)));
        let m1 = mgf_nonsharing(z1, x, OperatorId::One, &s).unwrap();
        let m2 = mgf_nonsharing(z2, x, OperatorId::One, &s).unwrap();
        prop_assert!(m1 > 0.0 && m1 <= 1.0);
        prop_assert!(m2 <= m1 * (1.0 + 1e-13));
        let s1 = mgf_sharing(z1 / 40.0, x, &s).unwrap();
        prop_assert!(s1 <= m1 * (1.0 + 1e-13));
    }

    #[test]
    fn denser_interferers_lower_transform(log_x in 5.0f64..16.0, log_r in -3.0f64..4.0, scale in 1.0f64..20.0) {
        let x = 10f64.powf(log_x);
        let z = x * 10f64.powf(log_r);
        let sparse = scenario(1e-5, 1e-5, 1.0, 1.0);
        let dense = scenario(1e-5 * scale, 1e-5, 1.0, 1.0);
        let a = log_mgf_nonsharing(z, x, OperatorId::One, &sparse).unwrap();
        let b = log_mgf_nonsharing(z, x, OperatorId::One, &dense).unwrap();
        prop_assert!(b <= a * (1.0 - 1e-13) || (a == 0.0 && b == 0.0));
        prop_assert!((b - scale * a).abs() <= 1e-12 * b.abs());
    }
}
