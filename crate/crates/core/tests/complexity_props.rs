use locact::complexity::{
    edge_of_chaos_classify, min_real_on_axis, poles, residue_at_simple_pole, EdgeTolerances, RationalFunction,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Ascending coefficients of `prod (s - r_i)` times `lead`.
fn from_roots(roots: &[f64], lead: f64) -> Vec<f64> {
    let mut c = vec![lead];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &x) in c.iter().enumerate() {
            next[i + 1] += x;
            next[i] -= r * x;
        }
        c = next;
    }
    c
}

fn roots(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 0..=max)
}

fn separated(v: &[f64], gap: f64) -> bool {
    v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).abs() > gap))
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn reduction_preserves_values_and_drops_common_factor(
        zs in roots(2),
        ps in roots(2),
        common in -3.0..3.0f64,
        lead in 0.5..2.0f64,
        probe_re in -2.0..2.0f64,
        probe_im in 0.5..2.0f64,
    ) {
        let all: Vec<f64> = zs.iter().chain(&ps).copied().chain([common]).collect();
        prop_assume!(separated(&all, 0.05));
        let mut zc = zs.clone();
        zc.push(common);
        let mut pc = ps.clone();
        pc.push(common);
        let rf = RationalFunction::new(from_roots(&zc, lead), from_roots(&pc, 1.0)).unwrap();
        let (reduced, cancelled) = rf.reduce(1e-6).unwrap();
        prop_assert_eq!(cancelled.len(), 1);
        prop_assert!((cancelled[0].re - common).abs() <= 1e-6 && cancelled[0].im.abs() <= 1e-6);
        prop_assert_eq!(reduced.den().len(), ps.len() + 1);
        let s = Complex64::new(probe_re, probe_im);
        let (x, y) = (rf.eval(s), reduced.eval(s));
        prop_assert!((x - y).norm() <= 1e-7 * (1.0 + x.norm()), "{x} vs {y}");
    }

    #[test]
    fn residue_is_the_limit_of_scaled_function(
        ps in roots(3),
        zs in roots(2),
        lead in 0.5..2.0f64,
    ) {
        prop_assume!(!ps.is_empty());
        let all: Vec<f64> = zs.iter().chain(&ps).copied().collect();
        prop_assume!(separated(&all, 0.1));
        let rf = RationalFunction::new(from_roots(&zs, lead), from_roots(&ps, 1.0)).unwrap();
        for &p in &ps {
            let pz = Complex64::new(p, 0.0);
            let res = residue_at_simple_pole(&rf, pz).unwrap();
            let h = Complex64::new(0.0, 1e-6);
            let limit = h * rf.eval(pz + h);
            prop_assert!((limit - res).norm() <= 1e-4 * (1.0 + res.norm()), "{limit} vs {res}");
        }
    }

    #[test]
    fn values_are_conjugate_symmetric(
        num in prop::collection::vec(-2.0..2.0f64, 1..5),
        den in prop::collection::vec(-2.0..2.0f64, 1..5),
        re in -3.0..3.0f64,
        im in -3.0..3.0f64,
    ) {
        prop_assume!(den.last().unwrap().abs() > 0.1);
        let rf = RationalFunction::new(num, den).unwrap();
        let s = Complex64::new(re, im);
        let (a, b) = (rf.eval(s.conj()), rf.eval(s).conj());
        prop_assume!(a.is_finite());
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn adding_a_constant_shifts_the_axis_minimum(
        zs in roots(2),
        ps in prop::collection::vec(-3.0..-0.2f64, 1..=3),
        c in -1.0..1.0f64,
    ) {
        prop_assume!(zs.len() <= ps.len());
        let (num, den) = (from_roots(&zs, 1.0), from_roots(&ps, 1.0));
        let shifted: Vec<f64> = (0..den.len()).map(|i| num.get(i).copied().unwrap_or(0.0) + c * den[i]).collect();
        let (f, g) = (RationalFunction::new(num, den.clone()).unwrap(), RationalFunction::new(shifted, den).unwrap());
        let omega_max = f.default_omega_max().max(g.default_omega_max());
        let (mf, mg) = (min_real_on_axis(&f, omega_max, 2048).unwrap(), min_real_on_axis(&g, omega_max, 2048).unwrap());
        prop_assert!((mg.infimum() - mf.infimum() - c).abs() <= 1e-6 * (1.0 + mf.infimum().abs()), "{mf:?} {mg:?}");
    }

    #[test]
    fn axis_minimum_never_exceeds_sampled_values(
        zs in roots(2),
        ps in prop::collection::vec(-3.0..-0.2f64, 1..=3),
        w in 0.0..50.0f64,
    ) {
        prop_assume!(zs.len() <= ps.len());
        let rf = RationalFunction::new(from_roots(&zs, 1.0), from_roots(&ps, 1.0)).unwrap();
        let m = min_real_on_axis(&rf, rf.default_omega_max(), 2048).unwrap();
        prop_assert!(m.infimum() <= rf.eval(Complex64::new(0.0, w)).re + 1e-12);
    }

    #[test]
    fn classification_flags_are_consistent(
        zs in roots(3),
        ps in roots(3),
        extra_axis in prop::option::of(0.2..2.0f64),
    ) {
        let mut den = from_roots(&ps, 1.0);
        if let Some(w) = extra_axis {
            // multiply by s^2 + w^2
            let mut next = vec![0.0; den.len() + 2];
            for (i, &x) in den.iter().enumerate() {
                next[i] += w * w * x;
                next[i + 2] += x;
            }
            den = next;
        }
        let rf = RationalFunction::new(from_roots(&zs, 1.0), den).unwrap();
        let Ok(c) = edge_of_chaos_classify(&rf, &EdgeTolerances::default()) else {
            return Ok(());
        };
        prop_assert_eq!(c.locally_active, c.cond_i || c.cond_ii || c.cond_iii || c.cond_iv);
        prop_assert_eq!(c.edge_of_chaos, c.cond_iv && !(c.cond_i || c.cond_ii || c.cond_iii));
        prop_assert!(!c.edge_of_chaos || c.locally_active);
        prop_assert_eq!(c.cond_i, c.evidence.unstable_pole.is_some());
        let reduced_poles = poles(&rf.reduce(1e-6).unwrap().0, 1e-6).unwrap();
        prop_assert_eq!(c.cond_i, reduced_poles.poles.iter().any(|p| p.location.re > 1e-7));
    }
}
