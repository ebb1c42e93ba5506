use redescend_core::influence::{
    k_low_temperature_limit, log_temperature_grid, variance_low_temperature_limit,
    K_HIGH_TEMPERATURE_LIMIT, V_HIGH_TEMPERATURE_LIMIT,
};
use redescend_core::{EstimatorKernel, InfluenceProfile};

const CUTOFFS: [f64; 4] = [1.5, 2.0, 2.5, 3.0];

type Field = fn(&InfluenceProfile) -> f64;

fn profiles(c: f64) -> Vec<InfluenceProfile> {
    profiles_at(c, 20)
}

fn profiles_at(c: f64, per_decade: usize) -> Vec<InfluenceProfile> {
    log_temperature_grid(1e-4, 1e4, per_decade)
        .unwrap()
        .into_iter()
        .map(|t| InfluenceProfile::compute(c, t, 1e-3).unwrap())
        .collect()
}

fn relative_jump(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn profile_grid_is_finite_positive_and_continuous() {
    for c in CUTOFFS {
        let ps = profiles(c);
        assert_eq!(ps.len(), 161);
        for p in &ps {
            for v in [p.k, p.gamma_star, p.rho_eff, p.v, p.r_max] {
                assert!(v.is_finite() && v > 0.0, "c={c} T={}: {p:?}", p.t);
            }
        }
        for w in ps.windows(2) {
            for (a, b, name) in [(w[0].k, w[1].k, "K"), (w[0].v, w[1].v, "V")] {
                assert!(
                    relative_jump(a, b) < 0.05,
                    "{name} jumps at c={c} T={}",
                    w[1].t
                );
            }
        }
    }
}

/// Brute-force maximiser of ψ by golden-section search on [0, c + 20√T + 5].
fn numeric_argmax(c: f64, t: f64) -> f64 {
    let k = EstimatorKernel::normal(c, t).unwrap();
    let f = |r: f64| k.psi(r).unwrap();
    let hi = c + 20.0 * t.sqrt() + 5.0;
    let n = 4000;
    let (mut best, mut best_v) = (0.0, f64::MIN);
    for i in 0..=n {
        let r = hi * i as f64 / n as f64;
        if f(r) > best_v {
            best = r;
            best_v = f(r);
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best - hi / n as f64).max(0.0), best + hi / n as f64);
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) < f(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    0.5 * (a + b)
}

fn max_jump(ps: &[InfluenceProfile], f: fn(&InfluenceProfile) -> f64) -> f64 {
    ps.windows(2)
        .map(|w| relative_jump(f(&w[0]), f(&w[1])))
        .fold(0.0, f64::max)
}

/// γ* and ρ_eff grow like √T or slightly faster, so adjacent points at 20 per
/// decade may differ by a little more than 5%. Their jumps must instead
/// shrink under refinement.
#[test]
fn gamma_star_and_rejection_point_are_continuous() {
    for c in CUTOFFS {
        let coarse = profiles(c);
        let fine = profiles_at(c, 40);
        assert!(
            coarse.windows(2).all(|w| w[1].rho_eff > w[0].rho_eff),
            "rho_eff increasing c={c}"
        );
        let fields: [(&str, Field); 2] = [("gamma", |p| p.gamma_star), ("rho_eff", |p| p.rho_eff)];
        for (name, f) in fields {
            let (jc, jf) = (max_jump(&coarse, f), max_jump(&fine, f));
            assert!(jc < 0.08, "{name} c={c}: {jc}");
            assert!(jf < 0.6 * jc, "{name} c={c}: {jf} vs {jc}");
        }
    }
}

#[test]
fn r_max_matches_numeric_argmax_on_coarse_grid() {
    for c in CUTOFFS {
        for t in log_temperature_grid(1e-4, 1e4, 2).unwrap() {
            let formula = redescend_core::influence::r_max(c, t).unwrap();
            let numeric = numeric_argmax(c, t);
            assert!(
                (formula - numeric).abs() < 1e-6 * formula.max(1.0),
                "c={c} T={t}: {formula} vs {numeric}"
            );
        }
    }
}

#[test]
fn limits_bound_k_and_v() {
    for c in CUTOFFS {
        let ps = profiles(c);
        let ordered = |a: f64, b: f64| if a < b { (a, b) } else { (b, a) };
        let (k_lo, k_hi) = ordered(K_HIGH_TEMPERATURE_LIMIT, k_low_temperature_limit(c));
        let (v_lo, v_hi) = ordered(V_HIGH_TEMPERATURE_LIMIT, variance_low_temperature_limit(c));
        let (first, last) = (&ps[0], &ps[ps.len() - 1]);
        assert!((first.k - k_low_temperature_limit(c)).abs() < 1e-3);
        assert!((last.k - K_HIGH_TEMPERATURE_LIMIT).abs() < 1e-3);
        assert!((first.v - variance_low_temperature_limit(c)).abs() < 1e-2);
        assert!((last.v - V_HIGH_TEMPERATURE_LIMIT).abs() < 1e-3);
        // K decreases monotonically for c >= 2 and V for c <= 2.5, and there
        // the limits bound the sweep; elsewhere the curve dips past a limit.
        if c >= 2.0 {
            assert!(
                ps.windows(2).all(|w| w[1].k <= w[0].k + 1e-9),
                "K monotone c={c}"
            );
            assert!(
                ps.iter().all(|p| p.k >= k_lo - 1e-6 && p.k <= k_hi + 1e-6),
                "K bounds c={c}"
            );
        }
        if c <= 2.5 {
            assert!(
                ps.windows(2).all(|w| w[1].v <= w[0].v + 1e-9),
                "V monotone c={c}"
            );
            assert!(
                ps.iter().all(|p| p.v >= v_lo - 1e-6 && p.v <= v_hi + 1e-6),
                "V bounds c={c}"
            );
        }
    }
}
