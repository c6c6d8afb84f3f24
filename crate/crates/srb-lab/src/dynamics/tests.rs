use super::*;
use series::Series;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_models() -> Vec<SurfaceMap> {
    vec![
        SurfaceMap::identity(),
        SurfaceMap::cat(),
        SurfaceMap::perturbed_cat(0.04).unwrap(),
        SurfaceMap::standard(1.5).unwrap(),
        SurfaceMap::morse_smale(0.12).unwrap(),
    ]
}

/// Unreduced chart formulas, written out independently of `apply`.
fn lift(map: &SurfaceMap, u: f64, v: f64) -> [f64; 2] {
    match *map {
        SurfaceMap::Identity => [u, v],
        SurfaceMap::Cat => [2.0 * u + v, u + v],
        SurfaceMap::PerturbedCat { delta } => [
            2.0 * u + v + delta * (TAU * v).sin() / TAU,
            u + v + delta * (TAU * u).sin() / TAU,
        ],
        SurfaceMap::Standard { kick } => {
            let vp = v + kick * (TAU * u).sin() / TAU;
            [u + vp, vp]
        }
        SurfaceMap::MorseSmale { amp } => {
            [u + amp * (TAU * u).sin(), v + amp * (TAU * v).sin()]
        }
    }
}

fn fd_partial(f: &dyn Fn(f64, f64) -> f64, u: f64, v: f64, du: usize, dv: usize, h: f64) -> f64 {
    if du > 0 {
        (fd_partial(f, u + h, v, du - 1, dv, h) - fd_partial(f, u - h, v, du - 1, dv, h))
            / (2.0 * h)
    } else if dv > 0 {
        (fd_partial(f, u, v + h, du, dv - 1, h) - fd_partial(f, u, v - h, du, dv - 1, h))
            / (2.0 * h)
    } else {
        f(u, v)
    }
}

#[test]
fn angle_normalization() {
    let pi = std::f64::consts::PI;
    assert_eq!(normalize_angle(0.0), 0.0);
    assert!((normalize_angle(pi + 0.3) - 0.3).abs() < 1e-12);
    assert!((normalize_angle(-0.3) - (pi - 0.3)).abs() < 1e-12);
    assert_eq!(normalize_angle(pi), 0.0);
    assert!(normalize_angle(-1e-18) < pi);
}

#[test]
fn chart_distances() {
    let p = SurfacePoint::new(0.95, 0.1);
    let q = SurfacePoint::new(0.05, 0.9);
    assert!((torus_dist(p, q) - 0.1_f64.hypot(0.2)).abs() < 1e-12);
    let a = TangentDirection::new(0.05);
    let b = TangentDirection::new(std::f64::consts::PI - 0.05);
    assert!((direction_dist(a, b) - 0.1).abs() < 1e-12);
    let xi = ProjectivePoint::new(0.95, 0.1, 0.05);
    let eta = ProjectivePoint::new(0.05, 0.9, std::f64::consts::PI - 0.05);
    assert!((bundle_dist(xi, eta) - torus_dist(p, q).hypot(0.1)).abs() < 1e-12);
}

#[test]
fn nearest_rep_halves() {
    assert_eq!(nearest_rep(0.4), 0.4);
    assert!((nearest_rep(0.6) + 0.4).abs() < 1e-15);
    assert!((nearest_rep(-0.6) - 0.4).abs() < 1e-15);
    assert_eq!(nearest_rep(0.5), -0.5);
    assert_eq!(nearest_rep(3.0), 0.0);
}

#[test]
fn constructor_caps() {
    assert!(SurfaceMap::perturbed_cat(0.049).is_ok());
    assert!(SurfaceMap::perturbed_cat(0.05).is_err());
    assert!(SurfaceMap::perturbed_cat(-0.01).is_err());
    assert!(SurfaceMap::perturbed_cat(f64::NAN).is_err());
    assert!(SurfaceMap::morse_smale(0.15).is_ok());
    assert!(SurfaceMap::morse_smale(0.151).is_err());
    assert!(SurfaceMap::standard(f64::INFINITY).is_err());
}

#[test]
fn apply_matches_lift_mod_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for map in all_models() {
        for _ in 0..50 {
            let x = SurfacePoint::new(rng.gen::<f64>(), rng.gen::<f64>());
            let y = map.apply(x);
            let l = lift(&map, x.u, x.v);
            assert!(torus_dist(y, SurfacePoint::new(l[0], l[1])) < 1e-12, "{}", map.name());
        }
    }
}

#[test]
fn inverse_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for map in all_models() {
        for _ in 0..200 {
            let x = SurfacePoint::new(rng.gen::<f64>(), rng.gen::<f64>());
            let there = map.apply(x);
            let back = map.inverse_apply(there);
            assert!(torus_dist(back, x) < 1e-10, "{} back {back:?} vs {x:?}", map.name());
            let fwd = map.apply(map.inverse_apply(x));
            assert!(torus_dist(fwd, x) < 1e-10, "{}", map.name());
        }
    }
}

#[test]
fn differential_matches_first_order_jet_and_fd() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for map in all_models() {
        for _ in 0..20 {
            let x = SurfacePoint::new(rng.gen::<f64>(), rng.gen::<f64>());
            let d = map.differential(x);
            let jet = map.jet(x, 1);
            let t1 = jet.tensor(1);
            assert!((d.m[0][0] - t1[0][0]).abs() < 1e-14);
            assert!((d.m[0][1] - t1[0][1]).abs() < 1e-14);
            assert!((d.m[1][0] - t1[1][0]).abs() < 1e-14);
            assert!((d.m[1][1] - t1[1][1]).abs() < 1e-14);
            for i in 0..2 {
                let f = |u: f64, v: f64| lift(&map, u, v)[i];
                let fd_u = fd_partial(&f, x.u, x.v, 1, 0, 1e-5);
                let fd_v = fd_partial(&f, x.u, x.v, 0, 1, 1e-5);
                assert!((d.m[i][0] - fd_u).abs() < 1e-6, "{} row {i}", map.name());
                assert!((d.m[i][1] - fd_v).abs() < 1e-6, "{} row {i}", map.name());
            }
        }
    }
}

#[test]
fn jet_tensors_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for map in all_models() {
        for _ in 0..6 {
            let x = SurfacePoint::new(rng.gen::<f64>(), rng.gen::<f64>());
            let jet = map.jet(x, 3);
            for k in 2..=3usize {
                let t = jet.tensor(k);
                for i in 0..2 {
                    for j in 0..=k {
                        let f = |u: f64, v: f64| lift(&map, u, v)[i];
                        let fd = fd_partial(&f, x.u, x.v, k - j, j, 0.01);
                        let tol = 1e-2_f64.max(0.01 * fd.abs());
                        assert!(
                            (t[i][j] - fd).abs() < tol,
                            "{} order {k} coord {i} v-derivs {j}: jet {} fd {}",
                            map.name(),
                            t[i][j],
                            fd
                        );
                    }
                }
            }
        }
    }
}

/// Independent composition reference: evaluate the bivariate Taylor sum of
/// the model (from its jet tensors) on the germ with naive polynomial
/// convolutions. Shares no code with the series engine.
fn compose_via_tensors(map: &SurfaceMap, jet: &CurveJet, order: usize) -> [Vec<f64>; 2] {
    let base = SurfacePoint::new(jet.u.value(), jet.v.value());
    let model = map.jet(base, order);
    let lifted = lift(map, base.u, base.v);

    let poly_mul = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; order + 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                if i + j <= order {
                    out[i + j] += ai * bj;
                }
            }
        }
        out
    };

    // Increment polynomials a(h), b(h) with zero constant term.
    let mut a = jet.u.c.clone();
    a.resize(order + 1, 0.0);
    a[0] = 0.0;
    let mut b = jet.v.c.clone();
    b.resize(order + 1, 0.0);
    b[0] = 0.0;

    // Powers a^p, b^q up to the order.
    let mut apow = vec![vec![0.0; order + 1]; order + 1];
    let mut bpow = vec![vec![0.0; order + 1]; order + 1];
    apow[0][0] = 1.0;
    bpow[0][0] = 1.0;
    for p in 1..=order {
        apow[p] = poly_mul(&apow[p - 1], &a);
        bpow[p] = poly_mul(&bpow[p - 1], &b);
    }

    let mut out = [vec![0.0; order + 1], vec![0.0; order + 1]];
    for i in 0..2 {
        out[i][0] = lifted[i];
        for k in 1..=order {
            let t = model.tensor(k);
            for j in 0..=k {
                let coeff = t[i][j]
                    / (series::factorial(k - j) * series::factorial(j));
                let term = poly_mul(&apow[k - j], &bpow[j]);
                for (d, &td) in term.iter().enumerate() {
                    out[i][d] += coeff * td;
                }
            }
        }
    }
    out
}

#[test]
fn curve_jet_push_matches_tensor_composition() {
    let order = 8;
    let mut u = Series::zeros(order);
    let mut v = Series::zeros(order);
    u.c = vec![0.31, 0.8, -0.4, 0.11, -0.05, 0.02, -0.008, 0.003, -0.001];
    v.c = vec![0.62, -0.5, 0.0, 0.3, -0.07, 0.01, 0.004, -0.002, 0.0005];
    let germ = CurveJet { u, v };
    for map in all_models() {
        let pushed = map.push_curve_jet(&germ);
        let reference = compose_via_tensors(&map, &germ, order);
        for (coord, (series, r)) in
            [(&pushed.u, &reference[0]), (&pushed.v, &reference[1])].iter().enumerate()
        {
            assert!(
                nearest_rep(series.c[0] - r[0]).abs() < 1e-11,
                "{} coord {coord} base",
                map.name()
            );
            for d in 1..=order {
                let tol = 1e-9_f64.max(1e-10 * r[d].abs());
                assert!(
                    (series.c[d] - r[d]).abs() < tol,
                    "{} coord {coord} order {d}: push {} ref {}",
                    map.name(),
                    series.c[d],
                    r[d]
                );
            }
        }
    }
}

#[test]
fn cat_exponent_is_exact() {
    let rate = cat_expansion_rate();
    let map = SurfaceMap::cat();
    for n in [1usize, 7, 16, 33, 200] {
        let got = map.upper_lyapunov(SurfacePoint::new(0.123, 0.456), n);
        assert!((got - rate).abs() < 1e-12, "n = {n}: {got} vs {rate}");
    }
}

#[test]
fn identity_exponent_is_zero() {
    let map = SurfaceMap::identity();
    for n in [1usize, 16, 50] {
        assert!(map.upper_lyapunov(SurfacePoint::new(0.2, 0.7), n).abs() < 1e-13);
    }
}

#[test]
fn phi_on_cat_eigendirections() {
    let map = SurfaceMap::cat();
    let rate = cat_expansion_rate();
    let theta_u = ((5.0_f64.sqrt() - 1.0) / 2.0).atan();
    let unstable = ProjectivePoint::new(0.3, 0.9, theta_u);
    assert!((map.phi(unstable) - rate).abs() < 1e-12);
    let stable = ProjectivePoint::new(0.3, 0.9, theta_u + std::f64::consts::FRAC_PI_2);
    assert!((map.phi(stable) + rate).abs() < 1e-12);
    // Eigendirections are fixed by the projectivized map.
    let next = map.projective_apply(unstable);
    assert!(direction_dist(next.dir, unstable.dir) < 1e-12);
}

#[test]
fn phi_birkhoff_sum_telescopes_to_cocycle_norm() {
    let map = SurfaceMap::perturbed_cat(0.03).unwrap();
    let n = 60;
    let xi0 = ProjectivePoint::new(0.21, 0.68, 0.4);
    let orbit = map.projective_orbit(xi0, n);
    let sum: f64 = orbit.iter().map(|xi| map.phi(*xi)).sum();
    // Direct product of differentials applied to the starting vector.
    let mut w = xi0.dir.unit();
    let mut banked = 0.0;
    for xi in &orbit {
        w = map.differential(xi.point).mul_vec(w);
        let nw = w[0].hypot(w[1]);
        banked += nw.ln();
        w = [w[0] / nw, w[1] / nw];
    }
    assert!((sum - banked).abs() < 1e-9, "sum {sum} vs product {banked}");
}

#[test]
fn projective_differential_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let pi = std::f64::consts::PI;
    for map in all_models() {
        for _ in 0..10 {
            let xi = ProjectivePoint::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>() * pi);
            let d3 = map.projective_differential(xi);
            let h = 1e-6;
            let chart = |u: f64, v: f64, t: f64| {
                let img = map.projective_apply(ProjectivePoint::new(u, v, t));
                (img.point.u, img.point.v, img.dir.theta)
            };
            let diff_row = |plus: (f64, f64, f64), minus: (f64, f64, f64)| {
                [
                    nearest_rep(plus.0 - minus.0) / (2.0 * h),
                    nearest_rep(plus.1 - minus.1) / (2.0 * h),
                    angle_rep(plus.2 - minus.2) / (2.0 * h),
                ]
            };
            let cols = [
                diff_row(
                    chart(xi.point.u + h, xi.point.v, xi.dir.theta),
                    chart(xi.point.u - h, xi.point.v, xi.dir.theta),
                ),
                diff_row(
                    chart(xi.point.u, xi.point.v + h, xi.dir.theta),
                    chart(xi.point.u, xi.point.v - h, xi.dir.theta),
                ),
                diff_row(
                    chart(xi.point.u, xi.point.v, xi.dir.theta + h),
                    chart(xi.point.u, xi.point.v, xi.dir.theta - h),
                ),
            ];
            for r in 0..3 {
                for c in 0..3 {
                    let fd = cols[c][r];
                    let tol = 1e-4_f64.max(1e-5 * fd.abs());
                    assert!(
                        (d3[r][c] - fd).abs() < tol,
                        "{} entry ({r},{c}): analytic {} fd {}",
                        map.name(),
                        d3[r][c],
                        fd
                    );
                }
            }
        }
    }
}

/// Angle difference mapped to the projective fundamental strip.
fn angle_rep(d: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let r = d.rem_euclid(pi);
    if r >= pi / 2.0 {
        r - pi
    } else {
        r
    }
}

#[test]
fn dilation_bounds_for_the_linear_model() {
    let map = SurfaceMap::cat();
    let rate = cat_expansion_rate();
    let d = map.asymptotic_dilation(2, (16, 16, 16));
    assert!(d >= rate - 1e-9, "dilation {d} below base rate {rate}");
    assert!(d <= 2.0 * rate + 1e-9, "dilation {d} above twice the base rate");
    let d_id = SurfaceMap::identity().asymptotic_dilation(2, (8, 8, 8));
    assert!(d_id.abs() < 1e-12);
}

#[test]
fn phi_sup_on_linear_model_is_the_rate() {
    let map = SurfaceMap::cat();
    let sup = map.phi_sup_estimate((16, 16, 64));
    let rate = cat_expansion_rate();
    assert!(sup <= rate + 1e-12);
    assert!(sup > rate - 1e-2, "grid sup {sup} should approach {rate}");
}

#[test]
fn morse_smale_fixed_point_types() {
    let map = SurfaceMap::morse_smale(0.12).unwrap();
    let origin = SurfacePoint::new(0.0, 0.0);
    assert!(torus_dist(map.apply(origin), origin) < 1e-15);
    let [lo, hi] = map.differential(origin).eigen_moduli();
    assert!(lo > 1.0 && hi > 1.0, "origin should repel: moduli {lo}, {hi}");
    let sink = SurfacePoint::new(0.5, 0.5);
    assert!(torus_dist(map.apply(sink), sink) < 1e-15);
    let [lo, hi] = map.differential(sink).eigen_moduli();
    assert!(lo < 1.0 && hi < 1.0, "center should attract: moduli {lo}, {hi}");
}

#[test]
fn orbit_lengths_and_consistency() {
    let map = SurfaceMap::standard(1.1).unwrap();
    let x = SurfacePoint::new(0.37, 0.58);
    let orbit = map.orbit(x, 12);
    assert_eq!(orbit.len(), 12);
    for w in orbit.windows(2) {
        assert!(torus_dist(map.apply(w[0]), w[1]) < 1e-15);
    }
    let proj = map.projective_orbit(ProjectivePoint::new(0.37, 0.58, 1.0), 12);
    for (p, xi) in orbit.iter().zip(proj.iter()) {
        assert!(torus_dist(*p, xi.point) < 1e-15);
    }
}
