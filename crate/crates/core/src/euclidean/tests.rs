use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let steps = steps + steps % 2;
    let h = (b - a) / steps as f64;
    let mut acc = f(a) + f(b);
    for i in 1..steps {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn gaussian(grid: GridSpec, width: f64) -> GridFunction {
    GridFunction::from_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / (width * width)).exp()).unwrap()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn poisson_kernel_at_the_origin() {
    assert!((poisson_kernel(&[0.0], 1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
    assert!((poisson_kernel(&[0.0, 0.0], 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    assert!(poisson_kernel(&[0.0], 0.0).is_err());
    assert!(poisson_kernel(&[0.0], -1.0).is_err());
    assert!(poisson_kernel(&[0.0, 0.0, 0.0], 1.0).is_err());
}

#[test]
fn poisson_kernel_scaling() {
    for &t in &[0.1, 0.7, 3.0] {
        for x in [[0.3, -1.2], [2.0, 0.5], [0.0, 0.0]] {
            let lhs = poisson_kernel(&x, t).unwrap();
            let rhs = t.powi(-2) * poisson_kernel(&[x[0] / t, x[1] / t], 1.0).unwrap();
            assert!(rel_err(lhs, rhs) < 1e-14);
            let lhs = poisson_kernel(&x[..1], t).unwrap();
            let rhs = poisson_kernel(&[x[0] / t], 1.0).unwrap() / t;
            assert!(rel_err(lhs, rhs) < 1e-14);
        }
    }
}

#[test]
fn poisson_kernel_has_unit_mass() {
    for &t in &[0.5, 1.0, 2.0] {
        let r = 4000.0;
        let one = simpson(
            |y| poisson_kernel(&[y], t).unwrap(),
            -r,
            r,
            4_000_000,
        );
        assert!((one - 1.0).abs() < 1e-3, "1d mass {one}");
        let two = simpson(|r| 2.0 * PI * r * poisson_kernel(&[r, 0.0], t).unwrap(), 0.0, r, 4_000_000);
        assert!((two - 1.0).abs() < 1e-3, "2d mass {two}");
        assert!((1.0 - one - poisson_tail_mass(1, t, r)).abs() < 1e-6);
        assert!((1.0 - two - poisson_tail_mass(2, t, r)).abs() < 1e-6);
    }
}

#[test]
fn constants_extend_to_constants() {
    for g in [GridSpec::new(1, 64, 4.0).unwrap(), GridSpec::new(2, 32, 4.0).unwrap()] {
        let f = GridFunction::constant(g, 2.5).unwrap();
        let u = poisson_extend_halfspace(&f, &geometric_levels(2.0, 6).unwrap(), 1.0).unwrap();
        assert!(u.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
        let k = kernel_extend(&f, &Kernel::tent(), &geometric_levels(2.0, 6).unwrap()).unwrap();
        assert!(k.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
    }
}

#[test]
fn extension_rejects_levels_above_the_half_width() {
    let g = GridSpec::new(1, 16, 1.0).unwrap();
    let f = GridFunction::constant(g, 1.0).unwrap();
    assert!(poisson_extend_halfspace(&f, &[2.0], 1.0).is_err());
    assert!(poisson_extend_halfspace(&f, &[0.5, 0.0], 1.0).is_err());
}

/// `int P_t(y) cos(xi y) dy` by quadrature.
fn mode_damping_oracle(t: f64, xi: f64) -> f64 {
    let r = 2000.0;
    simpson(|y| 2.0 * poisson_kernel(&[y], t).unwrap() * (xi * y).cos(), 0.0, r, 4_000_000)
}

#[test]
fn fourier_modes_are_damped_by_the_continuum_multiplier() {
    let g = GridSpec::new(1, 256, 16.0).unwrap();
    let k = 5.0;
    let xi = PI * k / 16.0;
    let f = GridFunction::from_fn(g, |x| (xi * x[0]).cos()).unwrap();
    let levels = [2.0, 1.0, 0.5, 0.25, 0.125];
    let u = poisson_extend_halfspace(&f, &levels, 1.0).unwrap();
    for (j, &t) in levels.iter().enumerate() {
        let damp = mode_damping_oracle(t, xi);
        for (idx, &v) in u.level(j).iter().enumerate() {
            let expect = damp * f.values()[idx];
            assert!((v - expect).abs() <= 0.01 * damp, "t={t} idx={idx}: {v} vs {expect}");
        }
    }
}

#[test]
fn two_dimensional_modes() {
    let g = GridSpec::new(2, 32, PI).unwrap();
    let f = GridFunction::from_fn(g, |x| (3.0 * x[0] + 4.0 * x[1]).sin()).unwrap();
    let u = poisson_extend_halfspace(&f, &[0.3], 1.0).unwrap();
    let damp = (-0.3f64 * 5.0).exp();
    for (a, b) in u.level(0).iter().zip(f.values()) {
        assert!((a - damp * b).abs() < 1e-12);
    }
}

#[test]
fn extension_converges_to_the_boundary_values() {
    let g = GridSpec::new(1, 1024, 16.0).unwrap();
    let f = gaussian(g, 1.5);
    let levels = geometric_levels(4.0, 10).unwrap();
    let u = poisson_extend_halfspace(&f, &levels, 1.0).unwrap();
    let errors: Vec<f64> = (0..levels.len())
        .map(|j| {
            let d: Vec<f64> = u.level(j).iter().zip(f.values()).map(|(a, b)| a - b).collect();
            GridFunction::new(g, d).unwrap().lp_norm(2.0).unwrap()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[levels.len() - 1] < 0.01 * f.lp_norm(2.0).unwrap());
}

#[test]
fn radial_supremum_is_dominated_by_the_maximal_function() {
    for g in [GridSpec::new(1, 512, 16.0).unwrap(), GridSpec::new(2, 64, 8.0).unwrap()] {
        let f = GridFunction::from_fn(g, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            (-r2).exp() * (1.0 + (3.0 * x[0]).sin()) - 0.5 * (-(x[0] - 3.0).powi(2)).exp()
        })
        .unwrap();
        let levels = geometric_levels(8.0, 12).unwrap();
        let u = poisson_extend_halfspace(&f, &levels, 1.0).unwrap();
        let mf = grid_maximal(&f).unwrap();
        let mut c: f64 = 0.0;
        for idx in 0..g.len() {
            let sup = (0..levels.len()).fold(0.0f64, |s, j| s.max(u.level(j)[idx].abs()));
            c = c.max(sup / mf.values()[idx]);
        }
        // centered cubes in the plane are not balls, so allow the ratio of their volumes
        let bound = if g.dim == 1 { 1.0 + 1e-6 } else { 4.0 / PI };
        assert!(c <= bound, "dim {} constant {c}", g.dim);
    }
}

#[test]
fn grid_maximal_matches_naive_windows() {
    let g = GridSpec::new(2, 12, 1.0).unwrap();
    let f = GridFunction::from_fn(g, |x| (5.0 * x[0]).sin() * (2.0 * x[1] + 0.3).cos()).unwrap();
    let mf = grid_maximal(&f).unwrap();
    let m = g.m as isize;
    for idx in 0..g.len() {
        let [a, b] = g.axes(idx);
        let mut best: f64 = 0.0;
        for k in 0..(m + 1) / 2 {
            let mut s = 0.0;
            for da in -k..=k {
                for db in -k..=k {
                    let i = (a as isize + da).rem_euclid(m) as usize;
                    let j = (b as isize + db).rem_euclid(m) as usize;
                    s += f.values()[i * g.m + j].abs();
                }
            }
            best = best.max(s / ((2 * k + 1) * (2 * k + 1)) as f64);
        }
        assert!((mf.values()[idx] - best).abs() < 1e-12);
    }
}

#[test]
fn weak_norm_examples() {
    let g = GridSpec::new(1, 8, 1.0).unwrap();
    let zero = HalfSpaceField::new(g, vec![0.5, 0.25], 1.0, vec![0.0; 16]).unwrap();
    assert_eq!(halfspace_weak_norm(&zero, 2.0).unwrap(), 0.0);
    let mut values = vec![0.0; 16];
    values[11] = 1.0;
    let single = HalfSpaceField::new(g, vec![0.5, 0.25], 1.0, values).unwrap();
    let m = single.level_weight(1);
    for p in [1.0, 2.0, 3.5] {
        assert!(rel_err(halfspace_weak_norm(&single, p).unwrap(), m.powf(1.0 / p)) < 1e-14);
    }
    assert!(halfspace_weak_norm(&single, 0.5).is_err());
}

/// `sup_lambda lambda mu(|F| >= lambda)^{1/p}` by scanning every attained level.
fn threshold_scan(values: &[f64], weights: &[f64], p: f64) -> f64 {
    let mut best: f64 = 0.0;
    for &v in values {
        let lambda = v.abs();
        let mass: f64 = values
            .iter()
            .zip(weights)
            .filter(|(x, _)| x.abs() >= lambda)
            .map(|(_, w)| w)
            .sum();
        best = best.max(lambda * mass.powf(1.0 / p));
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_norm_equals_threshold_scan(
        raw in prop::collection::vec(-3i32..=3, 12),
        s in 0.0f64..3.0,
        p in 1.0f64..4.0,
    ) {
        let g = GridSpec::new(1, 4, 1.0).unwrap();
        let values: Vec<f64> = raw.iter().map(|&v| v as f64 * 0.5).collect();
        let field = HalfSpaceField::new(g, vec![1.0, 0.5, 0.25], s, values.clone()).unwrap();
        let fast = halfspace_weak_norm(&field, p).unwrap();
        let slow = threshold_scan(&values, &field.weights(), p);
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0));
    }

    #[test]
    fn riesz_square_sum_is_minus_identity(
        coeffs in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let g = GridSpec::new(2, 16, PI).unwrap();
        let f = GridFunction::from_fn(g, |x| {
            coeffs[0] * x[0].cos() + coeffs[1] * (2.0 * x[1]).sin()
                + coeffs[2] * (x[0] + 3.0 * x[1]).cos() + coeffs[3] * (5.0 * x[0] - x[1]).sin()
                + coeffs[4] * (7.0 * x[0]).cos() * (2.0 * x[1]).cos()
                + coeffs[5] * (x[1] - 4.0 * x[0]).sin() + coeffs[6] * (6.0 * x[1]).cos()
                + coeffs[7] * (3.0 * x[0]).sin() * x[1].sin()
        }).unwrap();
        let mut sum = vec![0.0; g.len()];
        for axis in 0..2 {
            let rr = riesz_transform(&riesz_transform(&f, axis).unwrap(), axis).unwrap();
            for (s, v) in sum.iter_mut().zip(rr.values()) {
                *s += v;
            }
        }
        for (s, v) in sum.iter().zip(f.values()) {
            prop_assert!((s + v).abs() < 1e-12);
        }
    }
}

#[test]
fn riesz_multiplier_on_single_modes() {
    let g = GridSpec::new(2, 32, PI).unwrap();
    let (a, b) = (3.0, -4.0);
    let f = GridFunction::from_fn(g, |x| (a * x[0] + b * x[1]).cos()).unwrap();
    for (axis, xi) in [(0, a), (1, b)] {
        // -i xi_j/|xi| maps cos to (xi_j/|xi|) sin
        let r = riesz_transform(&f, axis).unwrap();
        for idx in 0..g.len() {
            let x = g.point(idx);
            let expect = xi / 5.0 * (a * x[0] + b * x[1]).sin();
            assert!((r.values()[idx] - expect).abs() < 1e-12);
        }
    }
    assert!(riesz_transform(&f, 2).is_err());
    let c = GridFunction::constant(g, 1.0).unwrap();
    assert!(riesz_transform(&c, 0).unwrap().values().iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn hilbert_transform_of_a_gaussian() {
    let g = GridSpec::new(1, 4096, 64.0).unwrap();
    let f = gaussian(g, 1.0);
    let hf = riesz_transform(&f, 0).unwrap();
    for idx in (1920..=2176).step_by(8) {
        let x = g.point(idx)[0];
        // (1/pi) p.v. int f(y)/(x - y) dy = (1/pi) int_0^oo (f(x - s) - f(x + s)) / s ds
        let oracle = simpson(
            |s| {
                if s == 0.0 {
                    4.0 * x * (-x * x).exp()
                } else {
                    ((-(x - s) * (x - s)).exp() - (-(x + s) * (x + s)).exp()) / s
                }
            },
            0.0,
            40.0,
            400_000,
        ) / PI;
        let got = hf.values()[idx];
        assert!((got - oracle).abs() <= 0.01 * oracle.abs().max(0.05), "x={x}: {got} vs {oracle}");
    }
}

#[test]
fn hyperbolic_gradient_examples() {
    let g = GridSpec::new(2, 16, 2.0).unwrap();
    let levels = geometric_levels(1.0, 6).unwrap();
    let n = g.len();
    let c = HalfSpaceField::new(g, levels.clone(), 2.0, vec![3.0; n * levels.len()]).unwrap();
    assert!(hyperbolic_gradient(&c).unwrap().values().iter().all(|v| v.abs() < 1e-12));
    let ramp: Vec<f64> = levels.iter().flat_map(|&t| std::iter::repeat_n(t, n)).collect();
    let u = HalfSpaceField::new(g, levels.clone(), 2.0, ramp).unwrap();
    let grad = hyperbolic_gradient(&u).unwrap();
    for j in 1..levels.len() - 1 {
        for v in grad.level(j) {
            assert!(rel_err(*v, levels[j]) < 0.01);
        }
    }
    let single = HalfSpaceField::new(g, vec![1.0], 2.0, vec![0.0; n]).unwrap();
    assert!(hyperbolic_gradient(&single).is_err());
}

#[test]
fn difference_weights_are_exact_on_quadratics() {
    let x = [1.0, 0.5, 0.25];
    for k in 0..3 {
        let w = fd_weights(x, k);
        let d: f64 = (0..3).map(|i| w[i] * (x[i] * x[i] - 3.0 * x[i] + 2.0)).sum();
        assert!((d - (2.0 * x[k] - 3.0)).abs() < 1e-12);
    }
}

#[test]
fn spatial_derivatives_commute_with_the_extension() {
    let g = GridSpec::new(2, 64, 4.0).unwrap();
    let width = 0.8;
    let f = gaussian(g, width);
    let df = [0, 1].map(|axis| {
        GridFunction::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            -2.0 * x[axis] / (width * width) * (-r2 / (width * width)).exp()
        })
        .unwrap()
    });
    let levels = geometric_levels(1.0, 5).unwrap();
    let u = poisson_extend_halfspace(&f, &levels, 2.0).unwrap();
    for axis in 0..2 {
        let via_data = poisson_extend_halfspace(&df[axis], &levels, 2.0).unwrap();
        for j in 0..levels.len() {
            let spectral = u.level_function(j).unwrap().derivative(axis).unwrap();
            let scale = via_data.level(j).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in spectral.values().iter().zip(via_data.level(j)) {
                assert!((a - b).abs() <= 0.01 * scale);
            }
        }
    }
}

#[test]
fn t_derivative_matches_riesz_representation() {
    // d_t u = P_t * g with g = -sum_j R_j d_j f
    let g = GridSpec::new(2, 64, 4.0).unwrap();
    let f = gaussian(g, 0.8);
    let mut gfun = vec![0.0; g.len()];
    for axis in 0..2 {
        let r = riesz_transform(&f.derivative(axis).unwrap(), axis).unwrap();
        for (acc, v) in gfun.iter_mut().zip(r.values()) {
            *acc -= v;
        }
    }
    let gfun = GridFunction::new(g, gfun).unwrap();
    for &t in &[0.2, 0.5, 1.0] {
        let levels = [t * 1.01, t, t * 0.99];
        let u = poisson_extend_halfspace(&f, &levels, 2.0).unwrap();
        let dt = t_derivative(&u, 1);
        let pg = poisson_extend_halfspace(&gfun, &[t], 2.0).unwrap();
        let scale = pg.max_abs();
        for (a, b) in dt.iter().zip(pg.level(0)) {
            assert!((a - b).abs() <= 0.01 * scale, "t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn spectral_and_centered_differences_agree_on_smooth_fields() {
    let g = GridSpec::new(2, 128, 4.0).unwrap();
    let f = gaussian(g, 1.0);
    let u = poisson_extend_halfspace(&f, &geometric_levels(1.0, 4).unwrap(), 2.0).unwrap();
    let m = g.m;
    let h = g.spacing();
    for j in 0..u.num_levels() {
        let level = u.level_function(j).unwrap();
        let spectral = level.derivative(1).unwrap();
        let scale = spectral.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for idx in 0..g.len() {
            let [r, c] = g.axes(idx);
            let next = level.values()[r * m + (c + 1) % m];
            let prev = level.values()[r * m + (c + m - 1) % m];
            let fd = (next - prev) / (2.0 * h);
            assert!((fd - spectral.values()[idx]).abs() <= 0.01 * scale);
        }
    }
}

fn lp_weak_ratio(m: usize, p: f64, s: f64) -> f64 {
    let g = GridSpec::new(1, m, 64.0).unwrap();
    let f = gaussian(g, 1.0);
    let levels = geometric_levels(1.0 / 16.0, 10).unwrap();
    let u = poisson_extend_halfspace(&f, &levels, s).unwrap();
    let scaled = u.scaled_by_power(s / p).unwrap();
    halfspace_weak_norm(&scaled, p).unwrap() / f.lp_norm(p).unwrap()
}

#[test]
fn weighted_weak_norm_of_the_extension_is_stable_under_refinement() {
    let coarse = lp_weak_ratio(2048, 2.0, 1.0);
    let fine = lp_weak_ratio(4096, 2.0, 1.0);
    assert!(coarse.is_finite() && coarse > 0.0);
    assert!(rel_err(fine, coarse) < 0.1, "{coarse} -> {fine}");
}

#[test]
fn ball_kernel_averages_over_balls() {
    let g = GridSpec::new(2, 32, 2.0).unwrap();
    let f = GridFunction::from_fn(g, |x| (2.0 * x[0]).sin() + x[1] * x[1]).unwrap();
    let levels = [1.0, 0.5, 0.3];
    let u = kernel_extend(&f, &Kernel::ball_indicator(), &levels).unwrap();
    let m = g.m as isize;
    let h = g.spacing();
    for (j, &t) in levels.iter().enumerate() {
        let k = (t / h).ceil() as isize + 1;
        for idx in (0..g.len()).step_by(7) {
            let [a, b] = g.axes(idx);
            let (mut sum, mut count) = (0.0, 0.0);
            for da in -k..=k {
                for db in -k..=k {
                    let d2 = ((da * da + db * db) as f64) * h * h;
                    if d2.sqrt() <= t * (1.0 + 1e-12) {
                        let i = (a as isize + da).rem_euclid(m) as usize;
                        let jj = (b as isize + db).rem_euclid(m) as usize;
                        sum += f.values()[i * g.m + jj];
                        count += 1.0;
                    }
                }
            }
            assert!((u.level(j)[idx] - sum / count).abs() < 1e-9);
        }
    }
}

#[test]
fn kernels_with_infinite_first_moment_are_rejected() {
    let g = GridSpec::new(1, 64, 4.0).unwrap();
    let f = gaussian(g, 1.0);
    let poisson = Kernel::radial("poisson", |r| 1.0 / (PI * (1.0 + r * r)));
    assert!(poisson.first_moment(1).is_err());
    assert!(kernel_extend(&f, &poisson, &[1.0]).is_err());
    let negative = Kernel::radial("negative", |r| if r < 1.0 { 1.0 - 2.0 * r } else { 0.0 });
    assert!(kernel_extend(&f, &negative, &[1.0]).is_err());
    let zero = Kernel::radial("zero", |_| 0.0);
    assert!(kernel_extend(&f, &zero, &[1.0]).is_err());
    let exponential = Kernel::radial("exp", |r| (-r).exp());
    assert!((exponential.first_moment(1).unwrap() - 4.0).abs() < 1e-6);
    assert!((Kernel::ball_indicator().first_moment(1).unwrap() - 3.0).abs() < 1e-6);
    assert!((Kernel::tent().first_moment(2).unwrap() - 2.0 * PI * (1.0 / 6.0 + 1.0 / 12.0)).abs() < 1e-6);
}

#[test]
fn kernel_t_derivative_matches_differences() {
    let g = GridSpec::new(1, 1024, 8.0).unwrap();
    let f = gaussian(g, 1.0);
    let kernel = Kernel::tent();
    for &t in &[0.5, 1.0, 2.0] {
        let d = 1e-3;
        let pair = kernel_extend(&f, &kernel, &[t * (1.0 + d), t * (1.0 - d)]).unwrap();
        let grad = kernel_gradient(&f, &kernel, t).unwrap();
        let dt = &grad[1];
        let scale = dt.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for idx in 0..g.len() {
            let fd = (pair.level(0)[idx] - pair.level(1)[idx]) / (2.0 * t * d);
            assert!((fd - dt.values()[idx]).abs() <= 0.01 * scale, "t={t}: {fd} vs {}", dt.values()[idx]);
        }
    }
}

#[test]
fn tent_extension_gradient_is_controlled_by_the_sobolev_norm() {
    let g = GridSpec::new(2, 64, 4.0).unwrap();
    let f = GridFunction::from_fn(g, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if r2 < 1.0 {
            (-1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    })
    .unwrap();
    let levels = geometric_levels(2.0, 8).unwrap();
    let norms = kernel_gradient_norms(&f, &Kernel::tent(), &levels, 2.0).unwrap();
    let sup = norms.iter().cloned().fold(0.0, f64::max);
    let w12 = f.lp_norm(2.0).unwrap() + f.gradient_lp_norm(2.0).unwrap();
    let c = sup / w12;
    assert!(c > 0.3 && c < 1.0, "constant {c}");
}

#[test]
fn csv_round_trips() {
    let g = GridSpec::new(2, 8, 1.5).unwrap();
    let f = GridFunction::from_fn(g, |x| x[0] * 0.1 + (x[1] * 7.3).sin()).unwrap();
    let mut buf = Vec::new();
    write_grid_csv(&f, &mut buf).unwrap();
    assert!(String::from_utf8(buf.clone()).unwrap().starts_with("n,m,L\n2,8,1.5\n"));
    assert_eq!(read_grid_csv(&buf[..]).unwrap(), f);

    let g1 = GridSpec::new(1, 8, 1.5).unwrap();
    let f1 = GridFunction::from_fn(g1, |x| x[0].exp()).unwrap();
    let mut buf = Vec::new();
    write_grid_csv(&f1, &mut buf).unwrap();
    assert_eq!(read_grid_csv(&buf[..]).unwrap(), f1);

    let field = poisson_extend_halfspace(&f, &[1.0, 0.5], 2.0).unwrap();
    let mut buf = Vec::new();
    write_field_csv(&field, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.lines().nth(2).unwrap() == "x_index,level,value,weight");
    assert_eq!(text.lines().count(), 3 + 2 * 64);
    assert_eq!(read_field_csv(&buf[..]).unwrap(), field);
}

#[test]
fn csv_errors_name_the_line() {
    let err = read_grid_csv("n,m,L\n1,4,1\n1\n2\nx\n4\n".as_bytes()).unwrap_err();
    assert!(err.to_string().contains(":5:"), "{err}");
    assert!(read_grid_csv("n,m\n".as_bytes()).is_err());
    assert!(read_grid_csv("n,m,L\n1,4,1\n1\n2\n".as_bytes()).is_err());
}
