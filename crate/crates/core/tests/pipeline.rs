use weakfill_core::euclidean::{
    geometric_levels, halfspace_weak_norm, poisson_extend_halfspace, read_field_csv, write_field_csv, GridFunction,
    GridSpec,
};
use weakfill_core::filling::{build_filling, nearest_ball_map, FillingRecord, HyperbolicFilling};
use weakfill_core::metric_space::{load_space, make_space, MetricMeasureSpace, SpaceSpec};
use weakfill_core::sobolev::{ap_seminorm, hajlasz_seminorm, HajlaszOptions};
use weakfill_core::transfer::{edge_gradient, poisson_extend, trace, vertex_gradient};

fn bump(space: &MetricMeasureSpace, width: f64) -> Vec<f64> {
    (0..space.len())
        .map(|i| {
            let x = space.coords(i).unwrap();
            let c = 0.5 / std::f64::consts::SQRT_2;
            let r2 = (x[0] - c).powi(2) + (x[1] - c).powi(2);
            (-r2 / (2.0 * width * width)).exp()
        })
        .collect()
}

fn relative_l1(space: &MetricMeasureSpace, a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = space.mean(b);
    let centered: Vec<f64> = b.iter().map(|y| y - mean).collect();
    space.l1_norm(&diff) / space.l1_norm(&centered)
}

#[test]
fn trace_of_the_extension_improves_with_depth() {
    let space = make_space(&SpaceSpec::SquareGrid { m: 32 }).unwrap();
    let f = bump(&space, 0.15);
    let mut errors = Vec::new();
    for depth in 2..=space.max_depth() {
        let filling = build_filling(&space, depth, 0).unwrap();
        let u = poisson_extend(&space, &filling, &f).unwrap();
        let t = trace(&space, &filling, &u).unwrap();
        errors.push(relative_l1(&space, &t.values, &f));
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(*errors.last().unwrap() < 0.25, "{errors:?}");
}

#[test]
fn ap_and_hajlasz_seminorms_are_comparable() {
    let space = make_space(&SpaceSpec::SquareGrid { m: 16 }).unwrap();
    let filling = build_filling(&space, space.max_depth(), 3).unwrap();
    for width in [0.1, 0.2, 0.4] {
        let f = bump(&space, width);
        let ap = ap_seminorm(&space, &filling, &f, 2.0).unwrap();
        let sol = hajlasz_seminorm(&space, &f, 1.0, 2.0, &HajlaszOptions::default()).unwrap();
        let ratio = ap / sol.seminorm;
        assert!(ratio > 1.0 / 64.0 && ratio < 64.0, "width {width}: ratio {ratio}");
        assert!(sol.lower_bound <= sol.seminorm);
    }
}

#[test]
fn edge_and_vertex_gradients_agree_on_fillings() {
    let space = make_space(&SpaceSpec::SierpinskiCarpet { level: 3 }).unwrap();
    let filling = build_filling(&space, space.max_depth(), 1).unwrap();
    let f: Vec<f64> = (0..space.len()).map(|i| space.coords(i).unwrap()[0]).collect();
    let u = poisson_extend(&space, &filling, &f).unwrap();
    let du = edge_gradient(&filling, &u).unwrap();
    let dv = vertex_gradient(&filling, &u).unwrap();
    let edge_total: f64 = du.iter().map(|x| x.abs()).sum();
    let vertex_total: f64 = dv.iter().sum();
    assert!((2.0 * edge_total - vertex_total).abs() <= 1e-9 * vertex_total);
}

#[test]
fn filling_records_survive_json() {
    let space = make_space(&SpaceSpec::IntervalGrid { m: 200 }).unwrap();
    let filling = build_filling(&space, 5, 7).unwrap();
    let json = serde_json::to_string(&filling.to_record()).unwrap();
    let record: FillingRecord = serde_json::from_str(&json).unwrap();
    let back = HyperbolicFilling::from_record(&record, &space).unwrap();
    assert_eq!(back.to_record(), filling.to_record());
    let map = nearest_ball_map(&space, &filling, &back).unwrap();
    assert!(map.iter().enumerate().all(|(v, &w)| v == w));
}

#[test]
fn point_clouds_load_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cloud.txt");
    std::fs::write(&path, "# three points\n0 0 w=1\n1 0 w=2\n0 2 w=1\n").unwrap();
    let space = load_space(&path).unwrap();
    assert_eq!(space.len(), 3);
    assert!((space.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((space.dist(1, 2) - 1.0).abs() < 1e-12);
    std::fs::write(&path, "0 0\n1\n").unwrap();
    assert!(load_space(&path).is_err());
}

#[test]
fn halfspace_fields_round_trip_through_csv() {
    let grid = GridSpec::new(2, 16, 4.0).unwrap();
    let f = GridFunction::from_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
    let levels = geometric_levels(1.0, 3).unwrap();
    let u = poisson_extend_halfspace(&f, &levels, 1.0).unwrap();
    let mut buf = Vec::new();
    write_field_csv(&u, &mut buf).unwrap();
    let back = read_field_csv(buf.as_slice()).unwrap();
    assert_eq!(back, u);
    let weak = halfspace_weak_norm(&u, 2.0).unwrap();
    assert_eq!(halfspace_weak_norm(&back, 2.0).unwrap(), weak);
}
