use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sommerfeld_core::eikonal::EikonalField;
use sommerfeld_core::grid::{gradient_complex, norm3};
use sommerfeld_core::norms::{
    gradient_split, n_norm, radiation_functional, triple_norm, weighted_source_norm,
};
use sommerfeld_core::Grid3;

fn grid() -> Grid3 {
    Grid3::centered(16, 0.3)
}

/// Sum of complex Gaussians `a exp(-|x - c|^2 / w^2)`.
fn blobs(grid: &Grid3, params: &[(f64, f64, [f64; 3], f64)]) -> Vec<C64> {
    grid.sample(|x| {
        params
            .iter()
            .map(|&(re, im, c, w)| {
                let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                C64::new(re, im) * (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (w * w)).exp()
            })
            .sum()
    })
}

fn blob() -> impl Strategy<Value = (f64, f64, [f64; 3], f64)> {
    (-2.0f64..2.0, -2.0f64..2.0, prop::array::uniform3(-2.0f64..2.0), 0.4f64..1.2)
}

/// `u` cut to the ball `|x| <= 1` and the annulus `2 <= |x| <= 4`, the dyadic pieces of `N_1`.
fn dyadic_support(grid: &Grid3, u: Vec<C64>) -> Vec<C64> {
    u.into_iter()
        .enumerate()
        .map(|(i, v)| {
            let r = grid.radius_at(i);
            if r <= 1.0 || (2.0..=4.0).contains(&r) {
                v
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn functionals_are_homogeneous(ps in prop::collection::vec(blob(), 1..4), cr in -3.0f64..3.0, ci in -3.0f64..3.0) {
        let g = grid();
        let u = blobs(&g, &ps);
        let c = C64::new(cr, ci);
        let cu: Vec<C64> = u.iter().map(|v| v * c).collect();
        let t = triple_norm(&g, &u, 1.0);
        prop_assert!((triple_norm(&g, &cu, 1.0) - c.norm() * t).abs() <= 1e-10 * (1.0 + c.norm() * t));
        let n = n_norm(&g, &u, 1.0).unwrap().value;
        prop_assert!((n_norm(&g, &cu, 1.0).unwrap().value - c.norm() * n).abs() <= 1e-10 * (1.0 + c.norm() * n));

        let field = EikonalField::spherical(&g);
        let grad = gradient_complex(&g, &u);
        let cgrad = gradient_complex(&g, &cu);
        let a = radiation_functional(&u, &grad, &field, 4.0, 1.5, 4.0, false).unwrap();
        let b = radiation_functional(&cu, &cgrad, &field, 4.0, 1.5, 4.0, false).unwrap();
        prop_assert!((b - c.norm_sqr() * a).abs() <= 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn triple_norm_is_monotone(ps in prop::collection::vec(blob(), 1..4), extra in 0.0f64..1.0) {
        let g = grid();
        let u = blobs(&g, &ps);
        // |v| >= |u| pointwise
        let v: Vec<C64> = u.iter().enumerate().map(|(i, z)| z * (1.0 + extra * (i % 7) as f64 / 7.0)).collect();
        prop_assert!(triple_norm(&g, &v, 1.0) >= triple_norm(&g, &u, 1.0));
    }

    #[test]
    fn n_norm_is_subadditive_on_disjoint_supports(ps in prop::collection::vec(blob(), 1..3), qs in prop::collection::vec(blob(), 1..3), cut in 0.5f64..3.5) {
        let g = grid();
        let a = blobs(&g, &ps);
        let b = blobs(&g, &qs);
        let f: Vec<C64> = (0..g.len()).map(|i| if g.radius_at(i) < cut { a[i] } else { C64::new(0.0, 0.0) }).collect();
        let h: Vec<C64> = (0..g.len()).map(|i| if g.radius_at(i) >= cut { b[i] } else { C64::new(0.0, 0.0) }).collect();
        let sum: Vec<C64> = f.iter().zip(&h).map(|(x, y)| x + y).collect();
        let lhs = n_norm(&g, &sum, 1.0).unwrap().value;
        let rhs = n_norm(&g, &f, 1.0).unwrap().value + n_norm(&g, &h, 1.0).unwrap().value;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn duality_bound_holds(ps in prop::collection::vec(blob(), 1..4), qs in prop::collection::vec(blob(), 1..4)) {
        let g = grid();
        let u = blobs(&g, &ps);
        let v = dyadic_support(&g, blobs(&g, &qs));
        let pairing = g.integrate_complex(|i| u[i] * v[i].conj()).norm();
        let bound = triple_norm(&g, &u, 1.0) * n_norm(&g, &v, 1.0).unwrap().value;
        prop_assert!(pairing <= bound * (1.0 + 1e-12), "{pairing} > {bound}");
    }

    #[test]
    fn gradient_split_is_pythagorean(ps in prop::collection::vec(blob(), 1..4)) {
        let g = grid();
        let u = blobs(&g, &ps);
        let grad = gradient_complex(&g, &u);
        let field = EikonalField::spherical(&g);
        let nodes: Vec<usize> = (0..g.len()).filter(|&i| g.radius_at(i) > 0.0).collect();
        let split = gradient_split(&grad, &field, &nodes).unwrap();
        for (j, &i) in nodes.iter().enumerate() {
            let full: f64 = (0..3).map(|a| grad[a][i].norm_sqr()).sum();
            let parts = split.radial[j].norm_sqr() + split.tangential[j].iter().map(|t| t.norm_sqr()).sum::<f64>();
            prop_assert!((full - parts).abs() <= 1e-12 * (1.0 + full));
        }
    }
}

#[test]
fn moving_the_source_out_increases_the_moment() {
    let g = Grid3::centered(40, 0.1);
    let at = |c: [f64; 3]| g.sample(|x| if norm3([x[0] - c[0], x[1] - c[1], x[2] - c[2]]) <= 1.0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let centred = weighted_source_norm(&g, &at([0.0; 3]), 3.0);
    let shifted = weighted_source_norm(&g, &at([1.5, 0.0, 0.0]), 3.0);
    assert!(shifted > centred);
}
