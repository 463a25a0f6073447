mod common;

use proptest::prelude::*;
use sqrect::exact::to_f64;
use sqrect::grid::{GridComplex, TileId};
use sqrect::oracle::{brute_force_optimal, certify, enumerate_paths, DEFAULT_PATH_CAP};
use sqrect::solver::{solve_optimal, Normalization, SolveOptions};
use sqrect::weights::{exact_height, height};

fn exact_opts() -> SolveOptions {
    SolveOptions {
        exact: true,
        ..Default::default()
    }
}

#[test]
fn rectangle_law() {
    for cols in 1..=6i64 {
        for rows in 1..=6i64 {
            let c = GridComplex::rectangle(cols, rows).unwrap();
            let r = solve_optimal(&c, &SolveOptions::default()).unwrap();
            let expected = rows as f64 / cols as f64;
            assert!(
                (r.modulus - expected).abs() <= 1e-9,
                "{cols}x{rows}: {}",
                r.modulus
            );
            for w in r.rho.values() {
                assert!((w - 1.0 / rows as f64).abs() <= 1e-8);
            }
            let e = solve_optimal(&c, &exact_opts()).unwrap().exact.unwrap();
            assert_eq!(to_f64(&e.modulus), expected);
        }
    }
}

#[test]
fn single_tile() {
    let c = GridComplex::rectangle(1, 1).unwrap();
    let r = solve_optimal(&c, &SolveOptions::default()).unwrap();
    assert_eq!(r.rho.values(), &[1.0]);
    assert_eq!(r.modulus, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn matches_exhaustive_oracle(c in common::quadrilateral(10)) {
        let r = solve_optimal(&c, &SolveOptions::default()).unwrap();
        let b = brute_force_optimal(&c, DEFAULT_PATH_CAP).unwrap();
        prop_assert!((r.modulus - b.modulus).abs() <= 1e-8, "{} vs {}", r.modulus, b.modulus);
        for (x, y) in r.rho.values().iter().zip(b.rho.values()) {
            prop_assert!((x - y).abs() <= 1e-7);
        }
    }

    #[test]
    fn every_path_is_long_enough(c in common::quadrilateral(10)) {
        let r = solve_optimal(&c, &SolveOptions::default()).unwrap();
        let h = height(&c, &r.rho);
        prop_assert!((h - 1.0).abs() <= 1e-12);
        prop_assert!((r.modulus - h * h / r.area).abs() <= 1e-12);
        for path in enumerate_paths(&c, DEFAULT_PATH_CAP).unwrap() {
            let len: f64 = path.iter().map(|&i| r.rho.values()[i]).sum();
            prop_assert!(len >= h - 1e-9);
        }
        prop_assert!(certify(&c, &r).passed(1e-8));
    }

    #[test]
    fn normalizations_are_proportional(c in common::quadrilateral(10)) {
        let one = solve_optimal(&c, &exact_opts()).unwrap();
        let int = solve_optimal(&c, &SolveOptions { normalization: Normalization::Integer, ..exact_opts() }).unwrap();
        let (a, b) = (one.rho.exact().unwrap(), int.rho.exact().unwrap());
        prop_assert_eq!(exact_height(&c, a), sqrect::exact::int(1));
        prop_assert!(b.iter().all(|v| v.is_integer()));
        let scale = exact_height(&c, b);
        for (x, y) in a.iter().zip(b) {
            prop_assert_eq!(x * &scale, y.clone());
        }
        prop_assert_eq!(one.exact.unwrap().modulus, int.exact.unwrap().modulus);
    }

    #[test]
    fn translation_does_not_change_weights(c in common::quadrilateral(10), dx in -5i64..5, dy in -5i64..5) {
        let moved: Vec<TileId> = c.tiles().iter().map(|t| TileId::new(t.col + dx, t.row + dy)).collect();
        let corners = c.corners().map(|v| sqrect::Vertex::new(v.x + dx, v.y + dy));
        let d = GridComplex::new(moved, corners).unwrap();
        let r = solve_optimal(&c, &exact_opts()).unwrap();
        let s = solve_optimal(&d, &exact_opts()).unwrap();
        prop_assert_eq!(r.rho.exact(), s.rho.exact());
    }
}
