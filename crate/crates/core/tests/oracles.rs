//! Checks against values computed outside this crate (mpmath for Bessel
//! functions, scipy `expm` of the adjacency matrix for walk series).

use approx::assert_relative_eq;
use lightcone_core::bessel::bessel_i;
use lightcone_core::graph::count_walks;
use lightcone_core::lr::{c_chain_bessel, c_series, DEFAULT_SERIES_TERMS};
use lightcone_core::{Region, SpinGraph};

#[test]
fn bessel_matches_mpmath() {
    let cases = [
        (0, 0.5, 1.0634833707413235193),
        (1, 2.0, 1.5906368546373290634),
        (3, 4.0, 3.3372757784203443679),
        (10, 8.0, 1.1456174093591641522),
        (40, 40.0, 95753466.317139004279),
        (5, 0.1, 2.6052519298936976131e-9),
        (60, 100.0, 2.4691003858200678503e34),
        (0, 100.0, 1.0737517071310738235e42),
        (60, 1.0, 1.0466590847408165561e-100),
        (30, 50.0, 42749936497955948.984),
        (7, 0.001, 1.5500992547898074463e-27),
    ];
    for (order, x, expected) in cases {
        assert_relative_eq!(bessel_i(order, x), expected, max_relative = 1e-10);
    }
}

fn grid3(j: f64) -> SpinGraph {
    let mut edges = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let v = 3 * r + c;
            if c < 2 {
                edges.push((v, v + 1));
            }
            if r < 2 {
                edges.push((v, v + 3));
            }
        }
    }
    SpinGraph::new(vec![2; 9], edges, j, 0.0).unwrap()
}

/// Short walks contribute nothing, so the series equals
/// `2 sum_{x in X, y in Y} exp(2 J t A)_{yx}`.
#[test]
fn series_matches_matrix_exponential() {
    let chain = SpinGraph::chain(6, 1.0, 0.0).unwrap();
    let cycle = SpinGraph::new(vec![2; 7], (0..7).map(|i| (i, (i + 1) % 7)), 1.0, 0.0).unwrap();
    let cases: [(SpinGraph, &[usize], &[usize], f64, f64); 5] = [
        (chain.clone(), &[0], &[5], 0.3, 0.0013526102619175824),
        (chain, &[0], &[5], 0.8, 0.23583486650665353),
        (grid3(1.0), &[0], &[8], 0.2, 0.013499288766974355),
        (grid3(0.5), &[0, 1], &[7, 8], 0.4, 0.3433839492054072),
        (cycle, &[0], &[3], 0.25, 0.04981109086632671),
    ];
    for (g, x, y, t, expected) in cases {
        let x = Region::new(&g, x.iter().copied()).unwrap();
        let y = Region::new(&g, y.iter().copied()).unwrap();
        let c = c_series(&g, &x, &y, t, 1e-15, DEFAULT_SERIES_TERMS).unwrap();
        assert!(c.converged);
        assert_relative_eq!(c.value, expected, max_relative = 1e-12);
    }
}

#[test]
fn grid_walks_match_matrix_powers() {
    let g = grid3(1.0);
    let x = Region::single(&g, 0).unwrap();
    let y = Region::single(&g, 8).unwrap();
    let expected = [0, 0, 0, 0, 6, 0, 60, 0, 504];
    for (n, &e) in expected.iter().enumerate() {
        assert_eq!(count_walks(&g, &x, &y, n).unwrap().value(), e as f64);
    }
}

#[test]
fn finite_chain_series_below_bessel() {
    // Walks on a finite chain are a subset of those on the infinite chain.
    for l in [3, 6, 10] {
        let g = SpinGraph::chain(l, 1.0, 0.0).unwrap();
        let x = Region::single(&g, 0).unwrap();
        let y = Region::single(&g, l - 1).unwrap();
        for t in [0.05, 0.2, 0.5, 1.0] {
            let s = c_series(&g, &x, &y, t, 1e-14, DEFAULT_SERIES_TERMS).unwrap().value;
            let b = c_chain_bessel(1.0, t, l - 1).unwrap().value;
            assert!(s <= b * (1.0 + 1e-12), "L={l} t={t}: {s} > {b}");
        }
    }
}
