use std::collections::{HashSet, VecDeque};
use std::f64::consts::TAU;

use levy_liouville::structure::{compare_groups, hnf_contains, hnf_lattice, reduce_lattice, GroupDescriptor};
use proptest::prelude::*;

/// Points of the lattice spanned by `gens` reachable from 0 by unit steps
/// `±g` inside `[−r, r]ⁿ`. Every point found is a genuine lattice point.
fn reachable(gens: &[Vec<i64>], dim: usize, r: i64) -> HashSet<Vec<i64>> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    let origin = vec![0i64; dim];
    seen.insert(origin.clone());
    queue.push_back(origin);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            for s in [1i64, -1] {
                let q: Vec<i64> = p.iter().zip(g).map(|(a, b)| a + s * b).collect();
                if q.iter().all(|v| v.abs() <= r) && !seen.contains(&q) {
                    seen.insert(q.clone());
                    queue.push_back(q);
                }
            }
        }
    }
    seen
}

fn in_box(set: &HashSet<Vec<i64>>, b: i64) -> HashSet<Vec<i64>> {
    set.iter().filter(|p| p.iter().all(|v| v.abs() <= b)).cloned().collect()
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of all maximal minors, the covolume of a full-rank integer lattice.
fn minor_gcd(gens: &[Vec<i64>], dim: usize) -> i64 {
    let k = gens.len();
    let mut out = 0;
    let mut pick = vec![0usize; dim];
    fn rec(start: usize, depth: usize, pick: &mut Vec<usize>, k: usize, gens: &[Vec<i64>], out: &mut i64) {
        if depth == pick.len() {
            let m: Vec<Vec<i64>> = (0..pick.len()).map(|i| pick.iter().map(|&c| gens[c][i]).collect()).collect();
            *out = gcd(*out, det(&m));
            return;
        }
        for c in start..k {
            pick[depth] = c;
            rec(c + 1, depth + 1, pick, k, gens, out);
        }
    }
    rec(0, 0, &mut pick, k, gens, &mut out);
    out
}

fn generator_set() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=3, 1usize..=4).prop_flat_map(|(dim, k)| {
        (Just(dim), proptest::collection::vec(proptest::collection::vec(-5i64..=5, dim), k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hnf_matches_brute_force_membership((dim, gens) in generator_set()) {
        let h = hnf_lattice(&gens);
        let reach = h.iter().flatten().chain(gens.iter().flatten()).map(|v| v.abs()).max().unwrap_or(0) + 6;
        let from_input = reachable(&gens, dim, reach.max(12));
        let from_hnf = reachable(&h, dim, reach.max(12));

        for g in &gens {
            prop_assert!(from_hnf.contains(g), "input {g:?} not generated by {h:?}");
            prop_assert!(hnf_contains(&h, g));
        }
        for c in &h {
            prop_assert!(from_input.contains(c), "hnf column {c:?} not generated by {gens:?}");
        }
        prop_assert_eq!(in_box(&from_input, 6), in_box(&from_hnf, 6));

        // echelon shape: positive pivots, reduced entries left of each pivot
        let mut last_pivot = None;
        for (j, c) in h.iter().enumerate() {
            let p = c.iter().position(|&v| v != 0).unwrap();
            prop_assert!(c[p] > 0);
            prop_assert!(last_pivot.map_or(true, |q| p > q));
            last_pivot = Some(p);
            for left in &h[..j] {
                prop_assert!(left[p] >= 0 && left[p] < c[p]);
            }
        }

        if h.len() == dim {
            let pivots: i64 = h.iter().enumerate().map(|(j, c)| c[j]).product();
            prop_assert_eq!(pivots, minor_gcd(&gens, dim));
        }
    }

    #[test]
    fn orthogonal_is_involutive_on_full_rank_lattices(
        entries in proptest::collection::vec(-3.0f64..3.0, 9),
        dim in 1usize..=3,
    ) {
        let gens: Vec<Vec<f64>> = (0..dim).map(|j| (0..dim).map(|i| entries[3 * j + i] + if i == j { 4.0 } else { 0.0 }).collect()).collect();
        let g = GroupDescriptor { dim, subspace_basis: vec![], lattice_generators: reduce_lattice(&gens, 1e-9).unwrap(), exact: false };
        let back = g.orthogonal().orthogonal();
        prop_assert!(back.subspace_basis.is_empty());
        let cmp = compare_groups(&g, &back, 1e-9);
        prop_assert!(cmp.equal, "{cmp:?}");
        for v in &gens {
            prop_assert!(back.distance(v) < 1e-9);
        }
    }
}

#[test]
fn hnf_of_redundant_planar_set() {
    let h = hnf_lattice(&[vec![2i64, 0], vec![0, 2], vec![1, 1]]);
    assert_eq!(h, vec![vec![1, 1], vec![0, 2]]);
    assert!(hnf_contains(&h, &[3, 1]));
    assert!(!hnf_contains(&h, &[1, 0]));
}

#[test]
fn reduction_merges_rational_dependencies() {
    let r = reduce_lattice(&[vec![2.0], vec![3.0]], 1e-9).unwrap();
    assert_eq!(r.len(), 1);
    assert!((r[0][0] - 1.0).abs() < 1e-12);
    assert!(reduce_lattice(&[vec![1.0], vec![std::f64::consts::SQRT_2]], 1e-9).is_none());
}

#[test]
fn orthogonal_examples() {
    let zero = GroupDescriptor::trivial(2);
    assert!(zero.orthogonal().is_full_space());
    assert!(GroupDescriptor::full(2).orthogonal().is_trivial());
    let two_pi = GroupDescriptor { dim: 1, subspace_basis: vec![], lattice_generators: vec![vec![TAU]], exact: false };
    let o = two_pi.orthogonal();
    assert!((o.lattice_generators[0][0] - 1.0).abs() < 1e-12);
}
