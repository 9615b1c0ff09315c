use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zhu_core::linalg::{intersect_spans, quotient_coordinates, Matrix, SpanBasis, SparseVec};
use zhu_core::scalar::int;

/// Rank by fraction-free elimination over i128.
fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let (n, m) = (a.len(), a.first().map_or(0, |r| r.len()));
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..m {
        let Some(piv) = (rank..n).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..n {
            for c in col + 1..m {
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    rank
}

fn random_system(rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let rows = rng.gen_range(1..8);
    let cols = rng.gen_range(1..9);
    let density = rng.gen_range(0.15..0.7);
    let mut out: Vec<Vec<i64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.gen_bool(density) {
                        rng.gen_range(-4..=4)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    // plant a dependent row now and then
    if rows > 2 && rng.gen_bool(0.5) {
        let (a, b) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let dep: Vec<i64> = (0..cols).map(|j| a * out[0][j] + b * out[1][j]).collect();
        out.push(dep);
    }
    out
}

fn sparse(row: &[i64]) -> SparseVec<usize> {
    row.iter()
        .enumerate()
        .filter(|(_, x)| **x != 0)
        .map(|(j, x)| (j, int(*x)))
        .collect()
}

fn matrix(rows: &[Vec<i64>]) -> Matrix {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|x| int(*x)).collect())
            .collect(),
    )
    .unwrap()
}

#[test]
fn seeded_systems_rank_kernel_and_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240501);
    for case in 0..200 {
        let rows = random_system(&mut rng);
        let cols = rows[0].len();
        let mut span = SpanBasis::new();
        for r in &rows {
            span.insert(&sparse(r));
        }
        let expected = bareiss_rank(&rows);
        assert_eq!(span.rank(), expected, "case {case}: echelon rank");

        let a = matrix(&rows);
        assert_eq!(a.rank(), expected, "case {case}: dense rank");
        assert_eq!(
            a.transpose().rank(),
            expected,
            "case {case}: row rank = column rank"
        );
        let kernel = a.kernel();
        assert_eq!(kernel.len() + expected, cols, "case {case}: rank + nullity");
        for k in &kernel {
            let col = Matrix::from_columns(cols, std::slice::from_ref(k));
            assert!(a.mul(&col).is_zero(), "case {case}: kernel vector");
        }

        // a random combination of the rows is certified and recombines
        let coeffs: Vec<i64> = rows.iter().map(|_| rng.gen_range(-5..=5)).collect();
        let mut x = SparseVec::new();
        for (r, c) in rows.iter().zip(&coeffs) {
            x.axpy(&int(*c), &sparse(r));
        }
        let cert = span
            .membership_certificate(&x)
            .expect("combination is in the span");
        assert_eq!(span.recombine(&cert), x, "case {case}: recombination");

        // a kernel vector is orthogonal to every row and nonzero, so it is
        // outside the row space
        if let Some(k) = kernel.first() {
            let probe: SparseVec<usize> = k
                .iter()
                .cloned()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            assert!(
                span.membership_certificate(&probe).is_none(),
                "case {case}: outsider"
            );
        }
    }
}

#[test]
fn quotient_coordinates_of_a_plane_modulo_a_line() {
    let ambient = {
        let mut s = SpanBasis::new();
        s.insert(&sparse(&[1, 0, 0]));
        s.insert(&sparse(&[0, 1, 0]));
        s
    };
    let mut sub = SpanBasis::new();
    sub.insert(&sparse(&[1, 1, 0]));
    let c = quotient_coordinates(&sparse(&[3, 1, 0]), &ambient, &sub).unwrap();
    assert_eq!(c.len(), 1);
    // (3, 1) = (1, 1) + 2 (1, 0), and (0, 1) = (1, 1) - (1, 0)
    let d = quotient_coordinates(&sparse(&[0, 1, 0]), &ambient, &sub).unwrap();
    assert_eq!(c[0].clone(), -d[0].clone() * int(2));
    assert!(quotient_coordinates(&sparse(&[0, 0, 1]), &ambient, &sub).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn intersection_is_contained_in_both(
        a in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 1..5),
        b in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 1..5),
    ) {
        let sa = { let mut s = SpanBasis::new(); for r in &a { s.insert(&sparse(r)); } s };
        let sb = { let mut s = SpanBasis::new(); for r in &b { s.insert(&sparse(r)); } s };
        let both = intersect_spans(&sa, &sb);
        for row in both.rows() {
            prop_assert!(sa.contains(row));
            prop_assert!(sb.contains(row));
        }
        // dim(A + B) + dim(A n B) = dim A + dim B
        let mut sum = sa.clone();
        for row in sb.rows() { sum.insert(row); }
        prop_assert_eq!(sum.rank() + both.rank(), sa.rank() + sb.rank());
    }

    #[test]
    fn reduction_is_idempotent_and_linear(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 6), 1..6),
        x in prop::collection::vec(-4i64..=4, 6),
        y in prop::collection::vec(-4i64..=4, 6),
    ) {
        let mut s = SpanBasis::new();
        for r in &rows { s.insert(&sparse(r)); }
        let (x, y) = (sparse(&x), sparse(&y));
        let rx = s.reduce(&x);
        prop_assert_eq!(s.reduce(&rx), rx.clone());
        prop_assert_eq!(s.reduce(&x.add(&y)), rx.add(&s.reduce(&y)));
        prop_assert!(s.contains(&x.sub(&rx)));
    }
}
