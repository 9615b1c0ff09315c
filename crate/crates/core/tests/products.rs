use proptest::prelude::*;
use zhu_core::grade::GradeIndex;
use zhu_core::linalg::SparseVec;
use zhu_core::products::{circ_nm, delta_fn, epsilon_fn, star_bar, star_nmp};
use zhu_core::voa::{basis_upto, vacuum, Automorphism, FreeBoson, VertexAlgebra, VoaContext};

/// With `r = i2 - i3` and `s = i1 - i2` mod `T`, the exponents satisfy
/// `-1 + delta_{i1}(s) + delta_{i2}(T - s) = 0` and
/// `-1 + delta_{i1}(r) + delta_{i3}(T - r) = epsilon`.
#[test]
fn delta_epsilon_tables() {
    for t in 1..=6u32 {
        for i1 in 0..t {
            for i2 in 0..t {
                for i3 in 0..t {
                    let r = (i2 as i64 - i3 as i64).rem_euclid(t as i64) as u32;
                    let s = (i1 as i64 - i2 as i64).rem_euclid(t as i64) as u32;
                    assert_eq!(
                        -1 + delta_fn(i1, s, t) + delta_fn(i2, t - s, t),
                        0,
                        "T = {t}, (i1, i2) = ({i1}, {i2})"
                    );
                    assert_eq!(
                        -1 + delta_fn(i1, r, t) + delta_fn(i3, t - r, t),
                        epsilon_fn(i1, i2, i3, t),
                        "T = {t}, (i1, i2, i3) = ({i1}, {i2}, {i3})"
                    );
                }
            }
        }
        for i in 0..t {
            assert_eq!(delta_fn(i, t, t), 0);
            for r in 0..t {
                assert_eq!(delta_fn(i, r, t), (i >= r) as i64);
            }
        }
    }
}

fn grades(t: u32) -> Vec<GradeIndex> {
    (0..=2)
        .flat_map(|l| (0..t).map(move |i| GradeIndex::new(l, i, t)))
        .collect()
}

#[test]
fn vacuum_is_a_left_identity() {
    for aut in [Automorphism::Trivial, Automorphism::Theta] {
        let ctx = VoaContext::new(FreeBoson::new(aut));
        let alg = ctx.algebra();
        let one = vacuum(alg);
        let gs = grades(aut.order());
        for w in basis_upto(alg, 5) {
            let u = SparseVec::unit(w.clone());
            for m in &gs {
                for n in &gs {
                    assert_eq!(
                        star_bar(&ctx, &one, &u, m, n),
                        u,
                        "{aut:?}: 1 *bar_({m},{n}) {w}"
                    );
                }
            }
        }
    }
}

#[test]
fn star_vanishes_off_the_residue_condition() {
    let ctx = VoaContext::new(FreeBoson::new(Automorphism::Theta));
    let alg = ctx.algebra();
    let h = SparseVec::unit(alg.parse_word("h(-1)1").unwrap());
    let v = SparseVec::unit(alg.parse_word("h(-2)h(-1)1").unwrap());
    let gs = grades(2);
    for m in &gs {
        for p in &gs {
            for n in &gs {
                let prod = star_nmp(&ctx, &h, &v, m, p, n);
                if (p.i() + 2 - n.i()) % 2 != 1 {
                    assert!(prod.is_zero(), "h *_({m},{p})^{n} v");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Products are bilinear: the product of a sum is the sum of products.
    #[test]
    fn circ_and_star_are_bilinear(
        a in 0usize..7, b in 0usize..7, c in 0usize..7,
        m in 0i64..4, n in 0i64..4, p in 0i64..4,
    ) {
        let ctx = VoaContext::new(FreeBoson::new(Automorphism::Theta));
        let words = basis_upto(ctx.algebra(), 3);
        let (x, y, z) = (
            SparseVec::unit(words[a].clone()),
            SparseVec::unit(words[b].clone()),
            SparseVec::unit(words[c].clone()),
        );
        let (m, n, p) = (GradeIndex::from_units(m, 2), GradeIndex::from_units(n, 2), GradeIndex::from_units(p, 2));
        let yz = y.add(&z);
        prop_assert_eq!(
            circ_nm(&ctx, &x, &yz, &m, &n),
            circ_nm(&ctx, &x, &y, &m, &n).add(&circ_nm(&ctx, &x, &z, &m, &n))
        );
        prop_assert_eq!(
            star_nmp(&ctx, &yz, &x, &m, &p, &n),
            star_nmp(&ctx, &y, &x, &m, &p, &n).add(&star_nmp(&ctx, &z, &x, &m, &p, &n))
        );
    }
}
