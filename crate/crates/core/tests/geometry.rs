//! Exhaustive checks of the correspondence between upper triangular matrices
//! and big-cell degenerate flags on small fields.

use flagcode::codes::FlagRankCode;
use flagcode::flags::{
    d_max, flag_distance, flag_from_matrix, flag_rank, full_flag_distance, full_flag_distance_via_product,
    full_flag_from_matrix, matrix_from_flag, packed_len, UpperTriangular,
};
use flagcode::gf::FieldSpec;
use flagcode::linalg::{MatrixF, Subspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all(spec: &FieldSpec, n: usize) -> Vec<UpperTriangular> {
    let total = u128::from(spec.order()).pow(packed_len(n) as u32);
    (0..total).map(|i| UpperTriangular::from_index(spec, n, i)).collect()
}

fn random(spec: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> UpperTriangular {
    let entries = (0..packed_len(n)).map(|_| rng.gen_range(0..spec.order())).collect();
    UpperTriangular::from_packed(spec, n, entries).unwrap()
}

#[test]
fn distance_equals_flag_rank_of_difference_on_u3_f2() {
    let f2 = FieldSpec::prime(2).unwrap();
    let mats = all(&f2, 3);
    let flags: Vec<_> = mats.iter().map(flag_from_matrix).collect();
    for (a, fa) in mats.iter().zip(&flags) {
        for (b, fb) in mats.iter().zip(&flags) {
            assert_eq!(flag_distance(fa, fb).unwrap(), flag_rank(&a.sub(b).unwrap()), "{a} vs {b}");
        }
    }
}

#[test]
fn distance_equals_flag_rank_of_difference_on_random_u4_f3() {
    let f3 = FieldSpec::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x15_0e7);
    for _ in 0..2000 {
        let a = random(&f3, 4, &mut rng);
        let b = random(&f3, 4, &mut rng);
        let d = flag_distance(&flag_from_matrix(&a), &flag_from_matrix(&b)).unwrap();
        assert_eq!(d, flag_rank(&a.sub(&b).unwrap()));
    }
}

#[test]
fn extraction_inverts_the_parametrisation() {
    let f2 = FieldSpec::prime(2).unwrap();
    for a in all(&f2, 3) {
        assert_eq!(matrix_from_flag(&flag_from_matrix(&a)).unwrap(), a);
    }
    let f4 = FieldSpec::of_order(4).unwrap();
    for a in all(&f4, 2) {
        assert_eq!(matrix_from_flag(&flag_from_matrix(&a)).unwrap(), a);
    }
}

#[test]
fn parametrisation_is_injective_on_u3_f2() {
    let f2 = FieldSpec::prime(2).unwrap();
    let flags: std::collections::HashSet<_> = all(&f2, 3).iter().map(|a| flag_from_matrix(a).spaces().to_vec()).collect();
    assert_eq!(flags.len(), 64);
}

#[test]
fn full_flag_identities_on_u3_f2() {
    let f2 = FieldSpec::prime(2).unwrap();
    let mats = all(&f2, 3);
    let full: Vec<_> = mats.iter().map(full_flag_from_matrix).collect();
    let degenerate: Vec<_> = mats.iter().map(flag_from_matrix).collect();
    for i in 0..mats.len() {
        for j in 0..mats.len() {
            let (g, d) = (&mats[i], &mats[j]);
            assert_eq!(
                full_flag_distance(&full[i], &full[j]).unwrap(),
                full_flag_distance_via_product(g, d).unwrap(),
                "{g} vs {d}"
            );
            assert_eq!(flag_distance(&degenerate[i], &degenerate[j]).unwrap(), flag_rank(&g.sub(d).unwrap()));
        }
    }
}

#[test]
fn maximum_flag_rank_over_f2() {
    let f2 = FieldSpec::prime(2).unwrap();
    for (n, expected) in [(2, 2), (3, 4), (4, 6)] {
        let max = all(&f2, n).iter().map(flag_rank).max().unwrap();
        assert_eq!(max, expected, "n = {n}");
        assert_eq!(max, d_max(n + 1));
    }
}

#[test]
fn no_three_dimensional_code_in_u3_f2_reaches_distance_four() {
    let f2 = FieldSpec::prime(2).unwrap();
    let spaces = Subspace::enumerate(&f2, packed_len(3), 3);
    assert_eq!(spaces.len(), 1395);
    let best = spaces
        .iter()
        .map(|s| {
            let gens: Vec<_> = (0..3)
                .map(|r| UpperTriangular::from_packed(&f2, 3, s.basis().row(r).to_vec()).unwrap())
                .collect();
            FlagRankCode::new(&f2, 3, gens).unwrap().min_distance().unwrap()
        })
        .max()
        .unwrap();
    assert_eq!(best, 3);
}

#[test]
fn grassmann_distance_of_big_cell_members_is_rank_of_difference() {
    let f3 = FieldSpec::prime(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let i = rng.gen_range(1..4);
        let cols = 4 - i;
        let a = MatrixF::from_codes(&f3, i, cols, (0..i * cols).map(|_| rng.gen_range(0..3)).collect()).unwrap();
        let b = MatrixF::from_codes(&f3, i, cols, (0..i * cols).map(|_| rng.gen_range(0..3)).collect()).unwrap();
        let d = Subspace::from_big_cell(&a).grassmann_distance(&Subspace::from_big_cell(&b)).unwrap();
        assert_eq!(d, a.sub(&b).unwrap().rank());
    }
}
