mod common;

use common::*;
use fatf::intlat::{
    coset_reps, elementary_divisors, hnf, image_lattice, kernel_lattice, lattice_index,
    lattice_preimage, matrix_order, solve_left, Index, IntMatrix, Lattice, Order,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, c: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-c..=c, cols), rows).prop_map(move |rs| {
        IntMatrix::new(
            cols,
            rs.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .unwrap()
    })
}

fn lattice(dim: usize) -> impl Strategy<Value = Lattice> {
    (0..=dim + 1)
        .prop_flat_map(move |k| matrix(k, dim, 4))
        .prop_map(|m| hnf(&m))
}

fn vector(dim: usize, c: i64) -> impl Strategy<Value = Vec<BigInt>> {
    prop::collection::vec(-c..=c, dim).prop_map(|v| v.into_iter().map(BigInt::from).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn hnf_is_canonical(m in matrix(3, 3, 5), seed in any::<u64>()) {
        let a = hnf(&m);
        let (u, _) = random_unimodular(&mut rng(seed), 3, 6);
        prop_assert_eq!(hnf(&u.mul(&m).unwrap()), a.clone());
        prop_assert_eq!(Lattice::from_generators(3, a.basis_rows().to_vec()).unwrap(), a.clone());
        for row in m.row_vecs() {
            prop_assert!(a.contains(row).unwrap());
        }
    }

    #[test]
    fn sum_and_intersection(a in lattice(3), b in lattice(3), v in vector(3, 6)) {
        let s = a.sum(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        prop_assert!(a.is_subset(&s).unwrap() && b.is_subset(&s).unwrap());
        prop_assert!(i.is_subset(&a).unwrap() && i.is_subset(&b).unwrap());
        prop_assert_eq!(s.rank() + i.rank(), a.rank() + b.rank());
        prop_assert_eq!(i.contains(&v).unwrap(), a.contains(&v).unwrap() && b.contains(&v).unwrap());
    }

    #[test]
    fn reduction_is_a_coset_invariant(a in lattice(3), v in vector(3, 8), seed in any::<u64>()) {
        let r = a.reduce(&v).unwrap();
        let diff: Vec<BigInt> = v.iter().zip(&r).map(|(x, y)| x - y).collect();
        prop_assert!(a.contains(&diff).unwrap());
        let mut g = rng(seed);
        let shifted = a.basis_rows().iter().fold(v.clone(), |acc, row| {
            let c = BigInt::from(rand::Rng::gen_range(&mut g, -3..=3));
            acc.iter().zip(row).map(|(x, y)| x + &c * y).collect()
        });
        prop_assert_eq!(a.reduce(&shifted).unwrap(), r);
    }

    #[test]
    fn index_counts_cosets(m in matrix(2, 2, 4)) {
        let sub = hnf(&m);
        let full = Lattice::full(2);
        match lattice_index(&sub, &full).unwrap() {
            Index::Finite(k) => {
                let reps = coset_reps(&sub, &full).unwrap();
                prop_assert_eq!(BigInt::from(reps.len()), BigInt::from(k.clone()));
                prop_assert!(reps[0].iter().all(|x| x.is_zero()));
                for (x, rx) in reps.iter().enumerate() {
                    for ry in &reps[x + 1..] {
                        let d: Vec<BigInt> = rx.iter().zip(ry).map(|(p, q)| p - q).collect();
                        prop_assert!(!sub.contains(&d).unwrap());
                    }
                }
                let det: BigInt = elementary_divisors(&m).iter().product();
                prop_assert_eq!(BigInt::from(k), det);
            }
            Index::Infinite => prop_assert!(sub.rank() < 2),
        }
    }

    #[test]
    fn kernel_and_image(m in matrix(4, 3, 3)) {
        let k = kernel_lattice(&m);
        for row in k.basis_rows() {
            prop_assert!(m.left_mul(row).unwrap().iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(k.rank() + image_lattice(&m).rank(), 4);
        let full = Lattice::full(4);
        prop_assert_eq!(lattice_preimage(&full, &m, &Lattice::zero(3)).unwrap(), k);
    }

    #[test]
    fn preimage_maps_into_target(m in matrix(3, 2, 3), t in lattice(2), v in vector(3, 4)) {
        let pre = lattice_preimage(&Lattice::full(3), &m, &t).unwrap();
        prop_assert_eq!(pre.contains(&v).unwrap(), t.contains(&m.left_mul(&v).unwrap()).unwrap());
    }

    #[test]
    fn solve_left_solves(m in matrix(3, 3, 3), v in vector(3, 3)) {
        let b = m.left_mul(&v).unwrap();
        let x = solve_left(&m, &b).unwrap().expect("b is in the row space");
        prop_assert_eq!(m.left_mul(&x).unwrap(), b);
    }

    #[test]
    fn matrix_order_is_exact(seed in any::<u64>(), m in 1usize..=4) {
        let q = random_finite_order_matrix(&mut rng(seed), m);
        let Order::Finite(k) = matrix_order(&q).unwrap() else {
            return Err(TestCaseError::fail("finite-order matrix reported infinite"));
        };
        prop_assert!(q.pow(k).unwrap().is_identity());
        for j in 1..k {
            prop_assert!(!q.pow(j).unwrap().is_identity());
        }
    }

    #[test]
    fn unipotent_matrices_have_infinite_order(c in 1i64..=5) {
        let q = IntMatrix::from_i64(2, &[&[1, c], &[0, 1]]);
        prop_assert_eq!(matrix_order(&q).unwrap(), Order::Infinite);
    }

    #[test]
    fn unimodular_inverse(seed in any::<u64>()) {
        let (u, u_inv) = random_unimodular(&mut rng(seed), 3, 8);
        prop_assert_eq!(u.inverse_unimodular().unwrap(), u_inv.clone());
        prop_assert!(u.mul(&u_inv).unwrap().is_identity());
        let d = elementary_divisors(&u);
        prop_assert!(d.iter().all(|x| x.is_one()));
    }
}
