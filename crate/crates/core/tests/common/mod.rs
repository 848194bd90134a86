//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use fatf::freewords::Word;
use fatf::intlat::{ivec, kernel_lattice, IntMatrix};
use fatf::{Ambient, FreeMap, GroupElement, Morphism};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn w(s: &str) -> Word {
    s.parse().unwrap()
}

pub fn el(t: &[i64], s: &str) -> GroupElement {
    GroupElement::new(ivec(t), w(s))
}

pub fn random_word(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Word {
    if n == 0 {
        return Word::identity();
    }
    let len = rng.gen_range(0..=max_len);
    Word::reduce((0..len).map(|_| {
        let k = rng.gen_range(1..=n as i32);
        if rng.gen_bool(0.5) {
            k
        } else {
            -k
        }
    }))
}

pub fn random_vector(rng: &mut ChaCha8Rng, m: usize, c: i64) -> Vec<BigInt> {
    (0..m)
        .map(|_| BigInt::from(rng.gen_range(-c..=c)))
        .collect()
}

pub fn random_element(rng: &mut ChaCha8Rng, amb: Ambient, max_len: usize, c: i64) -> GroupElement {
    GroupElement::new(
        random_vector(rng, amb.m, c),
        random_word(rng, amb.n, max_len),
    )
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, c: i64) -> IntMatrix {
    IntMatrix::new(
        cols,
        (0..rows).map(|_| random_vector(rng, cols, c)).collect(),
    )
    .unwrap()
}

pub fn signed_permutation_matrix(perm: &[usize], signs: &[i32]) -> IntMatrix {
    let m = perm.len();
    let mut q = IntMatrix::zeros(m, m);
    for i in 0..m {
        q.set(i, perm[i], signs[i].into());
    }
    q
}

pub fn random_signed_permutation(rng: &mut ChaCha8Rng, k: usize) -> (Vec<usize>, Vec<i32>) {
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(rng);
    let signs = (0..k)
        .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    (perm, signs)
}

/// Product of elementary row operations: a random matrix in `GL_m(Z)`, with
/// its inverse.
pub fn random_unimodular(rng: &mut ChaCha8Rng, m: usize, steps: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    if m < 2 {
        if m == 1 && rng.gen_bool(0.5) {
            u = IntMatrix::from_i64(1, &[&[-1]]);
            u_inv = u.clone();
        }
        return (u, u_inv);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let c: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut e = IntMatrix::identity(m);
        e.set(i, j, c.into());
        let mut e_inv = IntMatrix::identity(m);
        e_inv.set(i, j, (-c).into());
        u = e.mul(&u).unwrap();
        u_inv = u_inv.mul(&e_inv).unwrap();
    }
    (u, u_inv)
}

/// Random automorphism of `F_n`: a signed permutation followed by up to
/// `steps` elementary Nielsen maps.
pub fn random_free_automorphism(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> FreeMap {
    let (perm, signs) = random_signed_permutation(rng, n);
    let mut theta = FreeMap::signed_permutation(&perm, &signs).unwrap();
    if n < 2 {
        return theta;
    }
    for _ in 0..rng.gen_range(0..=steps) {
        let i = rng.gen_range(1..=n);
        let mut j = rng.gen_range(1..n);
        if j >= i {
            j += 1;
        }
        let e = if rng.gen_bool(0.5) { 1 } else { -1 };
        let nielsen = FreeMap::nielsen(n, i, j, e, rng.gen_bool(0.5)).unwrap();
        theta = theta.compose(&nielsen).unwrap();
    }
    theta
}

/// Random `P` with `Σ_{i<r} A^i P Q^{r-1-i} = 0`: an integer combination of a
/// kernel basis of that linear map on `n x m` matrices.
pub fn random_finite_order_twist(
    rng: &mut ChaCha8Rng,
    a: &IntMatrix,
    q: &IntMatrix,
    r: u64,
) -> IntMatrix {
    let (n, m) = (a.rows(), q.rows());
    if n == 0 || m == 0 {
        return IntMatrix::zeros(n, m);
    }
    let mut images = Vec::new();
    for row in 0..n {
        for col in 0..m {
            let mut e = IntMatrix::zeros(n, m);
            e.set(row, col, 1.into());
            let mut total = IntMatrix::zeros(n, m);
            for i in 0..r {
                let term = a
                    .pow(i)
                    .unwrap()
                    .mul(&e)
                    .unwrap()
                    .mul(&q.pow(r - 1 - i).unwrap())
                    .unwrap();
                total = total.add(&term).unwrap();
            }
            images.push(total.into_rows().concat());
        }
    }
    let t = IntMatrix::new(n * m, images).unwrap();
    let ker = kernel_lattice(&t);
    let mut flat = vec![BigInt::from(0); n * m];
    for b in ker.basis_rows() {
        let c: i64 = rng.gen_range(-2..=2);
        for (f, x) in flat.iter_mut().zip(b) {
            *f += x * c;
        }
    }
    IntMatrix::new(m, flat.chunks(m).map(|r| r.to_vec()).collect()).unwrap()
}

/// A finite-order automorphism together with a free basis of `Fix φ`.
pub struct FiniteOrderCase {
    pub psi: Morphism,
    pub fix_phi: Vec<Word>,
    pub expected_order: u64,
}

/// `Θ^{-1} Ψ_0 Θ` with `Ψ_0 = (σ, Q_0, P_0)` for signed permutations `σ`, `Q_0`,
/// a twist `P_0` keeping `Ψ_0^r = Id`, and a random `Θ = (θ, U, R)`. Its order
/// is that of `Ψ_0`, and `Fix φ = (Fix σ)θ`.
pub fn random_finite_order(rng: &mut ChaCha8Rng, amb: Ambient) -> FiniteOrderCase {
    let (m, n) = (amb.m, amb.n);
    let (sp, ss) = random_signed_permutation(rng, n);
    let sigma = FreeMap::signed_permutation(&sp, &ss).unwrap();
    let (qp, qs) = random_signed_permutation(rng, m);
    let q0 = signed_permutation_matrix(&qp, &qs);
    let order0 = Morphism::new(amb, sigma.clone(), q0.clone(), IntMatrix::zeros(n, m))
        .unwrap()
        .order()
        .unwrap()
        .finite()
        .unwrap();
    let p0 = random_finite_order_twist(rng, &sigma.abelianization_matrix(), &q0, order0);
    let psi0 = Morphism::new(amb, sigma.clone(), q0, p0).unwrap();

    let theta = random_free_automorphism(rng, n, 3);
    let (u, _) = random_unimodular(rng, m, 4);
    let r = random_matrix(rng, n, m, 2);
    let big_theta = Morphism::new(amb, theta.clone(), u, r).unwrap();
    let psi = big_theta
        .invert()
        .unwrap()
        .compose(&psi0)
        .unwrap()
        .compose(&big_theta)
        .unwrap();

    let fix_phi = (1..=n as u32)
        .map(Word::generator)
        .filter(|z| sigma.apply(z) == *z)
        .map(|z| theta.apply(&z))
        .collect();
    let expected_order = psi0.order().unwrap().finite().unwrap();
    FiniteOrderCase {
        psi,
        fix_phi,
        expected_order,
    }
}

/// 2x2 companion matrices of `Φ_3`, `Φ_4`, `Φ_6`.
pub fn rotation_block(rng: &mut ChaCha8Rng) -> IntMatrix {
    match rng.gen_range(0..3) {
        0 => IntMatrix::from_i64(2, &[&[0, -1], &[1, -1]]),
        1 => IntMatrix::from_i64(2, &[&[0, -1], &[1, 0]]),
        _ => IntMatrix::from_i64(2, &[&[0, -1], &[1, 1]]),
    }
}

/// Random finite-order `Q` in `GL_m(Z)`: a block-diagonal matrix of `±1` and
/// rotation blocks (or a signed permutation), conjugated by a unimodular
/// matrix.
pub fn random_finite_order_matrix(rng: &mut ChaCha8Rng, m: usize) -> IntMatrix {
    let base = if rng.gen_bool(0.3) {
        let (p, s) = random_signed_permutation(rng, m);
        signed_permutation_matrix(&p, &s)
    } else {
        let mut q = IntMatrix::zeros(m, m);
        let mut i = 0;
        while i < m {
            if i + 1 < m && rng.gen_bool(0.5) {
                let b = rotation_block(rng);
                for r in 0..2 {
                    for c in 0..2 {
                        q.set(i + r, i + c, b.get(r, c).clone());
                    }
                }
                i += 2;
            } else {
                q.set(i, i, if rng.gen_bool(0.5) { 1 } else { -1 }.into());
                i += 1;
            }
        }
        q
    };
    let (u, u_inv) = random_unimodular(rng, m, 5);
    u_inv.mul(&base).unwrap().mul(&u).unwrap()
}

/// Random endomorphism with short generator images.
pub fn random_morphism(rng: &mut ChaCha8Rng, amb: Ambient, img_len: usize, c: i64) -> Morphism {
    let images = (0..amb.n)
        .map(|_| random_word(rng, amb.n, img_len))
        .collect();
    Morphism::new(
        amb,
        FreeMap::new(images, None).unwrap(),
        random_matrix(rng, amb.m, amb.m, c),
        random_matrix(rng, amb.n, amb.m, c),
    )
    .unwrap()
}

pub fn example_psi() -> Morphism {
    Morphism::new(
        Ambient::new(2, 3),
        FreeMap::inversion(3, 1).unwrap(),
        IntMatrix::from_i64(2, &[&[1, 0], &[0, -1]]),
        IntMatrix::from_i64(2, &[&[1, 0], &[0, 1], &[0, 2]]),
    )
    .unwrap()
}

pub fn flip_psi() -> Morphism {
    Morphism::new(
        Ambient::new(1, 2),
        FreeMap::signed_permutation(&[0, 1], &[-1, -1]).unwrap(),
        IntMatrix::from_i64(1, &[&[-1]]),
        IntMatrix::from_i64(1, &[&[1], &[0]]),
    )
    .unwrap()
}
