//! Independent oracles for the exact exterior model: forms are expanded into
//! real coordinates `dz_j = dx_j + i dy_j` and multiplied with the
//! permutation-sum formula for alternating forms, then integrated against
//! `dx_1 ∧ dy_1 ∧ ... ∧ dx_n ∧ dy_n` (the volume form `ω_std^n / n!`).

use std::collections::BTreeMap;

use hml_core::exterior::exact::{cint, cone, czero, is_positive_real, is_zero, rat, ExactComplex};
use hml_core::exterior::{mask_indices, ConstantForm, KahlerModel};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Alternating form on `R^{2n}` keyed by strictly increasing generator tuples.
#[derive(Clone, Debug, Default)]
struct RealForm {
    terms: BTreeMap<Vec<usize>, ExactComplex>,
}

fn perm_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

impl RealForm {
    fn degree(&self) -> usize {
        self.terms.keys().next().map_or(0, Vec::len)
    }

    /// Value on an ordered tuple of generators (antisymmetric extension).
    fn eval(&self, tuple: &[usize]) -> ExactComplex {
        let mut idx: Vec<usize> = (0..tuple.len()).collect();
        idx.sort_by_key(|&i| tuple[i]);
        let sorted: Vec<usize> = idx.iter().map(|&i| tuple[i]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return czero();
        }
        let c = self.terms.get(&sorted).cloned().unwrap_or_else(czero);
        c * cint(perm_sign(&idx), 0)
    }

    fn add_term(&mut self, key: Vec<usize>, c: ExactComplex) {
        let e = self.terms.entry(key).or_insert_with(czero);
        *e += c;
    }

    /// `(α∧β)(v) = 1/(k! l!) Σ_σ sgn σ α(v_σ(1..k)) β(v_σ(k+1..))` on every sorted tuple.
    fn wedge(&self, other: &RealForm, dim: usize) -> RealForm {
        let (k, l) = (self.degree(), other.degree());
        let mut out = RealForm::default();
        let fact = |m: usize| (1..=m as i64).product::<i64>().max(1);
        let norm = cint(fact(k) * fact(l), 0);
        let perms = permutations(k + l);
        for combo in combinations(dim, k + l) {
            let mut acc = czero();
            for sigma in &perms {
                let v: Vec<usize> = sigma.iter().map(|&s| combo[s]).collect();
                let a = self.eval(&v[..k]);
                if is_zero(&a) {
                    continue;
                }
                let b = other.eval(&v[k..]);
                acc += a * b * cint(perm_sign(sigma), 0);
            }
            if !is_zero(&acc) {
                out.add_term(combo, acc / norm.clone());
            }
        }
        out
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Real 1-form for `dz_j` (holomorphic) or `dz̄_j`.
fn one_form(j: usize, holomorphic: bool) -> RealForm {
    let mut f = RealForm::default();
    f.add_term(vec![2 * j], cone());
    f.add_term(vec![2 * j + 1], if holomorphic { cint(0, 1) } else { cint(0, -1) });
    f
}

fn scalar(c: ExactComplex) -> RealForm {
    let mut f = RealForm::default();
    f.add_term(vec![], c);
    f
}

/// Expand a complex-coordinate constant form into real coordinates.
fn to_real(form: &ConstantForm) -> RealForm {
    let n = form.n();
    let mut total = RealForm::default();
    for (&(i, j), c) in form.terms() {
        let mut acc = scalar(c.clone());
        for a in mask_indices(i) {
            acc = acc.wedge(&one_form(a - 1, true), 2 * n);
        }
        for b in mask_indices(j) {
            acc = acc.wedge(&one_form(b - 1, false), 2 * n);
        }
        for (k, v) in acc.terms {
            total.add_term(k, v);
        }
    }
    total
}

fn real_integral(f: &RealForm, n: usize) -> ExactComplex {
    let top: Vec<usize> = (0..2 * n).collect();
    f.terms.get(&top).cloned().unwrap_or_else(czero)
}

fn oracle_q(a: &ConstantForm, b: &ConstantForm, n: usize) -> ExactComplex {
    let k = a.degree();
    let omega = to_real(KahlerModel::standard(n).kahler_form());
    let mut acc = to_real(a).wedge(&to_real(b), 2 * n);
    for _ in 0..(n - k) {
        acc = acc.wedge(&omega, 2 * n);
    }
    real_integral(&acc, n)
}

fn random_coeff(rng: &mut ChaCha8Rng) -> ExactComplex {
    let re = rat(rng.random_range(-5..=5), rng.random_range(1..=4));
    let im = rat(rng.random_range(-5..=5), rng.random_range(1..=4));
    Complex::new(re, im)
}

fn random_form(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> ConstantForm {
    let basis = ConstantForm::basis(n, p, q);
    let v: Vec<_> = basis.iter().map(|_| random_coeff(rng)).collect();
    ConstantForm::from_vector(n, p, q, &v)
}

#[test]
fn wedge_matches_permutation_sum_on_surfaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 2;
    for _ in 0..10 {
        let a = random_form(&mut rng, n, 1, 1);
        let b = random_form(&mut rng, n, 1, 1);
        let w = a.wedge(&b).unwrap();
        // compare in real coordinates: both sides expanded independently
        let lhs = to_real(&w);
        let rhs = to_real(&a).wedge(&to_real(&b), 2 * n);
        assert_eq!(real_integral(&lhs, n), real_integral(&rhs, n));
    }
}

#[test]
fn wedge_matches_permutation_sum_mixed_degrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 3;
    let a = random_form(&mut rng, n, 1, 1);
    let b = random_form(&mut rng, n, 1, 0);
    let lhs = to_real(&a.wedge(&b).unwrap());
    let rhs = to_real(&a).wedge(&to_real(&b), 2 * n);
    for (key, v) in &rhs.terms {
        let got = lhs.terms.get(key).cloned().unwrap_or_else(czero);
        assert_eq!(&got, v, "coefficient {key:?}");
    }
}

#[test]
fn integration_matches_real_coordinates() {
    // ∫ dz ∧ dz̄ = -2i ∫ dx ∧ dy = -2i on the unit-volume elliptic curve
    let m = KahlerModel::standard(1);
    let dz = ConstantForm::monomial(1, &[1], &[], cone()).unwrap();
    let q = m.polarization_q(&dz, &dz.conj()).unwrap();
    assert_eq!(q, cint(0, -2));
    assert_eq!(q, oracle_q(&dz, &dz.conj(), 1));
}

#[test]
fn polarization_matches_oracle_on_random_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=3 {
        let m = KahlerModel::standard(n);
        for k in 0..=n {
            for p in 0..=k {
                let a = random_form(&mut rng, n, p, k - p);
                let b = random_form(&mut rng, n, k - p, p);
                assert_eq!(
                    m.polarization_q(&a, &b).unwrap(),
                    oracle_q(&a, &b, n),
                    "n={n} p={p} k={k}"
                );
            }
        }
    }
}

#[test]
fn hodge_inner_explicit_value() {
    // dz1 ∧ dz̄2 on the standard surface: primitive, inner product 4
    let m = KahlerModel::standard(2);
    let a = ConstantForm::monomial(2, &[1], &[2], cone()).unwrap();
    let oracle = oracle_q(&a, &a.conj(), 2);
    // ε_2 i^0 = -1
    assert_eq!(-oracle.clone(), cint(4, 0));
    assert_eq!(m.hodge_inner(&a, &a).unwrap(), -oracle);
    assert!(is_zero(&m.hodge_inner(&ConstantForm::zero(2, 1, 1), &a).unwrap()));
}

#[test]
fn primitive_surface_class_is_killed_by_l() {
    let m = KahlerModel::standard(2);
    let eta = ConstantForm::monomial(2, &[1], &[2], cint(2, 1)).unwrap();
    assert!(m.lefschetz_l(&eta).unwrap().is_zero());
    assert!(m.is_primitive(&eta).unwrap());
}

/// Random primitive form: primitive part of a random form.
fn random_primitive(rng: &mut ChaCha8Rng, m: &KahlerModel, p: usize, q: usize) -> ConstantForm {
    loop {
        let a = random_form(rng, m.n(), p, q);
        let phi0 = m.lefschetz_decompose(&a).unwrap().components.remove(0);
        if !phi0.is_zero() {
            return phi0;
        }
        if ConstantForm::basis(m.n(), p, q).is_empty() {
            return phi0;
        }
    }
}

#[test]
fn decomposition_reconstructs_and_is_primitive() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for n in 1..=3 {
        let m = KahlerModel::standard(n);
        for k in 0..=n {
            for p in 0..=k {
                for _ in 0..100 {
                    let a = random_form(&mut rng, n, p, k - p);
                    let d = m.lefschetz_decompose(&a).unwrap();
                    assert_eq!(m.reconstruct(&d).unwrap(), a);
                    for c in &d.components {
                        assert!(m.is_primitive(c).unwrap());
                    }
                    assert!(is_zero(&m.norm_identity_residual(&a).unwrap()));
                }
            }
        }
    }
}

#[test]
fn riemann_hodge_relations_on_random_primitives() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in 1..=3 {
        let m = KahlerModel::standard(n);
        for k in 0..=n {
            for p1 in 0..=k {
                let a = random_primitive(&mut rng, &m, p1, k - p1);
                if a.is_zero() {
                    continue;
                }
                let h = m.hodge_inner(&a, &a).unwrap();
                assert!(is_positive_real(&h), "n={n} ({p1},{}) gave {h:?}", k - p1);
                for p2 in 0..=k {
                    let b = random_primitive(&mut rng, &m, p2, k - p2);
                    if p1 != k - p2 {
                        assert!(is_zero(&m.polarization_q(&a, &b).unwrap()));
                    }
                }
            }
        }
    }
}

#[test]
fn norm_identity_on_non_standard_kahler_class() {
    let h = vec![
        vec![cint(2, 0), Complex::new(rat(1, 2), rat(1, 3)), czero()],
        vec![Complex::new(rat(1, 2), rat(-1, 3)), cint(3, 0), cint(0, 1)],
        vec![czero(), cint(0, -1), cint(2, 0)],
    ];
    let m = KahlerModel::from_hermitian(h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for (p, q) in [(1, 1), (2, 1), (1, 0), (0, 0), (1, 2)] {
        for _ in 0..5 {
            let a = random_form(&mut rng, 3, p, q);
            assert!(is_zero(&m.norm_identity_residual(&a).unwrap()));
            let d = m.lefschetz_decompose(&a).unwrap();
            assert_eq!(m.reconstruct(&d).unwrap(), a);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn q_is_graded_symmetric(seed in any::<u64>(), n in 1usize..=3, kp in 0usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = KahlerModel::standard(n);
        let k = kp % (n + 1);
        let p = rng.random_range(0..=k);
        let a = random_form(&mut rng, n, p, k - p);
        let b = random_form(&mut rng, n, k - p, p);
        let sign = if k % 2 == 0 { cone() } else { -cone() };
        prop_assert_eq!(m.polarization_q(&a, &b).unwrap(), m.polarization_q(&b, &a).unwrap() * sign);
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_form(&mut rng, 3, 1, 0);
        let b = random_form(&mut rng, 3, 1, 1);
        let c = random_form(&mut rng, 3, 0, 1);
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
        prop_assert_eq!(a.wedge(&c).unwrap(), c.wedge(&a).unwrap().scale(&cint(-1, 0)));
    }
}
