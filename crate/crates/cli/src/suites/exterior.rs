//! Exact checks on flat torus models with random rational forms.

use hml_core::exterior::exact::{is_positive_real, is_zero, rat, ExactComplex};
use hml_core::exterior::{ConstantForm, KahlerModel};
use hml_core::Result;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Table, Value};

/// Random forms per bidegree.
pub const CASES: usize = 100;

/// Largest torus dimension checked.
pub const MAX_DIM: usize = 3;

fn random_coeff(rng: &mut ChaCha8Rng) -> ExactComplex {
    let re = rat(rng.random_range(-5..=5), rng.random_range(1..=4));
    let im = rat(rng.random_range(-5..=5), rng.random_range(1..=4));
    Complex::new(re, im)
}

fn random_form(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> ConstantForm {
    let v: Vec<_> = ConstantForm::basis(n, p, q).iter().map(|_| random_coeff(rng)).collect();
    ConstantForm::from_vector(n, p, q, &v)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BidegreeCounts {
    pub cases: usize,
    pub reconstruction_failures: usize,
    pub primitivity_failures: usize,
    pub norm_identity_failures: usize,
    pub positivity_checked: usize,
    pub positivity_failures: usize,
    pub orthogonality_checked: usize,
    pub orthogonality_failures: usize,
}

impl BidegreeCounts {
    pub fn pass(&self) -> bool {
        self.reconstruction_failures == 0
            && self.primitivity_failures == 0
            && self.norm_identity_failures == 0
            && self.positivity_failures == 0
            && self.orthogonality_failures == 0
    }
}

/// Runs every exact check on `cases` random forms of bidegree `(p, q)`.
pub fn check_bidegree(n: usize, p: usize, q: usize, cases: usize) -> Result<BidegreeCounts> {
    let m = KahlerModel::standard(n);
    let k = p + q;
    let mut rng = ChaCha8Rng::seed_from_u64((100 * n + 10 * p + q) as u64);
    let mut c = BidegreeCounts {
        cases,
        ..Default::default()
    };
    for case in 0..cases {
        let a = random_form(&mut rng, n, p, q);
        let d = m.lefschetz_decompose(&a)?;
        if m.reconstruct(&d)? != a {
            c.reconstruction_failures += 1;
        }
        for comp in &d.components {
            if !m.is_primitive(comp)? {
                c.primitivity_failures += 1;
            }
        }
        if !is_zero(&m.norm_identity_residual(&a)?) {
            c.norm_identity_failures += 1;
        }
        let phi = &d.components[0];
        if phi.is_zero() {
            continue;
        }
        c.positivity_checked += 1;
        if !is_positive_real(&m.hodge_inner(phi, phi)?) {
            c.positivity_failures += 1;
        }
        // a primitive partner of a non-dual bidegree
        let p2 = case % (k + 1);
        if p2 == q {
            continue;
        }
        let b = random_form(&mut rng, n, p2, k - p2);
        let psi = m.lefschetz_decompose(&b)?.components.remove(0);
        c.orthogonality_checked += 1;
        if !is_zero(&m.polarization_q(phi, &psi)?) {
            c.orthogonality_failures += 1;
        }
    }
    Ok(c)
}

pub fn bidegrees() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in 1..=MAX_DIM {
        for k in 0..=n {
            for p in (0..=k).rev() {
                out.push((n, p, k - p));
            }
        }
    }
    out
}

pub fn run(cases: usize) -> Table {
    let columns = [
        "n",
        "p",
        "q",
        "cases",
        "reconstruction_failures",
        "primitivity_failures",
        "norm_identity_failures",
        "positivity_checked",
        "positivity_failures",
        "orthogonality_checked",
        "orthogonality_failures",
        "error",
        "pass",
    ];
    let mut table = Table::new("exterior", columns.iter().map(|s| s.to_string()).collect());
    let results: Vec<_> = bidegrees()
        .into_par_iter()
        .map(|(n, p, q)| ((n, p, q), check_bidegree(n, p, q, cases)))
        .collect();
    for ((n, p, q), r) in results {
        let mut row: Vec<Value> = vec![n.into(), p.into(), q.into()];
        match r {
            Ok(c) => {
                row.extend([
                    c.cases.into(),
                    c.reconstruction_failures.into(),
                    c.primitivity_failures.into(),
                    c.norm_identity_failures.into(),
                    c.positivity_checked.into(),
                    c.positivity_failures.into(),
                    c.orthogonality_checked.into(),
                    c.orthogonality_failures.into(),
                    Value::Missing,
                    c.pass().into(),
                ]);
            }
            Err(e) => {
                row.push(cases.into());
                row.extend(std::iter::repeat_n(Value::Missing, 7));
                row.push(e.to_string().into());
                row.push(false.into());
            }
        }
        table.push(row);
    }
    table
}
