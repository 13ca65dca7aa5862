//! Finite-difference complex Hessians `∂_α ∂̄_β f` of real functions on `C^m`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{cz, CMatrix};

/// Default step relative to the family's local scale.
pub const DEFAULT_REL_STEP: f64 = 1e-2;

/// Step used when the local scale vanishes.
pub const STEP_FLOOR: f64 = 1e-6;

/// Step `rel · scale`. An absolute floor would exceed the distance to the
/// boundary point near a degeneration, so it only replaces a zero scale.
pub fn step_for(rel: f64, scale: f64) -> f64 {
    if scale > 0.0 && scale.is_finite() {
        rel * scale
    } else {
        STEP_FLOOR
    }
}

type Offset = Vec<(i8, i8)>;

struct Stencil<'a, F> {
    f: &'a F,
    t: &'a [Complex64],
    h: f64,
    cache: BTreeMap<Offset, Vec<f64>>,
}

impl<F> Stencil<'_, F>
where
    F: Fn(&[Complex64]) -> Result<Vec<f64>>,
{
    fn at(&mut self, off: Offset) -> Result<Vec<f64>> {
        if let Some(v) = self.cache.get(&off) {
            return Ok(v.clone());
        }
        let p: Vec<Complex64> = self
            .t
            .iter()
            .zip(&off)
            .map(|(z, &(a, b))| z + cz(a as f64 * self.h, b as f64 * self.h))
            .collect();
        let v = (self.f)(&p)?;
        self.cache.insert(off, v.clone());
        Ok(v)
    }

    fn shifted(&self, moves: &[(usize, i8, i8)]) -> Offset {
        let mut off = vec![(0i8, 0i8); self.t.len()];
        for &(c, a, b) in moves {
            off[c].0 += a;
            off[c].1 += b;
        }
        off
    }

    /// Second derivative along real directions `(c1, d1)` and `(c2, d2)`,
    /// where `d = 0` is the real axis and `d = 1` the imaginary axis.
    fn second(&mut self, c1: usize, d1: u8, c2: usize, d2: u8) -> Result<Vec<f64>> {
        let dir = |d: u8, s: i8| if d == 0 { (s, 0) } else { (0, s) };
        let h2 = self.h * self.h;
        if c1 == c2 && d1 == d2 {
            let (a, b) = dir(d1, 1);
            let plus = self.shifted(&[(c1, a, b)]);
            let minus = self.shifted(&[(c1, -a, -b)]);
            let fp = self.at(plus)?;
            let fm = self.at(minus)?;
            let f0 = self.at(self.shifted(&[]))?;
            return Ok((0..f0.len()).map(|i| (fp[i] - 2.0 * f0[i] + fm[i]) / h2).collect());
        }
        let mut acc: Option<Vec<f64>> = None;
        for (s1, s2, w) in [(1i8, 1i8, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)] {
            let (a1, b1) = dir(d1, s1);
            let (a2, b2) = dir(d2, s2);
            let v = self.at(self.shifted(&[(c1, a1, b1), (c2, a2, b2)]))?;
            let acc = acc.get_or_insert_with(|| vec![0.0; v.len()]);
            for (x, y) in acc.iter_mut().zip(v) {
                *x += w * y / (4.0 * h2);
            }
        }
        Ok(acc.unwrap_or_default())
    }

    fn hessians(&mut self) -> Result<Vec<CMatrix>> {
        let m = self.t.len();
        let len = self.at(self.shifted(&[]))?.len();
        let mut out = vec![CMatrix::zeros(m, m); len];
        for al in 0..m {
            for be in al..m {
                let xx = self.second(al, 0, be, 0)?;
                let yy = self.second(al, 1, be, 1)?;
                let (xy, yx) = if al == be {
                    (vec![0.0; len], vec![0.0; len])
                } else {
                    (self.second(al, 0, be, 1)?, self.second(al, 1, be, 0)?)
                };
                for i in 0..len {
                    let v = cz(0.25 * (xx[i] + yy[i]), 0.25 * (xy[i] - yx[i]));
                    out[i][(al, be)] = v;
                    out[i][(be, al)] = v.conj();
                }
            }
        }
        Ok(out)
    }
}

fn hessians_at<F>(f: &F, t: &[Complex64], h: f64) -> Result<Vec<CMatrix>>
where
    F: Fn(&[Complex64]) -> Result<Vec<f64>>,
{
    Stencil {
        f,
        t,
        h,
        cache: BTreeMap::new(),
    }
    .hessians()
}

/// `∂_α ∂̄_β f_i` for each component of a vector of real functions, by
/// central differences at steps `h` and `h/2` combined as `(4 D(h/2) − D(h))/3`.
pub fn ddbar_many<F>(f: &F, t: &[Complex64], h: f64) -> Result<Vec<CMatrix>>
where
    F: Fn(&[Complex64]) -> Result<Vec<f64>>,
{
    let coarse = hessians_at(f, t, h)?;
    let fine = hessians_at(f, t, h / 2.0)?;
    Ok(coarse
        .into_iter()
        .zip(fine)
        .map(|(c, f)| (f * cz(4.0, 0.0) - c) * cz(1.0 / 3.0, 0.0))
        .collect())
}

/// Scalar version of [`ddbar_many`].
pub fn ddbar<F>(f: &F, t: &[Complex64], h: f64) -> Result<CMatrix>
where
    F: Fn(&[Complex64]) -> Result<f64>,
{
    let g = |p: &[Complex64]| f(p).map(|v| vec![v]);
    Ok(ddbar_many(&g, t, h)?.remove(0))
}
