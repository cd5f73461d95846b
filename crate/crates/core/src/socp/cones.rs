//! Cone algebra for the product of a non-negative orthant and second-order
//! cones: Jordan products, step lengths and Nesterov–Todd scaling.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Layout of a cone vector: `nonneg` orthant entries first, then one block
/// per second-order cone `{(u0, u1) : u0 ≥ ‖u1‖}` of the listed dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub nonneg: usize,
    pub soc: Vec<usize>,
}

impl ConeSpec {
    pub fn dim(&self) -> usize {
        self.nonneg + self.soc.iter().sum::<usize>()
    }

    /// Barrier degree: one per orthant entry and per second-order cone.
    pub fn degree(&self) -> usize {
        self.nonneg + self.soc.len()
    }

    /// Start offsets of the second-order blocks.
    pub fn soc_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.soc.len());
        let mut k = self.nonneg;
        for &d in &self.soc {
            off.push(k);
            k += d;
        }
        off
    }

    /// Identity element of the cone.
    pub fn identity(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.dim());
        for j in 0..self.nonneg {
            e[j] = 1.0;
        }
        for off in self.soc_offsets() {
            e[off] = 1.0;
        }
        e
    }

    /// Jordan product `u ∘ v`.
    pub fn product(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut w = DVector::zeros(self.dim());
        for j in 0..self.nonneg {
            w[j] = u[j] * v[j];
        }
        for (off, &d) in self.soc_offsets().iter().zip(&self.soc) {
            let uu = u.rows(*off, d);
            let vv = v.rows(*off, d);
            w[*off] = uu.dot(&vv);
            for k in 1..d {
                w[off + k] = uu[0] * vv[k] + vv[0] * uu[k];
            }
        }
        w
    }

    /// Solves `λ ∘ x = d` for `x` (λ in the interior).
    pub fn divide(&self, lambda: &DVector<f64>, d: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim());
        for j in 0..self.nonneg {
            x[j] = d[j] / lambda[j];
        }
        for (off, &dim) in self.soc_offsets().iter().zip(&self.soc) {
            let l = lambda.rows(*off, dim);
            let dd = d.rows(*off, dim);
            let l1 = l.rows(1, dim - 1);
            let d1 = dd.rows(1, dim - 1);
            let det = soc_det(&l.clone_owned());
            let x0 = (l[0] * dd[0] - l1.dot(&d1)) / det;
            x[*off] = x0;
            for k in 1..dim {
                x[off + k] = (dd[k] - x0 * l[k]) / l[0];
            }
        }
        x
    }

    /// Largest `α ≥ 0` (capped at `cap`) with `u + α·du` in the cone, for
    /// `u` in the interior.
    pub fn max_step(&self, u: &DVector<f64>, du: &DVector<f64>, cap: f64) -> f64 {
        let mut alpha = cap;
        for j in 0..self.nonneg {
            if du[j] < 0.0 {
                alpha = alpha.min(-u[j] / du[j]);
            }
        }
        for (off, &d) in self.soc_offsets().iter().zip(&self.soc) {
            let uu = u.rows(*off, d).clone_owned();
            let dd = du.rows(*off, d).clone_owned();
            alpha = alpha.min(soc_max_step(&uu, &dd, cap));
        }
        alpha.max(0.0)
    }

    /// `min` over blocks of the smallest eigenvalue; positive iff interior.
    pub fn min_eigenvalue(&self, u: &DVector<f64>) -> f64 {
        let mut m = f64::INFINITY;
        for j in 0..self.nonneg {
            m = m.min(u[j]);
        }
        for (off, &d) in self.soc_offsets().iter().zip(&self.soc) {
            let b = u.rows(*off, d);
            m = m.min(b[0] - b.rows(1, d - 1).norm());
        }
        m
    }
}

/// `u0² − ‖u1‖²`, evaluated as a product to keep precision near the boundary.
fn soc_det(u: &DVector<f64>) -> f64 {
    let n1 = u.rows(1, u.len() - 1).norm();
    (u[0] - n1) * (u[0] + n1)
}

fn soc_max_step(u: &DVector<f64>, du: &DVector<f64>, cap: f64) -> f64 {
    let d = u.len();
    let (u1, d1) = (u.rows(1, d - 1), du.rows(1, d - 1));
    let c = soc_det(u).max(0.0);
    let a = du[0] * du[0] - d1.norm_squared();
    let b = 2.0 * (u[0] * du[0] - u1.dot(&d1));
    let mut alpha = cap;
    if du[0] < 0.0 {
        alpha = alpha.min(-u[0] / du[0]);
    }
    // Smallest positive root of a·α² + b·α + c.
    let scale = a.abs().max(b.abs()).max(c);
    if a.abs() <= 1e-15 * scale {
        if b < 0.0 {
            alpha = alpha.min(-c / b);
        }
        return alpha;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return alpha;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    for root in [q / a, if q != 0.0 { c / q } else { f64::INFINITY }] {
        if root > 0.0 {
            alpha = alpha.min(root);
        }
    }
    alpha
}

/// Nesterov–Todd scaling `W` with `W·z = W⁻¹·s = λ`.
#[derive(Clone, Debug)]
pub struct Scaling {
    /// Orthant part: `sqrt(s/z)`.
    pub d: DVector<f64>,
    /// Per second-order block: `(β, v)` with `W = β(2vvᵀ − J)` and `vᵀJv = 1`.
    pub soc: Vec<(f64, DVector<f64>)>,
    pub lambda: DVector<f64>,
    spec: ConeSpec,
}

impl Scaling {
    pub fn identity(spec: &ConeSpec) -> Self {
        let soc = spec
            .soc
            .iter()
            .map(|&d| {
                let mut w = DVector::zeros(d);
                w[0] = 1.0;
                (1.0, w)
            })
            .collect();
        Scaling {
            d: DVector::from_element(spec.nonneg, 1.0),
            soc,
            lambda: spec.identity(),
            spec: spec.clone(),
        }
    }

    pub fn new(spec: &ConeSpec, s: &DVector<f64>, z: &DVector<f64>) -> Self {
        let mut d = DVector::zeros(spec.nonneg);
        let mut lambda = DVector::zeros(spec.dim());
        for j in 0..spec.nonneg {
            d[j] = (s[j] / z[j]).sqrt();
            lambda[j] = (s[j] * z[j]).sqrt();
        }
        let mut soc = Vec::with_capacity(spec.soc.len());
        for (off, &dim) in spec.soc_offsets().iter().zip(&spec.soc) {
            let sb = s.rows(*off, dim).clone_owned();
            let zb = z.rows(*off, dim).clone_owned();
            let sn = soc_det(&sb).sqrt();
            let zn = soc_det(&zb).sqrt();
            let sbar = &sb / sn;
            let zbar = &zb / zn;
            let gamma = (0.5 * (1.0 + sbar.dot(&zbar))).sqrt();
            let mut w = sbar.clone();
            w[0] += zbar[0];
            for k in 1..dim {
                w[k] -= zbar[k];
            }
            w /= 2.0 * gamma;
            // Hyperbolic Householder vector v with W̄ = 2vvᵀ − J (so W̄² = 2w̄w̄ᵀ − J).
            w[0] += 1.0;
            w /= (2.0 * w[0]).sqrt();
            let beta = (sn / zn).sqrt();
            let mut blk = Scaling::apply_block(beta, &w, &zb);
            // Numerically λ0 must dominate; recompute it from the invariant λᵀJλ = sn·zn.
            let l1 = blk.rows(1, dim - 1).norm_squared();
            blk[0] = (sn * zn + l1).sqrt();
            lambda.rows_mut(*off, dim).copy_from(&blk);
            soc.push((beta, w));
        }
        Scaling {
            d,
            soc,
            lambda,
            spec: spec.clone(),
        }
    }

    fn apply_block(beta: f64, w: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        // β(2w(wᵀv) − Jv)
        let wv = w.dot(v);
        let mut out = w * (2.0 * wv);
        out[0] -= v[0];
        for k in 1..v.len() {
            out[k] += v[k];
        }
        out * beta
    }

    fn apply_block_inv(beta: f64, w: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        // (1/β)(2Jw(wᵀJv) − Jv)
        let mut jv = v.clone();
        let mut jw = w.clone();
        for k in 1..v.len() {
            jv[k] = -jv[k];
            jw[k] = -jw[k];
        }
        let t = w.dot(&jv);
        (jw * (2.0 * t) - jv) / beta
    }

    /// `W·v`.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for j in 0..self.spec.nonneg {
            out[j] = self.d[j] * v[j];
        }
        for ((off, &dim), (beta, w)) in self
            .spec
            .soc_offsets()
            .iter()
            .zip(&self.spec.soc)
            .zip(&self.soc)
        {
            let b = Scaling::apply_block(*beta, w, &v.rows(*off, dim).clone_owned());
            out.rows_mut(*off, dim).copy_from(&b);
        }
        out
    }

    /// `W⁻¹·v`.
    pub fn apply_inv(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for j in 0..self.spec.nonneg {
            out[j] = v[j] / self.d[j];
        }
        for ((off, &dim), (beta, w)) in self
            .spec
            .soc_offsets()
            .iter()
            .zip(&self.spec.soc)
            .zip(&self.soc)
        {
            let b = Scaling::apply_block_inv(*beta, w, &v.rows(*off, dim).clone_owned());
            out.rows_mut(*off, dim).copy_from(&b);
        }
        out
    }

    /// Dense `W⁻²` of second-order block `k`.
    pub fn soc_inv_sq(&self, k: usize) -> DMatrix<f64> {
        let (beta, w) = &self.soc[k];
        let dim = w.len();
        let mut winv = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            let mut e = DVector::zeros(dim);
            e[c] = 1.0;
            winv.set_column(c, &Scaling::apply_block_inv(*beta, w, &e));
        }
        &winv * &winv
    }

    /// Diagonal of `W⁻²` on the orthant.
    pub fn nonneg_inv_sq(&self) -> DVector<f64> {
        self.d.map(|v| 1.0 / (v * v))
    }

    pub fn spec(&self) -> &ConeSpec {
        &self.spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec() -> ConeSpec {
        ConeSpec {
            nonneg: 2,
            soc: vec![3, 4],
        }
    }

    fn interior(seed: f64) -> DVector<f64> {
        let mut v = DVector::from_fn(9, |i, _| ((i as f64 + 1.0) * seed).sin());
        v[0] = v[0].abs() + 0.1;
        v[1] = v[1].abs() + 0.2;
        v[2] = v.rows(3, 2).norm() + 0.3;
        v[5] = v.rows(6, 3).norm() + 0.4;
        v
    }

    #[test]
    fn nt_scaling_identities() {
        let sp = spec();
        let s = interior(0.7);
        let z = interior(1.9);
        let w = Scaling::new(&sp, &s, &z);
        assert_relative_eq!(w.apply(&z), w.lambda, max_relative = 1e-12);
        assert_relative_eq!(w.apply_inv(&s), w.lambda, max_relative = 1e-12);
        assert_relative_eq!(w.apply_inv(&w.apply(&s)), s, max_relative = 1e-12);
        // λ∘λ has the same first components as s∘z on each block's trace.
        let ll = sp.product(&w.lambda, &w.lambda);
        let sz = sp.product(&s, &z);
        assert_relative_eq!(ll[0], sz[0], max_relative = 1e-12);
        assert_relative_eq!(ll[2], sz[2], max_relative = 1e-12);
    }

    #[test]
    fn division_inverts_product() {
        let sp = spec();
        let l = interior(0.3);
        let x = DVector::from_fn(9, |i, _| (i as f64 * 0.37).cos());
        let d = sp.product(&l, &x);
        assert_relative_eq!(sp.divide(&l, &d), x, max_relative = 1e-10);
    }

    #[test]
    fn step_reaches_boundary() {
        let sp = spec();
        let u = interior(0.5);
        let du = DVector::from_fn(9, |i, _| -((i as f64 + 2.0) * 0.9).cos().abs() - 0.5);
        let a = sp.max_step(&u, &du, 1e6);
        let v = &u + &du * a;
        assert!(sp.min_eigenvalue(&v).abs() < 1e-10);
        assert!(sp.min_eigenvalue(&(&u + &du * (0.999 * a))) > 0.0);
    }
}
