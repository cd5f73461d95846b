use nalgebra::{DMatrix, DVector};

use super::cones::Scaling;
use super::ConeProgram;

/// Solver for the interior-point Newton systems
///
/// ```text
/// [ 0  Aᵀ  Gᵀ  ] [x]   [bx]
/// [ A  0   0   ] [y] = [by]
/// [ G  0  −W²  ] [z]   [bz]
/// ```
///
/// Implementations return `(x, y)` of the reduced system
/// `GᵀW⁻²G·x + Aᵀy = bx + GᵀW⁻²·bz`, `A·x = by`; the caller recovers
/// `z = W⁻²(G·x − bz)`.
pub trait KktSolver {
    /// Prepares factorizations for the scaling `w`. Returns `false` if the
    /// system is numerically singular.
    fn factor(&mut self, prog: &ConeProgram, w: &Scaling) -> bool;

    fn solve_reduced(
        &self,
        prog: &ConeProgram,
        w: &Scaling,
        rhs_x: &DVector<f64>,
        by: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>);
}

/// Applies `W⁻²` to `v`.
pub fn apply_inv_sq(w: &Scaling, v: &DVector<f64>) -> DVector<f64> {
    w.apply_inv(&w.apply_inv(v))
}

/// Dense factorization of the reduced saddle-point system. Suitable for small
/// problems and as a reference for structured solvers.
#[derive(Default)]
pub struct DenseKkt {
    lu: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl DenseKkt {
    pub fn new() -> Self {
        DenseKkt { lu: None }
    }
}

impl KktSolver for DenseKkt {
    fn factor(&mut self, prog: &ConeProgram, w: &Scaling) -> bool {
        let n = prog.c.len();
        let p = prog.b.len();
        let g = prog.g.to_dense();
        let mut wg = DMatrix::zeros(g.nrows(), n);
        for c in 0..n {
            let col = g.column(c).clone_owned();
            wg.set_column(c, &w.apply_inv(&col));
        }
        let h = wg.transpose() * &wg;
        let mut k = DMatrix::zeros(n + p, n + p);
        k.view_mut((0, 0), (n, n)).copy_from(&h);
        if p > 0 {
            let a = prog.a.to_dense();
            k.view_mut((0, n), (n, p)).copy_from(&a.transpose());
            k.view_mut((n, 0), (p, n)).copy_from(&a);
        }
        let lu = k.lu();
        let ok = lu.is_invertible();
        self.lu = Some(lu);
        ok
    }

    fn solve_reduced(
        &self,
        prog: &ConeProgram,
        _w: &Scaling,
        rhs_x: &DVector<f64>,
        by: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>) {
        let n = prog.c.len();
        let p = prog.b.len();
        let mut rhs = DVector::zeros(n + p);
        rhs.rows_mut(0, n).copy_from(rhs_x);
        if p > 0 {
            rhs.rows_mut(n, p).copy_from(by);
        }
        let sol = self
            .lu
            .as_ref()
            .expect("factor must be called before solve")
            .solve(&rhs)
            .unwrap_or_else(|| DVector::from_element(n + p, f64::NAN));
        (sol.rows(0, n).clone_owned(), sol.rows(n, p).clone_owned())
    }
}
