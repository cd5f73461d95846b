//! Homogeneous self-dual primal-dual interior-point method with
//! Nesterov–Todd scaling and Mehrotra predictor-corrector steps.

use nalgebra::DVector;

use super::cones::Scaling;
use super::kkt::{apply_inv_sq, KktSolver};
use super::{ConeProgram, ConeSolution, SolverSettings, SolverStatus};

struct Newton<'a, K: KktSolver> {
    prog: &'a ConeProgram,
    kkt: &'a K,
    w: &'a Scaling,
}

impl<K: KktSolver> Newton<'_, K> {
    fn solve_once(
        &self,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let rhs_x = bx + self.prog.g.tr_mul_vec(&apply_inv_sq(self.w, bz));
        let (x, y) = self.kkt.solve_reduced(self.prog, self.w, &rhs_x, by);
        let z = apply_inv_sq(self.w, &(self.prog.g.mul_vec(&x) - bz));
        (x, y, z)
    }

    fn residual(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let p = self.prog;
        let rx = bx - p.a.tr_mul_vec(y) - p.g.tr_mul_vec(z);
        let ry = by - p.a.mul_vec(x);
        let rz = bz - (p.g.mul_vec(x) - self.w.apply(&self.w.apply(z)));
        (rx, ry, rz)
    }

    /// Solves the full system with a few rounds of iterative refinement.
    fn solve(
        &self,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let (mut x, mut y, mut z) = self.solve_once(bx, by, bz);
        let scale = 1.0 + bx.amax().max(by.amax()).max(bz.amax());
        let (mut rx, mut ry, mut rz) = self.residual(&x, &y, &z, bx, by, bz);
        let mut err = rx.amax().max(ry.amax()).max(rz.amax());
        for _ in 0..3 {
            if !(err > 1e-14 * scale) {
                break;
            }
            let (dx, dy, dz) = self.solve_once(&rx, &ry, &rz);
            let (nx, ny, nz) = (&x + dx, &y + dy, &z + dz);
            let (nrx, nry, nrz) = self.residual(&nx, &ny, &nz, bx, by, bz);
            let nerr = nrx.amax().max(nry.amax()).max(nrz.amax());
            if !(nerr < err) {
                break;
            }
            x = nx;
            y = ny;
            z = nz;
            rx = nrx;
            ry = nry;
            rz = nrz;
            err = nerr;
        }
        (x, y, z)
    }
}

fn norm(v: &DVector<f64>) -> f64 {
    v.norm()
}

pub(super) fn solve_homogeneous<K: KktSolver>(
    prog: &ConeProgram,
    kkt: &mut K,
    settings: &SolverSettings,
) -> ConeSolution {
    let spec = &prog.cones;
    let n = prog.c.len();
    let p = prog.b.len();
    let m = spec.dim();
    let e = spec.identity();
    let degree = spec.degree() as f64;
    let (nc, nb, nh) = (
        norm(&prog.c).max(1.0),
        norm(&prog.b).max(1.0),
        norm(&prog.h).max(1.0),
    );

    let failure = |status: SolverStatus, iterations: usize| ConeSolution {
        status,
        x: DVector::zeros(n),
        y: DVector::zeros(p),
        z: DVector::zeros(m),
        s: DVector::zeros(m),
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        gap: f64::NAN,
        iterations,
    };

    // Starting point from two least-squares solves with W = I.
    let w0 = Scaling::identity(spec);
    if !kkt.factor(prog, &w0) {
        return failure(SolverStatus::NumericalError, 0);
    }
    let newton = Newton {
        prog,
        kkt: &*kkt,
        w: &w0,
    };
    let (mut x, _, zp) = newton.solve(&DVector::zeros(n), &prog.b, &prog.h);
    let mut s = -zp;
    let (_, mut y, mut z) = newton.solve(&(-&prog.c), &DVector::zeros(p), &DVector::zeros(m));
    let shift = |u: &mut DVector<f64>| {
        let deficit = -spec.min_eigenvalue(u);
        if deficit >= -1e-8 * u.norm().max(1.0) {
            *u += &e * (1.0 + deficit);
        }
    };
    shift(&mut s);
    shift(&mut z);
    let mut tau = 1.0;
    let mut kappa = 1.0;

    let mut iterations = 0;
    loop {
        // Residuals of the homogeneous embedding.
        let rx = prog.a.tr_mul_vec(&y) + prog.g.tr_mul_vec(&z) + &prog.c * tau;
        let ry = -prog.a.mul_vec(&x) + &prog.b * tau;
        let rz = &s + prog.g.mul_vec(&x) - &prog.h * tau;
        let cx = prog.c.dot(&x);
        let by = prog.b.dot(&y);
        let hz = prog.h.dot(&z);
        let rt = kappa + cx + by + hz;

        let pres = (norm(&ry) / tau / nb).max(norm(&rz) / tau / nh);
        let dres = norm(&rx) / tau / nc;
        let pcost = cx / tau;
        let dcost = -(by + hz) / tau;
        let gap = s.dot(&z) / (tau * tau);
        let relgap = if pcost < 0.0 {
            gap / -pcost
        } else if dcost > 0.0 {
            gap / dcost
        } else {
            f64::INFINITY
        };
        let report = |status: SolverStatus, it: usize| ConeSolution {
            status,
            x: &x / tau,
            y: &y / tau,
            z: &z / tau,
            s: &s / tau,
            primal_objective: pcost,
            dual_objective: dcost,
            primal_residual: pres,
            dual_residual: dres,
            gap,
            iterations: it,
        };
        log::trace!("it {iterations}: pres {pres:.2e} dres {dres:.2e} gap {gap:.2e} relgap {relgap:.2e} tau {tau:.2e} kappa {kappa:.2e}");
        if !(pres.is_finite() && dres.is_finite() && gap.is_finite()) {
            log::debug!("non-finite residuals at iteration {iterations}");
            return failure(SolverStatus::NumericalError, iterations);
        }
        if pres <= settings.feastol
            && dres <= settings.feastol
            && (gap <= settings.abstol || relgap <= settings.reltol)
        {
            return report(SolverStatus::Optimal, iterations);
        }
        // Infeasibility certificates.
        let ax = prog.a.mul_vec(&x);
        let gxs = prog.g.mul_vec(&x) + &s;
        if hz + by < 0.0 {
            let pinf = norm(&(prog.a.tr_mul_vec(&y) + prog.g.tr_mul_vec(&z))) / nc / -(hz + by);
            if pinf <= settings.feastol {
                let scale = -(hz + by);
                let mut sol = report(SolverStatus::PrimalInfeasible, iterations);
                sol.y = &y / scale;
                sol.z = &z / scale;
                return sol;
            }
        }
        if cx < 0.0 {
            let dinf = (norm(&ax) / nb).max(norm(&gxs) / nh) / -cx;
            if dinf <= settings.feastol {
                let mut sol = report(SolverStatus::DualInfeasible, iterations);
                sol.x = &x / -cx;
                sol.s = &s / -cx;
                return sol;
            }
        }
        if iterations >= settings.max_iter {
            return report(SolverStatus::MaxIterations, iterations);
        }
        iterations += 1;

        let w = Scaling::new(spec, &s, &z);
        if !kkt.factor(prog, &w) {
            log::debug!("KKT factorization failed at iteration {iterations}");
            return report(SolverStatus::NumericalError, iterations);
        }
        let newton = Newton {
            prog,
            kkt: &*kkt,
            w: &w,
        };
        let lambda = w.lambda.clone();
        let lambda_sq = spec.product(&lambda, &lambda);
        let mu = (s.dot(&z) + tau * kappa) / (degree + 1.0);

        let (x2, y2, z2) = newton.solve(&(-&prog.c), &prog.b, &prog.h);
        let denom = prog.c.dot(&x2) + prog.b.dot(&y2) + prog.h.dot(&z2) - kappa / tau;

        // Direction for a given centering target.
        let direction = |eta: f64, ds_target: &DVector<f64>, dk_target: f64| {
            let ld = spec.divide(&lambda, ds_target);
            let bx = -&rx * eta;
            let byy = &ry * eta;
            let bz = -&rz * eta - w.apply(&ld);
            let (x1, y1, z1) = newton.solve(&bx, &byy, &bz);
            let dtau =
                (-eta * rt - dk_target / tau - prog.c.dot(&x1) - prog.b.dot(&y1) - prog.h.dot(&z1))
                    / denom;
            let dx = x1 + &x2 * dtau;
            let dy = y1 + &y2 * dtau;
            let dz = z1 + &z2 * dtau;
            let wdz = w.apply(&dz);
            // Scaled ds: W⁻¹ds = λ \ d_s − W dz.
            let ds_scaled = &ld - &wdz;
            let ds = w.apply(&ds_scaled);
            let dkappa = (dk_target - kappa * dtau) / tau;
            (dx, dy, dz, ds, dtau, dkappa, ds_scaled, wdz)
        };
        let max_step = |ds: &DVector<f64>, dz: &DVector<f64>, dtau: f64, dkappa: f64| {
            let mut a =
                spec.max_step(&s, ds, f64::INFINITY)
                    .min(spec.max_step(&z, dz, f64::INFINITY));
            if dtau < 0.0 {
                a = a.min(-tau / dtau);
            }
            if dkappa < 0.0 {
                a = a.min(-kappa / dkappa);
            }
            a
        };

        // Predictor.
        let (_, _, dz_a, ds_a, dtau_a, dkappa_a, dss_a, wdz_a) =
            direction(1.0, &(-&lambda_sq), -tau * kappa);
        let alpha_a = max_step(&ds_a, &dz_a, dtau_a, dkappa_a).min(1.0);
        let sigma = (1.0 - alpha_a).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let ds_target = &e * (sigma * mu) - &lambda_sq - spec.product(&dss_a, &wdz_a);
        let dk_target = sigma * mu - tau * kappa - dtau_a * dkappa_a;
        let (dx, dy, dz, ds, dtau, dkappa, _, _) = direction(1.0 - sigma, &ds_target, dk_target);
        let alpha = (settings.step_fraction * max_step(&ds, &dz, dtau, dkappa)).min(1.0);
        if !(alpha > 0.0) {
            log::debug!("zero step length at iteration {iterations}");
            return report(SolverStatus::NumericalError, iterations);
        }
        x += dx * alpha;
        y += dy * alpha;
        z += dz * alpha;
        s += ds * alpha;
        tau += dtau * alpha;
        kappa += dkappa * alpha;
    }
}
