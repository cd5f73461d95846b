use nalgebra::{
    DMatrix, DVector, Matrix3, Matrix3x4, Matrix3x6, Matrix4, Matrix4x3, Matrix6, Matrix6x3,
    Vector3, Vector4, Vector6,
};
use serde::{Deserialize, Serialize};

use super::dvprime::{gap_elements, mean_equinoctial, DvPrimeCoefficients, TrackMode};
use super::guess::SegmentGuess;
use crate::coords::{geqoe_to_cart, EquinoctialElements, GeqoeState};
use crate::dynamics::{compute_stm_chain, Propagator, StepNode, StmPair};
use crate::error::{Error, Result};
use crate::socp::{
    self, ConeProgram, ConeSpec, KktSolver, Scaling, SolverSettings, SolverStatus, SparseMatrix,
};

/// Step for the terminal element Jacobian, scaled GEqOE units.
const JAC_STEP: f64 = 1e-5;

/// Convex tracking problem over one segment, linearized about a guess.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentProblem {
    pub t: Vec<f64>,
    pub x0: Vector6<f64>,
    /// Guess terminal state, scaled GEqOE.
    pub x_end: Vector6<f64>,
    pub guess_accels: Vec<Vector3<f64>>,
    /// Acceleration bound per step, km/s². Zero where the gate is off.
    pub bounds: Vec<f64>,
    pub stms: Vec<StmPair>,
    pub target: EquinoctialElements,
    pub mode: TrackMode,
    /// Mean `(a, h, k)` of the guess terminal state.
    pub y_end: Vector3<f64>,
    /// `∂(a, h, k)/∂x` at the guess terminal state.
    pub jac: Matrix3x6<f64>,
    pub coeffs: DvPrimeCoefficients,
    /// Weight of the terminal Δv′ against the spent Δv in the objective.
    #[serde(default = "unit_weight")]
    pub dv_prime_weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

/// Solved controls for one segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSolution {
    pub status: SolverStatus,
    /// RTN acceleration per step, km/s².
    pub accels: Vec<Vector3<f64>>,
    /// Σ ‖a‖·dt, m/s.
    pub dv_segment: f64,
    /// Terminal Δv′ bound, m/s.
    pub dv_prime: f64,
    pub objective: f64,
    /// Objective of the guess controls in the same problem.
    pub guess_objective: f64,
    /// Linear prediction of the terminal state, scaled GEqOE.
    pub x_end: Vector6<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

impl SegmentProblem {
    pub fn steps(&self) -> usize {
        self.stms.len()
    }

    pub fn dt(&self, k: usize) -> f64 {
        self.t[k + 1] - self.t[k]
    }

    /// Sensitivities `Γ_k = A_{N−1}⋯A_{k+1}·B_k` of the terminal state to
    /// each step's acceleration.
    pub fn terminal_sensitivities(&self) -> Vec<Matrix6x3<f64>> {
        let n = self.steps();
        let mut out = vec![Matrix6x3::zeros(); n];
        let mut p = Matrix6::identity();
        for k in (0..n).rev() {
            out[k] = p * self.stms[k].b_mat;
            p *= self.stms[k].a_mat;
        }
        out
    }

    /// Linearized terminal Δv′ vector for the accelerations `a`.
    pub fn dv_prime_vector(&self, accels: &[Vector3<f64>]) -> Vector3<f64> {
        let c = self.coeffs.matrix(self.mode);
        let gap =
            gap_elements(&self.target) - self.y_end - self.jac * self.terminal_deviation(accels);
        c * gap
    }

    /// `δx_N = Σ Γ_k (a_k − ā_k)`.
    pub fn terminal_deviation(&self, accels: &[Vector3<f64>]) -> Vector6<f64> {
        self.terminal_sensitivities()
            .iter()
            .zip(accels.iter().zip(&self.guess_accels))
            .map(|(g, (a, ab))| g * (a - ab))
            .sum()
    }

    /// Objective value of `accels`: Σ ‖a‖·dt (m/s) plus the weighted
    /// terminal Δv′.
    pub fn objective(&self, accels: &[Vector3<f64>]) -> f64 {
        let spent: f64 = accels
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm() * self.dt(k) * 1e3)
            .sum();
        spent + self.dv_prime_weight * self.dv_prime_vector(accels).norm()
    }

    /// Cone program in scaled accelerations `u = a/a_ref`. Steps with a zero
    /// bound carry no variables.
    pub fn cone_program(&self) -> SegmentCone {
        let active: Vec<usize> = (0..self.steps())
            .filter(|&k| self.bounds[k] > 0.0)
            .collect();
        let a_ref = active.iter().map(|&k| self.bounds[k]).fold(0.0, f64::max);
        let a_ref = if a_ref > 0.0 { a_ref } else { 1.0 };
        let nb = active.len();
        let n = 4 * nb + 1;
        let gammas = self.terminal_sensitivities();
        let cj = self.coeffs.matrix(self.mode) * self.jac;
        // Δv = dd − Σ_active M_k·a_k
        let mut dd = self.coeffs.matrix(self.mode) * (gap_elements(&self.target) - self.y_end);
        for (k, g) in gammas.iter().enumerate() {
            dd += cj * g * self.guess_accels[k];
        }
        let blocks: Vec<Matrix3<f64>> = active.iter().map(|&k| cj * gammas[k] * a_ref).collect();

        let m = nb + 4 * nb + 4;
        let mut trip = Vec::with_capacity(nb * 17 + 1);
        let mut h = DVector::zeros(m);
        let mut c = DVector::zeros(n);
        for (j, &k) in active.iter().enumerate() {
            trip.push((j, 4 * j, 1.0));
            h[j] = self.bounds[k] / a_ref;
            for r in 0..4 {
                trip.push((nb + 4 * j + r, 4 * j + r, -1.0));
            }
            c[4 * j] = a_ref * self.dt(k) * 1e3;
        }
        let r0 = 5 * nb;
        trip.push((r0, 4 * nb, -1.0));
        for (j, blk) in blocks.iter().enumerate() {
            for r in 0..3 {
                for col in 0..3 {
                    trip.push((r0 + 1 + r, 4 * j + 1 + col, blk[(r, col)]));
                }
            }
        }
        for r in 0..3 {
            h[r0 + 1 + r] = dd[r];
        }
        c[4 * nb] = self.dv_prime_weight;
        let mut soc = vec![4; nb];
        soc.push(4);
        let program = ConeProgram {
            c,
            g: SparseMatrix::from_triplets(m, n, trip),
            h,
            a: SparseMatrix::zeros(0, n),
            b: DVector::zeros(0),
            cones: ConeSpec { nonneg: nb, soc },
        };
        SegmentCone {
            program,
            active,
            a_ref,
            blocks,
        }
    }

    /// Accelerations for every step from a solution vector.
    pub fn unpack(&self, cone: &SegmentCone, x: &DVector<f64>) -> Vec<Vector3<f64>> {
        let mut out = vec![Vector3::zeros(); self.steps()];
        for (j, &k) in cone.active.iter().enumerate() {
            let mut a = Vector3::new(x[4 * j + 1], x[4 * j + 2], x[4 * j + 3]) * cone.a_ref;
            // Interior-point iterates sit marginally outside the cone at
            // the solver tolerance; pull back onto the bound.
            let norm = a.norm();
            if norm > self.bounds[k] {
                a *= self.bounds[k] / norm;
            }
            out[k] = a;
        }
        out
    }
}

/// Cone program of a segment and the map back to accelerations.
#[derive(Clone, Debug)]
pub struct SegmentCone {
    pub program: ConeProgram,
    /// Steps that carry variables.
    pub active: Vec<usize>,
    /// Acceleration scale, km/s².
    pub a_ref: f64,
    /// Terminal Δv′ sensitivity per active step, m/s per unit `u`.
    pub blocks: Vec<Matrix3<f64>>,
}

/// Mean `(a, h, k)` of a scaled GEqOE state.
fn terminal_gap_elements(x: &Vector6<f64>, epoch: f64, prop: &Propagator) -> Result<Vector3<f64>> {
    let body = prop.model.conversion_body();
    let cart = geqoe_to_cart(&GeqoeState::from_scaled(x, &body), &body, epoch)?;
    Ok(gap_elements(&mean_equinoctial(&cart, &body)?))
}

/// Linearizes the segment about `guess`.
pub fn build_segment_problem(
    guess: &SegmentGuess,
    target: EquinoctialElements,
    mode: TrackMode,
    prop: &Propagator,
) -> Result<SegmentProblem> {
    let n = guess.steps();
    let nodes: Vec<StepNode> = (0..n)
        .map(|k| StepNode {
            x: guess.geqoe[k],
            epoch: guess.t[k],
            mass: guess.masses[k],
            accel: guess.accels[k],
            dt: guess.dt(k),
        })
        .collect();
    let stms = compute_stm_chain(prop, &nodes)?;
    let bounds = (0..n)
        .map(|k| guess.eta[k] * prop.cfg.max_accel(guess.masses[k]))
        .collect();
    let x_end = guess.geqoe[n];
    let t_end = guess.t[n];
    let y_end = terminal_gap_elements(&x_end, t_end, prop).map_err(|e| e.at_node(n))?;
    let mut jac = Matrix3x6::zeros();
    for j in 0..6 {
        let mut xp = x_end;
        let mut xm = x_end;
        xp[j] += JAC_STEP;
        xm[j] -= JAC_STEP;
        let yp = terminal_gap_elements(&xp, t_end, prop)?;
        let ym = terminal_gap_elements(&xm, t_end, prop)?;
        jac.set_column(j, &((yp - ym) / (2.0 * JAC_STEP)));
    }
    let body = prop.model.conversion_body();
    let end = mean_equinoctial(&guess.states[n], &body)?;
    Ok(SegmentProblem {
        t: guess.t.clone(),
        x0: guess.geqoe[0],
        x_end,
        guess_accels: guess.accels.clone(),
        bounds,
        stms,
        target,
        mode,
        y_end,
        jac,
        coeffs: DvPrimeCoefficients::new(&end, body.mu),
        dv_prime_weight: 1.0,
    })
}

/// Solves the segment with the structured KKT backend, retrying with the
/// dense factorization if the structured solve loses accuracy.
pub fn solve_segment(problem: &SegmentProblem, settings: &SolverSettings) -> SegmentSolution {
    let cone = problem.cone_program();
    let mut kkt = SegmentKkt::new(&cone);
    let sol = socp::solve_with(&cone.program, &mut kkt, settings);
    if sol.status == SolverStatus::NumericalError {
        log::debug!(
            "structured KKT failed after {} iterations, retrying dense",
            sol.iterations
        );
        let dense = socp::solve(&cone.program, settings);
        return finish(problem, &cone, dense);
    }
    finish(problem, &cone, sol)
}

/// Solves the segment with a dense KKT factorization.
pub fn solve_segment_dense(problem: &SegmentProblem, settings: &SolverSettings) -> SegmentSolution {
    let cone = problem.cone_program();
    let sol = socp::solve(&cone.program, settings);
    finish(problem, &cone, sol)
}

fn finish(
    problem: &SegmentProblem,
    cone: &SegmentCone,
    sol: socp::ConeSolution,
) -> SegmentSolution {
    let guess_objective = problem.objective(&problem.guess_accels);
    let accels = if sol.status == SolverStatus::Optimal {
        problem.unpack(cone, &sol.x)
    } else {
        problem.guess_accels.clone()
    };
    let dv_segment = accels
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm() * problem.dt(k) * 1e3)
        .sum();
    let dv_prime = if sol.status == SolverStatus::Optimal {
        sol.x[4 * cone.active.len()].max(0.0)
    } else {
        problem.dv_prime_vector(&accels).norm()
    };
    SegmentSolution {
        status: sol.status,
        objective: dv_segment + problem.dv_prime_weight * dv_prime,
        x_end: problem.x_end + problem.terminal_deviation(&accels),
        accels,
        dv_segment,
        dv_prime,
        guess_objective,
        iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
    }
}

impl SegmentSolution {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl SegmentProblem {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: SegmentProblem = serde_json::from_str(s)?;
        if p.stms.len() + 1 != p.t.len()
            || p.bounds.len() != p.stms.len()
            || p.guess_accels.len() != p.stms.len()
        {
            return Err(Error::Config("segment problem dimensions disagree".into()));
        }
        Ok(p)
    }
}

/// KKT solver exploiting the segment structure: block-diagonal per-step
/// terms plus a rank-3 coupling through the terminal cone, solved with the
/// Woodbury identity in `O(steps)`.
pub struct SegmentKkt {
    nb: usize,
    /// `M̃_j` per block, 3×4 with a zero first column.
    m: Vec<Matrix3x4<f64>>,
    d_inv: Vec<Matrix4<f64>>,
    d_inv_mt: Vec<Matrix4x3<f64>>,
    s00: f64,
    s_v: Vector3<f64>,
    s3: Matrix3<f64>,
    coupling: Option<nalgebra::LU<f64, nalgebra::U3, nalgebra::U3>>,
}

impl SegmentKkt {
    pub fn new(cone: &SegmentCone) -> Self {
        let m = cone
            .blocks
            .iter()
            .map(|b| {
                let mut mm = Matrix3x4::zeros();
                mm.fixed_view_mut::<3, 3>(0, 1).copy_from(b);
                mm
            })
            .collect();
        SegmentKkt {
            nb: cone.blocks.len(),
            m,
            d_inv: Vec::new(),
            d_inv_mt: Vec::new(),
            s00: 1.0,
            s_v: Vector3::zeros(),
            s3: Matrix3::zeros(),
            coupling: None,
        }
    }
}

impl KktSolver for SegmentKkt {
    fn factor(&mut self, _prog: &ConeProgram, w: &Scaling) -> bool {
        let nonneg = w.nonneg_inv_sq();
        self.d_inv.clear();
        self.d_inv_mt.clear();
        let mut q = Matrix3::zeros();
        for j in 0..self.nb {
            let blk = w.soc_inv_sq(j);
            let mut d = Matrix4::from_fn(|r, c| blk[(r, c)]);
            d[(0, 0)] += nonneg[j];
            let Some(chol) = d.cholesky() else {
                return false;
            };
            let inv = chol.inverse();
            let imt = inv * self.m[j].transpose();
            q += self.m[j] * imt;
            self.d_inv.push(inv);
            self.d_inv_mt.push(imt);
        }
        let s = w.soc_inv_sq(self.nb);
        self.s00 = s[(0, 0)];
        if !(self.s00 > 0.0) {
            return false;
        }
        self.s_v = Vector3::new(s[(1, 0)], s[(2, 0)], s[(3, 0)]);
        let s33 = Matrix3::from_fn(|r, c| s[(r + 1, c + 1)]);
        self.s3 = s33 - self.s_v * self.s_v.transpose() / self.s00;
        let f = Matrix3::identity() + self.s3 * q;
        let lu = f.lu();
        let ok = lu.is_invertible();
        self.coupling = Some(lu);
        ok
    }

    fn solve_reduced(
        &self,
        _prog: &ConeProgram,
        _w: &Scaling,
        rhs_x: &DVector<f64>,
        _by: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>) {
        let nb = self.nb;
        let r_t = rhs_x[4 * nb];
        let scale = r_t / self.s00;
        let mut z = Vec::with_capacity(nb);
        let mut v = Vector3::zeros();
        for j in 0..nb {
            let qj = Vector4::new(
                rhs_x[4 * j],
                rhs_x[4 * j + 1],
                rhs_x[4 * j + 2],
                rhs_x[4 * j + 3],
            ) + self.m[j].transpose() * self.s_v * scale;
            let zj = self.d_inv[j] * qj;
            v += self.m[j] * zj;
            z.push(zj);
        }
        let w = self
            .coupling
            .as_ref()
            .expect("factor must be called before solve")
            .solve(&(self.s3 * v))
            .unwrap_or_else(|| Vector3::from_element(f64::NAN));
        let mut x = DVector::zeros(4 * nb + 1);
        let mut my = Vector3::zeros();
        for j in 0..nb {
            let yj = z[j] - self.d_inv_mt[j] * w;
            my += self.m[j] * yj;
            x.fixed_rows_mut::<4>(4 * j).copy_from(&yj);
        }
        x[4 * nb] = (r_t + self.s_v.dot(&my)) / self.s00;
        (x, DVector::zeros(0))
    }
}

/// Dense `H = GᵀW⁻²G` of a segment program, for checking structured solves.
pub fn dense_normal_matrix(prog: &ConeProgram, w: &Scaling) -> DMatrix<f64> {
    let g = prog.g.to_dense();
    let mut wg = DMatrix::zeros(g.nrows(), g.ncols());
    for c in 0..g.ncols() {
        wg.set_column(c, &w.apply_inv(&g.column(c).clone_owned()));
    }
    wg.transpose() * wg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::G0;
    use crate::coords::{kep_to_cart, kep_to_equinoctial, KeplerianElements};
    use crate::dynamics::{ForceModel, SpacecraftConfig};

    fn prop() -> Propagator {
        let cfg = SpacecraftConfig {
            m0: 800.0,
            t_max: 0.06,
            isp: 1300.0,
            g0: G0,
            duty_cycle: 0.5,
            cd: 2.2,
            area: 0.01,
        };
        Propagator::new(ForceModel::j2_only(), cfg)
    }

    /// Guess with constant tangential thrust on every step.
    fn guess(prop: &Propagator, steps: usize, thrust: f64) -> SegmentGuess {
        let body = prop.model.conversion_body();
        let x0 = kep_to_cart(
            &KeplerianElements::osculating(6800.0, 0.001, 1.7, 0.3, 0.2, 0.1),
            body.mu,
            0.0,
        );
        let dt = 150.0;
        let t: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
        let a = Vector3::new(0.0, thrust, 0.0);
        let mut states = vec![x0];
        let mut masses = vec![800.0];
        for k in 0..steps {
            let (x1, m1) = prop.step_fixed(&states[k], masses[k], dt, &a);
            states.push(x1);
            masses.push(m1);
        }
        let geqoe = states
            .iter()
            .map(|x| {
                crate::coords::cart_to_geqoe(x, &body)
                    .unwrap()
                    .to_scaled(&body)
            })
            .collect();
        SegmentGuess {
            t,
            states,
            geqoe,
            accels: vec![a; steps],
            masses,
            eta: vec![1.0; steps],
        }
    }

    fn target_near(prop: &Propagator, g: &SegmentGuess, da: f64, di: f64) -> EquinoctialElements {
        let body = prop.model.conversion_body();
        let mut k = crate::coords::cart_to_mean(g.states.last().unwrap(), &body).unwrap();
        k.a += da;
        k.i += di;
        k.e = 0.0;
        kep_to_equinoctial(&k).unwrap()
    }

    #[test]
    fn structured_kkt_matches_dense() {
        let p = prop();
        let g = guess(&p, 6, 4e-8);
        let problem =
            build_segment_problem(&g, target_near(&p, &g, 0.3, 2e-5), TrackMode::Full, &p).unwrap();
        let cone = problem.cone_program();
        let spec = cone.program.cones.clone();
        let n = cone.program.c.len();
        // A generic interior scaling point.
        let s = DVector::from_fn(spec.dim(), |i, _| {
            if i < spec.nonneg {
                0.5 + 0.1 * i as f64
            } else {
                0.0
            }
        });
        let mut s = s;
        let mut z = s.clone();
        for (off, &d) in spec.soc_offsets().iter().zip(&spec.soc) {
            s[*off] = 2.0 + 0.1 * *off as f64;
            z[*off] = 1.5;
            for r in 1..d {
                s[off + r] = 0.3 * ((off + r) as f64).sin();
                z[off + r] = 0.2 * ((off + r) as f64).cos();
            }
        }
        for j in 0..spec.nonneg {
            z[j] = 1.0 / (1.0 + j as f64);
        }
        let w = Scaling::new(&spec, &s, &z);
        let h = dense_normal_matrix(&cone.program, &w);
        let rhs = DVector::from_fn(n, |i, _| ((i * 7 + 3) as f64).cos());
        let mut kkt = SegmentKkt::new(&cone);
        assert!(kkt.factor(&cone.program, &w));
        let (x, _) = kkt.solve_reduced(&cone.program, &w, &rhs, &DVector::zeros(0));
        let res = (&h * &x - &rhs).norm() / rhs.norm();
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn structured_and_dense_solutions_agree() {
        let p = prop();
        let g = guess(&p, 8, 3e-8);
        let problem =
            build_segment_problem(&g, target_near(&p, &g, 0.5, 1e-5), TrackMode::Full, &p).unwrap();
        let s = SolverSettings::default();
        let cone = problem.cone_program();
        let a = finish(
            &problem,
            &cone,
            socp::solve_with(&cone.program, &mut SegmentKkt::new(&cone), &s),
        );
        let b = solve_segment_dense(&problem, &s);
        assert_eq!(a.status, SolverStatus::Optimal);
        assert_eq!(b.status, SolverStatus::Optimal);
        assert!((a.objective - b.objective).abs() < 1e-7 * b.objective.max(1.0));
        assert!(a.objective <= a.guess_objective + 1e-9);
    }

    #[test]
    fn zero_bounds_give_coast_gap() {
        let p = prop();
        let mut g = guess(&p, 5, 0.0);
        g.eta = vec![0.0; 5];
        let problem =
            build_segment_problem(&g, target_near(&p, &g, 0.2, 0.0), TrackMode::Full, &p).unwrap();
        let sol = solve_segment(&problem, &SolverSettings::default());
        assert_eq!(sol.status, SolverStatus::Optimal);
        assert!(sol.accels.iter().all(|a| a.norm() == 0.0));
        let gap = problem.dv_prime_vector(&sol.accels).norm();
        assert!(
            (sol.dv_prime - gap).abs() < 1e-8 * gap.max(1.0),
            "{} vs {gap}",
            sol.dv_prime
        );
    }

    #[test]
    fn null_problem() {
        let p = prop();
        let g = guess(&p, 4, 0.0);
        let body = p.model.conversion_body();
        let target = mean_equinoctial(g.states.last().unwrap(), &body).unwrap();
        let problem = build_segment_problem(&g, target, TrackMode::Full, &p).unwrap();
        let sol = solve_segment(&problem, &SolverSettings::default());
        assert_eq!(sol.status, SolverStatus::Optimal);
        assert!(sol.objective < 1e-7, "{}", sol.objective);
        assert!(sol.accels.iter().all(|a| a.norm() < 1e-14));
    }

    #[test]
    fn linear_prediction_tracks_nonlinear_step() {
        let p = prop();
        let g = guess(&p, 6, 4e-8);
        let problem =
            build_segment_problem(&g, target_near(&p, &g, 0.0, 0.0), TrackMode::Full, &p).unwrap();
        let accels: Vec<Vector3<f64>> = g
            .accels
            .iter()
            .map(|a| a + Vector3::new(1e-9, -5e-9, 8e-9))
            .collect();
        let predicted = problem.x_end + problem.terminal_deviation(&accels);
        let mut x = g.states[0];
        let mut m = g.masses[0];
        for (k, a) in accels.iter().enumerate() {
            let (x1, m1) = p.step_fixed(&x, m, g.dt(k), a);
            x = x1;
            m = m1;
        }
        let body = p.model.conversion_body();
        let mut actual = crate::coords::cart_to_geqoe(&x, &body)
            .unwrap()
            .to_scaled(&body);
        actual[3] = predicted[3] + crate::constants::wrap_pi(actual[3] - predicted[3]);
        let dev = (actual - problem.x_end).norm();
        let err = (actual - predicted).norm();
        assert!(err < 1e-3 * dev, "error {err} vs deviation {dev}");
    }
}
