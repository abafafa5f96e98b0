//! First-order solver for unit-diagonal complex Hermitian SDPs.
//!
//! The problem class is
//!
//! ```text
//! maximize   Re tr(C S) + offset
//! subject to Re tr(B_k S) ≥ b_k,  k = 1..m
//!            diag(S) = 1
//!            S ⪰ 0
//! ```
//!
//! solved by ADMM on the splitting `(X, s) = (Z, t)` where `(X, s)` lives in the
//! affine set `{diag X = 1, ⟨B_k, X⟩ − s_k = b_k}` and `(Z, t)` in
//! `PSD × R₊ᵐ`. The affine projection reduces to one `m × m` linear solve whose
//! Cholesky factor is computed once per problem. Reported solutions are the
//! PSD iterate rescaled to an exact unit diagonal.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    all_finite, frob_inner, frob_norm_sq, hermitian_eigenvalues, hermitian_part, CMatrix, HermitianEigen, C64,
};

/// `Re tr(B S) ≥ bound`.
#[derive(Debug, Clone)]
pub struct TraceInequality {
    pub matrix: CMatrix,
    pub bound: f64,
}

impl TraceInequality {
    pub fn new(matrix: CMatrix, bound: f64) -> Self {
        Self { matrix, bound }
    }

    /// `max(0, b − Re tr(B S))`.
    pub fn violation(&self, s: &CMatrix) -> f64 {
        (self.bound - frob_inner(&self.matrix, s)).max(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub dim: usize,
    /// Hermitian `C` of the maximized functional `Re tr(C S)`.
    pub objective: CMatrix,
    pub offset: f64,
    pub inequalities: Vec<TraceInequality>,
    /// Impose `diag(S) = 1`.
    pub unit_diagonal: bool,
}

impl SdpProblem {
    pub fn new(objective: CMatrix, inequalities: Vec<TraceInequality>) -> Self {
        Self {
            dim: objective.nrows(),
            objective,
            offset: 0.0,
            inequalities,
            unit_diagonal: true,
        }
    }

    pub fn objective_value(&self, s: &CMatrix) -> f64 {
        frob_inner(&self.objective, s) + self.offset
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Empty("SDP dimension"));
        }
        if !self.unit_diagonal {
            return Err(Error::InvalidParameter(
                "only unit-diagonal problems are supported (the feasible set is otherwise unbounded)".into(),
            ));
        }
        let check = |m: &CMatrix, context: &'static str| -> Result<()> {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    context,
                    expected: n,
                    got: if m.nrows() != n { m.nrows() } else { m.ncols() },
                });
            }
            if !all_finite(m) {
                return Err(Error::NonFinite(context));
            }
            Ok(())
        };
        check(&self.objective, "SDP objective")?;
        for ineq in &self.inequalities {
            check(&ineq.matrix, "SDP inequality")?;
            if !ineq.bound.is_finite() {
                return Err(Error::NonFinite("SDP inequality bound"));
            }
        }
        if !self.offset.is_finite() {
            return Err(Error::NonFinite("SDP objective offset"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SdpConfig {
    /// Inequality violation and relative iterate change tolerance.
    pub tol_primal: f64,
    /// Allowed negative eigenvalue magnitude.
    pub tol_psd: f64,
    /// Allowed diagonal deviation from one.
    pub tol_eq: f64,
    pub max_iterations: usize,
    /// Initial ADMM penalty ρ.
    pub step_parameter: f64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self {
            tol_primal: 1e-4,
            tol_psd: 1e-6,
            tol_eq: 1e-6,
            max_iterations: 20_000,
            step_parameter: 1.0,
        }
    }
}

impl SdpConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, v) in [
            ("sdp.tol_primal", self.tol_primal),
            ("sdp.tol_psd", self.tol_psd),
            ("sdp.tol_eq", self.tol_eq),
            ("sdp.step_parameter", self.step_parameter),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                problems.push(format!("{name} must be positive, got {v}"));
            }
        }
        if self.max_iterations == 0 {
            problems.push("sdp.max_iterations must be at least 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Converged,
    MaxIter,
    Diverged,
    /// The consensus residual settled at a nonzero constant: no point meets
    /// every constraint. The returned matrix is the least-violating iterate.
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub max_ineq_violation: f64,
    pub max_diag_violation: f64,
    pub min_eigenvalue: f64,
}

impl Residuals {
    pub fn within(&self, cfg: &SdpConfig) -> bool {
        self.max_ineq_violation <= cfg.tol_primal
            && self.max_diag_violation <= cfg.tol_eq
            && self.min_eigenvalue >= -cfg.tol_psd
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub s: CMatrix,
    pub objective_value: f64,
    /// Final ADMM consensus residual `‖(X, s) − (Z, t)‖` in normalized units.
    pub primal_residual: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub status: SdpStatus,
}

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
pub fn psd_project(h: &CMatrix) -> Result<CMatrix> {
    let eig = HermitianEigen::new(h)?;
    Ok(positive_part(&eig))
}

fn positive_part(eig: &HermitianEigen) -> CMatrix {
    let n = eig.vectors.nrows();
    let keep: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > 0.0).collect();
    let mut w = CMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let scale = C64::new(eig.values[k].sqrt(), 0.0);
        for r in 0..n {
            w[(r, c)] = eig.vectors[(r, k)] * scale;
        }
    }
    &w * w.adjoint()
}

/// Exact constraint residuals of `s` for `problem`.
pub fn residuals(s: &CMatrix, problem: &SdpProblem) -> Result<Residuals> {
    if s.nrows() != problem.dim || s.ncols() != problem.dim {
        return Err(Error::DimensionMismatch {
            context: "SDP residuals",
            expected: problem.dim,
            got: s.nrows(),
        });
    }
    let max_ineq_violation = problem
        .inequalities
        .iter()
        .map(|ineq| ineq.violation(s))
        .fold(0.0, f64::max);
    let max_diag_violation = if problem.unit_diagonal {
        (0..problem.dim)
            .map(|i| (s[(i, i)] - C64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let min_eigenvalue = hermitian_eigenvalues(s)?.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Residuals {
        max_ineq_violation,
        max_diag_violation,
        min_eigenvalue,
    })
}

/// Normalized inequality rows restricted to the off-diagonal coordinates.
struct AffineRows {
    mats: Vec<CMatrix>,
    bounds: DVector<f64>,
    gram: Option<Cholesky<f64, Dyn>>,
}

impl AffineRows {
    fn new(problem: &SdpProblem) -> Result<Self> {
        let n = problem.dim;
        let mut mats = Vec::with_capacity(problem.inequalities.len());
        let mut bounds = Vec::with_capacity(problem.inequalities.len());
        for ineq in &problem.inequalities {
            let mut b = hermitian_part(&ineq.matrix);
            let mut diag_part = 0.0;
            for i in 0..n {
                diag_part += b[(i, i)].re;
                b[(i, i)] = C64::new(0.0, 0.0);
            }
            let norm = frob_norm_sq(&b).sqrt();
            let bound = ineq.bound - diag_part;
            let scale = if norm > 1e-14 * (1.0 + diag_part.abs()) {
                1.0 / norm
            } else {
                1.0
            };
            mats.push(b * C64::new(scale, 0.0));
            bounds.push(bound * scale);
        }
        let m = mats.len();
        let gram = if m == 0 {
            None
        } else {
            let mut g = DMatrix::<f64>::identity(m, m);
            for k in 0..m {
                for l in k..m {
                    let v = frob_inner(&mats[k], &mats[l]);
                    g[(k, l)] += v;
                    if l != k {
                        g[(l, k)] += v;
                    }
                }
            }
            Some(
                Cholesky::new(g)
                    .ok_or_else(|| Error::InvalidParameter("constraint Gram matrix is not positive definite".into()))?,
            )
        };
        Ok(Self {
            mats,
            bounds: DVector::from_vec(bounds),
            gram,
        })
    }

    fn len(&self) -> usize {
        self.mats.len()
    }

    /// Row values `⟨B'_k, X⟩` on the off-diagonal part.
    fn apply(&self, x: &CMatrix) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.mats.iter().map(|b| frob_inner(b, x)))
    }

    /// Projects `(v_mat, v_slack)` onto the affine set in place.
    fn project(&self, v_mat: &mut CMatrix, v_slack: &mut DVector<f64>) {
        let n = v_mat.nrows();
        for i in 0..n {
            v_mat[(i, i)] = C64::new(0.0, 0.0);
        }
        if let Some(chol) = &self.gram {
            let rhs = &self.bounds - self.apply(v_mat) + &*v_slack;
            let lambda = chol.solve(&rhs);
            for (k, b) in self.mats.iter().enumerate() {
                let l = lambda[k];
                if l != 0.0 {
                    v_mat.zip_apply(b, |x, y| *x += y * l);
                }
            }
            *v_slack -= &lambda;
        }
        for i in 0..n {
            v_mat[(i, i)] = C64::new(1.0, 0.0);
        }
    }
}

/// `D^{-1/2} Z D^{-1/2}` with `D = diag(Z)`; zero-diagonal indices become
/// isolated unit entries.
fn unit_diagonal_rescale(z: &CMatrix) -> CMatrix {
    let n = z.nrows();
    let scale: Vec<Option<f64>> = (0..n)
        .map(|i| {
            let d = z[(i, i)].re;
            (d > 1e-300).then(|| 1.0 / d.sqrt())
        })
        .collect();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return C64::new(1.0, 0.0);
        }
        match (scale[i], scale[j]) {
            (Some(a), Some(b)) => z[(i, j)] * (a * b),
            _ => C64::new(0.0, 0.0),
        }
    })
}

const RHO_RANGE: f64 = 1e6;
const ADAPT_EVERY: usize = 20;
const CHECK_EVERY: usize = 10;
const DIVERGENCE_WINDOW: usize = 100;
const STALL_WINDOW: usize = 200;
const STALL_MIN_ITER: usize = 500;

/// Solves `problem`, optionally warm-started from `warm` (cold start: identity).
pub fn solve(problem: &SdpProblem, cfg: &SdpConfig, warm: Option<&CMatrix>) -> Result<SdpSolution> {
    cfg.validate()?;
    problem.validate()?;
    let n = problem.dim;
    let rows = AffineRows::new(problem)?;
    let m = rows.len();

    let mut c_off = hermitian_part(&problem.objective);
    for i in 0..n {
        c_off[(i, i)] = C64::new(0.0, 0.0);
    }
    let c_norm = frob_norm_sq(&c_off).sqrt();
    if c_norm > 0.0 {
        c_off *= C64::new(1.0 / c_norm, 0.0);
    }

    let mut z = match warm {
        Some(w) => {
            if w.nrows() != n || w.ncols() != n {
                return Err(Error::DimensionMismatch {
                    context: "SDP warm start",
                    expected: n,
                    got: w.nrows(),
                });
            }
            if !all_finite(w) {
                return Err(Error::NonFinite("SDP warm start"));
            }
            hermitian_part(w)
        }
        None => CMatrix::identity(n, n),
    };
    let mut t = {
        let vals = rows.apply(&z);
        DVector::from_iterator(m, (0..m).map(|k| (vals[k] - rows.bounds[k]).max(0.0)))
    };
    let mut u = CMatrix::zeros(n, n);
    let mut w = DVector::<f64>::zeros(m);
    let rho0 = cfg.step_parameter;
    let mut rho = rho0;
    let mut history: Vec<f64> = Vec::new();
    let mut rising = 0usize;
    let mut status = SdpStatus::MaxIter;
    let mut iterations = 0;
    let mut primal = f64::INFINITY;

    for k in 1..=cfg.max_iterations {
        iterations = k;
        // affine step
        let mut x = &z - &u + &c_off * C64::new(1.0 / rho, 0.0);
        let mut s = &t - &w;
        rows.project(&mut x, &mut s);

        // cone step
        let z_prev = std::mem::replace(&mut z, psd_project(&(&x + &u))?);
        let t_prev = t.clone();
        t = (&s + &w).map(|v| v.max(0.0));

        let dx = &x - &z;
        let ds = &s - &t;
        u += &dx;
        w += &ds;

        if !all_finite(&z) || !all_finite(&u) {
            return Err(Error::NonFinite("SDP iterate"));
        }

        primal = (frob_norm_sq(&dx) + ds.norm_squared()).sqrt();
        let change = (frob_norm_sq(&(&z - &z_prev)) + (&t - &t_prev).norm_squared()).sqrt();
        let dual = rho * change;
        rising = match history.last() {
            Some(&prev) if primal > prev => rising + 1,
            _ => 0,
        };
        history.push(primal);

        let z_norm = frob_norm_sq(&z).sqrt().max(1.0);
        let dual_scale = (rho * frob_norm_sq(&u).sqrt()).max(1.0);

        if rising >= DIVERGENCE_WINDOW {
            let before = history[k - 1 - DIVERGENCE_WINDOW];
            if primal > 10.0 * before.max(cfg.tol_primal * z_norm) {
                status = SdpStatus::Diverged;
                break;
            }
        }

        let small_change = change <= cfg.tol_primal * z_norm && dual <= cfg.tol_primal * dual_scale;
        if k % CHECK_EVERY == 0 || k == cfg.max_iterations {
            if small_change && primal <= cfg.tol_primal * z_norm {
                let candidate = unit_diagonal_rescale(&z);
                let res = residuals(&candidate, problem)?;
                if res.within(cfg) {
                    status = SdpStatus::Converged;
                    break;
                }
            }
            if k >= STALL_MIN_ITER && primal > cfg.tol_primal * z_norm {
                let before = history[k - STALL_WINDOW];
                let stalled = (primal - before).abs() <= 1e-3 * primal;
                if stalled && change <= 1e-3 * primal.max(cfg.tol_primal) {
                    let candidate = unit_diagonal_rescale(&z);
                    if residuals(&candidate, problem)?.max_ineq_violation > cfg.tol_primal {
                        status = SdpStatus::Infeasible;
                        break;
                    }
                }
            }
        }

        if k % ADAPT_EVERY == 0 {
            let rel_primal = primal / z_norm;
            let rel_dual = dual / dual_scale;
            let factor = if rel_primal > 10.0 * rel_dual {
                2.0
            } else if rel_dual > 10.0 * rel_primal {
                0.5
            } else {
                1.0
            };
            let next = (rho * factor).clamp(rho0 / RHO_RANGE, rho0 * RHO_RANGE);
            if next != rho {
                let ratio = rho / next;
                u *= C64::new(ratio, 0.0);
                w *= ratio;
                rho = next;
            }
        }
    }

    let s = unit_diagonal_rescale(&z);
    let res = residuals(&s, problem)?;
    log::debug!(
        "sdp n={n} m={m} status={status:?} iters={iterations} primal={primal:.3e} viol={:.3e}",
        res.max_ineq_violation
    );
    Ok(SdpSolution {
        objective_value: problem.objective_value(&s),
        s,
        primal_residual: primal,
        residuals: res,
        iterations,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        hermitian_part(&a)
    }

    #[test]
    fn psd_project_examples() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        let p = psd_project(&d).unwrap();
        assert!((p[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(p[(1, 1)].norm() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_hermitian(&mut rng, 4);
        let psd = &a * &a;
        let back = psd_project(&psd).unwrap();
        assert!(frob_norm_sq(&(&back - &psd)).sqrt() < 1e-10);
    }

    #[test]
    fn psd_project_matches_two_by_two_closed_form() {
        // For a real symmetric 2×2 [[a, b], [b, d]] with eigenpairs known in
        // closed form the projection is λ₊ v₊ v₊ᵀ when exactly one eigenvalue is positive.
        let (a, b, d) = (0.3, 0.9, -0.5);
        let tr = a + d;
        let disc = (((a - d) / 2.0f64).powi(2) + b * b).sqrt();
        let lp = tr / 2.0 + disc;
        let v = [b, lp - a];
        let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let v = [v[0] / nv, v[1] / nv];
        let h = CMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(b, 0.0), c(b, 0.0), c(d, 0.0)]);
        let p = psd_project(&h).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[(i, j)].re - lp * v[i] * v[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scalar_problem() {
        let problem = SdpProblem::new(CMatrix::identity(1, 1), vec![]);
        let sol = solve(&problem, &SdpConfig::default(), None).unwrap();
        assert_eq!(sol.status, SdpStatus::Converged);
        assert!((sol.s[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((sol.objective_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_correlation_two_by_two() {
        let cm = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let sol = solve(&SdpProblem::new(cm, vec![]), &SdpConfig::default(), None).unwrap();
        assert_eq!(sol.status, SdpStatus::Converged);
        assert!((sol.objective_value - 2.0).abs() < 1e-3, "{}", sol.objective_value);
        assert!(sol.residuals.within(&SdpConfig::default()));
    }

    #[test]
    fn contradictory_inequalities_are_not_converged() {
        let n = 3;
        let b = CMatrix::identity(n, n) * c(1.0 / n as f64, 0.0);
        let problem = SdpProblem::new(
            CMatrix::zeros(n, n),
            vec![TraceInequality::new(b.clone(), 1.0), TraceInequality::new(-b, 1.0)],
        );
        let cfg = SdpConfig {
            max_iterations: 3000,
            ..SdpConfig::default()
        };
        let sol = solve(&problem, &cfg, None).unwrap();
        assert_ne!(sol.status, SdpStatus::Converged);
        assert!(sol.residuals.max_ineq_violation > 1.0);
    }

    #[test]
    fn residuals_match_naive_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 3;
        let ineqs: Vec<_> = (0..4)
            .map(|_| TraceInequality::new(random_hermitian(&mut rng, n), rng.random::<f64>() - 0.5))
            .collect();
        let problem = SdpProblem::new(random_hermitian(&mut rng, n), ineqs);
        let s = random_hermitian(&mut rng, n);
        let r = residuals(&s, &problem).unwrap();
        let mut worst = 0.0f64;
        for ineq in &problem.inequalities {
            let mut tr = 0.0;
            for i in 0..n {
                for j in 0..n {
                    tr += (ineq.matrix[(i, j)] * s[(j, i)]).re;
                }
            }
            worst = worst.max(ineq.bound - tr);
        }
        assert!((r.max_ineq_violation - worst.max(0.0)).abs() < 1e-14);
        let zero = residuals(&CMatrix::zeros(n, n), &problem).unwrap();
        assert!((zero.max_diag_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn warm_start_dimension_checked() {
        let problem = SdpProblem::new(CMatrix::identity(2, 2), vec![]);
        assert!(solve(&problem, &SdpConfig::default(), Some(&CMatrix::identity(3, 3))).is_err());
    }
}
