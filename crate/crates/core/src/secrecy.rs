//! SNR, secrecy rate, worst-case evaluation over position grids, the LOS
//! beamformer and the closed-form `γ` update.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{steering_vector, ArrayGeometry, ChannelInstance, QuadraticForm, Receiver, Vec3};
use crate::linalg::{CMatrix, CVector, C64};

/// `|h_effᴴ q|² / σ²`.
pub fn snr(h_eff: &CVector, q: &CVector, noise_power: f64) -> Result<f64> {
    if !(noise_power > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be positive, got {noise_power}"
        )));
    }
    if h_eff.len() != q.len() {
        return Err(Error::DimensionMismatch {
            context: "snr",
            expected: h_eff.len(),
            got: q.len(),
        });
    }
    Ok(h_eff.dotc(q).norm_sqr() / noise_power)
}

/// Unclamped rate difference `log₂(1+SNR_u) − log₂(1+SNR_e)`.
pub fn rate_gap(snr_u: f64, snr_e: f64) -> f64 {
    (1.0 + snr_u).log2() - (1.0 + snr_e).log2()
}

/// `[log₂(1+SNR_u) − log₂(1+SNR_e)]⁺` in bits/s/Hz.
pub fn secrecy_rate(snr_u: f64, snr_e: f64) -> f64 {
    rate_gap(snr_u, snr_e).max(0.0)
}

fn receiver_snrs(inst: &ChannelInstance, which: Receiver, phases: &[f64], q: &CVector) -> Result<Vec<f64>> {
    (0..inst.receivers(which))
        .map(|i| snr(&inst.effective_channel(which, i, phases)?, q, inst.noise_power))
        .collect()
}

/// Worst-case rate difference without the `[·]⁺`: the weakest user point
/// against the strongest eavesdropper point.
pub fn worst_case_rate_gap(inst: &ChannelInstance, phases: &[f64], q: &CVector) -> Result<f64> {
    let users = receiver_snrs(inst, Receiver::User, phases, q)?;
    let eves = receiver_snrs(inst, Receiver::Eavesdropper, phases, q)?;
    if users.is_empty() {
        return Err(Error::Empty("user position grid"));
    }
    if eves.is_empty() {
        return Err(Error::Empty("eavesdropper position grid"));
    }
    let min_u = users.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_e = eves.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(rate_gap(min_u, max_e))
}

/// Worst-case secrecy rate over every (user, eavesdropper) position pair.
pub fn worst_case_secrecy_rate(inst: &ChannelInstance, phases: &[f64], q: &CVector) -> Result<f64> {
    Ok(worst_case_rate_gap(inst, phases, q)?.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub q: CVector,
    /// Transmit power budget in watts.
    pub power_budget: f64,
}

/// `q = √P_t · a_BS(p_RIS)`, which saturates the power budget.
pub fn los_beamformer(bs: &ArrayGeometry, ris_center: &Vec3, power_budget: f64) -> Result<Beamformer> {
    if !(power_budget > 0.0) || !power_budget.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "transmit power must be positive, got {power_budget}"
        )));
    }
    let a = steering_vector(bs, ris_center)?;
    Ok(Beamformer {
        q: a * C64::new(power_budget.sqrt(), 0.0),
        power_budget,
    })
}

/// `γ = min_u (tr(A_u S)+1) / max_e (tr(A_e S)+1)`, the exact pairwise minimum
/// of the SNR ratio for a fixed Gram matrix.
pub fn gamma_update(s: &CMatrix, user_forms: &[QuadraticForm], eve_forms: &[QuadraticForm]) -> Result<f64> {
    if user_forms.is_empty() {
        return Err(Error::Empty("user quadratic forms"));
    }
    if eve_forms.is_empty() {
        return Err(Error::Empty("eavesdropper quadratic forms"));
    }
    let min_u = user_forms
        .iter()
        .map(|a| a.trace_with(s) + 1.0)
        .fold(f64::INFINITY, f64::min);
    let max_e = eve_forms
        .iter()
        .map(|a| a.trace_with(s) + 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(min_u > 0.0) || !(max_e > 0.0) || !min_u.is_finite() || !max_e.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma update needs positive traces, got numerator {min_u} and denominator {max_e}"
        )));
    }
    Ok(min_u / max_e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaLabel {
    UserArea,
    EveArea,
}

/// Axis-aligned horizontal rectangle at height `z`, sampled on a lattice that
/// includes its corners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaBox {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: f64,
    /// Lattice points along x and y.
    pub grid: [usize; 2],
}

impl AreaBox {
    pub fn center(&self) -> Vec3 {
        Vec3::new(0.5 * (self.x[0] + self.x[1]), 0.5 * (self.y[0] + self.y[1]), self.z)
    }

    pub fn contains(&self, p: &Vec3, tol: f64) -> bool {
        p.x >= self.x[0] - tol
            && p.x <= self.x[1] + tol
            && p.y >= self.y[0] - tol
            && p.y <= self.y[1] + tol
            && (p.z - self.z).abs() <= tol
    }

    pub fn validate(&self, name: &str) -> Vec<String> {
        let mut problems = Vec::new();
        for (axis, r) in [("x", self.x), ("y", self.y)] {
            if !(r[0] < r[1]) || !r[0].is_finite() || !r[1].is_finite() {
                problems.push(format!("{name}.{axis} must be an increasing finite range, got {r:?}"));
            }
        }
        if !self.z.is_finite() {
            problems.push(format!("{name}.z must be finite"));
        }
        if self.grid.contains(&0) {
            problems.push(format!("{name}.grid entries must be at least 1, got {:?}", self.grid));
        }
        problems
    }

    /// Lattice with `grid[0] × grid[1]` points, x-major; a single point along
    /// an axis sits at the midpoint.
    pub fn lattice(&self, label: AreaLabel) -> PositionGrid {
        let axis = |r: [f64; 2], k: usize| -> Vec<f64> {
            if k <= 1 {
                vec![0.5 * (r[0] + r[1])]
            } else {
                (0..k)
                    .map(|i| r[0] + (r[1] - r[0]) * i as f64 / (k - 1) as f64)
                    .collect()
            }
        };
        let xs = axis(self.x, self.grid[0]);
        let ys = axis(self.y, self.grid[1]);
        let points = xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
            .map(|(x, y)| Vec3::new(x, y, self.z))
            .collect();
        PositionGrid { points, label }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid {
    pub points: Vec<Vec3>,
    pub label: AreaLabel,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_upa, wavelength};
    use crate::linalg::phasor_vector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, n_t: usize, users: usize, eves: usize) -> ChannelInstance {
        let h_t = CMatrix::from_fn(n, n_t, |_, _| rand_c(rng));
        let hu = (0..users).map(|_| CVector::from_fn(n, |_, _| rand_c(rng))).collect();
        let he = (0..eves).map(|_| CVector::from_fn(n, |_, _| rand_c(rng))).collect();
        ChannelInstance::new(h_t, hu, he, 0.2).unwrap()
    }

    #[test]
    fn snr_examples() {
        let h = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)]);
        assert_eq!(snr(&h, &CVector::zeros(2), 1.0).unwrap(), 0.0);
        let probe = CVector::from_vec(vec![C64::new(0.0, 2.0), C64::new(-1.0, 0.0)]);
        let orth = &probe - &h * (h.dotc(&probe) / h.dotc(&h));
        assert!(snr(&h, &orth, 1.0).unwrap() < 1e-24);
        let q = &h * C64::new(3.0, 0.0);
        let expected = h.norm_squared() * q.norm_squared() / 0.5;
        assert!((snr(&h, &q, 0.5).unwrap() - expected).abs() < 1e-12 * expected);
        assert!(snr(&h, &q, 0.0).is_err());
    }

    #[test]
    fn secrecy_rate_examples() {
        assert_eq!(secrecy_rate(2.0, 2.0), 0.0);
        assert_eq!(secrecy_rate(0.0, 10.0), 0.0);
        assert!((secrecy_rate(3.0, 1.0) - 1.0).abs() < 1e-15);
        assert!(rate_gap(0.0, 10.0) < 0.0);
    }

    #[test]
    fn worst_case_equals_pair_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, 5, 3, 9, 9);
            let w: Vec<f64> = (0..5).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
            let q = CVector::from_fn(3, |_, _| rand_c(&mut rng));
            let mut brute = f64::INFINITY;
            for u in 0..9 {
                for e in 0..9 {
                    let su = snr(
                        &inst.effective_channel(Receiver::User, u, &w).unwrap(),
                        &q,
                        inst.noise_power,
                    )
                    .unwrap();
                    let se = snr(
                        &inst.effective_channel(Receiver::Eavesdropper, e, &w).unwrap(),
                        &q,
                        inst.noise_power,
                    )
                    .unwrap();
                    brute = brute.min(secrecy_rate(su, se));
                }
            }
            let fast = worst_case_secrecy_rate(&inst, &w, &q).unwrap();
            assert!((fast - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn worst_case_single_pair_and_duplicates() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let inst = random_instance(&mut rng, 4, 2, 1, 1);
        let w = [0.1, 0.2, 0.3, 0.4];
        let q = CVector::from_fn(2, |_, _| rand_c(&mut rng));
        let su = snr(&inst.effective_channel(Receiver::User, 0, &w).unwrap(), &q, 0.2).unwrap();
        let se = snr(&inst.effective_channel(Receiver::Eavesdropper, 0, &w).unwrap(), &q, 0.2).unwrap();
        assert_eq!(worst_case_secrecy_rate(&inst, &w, &q).unwrap(), secrecy_rate(su, se));
        let dup = ChannelInstance::new(
            inst.bs_to_ris.clone(),
            inst.ris_to_user.clone(),
            vec![inst.ris_to_eve[0].clone(), inst.ris_to_eve[0].clone()],
            0.2,
        )
        .unwrap();
        assert_eq!(
            worst_case_secrecy_rate(&dup, &w, &q).unwrap(),
            worst_case_secrecy_rate(&inst, &w, &q).unwrap()
        );
    }

    #[test]
    fn los_beamformer_power() {
        let lambda = wavelength(28e9);
        let bs = build_upa(
            4,
            4,
            lambda / 2.0,
            Vec3::new(30.0, 0.0, 5.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
            lambda,
        )
        .unwrap();
        let b = los_beamformer(&bs, &Vec3::zeros(), 10.0).unwrap();
        assert!((b.q.norm_squared() - 10.0).abs() < 1e-9 * 10.0);
        let single = ArrayGeometry::single(Vec3::new(1.0, 0.0, 0.0), lambda);
        let b1 = los_beamformer(&single, &Vec3::zeros(), 4.0).unwrap();
        assert!((b1.q[0].norm() - 2.0).abs() < 1e-12);
        assert!(los_beamformer(&bs, &Vec3::zeros(), 0.0).is_err());
    }

    #[test]
    fn gamma_update_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let v = CVector::from_fn(2, |_, _| rand_c(&mut rng));
        let a = QuadraticForm::from_generator(&v, 0.5);
        let s = CMatrix::identity(2, 2);
        assert!((gamma_update(&s, std::slice::from_ref(&a), std::slice::from_ref(&a)).unwrap() - 1.0).abs() < 1e-15);
        let zero = QuadraticForm {
            matrix: CMatrix::zeros(2, 2),
        };
        let g = gamma_update(&s, std::slice::from_ref(&a), &[zero]).unwrap();
        assert!((g - (a.trace_with(&s) + 1.0)).abs() < 1e-14);
        assert!(gamma_update(&s, &[], &[a]).is_err());
    }

    #[test]
    fn gamma_update_matches_ratio_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let forms: Vec<QuadraticForm> = (0..6)
                .map(|_| QuadraticForm::from_generator(&CVector::from_fn(2, |_, _| rand_c(&mut rng)), 0.3))
                .collect();
            let g = CMatrix::from_fn(2, 2, |_, _| rand_c(&mut rng));
            let s = &g * g.adjoint();
            let (us, es) = forms.split_at(3);
            let mut brute = f64::INFINITY;
            for u in us {
                for e in es {
                    let num = (&u.matrix * &s).trace().re + 1.0;
                    let den = (&e.matrix * &s).trace().re + 1.0;
                    brute = brute.min(num / den);
                }
            }
            assert!((gamma_update(&s, us, es).unwrap() - brute).abs() < 1e-12 * brute);
        }
    }

    #[test]
    fn lifted_gamma_matches_direct_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut checked = 0;
        while checked < 10 {
            let inst = random_instance(&mut rng, 4, 2, 3, 3);
            let q = CVector::from_fn(2, |_, _| rand_c(&mut rng));
            let w: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
            let sr = worst_case_secrecy_rate(&inst, &w, &q).unwrap();
            if sr <= 0.0 {
                continue;
            }
            let s = phasor_vector(&w);
            let s = &s * s.adjoint();
            let uf = inst.quadratic_forms(Receiver::User, &q).unwrap();
            let ef = inst.quadratic_forms(Receiver::Eavesdropper, &q).unwrap();
            let g = gamma_update(&s, &uf, &ef).unwrap();
            assert!((g.log2() - sr).abs() < 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn lattice_includes_corners() {
        let b = AreaBox {
            x: [4.5, 5.5],
            y: [-0.5, 0.5],
            z: -5.0,
            grid: [3, 3],
        };
        let g = b.lattice(AreaLabel::UserArea);
        assert_eq!(g.points.len(), 9);
        assert_eq!(g.points[0], Vec3::new(4.5, -0.5, -5.0));
        assert_eq!(g.points[8], Vec3::new(5.5, 0.5, -5.0));
        assert_eq!(g.points[4], Vec3::new(5.0, 0.0, -5.0));
        assert!(g.points.iter().all(|p| b.contains(p, 0.0)));
        let one = AreaBox { grid: [1, 1], ..b }.lattice(AreaLabel::UserArea);
        assert_eq!(one.points, vec![b.center()]);
    }
}
