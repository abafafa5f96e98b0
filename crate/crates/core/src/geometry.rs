//! Array geometry, near-field steering vectors and channel construction.
//!
//! Steering vectors use the spherical-wave (near-field) phase
//! `exp(−jκ‖u_n − p‖)` normalized to unit Euclidean norm. LOS channels are the
//! rank-one product `c₀ · a_rx(p_tx) · a_tx(p_rx)ᴴ` with `c₀` taken from the
//! center-to-center distance; element-level range differences only enter
//! through the steering phases.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{all_finite, frob_norm_sq, CMatrix, CVector, C64};

pub type Vec3 = Vector3<f64>;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn wavelength(carrier_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_hz
}

/// Element positions of a (possibly degenerate 1×1) planar array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<Vec3>,
    center: Vec3,
    rows: usize,
    cols: usize,
    wavelength: f64,
}

impl ArrayGeometry {
    /// A single element at `point`, used for single-antenna receivers.
    pub fn single(point: Vec3, wavelength: f64) -> Self {
        Self {
            positions: vec![point],
            center: point,
            rows: 1,
            cols: 1,
            wavelength,
        }
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }
}

/// Uniform planar array centred on `center`; element `(i, j)` sits at
/// `center + (i − (rows−1)/2)·spacing·axis_u + (j − (cols−1)/2)·spacing·axis_v`
/// and gets flat index `i·cols + j`.
pub fn build_upa(
    rows: usize,
    cols: usize,
    spacing: f64,
    center: Vec3,
    axis_u: Vec3,
    axis_v: Vec3,
    wavelength: f64,
) -> Result<ArrayGeometry> {
    if rows == 0 || cols == 0 {
        return Err(Error::Geometry(format!("array shape {rows}x{cols} is empty")));
    }
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::Geometry(format!(
            "element spacing must be positive, got {spacing}"
        )));
    }
    if !(wavelength > 0.0) {
        return Err(Error::Geometry(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !center.iter().all(|c| c.is_finite()) {
        return Err(Error::Geometry("array center is not finite".into()));
    }
    for (name, axis) in [("axis_u", &axis_u), ("axis_v", &axis_v)] {
        if (axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Geometry(format!(
                "{name} must be unit-norm, |{name}| = {}",
                axis.norm()
            )));
        }
    }
    if axis_u.dot(&axis_v).abs() > 1e-9 {
        return Err(Error::Geometry(format!(
            "array axes are not orthogonal (u·v = {})",
            axis_u.dot(&axis_v)
        )));
    }
    let ru = (rows as f64 - 1.0) / 2.0;
    let rv = (cols as f64 - 1.0) / 2.0;
    let mut positions = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let du = (i as f64 - ru) * spacing;
            let dv = (j as f64 - rv) * spacing;
            positions.push(center + axis_u * du + axis_v * dv);
        }
    }
    Ok(ArrayGeometry {
        positions,
        center,
        rows,
        cols,
        wavelength,
    })
}

/// Unit-norm near-field steering vector of `geom` towards `point`.
pub fn steering_vector(geom: &ArrayGeometry, point: &Vec3) -> Result<CVector> {
    let kappa = geom.wavenumber();
    let scale = 1.0 / (geom.len() as f64).sqrt();
    let min_distance = 1e-9 * geom.wavelength;
    let mut out = CVector::zeros(geom.len());
    for (n, u) in geom.positions.iter().enumerate() {
        let d = (u - point).norm();
        if !(d > min_distance) {
            return Err(Error::Geometry(format!(
                "point {point:?} coincides with array element {n}"
            )));
        }
        out[n] = C64::from_polar(scale, -kappa * d);
    }
    Ok(out)
}

/// Distance-based pathloss `ρ (d₀/d)^σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossParams {
    /// Gain at the reference distance, in dB (e.g. −61).
    #[serde(rename = "rho_dB")]
    pub rho_db: f64,
    /// Reference distance in metres.
    pub d0: f64,
    /// Pathloss exponent σ.
    pub exponent: f64,
}

impl Default for PathlossParams {
    fn default() -> Self {
        Self {
            rho_db: -61.0,
            d0: 1.0,
            exponent: 2.0,
        }
    }
}

impl PathlossParams {
    pub fn power_gain(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Geometry(format!("pathloss distance must be positive, got {d}")));
        }
        Ok(10f64.powf(self.rho_db / 10.0) * (self.d0 / d).powf(self.exponent))
    }
}

/// Amplitude gain `c₀ = sqrt(ρ (d₀/d)^σ)`.
pub fn pathloss_gain(params: &PathlossParams, d: f64) -> Result<f64> {
    Ok(params.power_gain(d)?.sqrt())
}

/// How the LOS amplitude scales with the array sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ApertureGain {
    /// `‖H‖_F = c₀`: the whole link carries the pathloss amplitude.
    Normalized,
    /// Every element pair carries amplitude `c₀`, so
    /// `‖H‖_F = c₀·sqrt(N_rx·N_tx)`.
    #[default]
    PerElement,
}

impl ApertureGain {
    fn factor(self, n_rx: usize, n_tx: usize) -> f64 {
        match self {
            ApertureGain::Normalized => 1.0,
            ApertureGain::PerElement => ((n_rx * n_tx) as f64).sqrt(),
        }
    }
}

/// Rank-one LOS channel from `tx` to `rx` (`N_rx × N_tx`).
pub fn los_channel(
    tx: &ArrayGeometry,
    rx: &ArrayGeometry,
    pathloss: &PathlossParams,
    gain: ApertureGain,
) -> Result<CMatrix> {
    let d = (rx.center() - tx.center()).norm();
    if !(d > 0.0) {
        return Err(Error::Geometry("transmit and receive arrays overlap".into()));
    }
    let c0 = pathloss_gain(pathloss, d)? * gain.factor(rx.len(), tx.len());
    let a_rx = steering_vector(rx, &tx.center())?;
    let a_tx = steering_vector(tx, &rx.center())?;
    Ok(a_rx * a_tx.adjoint() * C64::new(c0, 0.0))
}

/// Rician mixture `sqrt(K/(K+1))·los + sqrt(1/(K+1))·diffuse`.
///
/// The diffuse part has i.i.d. circularly-symmetric Gaussian entries whose
/// expected squared Frobenius norm equals that of `los`. The draw is a pure
/// function of `seed`.
pub fn rician_channel(los: &CMatrix, k_factor: f64, seed: u64) -> Result<CMatrix> {
    if !(k_factor >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "K-factor must be non-negative, got {k_factor}"
        )));
    }
    if k_factor.is_infinite() {
        return Ok(los.clone());
    }
    let entries = (los.nrows() * los.ncols()).max(1) as f64;
    let sigma = (frob_norm_sq(los) / entries / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diffuse = CMatrix::from_fn(los.nrows(), los.ncols(), |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C64::new(sigma * re, sigma * im)
    });
    let los_weight = (k_factor / (k_factor + 1.0)).sqrt();
    let nlos_weight = (1.0 / (k_factor + 1.0)).sqrt();
    Ok(los * C64::new(los_weight, 0.0) + diffuse * C64::new(nlos_weight, 0.0))
}

/// Which receiver a channel quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    User,
    Eavesdropper,
}

/// Channels for one scenario draw: the BS→RIS matrix and RIS→receiver
/// vectors for every evaluated user and eavesdropper position.
#[derive(Debug, Clone)]
pub struct ChannelInstance {
    /// `H_t`, `N × N_t`.
    pub bs_to_ris: CMatrix,
    /// `h_{r,u}` per user position (length `N`).
    pub ris_to_user: Vec<CVector>,
    /// `h_{r,e}` per eavesdropper position (length `N`).
    pub ris_to_eve: Vec<CVector>,
    /// Direct BS links, blocked (all zero).
    pub direct_user: Vec<CVector>,
    pub direct_eve: Vec<CVector>,
    /// Noise power in watts.
    pub noise_power: f64,
}

impl ChannelInstance {
    pub fn new(
        bs_to_ris: CMatrix,
        ris_to_user: Vec<CVector>,
        ris_to_eve: Vec<CVector>,
        noise_power: f64,
    ) -> Result<Self> {
        if !(noise_power > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise power must be positive, got {noise_power}"
            )));
        }
        if !all_finite(&bs_to_ris) {
            return Err(Error::NonFinite("BS-RIS channel"));
        }
        let n = bs_to_ris.nrows();
        for h in ris_to_user.iter().chain(&ris_to_eve) {
            if h.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "RIS-receiver channel",
                    expected: n,
                    got: h.len(),
                });
            }
            if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("RIS-receiver channel"));
            }
        }
        let n_t = bs_to_ris.ncols();
        Ok(Self {
            direct_user: vec![CVector::zeros(n_t); ris_to_user.len()],
            direct_eve: vec![CVector::zeros(n_t); ris_to_eve.len()],
            bs_to_ris,
            ris_to_user,
            ris_to_eve,
            noise_power,
        })
    }

    pub fn ris_elements(&self) -> usize {
        self.bs_to_ris.nrows()
    }

    pub fn tx_antennas(&self) -> usize {
        self.bs_to_ris.ncols()
    }

    pub fn receivers(&self, which: Receiver) -> usize {
        match which {
            Receiver::User => self.ris_to_user.len(),
            Receiver::Eavesdropper => self.ris_to_eve.len(),
        }
    }

    fn links(&self, which: Receiver, index: usize) -> Result<(&CVector, &CVector)> {
        let (reflected, direct) = match which {
            Receiver::User => (&self.ris_to_user, &self.direct_user),
            Receiver::Eavesdropper => (&self.ris_to_eve, &self.direct_eve),
        };
        match (reflected.get(index), direct.get(index)) {
            (Some(r), Some(d)) => Ok((r, d)),
            _ => Err(Error::DimensionMismatch {
                context: "receiver index",
                expected: reflected.len(),
                got: index,
            }),
        }
    }

    /// End-to-end channel `h_eff` with `h_effᴴ = h_dᴴ + h_rᴴ Γ H_t`,
    /// `Γ = diag(e^{jω_n})` (unit reflection amplitude).
    pub fn effective_channel(&self, which: Receiver, index: usize, phases: &[f64]) -> Result<CVector> {
        let n = self.ris_elements();
        if phases.len() != n {
            return Err(Error::DimensionMismatch {
                context: "phase vector",
                expected: n,
                got: phases.len(),
            });
        }
        let (h_r, h_d) = self.links(which, index)?;
        // Γᴴ h_r
        let reflected = CVector::from_iterator(
            n,
            phases
                .iter()
                .zip(h_r.iter())
                .map(|(&w, &h)| C64::from_polar(1.0, -w) * h),
        );
        Ok(h_d + self.bs_to_ris.adjoint() * reflected)
    }

    /// Lifted SNR form `A` with `sᴴ A s = |h_effᴴ q|²/σ²` for
    /// `s = [e^{jω_1}, …, e^{jω_N}]ᵀ`; direct links are blocked.
    pub fn quadratic_form(&self, which: Receiver, index: usize, q: &CVector) -> Result<QuadraticForm> {
        if q.len() != self.tx_antennas() {
            return Err(Error::DimensionMismatch {
                context: "beamformer",
                expected: self.tx_antennas(),
                got: q.len(),
            });
        }
        let (h_r, _) = self.links(which, index)?;
        let w = &self.bs_to_ris * q;
        let v = CVector::from_iterator(w.len(), h_r.iter().zip(w.iter()).map(|(h, w)| h * w.conj()));
        Ok(QuadraticForm::from_generator(&v, self.noise_power))
    }

    pub fn quadratic_forms(&self, which: Receiver, q: &CVector) -> Result<Vec<QuadraticForm>> {
        (0..self.receivers(which))
            .map(|i| self.quadratic_form(which, i, q))
            .collect()
    }
}

/// Hermitian PSD rank-one matrix `A = v vᴴ / σ²`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub matrix: CMatrix,
}

impl QuadraticForm {
    pub fn from_generator(v: &CVector, noise_power: f64) -> Self {
        Self {
            matrix: v * v.adjoint() * C64::new(1.0 / noise_power, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `sᴴ A s`.
    pub fn value(&self, s: &CVector) -> f64 {
        (s.adjoint() * &self.matrix * s)[(0, 0)].re
    }

    /// `Re tr(A S)`.
    pub fn trace_with(&self, s: &CMatrix) -> f64 {
        crate::linalg::re_trace_product(&self.matrix, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::phasor_vector;
    use rand::Rng;

    fn y() -> Vec3 {
        Vec3::new(0.0, 1.0, 0.0)
    }
    fn z() -> Vec3 {
        Vec3::new(0.0, 0.0, 1.0)
    }

    #[test]
    fn upa_single_element_at_center() {
        let c = Vec3::new(1.0, 2.0, 3.0);
        let g = build_upa(1, 1, 0.5, c, y(), z(), 0.01).unwrap();
        assert_eq!(g.positions(), &[c]);
    }

    #[test]
    fn upa_two_by_two_corners() {
        let g = build_upa(2, 2, 1.0, Vec3::zeros(), y(), z(), 0.01).unwrap();
        let expected = [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)];
        for (p, (ey, ez)) in g.positions().iter().zip(expected) {
            assert_eq!(*p, Vec3::new(0.0, ey, ez));
        }
    }

    #[test]
    fn upa_ris_extent_and_centroid() {
        let lambda = wavelength(28e9);
        let g = build_upa(20, 10, lambda / 2.0, Vec3::zeros(), y(), z(), lambda).unwrap();
        assert_eq!(g.len(), 200);
        let max_y = g.positions().iter().map(|p| p.y).fold(f64::MIN, f64::max);
        let max_z = g.positions().iter().map(|p| p.z).fold(f64::MIN, f64::max);
        assert!((max_y - 9.5 * lambda / 2.0).abs() < 1e-15);
        assert!((max_z - 4.5 * lambda / 2.0).abs() < 1e-15);
        let centroid: Vec3 = g.positions().iter().sum::<Vec3>() / 200.0;
        assert!(centroid.norm() < 1e-15);
        // neighbour spacing along each axis
        let d_u = (g.positions()[10] - g.positions()[0]).norm();
        let d_v = (g.positions()[1] - g.positions()[0]).norm();
        assert!((d_u - lambda / 2.0).abs() < 1e-15 && (d_v - lambda / 2.0).abs() < 1e-15);
    }

    #[test]
    fn upa_rejects_bad_axes() {
        let skew = Vec3::new(0.0, 1.0, 1.0).normalize();
        assert!(build_upa(2, 2, 1.0, Vec3::zeros(), y(), skew, 0.01).is_err());
        assert!(build_upa(2, 2, 1.0, Vec3::zeros(), y() * 2.0, z(), 0.01).is_err());
        assert!(build_upa(2, 2, 0.0, Vec3::zeros(), y(), z(), 0.01).is_err());
    }

    #[test]
    fn steering_vector_symmetric_pair() {
        let lambda = 0.01;
        let g = build_upa(2, 1, lambda / 2.0, Vec3::zeros(), y(), z(), lambda).unwrap();
        let p = Vec3::new(3.0, 0.0, 0.0);
        let a = steering_vector(&g, &p).unwrap();
        let d = (g.positions()[0] - p).norm();
        let expected = C64::from_polar(1.0 / 2f64.sqrt(), -g.wavenumber() * d);
        assert!((a[0] - expected).norm() < 1e-12);
        assert!((a[1] - expected).norm() < 1e-12);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn steering_vector_single_and_coincident() {
        let g = ArrayGeometry::single(Vec3::zeros(), 0.01);
        let a = steering_vector(&g, &Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-15);
        assert!(steering_vector(&g, &Vec3::zeros()).is_err());
    }

    #[test]
    fn pathloss_examples() {
        let p = PathlossParams::default();
        let g = pathloss_gain(&p, 1.0).unwrap();
        assert!((g * g - 10f64.powf(-6.1)).abs() < 1e-20);
        let g10 = pathloss_gain(&p, 10.0).unwrap();
        assert!((20.0 * g10.log10() - (-81.0)).abs() < 1e-10);
        let flat = PathlossParams { exponent: 0.0, ..p };
        assert_eq!(pathloss_gain(&flat, 3.0).unwrap(), pathloss_gain(&flat, 30.0).unwrap());
        assert!(pathloss_gain(&p, 0.0).is_err());
    }

    fn default_arrays() -> (ArrayGeometry, ArrayGeometry) {
        let lambda = wavelength(28e9);
        let bs = build_upa(4, 4, lambda / 2.0, Vec3::new(30.0, 0.0, 5.0), y(), z(), lambda).unwrap();
        let ris = build_upa(20, 10, lambda / 2.0, Vec3::zeros(), y(), z(), lambda).unwrap();
        (bs, ris)
    }

    #[test]
    fn los_channel_norm_and_rank() {
        let (bs, ris) = default_arrays();
        let pl = PathlossParams::default();
        let h = los_channel(&bs, &ris, &pl, ApertureGain::Normalized).unwrap();
        assert_eq!(h.shape(), (200, 16));
        let d = bs.center().norm();
        assert!((d - 30.4138).abs() < 1e-4);
        let c0 = pathloss_gain(&pl, d).unwrap();
        assert!((frob_norm_sq(&h).sqrt() - c0).abs() < 1e-12 * c0);
        let sv = h.clone().singular_values();
        let mut s: Vec<f64> = sv.iter().cloned().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(s[1] < 1e-12 * s[0]);
        let per = los_channel(&bs, &ris, &pl, ApertureGain::PerElement).unwrap();
        assert!((frob_norm_sq(&per).sqrt() - c0 * (3200f64).sqrt()).abs() < 1e-9 * c0);
    }

    #[test]
    fn los_channel_scalar_case() {
        let a = ArrayGeometry::single(Vec3::zeros(), 0.01);
        let b = ArrayGeometry::single(Vec3::new(0.0, 4.0, 0.0), 0.01);
        let pl = PathlossParams::default();
        let h = los_channel(&a, &b, &pl, ApertureGain::Normalized).unwrap();
        assert!((h[(0, 0)].norm() - pathloss_gain(&pl, 4.0).unwrap()).abs() < 1e-18);
        assert!(los_channel(&a, &a, &pl, ApertureGain::Normalized).is_err());
    }

    #[test]
    fn rician_limits_and_determinism() {
        let (bs, ris) = default_arrays();
        let los = los_channel(&bs, &ris, &PathlossParams::default(), ApertureGain::Normalized).unwrap();
        let huge = rician_channel(&los, 1e12, 3).unwrap();
        let rel = frob_norm_sq(&(&huge - &los)).sqrt() / frob_norm_sq(&los).sqrt();
        assert!(rel < 1e-6, "{rel}");
        let a = rician_channel(&los, 10.0, 42).unwrap();
        let b = rician_channel(&los, 10.0, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, rician_channel(&los, 10.0, 43).unwrap());
        assert!(rician_channel(&los, -1.0, 0).is_err());
    }

    #[test]
    fn rician_pure_diffuse_power() {
        let lambda = 0.01;
        let tx = build_upa(2, 2, lambda / 2.0, Vec3::new(5.0, 0.0, 0.0), y(), z(), lambda).unwrap();
        let rx = build_upa(3, 2, lambda / 2.0, Vec3::zeros(), y(), z(), lambda).unwrap();
        let los = los_channel(&tx, &rx, &PathlossParams::default(), ApertureGain::Normalized).unwrap();
        let target = frob_norm_sq(&los);
        let mean = (0..1000u64)
            .map(|s| frob_norm_sq(&rician_channel(&los, 0.0, s).unwrap()))
            .sum::<f64>()
            / 1000.0;
        assert!((mean / target - 1.0).abs() < 0.05, "{}", mean / target);
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, n_t: usize) -> ChannelInstance {
        let mut cn = || C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let h_t = CMatrix::from_fn(n, n_t, |_, _| cn());
        let hu = CVector::from_fn(n, |_, _| cn());
        let he = CVector::from_fn(n, |_, _| cn());
        ChannelInstance::new(h_t, vec![hu], vec![he], 0.37).unwrap()
    }

    #[test]
    fn effective_channel_identity_reflection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = random_instance(&mut rng, 4, 3);
        let h = inst.effective_channel(Receiver::User, 0, &[0.0; 4]).unwrap();
        let expected = inst.bs_to_ris.adjoint() * &inst.ris_to_user[0];
        assert!((h - expected).norm() < 1e-14);
        assert!(inst.effective_channel(Receiver::User, 0, &[0.0; 3]).is_err());
        assert!(inst.effective_channel(Receiver::User, 1, &[0.0; 4]).is_err());
    }

    #[test]
    fn effective_channel_single_element_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let inst = random_instance(&mut rng, 1, 3);
        let a = inst.effective_channel(Receiver::Eavesdropper, 0, &[0.0]).unwrap();
        let b = inst.effective_channel(Receiver::Eavesdropper, 0, &[2.1]).unwrap();
        for k in 0..3 {
            assert!((a[k].norm() - b[k].norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_form_matches_direct_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = random_instance(&mut rng, 4, 3);
        let q = CVector::from_fn(3, |_, _| C64::new(rng.random::<f64>(), rng.random::<f64>()));
        for which in [Receiver::User, Receiver::Eavesdropper] {
            let form = inst.quadratic_form(which, 0, &q).unwrap();
            assert!(crate::linalg::hermitian_defect(&form.matrix) < 1e-15);
            for _ in 0..20 {
                let w: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * 6.3).collect();
                let h = inst.effective_channel(which, 0, &w).unwrap();
                let direct = (h.adjoint() * &q)[(0, 0)].norm_sqr() / inst.noise_power;
                let lifted = form.value(&phasor_vector(&w));
                assert!(((lifted - direct) / direct).abs() < 1e-10);
            }
        }
        let zero = inst.quadratic_form(Receiver::User, 0, &CVector::zeros(3)).unwrap();
        assert!(zero.matrix.iter().all(|z| z.norm() == 0.0));
    }
}
