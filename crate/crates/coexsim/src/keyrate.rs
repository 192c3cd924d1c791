//! Asymptotic secret key rate for Gaussian-modulated coherent states with
//! homodyne detection, against collective attacks in the trusted-detector
//! model.
//!
//! Variances are in shot-noise units throughout. The channel is summarized
//! by its transmittance and the excess noise referred to the channel input;
//! detector imperfections enter as trusted loss and electronic noise.

use thiserror::Error;

/// Planck constant in J s (2019 SI exact value).
pub const H_PLANCK: f64 = 6.62607015e-34;
/// Boltzmann constant in J/K (2019 SI exact value).
pub const K_BOLTZMANN: f64 = 1.380649e-23;

/// Errors from key-rate evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum KeyRateError {
    /// Parameter outside its physical range.
    #[error("{name} must satisfy {constraint}, got {value}")]
    InvalidParam {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
    /// A symplectic-eigenvalue discriminant came out significantly negative,
    /// indicating an unphysical covariance matrix rather than rounding.
    #[error("covariance matrix not physical: discriminant {0} < -1e-9")]
    UnphysicalState(f64),
    /// Interference power, transmittance, or bandwidth that cannot be
    /// converted into an excess-noise figure.
    #[error("excess-noise inputs invalid: {0}")]
    InvalidNoiseInput(String),
}

/// Receiver and modulation parameters of the QKD link.
#[derive(Debug, Clone, PartialEq)]
pub struct QkdParams {
    /// Alice's modulation variance in shot-noise units.
    pub v_a: f64,
    /// Trusted detection efficiency, in (0, 1].
    pub eta_b: f64,
    /// Reconciliation efficiency, in (0, 1].
    pub beta_rec: f64,
    /// Trusted electronic noise variance in shot-noise units.
    pub v_el: f64,
    /// Receiver noise-integration bandwidth in Hz; converts interference
    /// power into shot-noise-referred excess noise.
    pub b_s: f64,
    /// Quantum-channel carrier frequency in Hz.
    pub f_q: f64,
    /// Symbol rate in symbols/s; converts bits/symbol into bits/s.
    pub r_s: f64,
}

impl Default for QkdParams {
    fn default() -> Self {
        QkdParams {
            v_a: 8.0,
            eta_b: 0.6,
            beta_rec: 0.95,
            v_el: 0.01,
            b_s: 3.5e10,
            f_q: 195.9375e12,
            r_s: 1.0e9,
        }
    }
}

impl QkdParams {
    /// Check every field against its physical range.
    pub fn validate(&self) -> Result<(), KeyRateError> {
        let checks: [(&str, &str, f64, bool); 7] = [
            ("v_a", "> 0", self.v_a, self.v_a > 0.0),
            (
                "eta_b",
                "in (0, 1]",
                self.eta_b,
                self.eta_b > 0.0 && self.eta_b <= 1.0,
            ),
            (
                "beta_rec",
                "in (0, 1]",
                self.beta_rec,
                self.beta_rec > 0.0 && self.beta_rec <= 1.0,
            ),
            ("v_el", ">= 0", self.v_el, self.v_el >= 0.0),
            ("b_s", "> 0", self.b_s, self.b_s > 0.0),
            ("f_q", "> 0", self.f_q, self.f_q > 0.0),
            ("r_s", "> 0", self.r_s, self.r_s > 0.0),
        ];
        for (name, constraint, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(KeyRateError::InvalidParam {
                    name,
                    constraint,
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Transmittance and input-referred excess noise of the quantum channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    /// Channel transmittance, in (0, 1].
    pub t: f64,
    /// Excess noise in shot-noise units, >= 0.
    pub xi: f64,
}

impl ChannelState {
    pub fn new(t: f64, xi: f64) -> Result<Self, KeyRateError> {
        if !(t > 0.0 && t <= 1.0) || !t.is_finite() {
            return Err(KeyRateError::InvalidParam {
                name: "t",
                constraint: "in (0, 1]",
                value: t,
            });
        }
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(KeyRateError::InvalidParam {
                name: "xi",
                constraint: ">= 0",
                value: xi,
            });
        }
        Ok(ChannelState { t, xi })
    }
}

/// Key-rate evaluation output, including the symplectic spectrum for
/// diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    /// Mutual information between Alice and Bob in bits/symbol.
    pub i_ab: f64,
    /// Holevo bound on Eve's information in bits/symbol.
    pub chi_be: f64,
    /// Secret key rate in bits/symbol, clamped at zero.
    pub skr_per_symbol: f64,
    /// Secret key rate in bits/s.
    pub skr_bps: f64,
    /// Symplectic eigenvalues (lambda1, lambda2, lambda3, lambda4).
    pub lambdas: [f64; 4],
}

/// Fiber transmittance over `length` meters at attenuation `alpha` (1/m).
pub fn transmittance(alpha_per_m: f64, length_m: f64) -> f64 {
    (-alpha_per_m * length_m).exp()
}

/// Convert dB/km attenuation into the natural 1/m coefficient.
pub fn alpha_from_db_per_km(alpha_db_km: f64) -> f64 {
    alpha_db_km * (10f64.ln() / 10.0) / 1000.0
}

/// Excess noise produced by broadband interference power `p_int` (watts)
/// landing in the receiver bandwidth, referred to the channel input.
///
/// Dividing by the transmittance refers the receiver-side photon flux back
/// to the input, where the covariance-matrix model defines excess noise.
pub fn excess_noise(p_int_w: f64, t: f64, f_q: f64, b_s: f64) -> Result<f64, KeyRateError> {
    if !p_int_w.is_finite() || p_int_w < 0.0 {
        return Err(KeyRateError::InvalidNoiseInput(format!(
            "interference power must be finite and >= 0, got {p_int_w}"
        )));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(KeyRateError::InvalidNoiseInput(format!(
            "transmittance must be in (0, 1], got {t}"
        )));
    }
    if !(f_q > 0.0) || !(b_s > 0.0) {
        return Err(KeyRateError::InvalidNoiseInput(format!(
            "carrier frequency and bandwidth must be positive, got f_q={f_q}, b_s={b_s}"
        )));
    }
    let xi = p_int_w / (t * H_PLANCK * f_q * b_s);
    if !xi.is_finite() {
        return Err(KeyRateError::InvalidNoiseInput(format!(
            "excess noise overflowed: {xi}"
        )));
    }
    Ok(xi)
}

/// Von Neumann entropy of a thermal state with symplectic eigenvalue
/// `2x + 1`, in bits. Continuous at x = 0 where the x log x term vanishes.
fn entropy_g(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

/// Negative-discriminant tolerance: anything beyond this is a genuinely
/// unphysical state, anything within is rounding and gets clamped.
const DISCRIMINANT_TOL: f64 = -1e-9;

fn symplectic_pair(sum: f64, product: f64) -> Result<(f64, f64), KeyRateError> {
    let disc = sum * sum - 4.0 * product;
    if disc < DISCRIMINANT_TOL {
        return Err(KeyRateError::UnphysicalState(disc));
    }
    let root = disc.max(0.0).sqrt();
    // Physical symplectic eigenvalues sit at or above the vacuum value 1;
    // dips below are rounding and get floored before the square root.
    let hi = ((sum + root) / 2.0).max(1.0).sqrt();
    let lo = ((sum - root) / 2.0).max(1.0).sqrt();
    Ok((hi, lo))
}

/// Secret key rate of the homodyne CV-QKD link over a channel with
/// transmittance `state.t` and excess noise `state.xi`.
pub fn key_rate(params: &QkdParams, state: &ChannelState) -> Result<KeyRateResult, KeyRateError> {
    params.validate()?;
    let s = ChannelState::new(state.t, state.xi)?;
    let (t, xi) = (s.t, s.xi);
    let v = params.v_a + 1.0;

    // Untrusted channel noise and trusted detector noise, both referred to
    // the channel input.
    let chi_line = (1.0 - t) / t + xi;
    let chi_hom = (1.0 + params.v_el) / params.eta_b - 1.0;
    let chi_tot = chi_line + chi_hom / t;

    let i_ab = 0.5 * ((v + chi_tot) / (1.0 + chi_tot)).log2();

    // Symplectic spectrum of the shared state before measurement.
    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line) * (v + chi_line);
    let b = t * t * (v * chi_line + 1.0) * (v * chi_line + 1.0);
    let (l1, l2) = symplectic_pair(a, b)?;

    // Spectrum of Eve's state conditioned on Bob's homodyne outcome.
    let sqrt_b = b.max(0.0).sqrt();
    let denom = t * (v + chi_tot);
    let c = (a * chi_hom + v * sqrt_b + t * (v + chi_line)) / denom;
    let d = sqrt_b * (v + sqrt_b * chi_hom) / denom;
    let (l3, l4) = symplectic_pair(c, d)?;

    let chi_be = entropy_g((l1 - 1.0) / 2.0) + entropy_g((l2 - 1.0) / 2.0)
        - entropy_g((l3 - 1.0) / 2.0)
        - entropy_g((l4 - 1.0) / 2.0);

    let skr_per_symbol = (params.beta_rec * i_ab - chi_be).max(0.0);
    Ok(KeyRateResult {
        i_ab,
        chi_be,
        skr_per_symbol,
        skr_bps: skr_per_symbol * params.r_s,
        lambdas: [l1, l2, l3, l4],
    })
}
