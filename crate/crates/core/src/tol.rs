use serde::{Deserialize, Serialize};

/// Name of the environment variable that scales every tolerance.
pub const TOL_SCALE_ENV: &str = "POLARGAP_TOL_SCALE";

/// Numerical tolerances used across the crate.
///
/// Defaults are double-precision values; [`Tolerances::scaled`] multiplies
/// all of them by one factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Radius around lattice points where evaluation refuses to proceed.
    pub pole_radius: f64,
    /// Imaginary residue allowed on values that must be real.
    pub non_real: f64,
    /// Identities of the Weierstrass kernel (Legendre, invariants).
    pub lattice_identity: f64,
    /// Differential-equation residual of wp.
    pub wp_ode: f64,
    /// Pointwise agreement of two closed forms of the same function.
    pub pointwise: f64,
    /// Finite-difference check X' = R.
    pub derivative: f64,
    /// Periodicity and closed-form period agreement.
    pub period: f64,
    /// Holdout residual of the linear alpha fit.
    pub fit_holdout: f64,
    /// Relative variation of the Backlund product R_hat * R.
    pub product: f64,
    /// Band-edge agreement.
    pub edge: f64,
    /// Band-edge bisection width.
    pub bisection: f64,
    /// Local error target of the monodromy integrator.
    pub ode_local: f64,
    /// |det M - 1| allowed for a monodromy matrix.
    pub wronskian: f64,
    /// Inversion x -> y, relative to the x period.
    pub inversion: f64,
    /// Allowed RMS residual of a log-log cusp fit.
    pub cusp_fit: f64,
    /// Allowed deviation of a measured cusp exponent.
    pub cusp_exponent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pole_radius: 1e-8,
            non_real: 1e-10,
            lattice_identity: 1e-12,
            wp_ode: 1e-10,
            pointwise: 1e-10,
            derivative: 1e-8,
            period: 1e-9,
            fit_holdout: 1e-8,
            product: 1e-8,
            edge: 1e-6,
            bisection: 1e-9,
            ode_local: 1e-12,
            wronskian: 1e-9,
            inversion: 1e-11,
            cusp_fit: 0.05,
            cusp_exponent: 0.02,
        }
    }
}

impl Tolerances {
    /// All tolerances multiplied by `k`.
    pub fn scaled(self, k: f64) -> Self {
        Self {
            pole_radius: self.pole_radius * k,
            non_real: self.non_real * k,
            lattice_identity: self.lattice_identity * k,
            wp_ode: self.wp_ode * k,
            pointwise: self.pointwise * k,
            derivative: self.derivative * k,
            period: self.period * k,
            fit_holdout: self.fit_holdout * k,
            product: self.product * k,
            edge: self.edge * k,
            bisection: self.bisection * k,
            ode_local: self.ode_local * k,
            wronskian: self.wronskian * k,
            inversion: self.inversion * k,
            cusp_fit: self.cusp_fit * k,
            cusp_exponent: self.cusp_exponent * k,
        }
    }

    /// Defaults scaled by `POLARGAP_TOL_SCALE` when it is set to a positive float.
    pub fn from_env() -> std::result::Result<Self, String> {
        match std::env::var(TOL_SCALE_ENV) {
            Err(_) => Ok(Self::default()),
            Ok(raw) => {
                let k: f64 = raw
                    .trim()
                    .parse()
                    .map_err(|_| format!("{TOL_SCALE_ENV}={raw:?} is not a number"))?;
                if !(k.is_finite() && k > 0.0) {
                    return Err(format!("{TOL_SCALE_ENV} must be positive, got {k}"));
                }
                Ok(Self::default().scaled(k))
            }
        }
    }
}
