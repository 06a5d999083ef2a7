//! The single comparison rule used for exact identities that only hold up to
//! rounding: `|a - b| <= EPS_MASS * (1 + magnitude)`.

pub const EPS_MASS: f64 = 1e-9;

/// Minimum separation a certificate must achieve to be reported.
pub const CERTIFICATE_MARGIN: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps_mass: f64,
    pub certificate_margin: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_mass: EPS_MASS,
            certificate_margin: CERTIFICATE_MARGIN,
        }
    }
}

impl Tolerance {
    pub fn slack(&self, a: f64, b: f64) -> f64 {
        self.eps_mass * (1.0 + a.abs().max(b.abs()))
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.slack(a, b)
    }

    /// `a <= b` up to the slack.
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.slack(a, b)
    }
}

pub fn approx_eq(a: f64, b: f64) -> bool {
    Tolerance::default().eq(a, b)
}

pub fn approx_le(a: f64, b: f64) -> bool {
    Tolerance::default().le(a, b)
}
