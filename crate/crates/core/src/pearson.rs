//! Pearson distribution system: sample moments, shape statistics, the κ type
//! criterion, the coefficients of the defining differential relation, and the
//! bounded-support Type I density fitted by the method of moments.
//!
//! Type I density, with `t = x - m0` on the open support `(m0 - c1, m0 + c2)`:
//!
//! ```text
//! f(x) = A0 * (1 + t/c1)^g1 * (1 - t/c2)^g2
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::quadrature::{Quadrature, QuadratureError};

/// Value `log_pdf` takes outside the support; about ln of the smallest
/// positive normal double.
pub const LOG_FLOOR: f64 = -690.0;

/// Tolerance on κ for the boundary classes (κ = 0 and κ = 1).
pub const KAPPA_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PearsonError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
    #[error("zero variance")]
    ZeroVariance,
    #[error("zero denominator in the kappa criterion")]
    ZeroKappaDenominator,
    #[error("zero denominator in the differential-equation coefficients")]
    ZeroOdeDenominator,
    #[error("not a Type I shape (classified as {0})")]
    NotTypeI(FamilyType),
    #[error("zero denominator in h")]
    ZeroHDenominator,
    #[error("invalid exponents g1 = {g1}, g2 = {g2} (both must exceed -1)")]
    InvalidExponents { g1: f64, g2: f64 },
    #[error("invalid support half-widths c1 = {c1}, c2 = {c2}")]
    InvalidSupport { c1: f64, c2: f64 },
    #[error("non-finite normalization constant")]
    InvalidNormalization,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
}

/// Mean and the second to fourth central moments (population convention).
///
/// `n` is the sample count; moments given analytically carry `n = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    pub n: u64,
}

impl Moments {
    /// Moments known in closed form rather than estimated from a sample.
    pub fn exact(mu1: f64, mu2: f64, mu3: f64, mu4: f64) -> Self {
        Self {
            mu1,
            mu2,
            mu3,
            mu4,
            n: 0,
        }
    }

    /// Exact moments of Beta(a, b) on (0, 1).
    pub fn beta(a: f64, b: f64) -> Self {
        let s = a + b;
        let mean = a / s;
        let var = a * b / (s * s * (s + 1.0));
        let skew = 2.0 * (b - a) * (s + 1.0).sqrt() / ((s + 2.0) * (a * b).sqrt());
        let excess = 6.0 * ((a - b).powi(2) * (s + 1.0) - a * b * (s + 2.0)) / (a * b * (s + 2.0) * (s + 3.0));
        Self::exact(mean, var, skew * var.powf(1.5), (excess + 3.0) * var * var)
    }

    /// Moments of `s * X + shift` given the moments of `X`.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        Self {
            mu1: scale * self.mu1 + shift,
            mu2: scale.powi(2) * self.mu2,
            mu3: scale.powi(3) * self.mu3,
            mu4: scale.powi(4) * self.mu4,
            n: self.n,
        }
    }
}

pub fn central_moments(samples: &[f64]) -> Result<Moments, PearsonError> {
    if samples.is_empty() {
        return Err(PearsonError::EmptySample);
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(PearsonError::NonFiniteSample);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in samples {
        let d = x - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    Ok(Moments {
        mu1: mean,
        mu2: s2 / n,
        mu3: s3 / n,
        mu4: s4 / n,
        n: samples.len() as u64,
    })
}

/// Skewness `S_k`, (non-excess) kurtosis `K_u` and the κ criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeStats {
    pub skewness: f64,
    pub kurtosis: f64,
    pub kappa: f64,
}

pub fn shape_stats(m: &Moments) -> Result<ShapeStats, PearsonError> {
    if !(m.mu2 > 0.0) {
        return Err(PearsonError::ZeroVariance);
    }
    let skewness = m.mu3 / m.mu2.powf(1.5);
    let kurtosis = m.mu4 / (m.mu2 * m.mu2);
    let sk2 = skewness * skewness;
    let denom = 4.0 * (4.0 * kurtosis - 3.0 * sk2) * (2.0 * kurtosis - 3.0 * sk2 - 6.0);
    if denom == 0.0 || !denom.is_finite() {
        return Err(PearsonError::ZeroKappaDenominator);
    }
    let kappa = sk2 * (kurtosis + 3.0).powi(2) / denom;
    Ok(ShapeStats {
        skewness,
        kurtosis,
        kappa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyType {
    TypeI,
    TypeIV,
    TypeVI,
    /// κ within [`KAPPA_EPS`] of 0 or 1.
    Boundary,
}

impl fmt::Display for FamilyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyType::TypeI => "Type I",
            FamilyType::TypeIV => "Type IV",
            FamilyType::TypeVI => "Type VI",
            FamilyType::Boundary => "Boundary",
        })
    }
}

pub fn select_type(s: &ShapeStats) -> FamilyType {
    let k = s.kappa;
    if k < -KAPPA_EPS {
        FamilyType::TypeI
    } else if k > KAPPA_EPS && k < 1.0 - KAPPA_EPS {
        FamilyType::TypeIV
    } else if k > 1.0 + KAPPA_EPS {
        FamilyType::TypeVI
    } else {
        FamilyType::Boundary
    }
}

/// Coefficients of `d ln f / dt = -(b + t) / (a0 + a1 t + a2 t^2)` in
/// mean-centred coordinates `t = x - mu1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonOdeCoeffs {
    pub b: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl PearsonOdeCoeffs {
    /// Right-hand side of the relation at centred coordinate `t`.
    pub fn log_derivative(&self, t: f64) -> f64 {
        -(self.b + t) / (self.a0 + self.a1 * t + self.a2 * t * t)
    }

    /// Real roots of `a0 + a1 t + a2 t^2`, ascending. `None` if complex or
    /// the quadratic degenerates.
    pub fn roots(&self) -> Option<(f64, f64)> {
        if self.a2 == 0.0 {
            return None;
        }
        let disc = self.a1 * self.a1 - 4.0 * self.a2 * self.a0;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (self.a1 + self.a1.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 {
            let r = (-self.a0 / self.a2).sqrt();
            (-r, r)
        } else {
            (q / self.a2, self.a0 / q)
        };
        Some((r1.min(r2), r1.max(r2)))
    }
}

pub fn ode_coefficients(m: &Moments) -> Result<PearsonOdeCoeffs, PearsonError> {
    if !(m.mu2 > 0.0) {
        return Err(PearsonError::ZeroVariance);
    }
    let (mu2, mu3, mu4) = (m.mu2, m.mu3, m.mu4);
    let d = 10.0 * mu2 * mu4 - 18.0 * mu2.powi(3) - 12.0 * mu3 * mu3;
    if d == 0.0 || !d.is_finite() {
        return Err(PearsonError::ZeroOdeDenominator);
    }
    let b = mu3 * (mu4 + 3.0 * mu2 * mu2) / d;
    Ok(PearsonOdeCoeffs {
        b,
        a0: mu2 * (4.0 * mu2 * mu4 - 3.0 * mu3 * mu3) / d,
        a1: b,
        a2: (2.0 * mu2 * mu4 - 3.0 * mu3 * mu3 - 6.0 * mu2.powi(3)) / d,
    })
}

/// A fitted Pearson Type I density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonType1Model {
    pub m0: f64,
    pub c1: f64,
    pub c2: f64,
    pub g1: f64,
    pub g2: f64,
    /// Normalization constant `A0`, the density value at `m0`.
    pub a0: f64,
    pub stats: ShapeStats,
    pub h: f64,
    pub n: u64,
}

/// `g * ln|g|`, with `0 * ln 0 = 0`.
fn g_ln_g(g: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else {
        g * g.abs().ln()
    }
}

pub fn fit_type1(m: &Moments) -> Result<PearsonType1Model, PearsonError> {
    let stats = shape_stats(m)?;
    let symmetric = m.mu3 == 0.0;
    match select_type(&stats) {
        FamilyType::TypeI => {}
        FamilyType::Boundary if symmetric && stats.kappa <= 0.0 => {}
        other => return Err(PearsonError::NotTypeI(other)),
    }
    let sk = stats.skewness;
    let ku = stats.kurtosis;
    let sk2 = sk * sk;

    let h_den = 6.0 + 3.0 * sk2 - 2.0 * ku;
    if h_den == 0.0 {
        return Err(PearsonError::ZeroHDenominator);
    }
    let h = (6.0 * ku - 6.0 * sk2 - 6.0) / h_den;
    let radicand = sk2 * (h + 2.0).powi(2) + 16.0 * h + 16.0;
    let bad_support = !h.is_finite() || !(radicand > 0.0);
    if bad_support && !symmetric {
        return Err(PearsonError::InvalidSupport {
            c1: f64::NAN,
            c2: f64::NAN,
        });
    }

    // the larger exponent sits on the side away from the long tail
    let base = 0.5 * h - 1.0;
    let (g1, g2) = if symmetric {
        (base, base)
    } else {
        let delta = 0.5 * h * (h + 2.0) * sk.abs() / radicand.sqrt();
        let sign = m.mu3.signum();
        (base - sign * delta, base + sign * delta)
    };
    if !(g1 > -1.0 && g2 > -1.0) {
        return Err(PearsonError::InvalidExponents { g1, g2 });
    }
    if bad_support {
        return Err(PearsonError::InvalidSupport {
            c1: f64::NAN,
            c2: f64::NAN,
        });
    }

    let span = 0.5 * (m.mu2 * radicand).sqrt();
    let (c1, c2, m0) = if symmetric {
        (0.5 * span, 0.5 * span, m.mu1)
    } else {
        if g1 + g2 == 0.0 || h == 2.0 {
            return Err(PearsonError::InvalidExponents { g1, g2 });
        }
        let c1 = span * g1 / (g1 + g2);
        let m0 = m.mu1 - 0.5 * m.mu3 * (h + 2.0) / (m.mu2 * (h - 2.0));
        (c1, span - c1, m0)
    };
    if !(c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
        return Err(PearsonError::InvalidSupport { c1, c2 });
    }

    let ln_a0 = g_ln_g(g1) + g_ln_g(g2) - g_ln_g(g1 + g2) + ln_gamma(g1 + g2 + 2.0)
        - (c1 + c2).ln()
        - ln_gamma(g1 + 1.0)
        - ln_gamma(g2 + 1.0);
    let a0 = ln_a0.exp();
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(PearsonError::InvalidNormalization);
    }

    Ok(PearsonType1Model {
        m0,
        c1,
        c2,
        g1,
        g2,
        a0,
        stats,
        h,
        n: m.n,
    })
}

impl PearsonType1Model {
    /// Open support `(m0 - c1, m0 + c2)`.
    pub fn support(&self) -> (f64, f64) {
        (self.m0 - self.c1, self.m0 + self.c2)
    }

    pub fn in_support(&self, x: f64) -> bool {
        let t = x - self.m0;
        t > -self.c1 && t < self.c2
    }

    fn log_shape(&self, x: f64) -> f64 {
        let t = x - self.m0;
        self.g1 * (t / self.c1).ln_1p() + self.g2 * (-t / self.c2).ln_1p()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !self.in_support(x) {
            return 0.0;
        }
        self.a0 * self.log_shape(x).exp()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.log_pdf_with_floor(x, LOG_FLOOR)
    }

    /// Natural log of the density, never below `floor`.
    pub fn log_pdf_with_floor(&self, x: f64, floor: f64) -> f64 {
        if !self.in_support(x) {
            return floor;
        }
        let v = self.a0.ln() + self.log_shape(x);
        if v.is_nan() {
            floor
        } else {
            v.max(floor)
        }
    }

    /// `∫ weight(x) f(x) dx` over the support.
    ///
    /// Each half of the support is mapped so that the endpoint factor
    /// `u^g du` becomes `dv / (g + 1)`, which removes the integrable
    /// singularity when `g < 0`.
    pub fn integrate_weighted<W: Fn(f64) -> f64>(&self, weight: W, quad: &Quadrature) -> Result<f64, PearsonError> {
        let span = self.c1 + self.c2;
        let left = self.m0 - self.c1;
        let right = self.m0 + self.c2;

        // left half, u = (x - left)/span = v^k1
        let k1 = 1.0 / (self.g1 + 1.0);
        let lead1 = self.a0 * span * (span / self.c1).powf(self.g1) * k1;
        let v1_max = 0.5f64.powf(self.g1 + 1.0);
        let lhs = quad.integrate(
            |v| {
                let u = v.powf(k1);
                let x = left + span * u;
                let tail = (span * (1.0 - u) / self.c2).powf(self.g2);
                lead1 * tail * weight(x)
            },
            0.0,
            v1_max,
        )?;

        // right half, w = (right - x)/span = v^k2
        let k2 = 1.0 / (self.g2 + 1.0);
        let lead2 = self.a0 * span * (span / self.c2).powf(self.g2) * k2;
        let v2_max = 0.5f64.powf(self.g2 + 1.0);
        let rhs = quad.integrate(
            |v| {
                let w = v.powf(k2);
                let x = right - span * w;
                let tail = (span * (1.0 - w) / self.c1).powf(self.g1);
                lead2 * tail * weight(x)
            },
            0.0,
            v2_max,
        )?;
        Ok(lhs.value + rhs.value)
    }

    /// Integral of the density over its support; 1 for a correct fit.
    pub fn normalization(&self) -> Result<f64, PearsonError> {
        self.integrate_weighted(|_| 1.0, &Quadrature::default())
    }

    /// Mean, variance and third central moment of the fitted density.
    pub fn fitted_moments(&self) -> Result<(f64, f64, f64), PearsonError> {
        let q = Quadrature {
            abs_tol: 1e-11,
            ..Quadrature::default()
        };
        let mass = self.integrate_weighted(|_| 1.0, &q)?;
        let mean = self.integrate_weighted(|x| x, &q)? / mass;
        let var = self.integrate_weighted(|x| (x - mean).powi(2), &q)? / mass;
        let third = self.integrate_weighted(|x| (x - mean).powi(3), &q)? / mass;
        Ok((mean, var, third))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelJson::from(self)).expect("plain struct serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&ModelJson::from(self)).expect("plain struct serializes")
    }

    /// Parses and validates the JSON object written by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self, PearsonError> {
        let wire: ModelJson = serde_json::from_str(text).map_err(|e| PearsonError::InvalidModel(e.to_string()))?;
        Self::try_from(wire)
    }
}

/// JSON shape of a fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    pub m0: f64,
    pub c1: f64,
    pub c2: f64,
    pub g1: f64,
    pub g2: f64,
    pub a0_norm: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub kappa: f64,
    pub h: f64,
    pub n: u64,
}

impl From<&PearsonType1Model> for ModelJson {
    fn from(m: &PearsonType1Model) -> Self {
        Self {
            m0: m.m0,
            c1: m.c1,
            c2: m.c2,
            g1: m.g1,
            g2: m.g2,
            a0_norm: m.a0,
            skewness: m.stats.skewness,
            kurtosis: m.stats.kurtosis,
            kappa: m.stats.kappa,
            h: m.h,
            n: m.n,
        }
    }
}

impl TryFrom<ModelJson> for PearsonType1Model {
    type Error = PearsonError;

    fn try_from(w: ModelJson) -> Result<Self, Self::Error> {
        if !(w.c1 > 0.0 && w.c2 > 0.0 && w.c1.is_finite() && w.c2.is_finite()) {
            return Err(PearsonError::InvalidSupport { c1: w.c1, c2: w.c2 });
        }
        if !(w.g1 > -1.0 && w.g2 > -1.0 && w.g1.is_finite() && w.g2.is_finite()) {
            return Err(PearsonError::InvalidExponents { g1: w.g1, g2: w.g2 });
        }
        if !(w.a0_norm > 0.0 && w.a0_norm.is_finite()) {
            return Err(PearsonError::InvalidNormalization);
        }
        if !w.m0.is_finite() {
            return Err(PearsonError::InvalidModel("m0 is not finite".into()));
        }
        Ok(Self {
            m0: w.m0,
            c1: w.c1,
            c2: w.c2,
            g1: w.g1,
            g2: w.g2,
            a0: w.a0_norm,
            stats: ShapeStats {
                skewness: w.skewness,
                kurtosis: w.kurtosis,
                kappa: w.kappa,
            },
            h: w.h,
            n: w.n,
        })
    }
}

impl Serialize for PearsonType1Model {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ModelJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PearsonType1Model {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = ModelJson::deserialize(d)?;
        Self::try_from(wire).map_err(serde::de::Error::custom)
    }
}
