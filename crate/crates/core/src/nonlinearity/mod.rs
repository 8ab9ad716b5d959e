//! Right-hand sides `f(x, y, ξ)` with their primitives `F = ∫₀^ξ f`, and
//! sampled validators for the structural hypotheses the existence theory
//! needs.

mod hypotheses;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use hypotheses::{
    check_hypotheses, check_lemma45_monotone, HypothesisOutcome, HypothesisReport, MonotoneOutcome, Witness,
    MIN_HYPOTHESIS_SAMPLES,
};

/// `(x, y, ξ) ↦ value`
pub type PointFn<T> = Arc<dyn Fn(T, T, T) -> T + Send + Sync>;
/// `(x, y) ↦ value`
pub type SpatialFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// Names accepted by [`Nonlinearity::preset`].
pub const PRESETS: [&str; 3] = ["linear", "cubic-quintic", "log-cubic"];

#[derive(Clone)]
pub enum NonlinearityKind<T> {
    /// `f = |x|^{2k} |ξ|^{p-1} ξ`
    PurePower { p: T },
    /// Caller-supplied `f`, its primitive `F` and `∂f/∂ξ`.
    Custom {
        name: String,
        f: PointFn<T>,
        primitive: PointFn<T>,
        df: PointFn<T>,
    },
}

impl<T: fmt::Debug> fmt::Debug for NonlinearityKind<T> {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearityKind::PurePower { p } => write!(fm, "PurePower {{ p: {p:?} }}"),
            NonlinearityKind::Custom { name, .. } => write!(fm, "Custom({name})"),
        }
    }
}

/// Constants and functions appearing in the growth, sign and monotonicity
/// hypotheses.
#[derive(Clone)]
pub struct HypothesisMeta<T> {
    /// Growth exponent `q₁ ∈ (2, 2_k)` in `|f| ≤ |x|^{2k}(|ξ|^{q₁-1} + C₀)`.
    pub q1: T,
    pub c0: T,
    /// Threshold beyond which `f/ξ` is monotone.
    pub c: T,
    /// Bound `|f| ≤ |x|^{2k} ψ` on `|ξ| ≤ C`; sampled constant when absent.
    pub psi: Option<SpatialFn<T>>,
    /// Lower bound `φ ≤ f/ξ`, non-positive; zero when absent.
    pub phi: Option<SpatialFn<T>>,
}

impl<T: fmt::Debug> fmt::Debug for HypothesisMeta<T> {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("HypothesisMeta")
            .field("q1", &self.q1)
            .field("c0", &self.c0)
            .field("c", &self.c)
            .field("psi", &self.psi.as_ref().map(|_| "fn"))
            .field("phi", &self.phi.as_ref().map(|_| "fn"))
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct Nonlinearity<T> {
    kind: NonlinearityKind<T>,
    k: T,
    meta: HypothesisMeta<T>,
}

impl<T: Real> Nonlinearity<T> {
    /// The model nonlinearity `|x|^{2k}|ξ|^{p-1}ξ`, `p ≥ 1`.
    ///
    /// Defaults: `q₁ = p + 1`, `C₀ = 0`, `C = 1`.
    pub fn pure_power(p: T, k: T) -> Result<Self> {
        if !(p >= T::one()) || !p.is_finite() {
            return Err(Error::InvalidInput(format!(
                "power nonlinearity requires p >= 1, got {p}"
            )));
        }
        check_k(k)?;
        Ok(Nonlinearity {
            kind: NonlinearityKind::PurePower { p },
            k,
            meta: HypothesisMeta {
                q1: p + T::one(),
                c0: T::zero(),
                c: T::one(),
                psi: None,
                phi: None,
            },
        })
    }

    pub fn custom(
        name: impl Into<String>,
        k: T,
        f: PointFn<T>,
        primitive: PointFn<T>,
        df: PointFn<T>,
        meta: HypothesisMeta<T>,
    ) -> Result<Self> {
        check_k(k)?;
        Ok(Nonlinearity {
            kind: NonlinearityKind::Custom {
                name: name.into(),
                f,
                primitive,
                df,
            },
            k,
            meta,
        })
    }

    /// Compiled-in custom nonlinearities, all of the form `|x|^{2k} g(ξ)`:
    ///
    /// * `linear`: `g = ξ` (violates the superlinearity hypotheses)
    /// * `cubic-quintic`: `g = ξ³ + ξ⁵`
    /// * `log-cubic`: `g = ξ³ ln(1 + ξ²)`
    pub fn preset(name: &str, k: T) -> Result<Self> {
        check_k(k)?;
        let w = move |x: T| T::degenerate_weight(x, k);
        let lit = T::lit;
        let (f, primitive, df, q1, c0): (PointFn<T>, PointFn<T>, PointFn<T>, T, T) = match name {
            "linear" => (
                Arc::new(move |x, _, s| w(x) * s),
                Arc::new(move |x, _, s| w(x) * s * s * lit(0.5)),
                Arc::new(move |x, _, _| w(x)),
                lit(2.5),
                T::one(),
            ),
            "cubic-quintic" => (
                Arc::new(move |x, _, s| w(x) * (s.powi(3) + s.powi(5))),
                Arc::new(move |x, _, s| w(x) * (s.powi(4) / lit(4.0) + s.powi(6) / lit(6.0))),
                Arc::new(move |x, _, s| w(x) * (lit(3.0) * s * s + lit(5.0) * s.powi(4))),
                lit(6.5),
                lit(2.0),
            ),
            "log-cubic" => (
                Arc::new(move |x, _, s| w(x) * s.powi(3) * (s * s).ln_1p()),
                Arc::new(move |x, _, s| {
                    let q = s * s;
                    w(x) * lit(0.5)
                        * ((q * q - T::one()) * lit(0.5) * q.ln_1p() - q * q * lit(0.25) + q * lit(0.5))
                }),
                Arc::new(move |x, _, s| {
                    let q = s * s;
                    w(x) * (lit(3.0) * q * q.ln_1p() + lit(2.0) * q * q / (T::one() + q))
                }),
                lit(5.0),
                T::zero(),
            ),
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown nonlinearity preset `{other}` (known: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Self::custom(
            name,
            k,
            f,
            primitive,
            df,
            HypothesisMeta {
                q1,
                c0,
                c: T::one(),
                psi: None,
                phi: None,
            },
        )
    }

    pub fn kind(&self) -> &NonlinearityKind<T> {
        &self.kind
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn meta(&self) -> &HypothesisMeta<T> {
        &self.meta
    }

    pub fn with_meta(mut self, meta: HypothesisMeta<T>) -> Self {
        self.meta = meta;
        self
    }

    /// Exponent of the pure power, if this is one.
    pub fn power(&self) -> Option<T> {
        match self.kind {
            NonlinearityKind::PurePower { p } => Some(p),
            NonlinearityKind::Custom { .. } => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            NonlinearityKind::PurePower { p } => format!("power(p={p})"),
            NonlinearityKind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn f(&self, x: T, y: T, xi: T) -> T {
        match &self.kind {
            NonlinearityKind::PurePower { p } => T::degenerate_weight(x, self.k) * signed_pow(xi, *p),
            NonlinearityKind::Custom { f, .. } => f(x, y, xi),
        }
    }

    /// Primitive `F(x, y, ξ) = ∫₀^ξ f(x, y, τ) dτ`.
    #[allow(non_snake_case)]
    pub fn F(&self, x: T, y: T, xi: T) -> T {
        match &self.kind {
            NonlinearityKind::PurePower { p } => {
                let q = *p + T::one();
                T::degenerate_weight(x, self.k) * xi.abs().powf(q) / q
            }
            NonlinearityKind::Custom { primitive, .. } => primitive(x, y, xi),
        }
    }

    /// `∂f/∂ξ`
    pub fn df(&self, x: T, y: T, xi: T) -> T {
        match &self.kind {
            NonlinearityKind::PurePower { p } => {
                if *p == T::one() {
                    T::degenerate_weight(x, self.k)
                } else {
                    T::degenerate_weight(x, self.k) * *p * xi.abs().powf(*p - T::one())
                }
            }
            NonlinearityKind::Custom { df, .. } => df(x, y, xi),
        }
    }
}

/// `|ξ|^{p-1} ξ`
fn signed_pow<T: Real>(xi: T, p: T) -> T {
    if xi == T::zero() {
        T::zero()
    } else {
        xi.abs().powf(p) * xi.signum()
    }
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::InvalidInput(format!(
            "degeneracy exponent k must be positive, got {k}"
        )));
    }
    Ok(())
}
