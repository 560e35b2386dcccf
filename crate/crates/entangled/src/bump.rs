//! Compactly supported profiles with smooth square roots.
//!
//! The family is built from the mollifier `φ(x) = e^{-1/x} 1_{(0,∞)}(x)`:
//!
//! * `g` — nonnegative, supported in `[0, ε]` with `∫ g = 1`,
//! * `f` — its two-sided antiderivative, supported in `[1, 3]`, even about 2,
//!   constantly 1 on `[1+ε, 3-ε]`,
//! * `h(x) = ∫_{-∞}^x -(f(t)+f(-t))/t dt` — even, supported in `[-3, 3]`.
//!
//! With `ε = 0.001` the raw factor `e^{-1/x}` underflows double precision
//! long before the interesting region (`ln φ₁ ≈ -10³` at `x = ε`), so `g` is
//! only ever evaluated through its logarithm, normalized in log space. Near
//! every support endpoint the evaluators switch to the closed forms
//! `f(x) = c (4-x) φ'(x-1)` and `h(x) = c φ(x+3)`, which is what makes the
//! square roots numerically smooth there.

use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, cumulative_simpson};
use once_cell::sync::Lazy;

/// Transition width of the plateau edges.
pub const EPS: f64 = 0.001;
/// Half of [`EPS`]; the closed forms hold within `DELTA` of each endpoint.
pub const DELTA: f64 = EPS / 2.0;

/// `φ(x) = e^{-1/x}` for `x > 0`, zero otherwise.
pub fn mollifier_phi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// `φ'(x) = e^{-1/x} / x²` for `x > 0`, zero otherwise.
pub fn mollifier_phi_prime(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp() / (x * x)
    } else {
        0.0
    }
}

/// `φ₁(x) = ((3-x) φ'(x))' = e^{-1/x} (x² - 7x + 3) / x⁴` for `x > 0`.
pub fn edge_phi1(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp() * (x * x - 7.0 * x + 3.0) / (x * x * x * x)
    } else {
        0.0
    }
}

/// `φ₂(x) = φ(x) / (φ(x) + φ(1-x))`; 0 for `x ≤ 0`, 1 for `x ≥ 1`.
pub fn transition_phi2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        // φ(1-x)/φ(x) = e^{1/x - 1/(1-x)}
        let t = 1.0 / x - 1.0 / (1.0 - x);
        1.0 / (1.0 + t.exp())
    }
}

/// `ln φ₁` on `(0, (7-√37)/2)` where `x² - 7x + 3 > 0`.
fn ln_phi1(x: f64) -> f64 {
    debug_assert!(x > 0.0 && x * x - 7.0 * x + 3.0 > 0.0);
    -1.0 / x + (x * x - 7.0 * x + 3.0).ln() - 4.0 * x.ln()
}

/// `ln φ₂` computed stably through log1p.
fn ln_phi2(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if x >= 1.0 {
        0.0
    } else {
        let t = 1.0 / x - 1.0 / (1.0 - x);
        // ln(1 + e^t) = max(t, 0) + ln1p(e^{-|t|})
        -(t.max(0.0) + (-t.abs()).exp().ln_1p())
    }
}

/// `ln(φ₁(x) φ₂(2 - 2x/ε))` — the unnormalized integrand of `g`.
fn ln_g_unnormalized(x: f64) -> f64 {
    if x <= 0.0 || x >= EPS {
        return f64::NEG_INFINITY;
    }
    ln_phi1(x) + ln_phi2(2.0 - 2.0 * x / EPS)
}

const G_TABLE_LEN: usize = 1 << 16;
const H_TABLE_LEN: usize = 1 << 13;

/// The profile family of the bump construction.
///
/// Holds the log-normalization `ln c`, fine cumulative tables over the
/// transition zones and the derived constants of `h`. Access the process-wide
/// instance through [`BumpFamily::get`]; construction is deterministic.
pub struct BumpFamily {
    ln_c: f64,
    // cumulative mass of g over [0, ε] on a uniform table, normalized to 1,
    // with matching integrand samples for Hermite interpolation
    g_cum: Vec<f64>,
    g_val: Vec<f64>,
    // cumulative ∫_1^{1+s} f/t dt over s ∈ [0, ε]
    h_left: Vec<f64>,
    // cumulative ∫_{3-s}^{3} f/t dt over s ∈ [0, ε]
    h_right: Vec<f64>,
    h_plateau_right: f64,
    h0: f64,
}

static FAMILY: Lazy<BumpFamily> = Lazy::new(|| BumpFamily::build().expect("bump construction"));

impl BumpFamily {
    /// The shared, lazily built instance.
    pub fn get() -> &'static BumpFamily {
        &FAMILY
    }

    /// Construct the family: fix `c` by `∫ g = 1`, then tabulate the
    /// transition zones of `f` and `h`.
    pub fn build() -> Result<BumpFamily> {
        // Peak value of ln(φ₁ φ₂) over (0, ε), located by golden-section scan.
        let mut k_ref = f64::NEG_INFINITY;
        let scan = 4096;
        for i in 1..scan {
            let x = EPS * i as f64 / scan as f64;
            k_ref = k_ref.max(ln_g_unnormalized(x));
        }
        if !k_ref.is_finite() {
            return Err(Error::QuadratureDiverged(
                "degenerate bump integrand".into(),
            ));
        }

        // Mass over [δ, ε] in shifted log space plus the exact closed form
        // ∫_0^δ φ₁ = (3-δ) φ'(δ) for the flat piece.
        let shifted = |x: f64| {
            let v = ln_g_unnormalized(x) - k_ref;
            if v < -745.0 {
                0.0
            } else {
                v.exp()
            }
        };
        let mass_main = adaptive_simpson(shifted, DELTA, EPS, 1e-15)?;
        let ln_mass_flat = (3.0 - DELTA).ln() - 1.0 / DELTA - 2.0 * DELTA.ln();
        // logsumexp of the two pieces
        let ln_mass = {
            let a = k_ref + mass_main.ln();
            let b = ln_mass_flat;
            let m = a.max(b);
            m + ((a - m).exp() + (b - m).exp()).ln()
        };
        let ln_c = -ln_mass;

        // Normalized cumulative table of g over [0, ε]. Values below the
        // exp underflow threshold come out as exact zeros, which is the
        // correct double-precision answer.
        let g = |x: f64| {
            let v = ln_c + ln_g_unnormalized(x);
            if v < -745.0 {
                0.0
            } else {
                v.exp()
            }
        };
        let mut g_cum = cumulative_simpson(g, 0.0, EPS, G_TABLE_LEN);
        // Renormalize the table so G(ε) = 1 holds exactly for the cached
        // evaluators (the analytic normalization already puts it within
        // quadrature tolerance of 1).
        let total = g_cum[G_TABLE_LEN];
        if !(total > 0.0) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::QuadratureDiverged(format!(
                "bump normalization drifted: ∫g = {total}"
            )));
        }
        for v in g_cum.iter_mut() {
            *v /= total;
        }
        let step = EPS / G_TABLE_LEN as f64;
        let g_val: Vec<f64> = (0..=G_TABLE_LEN).map(|i| g(i as f64 * step) / total).collect();

        let family_partial = BumpFamily {
            ln_c,
            g_cum,
            g_val,
            h_left: Vec::new(),
            h_right: Vec::new(),
            h_plateau_right: 0.0,
            h0: 0.0,
        };

        // Left transition of h: ∫_1^{1+s} f(t)/t dt with f(1+σ) = G(σ).
        let fl = |s: f64| family_partial.g_cumulative(s) / (1.0 + s);
        let h_left = cumulative_simpson(fl, 0.0, EPS, H_TABLE_LEN);
        // Right transition: ∫_{3-s}^3 f(t)/t dt with f(3-σ) = G(σ).
        let fr = |s: f64| family_partial.g_cumulative(s) / (3.0 - s);
        let h_right = cumulative_simpson(fr, 0.0, EPS, H_TABLE_LEN);

        let h_plateau_right = h_right[H_TABLE_LEN];
        let h0 = h_left[H_TABLE_LEN] + ((3.0 - EPS) / (1.0 + EPS)).ln() + h_plateau_right;

        Ok(BumpFamily {
            h_left,
            h_right,
            h_plateau_right,
            h0,
            ..family_partial
        })
    }

    /// The log of the normalization constant `c`.
    pub fn ln_c(&self) -> f64 {
        self.ln_c
    }

    /// `h(0) = ∫_1^3 f(t)/t dt`.
    pub fn h_at_zero(&self) -> f64 {
        self.h0
    }

    /// Cumulative mass `G(s) = ∫_0^s g` for `s ∈ [0, ε]`, cubic-Hermite
    /// interpolated (the table stores both `G` and `G' = g`).
    pub fn g_cumulative(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= EPS {
            return 1.0;
        }
        if s <= DELTA {
            // exact: G(s) = c (3-s) φ'(s)
            let v = self.ln_c + (3.0 - s).ln() - 1.0 / s - 2.0 * s.ln();
            return if v < -745.0 { 0.0 } else { v.exp() };
        }
        let step = EPS / G_TABLE_LEN as f64;
        let pos = s / step;
        let i = (pos.floor() as usize).min(G_TABLE_LEN - 1);
        let t = pos - i as f64;
        let (p0, p1) = (self.g_cum[i], self.g_cum[i + 1]);
        let (m0, m1) = (self.g_val[i] * step, self.g_val[i + 1] * step);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1
    }

    /// The density `g(x)`, supported in `[0, ε]`.
    pub fn g(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= EPS {
            return 0.0;
        }
        let v = self.ln_c + ln_g_unnormalized(x);
        if v < -745.0 {
            0.0
        } else {
            v.exp()
        }
    }

    /// The plateau profile `f`, supported in `[1, 3]`, 1 on `[1+ε, 3-ε]`.
    pub fn f(&self, x: f64) -> f64 {
        if x <= 1.0 || x >= 3.0 {
            0.0
        } else if x < 1.0 + EPS {
            self.g_cumulative(x - 1.0)
        } else if x <= 3.0 - EPS {
            1.0
        } else {
            self.g_cumulative(3.0 - x)
        }
    }

    /// Smooth square root of `f`; within `δ` of the support endpoints it uses
    /// the closed form `f = c (4-x) φ'(x-1)` (and its mirror image).
    pub fn f_sqrt(&self, x: f64) -> f64 {
        if x <= 1.0 || x >= 3.0 {
            return 0.0;
        }
        if x <= 1.0 + DELTA {
            let v = 0.5 * (self.ln_c + (4.0 - x).ln() - 1.0 / (x - 1.0) - 2.0 * (x - 1.0).ln());
            return if v < -745.0 { 0.0 } else { v.exp() };
        }
        if x >= 3.0 - DELTA {
            return self.f_sqrt(4.0 - x);
        }
        self.f(x).sqrt()
    }

    /// `h(x) = ∫_{-∞}^x -(f(t)+f(-t))/t dt`, even, supported in `[-3, 3]`.
    pub fn h(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= 3.0 {
            0.0
        } else if x > 3.0 - DELTA {
            // exact: h = c φ(3-x) near the endpoint
            let v = self.ln_c - 1.0 / (3.0 - x);
            if v < -745.0 {
                0.0
            } else {
                v.exp()
            }
        } else if x >= 3.0 - EPS {
            self.h_right_tail(3.0 - x)
        } else if x > 1.0 + EPS {
            ((3.0 - EPS) / x).ln() + self.h_plateau_right
        } else if x > 1.0 {
            self.h0 - self.h_left_cum(x - 1.0)
        } else {
            self.h0
        }
    }

    /// Smooth square root of `h` with the closed-form endpoint expression.
    pub fn h_sqrt(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= 3.0 {
            return 0.0;
        }
        if x > 3.0 - DELTA {
            let v = 0.5 * (self.ln_c - 1.0 / (3.0 - x));
            return if v < -745.0 { 0.0 } else { v.exp() };
        }
        self.h(x).sqrt()
    }

    fn table_lookup(table: &[f64], s: f64) -> f64 {
        let n = table.len() - 1;
        let pos = (s / EPS) * n as f64;
        let i = (pos.floor() as usize).min(n - 1);
        let t = pos - i as f64;
        table[i] * (1.0 - t) + table[i + 1] * t
    }

    fn h_left_cum(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= EPS {
            return self.h_left[H_TABLE_LEN];
        }
        Self::table_lookup(&self.h_left, s)
    }

    fn h_right_tail(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= EPS {
            return self.h_plateau_right;
        }
        Self::table_lookup(&self.h_right, s)
    }

    /// `ϑ̂₁(ξ) = f((ξ+4)/2)`, supported in `[-2, 2]`.
    pub fn theta1_hat(&self, xi: f64) -> f64 {
        self.f((xi + 4.0) / 2.0)
    }

    /// `(ϑ̂₁)^{1/2}`, real, even and smooth.
    pub fn theta1_hat_sqrt(&self, xi: f64) -> f64 {
        self.f_sqrt((xi + 4.0) / 2.0)
    }

    /// `ϑ̂₂(η) = f(η) + f(-η)`, supported in `±[1, 3]`.
    pub fn theta2_hat(&self, eta: f64) -> f64 {
        self.f(eta) + self.f(-eta)
    }

    /// `(ϑ̂₂)^{1/2} = f^{1/2}(η) + f^{1/2}(-η)` (disjoint supports).
    pub fn theta2_hat_sqrt(&self, eta: f64) -> f64 {
        self.f_sqrt(eta) + self.f_sqrt(-eta)
    }
}

/// Per-order finite-difference derivative bounds near `x0`.
#[derive(Debug, Clone)]
pub struct ProbeOrder {
    pub order: usize,
    /// `(step, |Δ^r_h w(x0)| / h^r)` over the geometric step sequence.
    pub samples: Vec<(f64, f64)>,
    /// Supremum over the sampled steps.
    pub sup: f64,
    /// Log-log growth rate of the estimate between the two smallest steps;
    /// positive values mean divergence as the step shrinks.
    pub growth_exponent: f64,
}

/// One-sided finite-difference smoothness probe.
///
/// Uses forward differences `Δ^r_h w(x0) / h^r` with `h` stepping towards
/// `direction`; a `C^r` function keeps every order bounded while a genuine
/// root singularity (such as `|x|^{1/2}` at 0) blows up like a negative
/// power of the step.
pub fn smoothness_probe<W: Fn(f64) -> f64>(
    w: W,
    x0: f64,
    max_order: usize,
    direction: f64,
) -> Result<Vec<ProbeOrder>> {
    if max_order == 0 || max_order > 4 {
        return Err(Error::InvalidParameter(format!(
            "smoothness probe supports orders 1..=4, got {max_order}"
        )));
    }
    let steps: Vec<f64> = (0..=6).map(|k| 10f64.powf(-1.0 - k as f64 / 2.0)).collect();
    if steps.iter().any(|&h| h < 1e-14) {
        return Err(Error::InvalidParameter("step underflow".into()));
    }
    let sgn = if direction < 0.0 { -1.0 } else { 1.0 };
    let mut out = Vec::new();
    for order in 1..=max_order {
        let binom: Vec<f64> = (0..=order)
            .map(|i| {
                let mut c = 1.0;
                for j in 0..i {
                    c = c * (order - j) as f64 / (j + 1) as f64;
                }
                c
            })
            .collect();
        let mut samples = Vec::new();
        for &h in &steps {
            let hs = sgn * h;
            let mut acc = 0.0;
            for i in 0..=order {
                let sign = if (order - i) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom[i] * w(x0 + i as f64 * hs);
            }
            samples.push((h, (acc / hs.powi(order as i32)).abs()));
        }
        let sup = samples.iter().fold(0.0f64, |m, &(_, v)| m.max(v));
        let (h_prev, a_prev) = samples[samples.len() - 2];
        let (h_last, a_last) = samples[samples.len() - 1];
        let growth_exponent = if a_last > 0.0 && a_prev > 0.0 {
            (a_last / a_prev).ln() / (h_prev / h_last).ln()
        } else if a_last == 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        out.push(ProbeOrder {
            order,
            samples,
            sup,
            growth_exponent,
        });
    }
    Ok(out)
}
