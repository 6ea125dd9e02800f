//! Adaptive Simpson quadrature.
//!
//! The interval is first cut at the caller's breakpoints and into a fixed
//! number of equal panels, so narrow features cannot slip between the five
//! initial nodes of a single Simpson step. Each panel is then refined on an
//! explicit worklist until the Richardson error estimate meets its share of
//! the global tolerance `max(abs_tol, rel_tol * |I|)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and refinement limits for [`integrate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth below an initial panel.
    pub max_depth: u32,
    /// Equal-width panels per piece before adaptive refinement.
    pub initial_panels: usize,
    /// Optional integration interval. When `None`, callers derive one from
    /// the supports of the densities being integrated.
    pub interval: Option<(f64, f64)>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_depth: 48,
            initial_panels: 256,
            interval: None,
        }
    }
}

/// Inset applied at piece ends, so step functions are never sampled exactly
/// on a discontinuity.
const EDGE_INSET: f64 = 1e-9;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

/// Integrates `f` over `[lo, hi]`, splitting at every breakpoint strictly
/// inside the interval. Nodes within `inset` of a piece end are evaluated at
/// the inset point instead, so a step located exactly on a breakpoint is
/// always seen from the inside of the piece.
pub fn integrate<F>(
    f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidParameter(format!(
            "quadrature interval [{lo}, {hi}] is not a finite increasing range"
        )));
    }
    if hi == lo {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = std::iter::once(lo)
        .chain(breakpoints.iter().copied().filter(|&x| x > lo && x < hi))
        .chain(std::iter::once(hi))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| (*b - *a).abs() <= 4.0 * EDGE_INSET);

    let panels_per_piece = spec.initial_panels.max(1);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let inset = EDGE_INSET.min((b - a) / 4.0);
        let g = |x: f64| f(x.clamp(a + inset, b - inset));
        let step = (b - a) / panels_per_piece as f64;
        let mut panels = Vec::with_capacity(panels_per_piece);
        let mut left = a;
        let mut f_left = g(a);
        for i in 0..panels_per_piece {
            let right = if i + 1 == panels_per_piece {
                b
            } else {
                a + step * (i + 1) as f64
            };
            let f_right = g(right);
            let mid = 0.5 * (left + right);
            let f_mid = g(mid);
            panels.push(Panel {
                a: left,
                b: right,
                fa: f_left,
                fm: f_mid,
                fb: f_right,
                whole: simpson(left, right, f_left, f_mid, f_right),
                depth: 0,
            });
            left = right;
            f_left = f_right;
        }
        let abs_share = spec.abs_tol * (b - a) / (hi - lo);
        total += refine(&g, panels, spec, abs_share)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Refines the initial panels of one piece and returns the piece integral.
fn refine<G>(g: &G, mut work: Vec<Panel>, spec: &QuadratureSpec, abs_tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let estimate: f64 = work.iter().map(|p| p.whole).sum();
    let scale: f64 = work
        .iter()
        .map(|p| p.whole.abs())
        .sum::<f64>()
        .max(estimate.abs());
    let tol = abs_tol.max(spec.rel_tol * scale);
    let width = work.last().map_or(0.0, |p| p.b) - work.first().map_or(0.0, |p| p.a);

    let mut total = 0.0;
    while let Some(p) = work.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = g(lm);
        let frm = g(rm);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let local_tol = tol * (p.b - p.a) / width;
        if diff.abs() <= 15.0 * local_tol || m <= p.a || m >= p.b {
            total += left + right + diff / 15.0;
            continue;
        }
        if p.depth >= spec.max_depth || !diff.is_finite() {
            return Err(Error::NoConvergence {
                lo: p.a,
                hi: p.b,
                estimate,
            });
        }
        work.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            depth: p.depth + 1,
        });
        work.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            depth: p.depth + 1,
        });
    }
    Ok(total)
}
