//! Adaptive Simpson quadrature.

use crate::scalar::{lit, RealScalar};

const INITIAL_PANELS: usize = 8;
const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

fn simpson<T: RealScalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / lit(6.0) * (fa + lit::<T>(4.0) * fm + fb)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Starts from a few equal panels, each refined depth-first, left to right;
/// panel results are combined with compensated summation. The evaluation
/// order, and hence the result, is deterministic.
pub fn adaptive_simpson<T, F>(f: F, a: T, b: T, tol: T) -> T
where
    T: RealScalar,
    F: Fn(T) -> T,
{
    let panels: T = lit(INITIAL_PANELS as f64);
    let width = (b - a) / panels;
    let panel_tol = tol / panels;
    let mut total = T::zero();
    let mut compensation = T::zero();
    for k in 0..INITIAL_PANELS {
        let lo = a + width * lit(k as f64);
        let hi = if k + 1 == INITIAL_PANELS {
            b
        } else {
            lo + width
        };
        let mid = (lo + hi) / lit(2.0);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let panel = Panel {
            a: lo,
            b: hi,
            fa: flo,
            fm: fmid,
            fb: fhi,
            whole: simpson(lo, hi, flo, fmid, fhi),
        };
        let part = refine(&f, panel, panel_tol, MAX_DEPTH);
        // Kahan summation over panels
        let y = part - compensation;
        let t = total + y;
        compensation = (t - total) - y;
        total = t;
    }
    total
}

fn refine<T, F>(f: &F, p: Panel<T>, tol: T, depth: u32) -> T
where
    T: RealScalar,
    F: Fn(T) -> T,
{
    let m = (p.a + p.b) / lit(2.0);
    let lm = (p.a + m) / lit(2.0);
    let rm = (m + p.b) / lit(2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    // the second bound stops refinement once the difference is rounding noise
    let noise = T::epsilon() * lit(16.0) * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= lit::<T>(15.0) * tol || delta.abs() <= noise {
        return left + right + delta / lit(15.0);
    }
    let half = tol / lit(2.0);
    refine(
        f,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        half,
        depth - 1,
    ) + refine(
        f,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        half,
        depth - 1,
    )
}
