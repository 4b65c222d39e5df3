//! Cubic B-spline profiles `h(s)` with bounded, piecewise monotone curvature.
//!
//! Fitting is a penalized least-squares problem on a clamped cubic B-spline
//! basis over `s`. For a given breakpoint set the smoothing weight is raised
//! along a geometric ladder until the curvature (and optional slope) bound
//! holds on a dense sweep; spans whose samples still miss the residual
//! tolerance are bisected and the search restarts. The accepted spline is
//! finally cut at its curvature extrema by knot insertion, so every stored
//! piece has monotone curvature and the pieces join with C2 continuity.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const DEGREE: usize = 3;
/// Dense sweep samples per knot span when certifying a candidate.
const SWEEP_PER_SPAN: usize = 32;
/// Internal safety factor on the curvature and slope bounds.
const BOUND_MARGIN: f64 = 0.999;
/// Curvature differences at or below this are treated as flat.
pub const MONOTONE_EPS: f64 = 1e-12;

/// One clamped cubic B-spline piece of `h(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplinePiece {
    knots: Vec<f64>,
    /// Control points in `(s, h)`; the `s` coordinates are Greville abscissae.
    ctrl: Vec<(f64, f64)>,
}

impl BSplinePiece {
    fn from_coeffs(knots: Vec<f64>, coeffs: &[f64]) -> Self {
        let ctrl = coeffs
            .iter()
            .enumerate()
            .map(|(i, &h)| ((knots[i + 1] + knots[i + 2] + knots[i + 3]) / 3.0, h))
            .collect();
        Self { knots, ctrl }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn control_points(&self) -> &[(f64, f64)] {
        &self.ctrl
    }

    pub fn start(&self) -> f64 {
        self.knots[0]
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    /// Distinct breakpoints of the piece.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.knots[DEGREE..self.knots.len() - DEGREE].to_vec();
        b.dedup();
        b
    }

    /// `(h, h', h'')` at `s`.
    pub fn derivs(&self, s: f64) -> [f64; 3] {
        let n = self.ctrl.len();
        let u = s.clamp(self.start(), self.end());
        let span = find_span(&self.knots, n, u);
        let ders = ders_basis(span, u, &self.knots);
        let mut out = [0.0; 3];
        for (k, row) in ders.iter().enumerate() {
            out[k] = (0..=DEGREE).map(|j| row[j] * self.ctrl[span - DEGREE + j].1).sum();
        }
        out
    }

    fn split(&self, u: f64) -> (BSplinePiece, BSplinePiece) {
        let mut piece = self.clone();
        while multiplicity(&piece.knots, u) < DEGREE {
            piece = piece.insert_knot(u);
        }
        let r = piece.knots.iter().position(|&k| k == u).expect("inserted knot present");
        let mut lk = piece.knots[..r + DEGREE].to_vec();
        lk.push(u);
        let lc = piece.ctrl[..r].to_vec();
        let mut rk = vec![u];
        rk.extend_from_slice(&piece.knots[r..]);
        let rc = piece.ctrl[r - 1..].to_vec();
        (
            BSplinePiece { knots: lk, ctrl: lc },
            BSplinePiece { knots: rk, ctrl: rc },
        )
    }

    /// Boehm single knot insertion; the curve is unchanged.
    fn insert_knot(&self, u: f64) -> BSplinePiece {
        let p = DEGREE;
        let n = self.ctrl.len();
        let k = find_span(&self.knots, n, u);
        let s = multiplicity(&self.knots, u);
        let mut q = vec![(0.0, 0.0); n + 1];
        q[..=k - p].copy_from_slice(&self.ctrl[..=k - p]);
        q[k - s + 1..=n].copy_from_slice(&self.ctrl[k - s..n]);
        for i in k - p + 1..=k - s {
            let a = (u - self.knots[i]) / (self.knots[i + p] - self.knots[i]);
            let (p0, p1) = (self.ctrl[i - 1], self.ctrl[i]);
            q[i] = ((1.0 - a) * p0.0 + a * p1.0, (1.0 - a) * p0.1 + a * p1.1);
        }
        let mut knots = self.knots.clone();
        knots.insert(k + 1, u);
        BSplinePiece { knots, ctrl: q }
    }
}

/// Piecewise cubic B-spline `h(s)`, C2 across piece joins.
///
/// Piece ordinates are stored relative to `datum`, so data that is constant
/// at the datum evaluates to it exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseBSpline {
    pieces: Vec<BSplinePiece>,
    datum: f64,
    /// Exact values returned at the two domain ends.
    ends: [f64; 2],
}

impl PiecewiseBSpline {
    /// Pieces with ordinates relative to [`Self::datum`].
    pub fn pieces(&self) -> &[BSplinePiece] {
        &self.pieces
    }

    pub fn datum(&self) -> f64 {
        self.datum
    }

    pub fn start(&self) -> f64 {
        self.pieces[0].start()
    }

    pub fn end(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].end()
    }

    fn piece_at(&self, s: f64) -> &BSplinePiece {
        let i = self.pieces.partition_point(|p| p.end() < s);
        &self.pieces[i.min(self.pieces.len() - 1)]
    }

    /// `h(s)`. Both domain ends return the end ordinates exactly, which
    /// for pinned fits are the pinned values.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= self.start() {
            return self.ends[0];
        }
        if s >= self.end() {
            return self.ends[1];
        }
        self.datum + self.piece_at(s).derivs(s)[0]
    }

    pub fn derivs(&self, s: f64) -> [f64; 3] {
        let mut d = self.piece_at(s).derivs(s);
        d[0] = self.eval(s);
        d
    }

    pub fn slope(&self, s: f64) -> f64 {
        self.derivs(s)[1]
    }

    /// Signed curvature of the graph `(s, h(s))`.
    pub fn curvature(&self, s: f64) -> f64 {
        let [_, d1, d2] = self.derivs(s);
        graph_curvature(d1, d2)
    }

    /// Maximum `|curvature|` and `|slope|` over a sweep with at most `step` spacing.
    pub fn sweep_maxima(&self, step: f64) -> (f64, f64) {
        let (mut k, mut m) = (0.0f64, 0.0f64);
        for piece in &self.pieces {
            for s in sweep_points(piece.start(), piece.end(), step) {
                let [_, d1, d2] = piece.derivs(s);
                k = k.max(graph_curvature(d1, d2).abs());
                m = m.max(d1.abs());
            }
        }
        (k, m)
    }

    /// Largest curvature reversal found inside any piece on a sweep with at
    /// most `step` spacing (zero when every piece is monotone).
    pub fn monotonicity_violation(&self, step: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| {
                let ks: Vec<f64> = sweep_points(p.start(), p.end(), step)
                    .into_iter()
                    .map(|s| {
                        let [_, d1, d2] = p.derivs(s);
                        graph_curvature(d1, d2)
                    })
                    .collect();
                reversal(&ks)
            })
            .fold(0.0, f64::max)
    }

    /// Value, slope and second-derivative mismatch across piece joins.
    pub fn join_mismatch(&self) -> f64 {
        self.pieces
            .windows(2)
            .map(|w| {
                let u = w[0].end();
                let a = w[0].derivs(u);
                let b = w[1].derivs(u);
                (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

pub fn graph_curvature(d1: f64, d2: f64) -> f64 {
    d2 / (1.0 + d1 * d1).powf(1.5)
}

fn sweep_points(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = (((b - a) / step).ceil() as usize).max(1);
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}

/// Largest amount by which a sequence goes back against its established trend.
fn reversal(ks: &[f64]) -> f64 {
    let mut trend = 0.0f64;
    let mut anchor = ks.first().copied().unwrap_or(0.0);
    let mut worst = 0.0f64;
    for &k in ks.iter().skip(1) {
        let d = k - anchor;
        if d.abs() <= MONOTONE_EPS {
            continue;
        }
        if trend == 0.0 {
            trend = d.signum();
            anchor = k;
        } else if d.signum() == trend {
            anchor = k;
        } else {
            worst = worst.max(d.abs());
        }
    }
    worst
}

/// Options for [`fit_bspline_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub kappa_max: f64,
    pub slope_max: Option<f64>,
    /// Maximum absolute deviation at the samples; `None` disables the check.
    pub fit_tolerance: Option<f64>,
    pub max_pieces: usize,
    /// Hard interpolation constraint at the first abscissa.
    pub pin_start: Option<f64>,
    /// Hard interpolation constraint at the last abscissa.
    pub pin_end: Option<f64>,
    /// Breakpoints to start from (must span the samples).
    pub initial_breakpoints: Option<Vec<f64>>,
    /// Smallest smoothing weight tried.
    pub min_smoothing: Option<f64>,
}

impl FitOptions {
    pub fn new(kappa_max: f64) -> Self {
        Self {
            kappa_max,
            slope_max: None,
            fit_tolerance: Some(0.5),
            max_pieces: 64,
            pin_start: None,
            pin_end: None,
            initial_breakpoints: None,
            min_smoothing: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub spline: PiecewiseBSpline,
    /// Breakpoints of the underlying global fit (before monotone splitting).
    pub breakpoints: Vec<f64>,
    /// Maximum absolute deviation at the samples.
    pub residual: f64,
    pub smoothing: f64,
}

/// Fits `h(s)` to `samples` with the default 0.5 m tolerance and 64 spans.
pub fn fit_bspline_monotone_curvature(samples: &[(f64, f64)], kappa_max: f64) -> Result<PiecewiseBSpline> {
    fit_bspline_with(samples, &FitOptions::new(kappa_max)).map(|o| o.spline)
}

pub fn fit_bspline_with(samples: &[(f64, f64)], opts: &FitOptions) -> Result<FitOutcome> {
    let infeasible = |reason: String| Error::InfeasibleFit {
        context: "profile".into(),
        reason,
    };
    if samples.len() < 2 {
        return Err(Error::InvalidParams("need at least 2 samples".into()));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidParams(
            "sample abscissae must be strictly increasing".into(),
        ));
    }
    if !(opts.kappa_max > 0.0) {
        return Err(Error::InvalidParams("kappa_max must be positive".into()));
    }
    let (a, b) = (samples[0].0, samples[samples.len() - 1].0);
    let datum = samples[0].1;
    let rel: Vec<(f64, f64)> = samples.iter().map(|&(s, h)| (s, h - datum)).collect();
    let samples = rel.as_slice();
    let (pin_start, pin_end) = (opts.pin_start.map(|z| z - datum), opts.pin_end.map(|z| z - datum));
    let mut breaks = match &opts.initial_breakpoints {
        Some(bp) if bp.len() >= 2 && bp[0] == a && bp[bp.len() - 1] == b => bp.clone(),
        _ => vec![a, b],
    };
    let length = b - a;
    let mut ladder: Vec<f64> = (0..=22).map(|k| 1e-10 * length.powi(3) * 10f64.powi(k)).collect();
    if let Some(m) = opts.min_smoothing {
        ladder.retain(|&l| l > m);
        ladder.insert(0, m);
    }

    loop {
        let mut accepted = None;
        for &lambda in &ladder {
            let piece = solve(samples, &breaks, lambda, pin_start, pin_end)?;
            if within_bounds(&piece, opts) {
                accepted = Some((lambda, piece));
                break;
            }
        }
        let Some((lambda, piece)) = accepted else {
            return Err(infeasible(format!(
                "no smoothing satisfies |kappa| <= {} and slope <= {:?} with {} span(s)",
                opts.kappa_max,
                opts.slope_max,
                breaks.len() - 1
            )));
        };

        let residuals: Vec<f64> = samples.iter().map(|&(s, h)| (piece.derivs(s)[0] - h).abs()).collect();
        let residual = residuals.iter().copied().fold(0.0, f64::max);
        let tol = opts.fit_tolerance.unwrap_or(f64::INFINITY);
        if residual <= tol {
            let ends = [
                opts.pin_start.unwrap_or(datum + piece.ctrl[0].1),
                opts.pin_end.unwrap_or(datum + piece.ctrl[piece.ctrl.len() - 1].1),
            ];
            let spline = split_monotone(piece, a, b, datum, ends);
            return Ok(FitOutcome {
                spline,
                breakpoints: breaks,
                residual,
                smoothing: lambda,
            });
        }

        // Bisect every span holding a sample that misses the tolerance.
        let spans = breaks.len() - 1;
        let mut bad = vec![false; spans];
        for (&(s, _), &r) in samples.iter().zip(&residuals) {
            if r > tol {
                let i = breaks.partition_point(|&k| k <= s).saturating_sub(1).min(spans - 1);
                bad[i] = true;
            }
        }
        let mut next = Vec::with_capacity(breaks.len() * 2);
        let mut added = 0;
        for i in 0..spans {
            next.push(breaks[i]);
            if bad[i] && spans + added < opts.max_pieces {
                next.push(0.5 * (breaks[i] + breaks[i + 1]));
                added += 1;
            }
        }
        next.push(b);
        if added == 0 {
            return Err(infeasible(format!(
                "residual {residual:.3} m exceeds {tol} m with {spans} span(s)"
            )));
        }
        breaks = next;
    }
}

fn within_bounds(piece: &BSplinePiece, opts: &FitOptions) -> bool {
    let bp = piece.breakpoints();
    for w in bp.windows(2) {
        for j in 0..=SWEEP_PER_SPAN {
            let s = w[0] + (w[1] - w[0]) * j as f64 / SWEEP_PER_SPAN as f64;
            let [_, d1, d2] = piece.derivs(s);
            if graph_curvature(d1, d2).abs() > opts.kappa_max * BOUND_MARGIN {
                return false;
            }
            if let Some(m) = opts.slope_max {
                if d1.abs() > m * BOUND_MARGIN {
                    return false;
                }
            }
        }
    }
    true
}

fn full_knots(breaks: &[f64]) -> Vec<f64> {
    let mut k = vec![breaks[0]; DEGREE];
    k.extend_from_slice(breaks);
    k.extend(std::iter::repeat_n(breaks[breaks.len() - 1], DEGREE));
    k
}

/// Penalized least squares on the clamped basis with optional pinned ends.
fn solve(
    samples: &[(f64, f64)],
    breaks: &[f64],
    lambda: f64,
    pin_start: Option<f64>,
    pin_end: Option<f64>,
) -> Result<BSplinePiece> {
    let knots = full_knots(breaks);
    let n = breaks.len() + DEGREE - 1;
    let mut ata = DMatrix::<f64>::zeros(n, n);
    let mut aty = DVector::<f64>::zeros(n);
    for &(s, h) in samples {
        let span = find_span(&knots, n, s);
        let ders = ders_basis(span, s, &knots);
        for j in 0..=DEGREE {
            let r = span - DEGREE + j;
            aty[r] += ders[0][j] * h;
            for l in 0..=DEGREE {
                ata[(r, span - DEGREE + l)] += ders[0][j] * ders[0][l];
            }
        }
    }
    // Integral of h''^2: h'' is linear on each span, so 2-point Gauss is exact.
    let g = 0.5 / 3f64.sqrt();
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        for x in [0.5 - g, 0.5 + g] {
            let s = w[0] + len * x;
            let span = find_span(&knots, n, s);
            let ders = ders_basis(span, s, &knots);
            for j in 0..=DEGREE {
                for l in 0..=DEGREE {
                    ata[(span - DEGREE + j, span - DEGREE + l)] += lambda * 0.5 * len * ders[2][j] * ders[2][l];
                }
            }
        }
    }

    let mut fixed: Vec<Option<f64>> = vec![None; n];
    fixed[0] = pin_start;
    fixed[n - 1] = pin_end;
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let mut coeffs: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    if !free.is_empty() {
        let m = free.len();
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DVector::<f64>::zeros(m);
        for (ii, &i) in free.iter().enumerate() {
            rhs[ii] = aty[i];
            for (k, f) in fixed.iter().enumerate() {
                if let Some(v) = f {
                    rhs[ii] -= ata[(i, k)] * v;
                }
            }
            for (jj, &j) in free.iter().enumerate() {
                a[(ii, jj)] = ata[(i, j)];
            }
        }
        let x = match a.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => a.lu().solve(&rhs).ok_or_else(|| Error::InfeasibleFit {
                context: "profile".into(),
                reason: "singular least-squares system".into(),
            })?,
        };
        for (ii, &i) in free.iter().enumerate() {
            coeffs[i] = x[ii];
        }
    }
    Ok(BSplinePiece::from_coeffs(knots, &coeffs))
}

/// Cuts the spline at interior curvature extrema.
fn split_monotone(piece: BSplinePiece, a: f64, b: f64, datum: f64, ends: [f64; 2]) -> PiecewiseBSpline {
    let bp = piece.breakpoints();
    let mut grid = Vec::new();
    for w in bp.windows(2) {
        for j in 0..SWEEP_PER_SPAN {
            grid.push(w[0] + (w[1] - w[0]) * j as f64 / SWEEP_PER_SPAN as f64);
        }
    }
    grid.push(b);
    let kappa = |s: f64| {
        let [_, d1, d2] = piece.derivs(s);
        graph_curvature(d1, d2)
    };
    let ks: Vec<f64> = grid.iter().map(|&s| kappa(s)).collect();

    // Turning points of the sampled sequence, ignoring flat stretches.
    let mut cuts = Vec::new();
    let mut trend = 0.0f64;
    let mut last_idx = 0usize;
    for i in 1..ks.len() {
        let d = ks[i] - ks[last_idx];
        if d.abs() <= MONOTONE_EPS {
            continue;
        }
        if trend != 0.0 && d.signum() != trend {
            let lo = grid[last_idx.saturating_sub(1)];
            let hi = grid[(last_idx + 1).min(grid.len() - 1)];
            cuts.push(golden_extremum(&kappa, lo, hi, trend > 0.0));
        }
        trend = d.signum();
        last_idx = i;
    }

    let span_min = (b - a) * 1e-9;
    let mut pieces = Vec::new();
    let mut rest = piece;
    let mut prev = a;
    for mut u in cuts {
        if let Some(&k) = bp.iter().find(|&&k| (k - u).abs() <= span_min) {
            u = k;
        }
        if u - prev <= span_min || b - u <= span_min {
            continue;
        }
        let (l, r) = rest.split(u);
        pieces.push(l);
        rest = r;
        prev = u;
    }
    pieces.push(rest);
    PiecewiseBSpline { pieces, datum, ends }
}

fn golden_extremum(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, maximum: bool) -> f64 {
    let g = |s: f64| if maximum { -f(s) } else { f(s) };
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        }
    }
    0.5 * (lo + hi)
}

fn multiplicity(knots: &[f64], u: f64) -> usize {
    knots.iter().filter(|&&k| k == u).count()
}

fn find_span(knots: &[f64], nctrl: usize, u: f64) -> usize {
    if u >= knots[nctrl] {
        return nctrl - 1;
    }
    if u <= knots[DEGREE] {
        return DEGREE;
    }
    let (mut lo, mut hi) = (DEGREE, nctrl);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Nonzero basis functions and their first two derivatives at `u`.
fn ders_basis(span: usize, u: f64, knots: &[f64]) -> [[f64; 4]; 3] {
    const P: usize = DEGREE;
    const N: usize = 2;
    let mut ndu = [[0.0f64; P + 1]; P + 1];
    let mut left = [0.0f64; P + 1];
    let mut right = [0.0f64; P + 1];
    ndu[0][0] = 1.0;
    for j in 1..=P {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = [[0.0f64; P + 1]; N + 1];
    for j in 0..=P {
        ders[0][j] = ndu[j][P];
    }
    let mut a = [[0.0f64; P + 1]; 2];
    for r in 0..=P as isize {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=N as isize {
            let mut d = 0.0;
            let rk = r - k;
            let pk = P as isize - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk as usize];
            }
            let j1 = if rk >= -1 { 1 } else { -rk };
            let j2 = if r - 1 <= pk { k - 1 } else { P as isize - r };
            for j in j1..=j2 {
                let j = j as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[(pk + 1) as usize][(rk + j as isize) as usize];
                d += a[s2][j] * ndu[(rk + j as isize) as usize][pk as usize];
            }
            if r <= pk {
                a[s2][k as usize] = -a[s1][(k - 1) as usize] / ndu[(pk + 1) as usize][r as usize];
                d += a[s2][k as usize] * ndu[r as usize][pk as usize];
            }
            ders[k as usize][r as usize] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = P as f64;
    for k in 1..=N {
        for j in 0..=P {
            ders[k][j] *= factor;
        }
        factor *= (P - k) as f64;
    }
    ders
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|i| {
                let s = a + (b - a) * i as f64 / n as f64;
                (s, f(s))
            })
            .collect()
    }

    #[test]
    fn affine_data_is_reproduced() {
        let data = samples(|s| 2.0 + 0.01 * s, 0.0, 100.0, 20);
        let sp = fit_bspline_monotone_curvature(&data, 0.1).unwrap();
        assert_eq!(sp.pieces().len(), 1);
        for &(s, h) in &data {
            assert!((sp.eval(s) - h).abs() < 1e-9);
        }
        let (k, m) = sp.sweep_maxima(0.5);
        assert!(k < 1e-9, "curvature {k}");
        assert!((m - 0.01).abs() < 1e-9);
    }

    #[test]
    fn parabola_curvature_peaks_at_origin() {
        let data = samples(|s| 0.04 * s * s, 0.0, 10.0, 10);
        let sp = fit_bspline_monotone_curvature(&data, 0.1).unwrap();
        for &(s, h) in &data {
            assert!((sp.eval(s) - h).abs() < 1e-6);
        }
        // Analytic: kappa = h'' / (1 + h'^2)^1.5 = 0.08 at s = 0.
        assert!((sp.curvature(0.0) - 0.08).abs() < 1e-6);
        let (k, _) = sp.sweep_maxima(0.01);
        assert!(k <= 0.1);
        assert_eq!(sp.monotonicity_violation(0.01), 0.0);
    }

    #[test]
    fn two_samples_give_a_line() {
        let sp = fit_bspline_monotone_curvature(&[(0.0, 1.0), (10.0, 3.0)], 0.1).unwrap();
        assert_eq!(sp.eval(0.0), 1.0);
        assert_eq!(sp.eval(10.0), 3.0);
        assert!((sp.eval(5.0) - 2.0).abs() < 1e-9);
        assert!(sp.curvature(5.0).abs() < 1e-9);
    }

    #[test]
    fn wavy_data_is_split_into_monotone_pieces() {
        let data = samples(|s| 3.0 * (s / 40.0).sin(), 0.0, 400.0, 80);
        let sp = fit_bspline_monotone_curvature(&data, 0.1).unwrap();
        assert!(sp.pieces().len() > 2);
        assert_eq!(sp.monotonicity_violation(0.5), 0.0);
        assert!(sp.join_mismatch() < 1e-6);
        for &(s, h) in &data {
            assert!((sp.eval(s) - h).abs() <= 0.5);
        }
    }

    #[test]
    fn pinned_end_is_exact() {
        let data = samples(|s| 0.02 * s, 0.0, 200.0, 40);
        let mut opts = FitOptions::new(0.1);
        opts.fit_tolerance = None;
        opts.pin_end = Some(3.6);
        let fit = fit_bspline_with(&data, &opts).unwrap();
        assert_eq!(fit.spline.eval(200.0), 3.6);
    }

    #[test]
    fn impossible_slope_is_infeasible() {
        let data = samples(|s| 0.5 * s, 0.0, 50.0, 10);
        let mut opts = FitOptions::new(0.1);
        opts.slope_max = Some(0.08);
        assert!(matches!(
            fit_bspline_with(&data, &opts),
            Err(Error::InfeasibleFit { .. })
        ));
    }

    #[test]
    fn unsorted_samples_are_rejected() {
        assert!(fit_bspline_monotone_curvature(&[(1.0, 0.0), (0.0, 0.0)], 0.1).is_err());
    }

    #[test]
    fn knot_insertion_preserves_curve() {
        let data = samples(|s| (s / 7.0).cos(), 0.0, 30.0, 30);
        let piece = solve(&data, &[0.0, 10.0, 20.0, 30.0], 1e-3, None, None).unwrap();
        let refined = piece.insert_knot(13.0).insert_knot(13.0);
        for i in 0..=60 {
            let s = 0.5 * i as f64;
            let (a, b) = (piece.derivs(s), refined.derivs(s));
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[2] - b[2]).abs() < 1e-10);
        }
        let (l, r) = piece.split(13.0);
        assert!((l.derivs(12.0)[0] - piece.derivs(12.0)[0]).abs() < 1e-12);
        assert!((r.derivs(14.0)[0] - piece.derivs(14.0)[0]).abs() < 1e-12);
    }
}
