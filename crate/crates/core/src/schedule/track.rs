//! Piecewise-linear motion and the distance queries the planner needs.

use serde::Serialize;

use crate::ir::{Belt, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Zone {
    Readout,
    ThrowZone,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SegmentKind {
    BeltRide(Belt),
    /// Velocity in lattice spacings per second.
    FreeFlight(Point),
    Routing { from: Belt, to: Belt },
    Turnaround,
    Stationary(Zone),
}

impl SegmentKind {
    pub fn label(&self) -> String {
        match self {
            SegmentKind::BeltRide(b) => format!("belt:{b}"),
            SegmentKind::FreeFlight(_) => "flight".to_string(),
            SegmentKind::Routing { from, to } => format!("routing:{from}>{to}"),
            SegmentKind::Turnaround => "turnaround".to_string(),
            SegmentKind::Stationary(Zone::Readout) => "stationary:readout".to_string(),
            SegmentKind::Stationary(Zone::ThrowZone) => "stationary:throw-zone".to_string(),
        }
    }

    pub fn is_transport(&self) -> bool {
        !matches!(self, SegmentKind::Stationary(_))
    }
}

/// Straight-line motion of one messenger; positions in lattice spacings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectorySegment {
    pub messenger: u32,
    pub kind: SegmentKind,
    pub t_start: f64,
    pub t_end: f64,
    pub start: Point,
    pub end: Point,
}

impl TrajectorySegment {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// Position at `t`, extrapolating linearly outside the segment.
    pub fn at(&self, t: f64) -> Point {
        let d = self.duration();
        if d <= 0.0 {
            return self.start;
        }
        let f = (t - self.t_start) / d;
        self.start.add(&self.end.sub(&self.start).scale(f))
    }

    /// Speed in lattice spacings per second.
    pub fn speed(&self) -> f64 {
        let d = self.duration();
        if d <= 0.0 { 0.0 } else { self.start.distance(&self.end) / d }
    }

    pub fn shifted(&self, dt: f64) -> Self {
        Self { t_start: self.t_start + dt, t_end: self.t_end + dt, ..*self }
    }
}

/// Where an atom is over time.
#[derive(Clone, Copy, Debug)]
pub enum Track<'a> {
    Static(Point),
    /// Segments of one messenger, sorted by time and contiguous.
    Path(&'a [TrajectorySegment]),
}

impl Track<'_> {
    pub fn span(&self) -> (f64, f64) {
        match self {
            Track::Static(_) => (f64::NEG_INFINITY, f64::INFINITY),
            Track::Path(segs) => match (segs.first(), segs.last()) {
                (Some(f), Some(l)) => (f.t_start, l.t_end),
                _ => (f64::INFINITY, f64::NEG_INFINITY),
            },
        }
    }

    pub fn position(&self, t: f64) -> Option<Point> {
        match self {
            Track::Static(p) => Some(*p),
            Track::Path(segs) => self.piece(t).map(|i| segs[i].at(t)),
        }
    }

    fn piece(&self, t: f64) -> Option<usize> {
        let Track::Path(segs) = self else { return None };
        let (lo, hi) = self.span();
        if t < lo || t > hi {
            return None;
        }
        let i = segs.partition_point(|s| s.t_end < t);
        Some(i.min(segs.len() - 1))
    }

    fn breakpoints(&self, t0: f64, t1: f64, out: &mut Vec<f64>) {
        if let Track::Path(segs) = self {
            for s in segs.iter() {
                for t in [s.t_start, s.t_end] {
                    if t > t0 && t < t1 {
                        out.push(t);
                    }
                }
            }
        }
    }

    /// Linear motion valid on a piece around `mid`: (position at `s`, position at `e`).
    fn linear(&self, mid: f64, s: f64, e: f64) -> Option<(Point, Point)> {
        match self {
            Track::Static(p) => Some((*p, *p)),
            Track::Path(segs) => self.piece(mid).map(|i| (segs[i].at(s), segs[i].at(e))),
        }
    }
}

/// Splits `[t0, t1]` (clipped to when both atoms exist) into pieces on which both
/// move linearly, yielding `(s, e, relative position at s, at e)`.
fn pieces(a: &Track, b: &Track, t0: f64, t1: f64) -> Vec<(f64, f64, Point, Point)> {
    let (alo, ahi) = a.span();
    let (blo, bhi) = b.span();
    let lo = t0.max(alo).max(blo);
    let hi = t1.min(ahi).min(bhi);
    if lo > hi || !lo.is_finite() || !hi.is_finite() {
        return Vec::new();
    }
    let mut cuts = vec![lo, hi];
    a.breakpoints(lo, hi, &mut cuts);
    b.breakpoints(lo, hi, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    if cuts.len() == 1 {
        cuts.push(cuts[0]);
    }
    let mut out = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (s, e) = (w[0], w[1]);
        let mid = 0.5 * (s + e);
        if let (Some((as_, ae)), Some((bs, be))) = (a.linear(mid, s, e), b.linear(mid, s, e)) {
            out.push((s, e, as_.sub(&bs), ae.sub(&be)));
        }
    }
    out
}

/// Maximal time intervals inside `[t0, t1]` during which the atoms are within `radius`.
pub fn proximity_intervals(a: &Track, b: &Track, radius: f64, t0: f64, t1: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (s, e, d0, d1) in pieces(a, b, t0, t1) {
        let len = e - s;
        let vel = d1.sub(&d0);
        // |d0 + vel·f|² ≤ r², f ∈ [0, 1]
        let qa = vel.x * vel.x + vel.y * vel.y;
        let qb = 2.0 * (d0.x * vel.x + d0.y * vel.y);
        let qc = d0.x * d0.x + d0.y * d0.y - radius * radius;
        let (f0, f1) = if qa <= 1e-300 {
            if qc <= 0.0 { (0.0, 1.0) } else { continue }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa))
        };
        let (f0, f1) = (f0.max(0.0), f1.min(1.0));
        if f0 > f1 {
            continue;
        }
        let iv = (s + f0 * len, s + f1 * len);
        match out.last_mut() {
            Some(last) if iv.0 <= last.1 + 1e-12 * (1.0 + last.1.abs()) => last.1 = last.1.max(iv.1),
            _ => out.push(iv),
        }
    }
    out
}

/// Smallest separation over `[t0, t1]` while both atoms exist, with the time it occurs.
pub fn min_distance(a: &Track, b: &Track, t0: f64, t1: f64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (s, e, d0, d1) in pieces(a, b, t0, t1) {
        let vel = d1.sub(&d0);
        let qa = vel.x * vel.x + vel.y * vel.y;
        let f = if qa <= 1e-300 { 0.0 } else { (-(d0.x * vel.x + d0.y * vel.y) / qa).clamp(0.0, 1.0) };
        let d = d0.add(&vel.scale(f)).norm();
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, s + f * (e - s)));
        }
    }
    best
}

/// Largest separation over `[t0, t1]`; `None` if either atom is missing at some point.
pub fn max_distance(a: &Track, b: &Track, t0: f64, t1: f64) -> Option<f64> {
    let (alo, ahi) = a.span();
    let (blo, bhi) = b.span();
    let tol = 1e-12 * (1.0 + t1.abs());
    if t0 < alo.max(blo) - tol || t1 > ahi.min(bhi) + tol {
        return None;
    }
    pieces(a, b, t0, t1)
        .into_iter()
        .map(|(_, _, d0, d1)| d0.norm().max(d1.norm()))
        .reduce(f64::max)
}
