use crate::arch::{protocol_slots, ArchitectureSpec, Protocol};
use crate::ir::{Coord, Point};

use super::transport_box;

fn sign(d: f64) -> f64 {
    if d < 0.0 { -1.0 } else { 1.0 }
}

/// Transport path length, in lattice spacings, of the default lane geometry:
/// from the first messenger load to the last arrival at a readout or exit point.
pub fn path_cells(arch: &ArchitectureSpec, a: Coord, b: Coord) -> f64 {
    let (protocol, a, b) = protocol_slots(arch.variant, a, b);
    let (pa, pb) = (a.position(), b.position());
    let (lo, hi) = transport_box(arch.lattice_size);
    let edge = |s: f64| if s > 0.0 { hi } else { lo };
    let (sx, sy) = (sign(pb.x - pa.x), sign(pb.y - pa.y));
    // (load time, arrival time) per messenger, in cells of travel
    let spans: Vec<(f64, f64)> = match protocol {
        Protocol::TwoWayBelt => {
            let y1 = pa.y - sy * 0.5;
            let x2 = pb.x + sx * 0.5;
            let y3 = pb.y + sy * 0.5;
            let x4 = pa.x - sx * 0.5;
            let t1 = (x2 - edge(-sx)).abs();
            let t2 = t1 + (y3 - y1).abs();
            let t3 = t2 + (x2 - x4).abs();
            vec![
                (0.0, t1 + (edge(sx) - x2).abs()),
                (t1 - (y1 - edge(-sy)).abs(), t1 + (edge(sy) - y1).abs()),
                (t2 - (x2 - edge(sx)).abs(), t2 + (edge(-sx) - x2).abs()),
                (t3 - (y3 - edge(sy)).abs(), t3 + (edge(-sy) - y3).abs()),
            ]
        }
        Protocol::OneWayAligned | Protocol::OneWayCrossed => {
            let (y1, x2) = if protocol == Protocol::OneWayAligned { (pa.y - 0.5, pb.x + 0.5) } else { (pa.y + 0.5, pb.x + 0.5) };
            let tx = x2 - lo;
            vec![(0.0, hi - lo), (tx - (y1 - lo), tx + (hi - y1))]
        }
        Protocol::ThrowCatchThrow | Protocol::ThrowAndMeasure => {
            let len = flight_length(pa, pb, lo, hi);
            let trips = if protocol == Protocol::ThrowCatchThrow { 2.0 } else { 1.0 };
            vec![(0.0, trips * len)]
        }
        Protocol::ShuttleAndRoute => {
            let y_lo = pa.y - sy * 0.5;
            let x_lo = pa.x - sx * 0.5;
            let x_hi = pb.x + sx * 0.5;
            let y_hi = pb.y + sy * 0.5;
            let x5 = pa.x + sx * 0.5;
            let len = (x_hi - edge(-sx)).abs()
                + 2.0 * (y_hi - y_lo).abs()
                + (x_hi - x_lo).abs()
                + (x5 - x_lo).abs()
                + (y_lo - edge(-sy)).abs();
            vec![(0.0, len)]
        }
    };
    let start = spans.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let end = spans.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    end - start
}

fn flight_length(a: Point, b: Point, lo: f64, hi: f64) -> f64 {
    let dir = b.sub(&a);
    let n = dir.norm();
    if n == 0.0 {
        return 0.0;
    }
    let u = dir.scale(1.0 / n);
    let p0 = a.add(&Point::new(-u.y, u.x).scale(0.5));
    let (mut s_in, mut s_out) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, du) in [(p0.x, u.x), (p0.y, u.y)] {
        if du.abs() > 1e-15 {
            let (t0, t1) = ((lo - p) / du, (hi - p) / du);
            s_in = s_in.max(t0.min(t1));
            s_out = s_out.min(t0.max(t1));
        }
    }
    s_out - s_in
}

/// Closed-form makespan of one logical CZ: transport time plus per-variant constants
/// (readout and correction for measuring protocols, one turnaround for
/// throw-catch-throw, five routings for shuttle-and-route). The planner may move to
/// an outer lane when the nominal one cannot fit the gate windows, which adds an
/// L-independent offset of a few cells.
pub fn makespan_estimate(arch: &ArchitectureSpec, a: Coord, b: Coord) -> f64 {
    let transport = path_cells(arch, a, b) * arch.spacing / arch.speed;
    let constant = match protocol_slots(arch.variant, a, b).0 {
        Protocol::OneWayAligned | Protocol::OneWayCrossed | Protocol::ThrowAndMeasure => arch.tr + arch.t1,
        Protocol::ThrowCatchThrow => arch.t_turnaround,
        Protocol::ShuttleAndRoute => 5.0 * arch.t_route,
        Protocol::TwoWayBelt => 0.0,
    };
    transport + constant
}
