//! Ergodic sums along trajectories, skew-product orbits, and exact
//! per-period sum profiles over cylinder transversals.
//!
//! The ergodic sum S_t(x) adds the signed value of every lifted cut
//! segment the trajectory crosses during `[0, t)`. Crossings are counted
//! with multiplicity where a segment overlaps itself on the surface,
//! which is why events are keyed by (segment, segment parameter) rather
//! than by surface point.
//!
//! The sum profile is computed without any sampling: over one period of
//! a cylinder, the itinerary of every orbit in the same width cell is
//! combinatorially constant, so for each (trajectory piece, cut piece)
//! pair the set of transversal points whose orbit crosses that piece is
//! an explicit rational interval. Accumulating these bands gives the
//! exact piecewise-constant map `x ↦ S_period(x)`. Values at the finitely
//! many breakpoints follow the right-continuous convention.

use crate::cuts::LiftedCuts;
use crate::error::SumError;
use crate::flow::{trace_segment, Cylinder, FlowResult, RationalDirection, TraceOutcome, TracePiece};
use crate::group::GroupElement;
use crate::rational::{fmt_rat, is_integer, rat, rat_int, Rat};
use crate::surface::{SquareTiledSurface, SurfacePoint};
use num::{One, Signed, Zero};
use std::collections::BTreeSet;

/// One crossing of a lifted cut segment by a trajectory.
#[derive(Debug, Clone)]
pub struct CrossingEvent {
    /// Time of the crossing, in levels, within `[0, t)`.
    pub time: Rat,
    /// Index into `LiftedCuts::segments`.
    pub segment: usize,
    /// Position along the segment as a fraction in `[0, 1]`.
    pub u: Rat,
    pub value: GroupElement,
}

fn cross(ax: &Rat, ay: &Rat, bx: &Rat, by: &Rat) -> Rat {
    ax * by - ay * bx
}

/// Reject directions parallel to any cut.
fn check_parallel(lifted: &LiftedCuts, dir: RationalDirection) -> Result<(), SumError> {
    for seg in &lifted.segments {
        let (a, b) = seg.slope;
        if a * dir.q() - b * dir.p() == 0 {
            return Err(SumError::DirectionParallelToCut { index: seg.cut_index });
        }
    }
    Ok(())
}

/// Trace a trajectory and collect every cut crossing in `[0, t)`,
/// sorted by time. Fails on cone-point hits, on crossings through a
/// segment endpoint, and on directions parallel to a cut.
pub fn trajectory_crossings(
    surface: &SquareTiledSurface,
    lifted: &LiftedCuts,
    start: &SurfacePoint,
    dir: RationalDirection,
    t: &Rat,
) -> Result<(SurfacePoint, Vec<CrossingEvent>), SumError> {
    check_parallel(lifted, dir)?;
    if start.x.is_zero() && start.y.is_zero() && surface.lattice_is_singular(start.square) {
        return Err(SumError::StartAtSingularity);
    }
    let dx = t * dir.slope();
    let trace = trace_segment(surface, start, &dx, t);
    let end = match trace.outcome {
        TraceOutcome::Completed(p) => p,
        TraceOutcome::HitSingularity { fraction, .. } => {
            return Err(SumError::TrajectoryHitsSingularity { time: fmt_rat(&(fraction * t)) })
        }
    };

    let mut seen: BTreeSet<(usize, Rat)> = BTreeSet::new();
    let mut events: Vec<CrossingEvent> = Vec::new();
    for piece in &trace.pieces {
        let tdx = &piece.to.0 - &piece.from.0;
        let tdy = &piece.to.1 - &piece.from.1;
        for &(si, pi) in lifted.pieces_in_square(piece.square) {
            let seg = &lifted.segments[si];
            let cp = &seg.pieces[pi];
            let cdx = &cp.to.0 - &cp.from.0;
            let cdy = &cp.to.1 - &cp.from.1;
            let det = cross(&tdx, &tdy, &cdx, &cdy);
            if det.is_zero() {
                continue; // pieces parallel (cut deg. under this piece pairing)
            }
            let ex = &cp.from.0 - &piece.from.0;
            let ey = &cp.from.1 - &piece.from.1;
            let w = cross(&ex, &ey, &cdx, &cdy) / &det;
            let u_loc = cross(&ex, &ey, &tdx, &tdy) / &det;
            if w.is_negative() || w > Rat::one() || u_loc.is_negative() || u_loc > Rat::one() {
                continue;
            }
            // global parameters
            let s_glob = &piece.s_from + &w * (&piece.s_to - &piece.s_from);
            if s_glob >= Rat::one() {
                continue; // time t excluded (half-open)
            }
            let u_glob = &cp.s_from + &u_loc * (&cp.s_to - &cp.s_from);
            let time = &s_glob * t;
            if u_glob.is_zero() || u_glob == Rat::one() {
                return Err(SumError::TrajectoryHitsCutEndpoint {
                    segment: si,
                    time: fmt_rat(&time),
                });
            }
            if seen.insert((si, u_glob.clone())) {
                events.push(CrossingEvent { time, segment: si, u: u_glob, value: seg.value.clone() });
            }
        }
    }
    events.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.segment.cmp(&b.segment)));
    Ok((end, events))
}

/// The ergodic sum `S_t(x)`: signed values accumulated over `[0, t)`.
pub fn ergodic_sum(
    surface: &SquareTiledSurface,
    lifted: &LiftedCuts,
    start: &SurfacePoint,
    dir: RationalDirection,
    t: &Rat,
) -> Result<GroupElement, SumError> {
    let (_, events) = trajectory_crossings(surface, lifted, start, dir, t)?;
    Ok(events.iter().fold(lifted.group.zero(), |acc, e| lifted.group.add(&acc, &e.value)))
}

/// Sample the skew flow `(φ_t(x), g₀ + S_t(x))` at the given times,
/// which must lie in `[0, t]`.
pub fn skew_orbit(
    surface: &SquareTiledSurface,
    lifted: &LiftedCuts,
    start: &SurfacePoint,
    g0: &GroupElement,
    dir: RationalDirection,
    t: &Rat,
    sample_times: &[Rat],
) -> Result<Vec<(SurfacePoint, GroupElement)>, SumError> {
    let (_, events) = trajectory_crossings(surface, lifted, start, dir, t)?;
    let mut out = Vec::with_capacity(sample_times.len());
    for tau in sample_times {
        if tau.is_negative() || tau > t {
            return Err(SumError::TrajectoryHitsSingularity {
                time: format!("sample time {} outside [0, t]", fmt_rat(tau)),
            });
        }
        let fiber = events
            .iter()
            .filter(|e| e.time < *tau)
            .fold(g0.clone(), |acc, e| lifted.group.add(&acc, &e.value));
        let pos = match crate::flow::flow(surface, start, dir, tau)
            .map_err(|_| SumError::StartAtSingularity)?
        {
            FlowResult::EndPoint(p) => p,
            FlowResult::SingularityHit { time, .. } => {
                return Err(SumError::TrajectoryHitsSingularity { time: fmt_rat(&time) })
            }
        };
        out.push((pos, fiber));
    }
    Ok(out)
}

/// Exact piecewise-constant sum profile over one cylinder transversal:
/// the value on `[breakpoints[i], breakpoints[i+1])` is `values[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumProfile {
    pub square: usize,
    pub period: u64,
    pub breakpoints: Vec<Rat>,
    pub values: Vec<GroupElement>,
}

impl SumProfile {
    pub fn domain(&self) -> (Rat, Rat) {
        (self.breakpoints[0].clone(), self.breakpoints[self.breakpoints.len() - 1].clone())
    }

    pub fn width(&self) -> Rat {
        let (lo, hi) = self.domain();
        hi - lo
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&Rat, &Rat, &GroupElement)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (&self.breakpoints[i], &self.breakpoints[i + 1], v))
    }

    pub fn value_at(&self, x: &Rat) -> Option<&GroupElement> {
        self.pieces().find(|(lo, hi, _)| *lo <= x && x < *hi).map(|(_, _, v)| v)
    }

    /// Exact integral of the free part: `Σ width·value ∈ (ℤᵈ ⊗ ℚ)`.
    pub fn integral_free(&self) -> Vec<Rat> {
        let d = self.values.first().map_or(0, |v| v.free.len());
        let mut acc = vec![Rat::zero(); d];
        for (lo, hi, v) in self.pieces() {
            let w = hi - lo;
            for (a, &c) in acc.iter_mut().zip(&v.free) {
                *a = &*a + &w * rat_int(c);
            }
        }
        acc
    }

    /// Total measure of pieces carrying exactly the given value.
    pub fn measure_of(&self, value: &GroupElement) -> Rat {
        self.pieces().filter(|(_, _, v)| *v == value).map(|(lo, hi, _)| hi - lo).sum()
    }
}

/// Exact sum profile `x ↦ S_c(x)` over the base transversal of `cyl`
/// (its leftmost width cell), where `c` is the cylinder period.
pub fn transversal_sum_profile(
    surface: &SquareTiledSurface,
    lifted: &LiftedCuts,
    cyl: &Cylinder,
    dir: RationalDirection,
) -> Result<SumProfile, SumError> {
    let q = dir.q();
    let (dom_sq, dom_j) = cyl.cells[0];
    let lo = rat(dom_j, q);
    let hi = rat(dom_j + 1, q);
    let width = &hi - &lo;

    // A cut endpoint exactly on one of this cylinder's transversal cells
    // makes the period sums ambiguous at that orbit.
    for seg in &lifted.segments {
        let segment_endpoints = [
            seg.start.clone(),
            normalize_endpoint(surface, seg.pieces.last().expect("nonempty trace")),
        ];
        for pt in segment_endpoints {
            if pt.y.is_zero() {
                let j = crate::rational::floor_i64(&(&pt.x * rat_int(q)));
                if cyl.cells.contains(&(pt.square, j)) {
                    return Err(SumError::CutEndpointOnTransversalOrbit {
                        breakpoint: fmt_rat(&pt.x),
                    });
                }
            }
        }
    }

    let c = cyl.crossings;
    let x_mid = (&lo + &hi) / rat_int(2);
    let t_total = rat_int(c as i64);
    let dx_total = &t_total * dir.slope();
    let trace = trace_segment(surface, &SurfacePoint::new(dom_sq, x_mid.clone(), Rat::zero()), &dx_total, &t_total);
    let pieces = match trace.outcome {
        TraceOutcome::Completed(p) => {
            debug_assert_eq!(p, SurfacePoint::new(dom_sq, x_mid.clone(), Rat::zero()));
            trace.pieces
        }
        TraceOutcome::HitSingularity { .. } => {
            unreachable!("cell midpoints stay off vertex orbits")
        }
    };

    let half = &width / rat_int(2);
    let xi_lo = -&half;
    let xi_hi = half.clone();
    let slope = dir.slope();
    let steep = if dir.p() == 0 { Rat::zero() } else { rat(dir.q(), dir.p()) };

    // Bands (ξ-intervals with a value) accumulated over all pairs.
    let mut bands: Vec<(Rat, Rat, GroupElement)> = Vec::new();

    // Event-time sensitivity to ξ: y-events are fixed, x-events shift
    // by −ξ·q/p.
    let boundary_slope = |x_coord: &Rat, y_coord: &Rat| -> Rat {
        let on_x_wall = x_coord.is_zero() || *x_coord == Rat::one();
        let on_y_wall = y_coord.is_zero() || *y_coord == Rat::one();
        debug_assert!(on_x_wall ^ on_y_wall || (on_x_wall && y_coord.is_zero()));
        if on_y_wall {
            Rat::zero()
        } else {
            let _ = on_x_wall;
            -steep.clone()
        }
    };

    for piece in &pieces {
        let tau_a = &piece.s_from * &t_total;
        let tau_b = &piece.s_to * &t_total;
        // Unwrap offsets: local = unrolled − (ax, ay), both integers.
        let ax = &x_mid + &tau_a * &slope - &piece.from.0;
        let ay = &tau_a - &piece.from.1;
        debug_assert!(is_integer(&ax) && is_integer(&ay));
        // Window boundary slopes in ξ.
        let ca = if piece.s_from.is_zero() {
            Rat::zero()
        } else {
            boundary_slope(&piece.from.0, &piece.from.1)
        };
        let cb = if piece.s_to == Rat::one() {
            Rat::zero()
        } else {
            boundary_slope(&piece.to.0, &piece.to.1)
        };

        for &(si, pi) in lifted.pieces_in_square(piece.square) {
            let seg = &lifted.segments[si];
            let cp = &seg.pieces[pi];
            let cdx = &cp.to.0 - &cp.from.0;
            let cdy = &cp.to.1 - &cp.from.1;
            // u'(ξ) solves the crossing; parallel cuts never cross.
            let denom = &cdx - &cdy * &slope;
            if denom.is_zero() {
                continue;
            }
            let kconst = &x_mid + (&ay + &cp.from.1) * &slope - &ax - &cp.from.0;
            // u'(ξ) = (ξ + K)/denom; τ(ξ) = ay + cy + u'(ξ)·cdy
            // Constraints, each affine in ξ, intersected as an interval:
            let mut lo_bound = xi_lo.clone();
            let mut hi_bound = xi_hi.clone();
            let mut empty = false;
            // Affine inequality m·ξ + b ⋛ 0, strict or not.
            let mut apply = |m: &Rat, b: &Rat, ge: bool, strict: bool| {
                if m.is_zero() {
                    let sat = if ge {
                        if strict { b.is_positive() } else { !b.is_negative() }
                    } else if strict {
                        b.is_negative()
                    } else {
                        !b.is_positive()
                    };
                    if !sat {
                        empty = true;
                    }
                    return;
                }
                let root = -b / m;
                let wants_ge = ge == m.is_positive();
                if wants_ge {
                    // ξ ≥ root (or >): half-open pieces make strictness moot
                    if root > lo_bound {
                        lo_bound = root;
                    }
                } else if root < hi_bound {
                    hi_bound = root;
                }
            };

            // u' ≥ 0 and u' < 1 in global segment parameter terms:
            // u_glob(ξ) = u_from + u'(ξ)(u_to − u_from), constrain to
            // [u_from, u_to) ⟺ u' ∈ [0, 1).
            // u'(ξ) = (ξ + K)/denom
            let inv = Rat::one() / &denom;
            let u_m = inv.clone();
            let u_b = &kconst * &inv;
            apply(&u_m, &u_b, true, false); // u' ≥ 0
            apply(&u_m, &(&u_b - Rat::one()), false, true); // u' − 1 < 0
            // τ(ξ) = ay + cy + u'(ξ)·cdy
            let t_m = &u_m * &cdy;
            let t_b = &ay + &cp.from.1 + &u_b * &cdy;
            // τ ≥ τa + ca·ξ
            apply(&(&t_m - &ca), &(&t_b - &tau_a), true, false);
            // τ < τb + cb·ξ
            apply(&(&t_m - &cb), &(&t_b - &tau_b), false, true);
            // global time < c is implied by the last piece's window.

            if !empty && lo_bound < hi_bound {
                bands.push((
                    &x_mid + &lo_bound,
                    &x_mid + &hi_bound,
                    seg.value.clone(),
                ));
            }
        }
    }

    // Sweep the bands into a piecewise-constant profile.
    let mut cuts_at: Vec<Rat> = vec![lo.clone(), hi.clone()];
    for (a, b, _) in &bands {
        cuts_at.push(a.clone());
        cuts_at.push(b.clone());
    }
    cuts_at.sort();
    cuts_at.dedup();
    let mut breakpoints = Vec::with_capacity(cuts_at.len());
    let mut values = Vec::new();
    for w in cuts_at.windows(2) {
        let mid = (&w[0] + &w[1]) / rat_int(2);
        let mut v = lifted.group.zero();
        for (a, b, val) in &bands {
            if *a <= mid && mid < *b {
                v = lifted.group.add(&v, val);
            }
        }
        // merge equal neighbors
        if values.last() == Some(&v) {
            continue;
        }
        breakpoints.push(w[0].clone());
        values.push(v);
    }
    breakpoints.push(hi.clone());
    if values.is_empty() {
        breakpoints = vec![lo, hi];
        values.push(lifted.group.zero());
    }
    Ok(SumProfile { square: dom_sq, period: c, breakpoints, values })
}

fn normalize_endpoint(surface: &SquareTiledSurface, piece: &TracePiece) -> SurfacePoint {
    let mut sq = piece.square;
    let mut x = piece.to.0.clone();
    let mut y = piece.to.1.clone();
    if x == Rat::one() {
        sq = surface.h().apply(sq);
        x = Rat::zero();
    }
    if y == Rat::one() {
        sq = surface.v().apply(sq);
        y = Rat::zero();
    }
    SurfacePoint::new(sq, x, y)
}
