//! Interval exchange transformations: first-return maps to horizontal
//! transversals, slow Rauzy induction, and Convention-2 shortening.
//!
//! The first return of the flow to a sub-interval of a bottom edge is
//! computed by chasing sub-intervals through the time-1 level map,
//! splitting at its discontinuities, until every piece lands back in the
//! transversal. All endpoints are exact rationals, so the chase
//! terminates: the dynamics is a rigid permutation of a finite rational
//! lattice.

use crate::error::IetError;
use crate::flow::{level_map, RationalDirection};
use crate::perm::Perm;
use crate::rational::{frac, Rat};
use crate::surface::SquareTiledSurface;
use num::{One, Signed, Zero};

/// A horizontal transversal: the interval `[lo, hi)` on the bottom edge
/// of one square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversal {
    pub square: usize,
    pub lo: Rat,
    pub hi: Rat,
}

impl Transversal {
    pub fn full_edge(square: usize) -> Transversal {
        Transversal { square, lo: Rat::zero(), hi: Rat::one() }
    }

    pub fn length(&self) -> Rat {
        &self.hi - &self.lo
    }

    fn contains(&self, square: usize, x: &Rat) -> bool {
        square == self.square && *x >= self.lo && *x < self.hi
    }
}

/// An interval exchange on `[0, total)`: interval `i` (in domain order)
/// has length `lengths[i]` and is placed at position `perm(i)` in the
/// image order. `return_heights[i]` is the return time of interval `i`
/// in flow levels (1 for abstract data).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iet {
    lengths: Vec<Rat>,
    perm: Perm,
    return_heights: Vec<u64>,
}

impl Iet {
    pub fn new(lengths: Vec<Rat>, perm: Perm, return_heights: Vec<u64>) -> Result<Iet, IetError> {
        if lengths.is_empty() || lengths.len() != perm.len() {
            return Err(IetError::BadData("lengths and permutation size mismatch".into()));
        }
        if return_heights.len() != lengths.len() {
            return Err(IetError::BadData("heights size mismatch".into()));
        }
        if lengths.iter().any(|l| !l.is_positive()) {
            return Err(IetError::BadData("lengths must be positive".into()));
        }
        Ok(Iet { lengths, perm, return_heights })
    }

    /// Abstract exchange with unit heights.
    pub fn abstract_exchange(lengths: Vec<Rat>, perm: Perm) -> Result<Iet, IetError> {
        let n = lengths.len();
        Iet::new(lengths, perm, vec![1; n])
    }

    /// Two-interval rotation data `(a, total - a)` with the swap.
    pub fn rotation(a: Rat, total: Rat) -> Result<Iet, IetError> {
        let b = &total - &a;
        Iet::abstract_exchange(vec![a, b], Perm::new(vec![1, 0]).unwrap())
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[Rat] {
        &self.lengths
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    pub fn return_heights(&self) -> &[u64] {
        &self.return_heights
    }

    pub fn total(&self) -> Rat {
        self.lengths.iter().sum()
    }

    /// Left endpoints of the domain intervals.
    pub fn domain_starts(&self) -> Vec<Rat> {
        let mut acc = Rat::zero();
        let mut out = Vec::with_capacity(self.len());
        for l in &self.lengths {
            out.push(acc.clone());
            acc = &acc + l;
        }
        out
    }

    /// Left endpoints of the image intervals, indexed by domain interval.
    pub fn image_starts(&self) -> Vec<Rat> {
        let n = self.len();
        let mut acc = Rat::zero();
        let mut by_interval = vec![Rat::zero(); n];
        for pos in 0..n {
            let i = self.perm.apply_inv(pos);
            by_interval[i] = acc.clone();
            acc = &acc + &self.lengths[i];
        }
        by_interval
    }

    /// Apply the exchange to a point of `[0, total)`.
    pub fn map(&self, x: &Rat) -> Rat {
        let starts = self.domain_starts();
        let images = self.image_starts();
        for i in (0..self.len()).rev() {
            if *x >= starts[i] {
                return images[i].clone() + (x - &starts[i]);
            }
        }
        unreachable!("point below 0")
    }

    /// Interval index containing `x`.
    pub fn interval_of(&self, x: &Rat) -> usize {
        let starts = self.domain_starts();
        (0..self.len()).rev().find(|&i| *x >= starts[i]).unwrap()
    }

    /// Exact bijectivity check: the image intervals tile `[0, total)`.
    pub fn is_valid_exchange(&self) -> bool {
        let mut spans: Vec<(Rat, Rat)> = self
            .image_starts()
            .iter()
            .zip(&self.lengths)
            .map(|(s, l)| (s.clone(), s + l))
            .collect();
        spans.sort();
        let mut expect = Rat::zero();
        for (lo, hi) in spans {
            if lo != expect {
                return false;
            }
            expect = hi;
        }
        expect == self.total()
    }
}

#[derive(Debug, Clone)]
struct Returned {
    src_lo: Rat,
    len: Rat,
    /// Landing offset relative to the transversal's left endpoint.
    dst_lo: Rat,
    levels: u64,
}

const MAX_CHASE_STEPS: u64 = 2_000_000;

/// First-return interval exchange of the flow in direction `dir` to the
/// given transversal, with per-interval return times in levels.
pub fn first_return_iet(
    surface: &SquareTiledSurface,
    dir: RationalDirection,
    transversal: &Transversal,
) -> Result<Iet, IetError> {
    if transversal.square >= surface.k()
        || transversal.lo.is_negative()
        || transversal.hi > Rat::one()
        || transversal.lo >= transversal.hi
    {
        return Err(IetError::BadTransversal);
    }
    check_endpoint_orbits(surface, dir, transversal)?;

    let breakpoint = level_breakpoint(dir);
    // (src_lo, len, square, cur_lo, levels)
    let mut queue: Vec<(Rat, Rat, usize, Rat, u64)> = vec![(
        Rat::zero(),
        transversal.length(),
        transversal.square,
        transversal.lo.clone(),
        0,
    )];
    let mut done: Vec<Returned> = Vec::new();
    let mut steps = 0u64;

    while let Some((src_lo, len, square, cur_lo, levels)) = queue.pop() {
        steps += 1;
        if steps > MAX_CHASE_STEPS {
            return Err(IetError::BadData("interval chase did not converge".into()));
        }
        // Split at the level map's discontinuity inside this square.
        let cur_hi = &cur_lo + &len;
        if let Some(bp) = &breakpoint {
            if *bp > cur_lo && *bp < cur_hi {
                let left_len = bp - &cur_lo;
                queue.push((src_lo.clone(), left_len.clone(), square, cur_lo.clone(), levels));
                queue.push((&src_lo + &left_len, &len - &left_len, square, bp.clone(), levels));
                continue;
            }
        }
        // The whole piece shares one itinerary for the next level.
        let (nsq, nlo) = level_map(surface, dir, square, &cur_lo);
        let levels = levels + 1;
        let nhi = &nlo + &len;
        debug_assert!(nhi <= Rat::one());
        if nsq == transversal.square && nlo < transversal.hi && nhi > transversal.lo {
            // left overhang keeps flowing
            if nlo < transversal.lo {
                queue.push((src_lo.clone(), &transversal.lo - &nlo, nsq, nlo.clone(), levels));
            }
            let in_lo = nlo.clone().max(transversal.lo.clone());
            let in_hi = nhi.clone().min(transversal.hi.clone());
            done.push(Returned {
                src_lo: &src_lo + (&in_lo - &nlo),
                len: &in_hi - &in_lo,
                dst_lo: &in_lo - &transversal.lo,
                levels,
            });
            // right overhang keeps flowing
            if nhi > transversal.hi {
                queue.push((
                    &src_lo + (&transversal.hi - &nlo),
                    &nhi - &transversal.hi,
                    nsq,
                    transversal.hi.clone(),
                    levels,
                ));
            }
        } else {
            queue.push((src_lo, len, nsq, nlo, levels));
        }
    }

    assemble(done, &transversal.length())
}

/// The single discontinuity of the level map inside each square, if any:
/// `x = frac(-p/q)`.
fn level_breakpoint(dir: RationalDirection) -> Option<Rat> {
    let bp = frac(&(-dir.slope()));
    if bp.is_zero() {
        None
    } else {
        Some(bp)
    }
}

/// Trace the forward orbits of the transversal endpoints; flag an orbit
/// that meets a cone point strictly before its first return. Starting
/// on a vertex (Convention-2 anchoring) is allowed.
fn check_endpoint_orbits(
    surface: &SquareTiledSurface,
    dir: RationalDirection,
    transversal: &Transversal,
) -> Result<(), IetError> {
    let bound = surface.k() as u64 * dir.q() as u64 + 1;
    let right_start = if transversal.hi == Rat::one() {
        (surface.h().apply(transversal.square), Rat::zero())
    } else {
        (transversal.square, transversal.hi.clone())
    };
    let endpoints =
        [("left", transversal.square, transversal.lo.clone()), ("right", right_start.0, right_start.1)];
    for (name, sq0, x0) in endpoints {
        let (mut sq, mut x) = (sq0, x0);
        for level in 1..=bound {
            let (nsq, nx) = level_map(surface, dir, sq, &x);
            sq = nsq;
            x = nx;
            if transversal.contains(sq, &x) {
                break; // returned first
            }
            if x.is_zero() && surface.lattice_is_singular(sq) {
                return Err(IetError::TransversalHitsSingularity {
                    endpoint: name.to_string(),
                    levels: level,
                });
            }
        }
    }
    Ok(())
}

fn assemble(mut done: Vec<Returned>, total: &Rat) -> Result<Iet, IetError> {
    done.sort_by(|a, b| a.src_lo.cmp(&b.src_lo));
    // Merge adjacent pieces split spuriously (orbit through a regular
    // vertex): same translation offset and same return time.
    let mut merged: Vec<Returned> = Vec::new();
    for r in done {
        match merged.last_mut() {
            Some(last)
                if last.levels == r.levels
                    && &last.src_lo + &last.len == r.src_lo
                    && &last.dst_lo + &last.len == r.dst_lo =>
            {
                last.len = &last.len + &r.len;
            }
            _ => merged.push(r),
        }
    }
    // Pieces must tile [0, total).
    let mut expect = Rat::zero();
    for r in &merged {
        if r.src_lo != expect {
            return Err(IetError::BadData("return pieces do not tile the transversal".into()));
        }
        expect = &expect + &r.len;
    }
    if &expect != total {
        return Err(IetError::BadData("return pieces do not cover the transversal".into()));
    }
    // Permutation from the image order.
    let n = merged.len();
    let mut by_dst: Vec<(usize, Rat)> = merged.iter().map(|r| r.dst_lo.clone()).enumerate().collect();
    by_dst.sort_by(|a, b| a.1.cmp(&b.1));
    let mut perm_vec = vec![0usize; n];
    for (pos, (i, _)) in by_dst.iter().enumerate() {
        perm_vec[*i] = pos;
    }
    let iet = Iet::new(
        merged.iter().map(|r| r.len.clone()).collect(),
        Perm::new(perm_vec).ok_or_else(|| IetError::BadData("image order not a bijection".into()))?,
        merged.iter().map(|r| r.levels).collect(),
    )?;
    if !iet.is_valid_exchange() {
        return Err(IetError::BadData("image intervals do not tile".into()));
    }
    Ok(iet)
}

/// One step of slow Rauzy induction: induce on `[0, total − m)` where
/// `m` is the shorter of the last domain interval and the last image
/// interval. Equal competing lengths signal a saddle connection.
pub fn rauzy_step(iet: &Iet) -> Result<Iet, IetError> {
    if iet.len() < 2 {
        return Err(IetError::BadData("need at least two intervals".into()));
    }
    let n = iet.len();
    let last_top = &iet.lengths()[n - 1];
    let bottom_idx = iet.perm().apply_inv(n - 1);
    let last_bottom = &iet.lengths()[bottom_idx];
    if last_top == last_bottom {
        return Err(IetError::DegenerateStep);
    }
    let cut = last_top.min(last_bottom).clone();
    let new_total = iet.total() - &cut;
    induce_iet(iet, &new_total)
}

/// First-return map of an exchange to `[0, sub_total)`, heights
/// accumulated through the originals.
pub fn induce_iet(iet: &Iet, sub_total: &Rat) -> Result<Iet, IetError> {
    let total = iet.total();
    if !sub_total.is_positive() || *sub_total > total {
        return Err(IetError::BadData("induction interval must lie inside the domain".into()));
    }
    let starts = iet.domain_starts();
    let images = iet.image_starts();

    // (src_lo, len, cur_lo, levels)
    let mut queue: Vec<(Rat, Rat, Rat, u64)> =
        vec![(Rat::zero(), sub_total.clone(), Rat::zero(), 0u64)];
    let mut done: Vec<Returned> = Vec::new();
    let mut steps = 0u64;
    while let Some((src_lo, len, cur_lo, levels)) = queue.pop() {
        steps += 1;
        if steps > MAX_CHASE_STEPS {
            return Err(IetError::BadData("induction chase did not converge".into()));
        }
        let cur_hi = &cur_lo + &len;
        // split at domain breakpoints of the exchange
        if let Some(bp) = starts.iter().find(|s| **s > cur_lo && **s < cur_hi) {
            let left = bp - &cur_lo;
            queue.push((src_lo.clone(), left.clone(), cur_lo.clone(), levels));
            queue.push((&src_lo + &left, &len - &left, bp.clone(), levels));
            continue;
        }
        let idx = iet.interval_of(&cur_lo);
        let nlo = &images[idx] + (&cur_lo - &starts[idx]);
        let nhi = &nlo + &len;
        let levels = levels + iet.return_heights()[idx];
        if nlo < *sub_total {
            let in_hi = nhi.clone().min(sub_total.clone());
            done.push(Returned {
                src_lo: src_lo.clone(),
                len: &in_hi - &nlo,
                dst_lo: nlo.clone(),
                levels,
            });
            if nhi > *sub_total {
                queue.push((
                    &src_lo + (sub_total - &nlo),
                    &nhi - sub_total,
                    sub_total.clone(),
                    levels,
                ));
            }
        } else {
            queue.push((src_lo, len, nlo, levels));
        }
    }
    assemble(done, sub_total)
}

/// Why a shortening run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShortenStop {
    /// The next induced interval would be shorter than the stop length.
    StopLength,
    /// Reached a single interval; nothing left to induce on.
    SingleInterval,
    /// A transversal endpoint orbit hit a cone point.
    HitSingularity,
}

#[derive(Debug, Clone)]
pub struct ShortenStage {
    pub length: Rat,
    pub intervals: usize,
    pub degenerate: bool,
}

/// Report from Convention-2 shortening: the schedule of lengths tried,
/// the best transversal found, and whether the minimal interval count
/// `N = 2g + n − 1` was achieved.
#[derive(Debug, Clone)]
pub struct ShortenReport {
    pub stages: Vec<ShortenStage>,
    pub transversal: Transversal,
    pub iet: Iet,
    pub target_n: usize,
    pub achieved_n: usize,
    pub achieved: bool,
    pub stop: ShortenStop,
}

/// Shorten a transversal anchored at the bottom-left vertex of
/// `prong_square` along the slow-Rauzy schedule, recomputing the
/// first-return map from the surface at every stage. Saddle connections
/// (equal competing lengths, or endpoint orbits into cone points) are
/// reported, not fatal: the best stage seen is returned.
pub fn shorten_to_convention(
    surface: &SquareTiledSurface,
    dir: RationalDirection,
    prong_square: usize,
    stop_len: Option<&Rat>,
) -> Result<ShortenReport, IetError> {
    if prong_square >= surface.k() {
        return Err(IetError::BadTransversal);
    }
    let target_n = surface.convention_interval_count();
    let mut stages: Vec<ShortenStage> = Vec::new();
    let mut results: Vec<(Transversal, Iet)> = Vec::new();
    let mut length = Rat::one();
    let stop;
    loop {
        if let Some(min_len) = stop_len {
            if &length < min_len {
                stop = ShortenStop::StopLength;
                break;
            }
        }
        let tr = Transversal { square: prong_square, lo: Rat::zero(), hi: length.clone() };
        let iet = match first_return_iet(surface, dir, &tr) {
            Ok(iet) => iet,
            Err(IetError::TransversalHitsSingularity { .. }) => {
                stop = ShortenStop::HitSingularity;
                break;
            }
            Err(e) => return Err(e),
        };
        let n = iet.len();
        let degenerate = if n >= 2 {
            iet.lengths()[n - 1] == iet.lengths()[iet.perm().apply_inv(n - 1)]
        } else {
            false
        };
        stages.push(ShortenStage { length: length.clone(), intervals: n, degenerate });
        results.push((tr, iet.clone()));
        if n < 2 {
            stop = ShortenStop::SingleInterval;
            break;
        }
        let last_top = iet.lengths()[n - 1].clone();
        let last_bottom = iet.lengths()[iet.perm().apply_inv(n - 1)].clone();
        let next = &length - last_top.min(last_bottom);
        if !next.is_positive() {
            stop = ShortenStop::SingleInterval;
            break;
        }
        length = next;
    }
    if results.is_empty() {
        return Err(IetError::NoValidTransversal);
    }
    // Prefer the shortest stage achieving the target count, else the
    // shortest stage with the smallest count reached.
    let pick = |pred: &dyn Fn(usize) -> bool| -> Option<usize> {
        (0..stages.len()).rev().find(|&i| pred(stages[i].intervals))
    };
    let (best, achieved) = match pick(&|n| n == target_n) {
        Some(i) => (i, true),
        None => {
            let min_n = stages.iter().map(|s| s.intervals).min().unwrap();
            (pick(&|n| n == min_n).unwrap(), false)
        }
    };
    let achieved_n = stages[best].intervals;
    let (transversal, iet) = results[best].clone();
    Ok(ShortenReport { stages, transversal, iet, target_n, achieved_n, achieved, stop })
}
