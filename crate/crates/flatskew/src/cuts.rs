//! Cut collections and their lifts.
//!
//! A cut is a pair of parallel congruent planar segments carrying the
//! group values `+g` and `-g`. The segment starting at `x` with slope
//! `(a, b)` and length parameter `ℓ` is `{x + s·(a,b) : s ∈ [0, ℓ]}`;
//! its Euclidean length is `ℓ·√(a²+b²)`. Segments are lifted to a
//! surface through the marked point: the planar segment from the marked
//! point's projection to the cut's start is traced first, then the cut
//! itself. Either trace meeting a cone point makes the lift
//! non-generic; callers resample.

use crate::error::CutError;
use crate::flow::{trace_segment, TraceOutcome, TracePiece};
use crate::group::{GroupElement, GroupSpec};
use crate::rational::{frac, rat, Rat};
use crate::surface::{SquareTiledSurface, SurfacePoint};
use num::{BigInt, One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One pair of parallel congruent segments with opposite values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPair {
    pub start_plus: (Rat, Rat),
    pub start_minus: (Rat, Rat),
    /// Primitive direction vector ζ.
    pub slope: (i64, i64),
    /// Length parameter ℓ > 0 (displacement = ℓ·ζ).
    pub len: Rat,
    pub value: GroupElement,
}

impl CutPair {
    pub fn displacement(&self) -> (Rat, Rat) {
        (&self.len * rat(self.slope.0, 1), &self.len * rat(self.slope.1, 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutCollection {
    pub group: GroupSpec,
    pub cuts: Vec<CutPair>,
}

impl CutCollection {
    pub fn new(group: GroupSpec, cuts: Vec<CutPair>) -> Result<CutCollection, CutError> {
        for (index, c) in cuts.iter().enumerate() {
            if !c.len.is_positive() {
                return Err(CutError::NonPositiveLength { index });
            }
            let (a, b) = c.slope;
            if (a, b) == (0, 0) || num::integer::gcd(a.unsigned_abs(), b.unsigned_abs()) != 1 {
                return Err(CutError::BadSlope { index });
            }
            group.check(&c.value)?;
        }
        Ok(CutCollection { group, cuts })
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn values(&self) -> Vec<GroupElement> {
        self.cuts.iter().map(|c| c.value.clone()).collect()
    }
}

/// One lifted segment: the lift of `γᵢ⁺` or `γᵢ⁻`.
#[derive(Debug, Clone)]
pub struct LiftedSegment {
    pub cut_index: usize,
    /// +1 for the plus segment, −1 for the minus segment.
    pub sign: i8,
    /// Signed value carried: `±gᵢ`.
    pub value: GroupElement,
    pub slope: (i64, i64),
    pub len: Rat,
    pub start: SurfacePoint,
    /// Within-square pieces; piece parameters `s ∈ [0,1]` are fractions
    /// of the whole segment.
    pub pieces: Vec<TracePiece>,
}

#[derive(Debug, Clone)]
pub struct LiftedCuts {
    pub group: GroupSpec,
    pub segments: Vec<LiftedSegment>,
    /// Piece lookup per square: `(segment index, piece index)`.
    by_square: Vec<Vec<(usize, usize)>>,
}

impl LiftedCuts {
    fn build(group: GroupSpec, segments: Vec<LiftedSegment>, k: usize) -> LiftedCuts {
        let mut by_square = vec![Vec::new(); k];
        for (si, seg) in segments.iter().enumerate() {
            for (pi, piece) in seg.pieces.iter().enumerate() {
                by_square[piece.square].push((si, pi));
            }
        }
        LiftedCuts { group, segments, by_square }
    }

    pub fn pieces_in_square(&self, square: usize) -> &[(usize, usize)] {
        &self.by_square[square]
    }

    /// Sum of values over all segments; `e_G` for honest pairs.
    pub fn total_value(&self) -> GroupElement {
        self.segments
            .iter()
            .fold(self.group.zero(), |acc, s| self.group.add(&acc, &s.value))
    }
}

/// Lift a planar point to the surface along the segment from the marked
/// point's projection, per the branched-cover chart of the marked point.
pub fn lift_point(
    surface: &SquareTiledSurface,
    planar: &(Rat, Rat),
) -> Result<SurfacePoint, CutError> {
    let m = surface.marked();
    let dx = &planar.0 - &m.x;
    let dy = &planar.1 - &m.y;
    let trace = trace_segment(surface, m, &dx, &dy);
    match trace.outcome {
        TraceOutcome::Completed(p) => Ok(p),
        TraceOutcome::HitSingularity { .. } => Err(CutError::PointLiftHitsSingularity),
    }
}

/// Lift every segment of the collection. Fails with the offending cut
/// index when any connecting segment or cut segment meets a cone point.
pub fn lift_cuts(
    surface: &SquareTiledSurface,
    cuts: &CutCollection,
) -> Result<LiftedCuts, CutError> {
    let mut segments = Vec::with_capacity(2 * cuts.len());
    for (index, cut) in cuts.cuts.iter().enumerate() {
        let (dx, dy) = cut.displacement();
        for (sign, planar_start) in [(1i8, &cut.start_plus), (-1i8, &cut.start_minus)] {
            let start = lift_point(surface, planar_start)
                .map_err(|_| CutError::LiftHitsSingularity { index })?;
            let trace = trace_segment(surface, &start, &dx, &dy);
            let pieces = match trace.outcome {
                TraceOutcome::Completed(_) => trace.pieces,
                TraceOutcome::HitSingularity { .. } => {
                    return Err(CutError::LiftHitsSingularity { index })
                }
            };
            let value = if sign > 0 { cut.value.clone() } else { cuts.group.neg(&cut.value) };
            segments.push(LiftedSegment {
                cut_index: index,
                sign,
                value,
                slope: cut.slope,
                len: cut.len.clone(),
                start,
                pieces,
            });
        }
    }
    Ok(LiftedCuts::build(cuts.group.clone(), segments, surface.k()))
}

/// Escape hatch for diagnostics: lift explicitly signed, possibly
/// unpaired segments. The mean-zero guarantee of honest cut pairs does
/// not apply to collections built this way.
pub fn lift_raw_segments(
    surface: &SquareTiledSurface,
    group: &GroupSpec,
    segments: &[((Rat, Rat), (i64, i64), Rat, GroupElement)],
) -> Result<LiftedCuts, CutError> {
    let mut lifted = Vec::with_capacity(segments.len());
    for (index, (planar_start, slope, len, value)) in segments.iter().enumerate() {
        group.check(value)?;
        if !len.is_positive() {
            return Err(CutError::NonPositiveLength { index });
        }
        let start = lift_point(surface, planar_start)?;
        let dx = len * rat(slope.0, 1);
        let dy = len * rat(slope.1, 1);
        let trace = trace_segment(surface, &start, &dx, &dy);
        let pieces = match trace.outcome {
            TraceOutcome::Completed(_) => trace.pieces,
            TraceOutcome::HitSingularity { .. } => {
                return Err(CutError::LiftHitsSingularity { index })
            }
        };
        lifted.push(LiftedSegment {
            cut_index: index,
            sign: 1,
            value: value.clone(),
            slope: *slope,
            len: len.clone(),
            start,
            pieces,
        });
    }
    Ok(LiftedCuts::build(group.clone(), lifted, surface.k()))
}

/// Axis-aligned sampling box.
#[derive(Debug, Clone)]
pub struct BoundingBox {
    pub x_lo: Rat,
    pub y_lo: Rat,
    pub x_hi: Rat,
    pub y_hi: Rat,
}

impl BoundingBox {
    pub fn unit() -> BoundingBox {
        BoundingBox { x_lo: Rat::zero(), y_lo: Rat::zero(), x_hi: Rat::one(), y_hi: Rat::one() }
    }
}

const DYADIC_DENOM: u64 = 1 << 32;

fn dyadic(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(BigInt::from(rng.gen_range(0..DYADIC_DENOM)), BigInt::from(DYADIC_DENOM))
}

fn sample_in(rng: &mut ChaCha8Rng, lo: &Rat, hi: &Rat) -> Rat {
    lo + (hi - lo) * dyadic(rng)
}

/// Seeded sampling of a cut collection: coordinates and lengths are
/// dyadic rationals of denominator 2³², slopes small primitive vectors,
/// values small and nonzero.
pub fn sample_cuts(
    n: usize,
    bbox: &BoundingBox,
    len_range: (&Rat, &Rat),
    group: &GroupSpec,
    seed: u64,
) -> CutCollection {
    assert!(n >= 1, "need at least one cut");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts = Vec::with_capacity(n);
    for _ in 0..n {
        let start_plus = (sample_in(&mut rng, &bbox.x_lo, &bbox.x_hi), sample_in(&mut rng, &bbox.y_lo, &bbox.y_hi));
        let start_minus = (sample_in(&mut rng, &bbox.x_lo, &bbox.x_hi), sample_in(&mut rng, &bbox.y_lo, &bbox.y_hi));
        let slope = loop {
            let a = rng.gen_range(-5..=5i64);
            let b = rng.gen_range(-5..=5i64);
            if (a, b) == (0, 0) {
                continue;
            }
            let g = num::integer::gcd(a.unsigned_abs(), b.unsigned_abs()) as i64;
            break (a / g, b / g);
        };
        let mut len = sample_in(&mut rng, len_range.0, len_range.1);
        if !len.is_positive() {
            len = len_range.1.clone();
        }
        let value = loop {
            let v = GroupElement {
                free: (0..group.free_rank).map(|_| rng.gen_range(-3..=3i64)).collect(),
                torsion: group.torsion.iter().map(|&m| rng.gen_range(0..m)).collect(),
            };
            if !v.is_zero() {
                break v;
            }
        };
        cuts.push(CutPair { start_plus, start_minus, slope, len, value });
    }
    CutCollection::new(group.clone(), cuts).expect("sampled cuts are valid by construction")
}

/// Sample until the collection lifts cleanly; returns the resample count.
pub fn sample_liftable_cuts(
    surface: &SquareTiledSurface,
    n: usize,
    bbox: &BoundingBox,
    len_range: (&Rat, &Rat),
    group: &GroupSpec,
    seed: u64,
    max_tries: u64,
) -> Option<(CutCollection, LiftedCuts, u64)> {
    for attempt in 0..max_tries {
        let cuts = sample_cuts(n, bbox, len_range, group, seed.wrapping_add(attempt));
        if let Ok(lifted) = lift_cuts(surface, &cuts) {
            return Some((cuts, lifted, attempt));
        }
    }
    None
}

/// Fractional position of a surface point across the width of the
/// cylinders in direction `(p, q)`: `frac(q·x − p·y)`. Constant along
/// flow lines and independent of the chart.
pub fn width_position(point: &SurfacePoint, p: i64, q: i64) -> Rat {
    frac(&(rat(q, 1) * &point.x - rat(p, 1) * &point.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;
    use crate::rational::rat_int;
    use crate::surface::default_marked_point;

    fn torus() -> SquareTiledSurface {
        SquareTiledSurface::torus()
    }

    fn h2_three_square() -> SquareTiledSurface {
        SquareTiledSurface::new(
            3,
            Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap(),
            Perm::from_cycles(3, &[&[0, 1]]).unwrap(),
            default_marked_point(),
        )
        .unwrap()
    }

    #[test]
    fn lift_point_of_marked_projection_is_marked() {
        let t = torus();
        let m = t.marked().clone();
        let p = lift_point(&t, &(m.x.clone(), m.y.clone())).unwrap();
        assert_eq!(p, m);
    }

    #[test]
    fn torus_lift_is_fractional_part() {
        // On the torus the lift of a planar point is its coordinatewise
        // fractional part, independent of the marked point.
        let t = torus();
        for (px, py) in [(rat(5, 2), rat(7, 3)), (rat(-1, 4), rat(9, 5)), (rat(0, 1), rat(0, 1))] {
            match lift_point(&t, &(px.clone(), py.clone())) {
                Ok(p) => {
                    assert_eq!(p, SurfacePoint::new(0, frac(&px), frac(&py)));
                }
                Err(_) => panic!("torus lifts cannot fail: no cone points"),
            }
        }
        assert_eq!(
            lift_point(&t, &(rat(5, 2), rat(7, 3))).unwrap(),
            SurfacePoint::new(0, rat(1, 2), rat(1, 3))
        );
    }

    #[test]
    fn lift_aimed_at_cone_point_fails() {
        let s = h2_three_square();
        let m = s.marked();
        // overshoot through the top-right corner of square 0
        let target = (&m.x + rat(2, 1) * (rat_int(1) - &m.x), &m.y + rat(2, 1) * (rat_int(1) - &m.y));
        assert!(matches!(lift_point(&s, &target), Err(CutError::PointLiftHitsSingularity)));
    }

    #[test]
    fn vertical_pair_on_torus_lifts_to_single_pieces() {
        let t = torus();
        let group = GroupSpec::integers();
        let cuts = CutCollection::new(
            group.clone(),
            vec![CutPair {
                start_plus: (rat(1, 4), rat(1, 10)),
                start_minus: (rat(3, 4), rat(1, 10)),
                slope: (0, 1),
                len: rat(1, 2),
                value: GroupElement::free_1d(1),
            }],
        )
        .unwrap();
        let lifted = lift_cuts(&t, &cuts).unwrap();
        assert_eq!(lifted.segments.len(), 2);
        for seg in &lifted.segments {
            assert_eq!(seg.pieces.len(), 1);
            assert_eq!(seg.pieces[0].square, 0);
            // vertical: x constant, y spans [1/10, 6/10]
            assert_eq!(seg.pieces[0].from.1, rat(1, 10));
            assert_eq!(seg.pieces[0].to.1, rat(6, 10));
        }
        assert!(lifted.total_value().is_zero());
    }

    #[test]
    fn long_cut_wraps_with_measure_preserved() {
        let t = torus();
        let group = GroupSpec::integers();
        let cuts = CutCollection::new(
            group,
            vec![CutPair {
                start_plus: (rat(1, 4), rat(1, 10)),
                start_minus: (rat(1, 3), rat(1, 7)),
                slope: (0, 1),
                len: rat_int(3),
                value: GroupElement::free_1d(1),
            }],
        )
        .unwrap();
        let lifted = lift_cuts(&t, &cuts).unwrap();
        for seg in &lifted.segments {
            assert!(seg.pieces.len() >= 3);
            // fractions of the parameter tile [0,1]
            let total: Rat = seg.pieces.iter().map(|p| &p.s_to - &p.s_from).sum();
            assert_eq!(total, rat_int(1));
            // y-extent sums to the length 3
            let yext: Rat = seg.pieces.iter().map(|p| (&p.to.1 - &p.from.1)).sum();
            assert_eq!(yext, rat_int(3));
        }
    }

    #[test]
    fn pairing_invariant_on_random_collections() {
        let t = torus();
        let bbox = BoundingBox::unit();
        let group = GroupSpec::new(1, vec![3]);
        for seed in 0..10u64 {
            let cuts = sample_cuts(3, &bbox, (&rat(1, 4), &rat(2, 1)), &group, seed);
            let Ok(lifted) = lift_cuts(&t, &cuts) else { continue };
            assert!(lifted.total_value().is_zero());
            for i in 0..cuts.len() {
                let segs: Vec<_> =
                    lifted.segments.iter().filter(|s| s.cut_index == i).collect();
                assert_eq!(segs.len(), 2);
                assert_eq!(segs[0].slope, segs[1].slope);
                assert_eq!(segs[0].len, segs[1].len);
                let sum = lifted.group.add(&segs[0].value, &segs[1].value);
                assert!(sum.is_zero());
            }
        }
    }

    #[test]
    fn zero_length_rejected() {
        let group = GroupSpec::integers();
        let e = CutCollection::new(
            group,
            vec![CutPair {
                start_plus: (rat(1, 4), rat(1, 10)),
                start_minus: (rat(3, 4), rat(1, 10)),
                slope: (0, 1),
                len: rat_int(0),
                value: GroupElement::free_1d(1),
            }],
        );
        assert!(matches!(e, Err(CutError::NonPositiveLength { index: 0 })));
    }

    #[test]
    fn sampling_is_deterministic() {
        let bbox = BoundingBox::unit();
        let group = GroupSpec::integers();
        let a = sample_cuts(3, &bbox, (&rat(1, 4), &rat(1, 1)), &group, 99);
        let b = sample_cuts(3, &bbox, (&rat(1, 4), &rat(1, 1)), &group, 99);
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let c = sample_cuts(3, &bbox, (&rat(1, 4), &rat(1, 1)), &group, 100);
        assert_ne!(a, c);
    }

    #[test]
    fn sampled_cuts_lift_on_torus_with_rare_failures() {
        let t = torus();
        let bbox = BoundingBox::unit();
        let group = GroupSpec::integers();
        let mut failures = 0;
        for seed in 0..1000u64 {
            let cuts = sample_cuts(2, &bbox, (&rat(1, 8), &rat(3, 1)), &group, seed);
            if lift_cuts(&t, &cuts).is_err() {
                failures += 1;
            }
        }
        // exact degeneracies need coordinates aligned to the lattice;
        // dyadic 2^-32 sampling makes that essentially impossible
        assert!(failures <= 1, "unexpectedly many degenerate lifts: {failures}");
    }

    #[test]
    fn width_position_is_flow_invariant() {
        use crate::flow::{flow, FlowResult, RationalDirection};
        let s = h2_three_square();
        let dir = RationalDirection::new(2, 3).unwrap();
        let start = SurfacePoint::new(1, rat(3, 11), rat(1, 5));
        let w0 = width_position(&start, dir.p(), dir.q());
        let mut point = start;
        for _ in 0..5 {
            match flow(&s, &point, dir, &rat(7, 5)).unwrap() {
                FlowResult::EndPoint(p) => {
                    assert_eq!(width_position(&p, dir.p(), dir.q()), w0);
                    point = p;
                }
                FlowResult::SingularityHit { .. } => panic!("generic start hit a cone point"),
            }
        }
    }
}
