//! Farey dissection of the unit circle: rational approximation, the
//! family of intervals around low-denominator rationals ("major" arcs),
//! a covering family for the remainder ("minor" cover), exact
//! disjointness verification, and point classification.
//!
//! Every geometric decision here is made in exact rational arithmetic.
//! A point alpha enters as an f64, which is itself a dyadic rational,
//! so membership of alpha in a closed arc is decided with no rounding
//! at all; arcs that merely touch are handled deterministically.

use crate::arith::{gcd, ExactRational, MultTables, RationalPoint};
use crate::error::{Error, Result};

/// Largest dissection order accepted by [`build_dissection`]. The
/// covering family has about 0.3 * order^2 arcs, so this keeps the
/// materialized dissection within desk-scale memory.
pub const MAX_DISSECTION_ORDER: u64 = 2048;

/// Largest order accepted by [`dirichlet_approx`]; keeps every exact
/// intermediate product comfortably inside i128.
pub const MAX_APPROX_ORDER: f64 = (1u64 << 24) as f64;

/// A closed interval [center - radius, center + radius] around a
/// reduced fraction of the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub center: RationalPoint,
    pub radius: ExactRational,
}

impl Arc {
    pub fn new(center: RationalPoint, radius: ExactRational) -> Result<Arc> {
        if radius.is_negative() || radius == ExactRational::zero() {
            return Err(Error::InvalidParams("arc radius must be positive".into()));
        }
        Ok(Arc { center, radius })
    }

    /// The standard arc of a dissection of the given order: center a/q,
    /// radius exactly 1/(q * order).
    fn dissection_arc(a: u64, q: u64, order: u64) -> Arc {
        Arc {
            center: RationalPoint::new(a, q).expect("reduced by construction"),
            radius: ExactRational::new(1, q as i128 * order as i128),
        }
    }

    /// Lower endpoint center - radius, reduced.
    pub fn lower(&self) -> ExactRational {
        self.center.as_rational().sub(&self.radius)
    }

    /// Upper endpoint center + radius, reduced.
    pub fn upper(&self) -> ExactRational {
        self.center.as_rational().add(&self.radius)
    }

    /// Exact closed-interval membership of the point xn/xd (xd > 0).
    ///
    /// Endpoints are reduced before cross-multiplying, which keeps the
    /// products within i128 even for points whose dyadic denominator
    /// is as large as 2^101 (the worst case from_f64 can produce).
    pub fn contains(&self, xn: i128, xd: i128) -> bool {
        debug_assert!(xd > 0);
        let lo = self.lower();
        let hi = self.upper();
        lo.numer() * xd <= xn * lo.denom() && xn * hi.denom() <= hi.numer() * xd
    }

    /// Membership of an f64 point, taken at its exact dyadic value.
    pub fn contains_f64(&self, alpha: f64) -> Result<bool> {
        let x = ExactRational::from_f64(alpha)?;
        Ok(self.contains(x.numer(), x.denom()))
    }
}

impl std::fmt::Display for Arc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{} +- {}]", self.center, self.radius)
    }
}

/// A two-family dissection of the unit interval (1/Q, 1 + 1/Q]:
/// `major` holds one arc per reduced a/q with q <= cutoff, and
/// `minor_cover` one per cutoff < q <= order. The major arcs are
/// pairwise disjoint whenever cutoff <= order/2; the cover may overlap
/// itself, it only promises to contain everything the majors miss.
#[derive(Clone, Debug)]
pub struct Dissection {
    cutoff: f64,
    order: u64,
    pub major: Vec<Arc>,
    pub minor_cover: Vec<Arc>,
}

/// Where a point landed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Major(RationalPoint),
    Minor,
}

impl Dissection {
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Classify a point against the major arcs. The point is first
    /// normalized (by an exact integer shift) into (1/Q, 1 + 1/Q].
    /// Arcs are scanned in increasing-q order, so a point on two
    /// touching closed arcs resolves to the smaller denominator.
    pub fn classify(&self, alpha: f64) -> Classification {
        let (xn, xd) = unit_form(alpha, self.order);
        self.scan_major(xn, xd)
    }

    /// Classify an exact rational point num/den (den > 0), normalized
    /// modulo 1 into the same window; no floating point is involved,
    /// so grid points k/M land on the correct side of every arc
    /// endpoint even when they coincide with one.
    pub fn classify_point(&self, num: i128, den: i128) -> Classification {
        assert!(den > 0);
        let (xn, xd) = normalize_into_window(num, den, self.order as i128);
        self.scan_major(xn, xd)
    }

    fn scan_major(&self, xn: i128, xd: i128) -> Classification {
        for arc in &self.major {
            if arc.contains(xn, xd) {
                return Classification::Major(arc.center);
            }
        }
        Classification::Minor
    }

    /// First covering arc (in increasing-q order) containing the point,
    /// if any. Linear scan; used to audit coverage.
    pub fn minor_cover_arc(&self, alpha: f64) -> Option<&Arc> {
        let (xn, xd) = unit_form(alpha, self.order);
        self.minor_cover.iter().find(|arc| arc.contains(xn, xd))
    }

    /// Disjointness report for the major family.
    pub fn check_disjoint(&self) -> DisjointReport {
        check_disjoint(&self.major)
    }
}

/// Build the dissection with major cutoff P and order Q. Requires
/// 2 < Q <= MAX_DISSECTION_ORDER and 1 <= P <= Q/2; the upper bound on
/// P is exactly the hypothesis under which the major arcs are disjoint.
pub fn build_dissection(cutoff: f64, order: u64) -> Result<Dissection> {
    if !(cutoff >= 1.0) || order <= 2 || order > MAX_DISSECTION_ORDER || cutoff > order as f64 / 2.0
    {
        return Err(Error::DissectionParams {
            p: cutoff,
            q: order,
        });
    }
    let p_floor = cutoff.floor() as u64;
    let mut major = Vec::new();
    let mut minor_cover = Vec::new();
    for q in 1..=order {
        let family = if q <= p_floor {
            &mut major
        } else {
            &mut minor_cover
        };
        for a in 1..=q {
            if gcd(a, q) == 1 {
                family.push(Arc::dissection_arc(a, q, order));
            }
        }
    }
    Ok(Dissection {
        cutoff,
        order,
        major,
        minor_cover,
    })
}

#[derive(Clone, Debug)]
pub struct DisjointReport {
    pub disjoint: bool,
    /// An overlapping pair, when one exists.
    pub witness: Option<(Arc, Arc)>,
}

/// Exact pairwise-disjointness check for a family of closed arcs.
///
/// The arcs are sorted by center and only neighbors are compared: if
/// any two arcs of a sorted family intersect, some adjacent pair does
/// (the middle arc would otherwise have to be wider than the gap it
/// sits in), so the neighbor scan is complete, not a heuristic.
pub fn check_disjoint(arcs: &[Arc]) -> DisjointReport {
    let mut order: Vec<usize> = (0..arcs.len()).collect();
    order.sort_by(|&i, &j| {
        arcs[i]
            .center
            .as_rational()
            .cmp(&arcs[j].center.as_rational())
    });
    for w in order.windows(2) {
        let (x, y) = (&arcs[w[0]], &arcs[w[1]]);
        let (a1, q1) = (x.center.numer() as i128, x.center.denom() as i128);
        let (a2, q2) = (y.center.numer() as i128, y.center.denom() as i128);
        let dist = ExactRational::new((a1 * q2 - a2 * q1).abs(), q1 * q2);
        if dist <= x.radius.add(&y.radius) {
            return DisjointReport {
                disjoint: false,
                witness: Some((*x, *y)),
            };
        }
    }
    DisjointReport {
        disjoint: true,
        witness: None,
    }
}

/// Exact normal form of alpha on the circle: the unique representative
/// num/xd of alpha mod 1 lying in (1/s, 1 + 1/s], as a reduced i128
/// fraction. Points within 2^-48 of an integer are snapped to 1
/// exactly (their dyadic expansion would otherwise overflow i128; the
/// snap moves them by less than any arc endpoint at desk scale).
fn unit_form(alpha: f64, s: u64) -> (i128, i128) {
    assert!(alpha.is_finite(), "cannot classify a non-finite point");
    assert!(s >= 2);
    let f = if alpha.abs() >= 9.007_199_254_740_992e15 {
        0.0 // 2^53 and above: alpha is an exact integer
    } else {
        alpha.fract()
    };
    let snap = 2f64.powi(-48);
    if f.abs() < snap || (1.0 - f.abs()) < snap {
        return (1, 1);
    }
    let x = ExactRational::from_f64(f).expect("|fract| in [2^-48, 1) fits i128");
    normalize_into_window(x.numer(), x.denom(), s as i128)
}

/// Shift num/den by integers until it lands in (1/s, 1 + 1/s].
fn normalize_into_window(mut num: i128, den: i128, s: i128) -> (i128, i128) {
    num = num.rem_euclid(den); // into [0, den), then at most two shifts
    while num * s <= den {
        num += den;
    }
    while num * s > den * (s + 1) {
        num -= den;
    }
    (num, den)
}

/// Best rational approximation on the circle: among all reduced
/// fractions a/q with 1 <= a <= q <= order satisfying the Dirichlet
/// inequality |alpha - a/q| <= 1/(q * order) (alpha taken modulo 1 in
/// (1/s, 1+1/s], s = ceil(order)), returns the one of least error,
/// ties to the smaller q, then the smaller a. Such a fraction always
/// exists: the last continued-fraction convergent with denominator
/// within the order qualifies.
///
/// Candidates are the convergents of alpha plus the best (largest-t)
/// semiconvergent of each level, which is exactly the candidate set
/// the bounded-denominator best-approximation algorithm needs; errors
/// are compared by exact cross-multiplication.
pub fn dirichlet_approx(alpha: f64, order: f64) -> RationalPoint {
    assert!(
        order > 1.0 && order <= MAX_APPROX_ORDER,
        "approximation order must lie in (1, 2^24]"
    );
    let s = order.ceil() as u64;
    let qf = order.floor() as i128;
    let (num, den) = unit_form(alpha, s);
    let s = s as i128;

    let mut candidates: Vec<(i128, i128)> = Vec::new();
    let (mut n, mut d) = (num, den);
    let (mut pm2, mut qm2) = (0i128, 1i128);
    let (mut pm1, mut qm1) = (1i128, 0i128);
    while d > 0 {
        // capping the partial quotient cannot change anything below:
        // a larger true quotient still overshoots qf and the
        // semiconvergent formula only uses the previous two levels
        let a = (n / d).min(qf + 1);
        let (p, q) = (a * pm1 + pm2, a * qm1 + qm2);
        if q > qf {
            let t = (qf - qm2) / qm1;
            if t >= 1 {
                candidates.push((pm2 + t * pm1, qm2 + t * qm1));
            }
            break;
        }
        if a >= 2 && qm1 > 0 {
            candidates.push((pm2 + (a - 1) * pm1, qm2 + (a - 1) * qm1));
        }
        candidates.push((p, q));
        (pm2, qm2) = (pm1, qm1);
        (pm1, qm1) = (p, q);
        (n, d) = (d, n % d);
    }

    let mut best: Option<(i128, i128, i128)> = None; // (err_num, a, q)
    for (p, q) in candidates {
        if p < 1 || p > q {
            continue;
        }
        let err = (num * q - p * den).abs();
        if err > den / s {
            continue; // fails |alpha - p/q| <= 1/(q s)
        }
        let better = match best {
            None => true,
            Some((be, ba, bq)) => {
                let (lhs, rhs) = (err * bq, be * q);
                lhs < rhs || (lhs == rhs && (q < bq || (q == bq && p < ba)))
            }
        };
        if better {
            best = Some((err, p, q));
        }
    }
    let (_, a, q) = best.expect("Dirichlet approximation always exists");
    RationalPoint::new(a as u64, q as u64).expect("convergents are reduced")
}

/// Number of arcs a dissection of the given cutoff would have in its
/// major family: sum of phi(q) over q <= cutoff.
pub fn major_count(cutoff: f64) -> u64 {
    let p_floor = cutoff.floor() as usize;
    let tables = MultTables::up_to(p_floor.max(1));
    (1..=p_floor).map(|q| tables.phi[q]).sum()
}
