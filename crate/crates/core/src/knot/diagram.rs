//! Planar projections of closed curves: crossings, PD codes and Alexander
//! polynomials.

use std::collections::HashMap;

use nalgebra::Matrix2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::curve::{cyclic_distance, wrap, ClosedCurve};
use super::laurent::{determinant, LaurentPoly};
use crate::error::{Error, Result};
use crate::framed::Vec3;

/// Initial polyline density per component.
pub const MIN_RESOLUTION: usize = 4096;
/// Largest polyline density tried before giving up on a direction.
pub const MAX_RESOLUTION: usize = 65536;
/// Random directions tried in [`Direction::Auto`].
pub const MAX_ATTEMPTS: usize = 50;
/// Generic directions collected before choosing the one with fewest crossings.
pub const AUTO_CANDIDATES: usize = 6;

pub const MIN_ANGLE: f64 = 1e-4;
pub const MIN_SEPARATION: f64 = 1e-6;
pub const MIN_DEPTH_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Seeded random search for a generic direction.
    Auto { seed: u64 },
    Fixed([f64; 3]),
}

impl Default for Direction {
    fn default() -> Self {
        Direction::Auto { seed: 0 }
    }
}

/// Orthogonal projection along `d` onto the plane spanned by `e1, e2`, with
/// `(e1, e2, d)` right-handed. `d` points toward the viewer.
#[derive(Debug, Clone, Copy)]
pub struct Projector {
    pub d: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl Projector {
    pub fn new(d: Vec3) -> Result<Self> {
        let n = d.norm();
        if !(n.is_finite() && n > 1e-12) {
            return Err(Error::Invalid("projection direction must be nonzero".into()));
        }
        let d = d / n;
        let helper = if d.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (helper - d * helper.dot(&d)).normalize();
        let e2 = d.cross(&e1);
        Ok(Self { d, e1, e2 })
    }

    fn plane(&self, p: &Vec3) -> [f64; 2] {
        [p.dot(&self.e1), p.dot(&self.e2)]
    }

    fn depth(&self, p: &Vec3) -> f64 {
        p.dot(&self.d)
    }
}

/// A point on component `component` at parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strand {
    pub component: usize,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub over: Strand,
    pub under: Strand,
    pub sign: i8,
    /// Projected position.
    pub point: [f64; 2],
    /// `|sin|` of the angle between the projected tangents.
    pub angle: f64,
    /// Depth difference between over and under strand.
    pub depth_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotDiagram {
    pub components: usize,
    pub crossings: Vec<Crossing>,
    pub projection_direction: [f64; 3],
    /// Polyline density at which the crossing set stabilized.
    pub resolution: usize,
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm2(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

struct Sampled {
    t: Vec<f64>,
    plane: Vec<[f64; 2]>,
}

fn sample(curve: &dyn ClosedCurve, proj: &Projector, n: usize) -> Sampled {
    let period = curve.period();
    let t: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
    let plane = t.iter().map(|&s| proj.plane(&curve.point(s))).collect();
    Sampled { t, plane }
}

/// Newton on the projected coincidence `P a(ta) = P b(tb)`.
fn refine(a: &dyn ClosedCurve, b: &dyn ClosedCurve, proj: &Projector, mut ta: f64, mut tb: f64, scale: f64) -> Option<(f64, f64)> {
    for _ in 0..30 {
        let r = sub2(proj.plane(&a.point(ta)), proj.plane(&b.point(tb)));
        if norm2(r) < 1e-13 * scale {
            return Some((ta, tb));
        }
        let va = proj.plane(&a.velocity(ta));
        let vb = proj.plane(&b.velocity(tb));
        let j = Matrix2::new(va[0], -vb[0], va[1], -vb[1]);
        let step = j.lu().solve(&nalgebra::Vector2::new(r[0], r[1]))?;
        ta -= step[0];
        tb -= step[1];
    }
    let r = sub2(proj.plane(&a.point(ta)), proj.plane(&b.point(tb)));
    (norm2(r) < 1e-10 * scale).then_some((ta, tb))
}

fn make_crossing(curves: &[&dyn ClosedCurve], proj: &Projector, (ca, ta): (usize, f64), (cb, tb): (usize, f64)) -> Crossing {
    let (pa, pb) = (curves[ca].point(ta), curves[cb].point(tb));
    let (va, vb) = (proj.plane(&curves[ca].velocity(ta)), proj.plane(&curves[cb].velocity(tb)));
    let (da, db) = (proj.depth(&pa), proj.depth(&pb));
    let sa = Strand { component: ca, t: ta };
    let sb = Strand { component: cb, t: tb };
    let (over, under, vo, vu) = if da >= db { (sa, sb, va, vb) } else { (sb, sa, vb, va) };
    let c = cross2(vo, vu);
    let angle = (c / (norm2(vo) * norm2(vu))).abs();
    Crossing {
        over,
        under,
        sign: if c > 0.0 { 1 } else { -1 },
        point: proj.plane(&pa),
        angle,
        depth_gap: (da - db).abs(),
    }
}

/// Crossings of the projected polylines at density `n`, refined on the exact
/// curves. With `mutual_only`, crossings of a component with itself are
/// ignored.
fn crossings_at(curves: &[&dyn ClosedCurve], proj: &Projector, n: usize, mutual_only: bool, scale: f64) -> Vec<Crossing> {
    let samples: Vec<Sampled> = curves.iter().map(|c| sample(*c, proj, n)).collect();
    let mut cell = 0.0f64;
    for s in &samples {
        for i in 0..n {
            cell = cell.max(norm2(sub2(s.plane[(i + 1) % n], s.plane[i])));
        }
    }
    let cell = cell.max(1e-12);
    let key = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);

    let mut grid: HashMap<(i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for (c, s) in samples.iter().enumerate() {
        for i in 0..n {
            let (p, q) = (s.plane[i], s.plane[(i + 1) % n]);
            let (k0, k1) = (key([p[0].min(q[0]), p[1].min(q[1])]), key([p[0].max(q[0]), p[1].max(q[1])]));
            for x in k0.0..=k1.0 {
                for y in k0.1..=k1.1 {
                    grid.entry((x, y)).or_default().push((c, i));
                }
            }
        }
    }

    let mut raw: Vec<((usize, f64), (usize, f64))> = Vec::new();
    for (&cell_key, segs) in &grid {
        for (ia, &(ca, i)) in segs.iter().enumerate() {
            for &(cb, j) in &segs[ia + 1..] {
                if ca == cb {
                    if mutual_only {
                        continue;
                    }
                    let g = i.abs_diff(j);
                    if g.min(n - g) <= 1 {
                        continue;
                    }
                }
                let (sa, sb) = (&samples[ca], &samples[cb]);
                let (p0, p1) = (sa.plane[i], sa.plane[(i + 1) % n]);
                let (q0, q1) = (sb.plane[j], sb.plane[(j + 1) % n]);
                let (r, v) = (sub2(p1, p0), sub2(q1, q0));
                let den = cross2(r, v);
                if den.abs() < 1e-300 {
                    continue;
                }
                let w = sub2(q0, p0);
                let s = cross2(w, v) / den;
                let u = cross2(w, r) / den;
                if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&u) {
                    continue;
                }
                let x = [p0[0] + s * r[0], p0[1] + s * r[1]];
                if key(x) != cell_key {
                    continue;
                }
                let h = curves[ca].period() / n as f64;
                let hb = curves[cb].period() / n as f64;
                raw.push(((ca, sa.t[i] + s * h), (cb, sb.t[j] + u * hb)));
            }
        }
    }

    let mut out: Vec<Crossing> = Vec::new();
    let mut seen: Vec<((usize, f64), (usize, f64))> = Vec::new();
    for ((ca, ta0), (cb, tb0)) in raw {
        let (ta, tb) = refine(curves[ca], curves[cb], proj, ta0, tb0, scale).unwrap_or((ta0, tb0));
        let a = (ca, wrap(ta, curves[ca].period()));
        let b = (cb, wrap(tb, curves[cb].period()));
        let (a, b) = if (a.0, a.1) <= (b.0, b.1) { (a, b) } else { (b, a) };
        let same = |x: (usize, f64), y: (usize, f64)| x.0 == y.0 && cyclic_distance(x.1, y.1, curves[x.0].period()) < 1e-8;
        if seen.iter().any(|&(x, y)| same(x, a) && same(y, b)) {
            continue;
        }
        seen.push((a, b));
        out.push(make_crossing(curves, proj, a, b));
    }
    out.sort_by(|x, y| {
        (x.under.component, x.under.t).partial_cmp(&(y.under.component, y.under.t)).unwrap()
    });
    out
}

fn is_generic(crossings: &[Crossing], mutual_only: bool, scale: f64) -> bool {
    if crossings.iter().any(|c| c.angle <= MIN_ANGLE || c.depth_gap <= MIN_DEPTH_GAP * scale) {
        return false;
    }
    if mutual_only {
        return true;
    }
    for (i, a) in crossings.iter().enumerate() {
        for b in &crossings[i + 1..] {
            if norm2(sub2(a.point, b.point)) <= MIN_SEPARATION * scale {
                return false;
            }
        }
    }
    true
}

fn curve_scale(curves: &[&dyn ClosedCurve]) -> f64 {
    let mut s: f64 = 1.0;
    for c in curves {
        for i in 0..256 {
            s = s.max(c.point(c.period() * i as f64 / 256.0).norm());
        }
    }
    s
}

/// Crossings along `d`, refining the polyline until two consecutive
/// densities agree; `None` if the projection is not generic there.
fn stable_crossings(curves: &[&dyn ClosedCurve], proj: &Projector, mutual_only: bool, scale: f64) -> Option<(Vec<Crossing>, usize)> {
    let mut n = MIN_RESOLUTION;
    let mut prev = crossings_at(curves, proj, n, mutual_only, scale);
    while n < MAX_RESOLUTION {
        n *= 2;
        let next = crossings_at(curves, proj, n, mutual_only, scale);
        if next.len() == prev.len() {
            return is_generic(&next, mutual_only, scale).then_some((next, n / 2));
        }
        prev = next;
    }
    None
}

fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(StandardNormal.sample(rng), StandardNormal.sample(rng), StandardNormal.sample(rng));
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
}

/// Diagram of the closed curves `curves` with components numbered in order.
pub fn project(curves: &[&dyn ClosedCurve], direction: Direction, mutual_only: bool) -> Result<KnotDiagram> {
    let scale = curve_scale(curves);
    let build = |d: Vec3| -> Result<Option<KnotDiagram>> {
        let proj = Projector::new(d)?;
        Ok(stable_crossings(curves, &proj, mutual_only, scale).map(|(crossings, resolution)| KnotDiagram {
            components: curves.len(),
            crossings,
            projection_direction: [proj.d.x, proj.d.y, proj.d.z],
            resolution,
        }))
    };
    match direction {
        Direction::Fixed(d) => build(Vec3::from(d))?.ok_or(Error::NonGenericProjection { attempts: 1 }),
        Direction::Auto { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<KnotDiagram> = None;
            let mut found = 0;
            for _ in 0..MAX_ATTEMPTS {
                let d = random_direction(&mut rng);
                let built = build(d)?;
                log::debug!("direction {d:?}: {}", built.as_ref().map_or("not generic".into(), |dg| format!("{} crossings", dg.crossings.len())));
                if let Some(dg) = built {
                    found += 1;
                    if best.as_ref().is_none_or(|b| dg.crossings.len() < b.crossings.len()) {
                        best = Some(dg);
                    }
                    if found >= AUTO_CANDIDATES {
                        break;
                    }
                }
            }
            best.ok_or(Error::NonGenericProjection { attempts: MAX_ATTEMPTS })
        }
    }
}

/// One pass through a crossing along the traversal of a knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussEntry {
    pub crossing: usize,
    pub over: bool,
}

impl KnotDiagram {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }

    fn require_knot(&self) -> Result<()> {
        if self.components != 1 {
            return Err(Error::NotAKnot { components: self.components });
        }
        Ok(())
    }

    /// Passes through crossings ordered by parameter along the single
    /// component.
    pub fn gauss_code(&self) -> Result<Vec<GaussEntry>> {
        self.require_knot()?;
        let mut events: Vec<(f64, GaussEntry)> = Vec::with_capacity(2 * self.crossings.len());
        for (i, c) in self.crossings.iter().enumerate() {
            events.push((c.over.t, GaussEntry { crossing: i, over: true }));
            events.push((c.under.t, GaussEntry { crossing: i, over: false }));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(events.into_iter().map(|e| e.1).collect())
    }

    /// PD code with edges labelled `1..=2n` along the traversal.
    pub fn pd_code(&self) -> Result<Vec<[usize; 4]>> {
        let gauss = self.gauss_code()?;
        let m = gauss.len();
        // edge ending at event i has label i (1-based, cyclic), edge leaving it i+1
        let incoming = |i: usize| if i == 0 { m } else { i };
        let outgoing = |i: usize| i + 1;
        let mut over = vec![(0, 0); self.crossings.len()];
        let mut under = vec![(0, 0); self.crossings.len()];
        for (i, g) in gauss.iter().enumerate() {
            let slot = if g.over { &mut over } else { &mut under };
            slot[g.crossing] = (incoming(i), outgoing(i));
        }
        Ok(self
            .crossings
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let ((ui, uo), (oi, oo)) = (under[i], over[i]);
                if c.sign > 0 {
                    [ui, oo, uo, oi]
                } else {
                    [ui, oi, uo, oo]
                }
            })
            .collect())
    }

    /// PD code in `X(a,b,c,d)` lines.
    pub fn pd_text(&self) -> Result<String> {
        Ok(self
            .pd_code()?
            .iter()
            .map(|x| format!("X({},{},{},{})\n", x[0], x[1], x[2], x[3]))
            .collect())
    }

    /// Checks the combinatorial invariants of a knot diagram.
    pub fn validate(&self) -> Result<()> {
        let gauss = self.gauss_code()?;
        let n = self.crossings.len();
        let mut seen = vec![(0, 0); n];
        for g in &gauss {
            if g.over {
                seen[g.crossing].0 += 1;
            } else {
                seen[g.crossing].1 += 1;
            }
        }
        if seen.iter().any(|&s| s != (1, 1)) {
            return Err(Error::Invalid("each crossing must be passed once over and once under".into()));
        }
        let mut count = vec![0; 2 * n + 1];
        for x in self.pd_code()? {
            for l in x {
                count[l] += 1;
            }
        }
        if count.iter().skip(1).any(|&c| c != 2) {
            return Err(Error::Invalid("PD labels must each appear twice".into()));
        }
        Ok(())
    }
}

/// Alexander polynomial from the crossing relations, normalized.
pub fn alexander(dg: &KnotDiagram) -> Result<LaurentPoly> {
    dg.require_knot()?;
    let n = dg.crossings.len();
    if n <= 1 {
        return Ok(LaurentPoly::one());
    }
    // arc j starts at the j-th under pass in traversal order
    let mut unders: Vec<(f64, usize)> = dg.crossings.iter().enumerate().map(|(i, c)| (c.under.t, i)).collect();
    unders.sort_by(|a, b| a.0.total_cmp(&b.0));
    let under_t: Vec<f64> = unders.iter().map(|u| u.0).collect();
    let arc_of = |t: f64| match under_t.partition_point(|&x| x <= t) {
        0 => n - 1,
        j => j - 1,
    };
    let mut m = vec![vec![LaurentPoly::zero(); n]; n];
    let one_minus_t = LaurentPoly::from_pairs([(0, 1), (1, -1)]);
    let t = LaurentPoly::monomial(1, 1);
    let minus_one = LaurentPoly::monomial(0, -1);
    for (row, &(_, ci)) in unders.iter().enumerate() {
        let c = &dg.crossings[ci];
        let over = arc_of(c.over.t);
        let incoming = (row + n - 1) % n;
        let outgoing = row;
        let (a, b) = if c.sign > 0 { (&t, &minus_one) } else { (&minus_one, &t) };
        for (col, v) in [(over, &one_minus_t), (incoming, a), (outgoing, b)] {
            m[row][col] = m[row][col].add(v)?;
        }
    }
    m.pop();
    for r in &mut m {
        r.pop();
    }
    let det = determinant(m)?;
    if det.is_zero() {
        return Err(Error::Invalid("vanishing Alexander determinant".into()));
    }
    Ok(det.normalized())
}

/// `|Δ(−1)|`.
pub fn knot_determinant(dg: &KnotDiagram) -> Result<u64> {
    Ok(alexander(dg)?.eval_int(-1)?.unsigned_abs() as u64)
}
