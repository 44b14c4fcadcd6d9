//! Field polygons in a local metric frame and the procedural corpus.
//!
//! Outer rings are counter-clockwise, holes clockwise. Rings are stored
//! open (the first vertex is not repeated).

use std::f64::consts::PI;

use geo::{BooleanOps, Coord, LineString, MultiPolygon, Polygon};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{domain, Result};
use crate::stats::stream_rng;

pub type Pt = [f64; 2];
pub type Ring = Vec<Pt>;

/// Pieces smaller than this are clipping noise, m².
pub const SLIVER_M2: f64 = 1e-3;
const OBSTACLE_SIDES: usize = 16;
const M2_PER_HA: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldClass {
    Rectangle,
    LShape,
    IrregularConvex,
    IrregularConcave,
    RealShape,
}

impl FieldClass {
    pub const ALL: [FieldClass; 5] = [
        FieldClass::Rectangle,
        FieldClass::LShape,
        FieldClass::RealShape,
        FieldClass::IrregularConvex,
        FieldClass::IrregularConcave,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FieldClass::Rectangle => "rectangle",
            FieldClass::LShape => "L_shape",
            FieldClass::IrregularConvex => "irregular_convex",
            FieldClass::IrregularConcave => "irregular_concave",
            FieldClass::RealShape => "real_shape",
        }
    }
}

impl std::fmt::Display for FieldClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldPolygon {
    pub id: String,
    pub class: FieldClass,
    pub outer: Ring,
    pub holes: Vec<Ring>,
}

/// Signed shoelace area; positive for counter-clockwise rings.
pub fn signed_area(ring: &[Pt]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let [x0, y0] = ring[i];
        let [x1, y1] = ring[(i + 1) % n];
        s += x0 * y1 - x1 * y0;
    }
    0.5 * s
}

fn orient(a: Pt, b: Pt, c: Pt) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn edges(ring: &[Pt]) -> impl Iterator<Item = (Pt, Pt)> + '_ {
    (0..ring.len()).map(move |i| (ring[i], ring[(i + 1) % ring.len()]))
}

/// True when no two non-adjacent edges properly cross.
pub fn ring_is_simple(ring: &[Pt]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Even-odd point in ring test.
pub fn point_in_ring(p: Pt, ring: &[Pt]) -> bool {
    let mut inside = false;
    for (a, b) in edges(ring) {
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn rings_cross(r: &[Pt], s: &[Pt]) -> bool {
    edges(r).any(|(a, b)| edges(s).any(|(c, d)| segments_cross(a, b, c, d)))
}

impl FieldPolygon {
    pub fn new(id: &str, class: FieldClass, outer: Ring, holes: Vec<Ring>) -> Self {
        Self {
            id: id.to_string(),
            class,
            outer,
            holes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(domain(format!("field {}: {m}", self.id)));
        if self.outer.len() < 3 || !ring_is_simple(&self.outer) {
            return bad("outer ring is not a simple polygon");
        }
        if !(signed_area(&self.outer) > 0.0) {
            return bad("outer ring must be counter-clockwise");
        }
        for (k, h) in self.holes.iter().enumerate() {
            if h.len() < 3 || !ring_is_simple(h) {
                return bad("hole ring is not simple");
            }
            if !(signed_area(h) < 0.0) {
                return bad("hole rings must be clockwise");
            }
            if !h.iter().all(|p| point_in_ring(*p, &self.outer)) || rings_cross(h, &self.outer) {
                return bad("hole must lie strictly inside the outer ring");
            }
            for other in &self.holes[k + 1..] {
                if rings_cross(h, other) || point_in_ring(other[0], h) || point_in_ring(h[0], other) {
                    return bad("holes overlap");
                }
            }
        }
        if !(self.area() > 0.0) {
            return bad("area must be positive");
        }
        Ok(())
    }

    /// Outer area minus hole areas, m².
    pub fn area(&self) -> f64 {
        signed_area(&self.outer).abs() - self.holes.iter().map(|h| signed_area(h).abs()).sum::<f64>()
    }

    pub fn area_ha(&self) -> f64 {
        self.area() / M2_PER_HA
    }

    pub fn bounds(&self) -> (Pt, Pt) {
        ring_bounds(&self.outer)
    }

    /// Area-weighted centroid with holes removed.
    pub fn centroid(&self) -> Pt {
        let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
        for ring in std::iter::once(&self.outer).chain(self.holes.iter()) {
            let (rx, ry, ra) = ring_moments(ring);
            cx += rx;
            cy += ry;
            a += ra;
        }
        [cx / a, cy / a]
    }

    /// Rotation about the origin by `deg` degrees, counter-clockwise.
    pub fn rotated(&self, deg: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        let rot = |r: &Ring| r.iter().map(|[x, y]| [c * x - s * y, s * x + c * y]).collect();
        Self {
            id: self.id.clone(),
            class: self.class,
            outer: rot(&self.outer),
            holes: self.holes.iter().map(rot).collect(),
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        let mv = |r: &Ring| r.iter().map(|[x, y]| [x + dx, y + dy]).collect();
        Self {
            id: self.id.clone(),
            class: self.class,
            outer: mv(&self.outer),
            holes: self.holes.iter().map(mv).collect(),
        }
    }

    pub fn to_geo(&self) -> Polygon<f64> {
        Polygon::new(to_linestring(&self.outer), self.holes.iter().map(|h| to_linestring(h)).collect())
    }

    pub fn to_geojson_feature(&self) -> Value {
        json!({
            "type": "Feature",
            "properties": { "id": self.id, "class": self.class.as_str() },
            "geometry": { "type": "Polygon", "coordinates": polygon_coords(&self.outer, &self.holes) },
        })
    }
}

fn ring_moments(ring: &[Pt]) -> (f64, f64, f64) {
    let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
    for (p, q) in edges(ring) {
        let cross = p[0] * q[1] - q[0] * p[1];
        a += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    (cx / 6.0, cy / 6.0, a / 2.0)
}

pub fn ring_bounds(ring: &[Pt]) -> (Pt, Pt) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in ring {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

fn to_linestring(ring: &[Pt]) -> LineString<f64> {
    let mut v: Vec<Coord<f64>> = ring.iter().map(|[x, y]| Coord { x: *x, y: *y }).collect();
    if let Some(first) = v.first().copied() {
        v.push(first);
    }
    LineString::new(v)
}

fn from_linestring(ls: &LineString<f64>) -> Ring {
    let mut r: Ring = ls.coords().map(|c| [c.x, c.y]).collect();
    if r.len() > 1 && r.first() == r.last() {
        r.pop();
    }
    r
}

fn closed(ring: &[Pt]) -> Vec<Pt> {
    let mut v = ring.to_vec();
    if let Some(f) = v.first().copied() {
        v.push(f);
    }
    v
}

pub fn polygon_coords(outer: &[Pt], holes: &[Ring]) -> Value {
    let mut rings = vec![json!(closed(outer))];
    rings.extend(holes.iter().map(|h| json!(closed(h))));
    Value::Array(rings)
}

/// One connected component of a clip result.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub outer: Ring,
    pub holes: Vec<Ring>,
}

impl Piece {
    pub fn area(&self) -> f64 {
        signed_area(&self.outer).abs() - self.holes.iter().map(|h| signed_area(h).abs()).sum::<f64>()
    }

    pub fn bounds(&self) -> (Pt, Pt) {
        ring_bounds(&self.outer)
    }
}

fn pieces_of(mp: MultiPolygon<f64>) -> Vec<Piece> {
    mp.0.iter()
        .map(|p| Piece {
            outer: from_linestring(p.exterior()),
            holes: p.interiors().iter().map(from_linestring).collect(),
        })
        .filter(|p| p.area() > SLIVER_M2)
        .collect()
}

/// Connected components of the polygon inside an axis-aligned rectangle.
pub fn clip_to_rect(field: &FieldPolygon, lo: Pt, hi: Pt) -> Vec<Piece> {
    clip_geo(&field.to_geo(), lo, hi)
}

pub(crate) fn clip_geo(poly: &Polygon<f64>, lo: Pt, hi: Pt) -> Vec<Piece> {
    if !(hi[0] > lo[0] && hi[1] > lo[1]) {
        return Vec::new();
    }
    let rect = geo::Rect::new(Coord { x: lo[0], y: lo[1] }, Coord { x: hi[0], y: hi[1] }).to_polygon();
    pieces_of(poly.intersection(&rect))
}

fn rect_ring(w: f64, h: f64) -> Ring {
    vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]]
}

fn circle_ring(cx: f64, cy: f64, r: f64, n: usize, clockwise: bool) -> Ring {
    let mut v: Ring = (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            [cx + r * a.cos(), cy + r * a.sin()]
        })
        .collect();
    if clockwise {
        v.reverse();
    }
    v
}

/// Stratified draw: slot `i` of `n` on [lo, hi] with jitter inside the slot.
fn stratified(rng: &mut ChaCha8Rng, i: usize, n: usize, lo: f64, hi: f64) -> f64 {
    let u = (i as f64 + rng.random::<f64>()) / n as f64;
    lo + u * (hi - lo)
}

/// Deterministic permutation of 0..n.
fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
    v
}

fn field_id(k: usize) -> String {
    format!("field_{k:03}")
}

const RECT_HA: (f64, f64) = (0.5, 7.0);
const RECT_ASPECT: (f64, f64) = (1.0, 2.7);
const L_HA: (f64, f64) = (0.8, 2.8);
const L_NOTCH: (f64, f64) = (0.2, 0.45);
const CONVEX_HA: (f64, f64) = (0.4, 1.4);
const CONVEX_SIDES: (usize, usize) = (6, 11);
const CONCAVE_HA: (f64, f64) = (0.6, 1.8);
const CONCAVE_LOBES: (usize, usize) = (5, 9);
const OBSTACLE_R: (f64, f64) = (5.0, 15.0);

fn rectangles(rng: &mut ChaCha8Rng, first_id: usize, span: f64) -> Vec<FieldPolygon> {
    let n = 10;
    let sizes = shuffled(rng, n);
    let aspects = shuffled(rng, n);
    (0..n)
        .map(|i| {
            let ln_ha = stratified(rng, sizes[i], n, RECT_HA.0.ln(), RECT_HA.1.ln());
            let area = ln_ha.exp() * M2_PER_HA;
            let want = stratified(rng, aspects[i], n, RECT_ASPECT.0, RECT_ASPECT.1);
            // short side snapped to whole spans so the strip tiling is exact
            let mut best = (f64::INFINITY, span, area / span);
            for k in 1..=20 {
                let h = k as f64 * span;
                let w = area / h;
                let aspect = w.max(h) / w.min(h);
                if aspect <= RECT_ASPECT.1 {
                    let miss = (aspect - want).abs();
                    if miss < best.0 {
                        best = (miss, h, w);
                    }
                }
            }
            let (_, h, w) = best;
            FieldPolygon::new(&field_id(first_id + i), FieldClass::Rectangle, rect_ring(w, h), vec![])
        })
        .collect()
}

fn l_shapes(rng: &mut ChaCha8Rng, first_id: usize, span: f64) -> Vec<FieldPolygon> {
    let n = 10;
    let sizes = shuffled(rng, n);
    let notches = shuffled(rng, n);
    (0..n)
        .map(|i| {
            let ha = stratified(rng, sizes[i], n, L_HA.0, L_HA.1);
            let aspect: f64 = rng.random_range(1.0..1.8);
            let f = stratified(rng, notches[i], n, L_NOTCH.0, L_NOTCH.1);
            let g: f64 = rng.random_range(L_NOTCH.0..L_NOTCH.1);
            // bounding rectangle sized so the L keeps the drawn area
            let frac = 1.0 - f * g;
            let h0 = (ha * M2_PER_HA / frac / aspect).sqrt();
            let h = (h0 / span).round().max(1.0) * span;
            let w = ha * M2_PER_HA / frac / h;
            let (nx, ny) = (f * w, g * h);
            let outer = vec![[0.0, 0.0], [w, 0.0], [w, h - ny], [w - nx, h - ny], [w - nx, h], [0.0, h]];
            FieldPolygon::new(&field_id(first_id + i), FieldClass::LShape, outer, vec![])
        })
        .collect()
}

fn convex_hull(mut pts: Vec<Pt>) -> Ring {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut lower: Ring = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], *p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Ring = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], *p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn scale_ring_to_area(ring: &Ring, target_m2: f64) -> Ring {
    let k = (target_m2 / signed_area(ring).abs()).sqrt();
    ring.iter().map(|[x, y]| [x * k, y * k]).collect()
}

fn convex_fields(rng: &mut ChaCha8Rng, first_id: usize) -> Vec<FieldPolygon> {
    let n = 10;
    let sizes = shuffled(rng, n);
    (0..n)
        .map(|i| {
            let ha = stratified(rng, sizes[i], n, CONVEX_HA.0, CONVEX_HA.1);
            let sides = rng.random_range(CONVEX_SIDES.0..=CONVEX_SIDES.1);
            let stretch: f64 = rng.random_range(1.0..2.2);
            let tilt: f64 = rng.random_range(0.0..PI);
            let (s, c) = tilt.sin_cos();
            // keep drawing until the hull keeps enough corners
            let ring = loop {
                let pts: Vec<Pt> = (0..sides)
                    .map(|_| {
                        let a: f64 = rng.random_range(0.0..2.0 * PI);
                        let r: f64 = rng.random_range(0.55..1.0);
                        let (x, y) = (stretch * r * a.cos(), r * a.sin());
                        [c * x - s * y, s * x + c * y]
                    })
                    .collect();
                let hull = convex_hull(pts);
                if hull.len() >= CONVEX_SIDES.0 {
                    break hull;
                }
            };
            let ring = scale_ring_to_area(&ring, ha * M2_PER_HA);
            FieldPolygon::new(&field_id(first_id + i), FieldClass::IrregularConvex, ring, vec![])
        })
        .collect()
}

fn star_ring(rng: &mut ChaCha8Rng, lobes: usize) -> Ring {
    let n = 2 * lobes;
    let phase: f64 = rng.random_range(0.0..2.0 * PI);
    (0..n)
        .map(|k| {
            let a = phase + 2.0 * PI * (k as f64 + rng.random_range(-0.2..0.2)) / n as f64;
            let r = if k % 2 == 0 {
                rng.random_range(0.9..1.0)
            } else {
                rng.random_range(0.65..0.85)
            };
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

fn concave_fields(rng: &mut ChaCha8Rng, first_id: usize) -> Vec<FieldPolygon> {
    let n = 15;
    let sizes = shuffled(rng, n);
    (0..n)
        .map(|i| {
            let ha = stratified(rng, sizes[i], n, CONCAVE_HA.0, CONCAVE_HA.1);
            let lobes = rng.random_range(CONCAVE_LOBES.0..=CONCAVE_LOBES.1);
            let outer = scale_ring_to_area(&star_ring(rng, lobes), ha * M2_PER_HA);
            let mut field = FieldPolygon::new(&field_id(first_id + i), FieldClass::IrregularConcave, outer, vec![]);
            if i < 10 {
                let want = 1 + (i % 2);
                let mut tries = 0;
                while field.holes.len() < want && tries < 200 {
                    tries += 1;
                    let r = rng.random_range(OBSTACLE_R.0..OBSTACLE_R.1);
                    let c = field.centroid();
                    let (lo, hi) = field.bounds();
                    let p = [
                        c[0] + rng.random_range(-0.35..0.35) * (hi[0] - lo[0]),
                        c[1] + rng.random_range(-0.35..0.35) * (hi[1] - lo[1]),
                    ];
                    let hole = circle_ring(p[0], p[1], r, OBSTACLE_SIDES, true);
                    let margin = circle_ring(p[0], p[1], r + 3.0, OBSTACLE_SIDES, true);
                    let mut trial = field.clone();
                    trial.holes.push(hole);
                    let clear = margin.iter().all(|q| point_in_ring(*q, &field.outer))
                        && field.holes.iter().all(|h| {
                            let (hl, hh) = ring_bounds(h);
                            let hc = [(hl[0] + hh[0]) / 2.0, (hl[1] + hh[1]) / 2.0];
                            let hr = (hh[0] - hl[0]) / 2.0;
                            ((hc[0] - p[0]).powi(2) + (hc[1] - p[1]).powi(2)).sqrt() > hr + r + 3.0
                        });
                    if clear && trial.validate().is_ok() {
                        field = trial;
                    }
                }
            }
            field
        })
        .collect()
}

/// Hand-traced outlines; coordinates in metres.
pub fn real_shapes(first_id: usize) -> Vec<FieldPolygon> {
    let river: Ring = vec![
        [0.0, 0.0], [320.0, 0.0], [320.0, 38.0], [280.0, 44.0], [240.0, 54.0], [200.0, 58.0],
        [160.0, 55.0], [120.0, 48.0], [80.0, 46.0], [40.0, 50.0], [0.0, 56.0],
    ];
    let road: Ring = vec![
        [0.0, 0.0], [180.0, 0.0], [180.0, 100.0], [150.0, 100.0], [150.0, 112.0], [30.0, 112.0], [0.0, 100.0],
    ];
    let pentagon: Ring = (0..5)
        .map(|k| {
            let a = PI / 2.0 + 2.0 * PI * k as f64 / 5.0;
            [88.0 * a.cos(), 88.0 * a.sin()]
        })
        .collect();
    let mut quarter: Ring = vec![[0.0, 0.0]];
    quarter.extend((0..=12).map(|k| {
        let a = PI / 2.0 * k as f64 / 12.0;
        [120.0 * a.cos(), 120.0 * a.sin()]
    }));
    let peanut: Ring = (0..32)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / 32.0;
            let r = 1.0 + 0.45 * (2.0 * a).cos();
            [95.0 * r * a.cos(), 60.0 * r * a.sin()]
        })
        .collect();
    [river, road, pentagon, quarter, peanut]
        .into_iter()
        .enumerate()
        .map(|(i, r)| FieldPolygon::new(&field_id(first_id + i), FieldClass::RealShape, r, vec![]))
        .collect()
}

/// The 50-field corpus: ids 001–010 rectangles, 011–020 L-shapes,
/// 021–030 convex, 031–045 concave (031–040 with obstacles), 046–050 real.
pub fn generate_corpus(seed: u64, span_m: f64) -> Result<Vec<FieldPolygon>> {
    if !(span_m > 0.0) {
        return Err(domain("span must be positive"));
    }
    let mut out = Vec::with_capacity(50);
    out.extend(rectangles(&mut stream_rng(seed, 100), 1, span_m));
    out.extend(l_shapes(&mut stream_rng(seed, 101), 11, span_m));
    out.extend(convex_fields(&mut stream_rng(seed, 102), 21));
    out.extend(concave_fields(&mut stream_rng(seed, 103), 31));
    out.extend(real_shapes(46));
    for f in &mut out {
        let (lo, _) = f.bounds();
        *f = f.translated(-lo[0], -lo[1]);
        f.validate()?;
    }
    Ok(out)
}

pub fn find_field<'a>(fields: &'a [FieldPolygon], id: &str) -> Result<&'a FieldPolygon> {
    fields.iter().find(|f| f.id == id).ok_or_else(|| crate::Error::Unknown {
        kind: "field",
        name: id.to_string(),
    })
}

pub fn corpus_geojson(fields: &[FieldPolygon]) -> Value {
    json!({
        "type": "FeatureCollection",
        "features": fields.iter().map(|f| f.to_geojson_feature()).collect::<Vec<_>>(),
    })
}
