//! Planar convex hulls and interior-overlap tests on exact orientation signs.

use robust::{orient2d, Coord};

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    orient2d(Coord { x: a[0], y: a[1] }, Coord { x: b[0], y: b[1] }, Coord { x: c[0], y: c[1] })
}

/// Counter-clockwise hull vertices (Andrew's monotone chain), collinear
/// points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for &p in &pts {
        push_turning_left(&mut lower, p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        push_turning_left(&mut upper, p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn push_turning_left(chain: &mut Vec<[f64; 2]>, p: [f64; 2]) {
    while chain.len() >= 2 && orient(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0.0 {
        chain.pop();
    }
    chain.push(p);
}

/// Whether two hulls (as returned by [`convex_hull`]) have intersecting
/// interiors. Hulls with fewer than three vertices have empty interior.
///
/// Two convex polygons have disjoint interiors iff some edge line of one of
/// them weakly separates the two, so only edge lines need testing.
pub fn hull_interiors_overlap(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
    if a.len() < 3 || b.len() < 3 {
        return false;
    }
    !(separated_by_edge(a, b) || separated_by_edge(b, a))
}

fn separated_by_edge(poly: &[[f64; 2]], other: &[[f64; 2]]) -> bool {
    (0..poly.len()).any(|e| {
        let (p, q) = (poly[e], poly[(e + 1) % poly.len()]);
        other.iter().all(|&r| orient(p, q, r) <= 0.0)
    })
}
