use crate::Point;

const MAX_ITERATIONS: usize = 10_000;
const TOLERANCE: f64 = 1e-12;

/// Minimizer of `Σ w_k |p - x_k|` (Weiszfeld iteration with the Vardi-Zhang
/// vertex test). Returns `None` for an empty set or zero total weight, where
/// every point is a minimizer.
pub fn weighted_geometric_median(points: &[(Point, f64)]) -> Option<Point> {
    let total: f64 = points.iter().map(|(_, w)| w).sum();
    if points.is_empty() || total <= 0.0 {
        return None;
    }

    // A data point is optimal iff the pull of all other points does not
    // exceed its own weight.
    for (k, (pk, _)) in points.iter().enumerate() {
        if let Some(p) = vertex_optimum(points, k, *pk) {
            return Some(p);
        }
    }

    let mut y = points.iter().fold(Point::zeros(), |acc, (p, w)| acc + p * *w) / total;
    for _ in 0..MAX_ITERATIONS {
        let mut num = Point::zeros();
        let mut den = 0.0;
        let mut on_point = false;
        for (p, w) in points {
            let d = (y - p).norm();
            if d == 0.0 {
                on_point = true;
                break;
            }
            num += p * (*w / d);
            den += *w / d;
        }
        if on_point {
            // The vertex test already rejected every data point, so nudge
            // off it along the pull direction.
            y = vardi_zhang_step(points, y);
            continue;
        }
        let next = num / den;
        let moved = (next - y).norm();
        y = next;
        if moved <= TOLERANCE * (1.0 + y.norm()) {
            break;
        }
    }
    Some(y)
}

fn vertex_optimum(points: &[(Point, f64)], k: usize, pk: Point) -> Option<Point> {
    let mut weight_here = 0.0;
    let mut pull = Point::zeros();
    for (j, (p, w)) in points.iter().enumerate() {
        let diff = p - pk;
        let d = diff.norm();
        if d == 0.0 {
            if j < k {
                // Duplicate already tested at the earlier index.
                return None;
            }
            weight_here += w;
        } else {
            pull += diff * (*w / d);
        }
    }
    (pull.norm() <= weight_here).then_some(pk)
}

fn vardi_zhang_step(points: &[(Point, f64)], y: Point) -> Point {
    let mut num = Point::zeros();
    let mut den = 0.0;
    let mut eta = 0.0;
    let mut r = Point::zeros();
    for (p, w) in points {
        let diff = p - y;
        let d = diff.norm();
        if d == 0.0 {
            eta += w;
        } else {
            num += p * (*w / d);
            den += *w / d;
            r += diff * (*w / d);
        }
    }
    let t = num / den;
    let rn = r.norm();
    let ratio = if rn > 0.0 { (eta / rn).min(1.0) } else { 1.0 };
    t * (1.0 - ratio) + y * ratio
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objective(points: &[(Point, f64)], y: Point) -> f64 {
        points.iter().map(|(p, w)| w * (y - p).norm()).sum()
    }

    #[test]
    fn dominant_weight_wins() {
        let pts = [
            (Point::new(0., 0.), 5.0),
            (Point::new(1., 0.), 1.0),
            (Point::new(0., 1.), 1.0),
        ];
        assert_eq!(weighted_geometric_median(&pts), Some(Point::new(0., 0.)));
    }

    #[test]
    fn square_centre() {
        let pts: Vec<_> = [(0., 0.), (2., 0.), (0., 2.), (2., 2.)]
            .iter()
            .map(|&(x, y)| (Point::new(x, y), 1.0))
            .collect();
        let m = weighted_geometric_median(&pts).unwrap();
        assert!((m - Point::new(1., 1.)).norm() < 1e-9);
    }

    #[test]
    fn empty_or_weightless() {
        assert_eq!(weighted_geometric_median(&[]), None);
        assert_eq!(weighted_geometric_median(&[(Point::new(1., 1.), 0.0)]), None);
    }

    #[test]
    fn beats_a_grid_search() {
        let pts: Vec<_> = [
            (2., 3., 1.),
            (5., 7., 1.),
            (9., 2., 1.),
            (8., 6., 2.),
            (4., 5., 1.5),
            (7., 4., 1.5),
        ]
        .iter()
        .map(|&(x, y, w)| (Point::new(x, y), w))
        .collect();
        let m = weighted_geometric_median(&pts).unwrap();
        let best = objective(&pts, m);
        for i in 0..=200 {
            for j in 0..=200 {
                let y = Point::new(i as f64 * 0.05, j as f64 * 0.05);
                assert!(objective(&pts, y) >= best - 1e-9);
            }
        }
    }
}
