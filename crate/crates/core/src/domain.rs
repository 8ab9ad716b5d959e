//! Planar domains, boundary quadrature with outward normals, and the
//! anisotropic starshape predicate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on `x ν_x + (1+k) y ν_y` below which a boundary point counts
/// as violating starshapedness.
pub const STARSHAPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum DomainKind<T> {
    #[serde(rename = "rect")]
    Rectangle { xmin: T, xmax: T, ymin: T, ymax: T },
    #[serde(rename = "ellipse")]
    Ellipse { cx: T, cy: T, a: T, b: T },
}

/// A bounded open domain that intersects the degeneracy line `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Domain<T> {
    kind: DomainKind<T>,
}

/// One node of a boundary quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample<T> {
    pub point: (T, T),
    /// Unit outward normal.
    pub normal: (T, T),
    /// Arc-length weight.
    pub weight: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarshapeReport<T> {
    pub is_starshaped: bool,
    pub min_value: T,
}

impl<T: Real> Domain<T> {
    pub fn new(kind: DomainKind<T>) -> Result<Self> {
        let d = Domain { kind };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(xmin: T, xmax: T, ymin: T, ymax: T) -> Result<Self> {
        Self::new(DomainKind::Rectangle {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    pub fn ellipse(cx: T, cy: T, a: T, b: T) -> Result<Self> {
        Self::new(DomainKind::Ellipse { cx, cy, a, b })
    }

    /// Unit disk centered at the origin.
    pub fn unit_disk() -> Self {
        Self::ellipse(T::zero(), T::zero(), T::one(), T::one()).expect("unit disk")
    }

    /// Rejects empty, unbounded or non-finite shapes and shapes that miss `x = 0`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(format!("domain: {msg}")));
        match self.kind {
            DomainKind::Rectangle {
                xmin,
                xmax,
                ymin,
                ymax,
            } => {
                if ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) {
                    return bad("rectangle bounds must be finite");
                }
                if !(xmin < xmax && ymin < ymax) {
                    return bad("rectangle requires xmin < xmax and ymin < ymax");
                }
                if !(xmin < T::zero() && T::zero() < xmax) {
                    return bad("rectangle must intersect the line x = 0");
                }
            }
            DomainKind::Ellipse { cx, cy, a, b } => {
                if ![cx, cy, a, b].iter().all(|v| v.is_finite()) {
                    return bad("ellipse parameters must be finite");
                }
                if !(a > T::zero() && b > T::zero()) {
                    return bad("ellipse requires a > 0 and b > 0");
                }
                if cx.abs() >= a {
                    return bad("ellipse must intersect the line x = 0");
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &DomainKind<T> {
        &self.kind
    }

    pub fn is_rectangle(&self) -> bool {
        matches!(self.kind, DomainKind::Rectangle { .. })
    }

    /// Level-set value: negative inside, zero on the boundary, positive outside.
    ///
    /// For the ellipse this is `((x-cx)/a)^2 + ((y-cy)/b)^2 - 1`; for the
    /// rectangle it is the signed box distance in the max norm.
    pub fn signed_inside(&self, x: T, y: T) -> T {
        match self.kind {
            DomainKind::Rectangle {
                xmin,
                xmax,
                ymin,
                ymax,
            } => (xmin - x).max(x - xmax).max(ymin - y).max(y - ymax),
            DomainKind::Ellipse { cx, cy, a, b } => {
                let u = (x - cx) / a;
                let v = (y - cy) / b;
                u * u + v * v - T::one()
            }
        }
    }

    pub fn contains(&self, x: T, y: T) -> bool {
        self.signed_inside(x, y) < T::zero()
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(T::zero(), T::zero())
    }

    /// `(xmin, xmax, ymin, ymax)` of the closure.
    pub fn bounding_box(&self) -> (T, T, T, T) {
        match self.kind {
            DomainKind::Rectangle {
                xmin,
                xmax,
                ymin,
                ymax,
            } => (xmin, xmax, ymin, ymax),
            DomainKind::Ellipse { cx, cy, a, b } => (cx - a, cx + a, cy - b, cy + b),
        }
    }

    pub fn area(&self) -> T {
        match self.kind {
            DomainKind::Rectangle {
                xmin,
                xmax,
                ymin,
                ymax,
            } => (xmax - xmin) * (ymax - ymin),
            DomainKind::Ellipse { a, b, .. } => T::PI() * a * b,
        }
    }

    /// Boundary length. Ellipse perimeters use a 4096-node periodic
    /// trapezoid rule, which is spectrally accurate.
    pub fn perimeter(&self) -> T {
        match self.kind {
            DomainKind::Rectangle {
                xmin,
                xmax,
                ymin,
                ymax,
            } => T::lit(2.0) * ((xmax - xmin) + (ymax - ymin)),
            DomainKind::Ellipse { a, b, .. } => {
                let n = 4096;
                let dt = T::lit(2.0) * T::PI() / T::from_usize_lossy(n);
                (0..n)
                    .map(|j| {
                        let t = dt * T::from_usize_lossy(j);
                        ellipse_speed(a, b, t) * dt
                    })
                    .sum()
            }
        }
    }

    /// Distance from the interior point `(x, y)` to the boundary along the
    /// axis direction `(dx, dy)` (one of the four unit axis vectors).
    pub fn axis_distance_to_boundary(&self, x: T, y: T, dx: T, dy: T) -> T {
        match self.kind {
            DomainKind::Rectangle {
                xmin,
                xmax,
                ymin,
                ymax,
            } => {
                if dx > T::zero() {
                    xmax - x
                } else if dx < T::zero() {
                    x - xmin
                } else if dy > T::zero() {
                    ymax - y
                } else {
                    y - ymin
                }
            }
            DomainKind::Ellipse { cx, cy, a, b } => {
                // Solve ((x + t dx - cx)/a)^2 + ((y + t dy - cy)/b)^2 = 1 for t > 0.
                let u = (x - cx) / a;
                let v = (y - cy) / b;
                let du = dx / a;
                let dv = dy / b;
                let qa = du * du + dv * dv;
                let qb = T::lit(2.0) * (u * du + v * dv);
                let qc = u * u + v * v - T::one();
                let disc = (qb * qb - T::lit(4.0) * qa * qc).max(T::zero());
                (-qb + disc.sqrt()) / (T::lit(2.0) * qa)
            }
        }
    }
}

fn ellipse_speed<T: Real>(a: T, b: T, t: T) -> T {
    let (s, c) = t.sin_cos();
    (a * a * s * s + b * b * c * c).sqrt()
}

/// Quadrature nodes on `∂Ω`, traversed once counterclockwise.
///
/// Rectangles use the midpoint rule with `n/4` nodes per edge (remainder
/// distributed to the first edges); ellipses use the periodic trapezoid rule
/// in the angle parameter starting at angle zero.
pub fn boundary_quadrature<T: Real>(domain: &Domain<T>, n: usize) -> Result<Vec<BoundarySample<T>>> {
    if n < 8 {
        return Err(Error::InvalidInput(format!(
            "boundary quadrature needs at least 8 samples, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    match *domain.kind() {
        DomainKind::Rectangle {
            xmin,
            xmax,
            ymin,
            ymax,
        } => {
            let zero = T::zero();
            let one = T::one();
            // (start, end, normal) per edge, counterclockwise from the bottom-left corner.
            let edges = [
                ((xmin, ymin), (xmax, ymin), (zero, -one)),
                ((xmax, ymin), (xmax, ymax), (one, zero)),
                ((xmax, ymax), (xmin, ymax), (zero, one)),
                ((xmin, ymax), (xmin, ymin), (-one, zero)),
            ];
            for (e, &(start, end, normal)) in edges.iter().enumerate() {
                let m = n / 4 + usize::from(e < n % 4);
                let len = ((end.0 - start.0).powi(2) + (end.1 - start.1).powi(2)).sqrt();
                let weight = len / T::from_usize_lossy(m);
                for j in 0..m {
                    let s = (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(m);
                    let point = (start.0 + s * (end.0 - start.0), start.1 + s * (end.1 - start.1));
                    out.push(BoundarySample {
                        point,
                        normal,
                        weight,
                    });
                }
            }
        }
        DomainKind::Ellipse { cx, cy, a, b } => {
            let dt = T::lit(2.0) * T::PI() / T::from_usize_lossy(n);
            for j in 0..n {
                let t = dt * T::from_usize_lossy(j);
                let (s, c) = t.sin_cos();
                let nx = c / a;
                let ny = s / b;
                let nn = (nx * nx + ny * ny).sqrt();
                out.push(BoundarySample {
                    point: (cx + a * c, cy + b * s),
                    normal: (nx / nn, ny / nn),
                    weight: ellipse_speed(a, b, t) * dt,
                });
            }
        }
    }
    Ok(out)
}

/// The boundary factor `x ν_x + (1+k) y ν_y`.
pub fn starshape_factor<T: Real>(k: T, s: &BoundarySample<T>) -> T {
    s.point.0 * s.normal.0 + (T::one() + k) * s.point.1 * s.normal.1
}

/// Decides anisotropic starshapedness with respect to the origin: the origin
/// lies in Ω and `x ν_x + (1+k) y ν_y ≥ 0` at every sample (up to
/// [`STARSHAPE_TOL`]).
pub fn starshape_check<T: Real>(
    domain: &Domain<T>,
    k: T,
    samples: &[BoundarySample<T>],
) -> StarshapeReport<T> {
    let min_value = samples
        .iter()
        .map(|s| starshape_factor(k, s))
        .fold(T::infinity(), T::min);
    let is_starshaped = domain.contains_origin() && min_value >= -T::lit(STARSHAPE_TOL);
    StarshapeReport {
        is_starshaped,
        min_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Domain<f64> {
        Domain::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Domain::rectangle(1.0, -1.0, -1.0, 1.0).is_err());
        assert!(Domain::rectangle(0.5, 1.0, -1.0, 1.0).is_err());
        assert!(Domain::ellipse(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(Domain::ellipse(5.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn disk_perimeter_and_normals() {
        let disk = Domain::<f64>::unit_disk();
        let s = boundary_quadrature(&disk, 4096).unwrap();
        let total: f64 = s.iter().map(|b| b.weight).sum();
        assert!((total / (2.0 * std::f64::consts::PI) - 1.0).abs() < 1e-6);
        assert_eq!(s[0].point, (1.0, 0.0));
        assert!((s[0].normal.0 - 1.0).abs() < 1e-15 && s[0].normal.1.abs() < 1e-15);
        for b in &s {
            let nn = b.normal.0 * b.normal.0 + b.normal.1 * b.normal.1;
            assert!((nn - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn square_perimeter() {
        for n in [8, 12, 64, 400] {
            let s = boundary_quadrature(&square(), n).unwrap();
            assert_eq!(s.len(), n);
            let total: f64 = s.iter().map(|b| b.weight).sum();
            assert!((total - 8.0).abs() < 1e-13, "n={n}: {total}");
        }
    }

    #[test]
    fn ellipse_weights_match_perimeter() {
        let e = Domain::ellipse(0.2, -0.1, 2.0, 0.5).unwrap();
        let s = boundary_quadrature(&e, 512).unwrap();
        let total: f64 = s.iter().map(|b| b.weight).sum();
        assert!((total / e.perimeter() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn counterclockwise_traversal() {
        for d in [square(), Domain::unit_disk()] {
            let s = boundary_quadrature(&d, 64).unwrap();
            // Shoelace area is positive for counterclockwise polygons.
            let area: f64 = (0..s.len())
                .map(|i| {
                    let (x0, y0) = s[i].point;
                    let (x1, y1) = s[(i + 1) % s.len()].point;
                    x0 * y1 - x1 * y0
                })
                .sum();
            assert!(area > 0.0);
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(boundary_quadrature(&square(), 7).is_err());
    }

    #[test]
    fn starshape_examples() {
        let disk = Domain::<f64>::unit_disk();
        let s = boundary_quadrature(&disk, 1024).unwrap();
        let r = starshape_check(&disk, 1.0, &s);
        assert!(r.is_starshaped);
        assert!((r.min_value - 1.0).abs() < 1e-12);

        let sq = square();
        let r = starshape_check(&sq, 2.0, &boundary_quadrature(&sq, 64).unwrap());
        assert!(r.is_starshaped);

        let off = Domain::offset_disk();
        let r = starshape_check(&off, 1.0, &boundary_quadrature(&off, 64).unwrap());
        assert!(!r.is_starshaped);
    }

    impl Domain<f64> {
        // Validation forbids shapes that miss x = 0, so build the offset disk directly.
        fn offset_disk() -> Self {
            Domain {
                kind: DomainKind::Ellipse {
                    cx: 5.0,
                    cy: 0.0,
                    a: 1.0,
                    b: 1.0,
                },
            }
        }
    }

    #[test]
    fn starshape_refinement_and_k_sweep() {
        let shapes = [
            Domain::unit_disk(),
            Domain::ellipse(0.0, 0.0, 2.0, 0.5).unwrap(),
            Domain::ellipse(0.0, 0.0, 0.3, 1.7).unwrap(),
        ];
        for d in &shapes {
            for k in [0.5, 1.0, 2.0, 4.0] {
                let mut prev = true;
                for n in [16, 32, 64, 128] {
                    let r = starshape_check(d, k, &boundary_quadrature(d, n).unwrap());
                    assert!(r.is_starshaped);
                    assert!(!(prev && !r.is_starshaped));
                    prev = r.is_starshaped;
                }
            }
        }
    }

    #[test]
    fn signed_inside_examples() {
        let disk = Domain::<f64>::unit_disk();
        assert_eq!(disk.signed_inside(0.0, 0.0), -1.0);
        assert_eq!(disk.signed_inside(1.0, 0.0), 0.0);
        assert!(square().signed_inside(2.0, 0.0) > 0.0);
        assert!(square().signed_inside(0.3, -0.2) < 0.0);
    }

    #[test]
    fn axis_distance() {
        let disk = Domain::<f64>::unit_disk();
        let d = disk.axis_distance_to_boundary(0.5, 0.0, 1.0, 0.0);
        assert!((d - 0.5).abs() < 1e-15);
        let d = disk.axis_distance_to_boundary(0.0, 0.6, 0.0, 1.0);
        assert!((d - 0.4).abs() < 1e-15);
        let d = disk.axis_distance_to_boundary(0.6, 0.0, 0.0, -1.0);
        assert!((d - 0.8).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&square()).unwrap();
        assert_eq!(
            j,
            r#"{"kind":"rect","xmin":-1.0,"xmax":1.0,"ymin":-1.0,"ymax":1.0}"#
        );
        let e: Domain<f64> = serde_json::from_str(r#"{"kind":"ellipse","cx":0,"cy":0,"a":1,"b":2}"#).unwrap();
        assert!(matches!(e.kind(), DomainKind::Ellipse { b, .. } if *b == 2.0));
        assert!(serde_json::from_str::<Domain<f64>>(r#"{"kind":"rect","xmin":0}"#).is_err());
    }
}
