use crate::error::{Error, Result};
use crate::numerics::{c64, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

const JOIN_TOL: f64 = 1e-12;

/// Piece of a contour, parametrised by `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    /// Straight segment; `geometric` spaces samples geometrically in |λ| along a ray.
    Line { a: C64, b: C64, geometric: bool },
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    pub fn line(a: C64, b: C64) -> Self {
        let radial = a.norm() > 0.0 && b.norm() > 0.0 && {
            let cross = a.re * b.im - a.im * b.re;
            let dot = a.re * b.re + a.im * b.im;
            cross.abs() <= 1e-12 * a.norm() * b.norm() && dot > 0.0
        };
        let ratio = b.norm() / a.norm();
        let geometric = radial && !(0.1..=10.0).contains(&ratio);
        Segment::Line { a, b, geometric }
    }

    pub fn point(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { a, b, geometric } => {
                if t <= 0.0 {
                    a
                } else if t >= 1.0 {
                    b
                } else if geometric {
                    a * (b.norm() / a.norm()).powf(t)
                } else {
                    a + (b - a) * t
                }
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                center + C64::from_polar(radius, theta0 + (theta1 - theta0) * t)
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { a, b, geometric } => Segment::Line { a: b, b: a, geometric },
            Segment::Arc { center, radius, theta0, theta1 } => {
                Segment::Arc { center, radius, theta0: theta1, theta1: theta0 }
            }
        }
    }
}

/// Closed piecewise path in the λ-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub segments: Vec<Segment>,
    /// True for counterclockwise orientation about the enclosed region.
    pub counterclockwise: bool,
    pub closed: bool,
}

impl Contour {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let c = Contour { segments, counterclockwise: true, closed: true };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Contour("contour has no segments".into()));
        }
        let n = self.segments.len();
        for k in 0..n {
            let next = if k + 1 < n {
                self.segments[k + 1]
            } else if self.closed {
                self.segments[0]
            } else {
                break;
            };
            let (e, s) = (self.segments[k].end(), next.start());
            if (e - s).norm() > JOIN_TOL * (1.0 + e.norm()) {
                return Err(Error::Contour(format!("segment {k} ends at {e} but the next starts at {s}")));
            }
        }
        Ok(())
    }

    pub fn reversed(&self) -> Contour {
        Contour {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
            counterclockwise: !self.counterclockwise,
            closed: self.closed,
        }
    }

    /// Even-odd point-in-contour test on a fine polygonal approximation.
    pub fn contains(&self, lambda: C64) -> bool {
        let mut pts = Vec::new();
        for s in &self.segments {
            for j in 0..256 {
                pts.push(s.point(j as f64 / 256.0));
            }
        }
        let mut inside = false;
        let n = pts.len();
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            if (a.im > lambda.im) != (b.im > lambda.im) {
                let x = a.re + (lambda.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if lambda.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Supported contour shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContourKind {
    Circle { center: [f64; 2], radius: f64 },
    RightHalfAnnulus { r_in: f64, r_out: f64 },
    ShiftedHalfDisc { radius: f64, shift: f64 },
    Rectangle { corners: [[f64; 2]; 2] },
    /// Right half-disc; a positive `indent` replaces the origin by a semicircle into Re λ > 0.
    RightHalfDisc { radius: f64, indent: Option<f64> },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Contour(format!("{name} must be positive and finite, got {x}")))
    }
}

fn right_half_annulus(r_in: f64, r_out: f64) -> Vec<Segment> {
    let i = c64(0.0, 1.0);
    vec![
        Segment::Arc { center: c64(0.0, 0.0), radius: r_out, theta0: -FRAC_PI_2, theta1: FRAC_PI_2 },
        Segment::line(i * r_out, i * r_in),
        Segment::Arc { center: c64(0.0, 0.0), radius: r_in, theta0: FRAC_PI_2, theta1: -FRAC_PI_2 },
        Segment::line(-i * r_in, -i * r_out),
    ]
}

/// Counterclockwise closed contour of the requested shape.
pub fn build_contour(kind: ContourKind) -> Result<Contour> {
    let segments = match kind {
        ContourKind::Circle { center, radius } => {
            positive("radius", radius)?;
            vec![Segment::Arc { center: c64(center[0], center[1]), radius, theta0: 0.0, theta1: 2.0 * PI }]
        }
        ContourKind::RightHalfAnnulus { r_in, r_out } => {
            positive("inner radius", r_in)?;
            positive("outer radius", r_out)?;
            if r_in >= r_out {
                return Err(Error::Contour(format!("inner radius {r_in} must be below outer radius {r_out}")));
            }
            right_half_annulus(r_in, r_out)
        }
        ContourKind::ShiftedHalfDisc { radius, shift } => {
            positive("radius", radius)?;
            if !shift.is_finite() {
                return Err(Error::Contour("shift must be finite".into()));
            }
            let s = c64(shift, 0.0);
            vec![
                Segment::Arc { center: s, radius, theta0: -FRAC_PI_2, theta1: FRAC_PI_2 },
                Segment::line(s + c64(0.0, radius), s - c64(0.0, radius)),
            ]
        }
        ContourKind::Rectangle { corners } => {
            let (x0, x1) = (corners[0][0].min(corners[1][0]), corners[0][0].max(corners[1][0]));
            let (y0, y1) = (corners[0][1].min(corners[1][1]), corners[0][1].max(corners[1][1]));
            if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
                return Err(Error::Contour("rectangle must have positive width and height".into()));
            }
            let p = [c64(x0, y0), c64(x1, y0), c64(x1, y1), c64(x0, y1)];
            (0..4).map(|k| Segment::line(p[k], p[(k + 1) % 4])).collect()
        }
        ContourKind::RightHalfDisc { radius, indent } => {
            positive("radius", radius)?;
            match indent {
                Some(r) => {
                    positive("indent", r)?;
                    if r >= radius {
                        return Err(Error::Contour("indent must be smaller than the radius".into()));
                    }
                    right_half_annulus(r, radius)
                }
                None => {
                    let i = c64(0.0, 1.0);
                    vec![
                        Segment::Arc { center: c64(0.0, 0.0), radius, theta0: -FRAC_PI_2, theta1: FRAC_PI_2 },
                        Segment::line(i * radius, c64(0.0, 0.0)),
                        Segment::line(c64(0.0, 0.0), -i * radius),
                    ]
                }
            }
        }
    };
    Contour::new(segments)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let c = build_contour(ContourKind::Circle { center: [0.0, 0.0], radius: 1e-2 }).unwrap();
        assert_eq!(c.segments.len(), 1);
        assert!(matches!(c.segments[0], Segment::Arc { .. }));
        let a = build_contour(ContourKind::RightHalfAnnulus { r_in: 4.0, r_out: 1e7 }).unwrap();
        let arcs = a.segments.iter().filter(|s| matches!(s, Segment::Arc { .. })).count();
        assert_eq!((a.segments.len(), arcs), (4, 2));
        assert!(matches!(a.segments[1], Segment::Line { geometric: true, .. }));
        let h = build_contour(ContourKind::ShiftedHalfDisc { radius: 4.0, shift: 0.3 }).unwrap();
        match h.segments[1] {
            Segment::Line { a, b, .. } => assert!(a.re == 0.3 && b.re == 0.3),
            _ => panic!("expected a vertical segment"),
        }
        assert!(h.contains(c64(1.0, 0.0)) && !h.contains(c64(0.1, 0.0)));
    }

    #[test]
    fn invalid_geometry() {
        assert!(build_contour(ContourKind::RightHalfAnnulus { r_in: 5.0, r_out: 4.0 }).is_err());
        assert!(build_contour(ContourKind::Circle { center: [0.0, 0.0], radius: -1.0 }).is_err());
        assert!(build_contour(ContourKind::Rectangle { corners: [[0.0, 0.0], [0.0, 1.0]] }).is_err());
    }

    #[test]
    fn reversal_keeps_joins() {
        let a = build_contour(ContourKind::RightHalfAnnulus { r_in: 0.5, r_out: 10.0 }).unwrap();
        let r = a.reversed();
        r.validate().unwrap();
        assert!(!r.counterclockwise);
        assert_eq!(r.segments[0].start(), a.segments[3].end());
    }

    #[test]
    fn geometric_spacing() {
        let s = Segment::line(c64(0.0, 1e6), c64(0.0, 1.0));
        assert!((s.point(0.5) - c64(0.0, 1e3)).norm() < 1e-9);
    }
}
