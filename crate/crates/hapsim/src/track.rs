//! Polyline centerline with arc-length bookkeeping, signed cross-track
//! projection, lateral offsetting, and CSV I/O.
//!
//! Cross-track distance is signed positive to the left of the direction of
//! travel. Projection is a straight scan over segments; the hinted variant
//! restricts the scan to a window around a previously known segment, which
//! is what the planner and the simulation loop use while marching forward.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("track needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("zero-length segment at point {0}")]
    DegenerateSegment(usize),
    #[error("track file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("track file {path} line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("unknown bundled track '{0}' (expected straight, circle, scurve or mixed)")]
    UnknownName(String),
}

#[derive(Debug, Clone)]
pub struct Track {
    points: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
    closed: bool,
}

/// Result of projecting a point onto the track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Arc length of the projected point from the track start [m].
    pub arc_length: f64,
    /// Signed lateral distance, positive left of the direction of travel [m].
    pub cross_track: f64,
    /// Index of the segment containing the projection.
    pub segment: usize,
    /// Tangent heading of that segment [rad].
    pub heading: f64,
}

impl Track {
    /// Build a track from an ordered list of centerline points. A closed
    /// track must repeat its first point as the last point.
    pub fn from_points(points: Vec<(f64, f64)>, closed: bool) -> Result<Self, TrackError> {
        if points.len() < 2 {
            return Err(TrackError::TooFewPoints(points.len()));
        }
        for (i, (x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(TrackError::NonFinite(i));
            }
        }
        let mut cumulative = Vec::with_capacity(points.len());
        cumulative.push(0.0);
        for i in 1..points.len() {
            let dx = points[i].0 - points[i - 1].0;
            let dy = points[i].1 - points[i - 1].1;
            let len = (dx * dx + dy * dy).sqrt();
            if len == 0.0 {
                return Err(TrackError::DegenerateSegment(i));
            }
            cumulative.push(cumulative[i - 1] + len);
        }
        Ok(Self {
            points,
            cumulative,
            closed,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Total arc length [m].
    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    fn segment_projection(&self, seg: usize, x: f64, y: f64) -> (f64, f64, f64) {
        let (ax, ay) = self.points[seg];
        let (bx, by) = self.points[seg + 1];
        let dx = bx - ax;
        let dy = by - ay;
        let len_sq = dx * dx + dy * dy;
        let t = (((x - ax) * dx + (y - ay) * dy) / len_sq).clamp(0.0, 1.0);
        let px = ax + t * dx;
        let py = ay + t * dy;
        let dist_sq = (x - px) * (x - px) + (y - py) * (y - py);
        (dist_sq, t, len_sq.sqrt())
    }

    fn projection_at(&self, seg: usize, x: f64, y: f64) -> Projection {
        let (ax, ay) = self.points[seg];
        let (bx, by) = self.points[seg + 1];
        let dx = bx - ax;
        let dy = by - ay;
        let (_, t, seg_len) = self.segment_projection(seg, x, y);
        let px = ax + t * dx;
        let py = ay + t * dy;
        let distance = ((x - px) * (x - px) + (y - py) * (y - py)).sqrt();
        // Positive when the query point lies left of the tangent.
        let side = dx * (y - py) - dy * (x - px);
        let cross_track = if side >= 0.0 { distance } else { -distance };
        Projection {
            arc_length: self.cumulative[seg] + t * seg_len,
            cross_track,
            segment: seg,
            heading: dy.atan2(dx),
        }
    }

    /// Project a point onto the whole track (scan over every segment).
    pub fn project(&self, x: f64, y: f64) -> Projection {
        let mut best_seg = 0;
        let mut best = f64::INFINITY;
        for seg in 0..self.segment_count() {
            let (dist_sq, _, _) = self.segment_projection(seg, x, y);
            if dist_sq < best {
                best = dist_sq;
                best_seg = seg;
            }
        }
        self.projection_at(best_seg, x, y)
    }

    /// Project a point scanning only a window of segments around `hint`.
    /// For closed tracks the window wraps around the join.
    pub fn project_hint(&self, x: f64, y: f64, hint: usize, back: usize, ahead: usize) -> Projection {
        let n = self.segment_count();
        let hint = hint.min(n - 1);
        let mut best_seg = hint;
        let mut best = f64::INFINITY;
        let span = back + ahead + 1;
        for k in 0..span.min(n) {
            let offset = k as isize - back as isize;
            let seg = if self.closed {
                (hint as isize + offset).rem_euclid(n as isize) as usize
            } else {
                let s = hint as isize + offset;
                if s < 0 || s >= n as isize {
                    continue;
                }
                s as usize
            };
            let (dist_sq, _, _) = self.segment_projection(seg, x, y);
            if dist_sq < best {
                best = dist_sq;
                best_seg = seg;
            }
        }
        self.projection_at(best_seg, x, y)
    }

    /// Tangent heading of the segment containing the given arc length.
    pub fn heading_at(&self, arc_length: f64) -> f64 {
        let s = if self.closed {
            arc_length.rem_euclid(self.length())
        } else {
            arc_length.clamp(0.0, self.length())
        };
        let seg = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.segment_count() - 1),
            Err(i) => (i - 1).min(self.segment_count() - 1),
        };
        let (ax, ay) = self.points[seg];
        let (bx, by) = self.points[seg + 1];
        (by - ay).atan2(bx - ax)
    }

    /// Centerline position at the given arc length.
    pub fn position_at(&self, arc_length: f64) -> (f64, f64) {
        let s = if self.closed {
            arc_length.rem_euclid(self.length())
        } else {
            arc_length.clamp(0.0, self.length())
        };
        let seg = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => i.min(self.segment_count() - 1),
            Err(i) => (i - 1).min(self.segment_count() - 1),
        };
        let t = (s - self.cumulative[seg]) / (self.cumulative[seg + 1] - self.cumulative[seg]);
        let (ax, ay) = self.points[seg];
        let (bx, by) = self.points[seg + 1];
        (ax + t * (bx - ax), ay + t * (by - ay))
    }

    /// Shift the whole centerline laterally; positive distance moves it to
    /// the left of the direction of travel.
    pub fn offset(&self, distance: f64) -> Track {
        let n = self.points.len();
        let seg_normal = |seg: usize| {
            let (ax, ay) = self.points[seg];
            let (bx, by) = self.points[seg + 1];
            let dx = bx - ax;
            let dy = by - ay;
            let len = (dx * dx + dy * dy).sqrt();
            (-dy / len, dx / len)
        };
        let mut shifted = Vec::with_capacity(n);
        for i in 0..n {
            let (nx, ny) = if self.closed {
                // The closing point duplicates the first; treat both ends as
                // interior vertices of the loop.
                let prev = if i == 0 { self.segment_count() - 1 } else { i - 1 };
                let next = if i >= self.segment_count() { 0 } else { i };
                average_normal(seg_normal(prev), seg_normal(next))
            } else if i == 0 {
                seg_normal(0)
            } else if i == n - 1 {
                seg_normal(n - 2)
            } else {
                average_normal(seg_normal(i - 1), seg_normal(i))
            };
            shifted.push((
                self.points[i].0 + distance * nx,
                self.points[i].1 + distance * ny,
            ));
        }
        Track::from_points(shifted, self.closed).expect("offset of a valid track is valid")
    }

    /// Load a centerline from a CSV file with an `x,y` header.
    pub fn from_csv_path(path: &Path, closed: bool) -> Result<Self, TrackError> {
        let text = fs::read_to_string(path).map_err(|source| TrackError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim().eq_ignore_ascii_case("x,y") => {}
            Some((_, header)) => {
                return Err(TrackError::Parse {
                    path: path.display().to_string(),
                    line: 1,
                    message: format!("expected header 'x,y', got '{}'", header.trim()),
                })
            }
            None => {
                return Err(TrackError::Parse {
                    path: path.display().to_string(),
                    line: 1,
                    message: "empty file".into(),
                })
            }
        }
        let mut points = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let parse = |field: Option<&str>| -> Result<f64, TrackError> {
                field
                    .ok_or(())
                    .and_then(|f| f.trim().parse::<f64>().map_err(|_| ()))
                    .map_err(|_| TrackError::Parse {
                        path: path.display().to_string(),
                        line: idx + 1,
                        message: format!("expected 'x,y' numbers, got '{line}'"),
                    })
            };
            let x = parse(fields.next())?;
            let y = parse(fields.next())?;
            points.push((x, y));
        }
        Track::from_points(points, closed)
    }

    /// Write the centerline as CSV with an `x,y` header.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.points {
            out.push_str(&format!("{x:.6},{y:.6}\n"));
        }
        out
    }

    /// Look up one of the bundled parametric tracks by name.
    pub fn by_name(name: &str) -> Result<Track, TrackError> {
        match name {
            "straight" => Ok(Self::straight(1400.0, 1.0)),
            "circle" => Ok(Self::circle(60.0, 1.0)),
            "scurve" => Ok(Self::s_curve(1400.0, 6.0, 200.0, 1.0)),
            "mixed" => Ok(Self::mixed()),
            other => Err(TrackError::UnknownName(other.to_string())),
        }
    }

    pub const BUNDLED_NAMES: [&'static str; 4] = ["straight", "circle", "scurve", "mixed"];

    /// Straight line along +x starting at the origin.
    pub fn straight(length: f64, spacing: f64) -> Track {
        let n = (length / spacing).ceil() as usize;
        let pts = (0..=n).map(|i| (i as f64 * spacing, 0.0)).collect();
        Track::from_points(pts, false).unwrap()
    }

    /// Counterclockwise circle entered at the origin heading along +x.
    pub fn circle(radius: f64, spacing: f64) -> Track {
        let circumference = 2.0 * std::f64::consts::PI * radius;
        let n = (circumference / spacing).ceil() as usize;
        let mut pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (radius * theta.sin(), radius * (1.0 - theta.cos()))
            })
            .collect();
        pts.push(pts[0]);
        Track::from_points(pts, true).unwrap()
    }

    /// Sine-wave lane change course: y = amplitude * sin(2π x / wavelength).
    pub fn s_curve(length: f64, amplitude: f64, wavelength: f64, spacing: f64) -> Track {
        let n = (length / spacing).ceil() as usize;
        let pts = (0..=n)
            .map(|i| {
                let x = i as f64 * spacing;
                (
                    x,
                    amplitude * (2.0 * std::f64::consts::PI * x / wavelength).sin(),
                )
            })
            .collect();
        Track::from_points(pts, false).unwrap()
    }

    /// Straights and constant-radius arcs joined end to end.
    pub fn mixed() -> Track {
        enum Piece {
            Straight(f64),
            Arc { radius: f64, angle: f64 },
        }
        let pieces = [
            Piece::Straight(200.0),
            Piece::Arc {
                radius: 80.0,
                angle: std::f64::consts::FRAC_PI_2,
            },
            Piece::Straight(150.0),
            Piece::Arc {
                radius: 60.0,
                angle: -std::f64::consts::FRAC_PI_2,
            },
            Piece::Straight(200.0),
            Piece::Arc {
                radius: 100.0,
                angle: std::f64::consts::FRAC_PI_4,
            },
            Piece::Arc {
                radius: 100.0,
                angle: -std::f64::consts::FRAC_PI_4,
            },
            Piece::Straight(400.0),
        ];
        let spacing = 1.0;
        let mut pts = vec![(0.0f64, 0.0f64)];
        let mut heading = 0.0f64;
        for piece in pieces {
            match piece {
                Piece::Straight(len) => {
                    let steps = (len / spacing).ceil() as usize;
                    let step = len / steps as f64;
                    for _ in 0..steps {
                        let (x, y) = *pts.last().unwrap();
                        pts.push((x + step * heading.cos(), y + step * heading.sin()));
                    }
                }
                Piece::Arc { radius, angle } => {
                    let len = radius * angle.abs();
                    let steps = (len / spacing).ceil() as usize;
                    let dtheta = angle / steps as f64;
                    let step = radius * dtheta.abs();
                    for _ in 0..steps {
                        heading += 0.5 * dtheta;
                        let (x, y) = *pts.last().unwrap();
                        pts.push((x + step * heading.cos(), y + step * heading.sin()));
                        heading += 0.5 * dtheta;
                    }
                }
            }
        }
        Track::from_points(pts, false).unwrap()
    }
}

fn average_normal(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let nx = a.0 + b.0;
    let ny = a.1 + b.1;
    let len = (nx * nx + ny * ny).sqrt();
    if len < 1e-12 {
        a
    } else {
        (nx / len, ny / len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force nearest distance via dense resampling of the polyline.
    fn dense_min_distance(track: &Track, x: f64, y: f64, step: f64) -> f64 {
        let mut best = f64::INFINITY;
        let mut s = 0.0;
        while s <= track.length() {
            let (px, py) = track.position_at(s);
            let d = ((x - px).powi(2) + (y - py).powi(2)).sqrt();
            best = best.min(d);
            s += step;
        }
        best
    }

    #[test]
    fn waypoint_projects_to_zero_cross_track() {
        let track = Track::from_points(vec![(0.0, 0.0), (10.0, 0.0), (20.0, 5.0)], false).unwrap();
        let p = track.project(10.0, 0.0);
        assert_eq!(p.cross_track, 0.0);
        assert_relative_eq!(p.arc_length, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn left_of_straight_track_is_positive() {
        let track = Track::straight(100.0, 1.0);
        let p = track.project(5.0, 0.3);
        assert_relative_eq!(p.cross_track, 0.3, epsilon = 1e-12);
        assert_relative_eq!(p.arc_length, 5.0, epsilon = 1e-12);
        let q = track.project(5.0, -0.3);
        assert_relative_eq!(q.cross_track, -0.3, epsilon = 1e-12);
    }

    #[test]
    fn projection_matches_dense_resampling() {
        let track = Track::s_curve(300.0, 6.0, 120.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let s = rng.gen_range(5.0..295.0);
            let (cx, cy) = track.position_at(s);
            let x = cx + rng.gen_range(-3.0..3.0);
            let y = cy + rng.gen_range(-3.0..3.0);
            let p = track.project(x, y);
            let brute = dense_min_distance(&track, x, y, 1e-4);
            assert_relative_eq!(p.cross_track.abs(), brute, epsilon = 1e-6);
        }
    }

    #[test]
    fn hinted_projection_agrees_with_full_scan() {
        let track = Track::mixed();
        let mut hint = 0;
        let mut s = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        while s < track.length() - 5.0 {
            let (cx, cy) = track.position_at(s);
            let x = cx + rng.gen_range(-1.5..1.5);
            let y = cy + rng.gen_range(-1.5..1.5);
            let full = track.project(x, y);
            let hinted = track.project_hint(x, y, hint, 16, 64);
            assert_eq!(full, hinted);
            hint = hinted.segment;
            s += 2.5;
        }
    }

    #[test]
    fn closed_circle_projection_wraps() {
        let track = Track::circle(60.0, 1.0);
        // A point just behind the start belongs to the last segment.
        let p = track.project(-0.5, 0.1);
        assert!(p.arc_length > track.length() - 2.0 || p.arc_length < 2.0);
        let hinted = track.project_hint(-0.5, 0.1, 2, 16, 16);
        assert_relative_eq!(
            hinted.cross_track,
            p.cross_track,
            epsilon = 1e-9
        );
    }

    #[test]
    fn arc_length_is_monotone_along_travel() {
        let track = Track::s_curve(400.0, 5.0, 160.0, 1.0);
        let mut last = -1.0;
        let mut s = 0.0;
        while s <= track.length() {
            let (x, y) = track.position_at(s);
            let p = track.project(x, y);
            assert!(p.arc_length >= last - 1e-9);
            last = p.arc_length;
            s += 0.5;
        }
    }

    #[test]
    fn offset_track_sits_one_meter_left() {
        let straight = Track::straight(100.0, 1.0);
        let shifted = straight.offset(1.0);
        for (x, y) in shifted.points() {
            assert_relative_eq!(*y, 1.0, epsilon = 1e-12);
            let _ = x;
        }
        let circle = Track::circle(60.0, 1.0);
        let inner = circle.offset(1.0);
        // Left of a counterclockwise circle is toward its center.
        let (cx, cy) = (0.0, 60.0);
        for (x, y) in inner.points() {
            let r = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
            assert_relative_eq!(r, 59.0, epsilon = 2e-3);
        }
    }

    #[test]
    fn csv_round_trip() {
        let track = Track::s_curve(50.0, 2.0, 40.0, 1.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("course.csv");
        std::fs::write(&path, track.to_csv_string()).unwrap();
        let loaded = Track::from_csv_path(&path, false).unwrap();
        assert_eq!(loaded.points().len(), track.points().len());
        for (a, b) in loaded.points().iter().zip(track.points()) {
            assert_relative_eq!(a.0, b.0, epsilon = 1e-6);
            assert_relative_eq!(a.1, b.1, epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(
            Track::from_points(vec![(0.0, 0.0)], false),
            Err(TrackError::TooFewPoints(1))
        ));
        assert!(matches!(
            Track::from_points(vec![(0.0, 0.0), (f64::NAN, 1.0)], false),
            Err(TrackError::NonFinite(1))
        ));
        assert!(matches!(
            Track::from_points(vec![(0.0, 0.0), (0.0, 0.0)], false),
            Err(TrackError::DegenerateSegment(1))
        ));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "lon,lat\n1,2\n").unwrap();
        assert!(matches!(
            Track::from_csv_path(&path, false),
            Err(TrackError::Parse { line: 1, .. })
        ));
        std::fs::write(&path, "x,y\n1,oops\n").unwrap();
        assert!(matches!(
            Track::from_csv_path(&path, false),
            Err(TrackError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Track::by_name("oval"),
            Err(TrackError::UnknownName(_))
        ));
    }

    #[test]
    fn bundled_tracks_are_long_enough() {
        for name in Track::BUNDLED_NAMES {
            let track = Track::by_name(name).unwrap();
            if track.is_closed() {
                assert!(track.length() > 300.0, "{name} too short");
            } else {
                // 180 s at 6.7056 m/s plus planner horizon lookahead.
                assert!(track.length() > 1300.0, "{name} too short");
            }
        }
    }
}
