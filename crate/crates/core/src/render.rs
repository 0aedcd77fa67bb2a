//! Poincaré-disk layout and SVG output.
//!
//! The central tile is a regular polygon whose circumradius comes from the
//! tessellation's defining trigonometry; every other tile is laid out by
//! reflecting its already-placed neighbour across their shared edge.
//! Edges are geodesics: arcs of circles orthogonal to the unit circle, or
//! diameters when the endpoints line up with the origin.  The model is
//! conformal, so angles between those arcs are the real angles, and the
//! tiles around any interior vertex close up to a full turn — the tests
//! hold the layout to that.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ca_engine::{Alphabet, CaError, Configuration};
use crate::tiling::{TileId, TilingBall, TilingError};

/// Largest ball radius the layout will place; deeper rings collapse into
/// less than a pixel of disk anyway.
pub const RENDER_RADIUS_CAP: u32 = 8;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("radius {radius} exceeds the render cap {cap}")]
    RadiusTooLarge { radius: u32, cap: u32 },
    #[error("bad palette: {0}")]
    BadPalette(String),
    #[error(transparent)]
    Ca(#[from] CaError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// A point in the unit disk.
pub type Point = (f64, f64);

fn dot(a: Point, b: Point) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

fn cross(a: Point, b: Point) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

/// The geodesic through two disk points: a circle orthogonal to the unit
/// circle, or a straight line through the origin.
#[derive(Debug, Clone, Copy)]
enum Geodesic {
    Circle { center: Point, radius: f64 },
    Line { direction: Point },
}

fn geodesic_through(a: Point, b: Point) -> Geodesic {
    // orthogonality to the unit circle pins the centre o of the circle
    // through a and b: 2 o.a = |a|^2 + 1 and 2 o.b = |b|^2 + 1
    let det = 4.0 * cross(a, b);
    if det.abs() < 1e-12 {
        let d = sub(b, a);
        let len = norm(d);
        return Geodesic::Line {
            direction: (d.0 / len, d.1 / len),
        };
    }
    let ra = dot(a, a) + 1.0;
    let rb = dot(b, b) + 1.0;
    let ox = (ra * 2.0 * b.1 - rb * 2.0 * a.1) / det;
    let oy = (rb * 2.0 * a.0 - ra * 2.0 * b.0) / det;
    let center = (ox, oy);
    Geodesic::Circle {
        center,
        radius: (dot(center, center) - 1.0).sqrt(),
    }
}

fn reflect_across(g: &Geodesic, z: Point) -> Point {
    match *g {
        Geodesic::Circle { center, radius } => {
            let d = sub(z, center);
            let scale = radius * radius / dot(d, d);
            (center.0 + scale * d.0, center.1 + scale * d.1)
        }
        Geodesic::Line { direction } => {
            let along = dot(z, direction);
            (
                2.0 * along * direction.0 - z.0,
                2.0 * along * direction.1 - z.1,
            )
        }
    }
}

/// Unit tangent of the geodesic at `from`, pointing along the edge towards
/// `to`.  In this conformal model these tangents carry the true angles.
fn tangent_at(from: Point, to: Point) -> Point {
    match geodesic_through(from, to) {
        Geodesic::Line { .. } => {
            let d = sub(to, from);
            let len = norm(d);
            (d.0 / len, d.1 / len)
        }
        Geodesic::Circle { center, .. } => {
            let r = sub(from, center);
            let t = (-r.1, r.0);
            let len = norm(t);
            let t = (t.0 / len, t.1 / len);
            if dot(t, sub(to, from)) >= 0.0 {
                t
            } else {
                (-t.0, -t.1)
            }
        }
    }
}

/// Disk positions for every tile of a ball: one polygon per tile, vertex
/// `k` sitting between edges `k` and `k+1`.
#[derive(Debug, Clone)]
pub struct Layout {
    p: usize,
    polygons: Vec<Vec<Point>>,
}

impl Layout {
    pub fn polygon(&self, t: TileId) -> &[Point] {
        &self.polygons[t.0 as usize]
    }

    pub fn tile_count(&self) -> usize {
        self.polygons.len()
    }

    pub fn sides(&self) -> usize {
        self.p
    }
}

/// Euclidean circumradius of the central tile.
pub fn central_vertex_radius(p: u32, q: u32) -> f64 {
    let pi = std::f64::consts::PI;
    let cosh_ov = (pi / p as f64).tan().recip() * (pi / q as f64).tan().recip();
    let ov = cosh_ov.acosh();
    (ov / 2.0).tanh()
}

/// Place every tile of the ball in the unit disk.
pub fn layout(ball: &TilingBall) -> Result<Layout, RenderError> {
    if ball.radius() > RENDER_RADIUS_CAP {
        return Err(RenderError::RadiusTooLarge {
            radius: ball.radius(),
            cap: RENDER_RADIUS_CAP,
        });
    }
    let p = ball.p() as usize;
    let rv = central_vertex_radius(ball.p().into(), ball.q().into());
    let pi = std::f64::consts::PI;
    // vertex k between edges k and k+1; larger angle is clockwise on a
    // y-down canvas
    let centre_polygon: Vec<Point> = (0..p)
        .map(|k| {
            let angle = 2.0 * pi * (k as f64 + 0.5) / p as f64;
            (rv * angle.cos(), rv * angle.sin())
        })
        .collect();
    let mut polygons: Vec<Option<Vec<Point>>> = vec![None; ball.tile_count()];
    polygons[ball.center().0 as usize] = Some(centre_polygon);
    // tiles are numbered outward, so every non-central tile has a
    // lower-numbered placed neighbour by the time we reach it
    for t in ball.tiles() {
        let placed = polygons[t.0 as usize]
            .clone()
            .ok_or_else(|| TilingError::Inconsistent(format!("tile {t} reached unplaced")))?;
        for e in 0..p as u8 {
            let Some(flag) = ball.neighbor(t, e) else { continue };
            if polygons[flag.tile.0 as usize].is_some() {
                continue;
            }
            let b = flag.edge as usize;
            let e = e as usize;
            // edge e runs between vertices e-1 and e; both stay put, and
            // the reflected boundary is walked in the opposite sense
            let va = placed[(e + p - 1) % p];
            let vb = placed[e];
            let geo = geodesic_through(va, vb);
            let mut mirrored = vec![(0.0, 0.0); p];
            for i in 0..p {
                mirrored[(b + p - 1 - i) % p] = reflect_across(&geo, placed[(e + i) % p]);
            }
            polygons[flag.tile.0 as usize] = Some(mirrored);
        }
    }
    let polygons = polygons
        .into_iter()
        .enumerate()
        .map(|(i, poly)| {
            poly.ok_or_else(|| TilingError::Inconsistent(format!("tile {i} never placed")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Layout { p, polygons })
}

/// Tile-corner angle totals at every vertex where the full complement of
/// `q` tiles meets, keyed off positions bucketed at 1e-9.  A conformally
/// correct layout puts every entry at a full turn.
pub fn closed_vertex_angle_sums(ball: &TilingBall, l: &Layout) -> Vec<f64> {
    let p = l.sides();
    let q = ball.q() as usize;
    let key = |v: Point| ((v.0 * 1e9).round() as i64, (v.1 * 1e9).round() as i64);
    let mut incident: std::collections::HashMap<(i64, i64), Vec<(TileId, usize)>> =
        std::collections::HashMap::new();
    for t in ball.tiles() {
        for (k, &v) in l.polygon(t).iter().enumerate() {
            incident.entry(key(v)).or_default().push((t, k));
        }
    }
    let mut sums = Vec::new();
    for (_, corners) in incident {
        if corners.len() != q {
            continue;
        }
        let mut total = 0.0;
        for &(t, k) in &corners {
            let poly = l.polygon(t);
            let v = poly[k];
            let prev = poly[(k + p - 1) % p];
            let next = poly[(k + 1) % p];
            let t1 = tangent_at(v, prev);
            let t2 = tangent_at(v, next);
            total += dot(t1, t2).clamp(-1.0, 1.0).acos();
        }
        sums.push(total);
    }
    sums
}

/// State-name to fill-colour mapping for SVG output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<(String, String)>,
}

pub const FALLBACK_COLOR: &str = "#808080";

impl Palette {
    /// Colours for the structural states, quiescent white.
    pub fn default_structure() -> Palette {
        let colors = [
            ("q", "#ffffff"),
            ("Bb", "#00008b"),
            ("Bw", "#87cefa"),
            ("Wwm", "#ffff00"),
            ("Wwr", "#008000"),
            ("Wb", "#ffa500"),
            ("seed", "#ff0000"),
            ("root", "#ff69b4"),
            ("Wp", "#c0c0c0"),
        ];
        Palette {
            colors: colors
                .iter()
                .map(|&(n, c)| (n.to_string(), c.to_string()))
                .collect(),
        }
    }

    pub fn color(&self, name: &str) -> &str {
        self.colors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
            .unwrap_or(FALLBACK_COLOR)
    }

    pub fn set(&mut self, name: &str, color: &str) -> Result<(), RenderError> {
        let color = check_color(color)?;
        match self.colors.iter_mut().find(|(n, _)| n == name) {
            Some(entry) => entry.1 = color,
            None => self.colors.push((name.to_string(), color)),
        }
        Ok(())
    }

    /// One `state=#rrggbb` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, c) in &self.colors {
            let _ = writeln!(out, "{n}={c}");
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Palette, RenderError> {
        let mut colors: Vec<(String, String)> = Vec::new();
        for line in s.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, color) = line
                .split_once('=')
                .ok_or_else(|| RenderError::BadPalette(format!("line lacks '=': {line:?}")))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(RenderError::BadPalette(format!("empty state in {line:?}")));
            }
            if colors.iter().any(|(n, _)| n == name) {
                return Err(RenderError::BadPalette(format!("state {name:?} named twice")));
            }
            colors.push((name.to_string(), check_color(color.trim())?));
        }
        Ok(Palette { colors })
    }
}

fn check_color(color: &str) -> Result<String, RenderError> {
    let body = color
        .strip_prefix('#')
        .ok_or_else(|| RenderError::BadPalette(format!("colour {color:?} lacks '#'")))?;
    if body.len() != 6 || !body.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(RenderError::BadPalette(format!(
            "colour {color:?} is not #rrggbb"
        )));
    }
    Ok(format!("#{}", body.to_ascii_lowercase()))
}

fn fmt_coord(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn arc_to(path: &mut String, from: Point, to: Point) {
    match geodesic_through(from, to) {
        Geodesic::Line { .. } => {
            let _ = write!(path, " L {} {}", fmt_coord(to.0), fmt_coord(to.1));
        }
        Geodesic::Circle { center, radius } => {
            // of the two arcs, the geodesic segment is the one whose
            // midpoint stays inside the disk; pick the sweep that passes it
            let chord_mid = ((from.0 + to.0) / 2.0, (from.1 + to.1) / 2.0);
            let d = sub(chord_mid, center);
            let len = norm(d);
            let arc_mid = (
                center.0 + radius * d.0 / len,
                center.1 + radius * d.1 / len,
            );
            let full = 2.0 * std::f64::consts::PI;
            let a1 = f64::atan2(from.1 - center.1, from.0 - center.0);
            let a2 = f64::atan2(to.1 - center.1, to.0 - center.0);
            let am = f64::atan2(arc_mid.1 - center.1, arc_mid.0 - center.0);
            let fwd = (a2 - a1).rem_euclid(full);
            let mid = (am - a1).rem_euclid(full);
            let sweep = if mid < fwd { 1 } else { 0 };
            let _ = write!(
                path,
                " A {} {} 0 0 {} {} {}",
                fmt_coord(radius),
                fmt_coord(radius),
                sweep,
                fmt_coord(to.0),
                fmt_coord(to.1)
            );
        }
    }
}

/// Draw the ball as an SVG document: one geodesic-edged path per tile,
/// filled by the palette colour of its state, tiles in id order.  Output
/// is deterministic byte for byte.
pub fn emit_svg(
    ball: &TilingBall,
    layout: &Layout,
    config: &Configuration,
    alphabet: &Alphabet,
    palette: &Palette,
) -> Result<String, RenderError> {
    if config.grid() != ball.grid() {
        return Err(CaError::GridMismatch(config.grid(), ball.grid()).into());
    }
    if config.len() != ball.tile_count() || layout.tile_count() != ball.tile_count() {
        return Err(CaError::WrongBall.into());
    }
    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.02 -1.02 2.04 2.04\" \
         width=\"900\" height=\"900\">\n",
    );
    out.push_str("<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.004\"/>\n");
    let p = layout.sides();
    for t in ball.tiles() {
        let poly = layout.polygon(t);
        let name = alphabet.name(config.state(t))?;
        let mut path = format!("M {} {}", fmt_coord(poly[0].0), fmt_coord(poly[0].1));
        for k in 1..p {
            arc_to(&mut path, poly[k - 1], poly[k]);
        }
        arc_to(&mut path, poly[p - 1], poly[0]);
        path.push_str(" Z");
        let _ = writeln!(
            out,
            "<path d=\"{path}\" fill=\"{}\" stroke=\"#000000\" stroke-width=\"0.002\"/>",
            palette.color(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca_engine::structure::{ground_truth_labeling, structure_alphabet};
    use crate::fib_coords::GridKind;
    use crate::tiling::build_ball;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        norm(sub(a, b)) < tol
    }

    #[test]
    fn central_radius_follows_the_defining_trigonometry() {
        // {5,4}: cosh of the centre-to-vertex distance is cot(pi/5).cot(pi/4)
        let pi = std::f64::consts::PI;
        let cosh_ov = (pi / 5.0).tan().recip();
        let want = (cosh_ov.acosh() / 2.0).tanh();
        assert!((central_vertex_radius(5, 4) - want).abs() < 1e-12);
        assert!(central_vertex_radius(7, 3) > 0.0);
        assert!(central_vertex_radius(7, 3) < 1.0);
    }

    #[test]
    fn reflections_fix_the_axis_and_involute() {
        let a = (0.3, 0.1);
        let b = (-0.2, 0.4);
        let g = geodesic_through(a, b);
        assert!(close(reflect_across(&g, a), a, 1e-12));
        assert!(close(reflect_across(&g, b), b, 1e-12));
        let z = (0.5, -0.2);
        assert!(close(reflect_across(&g, reflect_across(&g, z)), z, 1e-9));
        // collinear with the origin: a straight mirror
        let g2 = geodesic_through((0.2, 0.2), (-0.3, -0.3));
        assert!(matches!(g2, Geodesic::Line { .. }));
        assert!(close(reflect_across(&g2, (0.1, 0.0)), (0.0, 0.1), 1e-12));
    }

    #[test]
    fn every_tile_lands_inside_the_disk() {
        for grid in [GridKind::Pentagrid, GridKind::Heptagrid] {
            let ball = build_ball(grid, 4).unwrap();
            let l = layout(&ball).unwrap();
            assert_eq!(l.tile_count(), ball.tile_count());
            for t in ball.tiles() {
                for &v in l.polygon(t) {
                    assert!(norm(v) < 1.0, "{grid}: vertex of {t} escaped the disk");
                }
            }
        }
    }

    #[test]
    fn glued_edges_share_their_endpoints() {
        for grid in [GridKind::Pentagrid, GridKind::Heptagrid] {
            let ball = build_ball(grid, 4).unwrap();
            let l = layout(&ball).unwrap();
            let p = ball.p() as usize;
            for t in ball.tiles() {
                for e in 0..p as u8 {
                    let Some(f) = ball.neighbor(t, e) else { continue };
                    let mine = [
                        l.polygon(t)[(e as usize + p - 1) % p],
                        l.polygon(t)[e as usize],
                    ];
                    let theirs = [
                        l.polygon(f.tile)[(f.edge as usize + p - 1) % p],
                        l.polygon(f.tile)[f.edge as usize],
                    ];
                    // the shared edge appears with opposite orientation
                    assert!(
                        close(mine[0], theirs[1], 1e-9) && close(mine[1], theirs[0], 1e-9),
                        "{grid}: edge ({t},{e}) does not match ({},{})",
                        f.tile,
                        f.edge
                    );
                }
            }
        }
    }

    #[test]
    fn interior_vertices_close_up_to_a_full_turn() {
        for grid in [GridKind::Pentagrid, GridKind::Heptagrid] {
            let ball = build_ball(grid, 3).unwrap();
            let l = layout(&ball).unwrap();
            let sums = closed_vertex_angle_sums(&ball, &l);
            assert!(!sums.is_empty(), "{grid}: no closed vertex found");
            for total in sums {
                assert!(
                    (total - 2.0 * std::f64::consts::PI).abs() < 1e-6,
                    "{grid}: angles around a closed vertex sum to {total}"
                );
            }
        }
    }

    #[test]
    fn layout_refuses_depths_past_the_cap() {
        let ball = build_ball(GridKind::Pentagrid, 9).unwrap();
        assert!(matches!(
            layout(&ball),
            Err(RenderError::RadiusTooLarge { radius: 9, cap: 8 })
        ));
    }

    #[test]
    fn palettes_roundtrip_and_validate() {
        let p = Palette::default_structure();
        assert_eq!(p.color("Bb"), "#00008b");
        assert_eq!(p.color("Bw"), "#87cefa");
        assert_eq!(p.color("Wwm"), "#ffff00");
        assert_eq!(p.color("Wwr"), "#008000");
        assert_eq!(p.color("Wb"), "#ffa500");
        assert_eq!(p.color("unheard-of"), FALLBACK_COLOR);
        let text = p.to_text();
        assert_eq!(Palette::from_text(&text).unwrap(), p);
        assert!(Palette::from_text("Bb #00008b\n").is_err());
        assert!(Palette::from_text("Bb=blue\n").is_err());
        assert!(Palette::from_text("Bb=#00008b\nBb=#000000\n").is_err());
        let mut q = p.clone();
        q.set("Bb", "#AB12CD").unwrap();
        assert_eq!(q.color("Bb"), "#ab12cd");
        assert!(q.set("Bb", "#xyz").is_err());
    }

    #[test]
    fn svg_output_is_stable_and_complete() {
        let ball = build_ball(GridKind::Pentagrid, 3).unwrap();
        let l = layout(&ball).unwrap();
        let config = ground_truth_labeling(&ball).unwrap();
        let alphabet = structure_alphabet();
        let palette = Palette::default_structure();
        let svg = emit_svg(&ball, &l, &config, &alphabet, &palette).unwrap();
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<path ").count(), ball.tile_count());
        assert!(svg.contains("#00008b") || svg.contains("#87cefa"));
        let again = emit_svg(&ball, &l, &config, &alphabet, &palette).unwrap();
        assert_eq!(svg, again);
    }
}
