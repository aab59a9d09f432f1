//! Grayscale depth maps rendered as standalone SVG.
//!
//! The view is the bounding square of the points, grown by a margin
//! fraction per side. Cells are shaded by depth at their centers — darker
//! is deeper (lower depth) — with the input points and, when it exists, the
//! exact median drawn on top. All numbers are written with fixed precision,
//! so the same input always produces byte-identical output.

use std::fmt::Write as _;

use hdepth::{bounding_square, median_exact, HyperplaneFamily, PointSet, Result};

pub struct Heatmap {
    pub svg: String,
    pub depth_min: f64,
    pub depth_max: f64,
}

const VIEW_PX: f64 = 512.0;

pub fn render(ps: &PointSet, resolution: u32, margin: f64) -> Result<Heatmap> {
    let family = HyperplaneFamily::enumerate(ps);
    let (center, side) = bounding_square(ps)?;
    let side = if side == 0.0 { 1.0 } else { side };
    let view = side * (1.0 + 2.0 * margin);
    let x0 = center[0] - view / 2.0;
    let y0 = center[1] - view / 2.0;
    let res = resolution as usize;

    let mut depths = vec![0.0f64; res * res];
    let mut depth_min = f64::INFINITY;
    let mut depth_max = f64::NEG_INFINITY;
    for row in 0..res {
        for col in 0..res {
            let wx = x0 + view * (col as f64 + 0.5) / res as f64;
            // SVG rows grow downward, world y grows upward.
            let wy = y0 + view * (res as f64 - row as f64 - 0.5) / res as f64;
            let d = family.depth(&nalgebra::DVector::from_vec(vec![wx, wy]));
            depths[row * res + col] = d;
            depth_min = depth_min.min(d);
            depth_max = depth_max.max(d);
        }
    }
    let span = depth_max - depth_min;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW_PX}" height="{VIEW_PX}" viewBox="0 0 {VIEW_PX} {VIEW_PX}">"#
    );
    let cell = VIEW_PX / res as f64;
    for row in 0..res {
        for col in 0..res {
            let d = depths[row * res + col];
            let t = if span > 0.0 { (d - depth_min) / span } else { 0.5 };
            let v = (t * 255.0).round() as u8;
            let _ = writeln!(
                svg,
                r#"<rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="rgb({v},{v},{v})"/>"#,
                col as f64 * cell,
                row as f64 * cell,
                cell,
                cell
            );
        }
    }

    let to_px = |wx: f64, wy: f64| {
        (
            (wx - x0) / view * VIEW_PX,
            VIEW_PX - (wy - y0) / view * VIEW_PX,
        )
    };
    for i in 0..ps.len() {
        let p = ps.point(i);
        let (px, py) = to_px(p[0], p[1]);
        let _ = writeln!(
            svg,
            r##"<circle cx="{px:.6}" cy="{py:.6}" r="4" fill="#2e86de" stroke="#ffffff" stroke-width="1.5"/>"##
        );
    }
    if let Ok(med) = median_exact(ps) {
        let (px, py) = to_px(med.point[0], med.point[1]);
        let _ = writeln!(
            svg,
            r##"<circle cx="{px:.6}" cy="{py:.6}" r="7" fill="none" stroke="#e74c3c" stroke-width="2"/>"##
        );
        let _ = writeln!(
            svg,
            r##"<circle cx="{px:.6}" cy="{py:.6}" r="1.5" fill="#e74c3c"/>"##
        );
    }
    svg.push_str("</svg>\n");

    Ok(Heatmap {
        svg,
        depth_min,
        depth_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> PointSet {
        PointSet::new(2, vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 1.0]]).unwrap()
    }

    #[test]
    fn render_is_deterministic_and_well_formed() {
        let a = render(&triangle(), 16, 0.25).unwrap();
        let b = render(&triangle(), 16, 0.25).unwrap();
        assert_eq!(a.svg, b.svg);
        assert!(a.svg.starts_with("<svg"));
        assert!(a.svg.trim_end().ends_with("</svg>"));
        assert_eq!(a.svg.matches("<rect").count(), 16 * 16);
        // Three points and the two-part median marker.
        assert_eq!(a.svg.matches("<circle").count(), 5);
        assert!(a.depth_min < a.depth_max);
    }

    #[test]
    fn deepest_cell_is_darkest() {
        let hm = render(&triangle(), 16, 0.25).unwrap();
        assert!(hm.svg.contains("rgb(0,0,0)"));
        assert!(hm.svg.contains("rgb(255,255,255)"));
    }
}
