//! Static SVG rendering of the planar non-uniqueness pair: the two body
//! boundaries inside the truncation window, plus the cone edges.

use pcmk_core::pseudocone::TruncatedBody;
use pcmk_core::vecmath as vm;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 40.0;

/// Orders the vertices of a planar convex polytope counter-clockwise.
fn ordered_loop(body: &TruncatedBody) -> Vec<Vec<f64>> {
    let mut pts = body.polytope.vertices.clone();
    if pts.len() < 3 {
        return pts;
    }
    let k = pts.len() as f64;
    let c: Vec<f64> = pts
        .iter()
        .fold(vec![0.0, 0.0], |acc, p| vec![acc[0] + p[0] / k, acc[1] + p[1] / k]);
    pts.sort_by(|a, b| {
        let aa = (a[1] - c[1]).atan2(a[0] - c[0]);
        let ab = (b[1] - c[1]).atan2(b[0] - c[0]);
        aa.total_cmp(&ab)
    });
    pts
}

/// Renders the two truncated bodies as closed polylines in a fixed
/// viewport mapped to their joint bounding box.
pub fn render_pair(k: &TruncatedBody, l: &TruncatedBody, cone_rays: &[Vec<f64>]) -> String {
    let loops = [ordered_loop(k), ordered_loop(l)];
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    for p in loops.iter().flatten().chain(std::iter::once(&vec![0.0, 0.0])) {
        for d in 0..2 {
            min[d] = min[d].min(p[d]);
            max[d] = max[d].max(p[d]);
        }
    }
    let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let map = |p: &[f64]| -> (f64, f64) {
        (
            MARGIN + (p[0] - min[0]) * scale,
            HEIGHT - MARGIN - (p[1] - min[1]) * scale,
        )
    };
    let path_of = |pts: &[Vec<f64>]| -> String {
        pts.iter()
            .chain(pts.first())
            .map(|p| {
                let (x, y) = map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Cone edges from the origin.
    let reach = 1.2 * span;
    for r in cone_rays {
        let end = vm::scale(r, reach);
        let (x0, y0) = map(&[0.0, 0.0]);
        let (x1, y1) = map(&end);
        svg.push_str(&format!(
            "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y1:.2}\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n"
        ));
    }
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2.5\"/>\n",
        path_of(&loops[0])
    ));
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2.5\" stroke-dasharray=\"9 5\"/>\n",
        path_of(&loops[1])
    ));
    svg.push_str(
        "<text x=\"48\" y=\"46\" font-family=\"monospace\" font-size=\"15\" fill=\"#1f77b4\">K = C(t0) + C</text>\n",
    );
    svg.push_str(
        "<text x=\"48\" y=\"66\" font-family=\"monospace\" font-size=\"15\" fill=\"#d62728\">L = F + C</text>\n",
    );
    svg.push_str("</svg>\n");
    svg
}
