//! Minimal SVG rendering of polygon contours for visual inspection.

use crate::index::KPolygonIndex;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Render one polygon chain per index into a single SVG document, with the
/// coordinate axes drawn from the origin. When `draw_hulls` is set, each
/// convex hull is overlaid dashed.
pub fn render_contours(indexes: &[(usize, KPolygonIndex)], draw_hulls: bool) -> String {
    let extent = indexes
        .iter()
        .flat_map(|(_, idx)| idx.chain().into_iter().map(|v| v.point.x.max(v.point.y)))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let scale = (CANVAS - 2.0 * MARGIN) / extent;
    let px = |x: f64| MARGIN + x * scale;
    let py = |y: f64| CANVAS - MARGIN - y * scale;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">\n"
    ));
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\"/>\n",
        px(0.0),
        py(0.0),
        px(extent),
        py(0.0)
    ));
    out.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\"/>\n",
        px(0.0),
        py(0.0),
        px(0.0),
        py(extent)
    ));
    for (i, (k, idx)) in indexes.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = idx
            .chain()
            .iter()
            .map(|v| format!("{:.3},{:.3}", px(v.point.x), py(v.point.y)))
            .collect();
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
             data-k=\"{k}\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        if draw_hulls {
            let pts: Vec<String> = idx
                .hull
                .iter()
                .map(|v| format!("{:.3},{:.3}", px(v.point.x), py(v.point.y)))
                .collect();
            out.push_str(&format!(
                "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1\" \
                 stroke-dasharray=\"6,4\" data-k=\"{k}\" data-hull=\"true\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{dual_transform, DataTuple, TupleId};
    use crate::index::{build_polygon, sort_by_x_intercept};

    #[test]
    fn one_polyline_per_contour_plus_optional_hulls() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let lines: Vec<_> = (0..30)
            .map(|i| {
                let t = DataTuple::new(
                    TupleId(i),
                    0.05 + rng.random::<f64>(),
                    0.05 + rng.random::<f64>(),
                )
                .unwrap();
                dual_transform(&t, 0.5).unwrap()
            })
            .collect();
        let sorted = sort_by_x_intercept(lines).unwrap();
        let indexes: Vec<(usize, KPolygonIndex)> = (1..=4)
            .map(|k| (k, build_polygon(&sorted, k, 0.5).unwrap()))
            .collect();

        let plain = render_contours(&indexes, false);
        assert_eq!(plain.matches("<polyline").count(), 4);

        let with_hulls = render_contours(&indexes, true);
        assert_eq!(with_hulls.matches("<polyline").count(), 8);
        assert_eq!(with_hulls.matches("data-hull=\"true\"").count(), 4);
    }
}
