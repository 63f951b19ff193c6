use super::{Dendrogram, NodeRef};
use crate::svg::{num, SvgDocument};

const ROW: f64 = 18.0;
const LABEL_WIDTH: f64 = 140.0;
const PLOT_WIDTH: f64 = 500.0;
const MARGIN: f64 = 12.0;

/// Horizontal dendrogram: leaves on the left, root on the right, x scaled by
/// merge height.
pub fn render_dendrogram_svg(dendro: &Dendrogram) -> Vec<u8> {
    let n = dendro.leaves.len();
    let width = LABEL_WIDTH + PLOT_WIDTH + 2.0 * MARGIN;
    let height = n as f64 * ROW + 2.0 * MARGIN;
    let mut doc = SvgDocument::new(width, height);
    doc.rect(0.0, 0.0, width, height, "#ffffff");

    let max_height = dendro.merges.iter().map(|m| m.height).fold(0.0f64, f64::max);
    let x_of = |h: f64| {
        let frac = if max_height > 0.0 { h / max_height } else { 0.0 };
        MARGIN + LABEL_WIDTH + frac * PLOT_WIDTH
    };

    let mut leaf_y = vec![0.0; n];
    for (row, leaf) in dendro.leaf_order().into_iter().enumerate() {
        leaf_y[leaf] = MARGIN + (row as f64 + 0.5) * ROW;
        doc.element(
            "text",
            &[
                ("x", num(MARGIN + LABEL_WIDTH - 6.0)),
                ("y", num(leaf_y[leaf])),
                ("font-family", "sans-serif".into()),
                ("font-size", num(12.0)),
                ("text-anchor", "end".into()),
                ("dominant-baseline", "central".into()),
            ],
            Some(&dendro.leaves[leaf]),
        );
    }

    let mut merge_y = Vec::with_capacity(dendro.merges.len());
    for merge in &dendro.merges {
        let y_of = |node: NodeRef, merge_y: &[f64]| match node {
            NodeRef::Leaf(i) => leaf_y[i],
            NodeRef::Merge(m) => merge_y[m],
        };
        let (yl, yr) = (y_of(merge.left, &merge_y), y_of(merge.right, &merge_y));
        let x = x_of(merge.height);
        doc.line(x_of(dendro.height(merge.left)), yl, x, yl, "#333333");
        doc.line(x_of(dendro.height(merge.right)), yr, x, yr, "#333333");
        doc.line(x, yl, x, yr, "#333333");
        merge_y.push((yl + yr) / 2.0);
    }
    doc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{agglomerate, DistanceMatrix, Linkage};

    #[test]
    fn one_label_and_three_lines_per_merge() {
        let dist = DistanceMatrix::from_condensed(vec!["a".into(), "b".into(), "c".into()], &[1.0, 4.0, 3.0]).unwrap();
        let d = agglomerate(&dist, Linkage::Average).unwrap();
        let svg = String::from_utf8(render_dendrogram_svg(&d)).unwrap();
        assert_eq!(svg.matches("<text").count(), 3);
        assert_eq!(svg.matches("<line").count(), 6);
        assert_eq!(svg, String::from_utf8(render_dendrogram_svg(&d)).unwrap());
    }
}
