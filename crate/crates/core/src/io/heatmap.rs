//! Binary PPM (P6) heatmaps.
//!
//! One pixel per cell, row 0 at the top. Finite values map linearly from
//! `[min, max]` onto a 256-entry lookup table interpolated between the
//! anchors in [`ANCHORS`]. A constant matrix uses entry 0. Non-finite cells
//! are drawn in [`NAN_COLOR`].

use std::path::Path;

/// Dark purple through red and orange to pale yellow.
pub const ANCHORS: [[u8; 3]; 5] = [
    [0, 0, 4],
    [87, 16, 110],
    [188, 55, 84],
    [249, 142, 9],
    [252, 255, 164],
];

pub const NAN_COLOR: [u8; 3] = [0, 255, 0];

/// The 256-entry colormap.
pub fn colormap() -> Vec<[u8; 3]> {
    let segments = ANCHORS.len() - 1;
    (0..256usize)
        .map(|k| {
            // Position in units of 1/255 along the anchor polyline.
            let scaled = k * segments;
            let seg = (scaled / 255).min(segments - 1);
            let num = scaled - seg * 255;
            let (a, b) = (ANCHORS[seg], ANCHORS[seg + 1]);
            let mut rgb = [0u8; 3];
            for c in 0..3 {
                let (x, y) = (a[c] as i64, b[c] as i64);
                rgb[c] = (x + ((y - x) * num as i64 + 127) / 255) as u8;
            }
            rgb
        })
        .collect()
}

/// Encodes `matrix` (rows of equal length) as P6 bytes.
pub fn render_heatmap(matrix: &[Vec<f64>]) -> Vec<u8> {
    let height = matrix.len();
    let width = matrix.first().map_or(0, Vec::len);
    assert!(matrix.iter().all(|r| r.len() == width), "ragged matrix");
    let finite = matrix.iter().flatten().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    let lut = colormap();
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(width * height * 3);
    for row in matrix {
        for &v in row {
            let rgb = if !v.is_finite() {
                NAN_COLOR
            } else if hi > lo {
                let idx = ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) as usize;
                lut[idx]
            } else {
                lut[0]
            };
            out.extend_from_slice(&rgb);
        }
    }
    out
}

pub fn write_heatmap(matrix: &[Vec<f64>], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_heatmap(matrix))
}
