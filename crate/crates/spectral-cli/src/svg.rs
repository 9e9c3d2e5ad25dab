//! Self-contained SVG scatter rendering for 1-D and 2-D point sets.

use ndarray::ArrayView2;

use spectral::Error;

use crate::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Colorblind-safe point palette; label u gets color u mod 8.
const PALETTE: [&str; 8] = [
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb", "#222222",
];

/// Renders the columns of `coords` as an SVG scatter plot.
///
/// One coordinate row plots along a horizontal axis line, two rows plot
/// as x and y. Labels, when given, pick point colors from a fixed
/// palette. More than two rows cannot be drawn and fail with the
/// dedicated plot-dimension error.
pub fn scatter_svg(coords: ArrayView2<f64>, labels: Option<&[usize]>) -> Result<String, CliError> {
    let m = coords.nrows();
    let n = coords.ncols();
    if n == 0 {
        return Err(Error::ShapeError("cannot plot an empty point set".into()).into());
    }
    if m == 0 || m > 2 {
        return Err(CliError::PlotDimension(m));
    }
    if let Some(ls) = labels {
        if ls.len() != n {
            return Err(Error::ShapeError(format!(
                "{} labels for {} points",
                ls.len(),
                n
            ))
            .into());
        }
    }
    let xs: Vec<f64> = coords.row(0).iter().copied().collect();
    let ys: Vec<f64> = if m == 2 {
        coords.row(1).iter().copied().collect()
    } else {
        vec![0.0; n]
    };
    let (x_lo, x_hi) = span(&xs);
    let (y_lo, y_hi) = span(&ys);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if m == 1 {
        let mid = HEIGHT / 2.0;
        out.push_str(&format!(
            "  <line x1=\"{MARGIN}\" y1=\"{mid}\" x2=\"{:.2}\" y2=\"{mid}\" stroke=\"#999999\"/>\n",
            WIDTH - MARGIN
        ));
    }
    for i in 0..n {
        let px = project(xs[i], x_lo, x_hi, MARGIN, WIDTH - MARGIN);
        let py = if m == 1 {
            HEIGHT / 2.0
        } else {
            // SVG y grows downward, so the output range is inverted.
            project(ys[i], y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        };
        let color = match labels {
            Some(ls) => PALETTE[ls[i] % PALETTE.len()],
            None => PALETTE[0],
        };
        out.push_str(&format!(
            "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{color}\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Plot range of one coordinate; a degenerate span widens to a unit
/// window so the points land centered instead of dividing by zero.
fn span(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi - lo > 0.0 {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn project(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
}
