use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;

pub(crate) struct Row {
    pub lambda: Complex64,
    pub coords: Vec<f64>,
    pub value: Complex64,
}

/// 17 significant digits, enough for a lossless round trip.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header `lambda_re,lambda_im,<coords>,value_re,value_im`, LF line endings.
pub(crate) fn write_csv<W: Write>(w: &mut W, dim: usize, rows: &[Row], with_coords: bool, with_lambda: bool) -> Result<()> {
    let mut header: Vec<String> = Vec::new();
    if with_lambda {
        header.extend(["lambda_re".into(), "lambda_im".into()]);
    }
    if with_coords {
        header.extend((0..dim).map(|i| format!("x{i}")));
    }
    header.extend(["value_re".into(), "value_im".into()]);
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        let mut cells: Vec<String> = Vec::with_capacity(header.len());
        if with_lambda {
            cells.extend([num(r.lambda.re), num(r.lambda.im)]);
        }
        if with_coords {
            cells.extend(r.coords.iter().map(|c| num(*c)));
        }
        cells.extend([num(r.value.re), num(r.value.im)]);
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_doubles() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn header_and_line_endings() {
        let rows = [Row { lambda: Complex64::new(1.0, 0.0), coords: vec![0.5, -0.25], value: Complex64::new(2.0, -1.0) }];
        let mut buf = Vec::new();
        write_csv(&mut buf, 2, &rows, true, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lambda_re,lambda_im,x0,x1,value_re,value_im\n"));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 6);
    }
}
