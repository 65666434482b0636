use super::SymmetricPoint;
use crate::error::{Error, Result};

/// Recovers x (ascending) from t = e(x), requiring real roots.
pub fn roots_from_symmetric(t: &SymmetricPoint) -> Result<Vec<f64>> {
    let tt = &t.t;
    let mut x = match tt.len() {
        1 => vec![tt[0]],
        2 => {
            let disc = tt[0] * tt[0] - 4.0 * tt[1];
            let tiny = 1e-14 * tt[0] * tt[0];
            if disc < -tiny {
                return Err(Error::Domain(format!(
                    "t = {tt:?} is not the image of a real point"
                )));
            }
            let s = disc.max(0.0).sqrt();
            let big = 0.5 * (tt[0] + tt[0].signum() * s);
            if big == 0.0 {
                vec![0.0, 0.0]
            } else {
                vec![tt[1] / big, big]
            }
        }
        3 => cubic(tt[0], tt[1], tt[2])?,
        r => return Err(Error::Usage(format!("rank must be 1..3, got {r}"))),
    };
    x.sort_by(|a, b| a.total_cmp(b));
    Ok(x)
}

fn cubic(a: f64, b: f64, c: f64) -> Result<Vec<f64>> {
    // lambda^3 - a lambda^2 + b lambda - c with lambda = y + a/3.
    let p = b - a * a / 3.0;
    let q = -2.0 * a * a * a / 27.0 + a * b / 3.0 - c;
    let scale = a.abs().max(b.abs().sqrt()).max(c.abs().cbrt()).max(1e-300);
    let mut roots = if p.abs() <= 1e-15 * scale * scale {
        let y = (-q).cbrt();
        vec![y, y, y]
    } else {
        if p > 0.0 {
            return Err(Error::Domain("symmetric point has complex roots".into()));
        }
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = 3.0 * q / (p * m);
        if arg.abs() > 1.0 + 1e-10 {
            return Err(Error::Domain("symmetric point has complex roots".into()));
        }
        let theta = arg.clamp(-1.0, 1.0).acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };
    for y in roots.iter_mut() {
        let mut l = *y + a / 3.0;
        for _ in 0..3 {
            let f = ((l - a) * l + b) * l - c;
            let df = (3.0 * l - 2.0 * a) * l + b;
            if df.abs() > 1e-300 {
                let step = f / df;
                if step.is_finite() && step.abs() < 1e-3 * scale {
                    l -= step;
                }
            }
        }
        *y = l;
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::elem_sym;

    #[test]
    fn round_trips() {
        for x in [
            vec![1.0, 1.3, 1.7],
            vec![0.01, 2.0, 50.0],
            vec![0.5, 0.5, 3.0],
            vec![2.0, 2.0, 2.0],
        ] {
            let r = roots_from_symmetric(&elem_sym(&x)).unwrap();
            for (a, b) in r.iter().zip(&x) {
                assert!((a - b).abs() < 1e-7 * b.abs().max(1.0), "{r:?} {x:?}");
            }
        }
        let r = roots_from_symmetric(&elem_sym(&[0.4, 0.9])).unwrap();
        assert!((r[0] - 0.4).abs() < 1e-15 && (r[1] - 0.9).abs() < 1e-15);
        assert!(roots_from_symmetric(&SymmetricPoint { t: vec![1.0, 1.0] }).is_err());
        assert!(roots_from_symmetric(&SymmetricPoint {
            t: vec![0.0, 1.0, 0.0]
        })
        .is_err());
    }
}
