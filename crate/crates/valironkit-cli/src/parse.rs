//! Flag-value parsing: complex literals and seed grids.

use num_complex::Complex64;

/// Parses complex literals like `1.5+2i`, `-0.5-1i`, `2i`, `i`, `-i`, `3`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if !t.ends_with('i') {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|e| format!("bad real literal '{t}': {e}"));
    }
    let body = &t[..t.len() - 1];
    // Split at the last +/- that is not an exponent sign and not leading.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let re: f64 = body[..k]
                .parse()
                .map_err(|e| format!("bad real part in '{t}': {e}"))?;
            let im_str = &body[k..];
            let im: f64 = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_str
                    .parse()
                    .map_err(|e| format!("bad imaginary part in '{t}': {e}"))?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" => 1.0,
                "-" => -1.0,
                _ => body
                    .parse()
                    .map_err(|e| format!("bad imaginary literal '{t}': {e}"))?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

/// A rectangular grid of base points: `a,b,nx,ny` with complex corners.
#[derive(Debug, Clone, Copy)]
pub struct SeedGrid {
    pub a: Complex64,
    pub b: Complex64,
    pub nx: usize,
    pub ny: usize,
}

impl SeedGrid {
    pub fn parse(s: &str) -> Result<SeedGrid, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(format!("seed grid must be 'a,b,nx,ny', got '{s}'"));
        }
        let a = complex(parts[0])?;
        let b = complex(parts[1])?;
        let nx: usize = parts[2].parse().map_err(|e| format!("bad nx: {e}"))?;
        let ny: usize = parts[3].parse().map_err(|e| format!("bad ny: {e}"))?;
        if nx < 1 || ny < 1 {
            return Err("grid counts must be at least 1".into());
        }
        Ok(SeedGrid { a, b, nx, ny })
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let tx = if self.nx == 1 {
                    0.0
                } else {
                    i as f64 / (self.nx - 1) as f64
                };
                let ty = if self.ny == 1 {
                    0.0
                } else {
                    j as f64 / (self.ny - 1) as f64
                };
                out.push(Complex64::new(
                    self.a.re + tx * (self.b.re - self.a.re),
                    self.a.im + ty * (self.b.im - self.a.im),
                ));
            }
        }
        out
    }
}

/// Comma-separated list of positive reals (Heins parameters).
pub fn real_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad real '{p}': {e}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(complex("1.5+2i").unwrap(), Complex64::new(1.5, 2.0));
        assert_eq!(complex("-0.5-1i").unwrap(), Complex64::new(-0.5, -1.0));
        assert_eq!(complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(complex("1e-3+2e2i").unwrap(), Complex64::new(1e-3, 200.0));
        assert!(complex("nope").is_err());
    }

    #[test]
    fn seed_grids() {
        let g = SeedGrid::parse("-1+0.5i,1+2.5i,3,2").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], Complex64::new(-1.0, 0.5));
        assert_eq!(pts[5], Complex64::new(1.0, 2.5));
        assert!(SeedGrid::parse("1,2,3").is_err());
    }
}
