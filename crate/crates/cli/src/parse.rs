//! Parsers for the compact argument syntax used on the command line.

use num_complex::Complex64;
use siegel_maass::exact_terms::{make_phi, make_phi_tilde, make_psi, make_psi_tilde, WeightedFunction};
use siegel_maass::gk_support::{KType, Sl2Kind, Wall, WallDirection};
use siegel_maass::siegel_kernel::{SiegelPoint, SymMat2};

fn numbers<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, String> {
    let v: Vec<T> = s
        .split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| format!("bad number {x:?} in {what}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("{what} needs {n} comma-separated values, got {}", v.len()));
    }
    Ok(v)
}

/// `m11,m12,m22`.
pub fn sym(s: &str) -> Result<SymMat2, String> {
    let v = numbers::<f64>(s, 3, "symmetric matrix")?;
    Ok(SymMat2::new(v[0], v[1], v[2]))
}

/// `x11,x12,x22,y11,y12,y22`.
pub fn point(s: &str) -> Result<SiegelPoint, String> {
    let v = numbers::<f64>(s, 6, "Siegel point")?;
    SiegelPoint::from_coords(&[v[0], v[1], v[2], v[3], v[4], v[5]]).map_err(|e| e.to_string())
}

/// `x,y`.
pub fn tau(s: &str) -> Result<Complex64, String> {
    let v = numbers::<f64>(s, 2, "tau")?;
    Ok(Complex64::new(v[0], v[1]))
}

/// `a,b`.
pub fn ktype(s: &str) -> Result<KType, String> {
    let v = numbers::<i64>(s, 2, "K-type")?;
    KType::new(v[0], v[1]).map_err(|e| e.to_string())
}

/// `right:3`, `left:-1`, `up:2`, `down:0`.
pub fn wall(s: &str) -> Result<Wall, String> {
    let (d, t) = s.split_once(':').ok_or_else(|| format!("wall {s:?} is not direction:threshold"))?;
    let dir = match d {
        "right" => WallDirection::Right,
        "left" => WallDirection::Left,
        "up" => WallDirection::Up,
        "down" => WallDirection::Down,
        _ => return Err(format!("unknown wall direction {d:?}")),
    };
    let t = t.parse().map_err(|_| format!("bad wall threshold {t:?}"))?;
    Ok(Wall::new(dir, t))
}

/// `phi:k:d:n`, `psi:k:n`, `phi_tilde:k:n` or `psi_tilde:k:n`.
pub fn term(s: &str) -> Result<WeightedFunction, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let ints = |xs: &[&str]| -> Result<Vec<i64>, String> {
        xs.iter()
            .map(|x| x.parse::<i64>().map_err(|_| format!("bad integer {x:?} in term {s:?}")))
            .collect()
    };
    let r = match (parts[0], parts.len()) {
        ("phi", 4) => {
            let v = ints(&parts[1..])?;
            make_phi(v[0], v[1], v[2])
        }
        ("psi", 3) => {
            let v = ints(&parts[1..])?;
            make_psi(v[0], v[1])
        }
        ("phi_tilde", 3) => {
            let v = ints(&parts[1..])?;
            make_phi_tilde(v[0], v[1])
        }
        ("psi_tilde", 3) => {
            let v = ints(&parts[1..])?;
            make_psi_tilde(v[0], v[1])
        }
        _ => return Err(format!("unknown term {s:?}; use phi:k:d:n, psi:k:n, phi_tilde:k:n or psi_tilde:k:n")),
    };
    r.map_err(|e| e.to_string())
}

/// `kind:k` or `kind:k:d` for an SL₂ support factor.
pub fn sl2_factor(s: &str) -> Result<(Sl2Kind, i64, i64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("support factor {s:?} is not kind:k[:d]"));
    }
    let kind: Sl2Kind = parts[0].parse().map_err(|e: siegel_maass::Error| e.to_string())?;
    let k = parts[1].parse().map_err(|_| format!("bad weight in {s:?}"))?;
    let d = match parts.get(2) {
        Some(d) => d.parse().map_err(|_| format!("bad depth in {s:?}"))?,
        None => 0,
    };
    Ok((kind, k, d))
}

/// `start:stop:step` (inclusive, with a little slack) or a comma list.
pub fn grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some((a, rest)) = s.split_once(':') {
        let (b, st) = rest.split_once(':').ok_or_else(|| format!("grid {s:?} is not start:stop:step"))?;
        let p = |x: &str| x.parse::<f64>().map_err(|_| format!("bad number {x:?} in grid"));
        let (a, b, st) = (p(a)?, p(b)?, p(st)?);
        if !(st > 0.0) || b < a {
            return Err(format!("grid {s:?} needs step > 0 and stop >= start"));
        }
        let n = ((b - a) / st + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + st * i as f64).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?} in grid")))
        .collect()
}

/// Comma list of integers.
pub fn ints(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad integer {x:?}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        assert_eq!(grid("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(grid("3,1.5").unwrap(), vec![3.0, 1.5]);
        assert!(grid("2:1:0.5").is_err());
    }

    #[test]
    fn term_forms() {
        assert_eq!(term("phi:10:2:1").unwrap().weight, 10);
        assert_eq!(term("psi_tilde:-2:-1").unwrap().weight, -2);
        assert!(term("phi:10:1").is_err());
    }

    #[test]
    fn wall_forms() {
        assert_eq!(wall("up:2").unwrap(), Wall::new(WallDirection::Up, 2));
        assert!(wall("sideways:2").is_err());
    }
}
