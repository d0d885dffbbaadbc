//! Parsing of ε values: `1/8`, `2^-4`, `0.125`, lists `1/8,1/16` and
//! power-of-two ranges `2^-4..2^-14`.

fn parse_power(s: &str) -> Option<(f64, i32)> {
    let (base, exp) = s.split_once('^')?;
    let base: f64 = base.trim().parse().ok()?;
    let exp: i32 = exp.trim().parse().ok()?;
    Some((base, exp))
}

pub fn parse_value(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = if let Some((b, e)) = parse_power(s) {
        b.powi(e)
    } else if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        n / d
    } else {
        s.parse().map_err(|_| format!("cannot parse {s:?} as a number"))?
    };
    if !v.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(v)
}

/// Comma-separated values and `b^i..b^j` ranges, in the order given.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if let Some((lo, hi)) = item.split_once("..") {
            let (b0, e0) = parse_power(lo).ok_or_else(|| format!("range ends must be powers, got {lo:?}"))?;
            let (b1, e1) = parse_power(hi).ok_or_else(|| format!("range ends must be powers, got {hi:?}"))?;
            if b0 != b1 {
                return Err(format!("range {item:?} mixes bases"));
            }
            let step = if e1 >= e0 { 1 } else { -1 };
            let mut e = e0;
            loop {
                out.push(b0.powi(e));
                if e == e1 {
                    break;
                }
                e += step;
            }
        } else {
            out.push(parse_value(item)?);
        }
    }
    if out.is_empty() {
        return Err("empty ε list".into());
    }
    Ok(out)
}

pub fn parse_single(s: &str) -> Result<f64, String> {
    match parse_list(s)?.as_slice() {
        [v] => Ok(*v),
        _ => Err(format!("expected a single value, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_value("1/8").unwrap(), 0.125);
        assert_eq!(parse_value("2^-4").unwrap(), 0.0625);
        assert_eq!(parse_value("0.5").unwrap(), 0.5);
        assert_eq!(parse_value("1e-3").unwrap(), 1e-3);
        assert!(parse_value("x").is_err());
        assert!(parse_value("1/0").is_err());
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1/8, 1/16").unwrap(), vec![0.125, 0.0625]);
        let r = parse_list("2^-4..2^-14").unwrap();
        assert_eq!(r.len(), 11);
        assert_eq!(r[0], 2f64.powi(-4));
        assert_eq!(r[10], 2f64.powi(-14));
        assert!(parse_list("1/8..2^-3").is_err());
        assert!(parse_list("").is_err());
        assert!(parse_single("1/8,1/16").is_err());
    }
}
