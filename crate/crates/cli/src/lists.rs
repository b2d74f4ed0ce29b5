//! Parsers for list-valued arguments.

/// Strictly increasing positive integers.
#[derive(Debug, Clone, PartialEq)]
pub struct NList(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid(pub Vec<f64>);

pub fn n_list(text: &str) -> Result<NList, String> {
    parse_n_list(text).map(NList)
}

pub fn real_grid(text: &str) -> Result<RealGrid, String> {
    parse_real_grid(text).map(RealGrid)
}

/// `"2..64"`, `"2..=64"` (both inclusive) or `"2,4,8"`, possibly mixed:
/// `"2,4,8..10"`.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.trim_start_matches('=');
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {part:?}"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {part:?}"))?;
            if b < a {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad integer {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    if out.windows(2).any(|p| p[1] <= p[0]) {
        return Err(format!("list must be strictly increasing: {text:?}"));
    }
    Ok(out)
}

/// `"0.1,0.2,0.5"` or `"lo:hi:count"` for `count` evenly spaced values.
pub fn parse_real_grid(text: &str) -> Result<Vec<f64>, String> {
    let fields: Vec<&str> = text.split(':').collect();
    if fields.len() == 3 {
        let lo: f64 = fields[0].trim().parse().map_err(|_| format!("bad grid start {:?}", fields[0]))?;
        let hi: f64 = fields[1].trim().parse().map_err(|_| format!("bad grid end {:?}", fields[1]))?;
        let count: usize = fields[2].trim().parse().map_err(|_| format!("bad grid count {:?}", fields[2]))?;
        if count < 2 || lo.is_nan() || hi.is_nan() || hi <= lo {
            return Err(format!("grid {text:?} needs lo < hi and count >= 2"));
        }
        let step = (hi - lo) / (count - 1) as f64;
        return Ok((0..count).map(|i| lo + step * i as f64).collect());
    }
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| format!("bad number {p:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(values)
}

/// `"lo,hi"`.
pub fn parse_pair(text: &str) -> Result<(f64, f64), String> {
    match parse_real_grid(text)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(format!("expected two numbers, got {text:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_n_list("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_n_list("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_n_list("2,4,8..9").unwrap(), vec![2, 4, 8, 9]);
        assert!(parse_n_list("4,2").is_err());
        assert!(parse_n_list("").is_err());
        assert!(parse_n_list("x").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_real_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_real_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert!(parse_real_grid("1:0:3").is_err());
        assert_eq!(parse_pair("0,20").unwrap(), (0.0, 20.0));
        assert!(parse_pair("1").is_err());
    }
}
