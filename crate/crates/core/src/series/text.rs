//! Text form of polynomials: `3*y1^2*y2 - 1/2*y3 + 7`.
//! Factors may be separated by `*` or whitespace; any lowercase prefix names a variable.

use num_traits::One;

use super::{Coefficient, Monomial, Poly};
use crate::error::{Error, Result};
use crate::num::{parse_q, Q};

pub fn parse_poly(src: &str, nvars: usize) -> Result<Poly> {
    let err = |msg: &str, at: usize| Error::Parse(format!("{msg} at byte {at} in {src:?}"));
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Poly::zero(nvars);
    let skip_ws = |i: &mut usize| {
        while *i < b.len() && b[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    skip_ws(&mut i);
    if i == b.len() {
        return Err(err("empty polynomial", i));
    }
    if src.trim() == "0" {
        return Ok(out);
    }
    let mut first = true;
    while i < b.len() {
        skip_ws(&mut i);
        let mut sign = <Q as One>::one();
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            if b[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        } else if !first {
            return Err(err("expected + or -", i));
        }
        first = false;
        let mut coef = sign;
        let mut exps = vec![0u32; nvars];
        let mut factors = 0;
        loop {
            skip_ws(&mut i);
            if i >= b.len() || b[i] == b'+' || b[i] == b'-' {
                break;
            }
            if b[i] == b'*' {
                if factors == 0 {
                    return Err(err("dangling *", i));
                }
                i += 1;
                continue;
            }
            if b[i].is_ascii_digit() {
                let start = i;
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'/') {
                    i += 1;
                }
                coef *= parse_q(&src[start..i])?;
            } else if b[i].is_ascii_lowercase() {
                while i < b.len() && b[i].is_ascii_lowercase() {
                    i += 1;
                }
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let idx: usize = src[start..i]
                    .parse()
                    .map_err(|_| err("variable needs an index", start))?;
                if idx == 0 || idx > nvars {
                    return Err(err(
                        &format!("variable index {idx} outside 1..={nvars}"),
                        start,
                    ));
                }
                let mut e = 1u32;
                skip_ws(&mut i);
                if i < b.len() && b[i] == b'^' {
                    i += 1;
                    skip_ws(&mut i);
                    let s = i;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                    e = src[s..i].parse().map_err(|_| err("bad exponent", s))?;
                }
                exps[idx - 1] = exps[idx - 1]
                    .checked_add(e)
                    .ok_or(Error::ExponentOverflow)?;
            } else {
                return Err(err("unexpected character", i));
            }
            factors += 1;
        }
        if factors == 0 {
            return Err(err("empty term", i));
        }
        out.add_term(Monomial(exps), coef);
    }
    Ok(out)
}

fn format_monomial(m: &Monomial) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("y{}", i + 1)
            } else {
                format!("y{}^{}", i + 1, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Highest degree first, then lexicographically larger exponents first.
pub(crate) fn format_poly<K: Coefficient>(p: &Poly<K>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
    let mut s = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let cs = c.to_string();
        let (neg, mag) = match cs.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, cs),
        };
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mono = format_monomial(m);
        if mono.is_empty() {
            s.push_str(&mag);
        } else if mag == "1" {
            s.push_str(&mono);
        } else {
            s.push_str(&format!("{mag}*{mono}"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qf};

    #[test]
    fn parse_forms() {
        let p = parse_poly("3*y1^2*y2 - 1/2 y3 + 7", 3).unwrap();
        assert_eq!(p.coeff(&Monomial(vec![2, 1, 0])), q(3));
        assert_eq!(p.coeff(&Monomial(vec![0, 0, 1])), qf(-1, 2));
        assert_eq!(p.constant_term(), q(7));
        assert_eq!(parse_poly("c * y1^2 y2", 2).is_err(), true);
        assert_eq!(parse_poly("2 * y1^2 y2", 2).unwrap().len(), 1);
        assert!(parse_poly("y4", 3).is_err());
        assert!(parse_poly("y1 +", 3).is_err());
        assert!(parse_poly("0", 2).unwrap().is_zero());
        assert!(parse_poly("y1 - y1", 2).unwrap().is_zero());
    }

    #[test]
    fn format_round_trip() {
        for s in ["y1^2*y2 - 1/2*y3 + 7", "-y1", "3", "y1*y2 + y2^2"] {
            let p = parse_poly(s, 3).unwrap();
            assert_eq!(parse_poly(&p.to_string(), 3).unwrap(), p);
        }
        assert_eq!(
            parse_poly("y2 + 2*y1^2 - 1", 2).unwrap().to_string(),
            "2*y1^2 + y2 - 1"
        );
    }
}
