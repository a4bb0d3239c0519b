//! Wire helpers: complex numbers travel as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::blaschke::{ExtendedScalar, InnerFunction};
use crate::error::Error;
use crate::linalg::CMatrix;
use crate::modelspace::RationalSymbol;

pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn pairs(v: &[Complex64]) -> Vec<Pair> {
    v.iter().copied().map(to_pair).collect()
}

pub fn unpairs(v: &[Pair]) -> Vec<Complex64> {
    v.iter().copied().map(from_pair).collect()
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    m.to_rows().iter().map(|r| pairs(r)).collect()
}

pub fn matrix_from_rows(rows: &[Vec<Pair>]) -> Result<CMatrix, String> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix rows".into());
    }
    Ok(CMatrix::from_rows(&rows.iter().map(|r| unpairs(r)).collect::<Vec<_>>()))
}

pub mod pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        to_pair(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        Ok(from_pair(Pair::deserialize(d)?))
    }
}

pub mod pair_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        pairs(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(unpairs(&Vec::<Pair>::deserialize(d)?))
    }
}

fn input(e: impl std::fmt::Display) -> Error {
    Error::Input(e.to_string())
}

/// `re`, `re,im` or a JSON pair.
pub fn parse_complex(text: &str) -> Result<Complex64, Error> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str::<Pair>(t).map(from_pair).map_err(input);
    }
    let mut parts = t.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next().ok_or_else(|| input("empty number"))?.map_err(|e| input(format!("{t:?}: {e}")))?;
    let im = parts.next().transpose().map_err(|e| input(format!("{t:?}: {e}")))?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err(input(format!("{t:?}: expected re,im")));
    }
    Ok(Complex64::new(re, im))
}

/// A complex number, or `inf` for the point at infinity.
pub fn parse_extended(text: &str) -> Result<ExtendedScalar, Error> {
    let t = text.trim();
    if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "\"inf\"" | "\"infinity\"") {
        return Ok(ExtendedScalar::Infinity);
    }
    parse_complex(t).map(ExtendedScalar::Finite)
}

/// `z`, `zN` (the monomial `z^N`) or the JSON form of an inner function.
pub fn parse_inner(text: &str) -> Result<InnerFunction, Error> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix('z') {
        let n: usize = if rest.is_empty() { 1 } else { rest.parse().map_err(|_| input(format!("bad inner function {t:?}")))? };
        if n == 0 {
            return Err(input("z0 is constant; an inner function needs at least one zero"));
        }
        return Ok(InnerFunction::monomial(n));
    }
    serde_json::from_str(t).map_err(input)
}

/// JSON symbol (`num`/`den` or Laurent shorthand).
pub fn parse_symbol(text: &str) -> Result<RationalSymbol, Error> {
    serde_json::from_str(text.trim()).map_err(input)
}

pub fn parse_coords(text: &str) -> Result<Vec<Complex64>, Error> {
    serde_json::from_str::<Vec<Pair>>(text.trim()).map(|v| unpairs(&v)).map_err(input)
}

pub fn parse_matrix(text: &str) -> Result<CMatrix, Error> {
    let rows: Vec<Vec<Pair>> = serde_json::from_str(text.trim()).map_err(input)?;
    matrix_from_rows(&rows).map_err(Error::Input)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1,0").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex(" -0.5 ").unwrap(), Complex64::new(-0.5, 0.0));
        assert_eq!(parse_complex("[0.25, -2]").unwrap(), Complex64::new(0.25, -2.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("x").is_err());
        assert_eq!(parse_extended("inf").unwrap(), ExtendedScalar::Infinity);
    }

    #[test]
    fn inner_shorthand_and_json() {
        assert_eq!(parse_inner("z2").unwrap().degree(), 2);
        assert_eq!(parse_inner("z").unwrap().degree(), 1);
        assert!(parse_inner("z0").is_err());
        let u = parse_inner(r#"{"zeros":[[0.5,0],[0,0]],"constant":[1,0]}"#).unwrap();
        assert_eq!(u.degree(), 2);
        assert!(parse_inner(r#"{"zeros":[[1.5,0]],"constant":[1,0]}"#).is_err());
    }

    #[test]
    fn matrices_reject_ragged_rows() {
        assert_eq!(parse_matrix("[[[1,0],[0,1]],[[0,0],[2,0]]]").unwrap().to_rows()[1][1], Complex64::new(2.0, 0.0));
        assert!(parse_matrix("[[[1,0]],[[0,0],[2,0]]]").is_err());
    }
}
