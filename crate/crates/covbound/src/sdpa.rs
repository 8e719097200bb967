//! Sparse SDPA (`.dat-s`) serialization with exact decimal rendering.
//!
//! A problem `min Σ c_i x_i` subject to `Σ_i F_i x_i - F_0 ⪰ 0` is written
//! block by block. Linear constraints form one trailing diagonal block, whose
//! size is listed with a negative sign.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use covbound_core::{BigInt, BigRational, LinearForm, SdpProblem};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const DEFAULT_DIGITS: usize = 40;

/// Renders `value` with `digits` significant decimal digits, rounding half
/// away from zero. Integers that fit are printed exactly.
pub fn render_decimal(value: &BigRational, digits: usize) -> String {
    let digits = digits.max(1);
    if value.is_zero() {
        return "0".to_string();
    }
    if value.is_integer() && value.numer().abs().to_string().len() <= digits {
        return value.numer().to_string();
    }
    let negative = value.is_negative();
    let mag = value.abs();
    // Find e with 10^e <= mag < 10^(e+1).
    let mut e = mag.numer().to_string().len() as i64 - mag.denom().to_string().len() as i64;
    loop {
        let lo = pow10(e);
        if mag < lo {
            e -= 1;
        } else if mag >= pow10(e + 1) {
            e += 1;
        } else {
            break;
        }
    }
    let shift = digits as i64 - 1 - e;
    let scaled = &mag * pow10(shift);
    let (mut q, r) = scaled.numer().div_rem(scaled.denom());
    if BigRational::new(r * 2, scaled.denom().clone()) >= BigRational::one() {
        q += 1;
    }
    let mut mantissa = q.to_string();
    let mut exp = e;
    if mantissa.len() > digits {
        // Rounding carried into a new digit.
        mantissa.truncate(digits);
        exp += 1;
    }
    let sign = if negative { "-" } else { "" };
    let body = if (-6..digits as i64).contains(&exp) {
        plain_decimal(&mantissa, exp)
    } else {
        let (head, tail) = mantissa.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            format!("{head}e{exp}")
        } else {
            format!("{head}.{tail}e{exp}")
        }
    };
    format!("{sign}{body}")
}

fn pow10(e: i64) -> BigRational {
    let p = BigInt::from(10).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// `mantissa` holds the significant digits of a number in `[10^exp, 10^(exp+1))`.
fn plain_decimal(mantissa: &str, exp: i64) -> String {
    let (int_part, frac_part) = if exp < 0 {
        ("0".to_string(), format!("{}{}", "0".repeat((-exp - 1) as usize), mantissa))
    } else {
        let int_len = exp as usize + 1;
        if mantissa.len() <= int_len {
            (format!("{}{}", mantissa, "0".repeat(int_len - mantissa.len())), String::new())
        } else {
            (mantissa[..int_len].to_string(), mantissa[int_len..].to_string())
        }
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        int_part
    } else {
        format!("{int_part}.{frac_part}")
    }
}

/// Parses a decimal literal such as `-1.25e+03` exactly.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let value = BigRational::from_integer(numer) * pow10(exp - frac_part.len() as i64);
    Some(if negative { -value } else { value })
}

/// Block structure and entries of an SDPA problem with values of type `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaData<T> {
    pub num_vars: usize,
    /// Positive for dense symmetric blocks, negative for diagonal ones.
    pub block_sizes: Vec<i64>,
    pub objective: Vec<T>,
    /// `(var, block, row, col, value)`, all 1-based except `var`, which is 0 for `F_0`.
    pub entries: Vec<(usize, usize, usize, usize, T)>,
}

#[derive(Debug, Error)]
pub enum SdpaError {
    #[error("line {line}: {message}: {text:?}")]
    Malformed { line: usize, message: &'static str, text: String },
    #[error("unexpected end of input while reading {0}")]
    Truncated(&'static str),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Converts `problem` into SDPA blocks with exact values.
pub fn to_sdpa(problem: &SdpProblem) -> SdpaData<BigRational> {
    let mut block_sizes: Vec<i64> = problem.blocks.iter().map(|b| b.dim() as i64).collect();
    let mut entries = Vec::new();
    let push_form = |entries: &mut Vec<_>, block: usize, row: usize, col: usize, form: &LinearForm| {
        if !form.constant().is_zero() {
            entries.push((0, block, row, col, -form.constant().clone()));
        }
        for (id, c) in form.terms() {
            entries.push((id + 1, block, row, col, c.clone()));
        }
    };
    for (b, block) in problem.blocks.iter().enumerate() {
        for r in 0..block.dim() {
            for c in r..block.dim() {
                push_form(&mut entries, b + 1, r + 1, c + 1, &block.matrix[r][c]);
            }
        }
    }
    if !problem.linear.is_empty() {
        block_sizes.push(-(problem.linear.len() as i64));
        let b = problem.blocks.len() + 1;
        for (k, form) in problem.linear.iter().enumerate() {
            push_form(&mut entries, b, k + 1, k + 1, form);
        }
    }
    entries.sort_by_key(|e| (e.0, e.1, e.2, e.3));
    let objective = (0..problem.num_vars()).map(|id| problem.objective.coeff(id)).collect();
    SdpaData { num_vars: problem.num_vars(), block_sizes, objective, entries }
}

/// Sparse SDPA text for `problem`; byte-identical for identical inputs.
pub fn render_sdpa(problem: &SdpProblem, digits: usize) -> String {
    let data = to_sdpa(problem);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\"covbound q={} n={} r={} objective={} vars={} blocks={} linear={}",
        problem.q,
        problem.n,
        problem.r,
        problem.kind.name(),
        data.num_vars,
        problem.blocks.len(),
        problem.linear.len()
    );
    let _ = writeln!(out, "{}", data.num_vars);
    let _ = writeln!(out, "{}", data.block_sizes.len());
    let sizes: Vec<String> = data.block_sizes.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let c: Vec<String> = data.objective.iter().map(|v| render_decimal(v, digits)).collect();
    let _ = writeln!(out, "{}", c.join(" "));
    for (var, block, row, col, value) in &data.entries {
        let _ = writeln!(out, "{var} {block} {row} {col} {}", render_decimal(value, digits));
    }
    out
}

pub fn write_sdpa_sparse(problem: &SdpProblem, path: &Path, digits: usize) -> io::Result<()> {
    std::fs::write(path, render_sdpa(problem, digits))
}

/// Reads sparse SDPA text. Comment lines start with `"` or `*`; braces,
/// parentheses and commas are treated as whitespace.
pub fn parse_sdpa<T, F>(text: &str, parse: F) -> Result<SdpaData<T>, SdpaError>
where
    F: Fn(&str) -> Option<T>,
{
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| {
            let l = l.trim_start();
            !l.is_empty() && !l.starts_with('"') && !l.starts_with('*')
        })
        .map(|(k, l)| (k, l.replace(['{', '}', '(', ')', ','], " ")));
    let malformed = |line: usize, message: &'static str, text: &str| SdpaError::Malformed { line, message, text: text.to_string() };

    let (ln, l) = lines.next().ok_or(SdpaError::Truncated("mDIM"))?;
    let num_vars = first_token(&l).and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| malformed(ln, "bad mDIM", &l))?;
    let (ln, l) = lines.next().ok_or(SdpaError::Truncated("nBLOCK"))?;
    let nblock = first_token(&l).and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| malformed(ln, "bad nBLOCK", &l))?;
    let (ln, l) = lines.next().ok_or(SdpaError::Truncated("block sizes"))?;
    let block_sizes: Vec<i64> = l
        .split_whitespace()
        .take(nblock)
        .map(|t| t.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| malformed(ln, "bad block size", &l))?;
    if block_sizes.len() != nblock {
        return Err(malformed(ln, "too few block sizes", &l));
    }
    let mut objective = Vec::with_capacity(num_vars);
    while objective.len() < num_vars {
        let (ln, l) = lines.next().ok_or(SdpaError::Truncated("objective"))?;
        for tok in l.split_whitespace() {
            if objective.len() == num_vars {
                break;
            }
            objective.push(parse(tok).ok_or_else(|| malformed(ln, "bad objective coefficient", &l))?);
        }
    }
    let mut entries = Vec::new();
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(malformed(ln, "entry needs five fields", &l));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|_| malformed(ln, "bad index", &l));
        let (var, block, row, col) = (int(toks[0])?, int(toks[1])?, int(toks[2])?, int(toks[3])?);
        if var > num_vars || block == 0 || block > nblock {
            return Err(malformed(ln, "index out of range", &l));
        }
        let size = block_sizes[block - 1].unsigned_abs() as usize;
        if row == 0 || col == 0 || row > size || col > size || (block_sizes[block - 1] < 0 && row != col) {
            return Err(malformed(ln, "entry outside its block", &l));
        }
        let value = parse(toks[4]).ok_or_else(|| malformed(ln, "bad value", &l))?;
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        entries.push((var, block, row, col, value));
    }
    Ok(SdpaData { num_vars, block_sizes, objective, entries })
}

fn first_token(line: &str) -> Option<&str> {
    line.split_whitespace().next()
}

impl SdpaData<BigRational> {
    /// Dense blocks of `Σ F_i x_i - F_0` at `point`.
    pub fn evaluate(&self, point: &[BigRational]) -> Vec<Vec<Vec<BigRational>>> {
        let mut blocks: Vec<Vec<Vec<BigRational>>> = self
            .block_sizes
            .iter()
            .map(|s| {
                let d = s.unsigned_abs() as usize;
                vec![vec![BigRational::zero(); d]; d]
            })
            .collect();
        for (var, block, row, col, value) in &self.entries {
            let contribution = if *var == 0 { -value.clone() } else { value * &point[var - 1] };
            let m = &mut blocks[block - 1];
            m[row - 1][col - 1] += &contribution;
            if row != col {
                m[col - 1][row - 1] += contribution;
            }
        }
        blocks
    }
}

impl SdpaData<f64> {
    pub fn from_exact(data: &SdpaData<BigRational>) -> Self {
        let f = |v: &BigRational| v.to_f64().unwrap_or(f64::NAN);
        SdpaData {
            num_vars: data.num_vars,
            block_sizes: data.block_sizes.clone(),
            objective: data.objective.iter().map(f).collect(),
            entries: data.entries.iter().map(|(a, b, c, d, v)| (*a, *b, *c, *d, f(v))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(render_decimal(&frac(0, 1), 5), "0");
        assert_eq!(render_decimal(&frac(42, 1), 5), "42");
        assert_eq!(render_decimal(&frac(-7, 1), 40), "-7");
        assert_eq!(render_decimal(&frac(1, 3), 5), "0.33333");
        assert_eq!(render_decimal(&frac(2, 3), 5), "0.66667");
        assert_eq!(render_decimal(&frac(1, 8), 40), "0.125");
        assert_eq!(render_decimal(&frac(-5, 2), 40), "-2.5");
        assert_eq!(render_decimal(&frac(999999, 1000000), 3), "1");
        assert_eq!(render_decimal(&frac(1, 10_000_000), 4), "1e-7");
        assert_eq!(render_decimal(&frac(123456, 1), 3), "1.23e5");
        assert_eq!(render_decimal(&frac(1, 400), 40), "0.0025");
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("+1.2345e+02").unwrap(), frac(12345, 100));
        assert_eq!(parse_decimal("-0.5").unwrap(), frac(-1, 2));
        assert_eq!(parse_decimal("3").unwrap(), frac(3, 1));
        assert_eq!(parse_decimal(".25").unwrap(), frac(1, 4));
        assert_eq!(parse_decimal("1E-3").unwrap(), frac(1, 1000));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("").is_none());
        assert!(parse_decimal("1.2.3").is_none());
        for v in [frac(1, 3), frac(-22, 7), frac(10_000_001, 1), frac(1, 123_456_789)] {
            let back = parse_decimal(&render_decimal(&v, 30)).unwrap();
            let err = ((back - &v) / &v).abs();
            assert!(err < frac(1, 10i64.pow(15)) * frac(1, 10i64.pow(13)));
        }
    }

    #[test]
    fn parser_accepts_decorations() {
        let text = "\"comment\n* another\n2 = mDIM\n2\n{2, -1}\n1.0 0\n0 1 1 1 1\n1 1 1 2 0.5\n2 2 1 1 1\n";
        let data = parse_sdpa(text, |s| s.parse::<f64>().ok()).unwrap();
        assert_eq!(data.num_vars, 2);
        assert_eq!(data.block_sizes, vec![2, -1]);
        assert_eq!(data.objective, vec![1.0, 0.0]);
        assert_eq!(data.entries.len(), 3);
        assert!(parse_sdpa("2\n1\n", |s| s.parse::<f64>().ok()).is_err());
        assert!(parse_sdpa("1\n1\n-1\n1\n1 1 1 2 3\n", |s| s.parse::<f64>().ok()).is_err());
    }
}
