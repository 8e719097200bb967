//! Small text formats: custom inequality files and the coefficient dump.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use covbound_core::combinatorics::{alpha_nonbinary_scaled, beta_binary, for_each_alpha4, for_each_eta, index_set, intersection_number, krawtchouk};
use covbound_core::{BigRational, BigUint, InequalitySet, OrbitIndex, Provenance};
use num_traits::Zero;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("inequality is for q={found_q} n={found_n}, expected q={q} n={n}")]
    WrongParameters { q: usize, n: usize, found_q: usize, found_n: usize },
    #[error(transparent)]
    Invalid(#[from] covbound_core::InequalityError),
}

fn parse_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((num, den)) => {
            let den: covbound_core::BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(BigRational::new(num.trim().parse().ok()?, den))
        }
        None => crate::sdpa::parse_decimal(text),
    }
}

/// Reads `q n`, then `β`, then the `n+1` values `λ_0 … λ_n`. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_inequality(text: &str) -> Result<(usize, usize, InequalitySet), FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let bad = |line: usize, message: &str| FormatError::Malformed { line, message: message.to_string() };

    let (ln, header) = lines.next().ok_or_else(|| bad(0, "missing `q n` header"))?;
    let dims: Vec<usize> = header.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad(ln, "expected two integers"))?;
    let [q, n] = dims[..] else {
        return Err(bad(ln, "expected two integers"));
    };
    if q < 2 || n == 0 {
        return Err(bad(ln, "need q ≥ 2 and n ≥ 1"));
    }
    let (ln, beta_text) = lines.next().ok_or_else(|| bad(ln + 1, "missing beta"))?;
    let beta = parse_rational(beta_text).ok_or_else(|| bad(ln, "beta is not a rational"))?;
    let (ln, lambda_text) = lines.next().ok_or_else(|| bad(ln + 1, "missing lambda values"))?;
    let lambdas = lambda_text
        .split_whitespace()
        .map(parse_rational)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad(ln, "lambda value is not a rational"))?;
    if let Some((ln, _)) = lines.next() {
        return Err(bad(ln, "trailing content"));
    }
    let ineq = InequalitySet::new(lambdas, beta, Provenance::Custom)?;
    ineq.check_length(n)?;
    Ok((q, n, ineq))
}

pub fn render_inequality(q: usize, ineq: &InequalitySet) -> String {
    let lambdas: Vec<String> = ineq.lambdas().iter().map(|l| l.to_string()).collect();
    format!("# {}\n{} {}\n{}\n{}\n", ineq.provenance().name(), q, ineq.n(), ineq.beta(), lambdas.join(" "))
}

/// Loads an inequality file and checks it was written for `(q, n)`.
pub fn load_inequality(path: &std::path::Path, q: usize, n: usize) -> Result<InequalitySet, Box<dyn std::error::Error + Send + Sync>> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (fq, fn_, ineq) = parse_inequality(&text)?;
    if (fq, fn_) != (q, n) {
        return Err(Box::new(FormatError::WrongParameters { q, n, found_q: fq, found_n: fn_ }));
    }
    Ok(ineq)
}

fn line(out: &mut String, kind: &str, params: &[usize], value: impl std::fmt::Display) {
    out.push_str(kind);
    for p in params {
        let _ = write!(out, " {p}");
    }
    let _ = writeln!(out, " = {value}");
}

/// Every nonzero coefficient the model uses on `[q]^n`, one
/// `kind p1 p2 … = value` line each, in a fixed order.
pub fn dump_coefficients(q: usize, n: usize) -> String {
    let mut out = String::new();
    let (qq, nn) = (q as u64, n as u64);
    for k in 0..=n {
        for i in 0..=n {
            line(&mut out, "krawtchouk", &[q, n, k, i], krawtchouk(qq, nn, k as u64, i as u64));
        }
    }
    for k in 0..=n {
        for i in 0..=n {
            for j in 0..=n {
                let v = intersection_number(qq, nn, k as u64, i as u64, j as u64);
                if !v.is_zero() {
                    line(&mut out, "intersection", &[q, n, k, i, j], v);
                }
            }
        }
    }
    let members = index_set(q, n);
    for idx in &members {
        for k in 0..=idx.i.min(idx.j) {
            if q == 2 {
                let v = beta_binary(n, idx.i, idx.j, k, idx.t);
                if !v.is_zero() {
                    line(&mut out, "betaBinary", &[n, idx.i, idx.j, k, idx.t], v);
                }
            } else {
                for a in 0..=k {
                    let v = alpha_nonbinary_scaled(q, n, idx.i, idx.j, idx.t, idx.p, a, k);
                    if !v.is_zero() {
                        line(&mut out, "alphaNonbinary", &[q, n, idx.i, idx.j, idx.t, idx.p, a, k], v);
                    }
                }
            }
        }
    }
    let flat = |o: &OrbitIndex| [o.i, o.j, o.t, o.p];
    for &src in &members {
        let mut eta: BTreeMap<(OrbitIndex, usize), BigUint> = BTreeMap::new();
        for_each_eta(q, n, src, n, |dst, d, count| *eta.entry((dst, d)).or_default() += count);
        for ((dst, d), v) in eta.into_iter().filter(|(_, v)| !v.is_zero()) {
            let mut params = vec![q, n];
            params.extend(flat(&src));
            params.extend(flat(&dst));
            params.push(d);
            line(&mut out, "eta", &params, v);
        }
        let mut alpha: BTreeMap<(OrbitIndex, usize), BigUint> = BTreeMap::new();
        for_each_alpha4(q, n, src, |dst, d, count| *alpha.entry((dst, d)).or_default() += count);
        for ((dst, d), v) in alpha.into_iter().filter(|(_, v)| !v.is_zero()) {
            let mut params = vec![q, n];
            params.extend(flat(&src));
            params.extend([dst.j, dst.t, dst.p, d]);
            line(&mut out, "alpha4", &params, v);
        }
    }
    out
}
