//! Plain-text instance and ground-truth files.
//!
//! Both formats are whitespace separated and skip lines whose first
//! non-blank character is `#`. The first data line holds the shape
//! `n m l`. An instance then lists `n·m·l` entries in row-major order
//! (`k` fastest); a truth file lists `n + m + l` entries, the factors
//! `x`, `y` and `z` one after another.

use std::fmt::Write as _;
use std::path::Path;

use btf_core::bits::BitVector;
use btf_core::{BinaryTensor, Dims, FactorTriple};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("missing shape line")]
    MissingShape,
    #[error("line {line}: bad token {token:?}, expected {expected}")]
    BadToken { line: usize, token: String, expected: &'static str },
    #[error("expected {expected} entries after the shape, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error(transparent)]
    Core(#[from] btf_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Non-comment tokens with their 1-based line numbers.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .flat_map(|(n, l)| l.split_whitespace().map(move |t| (n + 1, t)))
}

fn parse_body(text: &str, count: impl Fn(Dims) -> usize) -> Result<(Dims, Vec<bool>), FormatError> {
    let mut it = tokens(text);
    let mut ext = [0usize; 3];
    for e in &mut ext {
        let (line, tok) = it.next().ok_or(FormatError::MissingShape)?;
        *e = tok.parse().map_err(|_| FormatError::BadToken { line, token: tok.into(), expected: "a positive extent" })?;
    }
    let dims = Dims::new(ext[0], ext[1], ext[2])?;
    let expected = count(dims);
    let mut bits = Vec::with_capacity(expected);
    for (line, tok) in it {
        bits.push(match tok {
            "0" => false,
            "1" => true,
            _ => return Err(FormatError::BadToken { line, token: tok.into(), expected: "0 or 1" }),
        });
    }
    if bits.len() != expected {
        return Err(FormatError::WrongCount { expected, found: bits.len() });
    }
    Ok((dims, bits))
}

pub fn parse_instance(text: &str) -> Result<BinaryTensor, FormatError> {
    let (dims, bits) = parse_body(text, |d| d.len())?;
    Ok(BinaryTensor::from_bits(dims, BitVector::from_bools(&bits))?)
}

pub fn parse_truth(text: &str) -> Result<FactorTriple, FormatError> {
    let (dims, bits) = parse_body(text, |d| d.n + d.m + d.l)?;
    let (x, rest) = bits.split_at(dims.n);
    let (y, z) = rest.split_at(dims.m);
    Ok(FactorTriple::from_bools(x, y, z)?)
}

fn bit_char(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

/// One line per `(i, j)` fiber.
pub fn write_instance(g: &BinaryTensor) -> String {
    let d = g.dims();
    let mut s = format!("{} {} {}\n", d.n, d.m, d.l);
    for i in 0..d.n {
        for j in 0..d.m {
            let line: Vec<String> = (0..d.l).map(|k| bit_char(g.get(i, j, k)).to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
    }
    s
}

/// One line per factor.
pub fn write_truth(t: &FactorTriple) -> String {
    let d = t.dims();
    let mut s = format!("{} {} {}\n", d.n, d.m, d.l);
    for mode in 0..3 {
        let line: Vec<String> = t.factor(mode).iter().map(|b| bit_char(b).to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn read_instance(path: &Path) -> Result<BinaryTensor, FormatError> {
    parse_instance(&read(path)?)
}

pub fn read_truth(path: &Path) -> Result<FactorTriple, FormatError> {
    parse_truth(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_layout() {
        let g = parse_instance("# a 1x2x2 tensor\n1 2 2\n1 0\n# skipped 1 1\n0 1\n").unwrap();
        assert!(g.get(0, 0, 0) && !g.get(0, 0, 1) && !g.get(0, 1, 0) && g.get(0, 1, 1));
        assert_eq!(parse_instance(&write_instance(&g)).unwrap(), g);
    }

    #[test]
    fn truth_round_trip() {
        let t = FactorTriple::from_bools(&[true, false], &[true], &[false, true, true]).unwrap();
        let text = write_truth(&t);
        assert_eq!(text, "2 1 3\n1 0\n1\n0 1 1\n");
        assert_eq!(parse_truth(&text).unwrap(), t);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_instance(""), Err(FormatError::MissingShape)));
        assert!(matches!(parse_instance("1 1 2\n1"), Err(FormatError::WrongCount { expected: 2, found: 1 })));
        assert!(matches!(parse_instance("1 1 1\n2"), Err(FormatError::BadToken { line: 2, .. })));
        assert!(matches!(parse_instance("0 1 1\n"), Err(FormatError::Core(_))));
        assert!(matches!(parse_truth("1 1 1\n1 1 1 1"), Err(FormatError::WrongCount { expected: 3, found: 4 })));
    }
}
