//! Text file formats: traces, predictor streams, and predictor bundles.
//!
//! All files are plain comma-separated text with a header row. Trace files
//! never serialize the virtual suffix; it is reconstructed on load from `n`,
//! which comes from a `# n=<int>` header comment or an explicit override.
//! A predictor bundle is a directory of `predictor_<j>.csv` files plus a
//! `manifest.txt` listing the predictor count, the access mode, and a
//! sha-256 checksum per file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::predict::{AccessMode, ExplicitPredictionStream, NatPredictionStream};
use crate::trace::{augment_sequence, Page, RequestTrace};

/// Serializes a trace: `# n=<int>`, a `t,page` header, one row per real
/// round. The suffix is never written.
pub fn write_trace(path: &Path, trace: &RequestTrace) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "# n={}", trace.universe());
    let _ = writeln!(out, "t,page");
    for t in 1..=trace.horizon() {
        let _ = writeln!(out, "{t},{}", trace.request(t));
    }
    write_atomic(path, out.as_bytes())
}

/// Loads a trace written by [`write_trace`]. `n_override`, when given, wins
/// over the header comment; one of the two must provide `n`. Rounds must be
/// `1..=T` contiguous.
pub fn read_trace(path: &Path, n_override: Option<Page>) -> Result<RequestTrace> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut n_header: Option<Page> = None;
    let mut raw: Vec<Page> = Vec::new();
    let mut saw_header = false;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("n=") {
                n_header = Some(parse_num(path, line_no, v)?);
            }
            continue;
        }
        if !saw_header {
            if line != "t,page" {
                return Err(bad_line(path, line_no, "expected header `t,page`"));
            }
            saw_header = true;
            continue;
        }
        let (t_str, page_str) = line
            .split_once(',')
            .ok_or_else(|| bad_line(path, line_no, "expected `t,page`"))?;
        let t: usize = parse_num(path, line_no, t_str)?;
        if t != raw.len() + 1 {
            return Err(bad_line(
                path,
                line_no,
                &format!("round {t} out of order; expected {}", raw.len() + 1),
            ));
        }
        raw.push(parse_num(path, line_no, page_str)?);
    }
    if !saw_header {
        return Err(Error::Validation(format!(
            "{}: missing `t,page` header",
            path.display()
        )));
    }
    let n = n_override.or(n_header).ok_or_else(|| {
        Error::Validation(format!(
            "{}: page universe unknown; pass n or add a `# n=<int>` header",
            path.display()
        ))
    })?;
    augment_sequence(&raw, n)
}

/// A predictor file is either a NAT stream or an explicit page stream,
/// distinguished by its header.
#[derive(Debug, Clone)]
pub enum PredictorFile {
    Nat(Vec<usize>),
    Explicit(Vec<Page>),
}

/// Writes a NAT predictor file: header `t,predicted_nat`.
pub fn write_nat_predictor(path: &Path, stream: &NatPredictionStream) -> Result<()> {
    write_atomic(path, nat_predictor_bytes(stream).as_bytes())
}

fn nat_predictor_bytes(stream: &NatPredictionStream) -> String {
    let mut out = String::from("t,predicted_nat\n");
    for t in 1..=stream.horizon() {
        let _ = writeln!(out, "{t},{}", stream.get(t));
    }
    out
}

/// Writes an explicit predictor file: header `t,predicted_page`.
pub fn write_explicit_predictor(path: &Path, stream: &ExplicitPredictionStream) -> Result<()> {
    let mut out = String::from("t,predicted_page\n");
    for t in 1..=stream.horizon() {
        let _ = writeln!(out, "{t},{}", stream.page(t));
    }
    write_atomic(path, out.as_bytes())
}

/// Reads either predictor flavour, detecting the kind from the header.
pub fn read_predictor(path: &Path) -> Result<PredictorFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut kind: Option<bool> = None; // true = NAT
    let mut values: Vec<usize> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match kind {
            None => {
                kind = Some(match line {
                    "t,predicted_nat" => true,
                    "t,predicted_page" => false,
                    _ => {
                        return Err(bad_line(
                            path,
                            line_no,
                            "expected header `t,predicted_nat` or `t,predicted_page`",
                        ))
                    }
                });
            }
            Some(_) => {
                let (t_str, v_str) = line
                    .split_once(',')
                    .ok_or_else(|| bad_line(path, line_no, "expected two fields"))?;
                let t: usize = parse_num(path, line_no, t_str)?;
                if t != values.len() + 1 {
                    return Err(bad_line(
                        path,
                        line_no,
                        &format!("round {t} out of order; expected {}", values.len() + 1),
                    ));
                }
                values.push(parse_num(path, line_no, v_str)?);
            }
        }
    }
    match kind {
        Some(true) => Ok(PredictorFile::Nat(values)),
        Some(false) => Ok(PredictorFile::Explicit(
            values.into_iter().map(|v| v as Page).collect(),
        )),
        None => Err(Error::Validation(format!(
            "{}: missing predictor header",
            path.display()
        ))),
    }
}

fn bundle_file_name(j: usize) -> String {
    format!("predictor_{j}.csv")
}

/// Writes a multi-predictor bundle: `predictor_<j>.csv` per stream plus a
/// manifest with count, mode, and per-file checksums.
pub fn write_bundle(dir: &Path, streams: &[NatPredictionStream], mode: AccessMode) -> Result<()> {
    if streams.is_empty() {
        return Err(Error::Validation("bundle requires at least one stream".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::new();
    let _ = writeln!(manifest, "M = {}", streams.len());
    let _ = writeln!(manifest, "mode = {}", mode.as_str());
    for (idx, stream) in streams.iter().enumerate() {
        let name = bundle_file_name(idx + 1);
        let bytes = nat_predictor_bytes(stream);
        write_atomic(&dir.join(&name), bytes.as_bytes())?;
        let _ = writeln!(manifest, "checksum_{name} = {}", sha256_hex(bytes.as_bytes()));
    }
    write_atomic(&dir.join("manifest.txt"), manifest.as_bytes())
}

/// Reads a bundle back, verifying M, per-file checksums, and equal horizons.
///
/// Returns raw NAT values; bind them to a trace with [`bind_nat_values`] to
/// enforce the range invariant.
pub fn read_bundle(dir: &Path) -> Result<(Vec<Vec<usize>>, AccessMode)> {
    let manifest_path = dir.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut m: Option<usize> = None;
    let mut mode: Option<AccessMode> = None;
    let mut checksums: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Validation(format!("{}: malformed line `{line}`", manifest_path.display()))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "M" => {
                m = Some(value.parse().map_err(|_| {
                    Error::Validation(format!("{}: bad M `{value}`", manifest_path.display()))
                })?)
            }
            "mode" => mode = Some(value.parse()?),
            _ => {
                if let Some(name) = key.strip_prefix("checksum_") {
                    checksums.push((name.to_string(), value.to_string()));
                }
            }
        }
    }
    let m = m.ok_or_else(|| {
        Error::Validation(format!("{}: missing M", manifest_path.display()))
    })?;
    let mode = mode.ok_or_else(|| {
        Error::Validation(format!("{}: missing mode", manifest_path.display()))
    })?;
    if checksums.len() != m {
        return Err(Error::Validation(format!(
            "{}: {} checksums for M = {m}",
            manifest_path.display(),
            checksums.len()
        )));
    }

    let mut raw_streams = Vec::with_capacity(m);
    for j in 1..=m {
        let name = bundle_file_name(j);
        let path = dir.join(&name);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let expected = checksums
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| {
                Error::Validation(format!(
                    "{}: no checksum for {name}",
                    manifest_path.display()
                ))
            })?;
        let actual = sha256_hex(&bytes);
        if actual != expected {
            return Err(Error::Validation(format!(
                "{}: checksum mismatch ({actual} != {expected})",
                path.display()
            )));
        }
        match read_predictor(&path)? {
            PredictorFile::Nat(values) => raw_streams.push(values),
            PredictorFile::Explicit(_) => {
                return Err(Error::Validation(format!(
                    "{}: bundles hold NAT predictors",
                    path.display()
                )))
            }
        }
    }
    let horizon = raw_streams[0].len();
    if raw_streams.iter().any(|s| s.len() != horizon) {
        return Err(Error::Validation(format!(
            "{}: streams disagree on horizon",
            dir.display()
        )));
    }
    Ok((raw_streams, mode))
}

/// Binds loaded raw NAT values to a trace, enforcing the range invariant.
pub fn bind_nat_values(values: Vec<usize>, trace: &RequestTrace) -> Result<NatPredictionStream> {
    NatPredictionStream::from_values(values, trace)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Writes via a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir: PathBuf = dir.map(Path::to_path_buf).unwrap_or_else(|| ".".into());
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(path, e))?;
    std::io::Write::write_all(&mut tmp, bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Formats a float with six significant digits, the pinned CSV precision.
pub fn fmt_g6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    let rounded = format!("{x:.decimals$}");
    if rounded.contains('.') {
        rounded.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        rounded
    }
}

fn bad_line(path: &Path, line_no: usize, message: &str) -> Error {
    Error::Validation(format!("{}:{}: {message}", path.display(), line_no + 1))
}

fn parse_num<T: std::str::FromStr>(path: &Path, line_no: usize, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| bad_line(path, line_no, &format!("bad number `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::perfect_nat;
    use crate::trace::build_nat_table;

    fn tempdir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn trace_round_trip_reconstructs_suffix() {
        let dir = tempdir();
        let path = dir.path().join("trace.csv");
        let tr = augment_sequence(&[2, 1, 3, 3], 3).unwrap();
        write_trace(&path, &tr).unwrap();
        let loaded = read_trace(&path, None).unwrap();
        assert_eq!(loaded, tr);
        // Override wins over the header.
        let wider = read_trace(&path, Some(5)).unwrap();
        assert_eq!(wider.universe(), 5);
        assert_eq!(wider.real_requests(), tr.real_requests());
    }

    #[test]
    fn trace_requires_contiguous_rounds() {
        let dir = tempdir();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "# n=3\nt,page\n1,1\n3,2\n").unwrap();
        assert!(read_trace(&path, None).unwrap_err().is_validation());
    }

    #[test]
    fn trace_requires_universe() {
        let dir = tempdir();
        let path = dir.path().join("no_n.csv");
        fs::write(&path, "t,page\n1,1\n").unwrap();
        assert!(read_trace(&path, None).unwrap_err().is_validation());
        assert!(read_trace(&path, Some(2)).is_ok());
    }

    #[test]
    fn predictor_kind_detection() {
        let dir = tempdir();
        let tr = augment_sequence(&[1, 2, 1], 2).unwrap();
        let nat = build_nat_table(&tr);
        let stream = perfect_nat(&tr, &nat);

        let nat_path = dir.path().join("nat.csv");
        write_nat_predictor(&nat_path, &stream).unwrap();
        match read_predictor(&nat_path).unwrap() {
            PredictorFile::Nat(values) => assert_eq!(values, vec![3, 5, 4]),
            PredictorFile::Explicit(_) => panic!("expected NAT"),
        }

        let explicit = ExplicitPredictionStream::new(&[1, 2, 1], 2).unwrap();
        let exp_path = dir.path().join("explicit.csv");
        write_explicit_predictor(&exp_path, &explicit).unwrap();
        match read_predictor(&exp_path).unwrap() {
            PredictorFile::Explicit(pages) => assert_eq!(pages, vec![1, 2, 1]),
            PredictorFile::Nat(_) => panic!("expected explicit"),
        }
    }

    #[test]
    fn bundle_round_trip_and_corruption_detection() {
        let dir = tempdir();
        let tr = augment_sequence(&[1, 2, 1, 2, 2], 2).unwrap();
        let nat = build_nat_table(&tr);
        let stream = perfect_nat(&tr, &nat);
        let bundle_dir = dir.path().join("bundle");
        write_bundle(&bundle_dir, &[stream.clone(), stream.clone()], AccessMode::Bandit)
            .unwrap();

        let (raw, mode) = read_bundle(&bundle_dir).unwrap();
        assert_eq!(mode, AccessMode::Bandit);
        assert_eq!(raw.len(), 2);
        let bound = bind_nat_values(raw[0].clone(), &tr).unwrap();
        assert_eq!(bound.values(), stream.values());

        // Flipping a byte must be caught by the checksum.
        let victim = bundle_dir.join("predictor_2.csv");
        let mut bytes = fs::read(&victim).unwrap();
        let last = bytes.len() - 2;
        bytes[last] = b'9';
        fs::write(&victim, bytes).unwrap();
        let err = read_bundle(&bundle_dir).unwrap_err();
        assert!(err.is_validation(), "{err}");
        assert!(err.to_string().contains("checksum"));
    }

    #[test]
    fn g6_formatting() {
        assert_eq!(fmt_g6(0.0), "0");
        assert_eq!(fmt_g6(1.0), "1");
        assert_eq!(fmt_g6(0.125), "0.125");
        assert_eq!(fmt_g6(1.0 / 3.0), "0.333333");
        assert_eq!(fmt_g6(123456.789), "123457");
        assert_eq!(fmt_g6(0.000123456789), "0.000123457");
        assert_eq!(fmt_g6(-2.5), "-2.5");
    }
}
