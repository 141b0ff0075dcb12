//! Plain-text state files.
//!
//! ```text
//! hdet-state v1
//! kind pure
//! n 4
//! d 2
//! data
//! 7.0710678118654757e-1 0.0000000000000000e0
//! ...
//! ```
//!
//! `kind pure`: `n` is the number of subsystems and `data` holds the `d^n`
//! amplitudes. `kind mixed`: `n` counts subsystem pairs, so `data` holds the
//! `d^{2n} × d^{2n}` density matrix row by row. One `re im` pair per line,
//! written with 17 significant digits so every finite double round-trips.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use hdet::convexroof::DensityMatrix;
use hdet::{CMatrix, Complex64, PureState};

use crate::CliError;

pub const HEADER: &str = "hdet-state v1";

/// Normalisation / trace tolerance applied when loading.
pub const LOAD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Mixed,
}

impl StateKind {
    fn as_str(self) -> &'static str {
        match self {
            StateKind::Pure => "pure",
            StateKind::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub kind: StateKind,
    pub n: usize,
    pub d: usize,
    pub data: Vec<Complex64>,
}

fn format_error(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Format {
        line,
        msg: msg.into(),
    }
}

fn payload_len(kind: StateKind, n: usize, d: usize) -> Option<usize> {
    let exp = match kind {
        StateKind::Pure => n,
        StateKind::Mixed => n.checked_mul(4)?,
    };
    let len = d.checked_pow(u32::try_from(exp).ok()?)?;
    (len <= 1 << 26).then_some(len)
}

impl StateFile {
    pub fn pure(psi: &PureState) -> Self {
        Self {
            kind: StateKind::Pure,
            n: psi.subsystems(),
            d: psi.local_dim(),
            data: psi.amplitudes().to_vec(),
        }
    }

    /// Mixed states need an even subsystem count; the header stores pairs.
    pub fn mixed(rho: &DensityMatrix) -> Result<Self, CliError> {
        if rho.subsystems() % 2 == 1 {
            return Err(CliError::Usage(format!(
                "mixed state files hold 2n subsystems, got {}",
                rho.subsystems()
            )));
        }
        let m = rho.matrix();
        let dim = m.nrows();
        let data = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| m[(i, j)]))
            .collect();
        Ok(Self {
            kind: StateKind::Mixed,
            n: rho.subsystems() / 2,
            d: rho.local_dim(),
            data,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{HEADER}");
        let _ = writeln!(s, "kind {}", self.kind.as_str());
        let _ = writeln!(s, "n {}", self.n);
        let _ = writeln!(s, "d {}", self.d);
        let _ = writeln!(s, "data");
        for z in &self.data {
            let _ = writeln!(s, "{:.16e} {:.16e}", z.re, z.im);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (ln, first) = lines.next().ok_or_else(|| format_error(0, "empty file"))?;
        if first != HEADER {
            return Err(format_error(ln, format!("expected header `{HEADER}`")));
        }
        let mut kind = None;
        let mut n = None;
        let mut d = None;
        let mut data_line = None;
        for (ln, line) in lines.by_ref() {
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let val = parts.next();
            if parts.next().is_some() {
                return Err(format_error(ln, "trailing tokens"));
            }
            match (key, val) {
                ("kind", Some("pure")) => kind = Some(StateKind::Pure),
                ("kind", Some("mixed")) => kind = Some(StateKind::Mixed),
                ("kind", v) => return Err(format_error(ln, format!("unknown kind {v:?}"))),
                ("n", Some(v)) => {
                    n = Some(
                        v.parse::<usize>()
                            .map_err(|e| format_error(ln, format!("n: {e}")))?,
                    )
                }
                ("d", Some(v)) => {
                    d = Some(
                        v.parse::<usize>()
                            .map_err(|e| format_error(ln, format!("d: {e}")))?,
                    )
                }
                ("data", None) => {
                    data_line = Some(ln);
                    break;
                }
                _ => return Err(format_error(ln, format!("unexpected line `{line}`"))),
            }
        }
        let data_line = data_line.ok_or_else(|| format_error(0, "missing `data` section"))?;
        let kind = kind.ok_or_else(|| format_error(data_line, "missing `kind`"))?;
        let n = n.ok_or_else(|| format_error(data_line, "missing `n`"))?;
        let d = d.ok_or_else(|| format_error(data_line, "missing `d`"))?;
        if n == 0 || d < 2 {
            return Err(format_error(
                data_line,
                format!("need n >= 1 and d >= 2, got n={n}, d={d}"),
            ));
        }
        let expected =
            payload_len(kind, n, d).ok_or_else(|| format_error(data_line, "state too large"))?;

        let mut data = Vec::with_capacity(expected);
        for (ln, line) in lines {
            let mut parts = line.split_whitespace();
            let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(format_error(ln, "expected `re im`"));
            };
            let re: f64 = re
                .parse()
                .map_err(|e| format_error(ln, format!("real part: {e}")))?;
            let im: f64 = im
                .parse()
                .map_err(|e| format_error(ln, format!("imaginary part: {e}")))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(format_error(ln, "non-finite entry"));
            }
            data.push(Complex64::new(re, im));
        }
        if data.len() != expected {
            return Err(format_error(
                0,
                format!("expected {expected} entries, found {}", data.len()),
            ));
        }
        Ok(Self { kind, n, d, data })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_text())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// `check = false` skips the normalisation test.
    pub fn into_pure(self, check: bool) -> Result<PureState, CliError> {
        if self.kind != StateKind::Pure {
            return Err(CliError::Usage("expected a pure state file".into()));
        }
        let tol = check.then_some(LOAD_TOLERANCE);
        Ok(PureState::with_tolerance(self.n, self.d, self.data, tol)?)
    }

    /// `check = false` skips the Hermiticity, trace and positivity tests.
    pub fn into_mixed(self, check: bool) -> Result<DensityMatrix, CliError> {
        if self.kind != StateKind::Mixed {
            return Err(CliError::Usage("expected a mixed state file".into()));
        }
        let dim = (self.data.len() as f64).sqrt().round() as usize;
        let m = CMatrix::from_row_slice(dim, dim, &self.data);
        let tol = check.then_some(LOAD_TOLERANCE);
        Ok(DensityMatrix::with_tolerance(2 * self.n, self.d, m, tol)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hdet::qstate::random_haar_state;

    #[test]
    fn pure_round_trip_is_bit_exact() {
        let psi = random_haar_state(3, 3, 4).unwrap();
        let file = StateFile::pure(&psi);
        let back = StateFile::parse(&file.to_text()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.into_pure(true).unwrap(), psi);
    }

    #[test]
    fn mixed_round_trip_is_bit_exact() {
        let psi = random_haar_state(2, 2, 9).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let file = StateFile::mixed(&rho).unwrap();
        assert_eq!(file.n, 1);
        let back = StateFile::parse(&file.to_text())
            .unwrap()
            .into_mixed(true)
            .unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn odd_values_survive() {
        let file = StateFile {
            kind: StateKind::Pure,
            n: 1,
            d: 2,
            data: vec![
                Complex64::new(f64::MIN_POSITIVE, -0.0),
                Complex64::new(1.0 / 3.0, 5e-324),
            ],
        };
        let back = StateFile::parse(&file.to_text()).unwrap();
        for (a, b) in back.data.iter().zip(&file.data) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(StateFile::parse("").is_err());
        assert!(StateFile::parse("hdet-state v2\n").is_err());
        let short = "hdet-state v1\nkind pure\nn 2\nd 2\ndata\n1 0\n";
        assert!(matches!(
            StateFile::parse(short),
            Err(CliError::Format { .. })
        ));
        let bad = "hdet-state v1\nkind pure\nn 1\nd 2\ndata\n1 0\nx 0\n";
        assert!(matches!(
            StateFile::parse(bad),
            Err(CliError::Format { line: 7, .. })
        ));
    }

    #[test]
    fn normalisation_check_is_optional() {
        let text = "hdet-state v1\nkind pure\nn 2\nd 2\ndata\n1 0\n0 0\n0 0\n1 0\n";
        let file = StateFile::parse(text).unwrap();
        assert!(file.clone().into_pure(true).is_err());
        assert!(file.into_pure(false).is_ok());
    }
}
