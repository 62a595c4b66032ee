//! Analysis/synthesis window pairs for the lapped transforms.
//!
//! A [`WindowPair`] holds the `2N`-sample analysis and synthesis windows
//! together with the frame length `N` and the lookahead (how far the
//! analysis window reaches past the current frame). Construction verifies
//! the perfect-reconstruction conditions numerically, so any pair that
//! exists is safe to run through analysis/synthesis round trips.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Tolerance for the numeric perfect-reconstruction check.
pub const PR_TOLERANCE: f64 = 1e-12;

/// Paired analysis/synthesis windows of length `2N`.
#[derive(Debug, Clone)]
pub struct WindowPair {
    analysis: Vec<f64>,
    synthesis: Vec<f64>,
    frame_len: usize,
    lookahead: usize,
}

impl WindowPair {
    /// Sine window, `analysis = synthesis = sin(pi (n + 0.5) / 2N)`.
    pub fn sine(frame_len: usize, lookahead: usize) -> Self {
        let two_n = 2 * frame_len;
        let w: Vec<f64> = (0..two_n)
            .map(|n| (PI * (n as f64 + 0.5) / two_n as f64).sin())
            .collect();
        Self::new(w.clone(), w, frame_len, lookahead)
            .expect("sine window satisfies perfect reconstruction")
    }

    /// Build a pair from explicit windows, verifying PR to [`PR_TOLERANCE`].
    pub fn new(
        analysis: Vec<f64>,
        synthesis: Vec<f64>,
        frame_len: usize,
        lookahead: usize,
    ) -> Result<Self> {
        let two_n = 2 * frame_len;
        if analysis.len() != two_n {
            return Err(Error::InputSize {
                what: "analysis window",
                expected: two_n,
                got: analysis.len(),
            });
        }
        if synthesis.len() != two_n {
            return Err(Error::InputSize {
                what: "synthesis window",
                expected: two_n,
                got: synthesis.len(),
            });
        }
        if lookahead >= frame_len {
            return Err(Error::Config(format!(
                "lookahead {lookahead} must be smaller than frame length {frame_len}"
            )));
        }
        if analysis.iter().chain(&synthesis).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("window coefficients must be finite".into()));
        }
        let pair = Self {
            analysis,
            synthesis,
            frame_len,
            lookahead,
        };
        let (amp, cross) = pair.pr_deviation();
        if amp > PR_TOLERANCE || cross > PR_TOLERANCE {
            return Err(Error::Numeric(format!(
                "window pair violates perfect reconstruction: \
                 amplitude deviation {amp:.3e}, aliasing cross-term {cross:.3e}"
            )));
        }
        Ok(pair)
    }

    /// Maximum deviation from the two reconstruction conditions:
    /// `h(n)g(n) + h(n+N)g(n+N) = 1` and
    /// `g(n+N)h(2N-1-n) - g(n)h(N-1-n) = 0` for `n` in `[0, N)`.
    pub fn pr_deviation(&self) -> (f64, f64) {
        let n = self.frame_len;
        let h = &self.analysis;
        let g = &self.synthesis;
        let mut amp = 0.0f64;
        let mut cross = 0.0f64;
        for i in 0..n {
            let a = (h[i] * g[i] + h[i + n] * g[i + n] - 1.0).abs();
            let c = (g[i + n] * h[2 * n - 1 - i] - g[i] * h[n - 1 - i]).abs();
            amp = amp.max(a);
            cross = cross.max(c);
        }
        (amp, cross)
    }

    pub fn analysis(&self) -> &[f64] {
        &self.analysis
    }

    pub fn synthesis(&self) -> &[f64] {
        &self.synthesis
    }

    /// Frame length `N` in samples (bins per spectrum).
    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    /// Lookahead in samples past the current frame.
    pub fn lookahead(&self) -> usize {
        self.lookahead
    }

    /// Stream delay of an unmodified analysis/synthesis round trip:
    /// the output equals the input delayed by `N - lookahead` samples.
    pub fn round_trip_delay(&self) -> usize {
        self.frame_len - self.lookahead
    }

    /// Load a window from a text file: header line `N=<int> lookahead=<int>`,
    /// then `2N` coefficients, one per line. The file holds the analysis
    /// window; the synthesis window is its time reverse. The loaded pair is
    /// rejected unless it satisfies perfect reconstruction.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::format(path.display().to_string(), "empty window file"))?;
        let (frame_len, lookahead) = parse_header(header)
            .ok_or_else(|| Error::format(path.display().to_string(), "bad header line"))?;
        let coeffs: Vec<f64> = lines
            .map(|l| l.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::format(path.display().to_string(), format!("bad coefficient: {e}")))?;
        if coeffs.len() != 2 * frame_len {
            return Err(Error::format(
                path.display().to_string(),
                format!("expected {} coefficients, found {}", 2 * frame_len, coeffs.len()),
            ));
        }
        let synthesis: Vec<f64> = coeffs.iter().rev().copied().collect();
        Self::new(coeffs, synthesis, frame_len, lookahead)
    }

    /// Write the analysis window in the [`WindowPair::from_file`] format.
    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = format!("N={} lookahead={}\n", self.frame_len, self.lookahead);
        for v in &self.analysis {
            writeln!(out, "{v:.17e}").expect("string write");
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut frame_len = None;
    let mut lookahead = None;
    for tok in line.split_whitespace() {
        if let Some(v) = tok.strip_prefix("N=") {
            frame_len = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("lookahead=") {
            lookahead = v.parse().ok();
        }
    }
    Some((frame_len?, lookahead?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_window_satisfies_pr() {
        let w = WindowPair::sine(160, 40);
        let (amp, cross) = w.pr_deviation();
        assert!(amp < 1e-14, "amplitude deviation {amp}");
        assert!(cross < 1e-14, "cross-term deviation {cross}");
        assert_eq!(w.analysis().len(), 320);
        assert_eq!(w.round_trip_delay(), 120);
    }

    #[test]
    fn rejects_wrong_length() {
        let err = WindowPair::new(vec![1.0; 10], vec![1.0; 10], 8, 2).unwrap_err();
        assert!(matches!(err, Error::InputSize { .. }));
    }

    #[test]
    fn rejects_non_pr_window() {
        // A flat window of ones fails amplitude complementarity.
        let err = WindowPair::new(vec![1.0; 16], vec![1.0; 16], 8, 2).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("win.txt");
        let w = WindowPair::sine(32, 8);
        w.to_file(&path).unwrap();
        let back = WindowPair::from_file(&path).unwrap();
        assert_eq!(back.frame_len(), 32);
        assert_eq!(back.lookahead(), 8);
        for (a, b) in w.analysis().iter().zip(back.analysis()) {
            assert!((a - b).abs() < 1e-15);
        }
        // sine window is symmetric, so the reversed synthesis matches too
        for (a, b) in w.synthesis().iter().zip(back.synthesis()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
