//! Low-delay lapped transforms: forward MDCT/MDST/MCLT analysis and
//! streaming inverse MDCT synthesis with time-domain aliasing cancellation.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * A frame of `2N` windowed samples maps to `N` coefficients. The complex
//!   analysis coefficient for bin `k` is
//!   `sum_n h(n) x(n) exp(i pi/N (n + 1/2 + N/2)(k + 1/2))`; its real part is
//!   the MDCT, its imaginary part the MDST.
//! * Frame `w` covers input samples `[wN - (N - lookahead), wN + N + lookahead)`,
//!   i.e. the lookahead sits at the trailing edge of the window. Out-of-range
//!   samples are zero.
//! * Synthesis applies a `2/N` scale so an unmodified analysis/synthesis
//!   round trip is the identity, delayed by `N - lookahead` samples.
//!
//! The forward path runs one complex FFT of size `2N` per frame and yields
//! MDCT and MDST together; direct evaluation of the defining sums is kept to
//! the test oracles.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::window::WindowPair;

/// `N` real MDCT (or MDST) coefficients of one analysis frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpectrum {
    pub coeffs: Vec<f64>,
    pub frame_index: u64,
}

impl FrameSpectrum {
    pub fn new(coeffs: Vec<f64>, frame_index: u64) -> Self {
        Self { coeffs, frame_index }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `N` complex coefficients of one frame: MDCT real part, MDST imaginary part.
#[derive(Debug, Clone)]
pub struct McltSpectrum {
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
    pub frame_index: u64,
}

impl McltSpectrum {
    pub fn len(&self) -> usize {
        self.real.len()
    }

    pub fn is_empty(&self) -> bool {
        self.real.is_empty()
    }

    /// Per-bin magnitude `sqrt(real^2 + imag^2)`.
    pub fn magnitude(&self) -> Vec<f64> {
        self.real
            .iter()
            .zip(&self.imag)
            .map(|(r, i)| r.hypot(*i))
            .collect()
    }

    /// The MDCT part as its own spectrum.
    pub fn to_mdct(&self) -> FrameSpectrum {
        FrameSpectrum::new(self.real.clone(), self.frame_index)
    }
}

/// Overlap-add state of one synthesis stream: the aliased tail of the
/// previous frame. Zero-initialized at stream start; one owner per stream.
#[derive(Debug, Clone)]
pub struct SynthesisState {
    overlap: Vec<f64>,
}

impl SynthesisState {
    pub fn new(frame_len: usize) -> Self {
        Self {
            overlap: vec![0.0; frame_len],
        }
    }

    pub fn frame_len(&self) -> usize {
        self.overlap.len()
    }
}

/// Planned transform context for a fixed frame length `N`.
///
/// Holds the FFT plans and twiddle tables; all methods are pure with
/// respect to the context and may be shared across threads.
pub struct Mclt {
    frame_len: usize,
    fft_inverse: Arc<dyn Fft<f64>>,
    // exp(i pi n / 2N) applied to windowed input before the FFT
    fwd_pre: Vec<Complex64>,
    // exp(i pi (N+1)(2k+1) / 4N) applied to FFT output per bin
    fwd_post: Vec<Complex64>,
    // exp(i pi k (N+1) / 2N) applied to coefficients before the inverse FFT
    inv_pre: Vec<Complex64>,
    // exp(i pi (2n + N + 1) / 4N) applied per output sample
    inv_post: Vec<Complex64>,
}

impl Mclt {
    pub fn new(frame_len: usize) -> Self {
        let n = frame_len;
        let two_n = 2 * n;
        let mut planner = FftPlanner::<f64>::new();
        let fft_inverse = planner.plan_fft_inverse(two_n);
        let fwd_pre = (0..two_n)
            .map(|i| Complex64::from_polar(1.0, std::f64::consts::PI * i as f64 / two_n as f64))
            .collect();
        let fwd_post = (0..n)
            .map(|k| {
                let phase = std::f64::consts::PI * (n as f64 + 1.0) * (2.0 * k as f64 + 1.0)
                    / (4.0 * n as f64);
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        let inv_pre = (0..n)
            .map(|k| {
                let phase =
                    std::f64::consts::PI * k as f64 * (n as f64 + 1.0) / (2.0 * n as f64);
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        let inv_post = (0..two_n)
            .map(|i| {
                let phase = std::f64::consts::PI * (2.0 * i as f64 + n as f64 + 1.0)
                    / (4.0 * n as f64);
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        Self {
            frame_len,
            fft_inverse,
            fwd_pre,
            fwd_post,
            inv_pre,
            inv_post,
        }
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    fn check_frame(&self, frame: &[f64]) -> Result<()> {
        if frame.len() != 2 * self.frame_len {
            return Err(Error::InputSize {
                what: "analysis frame",
                expected: 2 * self.frame_len,
                got: frame.len(),
            });
        }
        Ok(())
    }

    fn check_window(&self, window: &WindowPair) -> Result<()> {
        if window.frame_len() != self.frame_len {
            return Err(Error::InputSize {
                what: "window pair",
                expected: self.frame_len,
                got: window.frame_len(),
            });
        }
        Ok(())
    }

    /// Complex analysis of one `2N`-sample frame: MDCT and MDST together.
    pub fn mclt_forward(
        &self,
        frame: &[f64],
        window: &WindowPair,
        frame_index: u64,
    ) -> Result<McltSpectrum> {
        self.check_frame(frame)?;
        self.check_window(window)?;
        let n = self.frame_len;
        let h = window.analysis();
        let mut buf: Vec<Complex64> = (0..2 * n)
            .map(|i| self.fwd_pre[i] * (h[i] * frame[i]))
            .collect();
        self.fft_inverse.process(&mut buf);
        let mut real = Vec::with_capacity(n);
        let mut imag = Vec::with_capacity(n);
        for k in 0..n {
            let c = buf[k] * self.fwd_post[k];
            real.push(c.re);
            imag.push(c.im);
        }
        Ok(McltSpectrum {
            real,
            imag,
            frame_index,
        })
    }

    /// MDCT of one frame: the real part of [`Mclt::mclt_forward`], bit-identical.
    pub fn mdct_forward(
        &self,
        frame: &[f64],
        window: &WindowPair,
        frame_index: u64,
    ) -> Result<FrameSpectrum> {
        let mclt = self.mclt_forward(frame, window, frame_index)?;
        Ok(FrameSpectrum::new(mclt.real, frame_index))
    }

    /// MDST of one frame: the imaginary part of [`Mclt::mclt_forward`], bit-identical.
    pub fn mdst_forward(
        &self,
        frame: &[f64],
        window: &WindowPair,
        frame_index: u64,
    ) -> Result<FrameSpectrum> {
        let mclt = self.mclt_forward(frame, window, frame_index)?;
        Ok(FrameSpectrum::new(mclt.imag, frame_index))
    }

    /// Inverse transform of one frame to `2N` windowed samples (no overlap-add).
    fn inverse_frame(&self, spectrum: &FrameSpectrum, window: &WindowPair) -> Result<Vec<f64>> {
        if spectrum.len() != self.frame_len {
            return Err(Error::InputSize {
                what: "spectrum",
                expected: self.frame_len,
                got: spectrum.len(),
            });
        }
        self.check_window(window)?;
        let n = self.frame_len;
        let two_n = 2 * n;
        let mut buf = vec![Complex64::new(0.0, 0.0); two_n];
        for k in 0..n {
            buf[k] = self.inv_pre[k] * spectrum.coeffs[k];
        }
        self.fft_inverse.process(&mut buf);
        let g = window.synthesis();
        let scale = 2.0 / n as f64;
        Ok((0..two_n)
            .map(|i| scale * g[i] * (buf[i] * self.inv_post[i]).re)
            .collect())
    }

    /// Streaming inverse MDCT: consume one spectrum, emit `N` output samples
    /// via overlap-add with the previous frame's tail held in `state`.
    pub fn mdct_inverse_stream(
        &self,
        spectrum: &FrameSpectrum,
        window: &WindowPair,
        state: &mut SynthesisState,
    ) -> Result<Vec<f64>> {
        if state.frame_len() != self.frame_len {
            return Err(Error::InputSize {
                what: "synthesis state",
                expected: self.frame_len,
                got: state.frame_len(),
            });
        }
        let n = self.frame_len;
        let y = self.inverse_frame(spectrum, window)?;
        let out: Vec<f64> = (0..n).map(|i| state.overlap[i] + y[i]).collect();
        state.overlap.copy_from_slice(&y[n..]);
        Ok(out)
    }
}

/// Extract the `2N`-sample analysis frame `w` from a signal, zero-padding
/// outside the signal bounds.
pub fn gather_frame(signal: &[f64], frame_index: u64, window: &WindowPair) -> Vec<f64> {
    let n = window.frame_len() as i64;
    let lookahead = window.lookahead() as i64;
    let start = frame_index as i64 * n - (n - lookahead);
    (0..2 * n)
        .map(|i| {
            let idx = start + i;
            if idx >= 0 && (idx as usize) < signal.len() {
                signal[idx as usize]
            } else {
                0.0
            }
        })
        .collect()
}

/// Split a signal into `ceil(len / N)` analysis frames hopping by `N`
/// samples; boundary frames are zero-padded.
pub fn frame_stream(signal: &[f64], window: &WindowPair) -> Result<Vec<Vec<f64>>> {
    let n = window.frame_len();
    if signal.len() < 2 * n {
        return Err(Error::InputSize {
            what: "signal",
            expected: 2 * n,
            got: signal.len(),
        });
    }
    let frames = signal.len().div_ceil(n);
    Ok((0..frames as u64)
        .map(|w| gather_frame(signal, w, window))
        .collect())
}

/// Number of frames whole-signal pipelines use: one past the nominal count,
/// so the trailing partial frame can be reconstructed after the stream delay
/// is removed.
pub fn padded_frame_count(signal_len: usize, frame_len: usize) -> usize {
    signal_len.div_ceil(frame_len) + 1
}

/// Forward MDCT analysis of a whole signal, including the trailing flush frame.
pub fn analyze_mdct(mclt: &Mclt, signal: &[f64], window: &WindowPair) -> Result<Vec<FrameSpectrum>> {
    let n = window.frame_len();
    if signal.len() < 2 * n {
        return Err(Error::InputSize {
            what: "signal",
            expected: 2 * n,
            got: signal.len(),
        });
    }
    (0..padded_frame_count(signal.len(), n) as u64)
        .map(|w| mclt.mdct_forward(&gather_frame(signal, w, window), window, w))
        .collect()
}

/// Complex MCLT analysis of a whole signal, including the trailing flush frame.
pub fn analyze_mclt(mclt: &Mclt, signal: &[f64], window: &WindowPair) -> Result<Vec<McltSpectrum>> {
    let n = window.frame_len();
    if signal.len() < 2 * n {
        return Err(Error::InputSize {
            what: "signal",
            expected: 2 * n,
            got: signal.len(),
        });
    }
    (0..padded_frame_count(signal.len(), n) as u64)
        .map(|w| mclt.mclt_forward(&gather_frame(signal, w, window), window, w))
        .collect()
}

/// Synthesize a frame sequence back to a time signal of `target_len`
/// samples, compensating the round-trip delay so the output is aligned
/// with the signal the frames were analyzed from.
pub fn synthesize_signal(
    mclt: &Mclt,
    frames: &[FrameSpectrum],
    window: &WindowPair,
    target_len: usize,
) -> Result<Vec<f64>> {
    let n = window.frame_len();
    let delay = window.round_trip_delay();
    let mut state = SynthesisState::new(n);
    let mut out = Vec::with_capacity(frames.len() * n);
    for frame in frames {
        out.extend(mclt.mdct_inverse_stream(frame, window, &mut state)?);
    }
    let mut aligned: Vec<f64> = out.into_iter().skip(delay).collect();
    aligned.resize(target_len, 0.0);
    Ok(aligned)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_window() -> WindowPair {
        WindowPair::sine(160, 40)
    }

    #[test]
    fn zero_frame_gives_zero_spectrum() {
        let w = sine_window();
        let mclt = Mclt::new(160);
        let frame = vec![0.0; 320];
        let spec = mclt.mdct_forward(&frame, &w, 0).unwrap();
        assert_eq!(spec.len(), 160);
        assert!(spec.coeffs.iter().all(|&c| c == 0.0));
        let cspec = mclt.mclt_forward(&frame, &w, 0).unwrap();
        assert!(cspec.real.iter().all(|&c| c == 0.0));
        assert!(cspec.imag.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn output_has_frame_len_coefficients() {
        let w = sine_window();
        let mclt = Mclt::new(160);
        let frame: Vec<f64> = (0..320).map(|i| (i as f64 * 0.01).sin()).collect();
        assert_eq!(mclt.mdct_forward(&frame, &w, 3).unwrap().len(), 160);
        assert_eq!(mclt.mdst_forward(&frame, &w, 3).unwrap().len(), 160);
    }

    #[test]
    fn wrong_frame_length_is_an_error() {
        let w = sine_window();
        let mclt = Mclt::new(160);
        let err = mclt.mdct_forward(&vec![0.0; 319], &w, 0).unwrap_err();
        assert!(matches!(err, Error::InputSize { .. }));
    }

    #[test]
    fn mclt_parts_match_individual_transforms_exactly() {
        let w = sine_window();
        let mclt = Mclt::new(160);
        let frame: Vec<f64> = (0..320).map(|i| ((i * 7 + 3) % 13) as f64 - 6.0).collect();
        let c = mclt.mclt_forward(&frame, &w, 0).unwrap();
        let re = mclt.mdct_forward(&frame, &w, 0).unwrap();
        let im = mclt.mdst_forward(&frame, &w, 0).unwrap();
        assert_eq!(c.real, re.coeffs);
        assert_eq!(c.imag, im.coeffs);
    }

    #[test]
    fn zero_spectrum_stream_synthesizes_zeros() {
        let w = sine_window();
        let mclt = Mclt::new(160);
        let mut state = SynthesisState::new(160);
        for idx in 0..5 {
            let out = mclt
                .mdct_inverse_stream(&FrameSpectrum::new(vec![0.0; 160], idx), &w, &mut state)
                .unwrap();
            assert!(out.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn frame_stream_hops_by_frame_len() {
        let w = sine_window();
        let signal = vec![0.5; 480];
        let frames = frame_stream(&signal, &w).unwrap();
        assert_eq!(frames.len(), 3);
        assert!(frames.iter().all(|f| f.len() == 320));
        // hop = N = 160 samples = 10 ms at 16 kHz; lookahead 40 = 2.5 ms
        assert_eq!(w.frame_len() * 1000 / 16_000, 10);
        assert_eq!(w.lookahead() * 1000 / 16_000, 2); // 2.5 ms truncated
        assert_eq!(w.lookahead() as f64 / 16_000.0, 0.0025);
    }

    #[test]
    fn frame_stream_rejects_short_signal() {
        let w = sine_window();
        let err = frame_stream(&vec![0.0; 319], &w).unwrap_err();
        assert!(matches!(err, Error::InputSize { .. }));
    }

    #[test]
    fn gather_frame_alignment_convention() {
        // frame w covers [wN - (N - lookahead), wN + N + lookahead)
        let w = sine_window();
        let signal: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let frame = gather_frame(&signal, 2, &w);
        // first in-range sample of frame 2 is 2*160 - 120 = 200
        assert_eq!(frame[0], 200.0);
        assert_eq!(frame[319], 519.0);
        // frame 0 starts 120 samples before the signal
        let frame0 = gather_frame(&signal, 0, &w);
        assert!(frame0[..120].iter().all(|&v| v == 0.0));
        assert_eq!(frame0[120], 0.0);
        assert_eq!(frame0[121], 1.0);
    }

    #[test]
    fn round_trip_reconstructs_sine_tone() {
        let w = sine_window();
        let mclt = Mclt::new(160);
        let signal: Vec<f64> = (0..16_000)
            .map(|i| (2.0 * std::f64::consts::PI * 440.0 * i as f64 / 16_000.0).sin())
            .collect();
        let frames = analyze_mdct(&mclt, &signal, &w).unwrap();
        let out = synthesize_signal(&mclt, &frames, &w, signal.len()).unwrap();
        // steady-state region excludes the first and last transition frames
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 320..signal.len() - 320 {
            num += signal[i] * signal[i];
            den += (signal[i] - out[i]) * (signal[i] - out[i]);
        }
        let snr_db = 10.0 * (num / den).log10();
        assert!(snr_db > 200.0, "round-trip SNR {snr_db:.1} dB");
    }
}
