use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::to_json_line;

/// Truncated Fourier coefficients `u_n`, `n = -N..=N`, under the convention
/// `u(x) = sum_n u_n e^{inx}`. The zero mode sits at index `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    n_modes: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralState {
    pub fn zeros(n_modes: usize) -> Self {
        Self {
            n_modes,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1],
        }
    }

    pub fn from_coeffs(n_modes: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * n_modes + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients given for N = {n_modes} (need {})",
                coeffs.len(),
                2 * n_modes + 1
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self { n_modes, coeffs })
    }

    /// Unchecked constructor for internal kernels that already know the length.
    pub(crate) fn from_vec_unchecked(n_modes: usize, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), 2 * n_modes + 1);
        Self { n_modes, coeffs }
    }

    /// `a e^{i n x}`
    pub fn plane_wave(n_modes: usize, n: i64, amplitude: Complex64) -> Result<Self> {
        let mut state = Self::zeros(n_modes);
        state.set(n, amplitude)?;
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    fn index(&self, n: i64) -> Option<usize> {
        let big_n = self.n_modes as i64;
        (n.abs() <= big_n).then(|| (n + big_n) as usize)
    }

    /// Coefficient of mode `n`; zero outside the truncation.
    pub fn get(&self, n: i64) -> Complex64 {
        self.index(n)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set(&mut self, n: i64, value: Complex64) -> Result<()> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let i = self.index(n).ok_or_else(|| {
            Error::InvalidParameter(format!("mode {n} outside |n| <= {}", self.n_modes))
        })?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// `(n, u_n)` pairs in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let big_n = self.n_modes as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i64 - big_n, *c))
    }

    /// Wavenumbers in storage order.
    pub fn wavenumbers(n_modes: usize) -> impl Iterator<Item = i64> {
        let big_n = n_modes as i64;
        -big_n..=big_n
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            n_modes: self.n_modes,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Plain l² distance between coefficient vectors of equal size.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        if self.n_modes != other.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                got: other.n_modes,
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Zero-pads to a larger truncation.
    pub fn extended(&self, n_modes: usize) -> Result<Self> {
        if n_modes < self.n_modes {
            return Err(Error::InvalidParameter(format!(
                "cannot extend N = {} down to {n_modes}",
                self.n_modes
            )));
        }
        let mut out = Self::zeros(n_modes);
        let offset = n_modes - self.n_modes;
        out.coeffs[offset..offset + self.coeffs.len()].copy_from_slice(&self.coeffs);
        Ok(out)
    }

    pub fn write_json<W: Write>(&self, alpha: f64, mut writer: W) -> Result<()> {
        let file = StateFile::from_state(self, alpha);
        writeln!(writer, "{}", to_json_line(&file)?)?;
        Ok(())
    }

    /// Reads a state file, returning the state and its recorded `alpha`.
    pub fn read_json<R: BufRead>(reader: R) -> Result<(Self, f64)> {
        let file: StateFile = serde_json::from_reader(reader)?;
        file.into_state()
    }
}

/// On-disk state layout: `{"alpha", "n_modes", "coeffs": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub alpha: f64,
    pub n_modes: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &SpectralState, alpha: f64) -> Self {
        Self {
            alpha,
            n_modes: state.n_modes,
            coeffs: state.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn into_state(self) -> Result<(SpectralState, f64)> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let state = SpectralState::from_coeffs(self.n_modes, coeffs)
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok((state, self.alpha))
    }
}

/// Values `u(x_j)` at `x_j = 2 pi j / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        if values.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite grid value".into()));
        }
        Ok(Self { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn m_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.values.len() as f64;
        (0..self.values.len()).map(move |j| 2.0 * std::f64::consts::PI * j as f64 / m)
    }
}
