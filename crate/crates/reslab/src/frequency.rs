//! Frequency analysis of sampled signals, libration diagnostics and
//! Diophantine screening.
//!
//! Frequencies are angular (radians per unit time) throughout.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::angles::wrap;
use crate::error::{Error, Result};
use crate::families::FamilyLabel;
use crate::integrator::Trajectory;

pub const MIN_SAMPLES: usize = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Line {
    pub frequency: f64,
    #[serde(serialize_with = "ser_complex")]
    pub amplitude: Complex64,
}

fn ser_complex<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&c.re)?;
    t.serialize_element(&c.im)?;
    t.end()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencySpectrum {
    /// Sorted by decreasing amplitude.
    pub lines: Vec<Line>,
    /// Windowed power left after subtracting all lines, relative to the input.
    pub residual_power: f64,
}

struct Windowed<'a> {
    w: Vec<f64>,
    dt: f64,
    n: usize,
    _p: std::marker::PhantomData<&'a ()>,
}

impl Windowed<'_> {
    fn new(n: usize, dt: f64) -> Self {
        let w = (0..n).map(|k| 1.0 - (TAU * k as f64 / (n - 1) as f64).cos()).collect();
        Windowed { w, dt, n, _p: std::marker::PhantomData }
    }

    /// `A(omega) = <f, e^{i omega t}>` and its derivative in `omega`.
    fn project(&self, f: &[Complex64], omega: f64) -> (Complex64, Complex64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut da = Complex64::new(0.0, 0.0);
        // rotate by a fixed increment, re-anchored in blocks to bound drift
        let step = Complex64::from_polar(1.0, -omega * self.dt);
        let mut z = Complex64::new(1.0, 0.0);
        for k in 0..self.n {
            if k % 256 == 0 {
                z = Complex64::from_polar(1.0, -omega * self.dt * k as f64);
            }
            let t = k as f64 * self.dt;
            let v = f[k] * z * self.w[k];
            a += v;
            da += v * Complex64::new(0.0, -t);
            z *= step;
        }
        let s = 1.0 / self.n as f64;
        (a * s, da * s)
    }

    fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.n {
            acc += f[k] * g[k].conj() * self.w[k];
        }
        acc / self.n as f64
    }

    fn tone(&self, omega: f64) -> Vec<Complex64> {
        (0..self.n).map(|k| Complex64::from_polar(1.0, omega * self.dt * k as f64)).collect()
    }
}

/// Frequency of the largest peak of the windowed, zero-padded FFT.
fn fft_peak(f: &[Complex64], win: &Windowed, planner: &mut FftPlanner<f64>) -> f64 {
    let m = (4 * win.n).next_power_of_two();
    let mut buf: Vec<Complex64> = (0..m).map(|k| if k < win.n { f[k] * win.w[k] } else { Complex64::new(0.0, 0.0) }).collect();
    planner.plan_fft_forward(m).process(&mut buf);
    let (mut best, mut jb) = (-1.0, 0usize);
    for (j, v) in buf.iter().enumerate() {
        let p = v.norm_sqr();
        if p > best {
            best = p;
            jb = j;
        }
    }
    let j = if jb > m / 2 { jb as f64 - m as f64 } else { jb as f64 };
    TAU * j / (m as f64 * win.dt)
}

/// Root of `d|A|^2/d omega` bracketing the coarse peak.
fn refine(f: &[Complex64], win: &Windowed, omega0: f64) -> f64 {
    let bin = TAU / ((4 * win.n).next_power_of_two() as f64 * win.dt);
    let g = |w: f64| {
        let (a, da) = win.project(f, w);
        (a.conj() * da).re
    };
    let (mut lo, mut hi) = (omega0 - 1.5 * bin, omega0 + 1.5 * bin);
    let (mut glo, mut ghi) = (g(lo), g(hi));
    if glo.signum() == ghi.signum() {
        // no sign change: fall back to golden-section maximisation
        let amp = |w: f64| win.project(f, w).0.norm();
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if amp(c) > amp(d) {
                b = d;
            } else {
                a = c;
            }
        }
        return 0.5 * (a + b);
    }
    for _ in 0..200 {
        let mid = if ghi != glo { (lo * ghi - hi * glo) / (ghi - glo) } else { 0.5 * (lo + hi) };
        let mid = if mid <= lo || mid >= hi { 0.5 * (lo + hi) } else { mid };
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
        // guard against one-sided secant stagnation
        let bis = 0.5 * (lo + hi);
        let gb = g(bis);
        if gb.signum() == glo.signum() {
            lo = bis;
            glo = gb;
        } else {
            hi = bis;
            ghi = gb;
        }
        if hi - lo <= 1e-15 * omega0.abs().max(bin) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Extracts `nlines` spectral lines by iterative peak search and
/// subtraction, then fits all amplitudes jointly.
pub fn naff_frequencies(signal: &[Complex64], dt: f64, nlines: usize) -> Result<FrequencySpectrum> {
    let n = signal.len();
    if n < MIN_SAMPLES {
        return Err(Error::domain(format!("frequency analysis needs at least {MIN_SAMPLES} samples, got {n}")));
    }
    if !(dt > 0.0) || nlines == 0 {
        return Err(Error::domain("sampling step must be positive and at least one line requested"));
    }
    let win = Windowed::new(n, dt);
    let mut planner = FftPlanner::new();
    let total = win.inner(signal, signal).re;
    let mut residual = signal.to_vec();
    let mut freqs: Vec<f64> = Vec::with_capacity(nlines);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for _ in 0..nlines {
        let w0 = fft_peak(&residual, &win, &mut planner);
        let w = refine(&residual, &win, w0);
        // Gram-Schmidt against the tones already removed
        let mut u = win.tone(w);
        for b in &basis {
            let c = win.inner(&u, b);
            for k in 0..n {
                u[k] -= c * b[k];
            }
        }
        let norm = win.inner(&u, &u).re.sqrt();
        if !(norm > 1e-12) {
            break;
        }
        for v in &mut u {
            *v /= norm;
        }
        let c = win.inner(&residual, &u);
        for k in 0..n {
            residual[k] -= c * u[k];
        }
        basis.push(u);
        freqs.push(w);
    }
    let min_sep = 2.0 * TAU / (n as f64 * dt);
    for i in 0..freqs.len() {
        for j in i + 1..freqs.len() {
            if (freqs[i] - freqs[j]).abs() < min_sep {
                return Err(Error::Resolution { f1: freqs[i], f2: freqs[j], min_sep });
            }
        }
    }
    // joint amplitude fit in the windowed inner product
    let tones: Vec<Vec<Complex64>> = freqs.iter().map(|w| win.tone(*w)).collect();
    let m = tones.len();
    let gram = nalgebra::DMatrix::from_fn(m, m, |r, c| win.inner(&tones[c], &tones[r]));
    let rhs = nalgebra::DVector::from_fn(m, |r, _| win.inner(signal, &tones[r]));
    let amps = gram.lu().solve(&rhs).ok_or_else(|| Error::Degeneracy("singular tone Gram matrix".into()))?;
    let mut lines: Vec<Line> = freqs.iter().zip(amps.iter()).map(|(w, a)| Line { frequency: *w, amplitude: *a }).collect();
    lines.sort_by(|a, b| b.amplitude.norm().partial_cmp(&a.amplitude.norm()).unwrap().then(a.frequency.partial_cmp(&b.frequency).unwrap()));
    let residual_power = if total > 0.0 { win.inner(&residual, &residual).re / total } else { 0.0 };
    Ok(FrequencySpectrum { lines, residual_power })
}

/// Positive frequencies and real amplitudes of a real signal (mean removed).
pub fn naff_real(signal: &[f64], dt: f64, nlines: usize) -> Result<Vec<(f64, f64)>> {
    let mean = signal.iter().sum::<f64>() / signal.len().max(1) as f64;
    let z: Vec<Complex64> = signal.iter().map(|x| Complex64::new(x - mean, 0.0)).collect();
    let spec = naff_frequencies(&z, dt, 2 * nlines)?;
    let mut out: Vec<(f64, f64)> = spec
        .lines
        .iter()
        .filter(|l| l.frequency > 0.0)
        .map(|l| (l.frequency, 2.0 * l.amplitude.norm()))
        .collect();
    out.truncate(nlines);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Motion {
    Librating,
    Circulating,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArgumentReport {
    pub name: String,
    pub center: f64,
    pub mean: f64,
    /// Peak-to-peak excursion of the block-averaged argument.
    pub amplitude: f64,
    /// Largest distance from the centre.
    pub max_excursion: f64,
    pub motion: Motion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LibrationReport {
    pub arguments: Vec<ArgumentReport>,
    pub all_librating: bool,
    /// Largest `|n1/n2 - 2|` and `|n2/n3 - 2|` over windows of [`RATE_WINDOW`] blocks.
    pub ratio_deviation: f64,
    /// Reference periods covered.
    pub periods: f64,
}

/// Blocks per window of the mean-motion ratio test.
pub const RATE_WINDOW: usize = 64;

/// The four critical arguments as `(name, coefficients of l, coefficients of g)`.
pub fn critical_arguments() -> [(&'static str, [f64; 3], [f64; 3]); 4] {
    [
        ("delta1+2eta1", [1.0, -2.0, 0.0], [2.0, -2.0, 0.0]),
        ("delta1+eta1", [1.0, -2.0, 0.0], [1.0, -1.0, 0.0]),
        ("delta2+2eta2", [0.0, 1.0, -2.0], [0.0, 2.0, -2.0]),
        ("delta2+eta2", [0.0, 1.0, -2.0], [0.0, 1.0, -1.0]),
    ]
}

/// Values of the critical arguments on a family.
pub fn family_centers(label: FamilyLabel) -> [f64; 4] {
    let a = label.angles();
    [wrap(a[0] + 2.0 * a[2]), wrap(a[0] + a[2]), wrap(a[1] + 2.0 * a[3]), wrap(a[1] + a[3])]
}

/// Classifies the critical arguments of a block-averaged run. An argument
/// librates iff its unwrapped series stays strictly within `pi` of the
/// family value.
pub fn libration_report(traj: &Trajectory, label: FamilyLabel) -> Result<LibrationReport> {
    if traj.is_empty() || traj.means[0].len() < 3 {
        return Err(Error::domain("libration analysis needs a non-empty three-satellite trajectory"));
    }
    let centers = family_centers(label);
    let mut arguments = Vec::with_capacity(4);
    for (k, (name, cl, cg)) in critical_arguments().iter().enumerate() {
        let raw = traj.angle_series(cl, cg);
        let c = centers[k];
        let shift = (wrap(raw[0] - c) + c) - raw[0];
        let xs: Vec<f64> = raw.iter().map(|x| x + shift).collect();
        let (mut lo, mut hi, mut far) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for x in &xs {
            lo = lo.min(*x);
            hi = hi.max(*x);
            far = far.max((x - c).abs());
        }
        arguments.push(ArgumentReport {
            name: name.to_string(),
            center: c,
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
            amplitude: hi - lo,
            max_excursion: far,
            motion: if far < PI { Motion::Librating } else { Motion::Circulating },
        });
    }
    let mut ratio_deviation = 0.0f64;
    let window = RATE_WINDOW.min(traj.len() - 1).max(1);
    let mut start = 0;
    while start + window < traj.len() {
        // rates of the unwrapped mean anomalies over one window
        let (a, b) = (&traj.means[start], &traj.means[start + window]);
        let n: Vec<f64> = (0..3).map(|i| b[i].l - a[i].l).collect();
        ratio_deviation = ratio_deviation.max((n[0] / n[1] - 2.0).abs()).max((n[1] / n[2] - 2.0).abs());
        start += window;
    }
    Ok(LibrationReport {
        all_librating: arguments.iter().all(|a| a.motion == Motion::Librating),
        arguments,
        ratio_deviation,
        periods: traj.times.last().copied().unwrap_or(0.0) / traj.period,
    })
}

/// Distinct libration frequencies seen in `delta1, delta2, eta1, eta2`,
/// strongest first (amplitudes normalised per signal), then sorted ascending.
pub fn libration_frequencies(traj: &Trajectory, count: usize) -> Result<Vec<f64>> {
    let dt = traj.sample_step();
    let series = [
        traj.angle_series(&[1.0, -2.0, 0.0], &[]),
        traj.angle_series(&[0.0, 1.0, -2.0], &[]),
        traj.angle_series(&[], &[1.0, -1.0, 0.0]),
        traj.angle_series(&[], &[0.0, 1.0, -1.0]),
    ];
    let n = traj.len();
    let min_sep = 2.0 * TAU / (n as f64 * dt);
    let mut found: Vec<(f64, f64)> = Vec::new();
    for s in &series {
        let lines = naff_real(s, dt, count)?;
        let top = lines.first().map(|l| l.1).unwrap_or(1.0);
        for (w, a) in lines {
            let rel = a / top;
            match found.iter_mut().find(|(f, _)| (f - w).abs() < min_sep) {
                Some(entry) => entry.1 = entry.1.max(rel),
                None => found.push((w, rel)),
            }
        }
    }
    found.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut out: Vec<f64> = found.into_iter().take(count).map(|x| x.0).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantineParams {
    pub gamma: f64,
    pub tau: f64,
    pub kmax: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiophantineResult {
    pub pass: bool,
    pub worst_k: Vec<i64>,
    pub worst_l: Vec<i64>,
    /// `min |k.omega + l.beta| (|k|_1^tau + 1)`; passes iff `>= gamma`.
    pub margin: f64,
    pub tested: usize,
}

/// Exhaustive test over `0 < |k|_inf <= kmax` and `|l|_1 <= 2`.
pub fn diophantine_check(omega: &[f64], beta: &[f64], dp: &DiophantineParams) -> Result<DiophantineResult> {
    let p = omega.len();
    if p == 0 {
        return Err(Error::domain("no frequencies to test"));
    }
    if dp.kmax < 1 || !(dp.gamma > 0.0) || !(dp.tau > p as f64 - 1.0) {
        return Err(Error::domain(format!(
            "need kmax >= 1, gamma > 0, tau > {} (got {:?})",
            p as f64 - 1.0,
            dp
        )));
    }
    let mut ls: Vec<Vec<i64>> = vec![vec![0; beta.len()]];
    for i in 0..beta.len() {
        for s in [-2i64, -1, 1, 2] {
            let mut l = vec![0; beta.len()];
            l[i] = s;
            ls.push(l);
        }
        for j in i + 1..beta.len() {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut l = vec![0; beta.len()];
                l[i] = si;
                l[j] = sj;
                ls.push(l);
            }
        }
    }
    let km = dp.kmax as i64;
    let width = (2 * km + 1) as usize;
    let total = width.pow(p as u32);
    let mut best = (f64::INFINITY, vec![0; p], vec![0; beta.len()]);
    let mut tested = 0;
    let mut k = vec![0i64; p];
    for idx in 0..total {
        let mut r = idx;
        for v in k.iter_mut() {
            *v = (r % width) as i64 - km;
            r /= width;
        }
        if k.iter().all(|v| *v == 0) {
            continue;
        }
        let kw: f64 = k.iter().zip(omega).map(|(a, b)| *a as f64 * b).sum();
        let norm = k.iter().map(|v| v.unsigned_abs()).sum::<u64>() as f64;
        let weight = norm.powf(dp.tau) + 1.0;
        for l in &ls {
            let lb: f64 = l.iter().zip(beta).map(|(a, b)| *a as f64 * b).sum();
            let m = (kw + lb).abs() * weight;
            tested += 1;
            if m < best.0 {
                best = (m, k.clone(), l.clone());
            }
        }
    }
    Ok(DiophantineResult { pass: best.0 >= dp.gamma, worst_k: best.1, worst_l: best.2, margin: best.0, tested })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tone() {
        let dt = 0.1;
        let z: Vec<Complex64> = (0..4096).map(|k| Complex64::from_polar(1.0, 0.3 * dt * k as f64)).collect();
        let s = naff_frequencies(&z, dt, 1).unwrap();
        assert!((s.lines[0].frequency - 0.3).abs() < 3e-10, "{}", s.lines[0].frequency);
        assert!((s.lines[0].amplitude.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn resonant_pair_fails() {
        let dp = DiophantineParams { gamma: 1e-3, tau: 2.0, kmax: 5 };
        let r = diophantine_check(&[1.0, 2.0], &[], &dp).unwrap();
        assert!(!r.pass);
        assert_eq!(r.margin, 0.0);
    }
}
