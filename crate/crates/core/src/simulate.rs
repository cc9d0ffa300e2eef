//! Monte-Carlo realizations of Z, histograms, and goodness-of-fit statistics.
//!
//! Normal variates come from `rand_distr::StandardNormal` (ziggurat) driven by
//! ChaCha12. Samples are generated in fixed-size chunks; chunk `i` uses the
//! generator seeded with `seed` on stream `i`, so a batch depends only on
//! `(params, n, seed)` and not on the number of worker threads.

use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ComplexValue, ModelParams};
use crate::quad::{integrate_finite, QuadSpec};

/// Realizations per independently seeded chunk.
pub const CHUNK_LEN: usize = 8192;

/// Largest batch [`sample_z`] will hold in memory; use [`stream_z`] beyond it.
pub const MAX_BATCH_LEN: usize = 50_000_000;

/// Magic prefix of the binary batch format.
pub const BINARY_MAGIC: &[u8; 4] = b"ZPD1";

/// Draws one correlated pair (X, Y).
///
/// X has independent N(0, σ_X²/2) components. Y is a linear function of X
/// plus an independent U with N(0, σ_Y²(1−|μ|²)/2) components, arranged so
/// that E[X·Y] = μ σ_X σ_Y (plain product, no conjugate).
pub fn sample_pair<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> (ComplexValue, ComplexValue) {
    let sx = params.sigma_x * std::f64::consts::FRAC_1_SQRT_2;
    let su = params.sigma_y * (0.5 * params.one_minus_mu2()).sqrt();
    let x_r: f64 = sx * rng.sample::<f64, _>(StandardNormal);
    let x_i: f64 = sx * rng.sample::<f64, _>(StandardNormal);
    let u_r: f64 = su * rng.sample::<f64, _>(StandardNormal);
    let u_i: f64 = su * rng.sample::<f64, _>(StandardNormal);
    let k = params.sigma_y * params.mu_abs / params.sigma_x;
    let (s, c) = params.epsilon.sin_cos();
    let y_r = k * (c * x_r + s * x_i) + u_r;
    let y_i = k * (s * x_r - c * x_i) + u_i;
    (ComplexValue::new(x_r, x_i), ComplexValue::new(y_r, y_i))
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn fill_chunk(params: &ModelParams, seed: u64, chunk: usize, out: &mut [ComplexValue]) {
    let mut rng = chunk_rng(seed, chunk);
    for z in out.iter_mut() {
        *z = (0..params.big_l)
            .map(|_| {
                let (x, y) = sample_pair(params, &mut rng);
                x * y
            })
            .sum();
    }
}

/// A reproducible batch of realizations of Z.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub z: Vec<ComplexValue>,
    pub params: ModelParams,
    pub seed: u64,
    pub n: usize,
}

/// Draws `n` realizations of Z. Parallel over chunks; the result is
/// bit-identical for a given `(params, n, seed)`.
pub fn sample_z(params: &ModelParams, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    if n > MAX_BATCH_LEN {
        return Err(Error::Resource(format!(
            "{n} samples exceed the in-memory budget of {MAX_BATCH_LEN}; use stream_z"
        )));
    }
    let mut z = vec![ComplexValue::new(0.0, 0.0); n];
    z.par_chunks_mut(CHUNK_LEN)
        .enumerate()
        .for_each(|(chunk, out)| fill_chunk(params, seed, chunk, out));
    Ok(SampleBatch {
        z,
        params: *params,
        seed,
        n,
    })
}

/// Streams `n` realizations chunk by chunk, yielding exactly the values
/// [`sample_z`] would produce.
pub fn stream_z<F>(params: &ModelParams, n: usize, seed: u64, mut sink: F) -> Result<()>
where
    F: FnMut(&[ComplexValue]) -> Result<()>,
{
    if n == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let mut buf = vec![ComplexValue::new(0.0, 0.0); CHUNK_LEN];
    let mut done = 0;
    let mut chunk = 0;
    while done < n {
        let len = CHUNK_LEN.min(n - done);
        fill_chunk(params, seed, chunk, &mut buf[..len]);
        sink(&buf[..len])?;
        done += len;
        chunk += 1;
    }
    Ok(())
}

/// Builds a rayon pool honoring the `ZPD_THREADS` cap, if set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("ZPD_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("ZPD_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| Error::Resource(format!("cannot build thread pool: {e}")))
}

impl SampleBatch {
    pub fn amplitudes(&self) -> Vec<f64> {
        amplitudes(&self.z)
    }

    pub fn phases(&self) -> Vec<f64> {
        phases(&self.z)
    }

    pub fn summary(&self) -> BatchSummary {
        summarize(&self.z)
    }
}

pub fn amplitudes(z: &[ComplexValue]) -> Vec<f64> {
    z.iter().map(|v| v.norm()).collect()
}

/// Phases in (−π, π].
pub fn phases(z: &[ComplexValue]) -> Vec<f64> {
    z.iter()
        .map(|v| {
            let t = v.im.atan2(v.re);
            if t <= -PI {
                PI
            } else {
                t
            }
        })
        .collect()
}

/// Sample moments of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatchSummary {
    pub n: usize,
    pub mean_re: f64,
    pub mean_im: f64,
    /// Standard errors of the real and imaginary means.
    pub se_re: f64,
    pub se_im: f64,
    pub mean_abs2: f64,
}

pub fn summarize(z: &[ComplexValue]) -> BatchSummary {
    let n = z.len() as f64;
    let mean: ComplexValue = z.iter().sum::<ComplexValue>() / n;
    let (vr, vi, a2) = z.iter().fold((0.0, 0.0, 0.0), |(vr, vi, a2), v| {
        (vr + (v.re - mean.re).powi(2), vi + (v.im - mean.im).powi(2), a2 + v.norm_sqr())
    });
    let denom = (n - 1.0).max(1.0);
    BatchSummary {
        n: z.len(),
        mean_re: mean.re,
        mean_im: mean.im,
        se_re: (vr / denom / n).sqrt(),
        se_im: (vi / denom / n).sqrt(),
        mean_abs2: a2 / n,
    }
}

// ---------------------------------------------------------------------------
// Batch files.

/// CSV with header `re,im`, 17 significant digits per value.
pub fn write_csv<W: Write>(z: &[ComplexValue], mut w: W) -> Result<()> {
    writeln!(w, "re,im")?;
    for v in z {
        writeln!(w, "{},{}", fmt17(v.re), fmt17(v.im))?;
    }
    Ok(())
}

/// `ZPD1` followed by little-endian f64 (re, im) pairs.
pub fn write_binary<W: Write>(z: &[ComplexValue], mut w: W) -> Result<()> {
    w.write_all(BINARY_MAGIC)?;
    for v in z {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Vec<ComplexValue>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 4 || &bytes[..4] != BINARY_MAGIC {
        return Err(Error::Parse("missing ZPD1 magic".into()));
    }
    let body = &bytes[4..];
    if body.len() % 16 != 0 {
        return Err(Error::Parse(format!("truncated ZPD1 body of {} bytes", body.len())));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8-byte slice"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8-byte slice"));
            ComplexValue::new(re, im)
        })
        .collect())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ComplexValue>> {
    let mut lines = BufReader::new(r).lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "re,im" => {}
        Some(Ok(h)) => return Err(Error::Parse(format!("expected header 're,im', found {h:?}"))),
        Some(Err(e)) => return Err(e.into()),
        None => return Err(Error::Parse("empty CSV".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = || -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing column", i + 2)))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
        };
        let re = next()?;
        let im = next()?;
        out.push(ComplexValue::new(re, im));
    }
    Ok(out)
}

/// Reads either format, recognised by its leading bytes.
pub fn read_batch_file(path: &std::path::Path) -> Result<Vec<ComplexValue>> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(&bytes[..])
    } else if bytes.starts_with(b"re,im") {
        read_csv(&bytes[..])
    } else {
        Err(Error::Parse(format!("{}: neither ZPD1 nor re,im CSV", path.display())))
    }
}

/// Formats with 17 significant digits, enough to round-trip any f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------------------
// Histograms.

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram1D {
    pub edges: Vec<f64>,
    /// Density per bin (count / (in-range total · width)) when normalized.
    pub mass: Vec<f64>,
    pub normalized: bool,
    /// Values that fell outside the range.
    pub clipped: usize,
}

impl Histogram1D {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn total(&self) -> f64 {
        self.edges.windows(2).zip(&self.mass).map(|(w, m)| m * (w[1] - w[0])).sum()
    }
}

fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect()
}

fn bin_index(x: f64, lo: f64, hi: f64, bins: usize) -> Option<usize> {
    if !(x >= lo && x <= hi) {
        return None;
    }
    let i = ((x - lo) / (hi - lo) * bins as f64) as usize;
    Some(i.min(bins - 1))
}

fn check_range(bins: usize, range: (f64, f64)) -> Result<()> {
    if bins == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    if !(range.0.is_finite() && range.1.is_finite() && range.1 > range.0) {
        return Err(Error::domain(format!("invalid histogram range {range:?}")));
    }
    Ok(())
}

/// Normalized density histogram over `range` with `bins` equal bins.
pub fn histogram_1d(values: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram1D> {
    check_range(bins, range)?;
    if values.is_empty() {
        return Err(Error::domain("histogram of empty input"));
    }
    let mut counts = vec![0u64; bins];
    let mut clipped = 0;
    for &v in values {
        match bin_index(v, range.0, range.1, bins) {
            Some(i) => counts[i] += 1,
            None => clipped += 1,
        }
    }
    let kept = (values.len() - clipped) as f64;
    if kept == 0.0 {
        return Err(Error::domain("no values inside the histogram range"));
    }
    let edges = uniform_edges(range.0, range.1, bins);
    let mass = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (kept * (w[1] - w[0])))
        .collect();
    Ok(Histogram1D {
        edges,
        mass,
        normalized: true,
        clipped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram2D {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major densities, `mass[ix * ny + iy]`.
    pub mass: Vec<f64>,
    pub normalized: bool,
    pub clipped: usize,
}

impl Histogram2D {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.mass[ix * (self.y_edges.len() - 1) + iy]
    }

    pub fn total(&self) -> f64 {
        let ny = self.y_edges.len() - 1;
        self.x_edges
            .windows(2)
            .enumerate()
            .map(|(ix, wx)| {
                self.y_edges
                    .windows(2)
                    .enumerate()
                    .map(|(iy, wy)| self.mass[ix * ny + iy] * (wx[1] - wx[0]) * (wy[1] - wy[0]))
                    .sum::<f64>()
            })
            .sum()
    }
}

pub fn histogram_2d(
    points: &[ComplexValue],
    bins: (usize, usize),
    x_range: (f64, f64),
    y_range: (f64, f64),
) -> Result<Histogram2D> {
    check_range(bins.0, x_range)?;
    check_range(bins.1, y_range)?;
    if points.is_empty() {
        return Err(Error::domain("histogram of empty input"));
    }
    let (nx, ny) = bins;
    let mut counts = vec![0u64; nx * ny];
    let mut clipped = 0;
    for p in points {
        match (
            bin_index(p.re, x_range.0, x_range.1, nx),
            bin_index(p.im, y_range.0, y_range.1, ny),
        ) {
            (Some(i), Some(j)) => counts[i * ny + j] += 1,
            _ => clipped += 1,
        }
    }
    let kept = (points.len() - clipped) as f64;
    if kept == 0.0 {
        return Err(Error::domain("no points inside the histogram range"));
    }
    let x_edges = uniform_edges(x_range.0, x_range.1, nx);
    let y_edges = uniform_edges(y_range.0, y_range.1, ny);
    let cell = (x_edges[1] - x_edges[0]) * (y_edges[1] - y_edges[0]);
    let mass = counts.iter().map(|&c| c as f64 / (kept * cell)).collect();
    Ok(Histogram2D {
        x_edges,
        y_edges,
        mass,
        normalized: true,
        clipped,
    })
}

// ---------------------------------------------------------------------------
// Goodness of fit.

/// Number of knots in a [`CdfTable`].
pub const CDF_KNOTS: usize = 4096;

/// Cumulative integral of a density on a bounded support, tabulated on
/// uniform knots and interpolated by cubic Hermite segments whose slopes
/// are the density itself.
#[derive(Debug, Clone)]
pub struct CdfTable {
    knots: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

impl CdfTable {
    pub fn build<F>(pdf: F, support: (f64, f64)) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let (lo, hi) = support;
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::domain(format!("invalid support {support:?}")));
        }
        let knots = uniform_edges(lo, hi, CDF_KNOTS - 1);
        let spec = QuadSpec::default().with_abs_tol(1e-14);
        let eval = |x: f64| pdf(x).unwrap_or(f64::NAN);
        let pieces = knots
            .par_windows(2)
            .map(|w| integrate_finite(eval, w[0], w[1], &spec).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        let mut cdf = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for p in pieces {
            acc += p;
            cdf.push(acc);
        }
        let pdf_vals = knots
            .iter()
            .map(|&x| pdf(x).map(|v| if v.is_finite() { v } else { 0.0 }))
            .collect::<Result<Vec<_>>>()?;
        Ok(CdfTable {
            knots,
            cdf,
            pdf: pdf_vals,
        })
    }

    /// Total mass on the support.
    pub fn total(&self) -> f64 {
        *self.cdf.last().expect("non-empty table")
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().expect("non-empty table"))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return self.total();
        }
        let h = self.knots[1] - self.knots[0];
        let i = (((x - lo) / h) as usize).min(self.knots.len() - 2);
        let t = (x - self.knots[i]) / h;
        let (y0, y1) = (self.cdf[i], self.cdf[i + 1]);
        let (m0, m1) = (self.pdf[i] * h, self.pdf[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
        v.clamp(y0.min(y1), y0.max(y1))
    }

    /// Smallest x with eval(x) ≥ p, by bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        let (mut a, mut b) = self.support();
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.eval(m) < p {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-15 * b.abs().max(1.0) {
                break;
            }
        }
        b
    }
}

/// Goodness-of-fit statistics of a sample against an analytic density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_stat: f64,
    pub chi2_stat: f64,
    pub chi2_dof: usize,
    pub tv_distance: f64,
    pub n: usize,
    /// One-sample KS critical value at the 1% level, 1.63/√n.
    pub ks_critical: f64,
    pub pass: bool,
}

/// 1% critical value of the one-sample KS statistic (asymptotic).
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Bins used for the total-variation comparison.
pub const TV_BINS: usize = 100;

/// Compares `samples` with the density `pdf` on `support`.
///
/// KS uses the tabulated analytic CDF; chi-square uses bins of equal
/// analytic mass with at least 20 expected counts each; TV compares a
/// normalized histogram with the bin-averaged density.
pub fn gof<F>(samples: &[f64], pdf: F, support: (f64, f64)) -> Result<GofReport>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let table = CdfTable::build(pdf, support)?;
    gof_with_table(samples, &table)
}

pub fn gof_with_table(samples: &[f64], table: &CdfTable) -> Result<GofReport> {
    if samples.is_empty() {
        return Err(Error::domain("goodness of fit needs samples"));
    }
    let n = samples.len();
    let nf = n as f64;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);

    let ks_stat = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = table.eval(x);
            ((i + 1) as f64 / nf - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);

    // Chi-square on equal-mass bins.
    let total = table.total();
    let k = (n / 20).clamp(2, 100);
    let mut boundaries = Vec::with_capacity(k + 1);
    boundaries.push(f64::NEG_INFINITY);
    for j in 1..k {
        boundaries.push(table.quantile(total * j as f64 / k as f64));
    }
    boundaries.push(f64::INFINITY);
    let mut observed = vec![0usize; k];
    let mut j = 0;
    for &x in &sorted {
        while j + 1 < k && x >= boundaries[j + 1] {
            j += 1;
        }
        observed[j] += 1;
    }
    let expected = nf * total / k as f64;
    let chi2_stat = observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();

    // Total variation against bin-averaged density over the sample span.
    let (lo, hi) = table.support();
    let top = sorted[n - 1].min(hi).max(lo + (hi - lo) * 1e-6);
    let hist = histogram_1d(&sorted, TV_BINS, (lo, top))?;
    let kept = (n - hist.clipped) as f64 / nf;
    let mut tv = 0.0;
    for (w, h) in hist.edges.windows(2).zip(&hist.mass) {
        let width = w[1] - w[0];
        let analytic = (table.eval(w[1]) - table.eval(w[0])) / width;
        tv += (h * kept - analytic).abs() * width;
    }
    tv += (total - (table.eval(top) - table.eval(lo))).abs();
    tv += 1.0 - kept;
    let tv_distance = (0.5 * tv).min(1.0);

    let ks_critical = ks_critical_1pct(n);
    Ok(GofReport {
        ks_stat,
        chi2_stat,
        chi2_dof: k - 1,
        tv_distance,
        n,
        ks_critical,
        pass: ks_stat < ks_critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdfs;

    #[test]
    fn uncorrelated_pairs_are_uncorrelated() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 0.0, 1).unwrap();
        let n = 1_000_000;
        let mut rng = chunk_rng(7, 0);
        let mut acc = ComplexValue::new(0.0, 0.0);
        for _ in 0..n {
            let (x, y) = sample_pair(&p, &mut rng);
            acc += x * y;
        }
        let corr = acc / n as f64;
        assert!(corr.norm() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn pair_moments_match_parameters() {
        let p = ModelParams::reference(1);
        let n = 1_000_000usize;
        let mut rng = chunk_rng(11, 3);
        let mut xy = Vec::with_capacity(n);
        let mut vy = 0.0;
        let mut vx = 0.0;
        for _ in 0..n {
            let (x, y) = sample_pair(&p, &mut rng);
            xy.push(x * y / p.sigma_prod());
            vy += y.norm_sqr();
            vx += x.norm_sqr();
        }
        let s = summarize(&xy);
        let mu = p.mu();
        assert!((s.mean_re - mu.re).abs() < 3.0 * s.se_re, "{s:?}");
        assert!((s.mean_im - mu.im).abs() < 3.0 * s.se_im, "{s:?}");
        // E|Y|² = σ_Y², with Var|Y|² = σ_Y⁴ for a circular Gaussian.
        let se_y = 2.25 / (n as f64).sqrt();
        assert!((vy / n as f64 - 2.25).abs() < 3.0 * se_y);
        let se_x = 0.49 / (n as f64).sqrt();
        assert!((vx / n as f64 - 0.49).abs() < 3.0 * se_x);
    }

    #[test]
    fn batch_mean_matches_expectation() {
        let p = ModelParams::reference(5);
        let b = sample_z(&p, 1_000_000, 2024).unwrap();
        let s = b.summary();
        let expected = p.mu() * (5.0 * p.sigma_prod());
        assert!((expected.re - 2.2733).abs() < 1e-4 && (expected.im - 1.3125).abs() < 1e-4);
        assert!((s.mean_re - expected.re).abs() < 3.0 * s.se_re);
        assert!((s.mean_im - expected.im).abs() < 3.0 * s.se_im);

        let q = ModelParams::new(1.0, 1.0, 0.0, 0.0, 1).unwrap();
        let s = sample_z(&q, 1_000_000, 5).unwrap().summary();
        assert!(s.mean_re.abs() < 3.0 * s.se_re && s.mean_im.abs() < 3.0 * s.se_im);
    }

    #[test]
    fn batches_are_reproducible_and_thread_independent() {
        let p = ModelParams::reference(3);
        let a = sample_z(&p, 50_000, 42).unwrap();
        let b = sample_z(&p, 50_000, 42).unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = single.install(|| sample_z(&p, 50_000, 42).unwrap());
        assert_eq!(a.z, c.z);
        let mut streamed = Vec::new();
        stream_z(&p, 50_000, 42, |chunk| {
            streamed.extend_from_slice(chunk);
            Ok(())
        })
        .unwrap();
        assert_eq!(a.z, streamed);
        assert_ne!(a.z, sample_z(&p, 50_000, 43).unwrap().z);
    }

    #[test]
    fn sample_count_limits() {
        let p = ModelParams::reference(1);
        assert!(matches!(sample_z(&p, 0, 1), Err(Error::Domain(_))));
        assert!(matches!(sample_z(&p, MAX_BATCH_LEN + 1, 1), Err(Error::Resource(_))));
    }

    #[test]
    fn histogram_basics() {
        let h = histogram_1d(&[0.3], 1, (0.0, 0.5)).unwrap();
        assert!((h.mass[0] - 2.0).abs() < 1e-15);
        assert!(histogram_1d(&[], 3, (0.0, 1.0)).is_err());
        assert!(histogram_1d(&[0.1], 0, (0.0, 1.0)).is_err());

        let mut rng = chunk_rng(9, 0);
        let draws: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
        let h = histogram_1d(&draws, 10, (0.0, 1.0)).unwrap();
        assert!(h.mass.iter().all(|m| (m - 1.0).abs() < 0.02));
        assert!((h.total() - 1.0).abs() < 1e-12);

        let h = histogram_1d(&[0.1, 0.2, 5.0], 4, (0.0, 1.0)).unwrap();
        assert_eq!(h.clipped, 1);
        assert!((h.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_2d_normalized() {
        let p = ModelParams::reference(2);
        let b = sample_z(&p, 20_000, 1).unwrap();
        let h = histogram_2d(&b.z, (80, 80), (-15.0, 15.0), (-15.0, 15.0)).unwrap();
        assert!((h.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phases_are_in_principal_range() {
        let z = [
            ComplexValue::new(-1.0, -0.0),
            ComplexValue::new(-1.0, 0.0),
            ComplexValue::new(0.0, -1.0),
        ];
        let t = phases(&z);
        assert_eq!(t[0], PI);
        assert_eq!(t[1], PI);
        assert!((t[2] + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn file_round_trips() {
        let p = ModelParams::reference(2);
        let b = sample_z(&p, 1000, 3).unwrap();
        let mut csv = Vec::new();
        write_csv(&b.z, &mut csv).unwrap();
        assert_eq!(read_csv(&csv[..]).unwrap(), b.z);
        let mut bin = Vec::new();
        write_binary(&b.z, &mut bin).unwrap();
        assert_eq!(&bin[..4], b"ZPD1");
        assert_eq!(bin.len(), 4 + 16 * 1000);
        assert_eq!(read_binary(&bin[..]).unwrap(), b.z);
        bin[0] = b'X';
        assert!(matches!(read_binary(&bin[..]), Err(Error::Parse(_))));
        assert!(matches!(read_csv(&b"x,y\n1,2\n"[..]), Err(Error::Parse(_))));
    }

    #[test]
    fn cdf_table_of_exponential() {
        let t = CdfTable::build(|x: f64| Ok((-x).exp()), (0.0, 40.0)).unwrap();
        for x in [0.01, 0.5, 1.0, 3.3, 10.0] {
            assert!((t.eval(x) - (1.0 - (-x as f64).exp())).abs() < 1e-9);
        }
        assert!((t.quantile(0.5) - 2f64.ln()).abs() < 1e-8);
    }

    /// Rejection sampling from the amplitude density under a uniform envelope.
    fn rejection_amplitudes(p: &ModelParams, n: usize, r_max: f64, seed: u64) -> Vec<f64> {
        let grid: Vec<f64> = (1..=2000).map(|i| r_max * i as f64 / 2000.0).collect();
        let peak = grid.iter().map(|&r| pdfs::amplitude_pdf(p, r).unwrap()).fold(0.0, f64::max) * 1.05;
        let mut rng = chunk_rng(seed, 99);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let r = rng.random::<f64>() * r_max;
            if rng.random::<f64>() * peak < pdfs::amplitude_pdf(p, r).unwrap() {
                out.push(r);
            }
        }
        out
    }

    #[test]
    fn gof_accepts_matched_and_ranks_mismatched() {
        let p = ModelParams::reference(3);
        let r_max = pdfs::amplitude_tail_radius(&p, 1e-12).unwrap();
        let samples = rejection_amplitudes(&p, 20_000, r_max, 17);
        let matched = gof(&samples, |r| pdfs::amplitude_pdf(&p, r), (0.0, r_max)).unwrap();
        assert!(matched.ks_stat < 1.63 / (20_000f64).sqrt(), "{matched:?}");
        assert!(matched.pass);
        assert!(matched.tv_distance >= 0.0 && matched.tv_distance <= 1.0);
        assert_eq!(matched.chi2_dof, 99);

        let wrong = ModelParams { sigma_x: 0.9, ..p };
        let r_wrong = pdfs::amplitude_tail_radius(&wrong, 1e-12).unwrap();
        let mismatched = gof(&samples, |r| pdfs::amplitude_pdf(&wrong, r), (0.0, r_wrong)).unwrap();
        assert!(mismatched.ks_stat > matched.ks_stat);
        assert!(mismatched.chi2_stat > matched.chi2_stat);
        assert!(mismatched.tv_distance > matched.tv_distance);
    }
}
