//! Browser bindings. A [`Playground`] owns one random stream and the ensemble
//! currently on screen; every call advances the stream, so a page reload with
//! the same seed replays the same pictures.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use airy_gibbs::ensemble::{edge_scale, parabolic_shift, sample_watermelon_dyson};
use airy_gibbs::lpp::{endpoint_index, rescale_profile, sample_passage_profile};
use airy_gibbs::resample::{gibbs_resample, ResampleOptions};
use airy_gibbs::rng::SimRng;
use airy_gibbs::{LineEnsemble, RngSeed};
use wasm_bindgen::prelude::*;

/// Grid points per unit of scaled time in the displayed window.
const POINTS_PER_UNIT: f64 = 64.0;

#[wasm_bindgen]
pub struct Playground {
    rng: SimRng,
    lines: Option<LineEnsemble>,
    big_n: usize,
    last_attempts: usize,
}

/// Top-to-bottom lines of a parabolically shifted ensemble, row-major, each
/// row `times().len()` long.
fn flatten(ens: &LineEnsemble) -> Vec<f64> {
    parabolic_shift(ens).lines().concat()
}

impl Playground {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            rng: RngSeed::new(seed, 0).rng(),
            lines: None,
            big_n: 0,
            last_attempts: 0,
        }
    }

    /// Samples an `big_n`-line watermelon and keeps its top `keep` lines,
    /// edge scaled onto `[-window, window]`.
    pub fn sample(&mut self, big_n: usize, keep: usize, window: f64) -> Result<(), String> {
        if keep == 0 || keep > big_n {
            return Err(format!("keep must lie in 1..={big_n}"));
        }
        let nf = big_n as f64;
        let h = nf.powf(2.0 / 3.0);
        let m = ((8.0 * nf).ceil() as usize).max(64);
        if h * window > nf {
            return Err(format!("window {window} exceeds the watermelon for N = {big_n}"));
        }
        let ens = sample_watermelon_dyson(big_n, nf, m, 1.0, &mut self.rng).map_err(|e| e.to_string())?;
        let m_out = (2.0 * window * POINTS_PER_UNIT).round() as usize;
        let scaled = edge_scale(&ens, nf, window, m_out).map_err(|e| e.to_string())?;
        let top = LineEnsemble::new(-window, window, scaled.lines()[..keep].to_vec()).map_err(|e| e.to_string())?;
        self.lines = Some(top);
        self.big_n = big_n;
        Ok(())
    }

    /// Resamples lines `top..=bottom` on the grid interval nearest `[a, b]`,
    /// conditioned on the line below `bottom`. Returns the attempts used.
    pub fn resample(&mut self, top: usize, bottom: usize, a: f64, b: f64) -> Result<usize, String> {
        let ens = self.lines.as_ref().ok_or("sample an ensemble first")?;
        if bottom + 1 >= ens.k() {
            return Err("the resampled block needs a line below it".into());
        }
        let snap = |t: f64| {
            let j = ((t - ens.t_start()) / ens.dt()).round().clamp(0.0, ens.m() as f64);
            ens.time(j as usize)
        };
        let (a, b) = (snap(a.min(b)), snap(a.max(b)));
        if a >= b {
            return Err("interval shorter than one grid step".into());
        }
        let r = gibbs_resample(ens, top..=bottom, a, b, &ResampleOptions::default(), &mut self.rng)
            .map_err(|e| e.to_string())?;
        self.lines = Some(r.ensemble);
        self.last_attempts = r.attempts;
        Ok(r.attempts)
    }

    /// Rescaled last passage profile `(u, value)` pairs flattened, followed
    /// by the endpoint location. Each call draws a fresh environment.
    pub fn passage(&mut self, n: usize, q: f64) -> Result<Vec<f64>, String> {
        let prof = sample_passage_profile(n, q, &mut self.rng).map_err(|e| e.to_string())?;
        let r = rescale_profile(&prof, q).map_err(|e| e.to_string())?;
        let (i, _) = endpoint_index(&r);
        let mut out: Vec<f64> = r.points().iter().flat_map(|&(u, v)| [u, v]).collect();
        out.push(r.points()[i].0);
        Ok(out)
    }

    pub fn ensemble(&self) -> Option<&LineEnsemble> {
        self.lines.as_ref()
    }
}

#[wasm_bindgen]
impl Playground {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32) -> Playground {
        Self::with_seed(seed as u64)
    }

    /// Draws a watermelon and shows its top `keep` lines near the edge.
    pub fn watermelon(&mut self, big_n: usize, keep: usize, window: f64) -> Result<(), JsError> {
        self.sample(big_n, keep, window).map_err(|e| JsError::new(&e))
    }

    /// Gibbs resamples a block of lines on `[a, b]`.
    #[wasm_bindgen(js_name = resampleBlock)]
    pub fn resample_block(&mut self, top: usize, bottom: usize, a: f64, b: f64) -> Result<usize, JsError> {
        self.resample(top, bottom, a, b).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = lastPassage)]
    pub fn last_passage(&mut self, n: usize, q: f64) -> Result<Vec<f64>, JsError> {
        self.passage(n, q).map_err(|e| JsError::new(&e))
    }

    pub fn times(&self) -> Vec<f64> {
        self.lines
            .as_ref()
            .map(|e| (0..=e.m()).map(|j| e.time(j)).collect())
            .unwrap_or_default()
    }

    /// Displayed lines `sqrt(2) D(t) + t^2`, row-major.
    pub fn values(&self) -> Vec<f64> {
        self.lines.as_ref().map(flatten).unwrap_or_default()
    }

    #[wasm_bindgen(js_name = lineCount)]
    pub fn line_count(&self) -> usize {
        self.lines.as_ref().map_or(0, |e| e.k())
    }

    #[wasm_bindgen(js_name = lastAttempts)]
    pub fn last_attempts(&self) -> usize {
        self.last_attempts
    }
}
