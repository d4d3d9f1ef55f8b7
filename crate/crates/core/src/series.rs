//! Time series of (target probability, fidelity) for a single realization.

/// One realization's sampled observables: target probability `p` and
/// fidelity against the ideal evolution, on an increasing iteration grid
/// that always includes `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationSeries {
    pub sample_times: Vec<u32>,
    pub p: Vec<f64>,
    pub fidelity: Vec<f64>,
}

impl RealizationSeries {
    pub(crate) fn with_capacity(n: usize) -> Self {
        Self {
            sample_times: Vec::with_capacity(n),
            p: Vec::with_capacity(n),
            fidelity: Vec::with_capacity(n),
        }
    }

    pub(crate) fn push(&mut self, t: u32, p: f64, fidelity: f64) {
        self.sample_times.push(t);
        self.p.push(p);
        self.fidelity.push(fidelity);
    }

    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }
}

/// Borrowed view of any (times, p, fidelity) triple — a realization, an
/// ensemble's mean curves, or formula-evaluated curves.
#[derive(Debug, Clone, Copy)]
pub struct SeriesView<'a> {
    pub times: &'a [u32],
    pub p: &'a [f64],
    pub f: &'a [f64],
}

impl<'a> From<&'a RealizationSeries> for SeriesView<'a> {
    fn from(s: &'a RealizationSeries) -> Self {
        SeriesView {
            times: &s.sample_times,
            p: &s.p,
            f: &s.fidelity,
        }
    }
}

impl<'a> From<&'a crate::ensemble::EnsembleSeries> for SeriesView<'a> {
    fn from(s: &'a crate::ensemble::EnsembleSeries) -> Self {
        SeriesView {
            times: &s.sample_times,
            p: &s.p_mean,
            f: &s.f_mean,
        }
    }
}

/// The grid `0, s, 2s, …` up to and including the largest multiple of
/// `sample_every` that is ≤ `t_max`.
pub fn sample_grid(t_max: u32, sample_every: u32) -> Vec<u32> {
    (0..=t_max / sample_every).map(|k| k * sample_every).collect()
}
