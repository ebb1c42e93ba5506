//! Robust vertex fitting with track classification on synthetic events.
//!
//! Each track contributes an affine distance `d_i(v) = c_i + a_iᵀ v` with a
//! known standard error `σ_i`; the vertex minimizes `Σ ρ(d_i/σ_i)` by
//! annealed IRLS started from the least-squares vertex. Tracks whose final
//! weight exceeds one half are classified as inliers.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::irls::{fit_linear, weighted_ls, AnnealingSchedule, FitResult, IrlsConfig};
use crate::linalg::Matrix;
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackLabel {
    Primary,
    Secondary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    offset: f64,
    direction: Vec<f64>,
    sigma: f64,
    label: TrackLabel,
}

impl Track {
    /// `direction` must be a unit vector to within 1e-12.
    pub fn new(offset: f64, direction: Vec<f64>, sigma: f64, label: TrackLabel) -> Result<Self> {
        if !offset.is_finite() || direction.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("track parameters"));
        }
        let norm = sqrt(direction.iter().map(|x| x * x).sum());
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "track direction must be a unit vector",
            ));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter("track sigma must be positive"));
        }
        Ok(Self {
            offset,
            direction,
            sigma,
            label,
        })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn label(&self) -> TrackLabel {
        self.label
    }

    /// Signed distance `c + aᵀv`.
    pub fn distance(&self, v: &[f64]) -> f64 {
        self.offset
            + self
                .direction
                .iter()
                .zip(v)
                .map(|(a, x)| a * x)
                .sum::<f64>()
    }

    pub fn residual(&self, v: &[f64]) -> f64 {
        self.distance(v) / self.sigma
    }

    /// Same track with the vertex frame shifted by `t`: distances at `v + t`
    /// equal the old distances at `v`.
    pub fn shifted(&self, t: &[f64]) -> Self {
        let dot: f64 = self.direction.iter().zip(t).map(|(a, x)| a * x).sum();
        Self {
            offset: self.offset - dot,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexEvent {
    pub tracks: Vec<Track>,
    pub true_vertex: Vec<f64>,
}

impl VertexEvent {
    pub fn dim(&self) -> usize {
        self.true_vertex.len()
    }

    /// Regression form: `-c_i ≈ a_iᵀ v` with standard error `σ_i`.
    fn regression(&self) -> Result<(Matrix, Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        if self.tracks.len() < d {
            return Err(Error::TooFewPoints {
                needed: d,
                got: self.tracks.len(),
            });
        }
        let mut rows = Vec::with_capacity(self.tracks.len());
        for t in &self.tracks {
            if t.direction.len() != d {
                return Err(Error::Dimension(
                    "track direction does not match vertex dimension",
                ));
            }
            rows.push(t.direction.clone());
        }
        let design = Matrix::from_rows(&rows)?;
        let response = self.tracks.iter().map(|t| -t.offset).collect();
        let sigmas = self.tracks.iter().map(|t| t.sigma).collect();
        Ok((design, response, sigmas))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Inlier,
    Outlier,
}

impl Classification {
    /// Inlier iff `w > 0.5`; a weight of exactly one half is an outlier.
    pub fn from_weight(w: f64) -> Self {
        if w > 0.5 {
            Classification::Inlier
        } else {
            Classification::Outlier
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexFit {
    pub vertex: Vec<f64>,
    pub track_weights: Vec<f64>,
    pub classification: Vec<Classification>,
    pub fit: FitResult,
}

/// Least-squares vertex.
pub fn ls_vertex(event: &VertexEvent) -> Result<Vec<f64>> {
    let (a, y, s) = event.regression()?;
    weighted_ls(&a, &y, &s)
}

/// Annealed N-type (or other kernel) vertex fit started from the LS vertex.
pub fn fit_vertex(event: &VertexEvent, config: &IrlsConfig) -> Result<VertexFit> {
    let (a, y, s) = event.regression()?;
    let fit = fit_linear(&a, &y, &s, config, None)?;
    Ok(VertexFit {
        vertex: fit.estimate.clone(),
        track_weights: fit.weights.clone(),
        classification: fit
            .weights
            .iter()
            .map(|&w| Classification::from_weight(w))
            .collect(),
        fit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub n_primary: usize,
    pub n_secondary: usize,
    pub dim: usize,
    pub sigma_track: f64,
    pub secondary_displacement: f64,
    /// Standard deviation of each coordinate of the true vertex.
    pub vertex_spread: f64,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_primary: 20,
            n_secondary: 8,
            dim: 3,
            sigma_track: 0.01,
            secondary_displacement: 0.3,
            vertex_spread: 0.05,
            seed: 1,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 2 || self.dim == 3) {
            return Err(Error::InvalidParameter("vertex dimension must be 2 or 3"));
        }
        if self.n_primary < self.dim {
            return Err(Error::InvalidParameter(
                "need at least as many primary tracks as dimensions",
            ));
        }
        if !(self.sigma_track.is_finite() && self.sigma_track >= 0.0) {
            return Err(Error::InvalidParameter("sigma_track must be non-negative"));
        }
        if !(self.secondary_displacement.is_finite()
            && self.vertex_spread.is_finite()
            && self.vertex_spread >= 0.0)
        {
            return Err(Error::InvalidParameter(
                "displacement and spread must be finite",
            ));
        }
        Ok(())
    }

    /// `5 σ / √n_primary`, the default radius for counting a vertex as found.
    pub fn default_radius(&self) -> f64 {
        5.0 * self.sigma_track / sqrt(self.n_primary as f64)
    }
}

fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = sqrt(v.iter().map(|x| x * x).sum());
        if norm > 1e-8 {
            let mut u: Vec<f64> = v.iter().map(|x| x / norm).collect();
            // Renormalize once more so |u| = 1 to the last bit.
            let n2 = sqrt(u.iter().map(|x| x * x).sum());
            u.iter_mut().for_each(|x| *x /= n2);
            return u;
        }
    }
}

fn track_through<R: Rng + ?Sized>(
    rng: &mut R,
    point: &[f64],
    sigma: f64,
    noise: &Option<Normal<f64>>,
    label: TrackLabel,
) -> Result<Track> {
    let a = unit_vector(rng, point.len());
    let proj: f64 = a.iter().zip(point).map(|(x, p)| x * p).sum();
    let err = noise.as_ref().map_or(0.0, |n| n.sample(rng));
    // A zero-noise simulation still needs a positive nominal error.
    let s = if sigma > 0.0 { sigma } else { 1.0 };
    Track::new(-proj + err, a, s, label)
}

/// Draws one event with `rng`.
pub fn simulate_event_with<R: Rng + ?Sized>(
    config: &SimulationConfig,
    rng: &mut R,
) -> Result<VertexEvent> {
    config.validate()?;
    let d = config.dim;
    let spread = if config.vertex_spread > 0.0 {
        Some(
            Normal::new(0.0, config.vertex_spread)
                .map_err(|_| Error::InvalidParameter("vertex_spread"))?,
        )
    } else {
        None
    };
    let true_vertex: Vec<f64> = (0..d)
        .map(|_| spread.as_ref().map_or(0.0, |n| n.sample(rng)))
        .collect();
    let noise = if config.sigma_track > 0.0 {
        Some(
            Normal::new(0.0, config.sigma_track)
                .map_err(|_| Error::InvalidParameter("sigma_track"))?,
        )
    } else {
        None
    };
    let mut tracks = Vec::with_capacity(config.n_primary + config.n_secondary);
    for _ in 0..config.n_primary {
        tracks.push(track_through(
            rng,
            &true_vertex,
            config.sigma_track,
            &noise,
            TrackLabel::Primary,
        )?);
    }
    if config.n_secondary > 0 {
        let u = unit_vector(rng, d);
        let decay: Vec<f64> = true_vertex
            .iter()
            .zip(&u)
            .map(|(v, x)| v + config.secondary_displacement * x)
            .collect();
        for _ in 0..config.n_secondary {
            tracks.push(track_through(
                rng,
                &decay,
                config.sigma_track,
                &noise,
                TrackLabel::Secondary,
            )?);
        }
    }
    Ok(VertexEvent {
        tracks,
        true_vertex,
    })
}

/// Seed of the `index`-th event of a run.
pub fn event_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One event reproducible from `config.seed`.
pub fn simulate_event(config: &SimulationConfig) -> Result<VertexEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    simulate_event_with(config, &mut rng)
}

/// `n` events; event `i` uses `event_seed(config.seed, i)`.
pub fn simulate_events(config: &SimulationConfig, n: usize) -> Result<Vec<VertexEvent>> {
    (0..n as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(event_seed(config.seed, i));
            simulate_event_with(config, &mut rng)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    NoAnnealing { t: f64 },
    Annealing { t_end: f64 },
}

impl Scheme {
    /// The four rows of the classification table.
    pub const TABLE: [Scheme; 4] = [
        Scheme::NoAnnealing { t: 1.0 },
        Scheme::NoAnnealing { t: 0.01 },
        Scheme::Annealing { t_end: 1.0 },
        Scheme::Annealing { t_end: 0.01 },
    ];

    /// Schedule of this scheme; annealing rows take `t0`, `q` and `ε_T`
    /// from `annealing`.
    pub fn schedule(&self, annealing: &AnnealingSchedule) -> Result<AnnealingSchedule> {
        match *self {
            Scheme::NoAnnealing { t } => AnnealingSchedule::fixed(t),
            Scheme::Annealing { t_end } => {
                AnnealingSchedule::new(annealing.t0, t_end, annealing.q, annealing.epsilon_t)
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Scheme::NoAnnealing { t } => alloc::format!("no-anneal T={t}"),
            Scheme::Annealing { t_end } => alloc::format!("anneal T_end={t_end}"),
        }
    }
}

/// One row of the classification table.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeRow {
    pub scheme: Scheme,
    pub primary_w_lt_05: f64,
    pub primary_w_gt_05: f64,
    pub secondary_w_lt_05: f64,
    pub secondary_w_gt_05: f64,
    pub n_rec: usize,
    pub n_events: usize,
    /// Events whose fit failed (counted as not reconstructed).
    pub n_failed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub cutoff: f64,
    pub radius: f64,
    pub annealing: AnnealingSchedule,
    pub max_inner_iterations: usize,
    pub tol: f64,
}

impl ExperimentConfig {
    pub fn for_simulation(sim: &SimulationConfig) -> Self {
        Self {
            cutoff: 2.5,
            radius: sim.default_radius(),
            annealing: AnnealingSchedule::cooling_to(1.0).expect("valid default schedule"),
            max_inner_iterations: IrlsConfig::DEFAULT_MAX_INNER,
            tol: IrlsConfig::DEFAULT_TOL,
        }
    }
}

#[derive(Default)]
struct Tally {
    prim_in: usize,
    prim_out: usize,
    sec_in: usize,
    sec_out: usize,
    n_rec: usize,
    failed: usize,
}

/// Fits every event under each scheme and tabulates the classification.
pub fn table1_experiment(
    events: &[VertexEvent],
    schemes: &[Scheme],
    config: &ExperimentConfig,
) -> Result<Vec<SchemeRow>> {
    if events.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut rows = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let irls = IrlsConfig {
            max_inner_iterations: config.max_inner_iterations,
            tol: config.tol,
            ..IrlsConfig::normal(config.cutoff, scheme.schedule(&config.annealing)?)
        };
        let mut tally = Tally::default();
        for event in events {
            match fit_vertex(event, &irls) {
                Ok(fit) => tally_event(&mut tally, event, &fit, config.radius),
                Err(Error::AllRejected(_)) | Err(Error::RankDeficient { .. }) => {
                    // Every track effectively rejected: count all as outliers.
                    tally.failed += 1;
                    for t in &event.tracks {
                        match t.label {
                            TrackLabel::Primary => tally.prim_out += 1,
                            TrackLabel::Secondary => tally.sec_out += 1,
                        }
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let np = (tally.prim_in + tally.prim_out).max(1) as f64;
        let ns = (tally.sec_in + tally.sec_out).max(1) as f64;
        rows.push(SchemeRow {
            scheme,
            primary_w_lt_05: tally.prim_out as f64 / np,
            primary_w_gt_05: tally.prim_in as f64 / np,
            secondary_w_lt_05: tally.sec_out as f64 / ns,
            secondary_w_gt_05: tally.sec_in as f64 / ns,
            n_rec: tally.n_rec,
            n_events: events.len(),
            n_failed: tally.failed,
        });
    }
    Ok(rows)
}

fn tally_event(tally: &mut Tally, event: &VertexEvent, fit: &VertexFit, radius: f64) {
    for (t, c) in event.tracks.iter().zip(&fit.classification) {
        match (t.label, c) {
            (TrackLabel::Primary, Classification::Inlier) => tally.prim_in += 1,
            (TrackLabel::Primary, Classification::Outlier) => tally.prim_out += 1,
            (TrackLabel::Secondary, Classification::Inlier) => tally.sec_in += 1,
            (TrackLabel::Secondary, Classification::Outlier) => tally.sec_out += 1,
        }
    }
    let dist2: f64 = fit
        .vertex
        .iter()
        .zip(&event.true_vertex)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    if sqrt(dist2) < radius {
        tally.n_rec += 1;
    }
}
