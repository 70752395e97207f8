//! Plain gradient descent on K-matrix parameters.
//!
//! The loss is `E(θ) = Σ ‖y − g(K_θ x)‖²` over the samples, unnormalized.
//! Gradients of complex parameters are returned as `∂E/∂re + i ∂E/∂im`, so
//! a descent step is simply `θ ← θ − η ∇E`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::butterfly::{random_kmatrix, KMatrix, Orientation};
use crate::error::{expect_len, Error, Result};
use crate::numfield::{basis, DenseMatrix, Scalar, ZERO};

/// The elementwise output map `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nonlinearity {
    #[default]
    Identity,
    /// `max(0, re x)`, for real data only. Its derivative at 0 is 0.
    Relu,
}

impl Nonlinearity {
    fn value(self, u: Scalar) -> Scalar {
        match self {
            Nonlinearity::Identity => u,
            Nonlinearity::Relu => Scalar::new(u.re.max(0.0), 0.0),
        }
    }

    fn slope(self, u: Scalar) -> f64 {
        match self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::Relu => {
                if u.re > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub eta: f64,
    pub eps: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub nonlinearity: Nonlinearity,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            eta: 0.01,
            eps: 1e-12,
            max_iters: 1000,
            seed: 0,
            nonlinearity: Nonlinearity::Identity,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be finite and positive, got {}",
                self.eta
            )));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "loss threshold must be non-negative, got {}",
                self.eps
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument(
                "max_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One training pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
}

impl Sample {
    pub fn new(x: Vec<Scalar>, y: Vec<Scalar>) -> Self {
        Sample { x, y }
    }
}

/// Anything gradient descent can drive: a flat complex parameter vector with
/// a loss and its gradient.
pub trait Model: Clone {
    fn params(&self) -> Vec<Scalar>;
    fn set_params(&mut self, params: &[Scalar]) -> Result<()>;
    fn loss(&self, data: &[Sample], g: Nonlinearity) -> Result<f64>;
    fn loss_gradient(&self, data: &[Sample], g: Nonlinearity) -> Result<Vec<Scalar>>;
}

impl Model for KMatrix {
    fn params(&self) -> Vec<Scalar> {
        KMatrix::params(self)
    }

    fn set_params(&mut self, params: &[Scalar]) -> Result<()> {
        KMatrix::set_params(self, params)
    }

    fn loss(&self, data: &[Sample], g: Nonlinearity) -> Result<f64> {
        loss(self, data, g)
    }

    fn loss_gradient(&self, data: &[Sample], g: Nonlinearity) -> Result<Vec<Scalar>> {
        loss_gradient(self, data, g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainState<M = KMatrix> {
    pub model: M,
    pub iter: usize,
    pub loss_history: Vec<f64>,
}

impl<M: Model> TrainState<M> {
    pub fn new(model: M, data: &[Sample], g: Nonlinearity) -> Result<Self> {
        let l = model.loss(data, g)?;
        Ok(TrainState {
            model,
            iter: 0,
            loss_history: vec![l],
        })
    }

    pub fn loss(&self) -> f64 {
        *self
            .loss_history
            .last()
            .expect("history starts with the initial loss")
    }
}

fn check_data(n: usize, data: &[Sample], g: Nonlinearity) -> Result<()> {
    for s in data {
        expect_len(n, s.x.len())?;
        expect_len(n, s.y.len())?;
        if g == Nonlinearity::Relu && s.x.iter().chain(&s.y).any(|z| z.im != 0.0) {
            return Err(Error::NonRealData);
        }
    }
    Ok(())
}

pub fn loss(model: &KMatrix, data: &[Sample], g: Nonlinearity) -> Result<f64> {
    check_data(model.n(), data, g)?;
    let mut total = 0.0;
    for s in data {
        let u = model.mvm(&s.x)?;
        total += u
            .iter()
            .zip(&s.y)
            .map(|(&u, &y)| (y - g.value(u)).norm_sqr())
            .sum::<f64>();
    }
    Ok(total)
}

/// The same loss computed from the dense matrix of the model.
pub fn dense_loss(w: &DenseMatrix, data: &[Sample], g: Nonlinearity) -> Result<f64> {
    check_data(w.cols(), data, g)?;
    let mut total = 0.0;
    for s in data {
        let u = w.mvm(&s.x)?;
        total += u
            .iter()
            .zip(&s.y)
            .map(|(&u, &y)| (y - g.value(u)).norm_sqr())
            .sum::<f64>();
    }
    Ok(total)
}

/// Loss and gradient in one reverse pass per sample.
///
/// Each factor's input is cached on the way forward. The output adjoint is
/// seeded with `−2 conj(r) g′(u)` and pulled back through the transposes of
/// the applied factors (no conjugation, the chain being holomorphic in the
/// applied coefficients). A coefficient multiplying input slot `q` into
/// output slot `p` collects `adjoint[p] · input[q]`; for `B` factors the
/// stored coefficient is the applied one and the gradient is its conjugate,
/// for `B*` factors the applied coefficient is the conjugate of the stored
/// one and the product is the gradient as is.
pub fn loss_and_gradient(
    model: &KMatrix,
    data: &[Sample],
    g: Nonlinearity,
) -> Result<(f64, Vec<Scalar>)> {
    let n = model.n();
    check_data(n, data, g)?;
    let ne = model.inner_size();
    let factors = model.applied_factors();
    let offsets: Vec<usize> = factors
        .iter()
        .map(|f| model.param_offset(f.stage, f.side, f.index))
        .collect();
    let mut grad = vec![ZERO; model.param_count()];
    let mut total = 0.0;
    let mut cache: Vec<Vec<Scalar>> = vec![Vec::new(); factors.len()];

    for s in data {
        let mut v = s.x.clone();
        v.resize(ne, ZERO);
        for (f, slot) in factors.iter().zip(cache.iter_mut()) {
            slot.clone_from(&v);
            f.factor.apply(&mut v, f.orientation);
        }
        let mut a = vec![ZERO; ne];
        for i in 0..n {
            let r = s.y[i] - g.value(v[i]);
            total += r.norm_sqr();
            a[i] = r.conj() * (-2.0 * g.slope(v[i]));
        }

        for ((f, input), &off) in factors.iter().zip(&cache).zip(&offsets).rev() {
            let k = f.factor.block();
            let h = k / 2;
            let adjoint = f.orientation == Orientation::Adjoint;
            for b in 0..ne / k {
                let base = off + b * 2 * k;
                for j in 0..h {
                    let (top, bot) = (b * k + j, b * k + j + h);
                    // (output, input) slots of D1..D4 as applied
                    let slots = if adjoint {
                        [(top, top), (bot, top), (top, bot), (bot, bot)]
                    } else {
                        [(top, top), (top, bot), (bot, top), (bot, bot)]
                    };
                    for (d, (p, q)) in slots.into_iter().enumerate() {
                        let gpq = a[p] * input[q];
                        grad[base + d * h + j] += if adjoint { gpq } else { gpq.conj() };
                    }
                }
            }
            let back = if adjoint {
                Orientation::Conjugate
            } else {
                Orientation::Transpose
            };
            f.factor.apply(&mut a, back);
        }
    }
    if !total.is_finite() || grad.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("loss gradient"));
    }
    Ok((total, grad))
}

pub fn loss_gradient(model: &KMatrix, data: &[Sample], g: Nonlinearity) -> Result<Vec<Scalar>> {
    Ok(loss_and_gradient(model, data, g)?.1)
}

/// `θ ← θ − η ∇E(θ)`, recording the new loss.
pub fn gd_step<M: Model>(
    state: TrainState<M>,
    data: &[Sample],
    config: &TrainConfig,
) -> Result<TrainState<M>> {
    let TrainState {
        mut model,
        iter,
        mut loss_history,
    } = state;
    let next = iter + 1;
    let diverged = |e: Error| match e {
        Error::NonFinite(_) => Error::Diverged { iteration: next },
        other => other,
    };
    let g = config.nonlinearity;
    let grad = model.loss_gradient(data, g).map_err(diverged)?;
    let params: Vec<Scalar> = model
        .params()
        .iter()
        .zip(&grad)
        .map(|(&t, &d)| {
            let step = d * config.eta;
            if step == ZERO {
                t
            } else {
                t - step
            }
        })
        .collect();
    if params.iter().any(|z| !z.is_finite()) {
        return Err(Error::Diverged { iteration: next });
    }
    model.set_params(&params).map_err(diverged)?;
    let l = model.loss(data, g).map_err(diverged)?;
    if !l.is_finite() {
        return Err(Error::Diverged { iteration: next });
    }
    loss_history.push(l);
    Ok(TrainState {
        model,
        iter: next,
        loss_history,
    })
}

/// Runs gradient descent from `model` until the loss drops below `eps` or
/// `max_iters` steps have been taken.
pub fn train_from<M: Model>(
    model: M,
    data: &[Sample],
    config: &TrainConfig,
) -> Result<TrainState<M>> {
    config.validate()?;
    let mut state = TrainState::new(model, data, config.nonlinearity)?;
    if !state.loss().is_finite() {
        return Err(Error::Diverged { iteration: 0 });
    }
    while state.loss() >= config.eps && state.iter < config.max_iters {
        state = gd_step(state, data, config)?;
    }
    Ok(state)
}

/// Trains an `n x n` K-matrix of width `w` and expansion `e`, initialized by
/// [`random_kmatrix`] from `config.seed`.
pub fn train(
    data: &[Sample],
    n: usize,
    w: usize,
    e: usize,
    config: &TrainConfig,
) -> Result<TrainState> {
    config.validate()?;
    let model = random_kmatrix(n, w, e, config.seed)?;
    train_from(model, data, config)
}

/// Fitting data for a square matrix: every basis vector with its image, then
/// `probes` random inputs drawn from `seed`.
pub fn matrix_data(target: &DenseMatrix, probes: usize, seed: u64) -> Result<Vec<Sample>> {
    if target.rows() != target.cols() {
        return Err(Error::NonSquare {
            rows: target.rows(),
            cols: target.cols(),
        });
    }
    let n = target.cols();
    let mut data = Vec::with_capacity(n + probes);
    for j in 0..n {
        let x = basis(n, j);
        data.push(Sample::new(x, target.column(j)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..probes {
        let x: Vec<Scalar> = (0..n)
            .map(|_| Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let y = target.mvm(&x)?;
        data.push(Sample::new(x, y));
    }
    Ok(data)
}

/// Trains against [`matrix_data`] of `target` with no extra probes.
pub fn train_matrix(
    target: &DenseMatrix,
    w: usize,
    e: usize,
    config: &TrainConfig,
) -> Result<TrainState> {
    let data = matrix_data(target, 0, config.seed)?;
    train(&data, target.cols(), w, e, config)
}
