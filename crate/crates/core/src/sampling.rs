//! Random vector ensembles, the product of inner products over a graph's
//! edges, Monte Carlo estimates of its mean, and the exact predicted mean.
//!
//! Random streams: the sample range is cut into fixed chunks of
//! [`CHUNK_SAMPLES`]; chunk `c` draws from `ChaCha8Rng::seed_from_u64(seed)`
//! switched to stream `c`, and normal variates come from the ziggurat
//! sampler of `rand_distr::StandardNormal`. Chunk statistics are merged in
//! chunk order, so an estimate depends only on `(seed, n_samples)`, never on
//! the number of workers.

use num_bigint::BigUint;
use num_complex::Complex;
use num_traits::{Float, FromPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::diagram::{
    canonical_matchings, double_factorial, factorial, rising_double_factorial, Ensemble,
};
use crate::error::{Error, Result};
use crate::graph::GraphRef;
use crate::partition::circuit_partition_polynomial;
use crate::scalar::Scalar;

/// Floating-point type the sampler can draw normal variates in.
pub trait SampleFloat: Float + FromPrimitive + Send + Sync + std::fmt::Debug + 'static {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl SampleFloat for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

impl SampleFloat for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }
}

/// One vector, complex or real depending on the ensemble.
#[derive(Clone, Debug, PartialEq)]
pub enum SampledVector<F> {
    Complex(Vec<Complex<F>>),
    Real(Vec<F>),
}

impl<F: Float> SampledVector<F> {
    pub fn dimension(&self) -> usize {
        match self {
            SampledVector::Complex(v) => v.len(),
            SampledVector::Real(v) => v.len(),
        }
    }

    pub fn norm_sqr(&self) -> F {
        match self {
            SampledVector::Complex(v) => v.iter().fold(F::zero(), |s, z| s + z.norm_sqr()),
            SampledVector::Real(v) => v.iter().fold(F::zero(), |s, &x| s + x * x),
        }
    }
}

/// Draws one vector of `C^k` or `R^k` from `ensemble`.
pub fn sample_vector<F: SampleFloat, R: Rng + ?Sized>(
    k: usize,
    ensemble: Ensemble,
    rng: &mut R,
) -> SampledVector<F> {
    let kf = F::from_usize(k).expect("k fits the float type");
    match ensemble {
        Ensemble::ComplexSphere => {
            let mut v: Vec<Complex<F>> = (0..k)
                .map(|_| Complex::new(F::standard_normal(rng), F::standard_normal(rng)))
                .collect();
            let norm = v.iter().fold(F::zero(), |s, z| s + z.norm_sqr()).sqrt();
            v.iter_mut().for_each(|z| *z = *z / norm);
            SampledVector::Complex(v)
        }
        Ensemble::RealSphere => {
            let mut v: Vec<F> = (0..k).map(|_| F::standard_normal(rng)).collect();
            let norm = v.iter().fold(F::zero(), |s, &x| s + x * x).sqrt();
            v.iter_mut().for_each(|x| *x = *x / norm);
            SampledVector::Real(v)
        }
        Ensemble::ComplexGaussian => {
            let sigma = (F::one() / (kf + kf)).sqrt();
            SampledVector::Complex(
                (0..k)
                    .map(|_| Complex::new(F::standard_normal(rng), F::standard_normal(rng)) * sigma)
                    .collect(),
            )
        }
        Ensemble::RealGaussian => {
            let sigma = (F::one() / kf).sqrt();
            SampledVector::Real((0..k).map(|_| F::standard_normal(rng) * sigma).collect())
        }
    }
}

/// One vector per vertex.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorAssignment<F> {
    Complex(Vec<Vec<Complex<F>>>),
    Real(Vec<Vec<F>>),
}

impl<F: SampleFloat> VectorAssignment<F> {
    pub fn sample<R: Rng + ?Sized>(n: usize, k: usize, ensemble: Ensemble, rng: &mut R) -> Self {
        if ensemble.is_complex() {
            VectorAssignment::Complex(
                (0..n)
                    .map(|_| match sample_vector(k, ensemble, rng) {
                        SampledVector::Complex(v) => v,
                        SampledVector::Real(_) => unreachable!(),
                    })
                    .collect(),
            )
        } else {
            VectorAssignment::Real(
                (0..n)
                    .map(|_| match sample_vector(k, ensemble, rng) {
                        SampledVector::Real(v) => v,
                        SampledVector::Complex(_) => unreachable!(),
                    })
                    .collect(),
            )
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            VectorAssignment::Complex(v) => v.len(),
            VectorAssignment::Real(v) => v.len(),
        }
    }

    fn dimensions(&self) -> Vec<usize> {
        match self {
            VectorAssignment::Complex(v) => v.iter().map(Vec::len).collect(),
            VectorAssignment::Real(v) => v.iter().map(Vec::len).collect(),
        }
    }
}

/// `⟨x, y⟩ = Σ conj(x_i) y_i`.
pub fn inner<F: Float>(x: &[Complex<F>], y: &[Complex<F>]) -> Complex<F> {
    x.iter()
        .zip(y)
        .fold(Complex::new(F::zero(), F::zero()), |s, (a, b)| {
            s + a.conj() * b
        })
}

/// `∏_{(u,v) ∈ E} ⟨x_u, x_v⟩`, conjugating the tail `u` of every edge.
pub fn product_of_inner_products<'a, F: SampleFloat>(
    g: impl Into<GraphRef<'a>>,
    assignment: &VectorAssignment<F>,
) -> Result<Complex<F>> {
    let g = g.into();
    if assignment.vertex_count() != g.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} vectors for {} vertices",
            assignment.vertex_count(),
            g.vertex_count()
        )));
    }
    let dims = assignment.dimensions();
    if dims.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::DimensionMismatch(
            "vectors have different lengths".into(),
        ));
    }
    let edges = match g {
        GraphRef::Directed(d) => d.edges(),
        GraphRef::Undirected(u) => u.edges(),
    };
    Ok(product_unchecked(edges, assignment))
}

fn product_unchecked<F: SampleFloat>(
    edges: &[(usize, usize)],
    assignment: &VectorAssignment<F>,
) -> Complex<F> {
    let one = Complex::new(F::one(), F::zero());
    match assignment {
        VectorAssignment::Complex(x) => {
            edges.iter().fold(one, |p, &(u, v)| p * inner(&x[u], &x[v]))
        }
        VectorAssignment::Real(x) => {
            let re = edges.iter().fold(F::one(), |p, &(u, v)| {
                p * x[u]
                    .iter()
                    .zip(&x[v])
                    .fold(F::zero(), |s, (&a, &b)| s + a * b)
            });
            Complex::new(re, F::zero())
        }
    }
}

/// Monte Carlo estimate of `q(G;k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    /// Sample standard deviation of the (complex) product over `√n`.
    pub std_error: f64,
    pub n: u64,
    pub k: u64,
    pub ensemble: Ensemble,
    pub seed: u64,
}

impl MCEstimate {
    pub fn mean(&self) -> Complex<f64> {
        Complex::new(self.mean_re, self.mean_im)
    }

    /// Whether `|mean - target| ≤ sigmas · std_error`.
    pub fn within(&self, target: Complex<f64>, sigmas: f64) -> bool {
        (self.mean() - target).norm() <= sigmas * self.std_error
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema: &'a str,
            #[serde(flatten)]
            estimate: &'a MCEstimate,
        }
        serde_json::to_string(&Doc {
            schema: crate::SCHEMA,
            estimate: self,
        })
        .expect("estimate serializes")
    }
}

pub const CHUNK_SAMPLES: u64 = 4096;

/// The random stream used for sample chunk `chunk`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

#[derive(Clone, Copy, Debug)]
struct Moments {
    n: f64,
    mean: Complex<f64>,
    /// `Σ |p - mean|²`.
    m2: f64,
}

impl Moments {
    fn empty() -> Self {
        Moments {
            n: 0.0,
            mean: Complex::new(0.0, 0.0),
            m2: 0.0,
        }
    }

    fn push(&mut self, p: Complex<f64>) {
        self.n += 1.0;
        let delta = p - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta.re * (p - self.mean).re + delta.im * (p - self.mean).im;
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * (other.n / n),
            m2: self.m2 + other.m2 + delta.norm_sqr() * self.n * other.n / n,
        }
    }
}

/// Sample mean of the product of inner products over `n_samples`
/// independent assignments drawn from `ensemble`.
pub fn estimate_q<'a, F: SampleFloat>(
    g: impl Into<GraphRef<'a>>,
    k: usize,
    ensemble: Ensemble,
    n_samples: u64,
    seed: u64,
    budget: &Budget,
) -> Result<MCEstimate> {
    let g = g.into();
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    ensemble.check_kind(g.kind())?;
    let edges = match g {
        GraphRef::Directed(d) => d.edges(),
        GraphRef::Undirected(u) => u.edges(),
    };
    let n = g.vertex_count();
    let chunks: Vec<(u64, u64)> = (0..n_samples.div_ceil(CHUNK_SAMPLES))
        .map(|c| (c, CHUNK_SAMPLES.min(n_samples - c * CHUNK_SAMPLES)))
        .collect();

    let run_chunk = |&(chunk, len): &(u64, u64)| -> Moments {
        let mut rng = chunk_rng(seed, chunk);
        let mut moments = Moments::empty();
        for _ in 0..len {
            let x = VectorAssignment::<F>::sample(n, k, ensemble, &mut rng);
            let p = product_unchecked(edges, &x);
            moments.push(Complex::new(
                p.re.to_f64().unwrap_or(f64::NAN),
                p.im.to_f64().unwrap_or(f64::NAN),
            ));
        }
        moments
    };

    let per_chunk: Vec<Moments> = budget.install(|| chunks.par_iter().map(run_chunk).collect());
    let total = per_chunk.into_iter().fold(Moments::empty(), Moments::merge);
    let variance = total.m2 / (total.n - 1.0);
    Ok(MCEstimate {
        mean_re: total.mean.re,
        mean_im: total.mean.im,
        std_error: (variance / total.n).sqrt(),
        n: n_samples,
        k: k as u64,
        ensemble,
        seed,
    })
}

/// `(n - 2)!!` extended with `(-1)!! = 1` (and `0!! = 1`).
fn shifted_double_factorial(n_plus_2: u64) -> BigUint {
    match n_plus_2 {
        0 | 1 => BigUint::from(1u32),
        m => double_factorial(m - 2),
    }
}

/// Exact `q(G;k)` from the circuit partition polynomial:
///
/// * complex sphere: `∏_v (k-1)!/(k+d_v-1)! · j(G;k)`
/// * real sphere: `∏_v (k-2)!!/(k+deg(v)-2)!! · j_undirected(G;k)`
/// * complex Gaussian: `j(G;k) / k^m`
/// * real Gaussian: `j_undirected(G;k) / k^m`
///
/// Graphs failing the degree condition are rejected with
/// [`Error::NotEulerian`]; their true moment is zero by phase (or sign)
/// symmetry.
pub fn predicted_q<'a, S: Scalar>(
    g: impl Into<GraphRef<'a>>,
    k: u64,
    ensemble: Ensemble,
    budget: &Budget,
) -> Result<S> {
    let g = g.into();
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    ensemble.check_kind(g.kind())?;
    let j = circuit_partition_polynomial(g, budget)?;
    let j_at_k = j.evaluate(&S::from_u64(k));
    let scaling = match ensemble {
        Ensemble::ComplexSphere => (0..g.vertex_count()).fold(S::one(), |acc, v| {
            let d = g.half_degree(v) as u64;
            acc * S::ratio(&factorial(k - 1), &factorial(k + d - 1))
        }),
        Ensemble::RealSphere => {
            let GraphRef::Undirected(u) = g else {
                unreachable!("kind checked above")
            };
            (0..u.vertex_count()).fold(S::one(), |acc, v| {
                let deg = u.degree(v) as u64;
                acc * S::ratio(
                    &shifted_double_factorial(k),
                    &shifted_double_factorial(k + deg),
                )
            })
        }
        Ensemble::ComplexGaussian | Ensemble::RealGaussian => S::ratio(
            &BigUint::from(1u32),
            &BigUint::from(k).pow(g.edge_count() as u32),
        ),
    };
    Ok(scaling * j_at_k)
}

/// `E‖x‖^{2d}` under `ensemble`.
pub fn norm_moment<S: Scalar>(d: usize, k: u64, ensemble: Ensemble) -> S {
    assert!(k >= 1, "dimension k must be at least 1");
    let kd = BigUint::from(k).pow(d as u32);
    match ensemble {
        Ensemble::ComplexSphere | Ensemble::RealSphere => S::one(),
        Ensemble::ComplexGaussian => {
            S::ratio(&factorial(d as u64 + k - 1), &(kd * factorial(k - 1)))
        }
        Ensemble::RealGaussian => S::ratio(&rising_double_factorial(k, d as u64), &kd),
    }
}

/// Pairing sum `Σ_{pairings} ∏ E[x_i x_j]` for coordinates of a real Gaussian
/// vector with covariance `δ_ij / k`; the Wick expansion of `E[∏ x_{idx}]`.
pub fn wick_pairing_sum<S: Scalar>(indices: &[usize], k: u64) -> S {
    let pairings = canonical_matchings(indices.len())
        .into_iter()
        .filter(|partner| {
            partner
                .iter()
                .enumerate()
                .all(|(a, &b)| indices[a] == indices[b])
        })
        .count();
    let scale = BigUint::from(k).pow((indices.len() / 2) as u32);
    S::ratio(&BigUint::from(pairings), &scale)
}
