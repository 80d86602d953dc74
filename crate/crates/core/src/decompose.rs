//! Growth-rate decomposition `f(w) = ζ^|w| · Z · P(w)`.
//!
//! Dividing every transition by `ζ = (1 + ε) ρ(M)` leaves an automaton with
//! spectral radius `1 / (1 + ε) < 1`, hence finite mass `Z`; normalising it
//! and eliminating states gives the expression `r` with `P = [[r]]`.

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::normalize::normalize;
use crate::numerics::{determinant, rational_approximation, spectral_radius, Matrix, Rational, Scalar};
use crate::sre::{eval, state_eliminate, Sre};

/// Largest denominator tried when recognising a rational spectral radius.
const MAX_DENOMINATOR: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Growth {
    /// Measured spectral radius of the joint matrix.
    pub rho: f64,
    /// `(1 + ε) ρ`, or 1 when the joint matrix is nilpotent.
    pub zeta: f64,
    /// The same value as an exact rational, when `ρ` is rational.
    pub exact_zeta: Option<Rational>,
}

/// Growth rate `ζ = (1 + ε) ρ(M)`.
///
/// `ρ` is estimated in floating point. When a continued-fraction convergent
/// of the estimate is an exact eigenvalue of an irreducible block (checked by
/// a rational determinant), `ζ` is also returned exactly. A nilpotent joint
/// matrix gets `ζ = 1`, since `ζ = 0` would not be invertible.
pub fn growth_rate<S: Scalar>(a: &WeightedAutomaton<S>, epsilon: &Rational) -> Result<Growth> {
    if !epsilon.is_positive() {
        return Err(Error::DimensionMismatch(format!("epsilon must be positive, got {epsilon}")));
    }
    let joint = a.joint_matrix();
    let rho = spectral_radius(&joint, crate::numerics::DEFAULT_TOLERANCE)?;
    if rho == 0.0 {
        return Ok(Growth {
            rho,
            zeta: 1.0,
            exact_zeta: Some(Rational::one()),
        });
    }
    let scale = Rational::one() + epsilon;
    let exact_rho = joint
        .entries()
        .iter()
        .all(|v| v.to_rational().is_some())
        .then(|| exact_radius(&joint.map(|v| v.to_rational().expect("checked")), rho))
        .flatten();
    Ok(Growth {
        rho,
        zeta: scale.to_f64() * rho,
        exact_zeta: exact_rho.map(|r| r * &scale),
    })
}

fn exact_radius(m: &Matrix<Rational>, rho: f64) -> Option<Rational> {
    let candidate = rational_approximation(rho, MAX_DENOMINATOR, 1e-10)?;
    let blocks = crate::numerics::irreducible_blocks(m);
    blocks.iter().find_map(|b| {
        let sub = m.submatrix(b, b);
        let shifted = Matrix::identity(b.len()).scale(&candidate).sub(&sub);
        determinant(&shifted).is_zero().then(|| candidate.clone())
    })
}

/// Divide every transition matrix by `zeta`.
pub fn spectral_normalize<S: Scalar>(a: &WeightedAutomaton<S>, zeta: &S) -> WeightedAutomaton<S> {
    a.scale_transitions(&(S::one() / zeta))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteDecomposition<S> {
    pub zeta: S,
    /// Mass of the rescaled automaton.
    pub mass: S,
    pub sre: Sre<S>,
    /// Margin used for `ζ`; `None` when no rescaling was applied.
    pub epsilon: Option<Rational>,
    pub rho: f64,
}

impl<S: Scalar> TripartiteDecomposition<S> {
    /// `ζ^|w| · Z · [[r]](w)`.
    pub fn reconstruct<T: AsRef<str>>(&self, word: &[T]) -> Result<S> {
        Ok(self.zeta.power(word.len()) * &self.mass * &eval(&self.sre, word)?)
    }
}

/// Decompose with `ζ = (1 + ε) ρ(M)`, or with `ζ = 1` when `epsilon` is
/// `None` (which needs finite mass).
///
/// On the rational backend `ζ` must come out rational; otherwise this fails
/// with [`Error::IrrationalGrowth`] (see [`decompose_auto`]).
pub fn tripartite<S: Scalar>(
    a: &WeightedAutomaton<S>,
    epsilon: Option<&Rational>,
) -> Result<TripartiteDecomposition<S>> {
    let (zeta, rho) = match epsilon {
        None => {
            let rho = spectral_radius(&a.joint_matrix(), crate::numerics::DEFAULT_TOLERANCE)?;
            (S::one(), rho)
        }
        Some(eps) => {
            let g = growth_rate(a, eps)?;
            let zeta = match (&g.exact_zeta, S::is_exact()) {
                (Some(z), _) => S::from_rational(z),
                (None, false) => match Rational::from_float(g.zeta) {
                    Some(z) => S::from_rational(&z),
                    None => return Err(Error::IrrationalGrowth { zeta: g.zeta }),
                },
                (None, true) => return Err(Error::IrrationalGrowth { zeta: g.zeta }),
            };
            (zeta, g.rho)
        }
    };
    let scaled = spectral_normalize(a, &zeta);
    let normal = normalize(&scaled)?;
    let sre = state_eliminate(&normal.pa)?;
    Ok(TripartiteDecomposition {
        zeta,
        mass: normal.mass,
        sre,
        epsilon: epsilon.cloned(),
        rho,
    })
}

/// A decomposition on whichever backend the growth rate allows.
#[derive(Clone, Debug, PartialEq)]
pub enum Tripartite {
    Exact(TripartiteDecomposition<Rational>),
    Float(TripartiteDecomposition<f64>),
}

impl Tripartite {
    pub fn reconstruct_f64<T: AsRef<str>>(&self, word: &[T]) -> Result<f64> {
        match self {
            Tripartite::Exact(d) => Ok(d.reconstruct(word)?.to_f64()),
            Tripartite::Float(d) => d.reconstruct(word),
        }
    }

    pub fn zeta_f64(&self) -> f64 {
        match self {
            Tripartite::Exact(d) => d.zeta.to_f64(),
            Tripartite::Float(d) => d.zeta,
        }
    }

    pub fn mass_f64(&self) -> f64 {
        match self {
            Tripartite::Exact(d) => d.mass.to_f64(),
            Tripartite::Float(d) => d.mass,
        }
    }
}

/// Exact decomposition when `ζ` is rational, floating point otherwise.
pub fn decompose_auto(a: &WeightedAutomaton<Rational>, epsilon: Option<&Rational>) -> Result<Tripartite> {
    match tripartite(a, epsilon) {
        Ok(d) => Ok(Tripartite::Exact(d)),
        Err(Error::IrrationalGrowth { .. }) => Ok(Tripartite::Float(tripartite(&a.to_f64(), epsilon)?)),
        Err(e) => Err(e),
    }
}
