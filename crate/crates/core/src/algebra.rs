//! CCR field algebras over a finite set of generators: normal-ordered words, the star
//! operation, quasi-free states and their pull-back from null infinity.
//!
//! The engine is generic over the scalar so that symbolic checks run with exact complex
//! rationals while numeric suites use `Complex64`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};

use crate::boundary_state::{omega2_scri_scalar, omega2_scri_tensor, BoundaryKernelConfig};
use crate::error::{Error, Result};
use crate::fields::{BoundaryFunction, BoundaryTensor, ModeTestFunction, TensorPoly};
use crate::propagation::{radiation_field, radiation_field_grav, PropagationConfig};
use crate::symplectic::{sigma_bulk_complex, sigma_scri, tau_bulk, tau_scri};

/// Coefficient field of the algebra.
pub trait Scalar:
    Clone + PartialEq + fmt::Debug + fmt::Display + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn imag_unit() -> Self;
    fn conjugate(&self) -> Self;
}

impl<T> Scalar for Complex<T>
where
    T: Clone + Num + Neg<Output = T> + PartialOrd + fmt::Debug + fmt::Display,
{
    fn imag_unit() -> Self {
        Complex::new(T::zero(), T::one())
    }

    fn conjugate(&self) -> Self {
        self.conj()
    }
}

/// Exact complex rationals for symbolic checks.
pub type ExactComplex = Complex<num_rational::Rational64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    BulkScalar,
    BoundaryScalar,
    BulkGravity,
    BoundaryGravity,
}

impl GeneratorKind {
    pub fn is_boundary(self) -> bool {
        matches!(self, Self::BoundaryScalar | Self::BoundaryGravity)
    }

    fn boundary(self) -> Self {
        match self {
            Self::BulkScalar | Self::BoundaryScalar => Self::BoundaryScalar,
            Self::BulkGravity | Self::BoundaryGravity => Self::BoundaryGravity,
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::BulkScalar => "bulk-scalar",
            Self::BoundaryScalar => "boundary-scalar",
            Self::BulkGravity => "bulk-gravity",
            Self::BoundaryGravity => "boundary-gravity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    BulkScalar(ModeTestFunction),
    BoundaryScalar(BoundaryFunction),
    BulkGravity(TensorPoly),
    BoundaryGravity(BoundaryTensor),
    /// A named placeholder of the given kind, for symbolic algebra.
    Symbol(GeneratorKind, String),
}

impl Generator {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            Self::BulkScalar(_) => GeneratorKind::BulkScalar,
            Self::BoundaryScalar(_) => GeneratorKind::BoundaryScalar,
            Self::BulkGravity(_) => GeneratorKind::BulkGravity,
            Self::BoundaryGravity(_) => GeneratorKind::BoundaryGravity,
            Self::Symbol(k, _) => *k,
        }
    }
}

/// Index of a generator inside its algebra; the total order of generators is the order of ids.
pub type GenId = usize;

/// A complex-linear combination of words; the empty word is the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<S> {
    pub kind: GeneratorKind,
    pub terms: BTreeMap<Vec<GenId>, S>,
    pub canonical: bool,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(kind: GeneratorKind) -> Self {
        Self { kind, terms: BTreeMap::new(), canonical: true }
    }

    pub fn unit(kind: GeneratorKind) -> Self {
        Self::scalar(kind, S::one())
    }

    pub fn scalar(kind: GeneratorKind, c: S) -> Self {
        let mut e = Self::zero(kind);
        e.add_term(vec![], c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, word: Vec<GenId>, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(word.clone()).or_insert_with(S::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self { kind: self.kind, terms: BTreeMap::new(), canonical: self.canonical };
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        check_kind(self.kind, other.kind)?;
        let mut out = self.clone();
        for (w, v) in &other.terms {
            out.add_term(w.clone(), v.clone());
        }
        out.canonical = self.canonical && other.canonical;
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.plus(&other.scaled(&-S::one()))
    }

    pub fn unit_coefficient(&self) -> S {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(S::zero)
    }
}

/// Canonical text form: words in ascending order, `coefficient*[g1 g2 ...]`, unit as `[]`.
impl<S: Scalar> fmt::Display for AlgebraElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let ids: Vec<String> = w.iter().map(|g| format!("g{g}")).collect();
            write!(f, "({c})*[{}]", ids.join(" "))?;
        }
        Ok(())
    }
}

fn check_kind(a: GeneratorKind, b: GeneratorKind) -> Result<()> {
    if a != b {
        return Err(Error::KindMismatch(a.to_string(), b.to_string()));
    }
    Ok(())
}

/// Generators of one kind with their commutator matrix `σ(g_i, g_j)`, so that
/// `g_i g_j - g_j g_i = i σ(g_i, g_j) 𝟙`.
#[derive(Debug, Clone)]
pub struct FieldAlgebra<S> {
    pub kind: GeneratorKind,
    pub generators: Vec<Generator>,
    pub pairing: Vec<Vec<S>>,
}

impl<S: Scalar> FieldAlgebra<S> {
    /// Algebra with a prescribed antisymmetric commutator matrix.
    pub fn with_pairing(kind: GeneratorKind, generators: Vec<Generator>, pairing: Vec<Vec<S>>) -> Result<Self> {
        let n = generators.len();
        for g in &generators {
            check_kind(kind, g.kind())?;
        }
        if pairing.len() != n || pairing.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("pairing matrix has the wrong shape".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if pairing[i][j] != -pairing[j][i].clone() {
                    return Err(Error::Precondition(format!("pairing not antisymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { kind, generators, pairing })
    }

    /// `n` named placeholders with a symbolic commutator matrix.
    pub fn symbolic(kind: GeneratorKind, pairing: Vec<Vec<S>>) -> Result<Self> {
        let gens = (0..pairing.len()).map(|i| Generator::Symbol(kind, format!("g{i}"))).collect();
        Self::with_pairing(kind, gens, pairing)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, id: GenId) -> AlgebraElement<S> {
        let mut e = AlgebraElement::zero(self.kind);
        e.add_term(vec![id], S::one());
        e
    }

    /// The (not yet normal-ordered) product of generators in the given order.
    pub fn word(&self, ids: &[GenId]) -> AlgebraElement<S> {
        let mut e = AlgebraElement::zero(self.kind);
        e.add_term(ids.to_vec(), S::one());
        e.canonical = ids.windows(2).all(|w| w[0] <= w[1]);
        e
    }

    fn normal_word(&self, w: &[GenId], c: S, out: &mut AlgebraElement<S>) {
        match w.windows(2).position(|p| p[0] > p[1]) {
            None => out.add_term(w.to_vec(), c),
            Some(k) => {
                // w[k] w[k+1] = w[k+1] w[k] + i σ(w[k], w[k+1])
                let mut swapped = w.to_vec();
                swapped.swap(k, k + 1);
                let s = self.pairing[w[k]][w[k + 1]].clone();
                if !s.is_zero() {
                    let mut shorter = w[..k].to_vec();
                    shorter.extend_from_slice(&w[k + 2..]);
                    self.normal_word(&shorter, c.clone() * S::imag_unit() * s, out);
                }
                self.normal_word(&swapped, c, out);
            }
        }
    }

    /// Canonical form with every word sorted by generator id.
    pub fn normalize(&self, a: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        check_kind(self.kind, a.kind)?;
        let mut out = AlgebraElement::zero(self.kind);
        for (w, c) in &a.terms {
            if w.iter().any(|g| *g >= self.len()) {
                return Err(Error::Precondition(format!("word {w:?} uses an unknown generator")));
            }
            self.normal_word(w, c.clone(), &mut out);
        }
        Ok(out)
    }

    pub fn multiply(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        check_kind(a.kind, b.kind)?;
        check_kind(self.kind, a.kind)?;
        let mut raw = AlgebraElement::zero(self.kind);
        raw.canonical = false;
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                raw.add_term(w, ca.clone() * cb.clone());
            }
        }
        self.normalize(&raw)
    }

    /// Generators are self-adjoint: `(c g1 ... gn)* = conj(c) gn ... g1`.
    pub fn star(&self, a: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        let mut raw = AlgebraElement::zero(self.kind);
        raw.canonical = false;
        for (w, c) in &a.terms {
            let mut r = w.clone();
            r.reverse();
            raw.add_term(r, c.conjugate());
        }
        self.normalize(&raw)
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
        self.multiply(a, b)?.minus(&self.multiply(b, a)?)
    }
}

impl FieldAlgebra<Complex64> {
    /// Numeric algebra whose commutator matrix is the pairing of the generator kind:
    /// `σ` in the bulk, `σ_ℐ` on the boundary, and their gravitational versions.
    pub fn from_generators(generators: Vec<Generator>, cfg: &PropagationConfig) -> Result<Self> {
        let Some(first) = generators.first() else { return Err(Error::Precondition("no generators".into())) };
        let kind = first.kind();
        let n = generators.len();
        let mut pairing = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            check_kind(kind, generators[i].kind())?;
            for j in (i + 1)..n {
                let v = pairing_value(&generators[i], &generators[j], cfg)?;
                pairing[i][j] = Complex64::new(v, 0.0);
                pairing[j][i] = Complex64::new(-v, 0.0);
            }
        }
        Ok(Self { kind, generators, pairing })
    }

    /// The boundary algebra generated by the radiation fields of the bulk generators, with
    /// matching ids: the map `ι`.
    pub fn boundary_image(&self, cfg: &PropagationConfig) -> Result<Self> {
        let gens = self
            .generators
            .iter()
            .map(|g| boundary_generator(g, cfg))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::from_generators(gens, cfg)?;
        out.kind = self.kind.boundary();
        Ok(out)
    }
}

fn pairing_value(a: &Generator, b: &Generator, cfg: &PropagationConfig) -> Result<f64> {
    Ok(match (a, b) {
        (Generator::BulkScalar(f), Generator::BulkScalar(g)) => sigma_bulk_complex(f, g, cfg)?.value.re,
        (Generator::BoundaryScalar(p), Generator::BoundaryScalar(q)) => sigma_scri(p, q)?.value,
        (Generator::BulkGravity(e), Generator::BulkGravity(z)) => tau_bulk(e, z, cfg)?.value,
        (Generator::BoundaryGravity(l), Generator::BoundaryGravity(m)) => tau_scri(l, m)?.value,
        _ => return Err(Error::Precondition("symbolic generators have no numeric pairing".into())),
    })
}

/// `ι` on one generator: the radiation field of a bulk generator, or the generator itself.
pub fn boundary_generator(g: &Generator, cfg: &PropagationConfig) -> Result<Generator> {
    Ok(match g {
        Generator::BulkScalar(f) => Generator::BoundaryScalar(radiation_field(f, cfg)?),
        Generator::BulkGravity(e) => Generator::BoundaryGravity(radiation_field_grav(&e.to_field(), cfg)?),
        other => other.clone(),
    })
}

/// Quasi-free state given by its two-point matrix `ω₂(g_i, g_j)` on an algebra's generators.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiFreeState<S> {
    pub kind: GeneratorKind,
    pub two_point: Vec<Vec<S>>,
}

impl QuasiFreeState<Complex64> {
    /// The BMS-invariant state of the boundary algebra.
    pub fn bms_invariant(alg: &FieldAlgebra<Complex64>, cfg: &BoundaryKernelConfig) -> Result<Self> {
        if !alg.kind.is_boundary() {
            return Err(Error::KindMismatch(alg.kind.to_string(), "a boundary kind".into()));
        }
        let n = alg.len();
        let mut two_point = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                two_point[i][j] = match (&alg.generators[i], &alg.generators[j]) {
                    (Generator::BoundaryScalar(p), Generator::BoundaryScalar(q)) => omega2_scri_scalar(p, q, cfg)?.value,
                    (Generator::BoundaryGravity(p), Generator::BoundaryGravity(q)) => omega2_scri_tensor(p, q, cfg)?.value,
                    _ => return Err(Error::Precondition("symbolic generators have no two-point value".into())),
                };
            }
        }
        Ok(Self { kind: alg.kind, two_point })
    }
}

/// `ι*ω_ℐ`: the bulk state whose two-point function is `ω₂^ℐ(Υf, Υg)`. The boundary state must
/// live on [`FieldAlgebra::boundary_image`] of the bulk algebra, so generator ids coincide.
pub fn pullback_state<S: Scalar>(omega: &QuasiFreeState<S>, bulk: GeneratorKind) -> Result<QuasiFreeState<S>> {
    if bulk.is_boundary() {
        return Err(Error::KindMismatch(bulk.to_string(), "a bulk kind".into()));
    }
    check_kind(omega.kind, bulk.boundary())?;
    Ok(QuasiFreeState { kind: bulk, two_point: omega.two_point.clone() })
}

/// Ordered perfect matchings of `0..n`: pairs `(a, b)` with `a < b`, first elements increasing.
pub fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&a, tail)) = rest.split_first() else {
            out.push(acc.clone());
            return;
        };
        for k in 0..tail.len() {
            let b = tail[k];
            let mut left: Vec<usize> = tail[..k].to_vec();
            left.extend_from_slice(&tail[k + 1..]);
            acc.push((a, b));
            rec(&left, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if n % 2 == 0 {
        rec(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    }
    out
}

/// `ω_n(g_1, ..., g_n)`: zero for odd `n`, otherwise the sum over ordered perfect matchings of
/// products of two-point values.
pub fn npoint<S: Scalar>(omega: &QuasiFreeState<S>, word: &[GenId]) -> S {
    let n = word.len();
    if n % 2 == 1 {
        return S::zero();
    }
    fn rec<S: Scalar>(w2: &[Vec<S>], word: &[GenId], rest: &mut Vec<usize>) -> S {
        if rest.is_empty() {
            return S::one();
        }
        let a = rest.remove(0);
        let mut acc = S::zero();
        for k in 0..rest.len() {
            let b = rest.remove(k);
            let v = w2[word[a]][word[b]].clone();
            if !v.is_zero() {
                acc = acc + v * rec(w2, word, rest);
            }
            rest.insert(k, b);
        }
        rest.insert(0, a);
        acc
    }
    rec(&omega.two_point, word, &mut (0..n).collect())
}

/// Linear extension of the n-point functions; `ω(𝟙) = 1`.
pub fn evaluate_state<S: Scalar>(omega: &QuasiFreeState<S>, a: &AlgebraElement<S>) -> Result<S> {
    check_kind(omega.kind, a.kind)?;
    let mut acc = S::zero();
    for (w, c) in &a.terms {
        if w.iter().any(|g| *g >= omega.two_point.len()) {
            return Err(Error::Precondition(format!("word {w:?} uses an unknown generator")));
        }
        acc = acc + c.clone() * npoint(omega, w);
    }
    Ok(acc)
}

/// One-particle inner product `⟨f, g⟩ = ω₂(f, g)`.
pub fn one_particle_inner<S: Scalar>(omega: &QuasiFreeState<S>, f: GenId, g: GenId) -> S {
    omega.two_point[f][g].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn q(a: i64, b: i64) -> ExactComplex {
        Complex::new(Rational64::from_integer(a), Rational64::from_integer(b))
    }

    fn alg() -> FieldAlgebra<ExactComplex> {
        let s = vec![vec![q(0, 0), q(2, 0), q(-1, 0)], vec![q(-2, 0), q(0, 0), q(3, 0)], vec![q(1, 0), q(-3, 0), q(0, 0)]];
        FieldAlgebra::symbolic(GeneratorKind::BulkScalar, s).unwrap()
    }

    #[test]
    fn commutator_is_central() {
        let a = alg();
        let c = a.commutator(&a.generator(1), &a.generator(0)).unwrap();
        assert_eq!(c, AlgebraElement::scalar(GeneratorKind::BulkScalar, q(0, -2)));
        assert_eq!(format!("{c}"), "(0-2i)*[]");
    }

    #[test]
    fn matchings_count() {
        assert_eq!(perfect_matchings(6).len(), 15);
        assert_eq!(perfect_matchings(4), vec![vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(0, 3), (1, 2)]]);
    }
}
