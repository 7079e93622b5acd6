//! Invariant-subspace lattices of matrices with distinct eigenvalues, and
//! the trace-preserving maps `E ↦ R(XE)` between them.
//!
//! With `n` distinct eigenvalues the invariant subspaces are exactly the
//! spans of eigenvector subsets, so the lattice is the Boolean lattice on
//! `n` atoms. Element `m` is the span of the eigenvectors whose indices are
//! the set bits of `m` (Schur eigenvalue order). Joins and meets are
//! computed from ranges and kernels, then matched back to elements.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{
    inverse, kernel_projection, range_projection, schur, svd, CMatrix, Mat, OrthoProjection,
    Rational, C64, DEFAULT_RANK_TOL, ZERO,
};

/// Largest dimension [`enumerate_lattice`] accepts (`2^8` elements).
pub const MAX_LATTICE_DIM: usize = 8;
/// Relative eigenvalue separation required, against the spectral radius.
pub const EIGEN_GAP_TOL: f64 = 1e-6;
/// Frobenius invariance defect allowed for a lattice element.
pub const ELEMENT_DEFECT_TOL: f64 = 1e-8;
/// Frobenius distance at which two projections are identified.
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct InvariantLattice {
    pub source: CMatrix,
    pub eigenvalues: Vec<C64>,
    /// Indexed by eigenvector bitmask.
    pub elements: Vec<OrthoProjection>,
    /// `join_table[a·len + b]` is the index of `elements[a] ∨ elements[b]`.
    pub join_table: Vec<usize>,
    pub meet_table: Vec<usize>,
    pub trace_list: Vec<Rational>,
}

impl InvariantLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join_table[a * self.len() + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet_table[a * self.len() + b]
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.len() - 1
    }

    /// Index of the element within [`MATCH_TOL`] of `p`.
    pub fn find(&self, p: &OrthoProjection) -> Result<usize> {
        let mut closest = f64::INFINITY;
        for (i, e) in self.elements.iter().enumerate() {
            if e.rank() != p.rank() {
                continue;
            }
            let d = e.distance(p);
            if d <= MATCH_TOL {
                return Ok(i);
            }
            closest = closest.min(d);
        }
        Err(Error::NotInLattice { distance: closest })
    }
}

/// Eigenvalues and unit eigenvectors (as columns), after checking that the
/// spectrum is separated.
fn distinct_eigensystem(t: &CMatrix) -> Result<(Vec<C64>, Mat)> {
    let s = schur(t)?;
    let n = t.dim();
    let radius = s.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = EIGEN_GAP_TOL * radius;
    let mut gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            gap = gap.min((s.eigenvalues[i] - s.eigenvalues[j]).norm());
        }
    }
    if n > 1 && !(gap > threshold) {
        return Err(Error::RepeatedEigenvalues { gap, threshold });
    }
    let mut vectors = Mat::zeros(n, n);
    for i in 0..n {
        vectors.set_column(i, &s.eigenvector(i));
    }
    Ok((s.eigenvalues, vectors))
}

fn invariance_defect_frobenius(t: &CMatrix, p: &OrthoProjection) -> f64 {
    let tp = t * p.matrix();
    (&tp - &(p.matrix() * &tp)).frobenius_norm()
}

/// Span of the eigenvector subset `mask`.
fn subset_projection(vectors: &Mat, mask: usize) -> Result<OrthoProjection> {
    let n = vectors.rows();
    let padded = CMatrix::try_from(Mat::from_fn(n, n, |i, j| {
        if mask >> j & 1 == 1 {
            vectors[(i, j)]
        } else {
            ZERO
        }
    }))?;
    range_projection(&padded, DEFAULT_RANK_TOL)
}

/// Splits the positive sum of two projections into range and kernel. Such a
/// sum is zero or has norm in `[1, 2]`, so the cutoff is absolute; a
/// relative one would promote rounding noise in a vanishing sum to rank.
fn split_projection_sum(sum: &CMatrix) -> Result<(OrthoProjection, OrthoProjection)> {
    let s = svd(sum)?;
    let rank = s
        .singular_values
        .iter()
        .take_while(|&&x| x > DEFAULT_RANK_TOL)
        .count();
    let n = sum.dim();
    Ok((
        OrthoProjection::from_frame(&s.left.as_mat().column_block(0, rank)),
        OrthoProjection::from_frame(&s.right.as_mat().column_block(rank, n)),
    ))
}

/// `E₁ ∨ E₂` as the range of `E₁ + E₂`.
pub fn join_projection(a: &OrthoProjection, b: &OrthoProjection) -> Result<OrthoProjection> {
    Ok(split_projection_sum(&(a.matrix() + b.matrix()))?.0)
}

/// `E₁ ∧ E₂` as the kernel of `(I − E₁) + (I − E₂)`.
pub fn meet_projection(a: &OrthoProjection, b: &OrthoProjection) -> Result<OrthoProjection> {
    let sum = a.complement().matrix() + b.complement().matrix();
    Ok(split_projection_sum(&sum)?.1)
}

/// Every invariant projection of a distinct-eigenvalue `T`, with join and
/// meet tables.
pub fn enumerate_lattice(t: &CMatrix) -> Result<InvariantLattice> {
    let n = t.dim();
    if n > MAX_LATTICE_DIM {
        return Err(Error::LatticeTooLarge {
            n,
            limit: MAX_LATTICE_DIM,
        });
    }
    let (eigenvalues, vectors) = distinct_eigensystem(t)?;
    let count = 1usize << n;
    let mut elements = Vec::with_capacity(count);
    for mask in 0..count {
        let p = subset_projection(&vectors, mask)?;
        if p.rank() != mask.count_ones() as usize {
            return Err(Error::LatticeContract(format!(
                "eigenvector subset {mask:#b} spans rank {} instead of {}",
                p.rank(),
                mask.count_ones()
            )));
        }
        let defect = invariance_defect_frobenius(t, &p);
        if !(defect <= ELEMENT_DEFECT_TOL) {
            return Err(Error::LatticeContract(format!(
                "element {mask:#b} has invariance defect {defect:e}"
            )));
        }
        elements.push(p);
    }
    let trace_list = elements.iter().map(|e| e.trace_value()).collect();
    let mut lattice = InvariantLattice {
        source: t.clone(),
        eigenvalues,
        elements,
        join_table: alloc::vec![0; count * count],
        meet_table: alloc::vec![0; count * count],
        trace_list,
    };

    for a in 0..count {
        for b in a..count {
            let join = lattice.find(&join_projection(
                &lattice.elements[a],
                &lattice.elements[b],
            )?)?;
            let meet = lattice.find(&meet_projection(
                &lattice.elements[a],
                &lattice.elements[b],
            )?)?;
            if join != a | b || meet != a & b {
                return Err(Error::LatticeContract(format!(
                    "join/meet of {a:#b} and {b:#b} gave {join:#b}/{meet:#b}"
                )));
            }
            for (x, y) in [(a, b), (b, a)] {
                lattice.join_table[x * count + y] = join;
                lattice.meet_table[x * count + y] = meet;
            }
        }
    }
    Ok(lattice)
}

/// `(τ(R(T)), τ(N(T)))`. Range and kernel split the same singular values
/// at the same cutoff, so the two ranks sum to exactly `n`.
pub fn rank_identity_check(t: &CMatrix) -> Result<(Rational, Rational)> {
    let range = range_projection(t, DEFAULT_RANK_TOL)?;
    let kernel = kernel_projection(t, DEFAULT_RANK_TOL)?;
    Ok((range.trace_value(), kernel.trace_value()))
}

/// `R(X·E)`. Its rank equals `rank E` whenever `X` is injective.
pub fn range_of_compression(x: &CMatrix, e: &OrthoProjection) -> Result<OrthoProjection> {
    range_projection(&(x * e.matrix()), DEFAULT_RANK_TOL)
}

/// An order-preserving map between two enumerated lattices.
#[derive(Clone, Debug)]
pub struct LatticeMap {
    pub intertwiner: CMatrix,
    pub source: InvariantLattice,
    pub target: InvariantLattice,
    /// `forward[i]` is the target index of `φ(source.elements[i])`.
    pub forward: Vec<usize>,
    pub trace_preserving: bool,
}

impl LatticeMap {
    pub fn is_bijective(&self) -> bool {
        self.forward.len() == self.target.len() && {
            let mut seen = alloc::vec![false; self.target.len()];
            self.forward
                .iter()
                .all(|&j| !core::mem::replace(&mut seen[j], true))
        }
    }
}

fn intertwining_residual(s: &CMatrix, t: &CMatrix, x: &CMatrix) -> (f64, f64) {
    let residual = (&(x * s) - &(t * x)).frobenius_norm();
    let threshold = 1e-10 * (x.frobenius_norm() * s.frobenius_norm()).max(1.0);
    (residual, threshold)
}

/// `φ(E) = R(XE)` from `Lat S` into `Lat T` for an injective `X` with
/// `XS = TX`, verified to be an injective, trace-preserving lattice
/// homomorphism.
pub fn sublattice_embedding(s: &CMatrix, t: &CMatrix, x: &CMatrix) -> Result<LatticeMap> {
    if s.dim() != t.dim() || s.dim() != x.dim() {
        return Err(Error::Dimension {
            expected: s.dim(),
            found: if t.dim() != s.dim() { t.dim() } else { x.dim() },
        });
    }
    let (residual, threshold) = intertwining_residual(s, t, x);
    if !(residual <= threshold) {
        return Err(Error::NotIntertwining {
            residual,
            threshold,
        });
    }
    let kernel_rank = kernel_projection(x, DEFAULT_RANK_TOL)?.rank();
    if kernel_rank != 0 {
        return Err(Error::NonTrivialKernel { rank: kernel_rank });
    }
    let source = enumerate_lattice(s)?;
    let target = enumerate_lattice(t)?;
    let forward = source
        .elements
        .iter()
        .map(|e| target.find(&range_of_compression(x, e)?))
        .collect::<Result<Vec<usize>>>()?;

    let trace_preserving = forward
        .iter()
        .enumerate()
        .all(|(i, &j)| source.trace_list[i] == target.trace_list[j]);
    if !trace_preserving {
        return Err(Error::LatticeContract(
            "an injective intertwiner changed a trace".into(),
        ));
    }
    let len = source.len();
    for a in 0..len {
        for b in a + 1..len {
            if forward[a] == forward[b] {
                return Err(Error::LatticeContract(format!(
                    "elements {a:#b} and {b:#b} have the same image"
                )));
            }
        }
    }
    for a in 0..len {
        for b in 0..len {
            let (fa, fb) = (forward[a], forward[b]);
            if forward[source.join(a, b)] != target.join(fa, fb) {
                return Err(Error::LatticeContract(format!(
                    "join of {a:#b} and {b:#b} is not preserved"
                )));
            }
            if forward[source.meet(a, b)] != target.meet(fa, fb) {
                return Err(Error::LatticeContract(format!(
                    "meet of {a:#b} and {b:#b} is not preserved"
                )));
            }
            // τ(E₁∧E₂) = τ(E₁) + τ(E₂) − τ(E₁∨E₂), in exact rank arithmetic
            let tr = |l: &InvariantLattice, i: usize| l.elements[i].rank() as i64;
            let lhs = tr(&target, target.meet(fa, fb));
            let rhs = tr(&target, fa) + tr(&target, fb) - tr(&target, target.join(fa, fb));
            if lhs != rhs {
                return Err(Error::LatticeContract(format!(
                    "modular trace identity fails at {a:#b}, {b:#b}"
                )));
            }
        }
    }
    Ok(LatticeMap {
        intertwiner: x.clone(),
        source,
        target,
        forward,
        trace_preserving,
    })
}

/// Outcome of comparing `Lat(ST)` with `Lat(TS)`.
#[derive(Clone, Debug)]
pub enum StTsOutcome {
    /// Both factors injective: `φ(E) = R(TE)` and `ψ(F) = R(SF)` are
    /// mutually inverse lattice isomorphisms.
    Isomorphism {
        forward: LatticeMap,
        backward: LatticeMap,
    },
    /// A factor is singular: a kernel or range of the factors is a
    /// nontrivial invariant projection of each product.
    Nontrivial {
        st_witness: OrthoProjection,
        ts_witness: OrthoProjection,
    },
}

/// Nontrivial invariant projection of `AB` built from the factors:
/// `N(B)` when `B` is singular, otherwise `R(A)`. `None` when the product
/// is zero (every projection is invariant) or `n = 1`.
fn product_witness(a: &CMatrix, b: &CMatrix) -> Result<Option<OrthoProjection>> {
    let n = a.dim();
    let ab = a * b;
    if n < 2 || ab.frobenius_norm() == 0.0 {
        return Ok(None);
    }
    let kernel_b = kernel_projection(b, DEFAULT_RANK_TOL)?;
    let candidate = if kernel_b.rank() > 0 && kernel_b.rank() < n {
        kernel_b
    } else {
        range_projection(a, DEFAULT_RANK_TOL)?
    };
    if candidate.rank() == 0 || candidate.rank() == n {
        return Ok(None);
    }
    let scale = ab.frobenius_norm().max(1.0);
    let defect = invariance_defect_frobenius(&ab, &candidate);
    if !(defect <= ELEMENT_DEFECT_TOL * scale) {
        return Err(Error::LatticeContract(format!(
            "factor witness has invariance defect {defect:e}"
        )));
    }
    Ok(Some(candidate))
}

/// Any nontrivial coordinate projection; used when the product vanishes.
fn any_nontrivial(n: usize) -> OrthoProjection {
    OrthoProjection::from_frame(&Mat::coordinate_frame(n, 1))
}

/// Compares `Lat(ST)` and `Lat(TS)`.
pub fn st_ts_isomorphism(s: &CMatrix, t: &CMatrix) -> Result<StTsOutcome> {
    let n = s.dim();
    if t.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: t.dim(),
        });
    }
    let s_injective = kernel_projection(s, DEFAULT_RANK_TOL)?.rank() == 0;
    let t_injective = kernel_projection(t, DEFAULT_RANK_TOL)?.rank() == 0;
    if !(s_injective && t_injective) {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "no nontrivial projection exists for n = 1".into(),
            ));
        }
        let st_witness = product_witness(s, t)?.unwrap_or_else(|| any_nontrivial(n));
        let ts_witness = product_witness(t, s)?.unwrap_or_else(|| any_nontrivial(n));
        return Ok(StTsOutcome::Nontrivial {
            st_witness,
            ts_witness,
        });
    }

    let st = s * t;
    let ts = t * s;
    // T·(ST) = (TS)·T and S·(TS) = (ST)·S
    let forward = sublattice_embedding(&st, &ts, t)?;
    let backward = sublattice_embedding(&ts, &st, s)?;
    if !forward.is_bijective() || !backward.is_bijective() {
        return Err(Error::LatticeContract(
            "products of injective factors gave lattices of different size".into(),
        ));
    }
    for (i, e) in forward.source.elements.iter().enumerate() {
        let f = &forward.target.elements[forward.forward[i]];
        let back = range_of_compression(s, f)?;
        let distance = back.distance(e);
        if backward.forward[forward.forward[i]] != i || !(distance <= MATCH_TOL) {
            return Err(Error::LatticeContract(format!(
                "round trip moves element {i:#b} by {distance:e}"
            )));
        }
    }
    Ok(StTsOutcome::Isomorphism { forward, backward })
}

/// Riesz spectral idempotents `vᵢ·wᵢ*` of a distinct-eigenvalue `T`
/// (`wᵢ*` the rows of the inverse eigenvector matrix). For such `T` they
/// span the commutant.
pub fn spectral_idempotents(t: &CMatrix) -> Result<Vec<CMatrix>> {
    let (_, vectors) = distinct_eigensystem(t)?;
    let n = t.dim();
    let v = CMatrix::try_from(vectors)?;
    let w = inverse(&v)?;
    (0..n)
        .map(|i| CMatrix::try_from(Mat::from_fn(n, n, |r, c| v[(r, i)] * w[(i, c)])))
        .collect()
}

/// Whether the range of `p` is invariant under the whole commutant of a
/// distinct-eigenvalue `T`, tested on its spectral idempotents.
pub fn is_hyperinvariant(idempotents: &[CMatrix], p: &OrthoProjection) -> bool {
    idempotents.iter().all(|e| {
        let ep = e * p.matrix();
        let defect = (&ep - &(p.matrix() * &ep)).frobenius_norm();
        defect <= ELEMENT_DEFECT_TOL * e.frobenius_norm().max(1.0)
    })
}

/// Indices of lattice elements that are hyperinvariant.
pub fn hyperinvariant_elements(lattice: &InvariantLattice) -> Result<Vec<usize>> {
    let idempotents = spectral_idempotents(&lattice.source)?;
    Ok((0..lattice.len())
        .filter(|&i| is_hyperinvariant(&idempotents, &lattice.elements[i]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::SeededStream;

    fn r(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn diagonal_lattices() {
        let l = enumerate_lattice(&CMatrix::real_diagonal(&[1.0, 2.0])).unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(
            l.trace_list,
            alloc::vec![r(0, 1), r(1, 2), r(1, 2), r(1, 1)]
        );
        assert_eq!(l.elements[l.bottom()].rank(), 0);
        assert_eq!(l.elements[l.top()].rank(), 2);
        assert_eq!(
            enumerate_lattice(&CMatrix::real_diagonal(&[1.0, 2.0, 3.0]))
                .unwrap()
                .len(),
            8
        );
    }

    #[test]
    fn random_lattice_elements_are_invariant() {
        let t = SeededStream::new(7, 0).ginibre(4);
        let l = enumerate_lattice(&t).unwrap();
        assert_eq!(l.len(), 16);
        for e in &l.elements {
            assert!(invariance_defect_frobenius(&t, e) <= 1e-8);
        }
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(l.join(a, b), a | b);
                assert_eq!(l.meet(a, b), a & b);
            }
        }
    }

    #[test]
    fn repeated_and_oversized_are_refused() {
        assert!(matches!(
            enumerate_lattice(&CMatrix::identity(3)),
            Err(Error::RepeatedEigenvalues { .. })
        ));
        assert!(matches!(
            enumerate_lattice(&CMatrix::jordan(2)),
            Err(Error::RepeatedEigenvalues { .. })
        ));
        let big = CMatrix::real_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert!(matches!(
            enumerate_lattice(&big),
            Err(Error::LatticeTooLarge { n: 9, .. })
        ));
    }

    #[test]
    fn rank_identity_examples() {
        assert_eq!(
            rank_identity_check(&CMatrix::real_diagonal(&[1.0, 0.0])).unwrap(),
            (r(1, 2), r(1, 2))
        );
        let inv = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 3.0]]).unwrap();
        assert_eq!(rank_identity_check(&inv).unwrap(), (r(1, 1), r(0, 1)));
        let mut rng = SeededStream::new(3, 0);
        for (n, k) in [(5usize, 2usize), (6, 1), (7, 6)] {
            let a = rng.gaussian_mat(n, k);
            let b = rng.gaussian_mat(k, n);
            let t = CMatrix::try_from(a.matmul(&b)).unwrap();
            assert_eq!(
                rank_identity_check(&t).unwrap(),
                (r(k as u64, n as u64), r((n - k) as u64, n as u64))
            );
        }
    }

    #[test]
    fn compression_ranges() {
        let e = OrthoProjection::from_frame(&Mat::coordinate_frame(3, 2));
        assert_eq!(
            range_of_compression(&CMatrix::identity(3), &e)
                .unwrap()
                .distance(&e),
            0.0
        );
        let x = SeededStream::new(1, 0).ginibre(3);
        let line = OrthoProjection::from_frame(&Mat::coordinate_frame(3, 1));
        assert_eq!(
            range_of_compression(&x, &line).unwrap().trace_value(),
            r(1, 3)
        );
        let singular = CMatrix::real_diagonal(&[1.0, 0.0]);
        let out = range_of_compression(&singular, &OrthoProjection::identity(2)).unwrap();
        assert_eq!(out.rank(), 1);
        assert!((out.matrix() - &singular).frobenius_norm() < 1e-15);
    }

    #[test]
    fn identity_embedding() {
        let d = CMatrix::real_diagonal(&[1.0, 2.0]);
        let m = sublattice_embedding(&d, &d, &CMatrix::identity(2)).unwrap();
        assert_eq!(m.forward, alloc::vec![0, 1, 2, 3]);
        assert!(m.trace_preserving && m.is_bijective());
    }

    #[test]
    fn similarity_transports_lattice() {
        let s = CMatrix::real_diagonal(&[1.0, 2.0]);
        let a = SeededStream::new(5, 0).ginibre(2);
        let t = &(&a * &s) * &inverse(&a).unwrap();
        let m = sublattice_embedding(&s, &t, &a).unwrap();
        assert!(m.is_bijective());
        assert!(m.trace_preserving);
        // the map preserves the eigenvalue attached to each line
        for i in [1usize, 2] {
            let src = s.diag()[i.trailing_zeros() as usize];
            let j = m.forward[i];
            let tgt = m.target.eigenvalues[j.trailing_zeros() as usize];
            assert!((src - tgt).norm() < 1e-10);
        }
    }

    #[test]
    fn embedding_preconditions() {
        let s = CMatrix::real_diagonal(&[1.0, 2.0]);
        let t = CMatrix::real_diagonal(&[3.0, 4.0]);
        assert!(matches!(
            sublattice_embedding(&s, &t, &CMatrix::identity(2)),
            Err(Error::NotIntertwining { .. })
        ));
        let x = CMatrix::real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            sublattice_embedding(&s, &s, &x),
            Err(Error::NonTrivialKernel { rank: 1 })
        ));
    }

    #[test]
    fn st_ts_example() {
        let s = CMatrix::real_diagonal(&[1.0, 2.0]);
        let t = CMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 3.0]]).unwrap();
        match st_ts_isomorphism(&s, &t).unwrap() {
            StTsOutcome::Isomorphism { forward, backward } => {
                assert_eq!(forward.source.len(), 4);
                assert_eq!(backward.source.len(), 4);
                assert!(forward.trace_preserving && forward.is_bijective());
                for i in 0..4 {
                    assert_eq!(backward.forward[forward.forward[i]], i);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inverse_pair_is_refused() {
        let t = CMatrix::from_real_rows(&[&[2.0, 1.0], &[0.0, 1.0]]).unwrap();
        let s = inverse(&t).unwrap();
        assert!(matches!(
            st_ts_isomorphism(&s, &t),
            Err(Error::RepeatedEigenvalues { .. })
        ));
    }

    #[test]
    fn singular_factor_gives_witness() {
        let s = CMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 1.0, 0.0]])
            .unwrap();
        let t = SeededStream::new(2, 0).ginibre(3);
        match st_ts_isomorphism(&s, &t).unwrap() {
            StTsOutcome::Nontrivial {
                st_witness,
                ts_witness,
            } => {
                for (prod, w) in [(&s * &t, &st_witness), (&t * &s, &ts_witness)] {
                    assert!(0 < w.rank() && w.rank() < 3);
                    assert!(invariance_defect_frobenius(&prod, w) < 1e-8);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn every_invariant_element_is_hyperinvariant() {
        let t = SeededStream::new(9, 0).ginibre(3);
        let l = enumerate_lattice(&t).unwrap();
        assert_eq!(
            hyperinvariant_elements(&l).unwrap(),
            (0..8).collect::<Vec<_>>()
        );
        // a generic line is not
        let idem = spectral_idempotents(&t).unwrap();
        let line = OrthoProjection::from_frame(&SeededStream::new(9, 1).frame(3, 1));
        assert!(!is_hyperinvariant(&idem, &line));
        let sum = idem.iter().fold(CMatrix::zeros(3), |acc, e| &acc + e);
        assert!((&sum - &CMatrix::identity(3)).frobenius_norm() < 1e-10);
    }
}
