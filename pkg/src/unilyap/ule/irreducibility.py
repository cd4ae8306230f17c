"""Three-way test for irreducibility over the reals (no common invariant subspace)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..matcore import MatTuple

RANK_RTOL = 1e-9


@dataclass(frozen=True)
class IrreducibilityResult:
    """``status`` is ``"Irreducible"``, ``"Reducible"`` or ``"Inconclusive"``.

    ``witness`` holds an orthonormal basis (columns) of a common invariant
    proper subspace when Reducible.
    """

    status: str
    witness: np.ndarray | None = None
    algebra_dim: int = 0
    commutant_dim: int | None = None
    note: str = ""

    @property
    def irreducible(self) -> bool:
        return self.status == "Irreducible"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": None if self.witness is None else self.witness.tolist(),
            "algebra_dim": self.algebra_dim,
            "commutant_dim": self.commutant_dim,
            "note": self.note,
        }


def _orth(rows: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (rows) of the row span."""
    if rows.size == 0:
        return rows
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return vt[:0]
    return vt[s > rtol * s[0]]


def algebra_basis(mats) -> np.ndarray:
    """Orthonormal basis (as ``(m, d, d)``) of the unital algebra generated by ``mats``."""
    mats = [m / np.abs(m).sum() for m in mats if np.abs(m).sum() > 0]
    d = mats[0].shape[0]
    basis = _orth(np.array([np.eye(d).ravel()] + [m.ravel() for m in mats]))
    while True:
        elems = basis.reshape(-1, d, d)
        prods = [(e @ m).ravel() for e in elems for m in mats]
        new = _orth(np.vstack([basis, np.array(prods)]))
        if len(new) == len(basis):
            return new.reshape(-1, d, d)
        basis = new


def _invariant_span(algebra: np.ndarray, v: np.ndarray) -> np.ndarray:
    return _orth(np.array([a @ v for a in algebra]))


def _probes(x: np.ndarray) -> list[np.ndarray]:
    """Standard basis vectors plus real and imaginary parts of the eigenvectors of ``x``.

    Every subspace invariant under ``x`` contains one of these parts for
    some eigenvector, so when ``x`` has simple eigenvalues each invariant
    subspace of the algebra contains a probe.
    """
    d = x.shape[0]
    out = list(np.eye(d))
    _, vecs = np.linalg.eig(x)
    for vec in vecs.T:
        for part in (vec.real, vec.imag):
            if np.abs(part).max() > 1e-12:
                out.append(part / np.linalg.norm(part))
    return out


def _find_witness(algebra: np.ndarray, rng: np.random.Generator) -> np.ndarray | None:
    d = algebra.shape[1]
    x = np.tensordot(rng.standard_normal(len(algebra)), algebra, axes=1)
    for v in _probes(x):
        span = _invariant_span(algebra, v)
        if 0 < len(span) < d:
            return span.T
    # A subspace invariant under the transposes has an invariant orthogonal complement.
    alg_t = np.transpose(algebra, (0, 2, 1))
    for v in _probes(x.T):
        span = _invariant_span(alg_t, v)
        if 0 < len(span) < d:
            full = np.linalg.svd(span)[2]
            return full[len(span):].T
    return None


def _commutant(mats, d: int) -> np.ndarray:
    eye = np.eye(d)
    # Row-major vec: vec(X M) = (I ⊗ Mᵀ) vec X and vec(M X) = (M ⊗ I) vec X.
    system = np.vstack([np.kron(eye, m.T) - np.kron(m, eye) for m in mats])
    _, s, vt = np.linalg.svd(system)
    scale = s[0] if s.size and s[0] > 0 else 1.0
    s = np.concatenate([s, np.zeros(d * d - len(s))])
    return vt[s <= RANK_RTOL * scale].reshape(-1, d, d)


def _is_division_algebra(comm: np.ndarray) -> bool:
    """Real division algebras are ℝ, ℂ, ℍ: trace form signature ``(1, c - 1)``, nondegenerate."""
    c = len(comm)
    if c not in (1, 2, 4):
        return False
    gram = np.array([[np.trace(a @ b) for b in comm] for a in comm])
    gram = (gram + gram.T) / 2
    ev = np.linalg.eigvalsh(gram)
    scale = np.abs(ev).max()
    if scale == 0 or np.abs(ev).min() <= 1e-8 * scale:
        return False
    return int((ev > 0).sum()) == 1 and int((ev < 0).sum()) == c - 1


def irreducibility_test(M: MatTuple, certify_commutant: bool = True, seed: int = 0) -> IrreducibilityResult:
    """Decide whether the tuple has a common invariant proper subspace.

    Irreducible when the generated algebra is all of ``d x d`` matrices.
    Reducible when ``span(algebra · v)`` is a proper nonzero subspace for
    some probe ``v`` (standard basis vectors and the real and imaginary
    parts of eigenvectors of a random algebra element), also tried on the
    transposed algebra.

    With ``certify_commutant`` an algebra of smaller dimension is still
    certified irreducible when its commutant ``C`` is a division algebra and
    ``dim(algebra) · dim(C) = d²``; this settles e.g. rotations, whose
    algebra is a copy of ℂ.  Without it such cases are Inconclusive.
    """
    mats = [np.asarray(m, dtype=float) for m in M.mats]
    d = M.d
    if d == 1:
        return IrreducibilityResult("Irreducible", algebra_dim=1, note="dimension 1")
    algebra = algebra_basis(mats)
    dim = len(algebra)
    if dim == d * d:
        return IrreducibilityResult("Irreducible", algebra_dim=dim, note="algebra is the full matrix algebra")
    witness = _find_witness(algebra, np.random.default_rng(seed))
    if witness is not None:
        for col in witness.T:
            lead = col[np.argmax(np.abs(col) > 1e-12)]
            col *= np.sign(lead)
        return IrreducibilityResult("Reducible", witness=witness, algebra_dim=dim, note="common invariant subspace found")
    if not certify_commutant:
        return IrreducibilityResult("Inconclusive", algebra_dim=dim, note="proper algebra without a found invariant subspace")
    comm = _commutant(mats, d)
    c = len(comm)
    if _is_division_algebra(comm) and dim * c == d * d:
        return IrreducibilityResult(
            "Irreducible", algebra_dim=dim, commutant_dim=c, note="commutant is a division algebra of complementary dimension"
        )
    return IrreducibilityResult("Inconclusive", algebra_dim=dim, commutant_dim=c, note="no invariant subspace found and no certificate")
