"""Event probabilities and conditional kernels of a DPP model.

A DppModel pairs the marginal kernel K with the L-ensemble kernel, deriving
either one from the other on demand. Probabilities of mixed events
(A inside Y, B outside Y) come from one bordered determinant, conditional
kernels from Schur complements.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NumericalFailureError
from .kernels import (
    DEFAULT_EPS_SPEC,
    EnsembleKernel,
    Event,
    IndexSet,
    IndexSetLike,
    MarginalKernel,
    MatrixLike,
    SymMatrix,
    as_index_set,
    complement_marginal,
    k_from_l,
    l_from_k,
    schur_complement,
    validate_ensemble,
    validate_marginal,
)

PROB_CLAMP_TOL = 1e-12


class DppModel:
    """A DPP over {1..n}, addressable through either kernel.

    Create with :meth:`from_marginal` or :meth:`from_ensemble`. The kernel
    not supplied is derived lazily (marginal eagerly from an ensemble, the
    ensemble on first use from a marginal) and cached.
    """

    def __init__(self, marginal: MarginalKernel, ensemble: Optional[EnsembleKernel] = None):
        self._marginal = marginal
        self._ensemble = ensemble
        self._lock = threading.Lock()

    @classmethod
    def from_marginal(cls, k: MatrixLike, eps_spec: float = DEFAULT_EPS_SPEC) -> "DppModel":
        return cls(validate_marginal(k, eps_spec))

    @classmethod
    def from_ensemble(cls, l: MatrixLike, eps_spec: float = DEFAULT_EPS_SPEC) -> "DppModel":
        ens = validate_ensemble(l, eps_spec)
        return cls(k_from_l(ens, eps_spec), ens)

    @property
    def n(self) -> int:
        return self._marginal.n

    @property
    def marginal(self) -> MarginalKernel:
        return self._marginal

    @property
    def ensemble(self) -> EnsembleKernel:
        with self._lock:
            if self._ensemble is None:
                self._ensemble = l_from_k(self._marginal)
            return self._ensemble

    def __repr__(self) -> str:
        return f"DppModel(n={self.n})"


def _clamp_probability(p: float, tol: float = PROB_CLAMP_TOL) -> float:
    """Snap values within tol of [0, 1] onto the interval; reject worse ones."""
    if -tol <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + tol:
        return 1.0
    if p < -tol or p > 1.0 + tol:
        raise NumericalFailureError(
            f"computed probability {p!r} lies outside [0, 1] beyond tolerance {tol:.1e}"
        )
    return p


def inclusion_prob(model: DppModel, a: IndexSetLike) -> float:
    """Pr(A ⊆ Y) = det(K_A). The empty set gives 1."""
    aset = as_index_set(a)
    aset.check_within(model.n, "inclusion set")
    idx = aset.indices0
    sub = model.marginal.array[np.ix_(idx, idx)]
    return _clamp_probability(float(np.linalg.det(sub)))


def exact_prob(model: DppModel, a: IndexSetLike) -> float:
    """Pr(Y = A) = det(L_A) / det(L + I)."""
    aset = as_index_set(a)
    aset.check_within(model.n, "sample set")
    larr = model.ensemble.array
    idx = aset.indices0
    num = float(np.linalg.det(larr[np.ix_(idx, idx)]))
    den = float(np.linalg.det(larr + np.eye(model.n)))
    return _clamp_probability(num / den)


def mixed_prob(model: DppModel, event: Event) -> float:
    """Pr(A ⊆ Y, B ∩ Y = ∅) for event (include=A, exclude=B).

    Computed as (-1)^|B| times the determinant of the bordered matrix

        [[ K_A,    K_{A,B}   ],
         [ K_{B,A}, K_B - I  ]]

    which is an LU determinant; the matrix is indefinite by design.
    """
    event.check_within(model.n)
    karr = model.marginal.array
    ai = event.include.indices0
    bi = event.exclude.indices0
    order = np.concatenate([ai, bi])
    bordered = karr[np.ix_(order, order)].copy()
    nb = len(bi)
    if nb:
        diag = np.arange(len(ai), len(order))
        bordered[diag, diag] -= 1.0
    det = float(np.linalg.det(bordered))
    return _clamp_probability(((-1.0) ** nb) * det)


@dataclass(frozen=True)
class ConditionalKernel:
    """A marginal kernel on a reduced ground set, with original labels.

    ``labels[j]`` is the original 1-based element behind local row/column j.
    """

    kernel: MarginalKernel
    labels: tuple[int, ...]

    @property
    def array(self) -> np.ndarray:
        return self.kernel.array

    @property
    def n(self) -> int:
        return self.kernel.n

    def local_positions(self, a: IndexSetLike) -> np.ndarray:
        """0-based local positions of original indices a. All must be present."""
        pos = {label: j for j, label in enumerate(self.labels)}
        aset = as_index_set(a)
        missing = [i for i in aset if i not in pos]
        if missing:
            raise KeyError(f"elements {missing} are not in the conditional ground set")
        return np.array([pos[i] for i in aset], dtype=np.intp)

    def model(self) -> DppModel:
        """The conditional law as a DPP model on the reduced ground set."""
        return DppModel(self.kernel)


def conditional_kernel_given_included(
    model: DppModel, c: IndexSetLike, eps_spec: float = DEFAULT_EPS_SPEC
) -> ConditionalKernel:
    """Kernel of Y \\ C conditioned on C ⊆ Y: the Schur complement K / K_C."""
    cset = as_index_set(c)
    cset.check_within(model.n, "conditioning set")
    s = schur_complement(model.marginal.matrix, cset, eps_spec)
    labels = tuple(cset.complement(model.n))
    return ConditionalKernel(validate_marginal(s, eps_spec), labels)


def conditional_kernel_given_excluded(
    model: DppModel, c: IndexSetLike, eps_spec: float = DEFAULT_EPS_SPEC
) -> ConditionalKernel:
    """Kernel of Y conditioned on C ∩ Y = ∅, namely I - (I - K) / (I - K)_C.

    Conditioning the complement process on containing C is the same event,
    which reduces to the inclusion case above.
    """
    cset = as_index_set(c)
    cset.check_within(model.n, "conditioning set")
    comp = complement_marginal(model.marginal, eps_spec)
    s = schur_complement(comp.matrix, cset, eps_spec)
    kern = SymMatrix._wrap(np.eye(s.n) - s.array)
    labels = tuple(cset.complement(model.n))
    return ConditionalKernel(validate_marginal(kern, eps_spec), labels)


def conditional_kernel(
    model: DppModel, given: Event, eps_spec: float = DEFAULT_EPS_SPEC
) -> ConditionalKernel:
    """Kernel of Y restricted to the remaining elements, given a mixed event.

    Applies the exclusion reduction first, then the inclusion Schur step on
    the reduced kernel. Either part of the event may be empty.
    """
    given.check_within(model.n)
    n = model.n
    if not given.exclude:
        return conditional_kernel_given_included(model, given.include, eps_spec)
    reduced = conditional_kernel_given_excluded(model, given.exclude, eps_spec)
    if not given.include:
        return reduced
    local_c = IndexSet(int(p) + 1 for p in reduced.local_positions(given.include))
    inner = conditional_kernel_given_included(reduced.model(), local_c, eps_spec)
    labels = tuple(reduced.labels[j - 1] for j in inner.labels)
    return ConditionalKernel(inner.kernel, labels)
