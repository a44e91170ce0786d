"""Eigendecompositions, projection matrices, and canonical invariant tokens.

A symmetric graph matrix M decomposes as M = sum_i lambda_i P_i over its
distinct eigenvalues; the P_i are the unique orthogonal projectors onto
the eigenspaces.  The pair invariant of (u, v) is the multiset
{(lambda_i, P_i(u, v))}, rendered here as a canonical byte string after
decimal quantization so that tokens compare exactly across graphs and
platforms.

An exact rational backend (characteristic polynomial plus the moment
sequence M^k(u, v), all big-rational arithmetic) cross-validates the
floating-point tokens: equal exact tokens always imply equal invariant
values, and for the adjacency and Laplacian kinds the converse holds
within a fixed spectrum (Vandermonde invertibility).  For the normalized
Laplacian the exact token is a sufficient-only certificate.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .graphs import Graph, MatrixKind, build_matrix

__all__ = [
    "ExactPairToken",
    "PairToken",
    "Quantization",
    "ResidualReport",
    "SpectralDecomposition",
    "SpectralError",
    "SpectrumToken",
    "decompose",
    "decomposition_for",
    "dump_decomposition",
    "exact_pair_token",
    "pair_token",
    "quantize",
    "quantize_fraction",
    "spectrum_token",
    "validate_decomposition",
]

EPS_ALG = 1e-8


class SpectralError(RuntimeError):
    """Eigensolver failure; carries the offending matrix."""

    def __init__(self, message: str, matrix: np.ndarray):
        super().__init__(message)
        self.matrix = matrix


@dataclass(frozen=True)
class Quantization:
    """Token quantization parameters.

    ``digits`` is the decimal rounding (half-even) applied to eigenvalues
    and projection entries before serialization; ``eig_gap_scale`` scales
    the eigenvalue clustering threshold tau = scale * max(1, max|M|).
    """

    digits: int = 6
    eig_gap_scale: float = 1e-8


DEFAULT_QUANT = Quantization()


def quantize(x: float, quant: Quantization = DEFAULT_QUANT) -> str:
    """Fixed-width decimal string, round-half-even, negative zero normalized."""
    s = format(float(x), f".{quant.digits}f")
    if s.startswith("-") and float(s) == 0.0:
        s = s[1:]
    return s


def quantize_fraction(x: Fraction, quant: Quantization = DEFAULT_QUANT) -> str:
    """Exact half-even decimal rounding of a rational.

    Rational inputs sidestep the floating-point tie hazard: a walk
    probability like 139/640 terminates with a 5 in the seventh decimal,
    where solver noise would otherwise decide the rounding direction.
    """
    digits = quant.digits
    scaled = x * 10**digits
    floor = scaled.numerator // scaled.denominator
    rem = scaled - floor
    if rem > Fraction(1, 2) or (rem == Fraction(1, 2) and floor % 2):
        floor += 1
    sign = "-" if floor < 0 else ""
    mag = abs(floor)
    whole, frac = divmod(mag, 10**digits)
    if mag == 0:
        sign = ""
    return f"{sign}{whole}.{frac:0{digits}d}"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct ascending eigenvalues with multiplicities and projectors."""

    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]
    projections: tuple[np.ndarray, ...]

    @property
    def m(self) -> int:
        return len(self.eigenvalues)

    def pseudo_inverse(self, power: int = 1) -> np.ndarray:
        """Moore-Penrose inverse of M^power, inverting nonzero eigenvalue
        clusters and zeroing the kernel cluster (same clustering threshold
        as the decomposition itself)."""
        n = self.projections[0].shape[0]
        out = np.zeros((n, n))
        for lam, proj in zip(self.eigenvalues, self.projections):
            if lam != 0.0:
                out += proj / (lam**power)
        return out


@dataclass(frozen=True)
class ResidualReport:
    idempotence: float
    orthogonality: float
    completeness: float
    reconstruction: float
    trace_error: float

    def passed(self, eps: float = EPS_ALG) -> bool:
        return (
            max(self.idempotence, self.orthogonality, self.completeness, self.reconstruction) <= eps
            and self.trace_error <= eps
        )


def decompose(matrix: np.ndarray, quant: Quantization = DEFAULT_QUANT) -> SpectralDecomposition:
    """Eigendecomposition into distinct-eigenvalue clusters and projectors.

    Eigenvalues are sorted ascending and split into clusters wherever the
    gap exceeds tau = eig_gap_scale * max(1, max|M|); each projector is
    the Gram matrix of the cluster's orthonormal eigenvectors.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("matrix must be square")
    if matrix.size and np.max(np.abs(matrix - matrix.T)) != 0.0:
        raise ValueError("matrix must be exactly symmetric")
    n = matrix.shape[0]
    if n == 0:
        return SpectralDecomposition((), (), ())
    try:
        w, v = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigensolver failed: {exc}", matrix) from exc

    tau = quant.eig_gap_scale * max(1.0, float(np.max(np.abs(matrix))))
    clusters: list[list[int]] = [[0]]
    for i in range(1, n):
        if w[i] - w[i - 1] > tau:
            clusters.append([i])
        else:
            clusters[-1].append(i)

    eigenvalues = []
    mults = []
    projections = []
    for idxs in clusters:
        lam = float(np.mean(w[idxs]))
        # snap the kernel cluster exactly to zero so pseudo-inverses are clean
        if abs(lam) <= tau:
            lam = 0.0
        block = v[:, idxs]
        proj = block @ block.T
        proj = (proj + proj.T) / 2.0
        proj.flags.writeable = False
        eigenvalues.append(lam)
        mults.append(len(idxs))
        projections.append(proj)
    return SpectralDecomposition(tuple(eigenvalues), tuple(mults), tuple(projections))


def validate_decomposition(dec: SpectralDecomposition, matrix: np.ndarray) -> ResidualReport:
    """Max residuals for idempotence, orthogonality, completeness,
    reconstruction, and trace-vs-multiplicity agreement."""
    n = matrix.shape[0]
    if dec.m == 0:
        return ResidualReport(0.0, 0.0, 0.0, 0.0, 0.0)
    idem = max(float(np.max(np.abs(p @ p - p))) for p in dec.projections)
    orth = 0.0
    for i in range(dec.m):
        for j in range(i + 1, dec.m):
            orth = max(orth, float(np.max(np.abs(dec.projections[i] @ dec.projections[j]))))
    total = sum(dec.projections)
    comp = float(np.max(np.abs(total - np.eye(n))))
    recon = sum(lam * p for lam, p in zip(dec.eigenvalues, dec.projections))
    rec = float(np.max(np.abs(recon - matrix)))
    tr = max(
        abs(float(np.trace(p)) - mult) for p, mult in zip(dec.projections, dec.multiplicities)
    )
    return ResidualReport(idem, orth, comp, rec, tr)


# ---------------------------------------------------------------------------
# per-(graph, kind) decomposition cache

_DECOMP_CACHE: dict[tuple, SpectralDecomposition] = {}
_QPROJ_CACHE: dict[tuple, tuple] = {}


def decomposition_for(
    g: Graph, kind: MatrixKind, quant: Quantization = DEFAULT_QUANT
) -> SpectralDecomposition:
    """Cached decomposition of the graph's matrix of the given kind.

    Concurrent first computation is benign: results are identical, so a
    duplicated fill is a wasted eigensolve, never an inconsistency.
    """
    key = (g, kind, quant)
    dec = _DECOMP_CACHE.get(key)
    if dec is None:
        dec = decompose(build_matrix(g, kind), quant)
        _DECOMP_CACHE[key] = dec
    return dec


def quantized_projections(
    g: Graph, kind: MatrixKind, quant: Quantization = DEFAULT_QUANT
) -> tuple[tuple[str, ...], list[list[list[str]]]]:
    """Quantized eigenvalue strings and per-slice entry strings.

    Returns (lams, entries) with entries[i][u][v] the quantized P_i(u, v).
    """
    key = (g, kind, quant)
    cached = _QPROJ_CACHE.get(key)
    if cached is None:
        dec = decomposition_for(g, kind, quant)
        lams = tuple(quantize(lam, quant) for lam in dec.eigenvalues)
        entries = [
            [[quantize(p[u, v], quant) for v in range(g.n)] for u in range(g.n)]
            for p in dec.projections
        ]
        cached = (lams, entries)
        _QPROJ_CACHE[key] = cached
    return cached


# ---------------------------------------------------------------------------
# canonical tokens


@dataclass(frozen=True)
class PairToken:
    """Canonical byte encoding of the multiset {(lambda_i, P_i(u, v))}."""

    data: bytes

    @property
    def digest(self) -> str:
        return hashlib.blake2b(self.data, digest_size=16).hexdigest()

    def __repr__(self):
        return f"PairToken({self.data.decode()})"


@dataclass(frozen=True)
class SpectrumToken:
    """Canonical byte encoding of the eigenvalue multiset (with multiplicities)."""

    data: bytes

    @property
    def digest(self) -> str:
        return hashlib.blake2b(self.data, digest_size=16).hexdigest()

    def __repr__(self):
        return f"SpectrumToken({self.data.decode()})"


def pair_token(
    g: Graph, kind: MatrixKind, u: int, v: int, quant: Quantization = DEFAULT_QUANT
) -> PairToken:
    """Projection pair invariant of (u, v) as a canonical token."""
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise IndexError(f"vertex pair ({u}, {v}) out of range")
    lams, entries = quantized_projections(g, kind, quant)
    records = sorted(f"{lam}:{ent[u][v]}" for lam, ent in zip(lams, entries))
    return PairToken(f"P[{kind.value}]" .encode() + ";".join(records).encode())


def spectrum_token(g: Graph, kind: MatrixKind, quant: Quantization = DEFAULT_QUANT) -> SpectrumToken:
    """Eigenvalue multiset of the graph's matrix as a canonical token."""
    dec = decomposition_for(g, kind, quant)
    records = sorted(
        f"{quantize(lam, quant)}x{mult}" for lam, mult in zip(dec.eigenvalues, dec.multiplicities)
    )
    return SpectrumToken(f"S[{kind.value}]".encode() + ";".join(records).encode())


# ---------------------------------------------------------------------------
# exact rational backend


@dataclass(frozen=True)
class ExactPairToken:
    """Exact certificate for pair-invariant equality.

    Holds the rational characteristic polynomial and the moment sequence
    (M^k(u, v) for k = 0..n-1); for the normalized Laplacian the matrix
    is D^{-1} L (similar to L-hat, hence the same characteristic
    polynomial) together with the endpoint degrees, since
    Lhat^k(u, v) = sqrt(deg u) (D^{-1} L)^k(u, v) / sqrt(deg v).

    Equality of tokens implies equality of the float pair invariants.
    The converse holds for adjacency/Laplacian kinds within one spectrum;
    for the normalized Laplacian the token is sufficient-only.
    """

    kind: str
    charpoly: tuple[Fraction, ...]
    moments: tuple[Fraction, ...]
    degrees: Optional[tuple[int, int]] = None

    def serialize(self) -> bytes:
        deg = "" if self.degrees is None else f"|d={self.degrees[0]},{self.degrees[1]}"
        cp = ",".join(str(c) for c in self.charpoly)
        mo = ",".join(str(c) for c in self.moments)
        return f"X[{self.kind}]cp={cp}|m={mo}{deg}".encode()

    @property
    def digest(self) -> str:
        return hashlib.blake2b(self.serialize(), digest_size=16).hexdigest()


def _exact_matrix(g: Graph, kind: MatrixKind) -> list[list[Fraction]]:
    n = g.n
    if kind is MatrixKind.ADJACENCY:
        return [[Fraction(1 if g.has_edge(u, v) else 0) for v in range(n)] for u in range(n)]
    if kind is MatrixKind.LAPLACIAN:
        return [
            [Fraction(g.degree(u)) if u == v else Fraction(-1 if g.has_edge(u, v) else 0) for v in range(n)]
            for u in range(n)
        ]
    if kind is MatrixKind.NORMALIZED_LAPLACIAN:
        if g.has_isolated:
            raise ValueError("normalized Laplacian undefined: graph has an isolated vertex")
        # exact surrogate D^{-1} L, similar to L-hat
        return [
            [
                Fraction(1) if u == v else Fraction(-1 if g.has_edge(u, v) else 0, g.degree(u))
                for v in range(n)
            ]
            for u in range(n)
        ]
    raise ValueError(f"exact backend does not support kind {kind!r}")


def _charpoly(mat: list[list[Fraction]]) -> tuple[Fraction, ...]:
    """Faddeev-LeVerrier coefficients (c_0 = 1, ..., c_n), exact."""
    n = len(mat)
    coeffs = [Fraction(1)]
    aux = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        aux = [
            [sum(mat[i][t] * aux[t][j] for t in range(n)) for j in range(n)] for i in range(n)
        ]
        c = -sum(aux[i][i] for i in range(n)) / k
        coeffs.append(c)
        for i in range(n):
            aux[i][i] += c
    return tuple(coeffs)


_EXACT_CACHE: dict[tuple, tuple] = {}


def _exact_data(g: Graph, kind: MatrixKind):
    """Cached (charpoly, [M^0, ..., M^{n-1}]) with exact arithmetic."""
    key = (g, kind)
    cached = _EXACT_CACHE.get(key)
    if cached is None:
        mat = _exact_matrix(g, kind)
        n = g.n
        cp = _charpoly(mat)
        powers = [[[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]]
        for _ in range(n - 1):
            prev = powers[-1]
            powers.append(
                [[sum(mat[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
            )
        cached = (cp, powers)
        _EXACT_CACHE[key] = cached
    return cached


def exact_pair_token(g: Graph, kind: MatrixKind, u: int, v: int) -> ExactPairToken:
    """Exact rational token for the pair invariant of (u, v)."""
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise IndexError(f"vertex pair ({u}, {v}) out of range")
    if kind is MatrixKind.DEGREE:
        raise ValueError("exact backend covers adjacency, Laplacian, and normalized Laplacian")
    cp, powers = _exact_data(g, kind)
    moments = tuple(p[u][v] for p in powers)
    degrees = None
    if kind is MatrixKind.NORMALIZED_LAPLACIAN:
        degrees = (g.degree(u), g.degree(v))
    return ExactPairToken(kind.value, cp, moments, degrees)


# ---------------------------------------------------------------------------
# inspection dump


def dump_decomposition(g: Graph, kind: MatrixKind, quant: Quantization = DEFAULT_QUANT) -> str:
    """JSON record of the decomposition with 17-significant-digit floats."""
    dec = decomposition_for(g, kind, quant)
    record = {
        "kind": kind.value,
        "eigenvalues": [float(format(x, ".17g")) for x in dec.eigenvalues],
        "multiplicities": list(dec.multiplicities),
        "projections": [
            [[float(format(p[i, j], ".17g")) for j in range(g.n)] for i in range(g.n)]
            for p in dec.projections
        ],
    }
    return json.dumps(record, sort_keys=True)
