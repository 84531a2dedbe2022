"""Linear space-time block codes in dispersion-matrix form.

A codeword spanning ``M_T`` transmit antennas and ``T`` symbol slots is a
linear function of ``Q`` complex information symbols ``s_q``:

    X = sum_q ( Re(s_q) * U_q + 1j * Im(s_q) * V_q )        (M_T x T)

Two codes are provided.

Alamouti (M_T = 2, T = 2, Q = 2, rate 1/2 symbols per antenna use, i.e.
R = Q/T = 1), scaled by 1/sqrt(2)::

          slot 1   slot 2
    ant 1 [ s1     -s2* ]
    ant 2 [ s2      s1* ]

Golden code of Belfiore/Rekaya/Viterbo (M_T = 2, T = 2, Q = 4, R = 2),
with theta the golden ratio, thetab = 1 - theta, alpha = 1 + 1j*thetab,
alphab = 1 + 1j*theta, and an overall 1/sqrt(5)::

          slot 1                     slot 2
    ant 1 [ alpha*(s1 + s2*theta)    alpha*(s3 + s4*theta)    ]
    ant 2 [ 1j*alphab*(s3+s4*thetab) alphab*(s1 + s2*thetab)  ]

Both dispersion sets carry an additional 1/sqrt(M_T) so that the average
transmit energy per antenna per slot is 1/M_T for unit-energy symbols
(total radiated power 1 per slot).

Real-valued stacking convention used throughout the package: a complex
vector (z_1, ..., z_K) becomes (Re z_1, Im z_1, ..., Re z_K, Im z_K); a
complex (rows x T) matrix is stacked row-major (row = antenna), slots
inside a row, (Re, Im) innermost.  The encoder is then a real matrix F
of shape (2*M_T*T, 2Q) with column 2q   (0-based) the stacking of U_q
and column 2q+1 the stacking of 1j*V_q, so that stack(X) = F @ stack(s).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import ConfigurationError, DimensionError

__all__ = [
    "StScheme",
    "DispersionSet",
    "ALAMOUTI",
    "GOLDEN",
    "scheme_by_name",
    "dispersion_set",
    "build_f",
    "st_encode",
    "to_real_stack",
    "from_real_stack",
    "stack_matrix",
    "unstack_matrix",
]


@dataclass(frozen=True)
class StScheme:
    """Identity card of a space-time block code."""

    name: str
    m_t: int
    t_slots: int
    q_symbols: int

    def __post_init__(self):
        if self.m_t < 1 or self.t_slots < 1 or self.q_symbols < 1:
            raise ConfigurationError("scheme dimensions must be positive")

    @property
    def rate(self) -> Fraction:
        """Symbol rate R = Q / T."""
        return Fraction(self.q_symbols, self.t_slots)


ALAMOUTI = StScheme(name="alamouti", m_t=2, t_slots=2, q_symbols=2)
GOLDEN = StScheme(name="golden", m_t=2, t_slots=2, q_symbols=4)

_SCHEMES = {s.name: s for s in (ALAMOUTI, GOLDEN)}


def scheme_by_name(name: str) -> StScheme:
    """Look up a scheme by its config name ("alamouti" or "golden")."""
    try:
        return _SCHEMES[name.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown space-time scheme {name!r}; expected one of {sorted(_SCHEMES)}"
        ) from None


@dataclass(frozen=True)
class DispersionSet:
    """Scaled dispersion matrices of one scheme.

    Attributes
    ----------
    scheme : StScheme
    u : ndarray, shape (Q, M_T, T), complex
        Matrices multiplying Re(s_q).  The normalization scale is already
        applied.
    v : ndarray, shape (Q, M_T, T), complex
        Matrices multiplying 1j * Im(s_q), same scale.
    scale : float
        The factor that was folded into ``u`` and ``v``.
    """

    scheme: StScheme
    u: np.ndarray
    v: np.ndarray
    scale: float

    def __post_init__(self):
        q, m_t, t = self.scheme.q_symbols, self.scheme.m_t, self.scheme.t_slots
        if self.u.shape != (q, m_t, t) or self.v.shape != (q, m_t, t):
            raise DimensionError(
                f"dispersion matrices must have shape {(q, m_t, t)}, "
                f"got u {self.u.shape} and v {self.v.shape}"
            )
        self.u.setflags(write=False)
        self.v.setflags(write=False)


def dispersion_set(scheme: StScheme) -> DispersionSet:
    """Build the dispersion matrices of ``scheme``, normalization included.

    Returns
    -------
    DispersionSet
        With ``scale`` chosen so the mean transmit energy per antenna per
        slot is 1/M_T when the ``s_q`` have unit energy.
    """
    if scheme.name == "alamouti":
        u = np.array(
            [
                [[1, 0], [0, 1]],
                [[0, -1], [1, 0]],
            ],
            dtype=complex,
        )
        v = np.array(
            [
                [[1, 0], [0, -1]],
                [[0, 1], [1, 0]],
            ],
            dtype=complex,
        )
        scale = 1.0 / np.sqrt(scheme.m_t)
    elif scheme.name == "golden":
        theta = (1.0 + np.sqrt(5.0)) / 2.0
        thetab = 1.0 - theta
        alpha = 1.0 + 1j * thetab
        alphab = 1.0 + 1j * theta
        zero = 0.0
        c = np.array(
            [
                [[alpha, zero], [zero, alphab]],
                [[alpha * theta, zero], [zero, alphab * thetab]],
                [[zero, alpha], [1j * alphab, zero]],
                [[zero, alpha * theta], [1j * alphab * thetab, zero]],
            ],
            dtype=complex,
        )
        # The code map is complex-linear (no conjugation), hence U_q = V_q.
        u = c
        v = c.copy()
        scale = 1.0 / (np.sqrt(5.0) * np.sqrt(scheme.m_t))
    else:
        raise ConfigurationError(f"no dispersion set defined for scheme {scheme.name!r}")
    return DispersionSet(scheme=scheme, u=u * scale, v=v * scale, scale=scale)


def to_real_stack(z: np.ndarray) -> np.ndarray:
    """Interleave real and imaginary parts along the last axis.

    (..., K) complex -> (..., 2K) real with order (Re z_1, Im z_1, ...).
    """
    z = np.asarray(z)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],), dtype=float)
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def from_real_stack(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_real_stack`."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise DimensionError("real stack length must be even")
    return x[..., 0::2] + 1j * x[..., 1::2]


def stack_matrix(m: np.ndarray) -> np.ndarray:
    """Stack a complex (rows x T) matrix row-major into a real vector.

    Row index (antenna) is the slowest axis, slot next, (Re, Im) innermost.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionError("expected a 2-D matrix")
    return to_real_stack(m.reshape(-1))


def unstack_matrix(x: np.ndarray, n_rows: int) -> np.ndarray:
    """Inverse of :func:`stack_matrix` given the row count."""
    z = from_real_stack(x)
    if z.size % n_rows:
        raise DimensionError(f"cannot reshape {z.size} complex entries into {n_rows} rows")
    return z.reshape(n_rows, -1)


def build_f(ds: DispersionSet) -> np.ndarray:
    """Real encoding matrix F with stack(X) = F @ stack(s).

    Column 2q holds the stacking of U_q and column 2q+1 the stacking of
    1j * V_q (0-based q).

    Returns
    -------
    ndarray, shape (2 * M_T * T, 2Q), float
    """
    q = ds.scheme.q_symbols
    cols = []
    for k in range(q):
        cols.append(stack_matrix(ds.u[k]))
        cols.append(stack_matrix(1j * ds.v[k]))
    return np.stack(cols, axis=1)


def st_encode(s: np.ndarray, ds: DispersionSet) -> np.ndarray:
    """Encode Q complex symbols into one (M_T x T) codeword.

    Parameters
    ----------
    s : ndarray, shape (Q,), complex
    ds : DispersionSet

    Returns
    -------
    ndarray, shape (M_T, T), complex
    """
    s = np.asarray(s, dtype=complex)
    if s.shape != (ds.scheme.q_symbols,):
        raise DimensionError(
            f"expected {ds.scheme.q_symbols} symbols, got shape {s.shape}"
        )
    return np.einsum("q,qmt->mt", s.real, ds.u) + 1j * np.einsum(
        "q,qmt->mt", s.imag, ds.v
    )
