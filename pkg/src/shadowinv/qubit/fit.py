"""A script containing the structure fit of qubit shadow inversion channels
for the observable Z.

A channel performs shadow inversion of `U` for `Z` exactly when it has the
form `N_U(rho) = p U^†rhoU + (1-p) Z U^†rhoU Z + r (U^†rhoU Z - Z U^†rhoU)`
with `0 <= p <= 1`, `r` imaginary and `|r|^2 <= p(1-p)`. The fit works on
the Pauli transfer matrix of `N_U` composed with conjugation by `U`.
"""

from typing import Any, Dict, List
import numpy as np
from shadowinv.tensor import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z, choi_operator, kraus_to_choi, \
    sample_unitaries
from shadowinv.utils import parallel_map
from shadowinv.qubit.circuit import simulate_shadow_channel

DEFAULT_FIT_TOL: float = 1e-8
"""The tolerance of the structure constraints and the fit residual."""

_PAULI_BASIS: List[np.ndarray] = [PAULI_I, PAULI_X, PAULI_Y, PAULI_Z]

_BASELINE: np.ndarray = np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)
"""The transfer matrix of conjugation by Z."""

_P_DIRECTION: np.ndarray = np.diag([0.0, 2.0, 2.0, 0.0]).astype(complex)
"""The change of the transfer matrix per unit of `p`."""

_R_DIRECTION: np.ndarray = np.zeros((4, 4), dtype = complex)
"""The transfer matrix of `rho -> rho Z - Z rho`."""
_R_DIRECTION[1, 2] = 2j
_R_DIRECTION[2, 1] = -2j

def apply_choi(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Applies the channel with a Choi operator (ordered input, output) to a state."""
    dim: int = rho.shape[0]
    return np.einsum('pq,pfqg->fg', rho, np.asarray(choi).reshape(dim, dim, dim, dim))

def pauli_transfer(choi: np.ndarray) -> np.ndarray:
    """Returns the Pauli transfer matrix `R[P, Q] = tr[P N(Q)] / 2` of a qubit channel."""
    out: np.ndarray = np.zeros((4, 4), dtype = complex)
    for col, pauli_q in enumerate(_PAULI_BASIS):
        image: np.ndarray = apply_choi(choi, pauli_q)
        for row, pauli_p in enumerate(_PAULI_BASIS):
            out[row, col] = np.trace(pauli_p @ image) / 2
    return out

class StructureFit:
    """The fitted parameters `p` and `r` of a qubit shadow inversion channel."""

    def __init__(self, p: float, r: complex, residual: float) -> None:
        """
        Parameters
        ----------
        p : float
            The weight of `U^†rhoU`.
        r : complex
            The coefficient of the commutator term.
        residual : float
            The Frobenius norm of the transfer matrix left unexplained by the fit.
        """
        self.p: float = p
        self.r: complex = r
        self.residual: float = residual

    def valid(self, tol: float = DEFAULT_FIT_TOL) -> bool:
        """Whether the fit is exact and the parameters satisfy the structure constraints."""
        return self.residual < tol and -tol <= self.p <= 1 + tol and abs(self.r.real) <= tol \
            and abs(self.r) ** 2 <= self.p * (1 - self.p) + tol

    def to_dict(self) -> Dict[str, Any]:
        """Returns the fit as a JSON-serializable dictionary."""
        return {
            'p': self.p,
            'r': [float(self.r.real), float(self.r.imag)],
            'residual': self.residual
        }

    def __repr__(self) -> str:
        return f'StructureFit(p={self.p:.6g}, r={self.r:.6g}, residual={self.residual:.3g})'

def fit_structure(choi: np.ndarray, unitary: np.ndarray) -> StructureFit:
    """Fits a qubit channel to the shadow inversion structure for `U` and `Z`.

    Parameters
    ----------
    choi : numpy.ndarray
        The Choi operator of the channel, ordered input then output.
    unitary : numpy.ndarray
        The unitary being inverted.

    Returns
    -------
    StructureFit
        The least-squares `p` and `r = a + ib` with the residual norm.
    """
    unitary = np.asarray(unitary, dtype = complex)
    # The transfer matrix of N_U ∘ (U . U^†) is U-independent for a valid channel
    target: np.ndarray = pauli_transfer(choi) @ pauli_transfer(choi_operator(unitary)) - _BASELINE
    directions: List[np.ndarray] = [_P_DIRECTION, _R_DIRECTION, 1j * _R_DIRECTION]
    design: np.ndarray = np.stack([np.concatenate([mat.real.ravel(), mat.imag.ravel()])
        for mat in directions], axis = 1)
    rhs: np.ndarray = np.concatenate([target.real.ravel(), target.imag.ravel()])
    coeffs, *_ = np.linalg.lstsq(design, rhs, rcond = None)
    residual: float = float(np.linalg.norm(design @ coeffs - rhs))
    return StructureFit(float(coeffs[0]), complex(coeffs[1], coeffs[2]), residual)

def mixture_channel(unitary: np.ndarray) -> np.ndarray:
    """Returns the Choi operator of `rho -> (U^†rhoU + Z U^†rhoU Z) / 2`."""
    inverse: np.ndarray = np.asarray(unitary, dtype = complex).conj().T
    return kraus_to_choi([inverse / np.sqrt(2), PAULI_Z @ inverse / np.sqrt(2)])

def z_twirl(choi: np.ndarray) -> np.ndarray:
    """Returns the Choi operator of `(N + Z N(.) Z) / 2`, which preserves shadow
    inversion for `Z`."""
    conj: np.ndarray = np.kron(PAULI_I, PAULI_Z)
    return (choi + conj @ choi @ conj) / 2

def fit_trajectory(samples: int, seed: int, threads: int = 1) -> List[StructureFit]:
    """Fits the circuit channel at Haar-random unitaries drawn from the seed.

    Parameters
    ----------
    samples : int
        The number of unitaries.
    seed : int
        The seed of the unitary samples.
    threads : int (default 1)
        The maximum number of workers.

    Returns
    -------
    list[StructureFit]
        The fit at each sampled unitary.
    """
    return parallel_map(lambda unitary: fit_structure(simulate_shadow_channel(unitary), unitary),
        sample_unitaries(2, samples, seed), threads)
