"""JSON state files.

Layout (``format_version`` 1)::

    {"format_version": 1, "kind": "dense" | "pure" | "ghz-diagonal",
     "n_parties": N, "payload": ..., "metadata": {...}}

Dense payloads are 2**N rows of 2**N ``[re, im]`` pairs, pure payloads
2**N ``[re, im]`` pairs, and GHZ-diagonal payloads
``{"lambda0_plus", "lambda0_minus", "lambdas"}``. ``metadata`` is optional;
``metadata.frame_phase`` records the GHZ phase a generator used so that
coefficient reports can be taken in the matching frame.

Floats are written with ``repr`` (shortest round-trip form), so a load
reproduces the saved arrays bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from belldistill import linalg
from belldistill.errors import ContractError, ParameterError, ShapeError
from belldistill.ghz_family import GhzDiagonalCoefficients

FORMAT_VERSION = 1
KINDS = ("dense", "pure", "ghz-diagonal")


@dataclass(eq=False)
class StateFile:
    kind: str
    n_parties: int
    data: object  # ndarray for dense/pure, GhzDiagonalCoefficients otherwise
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown state kind {self.kind!r}")

    @property
    def frame_phase(self) -> float | None:
        value = self.metadata.get("frame_phase")
        return None if value is None else float(value)

    def density(self, max_dim: int = linalg.MAX_DIM) -> np.ndarray:
        """The state as a dense matrix (GHZ-diagonal data in its recorded frame)."""
        linalg.check_dim(1 << self.n_parties, max_dim)
        if self.kind == "dense":
            return self.data
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data.to_density(self.frame_phase or 0.0, max_dim)


def _pairs(arr: np.ndarray):
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _complex(payload, shape, what: str) -> np.ndarray:
    arr = np.asarray(payload, dtype=float)
    if arr.shape != shape + (2,):
        raise ShapeError(f"{what} payload has shape {arr.shape[:-1]}, expected {shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def to_document(state: StateFile) -> dict:
    if state.kind == "ghz-diagonal":
        payload = state.data.to_dict()
    else:
        payload = _pairs(np.asarray(state.data, dtype=np.complex128))
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": state.kind,
        "n_parties": state.n_parties,
        "payload": payload,
    }
    if state.metadata:
        doc["metadata"] = state.metadata
    return doc


def from_document(doc: dict, check_psd: bool = True) -> StateFile:
    """Decode and validate a state document."""
    try:
        version = doc["format_version"]
        kind = doc["kind"]
        n = int(doc["n_parties"])
        payload = doc["payload"]
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"malformed state file: missing {exc}") from None
    if version != FORMAT_VERSION:
        raise ParameterError(f"unsupported format_version {version}")
    if n < 1:
        raise ParameterError("n_parties must be >= 1")
    metadata = doc.get("metadata", {})
    dim = 1 << n
    if kind == "dense":
        rho = _complex(payload, (dim, dim), "dense")
        linalg.check_density(rho, psd=False)
        if check_psd and not is_psd(rho):
            raise ContractError("dense state is not positive semidefinite")
        data = rho
    elif kind == "pure":
        psi = _complex(payload, (dim,), "pure")
        if abs(np.linalg.norm(psi) - 1.0) > linalg.DENSITY_TOL:
            raise ContractError("pure state is not normalized")
        data = psi
    elif kind == "ghz-diagonal":
        data = GhzDiagonalCoefficients.from_dict(n, payload)
    else:
        raise ParameterError(f"unknown state kind {kind!r}")
    return StateFile(kind, n, data, metadata)


def is_psd(rho: np.ndarray, tol: float = linalg.PSD_TOL) -> bool:
    """Cholesky test of ``rho + tol*I``: succeeds iff the smallest eigenvalue exceeds ``-tol`` (up to rounding)."""
    try:
        np.linalg.cholesky(rho + tol * np.eye(rho.shape[0]))
    except np.linalg.LinAlgError:
        return False
    return True


def dumps(state: StateFile) -> str:
    return json.dumps(to_document(state), separators=(",", ":")) + "\n"


def save(state: StateFile, path) -> None:
    """Write atomically: a temp file in the target directory, then rename."""
    path = Path(path)
    text = dumps(state)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path, check_psd: bool = True) -> tuple[StateFile, str]:
    """Return the decoded state and the sha256 of the file bytes."""
    raw = Path(path).read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: not valid JSON ({exc})") from None
    return from_document(doc, check_psd), hashlib.sha256(raw).hexdigest()
