"""JSON document formats.

Complex entries are rendered as [re, im] pairs; a "block" is a p x p array
of such pairs.  Documents:

* jacobi     {"p", "n_blocks", "diag": [block...], "offdiag": [block...]}
* matrixpoly {"p", "coeffs": [block...]}
* moments    {"p", "S": [block...]}
* measure    {"p", "nodes": [real...], "weights": [block...]}

``dumps`` pins the rendering for golden comparisons: sorted keys, compact
separators, shortest round-trip decimals (Python float repr), and a trailing
newline.  Doubles survive a dump/load round trip bit-exactly.

Generator rules attached to a BlockJacobiMatrix are not serializable; only
the stored prefix travels through a document.
"""

import json

import numpy as np

from .errors import InvalidInputError
from .jacobi import BlockJacobiMatrix
from .measures import StepMeasure
from .moments import MomentSequence
from .polys import MatrixPoly


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      allow_nan=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"invalid JSON: {e}") from None


def block_to_doc(m) -> list:
    a = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


def block_from_doc(doc, p: int | None = None, what: str = "block") -> np.ndarray:
    a = np.asarray(doc, dtype=float)
    if a.ndim != 3 or a.shape[0] != a.shape[1] or a.shape[2] != 2:
        raise InvalidInputError(
            f"{what}: expected a p x p array of [re, im] pairs, "
            f"got shape {a.shape}")
    if p is not None and a.shape[0] != p:
        raise InvalidInputError(
            f"{what}: expected block dimension {p}, got {a.shape[0]}")
    return a[..., 0] + 1j * a[..., 1]


def _require_keys(doc, keys, what: str) -> None:
    if not isinstance(doc, dict):
        raise InvalidInputError(f"{what} document must be a JSON object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise InvalidInputError(f"{what} document is missing keys {missing}")


def _read_p(doc, what: str) -> int:
    p = doc["p"]
    if not isinstance(p, int) or p < 1:
        raise InvalidInputError(f"{what} document: p must be a positive "
                                f"integer, got {p!r}")
    return p


def jacobi_to_doc(j: BlockJacobiMatrix) -> dict:
    return {
        "p": int(j.p),
        "n_blocks": int(j.n_blocks),
        "diag": [block_to_doc(b) for b in j.diag],
        "offdiag": [block_to_doc(b) for b in j.offdiag],
    }


def jacobi_from_doc(doc) -> BlockJacobiMatrix:
    _require_keys(doc, ("p", "n_blocks", "diag", "offdiag"), "jacobi")
    p = _read_p(doc, "jacobi")
    n = doc["n_blocks"]
    diag = [block_from_doc(b, p, f"jacobi diag[{i}]")
            for i, b in enumerate(doc["diag"])]
    offdiag = [block_from_doc(b, p, f"jacobi offdiag[{i}]")
               for i, b in enumerate(doc["offdiag"])]
    if len(diag) != n:
        raise InvalidInputError(
            f"jacobi document: n_blocks={n} but {len(diag)} diagonal blocks")
    if len(offdiag) != max(n - 1, 0):
        raise InvalidInputError(
            f"jacobi document: expected {max(n - 1, 0)} off-diagonal blocks, "
            f"got {len(offdiag)}")
    return BlockJacobiMatrix(p, tuple(diag), tuple(offdiag))


def poly_to_doc(poly: MatrixPoly) -> dict:
    return {"p": int(poly.p),
            "coeffs": [block_to_doc(c) for c in poly.coeffs]}


def poly_from_doc(doc) -> MatrixPoly:
    _require_keys(doc, ("p", "coeffs"), "matrixpoly")
    p = _read_p(doc, "matrixpoly")
    coeffs = [block_from_doc(c, p, f"matrixpoly coeffs[{i}]")
              for i, c in enumerate(doc["coeffs"])]
    if not coeffs:
        coeffs = [np.zeros((p, p), dtype=complex)]
    return MatrixPoly(p, np.array(coeffs))


def moments_to_doc(s: MomentSequence) -> dict:
    return {"p": int(s.p), "S": [block_to_doc(b) for b in s.S]}


def moments_from_doc(doc) -> MomentSequence:
    _require_keys(doc, ("p", "S"), "moments")
    p = _read_p(doc, "moments")
    blocks = [block_from_doc(b, p, f"moments S[{i}]")
              for i, b in enumerate(doc["S"])]
    if not blocks:
        raise InvalidInputError("moments document: need at least S_0")
    return MomentSequence(p, tuple(blocks))


def measure_to_doc(t: StepMeasure) -> dict:
    return {"p": int(t.p),
            "nodes": [float(x) for x in t.nodes],
            "weights": [block_to_doc(w) for w in t.weights]}


def measure_from_doc(doc) -> StepMeasure:
    _require_keys(doc, ("p", "nodes", "weights"), "measure")
    p = _read_p(doc, "measure")
    nodes = doc["nodes"]
    weights = [block_from_doc(w, p, f"measure weights[{i}]")
               for i, w in enumerate(doc["weights"])]
    if len(nodes) != len(weights):
        raise InvalidInputError(
            f"measure document: {len(nodes)} nodes vs {len(weights)} weights")
    return StepMeasure(p, np.array(nodes, dtype=float),
                       np.array(weights).reshape(len(weights), p, p))
