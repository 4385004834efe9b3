"""Built-in scenarios and the JSON scenario document format.

Document layout (version 1)::

    {
      "version": 1,
      "name": "three-box",
      "auto_normalize": false,
      "initial": [[re, im], ...],
      "steps": [
        {"name": "B",
         "evolution": {"matrix": [[[re, im], ...], ...]}  or  {"hamiltonian": ..., "dt": 0.3},
         "observable": {"matrix": ...}  or  {"basis": [[[re, im], ...], ...], "eigenvalues": [...]},
         "pointer": {"profile": "gaussian", "width": 10.0}}
      ],
      "final_evolution": {...},
      "postselect": [[re, im], ...]  or a list of such rows  or null,
      "final_basis": [[[re, im], ...], ...],
      "observables": {"B": {...}, "Bprime": {...}}
    }

``evolution``, ``final_evolution``, ``postselect``, ``final_basis``,
``observables`` and ``pointer`` are optional; a missing pointer is a delta
(accurate) pointer.  Numbers are written with ``repr`` so a document
round-trips bit for bit.
"""
from __future__ import annotations

import json
from typing import Any, Callable, Sequence

import numpy as np

from .errors import NotHermitian, NotUnitary, ParseError, ValidationError
from .hilbert import EPS_NORM, as_hermitian, propagator, random_state, random_unitary
from .pathways import MeasurementStep, Scenario, SpectralDecomposition, spectral, spectral_from_basis
from .profiles import PointerSpec

FORMAT_VERSION = 1
NORM_TOL = 1e-6


# ------------------------------------------------------------------ builders

def _projector_observable(basis, diagonal) -> SpectralDecomposition:
    return spectral_from_basis(basis, diagonal)


def build_double_slit(target: int = 1, hamiltonian=None, dt: float = 1.0,
                      pointer: PointerSpec | None = None) -> Scenario:
    """Two slits, the which-slit basis (1, +-1)/sqrt(2), source state (1, 0).

    The system evolves under ``hamiltonian`` for ``dt`` before and after the
    slit measurement.  The final basis is the evolved standard basis, so
    ``c_1`` is the image of the source: every path reaches ``c_1`` in phase
    and ``c_2`` is a dark fringe.  ``target`` picks the post-selected state.
    """
    b = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    h = np.zeros((2, 2)) if hamiltonian is None else as_hermitian(hamiltonian)
    u = propagator(h, dt)
    c = (u @ u).T  # rows are U_total e_k
    if target not in (1, 2):
        raise ValidationError(f"double-slit target must be 1 or 2, got {target}")
    observables = {
        "B": _projector_observable(b, [1, 0]),
        "Bprime": _projector_observable(b, [0, 1]),
        "sigma": _projector_observable(b, [1, -1]),
    }
    step = MeasurementStep(observables["B"], pointer or PointerSpec.delta(), u, "B")
    return Scenario(
        initial=np.array([1, 0], dtype=complex),
        steps=(step,),
        final_evolution=u,
        postselect=c[target - 1 : target],
        final_basis=c,
        observables=observables,
        name="double-slit",
    )


def build_three_box(measure: Sequence[str] = ("B",), pointers: Sequence[PointerSpec] | None = None) -> Scenario:
    """Three boxes, uniform preparation, post-selection on (1, -1, 1)/sqrt(3).

    ``B`` asks "is it in box 1?", ``Bprime`` asks "is it in box 1 or 2?".
    """
    e = np.eye(3, dtype=complex)
    observables = {
        "B": _projector_observable(e, [1, 0, 0]),
        "Bprime": _projector_observable(e, [1, 1, 0]),
    }
    base = Scenario(
        initial=np.ones(3, dtype=complex) / np.sqrt(3),
        postselect=np.array([[1, -1, 1]], dtype=complex) / np.sqrt(3),
        observables=observables,
        name="three-box",
    )
    return base.measuring(list(measure), pointers)


def build_cheshire(measure: Sequence[str] = ("B",), pointers: Sequence[PointerSpec] | None = None) -> Scenario:
    """Two arms times a spin, basis order (L up, L down, R up, R down)."""
    e = np.eye(4, dtype=complex)
    observables = {
        "B": _projector_observable(e, [1, 1, 0, 0]),
        "Bprime": _projector_observable(e, [0, 0, 1, -1]),
        "Bpp": _projector_observable(e, [1, 0, 0, 0]),
        "Bppp": _projector_observable(e, [0, 0, 1, 0]),
    }
    base = Scenario(
        initial=np.ones(4, dtype=complex) / 2,
        postselect=np.array([[1, -1, 1, 1]], dtype=complex) / 2,
        observables=observables,
        name="cheshire",
    )
    return base.measuring(list(measure), pointers)


BUILTINS: dict[str, Callable[..., Scenario]] = {
    "double-slit": build_double_slit,
    "three-box": build_three_box,
    "cheshire": build_cheshire,
}


def builtin(name: str) -> Scenario:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValidationError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None


def random_scenario(rng: np.random.Generator, n: int, steps: int = 1, *,
                    pointers: Sequence[PointerSpec] | None = None, evolve: bool = True,
                    degenerate: bool = False, postselect: bool = True) -> Scenario:
    """Random pure-state scenario with Haar evolutions and random observables.

    With ``degenerate`` the observables get a repeated eigenvalue.
    """
    pointers = list(pointers) if pointers is not None else [PointerSpec.delta()] * steps
    chain = []
    for k in range(steps):
        basis = random_unitary(rng, n)
        values = rng.normal(size=n)
        if degenerate and n > 2:
            values[1] = values[0]
        obs = spectral_from_basis(basis.T, values)
        chain.append(MeasurementStep(obs, pointers[k], random_unitary(rng, n) if evolve else None, f"O{k}"))
    return Scenario(
        initial=random_state(rng, n),
        steps=tuple(chain),
        final_evolution=random_unitary(rng, n) if evolve else None,
        postselect=np.atleast_2d(random_state(rng, n)) if postselect else None,
        name=f"random-{n}",
    )


# ------------------------------------------------------------- serialization

def _cpair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _cvec(v) -> list:
    return [_cpair(z) for z in np.asarray(v).reshape(-1)]


def _cmat(m) -> list:
    return [_cvec(row) for row in np.asarray(m)]


def _observable_doc(obs: SpectralDecomposition) -> dict:
    return {"basis": _cmat(np.asarray(obs.eigenvectors).T),
            "eigenvalues": [float(x) for x in obs.eigenvalues]}


def scenario_to_dict(s: Scenario) -> dict:
    doc: dict[str, Any] = {"version": FORMAT_VERSION, "name": s.name, "initial": _cvec(s.initial), "steps": []}
    for st in s.steps:
        entry: dict[str, Any] = {"name": st.name, "observable": _observable_doc(st.observable),
                                 "pointer": {"profile": st.pointer.profile, "width": float(st.pointer.width)}}
        if st.evolution is not None:
            entry["evolution"] = {"matrix": _cmat(st.evolution)}
        doc["steps"].append(entry)
    if s.final_evolution is not None:
        doc["final_evolution"] = {"matrix": _cmat(s.final_evolution)}
    doc["postselect"] = None if s.postselect is None else _cmat(s.postselect)
    doc["final_basis"] = _cmat(s.final_basis)
    doc["observables"] = {k: _observable_doc(v) for k, v in s.observables.items()}
    return doc


def serialize_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=1)


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"expected a number, got {type(x).__name__}", where)
    return float(x)


def _complex(x, where: str) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(float(x))
    if not isinstance(x, list) or len(x) != 2:
        raise ParseError("expected a complex number as [re, im]", where)
    return complex(_number(x[0], f"{where}[0]"), _number(x[1], f"{where}[1]"))


def _vector(x, where: str, n: int | None = None) -> np.ndarray:
    if not isinstance(x, list):
        raise ParseError("expected a list of complex numbers", where)
    if n is not None and len(x) != n:
        raise ParseError(f"expected {n} entries, got {len(x)}", where)
    return np.array([_complex(z, f"{where}[{i}]") for i, z in enumerate(x)], dtype=complex)


def _matrix(x, where: str, n: int) -> np.ndarray:
    if not isinstance(x, list) or len(x) != n:
        raise ParseError(f"expected {n} rows", where)
    return np.array([_vector(row, f"{where}[{i}]", n) for i, row in enumerate(x)])


def _field(doc: dict, key: str, where: str, required: bool = True):
    if not isinstance(doc, dict):
        raise ParseError("expected an object", where)
    if key not in doc:
        if required:
            raise ParseError("missing field", f"{where}.{key}" if where else key)
        return None
    return doc[key]


def _operator(doc, where: str, n: int) -> np.ndarray:
    if _field(doc, "hamiltonian", where, False) is not None:
        h = _matrix(doc["hamiltonian"], f"{where}.hamiltonian", n)
        dt = _number(_field(doc, "dt", where), f"{where}.dt")
        try:
            return propagator(h, dt)
        except NotHermitian as exc:
            raise ValidationError(f"{where}.hamiltonian: {exc}") from None
    u = _matrix(_field(doc, "matrix", where), f"{where}.matrix", n)
    if np.max(np.abs(u.conj().T @ u - np.eye(n))) > 1e-9:
        raise ValidationError(f"{where}.matrix: evolution is not unitary")
    return u


def _observable(doc, where: str, n: int) -> SpectralDecomposition:
    try:
        if _field(doc, "matrix", where, False) is not None:
            return spectral(_matrix(doc["matrix"], f"{where}.matrix", n))
        basis = _matrix(_field(doc, "basis", where), f"{where}.basis", n)
        values = _field(doc, "eigenvalues", where)
        if not isinstance(values, list) or len(values) != n:
            raise ParseError(f"expected {n} eigenvalues", f"{where}.eigenvalues")
        return spectral_from_basis(basis, [_number(v, f"{where}.eigenvalues[{i}]") for i, v in enumerate(values)])
    except NotHermitian as exc:
        raise ValidationError(f"{where}: observable is not Hermitian ({exc})") from None


def _state(x, where: str, n: int, auto: bool) -> np.ndarray:
    v = _vector(x, where, n)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValidationError(f"{where}: zero state")
    if abs(norm - 1) > NORM_TOL and not auto:
        raise ValidationError(f"{where}: state is not normalized (norm={norm:.9g}); set auto_normalize to rescale")
    # leave states that already pass the scenario check untouched so documents round-trip exactly
    return v if abs(norm - 1) <= EPS_NORM else v / norm


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    version = _field(doc, "version", "")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}, expected {FORMAT_VERSION}", "version")
    auto = bool(doc.get("auto_normalize", False))
    init_raw = _field(doc, "initial", "")
    if not isinstance(init_raw, list):
        raise ParseError("expected a list of complex numbers", "initial")
    n = len(init_raw)
    if "dim" in doc and doc["dim"] != n:
        raise ParseError(f"dim {doc['dim']} does not match the initial state length {n}", "dim")
    initial = _state(init_raw, "initial", n, auto)
    steps_raw = doc.get("steps", [])
    if not isinstance(steps_raw, list):
        raise ParseError("expected a list", "steps")
    steps = []
    for i, st in enumerate(steps_raw):
        where = f"steps[{i}]"
        obs = _observable(_field(st, "observable", where), f"{where}.observable", n)
        evo = st.get("evolution")
        evo = None if evo is None else _operator(evo, f"{where}.evolution", n)
        p = st.get("pointer") or {"profile": "delta"}
        try:
            pointer = PointerSpec(p.get("profile", "gaussian"), float(p.get("width", 0.0)))
        except (ValueError, AttributeError, TypeError) as exc:
            raise ParseError(str(exc), f"{where}.pointer") from None
        steps.append(MeasurementStep(obs, pointer, evo, str(st.get("name", f"step{i}"))))
    final = doc.get("final_evolution")
    final = None if final is None else _operator(final, "final_evolution", n)
    post = doc.get("postselect")
    if post is not None:
        if post and isinstance(post[0], list) and post[0] and isinstance(post[0][0], list):
            post = np.array([_state(r, f"postselect[{i}]", n, auto) for i, r in enumerate(post)])
        else:
            post = np.atleast_2d(_state(post, "postselect", n, auto))
    fb = doc.get("final_basis")
    fb = None if fb is None else _matrix(fb, "final_basis", n)
    obs_raw = doc.get("observables") or {}
    if not isinstance(obs_raw, dict):
        raise ParseError("expected an object", "observables")
    observables = {k: _observable(v, f"observables.{k}", n) for k, v in obs_raw.items()}
    try:
        return Scenario(initial, tuple(steps), final, post, fb, observables, str(doc.get("name", "")))
    except (NotUnitary, NotHermitian) as exc:
        raise ValidationError(str(exc)) from None


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario document; syntax errors carry a line/column location."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return scenario_from_dict(doc)


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
