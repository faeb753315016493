"""Instance documents (JSON) and their canonical emission.

Document shape::

    {"n": 4, "d": 2, "places": [5],
     "forms": {"inf": {"Q": [[...], ...], "L": [...]},
               "5":   {"Q": [[...], ...], "L": [...]}},
     "labels": {"name": "I1"}}

``Q`` is the upper-triangular polynomial-coefficient matrix (entry ``[i][j]``,
``i <= j``, multiplies ``x_i x_j``); entries use the textual coefficient
format or plain integers.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources

from .exact import ARCHIMEDEAN, CoefficientError, format_scalar, is_squarefree, parse_scalar
from .forms import LinForm, PairInstance, QuadForm


class InstanceError(ValueError):
    """Invalid instance document; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _place_key(key: str):
    if key in (ARCHIMEDEAN, "infinity", "oo"):
        return ARCHIMEDEAN
    try:
        return int(key)
    except ValueError:
        return None


def parse_instance(text: str) -> PairInstance:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError([f"input is not UTF-8 (byte {exc.start})"]) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError([f"line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    return instance_from_doc(doc)


def instance_from_doc(doc) -> PairInstance:
    errors = []
    if not isinstance(doc, dict):
        raise InstanceError(["$: document must be an object"])
    n, d = doc.get("n"), doc.get("d", None)
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        errors.append("$.n: expected an integer >= 2")
        n = None
    if d is not None and (not isinstance(d, int) or isinstance(d, bool) or d < 2 or not is_squarefree(d)):
        errors.append("$.d: expected a squarefree integer >= 2")
        d = None
    places = doc.get("places")
    primes = []
    if not isinstance(places, list):
        errors.append("$.places: expected a list of primes")
    else:
        for k, p in enumerate(places):
            if not isinstance(p, int) or isinstance(p, bool):
                errors.append(f"$.places[{k}]: expected an integer prime")
            elif p in primes:
                errors.append(f"$.places[{k}]: duplicate place {p}")
            else:
                primes.append(p)
    forms_doc = doc.get("forms")
    forms = {}
    if not isinstance(forms_doc, dict):
        errors.append("$.forms: expected an object keyed by place")
        forms_doc = {}
    for key, entry in forms_doc.items():
        path = f"$.forms.{key}"
        place = _place_key(key)
        if place is None:
            errors.append(f"{path}: unknown place key")
            continue
        if place in forms:
            errors.append(f"{path}: duplicate place")
            continue
        if not isinstance(entry, dict) or "Q" not in entry or "L" not in entry:
            errors.append(f"{path}: expected an object with keys Q and L")
            continue
        finite = place != ARCHIMEDEAN

        def coef(v, where):
            try:
                x = parse_scalar(v, d)
            except CoefficientError as exc:
                errors.append(f"{where}: {exc}")
                return None
            if finite and getattr(x, "b", 0) != 0:
                errors.append(f"{where}: irrational coefficient at a finite place")
                return None
            if not finite and d is None and getattr(x, "b", 0) != 0:
                errors.append(f"{where}: sqrt term but no d given")
                return None
            return x

        Qd, Ld = entry["Q"], entry["L"]
        rows = None
        if not isinstance(Qd, list) or (n is not None and len(Qd) != n) or not all(isinstance(r, list) for r in Qd):
            errors.append(f"{path}.Q: expected an {n}x{n} matrix")
        else:
            rows = []
            for i, r in enumerate(Qd):
                if n is not None and len(r) != n:
                    errors.append(f"{path}.Q[{i}]: dimension mismatch (expected {n} entries)")
                    rows = None
                    break
                row = [coef(v, f"{path}.Q[{i}][{j}]") for j, v in enumerate(r)]
                for j in range(min(i, len(row))):
                    if row[j] is not None and row[j] != 0:
                        errors.append(f"{path}.Q[{i}][{j}]: entries below the diagonal must be 0")
                rows.append(row)
        lin = None
        if not isinstance(Ld, list) or (n is not None and len(Ld) != n):
            errors.append(f"{path}.L: dimension mismatch (expected {n} entries)")
        else:
            lin = [coef(v, f"{path}.L[{j}]") for j, v in enumerate(Ld)]
            if all(c is not None and c == 0 for c in lin):
                errors.append(f"{path}.L: linear form must be nonzero")
        if rows is not None and lin is not None and all(c is not None for r in rows for c in r) \
                and all(c is not None for c in lin):
            try:
                forms[place] = (QuadForm(tuple(map(tuple, rows))), LinForm(tuple(lin)))
            except ValueError as exc:
                errors.append(f"{path}: {exc}")
    expected = [ARCHIMEDEAN, *primes]
    given = {_place_key(k) for k in forms_doc}
    for s in expected:
        if s not in given:
            errors.append(f"$.forms: missing place {s}")
    for s in list(forms):
        if s not in expected:
            errors.append(f"$.forms.{s}: place not listed in $.places")
    labels = doc.get("labels", {})
    if not isinstance(labels, dict):
        errors.append("$.labels: expected an object")
    if errors:
        raise InstanceError(errors)
    try:
        return PairInstance(n=n, d=d, primes=tuple(primes), forms=forms,
                            labels=dict(labels) or None)
    except ValueError as exc:
        raise InstanceError([str(exc)]) from None


def instance_to_doc(inst: PairInstance) -> dict:
    forms = {}
    for s in inst.places:
        Q, L = inst.forms[s]
        forms[str(s)] = {
            "Q": [[format_scalar(c) for c in row] for row in Q.coeffs],
            "L": [format_scalar(c) for c in L.coeffs],
        }
    doc = {"n": inst.n}
    if inst.d is not None:
        doc["d"] = inst.d
    doc.update({"places": list(inst.primes), "forms": forms})
    if inst.labels:
        doc["labels"] = dict(inst.labels)
    return doc


def emit_instance(inst: PairInstance) -> str:
    """Canonical text: fixed key order, canonical coefficients, two-space indent."""
    return json.dumps(instance_to_doc(inst), indent=2, ensure_ascii=False) + "\n"


def instance_digest(inst: PairInstance) -> str:
    doc = instance_to_doc(inst)
    doc.pop("labels", None)
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode("utf-8")).hexdigest()


def load_instance(path: str) -> PairInstance:
    """Read a file, or a bundled fixture via ``builtin:NAME`` (e.g. ``builtin:i1``)."""
    if path.startswith("builtin:"):
        name = path.split(":", 1)[1]
        try:
            raw = resources.files("sapairs.data").joinpath(f"{name}.json").read_bytes()
        except FileNotFoundError:
            raise InstanceError([f"no bundled fixture named {name!r}"]) from None
        return parse_instance(raw)
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InstanceError([f"{path}: {exc.strerror}"]) from None
    return parse_instance(raw)
