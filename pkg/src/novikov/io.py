"""JSON files for complexes, equivariant complexes and pair-of-pants maps.

Numbers are read exactly (``0.2`` becomes ``Fraction(1, 5)``); actions may
also be written as strings such as ``"1/3"``.  Scalars are strings in q,
e.g. ``"q^2"`` or ``"1/(1+q)"``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .complex import FilteredComplex, GlobalParams
from .equivariant import EqChain, EquivariantComplex
from .pop import PairOfPantsMap
from .scalar import parse_scalar

__all__ = [
    "FormatError",
    "loads",
    "dumps",
    "complex_from_dict",
    "complex_to_dict",
    "equivariant_from_dict",
    "equivariant_to_dict",
    "pop_from_dict",
    "pop_to_dict",
    "read_json",
    "read_complex",
    "read_equivariant",
    "read_pop",
    "write_json",
]


class FormatError(ValueError):
    pass


def loads(text: str):
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def _encode(obj):
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return obj.numerator
        f = float(obj)
        return f if Fraction(repr(f)) == obj else f"{obj.numerator}/{obj.denominator}"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_encode) + "\n"


def _scalar(text, where):
    try:
        return parse_scalar(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{where}: bad scalar {text!r}: {exc}") from exc


def complex_from_dict(d) -> FilteredComplex:
    try:
        p = d["params"]
        params = GlobalParams(N=p["N"], lambda0=p["lambda0"], n=p.get("n", 0))
        orbits = [(o["label"], o["action"], o.get("index", 0)) for o in d["orbits"]]
        diff = [(e["from"], e["to"], _scalar(e["entry"], f"entry {e['from']}->{e['to']}"))
                for e in d.get("differential", [])]
        return FilteredComplex(params, orbits, diff, graded=bool(d.get("graded", True)))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed complex: {exc!r}") from exc


def complex_to_dict(C: FilteredComplex) -> dict:
    return {
        "params": {"N": C.params.N, "lambda0": C.params.lambda0, "n": C.params.n},
        "graded": C.graded,
        "orbits": [{"label": o.label, "action": o.action, "index": o.index} for o in C.orbits],
        "differential": [{"from": s, "to": t, "entry": str(e)} for s, t, e in C.entries()],
    }


def equivariant_from_dict(d) -> EquivariantComplex:
    base = complex_from_dict(d)
    try:
        corr = [(c["k"], c["from"], c["to"], _scalar(c["entry"], f"d_{c['k']} entry"))
                for c in d.get("corrections", [])]
        return EquivariantComplex(base, corr)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed corrections: {exc!r}") from exc


def equivariant_to_dict(E: EquivariantComplex) -> dict:
    d = complex_to_dict(E.base)
    d["corrections"] = [{"k": k, "from": s, "to": t, "entry": str(e)}
                        for k, s, t, e in E.correction_entries()]
    return d


def pop_from_dict(d) -> PairOfPantsMap:
    try:
        squaring = {s["orbit"]: s["squared"] for s in d["squaring"]}
        values = {}
        for v in d.get("values", []):
            img = EqChain(((t["orbit"], int(t.get("hpow", 0))), _scalar(t["entry"], "image"))
                          for t in v["image"])
            values[(v["x"], v["y"])] = img
        return PairOfPantsMap(squaring, values)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed pair-of-pants file: {exc!r}") from exc


def pop_to_dict(P: PairOfPantsMap) -> dict:
    values = []
    for (x, y), img in sorted(P.values.items()):
        if not img:
            continue
        image = [{"orbit": z, "hpow": p, "entry": str(lam)} for (z, p), lam in sorted(img.items())]
        values.append({"x": x, "y": y, "image": image})
    return {"squaring": [{"orbit": x, "squared": s} for x, s in P.squaring.items()],
            "values": values}


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(str(exc)) from exc
    return loads(text)


def read_complex(path) -> FilteredComplex:
    return complex_from_dict(read_json(path))


def read_equivariant(path) -> EquivariantComplex:
    return equivariant_from_dict(read_json(path))


def read_pop(path) -> PairOfPantsMap:
    return pop_from_dict(read_json(path))


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))
