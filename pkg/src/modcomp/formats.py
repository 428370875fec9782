"""JSON formats: eigenform files and command reports.

Eigenform file (``modcomp-eigenform/1``)::

    {
      "format": "modcomp-eigenform/1",
      "label": "21.4.a",
      "weight": 4,
      "level": 21,
      "character": "trivial",
      "bound": 50,
      "coefficients": [1, -3, -3, ...],
      "source": "..."
    }

``coefficients`` lists a_1, a_2, ... (index m is stored at position m-1).
Integers beyond 2^53 in absolute value are written as decimal strings.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from pathlib import Path

from .modsym import Eigenform

__all__ = [
    "FORMAT", "EigenformError", "parse_eigenform", "load_eigenform", "emit_eigenform",
    "eigenform_to_dict", "bundled", "bundled_path", "parse_qexpansion", "emit_report",
    "encode_int", "REPORT_FORMAT",
]

FORMAT = "modcomp-eigenform/1"
REPORT_FORMAT = "modcomp-report/1"
SAFE = 2 ** 53
_INT_RE = re.compile(r"^-?[0-9]+$")
_KEYS = ("format", "label", "weight", "level", "character", "bound", "coefficients", "source")


class EigenformError(ValueError):
    """Invalid eigenform file; ``index`` is the offending coefficient when known."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


def encode_int(x: int):
    x = int(x)
    return str(x) if abs(x) > SAFE else x


def _decode_int(x, what):
    if isinstance(x, bool):
        raise EigenformError("%s: booleans are not integers" % what)
    if isinstance(x, int):
        return x
    if isinstance(x, str) and _INT_RE.match(x):
        return int(x)
    raise EigenformError("%s: %r is not an integer" % (what, x))


def eigenform_to_dict(f: Eigenform, source: str | None = None) -> dict:
    return {
        "format": FORMAT, "label": f.label, "weight": f.k, "level": f.N,
        "character": f.character, "bound": f.bound,
        "coefficients": [encode_int(a) for a in f.coeffs],
        "source": source if source is not None else f.source,
    }


def emit_eigenform(f: Eigenform, source: str | None = None) -> str:
    """Canonical text: one key per line, coefficients on a single line."""
    d = eigenform_to_dict(f, source)
    lines = ["  %s: %s" % (json.dumps(k), json.dumps(d[k])) for k in _KEYS]
    return "{\n" + ",\n".join(lines) + "\n}\n"


def parse_eigenform(source, check_pairs: bool = True) -> Eigenform:
    """Parse and validate an eigenform from a path, a file object or a JSON string."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    else:
        text = source
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise EigenformError("not valid JSON: %s" % e) from None
    if not isinstance(d, dict):
        raise EigenformError("top level must be an object")
    if d.get("format", FORMAT) != FORMAT:
        raise EigenformError("unknown format %r" % d.get("format"))
    for key in ("weight", "level", "coefficients"):
        if key not in d:
            raise EigenformError("missing field %r" % key)
    k = _decode_int(d["weight"], "weight")
    N = _decode_int(d["level"], "level")
    if d.get("character", "trivial") != "trivial":
        raise EigenformError("only the trivial character is supported")
    raw = d["coefficients"]
    if not isinstance(raw, list) or not raw:
        raise EigenformError("coefficients must be a non-empty list")
    coeffs = [_decode_int(x, "a_%d" % (i + 1)) for i, x in enumerate(raw)]
    if "bound" in d:
        bound = _decode_int(d["bound"], "bound")
        if len(coeffs) < bound:
            raise EigenformError("declared bound %d but only %d coefficients" % (bound, len(coeffs)))
    label = str(d.get("label", "%d.%d.?" % (N, k)))
    f = Eigenform(label, k, N, tuple(coeffs), source=str(d.get("source", "ingested")))
    bad = validate(f) if check_pairs else None
    if bad is not None:
        raise EigenformError("coefficient a_%d violates the Hecke relations" % bad, bad)
    return f


def validate(f: Eigenform):
    """Smallest index breaking a_1 = 1, multiplicativity or the prime-power
    recursion (every index is checked); None when all hold."""
    return f.first_violation()


def load_eigenform(path) -> Eigenform:
    """Like parse_eigenform, but bare names fall back to the bundled fixtures."""
    p = Path(path)
    if not p.exists():
        bp = bundled_path(p.name)
        if bp is None:
            raise FileNotFoundError(str(path))
        p = bp
    return parse_eigenform(p)


def bundled_path(name: str):
    ref = resources.files("modcomp").joinpath("data", name)
    return Path(str(ref)) if ref.is_file() else None


def bundled(name: str) -> Eigenform:
    """One of the bundled fixtures, e.g. ``bundled("f_21_4.json")``."""
    p = bundled_path(name)
    if p is None:
        raise FileNotFoundError(name)
    return parse_eigenform(p)


_TERM_RE = re.compile(r"([+-]?)\s*(\d*)\s*q(?:\^\{?\s*(\d+)\s*\}?)?")


def parse_qexpansion(text: str, bound: int) -> list:
    """Coefficients a_1..a_bound of a printed q-expansion such as ``q - 3q^2 + q^{10}``.

    Terms that do not appear are zero; trailing ``+ ...`` is ignored.
    """
    body = text.replace("$", " ").replace("\\cdots", " ").replace("...", " ")
    body = re.sub(r"^\s*[A-Za-z]\s*=", " ", body.strip())
    coeffs = [0] * bound
    pos = 0
    seen = set()
    for m in _TERM_RE.finditer(body):
        between = body[pos:m.start()]
        if between.strip(" \n\t+-"):
            raise ValueError("unparsed text %r" % between)
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        c = int(m.group(2)) if m.group(2) else 1
        e = int(m.group(3)) if m.group(3) else 1
        if e in seen:
            raise ValueError("q^%d appears twice" % e)
        seen.add(e)
        if e <= bound:
            coeffs[e - 1] = sign * c
    if body[pos:].strip(" \n\t+-"):
        raise ValueError("unparsed text %r" % body[pos:])
    return coeffs


def emit_report(command: str, inputs: dict, result: dict, caveats=(), timing=None) -> str:
    from . import __version__
    doc = {"format": REPORT_FORMAT, "command": command, "inputs": inputs, "result": _ints(result),
           "caveats": list(caveats), "tool_version": __version__}
    if timing is not None:
        doc["timing"] = timing
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _ints(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return encode_int(x)
    if isinstance(x, dict):
        return {str(k): _ints(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_ints(v) for v in x]
    return x
