"""Text formats for configs, models and reports.

Input files are line-oriented `key = value` with `#` comments. Polynomial
values are exact expression strings over named variables: integer and p/q
literals, + - * / and ** (with ^ as a synonym), parentheses. Reports are
line-oriented `key: value` text carrying the tool version and a hash of
every input, so identical inputs reproduce byte-identical reports.
"""

from __future__ import annotations

import ast
import hashlib
from fractions import Fraction

from . import __version__
from .algebra import TriForm, UniPoly
from .branchcurve import model_from_coefficients
from .delpezzo import ProjPoint
from .twotorsion import KummerFunction


class FormatError(Exception):
    pass


# ---------------------------------------------------------------------------
# expression parsing

def _pzero():
    return {}


def _padd(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _pneg(a):
    return {e: -c for e, c in a.items()}


def _pmul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _as_constant(a, nvars):
    if not a:
        return Fraction(0)
    if len(a) == 1:
        zero = (0,) * nvars
        if zero in a:
            return a[zero]
    return None


def _eval_node(node, names, nvars):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int):
            if node.value == 0:
                return _pzero()
            return {(0,) * nvars: Fraction(node.value)}
        if isinstance(node.value, float):
            raise FormatError("decimal literals are not exact; write p/q")
        raise FormatError("unsupported literal %r" % (node.value,))
    if isinstance(node, ast.Name):
        if node.id not in names:
            raise FormatError("unknown symbol %r" % node.id)
        expo = [0] * nvars
        expo[names[node.id]] = 1
        return {tuple(expo): Fraction(1)}
    if isinstance(node, ast.UnaryOp):
        val = _eval_node(node.operand, names, nvars)
        if isinstance(node.op, ast.USub):
            return _pneg(val)
        if isinstance(node.op, ast.UAdd):
            return val
        raise FormatError("unsupported operator")
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, names, nvars)
        right = _eval_node(node.right, names, nvars)
        if isinstance(node.op, ast.Add):
            return _padd(left, right)
        if isinstance(node.op, ast.Sub):
            return _padd(left, _pneg(right))
        if isinstance(node.op, ast.Mult):
            return _pmul(left, right)
        if isinstance(node.op, ast.Div):
            c = _as_constant(right, nvars)
            if c is None:
                raise FormatError("division by a non-constant")
            if not c:
                raise FormatError("division by zero")
            return {e: v / c for e, v in left.items()}
        if isinstance(node.op, ast.Pow):
            c = _as_constant(right, nvars)
            if c is None or c.denominator != 1 or c < 0:
                raise FormatError("exponents must be nonnegative integers")
            acc = {(0,) * nvars: Fraction(1)}
            for _ in range(int(c)):
                acc = _pmul(acc, left)
            return acc
        raise FormatError("unsupported operator")
    raise FormatError("unsupported syntax (%s)" % type(node).__name__)


def parse_polynomial(text, variables):
    """Exact polynomial from an expression string. Returns a dict mapping
    exponent tuples (one slot per variable, in the given order) to nonzero
    Fractions; the zero polynomial is the empty dict."""
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise FormatError("bad expression %r: %s" % (text, exc.msg)) from None
    names = {v: i for i, v in enumerate(variables)}
    return _eval_node(tree.body, names, len(variables))


def parse_rational(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise FormatError("not a rational number: %r" % text) from None


def _to_unipoly(terms):
    if not terms:
        return UniPoly(())
    deg = max(e[0] for e in terms)
    coeffs = [Fraction(0)] * (deg + 1)
    for (e,), c in terms.items():
        coeffs[e] = c
    return UniPoly(tuple(coeffs))


# ---------------------------------------------------------------------------
# key = value files

def parse_key_values(text):
    """Ordered (key, value) pairs from `key = value` lines. `#` starts a
    comment; blank lines are skipped; duplicate keys are rejected."""
    pairs = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError("line %d: expected `key = value`, got %r"
                              % (lineno, raw.strip()))
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise FormatError("line %d: empty key or value" % lineno)
        if key in seen:
            raise FormatError("line %d: duplicate key %r" % (lineno, key))
        seen.add(key)
        pairs.append((key, value))
    return pairs


def parse_points_text(text):
    """8 points from keys point_1 .. point_8, each `a : b : c` with exact
    rational entries."""
    entries = dict(parse_key_values(text))
    for key in entries:
        if not key.startswith("point_"):
            raise FormatError("unexpected key %r in a points file" % key)
    points = []
    for i in range(1, 9):
        key = "point_%d" % i
        if key not in entries:
            raise FormatError("missing %s (8 points required)" % key)
        parts = entries[key].split(":")
        if len(parts) != 3:
            raise FormatError("%s: expected `a : b : c`, got %r"
                              % (key, entries[key]))
        a, b, c = (parse_rational(p) for p in parts)
        try:
            points.append(ProjPoint(a, b, c))
        except ValueError as exc:
            raise FormatError("%s: %s" % (key, exc)) from None
    extra = set(entries) - {"point_%d" % i for i in range(1, 9)}
    if extra:
        raise FormatError("unexpected keys: %s" % ", ".join(sorted(extra)))
    return points


def parse_model_text(text):
    """Monic-in-W fibre model from three polynomial lines a2, a1, a0."""
    entries = dict(parse_key_values(text))
    if set(entries) != {"a2", "a1", "a0"}:
        raise FormatError("model files need exactly the keys a2, a1, a0")
    coeffs = {k: _to_unipoly(parse_polynomial(entries[k], ("t",)))
              for k in ("a2", "a1", "a0")}
    return model_from_coefficients(coeffs["a2"], coeffs["a1"], coeffs["a0"])


_H_SLOTS = {(0, 0): "delta", (1, 0): "beta", (2, 0): "alpha", (0, 1): "gamma"}


def parse_h_text(text):
    """Kummer function from a line `h = <expression in t and W>` that is
    quadratic in t, linear in W, with no cross term. An optional `index = n`
    line labels the function (default 0)."""
    entries = dict(parse_key_values(text))
    extra = set(entries) - {"h", "index"}
    if extra or "h" not in entries:
        raise FormatError("h files need a key `h` (and optionally `index`)")
    index = 0
    if "index" in entries:
        frac = parse_rational(entries["index"])
        if frac.denominator != 1:
            raise FormatError("index must be an integer")
        index = int(frac)
    terms = parse_polynomial(entries["h"], ("t", "W"))
    parts = {"alpha": Fraction(0), "beta": Fraction(0),
             "gamma": Fraction(0), "delta": Fraction(0)}
    for expo, coeff in terms.items():
        slot = _H_SLOTS.get(expo)
        if slot is None:
            raise FormatError("h must be quadratic in t and linear in W "
                              "with no cross term; found t^%d*W^%d" % expo)
        parts[slot] = coeff
    return KummerFunction(index, parts["alpha"], parts["beta"],
                          parts["gamma"], parts["delta"])


def kummer_expression(h):
    """Expression text for a kummer function, parseable by parse_h_text."""
    chunks = []
    for coeff, mono in ((h.alpha, "t^2"), (h.beta, "t"),
                        (h.gamma, "W"), (h.delta, "")):
        if not coeff:
            continue
        body = str(abs(coeff)) if not mono or abs(coeff) != 1 else ""
        if body and mono:
            body += "*"
        body += mono
        chunks.append(("-" if coeff < 0 else "+", body))
    if not chunks:
        return "0"
    sign, first = chunks[0]
    text = ("-" if sign == "-" else "") + first
    for sign, body in chunks[1:]:
        text += " %s %s" % (sign, body)
    return text


def parse_table_text(text):
    """(prime, exponent) rows, one per line, whitespace separated. `#`
    comments and blank lines are allowed."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("line %d: expected `prime exponent`" % lineno)
        try:
            p, k = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError("line %d: entries must be integers"
                              % lineno) from None
        if p < 2 or k < 0:
            raise FormatError("line %d: need prime >= 2 and exponent >= 0"
                              % lineno)
        rows.append((p, k))
    return rows


def parse_triform_text(text, degree=None):
    """Trivariate form from an expression in x, y, z (used for an explicit
    anticanonical cubic); optionally checks homogeneity of a given degree."""
    terms = parse_polynomial(text, ("x", "y", "z"))
    if not terms:
        raise FormatError("the zero form is not allowed")
    degrees = {sum(e) for e in terms}
    if len(degrees) != 1 or (degree is not None and degrees != {degree}):
        raise FormatError("expected a homogeneous form%s"
                          % ("" if degree is None else " of degree %d" % degree))
    return TriForm(terms)


# ---------------------------------------------------------------------------
# reports

def input_hash(parts):
    """Hex sha256 over labeled payloads, order-sensitive."""
    h = hashlib.sha256()
    for label, payload in parts:
        if isinstance(payload, str):
            payload = payload.encode()
        h.update(label.encode() + b"\n")
        h.update(payload)
        h.update(b"\n")
    return h.hexdigest()


def int_text(n):
    """Full decimal text of an integer, however large. Lifts the
    interpreter's conversion cap when a certificate integer exceeds it."""
    try:
        return str(n)
    except ValueError:
        import sys
        sys.set_int_max_str_digits(max(sys.get_int_max_str_digits(),
                                       n.bit_length() // 3 + 16))
        return str(n)


def format_value(value):
    """Exact text for a report value; big integers in full, never floats."""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int):
        return int_text(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int_text(value.numerator)
        return "%s/%s" % (int_text(value.numerator), int_text(value.denominator))
    if isinstance(value, str):
        return value
    if isinstance(value, UniPoly):
        return value.to_str("t")
    if isinstance(value, TriForm):
        return value.to_str()
    if isinstance(value, ProjPoint):
        return "%s : %s : %s" % value.coords
    if isinstance(value, (tuple, list)):
        return " ".join(format_value(v) for v in value)
    raise FormatError("no exact text form for %r" % type(value).__name__)


class Report:
    """Ordered `key: value` lines with a fixed header. Rendering is fully
    deterministic: no timestamps, insertion order preserved."""

    def __init__(self, name, digest):
        self.name = name
        self.lines = ["report: %s" % name,
                      "version: %s" % __version__,
                      "input-sha256: %s" % digest]

    def add(self, key, value):
        if ":" in key or "\n" in key:
            raise FormatError("bad report key %r" % key)
        self.lines.append("%s: %s" % (key, format_value(value)))

    def render(self):
        return "\n".join(self.lines) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.render())
