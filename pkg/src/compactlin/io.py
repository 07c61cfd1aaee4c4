"""Text formats: the ``.bqp`` instance file and CPLEX-style LP export.

Instance file layout (``#`` starts a comment, numbers are integers,
decimals or ``p/q`` literals and are read exactly)::

    n 4
    name exampleA
    [linear]            # i  c_i
    1 -2
    [quadratic]         # i j  d_ij
    1 3 5
    [equations]         # id  rhs  i:a_i ...
    1 1 1:1 2:1
    2 1 3:1 4:1
    [sides]             # rhs  x<i>:coef  y<i>_<j>:coef ...   (lhs >= rhs)
    -1 x1:-1 y1_3:1
    [pairs]             # i j
    1 3
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ParseError, ValidationError
from .linmodel import PROVENANCE_ORDER, LinConstraint, LinModel, LinVar
from .model import Instance, LinearEquation, SideConstraint, validate_instance

SECTIONS = ("linear", "quadratic", "equations", "sides", "pairs")


def _num(token: str) -> Fraction:
    return Fraction(token)


def format_number(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_instance(text: str, validate: bool = True) -> Instance:
    diags: list[tuple[int, str, str]] = []
    header: dict[str, str] = {}
    section = None
    c, d, eqs, sides, pairs = {}, {}, [], [], set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SECTIONS:
                diags.append((lineno, "syntax-error", f"unknown section [{section}]"))
            continue
        tokens = line.split()
        try:
            if section is None:
                if len(tokens) != 2 or tokens[0] not in ("n", "name"):
                    raise ValueError("expected 'n <int>' or 'name <text>' before sections")
                header[tokens[0]] = tokens[1]
            elif section == "linear":
                i, v = tokens
                c[int(i)] = c.get(int(i), 0) + _num(v)
            elif section == "quadratic":
                i, j, v = tokens
                key = (int(i), int(j))
                d[key] = d.get(key, 0) + _num(v)
            elif section == "equations":
                if len(tokens) < 3:
                    raise ValueError("equation needs an id, a rhs and at least one term")
                coeffs = {}
                for term in tokens[2:]:
                    i, a = term.split(":")
                    if int(i) in coeffs:
                        raise ValueError(f"variable {i} repeated in equation")
                    coeffs[int(i)] = _num(a)
                eqs.append(LinearEquation(tokens[0], coeffs, _num(tokens[1])))
            elif section == "sides":
                xs, ys = {}, {}
                for term in tokens[1:]:
                    var, a = term.split(":")
                    if var.startswith("x"):
                        xs[int(var[1:])] = _num(a)
                    elif var.startswith("y"):
                        i, j = var[1:].split("_")
                        ys[(int(i), int(j))] = _num(a)
                    else:
                        raise ValueError(f"side term {term!r} is neither x nor y")
                sides.append(SideConstraint(xs, ys, _num(tokens[0])))
            elif section == "pairs":
                i, j = tokens
                pairs.add((int(i), int(j)))
        except (ValueError, ZeroDivisionError) as exc:
            diags.append((lineno, "syntax-error", str(exc)))
    if "n" not in header:
        diags.append((0, "syntax-error", "missing 'n' header"))
    if diags:
        raise ParseError(diags)
    try:
        n = int(header["n"])
    except ValueError:
        raise ParseError([(0, "syntax-error", f"n must be an integer, got {header['n']!r}")])
    inst = Instance(
        n=n,
        equations=eqs,
        P=pairs | set(d),
        c=c,
        d=d,
        sides=sides,
        name=header.get("name", ""),
    )
    if validate:
        report = validate_instance(inst)
        if not report.ok:
            raise ValidationError(report.issues)
    return inst


def serialize_instance(inst: Instance) -> str:
    out = [f"n {inst.n}"]
    if inst.name:
        out.append(f"name {inst.name}")
    out.append("[linear]")
    out += [f"{i} {format_number(v)}" for i, v in sorted(inst.c.items())]
    out.append("[quadratic]")
    out += [f"{i} {j} {format_number(v)}" for (i, j), v in sorted(inst.d.items())]
    out.append("[equations]")
    for eq in inst.equations:
        terms = " ".join(f"{i}:{format_number(a)}" for i, a in sorted(eq.coeffs.items()))
        out.append(f"{eq.id} {format_number(eq.rhs)} {terms}")
    out.append("[sides]")
    for side in inst.sides:
        terms = [f"x{i}:{format_number(a)}" for i, a in sorted(side.x_coeffs.items())]
        terms += [f"y{i}_{j}:{format_number(a)}" for (i, j), a in sorted(side.y_coeffs.items())]
        out.append(" ".join([format_number(side.rhs), *terms]))
    out.append("[pairs]")
    out += [f"{i} {j}" for i, j in sorted(inst.P)]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# LP export


def _terminating(value: Fraction) -> bool:
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def _decimal(value: Fraction) -> str:
    """Shortest exact decimal of a terminating fraction."""
    if value.denominator == 1:
        return str(value.numerator)
    digits = 0
    while (value * 10**digits).denominator != 1:
        digits += 1
    scaled = value * 10**digits
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}".rstrip("0").rstrip(".")


def _scaled(coeffs: dict, rhs: Fraction = Fraction(0)):
    """Coefficients as exact decimals, or scaled to integers when some are not."""
    values = [*coeffs.values(), rhs]
    if all(_terminating(v) for v in values):
        return coeffs, rhs, 1
    scale = math.lcm(*(v.denominator for v in values))
    return {k: v * scale for k, v in coeffs.items()}, rhs * scale, scale


def _expr(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    parts = []
    for v in sorted(coeffs, key=_var_key):
        a = coeffs[v]
        sign = "-" if a < 0 else "+"
        mag = abs(a)
        body = v.name if mag == 1 else f"{_decimal(mag)} {v.name}"
        parts.append(f"{sign} {body}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _var_key(v: LinVar):
    order = {"x": 0, "y": 1}
    ident = v.id if isinstance(v.id, tuple) else (v.id,)
    return (order.get(v.kind, 2), v.kind, tuple(str(p) if not isinstance(p, int) else p for p in ident))


def _constraint_key(con: LinConstraint):
    kind, *rest = con.provenance or ("~",)
    return (PROVENANCE_ORDER.get(kind, len(PROVENANCE_ORDER)), kind, [str(p) for p in rest])


def export_lp(model: LinModel) -> str:
    """Deterministic LP-format document for the model."""
    lines = ["\\ compactlin linear model"]
    obj, _, scale = _scaled(dict(model.objective))
    if scale != 1:
        lines.append(f"\\ objective scaled by {scale}")
    lines += ["Minimize", f" obj: {_expr(obj)}", "Subject To"]
    names_seen: dict[str, int] = {}
    for con in sorted(model.constraints, key=_constraint_key):
        coeffs, rhs, scale = _scaled(dict(con.coeffs), con.rhs)
        name = con.name
        if name in names_seen:
            names_seen[name] += 1
            name = f"{name}_{names_seen[name]}"
        else:
            names_seen[name] = 0
        if scale != 1:
            lines.append(f"\\ {name} scaled by {scale}")
        lines.append(f" {name}: {_expr(coeffs)} {con.sense} {_decimal(rhs)}")
    lines.append("Bounds")
    ordered_vars = sorted(model.vars, key=_var_key)
    binary = [v for v in ordered_vars if v in model.integer and model.bounds[v] == (0, 1)]
    general = [v for v in ordered_vars if v in model.integer and v not in binary]
    for v in ordered_vars:
        if v in binary:
            continue
        lo, hi = model.bounds[v]
        lines.append(f" {_exact_bound(lo)} <= {v.name} <= {_exact_bound(hi)}")
    lines.append("Binary")
    if binary:
        lines.append(" " + " ".join(v.name for v in binary))
    if general:
        lines += ["General", " " + " ".join(v.name for v in general)]
    lines.append("End")
    return "\n".join(lines) + "\n"


def _exact_bound(value) -> str:
    if value is None:
        return "+inf"
    if _terminating(value):
        return _decimal(value)
    raise ValueError(f"bound {value} has no exact decimal form")
