"""Line-oriented text formats for tensors, decompositions and certificate bundles."""

from __future__ import annotations

from .errors import ParseError
from .exact_arith import parse_field
from .nss_certifier import Certificate
from .poly_system import PolySystem, format_poly, parse_poly
from .tensor_core import Decomposition, DenseTensor, Shape, SymTensor, exponent_vectors


def _lines(text: str) -> list:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _expect(lines, pos, word):
    if pos >= len(lines):
        raise ParseError(f"expected {word!r}, found end of input")
    parts = lines[pos].split()
    if parts[0] != word:
        raise ParseError(f"expected {word!r}, found {lines[pos]!r}")
    return parts[1:]


def _ints(tokens, what):
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(f"{what} must be integers: {' '.join(tokens)}") from exc


# ---------------------------------------------------------------- tensors


def format_tensor(T) -> str:
    field = T.field
    if isinstance(T, SymTensor):
        head = ["symtensor", field.spec_line(), f"n {T.n} d {T.d}"]
        values = T.ordered()
    else:
        head = ["tensor", field.spec_line(), "shape " + " ".join(map(str, T.shape))]
        values = T.entries
    return "\n".join(head + ["entries", " ".join(field.format(v) for v in values)]) + "\n"


def parse_tensor(text: str):
    """A DenseTensor or SymTensor from its text form."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty tensor file")
    kind = lines[0].split()[0]
    if kind not in ("tensor", "symtensor"):
        raise ParseError(f"expected 'tensor' or 'symtensor', found {lines[0]!r}")
    field = parse_field(_expect(lines, 1, "field"))
    if kind == "tensor":
        shape = Shape(_ints(_expect(lines, 2, "shape"), "shape"))
        count = shape.N
    else:
        toks = _expect(lines, 2, "n")
        if len(toks) != 3 or toks[1] != "d":
            raise ParseError(f"expected 'n <n> d <d>', found {lines[2]!r}")
        n, d = _ints([toks[0], toks[2]], "n and d")
        count = len(exponent_vectors(n, d))
    first = _expect(lines, 3, "entries")
    tokens = first + [t for line in lines[4:] for t in line.split()]
    if len(tokens) != count:
        raise ParseError(f"expected {count} entries, found {len(tokens)}")
    values = [field.parse(t) for t in tokens]
    if kind == "tensor":
        return DenseTensor.from_entries(shape, field, values)
    return SymTensor(n, d, field, dict(zip(exponent_vectors(n, d), values)))


# ---------------------------------------------------------- decompositions


def format_decomposition(dec: Decomposition, field) -> str:
    out = [f"decomposition {dec.rank}"]
    for k, term in enumerate(dec.terms):
        out.append("term")
        for vec in term:
            out.append(" ".join(field.format(field.coerce(a)) for a in vec))
        if dec.scales is not None:
            out.append(f"scale {field.format(field.coerce(dec.scales[k]))}")
    return "\n".join(out) + "\n"


def parse_decomposition(text: str, field, d: int) -> Decomposition:
    """Terms of d vectors each; scales must be given for all terms or none."""
    lines = _lines(text)
    (r,) = _ints(_expect(lines, 0, "decomposition"), "term count")
    pos = 1
    terms, scales = [], []
    for _ in range(r):
        _expect(lines, pos, "term")
        pos += 1
        if pos + d > len(lines):
            raise ParseError("decomposition ends inside a term")
        terms.append(tuple(tuple(field.parse(t) for t in lines[pos + j].split()) for j in range(d)))
        pos += d
        if pos < len(lines) and lines[pos].split()[0] == "scale":
            scales.append(field.parse(" ".join(lines[pos].split()[1:])))
            pos += 1
    if pos != len(lines):
        raise ParseError(f"unexpected content after {r} terms: {lines[pos]!r}")
    if scales and len(scales) != r:
        raise ParseError("scale lines must appear on every term or on none")
    return Decomposition(tuple(terms), tuple(scales) if scales else None)


# ----------------------------------------------------- certificate bundles


def format_certificate(cert: Certificate) -> str:
    sys = cert.system
    out = ["certificate"]
    if cert.label:
        out.append(f"label {cert.label}")
    out += [f"variables {sys.nvars}", f"generators {len(sys.gens)}", f"degree {cert.degree}"]
    for i, g in enumerate(cert.cofactors):
        out.append(f"g {i}")
        out.append(format_poly(g))
    out.append("end")
    return "\n".join(out)


def format_bundle(T, verdict) -> str:
    """Tensor, question and every certificate, re-checkable without the solver."""
    out = ["bundle", "tensor-begin", format_tensor(T).rstrip("\n"), "tensor-end",
           f"rank {verdict.r}", f"normalize {'yes' if verdict.normalize else 'no'}",
           f"method {verdict.method}"]
    for cert in verdict.certificates:
        out.append(format_certificate(cert))
    return "\n".join(out) + "\n"


class Bundle:
    def __init__(self, tensor, r, normalize, method, certificates):
        self.tensor = tensor
        self.r = r
        self.normalize = normalize
        self.method = method
        self.certificates = certificates  # list of (label, degree, nvars, [poly text])


def parse_bundle(text: str) -> Bundle:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    _expect(lines, 0, "bundle")
    _expect(lines, 1, "tensor-begin")
    try:
        end = lines.index("tensor-end")
    except ValueError as exc:
        raise ParseError("missing 'tensor-end'") from exc
    tensor = parse_tensor("\n".join(lines[2:end]))
    pos = end + 1
    (r,) = _ints(_expect(lines, pos, "rank"), "rank")
    norm = _expect(lines, pos + 1, "normalize")
    if norm not in (["yes"], ["no"]):
        raise ParseError(f"normalize must be yes or no, found {lines[pos + 1]!r}")
    method = _expect(lines, pos + 2, "method")
    pos += 3
    certs = []
    while pos < len(lines):
        _expect(lines, pos, "certificate")
        pos += 1
        label = ""
        if lines[pos].startswith("label"):
            label = lines[pos][len("label"):].strip()
            pos += 1
        (nvars,) = _ints(_expect(lines, pos, "variables"), "variables")
        (K,) = _ints(_expect(lines, pos + 1, "generators"), "generators")
        (D,) = _ints(_expect(lines, pos + 2, "degree"), "degree")
        pos += 3
        polys = []
        for i in range(K):
            if _expect(lines, pos, "g") != [str(i)]:
                raise ParseError(f"expected 'g {i}', found {lines[pos]!r}")
            polys.append(lines[pos + 1])
            pos += 2
        _expect(lines, pos, "end")
        pos += 1
        certs.append((label, D, nvars, polys))
    return Bundle(tensor, r, norm == ["yes"], " ".join(method), certs)


def load_certificate(system: PolySystem, label: str, degree: int, poly_lines) -> Certificate:
    cofactors = tuple(parse_poly(p, system.nvars, system.field) for p in poly_lines)
    return Certificate(system, degree, cofactors, label)
