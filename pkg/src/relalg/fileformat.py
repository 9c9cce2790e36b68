"""Versioned text formats for algebras and labeled structures.

Algebra files (extension convention: .ra)::

    ra v1
    atoms <k> <name...>
    identity <name>
    symmetric true
    comp <a> <b> = <name>+...|0       one line per unordered atom pair

Atom names match [A-Za-z0-9']+.  Only symmetric algebras are accepted:
the format carries no converse permutation, and every algebra this
package builds is symmetric.

Structure files (extension convention: .rel)::

    structure v1
    kind atom-labeling|power|xi
    algebra <path>
    # then, per kind:
    base <d>
    edge <u> <v> <atom>               u < v; converse closure implicit
    power m=<m> inner=<path>
    xi inner=<path> n=<n> seed=<u64>
    xi inner=<path> n=<n>             followed by d*d "tedge <x> <y> <i>" lines

Paths are resolved relative to the referencing file.  A xi line carries
either a seed or explicit tedge lines, never both.  Writers emit sorted,
canonical lines so identical objects produce byte-identical files.
"""

from __future__ import annotations

import os
import re

from .algebra import FiniteRelationAlgebra
from .errors import ParseError
from .lpn import build_lpn
from .structures import AtomLabeling, LabeledStructure, Power, Xi
from .xi import ExplicitPartition, PartitionRecipe

_NAME_RE = re.compile(r"^[A-Za-z0-9']+$")


def _detect_lpn(algebra_names: tuple[str, ...], comp) -> tuple[int, int] | None:
    """Recover (p,n) when names and table match the built family exactly."""
    names = list(algebra_names)
    if not names or names[0] != "1'":
        return None
    p = -1
    idx = 1
    while idx < len(names) and names[idx] == f"a{idx - 1}":
        idx += 1
        p += 1
    n = 0
    while idx < len(names) and names[idx] == f"t{n + 1}":
        idx += 1
        n += 1
    if idx != len(names) or p < 3:
        return None
    reference = build_lpn(p, n)
    if reference.comp == tuple(tuple(row) for row in comp):
        return (p, n)
    return None


def format_algebra(algebra: FiniteRelationAlgebra) -> str:
    if not algebra.is_symmetric:
        raise ValueError("the v1 algebra format only carries symmetric algebras")
    if len(algebra.identity_atoms) != 1:
        raise ValueError("the v1 algebra format needs a single identity atom")
    for name in algebra.atom_names:
        if not _NAME_RE.match(name):
            raise ValueError(f"atom name {name!r} not writable in the v1 format")
    lines = [
        "ra v1",
        f"atoms {algebra.atom_count} {' '.join(algebra.atom_names)}",
        f"identity {algebra.atom_names[next(iter(algebra.identity_atoms))]}",
        "symmetric true",
    ]
    for a in range(algebra.atom_count):
        for b in range(a, algebra.atom_count):
            lines.append(
                f"comp {algebra.atom_names[a]} {algebra.atom_names[b]} = "
                f"{algebra.format_mask(algebra.comp[a][b])}"
            )
    return "\n".join(lines) + "\n"


def save_algebra(algebra: FiniteRelationAlgebra, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(format_algebra(algebra))


def parse_algebra(text: str, *, name: str | None = None) -> FiniteRelationAlgebra:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    if not lines or lines[0].strip() != "ra v1":
        raise ParseError("expected 'ra v1' header", 1)
    fields: dict[str, tuple[int, str]] = {}
    comp_lines: list[tuple[int, str]] = []
    for no, ln in enumerate(lines[1:], start=2):
        ln = ln.strip()
        if not ln:
            continue
        key = ln.split(None, 1)[0]
        if key == "comp":
            comp_lines.append((no, ln))
        elif key in ("atoms", "identity", "symmetric"):
            if key in fields:
                raise ParseError(f"duplicate '{key}' line", no)
            fields[key] = (no, ln)
        else:
            raise ParseError(f"unknown directive {key!r}", no)
    for key in ("atoms", "identity", "symmetric"):
        if key not in fields:
            raise ParseError(f"missing '{key}' line", len(lines))

    no, ln = fields["atoms"]
    parts = ln.split()
    if len(parts) < 3:
        raise ParseError("atoms line needs a count and names", no)
    try:
        k = int(parts[1])
    except ValueError:
        raise ParseError("atom count is not a number", no) from None
    names = parts[2:]
    if len(names) != k:
        raise ParseError(f"declared {k} atoms but listed {len(names)}", no)
    for nm in names:
        if not _NAME_RE.match(nm):
            raise ParseError(f"bad atom name {nm!r}", no)
    if len(set(names)) != k:
        raise ParseError("duplicate atom names", no)
    index = {nm: i for i, nm in enumerate(names)}

    no, ln = fields["identity"]
    parts = ln.split()
    if len(parts) != 2 or parts[1] not in index:
        raise ParseError("identity line must name one declared atom", no)
    ident = index[parts[1]]

    no, ln = fields["symmetric"]
    parts = ln.split()
    if len(parts) != 2 or parts[1] not in ("true", "false"):
        raise ParseError("symmetric line must be 'true' or 'false'", no)
    if parts[1] == "false":
        raise ParseError(
            "the v1 format cannot carry non-symmetric algebras (no converse data)", no
        )

    comp = [[None] * k for _ in range(k)]
    for no, ln in comp_lines:
        m = re.match(r"^comp\s+(\S+)\s+(\S+)\s*=\s*(\S+)$", ln)
        if not m:
            raise ParseError("malformed comp line", no)
        a_name, b_name, expr = m.groups()
        if a_name not in index or b_name not in index:
            raise ParseError(f"unknown atom in comp line", no)
        a, b = index[a_name], index[b_name]
        mask = 0
        if expr != "0":
            for part in expr.split("+"):
                if part not in index:
                    raise ParseError(f"unknown atom {part!r} in comp value", no)
                mask |= 1 << index[part]
        if comp[a][b] is not None and comp[a][b] != mask:
            raise ParseError(f"conflicting comp entries for {a_name} {b_name}", no)
        comp[a][b] = mask
        if comp[b][a] is None:
            comp[b][a] = mask
        elif comp[b][a] != mask:
            raise ParseError(f"comp entry conflicts with its mirror", no)
    for a in range(k):
        for b in range(k):
            if comp[a][b] is None:
                raise ParseError(
                    f"missing comp line for pair {names[a]} {names[b]}",
                    len(lines),
                )

    lpn = _detect_lpn(tuple(names), comp)
    return FiniteRelationAlgebra(
        names,
        identity_atoms=[ident],
        converse=range(k),
        comp=comp,
        lpn_params=lpn,
        name=name,
    )


def load_algebra(path: str) -> FiniteRelationAlgebra:
    with open(path) as fh:
        return parse_algebra(fh.read(), name=os.path.basename(path))


# -- structures ---------------------------------------------------------------


def format_structure(
    structure: LabeledStructure,
    *,
    algebra_path: str,
    inner_path: str | None = None,
    explicit: bool = False,
) -> str:
    lines = ["structure v1", f"kind {structure.kind}", f"algebra {algebra_path}"]
    if isinstance(structure, AtomLabeling):
        lines.append(f"base {structure.base_size}")
        names = structure.algebra.atom_names
        for (u, v), a in sorted(structure.labels.items()):
            if u < v:
                lines.append(f"edge {u} {v} {names[a]}")
    elif isinstance(structure, Power):
        if inner_path is None:
            raise ValueError("power structures need an inner path")
        lines.append(f"power m={structure.m} inner={inner_path}")
    elif isinstance(structure, Xi):
        if inner_path is None:
            raise ValueError("xi structures need an inner path")
        part = structure.partition
        if isinstance(part, PartitionRecipe) and not explicit:
            lines.append(
                f"xi inner={inner_path} n={structure.n} seed={part.seed}"
            )
        else:
            lines.append(f"xi inner={inner_path} n={structure.n}")
            d = structure.inner.base_size
            for x in range(d):
                for y in range(d):
                    lines.append(f"tedge {x} {y} {part.class_of(x, y)}")
    else:
        raise TypeError(f"not a labeled structure: {structure!r}")
    return "\n".join(lines) + "\n"


def save_structure(
    structure: LabeledStructure,
    path: str,
    *,
    algebra_path: str,
    inner_path: str | None = None,
    explicit: bool = False,
) -> None:
    with open(path, "w") as fh:
        fh.write(
            format_structure(
                structure,
                algebra_path=algebra_path,
                inner_path=inner_path,
                explicit=explicit,
            )
        )


def load_structure(path: str, *, _depth: int = 0) -> LabeledStructure:
    if _depth > 16:
        raise ParseError(f"structure files nest too deeply at {path}")
    base_dir = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh.read().splitlines()]
    if not lines or lines[0].strip() != "structure v1":
        raise ParseError("expected 'structure v1' header", 1)

    kind = None
    algebra_path = None
    directives: list[tuple[int, str]] = []
    for no, ln in enumerate(lines[1:], start=2):
        ln = ln.strip()
        if not ln:
            continue
        key, _, rest = ln.partition(" ")
        if key == "kind":
            kind = rest.strip()
        elif key == "algebra":
            algebra_path = rest.strip()
        else:
            directives.append((no, ln))
    if kind not in ("atom-labeling", "power", "xi"):
        raise ParseError(f"missing or unknown kind {kind!r}", 2)
    if algebra_path is None:
        raise ParseError("missing algebra line", 2)
    algebra = load_algebra(os.path.join(base_dir, algebra_path))

    if kind == "atom-labeling":
        base = None
        labels: dict[tuple[int, int], int] = {}
        for no, ln in directives:
            parts = ln.split()
            if parts[0] == "base":
                if base is not None:
                    raise ParseError("duplicate base line", no)
                base = int(parts[1])
            elif parts[0] == "edge":
                if len(parts) != 4:
                    raise ParseError("edge line needs 'edge u v atom'", no)
                u, v = int(parts[1]), int(parts[2])
                if u >= v:
                    raise ParseError("edge lines require u < v", no)
                if (u, v) in labels:
                    raise ParseError(f"duplicate edge {u} {v}", no)
                try:
                    atom = algebra.atom_by_name(parts[3])
                except ValueError as exc:
                    raise ParseError(str(exc), no) from None
                labels[(u, v)] = atom.bits.bit_length() - 1
            else:
                raise ParseError(f"unexpected directive {parts[0]!r}", no)
        if base is None:
            raise ParseError("missing base line", len(lines))
        try:
            return AtomLabeling(algebra, base, labels)
        except ValueError as exc:
            raise ParseError(str(exc)) from None

    if kind == "power":
        spec = None
        for no, ln in directives:
            if ln.startswith("power "):
                if spec is not None:
                    raise ParseError("duplicate power line", no)
                spec = (no, ln)
            else:
                raise ParseError("unexpected directive in power structure", no)
        if spec is None:
            raise ParseError("missing power line", len(lines))
        no, ln = spec
        m = re.match(r"^power\s+m=(\d+)\s+inner=(\S+)$", ln)
        if not m:
            raise ParseError("malformed power line", no)
        exponent = int(m.group(1))
        if exponent < 1:
            raise ParseError("power exponent must be at least 1", no)
        inner = load_structure(os.path.join(base_dir, m.group(2)), _depth=_depth + 1)
        if inner.algebra.comp != algebra.comp or inner.algebra.atom_names != algebra.atom_names:
            raise ParseError("power structure's algebra differs from its inner's", no)
        if exponent == 1:
            return inner
        return Power(inner, exponent)

    # xi
    spec = None
    tedges: dict[tuple[int, int], int] = {}
    for no, ln in directives:
        if ln.startswith("xi "):
            if spec is not None:
                raise ParseError("duplicate xi line", no)
            spec = (no, ln)
        elif ln.startswith("tedge "):
            parts = ln.split()
            if len(parts) != 4:
                raise ParseError("tedge line needs 'tedge x y class'", no)
            x, y, cls = int(parts[1]), int(parts[2]), int(parts[3])
            if (x, y) in tedges:
                raise ParseError(f"duplicate tedge {x} {y}", no)
            tedges[(x, y)] = cls
        else:
            raise ParseError("unexpected directive in xi structure", no)
    if spec is None:
        raise ParseError("missing xi line", len(lines))
    no, ln = spec
    m = re.match(r"^xi\s+inner=(\S+)\s+n=(\d+)(?:\s+seed=(\d+))?$", ln)
    if not m:
        raise ParseError("malformed xi line", no)
    inner = load_structure(os.path.join(base_dir, m.group(1)), _depth=_depth + 1)
    n = int(m.group(2))
    params = inner.algebra.lpn_params
    if params is None or params[1] != 0:
        raise ParseError("xi inner structure must be over an L(p,0) algebra", no)
    if algebra.lpn_params != (params[0], n):
        raise ParseError(
            f"xi algebra must be the slope-and-bridge algebra with p={params[0]}, n={n}",
            no,
        )
    if m.group(3) is not None:
        if tedges:
            raise ParseError("xi line carries a seed and explicit tedges", no)
        seed = int(m.group(3))
        partition = PartitionRecipe(seed, n, inner.base_size)
    else:
        if not tedges:
            raise ParseError("xi needs a seed or explicit tedges", no)
        try:
            partition = ExplicitPartition(n, inner.base_size, tedges)
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
    # the lpn_params check above guarantees the loaded algebra's table
    # coincides with the built family, so it can carry the structure
    return Xi(inner, n, partition, algebra)
