"""Named seed transforms: built-ins plus user registry files.

Registry file grammar, one code per line::

    name n k m kinds d_1 ... d_{2(n+m)}

``kinds`` is a comma-separated list of ``a`` (ancilla) / ``e`` (ebit), one
per ancilla, or ``-`` when ``n == k``.  ``#`` starts a comment.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

from .pauli import SeedTransform, SymplecticError

log = logging.getLogger(__name__)

REGISTRY_ENV = "QTC_REGISTRY"


class RegistryError(ValueError):
    def __init__(self, path, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


BUILTIN_CODES: dict[str, tuple[int, int, int, str, list[int]]] = {
    # rate-1/3 m=3 entanglement-assisted inner code (all ancillas are ebits)
    "opt-inner": (3, 1, 3, "e,e", [4091, 3736, 2097, 1336, 1601, 279, 3093, 502, 1792, 3020, 226, 1100]),
    # rate-1/3 m=3 unassisted outer code
    "opt-outer": (3, 1, 3, "a,a", [1048, 3872, 3485, 2054, 983, 3164, 3145, 1824, 987, 3282, 2505, 1984]),
}


def parse_registry(text: str, path: str = "<string>") -> dict[str, SeedTransform]:
    codes: dict[str, SeedTransform] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) < 5:
            raise RegistryError(path, lineno, "expected 'name n k m kinds d1 ... d2(n+m)'")
        name = tok[0]
        try:
            n, k, m = (int(t) for t in tok[1:4])
            decimals = [int(t) for t in tok[5:]]
        except ValueError as exc:
            raise RegistryError(path, lineno, f"non-integer field: {exc}") from None
        kinds = "" if tok[4] == "-" else tok[4]
        if len(decimals) != 2 * (n + m):
            raise RegistryError(path, lineno, f"expected {2 * (n + m)} decimals, got {len(decimals)}")
        try:
            seed = SeedTransform.from_decimals(decimals, n, k, m, kinds)
        except (SymplecticError, ValueError) as exc:
            raise RegistryError(path, lineno, str(exc)) from None
        if name in codes:
            log.warning("%s:%d: code %r redefined", path, lineno, name)
        codes[name] = seed
    return codes


def load_registry(path) -> dict[str, SeedTransform]:
    path = Path(path)
    return parse_registry(path.read_text(), str(path))


class Registry:
    """Built-in codes overlaid by any registry files (later files win)."""

    def __init__(self, files=()):
        self.codes = {name: SeedTransform.from_decimals(d, n, k, m, kinds) for name, (n, k, m, kinds, d) in BUILTIN_CODES.items()}
        env = os.environ.get(REGISTRY_ENV)
        for f in ([env] if env else []) + list(files):
            for name, seed in load_registry(f).items():
                if name in self.codes:
                    log.warning("registry %s overrides code %r", f, name)
                self.codes[name] = seed

    def __contains__(self, name):
        return name in self.codes

    def names(self) -> list[str]:
        return sorted(self.codes)

    def get(self, name: str) -> SeedTransform:
        try:
            return self.codes[name]
        except KeyError:
            raise KeyError(f"unknown code {name!r}; known: {', '.join(self.names())}") from None


def resolve_seed(spec: str, registry: Registry | None = None, kinds: str | None = None) -> SeedTransform:
    """A registry name, or an inline ``n,k,m:d1,d2,...`` definition."""
    registry = registry or Registry()
    if spec in registry:
        seed = registry.get(spec)
    elif ":" in spec:
        head, _, body = spec.partition(":")
        try:
            n, k, m = (int(t) for t in head.split(","))
            decimals = [int(t) for t in body.split(",")]
        except ValueError:
            raise ValueError(f"cannot parse inline code {spec!r}; expected 'n,k,m:d1,d2,...'") from None
        seed = SeedTransform.from_decimals(decimals, n, k, m, kinds or ",".join("a" * (n - k)))
        return seed
    else:
        seed = registry.get(spec)
    if kinds is not None:
        seed = SeedTransform(seed.n, seed.k, seed.m, seed.matrix, kinds)
    return seed
