import logging

import pytest

from qtc.registry import BUILTIN_CODES, Registry, RegistryError, parse_registry, resolve_seed

OUTER = " ".join(map(str, BUILTIN_CODES["opt-outer"][4]))


def test_builtins(registry):
    s = registry.get("opt-inner")
    assert (s.n, s.k, s.m) == (3, 1, 3) and s.ancilla_kinds == ("e", "e")
    assert registry.get("opt-outer").ancilla_kinds == ("a", "a")
    with pytest.raises(KeyError, match="known"):
        registry.get("nope")


def test_parse_with_comments():
    codes = parse_registry(f"# header\nmine 3 1 3 a,a {OUTER}  # trailing\n\n")
    assert list(codes) == ["mine"]


def test_eleven_rows_is_an_error():
    short = " ".join(OUTER.split()[:11])
    with pytest.raises(RegistryError) as exc:
        parse_registry(f"\nbad 3 1 3 a,a {short}\n", "codes.txt")
    assert exc.value.line == 2 and "codes.txt:2" in str(exc.value)


def test_non_symplectic_reports_rows():
    vals = OUTER.split()
    vals[0] = str(int(vals[0]) ^ 1)
    with pytest.raises(RegistryError, match="rows"):
        parse_registry(f"bad 3 1 3 a,a {' '.join(vals)}")


def test_non_integer():
    with pytest.raises(RegistryError):
        parse_registry("x 3 one 3 a,a 1 2")


def test_duplicate_overrides_with_warning(tmp_path, caplog):
    f = tmp_path / "r.txt"
    f.write_text(f"opt-inner 3 1 3 e,e {OUTER}\n")
    with caplog.at_level(logging.WARNING):
        reg = Registry([f])
    assert reg.get("opt-inner").to_decimals() == BUILTIN_CODES["opt-outer"][4]
    assert "overrides" in caplog.text


def test_env_registry(tmp_path, monkeypatch):
    f = tmp_path / "r.txt"
    f.write_text(f"envcode 3 1 3 a {OUTER}\n")
    monkeypatch.setenv("QTC_REGISTRY", str(f))
    assert "envcode" in Registry()


def test_resolve_inline_and_kinds(registry):
    s = resolve_seed("3,1,3:" + OUTER.replace(" ", ","), registry)
    assert s.to_decimals() == BUILTIN_CODES["opt-outer"][4]
    assert resolve_seed("opt-inner", registry, "a,a").ancilla_kinds == ("a", "a")
    with pytest.raises(ValueError):
        resolve_seed("3,1:1,2", registry)
