import json

import pytest
from hypothesis import given, settings, strategies as st

from heckelab.cache import EnumerationCache, MemoryCache, decode, encode, key_json
from heckelab.finmod import RingCtx, canonicalize
from heckelab.lagrange import HeckeType
from heckelab.poly import P, LaurentPoly
from heckelab.report import Check, VerificationReport


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.lists(st.integers(0, 3), min_size=4, max_size=4), max_size=4), max_size=6))
def test_encode_decode_roundtrip(gen_sets):
    ctx = RingCtx(2, 2)
    subs = [canonicalize(g, ctx, 4) for g in gen_sets]
    key = key_json(2, 2, HeckeType("Tpi", 1))
    assert decode(encode(key, subs), key) == subs


def test_cache_hit_is_identical(tmp_path):
    c = EnumerationCache(tmp_path)
    a = c.load_or_enumerate(2, 3, HeckeType("Tp"))
    assert (c.hits, c.misses) == (0, 1)
    c2 = EnumerationCache(tmp_path)
    b = c2.load_or_enumerate(2, 3, HeckeType("Tp"))
    assert c2.hits == 1 and a == b
    st_rows = c2.status()
    assert st_rows[0]["records"] == 40 and st_rows[0]["ok"]


def test_corrupt_file_is_regenerated(tmp_path):
    c = EnumerationCache(tmp_path)
    ht = HeckeType("Tp")
    a = c.load_or_enumerate(2, 2, ht)
    path = c.path_for(key_json(2, 2, ht))
    path.write_bytes(path.read_bytes()[:-3])
    c2 = EnumerationCache(tmp_path)
    assert c2.get(2, 2, ht) is None
    assert c2.load_or_enumerate(2, 2, ht) == a
    assert c2.get(2, 2, ht) == a


def test_wrong_version_ignored(tmp_path):
    c = EnumerationCache(tmp_path)
    ht = HeckeType("Tp")
    c.load_or_enumerate(1, 2, ht)
    path = c.path_for(key_json(1, 2, ht))
    data = bytearray(path.read_bytes())
    data[5] = 99
    path.write_bytes(bytes(data))
    assert EnumerationCache(tmp_path).get(1, 2, ht) is None


def test_purge(tmp_path):
    c = EnumerationCache(tmp_path / "none")
    assert c.purge() == 0
    c = EnumerationCache(tmp_path)
    c.load_or_enumerate(1, 3, HeckeType("Tp"))
    assert c.purge() == 1
    assert c.status() == []


def test_memory_cache():
    m = MemoryCache()
    a = m.load_or_enumerate(2, 2, HeckeType("Tp"))
    b = m.load_or_enumerate(2, 2, HeckeType("Tp"))
    assert a is b and m.hits == 1


def test_report_roundtrip_and_pass_flag():
    r = VerificationReport("x", {"p": [2]})
    r.check("a", 1, 1, "PAPER", "(A2.3)")
    r.check("b", {"k": (1, 2)}, {"k": [1, 2]}, "DERIVED")
    assert r.passed
    r.check("c", 1, 2, "TRIVIAL")
    assert not r.passed and [c.name for c in r.failures()] == ["c"]
    again = VerificationReport.from_json(r.to_json())
    assert again.to_dict() == r.to_dict()
    assert json.loads(r.to_json())["passed"] is False


def test_check_rejects_unknown_tag():
    with pytest.raises(ValueError):
        Check("x", 1, 1, True, "GUESS")


def test_laurent_poly_basics():
    f = P**3 - 1
    assert f(2) == 7
    assert (P**-1)(2) == pytest.approx(0.5) and str(P**-1) == "p^-1"
    assert ((P**2 - 1) * P**-3).eval_mod(8, 9) == 0
    assert (P**6 - 1).divexact(P**2 - 1) == P**4 + P**2 + 1
    with pytest.raises(ValueError):
        (P**2 + 1).divexact(P + 1)
    assert LaurentPoly(0) == 0
    assert str(P**6 + 2 * P**5 - 2 * P**2) == "p^6 + 2*p^5 - 2*p^2"
