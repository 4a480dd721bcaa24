"""Smoke test for the pyhypnorm extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

from fractions import Fraction

import pyhypnorm as h


def main():
    f2 = h.Presentation("F2")
    assert f2.generators == "ab" and f2.relators == [] and f2.strategy == "free"
    assert f2.free_reduce("abBA") == ""

    m = h.Metric(f2)
    assert m.element_length("aabBA") == 1
    assert m.cyclically_reduce("baaB") == ("baaB", "aa", "b")
    assert len(m.ball(2)) == 17
    assert h.free_stable_norm(f2, "abA") == 1

    est = m.stable_norm("abA", terms=10)
    assert est.upper == Fraction(6, 5) and est.lower <= 1

    c = h.Constants.from_delta(0)
    assert (c.k, c.lam, c.eps) == (2, 1, 0)
    cert = m.certificate(c)
    assert cert.n_max == 2 and cert.k_bound == 1
    assert cert.report().endswith("nmax=2\nK=1\n")
    lower, method = m.lower_bound("abab", c)
    assert lower >= 1, (lower, method)

    lines = m.verify(c, terms=10, seed=7)
    assert not any(line.startswith("FAIL") for line in lines), lines

    s = h.Presentation("surface2")
    assert s.certified and s.is_identity("abABcdCD")
    assert s.dehn_reduce("abABc") == "dcD"
    sm = h.Metric(s, rmax=4)
    assert len(sm.ball(1)) == 9
    assert sm.element_length("abABc") == 3
    assert h.Metric(s).cyclically_reduce("cabAC")[1:] == ("b", "ca")

    custom = h.Presentation.parse("generators: ab\nrelators: aaa\n")
    assert not custom.certified
    try:
        h.Metric(custom)
    except h.HypnormError:
        pass
    else:
        raise AssertionError("uncertified presentation accepted")

    try:
        f2.free_reduce("ax")
    except ValueError as e:
        assert "unknown letter" in str(e)
    else:
        raise AssertionError("bad letter accepted")

    print("pyhypnorm smoke test: ok")


if __name__ == "__main__":
    main()
