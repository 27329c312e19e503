"""Smoke test for the monolab_py extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import monolab_py as m


def main():
    names = m.catalog_names()
    assert "example35_sum" in names and len(names) == 13

    ident = m.Operator.catalog("identity")
    half = m.Operator.catalog("normal_cone_halfline")
    s = ident + half
    assert s.dim == 1 and s.contains([0.0], [-1.0])

    v = m.minty_local_probe(s, [0.0], [-1.0])
    assert v["status"] == "PASS", v

    xs, continuum = m.resolvent_solve(half, 1.0, [-2.0], [0.0], [0.0], radius=3.0)
    assert xs == [[0.0]] and not continuum

    ex = m.Operator.catalog("example35_sum")
    a = m.type_a_witness_search(ex, [0.0, 0.0], [0.0, 0.0])
    assert a["status"] == "FAIL" and a["witness"]["kind"] == "extension"
    p = m.psd_criterion(ex, [0.0, 0.0], [0.0, 0.0])
    assert p["witness"]["w"] == [1.0, 0.0] and p["witness"]["value"] == -1.0

    lin = m.Operator.linear([["2", "0"], ["0", "5"]])
    sigma = m.supremal_psd_sigma(lin, [0.0, 0.0], [0.0, 0.0])
    assert abs(sigma - 2.0) < 1e-6, sigma

    neg = m.Operator.linear([["-1/2"]]).localize([0.0], [0.0], 1.0)
    ell = m.transvected_lipschitz(neg, [0.0], [0.0], 1.0)
    assert ell <= 2.0 + 1e-6, ell

    j = m.NormSpec(3.0, [1.0, 2.0]).duality_map([1.0, -1.0])
    assert len(j) == 2

    report = m.run("[operator A]\ncatalog = identity\n\n[analysis]\nrun = isc_probe\nop = A\nx = 0\nv = 0\n")
    assert report["schema"] == "monolab-report/1"
    assert report["requests"][0]["status"] == "PASS"

    try:
        m.Operator.catalog("nope")
    except ValueError as e:
        assert "UNKNOWN_NAME" in str(e)
    else:
        raise AssertionError("unknown name accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
