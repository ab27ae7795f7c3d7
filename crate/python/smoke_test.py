"""Smoke test for the repgrowth_py extension.

Build first:  pip install --no-build-isolation -e crates/py
"""

import json

import repgrowth_py as rg


def main():
    for d in (3, 4, 5):
        assert rg.GroupSpec.sl2_primes(d).abscissa() == str(3 * d - 4)

    psl7 = rg.GroupSpec.a1(7)
    zeta = psl7.truncated_zeta("8")
    assert zeta.exact_entries() == [("1", "1"), ("3", "2"), ("6", "1"), ("7", "1"), ("8", "1")]
    assert zeta.backend == "exact"
    assert abs(zeta.evaluate(0.0) - 6.0) < 1e-12

    assert dict(rg.degree_table(5)) == {1: 1, 2: 2, 3: 2, 4: 2, 5: 1, 6: 1}
    assert rg.rho0("A", 2) == "2/3"

    fixed = rg.build_fixed_type("3/2", "A", 2, 5)
    again = rg.GroupSpec.from_json(fixed.to_json())
    assert again == fixed and again.abscissa() == "3/2"
    assert rg.termwise_test("2", "A", 1, "9/4") == "converges"
    assert rg.termwise_test("2", "A", 1, "7/4") == "diverges"

    spec, cert = rg.build_diagonal("2", stages=3)
    assert spec.abscissa() == "2"
    stages = json.loads(cert)["stages"]
    assert all(c["status"] == "pass" for s in stages for c in s["checks"])

    counts = json.loads(rg.generator_counts("A5", 2))
    assert counts["phi"]["2"] == "2280" and counts["aut"] == 120
    assert rg.min_generators_power("A5", "60") == 3

    assert json.loads(psl7.union(rg.GroupSpec.sl2_primes(3)).prg_json())["verdict"] == "PRG"
    assert rg.GroupSpec.sl2_primes(3).m_n("3") == "228"

    try:
        rg.GroupSpec.from_json('{"strata":[{"index":"finite","factors":[{"q":2}]}]}')
    except ValueError as e:
        assert "Tits" in str(e)
    else:
        raise AssertionError("q = 2 must be rejected")

    print("smoke test passed")


if __name__ == "__main__":
    main()
