"""Smoke test for the hypcompact extension module.

Build and run from the repository root:

    cargo build -p hypcompact-py --release --features extension-module
    cp target/release/libhypcompact.so python/hypcompact.so
    python3 crates/py/python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import hypcompact as hc


def close(a, b, tol=1e-9):
    return all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(a, b))


def main():
    n = 3
    h = hc.AlgebraElement.generator("H", n)
    y1 = hc.AlgebraElement.generator("Y1", n)
    g = (h.scale(0.7) + y1.scale(-0.3)).exp()
    assert g.residual() < 1e-10
    assert close(sum((g @ g.inverse()).matrix(), []), sum(hc.GroupElement.identity(n).matrix(), []))

    k = hc.ModelPoint("KleinClosed", [0.2, -0.1, 0.3])
    p = k.to_model("PoincareClosed")
    gk = hc.act_proj(g, k)
    gp = hc.act_conf(g, p)
    assert close(gk.to_model("PoincareClosed").coords, gp.coords)

    f2 = hc.ReparamMap("p=2")
    # with f(y) = y^2 the reparametrized action is the conformal one in chart coordinates
    q = k.to_model("ChartKC")
    pc = hc.ModelPoint("ChartPC", q.coords)
    assert close(hc.act_reparam(f2, g, q).coords, hc.act_conf_in_chart_pc(g, pc).coords)

    smooth = hc.classify_smoothness(hc.ReparamMap("f1"))
    assert smooth["verdict"] == {"SmoothUpTo": 5}, smooth["verdict"]
    bad = hc.classify_smoothness(hc.ReparamMap("f2"))
    assert bad["verdict"] == {"DivergesAtOrder": 3}, bad["verdict"]

    ends = hc.endpoints_under(f2, [0.0, 0.0, -1.0], [0.0, 0.0, 1.0])
    assert ends["start"]["converged"] and ends["end"]["converged"]

    holder = hc.conjugacy_exponent("proj", "conf", n=2, pairs=200, seed=1)
    assert abs(holder["exponent"] - 0.5) < 0.05, holder["exponent"]

    field = hc.PolyVectorField("y d/dy", n)
    back = field.pullback(3)
    assert str(back) == "(1/3) y d/dy", str(back)
    assert hc.PolyVectorField("d/dy", n).pullback(2).first_non_analytic() == "y^-1 d/dy"

    try:
        hc.ReparamMap("p=0")
    except ValueError:
        pass
    else:
        raise AssertionError("p=0 accepted")

    print("hypcompact", hc.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
