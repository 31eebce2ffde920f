"""Smoke test for the qheis extension module.

Build with `cargo build --release -p qheis-py`, copy
target/release/libqheis.so to qheis.so somewhere on PYTHONPATH, then run
this script.
"""

import json

import qheis
from qheis import Expression, PolyFunction, Presentation


def main():
    plane = Presentation("qplane")
    assert str(plane.normalize(Expression("x[2] ox x[1]"))) == "q * (x[1] ox x[2])"
    assert str(qheis.normalize(Expression("x[1] ox p[1]"), "qheis2")) == "i*hbar + q * (p[1] ox x[1])"

    heis = Presentation("qheis-f")
    assert heis.check(Expression("x[1] ox x[2]"), Expression("q^-1 * (x[2] ox x[1])")).is_zero()
    assert all(r.is_zero() for (_, _, _, r) in Presentation("manin-word").critical_pairs(3))
    bound = heis.with_param("Q[j,k] = q")
    assert str(bound.normalize(Expression("x[1] ox p[2]"))) == "q * (p[2] ox x[1])"

    x1, x2 = Expression("x[1]"), Expression("x[2]")
    t = x1.tensor(x2) - 2 * x2.tensor(x1)
    assert t.degree() == 2
    assert Expression.from_json(t.to_json()) == t
    assert json.loads(t.to_json())[0]["slot1"][0]["kind"] == "x"

    f = PolyFunction("x1*E[1] - x2*E[2]", dim=2)
    ok, witness = f.is_monogenic()
    assert ok and witness.is_zero()
    ok, witness = PolyFunction("x1*E[1] + x2*E[2]").is_monogenic()
    assert not ok and str(witness) == "-2"
    assert str(PolyFunction("x1", dim=2).partial(1)) == "1"

    assert str(qheis.quantum_det()) == "a d - q * (c b)"
    assert len(qheis.plane_relations()) == 3

    (report,) = qheis.verify("lemma-f1", qjk="q", sign="as-printed")
    verdicts = {r["label"]: r["verdict"] for r in report["relations"]}
    assert verdicts["mixed, f=1 (j=k=1)"] == "nonzero"
    assert verdicts["R1, f=1 (j=1,k=2)"] == "zero"
    (theorem,) = qheis.verify("theorem-monogenic")
    assert theorem["relations"][0]["residual"] == []

    try:
        Expression("x[")
    except qheis.ParseError as e:
        assert "column 2" in str(e)
    else:
        raise AssertionError("expected a parse error")
    try:
        Presentation("no-such-preset")
    except qheis.QheisError:
        pass
    else:
        raise AssertionError("expected an unknown preset error")

    print("qheis smoke test: ok")


if __name__ == "__main__":
    main()
