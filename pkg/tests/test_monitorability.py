import pytest

from hypermon.families import eq, implication_ae
from hypermon.formula import parse_formula
from hypermon.monitorability import Reason, Result, classify_model_support


@pytest.mark.parametrize("text,result,reason", [
    ("forall p. exists q. G (a[p] -> b[q])", Result.NOT_MONITORABLE, Reason.ALTERNATING),
    ("forall p. G F a[p]", Result.NOT_MONITORABLE, Reason.DEAD_REGION),
    ("forall p. forall q. G (a[p] <-> a[q])", Result.MONITORABLE, Reason.BAD_REACHABLE_EVERYWHERE),
    ("exists p. F a[p]", Result.MONITORABLE, Reason.GOOD_REACHABLE_EVERYWHERE),
    ("forall p. true", Result.MONITORABLE, Reason.BODY_VALID),
    ("exists p. a[p] & !a[p]", Result.MONITORABLE, Reason.BODY_UNSATISFIABLE),
    ("exists p. G a[p]", Result.NOT_MONITORABLE, Reason.DEAD_REGION),
    ("forall p. exists q. F a[q]", Result.UNSUPPORTED, Reason.ALTERNATING),
])
def test_unbounded(text, result, reason):
    r = classify_model_support(parse_formula(text))
    assert (r.result, r.reason) == (result, reason)


def test_other_models_unsupported():
    for model in ("bounded", "parallel"):
        r = classify_model_support(implication_ae(), model, 3)
        assert r.result is Result.UNSUPPORTED and r.reason is Reason.MODEL_UNSUPPORTED
    with pytest.raises(ValueError):
        classify_model_support(eq(), "nowhere")


def test_describe():
    text = classify_model_support(parse_formula("forall p. G F a[p]")).describe()
    assert text.splitlines()[0] == "result: NotMonitorable"
    assert "state" in text
