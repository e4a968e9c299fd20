import pytest

from hypeq import catalog
from hypeq.classifier import classify
from hypeq.darboux import f_from_theta
from hypeq.errors import UnknownName
from hypeq.expr import SamplerConfig, is_zero, normalize, parse, render
from hypeq.transforms import invert_point


@pytest.mark.parametrize("entry", catalog.entries(), ids=catalog.names())
def test_golden_labels(entry):
    assert classify(entry.f).label == entry.label


def test_get():
    wave = catalog.get("wave")
    assert render(wave.f) == "0" and wave.label == "Hxy"
    assert render(catalog.get("liouville").f) == "exp(u)"
    with pytest.raises(UnknownName):
        catalog.get("kdv")


def test_log_wave_theta():
    entry = catalog.get("log-wave")
    assert is_zero(normalize(f_from_theta(entry.darboux["theta"]) - entry.f)).proven_zero


def test_templates_deterministic():
    a = catalog.point_transform_templates(seed=5, n=20)
    b = catalog.point_transform_templates(seed=5, n=20)
    assert [t.to_json() for t in a] == [t.to_json() for t in b]
    assert [t.to_json() for t in a] != [t.to_json() for t in catalog.point_transform_templates(seed=6, n=20)]
    assert catalog.point_transform_templates(n=0) == []


def test_templates_nondegenerate_and_invertible():
    config = SamplerConfig(box=(-1.0, 1.0))
    for t in catalog.point_transform_templates(seed=42, n=100):
        assert t.nondegeneracy(config).proven_nonzero, t.name
        invert_point(t)


def test_swapped_templates():
    ts = catalog.point_transform_templates(seed=1, n=40, swap_rate=0.5)
    assert any(t.swap for t in ts) and not all(t.swap for t in ts)


def test_catalog_json_round_trip():
    data = catalog.to_json()
    assert [e["name"] for e in data["equations"]] == catalog.names()
    assert len(data["theta_templates"]) == 20 and len(data["gauge_templates"]) == 10


def test_swapped_templates_exchange_primed_labels():
    from hypeq.classifier import swapped_label
    from hypeq.transforms import apply_point_equivalence, target_in_source_names

    swapped = [t for t in catalog.point_transform_templates(seed=3, n=12, swap_rate=0.5) if t.swap][:4]
    for t in swapped:
        for name in ("quasilinear-x", "log-wave", "liouville"):
            entry = catalog.get(name)
            target = apply_point_equivalence(t, entry.f).target
            assert classify(target_in_source_names(target)).label == swapped_label(entry.label)
