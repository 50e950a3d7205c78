import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from plspath.ingest import (DataError, Dataset, IndicatorDef, IndicatorRegistry, impute_missing,
                            load_dataset, normalize_shares, parse_dataset, standardize,
                            standardize_array, write_dataset)

from .conftest import make_dataset


def test_default_registry_matches_catalogue(registry):
    assert len(registry.codes) == 20
    counts = {c: len(registry.by_construct()[c]) for c in ("DI", "DPS", "DS", "GINI", "SDGI")}
    assert counts == {"DI": 4, "DPS": 6, "DS": 8, "GINI": 1, "SDGI": 1}
    assert registry["Q3-7"].unit == "count"
    assert registry["GINI"].unit == "index"


def test_registry_rejects_duplicates():
    d = IndicatorDef("A", "X", "a", "percentage")
    with pytest.raises(DataError):
        IndicatorRegistry((d, d))


def test_registry_rejects_unknown_unit():
    with pytest.raises(DataError):
        IndicatorDef("A", "X", "a", "ratio")


def test_fixture_loads_27_by_20(fixture_data):
    assert fixture_data.shape == (27, 20)
    assert fixture_data.missing.sum() == 2


def test_empty_file_is_rejected(registry):
    with pytest.raises(DataError, match="no rows"):
        parse_dataset("", registry)


def test_duplicate_country_by_name(registry):
    text = "country,Q1-1\nFinland,1\nFI,2\n"
    with pytest.raises(DataError, match="duplicate country"):
        parse_dataset(text, registry)


def test_unknown_code_and_bad_cell(registry):
    with pytest.raises(DataError):
        parse_dataset("country,Q9-9\nFI,1\n", registry)
    with pytest.raises(DataError):
        parse_dataset("country,Q1-1\nFI,abc\n", registry)


def test_missing_tokens(registry):
    d = parse_dataset("country,Q1-1,Q1-2\nFI,:,3\nSE,2,\n", registry)
    assert d.missing.tolist() == [[True, False], [False, True]]


def test_round_trip(tmp_path, fixture_data, registry):
    p = tmp_path / "d.csv"
    write_dataset(fixture_data, p)
    assert load_dataset(p, registry) == fixture_data


def test_impute_column_mean():
    d = make_dataset([[2.0], [np.nan], [4.0]])
    out = impute_missing(d)
    assert out.values[:, 0].tolist() == [2.0, 3.0, 4.0]
    assert not out.missing.any()
    assert out.imputed == [("C001", "V0", 3.0)]


def test_impute_identity_and_all_missing():
    d = make_dataset([[1.0, 2.0], [3.0, 4.0]])
    assert impute_missing(d) == d
    with pytest.raises(DataError):
        impute_missing(make_dataset([[np.nan], [np.nan]]))


@settings(max_examples=50, deadline=None)
@given(arrays(float, (8, 3), elements=st.floats(-100, 100)), st.lists(st.tuples(st.integers(0, 7), st.integers(0, 2)), max_size=6))
def test_impute_preserves_observed_cells_and_means(vals, holes):
    vals = vals.copy()
    for i, j in holes:
        vals[i, j] = np.nan
    d = make_dataset(vals)
    out = impute_missing(d)
    obs = ~d.missing
    assert np.array_equal(out.values[obs], d.values[obs])
    for j in range(3):
        col = d.values[obs[:, j], j]
        assert out.values[:, j].mean() == pytest.approx(col.mean(), abs=1e-9)


def test_standardize_example():
    z, _, _ = standardize_array(np.array([[1.0], [2.0], [3.0]]))
    assert z[:, 0].tolist() == pytest.approx([-1.0, 0.0, 1.0])


def test_standardize_constant_column():
    with pytest.raises(DataError, match="zero variance"):
        standardize(make_dataset([[5.0], [5.0], [5.0]]))


@settings(max_examples=50, deadline=None)
@given(arrays(float, (10, 4), elements=st.floats(-1e3, 1e3)))
def test_standardize_moments_and_idempotence(vals):
    sd = vals.std(axis=0, ddof=1)
    if (sd < 1e-3).any():
        return
    x = standardize(make_dataset(vals))
    assert np.abs(x.values.mean(axis=0)).max() < 1e-10
    assert np.abs(x.values.std(axis=0, ddof=1) - 1).max() < 1e-10
    again = standardize(x)
    assert np.abs(again.values - x.values).max() < 1e-10


def test_normalize_shares_examples(registry):
    d = Dataset(["A", "B", "C"], ["Q1-1", "Q3-7"], np.array([[59.0, 10.0], [100.0, 20.0], [0.0, 30.0]]),
                np.zeros((3, 2), bool))
    out = normalize_shares(d, registry)
    assert out["Q1-1"].tolist() == pytest.approx([0.59, 1.0, 0.0])
    assert out["Q3-7"].tolist() == pytest.approx([0.0, 0.5, 1.0])


def test_normalize_shares_errors(registry):
    bad = Dataset(["A", "B"], ["Q1-1"], np.array([[101.0], [5.0]]), np.zeros((2, 1), bool))
    with pytest.raises(DataError):
        normalize_shares(bad, registry)
    const = Dataset(["A", "B"], ["GINI"], np.array([[30.0], [30.0]]), np.zeros((2, 1), bool))
    with pytest.raises(DataError):
        normalize_shares(const, registry)


@settings(max_examples=50, deadline=None)
@given(pct=arrays(float, (6, 2), elements=st.floats(0, 100)), idx=arrays(float, (6,), elements=st.floats(-50, 500)))
def test_normalize_shares_in_unit_interval(pct, idx, registry):
    if np.ptp(idx) == 0:
        return
    vals = np.column_stack([pct, idx])
    d = Dataset([f"C{i}" for i in range(6)], ["Q1-1", "Q1-2", "GINI"], vals, np.zeros((6, 3), bool))
    out = normalize_shares(d, registry).to_numpy()
    assert out.min() >= 0 and out.max() <= 1
