import pytest

from weylflow.schemas import RealizationSpecModel, SpecError
from weylflow.series import GradedSeries
from weylflow.specfile import load_spec_file, parse_spec_text, spec_to_toml

GOOD = """
dimension = 2
metric = [1, -1]
kmax = 3

[[phi]]
row = 0
col = 0
expr = "p_0^2"

[[phi]]
row = 1
col = 0
expr = "1/2 * p_1"

[[chi]]
index = 1
expr = "p_0"
"""


def test_parse_happy_path():
    spec = parse_spec_text(GOOD)
    assert spec.dimension == 2
    assert spec.metric == [1, -1]
    assert spec.kmax == 3
    assert spec.pmax is None
    assert spec.phi[0][0] == "p_0^2"
    assert spec.phi[0][1] == "0"
    assert spec.chi == ["0", "p_0"]


def test_to_realization():
    r = parse_spec_text(GOOD).to_realization()
    assert r.n == 2
    assert r.metric == (1, -1)
    p0 = GradedSeries.p_var(2, 0, 0)
    assert r.phi[0][0] == p0 * p0
    assert r.phi[1][1].is_zero
    assert r.chi[1] == p0


def test_expression_error_carries_location():
    text = GOOD.replace('"p_0^2"', '"p_0 + p_9"')
    with pytest.raises(SpecError) as info:
        parse_spec_text(text).to_realization()
    assert info.value.where == "phi[0][0]"
    assert info.value.offset == 6


@pytest.mark.parametrize(
    "mutation, fragment",
    [
        ("dimension = 2", "dimension = 0"),
        ("metric = [1, -1]", "metric = [1, 2]"),
        ("metric = [1, -1]", "metric = [1]"),
        ("kmax = 3", "kmax = 99"),
        ("row = 0", "row = 5"),
        ("index = 1", "index = 9"),
        ("row = 0", "row = true"),
    ],
)
def test_invalid_specs_rejected(mutation, fragment):
    with pytest.raises(SpecError):
        parse_spec_text(GOOD.replace(mutation, fragment))


def test_duplicate_entries_rejected():
    text = GOOD + "\n[[chi]]\nindex = 1\nexpr = \"p_0\"\n"
    with pytest.raises(SpecError) as info:
        parse_spec_text(text)
    assert "duplicate" in info.value.message


def test_unknown_keys_rejected():
    with pytest.raises(SpecError):
        parse_spec_text(GOOD + "\nextra = 1\n")
    with pytest.raises(SpecError):
        parse_spec_text(GOOD.replace("col = 0", "col = 0\nmystery = 2", 1))


def test_missing_required_keys():
    with pytest.raises(SpecError):
        parse_spec_text("metric = [1]\n")
    with pytest.raises(SpecError):
        parse_spec_text("dimension = 1\n")


def test_not_toml_at_all():
    with pytest.raises(SpecError) as info:
        parse_spec_text("dimension = = 1")
    assert info.value.kind == "toml"


def test_round_trip_through_toml():
    spec = parse_spec_text(GOOD)
    again = parse_spec_text(spec_to_toml(spec))
    assert again == spec


def test_pmax_round_trip_and_warning():
    text = "dimension = 1\nmetric = [1]\npmax = 2\n\n[[phi]]\nrow = 0\ncol = 0\nexpr = \"p_0^3\"\n"
    spec = parse_spec_text(text)
    assert spec.pmax == 2
    from weylflow.expressions import TruncationWarning

    with pytest.warns(TruncationWarning):
        r = spec.to_realization()
    assert r.phi[0][0].is_zero
    assert parse_spec_text(spec_to_toml(spec)) == spec


def test_load_spec_file(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(GOOD, encoding="utf-8")
    assert load_spec_file(str(path)) == parse_spec_text(GOOD)
    with pytest.raises(SpecError) as info:
        load_spec_file(str(tmp_path / "missing.toml"))
    assert info.value.kind == "io"


def test_model_shape_validation_direct():
    with pytest.raises(Exception):
        RealizationSpecModel(
            dimension=2, metric=[1, 1], phi=[["0"]], chi=["0", "0"]
        )
