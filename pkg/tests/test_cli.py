import io
import json

from pytest import mark

from modules.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, CommandRequest, run
from modules.enums import OutputFormat

A2_TABLE = """\
index  coefficients  height
-----  ------------  ------
1      [0,1]         1
2      [1,0]         1
3      [1,1]         2
"""


def _run(*argv: str) -> tuple[int, str]:
    stdout = io.StringIO()
    code = run(list(argv), stdout)
    return code, stdout.getvalue()


def _json(*argv: str) -> dict:
    code, text = _run(*argv)
    assert code == EXIT_OK
    return json.loads(text)


def test_rootsys_table():
    assert _run("rootsys", "info", "--family=A", "--rank=2") == (EXIT_OK, A2_TABLE)


def test_rootsys_json():
    payload = _json("rootsys", "info", "--family=B", "--rank=2", "--format=json")
    assert payload["weyl_group_order"] == 8
    assert payload["positive_root_count"] == 4
    assert payload["family"] == "B"


def test_projective_plane_exponent():
    assert _json("flag", "exponent", "--space=projective:3") == {
        "space": "projective:3",
        "root_system": "A2",
        "theta": [2],
        "chi": [1, 0],
        "beta_X": "3/2",
        "cc_dimension": 2,
        "levels": {"1": 2},
        "counting_bound": "3/2",
        "Y": ["-2/3", "-1/3"],
    }


def test_anticanonical_default_height():
    payload = _json("flag", "exponent", "--family=A", "--rank=3")
    assert payload["space"] == "flag:A3:theta=:chi=2,2,2"
    assert payload["beta_X"] == "1/6"
    assert payload["cc_dimension"] == 6


def test_khintchine_on_grass_2_4():
    payload = _json("flag", "khintchine", "--space=grassmannian:2,4")
    assert payload == {"space": "grassmannian:2,4", "a": "4", "b": 1, "beta_X": "1", "power": "4"}

    verdict = _json("flag", "khintchine", "--space=grassmannian:2,4", "--psi=1,1/4,1")
    assert verdict["verdict"] == "Convergent"
    assert verdict["psi"] == ["1", "1/4", "1"]


def test_counting_as_csv():
    code, text = _run("flag", "counting", "--space=projective:3", "--format=csv")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "key,value"
    assert "u,3" in lines
    assert "v,1" in lines


def test_grassmannian_flag_data():
    payload = _json("schubert", "grassmann-gamma", "--space=grassmannian:2,4", "--data=1,1;4,2")
    assert payload["gamma"] == "1/3"
    assert payload["beta"] == "3/2"
    assert payload["cell_gamma"] == "1/3"
    assert payload["data"] == {"d": 4, "l": 2, "steps": [[1, 1], [4, 2]]}


def test_schubert_spectrum_rows():
    code, text = _run("schubert", "spectrum", "--space=projective:3", "--format=csv")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "w_word,gamma,beta,unstable"
    assert len(lines) == 4


def test_analyze_maps_words_to_coset_representatives():
    payload = _json("schubert", "analyze", "--space=projective:3", "--word=2")
    assert payload["w_word"] == []
    assert payload["beta"] == "inf"
    assert payload["unstable"] is True


def test_lattice_minima():
    payload = _json("lattice", "minima", "--matrix=2,0;0,3")
    assert payload["provenance"] == "exact"
    assert payload["minima"] == [2.0, 3.0]
    assert payload["vectors"] == [[1, 0], [0, 1]]
    assert payload["minkowski"]["holds"] is True


def test_orbit_csv_output():
    code, text = _run("lattice", "orbit", "--point=1/2", "--T=4", "--steps=5", "--format=csv")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "t,log_lambda_1,log_lambda_2,log_r_chi,c_1,flags"
    assert len(lines) == 6


def test_estimate_gamma_of_a_rational_point():
    payload = _json("lattice", "estimate-gamma", "--point=1/2", "--grid=10,20,30,40")
    assert payload["neg_chi_Y"] == "1/2"
    assert 0.45 < payload["gamma_sup"] < 0.5
    assert payload["beta_sup"] > 10


def test_count_points():
    assert _json("lattice", "count-points", "--space=projective:2", "--T=5")["count"] == 24
    growth = _json("lattice", "count-points", "--space=projective:2", "--grid=1,2,5")
    assert growth["counts"] == [2, 4, 24]


def test_count_solutions():
    payload = _json("lattice", "count-solutions", "--point=sqrt(2)", "--psi=1,0,0", "--grid=20,40")
    assert payload["space"] == "projective:2"
    assert payload["counts"] == sorted(payload["counts"])


@mark.parametrize(
    "argv",
    [
        ("lattice", "mc-volume", "--samples=2000", "--seed=3"),
        ("lattice", "curve-experiment", "--samples=2", "--seed=1", "--grid=1,2"),
    ],
)
def test_seeded_commands_are_deterministic(argv):
    first = _run(*argv)
    assert first[0] == EXIT_OK
    assert _run(*argv) == first


@mark.parametrize(
    "argv",
    [
        ("flag", "exponent", "--space=projective:3", "--bogus=1"),
        ("nosuch", "command"),
        ("rootsys", "info", "--family=A"),
        ("rootsys", "info", "--family=E", "--rank=6"),
        ("flag", "exponent", "--space=sphere:2"),
        ("schubert", "spectrum", "--space=quadric:2"),
        ("schubert", "grassmann-gamma", "--space=projective:3", "--data=1,1"),
        ("lattice", "minima", "--matrix=1,2;2,4"),
        ("lattice", "mc-volume", "--samples=0"),
        ("flag", "exponent", "--space=projective:3", "--format=xml"),
    ],
)
def test_usage_errors(argv):
    code, text = _run(*argv)
    assert code == EXIT_USAGE
    assert text == ""


def test_budget_exhaustion():
    code, _ = _run("lattice", "count-points", "--space=projective:4", "--T=50", "--budget=1000")
    assert code == EXIT_BUDGET


def test_request_round_trip():
    argv = ["flag", "khintchine", "--space=grassmannian:2,4", "--psi=1,1/4,1"]
    request = CommandRequest.parse(argv)
    assert request.output_format == OutputFormat.JSON
    assert request.option("psi") == "1,1/4,1"
    assert CommandRequest.parse(request.to_argv()) == request


def test_default_formats():
    assert CommandRequest.parse(["rootsys", "info", "--family=A", "--rank=2"]).output_format == OutputFormat.TABLE
    assert CommandRequest.parse(["lattice", "minima", "--matrix=1"]).output_format == OutputFormat.JSON
