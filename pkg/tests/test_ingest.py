import hashlib

import numpy as np
import pytest

from conftest import PING_PONG, columns
from models.count_models import CountModel
from models.ingest_models import MatchRecord
from services import ingest_utils
from services.error_handler import InputFileError, ParseError, ValidationError
from services.expression_parser import parse_ast, parse_expression, render
from services.grid_io import parse_grid, write_grid
from services.ingest_utils import export_model, import_model, load_model
from services.match_ingest import comparison_graph_connected, from_matches, read_matches
from services.sanitization_service import sanitization_service

PLAYBOARD_UNSIMPLIFIED = (
    "x1^17*x2^29*x3^24*x4^15*(x1+x2)^12*(x3+x4)^8*(x1+x3)^24*(x2+x4)^20"
    " * x2^8*x3^14/(x2+x3)^22 * x2^4*x4^2/(x2+x4)^6 * x1^5/(x1+x4)^5 * x1*x3^2/(x1+x3+x4)^3"
)

PLAYBOARD_GRID = """\
# ionic counts, then one row per pattern
23,41,40,17
1,1,0,0,12
0,0,1,1,8
1,0,1,0,24
0,1,0,1,14
0,1,1,0,-22
1,0,0,1,-5
1,0,1,1,-3
"""


# ---------------- expressions ----------------
def test_parse_intro_expression(intro_model):
    assert parse_expression("x1^2*x2^2*x3^2*(x1+x2)^4") == intro_model


def test_parse_unsimplified_playboard(playboard_model):
    assert parse_expression(PLAYBOARD_UNSIMPLIFIED) == playboard_model


def test_implicit_products_and_double_star(intro_model):
    assert parse_expression("x1**2 x2**2 x3**2 (x1 + x2)**4") == intro_model


def test_named_ions_in_order_of_appearance():
    model = parse_expression("a^2*b^3*c^4*d^5/((a+b)^4*(c+d)^6)")
    assert model.ions == ("a", "b", "c", "d")
    np.testing.assert_array_equal(model.b_vec, [-4, -6])
    np.testing.assert_array_equal(model.delta_matrix, columns("1100", "0011"))


def test_single_ion_is_not_a_model():
    with pytest.raises(ValidationError):
        parse_expression("x1")


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as e:
        parse_expression("x1^2*x2^^3")
    assert e.value.position == 7


def test_empty_expression():
    with pytest.raises(ParseError):
        parse_expression("   # nothing here")


def test_repeated_ion_inside_a_sum():
    with pytest.raises(ParseError):
        parse_expression("x1*x2*(x1+x1)^2")


def test_zero_exponent_is_dropped():
    ast = parse_ast("x1^2*x2^0*x3*(x1+x2)")
    assert ast.ions == ("x1", "x2", "x3")
    assert [f.ions for f in ast.factors] == [(0,), (2,), (0, 1)]


def test_cancelling_factors_are_merged_away():
    model = parse_expression("x1^2*x2*(x1+x2)^3/(x2+x1)^3*(x1+x2)")
    np.testing.assert_array_equal(model.a_vec, [2, 1])
    np.testing.assert_array_equal(model.b_vec, [1])


def test_unicode_expression(intro_model):
    assert parse_expression("x₁²·x₂²·x₃² × (x₁+x₂)⁴") == intro_model
    negated = parse_expression("x₁²x₂³x₃⁵(x₁+x₂)⁻⁴")
    np.testing.assert_array_equal(negated.b_vec, [-4])


def test_sanitizer_rejects_control_characters():
    with pytest.raises(ValidationError):
        sanitization_service.sanitize_expression("x1\x07*x2")


def test_sanitize_identifier():
    assert sanitization_service.sanitize_identifier("  Team A<b>") == "TeamAb"
    assert sanitization_service.sanitize_identifier(None) == ""


@pytest.mark.parametrize("fixture", ["intro_model", "playboard_model", "abcd_model", "pi1_model"])
def test_render_reads_back(fixture, request):
    model = request.getfixturevalue(fixture)
    assert parse_expression(render(model)) == model


# ---------------- grids ----------------
def test_parse_grid(playboard_model):
    assert parse_grid(PLAYBOARD_GRID) == playboard_model


def test_parse_tab_grid(intro_model):
    assert parse_grid("2\t2\t2\n1\t1\t0\t4\n") == intro_model


def test_header_only_grid(multinomial_model):
    assert parse_grid("3,7\n") == multinomial_model


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2,2,2\n1,1,4\n",
        "2,2,2\n1,2,0,4\n",
        "2,2,2\n1,1,0,zero\n",
        "2,x,2\n1,1,0,4\n",
        "2,2,2\n1,1,0,0\n",
    ],
)
def test_bad_grids(text):
    with pytest.raises(ValidationError):
        parse_grid(text)


def test_write_grid_reads_back(playboard_model):
    assert parse_grid(write_grid(playboard_model)) == playboard_model
    assert parse_grid(write_grid(playboard_model, delimiter="\t")) == playboard_model


# ---------------- matches ----------------
def test_ping_pong_matches():
    model = from_matches(read_matches(PING_PONG))
    assert model.ions == ("A", "B", "C", "D", "E")
    np.testing.assert_array_equal(model.a_vec, [61, 41, 45, 61, 41])
    np.testing.assert_array_equal(model.b_vec, [-37, -39, -40, -52, -42, -39])
    np.testing.assert_array_equal(model.pattern(0), [1, 1, 0, 0, 0])


def test_shutout_match():
    model = from_matches(read_matches("A,B,1,0\n"))
    np.testing.assert_array_equal(model.a_vec, [1, 0])
    np.testing.assert_array_equal(model.b_vec, [-1])


def test_repeated_pairing_is_merged():
    model = from_matches(read_matches("A,B,3,1\n# rematch\nB,A,2,2\n"))
    np.testing.assert_array_equal(model.a_vec, [5, 3])
    np.testing.assert_array_equal(model.b_vec, [-8])


def test_comparison_graph_connectivity():
    assert comparison_graph_connected(read_matches(PING_PONG))
    assert not comparison_graph_connected(read_matches("A,B,1,0\nC,D,0,1\n"))


@pytest.mark.parametrize("text", ["", "A,B,1\n", "A,B,x,1\n", "A,A,1,1\n", "A,B,0,0\n", "A,B,-1,2\n"])
def test_bad_matches(text):
    with pytest.raises(ValidationError):
        read_matches(text)


def test_match_record_total():
    assert MatchRecord(player_i="A", player_j="B", score_i=21, score_j=16).total == 37


# ---------------- files ----------------
def test_load_model_returns_digest(tmp_path, playboard_model):
    path = tmp_path / "playboard.csv"
    path.write_text(PLAYBOARD_GRID)
    model, digest = load_model(path, "grid")
    assert model == playboard_model
    assert digest == hashlib.sha256(PLAYBOARD_GRID.encode()).hexdigest()


def test_load_model_expression(tmp_path, intro_model):
    path = tmp_path / "intro.txt"
    path.write_text("# intro kernel\nx1^2*x2^2*x3^2\n*(x1+x2)^4\n")
    assert load_model(path, "expr")[0] == intro_model


def test_load_model_rejects_unknown_format(tmp_path):
    path = tmp_path / "model.txt"
    path.write_text("x1*x2")
    with pytest.raises(ValidationError):
        load_model(path, "xlsx")


def test_missing_file(tmp_path):
    with pytest.raises(InputFileError):
        load_model(tmp_path / "absent.txt", "expr")


def test_empty_and_binary_files(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_bytes(b"")
    binary = tmp_path / "binary.txt"
    binary.write_bytes(b"x1^2\x00x2")
    for path in (empty, binary):
        with pytest.raises(InputFileError):
            load_model(path, "expr")


def test_oversized_file(tmp_path, monkeypatch):
    monkeypatch.setattr(ingest_utils, "MAX_INPUT_BYTES", 8)
    path = tmp_path / "big.txt"
    path.write_text("x1^2*x2^2*x3^2*(x1+x2)^4")
    with pytest.raises(InputFileError):
        load_model(path, "expr")


def test_non_utf8_file(tmp_path):
    path = tmp_path / "latin.txt"
    path.write_bytes("x1*\xe9".encode("latin-1"))
    with pytest.raises(InputFileError):
        load_model(path, "expr")


# ---------------- structured export ----------------
def test_export_import(abcd_model, tmp_path):
    text = export_model(abcd_model)
    assert import_model(text) == abcd_model

    path = tmp_path / "abcd.json"
    path.write_text(text)
    assert load_model(path, "json")[0] == abcd_model


@pytest.mark.parametrize(
    "text",
    [
        "{not json",
        '{"n": 1, "ions": ["x1"], "a": [1.0], "b": [], "delta": [[]]}',
        '{"n": 3, "ions": ["x1", "x2"], "a": [1.0, 1.0], "b": [], "delta": [[], []]}',
    ],
)
def test_import_rejects_bad_documents(text):
    with pytest.raises(ValidationError):
        import_model(text)


def test_model_from_document_validates_patterns():
    with pytest.raises(ValidationError):
        import_model('{"n": 2, "ions": ["x1", "x2"], "a": [1.0, 1.0], "b": [2.0], "delta": [[1], [2]]}')
    assert isinstance(
        import_model('{"n": 2, "ions": ["x1", "x2"], "a": [1.0, 1.0], "b": [], "delta": [[], []]}'),
        CountModel,
    )
