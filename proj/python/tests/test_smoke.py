import pytest

import hbss


def test_presets_listed():
    assert {"moore-p", "moore-p2", "smith-toda-v"} <= set(hbss.presets())


def test_canonical_is_idempotent():
    text = hbss.canonical(hbss.preset_text("moore-p"))
    assert hbss.canonical(text) == text


def test_moore_p_report():
    report = hbss.run(preset="moore-p")
    assert list(report) == ["pages", "abutment", "certificates"]
    e2 = report["pages"][-1]
    assert e2["r"] == 2
    assert report["certificates"]["parity_collapse"]["collapsed"]
    assert report["certificates"]["abutment_compare"]["matches"]


def test_moore_p2_has_third_page():
    report = hbss.run(preset="moore-p2")
    assert [page["r"] for page in report["pages"]] == [1, 2, 3]


def test_table_mentions_pages():
    assert "E_2" in hbss.table(preset="moore-p")


def test_syntax_error_is_raised():
    with pytest.raises(hbss.SyntaxError):
        hbss.canonical("[ring\n")
    assert hbss.exit_code("") == 2


def test_non_regular_sequence():
    text = hbss.preset_text("moore-p2").replace("elements = p, v1", "elements = p, p")
    with pytest.raises(hbss.PhaseError, match="not regular"):
        hbss.run(text)
    assert hbss.exit_code(text) == 3


def test_smith_over_p_local():
    out = hbss.smith_normal_form([[3, 0], [0, 9]], 3)
    assert out["exponents"] == [1, 2]
    assert out["cokernel_torsion"] == [1, 2]
    assert out["cokernel_free_rank"] == 0


def test_smith_rational_entries():
    out = hbss.smith_normal_form([["1/2", 3]], 3)
    assert out["rank"] == 1 and out["exponents"] == [0]


def test_regularity():
    assert hbss.regularity(3, [("v1", 4)], ["p", "v1"], -4, 20)["regular"]
    assert not hbss.regularity(3, [("v1", 4)], ["p", "p"], -4, 20)["regular"]


def test_tor_ext_exterior():
    out = hbss.tor_ext(3, [("v1", 4)], ["p", "v1"], -12, 16)
    tor = {(c["s"], c["t"]): c for c in out["tor"]}
    assert sum(c["free_rank"] for c in out["tor"]) == 4
    assert tor[(1, 0)]["labels"] == ["e0"] and tor[(1, 4)]["labels"] == ["e1"]
    ext = {(c["s"], c["t"]): c["labels"] for c in out["ext"]}
    assert ext[(1, -4)] == ["f1"]


def test_bad_prime():
    with pytest.raises(hbss.ValidationError):
        hbss.smith_normal_form([[1]], 4)
