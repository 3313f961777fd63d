import json

import pytest

from coops import ENGINE_VERSION, cli
from coops.suites import margolis_closed_forms


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_basis_ell3(capsys):
    code, out, _ = run(capsys, "basis", "--ell", "3", "-p", "3")
    assert code == 0
    assert out == "1\nz1\nz1^2\nz1^3\nz2\nt2\n"


def test_basis_ell0(capsys):
    assert run(capsys, "basis", "--ell", "0", "-p", "3")[1] == "1\n"


def test_basis_m2_contains_example(capsys):
    code, out, _ = run(capsys, "basis", "--m2", "18", "-p", "3")
    assert code == 0 and "z1^9 z3" in out.splitlines()


def test_basis_truncated_at_tmax(capsys):
    lines = run(capsys, "basis", "--a-mod-en", "2", "--tmax", "16")[1].splitlines()
    assert lines == ["1", "z1", "z1^2", "z1^3", "z2", "z1^4"]


@pytest.mark.parametrize("argv", [
    ["basis", "--ell", "1", "-p", "4"],
    ["basis", "--ell", "1", "-p", "2"],
    ["basis"],
    ["basis", "--ell", "1", "--m2", "2"],
    ["basis", "--ell", "-1"],
    ["basis", "--ell", "1", "--format", "png"],
    ["margolis", "--ell", "2", "--q", "5"],
])
def test_invalid_input_exits_nonzero(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code != 0 and err.startswith("error:") and out == ""


def _margolis(capsys, *argv):
    code, out, _ = run(capsys, "margolis", *argv)
    assert code == 0
    rows = [l.split("\t") for l in out.splitlines()[1:]]
    return [int(d) for _, d in rows]


@pytest.mark.parametrize("i", [0, 1, 2])
def test_margolis_closed_forms(capsys, i):
    got = _margolis(capsys, "--a-mod-en", "2", "--q", str(i), "-p", "3", "--tmax", "40")
    assert got == margolis_closed_forms(3, 40)[i]


def test_margolis_of_free_summand_is_zero(capsys):
    assert not any(_margolis(capsys, "--s-summand", "--q", "2", "--tmax", "80"))


def test_ext_both_engines_agree(capsys):
    code, out, _ = run(capsys, "ext", "--ell", "3", "-p", "3", "--engine", "both", "--smax", "3", "--tmax", "40")
    assert code == 0
    assert out.splitlines()[0] == "s\tt\tdim\tgenerators"


def test_ext_fp_towers(capsys):
    code, out, _ = run(capsys, "ext", "--fp", "-p", "3", "--format", "json", "--smax", "3", "--tmax", "20")
    doc = json.loads(out)
    cells = {(c["s"], c["t"]): c for c in doc["cells"]}
    assert doc["prime"] == 3 and doc["window"] == {"s_max": 3, "t_max": 20}
    assert [cells[(s, s)]["gens"] for s in range(4)] == [["1"], ["v0"], ["v0^2"], ["v0^3"]]
    assert cells[(1, 5)]["gens"] == ["v1"] and cells[(1, 17)]["gens"] == ["v2"]
    assert cells[(0, 0)]["v2"] == ["v2"] and cells[(1, 5)]["v2"] is None


def test_ext_svg(capsys):
    out = run(capsys, "ext", "--fp", "--format", "svg", "--smax", "2", "--tmax", "12")[1]
    assert out.startswith("<svg") and out.endswith("</svg>\n")
    assert 'stroke="black"' in out and "<circle" in out


def test_engine_disagreement_writes_diff(tmp_path, capsys, monkeypatch):
    import coops.ext as ext
    real = ext.cobar_ext_oracle

    def broken(*a, **kw):
        chart = real(*a, **kw)
        chart.dims[(0, 0)] += 1
        return chart
    monkeypatch.setattr(ext, "cobar_ext_oracle", broken)
    code, _, err = run(capsys, "ext", "--ell", "1", "--engine", "both", "--smax", "1", "--tmax", "10",
                       "--output-dir", str(tmp_path))
    assert code == 1 and "disagree" in err
    assert (tmp_path / "ext_p3_ell1.diff").read_text() == "s\tt\tkoszul\tcobar\n0\t0\t1\t2\n"


def test_table_regeneration_and_diff(tmp_path, capsys):
    code, _, _ = run(capsys, "ext", "--table", "-p", "3", "--jmax", "9", "--output-dir", str(tmp_path))
    table = (tmp_path / "table_p3_j9.tsv").read_text()
    assert table.startswith("target\tsummand\tgenerators\n")
    assert "S^72 l_6\tS^72 Q^5\t" in table
    diff = (tmp_path / "table_p3_j9.diff").read_text().splitlines()
    assert [l.split("\t")[:2] for l in diff] == [
        ["flagged", "*"], ["flagged", "S^36 l_3"], ["delta", "S^48 l_4"], ["delta", "S^84 l_7"]]
    assert code == 1


def test_table_small_jmax_only_flagged(capsys):
    code, out, err = run(capsys, "ext", "--table", "--jmax", "3")
    assert code == 0
    assert all(l.startswith("flagged") for l in err.splitlines())


def test_verify_sequences(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "sequences", "-p", "3", "--jmax", "3")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "suite\tcheck\tstatus\tdetail"
    assert len(lines) == 1 + 9 + 1 and all(l.split("\t")[2] == "pass" for l in lines[1:])


def test_verify_tables_reports_flags(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "tables", "-p", "3", "--jmax", "3")
    status = [l.split("\t")[2] for l in out.splitlines()[1:]]
    assert code == 0 and status.count("flagged") == 2 and "fail" not in status


def test_verify_thread_count_does_not_change_output(capsys):
    a = run(capsys, "verify", "--suite", "all", "-p", "5", "--tmax", "60", "--jmax", "1")
    b = run(capsys, "verify", "--suite", "all", "-p", "5", "--tmax", "60", "--jmax", "1", "--threads", "3")
    assert a == b and a[0] == 0


def test_deterministic_files(tmp_path, capsys):
    for d in ("a", "b"):
        for fmt in ("tsv", "json", "svg"):
            assert run(capsys, "ext", "--ell", "2", "--format", fmt, "--tmax", "30",
                       "--output-dir", str(tmp_path / d))[0] == 0
    for f in sorted((tmp_path / "a").iterdir()):
        raw = f.read_bytes()
        assert raw == (tmp_path / "b" / f.name).read_bytes()
        assert raw.endswith(b"\n") and b"\r" not in raw
        raw.decode("utf-8")


def test_cache_transparency(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("COOPS_CACHE_DIR", str(tmp_path / "cache"))
    argv = ["ext", "--ell", "3", "--format", "json", "--smax", "3", "--tmax", "40"]
    plain = run(capsys, *argv)
    first = run(capsys, *argv, "--cache")
    files = list((tmp_path / "cache").iterdir())
    assert len(files) == 1
    second = run(capsys, *argv, "--cache")
    assert plain == first == second
    for fmt in ("tsv", "svg"):
        assert run(capsys, *argv[:3], "--format", fmt, *argv[5:], "--cache") == \
            run(capsys, *argv[:3], "--format", fmt, *argv[5:])


def test_cache_version_mismatch_invalidates(tmp_path, monkeypatch):
    monkeypatch.setenv("COOPS_CACHE_DIR", str(tmp_path))
    key = cli.cache_key(3, "ell 1", 10, 1, 2)
    from coops.browngitler import ell
    from coops.ext import build_koszul, ext_dims
    chart = ext_dims(build_koszul(ell(3, 1, 2)), 1, 10)
    cli.cache_store(key, chart)
    loaded = cli.cache_load(key)
    assert loaded.dims == chart.dims and loaded.generators == chart.generators
    path = tmp_path / f"{key}.json"
    d = json.loads(path.read_text())
    d["version"] = ENGINE_VERSION + "x"
    path.write_text(json.dumps(d))
    assert cli.cache_load(key) is None
    assert cli.cache_load(cli.cache_key(3, "ell 1", 11, 1, 2)) is None


def test_cache_key_depends_on_every_field():
    base = (3, "ell 1", 10, 1, 2)
    keys = {cli.cache_key(*base)}
    for k, alt in enumerate((5, "ell 2", 11, 2, 1)):
        args = list(base)
        args[k] = alt
        keys.add(cli.cache_key(*args))
    assert len(keys) == 6
