import json

from newtonlab_app.cli import EXIT_ERROR, EXIT_OK, build_parser, main

ROOTS = "[[1,0],[-1,0]]"


def test_blaschke_text(capsys):
    assert main(["blaschke", "--format", "text", "--a-seq", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("k = 2")
    assert len(out.strip().splitlines()) == 3 + 3


def test_cycles_json(capsys):
    assert main(["cycles", "--roots", ROOTS, "--period", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["period"] == 1
    assert len(payload["cycles"]) == 3


def test_bad_roots_exit_with_error():
    assert main(["cycles", "--roots", "[1]"]) == EXIT_ERROR


def test_render_to_file(tmp_path):
    out = tmp_path / "julia.ppm"
    rc = main(["render-julia", "--roots", ROOTS, "--res", "16x16", "--iter-cap", "40",
               "--format", "ppm", "--out", str(out)])
    assert rc == EXIT_OK
    assert out.read_bytes().startswith(b"P6")


def test_berkovich_family(capsys):
    rc = main(["berkovich", "--family", "r = t; s = 1/2"])
    assert rc in (0, 2)
    payload = json.loads(capsys.readouterr().out)
    assert payload["type"] == "type1"
    assert payload["swapped"] is False


def test_shared_flags_are_accepted_by_every_subcommand():
    parser = build_parser()
    for command in ("classify", "epstein", "cycles", "render-julia", "render-per2", "berkovich",
                    "degenerate", "blaschke"):
        args = parser.parse_args([command, "--roots", ROOTS, "--family", "r = t; s = 1/2",
                                  "--period", "3", "--t-values", "0.01,0.001"])
        assert args.command == command and args.period == 3


def test_flag_that_does_not_apply_is_an_error(caplog):
    assert main(["berkovich", "--family", "r = t; s = 1/2", "--roots", ROOTS]) == EXIT_ERROR
    assert "--roots does not apply to berkovich" in caplog.text
    assert main(["cycles", "--roots", ROOTS, "--t-values", "0.1"]) == EXIT_ERROR
    assert main(["blaschke", "--period", "2"]) == EXIT_ERROR


def test_missing_required_input_is_an_error(caplog):
    assert main(["cycles"]) == EXIT_ERROR
    assert "cycles needs --roots" in caplog.text
    assert main(["degenerate"]) == EXIT_ERROR


def test_classify_rejects_non_square_rasters(caplog):
    assert main(["classify", "--roots", ROOTS, "--res", "64x32"]) == EXIT_ERROR
    assert "square" in caplog.text
