import json
import os

import pytest

from newtonlab_app.schemas import SCHEMAS, export_schemas, main, schema_for


def test_every_report_has_a_schema(tmp_path):
    paths = export_schemas(str(tmp_path))
    assert len(paths) == len(SCHEMAS)
    for name in SCHEMAS:
        path = tmp_path / f"{name}.schema.json"
        assert os.path.exists(path)
        with open(path, encoding="utf-8") as fh:
            assert json.load(fh)["type"] == "object"


def test_berkovich_schema_fields():
    props = schema_for("berkovich_analysis")["properties"]
    assert {"type", "tree", "sigma", "checks", "verified"} <= set(props)


def test_unknown_schema():
    with pytest.raises(KeyError):
        schema_for("nope")


def test_module_entry_point_writes_the_schema_files(tmp_path, capsys):
    main([str(tmp_path / "out")])
    printed = capsys.readouterr().out.split()
    assert len(printed) == len(SCHEMAS)
    with open(tmp_path / "out" / "fsi_report.schema.json", encoding="utf-8") as fh:
        assert {"gamma_total", "delta", "satisfied"} <= set(json.load(fh)["properties"])
