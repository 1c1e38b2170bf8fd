import json

import numpy as np
import pytest

from rpcurve.data import (
    IndicatorTable,
    NormalizationTransform,
    Orientation,
    apply_transform,
    denormalize_point,
    load_bundled_table,
    load_schema,
    load_table,
    normalize,
)
from rpcurve.errors import (
    ConstantColumn,
    MissingCell,
    NonNumericCell,
    SchemaError,
    UnknownIndicator,
)


def write_csv(tmp_path, text, name="t.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


GOOD_CSV = "id,a,b\nx,1,10\ny,2,20\nz,3,15\n"
GOOD_SCHEMA = {"a": "positive", "b": "negative"}


class TestOrientation:
    def test_parse_tokens(self):
        assert Orientation.parse("positive") is Orientation.POSITIVE
        assert Orientation.parse("negative") is Orientation.NEGATIVE

    def test_parse_rejects_junk(self):
        with pytest.raises(SchemaError):
            Orientation.parse("up")


class TestIndicatorTable:
    def test_values_are_readonly(self, make_table):
        t = make_table([[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(ValueError):
            t.values[0, 0] = 9.0

    def test_rejects_single_item(self):
        with pytest.raises(Exception):
            IndicatorTable(
                item_ids=("only",),
                indicator_names=("a",),
                orientations=(Orientation.POSITIVE,),
                values=np.array([[1.0]]),
            )

    def test_rejects_nonfinite(self, make_table):
        with pytest.raises(Exception):
            make_table([[1.0, np.nan], [2.0, 3.0]])

    def test_indicator_index(self, make_table):
        t = make_table([[1, 2], [3, 4]], names=["gdp", "leb"])
        assert t.indicator_index("leb") == 1
        with pytest.raises(UnknownIndicator):
            t.indicator_index("nope")

    def test_with_values_keeps_ids(self, make_table):
        t = make_table([[1, 2], [3, 4]])
        t2 = t.with_values(np.array([[5.0, 6.0], [7.0, 8.0]]))
        assert t2.item_ids == t.item_ids
        assert t2.orientations == t.orientations
        assert t2.values[1, 1] == 8.0


class TestLoadTable:
    def test_roundtrip(self, tmp_path):
        p = write_csv(tmp_path, GOOD_CSV)
        t = load_table(p, GOOD_SCHEMA)
        assert t.item_ids == ("x", "y", "z")
        assert t.indicator_names == ("a", "b")
        assert t.orientations == (Orientation.POSITIVE, Orientation.NEGATIVE)
        np.testing.assert_allclose(t.values, [[1, 10], [2, 20], [3, 15]])

    def test_header_must_start_with_id(self, tmp_path):
        p = write_csv(tmp_path, "name,a,b\nx,1,10\ny,2,20\n")
        with pytest.raises(SchemaError):
            load_table(p, GOOD_SCHEMA)

    def test_missing_cell_names_row(self, tmp_path):
        p = write_csv(tmp_path, "id,a,b\nx,1,10\ny,2\n")
        with pytest.raises(MissingCell) as exc:
            load_table(p, GOOD_SCHEMA)
        assert "3" in str(exc.value)

    def test_nonnumeric_cell(self, tmp_path):
        p = write_csv(tmp_path, "id,a,b\nx,1,10\ny,two,20\n")
        with pytest.raises(NonNumericCell) as exc:
            load_table(p, GOOD_SCHEMA)
        msg = str(exc.value)
        assert "two" in msg and "a" in msg

    def test_schema_column_mismatch_both_ways(self, tmp_path):
        p = write_csv(tmp_path, GOOD_CSV)
        with pytest.raises(UnknownIndicator):
            load_table(p, {"a": "positive"})
        with pytest.raises(UnknownIndicator):
            load_table(p, {**GOOD_SCHEMA, "c": "positive"})

    def test_duplicate_column_rejected(self, tmp_path):
        p = write_csv(tmp_path, "id,a,a\nx,1,10\ny,2,20\n")
        with pytest.raises(SchemaError):
            load_table(p, {"a": "positive"})

    def test_extra_field_rejected(self, tmp_path):
        p = write_csv(tmp_path, "id,a,b\nx,1,10,99\ny,2,20\n")
        with pytest.raises(SchemaError):
            load_table(p, GOOD_SCHEMA)

    def test_constant_column_rejected_at_load(self, tmp_path):
        p = write_csv(tmp_path, "id,a,b\nx,1,7\ny,2,7\n")
        with pytest.raises(ConstantColumn):
            load_table(p, GOOD_SCHEMA)


class TestLoadSchema:
    def test_reads_json(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps(GOOD_SCHEMA), encoding="utf-8")
        s = load_schema(p)
        assert s == {
            "a": Orientation.POSITIVE,
            "b": Orientation.NEGATIVE,
        }

    def test_rejects_empty(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text("{}", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_schema(p)


class TestNormalize:
    def test_endpoints_exact(self, make_table):
        t = make_table([[1.0, 100.0], [3.0, 300.0], [2.0, 150.0]])
        nt = normalize(t)
        assert nt.values.min(axis=0).tolist() == [0.0, 0.0]
        assert nt.values.max(axis=0).tolist() == [1.0, 1.0]

    def test_matches_direct_formula(self, make_table):
        rng = np.random.default_rng(20240301)
        for _ in range(25):
            vals = rng.normal(size=(8, 3)) * rng.uniform(0.5, 50)
            vals[:, 1] += 1000.0
            t = make_table(vals)
            nt = normalize(t)
            lo = vals.min(axis=0)
            hi = vals.max(axis=0)
            np.testing.assert_allclose(nt.values, (vals - lo) / (hi - lo))

    def test_transform_roundtrip(self, make_table):
        rng = np.random.default_rng(7)
        vals = rng.uniform(-5, 5, size=(6, 4))
        t = make_table(vals)
        nt = normalize(t)
        back = np.array(
            [denormalize_point(z, nt.transform) for z in nt.values]
        )
        np.testing.assert_allclose(back, vals, atol=1e-12)

    def test_apply_transform_can_leave_unit_box(self, make_table):
        t = make_table([[0.0, 0.0], [10.0, 1.0]])
        nt = normalize(t)
        z = apply_transform(np.array([[20.0, 0.5]]), nt.transform)
        assert z[0, 0] == 2.0

    def test_transform_dict_roundtrip(self, make_table):
        t = make_table([[1.0, 2.0], [4.0, 9.0]])
        tr = normalize(t).transform
        tr2 = NormalizationTransform.from_dict(tr.to_dict())
        assert tr2.indicator_names == tr.indicator_names
        np.testing.assert_array_equal(tr2.mins, tr.mins)
        np.testing.assert_array_equal(tr2.maxs, tr.maxs)


class TestBundledData:
    def test_shape_and_names(self, bundled_table):
        assert bundled_table.n_items == 171
        assert bundled_table.n_indicators == 4
        assert len(set(bundled_table.item_ids)) == 171

    def test_orientations(self, bundled_table):
        kinds = [o.value for o in bundled_table.orientations]
        assert kinds == ["positive", "positive", "negative", "negative"]

    def test_loads_fresh_each_call(self):
        a = load_bundled_table()
        b = load_bundled_table()
        assert a.item_ids == b.item_ids
        np.testing.assert_array_equal(a.values, b.values)
