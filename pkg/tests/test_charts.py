import xml.etree.ElementTree as ET

import pytest

from qsumm.charts import bar_chart, fold_lines

NS = "{http://www.w3.org/2000/svg}"


def test_bar_chart_structure_and_heights():
    names, means, stds = ["a", "b", "c"], [0.2, 0.5, 0.35], [0.05, 0.1, 0.0]
    root = ET.fromstring(bar_chart(names, means, stds))
    bars = root.findall(f"{NS}rect[@class='bar']")
    assert [b.get("data-name") for b in bars] == names
    assert len(root.findall(f"{NS}g[@class='errorbar']")) == 3
    heights = [float(b.get("height")) for b in bars]
    # bar heights are proportional to the means
    for h, m in zip(heights, means):
        assert h / heights[1] == pytest.approx(m / means[1], abs=0.01)
    assert [float(b.get("data-mean")) for b in bars] == means


def test_bar_chart_escapes_names():
    svg = bar_chart(["a<b"], [0.1], [0.0])
    ET.fromstring(svg)
    assert "a&lt;b" in svg


def test_fold_lines_one_polyline_per_run():
    root = ET.fromstring(fold_lines(["x", "y"], [[0.1, 0.2], [0.3, 0.1], [0.2, 0.2]]))
    lines = root.findall(f"{NS}polyline")
    assert [p.get("data-name") for p in lines] == ["x", "y"]
    assert all(len(p.get("points").split()) == 3 for p in lines)
