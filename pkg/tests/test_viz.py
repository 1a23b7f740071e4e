import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import make_matrix
from apspace.core import (LengthMismatchError, UnknownAlgorithmError,
                          ZeroColumnError)
from apspace.pca import BadComponentCountError, PcaProjection, pca_project
from apspace.viz import (HighlightGroup, NoPlottablePointsError, PlotSpec,
                         SameAlgorithmError, mini_aps_grid, mini_aps_svg,
                         pca_scatter_svg)

SVG_NS = "{http://www.w3.org/2000/svg}"


def circles(svg: str):
    """Parse the document and pull out (cx, cy, fill, title) per point."""
    root = ET.fromstring(svg)
    out = []
    for el in root.iter(f"{SVG_NS}circle"):
        title = el.find(f"{SVG_NS}title")
        out.append((el.get("cx"), el.get("cy"), el.get("fill"),
                    None if title is None else title.text))
    return out


def tiny_projection(coords, ratios=(0.6, 0.3), ids=None):
    coords = np.asarray(coords, dtype=float)
    k = coords.shape[1]
    ids = tuple(ids or (f"p{i}" for i in range(coords.shape[0])))
    return PcaProjection(
        dataset_ids=ids,
        coordinates=coords,
        components=np.eye(k),
        explained_variance_ratio=np.asarray(ratios[:k], dtype=float),
        eigenvalues=np.asarray(ratios, dtype=float),
        column_means=np.zeros(k),
        imputation="complete-rows-only",
    )


# ------------------------------------------------------------------ mini plot

def test_mini_svg_is_well_formed(fixture_matrix):
    svg = mini_aps_svg(fixture_matrix, "BPR", "ItemKNN")
    root = ET.fromstring(svg)  # raises on malformed XML
    assert root.tag == f"{SVG_NS}svg"


def test_mini_plots_only_shared_datasets(fixture_matrix):
    pts = circles(mini_aps_svg(fixture_matrix, "BPR", "ItemKNN"))
    both = [d for d, row in zip(fixture_matrix.datasets, fixture_matrix.cells)
            if row[0] is not None and row[1] is not None]
    assert len(pts) == len(both) == 63
    assert {p[3] for p in pts} == set(both)


def test_mini_normalization_puts_best_at_the_corner(fixture_matrix):
    # Jester tops both axes, so it must sit at the top-right of the frame
    spec = PlotSpec(width_px=600, height_px=600)
    pts = circles(mini_aps_svg(fixture_matrix, "BPR", "SGL", spec))
    jester = next(p for p in pts if p[3] == "Jester")
    assert jester[0] == "582.00"  # width - right margin
    assert jester[1] == "18.00"   # top margin


def test_mini_single_dataset_plot():
    m = make_matrix({"only": [0.3, 0.2]})
    pts = circles(mini_aps_svg(m, "algo0", "algo1"))
    assert len(pts) == 1
    assert (pts[0][0], pts[0][1]) == ("582.00", "18.00")


def test_mini_axis_tick_labels(fixture_matrix):
    svg = mini_aps_svg(fixture_matrix, "BPR", "ItemKNN")
    for label in (">0<", ">0.5<", ">1<", ">BPR<", ">ItemKNN<"):
        assert label in svg


def test_mini_byte_deterministic(fixture_matrix):
    a = mini_aps_svg(fixture_matrix, "MultiVAE", "NeuMF")
    b = mini_aps_svg(fixture_matrix, "MultiVAE", "NeuMF")
    assert a == b


def test_mini_highlight_groups_color_and_order(fixture_matrix):
    spec = PlotSpec(highlight_groups=(
        HighlightGroup("movielens", "MovieLens", "#ff0000"),))
    pts = circles(mini_aps_svg(fixture_matrix, "BPR", "ItemKNN", spec))
    red = [p for p in pts if p[2] == "#ff0000"]
    assert {p[3] for p in red} == {d for d in fixture_matrix.datasets
                                  if d.startswith("MovieLens")
                                  and fixture_matrix.row(d)[0] is not None}
    # highlights are drawn last so they stay on top
    assert all(p[2] == "#ff0000" for p in pts[-len(red):])


def test_mini_first_matching_group_wins():
    m = make_matrix({"abx": [0.5, 0.5], "aby": [0.6, 0.6]})
    spec = PlotSpec(highlight_groups=(
        HighlightGroup("narrow", "abx", "#00ff00"),
        HighlightGroup("broad", "ab", "#0000ff"),
    ))
    pts = circles(mini_aps_svg(m, "algo0", "algo1", spec))
    fills = {p[3]: p[2] for p in pts}
    assert fills == {"abx": "#00ff00", "aby": "#0000ff"}


def test_mini_errors(fixture_matrix):
    with pytest.raises(SameAlgorithmError):
        mini_aps_svg(fixture_matrix, "BPR", "BPR")
    with pytest.raises(UnknownAlgorithmError):
        mini_aps_svg(fixture_matrix, "BPR", "NoSuchAlgo")
    disjoint = make_matrix({"a": [0.5, None], "b": [None, 0.5]})
    with pytest.raises(NoPlottablePointsError):
        mini_aps_svg(disjoint, "algo0", "algo1")
    zeros = make_matrix({"a": [0.0, 0.5], "b": [0.0, 0.7]})
    with pytest.raises(ZeroColumnError):
        mini_aps_svg(zeros, "algo0", "algo1")


def test_xml_escaping_in_names():
    m = make_matrix({"a&b<c>": [0.5, 0.5]}, algorithms=["x&y", "p<q"])
    svg = mini_aps_svg(m, "x&y", "p<q")
    pts = circles(svg)  # parsing succeeds => escaping worked
    assert pts[0][3] == "a&b<c>"


# ---------------------------------------------------------------------- grid

def test_grid_fixture_unordered(fixture_matrix):
    grid = mini_aps_grid(fixture_matrix)
    assert len(grid.plots) == 10  # C(5, 2)
    assert grid.warnings == ()
    assert grid.plots[0][0] == "BPR_vs_ItemKNN"
    labels = [label for label, _ in grid.plots]
    assert labels == sorted_pairs_in_matrix_order(fixture_matrix)


def sorted_pairs_in_matrix_order(matrix):
    names = matrix.algorithms
    return [f"{names[i]}_vs_{names[j]}"
            for i in range(len(names)) for j in range(i + 1, len(names))]


def test_grid_ordered_doubles_the_panels(fixture_matrix):
    grid = mini_aps_grid(fixture_matrix, ordered=True)
    assert len(grid.plots) == 20
    labels = {label for label, _ in grid.plots}
    assert "BPR_vs_ItemKNN" in labels and "ItemKNN_vs_BPR" in labels


def test_grid_skips_pairs_without_common_datasets():
    m = make_matrix({"d1": [0.5, 0.5, None], "d2": [None, 0.5, 0.5]})
    grid = mini_aps_grid(m)
    assert [label for label, _ in grid.plots] == ["algo0_vs_algo1",
                                                  "algo1_vs_algo2"]
    assert grid.warnings == (
        "algo0 vs algo2: no datasets with both scores; skipped",)


def test_grid_two_algorithms_single_panel():
    m = make_matrix({"d": [0.5, 0.6]})
    assert len(mini_aps_grid(m).plots) == 1


def test_grid_needs_two_algorithms():
    with pytest.raises(ValueError):
        mini_aps_grid(make_matrix({"d": [0.5]}))


# --------------------------------------------------------------- pca scatter

def test_pca_scatter_fixture(fixture_matrix):
    proj = pca_project(fixture_matrix, 2, "mean-fill")
    svg = pca_scatter_svg(proj)
    assert len(circles(svg)) == 71
    # explained-variance shares at two significant figures
    assert "component 1 (85% of variance)" in svg
    assert "component 2 (8.3% of variance)" in svg


def test_pca_scatter_percent_formatting():
    svg = pca_scatter_svg(tiny_projection([[0.0, 0.0], [1.0, 1.0]],
                                          ratios=(0.12345, 0.04321)))
    assert "component 1 (12% of variance)" in svg
    assert "component 2 (4.3% of variance)" in svg


def test_pca_scatter_byte_deterministic(fixture_matrix):
    proj = pca_project(fixture_matrix, 2, "zero-fill")
    assert pca_scatter_svg(proj) == pca_scatter_svg(proj)


def test_pca_scatter_metric_gradient():
    proj = tiny_projection([[0.0, 0.0], [1.0, 0.5], [0.5, 1.0]])
    svg = pca_scatter_svg(proj, metric_values=[0.0, 1.0, None],
                          spec=PlotSpec(color_by="difficulty"))
    pts = circles(svg)
    fills = {p[3]: p[2] for p in pts}
    assert fills["p0"] == "#2c7bb6"  # low end
    assert fills["p1"] == "#d7191c"  # high end
    assert fills["p2"] == "#999999"  # missing metric value
    assert "difficulty" in svg       # legend title
    assert "0.0000" in svg and "1.0000" in svg


def test_pca_scatter_constant_metric():
    proj = tiny_projection([[0.0, 0.0], [1.0, 1.0]])
    svg = pca_scatter_svg(proj, metric_values=[0.4, 0.4])
    pts = circles(svg)
    assert {p[2] for p in pts} == {"#2c7bb6"}
    assert "0.4000" in svg


def test_pca_scatter_highlights_without_metric():
    proj = tiny_projection([[0.0, 0.0], [1.0, 1.0]], ids=("plain", "marked"))
    spec = PlotSpec(highlight_groups=(
        HighlightGroup("m", "marked", "#ff00ff"),))
    pts = circles(pca_scatter_svg(proj, spec=spec))
    assert pts[-1][3] == "marked" and pts[-1][2] == "#ff00ff"


def test_pca_scatter_errors(fixture_matrix):
    one_d = tiny_projection([[0.0], [1.0]], ratios=(1.0,))
    with pytest.raises(BadComponentCountError):
        pca_scatter_svg(one_d)
    proj = tiny_projection([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(LengthMismatchError):
        pca_scatter_svg(proj, metric_values=[0.5])
    with pytest.raises(NoPlottablePointsError):
        pca_scatter_svg(proj, metric_values=[None, None])


# ------------------------------------------------------------------ PlotSpec

def test_plot_spec_validation():
    with pytest.raises(ValueError):
        PlotSpec(width_px=0)
    with pytest.raises(ValueError):
        PlotSpec(point_radius_px=-1)
    with pytest.raises(ValueError):
        PlotSpec(point_color="red")
    with pytest.raises(ValueError):
        HighlightGroup("g", "", "#112233")
    with pytest.raises(ValueError):
        HighlightGroup("g", "pfx", "not-a-color")
    with pytest.raises(ValueError):
        HighlightGroup("", "pfx")
