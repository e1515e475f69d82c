import subprocess
import sys
from pathlib import Path

import pytest

from figgen import FigureSpec, SchemaError, render

DATA = Path(__file__).parent / "data"

MINIMAL_PRECISION = """eps,strategy,inv_var_eps,inv_var_eps_se,inv_var_x0,inv_var_x0_se,crb_eps,crb_x0,qcrb_eps,qcrb_x0
0.5,two_photon_spatial,0.062,0.005,0.96,0.09,0.0707,0.9412,0.25,0.9375
1.0,two_photon_spatial,0.121,0.009,0.84,0.08,0.1293,0.8059,0.25,0.75
"""


class TestPrecisionFigures:
    def test_minimal_two_row_csv(self, tmp_path):
        src = tmp_path / "mini.csv"
        src.write_text(MINIMAL_PRECISION)
        out = tmp_path / "mini.png"
        fig = render(FigureSpec("precision_vs_eps", (str(src),), str(out)))
        assert out.exists() and out.stat().st_size > 0
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        assert any("two_photon_spatial" in lab for lab in labels)
        assert "qCRB" in labels

    def test_fisher_scan_three_visibility_families(self, tmp_path):
        out = tmp_path / "scan.png"
        fig = render(
            FigureSpec("precision_vs_eps", (str(DATA / "fisher_scan_3vis.csv"),), str(out))
        )
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        curve_labels = [lab for lab in labels if lab.startswith("two_photon_spatial")]
        assert len(curve_labels) == 3  # one curve per visibility
        assert {"(V=0.92)" in lab or "(V=0.99)" in lab or "(V=1)" in lab for lab in curve_labels}
        assert "qCRB" in labels
        assert out.exists() and out.stat().st_size > 0

    def test_monte_carlo_csv_with_error_bars_and_x0_panel(self, tmp_path):
        src = str(DATA / "precision_mc.csv")
        out_eps = tmp_path / "mc_eps.svg"
        render(FigureSpec("precision_vs_eps", (src,), str(out_eps)))
        assert out_eps.exists() and out_eps.read_bytes()[:5] == b"<?xml"
        out_x0 = tmp_path / "mc_x0.png"
        fig = render(FigureSpec("precision_vs_eps", (src,), str(out_x0), param="x0"))
        labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
        # the binary strategy has no x0 information and must not produce a curve
        assert not any("binary" in lab for lab in labels)
        assert out_x0.exists()

    def test_missing_column_named(self, tmp_path):
        lines = MINIMAL_PRECISION.splitlines()
        header = lines[0].split(",")
        drop = header.index("crb_eps")
        broken = "\n".join(
            ",".join(v for i, v in enumerate(ln.split(",")) if i != drop) for ln in lines
        )
        src = tmp_path / "broken.csv"
        src.write_text(broken + "\n")
        with pytest.raises(SchemaError, match="missing column: crb_eps"):
            render(FigureSpec("precision_vs_eps", (str(src),), str(tmp_path / "x.png")))

    def test_spec_validation(self, tmp_path):
        with pytest.raises(SchemaError, match="unknown figure kind"):
            FigureSpec("pie_chart", ("a.csv",), "x.png")
        with pytest.raises(SchemaError, match="unsupported output format"):
            FigureSpec("precision_vs_eps", ("a.csv",), "x.pdf")
        with pytest.raises(SchemaError, match="param"):
            FigureSpec("precision_vs_eps", ("a.csv",), "x.png", param="sigma")


class TestDensityMaps:
    def test_pair_renders(self, tmp_path):
        out = tmp_path / "maps.png"
        fig = render(
            FigureSpec(
                "density_map",
                (str(DATA / "density_pc.csv"), str(DATA / "density_pd.csv")),
                str(out),
            )
        )
        assert out.exists() and out.stat().st_size > 0
        assert len(fig.axes) >= 2

    def test_flat_zero_pc_panel(self, tmp_path):
        out = tmp_path / "flat.png"
        fig = render(
            FigureSpec(
                "density_map",
                (str(DATA / "density_pc_flat.csv"), str(DATA / "density_pd_flat.csv")),
                str(out),
            )
        )
        pc_mesh = fig.axes[0].collections[0]
        assert float(pc_mesh.get_array().max()) == 0.0

    def test_requires_two_inputs(self, tmp_path):
        with pytest.raises(SchemaError, match="exactly two inputs"):
            render(FigureSpec("density_map", (str(DATA / "density_pc.csv"),), str(tmp_path / "x.png")))

    def test_grid_schema_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError, match="missing column: x"):
            render(FigureSpec("density_map", (str(bad), str(bad)), str(tmp_path / "x.png")))


class TestCli:
    def run(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "figgen", *args], capture_output=True, text=True
        )

    def test_end_to_end(self, tmp_path):
        out = tmp_path / "curves.png"
        res = self.run(
            "precision_vs_eps", "--in", str(DATA / "fisher_scan_3vis.csv"), "--out", str(out)
        )
        assert res.returncode == 0, res.stderr
        assert out.exists()

    def test_schema_error_exit_code_and_message(self, tmp_path):
        src = tmp_path / "broken.csv"
        lines = MINIMAL_PRECISION.splitlines()
        header = lines[0].split(",")
        drop = header.index("qcrb_eps")
        src.write_text(
            "\n".join(
                ",".join(v for i, v in enumerate(ln.split(",")) if i != drop) for ln in lines
            )
            + "\n"
        )
        res = self.run("precision_vs_eps", "--in", str(src), "--out", str(tmp_path / "x.png"))
        assert res.returncode != 0
        assert "missing column: qcrb_eps" in res.stderr
