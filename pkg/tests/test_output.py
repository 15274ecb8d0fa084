import io
import math
import xml.etree.ElementTree as ET
from dataclasses import replace

import numpy as np
import pytest

from subsql.config import RunConfig
from subsql.designer import DesignResult
from subsql.metrics import NoSubSqlRegion, SubSqlMetrics
from subsql.model import InvalidArgument
from subsql.noise import FrequencyGrid, NoiseSpectrum
from subsql.output import (
    SWEEP_HEADER,
    emit_csv,
    emit_svg,
    read_noise_csv,
    render_svg,
    write_design_csv,
    write_metrics_csv,
    write_modes_csv,
    write_noise_csv,
)
from subsql.pipeline import SweepRow, run_point

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def point():
    return run_point(RunConfig())


def row(v):
    return SweepRow("length_um", v, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 0.5, 2)


def test_sweep_header():
    assert SWEEP_HEADER == "param,value,f1_hz,f_pitch_hz,f_high_hz,r_max,f_max_hz,f_l_hz,f_h_hz,bwe,dip_count"


def test_emit_csv_shapes(tmp_path):
    p = tmp_path / "s.csv"
    emit_csv([], p)
    assert p.read_bytes() == (SWEEP_HEADER + "\n").encode()
    emit_csv([row(55.0)], p)
    raw = p.read_bytes()
    assert raw.count(b"\n") == 2 and b"\r" not in raw
    assert raw.decode().splitlines()[1] == (
        "length_um,5.500000000e+01,1.000000000e+00,2.000000000e+00,3.000000000e+00,"
        "4.000000000e+00,5.000000000e+00,6.000000000e+00,7.000000000e+00,5.000000000e-01,2"
    )
    q = tmp_path / "t.csv"
    emit_csv([row(55.0)], q)
    assert q.read_bytes() == raw


def test_emit_csv_to_stdout(capsys):
    emit_csv([row(1.0)], "-")
    assert capsys.readouterr().out.startswith(SWEEP_HEADER + "\n")


def test_emit_csv_io_error(tmp_path):
    with pytest.raises(OSError):
        emit_csv([row(1.0)], tmp_path / "missing" / "x.csv")


def test_noise_csv_round_trip(tmp_path, point):
    p = tmp_path / "n.csv"
    write_noise_csv(point.tn, point.sql, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "frequency_hz,tn_asd_m_rthz,sql_asd_m_rthz,ratio_sql_over_tn"
    assert len(lines) == len(point.tn.grid) + 1
    tn, sql = read_noise_csv(p)
    assert tn.grid == point.tn.grid
    assert np.allclose(tn.asd, point.tn.asd, rtol=1e-11)
    assert np.allclose(sql.asd, point.sql.asd, rtol=1e-11)


def test_read_noise_rejects_irregular_grid(tmp_path):
    p = tmp_path / "n.csv"
    p.write_text("frequency_hz,a,b,c\n1,1,1,1\n2,1,1,1\n10,1,1,1\n")
    with pytest.raises(InvalidArgument):
        read_noise_csv(p)


def test_modes_and_metrics_csv(tmp_path, point):
    p = tmp_path / "m.csv"
    write_modes_csv(point.modes[:3], point.coupling, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "mode_index,label,frequency_hz,m_eff_kg,coupled"
    assert lines[1].startswith("1,fundamental,") and lines[2].startswith("2,pitch,")
    write_metrics_csv(point.metrics, p)
    head, vals = p.read_text().splitlines()
    assert head == "r_max,f_max_hz,f_l_hz,f_h_hz,bwe,dip_count"
    assert float(vals.split(",")[0]) == pytest.approx(point.metrics.r_max, rel=1e-9)
    write_metrics_csv(NoSubSqlRegion(0.3), p)
    assert p.read_text().splitlines()[1] == "3.000000000e-01,nan,nan,nan,nan,0"


def test_design_csv(tmp_path):
    p = tmp_path / "d.csv"
    write_design_csv([DesignResult((40.0, 41.5), 250.2, (3.0, 0.2), 380, True, 4)], p)
    assert p.read_text() == (
        "seed,t_gaas_nm,t_algaas_nm,achieved_ppm,evaluations,converged\n"
        "4,4.000000000e+01,4.150000000e+01,2.502000000e+02,380,true\n"
    )


def test_svg_well_formed_with_band(point):
    text = render_svg(point.tn, point.sql, point.metrics)
    root = ET.fromstring(text)
    assert root.tag == SVG + "svg"
    lines = {e.get("class") for e in root.iter(SVG + "polyline")}
    assert lines == {"tn", "sql"}
    bands = [e for e in root.iter(SVG + "rect") if e.get("class") == "subsql-band"]
    assert len(bands) == 1 and float(bands[0].get("width")) > 0
    assert render_svg(point.tn, point.sql, point.metrics) == text


def test_svg_without_band():
    hot = run_point(replace(RunConfig(), temperature_k=1e6))
    root = ET.fromstring(render_svg(hot.tn, hot.sql))
    assert not [e for e in root.iter(SVG + "rect") if e.get("class") == "subsql-band"]


def test_svg_grid_mismatch():
    a = NoiseSpectrum(FrequencyGrid(1, 100, 5), np.ones(11))
    b = NoiseSpectrum(FrequencyGrid(1, 100, 6), np.ones(13))
    with pytest.raises(InvalidArgument):
        render_svg(a, b)


def test_emit_svg_bytes(tmp_path, point):
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_svg(point.tn, point.sql, p1, point.metrics)
    emit_svg(point.tn, point.sql, p2)
    assert p1.read_bytes() == p2.read_bytes()
