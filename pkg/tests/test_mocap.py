import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdaudit.errors import ConfigError, InsufficientDataError, ParseError
from mdaudit.mocap import (SPEED_OF_LIGHT, MoCapSequence, RadarConfig, WeightTable,
                           default_weights_text, load_weights, parse_mocap, radar_position,
                           resample, write_mocap)

MINIMAL = """#MOCAP v1,rate=250,units=m
t,TORSO_x,TORSO_y,TORSO_z
0.0,0,0,1
0.004,0,0,1.1
"""


def test_parse_minimal():
    seq = parse_mocap(MINIMAL)
    assert seq.n_samples == 2 and seq.n_markers == 1
    assert seq.markers == ("TORSO",)
    assert seq.rate_hz == 250.0
    np.testing.assert_array_equal(seq.positions[:, 0], [[0, 0, 1], [0, 0, 1.1]])


def test_parse_53_markers():
    names = [f"M{i:02d}" for i in range(53)]
    header = "t," + ",".join(f"{n}_{c}" for n in names for c in "xyz")
    rows = [",".join(["0.0"] + ["1.5"] * 159), ",".join(["0.004"] + ["1.6"] * 159)]
    text = "#MOCAP v1,rate=250,units=m,markers=53\n" + header + "\n" + "\n".join(rows) + "\n"
    seq = parse_mocap(text)
    assert seq.n_markers == 53
    assert seq.markers == tuple(names)


def test_parse_declared_count_mismatch():
    text = MINIMAL.replace("units=m", "units=m,markers=2")
    with pytest.raises(ParseError):
        parse_mocap(text)


def test_non_numeric_cell_names_line():
    text = MINIMAL.replace("0.004,0,0,1.1", "0.004,0,abc,1.1")
    with pytest.raises(ParseError) as exc:
        parse_mocap(text)
    assert exc.value.line == 4
    assert "line 4" in str(exc.value)


@pytest.mark.parametrize("bad, line", [
    ("0.004,0,0\n", 4),            # ragged
    ("0.004,0,nan,1.1\n", 4),      # NaN
])
def test_bad_rows(bad, line):
    text = MINIMAL.rsplit("\n", 2)[0] + "\n" + bad
    with pytest.raises(ParseError) as exc:
        parse_mocap(text)
    assert exc.value.line == line


def test_duplicate_marker():
    text = "#MOCAP v1,rate=250,units=m\nt,A_x,A_y,A_z,A_x,A_y,A_z\n0,1,2,3,4,5,6\n"
    with pytest.raises(ParseError, match="duplicate"):
        parse_mocap(text)


@pytest.mark.parametrize("first", ["MOCAP v1,rate=250,units=m", "#MOCAP v1,units=m",
                                   "#MOCAP v1,rate=250,units=mm", "#MOCAP v1,rate=-1,units=m"])
def test_bad_header(first):
    with pytest.raises(ParseError):
        parse_mocap(first + "\nt,A_x,A_y,A_z\n0,1,2,3\n")


def test_malformed_column_header():
    with pytest.raises(ParseError):
        parse_mocap("#MOCAP v1,rate=250,units=m\nt,A_x,A_y,B_z\n0,1,2,3\n")


def test_write_parse_roundtrip():
    rng = np.random.default_rng(0)
    seq = MoCapSequence(250.0, ("A", "B"), rng.normal(size=(7, 2, 3)), t0=1.5)
    back = parse_mocap(write_mocap(seq))
    assert back.markers == seq.markers
    assert back.t0 == seq.t0
    np.testing.assert_array_equal(back.positions, seq.positions)


def test_resample_count_matches_enumeration():
    seq = MoCapSequence(250.0, ("A",), np.zeros((251, 1, 3)))
    assert seq.duration == 1.0
    out = resample(seq, 256.0)
    # brute force: grid points k/256 inside the closed interval [0, 1]
    expected = sum(1 for k in range(10_000) if k / 256.0 <= 1.0)
    assert expected == 257
    assert out.n_samples == expected
    assert out.rate_hz == 256.0
    assert abs(out.duration - seq.duration) <= 1 / 256.0


def test_resample_identity():
    rng = np.random.default_rng(1)
    seq = MoCapSequence(250.0, ("A", "B"), rng.normal(size=(50, 2, 3)))
    out = resample(seq, 250.0)
    assert np.max(np.abs(out.positions - seq.positions)) < 1e-12


def test_resample_reproduces_line():
    t = np.arange(300) / 250.0
    v = np.array([0.7, -1.3, 0.2])
    seq = MoCapSequence(250.0, ("A",), (np.outer(t, v) + [1, 2, 3])[:, None, :])
    out = resample(seq, 256.0)
    expect = np.outer(np.arange(out.n_samples) / 256.0, v) + [1, 2, 3]
    assert np.max(np.abs(out.positions[:, 0] - expect)) < 1e-9


def test_resample_needs_two_samples():
    with pytest.raises(InsufficientDataError):
        resample(MoCapSequence(250.0, ("A",), np.zeros((1, 1, 3))), 256.0)


def test_radar_position_single_and_pair():
    pos = np.zeros((5, 3, 3))
    pos[:, 0] = (2, 0, 1)
    pos[:, 1] = (9, 9, 9)
    seq = MoCapSequence(100.0, ("RADAR1", "BODY", "RADAR2"), pos)
    pos2 = pos.copy()
    pos2[:, 2] = (2, 0, 1)
    np.testing.assert_allclose(radar_position(seq.with_positions(pos2)), (2, 0, 1))
    pos3 = np.zeros((4, 2, 3))
    pos3[:, 0] = (1, 0, 0)
    pos3[:, 1] = (3, 0, 0)
    seq3 = MoCapSequence(100.0, ("RADAR1", "RADAR2"), pos3)
    np.testing.assert_allclose(radar_position(seq3), (2, 0, 0))


def test_radar_position_six_markers_time_average():
    rng = np.random.default_rng(2)
    pos = rng.normal(size=(40, 8, 3))
    names = tuple(f"RADAR{i}" for i in range(1, 7)) + ("HEAD", "LANK")
    seq = MoCapSequence(250.0, names, pos)
    np.testing.assert_allclose(radar_position(seq), pos[:, :6].mean(axis=(0, 1)), atol=1e-12)
    # time reversal invariance
    rev = seq.with_positions(pos[::-1])
    np.testing.assert_allclose(radar_position(rev), radar_position(seq), atol=1e-12)


def test_radar_position_missing():
    with pytest.raises(ConfigError):
        radar_position(MoCapSequence(100.0, ("A",), np.zeros((2, 1, 3))))


def test_radar_config_wavelength():
    cfg = RadarConfig(carrier_hz=5.8e9)
    assert math.isclose(cfg.wavelength_m, 299_792_458 / 5.8e9, rel_tol=1e-12)
    assert SPEED_OF_LIGHT == 299_792_458.0
    with pytest.raises(ConfigError):
        RadarConfig(fs_hz=0)


def test_shipped_table_sums_to_100():
    total = 0.0
    for line in default_weights_text().splitlines():
        parts = line.split("#")[0].strip().split(",")
        if parts[0] == "segment":
            total += float(parts[2])
    assert total == 100.0


def test_load_weights_head_segment():
    table = load_weights(default_weights_text(), ["HEAD", "LANK"])
    assert table.entries["HEAD"] == 9.0
    assert table.entries["LANK"] == 18.0


def test_load_weights_even_split_and_missing():
    text = "segment,leg,18\nmarker,A,leg\nmarker,B,leg\n"
    table = load_weights(text, ["A", "B", "RADAR1"])
    assert table.entries == {"A": 9.0, "B": 9.0, "RADAR1": 0.0}
    assert len(table.warnings) == 1 and "RADAR1" in table.warnings[0]


@pytest.mark.parametrize("text", [
    "",
    "segment,leg,-1\nmarker,A,leg\n",
    "segment,leg,10\nmarker,A,arm\n",
    "segment,leg,10\nbogus,A,leg\n",
])
def test_load_weights_rejects(text):
    with pytest.raises(ConfigError):
        load_weights(text, ["A"])


def test_empty_file_message():
    with pytest.raises(ConfigError, match="at least one positive weight"):
        load_weights("# nothing here\n", ["A", "B"])


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.text("ABCDEFGH", min_size=1, max_size=4),
                       st.floats(0, 1e6), min_size=1, max_size=20))
def test_normalized_sums_to_one(entries):
    if not any(v > 0 for v in entries.values()):
        with pytest.raises(ConfigError):
            WeightTable(entries)
        return
    assert abs(sum(WeightTable(entries).normalized().values()) - 1.0) < 1e-9
