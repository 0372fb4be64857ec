import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from poseclone import io
from poseclone.cli import main
from poseclone.normalize import SkeletonSequence, align_sequence
from poseclone.pose import L_HIP, R_HIP, Skeleton
from poseclone.synthetic import horizontal_arm_pose, stick_figure, vertical_arm_repertoire


def write_seq(path, skeletons, h=256, w=256):
    io.write_skeletons(path, SkeletonSequence(tuple(skeletons), h, w))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_render_and_extract_round_trip(tmp_path, capsys):
    s = stick_figure(center=(64.0, 30.0), limb_length=12.0)
    # integer joints so the argmax recovers them exactly
    s = Skeleton(np.round(s.xy), s.confidence, s.present)
    skel = write_seq(tmp_path / "s.json", [s], h=128, w=128)
    code, out, _ = run(capsys, "render", skel, "--sigma", 2, "--out", tmp_path / "p.psq")
    assert code == 0 and out.strip() == "1"
    vol = io.read_pose_sequence(tmp_path / "p.psq")
    assert vol.shape == (1, 18, 128, 128)
    code, out, _ = run(capsys, "extract", tmp_path / "p.psq", "--out", tmp_path / "back.json")
    assert code == 0
    back = io.read_skeletons(tmp_path / "back.json")
    assert back.frames[0] == s


def test_render_errors(tmp_path, capsys):
    code, _, err = run(capsys, "render", tmp_path / "missing.json", "--out", tmp_path / "p.psq")
    assert code == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run(capsys, "render", bad, "--out", tmp_path / "p.psq")
    assert code == 2 and "invalid input" in err


def test_normalize(tmp_path, capsys):
    seq = [stick_figure(center=(100.0 + i, 80.0), hip_width=15.0) for i in range(6)]
    src = write_seq(tmp_path / "s.json", seq)
    code, out, _ = run(capsys, "normalize", src, "--target-hip-width", 45,
                       "--out", tmp_path / "a.json")
    assert code == 0
    tf = json.loads(out)
    assert tf["scale"] == pytest.approx(3.0, rel=1e-12)
    code, out, _ = run(capsys, "normalize", tmp_path / "a.json", "--target-hip-width", 45,
                       "--out", tmp_path / "b.json")
    tf = json.loads(out)
    assert tf["scale"] == pytest.approx(1.0, abs=1e-9)
    assert tf["translate"] == pytest.approx([0.0, 0.0], abs=1e-9)


def test_normalize_without_hips(tmp_path, capsys):
    joints = stick_figure().to_joints()
    joints[R_HIP] = joints[L_HIP] = None
    src = write_seq(tmp_path / "s.json", [Skeleton.from_joints(joints)])
    code, _, err = run(capsys, "normalize", src, "--target-hip-width", 30,
                       "--out", tmp_path / "a.json")
    assert code == 2 and "unalignable" in err


def test_coverage_identical(tmp_path, capsys):
    ref = write_seq(tmp_path / "r.json", vertical_arm_repertoire(15))
    code, out, _ = run(capsys, "coverage", ref, ref, "--json", tmp_path / "s.json")
    assert code == 0
    assert json.loads(out)["mean_distance"] == 0.0
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["summary"]["fraction_frames_with_any_flag"] == 0.0


def test_coverage_flags_horizontal_arms(tmp_path, capsys):
    ref = write_seq(tmp_path / "r.json", vertical_arm_repertoire(100))
    drv = write_seq(tmp_path / "d.json", [stick_figure(center=(128.0, 90.0)), horizontal_arm_pose()])
    code, _, _ = run(capsys, "coverage", drv, ref, "--gamma", 8, "--csv", tmp_path / "c.csv")
    assert code == 0
    with open(tmp_path / "c.csv") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["frame", "limb", "distance", "nn_frame", "flagged"]
    assert len(rows) == 24
    flagged = {(int(r["frame"]), int(r["limb"])) for r in rows if r["flagged"] == "1"}
    assert flagged == {(1, 1), (1, 2), (1, 4), (1, 5)}
    # distances in the CSV round-trip to float64
    assert all(float(r["distance"]) >= 0 for r in rows)

    code, out, _ = run(capsys, "coverage", drv, ref, "--gamma", "inf", "--csv", tmp_path / "c.csv")
    assert code == 0 and json.loads(out)["fraction_frames_with_any_flag"] == 0.0
    with open(tmp_path / "c.csv") as f:
        assert all(r["flagged"] == "0" for r in csv.DictReader(f))


def test_coverage_empty_sequence(tmp_path, capsys):
    empty = tmp_path / "e.json"
    empty.write_text(json.dumps({"width": 10, "height": 10, "frames": []}))
    ref = write_seq(tmp_path / "r.json", vertical_arm_repertoire(3))
    code, _, _ = run(capsys, "coverage", empty, ref)
    assert code == 2


def make_clip(tmp_path, frames, flows, skeletons):
    io.write_frame_dir(tmp_path / "frames", frames)
    (tmp_path / "flows").mkdir()
    for i, f in enumerate(flows):
        io.write_flo(tmp_path / "flows" / f"flow_{i:06d}.flo", f)
    write_seq(tmp_path / "s.json", skeletons, *frames[0].shape[:2])
    return tmp_path / "frames", tmp_path / "flows", tmp_path / "s.json"


def test_tc_loss_duplicate_frames(tmp_path, capsys):
    rng = np.random.default_rng(0)
    frame = rng.integers(0, 256, (32, 32, 3)).astype(np.uint8)
    skel = stick_figure(center=(16.0, 4.0), limb_length=6.0)
    args = make_clip(tmp_path, [frame] * 3, [np.zeros((32, 32, 2))] * 2, [skel] * 3)
    code, out, _ = run(capsys, "tc-loss", *args)
    assert code == 0
    doc = json.loads(out)
    assert doc["pairs"] == [0.0, 0.0] and doc["mean"] == 0.0


def test_tc_loss_shifted_frames(tmp_path, capsys):
    # frame i+1 shows the content of frame i moved 2 px left; a backward
    # flow of +2 in x registers them everywhere but the two clamped columns
    ys, xs = np.mgrid[0:32, 0:48]

    def render(shift):
        v = 128 + 100 * np.sin((xs + shift) / 5.0)[..., None] * np.array([1, 0.5, -0.5])
        return np.round(v).astype(np.uint8)

    frame0, frame1 = render(0), render(2)
    flow = np.zeros((32, 48, 2))
    flow[..., 0] = 2.0
    skel = stick_figure(center=(24.0, 4.0), limb_length=6.0)
    args = make_clip(tmp_path, [frame0, frame1], [flow], [skel, skel])
    code, out, _ = run(capsys, "tc-loss", *args, "--sigma-alpha", 5)
    assert code == 0
    registered = json.loads(out)["mean"]
    code, out, _ = run(capsys, "tc-loss", *args, "--sigma-alpha", 5, "--forward-flow")
    misregistered = json.loads(out)["mean"]
    assert registered < 0.05 * misregistered

    # with the border columns zero-weighted the loss vanishes exactly
    from poseclone.temporal import limb_weight_map, tc_loss
    alpha = limb_weight_map(skel, height=32, width=48, sigma_alpha=5.0)
    alpha[:, -2:] = 0
    assert tc_loss(frame0, frame1, flow, alpha) == 0.0


def test_tc_loss_count_mismatch(tmp_path, capsys):
    frame = np.zeros((8, 8, 3), np.uint8)
    args = make_clip(tmp_path, [frame] * 3, [np.zeros((8, 8, 2))] * 3, [stick_figure()] * 3)
    code, _, err = run(capsys, "tc-loss", *args)
    assert code == 2


def test_mse_and_split(tmp_path, capsys):
    rng = np.random.default_rng(1)
    a = [rng.integers(0, 240, (6, 7, 3)).astype(np.uint8) for _ in range(4)]
    io.write_frame_dir(tmp_path / "a", a)
    io.write_frame_dir(tmp_path / "b", [f + 10 for f in a])
    code, out, _ = run(capsys, "mse", tmp_path / "a", tmp_path / "a")
    assert code == 0 and json.loads(out)["mse"] == 0.0
    code, out, _ = run(capsys, "mse", tmp_path / "a", tmp_path / "b")
    assert json.loads(out)["mse"] == 100.0

    io.write_frame_dir(tmp_path / "c", [np.zeros((6, 8, 3), np.uint8)] * 4)
    code, _, _ = run(capsys, "mse", tmp_path / "a", tmp_path / "c")
    assert code == 2

    code, out, _ = run(capsys, "split", "--length", 3000)
    assert json.loads(out) == {"train": [0, 2000], "test": [2000, 3000]}
    code, out, _ = run(capsys, "split", "--frames-dir", tmp_path / "a", "--fraction", "1/2")
    assert json.loads(out) == {"train": [0, 2], "test": [2, 4]}
    code, _, _ = run(capsys, "split", "--length", 2)
    assert code == 2


def test_losses(capsys):
    code, out, _ = run(capsys, "losses", "--vgg", 1)
    assert code == 0 and json.loads(out)["total"] == 10.0
    code, out, _ = run(capsys, "losses", "--tc", 1)
    assert json.loads(out)["total"] == 1.0
    code, _, _ = run(capsys, "losses", "--tc", "nan")
    assert code == 2


def test_bad_arguments_exit_2(capsys):
    assert main(["coverage"]) == 2
    assert main(["no-such-command"]) == 2


def test_json_floats_round_trip(tmp_path, capsys):
    s = [stick_figure(center=(100.1, 80.3), hip_width=17.123456789)]
    src = write_seq(tmp_path / "s.json", s)
    _, out, _ = run(capsys, "normalize", src, "--target-hip-width", math.pi,
                    "--out", tmp_path / "a.json")
    _, tf = align_sequence(io.read_skeletons(src), math.pi)
    assert json.loads(out) == tf.to_dict()


def test_console_script_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "poseclone.cli", "split", "--length", "10"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["train"] == [0, 6]
