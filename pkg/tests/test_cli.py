import json
import math

import pytest

from vlmplan.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_manifest(path, entries):
    path.write_text("".join(json.dumps(e) + "\n" for e in entries))


def read_json(path):
    return json.loads(path.read_text())


IMAGE = {"kind": "image", "id": "img-a", "native_w": 1000, "native_h": 750}
VIDEO = {"kind": "video", "id": "vid-a", "duration": 200, "task_kind": "general", "aspect": 1.0}


def test_plan_single_image(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    out = tmp_path / "plan.json"
    write_manifest(manifest, [IMAGE])
    code, _, err = run(
        ["plan", "--manifest", str(manifest), "--max-len", "2048", "--out", str(out)], capsys
    )
    assert code == 0 and err == ""
    doc = read_json(out)
    assert doc["entries"][0]["token_count"] == 972
    assert doc["entries"][0]["target_w"] == 1008
    assert len(doc["pack"]["bins"]) == 1
    assert doc["pack"]["bins"][0]["items"] == [{"id": "img-a", "length": 972}]


def test_plan_single_video(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    out = tmp_path / "plan.json"
    write_manifest(manifest, [VIDEO])
    code, _, _ = run(
        ["plan", "--manifest", str(manifest), "--max-len", "100000", "--out", str(out)], capsys
    )
    assert code == 0
    entry = read_json(out)["entries"][0]
    assert entry["level"] == 384
    assert entry["total_tokens"] == 76800
    assert entry["fps"] == 1.0
    assert entry["frame_count"] == 200
    assert entry["timestamp_tokens"][0] == "[0.5 second]"
    assert entry["frame_w"] % 28 == 0 and entry["frame_h"] % 28 == 0


def test_plan_empty_manifest(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    manifest.write_text("")
    out = tmp_path / "plan.json"
    code, _, _ = run(
        ["plan", "--manifest", str(manifest), "--max-len", "64", "--out", str(out)], capsys
    )
    assert code == 0
    assert read_json(out) == {"entries": [], "pack": {"bins": [], "max_len": 64}}


def test_plan_image_boxes_become_regions(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    out = tmp_path / "plan.json"
    entry = dict(IMAGE, boxes=[[0, 0, 1000, 750], [250, 250, 750, 500]])
    write_manifest(manifest, [entry])
    code, _, _ = run(
        ["plan", "--manifest", str(manifest), "--max-len", "2048", "--out", str(out)], capsys
    )
    assert code == 0
    regions = read_json(out)["entries"][0]["regions"]
    assert regions == ["<bbox>0 0 999 999</bbox>", "<bbox>250 333 749 666</bbox>"]


def test_plan_malformed_boxes(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    out = tmp_path / "plan.json"
    write_manifest(manifest, [dict(IMAGE, boxes=[[1, 2, 3]])])
    code, _, err = run(
        ["plan", "--manifest", str(manifest), "--max-len", "2048", "--out", str(out)], capsys
    )
    assert code == 2 and "boxes" in err
    write_manifest(manifest, [dict(IMAGE, boxes=[[1, 2, "3", 4]])])
    code, _, err = run(
        ["plan", "--manifest", str(manifest), "--max-len", "2048", "--out", str(out)], capsys
    )
    assert code == 2 and "boxes" in err


def test_iosim_rejects_negative_image_bytes(tmp_path, capsys):
    code, _, err = run(
        ["iosim", "--dp", "1", "--pp", "1", "--tp", "1", "--bytes-per-rank", "10",
         "--image-bytes", "5,-3", "--out", str(tmp_path / "x.json")], capsys
    )
    assert code == 1 and err.startswith("error: usage:")


def test_plan_malformed_line_names_line_number(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    manifest.write_text(json.dumps(IMAGE) + "\n{not json\n")
    out = tmp_path / "plan.json"
    code, _, err = run(
        ["plan", "--manifest", str(manifest), "--max-len", "2048", "--out", str(out)], capsys
    )
    assert code == 2
    assert err.startswith("error: data:")
    assert ":2:" in err
    assert err.count("\n") == 1


def test_plan_oversize_item_names_id(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    write_manifest(manifest, [IMAGE])
    out = tmp_path / "plan.json"
    code, _, err = run(
        ["plan", "--manifest", str(manifest), "--max-len", "100", "--out", str(out)], capsys
    )
    assert code == 2
    assert "img-a" in err


def test_plan_duplicate_id(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    write_manifest(manifest, [IMAGE, IMAGE])
    out = tmp_path / "plan.json"
    code, _, err = run(
        ["plan", "--manifest", str(manifest), "--max-len", "2048", "--out", str(out)], capsys
    )
    assert code == 2 and "duplicate" in err


def test_plan_unknown_kind(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    write_manifest(manifest, [{"kind": "audio", "id": "x"}])
    out = tmp_path / "plan.json"
    code, _, err = run(
        ["plan", "--manifest", str(manifest), "--max-len", "2048", "--out", str(out)], capsys
    )
    assert code == 2 and "audio" in err


def test_plan_budget_flag_forces_fallback(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    out = tmp_path / "plan.json"
    write_manifest(manifest, [VIDEO])
    code, _, _ = run(
        ["plan", "--manifest", str(manifest), "--max-len", "100000",
         "--budget", "12800", "--out", str(out)], capsys
    )
    assert code == 0
    entry = read_json(out)["entries"][0]
    assert entry["fallback_applied"] is True
    assert entry["total_tokens"] <= 12800


def test_plan_config_file(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    out = tmp_path / "plan.json"
    cfg = tmp_path / "planner.toml"
    cfg.write_text("[fps]\ngeneral = 2.0\n")
    write_manifest(manifest, [VIDEO])
    code, _, _ = run(
        ["plan", "--manifest", str(manifest), "--max-len", "100000",
         "--config", str(cfg), "--out", str(out)], capsys
    )
    assert code == 0
    entry = read_json(out)["entries"][0]
    assert entry["fps"] == 2.0
    assert entry["frame_count"] == 400


def make_plan_file(path, patch_counts):
    entries = [
        {"kind": "image", "id": f"img{i}", "patch_count": n, "token_count": n // 4}
        for i, n in enumerate(patch_counts)
    ]
    path.write_text(json.dumps({"entries": entries, "pack": {"bins": [], "max_len": 1}}))


def test_balance_lpt_loads(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    out = tmp_path / "assign.json"
    make_plan_file(plan, [40, 28, 20, 12])
    code, _, _ = run(
        ["balance", "--plan", str(plan), "--devices", "2",
         "--cost-alpha", "1", "--cost-beta", "0", "--out", str(out)], capsys
    )
    assert code == 0
    doc = read_json(out)
    assert [d["load"] for d in doc["devices"]] == [52, 48]
    assert doc["imbalance"] == 1.04
    assert doc["makespan"] == 52


def test_balance_single_device(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    out = tmp_path / "assign.json"
    make_plan_file(plan, [40, 28])
    code, _, _ = run(
        ["balance", "--plan", str(plan), "--devices", "1",
         "--cost-alpha", "1", "--cost-beta", "0", "--out", str(out)], capsys
    )
    assert code == 0
    doc = read_json(out)
    assert len(doc["devices"]) == 1
    assert doc["imbalance"] == 1.0
    assert sorted(doc["devices"][0]["items"]) == ["img0", "img1"]


def test_balance_group_size_divisibility(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    make_plan_file(plan, [40])
    code, _, err = run(
        ["balance", "--plan", str(plan), "--devices", "4", "--group-size", "3",
         "--out", str(tmp_path / "x.json")], capsys
    )
    assert code == 1
    assert err.startswith("error: usage:")


def test_balance_empty_plan(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    make_plan_file(plan, [])
    out = tmp_path / "assign.json"
    code, _, _ = run(
        ["balance", "--plan", str(plan), "--devices", "2", "--out", str(out)], capsys
    )
    assert code == 0
    doc = read_json(out)
    assert doc["imbalance"] is None and doc["makespan"] == 0


def test_balance_video_entries_use_prepool_patches(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    entries = [{"kind": "video", "id": "v0", "total_tokens": 100}]
    plan.write_text(json.dumps({"entries": entries}))
    out = tmp_path / "assign.json"
    code, _, _ = run(
        ["balance", "--plan", str(plan), "--devices", "1",
         "--cost-alpha", "1", "--cost-beta", "0", "--out", str(out)], capsys
    )
    assert code == 0
    assert read_json(out)["devices"][0]["load"] == 400


def test_balance_bad_plan_file(tmp_path, capsys):
    plan = tmp_path / "plan.json"
    plan.write_text("{}")
    code, _, err = run(
        ["balance", "--plan", str(plan), "--devices", "2", "--out", str(tmp_path / "x")],
        capsys,
    )
    assert code == 2 and "entries" in err


def write_csv(path, rows, header=("x", "y")):
    path.write_text(",".join(header) + "\n" + "".join(f"{a},{b}\n" for a, b in rows))


def test_fit_power_law_recovers_reference_line(tmp_path, capsys):
    csv_path = tmp_path / "loss.csv"
    out = tmp_path / "fit.json"
    tokens = [10.0**k for k in range(9, 14)]
    rows = [(d, math.exp(-0.7011) * d**-0.1817) for d in tokens]
    write_csv(csv_path, rows, header=("tokens", "loss"))
    code, _, _ = run(
        ["fit", "--csv", str(csv_path), "--mode", "power_law", "--out", str(out)], capsys
    )
    assert code == 0
    doc = read_json(out)
    assert doc["slope"] == pytest.approx(-0.1817, abs=1e-9)
    assert doc["intercept"] == pytest.approx(-0.7011, abs=1e-9)
    assert doc["points"] == 5


def test_fit_metric_mode(tmp_path, capsys):
    csv_path = tmp_path / "metric.csv"
    out = tmp_path / "fit.json"
    write_csv(csv_path, [(1.0, 2.0), (math.e, 5.0)], header=("loss", "metric"))
    code, _, _ = run(
        ["fit", "--csv", str(csv_path), "--mode", "metric", "--out", str(out)], capsys
    )
    assert code == 0
    doc = read_json(out)
    assert doc["slope"] == pytest.approx(3.0, abs=1e-9)
    assert doc["intercept"] == pytest.approx(2.0, abs=1e-9)


def test_fit_single_row_fails(tmp_path, capsys):
    csv_path = tmp_path / "one.csv"
    write_csv(csv_path, [(1.0, 2.0)])
    code, _, err = run(
        ["fit", "--csv", str(csv_path), "--mode", "metric", "--out", str(tmp_path / "x")],
        capsys,
    )
    assert code == 2 and err.startswith("error: data:")


def test_fit_degenerate_xs(tmp_path, capsys):
    csv_path = tmp_path / "flat.csv"
    write_csv(csv_path, [(2.0, 1.0), (2.0, 3.0)])
    code, _, err = run(
        ["fit", "--csv", str(csv_path), "--mode", "metric", "--out", str(tmp_path / "x")],
        capsys,
    )
    assert code == 2 and "identical" in err


def test_fit_rejects_non_numeric(tmp_path, capsys):
    csv_path = tmp_path / "bad.csv"
    csv_path.write_text("x,y\n1.0,oops\n2.0,3.0\n")
    code, _, err = run(
        ["fit", "--csv", str(csv_path), "--mode", "metric", "--out", str(tmp_path / "x")],
        capsys,
    )
    assert code == 2 and ":2:" in err


def test_iosim_report(tmp_path, capsys):
    out = tmp_path / "io.json"
    code, _, _ = run(
        ["iosim", "--dp", "2", "--pp", "4", "--tp", "1", "--bytes-per-rank", "200",
         "--image-bytes", "100,100,100,100,100,100,100,100", "--out", str(out)], capsys
    )
    assert code == 0
    doc = read_json(out)
    assert doc["naive_read_bytes"] == 1600
    assert doc["optimized_read_bytes"] == 400
    assert doc["broadcast_messages"] == 6
    assert doc["pcie_bytes_after_filter"] == 100  # 800 bytes over world=8


def test_usage_errors_exit_1(tmp_path, capsys):
    code, _, err = run(["plan", "--max-len", "64", "--out", "x"], capsys)  # no manifest
    assert code == 1 and err.startswith("error: usage:")
    code, _, err = run(["fit", "--csv", "x", "--mode", "banana", "--out", "y"], capsys)
    assert code == 1
    code, _, err = run(["frobnicate"], capsys)
    assert code == 1


def test_missing_input_file_exits_2(tmp_path, capsys):
    code, _, err = run(
        ["plan", "--manifest", str(tmp_path / "nope.jsonl"), "--max-len", "64",
         "--out", str(tmp_path / "x")], capsys
    )
    assert code == 2 and err.startswith("error: data:")


def test_outputs_are_byte_identical_across_runs(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    write_manifest(manifest, [IMAGE, VIDEO, dict(IMAGE, id="img-b", native_w=333, native_h=222)])
    out1, out2 = tmp_path / "p1.json", tmp_path / "p2.json"
    for out in (out1, out2):
        code, _, _ = run(
            ["plan", "--manifest", str(manifest), "--max-len", "100000", "--out", str(out)],
            capsys,
        )
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()

    assign1, assign2 = tmp_path / "a1.json", tmp_path / "a2.json"
    for out in (assign1, assign2):
        code, _, _ = run(
            ["balance", "--plan", str(out1), "--devices", "2", "--out", str(out)], capsys
        )
        assert code == 0
    assert assign1.read_bytes() == assign2.read_bytes()
