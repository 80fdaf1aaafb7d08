"""Command-line front end.

Subcommands:
    plan     JSONL manifest of images/videos -> per-entry plans + pack plan (JSON)
    balance  plan JSON -> device assignment with loads and imbalance (JSON)
    fit      two-column CSV -> line fit in the requested coordinates (JSON)
    iosim    topology + byte counts -> data-loading savings report (JSON)

Exit codes: 0 success, 1 usage error (bad or inconsistent flags), 2 data
error (unreadable or invalid input files, infeasible items). Every failure
prints a single line ``error: <category>: <message>`` on stderr. Outputs are
byte-stable: sorted keys, two-space indent, floats at 9 significant digits.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import replace

from .balance import WorkItem, group_balance, imbalance
from .config import PlannerConfig, default_config, load_config
from .errors import PlanningError, UndefinedMetricError
from .geometry import CostModel, flops_cost, plan_image
from .loadsim import Topology, simulate_io
from .packing import PackItem, pack_ffd
from .regions import emit_region, normalize_box
from .scaling import fit_line
from .video import choose_fps, level_to_dims, plan_video, timestamp_token

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage problems; route them to exit 1.
    def error(self, message):
        raise UsageError(message)


def _one_line(exc) -> str:
    return " ".join(str(exc).split())


def _round_floats(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {key: _round_floats(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(value) for value in obj]
    return obj


def _write_json(doc, path: str) -> None:
    text = json.dumps(_round_floats(doc), sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_planner_config(args) -> PlannerConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return default_config()


# ---------------------------------------------------------------------------
# plan


def _read_manifest(path: str):
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: bad JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise DataError(f"{path}:{lineno}: entry must be a JSON object")
            entries.append((lineno, obj))
    return entries


def _require(entry, lineno, path, key, kinds):
    if key not in entry:
        raise DataError(f"{path}:{lineno}: missing {key!r}")
    value = entry[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise DataError(f"{path}:{lineno}: {key!r} has wrong type")
    return value


def _plan_entry(entry, lineno, path, policy):
    kind = _require(entry, lineno, path, "kind", str)
    entry_id = _require(entry, lineno, path, "id", str)
    try:
        if kind == "image":
            w = _require(entry, lineno, path, "native_w", int)
            h = _require(entry, lineno, path, "native_h", int)
            plan = plan_image(w, h)
            out = {
                "id": entry_id,
                "kind": "image",
                "native_w": plan.native_w,
                "native_h": plan.native_h,
                "target_w": plan.target_w,
                "target_h": plan.target_h,
                "patch_grid_w": plan.patch_grid_w,
                "patch_grid_h": plan.patch_grid_h,
                "patch_count": plan.patch_count,
                "token_count": plan.token_count,
            }
            if "boxes" in entry:
                boxes = entry["boxes"]
                if not isinstance(boxes, list) or not all(
                    isinstance(box, list)
                    and len(box) == 4
                    and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in box)
                    for box in boxes
                ):
                    raise DataError(
                        f"{path}:{lineno}: 'boxes' must be a list of [x1, y1, x2, y2]"
                    )
                out["regions"] = [
                    emit_region(normalize_box(tuple(box), w, h)) for box in boxes
                ]
            return out, plan.token_count
        if kind == "video":
            duration = _require(entry, lineno, path, "duration", (int, float))
            task_kind = _require(entry, lineno, path, "task_kind", str)
            aspect = _require(entry, lineno, path, "aspect", (int, float))
            fps = choose_fps(task_kind, policy)
            plan = plan_video(duration, fps, policy)
            frame_w, frame_h = level_to_dims(plan.level, aspect)
            out = {
                "id": entry_id,
                "kind": "video",
                "duration": float(duration),
                "task_kind": task_kind,
                "fps": fps,
                "level": plan.level,
                "frame_count": plan.frame_count,
                "total_tokens": plan.total_tokens,
                "fallback_applied": plan.fallback_applied,
                "frame_w": frame_w,
                "frame_h": frame_h,
                "frame_times": list(plan.frame_times),
                "timestamp_tokens": [timestamp_token(t) for t in plan.frame_times],
            }
            return out, plan.total_tokens
    except PlanningError as exc:
        raise DataError(f"{path}:{lineno}: {_one_line(exc)}") from None
    raise DataError(f"{path}:{lineno}: unknown kind {kind!r}")


def cmd_plan(args) -> int:
    if args.max_len < 1:
        raise UsageError("--max-len must be positive")
    cfg = _load_planner_config(args)
    policy = cfg.policy
    if args.budget is not None:
        try:
            policy = replace(policy, budget=args.budget)
        except PlanningError as exc:
            raise UsageError(f"--budget: {_one_line(exc)}") from None
    manifest = _read_manifest(args.manifest)
    entries = []
    pack_items = []
    seen_ids = set()
    for lineno, raw in manifest:
        out, tokens = _plan_entry(raw, lineno, args.manifest, policy)
        if out["id"] in seen_ids:
            raise DataError(f"{args.manifest}:{lineno}: duplicate id {out['id']!r}")
        seen_ids.add(out["id"])
        entries.append(out)
        pack_items.append(PackItem(id=out["id"], length=tokens))
    plan = pack_ffd(pack_items, args.max_len)
    doc = {
        "entries": entries,
        "pack": {
            "max_len": plan.max_len,
            "bins": [
                {
                    "items": [{"id": it.id, "length": it.length} for it in contents],
                    "segment_ends": list(plan.segment_ends[b]),
                    "used": plan.bin_length(b),
                    "free": plan.free_capacity(b),
                }
                for b, contents in enumerate(plan.bins)
            ],
        },
    }
    _write_json(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# balance


def _read_plan(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: bad JSON ({exc.msg})") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise DataError(f"{path}: not a plan file (missing 'entries')")
    return doc


def cmd_balance(args) -> int:
    if args.devices < 1:
        raise UsageError("--devices must be positive")
    group_size = args.group_size if args.group_size is not None else args.devices
    if group_size < 1 or args.devices % group_size != 0:
        raise UsageError(
            f"--group-size {group_size} must divide --devices {args.devices}"
        )
    cfg = _load_planner_config(args)
    alpha = args.cost_alpha if args.cost_alpha is not None else cfg.cost_model.alpha
    beta = args.cost_beta if args.cost_beta is not None else cfg.cost_model.beta
    if alpha < 0 or beta < 0 or (alpha == 0 and beta == 0):
        raise UsageError("cost coefficients must be non-negative and not both zero")
    model = CostModel(alpha=alpha, beta=beta)
    doc = _read_plan(args.plan)
    items = []
    for i, entry in enumerate(doc["entries"]):
        try:
            if entry["kind"] == "image":
                patches = entry["patch_count"]
            elif entry["kind"] == "video":
                # Four pre-pool patches back every post-pool token.
                patches = 4 * entry["total_tokens"]
            else:
                raise DataError(f"{args.plan}: entry {i}: unknown kind")
            items.append(
                WorkItem(
                    id=entry["id"],
                    cost=flops_cost(model, patches),
                    origin_rank=i % args.devices,
                )
            )
        except (KeyError, TypeError):
            raise DataError(f"{args.plan}: entry {i}: malformed plan entry") from None
    assignment = group_balance(items, args.devices, group_size)
    try:
        ratio = imbalance(assignment)
    except UndefinedMetricError:
        ratio = None
    out = {
        "device_count": args.devices,
        "group_size": group_size,
        "cost_alpha": alpha,
        "cost_beta": beta,
        "devices": [
            {"rank": d, "items": list(ids), "load": load}
            for d, (ids, load) in enumerate(zip(assignment.device_items, assignment.loads))
        ],
        "makespan": max(assignment.loads),
        "imbalance": ratio,
    }
    _write_json(out, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit


def _read_csv(path: str):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty CSV") from None
        if len(header) != 2:
            raise DataError(f"{path}: expected two columns, header has {len(header)}")
        rows = []
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{i}: expected two columns")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                raise DataError(f"{path}:{i}: non-numeric value") from None
    if len(rows) < 2:
        raise DataError(f"{path}: need at least two data rows, found {len(rows)}")
    return rows


def cmd_fit(args) -> int:
    rows = _read_csv(args.csv)
    if any(x <= 0 for x, _ in rows):
        raise DataError(f"{args.csv}: first column must be positive to take logs")
    xs = [math.log(x) for x, _ in rows]
    if args.mode == "power_law":
        if any(y <= 0 for _, y in rows):
            raise DataError(f"{args.csv}: second column must be positive to take logs")
        ys = [math.log(y) for _, y in rows]
    else:
        ys = [y for _, y in rows]
    slope, intercept = fit_line(xs, ys)
    _write_json(
        {"mode": args.mode, "slope": slope, "intercept": intercept, "points": len(rows)},
        args.out,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# iosim


def cmd_iosim(args) -> int:
    if args.bytes_per_rank < 0:
        raise UsageError("--bytes-per-rank must be non-negative")
    try:
        image_bytes = [int(part) for part in args.image_bytes.split(",")] if args.image_bytes else []
    except ValueError:
        raise UsageError("--image-bytes must be comma-separated integers") from None
    if any(b < 0 for b in image_bytes):
        raise UsageError("--image-bytes values must be non-negative")
    topology = Topology(dp=args.dp, pp=args.pp, tp=args.tp)
    report = simulate_io(topology, args.bytes_per_rank, image_bytes)
    out = {
        "dp": args.dp,
        "pp": args.pp,
        "tp": args.tp,
        "world": topology.world,
        "naive_read_bytes": report.naive_read_bytes,
        "optimized_read_bytes": report.optimized_read_bytes,
        "broadcast_messages": report.broadcast_messages,
        "pcie_bytes_before_filter": report.pcie_bytes_before_filter,
        "pcie_bytes_after_filter": report.pcie_bytes_after_filter,
        "pcie_bytes_per_device": list(report.pcie_bytes_per_device),
        "prefetch_overlap": report.prefetch_overlap,
    }
    _write_json(out, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vlmplan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("plan", help="plan a JSONL manifest and pack token runs")
    p.add_argument("--manifest", required=True, help="JSONL manifest, one entry per line")
    p.add_argument("--budget", type=int, default=None, help="video token budget override")
    p.add_argument("--max-len", type=int, required=True, help="packed sequence capacity")
    p.add_argument("--out", required=True, help="output plan JSON path")
    p.add_argument("--config", default=None, help="TOML defaults file")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("balance", help="assign planned items to devices by cost")
    p.add_argument("--plan", required=True, help="plan JSON from the plan command")
    p.add_argument("--devices", type=int, required=True, help="device count")
    p.add_argument("--group-size", type=int, default=None,
                   help="balance within contiguous groups of this many devices (default: all)")
    p.add_argument("--cost-alpha", type=float, default=None, help="flops per patch")
    p.add_argument("--cost-beta", type=float, default=None, help="flops per patch pair")
    p.add_argument("--out", required=True, help="output assignment JSON path")
    p.add_argument("--config", default=None, help="TOML defaults file")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("fit", help="least-squares line fit over a two-column CSV")
    p.add_argument("--csv", required=True, help="CSV with header: (tokens, loss) or (loss, metric)")
    p.add_argument("--mode", choices=("power_law", "metric"), required=True,
                   help="power_law logs both columns; metric logs only the first")
    p.add_argument("--out", required=True, help="output fit JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("iosim", help="data-loading savings for a device topology")
    p.add_argument("--dp", type=int, required=True, help="data-parallel width")
    p.add_argument("--pp", type=int, required=True, help="pipeline-parallel depth")
    p.add_argument("--tp", type=int, required=True, help="tensor-parallel width")
    p.add_argument("--bytes-per-rank", type=int, required=True,
                   help="bytes one data-parallel replica reads per batch")
    p.add_argument("--image-bytes", default="",
                   help="comma-separated decoded image sizes to shard")
    p.add_argument("--out", required=True, help="output report JSON path")
    p.set_defaults(func=cmd_iosim)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: usage: {_one_line(exc)}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, PlanningError, OSError) as exc:
        print(f"error: data: {_one_line(exc)}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
