"""Command-line entry point: map generation, dataset export, closed-loop
runs, offline evaluation, replay, and the interactive server."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

from . import drive as drv
from .net import (MSG_CONTROL, MSG_FRAME, MSG_GOAL, MSG_STATE, CH_RGB8,
                  SimServer, encode_frame_payload, message)
from .physics import CarState, ControlInput, SimClock, step_car
from .render import BBox
from .replay import replay_file
from .simlog import SimLog
from .trackbench import (evaluate, export_tracking_dataset, make_tracker,
                         run_online)
from .worldmap import (MapError, apply_obstacle_reroutes, extract_path_network,
                       generate_random_map, load_map, map_digest, save_map)


class CliError(Exception):
    def __init__(self, msg: str, code: int = 1):
        super().__init__(msg)
        self.exit_code = code


def _echo_config(args: argparse.Namespace, out_dir: Path | None) -> None:
    cfg = {k: (str(v) if isinstance(v, Path) else v)
           for k, v in sorted(vars(args).items()) if k != "func"}
    text = json.dumps(cfg, indent=2, sort_keys=True)
    print(f"effective-config: {text}")
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "effective-config.json").write_text(text + "\n")


def _parse_size(s: str) -> tuple:
    try:
        w, h = s.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise CliError(f"--size must be WxH, got {s!r}", 2) from None


def _load_map_arg(path: str):
    try:
        return load_map(path)
    except FileNotFoundError:
        raise CliError(f"map file not found: {path}") from None
    except MapError as exc:
        raise CliError(f"invalid map {path}: {exc}") from None


# ------------------------------------------------------------ subcommands

def cmd_gen_map(args) -> int:
    w, h = _parse_size(args.size)
    m = generate_random_map(args.seed, w, h, style=args.style,
                            obstacle_density=args.obstacles)
    save_map(m, args.out)
    _echo_config(args, None)
    print(f"wrote {args.out} (sha256 {map_digest(m)[:16]})")
    return 0


def cmd_export_tracking(args) -> int:
    grid = _load_map_arg(args.map)
    out = Path(args.out)
    _echo_config(args, out)
    result = export_tracking_dataset(grid, args.speed, out,
                                     max_frames=args.frames)
    print(f"exported {len(result.log.records)} frames to {out} "
          f"(status {result.status})")
    return 0


def cmd_export_driving(args) -> int:
    maps = []
    for p in args.maps:
        maps.append((Path(p).stem, _load_map_arg(p)))
    aug = _parse_aug(args.aug)
    out = Path(args.out)
    _echo_config(args, out)
    rows = drv.export_driving_dataset(
        maps, out, step_straight=args.step_straight, step_turn=args.step_turn,
        augmentation=aug, with_goals=args.goals, seed=args.seed)
    print(f"exported {len(rows)} samples to {out}")
    return 0


def _parse_aug(spec: str) -> drv.AugmentationConfig:
    kind, _, arg = spec.partition(":")
    if kind == "random":
        return drv.AugmentationConfig(mode="random",
                                      views=int(arg) if arg else 1)
    if kind == "fixed":
        if not arg.startswith("yaw="):
            raise CliError("fixed augmentation must be fixed:yaw=a,b,...", 2)
        offsets = tuple((0.0, math.radians(float(v)))
                        for v in arg[4:].split(","))
        return drv.AugmentationConfig(mode="fixed", fixed_offsets=offsets)
    raise CliError(f"unknown augmentation spec {spec!r}", 2)


def cmd_run_track(args) -> int:
    grid = _load_map_arg(args.map)
    try:
        tracker = make_tracker(args.tracker)
    except ValueError as exc:
        raise CliError(str(exc), 2) from None
    _echo_config(args, None)
    result = run_online(grid, tracker, args.speed)
    if args.log:
        result.log.save(args.log)
    if args.metrics and result.metrics is not None:
        Path(args.metrics).write_text(json.dumps({
            **result.metrics.to_dict(),
            "completion": result.completion,
            "status": result.status}, indent=2, sort_keys=True) + "\n")
    print(f"status {result.status}, completion {result.completion:.3f}")
    return 0


def _read_bbox_csv(path: str) -> list:
    boxes = []
    try:
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                if row["x"] == "":
                    boxes.append(None)
                else:
                    boxes.append(BBox(float(row["x"]), float(row["y"]),
                                      float(row["w"]), float(row["h"])))
    except (FileNotFoundError, KeyError, ValueError) as exc:
        raise CliError(f"bad annotation file {path}: {exc}") from None
    return boxes


def cmd_eval_track(args) -> int:
    gt = _read_bbox_csv(args.gt)
    pred = _read_bbox_csv(args.pred)
    if len(gt) != len(pred):
        raise CliError(f"length mismatch: {len(gt)} gt vs {len(pred)} pred")
    if any(b is None for b in gt):
        raise CliError("ground-truth file contains missing boxes")
    _echo_config(args, None)
    metrics = evaluate(gt, pred)
    Path(args.out).write_text(metrics.curves_csv())
    summary = Path(args.out).with_suffix(".json")
    summary.write_text(metrics.to_json() + "\n")
    print(f"precision AUC {metrics.precision_auc:.4f}, "
          f"success AUC {metrics.success_auc:.4f}")
    return 0


def cmd_run_drive(args) -> int:
    grid = _load_map_arg(args.map)
    network = extract_path_network(grid)
    path = apply_obstacle_reroutes(network)
    name, _, arg = args.agent.partition(":")
    if name == "oracle":
        agent = drv.OracleDriver(path, network.left_pathway)
    elif name == "oracle-noisy":
        agent = drv.OracleDriver(path, network.left_pathway,
                                 sigma=float(arg or 0.25), seed=args.seed)
    else:
        raise CliError(f"unknown agent {args.agent!r} (external agents "
                       "connect through the `serve` subcommand)", 2)
    _echo_config(args, None)
    result = drv.run_driving_episode(
        path, agent, target_speed=args.speed,
        header_extra={"map_sha": map_digest(grid)})
    if args.log:
        result.log.save(args.log)
    if args.score and result.score is not None:
        Path(args.score).write_text(json.dumps({
            **result.score.to_dict(),
            "completion": result.completion,
            "status": result.status}, indent=2, sort_keys=True) + "\n")
    line = f"status {result.status}, completion {result.completion:.3f}"
    if result.score is not None:
        line += f", mean deviation {result.score.mean_deviation:.3f} m"
    print(line)
    return 0


def cmd_replay(args) -> int:
    grid = _load_map_arg(args.map)
    _echo_config(args, None)
    if args.score:
        from .drive import score_deviations
        from .simlog import SimLog
        log, _ = SimLog.load(args.log)
        deviations = [r["deviation"] for r in log.records
                      if r.get("deviation") is not None]
        if not deviations:
            raise CliError(f"{args.log}: no deviation records to score")
        score = score_deviations(deviations)
        Path(args.score).write_text(
            json.dumps(score.to_dict(), indent=2, sort_keys=True) + "\n")
        print(f"scored {len(deviations)} frames, "
              f"mean deviation {score.mean_deviation:.3f} m")
    n, truncated = replay_file(args.log, grid, args.render_out)
    note = " (log truncated; stopped at last valid record)" if truncated else ""
    print(f"replayed {n} frames{note}")
    return 0


def cmd_serve(args) -> int:
    grid = _load_map_arg(args.map)
    network = extract_path_network(grid)
    path = apply_obstacle_reroutes(network)
    _echo_config(args, None)
    from .render import (CameraIntrinsics, Renderer, build_static_scene,
                         car_forward_camera)
    intr = CameraIntrinsics()
    renderer = Renderer(intr)
    static = build_static_scene(grid, network)
    server = SimServer()
    stream_port = server.listen_stream(port=args.stream_port)
    ws_port = server.listen_ws(port=args.msg_port)
    print(f"serving map {args.map} on stream:{stream_port} ws:{ws_port}",
          flush=True)
    clock = SimClock()
    car = CarState(pose=path.pose_at(0.0), speed=0.0)
    control = ControlInput(0.0, 0.0)
    goal = 0
    deviations = []
    try:
        # Inputs are taken right after the frame-boundary sleep, so a client
        # reacting to the previous STATE has the whole frame period for its
        # message to land (goal/control round-trip stays within one frame).
        # The goal mailbox is drained a second time just before STATE goes
        # out: a goal sent in reaction to STATE(n) is then reflected in
        # STATE(n+1) even when rendering consumes the entire frame budget.
        deadline = time.monotonic()
        while True:
            now = time.monotonic()
            if now < deadline:
                time.sleep(deadline - now)
            deadline = max(deadline + clock.frame_period, time.monotonic())
            server.set_frame(clock.frame_index)
            msg = server.take(MSG_CONTROL)
            if msg is not None:
                obj = msg.json()
                control = ControlInput(obj["steering"], obj["throttle"]).clamped()
            gmsg = server.take(MSG_GOAL)
            if gmsg is not None:
                goal = int(gmsg.json()["value"])
            for _ in range(clock.substeps):
                car = step_car(car, control, clock.substep_dt)
            s, deviation = path.project(car.pose.x, car.pose.y)
            deviations.append(deviation)
            frame = renderer.render(static.tris, static.colors, static.ids,
                                    car_forward_camera(car.pose),
                                    channels=("rgb",))
            gmsg = server.take(MSG_GOAL)
            if gmsg is not None:
                goal = int(gmsg.json()["value"])
            server.publish(message(
                MSG_FRAME,
                payload=encode_frame_payload(
                    clock.frame_index, clock.sim_time, intr.width,
                    intr.height, CH_RGB8, frame.rgb.tobytes())))
            server.publish(message(MSG_STATE, {
                "frame": clock.frame_index, "t": clock.sim_time,
                "car": {"x": car.pose.x, "y": car.pose.y,
                        "psi": car.pose.heading, "v": car.speed},
                "s": s, "deviation": deviation,
                "mean_deviation": sum(deviations) / len(deviations),
                "goal": goal,
            }))
            clock.advance()
    except KeyboardInterrupt:
        print("interrupted")
    finally:
        server.close()
    return 0


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="desksim",
                                description=__doc__.split("\n")[0])
    p.add_argument("--json-errors", action="store_true",
                   help="emit machine-readable errors on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-map", help="generate a random map file")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--size", default="8x8", help="grid size WxH")
    g.add_argument("--style", choices=("desert", "urban"), default="desert")
    g.add_argument("--obstacles", type=float, default=0.0,
                   help="obstacle density in [0, 1]")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_map)

    g = sub.add_parser("export-tracking", help="export a tracking sequence")
    g.add_argument("--map", required=True)
    g.add_argument("--speed", type=float, default=6.0)
    g.add_argument("--frames", type=int, default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_export_tracking)

    g = sub.add_parser("export-driving", help="export a driving dataset")
    g.add_argument("--maps", nargs="+", required=True)
    g.add_argument("--step-straight", type=float, default=drv.STEP_STRAIGHT)
    g.add_argument("--step-turn", type=float, default=drv.STEP_TURN)
    g.add_argument("--aug", default="random:1",
                   help="random:<n> or fixed:yaw=<deg>,<deg>,...")
    g.add_argument("--goals", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_export_driving)

    g = sub.add_parser("run-track", help="closed-loop online tracking run")
    g.add_argument("--map", required=True)
    g.add_argument("--speed", type=float, choices=(4.0, 6.0, 8.0), default=6.0)
    g.add_argument("--tracker", default="gt",
                   help="gt | delay:<ms> | noisy:<sigma> | ncc[:<window>]")
    g.add_argument("--log")
    g.add_argument("--metrics")
    g.set_defaults(func=cmd_run_track)

    g = sub.add_parser("eval-track", help="offline tracking evaluation")
    g.add_argument("--gt", required=True)
    g.add_argument("--pred", required=True)
    g.add_argument("--out", required=True, help="curves CSV path")
    g.set_defaults(func=cmd_eval_track)

    g = sub.add_parser("run-drive", help="closed-loop driving run")
    g.add_argument("--map", required=True)
    g.add_argument("--speed", type=float, choices=(4.0, 6.0, 8.0), default=6.0)
    g.add_argument("--agent", default="oracle",
                   help="oracle | oracle-noisy:<sigma>")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--log")
    g.add_argument("--score")
    g.set_defaults(func=cmd_run_drive)

    g = sub.add_parser("replay", help="re-render an episode log")
    g.add_argument("--log", required=True)
    g.add_argument("--map", required=True)
    g.add_argument("--render-out")
    g.add_argument("--score", help="write a deviation score JSON from the log")
    g.set_defaults(func=cmd_replay)

    g = sub.add_parser("serve", help="interactive server for external agents")
    g.add_argument("--map", required=True)
    g.add_argument("--stream-port", type=int, default=9000)
    g.add_argument("--msg-port", type=int, default=9001)
    g.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        if args.json_errors:
            print(json.dumps({"error": str(exc), "code": exc.exit_code}),
                  file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (MapError, ValueError, OSError) as exc:
        if args.json_errors:
            print(json.dumps({"error": str(exc), "code": 1}), file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
