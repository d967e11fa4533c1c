"""Command-line driver for single evaluations and CSV parameter sweeps.

Sweeps write one CSV row per (grid point, N) in grid order, plus a JSON
manifest next to the CSV.  Every grid point gets its own seed derived from
the base seed and the point's index in the full grid, so results do not
depend on scheduling or on how many worker processes run.
"""
from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .capacity import (
    CapacityConfig,
    CapacityResult,
    asymptotic_capacity,
    cdc_capacity,
    cdc_capacity_n,
    message_range,
    pauli_capacity_n,
)
from .entanglement import ggm, senders_receiver_entropy
from .states import INV_SQRT2, FamilyKind, StateFamily, in_domain

log = logging.getLogger("cdc")

THREADS_ENV = "CDC_THREADS"
CSV_HEADER = ["alpha", "beta", "N", "C_N", "C_N_P", "C_a", "S", "GGM", "status"]
EXIT_INVALID = 1
EXIT_IO = 2

_TWO_PARAM = (FamilyKind.TWO_QUTRIT, FamilyKind.GW)


class Encoder(str, enum.Enum):
    ARBITRARY = "arbitrary"
    PAULI = "pauli"
    BOTH = "both"


@dataclass(frozen=True)
class SweepSpec:
    family: FamilyKind
    alpha_range: tuple[float, float, float]
    beta_range: tuple[float, float, float] | None = None
    n_list: tuple[int, ...] = ()
    encoder: Encoder = Encoder.BOTH
    config: CapacityConfig = field(default_factory=CapacityConfig)
    output_path: Path | None = None
    # number of qubits; only read for the GHZ family
    n_parties: int = 3

    def __post_init__(self):
        object.__setattr__(self, "family", FamilyKind(self.family))
        object.__setattr__(self, "encoder", Encoder(self.encoder))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        self.validate()

    @property
    def parties(self) -> int:
        return self.n_parties if self.family is FamilyKind.GGHZ else (3 if self.family is FamilyKind.GW else 2)

    @property
    def receiver(self) -> int:
        return self.parties - 1

    def validate(self) -> None:
        _check_range("alpha", self.alpha_range)
        if self.family in _TWO_PARAM:
            if self.beta_range is None:
                raise ValueError(f"family {self.family.value} needs a beta range")
            _check_range("beta", self.beta_range)
        elif self.beta_range is not None:
            raise ValueError(f"family {self.family.value} takes no beta")
        if self.family is FamilyKind.GGHZ and self.n_parties < 2:
            raise ValueError("a GHZ family needs at least 2 parties")
        total = 2**self.parties if self.family is not FamilyKind.TWO_QUTRIT else 9
        for n in self.n_list:
            if not 2 <= n <= total:
                raise ValueError(f"N={n} outside [2, {total}] for family {self.family.value}")

    def to_json(self) -> dict:
        out = asdict(self)
        out["family"] = self.family.value
        out["encoder"] = self.encoder.value
        out["output_path"] = None if self.output_path is None else str(self.output_path)
        out["config"]["continuation"] = list(self.config.continuation)
        return out


def _check_range(name: str, rng: Sequence[float]) -> None:
    if len(rng) != 3:
        raise ValueError(f"{name} range must be (start, stop, step)")
    start, stop, step = rng
    if not step > 0:
        raise ValueError(f"{name} step must be positive")
    if stop < start:
        raise ValueError(f"{name} range is empty")


def axis_values(rng: Sequence[float]) -> list[float]:
    """start, start + step, ... up to stop, with stop itself appended when off-grid."""
    start, stop, step = rng
    count = int(math.floor((stop - start) / step + 1e-9))
    values = [round(start + i * step, 12) for i in range(count + 1)]
    if stop - values[-1] > 1e-9:
        values.append(float(stop))
    return values


def grid(spec: SweepSpec) -> list[tuple[int, float, float | None]]:
    """(grid index, alpha, beta) for every grid point, in domain or not."""
    alphas = axis_values(spec.alpha_range)
    betas = axis_values(spec.beta_range) if spec.beta_range is not None else [None]
    points = [(a, b) for a in alphas for b in betas]
    return [(i, a, b) for i, (a, b) in enumerate(points)]


def point_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


@dataclass(frozen=True)
class PointRecord:
    alpha: float
    beta: float | None
    n_messages: int | None
    c_n: float | None
    c_n_pauli: float | None
    c_a: float
    entropy: float
    ggm: float | None
    status: str

    def row(self) -> list[str]:
        return [_fmt(self.alpha), _fmt(self.beta), "" if self.n_messages is None else str(self.n_messages),
                _fmt(self.c_n), _fmt(self.c_n_pauli), _fmt(self.c_a), _fmt(self.entropy), _fmt(self.ggm),
                self.status]


def _fmt(v: float | None) -> str:
    if v is None:
        return ""
    # -0.0 and tiny negative noise print as 0
    return f"{v + 0.0:.12g}" if abs(v) >= 1e-15 else "0"


def run_point(spec: SweepSpec, alpha: float, beta: float | None = None,
              seed: int | None = None) -> list[PointRecord]:
    """All N records for one grid point; an empty list for off-domain parameters."""
    if not in_domain(spec.family, alpha, beta):
        log.info("skipping off-domain point alpha=%s beta=%s for %s", alpha, beta, spec.family.value)
        return []
    state = StateFamily(spec.family, alpha, beta, spec.parties).build()
    receiver = spec.receiver
    cfg = spec.config if seed is None else replace(spec.config, seed=seed)
    c_a = asymptotic_capacity(state, receiver)
    entropy = senders_receiver_entropy(state, receiver)
    measure = ggm(state).value if state.n_parties >= 3 else None

    if not spec.n_list:
        return [PointRecord(alpha, beta, None, None, None, c_a, entropy, measure, "")]
    records = []
    for n in spec.n_list:
        pauli = arbitrary = None
        if spec.encoder is not Encoder.ARBITRARY:
            try:
                pauli = pauli_capacity_n(state, receiver, n, max_subsets=cfg.max_pauli_subsets)
            except ValueError as exc:
                log.warning("alpha=%s beta=%s N=%d: %s", alpha, beta, n, exc)
        if spec.encoder is not Encoder.PAULI:
            arbitrary = cdc_capacity_n(state, receiver, n, cfg, pauli_hint=pauli)
        shown = arbitrary if arbitrary is not None else pauli
        records.append(PointRecord(
            alpha, beta, n,
            None if arbitrary is None else arbitrary.bits,
            None if pauli is None else pauli.bits,
            c_a, entropy, measure,
            "" if shown is None else shown.status.value,
        ))
    return records


def _point_task(args):
    spec, alpha, beta, seed = args
    return run_point(spec, alpha, beta, seed)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV}={raw!r} is not an integer") from None
    if value < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1")
    return value


def sweep_rows(spec: SweepSpec, threads: int = 1) -> list[PointRecord]:
    """Evaluate the grid, in grid order, using up to ``threads`` worker processes."""
    tasks = [(spec, a, b, point_seed(spec.config.seed, i)) for i, a, b in grid(spec)]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_point_task, tasks))
    else:
        chunks = [_point_task(t) for t in tasks]
    return [rec for chunk in chunks for rec in chunk]


def render_csv(rows: Sequence[PointRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in rows:
        writer.writerow(rec.row())
    return buf.getvalue()


def manifest_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".manifest.json")


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[PointRecord]:
    """Write the sweep CSV to ``spec.output_path`` plus a JSON manifest beside it."""
    if spec.output_path is None:
        raise ValueError("sweep needs an output path")
    path = Path(spec.output_path)
    started = time.perf_counter()
    rows = sweep_rows(spec, threads)
    wall = time.perf_counter() - started
    path.write_text(render_csv(rows), encoding="utf-8", newline="")
    manifest = {
        "spec": spec.to_json(),
        "seed": spec.config.seed,
        "version": __version__,
        "wall_time_s": wall,
        "rows": len(rows),
        "threads": threads,
    }
    manifest_path(path).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return rows


# ---------------------------------------------------------------------------
# named sweep presets


def _qutrit_grid(step: float) -> dict:
    edge = math.sqrt(2 / 3)
    return dict(family=FamilyKind.TWO_QUTRIT, alpha_range=(0.0, edge, step), beta_range=(0.0, edge, step),
                n_list=tuple(range(4, 10)))


def _preset_specs(fine: bool) -> dict[str, dict]:
    qutrit_step = 0.01 if fine else 0.05
    gw_step = 0.01 if fine else 0.05
    cuts = (0.58, 0.70, 0.06)
    return {
        "fig1": dict(family=FamilyKind.TWO_QUBIT, alpha_range=(0.0, INV_SQRT2, 0.01), n_list=(3, 4)),
        "fig2": _qutrit_grid(qutrit_step),
        # gap C - C^P, C and S come from the same grid; C is the per-point max over N
        "fig3": _qutrit_grid(qutrit_step),
        "fig4": dict(family=FamilyKind.GGHZ, n_parties=3, alpha_range=(0.0, INV_SQRT2, 0.01), n_list=(5, 6, 7, 8)),
        "fig5": dict(family=FamilyKind.GW, alpha_range=(0.0, 1.0, gw_step), beta_range=(0.0, 1.0, gw_step),
                     n_list=(5, 6, 7, 8)),
        "fig6": dict(family=FamilyKind.GW, alpha_range=cuts, beta_range=(0.0, 1.0, 0.01), n_list=()),
        "fig7": dict(family=FamilyKind.GW, alpha_range=cuts, beta_range=(0.0, 1.0, gw_step), n_list=(5, 6, 7, 8)),
    }


PRESETS = tuple(_preset_specs(False))


def preset(name: str, fine: bool = False, config: CapacityConfig | None = None,
           output_path: Path | None = None) -> SweepSpec:
    specs = _preset_specs(fine)
    if name not in specs:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return SweepSpec(**specs[name], config=config or CapacityConfig(), output_path=output_path)


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) == 1:
        v = float(parts[0])
        return (v, v, 1.0)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    return tuple(float(p) for p in parts)


def _parse_n_list(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _config(args) -> CapacityConfig:
    kw = {}
    if args.restarts is not None:
        kw["restarts"] = args.restarts
    if args.seed is not None:
        kw["seed"] = args.seed
    return CapacityConfig(**kw)


def _state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", type=FamilyKind, choices=list(FamilyKind), required=True,
                   metavar="{" + ",".join(k.value for k in FamilyKind) + "}")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float)
    p.add_argument("--parties", type=int, default=3, help="qubit count for the gghz family")


def _budget_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cdc", description="Conclusive dense coding capacities.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, text in (("capacity", "capacity with arbitrary local encoders"),
                       ("pauli", "capacity with generalized Pauli encoders")):
        p = sub.add_parser(name, help=text)
        _state_args(p)
        p.add_argument("--n", type=int, help="message count; default is the best over all N")
        _budget_args(p)

    for name, text in (("ggm", "generalized geometric measure"),
                       ("entropy", "senders:receiver entanglement entropy and asymptotic capacity")):
        _state_args(sub.add_parser(name, help=text))

    p = sub.add_parser("sweep", help="CSV sweep over a parameter grid")
    p.add_argument("--family", type=FamilyKind, choices=list(FamilyKind), required=True,
                   metavar="{" + ",".join(k.value for k in FamilyKind) + "}")
    p.add_argument("--alpha", type=_parse_range, required=True, help="value or start:stop:step")
    p.add_argument("--beta", type=_parse_range, help="value or start:stop:step")
    p.add_argument("--parties", type=int, default=3)
    p.add_argument("--n", type=_parse_n_list, default=(), help="e.g. 3,4 or 4-9")
    p.add_argument("--encoder", type=Encoder, choices=list(Encoder), default=Encoder.BOTH,
                   metavar="{" + ",".join(e.value for e in Encoder) + "}")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--threads", type=int)
    _budget_args(p)

    p = sub.add_parser("preset", help="named sweep preset")
    p.add_argument("name", choices=PRESETS)
    p.add_argument("--out", type=Path)
    p.add_argument("--fine", action="store_true", help="0.01 grid for the two-parameter families")
    p.add_argument("--threads", type=int)
    _budget_args(p)
    return parser


def _state(args):
    family = StateFamily(args.family, args.alpha, args.beta, args.parties if args.family is FamilyKind.GGHZ else 2)
    state = family.build()
    return state, state.n_parties - 1


def _result_json(r: CapacityResult) -> dict:
    return {"N": r.n_messages, "bits": r.bits, "gammas": [float(g) for g in r.gammas],
            "encoder": r.encoder_kind.value, "status": r.status.value}


def _run(args) -> int:
    if args.command in ("capacity", "pauli"):
        state, receiver = _state(args)
        cfg = _config(args)
        if args.command == "capacity":
            if args.n is None:
                res = cdc_capacity(state, receiver, cfg)
            else:
                res = cdc_capacity_n(state, receiver, args.n, cfg)
        else:
            ns = [args.n] if args.n is not None else list(message_range(state, receiver))
            found = [pauli_capacity_n(state, receiver, n, cfg.max_pauli_subsets) for n in ns]
            res = found[0]
            for r in found[1:]:
                if r.bits > res.bits + cfg.objective_tolerance:
                    res = r
        print(json.dumps(_result_json(res)))
    elif args.command == "ggm":
        state, _ = _state(args)
        g = ggm(state)
        print(json.dumps({"ggm": g.value, "max_eigenvalue": g.max_eigenvalue,
                          "side_a": sorted(g.maximizing_bipartition.side_a),
                          "side_b": sorted(g.maximizing_bipartition.side_b),
                          "bipartite_only": g.bipartite_only}))
    elif args.command == "entropy":
        state, receiver = _state(args)
        print(json.dumps({"S": senders_receiver_entropy(state, receiver),
                          "C_a": asymptotic_capacity(state, receiver)}))
    else:
        threads = args.threads if args.threads is not None else default_threads()
        if threads < 1:
            raise ValueError("--threads must be >= 1")
        if args.command == "sweep":
            spec = SweepSpec(args.family, args.alpha, args.beta, args.n, args.encoder, _config(args), args.out,
                             args.parties)
        else:
            spec = preset(args.name, args.fine, _config(args), args.out or Path(f"{args.name}.csv"))
        rows = run_sweep(spec, threads)
        log.info("wrote %d rows to %s", len(rows), spec.output_path)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return _run(args)
    except OSError as exc:
        print(f"cdc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"cdc: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
