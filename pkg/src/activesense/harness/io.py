"""CSV / JSONL emission and checkpoint persistence."""
from __future__ import annotations

import csv
import dataclasses
import json

import numpy as np

from .. import nn
from .config import RunConfig, config_from_mapping
from .runner import MetricsSummary, make_agent

CHECKPOINT_VERSION = 1

CONFIG_COLUMNS = [f.name for f in dataclasses.fields(RunConfig)]
METRIC_COLUMNS = [f.name for f in dataclasses.fields(MetricsSummary)]


def summary_row(run: RunConfig, summary: MetricsSummary, **extra) -> dict:
    """Config fields first, then any sweep columns, then metrics."""
    row = {}
    for name, value in run.to_dict().items():
        row[name] = " ".join(str(v) for v in value) if isinstance(value, list) else value
    row.update(extra)
    row.update(dataclasses.asdict(summary))
    return row


def emit(rows, path, fmt: str = "csv", columns=None) -> None:
    """Write dict rows as CSV (canonical metrics) or JSONL (one object per line)."""
    rows = list(rows)
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "csv":
                if columns is None:
                    columns = list(rows[0].keys()) if rows else CONFIG_COLUMNS + METRIC_COLUMNS
                writer = csv.DictWriter(fh, fieldnames=columns)
                writer.writeheader()
                for row in rows:
                    writer.writerow({k: _fmt(v) for k, v in row.items()})
            elif fmt == "jsonl":
                for row in rows:
                    fh.write(json.dumps(row) + "\n")
            else:
                raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v


def trace_rows(records) -> list[dict]:
    rows = []
    for ep, rec in enumerate(records):
        for step in rec.trace or ():
            rows.append({"episode": ep, "truth": list(rec.truth), **step})
    return rows


# --- checkpoints ---------------------------------------------------------

def _parts(params) -> dict:
    return params.parts() if hasattr(params, "parts") else {"mlp": params}


def _dump_mlp(p: nn.MLPParams) -> dict:
    return {
        "layer_dims": p.layer_dims,
        "head": p.head,
        "weights": [w.tolist() for w in p.weights],
        "biases": [b.tolist() for b in p.biases],
    }


def _dump_network(net: nn.Network) -> dict:
    a = net.adam
    return {
        "params": {k: _dump_mlp(v) for k, v in _parts(net.params).items()},
        "lagged": None if net.lagged is None
        else {k: _dump_mlp(v) for k, v in _parts(net.lagged).items()},
        "adam": {
            "t": a.t, "lr": a.lr, "beta1": a.beta1, "beta2": a.beta2, "eps": a.eps,
            "m": [x.tolist() for x in a.m],
            "v": [x.tolist() for x in a.v],
        },
    }


def checkpoint_dict(agent, run: RunConfig) -> dict:
    return {
        "format_version": CHECKPOINT_VERSION,
        "config_hash": run.digest(),
        "config": run.to_dict(),
        "agent": run.agent,
        "networks": {name: _dump_network(net) for name, net in agent.networks().items()},
    }


def save_checkpoint(agent, run: RunConfig, path) -> None:
    # json writes floats with repr(), which round-trips float64 exactly
    with open(path, "w") as fh:
        json.dump(checkpoint_dict(agent, run), fh)


def _load_mlp(dst: nn.MLPParams, src: dict, where: str):
    if list(src["layer_dims"]) != dst.layer_dims or src["head"] != dst.head:
        raise ValueError(f"{where}: checkpoint layout {src['layer_dims']}/{src['head']} "
                         f"does not match {dst.layer_dims}/{dst.head}")
    for w, data in zip(dst.weights, src["weights"]):
        w[...] = np.asarray(data, dtype=np.float64)
    for b, data in zip(dst.biases, src["biases"]):
        b[...] = np.asarray(data, dtype=np.float64)


def load_checkpoint(path):
    """Rebuild ``(agent, run_config)`` from a checkpoint file."""
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {data.get('format_version')!r}")
    run = config_from_mapping(data["config"])
    if run.digest() != data["config_hash"]:
        raise ValueError("checkpoint config hash mismatch")
    agent = make_agent(run)
    nets = agent.networks()
    if set(nets) != set(data["networks"]):
        raise ValueError(f"checkpoint networks {sorted(data['networks'])} != {sorted(nets)}")
    for name, net in nets.items():
        blob = data["networks"][name]
        for part, mlp in _parts(net.params).items():
            _load_mlp(mlp, blob["params"][part], f"{name}.{part}")
        if net.lagged is not None:
            for part, mlp in _parts(net.lagged).items():
                _load_mlp(mlp, blob["lagged"][part], f"{name}.lagged.{part}")
        ad = blob["adam"]
        net.adam.t = int(ad["t"])
        net.adam.lr, net.adam.beta1, net.adam.beta2, net.adam.eps = (
            ad["lr"], ad["beta1"], ad["beta2"], ad["eps"])
        for dst, src in zip(net.adam.m, ad["m"]):
            dst[...] = np.asarray(src, dtype=np.float64)
        for dst, src in zip(net.adam.v, ad["v"]):
            dst[...] = np.asarray(src, dtype=np.float64)
    if hasattr(agent, "training"):
        agent.training = False
    return agent, run
