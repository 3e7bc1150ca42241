"""JSON and CSV formats.

Complex numbers are written as ``[re, im]`` pairs.  A POM is
``{"dim", "outcomes", "effects"}`` with each effect a nested
``[[[re, im], ...], ...]`` matrix; a classical measure is
``{"dim", "atoms": [{"weight", "state_vector": [[re, im], ...]}]}``.
CSV files start with one ``# unsharp <version> <command>`` stamp line.
"""

import csv
import json

import numpy as np

from . import __version__
from .classical import ClassicalMeasure, RayPoint
from .errors import ValidationError
from .observables import DiscretePOM
from .states import State


def complex_to_pairs(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def pairs_to_complex(x):
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != 2:
        raise ValidationError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _label_to_json(label):
    return list(label) if isinstance(label, tuple) else label


def _label_from_json(label):
    return tuple(label) if isinstance(label, list) else label


def pom_to_dict(pom):
    return {
        "dim": pom.dim,
        "outcomes": [_label_to_json(o) for o in pom.outcomes],
        "effects": [complex_to_pairs(e.op) for e in pom.effects],
    }


def pom_from_dict(d):
    effects = [pairs_to_complex(e) for e in d["effects"]]
    pom = DiscretePOM([_label_from_json(o) for o in d["outcomes"]], effects)
    if pom.dim != d.get("dim", pom.dim):
        raise ValidationError(f"declared dim {d['dim']} does not match effects ({pom.dim})")
    return pom


def measure_to_dict(mu):
    return {
        "dim": mu.dim,
        "atoms": [{"weight": w, "state_vector": complex_to_pairs(p.vector)} for p, w in mu.atoms],
    }


def measure_from_dict(d):
    return ClassicalMeasure(
        (RayPoint(pairs_to_complex(a["state_vector"])), a["weight"]) for a in d["atoms"]
    )


def state_to_dict(s):
    return {"dim": s.dim, "matrix": complex_to_pairs(s.op)}


def state_from_dict(d):
    if "state_vector" in d:
        return State.pure(pairs_to_complex(d["state_vector"]))
    return State(pairs_to_complex(d["matrix"]))


def to_jsonable(obj):
    """Best-effort conversion of numpy scalars/arrays for ``json.dump``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return complex_to_pairs(obj)
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, payload):
    with open(path, "w") as f:
        json.dump(to_jsonable(payload), f, indent=2, sort_keys=True)
        f.write("\n")


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, command, header, rows):
    with open(path, "w", newline="") as f:
        f.write(f"# unsharp {__version__} {command}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def read_csv(path):
    """Header and rows of a CSV written by :func:`write_csv` (stamp skipped)."""
    with open(path, newline="") as f:
        lines = [ln for ln in f if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [row for row in reader]
