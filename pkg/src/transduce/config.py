"""JSON configuration documents for chains and ensembles.

Both formats are validated against strict schemas shipped in
``transduce/schemas``; unknown keys are rejected so that a misspelt rate
never silently falls back to a default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from jsonschema import Draft202012Validator

from .chain import ModeParams, TransducerChain
from .ensemble import EnsembleSpec
from .errors import ConfigError, InvalidChain
from .scattering import chain_port_labels


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    """Load ``chain`` or ``ensemble`` schema."""
    text = resources.files("transduce").joinpath("schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def validate(doc, name: str) -> None:
    """Raise :class:`ConfigError` naming the first offending field (in document order)."""
    errors = sorted(Draft202012Validator(schema(name)).iter_errors(doc),
                    key=lambda e: (list(map(str, e.absolute_path)), e.validator))
    if errors:
        err = errors[0]
        where = _path(err.absolute_path)
        if err.validator == "additionalProperties":
            extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
            where = _path(list(err.absolute_path) + [extra[0]]) if extra else where
            raise ConfigError("unknown key", where or "<document>")
        if err.validator == "required":
            missing = err.message.split("'")[1]
            raise ConfigError("required key missing", _path(list(err.absolute_path) + [missing]))
        raise ConfigError(err.message, where or "<document>")


def parse_json(text: str, source: str = "<config>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_json(text, str(path))


@dataclass(frozen=True)
class ChainConfig:
    """A validated chain document."""

    chain: TransducerChain
    label: str | None = None
    unit: str | None = None
    occupations: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return chain_to_config(self.chain, self.label, self.unit, self.occupations)


def _mode(m) -> ModeParams:
    return ModeParams(m["detuning"], m["kappa_i"], m["kappa_ex"])


def _mode_doc(m: ModeParams) -> dict:
    return {"detuning": m.detuning, "kappa_i": m.kappa_i, "kappa_ex": m.kappa_ex}


def chain_from_config(doc) -> ChainConfig:
    validate(doc, "chain")
    try:
        modes = tuple(_mode(m) for m in doc["modes"])
        chain = TransducerChain(modes, tuple(doc["couplings"]), degenerate=doc.get("degenerate", False),
                                label=doc.get("label"))
    except ConfigError:
        raise
    except InvalidChain as exc:
        raise ConfigError(str(exc)) from None
    occ = dict(doc.get("occupations", {}))
    unknown = sorted(set(occ) - set(chain_port_labels(chain.n_stages)))
    if unknown:
        raise ConfigError(f"unknown port {unknown[0]!r}", "occupations")
    return ChainConfig(chain, doc.get("label"), doc.get("unit"), occ)


def chain_to_config(chain: TransducerChain, label=None, unit=None, occupations=None) -> dict:
    """Inverse of :func:`chain_from_config`."""
    doc = {
        "modes": [_mode_doc(m) for m in chain.modes],
        "couplings": list(chain.couplings),
    }
    label = label if label is not None else chain.label
    if label is not None:
        doc["label"] = label
    if unit is not None:
        doc["unit"] = unit
    if chain.degenerate:
        doc["degenerate"] = True
    if occupations:
        doc["occupations"] = dict(occupations)
    return doc


def load_chain_config(path) -> ChainConfig:
    return chain_from_config(read_json(path))


def ensemble_from_config(doc) -> EnsembleSpec:
    validate(doc, "ensemble")
    keys = ("detuning_2", "detuning_3", "kappa_2", "kappa_3", "gamma_2", "gamma_3")
    try:
        return EnsembleSpec(doc["n_atoms"], _mode(doc["mode_a"]), _mode(doc["mode_b"]),
                            doc["g_a"], doc["g_23"], doc["g_b"], **{k: doc[k] for k in keys if k in doc})
    except InvalidChain as exc:
        raise ConfigError(str(exc)) from None


def ensemble_to_config(spec: EnsembleSpec) -> dict:
    return {
        "n_atoms": spec.n_atoms,
        "mode_a": _mode_doc(spec.mode_a),
        "mode_b": _mode_doc(spec.mode_b),
        "g_a": spec.g_a, "g_23": spec.g_23, "g_b": spec.g_b,
        "detuning_2": spec.detuning_2, "detuning_3": spec.detuning_3,
        "kappa_2": spec.kappa_2, "kappa_3": spec.kappa_3,
        "gamma_2": spec.gamma_2, "gamma_3": spec.gamma_3,
    }


def load_ensemble_config(path) -> EnsembleSpec:
    return ensemble_from_config(read_json(path))
