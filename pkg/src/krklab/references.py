"""Bundled published reference results and tolerance bands."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def load_references() -> dict:
    with resources.files("krklab.data").joinpath("references.json").open("r") as fh:
        return json.load(fh)


def reference_accuracy(kind: str) -> float:
    return load_references()["figure_metrics"][kind]["overall_accuracy"]


def tolerance(kind: str) -> float:
    return load_references()["tolerances"][kind]


def table5_scripts() -> list[dict]:
    return load_references()["multilayer_scripts"]["rows"]


def table4_rows() -> list[list]:
    return load_references()["nn_parameter_grid"]["rows"]
