"""The four built-in example systems: iterated beam splitter and spin-1 particle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .generator import PROTOCOL_I, PROTOCOL_II, MeasurementProtocol, QuantumGenerator, build_generator

_S = 1 / np.sqrt(2)

SPIN1_UNITARY = linalg.cmatrix([[_S, _S, 0], [0, 0, -1], [-_S, _S, 0]])

J_X = linalg.cmatrix([[0, 0, 0], [0, 0, 1j], [0, -1j, 0]])
J_Y = linalg.cmatrix([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]])
J_Z = linalg.cmatrix([[0, 1j, 0], [-1j, 0, 0], [0, 0, 0]])


def spin_projector(j: np.ndarray) -> np.ndarray:
    """``1 - J^2``: projector onto zero spin component along the axis of ``j``."""
    return linalg.identity(3) - j @ j


def beam_splitter() -> QuantumGenerator:
    return build_generator(
        linalg.hadamard(),
        {"0": linalg.basis_projector(2, [0]), "1": linalg.basis_projector(2, [1])},
        name="iterated beam splitter",
    )


def spin1(axis: str) -> QuantumGenerator:
    """Spin-1 particle measured for ``J_axis^2``.

    Symbol ``0`` is the outcome "spin component along the axis is zero",
    i.e. ``P(0) = 1 - J^2`` and ``P(1) = J^2``.  For the y axis this makes
    ``00`` the forbidden word (golden mean); for the x axis it yields the
    even process.
    """
    j = {"x": J_X, "y": J_Y, "z": J_Z}[axis]
    p0 = spin_projector(j)
    return build_generator(
        SPIN1_UNITARY, {"0": p0, "1": linalg.identity(3) - p0}, name=f"spin-1, J_{axis}^2"
    )


@dataclass(frozen=True, eq=False)
class System:
    name: str
    description: str
    generator: QuantumGenerator
    protocol: MeasurementProtocol


def builtin_systems() -> dict:
    return {
        s.name: s
        for s in [
            System("beamsplitter-i", "iterated beam splitter, detectors active every pass", beam_splitter(), PROTOCOL_I),
            System("beamsplitter-ii", "iterated beam splitter, detectors active every other pass", beam_splitter(), PROTOCOL_II),
            System("spin1-y", "spin-1 particle, measuring J_y^2 (golden mean process)", spin1("y"), PROTOCOL_I),
            System("spin1-x", "spin-1 particle, measuring J_x^2 (even process)", spin1("x"), PROTOCOL_I),
        ]
    }


def get_system(name: str) -> System:
    systems = builtin_systems()
    try:
        return systems[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(systems)}") from None
