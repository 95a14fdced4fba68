from pathlib import Path

import numpy as np
import pytest

from kernelplan.kernels import Workspace

GOLDEN_DIR = Path(__file__).parent / "golden"


def golden(name: str) -> str:
    return (GOLDEN_DIR / f"{name}.txt").read_text().rstrip("\n")


@pytest.fixture
def ws4() -> Workspace:
    """Four length-4 vectors, a 4x4 and a 3x4 matrix, two scalars."""
    ws = Workspace()
    rng = np.random.default_rng(42)
    for name in ("x", "y", "a", "b"):
        ws.bind_vector(name, rng.uniform(-2.0, 2.0, 4))
    ws.bind_vector("pos", rng.uniform(0.5, 1.5, 4))
    ws.bind_matrix("M", rng.uniform(-1.0, 1.0, (4, 4)))
    ws.bind_matrix("R", rng.uniform(-1.0, 1.0, (3, 4)))
    ws.bind_vector("r3", rng.uniform(-1.0, 1.0, 3))
    ws.bind_scalar("c", 0.75)
    ws.bind_scalar("d", -1.25)
    return ws
