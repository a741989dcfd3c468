import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def synthetic_sequence():
    from nlvseg.synth import moving_square_sequence

    return moving_square_sequence()


@pytest.fixture(scope="session")
def synthetic_run(synthetic_sequence):
    from nlvseg.flow import resolve_flows
    from nlvseg.params import PipelineParams
    from nlvseg.pipeline import segment_video

    frames, masks = synthetic_sequence
    params = PipelineParams()
    flows = resolve_flows(frames, None, params.flow)
    return frames, masks, flows, segment_video(frames, flows, params)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
