"""Shared fixtures plus the acceptance summary reporter.

Tests marked with @pytest.mark.criterion("...") get one PASS/FAIL line
each at the end of the run so the acceptance gate is readable at a glance.
"""

from __future__ import annotations

import pytest

from interscene import GenerationParams, MockBackend, Pipeline, PipelineConfig
from interscene.fixtures import FRISBEE_PARK, default_scenes

_RESULTS: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(text): names the acceptance criterion a test verifies"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if report.when == "call":
        _RESULTS[label] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and report.outcome != "passed":
        _RESULTS[label] = "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label, verdict in _RESULTS.items():
        terminalreporter.write_line(f"{verdict}  {label}")


def make_frisbee_pipeline(**config_overrides) -> Pipeline:
    settings = {"exclusive_predicate_sets": (("reaches for", "grabs at"),)}
    settings.update(config_overrides)
    return Pipeline(
        MockBackend(default_scenes(), seed=0),
        PipelineConfig(**settings),
        GenerationParams(seed=0),
    )


@pytest.fixture
def frisbee_pipeline() -> Pipeline:
    return make_frisbee_pipeline()


@pytest.fixture
def frisbee_run(frisbee_pipeline):
    return frisbee_pipeline.run(FRISBEE_PARK.ref, question=FRISBEE_PARK.question)
