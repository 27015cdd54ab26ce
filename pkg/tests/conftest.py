import dataclasses
import time

import pytest

from clelc import default_benchmark_config, default_robot_config, run_scenario


def _timed_run(config):
    t0 = time.perf_counter()
    log, metrics = run_scenario(config)
    return log, metrics, time.perf_counter() - t0


@pytest.fixture(scope="session")
def bench_clelc_run():
    return _timed_run(default_benchmark_config())


@pytest.fixture(scope="session")
def bench_flc_run():
    return _timed_run(dataclasses.replace(default_benchmark_config(), controller="flc"))


@pytest.fixture(scope="session")
def robot_clelc_run():
    return _timed_run(default_robot_config())


@pytest.fixture(scope="session")
def robot_flc_run():
    return _timed_run(dataclasses.replace(default_robot_config(), controller="flc"))
