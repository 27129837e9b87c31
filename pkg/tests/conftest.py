import numpy as np
import pytest

from petcbound import LtiPetcSystem, generate_dataset, train, trigger_cones
from petcbound.traffic import build_slca

BENCH_SEED = 12345


def make_benchmark(kappa_bar=4):
    return LtiPetcSystem(
        A=np.array([[0.0, 1.0], [-2.0, 3.0]]),
        B=np.array([[0.0], [1.0]]),
        K=np.array([[0.0, -5.0]]),
        h=0.05,
        kappa_bar=kappa_bar,
        sigma=0.1,
    )


@pytest.fixture(scope="session")
def benchmark():
    return make_benchmark()


@pytest.fixture(scope="session")
def bench_cones(benchmark):
    return trigger_cones(benchmark)


@pytest.fixture(scope="session")
def toy_kbar1():
    return make_benchmark(kappa_bar=1)


@pytest.fixture(scope="session")
def bench_ds_ell1(benchmark):
    return generate_dataset(benchmark, 1, 10000, seed=BENCH_SEED)


@pytest.fixture(scope="session")
def bench_model_ell1(bench_ds_ell1):
    model, info = train(bench_ds_ell1, mode="conic")
    return model, info


@pytest.fixture(scope="session")
def bench_ds_ell10(benchmark):
    return generate_dataset(benchmark, 10, 10000, seed=BENCH_SEED)


@pytest.fixture(scope="session")
def bench_model_ell10(bench_ds_ell10):
    model, info = train(bench_ds_ell10, mode="flat")
    return model, info


@pytest.fixture(scope="session")
def bench_abs_ell10(benchmark, bench_ds_ell10):
    return build_slca(bench_ds_ell10.labels(), h=benchmark.h)
