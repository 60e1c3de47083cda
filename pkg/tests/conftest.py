from dataclasses import replace

import pytest

from twr.synth_harness import GenParams, gen_corpus
from twr.tap_detector import build_template


@pytest.fixture(scope="session")
def gen_params():
    return GenParams(rng_seed=1000)


@pytest.fixture(scope="session")
def tap_training(gen_params):
    return gen_corpus(None, gen_params, 30)


@pytest.fixture(scope="session")
def tap_template(tap_training):
    return build_template(tap_training, n=100)


@pytest.fixture(scope="session")
def fresh_taps(gen_params):
    return gen_corpus(None, replace(gen_params, rng_seed=5000), 150)
