import os

from particle_bench.app import SETTINGS_ENV_VAR, create_app


def create_test_app():
    os.environ[SETTINGS_ENV_VAR] = "tests/config.json"
    return create_app(testing=True)
