"""Runtime settings and logging bootstrap."""
import json
import logging
import os
import sys

from loguru import logger

SETTINGS_ENV_VAR = "PARTICLE_BENCH_SETTINGS"
CATALOG_ENV_VAR = "PARTICLE_BENCH_CATALOG"

DEFAULT_SETTINGS = {
    "ENV": "development",
    "LOG_LEVEL": "INFO",
    "CATALOG_DIR": None,
}


class InterceptHandler(logging.Handler):
    def emit(self, record):
        logger_opt = logger.opt(depth=6, exception=record.exc_info)
        logger_opt.log(record.levelno, record.getMessage())


class App:
    def __init__(self, settings):
        self.settings = settings

    @property
    def env(self):
        return self.settings["ENV"]

    def catalog_dir(self, override=None):
        return override or os.environ.get(CATALOG_ENV_VAR) or self.settings["CATALOG_DIR"]

    def __repr__(self):
        return f"<App(env='{self.env}')>"


def load_settings(path=None):
    settings = dict(DEFAULT_SETTINGS)
    path = path or os.environ.get(SETTINGS_ENV_VAR)
    if path:
        with open(path) as f:
            settings.update(json.load(f))
    return settings


def create_app(testing=False, verbose=False, settings_path=None):
    settings = load_settings(settings_path)
    if testing:
        settings["ENV"] = "test"

    level = "DEBUG" if verbose else settings["LOG_LEVEL"]
    logger_options = {"level": level, "colorize": True, "backtrace": True}

    if settings["ENV"] == "production":
        logger_options["serialize"] = True
        logger_options["colorize"] = False

    logger.remove()
    logger.add(sys.stderr, **logger_options)

    handler = InterceptHandler()
    handler.setLevel(0)
    logging.basicConfig(handlers=[handler], level=0, force=True)

    return App(settings)
