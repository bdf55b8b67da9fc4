# config.py

import os
from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, '.env'))


def _int_env(name, default):
    raw = os.environ.get(name)
    return int(float(raw)) if raw else default


class Config:
    # Where command artefacts land: <OUTPUT_DIR>/<command>/<label>/
    OUTPUT_DIR = os.environ.get('OUTPUT_DIR') or os.path.join(basedir, 'out')

    # Worker processes for chunked accumulation (results never depend on it)
    THREADS = _int_env('THREADS', os.cpu_count() or 1)

    # Guardrail on every x-limit accepted from the command line
    X_LIMIT_MAX = _int_env('X_LIMIT_MAX', 10**8)

    # Point-counting oracle ceiling and the exhaustive trace check ceiling
    ORACLE_LIMIT = _int_env('ORACLE_LIMIT', 10**6)
    ORACLE_VERIFY_LIMIT = _int_env('ORACLE_VERIFY_LIMIT', 2000)

    # Windows with more indices than this are evaluated on sampled blocks
    MAX_WINDOW_TERMS = _int_env('MAX_WINDOW_TERMS', 1 << 20)

    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'


class TestConfig(Config):
    TESTING = True
    THREADS = 1
    X_LIMIT_MAX = 10**7
    ORACLE_VERIFY_LIMIT = 500
    MAX_WINDOW_TERMS = 1 << 16
    LOG_LEVEL = 'WARNING'
