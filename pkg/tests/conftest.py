# tests/conftest.py
import pytest

from app import create_app
from app.digits import parse_digit_string
from config import TestConfig


@pytest.fixture
def app():
    return create_app(TestConfig)


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def one10():
    return parse_digit_string("1", 10)
