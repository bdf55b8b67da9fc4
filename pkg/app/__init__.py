# app/__init__.py

import logging

from flask import Flask
from config import Config


def create_app(config_class=Config):
    """The application factory. Configuration, logging and commands are wired here."""

    # 1. Create the Flask app instance
    app = Flask(__name__)
    app.config.from_object(config_class)

    # 2. app.logger is named "app", so every app.* module logger propagates to it
    app.logger.setLevel(getattr(logging, str(app.config['LOG_LEVEL']).upper(), logging.INFO))

    # 3. Register the command blueprint inside the factory to avoid circular imports
    from .commands import bp as commands_bp
    app.register_blueprint(commands_bp)

    return app
