from flask import Flask, jsonify, request
import os
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def create_app(config_class='config.Config'):
    """Application factory pattern"""
    app = Flask(__name__)
    app.config.from_object(config_class)
    app.json.sort_keys = False

    # Set up logging
    if not app.debug and not app.testing:
        # Production logging
        log_folder = app.config['LOG_FOLDER']
        if not os.path.exists(log_folder):
            os.makedirs(log_folder)

        from logging.handlers import RotatingFileHandler
        file_handler = RotatingFileHandler(os.path.join(log_folder, 'tdesign.log'),
                                           maxBytes=10240000, backupCount=10)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
        ))
        file_handler.setLevel(logging.INFO)
        app.logger.addHandler(file_handler)
        app.logger.setLevel(logging.INFO)
        app.logger.info('t-design noise toolkit startup')
    elif app.debug:
        # Development logging
        logging.basicConfig(level=logging.DEBUG)
        app.logger.setLevel(logging.DEBUG)
        app.logger.info('t-design noise toolkit startup in debug mode')

    # Register blueprints
    from app.routes.api import api_bp
    from app.commands import commands_bp

    app.register_blueprint(api_bp, url_prefix='/api')
    app.register_blueprint(commands_bp)

    # Add error handlers
    @app.errorhandler(404)
    def not_found_error(error):
        app.logger.warning(f'Not found: {request.url}')
        return jsonify({'error': 'Not found'}), 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        return jsonify({'error': 'Method not allowed'}), 405

    @app.errorhandler(500)
    def internal_error(error):
        app.logger.error(f'Internal server error: {error}')
        return jsonify({'error': 'Internal server error'}), 500

    return app
