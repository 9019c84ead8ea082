#!/usr/bin/env python3
"""
Noisy t-design toolkit entry point

    python run.py                          serve the JSON API
    flask --app run.py sweep --channel ... run an experiment from the command line
"""
from app import create_app

app = create_app()

if __name__ == '__main__':
    app.run(host=app.config['API_HOST'], port=app.config['API_PORT'])
