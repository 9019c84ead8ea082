#!/usr/bin/env python3
"""
Write the built-in unitary designs to the ensemble folder
"""
from app import create_app
from app.designs import export_designs


def export_all():
    """Export pauli, clifford and icosahedral ensembles as text files"""
    app = create_app()

    with app.app_context():
        folder = app.config['ENSEMBLE_FOLDER']
        for path in export_designs(folder):
            print(f'Wrote {path}')
        print(f'Ensembles exported to {folder}')


if __name__ == '__main__':
    export_all()
