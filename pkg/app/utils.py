import csv
import math
import os

from dotenv import dotenv_values

from app.errors import InvalidParameter


def format_number(value):
    """Shortest stable text for a header or coordinate value"""
    if isinstance(value, float):
        return format(value, '.12g')
    return str(value)


def format_epsilon(epsilon):
    """12 significant digits, ``inf`` for infeasible rows"""
    if math.isinf(epsilon):
        return 'inf'
    return format(epsilon, '#.12g')


def epsilon_json(epsilon):
    return 'inf' if math.isinf(epsilon) else epsilon


def write_csv(stream, metadata, header, rows):
    """``# key=value`` comment lines, then the column header and the rows"""
    for key, value in metadata:
        stream.write(f'# {key}={format_number(value)}\n')
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)


def load_key_value_file(path):
    """Read a ``key=value`` config file; dashes in keys map to underscores"""
    if not os.path.isfile(path):
        raise InvalidParameter(f'config file {path!r} does not exist')
    values = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            raise InvalidParameter(f'config file {path!r}: key {key!r} has no value')
        values[key.strip().replace('-', '_')] = value.strip()
    return values
