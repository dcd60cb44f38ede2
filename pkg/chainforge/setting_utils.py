"""
@file: setting_utils.py
@time: 2026/10/17 10:42
@desc: config.ini access
"""

import os

from chainforge.logger import *


class Setting(object):
    """Config item utility

    Reads values from config.ini, falling back to the built-in defaults for
    keys missing from an older file. CHAINFORGE_THREADS overrides threads.

    Attributes:
        config: parsed config file
    """
    config = configparser.ConfigParser()
    config.read(init_config.config_file)

    def __init__(self):
        pass

    @staticmethod
    def reload():
        Setting.config.read(init_config.config_file)

    @staticmethod
    def get_value(key):
        if key == 'threads' and os.environ.get('CHAINFORGE_THREADS'):
            return os.environ['CHAINFORGE_THREADS']
        return Setting.config.get('default', key, fallback=init_config.defaults()[key])

    @staticmethod
    def get_float(key):
        return float(Setting.get_value(key))

    @staticmethod
    def get_int(key):
        return int(Setting.get_value(key))

    @staticmethod
    def get_boolean(key):
        return str(Setting.get_value(key)).strip().lower() in ('1', 'true', 'yes', 'on')
