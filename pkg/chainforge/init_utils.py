"""
@file: init_utils.py
@time: 2026/10/17 10:31
@desc: start-up paths and default configuration
"""

import os
import sys
import platform
import configparser


class InitConfig(object):
    """Start-up configuration

    Resolves the configuration paths. Nothing touches the disk until
    prepare() runs, which writes a default config.ini the first time.

    Attributes:
        version: package version
        platform: interpreter platform
        system: operating system description
        home_dir: user home directory
        config_dir: configuration directory (env CHAINFORGE_HOME overrides)
        config_file: config.ini path
        log_file: chainforge.log path
        tolerance: default relative tolerance for symmetry and spectra checks
        spectral_tolerance: default relative tolerance of the assembled-spectrum check
        classification_tolerance: default Γ_P tolerance in units of δ
        extended_precision_threshold: conditioning that triggers the mpmath solve
        extended_precision_dps: decimal digits of the mpmath solve
        refine: whether extensions are polished after reconstruction
        threads: worker threads for sweeps, 0 means cpu count
        seed: default seed of the randomized checks
    """

    def __init__(self):
        self.version = '1.0.0'
        self.platform = sys.platform
        self.system = platform.uname().version
        self.home_dir = os.path.expanduser('~')
        self.config_dir = os.environ.get('CHAINFORGE_HOME',
                                         os.path.join(self.home_dir, '.chainforge'))
        self.config_file = os.path.join(self.config_dir,
                                        'config.ini')
        self.log_file = os.path.join(self.config_dir,
                                     'chainforge.log')
        self.tolerance = 1e-10
        self.spectral_tolerance = 1e-8
        self.classification_tolerance = 1e-6
        self.extended_precision_threshold = 1e12
        self.extended_precision_dps = 40
        self.refine = True
        self.threads = 0
        self.seed = 20220601

    def prepare(self):
        """Create the configuration directory and a default config.ini when missing."""
        if not self.__is_exist_config_dir():
            self.__create_config_dir()
        elif not os.path.exists(self.config_file):
            self.__init_config_file()

    def defaults(self):
        return {
            'tolerance': repr(self.tolerance),
            'spectral_tolerance': repr(self.spectral_tolerance),
            'classification_tolerance': repr(self.classification_tolerance),
            'extended_precision_threshold': repr(self.extended_precision_threshold),
            'extended_precision_dps': str(self.extended_precision_dps),
            'refine': str(self.refine).lower(),
            'threads': str(self.threads),
            'seed': str(self.seed),
        }

    def __is_exist_config_dir(self):
        return os.path.exists(self.config_dir)

    def __init_config_file(self):
        config = configparser.ConfigParser()
        config.add_section('default')
        for key, value in self.defaults().items():
            config.set('default', key, value)
        with open(self.config_file, 'w+') as file:
            config.write(file)

    def __create_config_dir(self):
        os.makedirs(self.config_dir, exist_ok=True)
        self.__init_config_file()
