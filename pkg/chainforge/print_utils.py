"""
@file: print_utils.py
@time: 2026/10/17 17:05
@desc: terminal tables and coloured text
"""

from prettytable import PrettyTable
from colorama import init, Fore


def _short(value):
    return '{0:.10g}'.format(value) if isinstance(value, float) else value


class DrawTable(object):
    """Terminal table with a fixed header

    Attributes:
        x: PrettyTable being filled
    """
    header = []

    def __init__(self):
        self.x = PrettyTable(self.header)
        self.x.align = 'r'

    def append(self, *row):
        self.x.add_row([_short(v) for v in row])

    def clear(self):
        self.x.clear_rows()

    def str(self):
        return str(self.x)

    def print(self):
        print(self.str())


class DrawSpectrumTable(DrawTable):
    """Eigenvalues with symmetry labels and, after classification, the Γ_P split"""
    header = ["index", "eigenvalue", "symmetry", "deviation", "in_gamma_p"]


class DrawResidualTable(DrawTable):
    """Per-target residual report of a solved extension"""
    header = ["target", "symmetry", "condition residual", "spectral residual"]


class DrawBoundsTable(DrawTable):
    header = ["N", "integral bound", "closed form", "binomial tail", "chernoff eps", "t_in/t0"]


class DrawCheckTable(DrawTable):
    header = ["check", "cases", "max error", "tolerance", "result"]


class Colored(object):
    """Coloured terminal strings

    Attributes:
        color: supported colours
    """

    def __init__(self):
        init(autoreset=False)
        self.color = (
            'red',
            'green',
            'yellow',
            'white',
            'blue'
        )

    @staticmethod
    def red(s):
        return Fore.LIGHTRED_EX + s + Fore.RESET

    @staticmethod
    def green(s):
        return Fore.LIGHTGREEN_EX + s + Fore.RESET

    @staticmethod
    def yellow(s):
        return Fore.LIGHTYELLOW_EX + s + Fore.RESET

    @staticmethod
    def white(s):
        return Fore.LIGHTWHITE_EX + s + Fore.RESET

    @staticmethod
    def blue(s):
        return Fore.LIGHTBLUE_EX + s + Fore.RESET

    def print(self, text, color):
        if color not in self.color:
            raise ValueError('unsupported colour {0}'.format(color))
        print(getattr(self, color)(text))
