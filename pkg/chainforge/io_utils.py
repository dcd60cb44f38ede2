"""
@file: io_utils.py
@time: 2026/10/17 16:40
@desc: chain, problem, state and report files
"""

import io
import os
import csv
import json
import tempfile

import yaml
import numpy as np

from chainforge.chain_utils import ChainSpec
from chainforge.error_utils import ChainforgeError, InputFileError
from chainforge.interpolate_utils import KnownJ, UNKNOWN_J
from chainforge.extension_utils import ExtensionProblem, ExtensionSolver
from chainforge.transfer_utils import SingleExcitationState
from chainforge.logger import logger


def number(value):
    """17 significant digits, the form every CSV cell uses."""
    return '%.17g' % value


class ChainFile(object):
    """Reads and writes chainforge files

    Chain specs are JSON objects {"couplings": [...], "fields": [...],
    "comment": "..."}; fields default to zero. Problem files are JSON, or
    YAML when the suffix is .yaml/.yml.

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    def load_document(path):
        try:
            with open(path, 'r', encoding='utf-8') as file:
                content = file.read()
        except OSError as e:
            raise InputFileError(e.strerror or str(e), path)
        if path.endswith(('.yaml', '.yml')):
            try:
                return yaml.safe_load(content)
            except yaml.YAMLError as e:
                mark = getattr(e, 'problem_mark', None)
                if mark is None:
                    raise InputFileError(str(e), path)
                raise InputFileError(getattr(e, 'problem', None) or 'invalid YAML', path, mark.line + 1,
                                     mark.column + 1)
        try:
            return json.loads(content)
        except json.JSONDecodeError as e:
            raise InputFileError(e.msg, path, e.lineno, e.colno)

    @staticmethod
    def chain_from_dict(document, path=None):
        if not isinstance(document, dict) or 'couplings' not in document:
            raise InputFileError('chain spec needs a "couplings" list', path)
        couplings = document['couplings']
        fields = document.get('fields')
        if fields is None:
            fields = [0.0] * (len(couplings) + 1)
        try:
            return ChainSpec(couplings, fields, document.get('comment'))
        except (TypeError, ValueError) as e:
            raise InputFileError('non-numeric chain entry ({0})'.format(e), path)
        except ChainforgeError as e:
            raise InputFileError(str(e), path)

    @staticmethod
    def chain_to_dict(spec):
        document = {'couplings': [float(j) for j in spec.couplings],
                    'fields': [float(b) for b in spec.fields]}
        if spec.comment:
            document['comment'] = spec.comment
        return document

    @staticmethod
    def read_chain(path):
        return ChainFile.chain_from_dict(ChainFile.load_document(path), path)

    @staticmethod
    def problem_from_dict(document, path=None):
        """ExtensionProblem from {"central", "M", "junction", "delta"?, "targets"?, "field_free"}

        Without "targets", "delta" generates the ladder targets for M.
        """
        if not isinstance(document, dict):
            raise InputFileError('problem file must hold an object', path)
        for key in ('central', 'M'):
            if key not in document:
                raise InputFileError('missing "{0}"'.format(key), path)
        central = ChainFile.chain_from_dict(document['central'], path)
        junction = document.get('junction', {'mode': 'unknown'})
        if not isinstance(junction, dict):
            raise InputFileError('"junction" must be an object with "mode" and optional "value"', path)
        mode = str(junction.get('mode', 'unknown')).lower()
        if mode == 'known':
            if 'value' not in junction:
                raise InputFileError('known junction needs a "value"', path)
            junction_mode = KnownJ(float(junction['value']))
        elif mode == 'unknown':
            junction_mode = UNKNOWN_J
        else:
            raise InputFileError('junction mode must be "known" or "unknown", got {0!r}'.format(mode), path)
        field_free = bool(document.get('field_free', True))
        delta = document.get('delta')
        try:
            size = int(document['M'])
            if document.get('targets') is None:
                if delta is None:
                    raise InputFileError('problem needs "targets" or "delta"', path)
                return ExtensionSolver.problem_from_delta(central, size, float(delta), junction_mode, field_free)
            targets = tuple((float(value), label) for value, label in document['targets'])
            return ExtensionProblem(central, size, junction_mode, targets, field_free,
                                    None if delta is None else float(delta))
        except (TypeError, ValueError) as e:
            raise InputFileError('malformed problem entry ({0})'.format(e), path)

    @staticmethod
    def read_problem(path):
        return ChainFile.problem_from_dict(ChainFile.load_document(path), path)

    @staticmethod
    def read_state(path, size=None):
        """State file {"amplitudes": [[re, im], ...]} or a bare list of reals or pairs."""
        document = ChainFile.load_document(path)
        amplitudes = document.get('amplitudes') if isinstance(document, dict) else document
        if not isinstance(amplitudes, list) or not amplitudes:
            raise InputFileError('state file needs a non-empty "amplitudes" list', path)
        try:
            values = np.array([complex(a[0], a[1]) if isinstance(a, list) else complex(a) for a in amplitudes])
        except (TypeError, ValueError, IndexError) as e:
            raise InputFileError('malformed amplitude ({0})'.format(e), path)
        if size is not None and len(values) != size:
            raise InputFileError('state has {0} amplitudes, chain has {1} sites'.format(len(values), size), path)
        try:
            return SingleExcitationState.normalized(values)
        except ChainforgeError as e:
            raise InputFileError(str(e), path)

    @staticmethod
    def state_to_dict(state, **extra):
        document = {'size': state.size,
                    'amplitudes': [[float(a.real), float(a.imag)] for a in state.amplitudes]}
        document.update(extra)
        return document

    @staticmethod
    def solution_report(solution):
        return {
            'junction': solution.junction,
            'extension': ChainFile.chain_to_dict(solution.extension),
            'max_condition_residual': solution.max_condition_residual,
            'max_spectral_residual': solution.max_spectral_residual,
            'targets': [{'node': r.node, 'symmetry': r.symmetry, 'condition_residual': r.condition_residual,
                         'spectral_residual': r.spectral_residual} for r in solution.achieved_targets],
            'diagnostics': {k: (float(v) if isinstance(v, np.floating) else v)
                            for k, v in solution.diagnostics.items()},
        }

    @staticmethod
    def dumps_json(document):
        return json.dumps(document, indent=2, ensure_ascii=False) + '\n'

    @staticmethod
    def dumps_csv(header, rows):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([number(v) if isinstance(v, (float, np.floating)) else v for v in row])
        return buffer.getvalue()

    @staticmethod
    def atomic_write(path, content):
        """Write to a temporary file beside `path`, then rename over it."""
        directory = os.path.dirname(os.path.abspath(path))
        descriptor, temporary = tempfile.mkstemp(dir=directory, prefix='.chainforge-', suffix='.tmp')
        try:
            with os.fdopen(descriptor, 'w', encoding='utf-8', newline='') as file:
                file.write(content)
            os.replace(temporary, path)
        except BaseException:
            if os.path.exists(temporary):
                os.remove(temporary)
            raise
        logger.debug('wrote {0}'.format(path))

    @staticmethod
    def emit(content, path=None):
        """Atomic write to `path`, or stdout without one."""
        if path is None or path == '-':
            print(content, end='')
        else:
            ChainFile.atomic_write(path, content)
