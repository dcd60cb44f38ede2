"""
@file: functions.py
@time: 2026/10/17 18:00
@desc: subcommand implementations
"""

from chainforge.common import *


def parse_grid(text):
    """'a:b:n' -> n evenly spaced times from a to b."""
    if text is None:
        raise ChainforgeError('a time grid is required (--grid a:b:n)')
    try:
        start, stop, count = text.split(':')
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise ChainforgeError('grid must look like a:b:n, got {0!r}'.format(text))
    if count < 1:
        raise ChainforgeError('grid needs at least one point, got {0}'.format(count))
    return np.linspace(start, stop, count)


def parse_range(text, size):
    """'a:b' (1-based, inclusive) -> range(a-1, b)."""
    if text is None:
        return None
    try:
        first, last = (int(v) for v in text.split(':'))
    except ValueError:
        raise ChainforgeError('site range must look like a:b, got {0!r}'.format(text))
    if not 1 <= first <= last <= size:
        raise ChainforgeError('site range {0} outside 1..{1}'.format(text, size))
    return range(first - 1, last)


def build_partition(size, args):
    """Partition from 'M_in,M_out' or from the explicit --*-range flags."""
    ranges = [getattr(args, name, None) for name in ('in_range', 'out_range', 'bulk_range')]
    if any(ranges):
        return RegionPartition.explicit(size, input=parse_range(ranges[0], size),
                                        output=parse_range(ranges[1], size),
                                        bulk=parse_range(ranges[2], size))
    if not args.partition:
        raise ChainforgeError('a partition is required: "M_in,M_out" or --in-range/--out-range/--bulk-range')
    try:
        m_in, m_out = (int(v) for v in args.partition.split(','))
    except ValueError:
        raise ChainforgeError('partition must look like M_in,M_out, got {0!r}'.format(args.partition))
    if m_in == m_out:
        return RegionPartition.symmetric(size, m_in)
    return RegionPartition.from_sizes(size, m_in, m_out)


def transfer_time(args):
    if args.t0 is not None:
        return args.t0
    if args.delta is not None:
        return math.pi / args.delta
    raise ChainforgeError('give --t0 or --delta')


class DesignExtension(object):
    """extend: solve an extension problem file

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    @exit_on_error
    @calculate
    def extend(args):
        problem = ChainFile.read_problem(args.problem)
        options = SolverOptions.from_settings(Setting, tolerance=args.tol, method=args.method,
                                              refine=False if args.no_refine else None)
        logger.info('Solving M={0} extension of a {1}-site chain for {2} targets'.format(
            problem.extension_size, problem.central.size, len(problem.targets)))
        solution = ExtensionSolver.solve_extension(problem, options)
        chain = ChainFile.chain_to_dict(ChainSpec(solution.assembled.couplings, solution.assembled.fields,
                                                  'M={0} extension of a {1}-site chain'.format(
                                                      problem.extension_size, problem.central.size)))
        ChainFile.emit(ChainFile.dumps_json(chain), args.out)
        report_path = args.report or (args.out + '.report.json' if args.out and args.out != '-' else None)
        if report_path:
            ChainFile.atomic_write(report_path, ChainFile.dumps_json(ChainFile.solution_report(solution)))
        if args.out and args.out != '-':
            residual_table.clear()
            for residual in solution.achieved_targets:
                residual_table.append(residual.node, residual.symmetry, residual.condition_residual,
                                      residual.spectral_residual)
            residual_table.print()
            color.print('J = {0:.17g}, {1}-site chain written to {2}'.format(
                solution.junction, solution.assembled.size, args.out), 'green')


class DisplaySpectrum(object):
    """spectrum: eigenvalues, symmetry labels and the Γ_P split

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    @exit_on_error
    def spectrum(args):
        chain = ChainFile.read_chain(args.chain)
        decomposition = ChainSpectrum.eigendecompose(chain)
        labels = decomposition.symmetry_labels or ('',) * decomposition.size
        classification = None
        if args.delta is not None or args.t0 is not None:
            tolerance = args.classification_tol or Setting.get_float('classification_tolerance')
            classification = TransferAnalysis.classify_eigenvalues(decomposition, args.delta, args.t0,
                                                                   tolerance=tolerance)
        header = ['index', 'eigenvalue', 'symmetry']
        rows = []
        for i, value in enumerate(decomposition.eigenvalues):
            row = [i + 1, float(value), labels[i]]
            if classification is not None:
                row += [float(classification.deviations[i]), int(i in classification.satisfied)]
            rows.append(row)
        if classification is not None:
            header += ['deviation', 'in_gamma_p']
        ChainFile.emit(ChainFile.dumps_csv(header, rows), args.out)
        if args.out and args.out != '-':
            spectrum_table.clear()
            for row in rows:
                spectrum_table.append(*(row + ['', ''])[:5])
            spectrum_table.print()


class AnalyseTransfer(object):
    """sweep, encode and create

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    @exit_on_error
    @calculate
    def sweep(args):
        times = parse_grid(args.grid)
        chain = ChainFile.read_chain(args.chain)
        partition = build_partition(chain.size, args)
        report = TransferAnalysis.fidelity_sweep(chain, partition, times, Setting.get_int('threads'))
        ChainFile.emit(ChainFile.dumps_csv(['time', 'F', 'sigma', 'avg_state_fidelity'],
                                           [[float(v) for v in row] for row in report.rows()]), args.out)
        best = int(np.argmax(report.fidelity))
        logger.info('max F = {0:.12f} at t = {1:.6g}'.format(report.fidelity[best], report.times[best]))

    @staticmethod
    @exit_on_error
    def encode(args):
        chain = ChainFile.read_chain(args.chain)
        partition = build_partition(chain.size, args)
        decomposition = ChainSpectrum.eigendecompose(chain)
        tolerance = args.classification_tol or Setting.get_float('classification_tolerance')
        classification = TransferAnalysis.classify_eigenvalues(decomposition, args.delta, transfer_time(args),
                                                               tolerance=tolerance)
        encoding = TransferAnalysis.null_space_encoding(chain, partition, classification, args.strategy,
                                                        decomposition)
        document = {
            't0': classification.t0,
            'delta': classification.delta,
            'phase': classification.phase,
            'violated': [i + 1 for i in encoding.violated],
            'null_dimension': encoding.null_dimension,
            'smallest_singular_value': encoding.smallest_singular_value,
            'states': [ChainFile.state_to_dict(state, fidelity=fidelity)
                       for state, fidelity in zip(encoding.states, encoding.fidelities)],
        }
        ChainFile.emit(ChainFile.dumps_json(document), args.out)
        logger.info('{0} encodable state(s), worst 1-F = {1:.3e}'.format(
            encoding.null_dimension, 1.0 - min(encoding.fidelities)))

    @staticmethod
    @exit_on_error
    def create(args):
        if args.t0 is None:
            raise ChainforgeError('create needs --t0')
        chain = ChainFile.read_chain(args.chain)
        partition = build_partition(chain.size, args)
        if args.target:
            target = ChainFile.read_state(args.target, chain.size)
            state, fidelity = TransferAnalysis.best_creation_state(chain, target, partition, args.t0)
            document = {'t0': args.t0, 'fidelity': fidelity,
                        'input_state': None if state is None else ChainFile.state_to_dict(state)}
            ChainFile.emit(ChainFile.dumps_json(document), args.out)
            return
        values = TransferAnalysis.creation_spectrum(chain, partition, args.t0)
        ChainFile.emit(ChainFile.dumps_csv(['index', 'eigenvalue'],
                                           [[i + 1, float(v)] for i, v in enumerate(values)]), args.out)


class DisplayBounds(object):
    """bounds: closed-form bound table for one or more N

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    @exit_on_error
    def bounds(args):
        documents = []
        bounds_table.clear()
        for size in args.sizes:
            if size < 2:
                raise ChainforgeError('bounds need N >= 2, got {0}'.format(size))
            document = TransferBounds.bounds_table(size, args.time, args.t0, args.p)
            documents.append(document)
            bounds_table.append(size, document['integral_bound'], document['closed_form_bound'],
                                document['binomial_tail_error'], document['chernoff_epsilon'],
                                document['t_in'] / args.t0)
        ChainFile.emit(ChainFile.dumps_json(documents), args.out)
        if args.out and args.out != '-':
            bounds_table.print()


class SelfCheck(object):
    """verify: seeded randomized checks

    Attributes:
        None
    """

    def __init__(self):
        pass

    @staticmethod
    @exit_on_error
    @calculate
    def verify(args):
        seed = args.seed if args.seed is not None else Setting.get_int('seed')
        results = RandomizedChecks.run_all(seed, args.cases)
        check_table.clear()
        for result in results:
            if result.passed:
                status = color.green('pass')
            elif result.warning_only:
                status = color.yellow('warn')
            else:
                status = color.red('FAIL')
            check_table.append(result.name, result.cases, float(result.max_error), result.tolerance, status)
        check_table.print()
        if args.out:
            ChainFile.atomic_write(args.out, ChainFile.dumps_json(
                [{'check': r.name, 'cases': r.cases, 'max_error': float(r.max_error), 'tolerance': r.tolerance,
                  'passed': r.passed} for r in results]))
        failed = [r.name for r in results if not r.passed and not r.warning_only]
        if failed:
            raise VerificationError('failed checks: {0}'.format(', '.join(failed)), results)
        logger.info('all checks passed with seed {0}'.format(seed))
