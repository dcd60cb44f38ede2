"""
@file: main.py
@time: 2026/10/17 18:30
@desc: chainforge entry point
"""

import argparse
from chainforge.functions import *


def add_partition_arguments(parser):
    parser.add_argument("partition", nargs='?', metavar="M_in,M_out",
                        help="input prefix and output suffix sizes")
    parser.add_argument("--in-range", metavar="a:b", help="input sites, 1-based inclusive")
    parser.add_argument("--out-range", metavar="c:d", help="output sites, 1-based inclusive")
    parser.add_argument("--bulk-range", metavar="e:f", help="bulk sites, 1-based inclusive")


def add_time_arguments(parser):
    parser.add_argument("--t0", type=float, metavar="time", help="transfer time")
    parser.add_argument("--delta", type=float, metavar="spacing", help="ladder spacing, t0 = pi/delta")
    parser.add_argument("--classification-tol", type=float, metavar="tol",
                        help="Gamma_P tolerance in units of delta")


def get_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="path", help="output file, stdout when omitted")
    common.add_argument("--grid", metavar="a:b:n", help="time grid of n points from a to b")
    common.add_argument("--seed", type=int, metavar="seed", help="seed of the randomized checks")
    common.add_argument("--verbose", action="store_true", help="debug logging on the console")

    parser = argparse.ArgumentParser(description=color.blue("Symmetric spin-chain extensions for encoded "
                                                            "quantum state transfer."),
                                     epilog=color.yellow("Configuration lives in ") + color.green(
                                         init_config.config_file))
    parser.add_argument("-v", "--version", action="store_true", help="display version")
    subparsers = parser.add_subparsers(dest="command", metavar="command")

    extend = subparsers.add_parser("extend", parents=[common], help="design an extension from a problem file")
    extend.add_argument("problem", help="problem file (JSON or YAML)")
    extend.add_argument("--tol", type=float, metavar="tol", help="relative solver tolerance")
    extend.add_argument("--method", choices=["lanczos", "euclid"], help="reconstruction backend")
    extend.add_argument("--no-refine", action="store_true", help="skip the least-squares polish")
    extend.add_argument("--report", metavar="path", help="residual report file, default <out>.report.json")

    spectrum = subparsers.add_parser("spectrum", parents=[common], help="eigenvalues and symmetry labels")
    spectrum.add_argument("chain", help="chain spec file")
    add_time_arguments(spectrum)

    sweep = subparsers.add_parser("sweep", parents=[common], help="transfer fidelity over a time grid")
    sweep.add_argument("chain", help="chain spec file")
    add_partition_arguments(sweep)

    encode = subparsers.add_parser("encode", parents=[common], help="null-space encodings at t0")
    encode.add_argument("chain", help="chain spec file")
    add_partition_arguments(encode)
    add_time_arguments(encode)
    encode.add_argument("--strategy", choices=["exact", "worst"], default="exact",
                        help="avoid all violating eigenvectors or only the worst offenders")

    bounds = subparsers.add_parser("bounds", parents=[common], help="analytic bounds for chain lengths N")
    bounds.add_argument("sizes", nargs='+', type=int, metavar="N", help="chain lengths")
    bounds.add_argument("--p", type=float, default=0.5, help="Chernoff success probability")
    bounds.add_argument("--t0", type=float, default=1.0, help="transfer time of the timing estimates")
    bounds.add_argument("--time", type=float, help="wavepacket time, default t0/2")

    create = subparsers.add_parser("create", parents=[common], help="state-creation spectrum or best input")
    create.add_argument("chain", help="chain spec file")
    add_partition_arguments(create)
    create.add_argument("--t0", type=float, metavar="time", help="creation time")
    create.add_argument("--target", metavar="path", help="target state file")

    verify = subparsers.add_parser("verify", parents=[common], help="seeded randomized self-checks")
    verify.add_argument("--cases", type=int, help="cases of the reconstruction check (others scale with it)")
    return parser


def main(argv=None):
    parser = get_parser()
    args = parser.parse_args(argv)
    attach_file_handler()
    Setting.reload()
    if getattr(args, 'verbose', False):
        set_verbose(True)
    if args.version:
        logger.info("chainforge {0}".format(init_config.version))
    elif args.command == "extend":
        DesignExtension.extend(args)
    elif args.command == "spectrum":
        DisplaySpectrum.spectrum(args)
    elif args.command == "sweep":
        AnalyseTransfer.sweep(args)
    elif args.command == "encode":
        AnalyseTransfer.encode(args)
    elif args.command == "bounds":
        DisplayBounds.bounds(args)
    elif args.command == "create":
        AnalyseTransfer.create(args)
    elif args.command == "verify":
        SelfCheck.verify(args)
    else:
        parser.print_help()


if __name__ == "__main__":
    main()
