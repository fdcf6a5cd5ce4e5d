"""Command-line front door.

Exit status: 0 on success, 1 on validation/data errors, 2 on usage errors.
Every output file is written to a temporary sibling and renamed into place.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import warnings
from pathlib import Path

from . import discriminant as da
from . import evaluation as ev
from .data_model import build_dataset, load_bank_records, load_dataset
from .errors import EwsError, InsufficientPool
from .indicators import indicators_for
from .periods import Period, PeriodRange
from .synth import capital_scenario, generate_panel

HORIZONS = (4, 3, 2, 1)


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _period(text: str) -> Period:
    try:
        return Period.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _period_range(text: str) -> PeriodRange:
    try:
        return PeriodRange.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _nonneg_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return n


def _load_model(arg: str) -> da.DiscriminantModel:
    if arg == "paper" and not Path(arg).exists():
        return da.paper_model()
    return da.load_model(arg)


def _summary(text: str) -> None:
    print(text, file=sys.stderr)


# -- subcommands --------------------------------------------------------------


def cmd_fit(args) -> int:
    d = load_dataset(args.banks, args.macro, lenient=args.lenient)
    labeled = ev.label_dataset(d, window=args.window, intervened_by=args.label_intervened_by)
    model = da.fit(labeled.vectors, fit_window=args.window)
    if args.tune_threshold:
        t = da.tune_threshold(model, labeled.vectors, typeI_below_typeII=args.typeI_below_typeII)
        model = model.with_threshold(t)
    atomic_write(args.out, da.model_to_text(model))
    _summary(
        f"fit: {model.n_healthy} healthy, {model.n_distressed} distressed, "
        f"threshold={model.threshold:.6g}, regularization={model.regularization:.3g}, "
        f"{len(labeled.exceptions)} skipped -> {args.out}"
    )
    return 0


def _score_rows(args, with_decision: bool) -> int:
    model = _load_model(args.model)
    d = load_dataset(args.banks, args.macro, lenient=args.lenient)
    header = ["bank_id", "period", "score"] + (["decision"] if with_decision else [])
    lines = [",".join(header)]
    skipped = 0
    for r in d.banks:
        if r.period != args.period:
            continue
        try:
            x = indicators_for(d, r)
        except (EwsError, ArithmeticError) as exc:
            skipped += 1
            print(f"warning: {r.bank_id} {r.period}: {exc}", file=sys.stderr)
            continue
        s = da.score(model, x)
        row = [r.bank_id, str(r.period), repr(s)]
        if with_decision:
            row.append(da.classify(model, x).value)
        lines.append(",".join(row))
    skipped += sum(1 for e in d.exclusions if e.record.period == args.period)
    sys.stdout.write("\n".join(lines) + "\n")
    _summary(f"{args.command}: {len(lines) - 1} bank(s) at {args.period}, {skipped} skipped")
    return 0


def cmd_score(args) -> int:
    return _score_rows(args, with_decision=False)


def cmd_classify(args) -> int:
    return _score_rows(args, with_decision=True)


def cmd_probe(args) -> int:
    model = _load_model(args.model)
    d = load_dataset(args.banks, args.macro, lenient=args.lenient)
    report = ev.probe(model, d, getattr(args, "from"), args.to, yearly=args.yearly)
    alerts = ev.alerts_csv_text(report.alerts)
    if args.report:
        out = Path(args.report)
        texts = {
            "probe.csv": ev.probe_csv_text(report.entries),
            "alerts.csv": alerts,
            "yearly.csv": ev.yearly_csv_text(report.yearly_stats),
        }
        for name, text in texts.items():
            atomic_write(out / name, text)
    else:
        sys.stdout.write(alerts)
    _summary(
        f"probe: {len(report.entries)} bank-periods, {len(report.flagged)} flagged, "
        f"{len(report.alerts)} alert(s), {len(report.false_alarms)} false alarm(s), "
        f"{len(report.exceptions)} exception(s)"
    )
    return 0


def cmd_horizon(args) -> int:
    d = load_dataset(args.banks, args.macro, lenient=args.lenient)
    models, data = {}, {}
    for h in HORIZONS:
        window = PeriodRange(args.crisis.shift(-2 * h), args.crisis.shift(-2 * h + 1))
        vectors = ev.label_dataset(d, window=window, intervened_from=args.crisis).vectors
        try:
            models[h] = da.fit(vectors, fit_window=window)
        except EwsError as exc:
            print(f"warning: horizon {h} ({window}) skipped: {exc}", file=sys.stderr)
            continue
        data[h] = vectors
    if not models:
        raise EwsError("no horizon had enough data to fit a model")
    table = ev.horizon_study(models, data)
    atomic_write(args.out, ev.render_horizon_table(table))
    acc = ", ".join(f"{h}y {cm.accuracy:.2f}%" for h, cm in table.items())
    _summary(f"horizon: {acc} -> {args.out}")
    return 0


def cmd_pair(args) -> int:
    records, rejected = load_bank_records(args.banks, lenient=args.lenient)
    d = build_dataset(records, [])
    intervened, active = ev.capitalization_pool(d)
    caps = dict(intervened + active)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", InsufficientPool)
        result = ev.pair_banks(intervened, active)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    lines = ["intervened_id,active_id,intervened_capitalization,active_capitalization"]
    for a, b in result.pairs:
        lines.append(f"{a},{b},{caps[a]!r},{caps[b]!r}")
    for a in result.unmatched:
        lines.append(f"{a},,{caps[a]!r},")
    atomic_write(args.out, "\n".join(lines) + "\n")
    _summary(f"pair: {len(result.pairs)} pair(s), {len(result.unmatched)} unmatched -> {args.out}")
    return 0


def cmd_synth(args) -> int:
    config = capital_scenario(seed=args.seed, n_banks=args.banks, n_periods=args.periods)
    files = generate_panel(config)
    out = Path(args.out)
    atomic_write(out / "banks.csv", files.banks_csv)
    atomic_write(out / "macro.csv", files.macro_csv)
    _summary(f"synth: {args.banks} bank(s) x {args.periods} period(s), seed {args.seed} -> {out}")
    return 0


def cmd_report(args) -> int:
    path = Path(args.probe)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    entries = ev.read_probe_csv(path.read_text(encoding="utf-8"))
    if args.format == "text":
        sys.stdout.write(ev.render_probe_text(entries, yearly=args.yearly))
    else:
        stats = ev.yearly_statistics(ev.yearly_values(entries, args.yearly))
        sys.stdout.write(ev.yearly_csv_text(stats))
    _summary(f"report: {len(entries)} entries, {sum(e.flagged for e in entries)} flagged")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bank-ews", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def data_args(p, macro=True):
        p.add_argument("--banks", required=True, metavar="F")
        if macro:
            p.add_argument("--macro", required=True, metavar="F")
        p.add_argument("--lenient", action="store_true",
                       help="skip and report invalid rows instead of failing")

    p = sub.add_parser("fit", help="fit a discriminant on labeled bank-periods")
    data_args(p)
    p.add_argument("--label-intervened-by", required=True, type=_period, metavar="PERIOD")
    p.add_argument("--window", type=_period_range, metavar="P..P")
    p.add_argument("--tune-threshold", action="store_true")
    p.add_argument("--typeI-below-typeII", dest="typeI_below_typeII", action="store_true")
    p.add_argument("--out", required=True, metavar="F")
    p.set_defaults(func=cmd_fit)

    for name, func in (("score", cmd_score), ("classify", cmd_classify)):
        p = sub.add_parser(name, help=f"{name} every bank at one period")
        p.add_argument("--model", required=True, metavar="F")
        data_args(p)
        p.add_argument("--period", required=True, type=_period, metavar="P")
        p.set_defaults(func=func)

    p = sub.add_parser("probe", help="score every bank every half-year and report alerts")
    p.add_argument("--model", required=True, metavar="F")
    data_args(p)
    p.add_argument("--from", required=True, type=_period, metavar="P")
    p.add_argument("--to", required=True, type=_period, metavar="P")
    p.add_argument("--report", metavar="DIR")
    p.add_argument("--yearly", choices=sorted(ev.YEARLY_REDUCERS), default="max")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("horizon", help="confusion tables 4/3/2/1 years before a crisis")
    data_args(p)
    p.add_argument("--crisis", required=True, type=_period, metavar="PERIOD")
    p.add_argument("--out", required=True, metavar="F")
    p.set_defaults(func=cmd_horizon)

    p = sub.add_parser("pair", help="pair intervened banks with active banks by capitalization")
    data_args(p, macro=False)
    p.add_argument("--out", required=True, metavar="F")
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("synth", help="write a synthetic banks/macro panel")
    p.add_argument("--seed", required=True, type=_nonneg_int, metavar="N")
    p.add_argument("--banks", required=True, type=_nonneg_int, metavar="N")
    p.add_argument("--periods", required=True, type=_nonneg_int, metavar="N")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="render a probe CSV")
    p.add_argument("--probe", required=True, metavar="F")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--yearly", choices=sorted(ev.YEARLY_REDUCERS), default="max")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "typeI_below_typeII", False) and not args.tune_threshold:
        parser.error("--typeI-below-typeII requires --tune-threshold")
    if args.command == "probe" and args.to < getattr(args, "from"):
        parser.error("--from must not be after --to")
    try:
        return args.func(args)
    except (EwsError, FileNotFoundError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
