"""Command-line front end.

Subcommands: extract, select, train, predict, evaluate, synth. A flat
``key = value`` config file sets defaults; individual flags override it.
On failure the process exits nonzero with a single line
``ERROR <code>: <detail>`` on stderr.
"""

import argparse
import os
import sys
from . import dataset as ds
from . import featfile, gloh, metrics, mtl, pipeline, ridge
from .errors import GlohError, InvalidSpecError


def _parse_config_file(path):
    """Flat 'key = value' file; '#' starts a comment, blank lines ignored."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidSpecError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    return values


def _parse_age_range(text):
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise InvalidSpecError(f"bad age range {text!r}, expected LO:HI")


def build_config(args):
    """Merge config-file values and CLI flags into a RunConfig."""
    raw = _parse_config_file(args.config) if getattr(args, "config", None) else {}

    gp = {}
    for key in ("patch_size", "stride", "n_sectors", "n_orient"):
        if key in raw:
            gp[key] = int(raw[key])
    if "radii" in raw:
        gp["radii"] = tuple(float(v) for v in raw["radii"].split(","))
    if "clip_threshold" in raw:
        v = raw["clip_threshold"]
        gp["clip_threshold"] = None if v.lower() == "none" else float(v)

    so = {}
    if "max_iters" in raw:
        so["max_iters"] = int(raw["max_iters"])
    if "rel_tol" in raw:
        so["rel_tol"] = float(raw["rel_tol"])
    if "mode" in raw:
        so["mode"] = raw["mode"]
    if getattr(args, "mode", None):
        so["mode"] = args.mode

    kw = {"gloh": gloh.GlohParams(**gp), "solver": mtl.SolverOptions(**so)}
    for key, cast in (
        ("budget", int),
        ("cs_max", int),
        ("seed", int),
        ("height", int),
        ("width", int),
    ):
        if key in raw:
            kw[key] = cast(raw[key])
        flag = getattr(args, key, None)
        if flag is not None:
            kw[key] = flag
    if "alpha_grid" in raw:
        kw["alpha_grid"] = tuple(float(v) for v in raw["alpha_grid"].split(","))
    if "standardize" in raw:
        kw["standardize"] = raw["standardize"].lower() in ("1", "true", "yes")
    if getattr(args, "standardize", False):
        kw["standardize"] = True
    if "age_range" in raw:
        kw["age_range"] = _parse_age_range(raw["age_range"])
    if getattr(args, "age_range", None):
        kw["age_range"] = _parse_age_range(args.age_range)
    return pipeline.RunConfig(**kw)


def _load_pair(manifest_path, features_path):
    manifest = ds.parse_manifest(manifest_path)
    features = featfile.read_features(features_path)
    return manifest, features


def cmd_extract(args):
    config = build_config(args)
    manifest = ds.parse_manifest(args.manifest)
    base_dir = os.path.dirname(os.path.abspath(args.manifest))
    feats = pipeline.extract_features(manifest, config, base_dir)
    featfile.write_features(args.out, feats)
    print(f"N={feats.shape[0]} K={feats.shape[1]}")


def cmd_select(args):
    config = build_config(args)
    manifest, features = _load_pair(args.manifest, args.features)
    sel = pipeline.select_bins(manifest, features, config)
    mtl.write_selection(args.out, sel)
    print(f"lambda={sel.lam!r} selected={len(sel.selected)}")


def cmd_train(args):
    config = build_config(args)
    manifest, features = _load_pair(args.manifest, args.features)
    selection = None
    if args.selection:
        selection = mtl.read_selection(args.selection, features.shape[1], 2)
    selection, model = pipeline.train_model(manifest, features, config, selection)
    ridge.write_model(args.out, model)
    print(f"selected={len(selection.selected)} tasks={len(model.weights)}")


def cmd_predict(args):
    model = ridge.read_model(args.model)
    features = featfile.read_features(args.features)
    manifest = ds.parse_manifest(args.manifest) if args.manifest else None
    preds = pipeline.predict_rows(model, features, manifest)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("row,pred_age\n")
        for i, p in enumerate(preds):
            fh.write(f"{i},{float(p)!r}\n")
    print(f"predicted {len(preds)} rows")


def cmd_evaluate(args):
    config = build_config(args)
    manifest, features = _load_pair(args.manifest, args.features)
    report = pipeline.evaluate_lopo(manifest, features, config)
    if args.out:
        metrics.write_report(args.out, report)
    else:
        sys.stdout.write(metrics.format_report(report))
    print(f"n={report.n} mae={report.mae:.4f}", file=sys.stderr)


def cmd_synth(args):
    spec = ds.SynthSpec(
        K=args.k,
        L=args.tasks,
        N=args.n,
        support_size=args.support,
        noise_sigma=args.sigma,
        seed=args.seed if args.seed is not None else 0,
    )
    manifest = pipeline.synth_dataset(spec, args.out_dir)
    print(f"wrote {len(manifest.samples)} samples to {args.out_dir}")


def _add_common(p, *, mode=False, budget=False, evaluation=False):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, default=None)
    if mode:
        p.add_argument("--mode", choices=(mtl.MODE_MTL, mtl.MODE_STL), default=None)
    if budget:
        p.add_argument("--budget", type=int, default=None)
    if evaluation:
        p.add_argument("--age-range", dest="age_range", metavar="LO:HI")
        p.add_argument("--cs-max", dest="cs_max", type=int, default=None)
        p.add_argument("--standardize", action="store_true")


def make_parser():
    parser = argparse.ArgumentParser(
        prog="glohage",
        description="GLOH + multi-task bin selection + ridge age estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract GLOH features for a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--width", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("select", help="sparse bin selection, writes GLOHSEL")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    _add_common(p, mode=True, budget=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", help="selection + ridge fit, writes GLOHRIDGE")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--selection", help="reuse an existing GLOHSEL file")
    _add_common(p, mode=True, budget=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="model + features -> predictions CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="optional, supplies gender per row")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="leave-one-person-out evaluation")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", help="report CSV path (default: stdout)")
    _add_common(p, mode=True, budget=True, evaluation=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic benchmark")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--k", type=int, default=500)
    p.add_argument("--tasks", type=int, default=2)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--support", type=int, default=10)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        args.func(args)
    except GlohError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"ERROR MissingFile: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
