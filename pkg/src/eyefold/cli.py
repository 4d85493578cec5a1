"""Command-line interface.

Every subcommand is a thin wrapper over one library operation, so anything
scripted here can be reproduced programmatically. Randomized commands
(``gmm-fit``, ``gmm-sample``) require an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .blendshape import (
    SharpenParams,
    generate_candidates,
    load_template_set,
    path_interpolate,
    regional_interpolate,
    sharpen_crease,
)
from .errors import EyefoldError, SampleMismatch
from .mesh import load_obj, load_topology, mirror_mesh, save_obj
from .metric import DEFAULT_PROFILE_SAMPLES, error_cdf, group_errors, hoodedness_profile, shape_error
from .pipeline import PipelineConfig, run_batch_pipeline
from .stats import diversity_report, gmm_fit, gmm_sample, load_gmm, profile_stats, save_gmm
from .tables import (
    read_errors_csv,
    read_matrix_csv,
    read_metadata_csv,
    read_profile_stats_csv,
    read_profiles_csv,
    write_cdf_csv,
    write_diversity_csv,
    write_errors_csv,
    write_group_errors_csv,
    write_matrix_csv,
    write_profile_stats_csv,
    write_profiles_csv,
)
from .templates import gen_templates


def _cmd_gen_templates(args) -> int:
    manifest = gen_templates(args.out, args.resolution)
    print(manifest)
    return 0


def _cmd_candidates(args) -> int:
    templates, _ = load_template_set(args.templates)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for mesh in generate_candidates(templates, args.n):
        save_obj(mesh, out_dir / f"{mesh.name}.obj")
    print(out_dir)
    return 0


def _cmd_interp(args) -> int:
    templates, topo = load_template_set(args.templates)
    if args.u_inner is None and args.u_outer is None:
        mesh = path_interpolate(templates, args.u)
    else:
        u_inner = args.u if args.u_inner is None else args.u_inner
        u_outer = args.u if args.u_outer is None else args.u_outer
        mesh = regional_interpolate(templates, topo, args.u, u_inner, u_outer)
    save_obj(mesh, args.out)
    print(args.out)
    return 0


def _cmd_sharpen(args) -> int:
    topo = load_topology(args.topology)
    mesh = load_obj(args.mesh)
    out = sharpen_crease(mesh, topo, SharpenParams(strength=args.strength, orientation_deg=args.orientation))
    save_obj(out, args.out)
    print(args.out)
    return 0


def _cmd_mirror(args) -> int:
    topo = load_topology(args.topology)
    mesh = load_obj(args.mesh)
    save_obj(mirror_mesh(mesh, topo), args.out)
    print(args.out)
    return 0


def _cmd_profile(args) -> int:
    topo = load_topology(args.topology)
    profiles = [hoodedness_profile(load_obj(p), topo, args.k) for p in args.meshes]
    write_profiles_csv(profiles, args.out)
    print(args.out)
    return 0


def _cmd_error(args) -> int:
    profiles_a = read_profiles_csv(args.a)
    profiles_b = read_profiles_csv(args.b)
    shared = sorted(set(profiles_a) & set(profiles_b))
    if not shared:
        raise SampleMismatch("the two profile tables share no mesh ids")
    errors = {mesh_id: shape_error(profiles_a[mesh_id], profiles_b[mesh_id]).value for mesh_id in shared}
    write_errors_csv(errors, args.out)
    print(args.out)
    return 0


def _cmd_cdf(args) -> int:
    errors = read_errors_csv(args.errors)
    cdf = error_cdf(list(errors.values()))
    write_cdf_csv(cdf, args.out)
    print(args.out)
    return 0


def _cmd_group_errors(args) -> int:
    errors = read_errors_csv(args.errors)
    metadata = read_metadata_csv(args.metadata)
    write_group_errors_csv(group_errors(errors, metadata), args.out)
    print(args.out)
    return 0


def _cmd_gmm_fit(args) -> int:
    data = read_matrix_csv(args.data)
    model = gmm_fit(data, args.k, args.seed)
    save_gmm(model, args.out)
    print(args.out)
    return 0


def _cmd_gmm_sample(args) -> int:
    model = load_gmm(args.model)
    write_matrix_csv(gmm_sample(model, args.n, args.seed), args.out)
    print(args.out)
    return 0


def _cmd_profile_stats(args) -> int:
    profiles = list(read_profiles_csv(args.profiles).values())
    write_profile_stats_csv(profile_stats(profiles), args.out)
    print(args.out)
    return 0


def _cmd_diversity(args) -> int:
    stats_a = read_profile_stats_csv(args.a)
    stats_b = read_profile_stats_csv(args.b)
    report = diversity_report(stats_a, stats_b)
    write_diversity_csv(report, args.out)
    print(f"std_b_greater_at_all_t: {'true' if report.all_points_greater else 'false'}")
    return 0


def _cmd_pipeline(args) -> int:
    config = PipelineConfig(
        template_manifest=Path(args.templates),
        scan_manifest=Path(args.scans),
        annotation_log=Path(args.annotations),
        output_dir=Path(args.out),
        k=args.k,
        mirror_augment=args.mirror_augment,
    )
    manifest = run_batch_pipeline(config)
    print(f"{args.out}: {len(manifest['outputs'])} meshes")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir, ui_dir=args.ui)
    uvicorn.run(app, host=args.listen, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eyefold", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-templates", help="write the synthetic template family")
    p.add_argument("--out", required=True)
    p.add_argument("--resolution", type=int, default=24)
    p.set_defaults(func=_cmd_gen_templates)

    p = sub.add_parser("candidates", help="write uniformly spaced candidate retopos")
    p.add_argument("--templates", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=20)
    p.set_defaults(func=_cmd_candidates)

    p = sub.add_parser("interp", help="evaluate the template path (optionally regionally)")
    p.add_argument("--templates", required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--u-inner", type=float, default=None)
    p.add_argument("--u-outer", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_interp)

    p = sub.add_parser("sharpen", help="apply the crease-pinching blendshape")
    p.add_argument("--mesh", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--strength", type=float, required=True)
    p.add_argument("--orientation", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sharpen)

    p = sub.add_parser("mirror", help="horizontally mirror a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mirror)

    p = sub.add_parser("profile", help="hoodedness profiles of meshes, as CSV")
    p.add_argument("--topology", required=True)
    p.add_argument("--k", type=int, default=DEFAULT_PROFILE_SAMPLES)
    p.add_argument("--out", required=True)
    p.add_argument("meshes", nargs="+")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("error", help="per-mesh shape error between two profile tables")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_error)

    p = sub.add_parser("cdf", help="empirical CDF of an error table")
    p.add_argument("--errors", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_cdf)

    p = sub.add_parser("group-errors", help="mean error per metadata group")
    p.add_argument("--errors", required=True)
    p.add_argument("--metadata", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_group_errors)

    p = sub.add_parser("gmm-fit", help="fit a diagonal GMM to a numeric CSV matrix")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gmm_fit)

    p = sub.add_parser("gmm-sample", help="draw samples from a stored GMM")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gmm_sample)

    p = sub.add_parser("profile-stats", help="per-t mean/std over a profile table")
    p.add_argument("--profiles", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_profile_stats)

    p = sub.add_parser("diversity", help="compare two profile-stats tables")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_diversity)

    p = sub.add_parser("pipeline", help="batch-produce annotated retopos")
    p.add_argument("--templates", required=True)
    p.add_argument("--scans", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=DEFAULT_PROFILE_SAMPLES)
    p.add_argument("--mirror-augment", action="store_true")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--listen", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None, help="directory with a built browser UI to serve at /")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EyefoldError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
