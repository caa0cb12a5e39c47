"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error (bad file, bad parameter
value, corrupt stream), 4 numerical failure (non-finite result, recovery that
misses its tolerance).
"""
from __future__ import annotations

import argparse
import os
import sys
import warnings

import numpy as np

from . import __version__
from . import adaptive, codec, filters, noise, recovery, resample, spectral
from . import io as fio
from . import transforms as tr

__all__ = ["main", "build_parser", "run_pipeline", "parse_pipeline", "PipelineConfig",
           "COMMAND_TABLE", "NumericalError"]

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

# Library operations each subcommand reaches (checked by the test suite).
COMMAND_TABLE = {
    "transform": ("transforms.dft", "transforms.idft", "transforms.dft2",
                  "transforms.sdft", "transforms.isdft", "transforms.shsc_dft",
                  "transforms.ishsc_dft", "transforms.shscr_dft2", "transforms.dct",
                  "transforms.idct", "transforms.dct2", "transforms.dst",
                  "transforms.idst", "transforms.hadamard", "transforms.walsh",
                  "transforms.iwalsh", "transforms.haar", "transforms.ihaar"),
    "analyze": ("spectral.compaction_profile", "spectral.sparsity_at_energy",
                "spectral.band_limited_approx", "spectral.energy_mask", "spectral.rect_outline",
                "spectral.blockwise_spectra", "spectral.mean_block_sparsity",
                "spectral.pooled_block_sparsity"),
    "compress": ("codec.encode", "codec.decode", "codec.rate_distortion", "codec.psnr",
                 "codec.blockiness"),
    "decompress": ("codec.decode",),
    "filter": ("filters.apply_filter", "filters.estimate_noise_ps", "filters.filter_gain"),
    "localfilter": ("adaptive.local_adaptive_filter", "adaptive.sliding_dct",
                    "filters.estimate_noise_ps"),
    "narrowband": ("filters.suppress_narrowband",),
    "shift": ("resample.fractional_shift", "resample.shift2", "resample.elastic_resample"),
    "resize": ("resample.resize_shsc", "resample.zoom", "resample.zero_pad_interpolate"),
    "rotate": ("resample.rotate_three_pass", "resample.rotate_shscr"),
    "deriv": ("resample.differentiate",),
    "integ": ("resample.integrate",),
    "recover": ("recovery.make_band_mask", "recovery.recover_direct", "recovery.recover_gp"),
    "sinclet": ("recovery.generate_sinclet", "recovery.uncertainty_report"),
    "uncertainty": ("recovery.uncertainty_report",),
    "csbound": ("recovery.cs_sample_bound",),
    "pipeline": ("cli.run_pipeline", "noise.add_awgn", "io.read_pgm", "io.write_pgm"),
}


class NumericalError(RuntimeError):
    """A computation produced an unusable result."""


class UsageError(ValueError):
    """Invalid combination of options."""


# --- file helpers ----------------------------------------------------------

def load_grid(path, with_maxval: bool = False):
    """Load a PGM image, CSV grid or raw binary64 grid by file extension."""
    ext = os.path.splitext(str(path))[1].lower()
    maxval = None
    if ext in (".pgm", ".pnm"):
        arr, maxval = fio.read_pgm(path, return_maxval=True)
    elif ext == ".csv":
        arr = fio.read_grid_csv(path)
    elif ext in (".raw", ".bin", ".f64"):
        arr = fio.read_raw(path)
    else:
        raise ValueError(f"unsupported input format {ext!r} (use .pgm, .csv or .raw)")
    return (arr, maxval) if with_maxval else arr


def save_grid(arr, path, maxval=None) -> None:
    arr = np.asarray(arr)
    if not np.all(np.isfinite(arr)):
        raise NumericalError("result contains non-finite values")
    ext = os.path.splitext(str(path))[1].lower()
    if ext in (".pgm", ".pnm"):
        if np.iscomplexobj(arr):
            raise ValueError("complex data cannot be written to PGM; use .csv or .raw")
        fio.write_pgm(np.atleast_2d(arr), path, maxval=maxval)
    elif ext == ".csv":
        fio.write_grid_csv(arr, path)
    elif ext in (".raw", ".bin", ".f64"):
        fio.write_raw(arr, path)
    else:
        raise ValueError(f"unsupported output format {ext!r} (use .pgm, .csv or .raw)")


def _floats(text: str, n=None) -> list[float]:
    vals = [float(v) for v in str(text).replace("x", ",").split(",") if v.strip()]
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _ints(text: str, n=None) -> list[int]:
    vals = _floats(text, n)
    if any(v != int(v) for v in vals):
        raise UsageError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _window(text: str, mode: str = "central") -> adaptive.WindowSpec:
    if text == "vision":
        return adaptive.WindowSpec(adaptive.VISION_PRESET.height, adaptive.VISION_PRESET.width, mode)
    dims = _ints(text)
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2:
        raise UsageError(f"window must be 'N', 'HxW' or 'vision', got {text!r}")
    return adaptive.WindowSpec(dims[0], dims[1], mode)


def _as_line(arr: np.ndarray) -> np.ndarray:
    """1xN grids are treated as 1D signals."""
    return arr[0] if arr.ndim == 2 and arr.shape[0] == 1 else arr


def _noise_power(value, img, domain: str) -> float:
    if value is None or str(value).lower() == "auto":
        return filters.estimate_noise_ps(img, domain if domain in ("dft", "dct") else "dct")
    sigma = float(value)
    if sigma < 0:
        raise ValueError("noise sigma must be non-negative")
    return sigma * sigma


def _emit(values: dict, path=None) -> None:
    text = fio.write_report(values, path)
    sys.stdout.write(text)


# --- operations shared by subcommands and pipeline stages ------------------

def op_filter(img, domain="dct", kind="wiener", P=1.0, noise_sigma=None, noise_ps=None, isfr=None):
    ps = fio.read_grid_csv(noise_ps).real if noise_ps else _noise_power(noise_sigma, img, domain)
    isfr_grid = fio.read_grid_csv(isfr) if isfr else None
    spec = filters.FilterSpec(kind, ps, float(P), isfr_grid)
    return filters.apply_filter(img, domain, spec)


def op_localfilter(img, window="7x7", mode="central", kind="rejective", P=1.0, noise_sigma=None):
    w = _window(window, mode)
    spec = filters.FilterSpec(kind, _noise_power(noise_sigma, img, "dct"), float(P))
    return adaptive.local_adaptive_filter(img, w, spec)


def op_narrowband(img, domain="dft", peak_factor=8.0, protect_radius=4, size=5, separable=False):
    return filters.suppress_narrowband(img, domain, float(peak_factor), int(protect_radius),
                                       int(size), bool(separable))


def op_shift(img, dx=0.0, dy=0.0, domain="dct", field=None, window="7x7"):
    if field:
        return resample.elastic_resample(img, fio.read_field(field), _window(window))
    if img.ndim == 1:
        return resample.fractional_shift(img, float(dx), domain)
    return resample.shift2(img, float(dy), float(dx), domain)


def op_resize(img, sigma=1.0, shift=0.0, keep_frame=False, zero_pad=None, domain="dft"):
    if zero_pad:
        return resample.zero_pad_interpolate(img, int(zero_pad), domain)
    if keep_frame:
        return resample.zoom(img, float(sigma))
    return resample.resize_shsc(img, float(sigma), float(shift))


def op_rotate(img, theta=0.0, method="3pass", degrees=False, domain="dct"):
    theta = np.radians(float(theta)) if degrees else float(theta)
    if method == "3pass":
        return resample.rotate_three_pass(img, theta, domain)
    if method == "shscr":
        return resample.rotate_shscr(img, theta)
    raise UsageError(f"unknown rotation method {method!r}")


def op_deriv(img, domain="dct", axis=-1):
    return resample.differentiate(img, domain, int(axis))


def op_integ(img, domain="dct", axis=-1):
    return resample.integrate(img, domain, int(axis))


def codec_params(block=8, rule="keep_all", param=0.0, q=1.0, entropy=True) -> codec.CodecParams:
    return codec.CodecParams(int(block), rule, float(param), float(q), bool(entropy))


# --- subcommand handlers ---------------------------------------------------

def cmd_transform(a) -> int:
    x = _as_line(load_grid(a.input))
    kind = a.kind
    if kind == "sdft":
        out = (tr.isdft if a.inverse else tr.sdft)(x, a.u, a.v, axis=-1)
    elif kind == "shsc":
        out = (tr.ishsc_dft if a.inverse else tr.shsc_dft)(x, a.u, a.v, a.sigma, axis=-1)
    elif kind == "shscr":
        out = tr.shscr_dft2(x, a.theta, a.u, a.u, a.v, a.v, a.sigma, inverse=a.inverse)
    elif kind == "dst":
        fn = tr.idst if a.inverse else tr.dst
        if x.ndim == 1 or a.axis is not None:
            out = fn(x, axis=-1 if a.axis is None else a.axis)
        else:
            out = fn(fn(x, axis=-1), axis=0)
    elif x.ndim == 1 or a.axis is not None:
        fn = tr.inverse if a.inverse else tr.forward
        out = fn(x, kind, axis=-1 if a.axis is None else a.axis)
    else:
        out = (tr.inverse2 if a.inverse else tr.forward2)(x, kind)
    if a.inverse and np.iscomplexobj(out) and np.allclose(out.imag, 0, atol=1e-12 * (np.abs(out).max() or 1)):
        out = out.real
    save_grid(out, a.output)
    return EXIT_OK


def cmd_analyze(a) -> int:
    img = load_grid(a.input)
    if np.iscomplexobj(img):
        raise ValueError("analysis expects a real image")
    report = {"height": img.shape[0], "width": img.shape[1] if img.ndim > 1 else 1}
    kinds = tr.KINDS if a.kind == "all" else (a.kind,)
    for kind in kinds:
        sp = tr.forward2(img, kind) if img.ndim == 2 else tr.forward(img, kind)
        prof = spectral.compaction_profile(sp, a.exclude_dc)
        report[f"sparsity_{kind}"] = spectral.sparsity_at_energy(prof, a.fraction)
        if a.profile_csv and (kind == a.profile_kind):
            prof.to_csv(a.profile_csv)
    if img.ndim == 2:
        report["block"] = a.block
        report["sparsity_blockwise_dct"] = spectral.mean_block_sparsity(img, a.block, a.fraction,
                                                                        a.exclude_dc)
        report["sparsity_blockwise_pooled_dct"] = spectral.pooled_block_sparsity(
            img, a.block, a.fraction, a.exclude_dc)
        sp = tr.dct2(img)
        mask = spectral.energy_mask(sp, a.fraction)
        (r0, r1, c0, c1), cover = spectral.rect_outline(mask)
        report["mask_fraction"] = float(mask.mean())
        report["mask_outline"] = f"{r0}:{r1},{c0}:{c1}"
        report["mask_outline_coverage"] = cover
        if a.approx:
            approx, rmse = spectral.band_limited_approx(img, "dct", mask)
            report["approx_rmse"] = rmse
            save_grid(approx, a.approx)
    _emit(report, a.report)
    return EXIT_OK


def cmd_compress(a) -> int:
    img = load_grid(a.input)
    if img.ndim != 2 or np.iscomplexobj(img):
        raise ValueError("compression expects a real 2D image")
    p = codec_params(a.block, a.rule, a.param, a.q, not a.no_entropy)
    bs = codec.encode(img, p)
    with open(a.output, "wb") as fh:
        fh.write(bs.data)
    rec = codec.decode(bs)
    report = {"bytes": len(bs), "bpp": bs.bpp, "psnr_db": codec.psnr(img, rec),
              "blockiness": codec.blockiness(rec, p.block)}
    if a.rd_csv:
        qs = _floats(a.q_sweep) if a.q_sweep else [p.q * 2 ** k for k in range(6)]
        sweep = [codec_params(a.block, a.rule, a.param, q, not a.no_entropy) for q in qs]
        codec.rd_to_csv(codec.rate_distortion(img, sweep), a.rd_csv)
    _emit(report, a.report)
    return EXIT_OK


def cmd_decompress(a) -> int:
    with open(a.input, "rb") as fh:
        data = fh.read()
    save_grid(codec.decode(data), a.output, a.maxval)
    return EXIT_OK


def _image_cmd(func, **kw):
    def run(a) -> int:
        img, maxval = load_grid(a.input, with_maxval=True)
        if np.iscomplexobj(img):
            raise ValueError("expected real data")
        params = {k: getattr(a, v) for k, v in kw.items()}
        out = func(_as_line(img), **params)
        save_grid(out, a.output, maxval if out.shape == img.shape else None)
        return EXIT_OK
    return run


def cmd_recover(a) -> int:
    shape = tuple(_ints(a.shape))
    samples = fio.read_samples(a.input, shape)
    if sum(x is not None for x in (a.mask, a.rect, a.sector)) != 1:
        raise UsageError("give exactly one of --mask, --rect, --sector")
    if a.mask:
        mask = fio.read_mask(a.mask)
        mask = mask[0] if len(shape) == 1 else mask
        mask = recovery.make_band_mask(shape, "custom", custom=mask, domain=a.domain)
    elif a.rect:
        mask = recovery.make_band_mask(shape, "rect", dims=_ints(a.rect), domain=a.domain)
    else:
        r, ang = _floats(a.sector, 2)
        mask = recovery.make_band_mask(shape, "sector", radius=r, angle=ang, domain=a.domain)
    if a.mask_out:
        fio.write_mask(mask, a.mask_out)
    if a.method == "direct":
        rep = recovery.recover_direct(samples, mask, a.domain, a.tol)
    else:
        rep = recovery.recover_gp(samples, mask, a.domain, a.max_iters, a.tol)
    save_grid(rep.signal, a.output)
    _emit({"method": a.method, "K": samples.K, "band_size": int(mask.sum()), **rep.as_dict()},
          a.report)
    return EXIT_OK if rep.converged else EXIT_NUMERIC


def cmd_sinclet(a) -> int:
    start, stop = _ints(a.support, 2)
    res = recovery.generate_sinclet(a.n, (start, stop), a.bandwidth, a.iters, a.domain)
    save_grid(res.kernel, a.output)
    _emit({"N": res.N, "support": res.support_size, "band": res.band_size,
           "product": res.support_size * res.band_size, "eq6_satisfied": res.eq6_satisfied,
           "iterations": res.iterations, "spatial_concentration": res.spatial_concentration,
           "spectral_concentration": res.spectral_concentration,
           "concentrated": res.concentrated}, a.report)
    return EXIT_OK


def cmd_uncertainty(a) -> int:
    x = _as_line(load_grid(a.input))
    rep = recovery.uncertainty_report(x, a.signal_tol, a.spect_tol, a.domain)
    _emit(rep.as_dict(), a.report)
    return EXIT_OK


def cmd_csbound(a) -> int:
    if (a.k is None) == (a.fraction is None):
        raise UsageError("give exactly one of --k and --fraction")
    k = a.k if a.k is not None else a.fraction * a.n
    m, ok = recovery.cs_sample_bound(k, a.n)
    _emit({"K": k, "N": a.n, "log2N": float(np.log2(a.n)), "M": m, "M_over_N": m / a.n,
           "feasible": ok}, a.report)
    return EXIT_OK


def cmd_pipeline(a) -> int:
    cfg = parse_pipeline(a.config)
    if a.input:
        cfg.input = a.input
    if a.output:
        cfg.output = a.output
    if a.seed is not None:
        cfg.seed = a.seed
    run_pipeline(cfg)
    return EXIT_OK


# --- pipeline ------------------------------------------------------------

class PipelineConfig:
    """Ordered stages plus input/output paths and the RNG seed."""

    def __init__(self, stages=None, input=None, output=None, seed=None):
        self.stages = list(stages or [])
        self.input = input
        self.output = output
        self.seed = seed

    def __repr__(self) -> str:
        names = [s for s, _ in self.stages]
        return f"PipelineConfig(stages={names}, input={self.input!r}, output={self.output!r}, seed={self.seed})"


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


_STAGES = {
    "add-noise": (None, {"sigma": float}),
    "filter": (op_filter, {"domain": str, "kind": str, "p": float, "noise-sigma": str,
                           "noise-ps": str, "isfr": str}),
    "localfilter": (op_localfilter, {"window": str, "mode": str, "kind": str, "p": float,
                                     "noise-sigma": str}),
    "narrowband": (op_narrowband, {"domain": str, "peak-factor": float, "protect-radius": int,
                                   "size": int, "separable": _bool}),
    "shift": (op_shift, {"dx": float, "dy": float, "domain": str, "field": str, "window": str}),
    "resize": (op_resize, {"sigma": float, "shift": float, "keep-frame": _bool, "zero-pad": int,
                           "domain": str}),
    "rotate": (op_rotate, {"theta": float, "method": str, "degrees": _bool, "domain": str}),
    "deriv": (op_deriv, {"domain": str, "axis": int}),
    "integ": (op_integ, {"domain": str, "axis": int}),
    "encode": (None, {"block": int, "rule": str, "param": float, "q": float, "entropy": _bool}),
    "decode": (None, {}),
    "clip": (None, {"lo": float, "hi": float}),
}


def parse_pipeline(path_or_text) -> PipelineConfig:
    """Parse ``key=value`` lines with ``[stage]`` sections.

    Keys before the first section are global (``input``, ``output``,
    ``seed``).  Sections may repeat; ``#`` and ``;`` start comments.
    """
    if os.path.exists(str(path_or_text)):
        with open(path_or_text) as fh:
            text = fh.read()
    else:
        text = str(path_or_text)
    cfg = PipelineConfig()
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _STAGES:
                raise ValueError(f"line {n}: unknown stage [{name}]")
            current = {}
            cfg.stages.append((name, current))
            continue
        if "=" not in line:
            raise ValueError(f"line {n}: expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.lower().replace("_", "-")
        if current is None:
            if key == "seed":
                cfg.seed = int(val)
            elif key in ("input", "output"):
                setattr(cfg, key, val)
            else:
                raise ValueError(f"line {n}: unknown global key {key!r}")
        else:
            current[key] = val
    return cfg


def _stage_kwargs(name: str, params: dict) -> tuple[dict, str | None]:
    _, schema = _STAGES[name]
    params = dict(params)
    save = params.pop("save", None)
    out = {}
    for k, v in params.items():
        if k not in schema:
            raise ValueError(f"stage [{name}]: unknown key {k!r}")
        try:
            out[k.replace("-", "_") if k != "p" else "P"] = schema[k](v)
        except ValueError as exc:
            raise ValueError(f"stage [{name}]: bad value for {k!r}: {exc}") from None
    return out, save


def _validate(cfg: PipelineConfig) -> list:
    if not cfg.input or not cfg.output:
        raise ValueError("pipeline needs input and output paths")
    plan = []
    for name, params in cfg.stages:
        kw, save = _stage_kwargs(name, params)
        if name == "add-noise":
            if cfg.seed is None:
                raise ValueError("a seed is mandatory when the pipeline injects noise")
            if kw.get("sigma", 0) < 0:
                raise ValueError("noise sigma must be non-negative")
        if name == "encode":
            codec_params(**kw)
        plan.append((name, kw, save))
    state = "image"
    for name, _, _ in plan:
        if name == "encode":
            if state != "image":
                raise ValueError("[encode] must follow an image stage")
            state = "bits"
        elif name == "decode":
            if state != "bits":
                raise ValueError("[decode] must follow [encode]")
            state = "image"
        elif state != "image":
            raise ValueError(f"[{name}] cannot operate on an encoded stream; add [decode]")
    if state != "image":
        raise ValueError("pipeline ends with an encoded stream; add [decode]")
    return plan


def run_pipeline(cfg: PipelineConfig) -> None:
    """Run the stages in order; on failure remove every file the run wrote.

    Noise for stage ``i`` is drawn from stream ``i`` of the configured seed, so
    identical configurations produce bit-identical outputs.
    """
    plan = _validate(cfg)
    img, maxval = load_grid(cfg.input, with_maxval=True)
    if np.iscomplexobj(img):
        raise ValueError("pipeline input must be real")
    written = []
    try:
        state = img
        for i, (name, kw, save) in enumerate(plan):
            if name == "add-noise":
                state = noise.add_awgn(state, kw.get("sigma", 0.0), cfg.seed, stream=i)
            elif name == "encode":
                state = codec.encode(state, codec_params(**kw))
            elif name == "decode":
                state = codec.decode(state)
            elif name == "clip":
                state = np.clip(state, kw.get("lo", -np.inf), kw.get("hi", np.inf))
            else:
                state = _STAGES[name][0](state, **kw)
            if save:
                written.append(save)
                if isinstance(state, codec.Bitstream):
                    with open(save, "wb") as fh:
                        fh.write(state.data)
                else:
                    save_grid(state, save, maxval)
        written.append(cfg.output)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            save_grid(state, cfg.output, maxval)
    except BaseException:
        for path in written:
            if os.path.exists(path):
                os.remove(path)
        raise


# --- parser ------------------------------------------------------------------

def _add_io(p, output=True):
    p.add_argument("input", help="input file (.pgm, .csv grid or .raw binary64)")
    if output:
        p.add_argument("output", help="output file; format from extension")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fastxform", description="Fast-transform image processing.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("transform", help="forward or inverse transform")
    _add_io(p)
    p.add_argument("--kind", default="dct",
                   choices=list(tr.KINDS) + ["dst", "sdft", "shsc", "shscr"])
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--axis", type=int, choices=(0, 1), help="1D transform along one axis only")
    p.add_argument("--u", type=float, default=0.0, help="signal-domain shift")
    p.add_argument("--v", type=float, default=0.0, help="spectral-domain shift")
    p.add_argument("--sigma", type=float, default=1.0, help="scale parameter")
    p.add_argument("--theta", type=float, default=0.0, help="rotation angle (radians)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("analyze", help="energy compaction and band-limited approximation")
    _add_io(p, output=False)
    p.add_argument("--kind", default="all", choices=("all",) + tr.KINDS)
    p.add_argument("--fraction", type=float, default=0.95)
    p.add_argument("--block", type=int, default=8)
    p.add_argument("--exclude-dc", action="store_true")
    p.add_argument("--profile-csv")
    p.add_argument("--profile-kind", default="dct", choices=tr.KINDS)
    p.add_argument("--approx", help="write the energy-mask DCT approximation here")
    p.add_argument("--report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compress", help="block DCT coding")
    _add_io(p)
    p.add_argument("--block", type=int, default=8)
    p.add_argument("--rule", default="keep_all", choices=codec.RULES)
    p.add_argument("--param", type=float, default=0.0)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--no-entropy", action="store_true")
    p.add_argument("--rd-csv", help="write a rate-distortion table over --q-sweep")
    p.add_argument("--q-sweep", help="comma-separated quantizer steps")
    p.add_argument("--report")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a codec stream")
    _add_io(p)
    p.add_argument("--maxval", type=int)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("filter", help="global transform-domain filter")
    _add_io(p)
    p.add_argument("--domain", default="dct", choices=tr.KINDS)
    p.add_argument("--kind", default="wiener")
    p.add_argument("--P", "--p", dest="P", type=float, default=1.0)
    p.add_argument("--noise-sigma", default="auto", help="noise std or 'auto'")
    p.add_argument("--noise-ps", help="CSV grid of the noise power spectrum")
    p.add_argument("--isfr", help="CSV grid of the imaging system frequency response")
    p.set_defaults(func=_image_cmd(op_filter, domain="domain", kind="kind", P="P",
                                   noise_sigma="noise_sigma", noise_ps="noise_ps", isfr="isfr"))

    p = sub.add_parser("localfilter", help="sliding-window DCT filter")
    _add_io(p)
    p.add_argument("--window", default="7x7", help="'N', 'HxW' or 'vision'")
    p.add_argument("--mode", default="central", choices=("central", "accumulate"))
    p.add_argument("--kind", default="rejective")
    p.add_argument("--P", "--p", dest="P", type=float, default=1.0)
    p.add_argument("--noise-sigma", default="auto")
    p.set_defaults(func=_image_cmd(op_localfilter, window="window", mode="mode", kind="kind",
                                   P="P", noise_sigma="noise_sigma"))

    p = sub.add_parser("narrowband", help="moire and banding removal")
    _add_io(p)
    p.add_argument("--domain", default="dft", choices=("dft", "dct"))
    p.add_argument("--peak-factor", type=float, default=8.0)
    p.add_argument("--protect-radius", type=int, default=4)
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--separable", action="store_true")
    p.set_defaults(func=_image_cmd(op_narrowband, domain="domain", peak_factor="peak_factor",
                                   protect_radius="protect_radius", size="size",
                                   separable="separable"))

    p = sub.add_parser("shift", help="sub-pixel or elastic shift")
    _add_io(p)
    p.add_argument("--dx", type=float, default=0.0)
    p.add_argument("--dy", type=float, default=0.0)
    p.add_argument("--domain", default="dct", choices=("dft", "dct"))
    p.add_argument("--field", help="displacement field file for elastic resampling")
    p.add_argument("--window", default="7x7")
    p.set_defaults(func=_image_cmd(op_shift, dx="dx", dy="dy", domain="domain", field="field",
                                   window="window"))

    p = sub.add_parser("resize", help="arbitrary-scale resampling")
    _add_io(p)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--keep-frame", action="store_true", help="zoom about the centre, same size")
    p.add_argument("--zero-pad", type=int, help="integer upsampling by spectrum zero padding")
    p.add_argument("--domain", default="dft", choices=("dft", "dct"))
    p.set_defaults(func=_image_cmd(op_resize, sigma="sigma", shift="shift",
                                   keep_frame="keep_frame", zero_pad="zero_pad", domain="domain"))

    p = sub.add_parser("rotate", help="rotation")
    _add_io(p)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--degrees", action="store_true")
    p.add_argument("--method", default="3pass", choices=("3pass", "shscr"))
    p.add_argument("--domain", default="dct", choices=("dft", "dct"))
    p.set_defaults(func=_image_cmd(op_rotate, theta="theta", method="method", degrees="degrees",
                                   domain="domain"))

    for name, op, text in (("deriv", op_deriv, "differentiate"), ("integ", op_integ, "integrate")):
        p = sub.add_parser(name, help=f"{text} along an axis")
        _add_io(p)
        p.add_argument("--domain", default="dct", choices=("dft", "dct"))
        p.add_argument("--axis", type=int, default=-1)
        p.set_defaults(func=_image_cmd(op, domain="domain", axis="axis"))

    p = sub.add_parser("recover", help="band-limited recovery from sparse samples")
    p.add_argument("input", help="sample CSV (index,value or row,col,value)")
    p.add_argument("output")
    p.add_argument("--shape", required=True, help="'N' or 'H,W'")
    p.add_argument("--mask", help="PGM band mask (255 = in band)")
    p.add_argument("--rect", help="low-pass rectangle dims")
    p.add_argument("--sector", help="'radius,angle'")
    p.add_argument("--domain", default="dct", choices=("dft", "dct"))
    p.add_argument("--method", default="direct", choices=("direct", "gp"))
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--mask-out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("sinclet", help="space- and band-limited kernel")
    p.add_argument("output")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--support", default="205,308", help="'start,stop' (stop exclusive)")
    p.add_argument("--bandwidth", type=int, default=51)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--domain", default="dft", choices=("dft", "dct"))
    p.add_argument("--report")
    p.set_defaults(func=cmd_sinclet)

    p = sub.add_parser("uncertainty", help="signal/spectrum nonzero counts")
    _add_io(p, output=False)
    p.add_argument("--signal-tol", type=float)
    p.add_argument("--spect-tol", type=float)
    p.add_argument("--domain", default="dft", choices=("dft", "dct"))
    p.add_argument("--report")
    p.set_defaults(func=cmd_uncertainty)

    p = sub.add_parser("csbound", help="compressive-sensing sample count M = K log2 N")
    p.add_argument("--k", type=float)
    p.add_argument("--fraction", type=float, help="K as a fraction of N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_csbound)

    p = sub.add_parser("pipeline", help="run a stage configuration file")
    p.add_argument("config")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with np.errstate(invalid="raise", divide="raise", over="raise"), \
                warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
