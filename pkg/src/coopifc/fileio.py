"""JSON ingestion and a minimal SVG line-plot writer."""

from __future__ import annotations

import json
from html import escape

import numpy as np

from .model import ChannelParams, SymmetricParams

__all__ = [
    "InputError",
    "parse_complex",
    "parse_matrix",
    "load_json",
    "channel_from_dict",
    "symmetric_from_dict",
    "render_svg",
]


class InputError(ValueError):
    """A user-supplied file or value cannot be used."""


def parse_complex(v) -> complex:
    """Accepts a number, ``[re, im]`` or a string like ``"1+2j"``."""
    if isinstance(v, bool):
        raise InputError(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            raise InputError(f"not a complex number: {v!r}") from None
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(v[0], v[1])
    raise InputError(f"not a complex number: {v!r}")


def parse_matrix(v, name="matrix") -> np.ndarray:
    if isinstance(v, dict):
        if set(v) - {"re", "im"} or "re" not in v:
            raise InputError(f"{name}: expected keys 're' and optional 'im'")
        re = np.asarray(v["re"], dtype=float)
        im = np.asarray(v.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise InputError(f"{name}: 're' and 'im' shapes differ")
        return re + 1j * im
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise InputError(f"{name}: expected a list of rows")
    if len({len(r) for r in v}) > 1:
        raise InputError(f"{name}: rows have different lengths")
    return np.array([[parse_complex(x) for x in r] for r in v], dtype=complex)


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"parse error: {path}: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not isinstance(data, dict):
        raise InputError(f"parse error: {path}: top level must be an object")
    return data


CHANNEL_KEYS = {"K", "H", "P", "SigmaZ", "C", "Q"}


def channel_from_dict(d: dict):
    """Returns ``(ChannelParams, Q or None)``.

    ``SigmaZ`` defaults to the identity and ``C`` to zeros.
    """
    unknown = set(d) - CHANNEL_KEYS
    if unknown:
        raise InputError(f"unknown channel keys: {sorted(unknown)}")
    for key in ("K", "H", "P"):
        if key not in d:
            raise InputError(f"channel is missing {key!r}")
    K = d["K"]
    if not isinstance(K, int) or isinstance(K, bool) or K < 1:
        raise InputError("K must be a positive integer")
    n = 2 * K
    try:
        H = parse_matrix(d["H"], "H")
        Sz = parse_matrix(d["SigmaZ"], "SigmaZ") if "SigmaZ" in d else np.eye(n)
        P = np.asarray(d["P"], dtype=float)
        C = np.asarray(d.get("C", [0.0] * n), dtype=float)
        ch = ChannelParams(K, H, P, Sz, C)
        Q = parse_matrix(d["Q"], "Q") if "Q" in d else None
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if Q is not None and Q.shape != (n, n):
        raise InputError(f"Q must be {n}x{n}")
    return ch, Q


SYM_KEYS = {"snr", "alpha", "alpha_tilde", "beta_s", "beta_d", "gamma", "kappa",
            "off", "mode", "beta"}


def symmetric_from_dict(d: dict):
    """Returns ``(SymmetricParams, mode name or None, beta)``."""
    unknown = set(d) - SYM_KEYS
    if unknown:
        raise InputError(f"unknown symmetric keys: {sorted(unknown)}")
    if "snr" not in d:
        raise InputError("symmetric spec is missing 'snr'")
    fields = {k: v for k, v in d.items() if k not in ("mode", "beta")}
    try:
        fields = {k: (frozenset(v) if k == "off" else float(v)) for k, v in fields.items()}
        sym = SymmetricParams(**fields)
        beta = float(d.get("beta", 0.0))
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from None
    return sym, d.get("mode"), beta


# ---------------------------------------------------------------- svg

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b")


def _ticks(lo, hi, n=6):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [round(float(t), 10) for t in np.arange(start, hi + step / 2, step)]


def render_svg(series: dict, title="", xlabel="", ylabel="",
               width=720, height=480) -> str:
    """Static SVG with axes, one polyline per series and a legend.

    ``series`` maps a label to ``(xs, ys)``.
    """
    ml, mr, mt, mb = 60, 170, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    xs = [x for xv, _ in series.values() for x in xv]
    ys = [y for _, yv in series.values() for y in yv]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(0.0, min(ys)), max(ys)) if ys else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{ml + pw / 2:.1f}" y="{mt - 15}" text-anchor="middle" '
        f'font-size="14">{escape(title)}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{mt + ph}" x2="{px(t):.2f}" '
                   f'y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{mt + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{ml - 5}" y1="{py(t):.2f}" x2="{ml}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {mt + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (label, (xv, yv)) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xv, yv))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = mt + 10 + 18 * i
        out.append(f'<line x1="{ml + pw + 10}" y1="{ly}" x2="{ml + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw + 35}" y="{ly + 4}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
