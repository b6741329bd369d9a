"""Exact Bockstein spectral sequences for regular sequences."""

import json as _json

from . import _core
from ._core import (
    Error,
    IoError,
    NonRegular,
    PhaseError,
    SyntaxError,
    ValidationError,
    WindowTooSmall,
    canonical,
    exit_code,
    preset_text,
    presets,
)

__all__ = [
    "Error",
    "IoError",
    "NonRegular",
    "PhaseError",
    "SyntaxError",
    "ValidationError",
    "WindowTooSmall",
    "canonical",
    "exit_code",
    "preset_text",
    "presets",
    "regularity",
    "run",
    "smith_normal_form",
    "table",
    "tor_ext",
]


def _text(spec, preset):
    if (spec is None) == (preset is None):
        raise ValueError("give exactly one of spec or preset")
    return preset_text(preset) if preset is not None else spec


def _generators(generators):
    # (name, degree) or (name, degree, invertible)
    return [(g[0], int(g[1]), bool(g[2]) if len(g) > 2 else False) for g in generators]


def run(spec=None, *, preset=None):
    """Run a problem description and return the report as a dict."""
    return _json.loads(_core.run_json(_text(spec, preset)))


def table(spec=None, *, preset=None):
    """Run a problem description and return the text report."""
    return _core.run_table(_text(spec, preset))


def smith_normal_form(rows, prime, exponent=0):
    """Smith form over Z_(p) (exponent 0), F_p (1) or Z/p^k (k)."""
    return _core.smith_normal_form([list(r) for r in rows], prime, exponent)


def regularity(prime, generators, sequence, degree_min, degree_max, max_filtration=1):
    """Regularity of `sequence` on Z_(p)[generators] over a degree window."""
    return _core.regularity(prime, _generators(generators), list(sequence), degree_min, degree_max, max_filtration)


def tor_ext(prime, generators, sequence, degree_min, degree_max):
    """Nonzero cells of Tor and Ext of L = T/I over T = Z_(p)[generators]."""
    return _core.tor_ext(prime, _generators(generators), list(sequence), degree_min, degree_max)
