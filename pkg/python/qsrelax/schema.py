"""Schema of the JSON reports, printed by ``qsrelax schema``."""

from __future__ import annotations

import json

SCHEMA_VERSION = 1

_ENVELOPE = {
    "schema_version": "int schema version",
    "command": "subcommand that produced the report",
    "status": "'ok', 'inconclusive' or 'error'",
    "config": "resolved configuration as dotted keys",
}

SCHEMA: dict[str, object] = {
    "version": SCHEMA_VERSION,
    "description": (
        "qsrelax JSON reports. Every report is one object with the envelope fields plus the"
        + " command-specific fields below. Complex numbers are objects {re, im}."
    ),
    "envelope": _ENVELOPE,
    "reports": {
        "coeffs": {
            "d_frequency": "{'1','0','-1'} -> complex; principal-value path",
            "d_time": "{'1','0','-1'} -> complex; Abel-limit path",
            "re_d1": "float, Re d(1) from the frequency path",
            "re_d0": "float",
            "re_dm1": "float",
            "re_parts_zero": "bool; |Re d(0)|, |Re d(-1)| below the PV tolerance",
            "path_agreement": "float; max relative difference between the two paths",
            "extrapolation_residuals": "{'1','0','-1'} -> float",
            "surface_rate": "float; sphere-integral form of Re d(1)",
            "radial_reduction_defect": "float",
            "decay_bound": "float; max |u(t)|(1+t^3) over the grid",
            "decay_stability": "float; relative change under tolerance tightening",
            "files": "list of written artifact names",
        },
        "spectrum": {
            "d": "{'1','0','-1'} -> complex; coefficients used",
            "synthetic": "bool; true when coefficients were injected",
            "eigenpairs": "[{label, value, vector}] in label order",
            "closed_form": "{label -> complex}",
            "residual": "float; max |numerical - closed form| eigenvalue",
            "spectral_gap": "float",
            "cp": "[{tau, min_choi_eigenvalue, trace_preservation_defect, unitality_defect,"
            + " hermiticity_defect, passed}]",
            "files": "list of written artifact names",
        },
        "evolve": {
            "g": "float",
            "observable": "'bloch' or 'ladder'",
            "initial_state": "spinor as [{re, im}, {re, im}]",
            "rates": "{longitudinal_rate, transverse_rate, frequency_shift, t1, t2}",
            "fitted": "optional {longitudinal_rate, transverse_rate, samples}",
            "n_points": "int",
            "files": "list of written artifact names",
        },
        "oracle-compare": {
            "sigma": "observable name",
            "g_list": "list of couplings",
            "sup_errors": "{g -> E(g)}",
            "scaled_errors": "{g -> E(g)/g^2}",
            "ratio_consistency": "float or null; (E(gmin)/gmin^2)/(E(gmax)/gmax^2)",
            "spread": "float or null; max/min of E(g)/g^2",
            "secular_ratio": "{g -> late/early max error}",
            "floor": "float; E(0) plus kernel reproduction error",
            "baseline_error": "float; E(0)",
            "window_error": "float",
            "window": "float; comparison window length",
            "dimension": "int; truncated space dimension",
            "sred_defect": "{g -> float}",
            "norm_defect": "{g -> float}",
            "reason": "string; why a run is inconclusive ('' when ok)",
            "files": "list of written artifact names",
        },
        "sweep": {
            "axis": "'n_modes', 'excitation_cap' or 'omega_max'",
            "quantity": "'window_error' or 'sup_error'",
            "rows": "[{value, window_error, sup_error?, status?}]",
            "files": "list of written artifact names",
        },
        "error": {
            "kind": "stable error category, e.g. 'invalid cutoff'",
            "message": "human readable message",
            "exit_code": "int process exit code",
        },
    },
}


def schema_json() -> str:
    """Return the schema as compact JSON (single line)."""
    return json.dumps(SCHEMA, separators=(",", ":"), ensure_ascii=True, sort_keys=True)
