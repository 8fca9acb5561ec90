"""Columnar text, CSV and JSON renderers for the exportable objects.

All floats are written with repr precision (%.17g) and no timestamps, so a
given input always produces byte-identical files.
"""

from __future__ import annotations

import json

from .exact_engine import ExactDistribution
from .harness import SCHEMA_VERSION, EmpiricalPMF


def _rows_text(header: str, colnames, rows, sep: str) -> str:
    lines = [header, sep.join(colnames)]
    for row in rows:
        lines.append(sep.join(row))
    return "\n".join(lines) + "\n"


def distribution_text(dist: ExactDistribution, fmt: str = "csv") -> str:
    """One row per support point, coordinates then mass, lexicographic order."""
    nu = dist.pmf.dim
    colnames = [f"x{i+1}" for i in range(nu)] + ["mass"]
    rows = [
        [str(c) for c in pt] + [f"{w:.17g}"] for pt, w in dist.pmf.points()
    ]
    if fmt == "json":
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "n": dist.n,
                "nu": nu,
                "route": dist.route,
                "points": [[*pt, w] for pt, w in dist.pmf.points()],
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
    sep = "," if fmt == "csv" else "\t"
    header = f"# n={dist.n} nu={nu} route={dist.route}"
    return _rows_text(header, colnames, rows, sep)


def empirical_text(emp: EmpiricalPMF, fmt: str = "csv") -> str:
    nu = emp.counts.ndim
    colnames = [f"x{i+1}" for i in range(nu)] + ["count"]
    rows = [[str(c) for c in pt] + [str(cnt)] for pt, cnt in emp.points()]
    if fmt == "json":
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "n": emp.n,
                "nu": nu,
                "trials": emp.trials,
                "seed": emp.seed,
                "counts": [[*pt, cnt] for pt, cnt in emp.points()],
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
    sep = "," if fmt == "csv" else "\t"
    header = f"# n={emp.n} nu={nu} trials={emp.trials} seed={emp.seed}"
    return _rows_text(header, colnames, rows, sep)


def predictions_text(preds, nu: int, fmt: str = "csv") -> str:
    """Rows of AsymptoticPrediction with one column per term."""
    colnames = (
        [f"x{i+1}" for i in range(nu)]
        + ["gaussian_leading", "perturbation_correction", "edgeworth_terms", "total", "within_horizon"]
    )
    if fmt == "json":
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "predictions": [
                    {
                        "x": list(p.x),
                        "n": p.n,
                        "gaussian_leading": p.gaussian_leading,
                        "perturbation_correction": p.perturbation_correction,
                        "edgeworth_terms": p.edgeworth_terms,
                        "total": p.total,
                        "within_horizon": p.within_horizon,
                    }
                    for p in preds
                ],
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
    sep = "," if fmt == "csv" else "\t"
    rows = []
    n = preds[0].n if preds else 0
    for p in preds:
        rows.append(
            [str(c) for c in p.x]
            + [
                f"{p.gaussian_leading:.17g}",
                f"{p.perturbation_correction:.17g}",
                f"{p.edgeworth_terms:.17g}",
                f"{p.total:.17g}",
                "1" if p.within_horizon else "0",
            ]
        )
    return _rows_text(f"# n={n} nu={nu}", colnames, rows, sep)


def coeffs_text(coeffs, fmt: str = "csv") -> str:
    entries = sorted(coeffs.m.items())
    if fmt == "json":
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "L": coeffs.L,
                "B": coeffs.B.tolist(),
                "exact": coeffs.exact,
                "m": [
                    {"alpha": list(a), "value": float(v), "exact": str(v) if coeffs.exact else None}
                    for a, v in entries
                ],
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
    sep = "," if fmt == "csv" else "\t"
    rows = []
    for a, v in entries:
        exact_str = str(v) if coeffs.exact else ""
        rows.append([" ".join(str(i) for i in a), f"{float(v):.17g}", exact_str])
    return _rows_text(f"# L={coeffs.L} exact={int(coeffs.exact)}", ["alpha", "m", "m_exact"], rows, sep)


def returns_text(f_pert, f_unpert, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "rows": [
                    {"n": i + 1, "f": float(a), "f_unperturbed": float(b), "abs_diff": abs(float(a) - float(b))}
                    for i, (a, b) in enumerate(zip(f_pert, f_unpert))
                ],
            },
            indent=2,
            sort_keys=True,
        ) + "\n"
    sep = "," if fmt == "csv" else "\t"
    rows = [
        [str(i + 1), f"{a:.17g}", f"{b:.17g}", f"{abs(a - b):.3e}"]
        for i, (a, b) in enumerate(zip(f_pert, f_unpert))
    ]
    return _rows_text("# first-return probabilities", ["n", "f", "f_unperturbed", "abs_diff"], rows, sep)
