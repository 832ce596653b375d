"""Report rendering: fixed-width text table and a JSON document.

Both formats list one record per structure with the verdict status, a
certificate summary (expressions printed in the re-parseable grammar), the
regularity set, and the witness component for failures.  The JSON format
round-trips: parse_report(render_json(r)) reconstructs every status and
certificate string.
"""

from __future__ import annotations

import json

from .classifiers import ClassificationReport, StructureVerdict
from .context import CurvclassError

_STATUS_WORD = {
    "holds": "HOLDS",
    "fails": "FAILS",
    "vacuous": "VACUOUS",
    "error": "ERROR",
}
_WORD_STATUS = {v: k for k, v in _STATUS_WORD.items()}


def _summarize_certificate(cert: dict) -> str:
    if not cert:
        return ""
    parts = []
    if "L" in cert:
        parts.append(f"L = {cert['L']}")
    if "one_forms" in cert:
        for label, comps in cert["one_forms"].items():
            parts.append(f"{label} = [{', '.join(comps)}]")
    if "one_form" in cert:
        parts.append(f"A = [{', '.join(cert['one_form'])}]")
    if "beta" in cert:
        parts.append(f"beta = {cert['beta']}")
    if "alpha" in cert:
        parts.append(f"alpha = {cert['alpha']}")
    if "eta" in cert:
        parts.append(f"eta = [{', '.join(cert['eta'])}]")
    if "eta_parallel" in cert:
        parts.append(f"eta parallel: {'yes' if cert['eta_parallel'] else 'no'}")
    if "dimension" in cert:
        parts.append(f"dimension = {cert['dimension']}")
    if "family_dimension" in cert:
        parts.append(f"family dim = {cert['family_dimension']}")
    if "underdetermined_directions" in cert:
        dirs = ", ".join(sorted(cert["underdetermined_directions"]))
        parts.append(f"free directions: {dirs}")
    if "r" in cert:
        parts.append(f"r = {cert['r']}")
    if "condition" in cert:
        parts.append(cert["condition"])
    if "identity" in cert:
        parts.append(cert["identity"])
    if "note" in cert:
        parts.append(cert["note"])
    if "error" in cert:
        parts.append(cert["error"])
    return "; ".join(parts)


def render_text(report: ClassificationReport) -> str:
    """Fixed-width table: structure | verdict | certificate | regularity."""
    header = (
        f"metric: {report.metric}   signature sample: "
        f"({report.signature_sample[0]},{report.signature_sample[1]})   "
        f"engine: {report.version}   seed: {report.seed}"
    )
    lines = [header, ""]
    heads = [f"{v.name} | {_STATUS_WORD[v.status]}" for v in report.verdicts]
    width = max((len(h) for h in heads), default=len("structure | verdict"))
    width = max(width, len("structure | verdict"))
    lines.append(f"{'structure | verdict'.ljust(width)} | certificate | regularity")
    lines.append("-" * (width + 30))
    for v, head in zip(report.verdicts, heads):
        cert = _summarize_certificate(v.certificate)
        if v.notes:
            note_text = "; ".join(v.notes)
            cert = f"{cert} [{note_text}]" if cert else f"[{note_text}]"
        if v.status == "fails" and v.witness:
            w = ",".join(str(i) for i in v.witness)
            cert = f"{cert} (witness [{w}])" if cert else f"witness [{w}]"
        reg = "; ".join(v.regularity) if v.regularity else "-"
        lines.append(f"{head.ljust(width)} | {cert or '-'} | {reg}")
    return "\n".join(lines) + "\n"


def render_json(report: ClassificationReport) -> str:
    doc = {
        "metric": report.metric,
        "signature_sample": list(report.signature_sample),
        "verdicts": [
            {
                "name": v.name,
                "status": _STATUS_WORD[v.status],
                "certificate": v.certificate,
                "regularity": v.regularity,
                "witness": v.witness,
                "notes": v.notes,
            }
            for v in report.verdicts
        ],
        "seed": report.seed,
        "version": report.version,
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def parse_report(text: str) -> ClassificationReport:
    """Reconstruct a ClassificationReport from its JSON rendering."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurvclassError(f"invalid report document: {exc}") from None
    verdicts = [
        StructureVerdict(
            name=v["name"],
            status=_WORD_STATUS[v["status"]],
            certificate=v.get("certificate", {}),
            witness=v.get("witness"),
            regularity=v.get("regularity", []),
            notes=v.get("notes", []),
        )
        for v in doc["verdicts"]
    ]
    return ClassificationReport(
        metric=doc["metric"],
        signature_sample=tuple(doc["signature_sample"]),
        verdicts=verdicts,
        seed=doc.get("seed"),
        version=doc.get("version", ""),
    )
