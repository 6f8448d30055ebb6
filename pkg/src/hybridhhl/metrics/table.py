"""Supremacy-estimate table: DEM fidelity factors, T_SFA and the equal-fidelity time T_f."""
from __future__ import annotations

import csv
import io

from ..sim.cost import human_time, parse_duration
from .dem import dem_predict

# Printed rows: fidelity factors, quantum volume, T_SFA and T_f exactly as reported.
TABLE1 = (
    {"family": "TP1", "n": 53, "qpu": "Rochester", "f_r": 1.4e-1, "f_1qg": 1.3e-1, "f_2qg": 1.7e-9,
     "f_xeb_printed": 3e-11, "v_q": 8, "t_sfa": "10 months", "t_f_printed": "<1 minute"},
    {"family": "TP1", "n": 53, "qpu": "Sycamore", "f_r": 1.4e-1, "f_1qg": 1.3e-1, "f_2qg": 7e-3,
     "f_xeb_printed": 1.1e-4, "v_q": 32, "t_sfa": "10 months", "t_f_printed": "1 hour"},
    {"family": "TP1", "n": 57, "qpu": "Sycamore*", "f_r": 1.1e-1, "f_1qg": 1e-1, "f_2qg": 1.7e-1,
     "f_xeb_printed": 1.9e-3, "v_q": 64, "t_sfa": "220 years", "t_f_printed": "5 months"},
    {"family": "TP1", "n": 62, "qpu": "Sycamore*", "f_r": 9e-2, "f_1qg": 9e-2, "f_2qg": 1.5e-1,
     "f_xeb_printed": 1.2e-3, "v_q": 64, "t_sfa": "2.2e5 years", "t_f_printed": "270 years"},
    {"family": "TP2", "n": 53, "qpu": "Sycamore", "f_r": 1.4e-1, "f_1qg": 1.6e-3, "f_2qg": 2e-7,
     "f_xeb_printed": 4.5e-11, "v_q": 32, "t_sfa": "5e6 years", "t_f_printed": "1 day"},
    {"family": "TP2", "n": 53, "qpu": "Sycamore*", "f_r": 1.4e-1, "f_1qg": 1.6e-3, "f_2qg": 7e-3,
     "f_xeb_printed": 1.6e-6, "v_q": 64, "t_sfa": "5e6 years", "t_f_printed": "8 years"},
    {"family": "TP2", "n": 57, "qpu": "Sycamore", "f_r": 1.1e-1, "f_1qg": 9.7e-4, "f_2qg": 6.3e-8,
     "f_xeb_printed": 6.7e-12, "v_q": 32, "t_sfa": "8.5e13 years", "t_f_printed": "570 years"},
    {"family": "NTP", "n": 53, "qpu": "Sycamore", "f_r": 1.4e-1, "f_1qg": 3e-6, "f_2qg": 1e-14,
     "f_xeb_printed": 4.2e-21, "v_q": 32, "t_sfa": "4e8 years", "t_f_printed": "<1 minute"},
    {"family": "NTP", "n": 57, "qpu": "Sycamore*", "f_r": 1.1e-1, "f_1qg": 1e-6, "f_2qg": 2e-5,
     "f_xeb_printed": 2.2e-12, "v_q": 64, "t_sfa": "1e17 years", "t_f_printed": "2.2e5 years"},
)

COLUMNS = ("family", "n", "qpu", "f_r", "f_1qg", "f_2qg", "f_xeb", "t_sfa_s", "t_f_s",
           "t_sfa", "t_f")


def _seconds(value) -> float:
    return parse_duration(value) if isinstance(value, str) else float(value)


def supremacy_table(rows=TABLE1) -> list[dict]:
    """Fill in f_xeb and T_f = T_SFA * f_xeb for each row.

    A row gives either the three fidelity factors directly or ``counts`` and
    ``rates`` for the error model; ``t_sfa`` is seconds or a duration string.
    """
    out = []
    for row in rows:
        r = dict(row)
        if "counts" in r:
            dem = dem_predict(r["counts"], r["rates"])
            r.update(f_r=dem.f_r, f_1qg=dem.f_1qg, f_2qg=dem.f_2qg)
        r["f_xeb"] = r["f_r"] * r["f_1qg"] * r["f_2qg"]
        r["t_sfa_s"] = _seconds(r["t_sfa"])
        r["t_f_s"] = r["t_sfa_s"] * r["f_xeb"]
        r["t_sfa"] = human_time(r["t_sfa_s"])
        r["t_f"] = human_time(r["t_f_s"])
        out.append(r)
    return out


def to_markdown(table: list[dict]) -> str:
    head = ["Type", "n", "QPU", "F_r", "F_1QG", "F_2QG", "F_XEB", "T_SFA", "T_f"]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for r in table:
        cells = [r["family"], str(r["n"]), r["qpu"]] + [f"{r[k]:.2g}" for k in ("f_r", "f_1qg", "f_2qg", "f_xeb")]
        cells += [r["t_sfa"], r["t_f"]]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def to_csv(table: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in table:
        w.writerow(r)
    return buf.getvalue()
