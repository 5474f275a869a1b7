"""Report rendering: CSV, markdown, figures.

CSV and trace text are the determinism surface (the sweep asserts they
are byte-identical across runs), so rows are sorted by scenario name and
rendered with no floats, timestamps, or environment-dependent content.
Figures are rendered with the Agg backend straight to files.
"""

from __future__ import annotations

import csv
import io

CSV_FIELDS = ("scenario", "controller", "abi", "measurement", "cycles",
              "sync", "handshake", "entry", "software")


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in sorted(rows, key=lambda r: r["scenario"]):
        w.writerow({k: row.get(k, "") for k in CSV_FIELDS})
    return buf.getvalue()


def _by_name(rows):
    return {r["scenario"]: r for r in rows}


def _fmt_pct(delta: int, base: int) -> str:
    return f"{100.0 * delta / base:.2f}%"


def render_markdown(rows) -> str:
    out = ["# Interrupt benchmark sweep", ""]
    out.append("| scenario | controller | abi | measurement | cycles | "
               "sync | handshake | entry | software |")
    out.append("|---|---|---|---|---|---|---|---|---|")
    for r in sorted(rows, key=lambda x: x["scenario"]):
        out.append("| " + " | ".join(
            str(r.get(k, "")) for k in CSV_FIELDS) + " |")
    out.append("")

    by = _by_name(rows)

    def cyc(name):
        row = by.get(name)
        return None if row is None else row["cycles"]

    lad = [(f, cyc(f"lat-{f}-i")) for f in
           ("fastirq", "jalxnxti", "clic", "clint", "xnxti", "minimal")]
    if all(v is not None for _, v in lad):
        out.append("## Interrupt latency (RV32I, cycles to first handler "
                   "work)")
        out.append("")
        for f, v in sorted(lad, key=lambda t: t[1]):
            out.append(f"- {f}: {v}")
        out.append("")

    xn, jx = cyc("b2b-xnxti-i"), cyc("b2b-jalxnxti-i")
    if xn is not None and jx is not None:
        out.append("## Back-to-back handler turnaround")
        out.append("")
        out.append(f"- claim-register loop: {xn} cycles between markers")
        out.append(f"- fused claim-and-jump: {jx} cycles "
                   f"({xn - jx} cycles saved per service)")
        fi = cyc("b2b-fastirq-i")
        if fi is not None:
            out.append(f"- banked tail-chain: {fi} cycles")
        out.append("")

    ctx_lines = []
    for abi in ("i", "e"):
        base, acc = cyc(f"ctx-baseline-{abi}"), cyc(f"ctx-accel-{abi}")
        if base is None or acc is None:
            continue
        d = base - acc
        ctx_lines.append(
            f"- RV32{abi.upper()}: software {base}, banked {acc} "
            f"(saves {d} cycles, {_fmt_pct(d, base)})")
    if ctx_lines:
        out.append("## Context switch (marker to marker)")
        out.append("")
        out.extend(ctx_lines)
        out.append("")
    return "\n".join(out)


# ------------------------------------------------------------- figures

def write_figures(rows, outdir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by = _by_name(rows)

    def cyc(name):
        row = by.get(name)
        return None if row is None else row["cycles"]

    paths = []

    flavors = ("fastirq", "jalxnxti", "clic", "clint", "xnxti", "minimal")
    have = [f for f in flavors
            if cyc(f"lat-{f}-i") is not None and cyc(f"lat-{f}-e") is not None]
    if have:
        have = sorted(have, key=lambda f: cyc(f"lat-{f}-i"))
        fig, ax = plt.subplots(figsize=(7, 4))
        xs = range(len(have))
        wi = 0.38
        bi = ax.bar([x - wi / 2 for x in xs],
                    [cyc(f"lat-{f}-i") for f in have], wi, label="RV32I")
        be = ax.bar([x + wi / 2 for x in xs],
                    [cyc(f"lat-{f}-e") for f in have], wi, label="RV32E")
        for bars in (bi, be):
            ax.bar_label(bars, padding=2, fontsize=8)
        ax.set_xticks(list(xs), have)
        ax.set_ylabel("cycles to first handler work")
        ax.set_title("Interrupt latency by architecture")
        ax.legend()
        fig.tight_layout()
        p = outdir / "latency_ladder.png"
        fig.savefig(p)
        plt.close(fig)
        paths.append(p)

    b2b = [("clic-i", cyc("b2b-clic-i")), ("clic-e", cyc("b2b-clic-e")),
           ("xnxti-i", cyc("b2b-xnxti-i")),
           ("jalxnxti-i", cyc("b2b-jalxnxti-i")),
           ("fastirq-i", cyc("b2b-fastirq-i"))]
    b2b = [(n, v) for n, v in b2b if v is not None]
    if b2b:
        fig, ax = plt.subplots(figsize=(7, 4))
        bars = ax.bar([n for n, _ in b2b], [v for _, v in b2b])
        ax.bar_label(bars, padding=2, fontsize=8)
        ax.set_ylabel("cycles between consecutive handlers")
        ax.set_title("Back-to-back interrupt turnaround")
        fig.tight_layout()
        p = outdir / "back_to_back.png"
        fig.savefig(p)
        plt.close(fig)
        paths.append(p)

    groups = []
    for abi in ("i", "e"):
        base, acc = cyc(f"ctx-baseline-{abi}"), cyc(f"ctx-accel-{abi}")
        if base is not None and acc is not None:
            groups.append((abi.upper(), base, acc))
    if groups:
        fig, ax = plt.subplots(figsize=(6, 4))
        xs = range(len(groups))
        wi = 0.38
        bb = ax.bar([x - wi / 2 for x in xs], [g[1] for g in groups], wi,
                    label="software save/restore")
        ba = ax.bar([x + wi / 2 for x in xs], [g[2] for g in groups], wi,
                    label="banked save engine")
        for bars in (bb, ba):
            ax.bar_label(bars, padding=2, fontsize=8)
        for x, (abi, base, acc) in zip(xs, groups):
            ax.annotate(f"-{base - acc}", (x + wi / 2, acc),
                        textcoords="offset points", xytext=(0, 14),
                        ha="center", fontsize=9, color="tab:red")
        ax.set_xticks(list(xs), [f"RV32{g[0]}" for g in groups])
        ax.set_ylabel("cycles, marker to marker")
        ax.set_title("Context switch cost")
        ax.legend()
        fig.tight_layout()
        p = outdir / "context_switch.png"
        fig.savefig(p)
        plt.close(fig)
        paths.append(p)

    return paths
