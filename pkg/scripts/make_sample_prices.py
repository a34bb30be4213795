"""Regenerate the bundled synthetic price file src/alsm/data/sample_prices.csv.

Daily log-returns are drawn from a unimodal-gamma AL scale mixture with a
small negative skew, then compounded from a starting price of 100.
"""
import datetime as dt
from pathlib import Path

import numpy as np

from alsm import ALParams, ALSMParams, alsm_sample, make_mixing

N_ROWS = 400
SEED = 20240101


def main():
    p = ALSMParams(ALParams(0.001, 0.02, 1.1), make_mixing("ug-al", 0.2))
    r = alsm_sample(p, N_ROWS - 1, SEED)
    prices = 100.0 * np.exp(np.concatenate(([0.0], np.cumsum(r))))
    day = dt.date(2021, 1, 1)
    lines = ["Date,Close,Adj Close"]
    for px in prices:
        lines.append(f"{day.isoformat()},{px:.6f},{px:.6f}")
        day += dt.timedelta(days=1)
    out = Path(__file__).resolve().parents[1] / "src" / "alsm" / "data" / "sample_prices.csv"
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({N_ROWS} rows)")


if __name__ == "__main__":
    main()
