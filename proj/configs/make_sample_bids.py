"""Writes sample_bids.csv: 60 days of synthetic day-ahead gas auction bids.

Bid prices wander slowly around a fixed ladder so consecutive curves look
alike; quantities are redrawn daily. Only used for demos and the CLI test.
"""
import csv
import datetime as dt
import random

CAP = 23.0
rng = random.Random(20120102)
start = dt.date(2012, 1, 2)
supply_ladder = [rng.uniform(2, 22) for _ in range(24)]
demand_ladder = [rng.uniform(1, 21) for _ in range(24)]

with open("sample_bids.csv", "w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["date", "side", "price_eur_gj", "quantity_gj", "actor"])
    for d in range(60):
        day = (start + dt.timedelta(days=d)).isoformat()
        for side, ladder in (("supply", supply_ladder), ("demand", demand_ladder)):
            for k in range(len(ladder)):
                ladder[k] = min(CAP, max(0.0, ladder[k] + rng.gauss(0, 0.3)))
            for k, p in enumerate(ladder):
                if rng.random() < 0.15:
                    continue
                q = round(rng.uniform(5, 60), 1)
                w.writerow([day, side, f"{p:.2f}", q, f"{side[0]}{k:02d}"])
