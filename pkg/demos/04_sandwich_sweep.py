# A small version of the nodal length versus average growth sweep, with the
# SVG plots written to demo_out/.
#
# Run: python3 demos/04_sandwich_sweep.py
# The full default sweep is: nodalgrowth sandwich --out results --format svg
from nodalgrowth.experiments import SweepConfig, run_df_scan, run_sandwich_sweeps
from nodalgrowth.report import emit_report

cfgs = [
    SweepConfig("torus", (10, 40, 150), qs=(2.0, 4.0), n_centers=256),
    SweepConfig("sphere", (5, 15, 25), qs=(2.0, 4.0), n_centers=256),
]
result = run_sandwich_sweeps(cfgs)
print(f"{'surface':8s} {'lam':>6s} {'q':>3s} {'H1':>9s} {'A':>7s} {'lower':>7s} {'upper':>7s}")
for r in result.rows:
    print(f"{r.surface:8s} {r.lam:6g} {r.q:3g} {r.h1:9.3f} {r.avg_growth:7.4f} "
          f"{r.lower_ratio:7.3f} {r.upper_ratio:7.3f}")
s = result.summary["sweep"]
print(f"c1 = {s['c1_empirical']:.3f} (spread {s['lower_spread']:.2f}), "
      f"c2 = {s['c2_empirical']:.3f} (spread {s['upper_spread']:.2f})")
for path in emit_report(result.rows, "svg", "demo_out", "sandwich"):
    print("wrote", path)

df = run_df_scan(SweepConfig("torus", (10, 40, 150, 400), qs=(2.0,), n_centers=256))
for r in df.rows:
    print(f"lam = {r.lam:5g}: max beta = {r.max_beta:.3f}, / sqrt(lam) = {r.max_beta_over_sqrt_lambda:.4f}")
