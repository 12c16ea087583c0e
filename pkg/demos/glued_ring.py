"""A plane and a line glued at a point: grade and depth part ways.

Run with ``python demos/glued_ring.py``.
"""

from koszultor import almost_cm_check, depth_table, enumerate_phi, parse_session

session = parse_session({
    "ring": {"char": 101, "vars": ["x", "y", "z", "u", "v"],
             "relations": ["x*u", "x*v", "y*u", "y*v", "z*u", "z*v"]},
    "primes": [
        {"name": "plane", "generators": ["u", "v"]},
        {"name": "line", "generators": ["x", "y", "z"]},
        {"name": "p", "generators": ["x", "y", "u", "v"]},
        {"name": "origin", "generators": ["x", "y", "z", "u", "v"]},
    ],
})
profile = depth_table(session.primes)

print("prime   depth grade")
for name, d, g, _ in profile.rows():
    print(f"{name:<7} {str(d):>5} {str(g):>5}")

verdict = almost_cm_check(profile)
print(f"\ngrade == depth everywhere: {verdict.holds}")
for name, g, d in verdict.witnesses:
    print(f"  at {name}: grade {g}, depth {d}")

print(f"\n{sum(1 for _ in enumerate_phi(profile))} depth-bounded functions, "
      f"{sum(1 for _ in enumerate_phi(profile, 'order-preserving'))} order-preserving")
