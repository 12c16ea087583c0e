"""Walk through depth-bounded functions on four primes of F101[x,y].

Run with ``python demos/plane_classification.py``.
"""

from koszultor import (
    PresentedModule,
    class_membership,
    depth_table,
    enumerate_phi,
    generator_set,
    is_order_preserving,
    parse_session,
    recover_phi,
    regular_dual,
    tor_oracle_membership,
)

session = parse_session({
    "ring": {"char": 101, "vars": ["x", "y"]},
    "primes": [
        {"name": "zero", "generators": [], "zero_ideal": True},
        {"name": "px", "generators": ["x"]},
        {"name": "py", "generators": ["y"]},
        {"name": "m", "generators": ["x", "y"]},
    ],
})
R = session.ring
profile = depth_table(session.primes)

print("prime   depth grade height")
for name, d, g, h in profile.rows():
    print(f"{name:<7} {str(d):>5} {str(g):>5} {h:>6}")

modules = {
    "R": PresentedModule.free(R),
    "R/(x)": PresentedModule.cyclic(R, [R("x")]),
    "k": PresentedModule.cyclic(R, R.gens()),
}

print("\nphi (zero,px,py,m)  monotone  dual          members  recovered")
for phi in enumerate_phi(profile):
    members = []
    for name, M in modules.items():
        a = class_membership(M, phi)
        b = tor_oracle_membership(M, phi)
        assert a.holds == b.holds
        if a.holds:
            members.append(name)
    back = recover_phi(generator_set(phi), session.primes)
    print(f"{str(phi.values):<19} {str(is_order_preserving(phi)):<9} {str(regular_dual(phi).values):<13} "
          f"{','.join(members):<8} {back.values == phi.values}")
