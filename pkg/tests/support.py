"""Shared rings, sessions and modules for the test-suite."""

from koszultor import PresentedModule, QuotientRing, parse_session

GLUED_RELATIONS = ["x*u", "x*v", "y*u", "y*v", "z*u", "z*v"]


def make_session(variables, relations=(), primes=(), phi=None, modules=None, **config):
    doc = {"ring": {"char": 101, "vars": list(variables), "relations": list(relations)},
           "primes": [], "modules": modules or {}}
    for name, gens in primes:
        entry = {"name": name, "generators": list(gens)}
        if not gens:
            entry["zero_ideal"] = True
        doc["primes"].append(entry)
    if phi is not None:
        doc["phi"] = phi
    if config:
        doc["config"] = config
    return parse_session(doc)


def ring(variables, relations=()):
    base = QuotientRing(101, tuple(variables))
    return base.with_relations([base(r) for r in relations]) if relations else base


def cyclic(R, *gens):
    return PresentedModule.cyclic(R, [R(g) for g in gens])


def module(R, rank, rows):
    return PresentedModule.from_relations(R, rank, [[R(e) for e in row] for row in rows])


# the five gallery rings with their prime tables
GALLERY = {
    "A1": (["x"], [], [("zero", []), ("m", ["x"])]),
    "A2": (["x", "y"], [], [("zero", []), ("px", ["x"]), ("py", ["y"]), ("m", ["x", "y"])]),
    "node": (["x", "y"], ["x*y"], [("px", ["x"]), ("py", ["y"]), ("m", ["x", "y"])]),
    "embedded": (["x", "y"], ["x^2", "x*y"], [("px", ["x"]), ("m", ["x", "y"])]),
    "glued": (["x", "y", "z", "u", "v"], GLUED_RELATIONS,
              [("plane", ["u", "v"]), ("line", ["x", "y", "z"]), ("p", ["x", "y", "u", "v"]),
               ("origin", ["x", "y", "z", "u", "v"])]),
}


def gallery_session(key):
    variables, relations, primes = GALLERY[key]
    return make_session(variables, relations, primes)


def sample_modules(R):
    """A small fixed module family used across the classification tests."""
    g = R.gens()
    mods = {
        "R": PresentedModule.free(R),
        "k": PresentedModule.cyclic(R, g),
        "first": PresentedModule.cyclic(R, [g[0]]),
        "last": PresentedModule.cyclic(R, [g[-1]]),
        "pair": PresentedModule.from_relations(R, 2, [[g[0], g[-1]]]),
    }
    return mods


# one summary line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []
