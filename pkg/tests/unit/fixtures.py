"""Configuration documents shared by the pipeline level tests."""
import copy


# Hyperbolic automorphism of the 2-torus on a 4 x 4 grid. Every stage runs
# in well under a second on it and the cone condition holds on every edge.
CAT_MAP = {
    'system': {'name': 'linear', 'params': {'matrix': [[2.0, 1.0],
                                                       [1.0, 1.0]]}},
    'grid': {'domain': ['periodic(4)', 'periodic(4)'], 'k': 2},
    'strategy': 'outer',
    'outer': {'max_refine': 0},
    'max_period': 2,
    'signature': {'u': 1, 's': 1},
    'tolerances': {'bisect_tol': 1e-4},
    'output': 'out',
}

SMALE = {
    'system': {'name': 'smale', 'params': {'contraction': 0.1,
                                           'radius': 0.5}},
    'grid': {'domain': ['bounded(-16:16)', 'bounded(-16:16)',
                        'periodic(16)'], 'k': 4},
    'strategy': 'attractor',
    'seed': {'start': [0.5, 0.0, 0.1], 'transient': 1000},
    'max_period': 3,
    'signature': {'u': 1, 's': 2},
}


def cat_map_doc(output, **overrides):
    """Get the cat map document writing to `output`."""
    doc = copy.deepcopy(CAT_MAP)
    doc['output'] = str(output)
    doc.update(overrides)
    return doc


def smale_doc(**overrides):
    """Get a fresh copy of the Smale document."""
    doc = copy.deepcopy(SMALE)
    doc.update(overrides)
    return doc
