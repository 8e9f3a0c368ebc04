import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nibblepack.graph import EdgeSet, GraphState

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))



def random_edges(n, p, seed):
    g = np.random.default_rng(seed)
    us, vs = np.triu_indices(n, 1)
    keep = g.random(us.size) < p
    return EdgeSet.from_arrays(n, us[keep], vs[keep])


def random_state(n, seed, p_open=0.4, p_taken=0.2):
    """A sound-ish state: disjoint random open and taken sets, kept a triangle-free subset of taken."""
    g = np.random.default_rng(seed)
    us, vs = np.triu_indices(n, 1)
    r = g.random(us.size)
    opened = EdgeSet.from_arrays(n, us[r < p_open], vs[r < p_open])
    sel = (r >= p_open) & (r < p_open + p_taken)
    taken = EdgeSet.from_arrays(n, us[sel], vs[sel])
    kept = EdgeSet(n)
    for u, v in taken.edge_list():
        common = kept.bits[u] & kept.bits[v]
        if not common.any():
            kept.add(u, v)
    return GraphState(n, opened, taken, kept, 0)


@pytest.fixture
def rnd_state():
    return random_state
