import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgclust import _kernels_py, kernels
from sgclust.graph import GeneratorConfig, generate_random


def _adj(g):
    return [sum(1 << j for j in g.neighbors(i)) for i in range(g.n)]


def test_compiled_extension_selected():
    assert kernels.BACKEND == "compiled"


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 6), st.floats(0.3, 1.0), st.integers(0, 10**6),
       st.sampled_from([0.2, 0.5, 0.9]), st.integers(0, 8), st.sampled_from([2, 3]))
def test_compiled_matches_python(n, density, seed, nu, min_total, K):
    if n * K > 15:
        K = 2
    g = generate_random(GeneratorConfig(n, density, 5, seed))
    a = kernels.feasible_masks(n, K, _adj(g), nu, min_total)
    b = _kernels_py.feasible_masks(n, K, _adj(g), nu, min_total)
    np.testing.assert_array_equal(a, b)


def test_subset_table_triangle_plus_isolated():
    # triangle on {0,1,2}, vertex 3 isolated
    adj = [0b0110, 0b0101, 0b0011, 0]
    sizes, ok = _kernels_py.subset_table(4, adj)
    assert ok[0b0111] and ok[0b0011] and ok[0]
    assert not ok[0b1000] and not ok[0b0001]
    np.testing.assert_array_equal(sizes, kernels.subset_table(4, adj)[0])
    np.testing.assert_array_equal(ok, kernels.subset_table(4, adj)[1])


def test_pattern_space_guard():
    with pytest.raises(ValueError):
        kernels.feasible_masks(16, 2, [0] * 16, 0.5, 0)
