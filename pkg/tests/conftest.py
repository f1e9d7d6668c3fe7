# tests/conftest.py
import pytest

from src.models.graph import ModularGraph
from src.utils.config import get_settings


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    monkeypatch.delenv("MODGROUP_SEED", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def graph_h() -> ModularGraph:
    """Stallings graph of ⟨abab⁻¹, babab⟩: free, index 6."""
    return ModularGraph.from_pairs(
        6,
        [(1, 4), (5, 6), (2, 3)],
        [(1, 5), (5, 2), (2, 1), (4, 6), (6, 3), (3, 4)],
        root=1,
    )


@pytest.fixture
def graph_k() -> ModularGraph:
    """Stallings graph of ⟨abab, babab⁻¹⟩."""
    return ModularGraph.from_pairs(
        6,
        [(1, 4), (5, 3), (2, 6)],
        [(1, 2), (2, 3), (3, 1), (4, 5), (6, 6)],
        root=1,
    )


@pytest.fixture
def graph_l() -> ModularGraph:
    return ModularGraph.from_pairs(
        13,
        [(2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13), (1, 1)],
        [
            (1, 2), (2, 11), (11, 1),
            (3, 12), (12, 4), (4, 3),
            (10, 9), (9, 13), (13, 10),
            (5, 8), (8, 6), (6, 5),
            (7, 7),
        ],
        root=1,
    )


@pytest.fixture
def quasi_silhouette_l() -> ModularGraph:
    return ModularGraph.from_pairs(
        [3, 4, 9, 10, 12, 13],
        [(3, 10), (4, 9), (12, 13)],
        [(3, 12), (12, 4), (4, 3), (10, 9), (9, 13), (13, 10)],
    )


@pytest.fixture
def silhouette_l() -> ModularGraph:
    return ModularGraph.from_pairs(
        6,
        [(1, 4), (2, 3), (5, 6)],
        [(1, 5), (5, 2), (2, 1), (4, 3), (3, 6), (6, 4)],
    )
