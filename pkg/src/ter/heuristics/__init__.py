from ..core import Heuristic
from .cc import CooperativeCoevolution, embed, random_groups
from .gs import SuccessHistoryDE
from .ls1 import LS1

REGISTRY: dict[str, type[Heuristic]] = {
    "ls1": LS1,
    "cc": CooperativeCoevolution,
    "gs": SuccessHistoryDE,
}


def build_heuristic(name: str, seed=None, **overrides) -> Heuristic:
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown heuristic {name!r}; choose from {sorted(REGISTRY)}") from None
    return cls(seed=seed, **overrides)


__all__ = [
    "LS1",
    "CooperativeCoevolution",
    "SuccessHistoryDE",
    "REGISTRY",
    "build_heuristic",
    "embed",
    "random_groups",
]
