"""Named systems shipped with the package."""

from __future__ import annotations

from .system import LevelSpec, Periodic, Rule, SystemSpec


def middle_third() -> SystemSpec:
    # interior gap 1/3 reproduces the classical construction
    return SystemSpec(tail=Periodic((LevelSpec.from_ratios([(1 / 3, 2)]),)),
                      gap_fraction=1 / 3, name="middle-third")


def full_interval() -> SystemSpec:
    return SystemSpec(tail=Periodic((LevelSpec.from_ratios([(0.5, 2)]),)),
                      separation="OSC", name="full-interval")


def three_branch() -> SystemSpec:
    return SystemSpec(tail=Periodic((LevelSpec.from_ratios([(1 / 3, 3)]),)),
                      separation="OSC", name="three-branch")


def e1() -> SystemSpec:
    """2**k maps of ratio 3**-(k+1) at level k."""
    return SystemSpec(tail=Rule("E1"), name="E1")


def e2() -> SystemSpec:
    """One map of ratio 3**-(k+1) and 2**k - 1 maps of ratio 3**-(k(k+1))."""
    return SystemSpec(tail=Rule("E2"), name="E2")


def e3() -> SystemSpec:
    """Two maps per level; c_1 = 1/2, c_2 = 1/4, c_k = c_1 ... c_{k-1}."""
    return SystemSpec(tail=Rule("E3"), name="E3")


def block_alternating() -> SystemSpec:
    """Two maps per level, ratio 1/2 on blocks [4**i, 2 * 4**i) and 1/4 elsewhere.

    Block lengths double, so the Moran exponents oscillate between 3/5 and 3/4.
    """
    # ratios sum to 1 on the 1/2 blocks, so only packed placement is possible
    return SystemSpec(tail=Rule("block_alternating", {"first": 0.5, "second": 0.25}),
                      separation="OSC", name="block-alternating")


def geometric_infinite() -> SystemSpec:
    """c_{n,k} = 2**-n * 2**-k for k = 1, 2, ..."""
    return SystemSpec(tail=Rule("geometric_family", {"level_scale": 0.5, "decay": 0.5}),
                      name="geometric-infinite")


def geometric_stationary() -> SystemSpec:
    """c_{n,k} = 3**-k at every level; critical exponent log 2 / log 3."""
    return SystemSpec(tail=Rule("geometric_family", {"level_scale": 1.0, "decay": 1 / 3}),
                      name="geometric-stationary")


PRESETS = {
    "middle-third": middle_third,
    "full-interval": full_interval,
    "three-branch": three_branch,
    "E1": e1,
    "E2": e2,
    "E3": e3,
    "block-alternating": block_alternating,
    "geometric-infinite": geometric_infinite,
    "geometric-stationary": geometric_stationary,
}


class UnknownPresetError(KeyError):
    pass


def preset(name: str) -> SystemSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise UnknownPresetError(
            f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
