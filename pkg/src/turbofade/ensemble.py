"""Degree-profile algebra: repeater statistics, rate and puncturing identities.

All derivations run on exact rationals so worked values like the 3/4
constituent puncture fraction come out as equalities, not approximations.
A profile maps repetition degree d (>= 2) to the fraction of information bits
repeated d times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

RateLike = "int | float | str | Fraction"


class ProfileError(ValueError):
    """Raised when a degree profile or rate target is infeasible."""


def _to_fraction(x, name: str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        # decimal-entered constants like 0.9 become exact tenths, not the
        # nearest binary float blown up to a 50-digit denominator
        return Fraction(x).limit_denominator(10**9)
    raise ProfileError(f"{name} must be a number or fraction string, got {type(x).__name__}")


@dataclass(frozen=True)
class DegreeProfile:
    """Repetition-degree distribution of the non-uniform repeater."""

    fractions: tuple[tuple[int, Fraction], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, "RateLike"]) -> "DegreeProfile":
        items = []
        for d, f in sorted(mapping.items()):
            if not isinstance(d, int) or d < 2:
                raise ProfileError(f"repetition degree must be an integer >= 2, got {d!r}")
            frac = _to_fraction(f, f"fraction of degree {d}")
            if frac <= 0 or frac > 1:
                raise ProfileError(f"fraction of degree {d} must lie in (0, 1], got {f}")
            items.append((d, frac))
        if not items:
            raise ProfileError("profile has no degree classes")
        total = sum(f for _, f in items)
        if total != 1:
            raise ProfileError(f"degree fractions must sum to 1, got {float(total)!r}")
        return cls(tuple(items))

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.fractions)

    @property
    def max_degree(self) -> int:
        return self.fractions[-1][0]

    @property
    def is_regular(self) -> bool:
        return len(self.fractions) == 1

    @property
    def average_degree(self) -> Fraction:
        return sum(d * f for d, f in self.fractions)

    def bit_fraction(self, degree: int) -> Fraction:
        for d, f in self.fractions:
            if d == degree:
                return f
        return Fraction(0)

    def edge_fractions(self) -> dict[int, Fraction]:
        """Fraction of repeater output edges attached to each degree class."""
        dbar = self.average_degree
        return {d: d * f / dbar for d, f in self.fractions}

    def class_counts(self, k: int) -> dict[int, int]:
        """Integer bit counts per class: floor(k*f_d), remainder to the
        lowest degree class."""
        counts = {d: (k * f).__floor__() for d, f in self.fractions}
        counts[self.degrees[0]] += k - sum(counts.values())
        return counts


def validate_profile(mapping: Mapping[int, "RateLike"]) -> DegreeProfile:
    return DegreeProfile.from_mapping(mapping)


@dataclass(frozen=True)
class CodeConfig:
    """Derived code parameters for one (profile, mother rate, target rate)."""

    profile: DegreeProfile
    mother_rate: Fraction            # systematic fraction of the unpunctured RSC
    code_rate: Fraction
    constituent_rate: Fraction       # after puncturing (rho in the rate identity)
    puncture_fraction: Fraction      # share of all RSC parity never transmitted
    segment_count: int               # ceil(average degree); virtual constituents
    segment_puncture_fraction: Fraction  # parity puncture share in segments >= 2

    @property
    def average_degree(self) -> Fraction:
        return self.profile.average_degree

    def interleaver_length(self, k: int) -> int:
        n = k * self.average_degree
        if n.denominator != 1:
            raise ProfileError(
                f"k={k} does not evenly resolve the degree profile "
                f"(interleaver length {float(n)})"
            )
        return int(n)


def derive_code_params(profile: DegreeProfile, mother_rate="1/2",
                       code_rate="1/2") -> CodeConfig:
    """Solve the rate and puncturing identities for a profile.

    Raises ProfileError when the target rate needs a puncture fraction or a
    per-segment puncture share outside [0, 1]; infeasible targets are
    rejected, never clipped.
    """
    rho0 = _to_fraction(mother_rate, "mother_rate")
    rate = _to_fraction(code_rate, "code_rate")
    if not 0 < rho0 < 1:
        raise ProfileError(f"mother rate must lie in (0, 1), got {rho0}")
    if not 0 < rate < 1:
        raise ProfileError(f"code rate must lie in (0, 1), got {rate}")
    dbar = profile.average_degree

    # code rate = 1 / (1 + (1/rho - 1) * dbar)
    rho = 1 / (1 + (1 / rate - 1) / dbar)
    # rho = 1 / (1 + (1 - f_p) * (1/rho0 - 1))
    puncture = 1 - (1 / rho - 1) / (1 / rho0 - 1)
    if puncture < 0 or puncture > 1:
        raise ProfileError(
            f"target rate {rate} needs parity puncture fraction {float(puncture):.4f} "
            "outside [0, 1]"
        )
    beta = math.ceil(dbar)
    if beta < 2:
        raise ProfileError(f"average degree {float(dbar)} leaves fewer than 2 segments")
    segment_puncture = (beta * puncture - Fraction(1, 2)) / (beta - 1)
    if segment_puncture < 0 or segment_puncture > 1:
        raise ProfileError(
            f"per-segment puncture share {float(segment_puncture):.4f} outside [0, 1] "
            f"(rate {rate}, average degree {float(dbar)})"
        )
    return CodeConfig(
        profile=profile,
        mother_rate=rho0,
        code_rate=rate,
        constituent_rate=rho,
        puncture_fraction=puncture,
        segment_count=beta,
        segment_puncture_fraction=segment_puncture,
    )


@dataclass(frozen=True)
class DiversityReport:
    fading_blocks: int
    code_rate: Fraction
    singleton_bound: int
    full_diversity_possible: bool


def singleton_diversity(fading_blocks: int, code_rate) -> DiversityReport:
    """Block-fading Singleton bound on achievable diversity order."""
    rate = _to_fraction(code_rate, "code_rate")
    if fading_blocks < 1:
        raise ProfileError("fading_blocks must be positive")
    bound = 1 + math.floor(fading_blocks * (1 - rate))
    return DiversityReport(
        fading_blocks=fading_blocks,
        code_rate=rate,
        singleton_bound=bound,
        full_diversity_possible=bound == fading_blocks,
    )
