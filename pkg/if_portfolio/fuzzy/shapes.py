#!/usr/bin/env python3
"""
Membership and non-membership shapes.

A shape is a monotone profile on the normalized position
s = (t - y1) / (y0 - y1) of a criterion value t inside its aspiration
interval, clamped outside [y1, y0]:

    membership      1 at s <= 0, decreasing, 0 at s >= 1
    non-membership  0 at s <= 0, increasing, 1 at s >= 1

Spec strings (config files and flags):
    linear
    exp:<k>                 k > 0
    table:<s:v>,<s:v>,...   interior knots, 0 < s < 1, 0 <= v <= 1
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from ..core.exceptions import BadShape


class ShapeKind(str, Enum):
    LINEAR = 'linear'
    EXPONENTIAL = 'exp'
    TABLE = 'table'


class ShapeRole(str, Enum):
    MEMBERSHIP = 'membership'
    NONMEMBERSHIP = 'nonmembership'


@dataclass(frozen=True)
class MembershipShape:
    """Monotone profile with a fixed role; see module docstring."""

    kind: ShapeKind
    role: ShapeRole
    scale: float = 0.0
    knots: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kind', ShapeKind(self.kind))
        object.__setattr__(self, 'role', ShapeRole(self.role))
        if self.kind == ShapeKind.EXPONENTIAL:
            if not (np.isfinite(self.scale) and self.scale > 0):
                raise BadShape(f"exponential scale must be positive, got {self.scale!r}")
        if self.kind == ShapeKind.TABLE:
            knots = tuple((float(s), float(v)) for s, v in self.knots)
            object.__setattr__(self, 'knots', knots)
            self._validate_table(knots)

    def _validate_table(self, knots) -> None:
        if not knots:
            raise BadShape("table shape needs at least one interior knot")
        positions = [s for s, _ in knots]
        values = [v for _, v in knots]
        if any(not 0.0 < s < 1.0 for s in positions):
            raise BadShape(f"table knot positions must lie strictly inside (0, 1): {positions}")
        if any(b <= a for a, b in zip(positions, positions[1:])):
            raise BadShape(f"table knot positions must be strictly increasing: {positions}")
        if any(not 0.0 <= v <= 1.0 for v in values):
            raise BadShape(f"table knot values must lie in [0, 1]: {values}")
        start, end = self.endpoints
        profile = [start] + values + [end]
        steps = np.diff(profile)
        if self.role == ShapeRole.MEMBERSHIP and np.any(steps > 0):
            raise BadShape(f"membership table must be non-increasing: {profile}")
        if self.role == ShapeRole.NONMEMBERSHIP and np.any(steps < 0):
            raise BadShape(f"non-membership table must be non-decreasing: {profile}")

    @property
    def endpoints(self) -> Tuple[float, float]:
        """Profile values at s = 0 and s = 1."""
        return (1.0, 0.0) if self.role == ShapeRole.MEMBERSHIP else (0.0, 1.0)

    @property
    def spec(self) -> str:
        if self.kind == ShapeKind.LINEAR:
            return 'linear'
        if self.kind == ShapeKind.EXPONENTIAL:
            return f"exp:{self.scale!r}"
        return 'table:' + ','.join(f"{s!r}:{v!r}" for s, v in self.knots)

    def _table_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        start, end = self.endpoints
        nodes = np.array([0.0] + [s for s, _ in self.knots] + [1.0])
        values = np.array([start] + [v for _, v in self.knots] + [end])
        return nodes, values

    def profile(self, s: np.ndarray) -> np.ndarray:
        """Profile on s in [0, 1] (no clamping)."""
        s = np.asarray(s, dtype=float)
        member = self.role == ShapeRole.MEMBERSHIP
        if self.kind == ShapeKind.LINEAR:
            return 1.0 - s if member else s
        if self.kind == ShapeKind.EXPONENTIAL:
            k = self.scale
            if member:
                return (np.exp(-k * s) - np.exp(-k)) / -np.expm1(-k)
            # scaled by exp(-k) so large k cannot overflow
            return (np.exp(k * (s - 1.0)) - np.exp(-k)) / -np.expm1(-k)
        nodes, values = self._table_nodes()
        return np.interp(s, nodes, values)

    def profile_slope(self, s: np.ndarray) -> np.ndarray:
        """d profile / ds; at kinks and at s = 0, 1 the slope of the segment inside [0, 1]."""
        s = np.asarray(s, dtype=float)
        member = self.role == ShapeRole.MEMBERSHIP
        if self.kind == ShapeKind.LINEAR:
            return np.full_like(s, -1.0 if member else 1.0)
        if self.kind == ShapeKind.EXPONENTIAL:
            k = self.scale
            if member:
                return -k * np.exp(-k * s) / -np.expm1(-k)
            return k * np.exp(k * (s - 1.0)) / -np.expm1(-k)
        nodes, values = self._table_nodes()
        slopes = np.diff(values) / np.diff(nodes)
        segment = np.clip(np.searchsorted(nodes, s, side='right') - 1, 0, len(slopes) - 1)
        return slopes[segment]

    def value(self, t, y1: float, y0: float):
        """Clamped shape value at criterion value(s) t."""
        t_arr = np.asarray(t, dtype=float)
        s = (t_arr - y1) / (y0 - y1)
        start, end = self.endpoints
        inside = self.profile(np.clip(s, 0.0, 1.0))
        out = np.where(s <= 0.0, start, np.where(s >= 1.0, end, inside))
        return float(out) if out.ndim == 0 else out

    def derivative(self, t, y1: float, y0: float):
        """d value / dt; zero on the clamped plateaus, one-sided from inside at y1 and y0."""
        t_arr = np.asarray(t, dtype=float)
        s = (t_arr - y1) / (y0 - y1)
        slope = self.profile_slope(np.clip(s, 0.0, 1.0)) / (y0 - y1)
        out = np.where((s < 0.0) | (s > 1.0), 0.0, slope)
        return float(out) if out.ndim == 0 else out

    def level_and_slope(self, t: float, y1: float, y0: float) -> Tuple[float, float]:
        """Scalar value(t) and derivative(t) together, without array overhead."""
        width = y0 - y1
        s = (t - y1) / width
        inside = min(max(s, 0.0), 1.0)
        member = self.role == ShapeRole.MEMBERSHIP
        if self.kind == ShapeKind.LINEAR:
            level, slope = (1.0 - inside, -1.0) if member else (inside, 1.0)
        elif self.kind == ShapeKind.EXPONENTIAL:
            k = self.scale
            norm = -math.expm1(-k)
            if member:
                e = math.exp(-k * inside)
                level, slope = (e - math.exp(-k)) / norm, -k * e / norm
            else:
                e = math.exp(k * (inside - 1.0))
                level, slope = (e - math.exp(-k)) / norm, k * e / norm
        else:
            level, slope = float(self.profile(inside)), float(self.profile_slope(inside))
        start, end = self.endpoints
        if s <= 0.0:
            level = start
        elif s >= 1.0:
            level = end
        if s < 0.0 or s > 1.0:
            slope = 0.0
        return level, slope / width

    @classmethod
    def parse(cls, spec: Union[str, 'MembershipShape'], role: Union[str, ShapeRole]) -> 'MembershipShape':
        """Build a shape from its spec string (see module docstring)."""
        role = ShapeRole(role)
        if isinstance(spec, MembershipShape):
            if spec.role != role:
                raise BadShape(f"shape '{spec.spec}' has role {spec.role.value}, expected {role.value}")
            return spec
        text = str(spec).strip().lower()
        kind, _, argument = text.partition(':')
        if kind == ShapeKind.LINEAR.value and not argument:
            return cls(ShapeKind.LINEAR, role)
        if kind == ShapeKind.EXPONENTIAL.value:
            try:
                return cls(ShapeKind.EXPONENTIAL, role, scale=float(argument))
            except ValueError as e:
                raise BadShape(f"bad exponential scale in '{spec}'") from e
        if kind == ShapeKind.TABLE.value:
            knots = []
            for pair in filter(None, (p.strip() for p in argument.split(','))):
                position, sep, level = pair.partition(':')
                try:
                    if not sep:
                        raise ValueError(pair)
                    knots.append((float(position), float(level)))
                except ValueError as e:
                    raise BadShape(f"bad table knot '{pair}' in '{spec}' (expected s:v)") from e
            return cls(ShapeKind.TABLE, role, knots=tuple(knots))
        raise BadShape(f"unknown shape '{spec}'; expected linear, exp:<k> or table:<s:v,...>")
