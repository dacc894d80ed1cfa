"""
Windows - Finite integer windows and the sets confined to them

Every set-valued operation works inside an explicit window [lo, hi]; a
WindowedSet is the finite stand-in for an infinite subset of Z.
"""

import bisect
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Window:
    """The integer interval [lo, hi]"""
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError(f"Invalid window: lo={self.lo} > hi={self.hi}")

    @classmethod
    def parse(cls, text: Any) -> "Window":
        """Accepts 'lo:hi', [lo, hi] or a Window"""
        if isinstance(text, Window):
            return text
        if isinstance(text, (list, tuple)) and len(text) == 2:
            return cls(int(text[0]), int(text[1]))
        match = re.fullmatch(r'\s*(-?\d+)\s*:\s*(-?\d+)\s*', str(text))
        if not match:
            raise ValidationError(f"Window must look like LO:HI, got {text!r}")
        return cls(int(match.group(1)), int(match.group(2)))

    @classmethod
    def symmetric(cls, radius: int) -> "Window":
        return cls(-radius, radius)

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, n: int) -> bool:
        return self.lo <= n <= self.hi

    def values(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def expand(self, below: int, above: int) -> "Window":
        return Window(self.lo - below, self.hi + above)

    def __str__(self) -> str:
        return f"{self.lo}:{self.hi}"

    def to_dict(self) -> List[int]:
        return [self.lo, self.hi]


def spiral(bound: int) -> np.ndarray:
    """0, 1, -1, 2, -2, ..., bound, -bound"""
    order = np.empty(2 * bound + 1, dtype=np.int64)
    order[0] = 0
    steps = np.arange(1, bound + 1, dtype=np.int64)
    order[1::2] = steps
    order[2::2] = -steps
    return order


def spiral_chunks(bound: int, start_size: int = 4096) -> Iterable[np.ndarray]:
    """The spiral order up to ``bound`` in growing chunks"""
    done = -1
    size = start_size
    while done < bound:
        upto = min(bound, done + size)
        if done < 0:
            yield spiral(upto)
        else:
            steps = np.arange(done + 1, upto + 1, dtype=np.int64)
            chunk = np.empty(2 * steps.size, dtype=np.int64)
            chunk[0::2] = steps
            chunk[1::2] = -steps
            yield chunk
        done = upto
        size *= 2


def spiral_key(n: int) -> Tuple[int, int]:
    """Sort key reproducing the spiral order"""
    return (abs(n), 0 if n >= 0 else 1)


@dataclass(frozen=True)
class WindowedSet:
    """A finite subset of Z confined to a window, with its generating predicate"""
    window: Window
    members: Tuple[int, ...]
    source: str = ""
    ambiguous: Tuple[int, ...] = ()

    def __post_init__(self):
        members = tuple(sorted(set(int(n) for n in self.members)))
        object.__setattr__(self, 'members', members)
        object.__setattr__(self, 'ambiguous', tuple(sorted(set(int(n) for n in self.ambiguous))))
        if members and (members[0] < self.window.lo or members[-1] > self.window.hi):
            raise ValidationError(f"Members of {self.source or 'set'} escape the window {self.window}")

    @classmethod
    def from_mask(cls, window: Window, mask: np.ndarray, source: str = "",
                  ambiguous: Optional[np.ndarray] = None) -> "WindowedSet":
        values = window.values()
        members = tuple(int(n) for n in values[mask])
        amb = tuple(int(n) for n in values[ambiguous]) if ambiguous is not None else ()
        return cls(window, members, source, amb)

    @classmethod
    def full(cls, window: Window, source: str = "all") -> "WindowedSet":
        return cls(window, tuple(range(window.lo, window.hi + 1)), source)

    def __contains__(self, n: int) -> bool:
        i = bisect.bisect_left(self.members, n)
        return i < len(self.members) and self.members[i] == n

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def mask(self, window: Optional[Window] = None) -> np.ndarray:
        """Boolean membership over ``window`` (default: own window)"""
        window = window or self.window
        out = np.zeros(len(window), dtype=bool)
        arr = np.asarray(self.members, dtype=np.int64)
        arr = arr[(arr >= window.lo) & (arr <= window.hi)]
        out[arr - window.lo] = True
        return out

    def density(self) -> Fraction:
        return Fraction(len(self.members), len(self.window))

    def shifted(self, m: int) -> "WindowedSet":
        return WindowedSet(Window(self.window.lo + m, self.window.hi + m),
                           tuple(n + m for n in self.members), f"({self.source}) + {m}")

    def spiral_members(self) -> List[int]:
        return sorted(self.members, key=spiral_key)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'window': self.window.to_dict(),
            'members': list(self.members),
            'source': self.source,
            'ambiguous': list(self.ambiguous),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WindowedSet":
        return cls(Window.parse(data['window']), tuple(data.get('members', ())),
                   data.get('source', ''), tuple(data.get('ambiguous', ())))
