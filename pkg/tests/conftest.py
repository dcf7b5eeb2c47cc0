from __future__ import annotations

from fractions import Fraction

from hypothesis import settings, strategies as st

from liphase.exact import RatMatrix

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")

small_rat = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


@st.composite
def rat_matrices(draw, n: int | None = None, m: int | None = None, elems=small_rat) -> RatMatrix:
    n = draw(st.integers(1, 4)) if n is None else n
    m = n if m is None else m
    return RatMatrix([[draw(elems) for _ in range(m)] for _ in range(n)])


@st.composite
def symmetric_matrices(draw, n: int | None = None, elems=small_rat) -> RatMatrix:
    n = draw(st.integers(1, 3)) if n is None else n
    vals = {(i, j): draw(elems) for i in range(n) for j in range(i, n)}
    return RatMatrix([[vals[min(i, j), max(i, j)] for j in range(n)] for i in range(n)])
