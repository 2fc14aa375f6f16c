import numpy as np
from hypothesis import settings, strategies as st

from freebrown.measures import PositiveRealMeasure

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")


@st.composite
def atomic_measures(draw, max_atoms=5, with_atom0=False):
    """Up to five distinct atoms in [0.1, 10], optionally with mass at 0."""
    xs = draw(
        st.lists(
            st.floats(0.1, 10.0).map(lambda v: round(v, 6)),
            min_size=1,
            max_size=max_atoms,
            unique=True,
        )
    )
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=len(xs), max_size=len(xs)))
    atom0 = draw(st.one_of(st.just(0.0), st.floats(0.01, 0.6))) if with_atom0 else 0.0
    w = np.array(raw) / sum(raw) * (1 - atom0)
    return PositiveRealMeasure.from_atoms(list(zip(xs, w)), atom0=atom0)


def interior(delta, frac):
    """Map frac in [0, 1] to w in (delta - 1 + 0.01, -0.01)."""
    lo, hi = delta - 1 + 0.01, -0.01
    return lo + frac * (hi - lo)
