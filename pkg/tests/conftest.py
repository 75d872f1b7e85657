from hypothesis import HealthCheck, settings, strategies as st

from seqcore.gen import Generator

settings.register_profile("seqcore", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("seqcore")


@st.composite
def commands(draw, depth=4):
    """Well-disciplined core commands, seeded through hypothesis so failures shrink to a seed."""
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return Generator(seed).command(draw(st.integers(min_value=1, max_value=depth)))


@st.composite
def command_and_subst(draw, depth=4):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    g = Generator(seed)
    c = g.command(depth)
    return c, g.substitution(c)
