from hypothesis import given, strategies as st

from seqcore.gen import DISCS, Generator, apply, random_command, random_commands
from seqcore.kinds import core_signature
from seqcore.machine import Machine
from seqcore.syntax import alpha_eq, free
from seqcore.typing import DisciplineChecker


def test_seeded_generation_is_reproducible():
    assert random_command(5) == random_command(5)
    assert random_commands(3, seed=1) == random_commands(3, seed=1)


@given(st.integers(0, 10_000))
def test_free_names_come_from_the_pool(seed):
    g = Generator(seed)
    fv = free(g.command(4))
    assert fv.vars <= set(g.free_vars) and fv.covars <= set(g.free_covars)


@given(st.integers(0, 10_000))
def test_substitutions_are_well_disciplined(seed):
    g = Generator(seed)
    c = g.command(3)
    rho = g.substitution(c)
    m = Machine()
    for x, v in rho.terms.items():
        assert m.is_value(v, g.free_vars[x])
    for a, e in rho.coterms.items():
        assert m.is_covalue(e, g.free_covars[a])
    gamma = {f"x{s.value}0": s for s in DISCS}
    delta = {f"a{s.value}0": s for s in DISCS}
    DisciplineChecker(core_signature()).check_command(gamma, delta, apply(c, rho))


def test_apply_with_empty_substitution():
    c = random_command(3)
    rho = Generator(0).substitution(c)
    assert alpha_eq(apply(c, type(rho)()), c)
