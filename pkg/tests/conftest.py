import pytest

from kgshape.models import Couplings, Family, enumerate_spectrum

# parameter sets of the four published tables
TABLE_PARAMS = {
    1: (Family.TANH, Couplings(0.25, 4.0, 0.35)),
    2: (Family.TANH, Couplings(0.5, 4.0, 0.35)),
    3: (Family.EXP, Couplings(1.6, 4.0, 0.25)),
    4: (Family.LINEAR, Couplings(0.5, 4.0, 0.35)),
}


def table_report(k):
    family, c = TABLE_PARAMS[k]
    nmax = 2 if family is Family.LINEAR else 64
    return enumerate_spectrum(family, c, n_max_scan=nmax)


def table_states():
    out = []
    for k in TABLE_PARAMS:
        for s in table_report(k).accepted:
            out.append(pytest.param(s, id=f"t{k}-n{s.n}{s.branch}"))
    return out


@pytest.fixture(scope="session")
def reports():
    return {k: table_report(k) for k in TABLE_PARAMS}
