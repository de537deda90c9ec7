import pytest

from pmchelix.reconstruct import build_case3, build_case4, build_case5, build_control, reconstruct_case5


def _gallery():
    return {
        "slice_sphere": lambda: build_control("slice", c=1.0),
        "slice_hyperbolic": lambda: build_control("slice", c=-1.0),
        "cmc_torus": lambda: build_control("cmc_torus_in_S3", c=1.0, r1=0.6, r2=0.8),
        "case3_sphere": lambda: build_case3(1.0, 2, 0.5),
        "case3_hyperbolic": lambda: build_case3(-1.0, 2, 0.6),
        "case4": lambda: build_case4(-1.0, 0.8),
        "case5": lambda: build_case5(1.0, 0.5, 0.6),
    }


GALLERY_NAMES = tuple(_gallery())


class Gallery:
    """Builds gallery surfaces once per session, on first use."""

    def __init__(self):
        self._makers = _gallery()
        self._cache = {}

    def __getitem__(self, name):
        if name not in self._cache:
            self._cache[name] = self._makers[name]()
        return self._cache[name]


@pytest.fixture(scope="session")
def gallery():
    return Gallery()


@pytest.fixture(scope="session")
def case5_sampled():
    return reconstruct_case5(1.0, 0.5, 0.6)
