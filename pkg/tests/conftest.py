import pytest

from polyrho import geometry

# shared shape set: convex/non-convex, 3-6 vertices, all area 1 except the
# scalene triangle (area 0.4) which exercises the non-normalized paths
FIXTURE_BUILDERS = {
    "triangle": lambda: geometry.polygon_new([(0, 0), (1, 0), (0.3, 0.8)]),
    "square": lambda: geometry.polygon_new(
        [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]),
    "windmill-1": lambda: geometry.make_windmill(1),
    "windmill-2": lambda: geometry.make_windmill(2),
    "pentagon": lambda: geometry.make_regular_ngon(5),
}


def fixture_polygons():
    return [(name, FIXTURE_BUILDERS[name]()) for name in sorted(FIXTURE_BUILDERS)]


@pytest.fixture(params=sorted(FIXTURE_BUILDERS))
def any_polygon(request):
    return FIXTURE_BUILDERS[request.param]()


@pytest.fixture
def square():
    return FIXTURE_BUILDERS["square"]()


@pytest.fixture
def triangle():
    return FIXTURE_BUILDERS["triangle"]()


@pytest.fixture
def pentagon():
    return FIXTURE_BUILDERS["pentagon"]()
