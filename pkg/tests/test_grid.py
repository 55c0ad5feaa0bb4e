import json

import numpy as np
import pytest

from twistmoyal import Grid, GridError


def test_parse_and_coordinates():
    g = Grid.parse("xt1:-3:3:61,xt2:-2:2:41")
    assert g.shape == (61, 41) and g.names == ("xt1", "xt2")
    x1, x2, p1, p2 = g.coordinates(("xt1", "xt2", "pt1", "pt2"))
    assert x1.shape == (61, 41) and np.all(p1 == 0)
    assert g.axis("xt1").step == pytest.approx(0.1)
    json.dumps(g.to_json())


@pytest.mark.parametrize("text", ["", "xt1:0:1:1", "xt1:1:0:5", "xt1:0:1:5,xt1:0:1:5",
                                  "xt1:0:inf:5", "xt1:0:1", "xt1:a:1:5"])
def test_invalid(text):
    with pytest.raises(GridError):
        Grid.parse(text)


def test_unknown_variable():
    with pytest.raises(GridError):
        Grid.parse("q:0:1:3").coordinates(("xt1", "xt2", "pt1", "pt2"))
