import json

import numpy as np
import pytest

from nounclass.synth import generate_pair, preset


def write_embjsonl(path, dim, lang, records):
    """Write an .embjsonl file from (word, vector[, label]) tuples."""
    lines = [json.dumps({"dim": dim, "lang": lang, "count": len(records)})]
    for rec in records:
        obj = {"word": rec[0], "vector": list(map(float, rec[1]))}
        if len(rec) > 2 and rec[2] is not None:
            obj["label"] = rec[2]
        lines.append(json.dumps(obj))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def tiny_pair():
    """Small synthetic pair shared by read-only tests."""
    return generate_pair(preset("tiny"))


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
