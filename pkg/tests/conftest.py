import itertools

import numpy as np
import pytest

from bestalign.seqcore import aligned_loss

AUDIO_1D = [0.0, 1.0, 1.0, 2.0]
TEXT_1D = [0.0, 2.0]


def enumerate_alignments(n, m):
    """All monotone non-decreasing length-n index tuples over range(m), lexicographic."""
    return list(itertools.combinations_with_replacement(range(m), n))


def oracle_best(audio, text, metric):
    """Independent minimum: aligned_loss over every alignment, first minimum in lex order."""
    audio = np.asarray(audio, dtype=float).reshape(len(audio), -1)
    text = np.asarray(text, dtype=float).reshape(len(text), -1)
    best, best_path = None, None
    for a in enumerate_alignments(len(audio), len(text)):
        v = aligned_loss(audio, text, a, metric)
        if best is None or v < best:
            best, best_path = v, a
    return best, best_path


def random_instance(rng, n, m, d):
    return rng.standard_normal((n, d)), rng.standard_normal((m, d))


@pytest.fixture
def fixture_files(tmp_path):
    a = tmp_path / "audio.csv"
    t = tmp_path / "text.csv"
    a.write_text("0\n1\n1\n2\n")
    t.write_text("0\n2\n")
    return a, t
