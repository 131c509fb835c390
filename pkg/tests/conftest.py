import random
from pathlib import Path

import pytest

from trialrank import load_corpus, load_topics, parse_qrels

MINI = Path(__file__).parent / "data" / "mini"


def toy_pv_corpus() -> list[tuple[str, str]]:
    """30 tiny documents for paragraph-vector sanity checks.

    Docs D00 and D01 are identical token sequences; D02 shares no token with
    them. Every token appears at least twice corpus-wide, so the default
    min_token_count=2 keeps the whole vocabulary.
    """
    a = "alpha beta gamma delta epsilon zeta eta theta"
    b = "nu xi omicron pi rho sigma tau upsilon"
    pool = ["heart", "lung", "kidney", "liver", "blood", "nerve", "bone", "skin",
            "cell", "gene", "dose", "trial", "visit", "scan", "score", "panel"]
    docs = [("D00", f"{a} {a}"), ("D01", f"{a} {a}"), ("D02", f"{b} {b}")]
    rng = random.Random(97)
    for i in range(3, 30):
        words = [pool[rng.randrange(len(pool))] for _ in range(16)]
        docs.append((f"D{i:02d}", " ".join(words + words)))
    return docs


@pytest.fixture(scope="session")
def mini_corpus_dir() -> Path:
    return MINI / "corpus"


@pytest.fixture(scope="session")
def mini_topics_path() -> Path:
    return MINI / "topics.xml"


@pytest.fixture(scope="session")
def mini_qrels_path() -> Path:
    return MINI / "qrels.txt"


@pytest.fixture(scope="session")
def perfect_run_path() -> Path:
    return MINI / "perfect.run"


@pytest.fixture(scope="session")
def mini_docs(mini_corpus_dir):
    docs, _ = load_corpus(mini_corpus_dir)
    return docs


@pytest.fixture(scope="session")
def mini_topics(mini_topics_path):
    return load_topics(mini_topics_path)


@pytest.fixture(scope="session")
def mini_qrels(mini_qrels_path):
    return parse_qrels(mini_qrels_path)
