import http.server
import os
import threading

import pytest

from kwrank import load_kb

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(*parts):
    return os.path.join(FIXTURES, *parts)


def read_fixture(*parts) -> bytes:
    with open(fixture_path(*parts), "rb") as fh:
        return fh.read()


@pytest.fixture
def letters_kb():
    return load_kb(read_fixture("letters.kb"))


@pytest.fixture
def nature_kb():
    return load_kb(read_fixture("nature.kb"))


class _Handler(http.server.SimpleHTTPRequestHandler):
    seen_agents: list = []

    def __init__(self, *args, **kwargs):
        super().__init__(*args, directory=FIXTURES, **kwargs)

    def do_GET(self):
        _Handler.seen_agents.append(self.headers.get("User-Agent"))
        if self.path.startswith("/slow"):
            import time
            time.sleep(2)
        super().do_GET()

    def log_message(self, *args):
        pass


@pytest.fixture(scope="session")
def http_server():
    """Serve tests/fixtures over HTTP on an ephemeral localhost port."""
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


def random_dag_kb(rng, max_nodes=12, max_edges=20, extra_vocab=2):
    """Random acyclic KB: edges only go forward in a shuffled node order."""
    from kwrank import KnowledgeBase, Rule

    n = rng.randint(1, max_nodes)
    names = [f"w{i}" for i in range(n)]
    rng.shuffle(names)
    pairs = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
    edges = rng.sample(pairs, min(len(pairs), rng.randint(0, max_edges)))
    vocab = set(names) | {f"x{i}" for i in range(rng.randint(0, extra_vocab))}
    rules = [Rule(i, a, b) for i, (a, b) in enumerate(edges, 1)]
    return KnowledgeBase(rules, vocab)


def random_digraph_kb(rng, max_nodes=10, max_edges=25):
    """Random KB over arbitrary (possibly cyclic) edges, no self-loops."""
    from kwrank import KnowledgeBase, Rule

    n = rng.randint(2, max_nodes)
    names = [f"w{i}" for i in range(n)]
    pairs = [(a, b) for a in names for b in names if a != b]
    edges = rng.sample(pairs, min(len(pairs), rng.randint(1, max_edges)))
    return KnowledgeBase([Rule(i, a, b) for i, (a, b) in enumerate(edges, 1)], names)
