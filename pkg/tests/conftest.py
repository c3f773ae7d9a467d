import pytest

from idiom_forge import fixture_path
from idiom_forge.align import UnigramStats, read_clicks, train_em
from idiom_forge.extract import build_index, read_corpus
from idiom_forge.registry import load_registry

REGEX_DEMO = """
class RegexDemo
{
  void Run(string pattern, string input)
  {
    var regex = new Regex(pattern, RegexOptions.IgnoreCase);
    var match = regex.Match(input);
    if (match.Success)
    {
      var groups = match.Groups;
    }
  }
}
"""

READER_DEMO = """
class ReadDemo
{
  string ReadAll(string path)
  {
    var reader = new StreamReader(path);
    var text = reader.ReadToEnd();
    reader.Close();
    return text;
  }
}
"""


@pytest.fixture(scope="session")
def reg():
    return load_registry(fixture_path("registry.json"))


@pytest.fixture(scope="session")
def fixture_index(reg):
    return build_index(read_corpus(fixture_path("corpus")), reg)


@pytest.fixture(scope="session")
def fixture_model(reg):
    pairs, queries = read_clicks(fixture_path("clicks.tsv"), fixture_path("docs"), reg)
    return train_em(pairs, 50), UnigramStats.from_queries(queries)


def api(reg, display):
    found = reg.by_display(display)
    assert found is not None, display
    return found


def make_synthetic(n_types, members, n_groups, seed=0, n_tokens=200):
    """Random registry, index and translation model of the requested size.

    Every type has one constructor and ``members - 1`` methods; the first
    method of each type returns the next type, so some groups are created
    through an instance member and need a receiver.
    """
    import random

    from idiom_forge import scs as S
    from idiom_forge.align import TranslationTable, UnigramStats
    from idiom_forge.extract import NameModel, ScsIndex
    from idiom_forge.registry import MethodDecl, TypeDecl, build_registry

    rng = random.Random(seed)
    names = [f"T{i}" for i in range(n_types)]
    types = []
    for i, name in enumerate(names):
        methods = [MethodDecl("Next", (), (), names[(i + 1) % n_types])]
        for j in range(1, members - 1):
            args = ("int",) if j % 3 == 0 else ()
            methods.append(MethodDecl(f"M{j}", args, ("count",) if args else (), "bool" if j % 2 else "int"))
        types.append(TypeDecl(name, "reference", (MethodDecl("new", (), (), name, True),), tuple(methods)))
    reg = build_registry(types)
    by_type = {}
    for a in reg.api_vocab:
        by_type.setdefault(a.declaring_type, []).append(a)

    counts = {}
    while len(counts) < n_groups:
        t = rng.randrange(n_types)
        apis = by_type[names[t]]
        if rng.random() < 0.2:
            head = by_type[names[t - 1]][1]  # T{t-1}.Next() creates a T{t}
        else:
            head = apis[0]
        acts = [S.Action(a) for a in rng.sample(apis[2:], rng.randint(1, 4))]
        if rng.random() < 0.3 and len(acts) >= 2:
            acts = [acts[0], S.If(acts[1], S.seq(*acts[2:]) if acts[2:] else acts[0], S.EMPTY)]
        tree = S.seq(S.Creation(head), *acts)
        key = S.canonical_form(tree)
        if key not in counts:
            counts[key] = (tree, rng.randint(1, 50))
    index = ScsIndex.from_counts(reg, counts, {})
    vocab = reg.api_vocab
    table = TranslationTable({
        f"w{i}": {a: 1 / 8 for a in rng.sample(vocab, 8)} for i in range(n_tokens)
    })
    stats = UnigramStats({f"w{i}": rng.randint(1, 20) for i in range(n_tokens)}, 0)
    stats.total_terms = sum(stats.term_counts.values())
    return reg, index, NameModel(), table, stats


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, in criterion order."""
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid and (rep.when == "call" or outcome != "passed"):
                name = nodeid.split("::test_criterion_")[1]
                results[name] = "PASS" if outcome == "passed" else "FAIL"
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(results, key=lambda n: int(n.split("_")[0])):
        number, _, title = name.partition("_")
        terminalreporter.write_line(f"criterion {number}: {results[name]}  {title.replace('_', ' ')}")
