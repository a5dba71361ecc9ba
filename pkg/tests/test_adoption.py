import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import classify_oracle
from prestige_diffusion.adoption import (
    HIRING,
    NON_HIRING,
    NULL,
    Corpus,
    DeptClassification,
    FacultyCareer,
    TopicSpec,
    classify_all,
    classify_department,
    dump_careers,
    load_careers,
    load_keywords,
    observed_hiring_fraction,
    title_matches,
    tokenize,
    topic_indicator,
    transmission_arrows,
)
from prestige_diffusion.graph import LoadError
from prestige_diffusion.synthetic import DEMO_TOPIC, planted_corpus

TM = TopicSpec("tm", ("topic modeling",))
ON = "Scalable topic modeling"
OFF = "Fast sorting"


def career(fid, hire, pubs, dept=0, phd=9):
    return FacultyCareer(fid, phd, dept, hire, tuple(pubs))


# ---------------------------------------------------------------- matching


@pytest.mark.parametrize("title, kw, hit", [
    ("A Survey of Topic Modeling", "topic modeling", True),
    ("Topics in Model Theory", "topic modeling", False),
    ("Deep-Learning for Vision", "deep learning", True),
    ("deep   learning", "Deep Learning", True),
    ("learning deep", "deep learning", False),
    ("Stopic modeling", "topic modeling", False),
    ("topic_modeling", "topic modeling", True),
    ("LDA2vec: topic modeling", "lda2vec", True),
])
def test_title_matches(title, kw, hit):
    assert title_matches(title, TopicSpec("t", (kw,))) is hit


def test_tokenizer():
    assert tokenize("Über-Fast, GPU_based (2x)!") == ["über", "fast", "gpu", "based", "2x"]


def test_topic_spec_needs_keywords():
    with pytest.raises(ValueError):
        TopicSpec("x", ())
    with pytest.raises(ValueError):
        TopicSpec("x", ("--", " "))
    assert TopicSpec("x", ("Topic-Modeling",)).keywords == ("topic modeling",)


def test_indicator_series():
    c = career("a", 2000, [(2005, ON), (2007, ON), (2007, ON + " again"), (2006, OFF)])
    assert topic_indicator(c, TM) == {2005: 1, 2006: 0, 2007: 1}
    c = career("a", 2000, [(2003, OFF), (2006, OFF)])
    assert set(topic_indicator(c, TM).values()) == {0}
    assert topic_indicator(career("a", 2000, []), TM) == {}


def test_publications_sorted_on_construction():
    c = career("a", 2000, [(2009, "b"), (2001, "a")])
    assert [y for y, _ in c.publications] == [2001, 2009]


# ---------------------------------------------------------------- classification


def test_hiring_adoption():
    cs = [career("new", 2005, [(2004, ON), (2006, ON)]),
          career("old", 1990, [(1995, OFF), (2008, ON)])]
    assert classify_department(0, cs, TM) == DeptClassification(0, HIRING, "new", 2005)


def test_non_hiring_adoption():
    cs = [career("old", 1990, [(2001, ON)]),
          career("new", 2005, [(2004, ON), (2006, ON)])]
    assert classify_department(0, cs, TM) == DeptClassification(0, NON_HIRING, "old", 2001)


def test_null():
    assert classify_department(0, [career("a", 2000, [(2001, OFF)])], TM).kind == NULL
    assert classify_department(0, [], TM).kind == NULL


def test_grace_window():
    # first on-topic paper one year after hire: inside the 2-year window
    cs = [career("new", 2005, [(2006, ON)])]
    assert classify_department(0, cs, TM).kind == HIRING
    # two years after hire: outside; the same person is then a non-hiring adopter
    cs = [career("new", 2005, [(2007, ON)])]
    assert classify_department(0, cs, TM) == DeptClassification(0, NON_HIRING, "new", 2007)
    assert classify_department(0, cs, TM, grace=3).kind == HIRING


def test_subsequent_requirement():
    # pre-hire work only: no evidence of continuing on the topic
    cs = [career("new", 2005, [(2003, ON), (2006, OFF)])]
    assert classify_department(0, cs, TM).kind == NON_HIRING
    cs = [career("new", 2005, [(2003, ON), (2005, ON)])]
    assert classify_department(0, cs, TM).kind == HIRING
    assert classify_department(0, cs, TM, strict_subsequent=True).kind == NON_HIRING
    cs = [career("new", 2005, [(2003, ON), (2007, ON)])]
    assert classify_department(0, cs, TM, strict_subsequent=True).kind == HIRING


def test_same_year_tie():
    cs = [career("new", 2005, [(2004, ON), (2006, ON)]),
          career("old", 1990, [(2005, ON)])]
    assert classify_department(0, cs, TM).kind == NON_HIRING
    assert classify_department(0, cs, TM, ties=HIRING).kind == HIRING
    with pytest.raises(ValueError):
        classify_department(0, cs, TM, ties="coin")


def test_earliest_candidate_wins():
    cs = [career("b", 2008, [(2007, ON), (2009, ON)]),
          career("a", 2003, [(2002, ON), (2004, ON)])]
    assert classify_department(0, cs, TM) == DeptClassification(0, HIRING, "a", 2003)


def test_wrong_department_rejected():
    with pytest.raises(ValueError):
        classify_department(1, [career("a", 2000, [], dept=0)], TM)


# ---------------------------------------------------------------- random corpora


titles = st.sampled_from([ON, OFF, "A topic model of text", "Topic Modeling!", "model topics"])
years = st.integers(1995, 2012)


@st.composite
def departments(draw, max_faculty=5):
    k = draw(st.integers(0, max_faculty))
    cs = []
    for i in range(k):
        pubs = draw(st.lists(st.tuples(years, titles), max_size=6))
        cs.append(career(f"f{i}", draw(years), pubs))
    return cs


@given(departments(), st.integers(0, 3), st.sampled_from([HIRING, NON_HIRING]), st.booleans())
def test_classifier_matches_oracle(cs, grace, ties, strict):
    got = classify_department(0, cs, TM, grace, ties, strict)
    expect = classify_oracle([(c.faculty_id, c.hire_year, c.publications) for c in cs],
                             ["topic modeling"], grace, ties, strict)
    assert (got.kind, got.faculty_id, got.adoption_year) == expect


@given(departments(), st.randoms())
def test_order_invariant(cs, rnd):
    shuffled = list(cs)
    rnd.shuffle(shuffled)
    assert classify_department(0, shuffled, TM) == classify_department(0, cs, TM)


@given(departments(), st.data())
def test_off_topic_additions_change_nothing(cs, data):
    if not cs:
        return
    i = data.draw(st.integers(0, len(cs) - 1))
    y = data.draw(st.integers(1980, 2020))
    c = cs[i]
    more = list(cs)
    more[i] = career(c.faculty_id, c.hire_year, c.publications + ((y, OFF),))
    assert classify_department(0, more, TM) == classify_department(0, cs, TM)


@given(departments(), st.integers(-50, 50))
def test_year_shift(cs, shift):
    moved = [career(c.faculty_id, c.hire_year + shift,
                    [(y + shift, t) for y, t in c.publications]) for c in cs]
    a, b = classify_department(0, cs, TM), classify_department(0, moved, TM)
    assert (a.kind, a.faculty_id) == (b.kind, b.faculty_id)
    if a.adoption_year is not None:
        assert b.adoption_year == a.adoption_year + shift


@given(st.lists(departments(max_faculty=4), min_size=1, max_size=6),
       st.integers(0, 3), st.sampled_from([HIRING, NON_HIRING]), st.booleans())
def test_vectorized_counts_match_classifier(depts, grace, ties, strict):
    careers = []
    for d, cs in enumerate(depts):
        careers += [FacultyCareer(f"{d}-{c.faculty_id}", 0, d, c.hire_year, c.publications)
                    for c in cs]
    if not careers:
        return
    cls = classify_all(careers, TM, grace, ties, strict)
    corpus = Corpus(careers)
    h, n = corpus.hiring_counts(corpus.topic_mask(TM), grace, ties, strict)
    assert h == sum(c.kind == HIRING for c in cls)
    assert n == sum(c.kind == NON_HIRING for c in cls)


def test_planted_corpus_recovered():
    kinds = [HIRING, NON_HIRING, NULL] * 40
    careers, expected = planted_corpus(kinds, seed=3)
    for c in classify_all(careers, DEMO_TOPIC):
        assert (c.kind, c.faculty_id, c.adoption_year) == expected[c.dept]


# ---------------------------------------------------------------- summaries


def test_observed_fraction():
    mk = lambda k: DeptClassification(0, k)  # noqa: E731
    cls = [mk(HIRING)] * 88 + [mk(NON_HIRING)] * 153 + [mk(NULL)] * 10
    assert observed_hiring_fraction(cls) == pytest.approx(88 / 241)
    assert round(observed_hiring_fraction(cls), 2) == 0.37
    assert observed_hiring_fraction([mk(HIRING)] * 3) == 1.0
    assert observed_hiring_fraction([mk(NULL)]) is None
    assert observed_hiring_fraction([]) is None


def test_transmission_arrows():
    c = FacultyCareer("x", 4, 7, 2005, ((2004, ON), (2006, ON)))
    cls = classify_all([c], TM)
    assert transmission_arrows(cls, [c]) == [(4, 7, 2005)]
    assert transmission_arrows([DeptClassification(7, NON_HIRING, "x", 2004)], [c]) == []


# ---------------------------------------------------------------- files


def test_careers_roundtrip():
    careers, _ = planted_corpus([HIRING, NULL], seed=1)
    buf = io.StringIO()
    dump_careers(careers, buf)
    assert load_careers(buf.getvalue()) == careers


@pytest.mark.parametrize("text, line", [
    ('{"faculty_id": "a"}\n', 1),
    ('\n{"faculty_id": "a", "phd_institution": 0, "job_institution": 0, "hire_year": 2000}\n'
     'not json\n', 3),
    ('{"faculty_id": "a", "phd_institution": 0, "job_institution": 0, "hire_year": 2000}\n'
     '{"faculty_id": "a", "phd_institution": 0, "job_institution": 0, "hire_year": 2000}\n', 2),
])
def test_careers_errors(text, line):
    with pytest.raises(LoadError) as err:
        load_careers(text)
    assert err.value.line == line


def test_keywords_file():
    t = load_keywords("# topic modeling\ntopic model\n\nLatent Dirichlet Allocation\n", "tm")
    assert t.keywords == ("topic model", "latent dirichlet allocation")
    with pytest.raises(LoadError):
        load_keywords("# nothing\n\n", "empty")
