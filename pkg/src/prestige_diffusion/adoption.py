"""Detect how each department first took up a research topic.

A department either never publishes on the topic (null), adopts it through
a new hire who brought prior work on it (hiring adoption), or adopts it
through faculty already there (non-hiring adoption).
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import LoadError

NULL = "null"
HIRING = "hiring"
NON_HIRING = "nonhiring"

_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class FacultyCareer:
    faculty_id: str
    phd_institution: int
    job_institution: int
    hire_year: int
    publications: tuple = ()

    def __post_init__(self):
        pubs = tuple(sorted((int(y), str(t)) for y, t in self.publications))
        object.__setattr__(self, "publications", pubs)


@dataclass(frozen=True)
class TopicSpec:
    name: str
    keywords: tuple

    def __post_init__(self):
        kws = tuple(" ".join(tokenize(k)) for k in self.keywords)
        kws = tuple(k for k in kws if k)
        if not kws:
            raise ValueError(f"topic {self.name!r} has no keywords")
        object.__setattr__(self, "keywords", kws)

    @property
    def _phrases(self):
        return [tuple(k.split()) for k in self.keywords]


@dataclass(frozen=True)
class DeptClassification:
    dept: int
    kind: str
    faculty_id: str | None = None
    adoption_year: int | None = None


def title_matches(title: str, topic: TopicSpec) -> bool:
    """True iff some keyword phrase is a contiguous run of the title's tokens."""
    toks = tokenize(title)
    for phrase in topic._phrases:
        k = len(phrase)
        for i in range(len(toks) - k + 1):
            if tuple(toks[i:i + k]) == phrase:
                return True
    return False


def topic_indicator(career: FacultyCareer, topic: TopicSpec) -> dict[int, int]:
    """Year -> 0/1 on-topic flag across the career's publication span."""
    if not career.publications:
        return {}
    years = [y for y, _ in career.publications]
    hits = {y for y, t in career.publications if title_matches(t, topic)}
    return {y: int(y in hits) for y in range(min(years), max(years) + 1)}


def _on_topic_years(career, topic):
    return sorted({y for y, t in career.publications if title_matches(t, topic)})


def classify_department(dept, careers: Sequence[FacultyCareer], topic: TopicSpec,
                        grace=2, ties=NON_HIRING, strict_subsequent=False) -> DeptClassification:
    """Classify one department's adoption of ``topic``.

    A hire j is a hiring adopter when (a) j has an on-topic paper before
    ``hire_year + grace``, (b) j has one in or after ``hire_year`` (or
    after ``hire_year + grace`` when ``strict_subsequent``), and (c) no other
    faculty member of the department has an on-topic paper in any year
    before ``hire_year``.  Another member whose first on-topic paper falls
    exactly in ``hire_year`` blocks the hire unless ``ties == "hiring"``.
    Otherwise the earliest on-topic author is a non-hiring adopter.
    """
    if ties not in (HIRING, NON_HIRING):
        raise ValueError("ties must be 'hiring' or 'nonhiring'")
    for c in careers:
        if c.job_institution != dept:
            raise ValueError(f"career {c.faculty_id} is not at department {dept}")
    first = {}
    years = {}
    for c in careers:
        ys = _on_topic_years(c, topic)
        if ys:
            years[c.faculty_id] = ys
            first[c.faculty_id] = ys[0]
    if not first:
        return DeptClassification(dept, NULL)

    for c in sorted(careers, key=lambda c: (c.hire_year, c.faculty_id)):
        ys = years.get(c.faculty_id)
        if not ys:
            continue
        t = c.hire_year
        prior = ys[0] < t + grace
        after = t + grace if strict_subsequent else t
        subsequent = ys[-1] >= after
        others = min((y for fid, y in first.items() if fid != c.faculty_id), default=None)
        clear = others is None or others > t or (others == t and ties == HIRING)
        if prior and subsequent and clear:
            return DeptClassification(dept, HIRING, c.faculty_id, t)

    fid = min(first, key=lambda f: (first[f], f))
    return DeptClassification(dept, NON_HIRING, fid, first[fid])


def group_by_department(careers: Iterable[FacultyCareer]) -> dict[int, list[FacultyCareer]]:
    out = {}
    for c in careers:
        out.setdefault(c.job_institution, []).append(c)
    return dict(sorted(out.items()))


def classify_all(careers, topic, grace=2, ties=NON_HIRING, strict_subsequent=False,
                 departments=None) -> list[DeptClassification]:
    """Classify every department that employs at least one career (or ``departments``)."""
    by_dept = group_by_department(careers)
    depts = sorted(by_dept) if departments is None else sorted(departments)
    return [classify_department(d, by_dept.get(d, []), topic, grace, ties, strict_subsequent)
            for d in depts]


def observed_hiring_fraction(classifications) -> float | None:
    """#hiring / (#hiring + #non-hiring); None when nothing was adopted."""
    h = sum(c.kind == HIRING for c in classifications)
    n = sum(c.kind == NON_HIRING for c in classifications)
    return None if h + n == 0 else h / (h + n)


def transmission_arrows(classifications, careers):
    """(phd institution, adopting department, year) for each hiring adoption."""
    by_id = {c.faculty_id: c for c in careers}
    arrows = []
    for cl in classifications:
        if cl.kind == HIRING:
            c = by_id[cl.faculty_id]
            arrows.append((c.phd_institution, cl.dept, cl.adoption_year))
    return arrows


class Corpus:
    """Flattened publication slots of a set of careers, for fast reclassification.

    Slot s belongs to faculty ``fac[s]`` in year ``year[s]``; faculty are
    indexed in faculty_id order.  :meth:`hiring_counts` classifies every
    department from a boolean on-topic mask over slots, so a permuted mask
    reclassifies the corpus without rebuilding careers.
    """

    _NEVER = np.iinfo(np.int64).max // 4

    def __init__(self, careers: Sequence[FacultyCareer]):
        careers = sorted(careers, key=lambda c: c.faculty_id)
        ids = [c.faculty_id for c in careers]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate faculty_id in corpus")
        self.careers = careers
        self.titles = [t for c in careers for _, t in c.publications]
        self.fac = np.array([i for i, c in enumerate(careers) for _ in c.publications], dtype=np.int64)
        self.year = np.array([y for c in careers for y, _ in c.publications], dtype=np.int64)
        self.hire = np.array([c.hire_year for c in careers], dtype=np.int64)
        depts = sorted({c.job_institution for c in careers})
        self.departments = depts
        index = {d: i for i, d in enumerate(depts)}
        self.dept = np.array([index[c.job_institution] for c in careers], dtype=np.int64)

    def __len__(self):
        return len(self.titles)

    def topic_mask(self, topic: TopicSpec) -> np.ndarray:
        cache = {}
        out = np.empty(len(self.titles), dtype=bool)
        for i, t in enumerate(self.titles):
            hit = cache.get(t)
            if hit is None:
                hit = cache[t] = title_matches(t, topic)
            out[i] = hit
        return out

    def hiring_counts(self, mask, grace=2, ties=NON_HIRING, strict_subsequent=False):
        """(#hiring adoptions, #non-hiring adoptions) for an on-topic slot mask."""
        never = self._NEVER
        nf = self.hire.size
        nd = len(self.departments)
        fac, year = self.fac[mask], self.year[mask]
        first = np.full(nf, never, dtype=np.int64)
        np.minimum.at(first, fac, year)
        after = self.hire + (grace if strict_subsequent else 0)
        post = year >= after[fac]
        has_post = np.zeros(nf, dtype=bool)
        has_post[fac[post]] = True

        min1 = np.full(nd, never, dtype=np.int64)
        np.minimum.at(min1, self.dept, first)
        at_min = first == min1[self.dept]
        n_at_min = np.bincount(self.dept[at_min], minlength=nd)
        min2 = np.full(nd, never, dtype=np.int64)
        above = ~at_min
        np.minimum.at(min2, self.dept[above], first[above])
        others = np.where(at_min & (n_at_min[self.dept] == 1), min2[self.dept], min1[self.dept])

        prior = first < self.hire + grace
        clear = others > self.hire
        if ties == HIRING:
            clear |= others == self.hire
        cand = prior & has_post & clear
        hiring = np.bincount(self.dept[cand], minlength=nd) > 0
        active = min1 < never
        return int(hiring.sum()), int((active & ~hiring).sum())


def load_careers(text, source="<careers>") -> list[FacultyCareer]:
    """Parse JSON-lines career records."""
    if isinstance(text, str):
        text = io.StringIO(text)
    out = []
    seen = set()
    for lineno, line in enumerate(text, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            pubs = tuple((int(p["year"]), str(p["title"])) for p in obj.get("publications", []))
            c = FacultyCareer(str(obj["faculty_id"]), int(obj["phd_institution"]),
                              int(obj["job_institution"]), int(obj["hire_year"]), pubs)
        except (ValueError, KeyError, TypeError) as exc:
            raise LoadError(f"malformed career record ({exc})", source, lineno) from None
        if c.faculty_id in seen:
            raise LoadError(f"duplicate faculty_id {c.faculty_id!r}", source, lineno)
        seen.add(c.faculty_id)
        out.append(c)
    return out


def dump_careers(careers, out):
    for c in careers:
        obj = {"faculty_id": c.faculty_id, "phd_institution": c.phd_institution,
               "job_institution": c.job_institution, "hire_year": c.hire_year,
               "publications": [{"year": y, "title": t} for y, t in c.publications]}
        out.write(json.dumps(obj, sort_keys=True) + "\n")


def load_keywords(text, name, source="<keywords>") -> TopicSpec:
    """One phrase per line; blank and '#' lines ignored."""
    if isinstance(text, str):
        text = io.StringIO(text)
    kws = [line.strip() for line in text if line.strip() and not line.lstrip().startswith("#")]
    kws = [k for k in kws if tokenize(k)]
    if not kws:
        raise LoadError("keyword file lists no phrases", source)
    return TopicSpec(name, tuple(kws))
