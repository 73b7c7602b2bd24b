import math
import random
from datetime import timedelta

import pytest
from sklearn.base import clone

from rminer.heuristics import (
    DEFAULT_DFSC_TABLE,
    DEFAULT_ROLE_SCORES,
    DEFAULT_SWEEP_DELTA,
    ComponentContractError,
    HEURISTIC_IDS,
    HeuristicScorer,
    SWEEP_ELIGIBLE,
    SWEEP_GRID,
    dfsc_score,
    final_score,
    group_by_pep,
    normalize_subject,
    revector,
    score_corpus,
)
from rminer.roles import Roster
from rminer.validation import InputValidationError

from conftest import DECISIVE, build_corpus, build_message, build_pep


def fit_scorer(corpus, **kw):
    kw.setdefault("sweep_delta", {})
    return HeuristicScorer(**kw).fit(corpus)


def by_key(scored):
    return {(s.message_id, s.sentence_index): s for s in scored}


# --- final_score arithmetic ----------------------------------------------------

VALUE_CHOICES = {
    "TPCS": (0.0, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    "TPROP": (0.0, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    "TPMS": (0.0, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    "DFSC": (0.0, 0.3, 0.6, 0.9),
    "SLIM": (0.0, 0.9),
    "NT": (0.0, -0.8),
    "MT": (0.0, 0.9),
    "AR": (0.0, 0.4, 0.5, 0.6, 0.9),
    "SAMCER": (0.0, 0.9),
    "RMSSCM": (0.0, 0.4),
    "RFUTE": (0.0, 0.9),
    "DTIM": (0.0, 0.9),
    "DTHP": (0.0, 0.9),
}


def oracle_components(bases, delta, disabled):
    comps = {}
    for h in HEURISTIC_IDS:
        b = bases[h]
        if h in disabled or b == 0.0:
            comps[h] = 0.0
            continue
        v = b + delta.get(h, 0.0)
        if v < 0.0 and h != "NT":
            v = 0.0
        comps[h] = v
    return comps


def test_final_score_against_bruteforce_oracle():
    rng = random.Random(99)
    for _ in range(2000):
        bases = {h: rng.choice(VALUE_CHOICES[h]) for h in HEURISTIC_IDS}
        delta = {h: rng.choice(SWEEP_GRID)
                 for h in rng.sample(HEURISTIC_IDS, rng.randrange(0, 5))}
        disabled = frozenset(rng.sample(HEURISTIC_IDS, rng.randrange(0, 3)))
        vec = final_score(bases, delta, disabled)
        expected = oracle_components(bases, delta, disabled)
        assert vec.components == expected
        assert abs(vec.fs - sum(sorted(expected.values()))) < 1e-9


def test_final_score_requires_exactly_thirteen():
    bases = {h: 0.0 for h in HEURISTIC_IDS}
    missing = dict(bases)
    missing.pop("RFUTE")
    with pytest.raises(ComponentContractError):
        final_score(missing)
    extra = dict(bases, BONUS=1.0)
    with pytest.raises(ComponentContractError):
        final_score(extra)
    renamed = dict(missing, RFUTE2=0.9)
    with pytest.raises(ComponentContractError):
        final_score(renamed)


def test_delta_only_applies_to_activated_components():
    bases = {h: 0.0 for h in HEURISTIC_IDS}
    bases["TPCS"] = 0.3
    vec = final_score(bases, {"TPCS": 0.6, "MT": 0.9})
    assert vec.components["TPCS"] == pytest.approx(0.9)
    assert vec.components["MT"] == 0.0
    assert vec.fs == pytest.approx(0.9)


def test_negative_delta_floors_at_zero_except_penalty():
    bases = {h: 0.0 for h in HEURISTIC_IDS}
    bases["TPCS"] = 0.3
    bases["NT"] = -0.8
    vec = final_score(bases, {"TPCS": -0.6, "NT": -0.3})
    assert vec.components["TPCS"] == 0.0
    assert vec.components["NT"] == pytest.approx(-1.1)
    assert vec.fs == pytest.approx(-1.1)


def test_disabled_component_contributes_zero():
    bases = {h: 0.0 for h in HEURISTIC_IDS}
    bases["RFUTE"] = 0.9
    bases["SLIM"] = 0.9
    vec = final_score(bases, {"RFUTE": 0.6}, disabled={"RFUTE"})
    assert vec.components["RFUTE"] == 0.0
    assert vec.fs == pytest.approx(0.9)


def test_fs_is_sum_of_components():
    bases = {h: v[-1] for h, v in VALUE_CHOICES.items()}
    vec = final_score(bases)
    assert vec.fs == pytest.approx(math.fsum(vec.components.values()))


# --- dfsc decay table ----------------------------------------------------------

@pytest.mark.parametrize("days,expected", [
    (None, 0.0),
    (0, 0.9), (7, 0.9), (-7, 0.9),
    (8, 0.6), (30, 0.6), (-30, 0.6),
    (31, 0.3), (90, 0.3), (-90, 0.3),
    (91, 0.0), (-91, 0.0), (365, 0.0),
])
def test_dfsc_table_boundaries(days, expected):
    assert dfsc_score(days, DEFAULT_DFSC_TABLE) == expected


def test_dfsc_table_is_sorted_on_fit():
    corpus = build_corpus([], [])
    scorer = fit_scorer(corpus, dfsc_table=[(90, 0.3), (7, 0.9), (30, 0.6)])
    assert scorer.dfsc_table_ == ((7, 0.9), (30, 0.6), (90, 0.3))
    assert dfsc_score(15, scorer.dfsc_table_) == 0.6


# --- subject normalization ------------------------------------------------------

@pytest.mark.parametrize("subject,expected", [
    ("Re: PEP 308", "pep 308"),
    ("RE:  FWD: Re: Vote results", "vote results"),
    ("Fw: status", "status"),
    ("fwd:status", "status"),
    ("Aw: Antwort", "antwort"),
    ("  Plain   subject ", "plain subject"),
    ("Relay question", "relay question"),
    ("", ""),
])
def test_normalize_subject(subject, expected):
    assert normalize_subject(subject) == expected


# --- per-heuristic base activations through the scorer --------------------------

def test_term_pattern_current_sentence_base():
    msg = build_message("m@x", [[
        "PEP 900 was accepted because it works.",
        "Filler sentence here.",
    ]])
    corpus = build_corpus([msg], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["TPCS"] == 0.9
    assert scored[("m@x", 1)].bases["TPCS"] == 0.0


def test_term_pattern_rest_of_paragraph_is_suffix_union():
    # "accepted" (state) and "because" (reason) only score together: the
    # remainder is the union of types over the following sentences.
    msg = build_message("m@x", [[
        "Filler words only here.",
        "It was accepted.",
        "Mostly because of time.",
    ]])
    corpus = build_corpus([msg], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["TPCS"] == 0.0
    assert scored[("m@x", 0)].bases["TPROP"] == 0.6
    assert scored[("m@x", 1)].bases["TPROP"] == 0.0
    assert scored[("m@x", 2)].bases["TPROP"] == 0.0


def test_term_pattern_rest_does_not_cross_paragraphs():
    msg = build_message("m@x", [
        ["Filler words only here."],
        ["It was accepted because of time."],
    ])
    corpus = build_corpus([msg], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["TPROP"] == 0.0


def test_term_pattern_subject_base():
    msg = build_message("m@x", [["Filler words only here."]],
                        subject="PEP 900 accepted by consensus")
    corpus = build_corpus([msg], [build_pep()])
    scored = fit_scorer(corpus).transform(corpus)
    assert scored[0].bases["TPMS"] == 0.8


def test_day_distance_base_from_message_date():
    pep = build_pep()
    near = build_message("near@x", [["Filler words only here."]],
                         date=DECISIVE + timedelta(days=31))
    far = build_message("far@x", [["Filler words only here."]],
                        date=DECISIVE + timedelta(days=200))
    undated = build_message("none@x", [["Filler words only here."]], date=None)
    corpus = build_corpus([near, far, undated], [pep])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("near@x", 0)].bases["DFSC"] == 0.3
    assert scored[("far@x", 0)].bases["DFSC"] == 0.0
    assert scored[("none@x", 0)].bases["DFSC"] == 0.0


def test_day_distance_rounds_to_nearest_day():
    pep = build_pep()
    just_in = build_message("in@x", [["Filler."]],
                            date=DECISIVE + timedelta(days=7, hours=11))
    just_out = build_message("out@x", [["Filler."]],
                             date=DECISIVE + timedelta(days=7, hours=13))
    corpus = build_corpus([just_in, just_out], [pep])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("in@x", 0)].bases["DFSC"] == 0.9
    assert scored[("out@x", 0)].bases["DFSC"] == 0.6


def test_day_distance_zero_without_decisive_date():
    pep = build_pep(state="draft")
    pep.transitions = pep.transitions[:1]
    msg = build_message("m@x", [["Filler words only here."]])
    corpus = build_corpus([msg], [pep])
    scored = fit_scorer(corpus).transform(corpus)
    assert scored[0].bases["DFSC"] == 0.0


def test_sentence_location_base():
    msg = build_message("m@x", [["First para."], ["Middle para."],
                                ["Last para."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["SLIM"] == 0.9
    assert scored[("m@x", 1)].bases["SLIM"] == 0.0
    assert scored[("m@x", 2)].bases["SLIM"] == 0.9


def test_single_paragraph_is_both_first_and_last():
    msg = build_message("m@x", [["Only para."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = fit_scorer(corpus).transform(corpus)
    assert scored[0].bases["SLIM"] == 0.9


def test_negation_base_is_penalty():
    msg = build_message("m@x", [["This cannot work.", "This works."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["NT"] == -0.8
    assert scored[("m@x", 1)].bases["NT"] == 0.0


def test_message_type_base():
    pep = build_pep()
    rows = {}
    for mtype in ("pep_summary", "state_commit", "ordinary"):
        msg = build_message(f"{mtype}@x", [["Filler words only here."]],
                            message_type=mtype)
        corpus = build_corpus([msg], [pep])
        rows[mtype] = fit_scorer(corpus).transform(corpus)[0].bases["MT"]
    assert rows == {"pep_summary": 0.9, "state_commit": 0.9, "ordinary": 0.0}


def test_author_role_bases():
    pep = build_pep(authors=("Ada Author <ada@x>",),
                    delegate="Dana Delegate <dana@x>")
    roster = Roster(bdfl=["Bea Decider <bea@x>"],
                    core_developers=["Cory Core <cory@x>"],
                    pep_editors=["Eddy Editor <eddy@x>"])
    authors = {
        "bea@x": 0.9, "dana@x": 0.9, "ada@x": 0.6,
        "eddy@x": 0.5, "cory@x": 0.4, "zoe@x": 0.0,
    }
    messages = [
        build_message(f"{email}", [["Filler words only here."]],
                      author=f"Someone <{email}>")
        for email in authors
    ]
    corpus = build_corpus(messages, [pep])
    scored = by_key(fit_scorer(corpus, roster=roster).transform(corpus))
    for email, expected in authors.items():
        assert scored[(email, 0)].bases["AR"] == expected


def test_author_role_scores_overridable():
    pep = build_pep()
    roster = Roster(core_developers=["Cory Core <cory@x>"])
    msg = build_message("m@x", [["Filler."]], author="Cory Core <cory@x>")
    corpus = build_corpus([msg], [pep])
    scored = fit_scorer(corpus, roster=roster,
                        role_scores={"core_developer": 0.7}).transform(corpus)
    assert scored[0].bases["AR"] == 0.7


def test_message_class_base_is_message_level_and_role_gated():
    pep = build_pep(authors=("Ada Author <ada@x>",))
    request = build_message(
        "req@x",
        [["PEP 900 is ready for pronouncement."], ["Extra paragraph here."]],
        author="Ada Author <ada@x>")
    outsider = build_message(
        "out@x", [["PEP 900 is ready for pronouncement."]],
        author="Zoe Else <zoe@x>")
    corpus = build_corpus([request, outsider], [pep])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("req@x", 0)].bases["SAMCER"] == 0.9
    assert scored[("req@x", 1)].bases["SAMCER"] == 0.9
    assert scored[("out@x", 0)].bases["SAMCER"] == 0.0


def test_shared_request_subject_base():
    pep = build_pep(authors=("Ada Author <ada@x>",))
    before = build_message("before@x", [["Early chatter."]],
                           subject="PEP 900: request",
                           date=DECISIVE - timedelta(days=3))
    request = build_message("req@x",
                            [["PEP 900 is ready for pronouncement."]],
                            author="Ada Author <ada@x>",
                            subject="PEP 900: request",
                            date=DECISIVE - timedelta(days=2))
    reply = build_message("reply@x", [["Sounds fine to me."]],
                          subject="Re: PEP 900: request",
                          date=DECISIVE - timedelta(days=1))
    same_moment = build_message("tie@x", [["Simultaneous reply."]],
                                subject="Re: PEP 900: request",
                                date=DECISIVE - timedelta(days=2))
    unrelated = build_message("other@x", [["Different thread."]],
                              subject="PEP 900: other matters",
                              date=DECISIVE - timedelta(days=1))
    corpus = build_corpus([before, request, reply, same_moment, unrelated],
                          [pep])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("before@x", 0)].bases["RMSSCM"] == 0.0
    assert scored[("req@x", 0)].bases["RMSSCM"] == 0.0
    assert scored[("reply@x", 0)].bases["RMSSCM"] == 0.4
    assert scored[("tie@x", 0)].bases["RMSSCM"] == 0.0
    assert scored[("other@x", 0)].bases["RMSSCM"] == 0.0


def test_decision_triple_base():
    msg = build_message("m@x", [["The majority was clear.",
                                 "The cat sat down."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["RFUTE"] == 0.9
    assert scored[("m@x", 0)].bases["TPCS"] == 0.0
    assert scored[("m@x", 1)].bases["RFUTE"] == 0.0


def test_heading_term_in_sentence_base():
    msg = build_message("m@x", [["The BDFL Pronouncement follows.",
                                 "Nothing else."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["DTIM"] == 0.9
    assert scored[("m@x", 1)].bases["DTIM"] == 0.0


def test_heading_term_in_paragraph_header_base():
    msg = build_message("m@x", [["Under the heading."], ["Elsewhere."]],
                        headers={0: "BDFL Pronouncement"})
    plain = build_message("p@x", [["Under a plain heading."]],
                          headers={0: "Motivation"})
    corpus = build_corpus([msg, plain], [build_pep()])
    scored = by_key(fit_scorer(corpus).transform(corpus))
    assert scored[("m@x", 0)].bases["DTHP"] == 0.9
    assert scored[("m@x", 1)].bases["DTHP"] == 0.0
    assert scored[("p@x", 0)].bases["DTHP"] == 0.0


# --- scorer-level configuration --------------------------------------------------

def test_default_sweep_delta_applied_to_active_components():
    msg = build_message("m@x", [["Filler words only here."]])
    corpus = build_corpus([msg], [build_pep()])
    scorer = HeuristicScorer().fit(corpus)
    assert scorer.sweep_delta_ == DEFAULT_SWEEP_DELTA
    s = scorer.transform(corpus)[0]
    assert s.bases["DFSC"] == 0.9
    assert s.vector.components["DFSC"] == pytest.approx(1.5)
    # subject "PEP 900: topic" yields no subject pattern, so no TPMS boost
    assert s.vector.components["TPMS"] == 0.0


def test_disabled_heuristic_zeroed_but_base_recorded():
    msg = build_message("m@x", [["The majority was clear."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = fit_scorer(corpus, disabled={"RFUTE"}).transform(corpus)
    assert scored[0].bases["RFUTE"] == 0.9
    assert scored[0].vector.components["RFUTE"] == 0.0


def test_fit_rejects_unknown_configuration():
    corpus = build_corpus([], [])
    with pytest.raises(ValueError):
        HeuristicScorer(sweep_delta={"NOPE": 0.3}).fit(corpus)
    with pytest.raises(ValueError):
        HeuristicScorer(role_scores={"emperor": 1.0}).fit(corpus)
    with pytest.raises(ValueError):
        HeuristicScorer(disabled={"NOPE"}).fit(corpus)


def test_transform_requires_fit():
    with pytest.raises(RuntimeError):
        HeuristicScorer().transform(build_corpus([], []))


def test_fit_validates_corpus():
    naive = build_message("m@x", [["Filler."]],
                          date=DECISIVE.replace(tzinfo=None))
    corpus = build_corpus([naive], [build_pep()])
    with pytest.raises(InputValidationError):
        HeuristicScorer().fit(corpus)


def test_revector_matches_fresh_final_score_and_keeps_originals():
    msg = build_message("m@x", [["PEP 900 was accepted because it works.",
                                 "This cannot work."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = fit_scorer(corpus).transform(corpus)
    before = [s.fs for s in scored]
    re_scored = revector(scored, sweep_delta={"TPCS": 0.6},
                         disabled={"DFSC"})
    for orig, re_s in zip(scored, re_scored):
        assert re_s.vector == final_score(orig.bases, {"TPCS": 0.6},
                                          {"DFSC"})
        assert re_s.bases == orig.bases
    assert [s.fs for s in scored] == before


def test_clone_and_set_params_follow_sklearn_contract():
    scorer = HeuristicScorer(sweep_delta={"DFSC": 0.3}, dtim_base=0.5)
    params = scorer.get_params()
    assert params["sweep_delta"] == {"DFSC": 0.3}
    assert params["dtim_base"] == 0.5
    twin = clone(scorer)
    assert twin.get_params() == params
    twin.set_params(dtim_base=0.7)
    assert twin.get_params()["dtim_base"] == 0.7
    assert scorer.get_params()["dtim_base"] == 0.5

    msg = build_message("m@x", [["The BDFL Pronouncement follows."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = twin.set_params(sweep_delta={}).fit(corpus).transform(corpus)
    assert scored[0].vector.components["DTIM"] == 0.7


def test_parallel_transform_equals_sequential():
    peps = [build_pep(900), build_pep(901, title="Another Fine Change")]
    messages = [
        build_message("a@x", [["PEP 900 was accepted because it works."]],
                      linked=(900,)),
        build_message("b@x", [["The majority was clear.", "More filler."]],
                      linked=(900, 901)),
        build_message("c@x", [["This cannot work.", "Consensus is reached."]],
                      linked=(901,), date=DECISIVE + timedelta(days=40)),
    ]
    corpus = build_corpus(messages, peps)
    sequential = HeuristicScorer().fit(corpus).transform(corpus)
    parallel = HeuristicScorer(n_jobs=2).fit(corpus).transform(corpus)
    assert parallel == sequential


def test_transform_is_deterministic_and_ordered():
    peps = [build_pep(900), build_pep(901, title="Another Fine Change")]
    late = build_message("late@x", [["Filler."]], linked=(900,),
                         date=DECISIVE + timedelta(days=2))
    early = build_message("early@x", [["Filler.", "More filler."]],
                          linked=(900, 901), date=DECISIVE - timedelta(days=2))
    corpus = build_corpus([late, early], peps)
    scored = fit_scorer(corpus).transform(corpus)
    assert scored == fit_scorer(corpus).transform(corpus)
    order = [(s.pep, s.message_id, s.sentence_index) for s in scored]
    assert order == [
        (900, "early@x", 0), (900, "early@x", 1), (900, "late@x", 0),
        (901, "early@x", 0), (901, "early@x", 1),
    ]
    grouped = group_by_pep(scored)
    assert sorted(grouped) == [900, 901]
    assert len(grouped[900]) == 3


def test_score_corpus_convenience():
    msg = build_message("m@x", [["The BDFL Pronouncement follows."]])
    corpus = build_corpus([msg], [build_pep()])
    scored = score_corpus(corpus, sweep_delta={}, dtim_base=0.5)
    assert scored[0].vector.components["DTIM"] == 0.5


def test_max_possible_fs_bounds_all_scores():
    corpus = build_corpus([], [])
    scorer = HeuristicScorer().fit(corpus)
    assert scorer.max_possible_fs() == pytest.approx(11.5)

    msg = build_message("m@x", [["PEP 900 was accepted because it works."]],
                        subject="PEP 900 accepted by consensus",
                        message_type="pep_summary")
    full = build_corpus([msg], [build_pep()])
    scored = HeuristicScorer().fit(full).transform(full)
    assert all(s.fs <= scorer.max_possible_fs() + 1e-9 for s in scored)


def test_sweep_constants_are_consistent():
    assert set(DEFAULT_SWEEP_DELTA) <= SWEEP_ELIGIBLE
    assert set(DEFAULT_ROLE_SCORES) == {
        "bdfl", "bdfl_delegate", "pep_author", "pep_editor",
        "core_developer", "other"}
    assert all(d in SWEEP_GRID for d in DEFAULT_SWEEP_DELTA.values())
    assert len(HEURISTIC_IDS) == 13
