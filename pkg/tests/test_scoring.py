import itertools
import random

import numpy as np
import pytest

from heterolabel.alignment import viterbi_align
from heterolabel.errors import EmptySpan, NoHeteronym, TooManyCandidates
from heterolabel.io import EncodingTable
from heterolabel.lexicon import parse_heteronym_inventory, prepare_sentence
from heterolabel.scoring import (CandidateScore, confidence, generate_candidates,
                                 score_candidates, score_distance, select,
                                 select_form, word_avg_distance)
from heterolabel.synth import SynthSentence, SynthSpec, gen_synthetic
from oracles import span_average


class TestGenerate:
    def test_one_slot(self, lexicon, inventory):
        seq = prepare_sentence("easier to read", lexicon, inventory)
        cands = generate_candidates(seq, inventory)
        assert [c.candidate_id for c in cands] == ["read_present", "read_past"]
        assert cands[0].tokens[-3:] == ("ɹ", "i", "d")
        assert cands[1].tokens[-3:] == ("ɹ", "ɛ", "d")
        assert cands[0].slot_spans == ((6, 9),)

    def test_cross_product(self, lexicon):
        inv = parse_heteronym_inventory(
            "read\tp\tɹ i d\nread\tq\tɹ ɛ d\nbow\tx\tb oʊ\nbow\ty\tb aʊ\nbow\tz\tb ɔ\n")
        seq = prepare_sentence("read the bow", lexicon, inv)
        cands = generate_candidates(seq, inv)
        assert len(cands) == 6
        assert [c.slot_forms for c in cands] == list(itertools.product("pq", "xyz"))
        for c in cands:
            (a0, a1), (b0, b1) = c.slot_spans
            assert 0 <= a0 < a1 <= b0 < b1 <= len(c.tokens)

    def test_no_slot(self, lexicon, inventory):
        with pytest.raises(NoHeteronym):
            generate_candidates(prepare_sentence("the cat", lexicon, inventory), inventory)

    def test_cap(self, lexicon, inventory):
        seq = prepare_sentence("read lead live wind bass close tear", lexicon, inventory)
        with pytest.raises(TooManyCandidates):
            generate_candidates(seq, inventory)
        assert len(generate_candidates(seq, inventory, cap=128)) == 128


class TestWordAvgDistance:
    def test_single_term(self):
        assert word_avg_distance(np.array([[5.0]]), np.array([0]), (0, 1)) == 5.0

    def test_two_tokens(self):
        dist = np.array([[1.0, 3.0, 9.0], [9.0, 9.0, 2.0]])
        got = word_avg_distance(dist, np.array([0, 0, 1]), (0, 2))
        assert got == span_average([[1.0, 3.0], [2.0]]) == 2.0

    def test_zero(self):
        assert word_avg_distance(np.zeros((2, 4)), np.array([0, 0, 1, 1]), (0, 2)) == 0.0

    def test_only_span_frames(self):
        dist = np.array([[4.0, 4.0, 9.0], [1.0, 1.0, 7.0]])
        assert word_avg_distance(dist, np.array([0, 0, 1]), (1, 2)) == 7.0

    def test_empty(self):
        with pytest.raises(EmptySpan):
            word_avg_distance(np.zeros((2, 2)), np.array([0, 1]), (1, 1))


class TestSelect:
    def test_worked_example(self):
        chosen, conf = select_form({"read_past": 452.9, "read_present": 403.3})
        assert chosen == "read_present"
        assert conf == pytest.approx(0.116, abs=5e-4)

    def test_tie(self):
        assert select_form({"a": 7.0, "b": 7.0}) == ("a", 0.0)

    def test_three_forms(self):
        assert select_form({"a": 10.0, "b": 20.0, "c": 30.0}) == ("a", 1.0)

    def test_tied_minimum_with_spread(self):
        assert select_form({"a": 9.0, "b": 7.0, "c": 7.0}) == ("b", 0.0)

    def test_confidence_bounds(self):
        assert confidence([0.0, 0.0]) == 0.0
        assert confidence([0.0, 5.0]) == 2.0
        rng = random.Random(4)
        for _ in range(1000):
            vals = [rng.uniform(0, 100) for _ in range(rng.randint(2, 5))]
            assert 0.0 <= confidence(vals) <= 2.0

    def test_marginals_and_permutation(self, lexicon):
        inv = parse_heteronym_inventory("read\tp\tɹ i d\nread\tq\tɹ ɛ d\n"
                                        "bow\tx\tb oʊ\nbow\ty\tb aʊ\n")
        cands = generate_candidates(prepare_sentence("read bow", lexicon, inv), inv)
        values = {"p+x": (1.0, 5.0), "p+y": (2.0, 4.0), "q+x": (3.0, 6.0), "q+y": (0.5, 8.0)}
        scores = [CandidateScore(c.candidate_id, values[c.candidate_id]) for c in cands]
        res = select(scores, cands, inv, "s1", (0, 1))
        assert res.slots[0].scores == {"p": 1.0, "q": 0.5}
        assert res.slots[0].chosen == "q"
        assert res.slots[1].scores == {"x": 5.0, "y": 4.0}
        assert res.slots[1].chosen == "y"
        for perm in itertools.permutations(range(4)):
            assert select([scores[i] for i in perm], [cands[i] for i in perm], inv,
                          "s1", (0, 1)) == res

    def test_single_slot_equals_whole_candidate_min(self, lexicon, inventory):
        rng = random.Random(9)
        cands = generate_candidates(prepare_sentence("the lead", lexicon, inventory), inventory)
        for _ in range(100):
            scores = [CandidateScore(c.candidate_id, (rng.uniform(0, 10),)) for c in cands]
            best = min(scores, key=lambda s: s.total)
            assert select(scores, cands, inventory).slots[0].chosen == best.candidate_id


class TestScoreCandidates:
    def test_duplicate_forms_equal(self, lexicon):
        inv = parse_heteronym_inventory("read\ta\tɹ i d\nread\tb\tɹ i d\n")
        cands = generate_candidates(prepare_sentence("read", lexicon, inv), inv)
        rng = np.random.default_rng(0)
        table = EncodingTable(4, {s: rng.normal(size=4).astype(np.float32) for s in "ɹid"})
        frames = rng.normal(size=(7, 4)).astype(np.float32)
        a, b = score_candidates(cands, frames, table)
        assert a.slot_d_avg == b.slot_d_avg

    def test_planted_form_wins(self, lexicon, inventory):
        spec = SynthSpec(dim=8, frames_per_token=2, noise=0.0, seed=3,
                         sentences=(SynthSentence("She will read the book.", ("read_past",)),))
        corpus = gen_synthetic(spec, inventory, lexicon)
        rid = corpus.records[0].id
        seq = prepare_sentence(corpus.records[0].text, lexicon, inventory)
        cands = generate_candidates(seq, inventory)
        scores = score_candidates(cands, corpus.frames[rid], corpus.table)
        by_id = {s.candidate_id: s.slot_d_avg[0] for s in scores}
        assert by_id["read_past"] == 0.0
        assert by_id["read_present"] > 0.0

    def test_score_distance_keeps_alignment(self, lexicon, inventory):
        cand = generate_candidates(prepare_sentence("read", lexicon, inventory), inventory)[0]
        dist = np.random.default_rng(1).random((3, 7))
        s = score_distance(cand, dist)
        assert s.alignment.tolist() == viterbi_align(dist).tolist()
