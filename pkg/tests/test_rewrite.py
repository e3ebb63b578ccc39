import json

import pytest

from convsearch.errors import CorpusFormatError, EmptyQueryError, ParameterError
from convsearch.rewrite import (
    FusionWeights,
    Turn,
    compose_weighted_query,
    extract_topic_phrase,
    load_topics,
    resolve_references,
)
from convsearch.textproc import TextprocConfig, default_abbreviations, default_stopwords


@pytest.fixture(scope="module")
def full_config():
    return TextprocConfig(
        stem=True,
        stopwords=default_stopwords(),
        abbreviations=default_abbreviations(),
    )


HISTORY = [Turn("1", 1, "What is a physician's assistant?")]
TOPIC = "physician's assistant"


class TestTopicPhrase:
    def test_strips_interrogative_scaffolding(self):
        assert extract_topic_phrase("What is a physician's assistant?") == TOPIC

    def test_no_scaffolding_keeps_whole_question(self):
        assert extract_topic_phrase("Career choices?") == "career choices"

    def test_degenerate_question_falls_back_to_itself(self):
        assert extract_topic_phrase("What is?") == "what is"

    def test_longest_prefix_wins(self):
        # "what is a" must strip before "what is" gets a chance.
        assert extract_topic_phrase("What is a cat?") == "cat"
        assert extract_topic_phrase("What is photosynthesis?") == "photosynthesis"

    def test_tell_me_about(self):
        assert extract_topic_phrase("Tell me about maple syrup") == "maple syrup"


class TestResolve:
    def test_first_turn_is_left_alone(self):
        assert resolve_references("What is it?", [], TOPIC) == "What is it?"

    def test_pronoun_replaced_by_topic_phrase(self):
        got = resolve_references("What does it cost?", HISTORY, TOPIC)
        assert got == "What does physician's assistant cost?"

    def test_become_one_form(self):
        got = resolve_references(
            "What are the educational requirements required to become one?",
            HISTORY,
            TOPIC,
        )
        assert got == (
            "What are the educational requirements required to become"
            " physician's assistant?"
        )

    @pytest.mark.parametrize("verb", ["become", "becoming", "be"])
    def test_all_become_verbs(self, verb):
        got = resolve_references(f"Is {verb} one hard?", HISTORY, TOPIC)
        assert f"{verb} physician's assistant" in got

    def test_numeric_one_is_not_a_pronoun(self):
        got = resolve_references("How much does one cost?", HISTORY, TOPIC)
        assert got == "How much does one cost?"

    def test_replacement_is_case_insensitive_and_global(self):
        got = resolve_references("It does what THEY say it does.", HISTORY, "a pa")
        assert got == "a pa does what a pa say a pa does."

    def test_contractions_and_substrings_survive(self):
        assert resolve_references("What's it's range? Item?", HISTORY, TOPIC) == (
            "What's it's range? Item?"
        )
        assert resolve_references("A thistle hit him.", HISTORY, "x") == "A thistle hit x."


class TestCompose:
    def test_third_turn_worked_example(self, full_config):
        bag = compose_weighted_query(
            current="What does it cost?",
            first="What is a physician's assistant?",
            previous="What are the educational requirements for a physician's assistant?",
            weights=FusionWeights(),
            config=full_config,
        )
        assert dict(bag.terms) == {
            "cost": 5.0,
            "physician": 4.25,
            "assist": 4.25,
            "educ": 1.0,
            "requir": 1.0,
        }

    def test_same_text_in_all_three_sources_sums(self, full_config):
        bag = compose_weighted_query(
            "cat", "cat", "cat", FusionWeights(1.0, 1.0, 1.0), full_config
        )
        assert bag.terms == [("cat", 3.0)]

    def test_second_turn_passes_no_previous(self, full_config):
        bag = compose_weighted_query(
            current="What does it cost?",
            first="What is a physician's assistant?",
            previous=None,
            weights=FusionWeights(),
            config=full_config,
        )
        assert dict(bag.terms) == {"cost": 5.0, "physician": 3.25, "assist": 3.25}

    def test_zero_weight_drops_source(self, full_config):
        bag = compose_weighted_query(
            current="What does it cost?",
            first="What is a physician's assistant?",
            previous="educational requirements",
            weights=FusionWeights(1.0, 0.0, 0.0),
            config=full_config,
        )
        assert bag.terms == [("cost", 1.0)]

    def test_doubling_weights_doubles_every_term(self, full_config):
        args = dict(
            current="What does it cost?",
            first="What is a physician's assistant?",
            previous="What are the educational requirements for a physician's assistant?",
            config=full_config,
        )
        single = compose_weighted_query(weights=FusionWeights(5.0, 3.25, 1.0), **args)
        double = compose_weighted_query(weights=FusionWeights(10.0, 6.5, 2.0), **args)
        assert [(t, 2.0 * w) for t, w in single.terms] == double.terms

    def test_empty_current_raises(self, full_config):
        with pytest.raises(EmptyQueryError):
            compose_weighted_query(
                "What is?", "What is a cat?", None, FusionWeights(), full_config
            )

    def test_empty_context_sources_are_fine(self, full_config):
        bag = compose_weighted_query("cost", None, None, FusionWeights(), full_config)
        assert bag.terms == [("cost", 5.0)]


class TestFusionWeights:
    def test_defaults_keep_published_ratio(self):
        w = FusionWeights()
        assert w.w_first / w.w_previous == 3.25

    def test_parse(self):
        assert FusionWeights.parse("5.0,3.25,1.0") == FusionWeights(5.0, 3.25, 1.0)
        assert FusionWeights.parse("1,0,0") == FusionWeights(1.0, 0.0, 0.0)

    @pytest.mark.parametrize("text", ["1,2", "1,2,3,4", "a,b,c", ""])
    def test_parse_rejects_malformed(self, text):
        with pytest.raises(ParameterError):
            FusionWeights.parse(text)

    def test_validate_rejects_zero_current_and_negatives(self):
        with pytest.raises(ParameterError):
            FusionWeights(0.0, 1.0, 1.0).validate()
        with pytest.raises(ParameterError):
            FusionWeights(1.0, -0.5, 0.0).validate()

    def test_validate_warns_on_odd_ordering(self):
        with pytest.warns(UserWarning):
            FusionWeights(1.0, 3.25, 1.0).validate()


class TestLoadTopics:
    def write(self, tmp_path, payload):
        path = tmp_path / "topics.json"
        path.write_text(json.dumps(payload))
        return path

    def test_round_trip(self, tmp_path):
        path = self.write(
            tmp_path,
            [
                {
                    "number": 31,
                    "title": "physician's assistant",
                    "description": "career info",
                    "turn": [
                        {"number": 2, "raw_utterance": "What does it cost?"},
                        {"number": 1, "raw_utterance": "What is a physician's assistant?"},
                    ],
                }
            ],
        )
        topics = load_topics(path)
        assert len(topics) == 1
        topic = topics[0]
        assert topic.topic_id == "31"
        assert topic.title == "physician's assistant"
        # Turns come back sorted by turn number regardless of file order.
        assert [t.turn_number for t in topic.turns] == [1, 2]
        assert topic.turns[0].raw_utterance == "What is a physician's assistant?"
        assert topic.turns[0].topic_id == "31"

    def test_rejects_gap_in_turn_numbers(self, tmp_path):
        path = self.write(
            tmp_path,
            [
                {
                    "number": 1,
                    "turn": [
                        {"number": 1, "raw_utterance": "a?"},
                        {"number": 3, "raw_utterance": "b?"},
                    ],
                }
            ],
        )
        with pytest.raises(CorpusFormatError):
            load_topics(path)

    def test_rejects_topic_without_turns(self, tmp_path):
        path = self.write(tmp_path, [{"number": 1, "turn": []}])
        with pytest.raises(CorpusFormatError):
            load_topics(path)

    def test_rejects_non_array_and_bad_json(self, tmp_path):
        path = self.write(tmp_path, {"number": 1})
        with pytest.raises(CorpusFormatError):
            load_topics(path)
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        with pytest.raises(CorpusFormatError):
            load_topics(bad)
