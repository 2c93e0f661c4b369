from __future__ import annotations

import pytest

from xweak_exporter.preprocess import clean_text, tokenize


class TestCleanText:
    def test_all_three_steps_on_the_canonical_line(self):
        assert tokenize(clean_text("@user http://x.co hello")) == ["hello"]

    def test_mentions_survive_when_disabled(self):
        got = tokenize(clean_text("@user hello", strip_mentions=False))
        assert got == ["user", "hello"]

    def test_mention_must_start_the_token(self):
        assert clean_text("write mail@host.com now") == "write mail@host.com now"

    @pytest.mark.parametrize(
        "text",
        [
            "see https://example.com/a?b=c here",
            "see http://t.co/xyz here",
            "see www.example.com here",
        ],
    )
    def test_link_forms(self, text):
        assert clean_text(text) == "see here"

    def test_links_survive_when_disabled(self):
        assert "www.x.com" in clean_text("go www.x.com", strip_links=False)

    def test_plain_emoji_removed(self):
        assert clean_text("nice \U0001F600 day ☀️") == "nice day"

    def test_emoji_inside_a_word_splits_it(self):
        assert tokenize(clean_text("so\U0001F600so")) == ["so", "so"]
        assert tokenize(clean_text("so\U0001F600so", strip_emoji=False)) == ["so\U0001F600so"]

    def test_flag_sequence_and_joined_family_removed(self):
        flag = "\U0001F1FA\U0001F1F8"
        family = "\U0001F468‍\U0001F469‍\U0001F467"
        assert clean_text(f"go {flag} team {family}") == "go team"

    def test_whitespace_collapses(self):
        assert clean_text("a   b\t\tc") == "a b c"


class TestTokenizerContract:
    BATTERY = [
        "Hello, WORLD!!",
        "b*tch",
        "#MKR is on",
        "a-b_c 2nd time",
        "!!! ???",
        "café au lait",
        "tabs\tand   runs of spaces",
        "",
        "trailing... dots... everywhere...",
        "'quoted' (parens) [brackets]",
    ]

    def test_matches_the_pipeline_tokenizer(self):
        # The engine package is an independent implementation of the same
        # documented contract; both must agree on every input.
        from xweak.corpus import tokenize as pipeline_tokenize

        for text in self.BATTERY:
            assert tokenize(text) == pipeline_tokenize(text), text

    def test_interior_punctuation_survives(self):
        assert tokenize("b*tch") == ["b*tch"]
        assert tokenize("#mkr") == ["mkr"]

    def test_joining_tokens_is_a_fixed_point(self):
        for text in self.BATTERY:
            tokens = tokenize(text)
            assert tokenize(" ".join(tokens)) == tokens
