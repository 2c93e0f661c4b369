from __future__ import annotations

import random

import pytest

from xweak.corpus import (
    Corpus,
    Document,
    Taxonomy,
    load_corpus,
    load_taxonomy,
    save_corpus,
    save_taxonomy,
    tokenize,
)
from xweak.errors import ValidationError


class TestTokenize:
    def test_casefold_and_punctuation_strip(self):
        assert tokenize("Women, women!") == ["women", "women"]

    def test_empty_string(self):
        assert tokenize("") == []

    def test_interior_characters_survive_edge_strip(self):
        assert tokenize("b*tch #mkr") == ["b*tch", "mkr"]

    def test_whitespace_only(self):
        assert tokenize(" \t  ") == []

    def test_piece_of_pure_punctuation_dropped(self):
        assert tokenize("hello !!! world") == ["hello", "world"]

    def test_digits_kept(self):
        assert tokenize("call 911 now") == ["call", "911", "now"]

    def test_idempotent_on_rejoined_output(self):
        rng = random.Random(7)
        alphabet = "abcXYZ0189 .,!*#@'\"-_\t"
        for _ in range(200):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 40)))
            once = tokenize(text)
            assert tokenize(" ".join(once)) == once


class TestCorpusFile:
    def test_three_records_parse(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\tA\tone fish\nd2\t-\ttwo fish\nd3\tB\tred fish\n", encoding="utf-8")
        corpus = load_corpus(path)
        assert len(corpus) == 3
        assert corpus.document("d1").tokens == ("one", "fish")
        assert corpus.document("d2").gold_label is None
        assert corpus.document("d3").gold_label == "B"
        assert corpus.dropped_empty == 0

    def test_tokenless_record_dropped_and_counted(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\tA\tkeep me\nd2\tA\t!!! ...\n", encoding="utf-8")
        corpus = load_corpus(path)
        assert len(corpus) == 1
        assert corpus.dropped_empty == 1
        assert "d2" not in corpus

    def test_duplicate_id_names_offender(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\tA\tfirst\nd1\tA\tsecond\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="d1"):
            load_corpus(path)

    def test_malformed_record_names_line(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("d1\tA\tfine\nonly-one-column\n", encoding="utf-8")
        with pytest.raises(ValidationError, match="line 2"):
            load_corpus(path)

    def test_save_load_round_trip(self, tmp_path):
        docs = tuple(
            Document(f"d{i}", f"text {i} here", ("text", str(i), "here"), "A" if i % 2 else None)
            for i in range(5)
        )
        corpus = Corpus(docs)
        path = tmp_path / "c.tsv"
        save_corpus(corpus, path)
        back = load_corpus(path)
        assert len(back) == len(corpus)
        for doc in docs:
            got = back.document(doc.doc_id)
            assert got.text == doc.text
            assert got.tokens == doc.tokens
            assert got.gold_label == doc.gold_label

    def test_save_rejects_embedded_newline(self, tmp_path):
        corpus = Corpus((Document("d1", "line\nbreak", ("line", "break"), None),))
        with pytest.raises(ValidationError):
            save_corpus(corpus, tmp_path / "c.tsv")


class TestTaxonomy:
    def test_default_seed_is_lowercased_name(self):
        tax = Taxonomy.from_names(["Racist", "Sexist"])
        assert tax.seeds_for("Racist") == ("racist",)
        assert tax.classes == ("Racist", "Sexist")

    def test_duplicate_class_rejected(self):
        with pytest.raises(ValidationError):
            Taxonomy.from_names(["A", "A"])

    def test_index_follows_declaration_order(self):
        tax = Taxonomy.from_names(["C", "A", "B"])
        assert tax.index_of("A") == 1

    def test_file_round_trip_with_multi_seeds(self, tmp_path):
        tax = Taxonomy.with_seeds([("LGBT", ["gay"]), ("Women", ["women", "woman"])])
        path = tmp_path / "t.tsv"
        save_taxonomy(tax, path)
        back = load_taxonomy(path)
        assert back.classes == tax.classes
        assert back.seeds_for("Women") == ("women", "woman")

    def test_single_column_line_gets_default_seed(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("Spam\nHam\tham,eggs\n", encoding="utf-8")
        tax = load_taxonomy(path)
        assert tax.seeds_for("Spam") == ("spam",)
        assert tax.seeds_for("Ham") == ("ham", "eggs")

    def test_unknown_class_lookup_fails(self):
        tax = Taxonomy.from_names(["A"])
        with pytest.raises(ValidationError):
            tax.seeds_for("B")
