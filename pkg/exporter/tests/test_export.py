from __future__ import annotations

import numpy as np
import pytest
import torch
from transformers import AutoModel, AutoTokenizer

from conftest import write_corpus
from xweak_exporter.errors import ValidationError
from xweak_exporter.export import ExportJob, export_file


def run_export(checkpoint, tmp_path, rows, tag="out", **job_kwargs):
    raw = tmp_path / f"{tag}_raw.tsv"
    write_corpus(raw, rows)
    corpus_out = tmp_path / f"{tag}_corpus.tsv"
    index_out = tmp_path / f"{tag}_emb"
    report = export_file(raw, ExportJob(checkpoint, **job_kwargs), corpus_out, index_out)
    return report, corpus_out, index_out


class TestExport:
    def test_one_vector_per_token(self, checkpoint, tmp_path):
        report, corpus_out, index_out = run_export(
            checkpoint, tmp_path, [("d1", "A", "women women")]
        )
        assert report.documents == 1
        assert report.dim == 16
        lines = index_out.read_text().splitlines()
        assert lines[0] == "XWEAK-EMB v1 dim=16 count=1"
        assert lines[1] == "#d1 2"
        assert [l.split("\t")[0] for l in lines[2:]] == ["women", "women"]
        blob = (tmp_path / "out_emb.bin").read_bytes()
        assert len(blob) == 2 * 16 * 4

    def test_corpus_column_carries_kept_tokens(self, checkpoint, tmp_path):
        _, corpus_out, index_out = run_export(
            checkpoint, tmp_path, [("d1", "A", "@user So... HAPPY http://t.co/x")]
        )
        assert corpus_out.read_text() == "d1\tA\tso happy\n"
        tokens = [l.split("\t")[0] for l in index_out.read_text().splitlines()[2:]]
        assert tokens == ["so", "happy"]

    def test_reexport_is_byte_identical(self, checkpoint, tmp_path):
        rows = [
            ("d1", "A", "women talk about islam"),
            ("d2", "-", "jewish girls say hello"),
        ]
        _, corpus_a, index_a = run_export(checkpoint, tmp_path, rows, tag="a")
        _, corpus_b, index_b = run_export(checkpoint, tmp_path, rows, tag="b")
        assert corpus_a.read_bytes() == corpus_b.read_bytes()
        assert index_a.read_text() == index_b.read_text()
        assert (tmp_path / "a_emb.bin").read_bytes() == (tmp_path / "b_emb.bin").read_bytes()

    def test_pooled_word_is_the_mean_of_its_subwords(self, checkpoint, tmp_path):
        _, _, index_out = run_export(checkpoint, tmp_path, [("d1", "A", "jewish women")])
        lines = index_out.read_text().splitlines()
        assert [l.split("\t")[0] for l in lines[2:]] == ["jewish", "women"]
        blob = (tmp_path / "out_emb.bin").read_bytes()
        got = np.frombuffer(blob, dtype="<f4").reshape(2, 16)

        tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        model = AutoModel.from_pretrained(checkpoint).eval()
        enc = tokenizer(
            [["jewish", "women"]],
            is_split_into_words=True,
            truncation=True,
            max_length=64,
            padding=True,
            return_tensors="pt",
        )
        assert enc.word_ids(0) == [None, 0, 0, 1, None]  # jewish = jew + ##ish
        with torch.no_grad():
            states = model(**enc).last_hidden_state[0].numpy()
        expected = np.stack([(states[1] + states[2]) / 2.0, states[3]])
        assert np.allclose(got, expected, rtol=1e-5, atol=1e-7)

    def test_truncation_drops_tail_words_from_both_files(self, checkpoint, tmp_path):
        words = "women girls she her good day nice happy love talk".split()
        report, corpus_out, index_out = run_export(
            checkpoint, tmp_path, [("d1", "A", " ".join(words))], max_len=8
        )
        # Eight slots minus the two sentence markers leaves six words.
        kept = words[:6]
        assert report.dropped_tokens == 4
        assert corpus_out.read_text() == f"d1\tA\t{' '.join(kept)}\n"
        tokens = [l.split("\t")[0] for l in index_out.read_text().splitlines()[2:]]
        assert tokens == kept

    def test_partially_truncated_word_is_kept(self, checkpoint, tmp_path):
        # max_len 4 fits [CLS] women jew [SEP]: "jewish" loses ##ish but stays.
        report, corpus_out, index_out = run_export(
            checkpoint, tmp_path, [("d1", "A", "women jewish")], max_len=4
        )
        assert report.dropped_tokens == 0
        assert corpus_out.read_text() == "d1\tA\twomen jewish\n"
        blob = (tmp_path / "out_emb.bin").read_bytes()
        assert len(blob) == 2 * 16 * 4

    def test_document_empty_after_cleanup_is_skipped(self, checkpoint, tmp_path):
        report, corpus_out, index_out = run_export(
            checkpoint,
            tmp_path,
            [("noise", "A", "@user http://t.co/x"), ("keep", "A", "hello")],
        )
        assert report.documents == 1
        assert report.skipped == 1
        assert corpus_out.read_text() == "keep\tA\thello\n"
        assert index_out.read_text().splitlines()[0].endswith("count=1")

    def test_unknown_words_still_get_vectors(self, checkpoint, tmp_path):
        report, _, index_out = run_export(
            checkpoint, tmp_path, [("d1", "A", "zzyzx qwfp")]
        )
        assert report.documents == 1
        tokens = [l.split("\t")[0] for l in index_out.read_text().splitlines()[2:]]
        assert tokens == ["zzyzx", "qwfp"]

    def test_batch_size_does_not_move_vectors(self, checkpoint, tmp_path):
        rows = [(f"d{i}", "A", "women talk about islam and jewish girls") for i in range(5)]
        _, _, index_small = run_export(checkpoint, tmp_path, rows, tag="small", batch_size=2)
        _, _, index_big = run_export(checkpoint, tmp_path, rows, tag="big", batch_size=64)
        assert index_small.read_text() == index_big.read_text()
        small = np.frombuffer((tmp_path / "small_emb.bin").read_bytes(), dtype="<f4")
        big = np.frombuffer((tmp_path / "big_emb.bin").read_bytes(), dtype="<f4")
        assert np.allclose(small, big, rtol=1e-5, atol=1e-6)

    def test_pool_layer_changes_the_vectors(self, checkpoint, tmp_path):
        rows = [("d1", "A", "hello women")]
        run_export(checkpoint, tmp_path, rows, tag="last")
        run_export(checkpoint, tmp_path, rows, tag="first", pool_layer=0)
        last = (tmp_path / "last_emb.bin").read_bytes()
        first = (tmp_path / "first_emb.bin").read_bytes()
        assert last != first


class TestJobValidation:
    @pytest.mark.parametrize("kwargs", [{"max_len": 2}, {"max_len": 0}, {"batch_size": 0}])
    def test_bad_settings_are_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            ExportJob("anywhere", **kwargs)

    def test_pool_layer_out_of_range(self, checkpoint, tmp_path):
        with pytest.raises(ValidationError, match="pool_layer"):
            run_export(checkpoint, tmp_path, [("d1", "A", "hello")], pool_layer=3)

    def test_duplicate_document_id_is_rejected(self, checkpoint, tmp_path):
        with pytest.raises(ValidationError, match="duplicate"):
            run_export(
                checkpoint, tmp_path, [("d1", "A", "hello"), ("d1", "B", "hello")]
            )
