"""Interoperability with the pipeline package.

The exporter's whole purpose is producing files the pipeline accepts
without complaint, so these tests load the output with the pipeline's own
readers and push it through the real `xweak` command-line chain in
subprocesses.
"""

from __future__ import annotations

import subprocess
import sys

import pytest

from conftest import write_corpus
from xweak_exporter.export import ExportJob, export_file
from xweak_exporter.finetune import FinetuneSettings, finetune_classifier

WOMEN_TEXTS = [
    "women talk about girls and her day",
    "she says hello to the women",
    "good women so happy about her talk",
    "girls love the day she talks",
    "women and girls talk so happy",
    "her good day with women hello",
]
JEWISH_TEXTS = [
    "jewish girls talk about the rabbi",
    "the jewish day was so nice",
    "happy jewish women near the rabbi",
    "rabbi talks about jewish love",
    "so nice the jewish talk today",
    "jewish happy day for the rabbi",
]


@pytest.fixture(scope="module")
def exported(checkpoint, tmp_path_factory):
    root = tmp_path_factory.mktemp("interop")
    rows = []
    for i, text in enumerate(WOMEN_TEXTS):
        rows.append((f"w{i}", "Women", f"@someone {text} http://t.co/x"))
    for i, text in enumerate(JEWISH_TEXTS):
        rows.append((f"j{i}", "Jewish", f"{text} \U0001F600"))
    write_corpus(root / "raw.tsv", rows)
    (root / "taxonomy.tsv").write_text("Women\twomen\nJewish\tjewish\n")
    report = export_file(
        root / "raw.tsv",
        ExportJob(checkpoint),
        root / "corpus.tsv",
        root / "embeddings",
    )
    assert report.documents == 12
    return root


def xweak(*argv: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "xweak.cli", *argv], capture_output=True, text=True
    )


class TestFormats:
    def test_pipeline_readers_accept_the_files(self, exported):
        from xweak.corpus import load_corpus
        from xweak.embedding_store import load_embeddings, validate_alignment

        corpus = load_corpus(exported / "corpus.tsv")
        embedded = load_embeddings(exported / "embeddings")
        assert len(corpus) == 12 and len(embedded) == 12
        validate_alignment(corpus, embedded)

    def test_token_streams_agree_with_the_pipeline_tokenizer(self, exported):
        from xweak.corpus import load_corpus
        from xweak.embedding_store import load_embeddings

        corpus = load_corpus(exported / "corpus.tsv")
        embedded = load_embeddings(exported / "embeddings")
        for doc in corpus:
            assert embedded.doc(doc.doc_id).tokens == doc.tokens

    def test_gold_labels_pass_through(self, exported):
        from xweak.corpus import load_corpus

        gold = load_corpus(exported / "corpus.tsv").gold_labels()
        assert gold["w0"] == "Women" and gold["j5"] == "Jewish"


class TestPipelineChain:
    def test_full_chain_runs_on_exported_files(self, exported):
        # A 16-wide random encoder carries no semantics, so cluster contents
        # are not asserted here; the contract under test is that every
        # command accepts the exported files. Training gets a handwritten
        # selection because the unsupervised one may starve a class.
        conf = exported / "run.conf"
        conf.write_text("min_freq = 1\npca_dim = 4\n")
        path = {
            name: str(exported / name)
            for name in (
                "corpus.tsv", "taxonomy.tsv", "embeddings", "vocab.tsv",
                "classes.tsv", "docs.tsv", "pseudo.tsv", "model.tsv", "pred.tsv",
            )
        }
        steps = [
            ("ingest", "--config", str(conf), "--corpus", path["corpus.tsv"],
             "--embeddings", path["embeddings"], "--out", path["vocab.tsv"]),
            ("expand", "--vocab", path["vocab.tsv"], "--taxonomy", path["taxonomy.tsv"],
             "--out", path["classes.tsv"]),
            ("represent", "--corpus", path["corpus.tsv"], "--embeddings", path["embeddings"],
             "--classes", path["classes.tsv"], "--out", path["docs.tsv"]),
            ("align", "--config", str(conf), "--docs", path["docs.tsv"],
             "--classes", path["classes.tsv"], "--out", path["pseudo.tsv"]),
        ]
        for name, *rest in steps:
            done = xweak(name, *rest)
            assert done.returncode == 0, f"{name}: {done.stderr}"
        assert len((exported / "pseudo.tsv").read_text().splitlines()) == 12

        rows = [(f"w{i}", "Women") for i in range(6)] + [(f"j{i}", "Jewish") for i in range(6)]
        (exported / "pseudo.tsv").write_text(
            "".join(f"{d}\t{c}\t{c}\t0.900000\t1\n" for d, c in rows)
        )
        tail = [
            ("train", "--docs", path["docs.tsv"], "--pseudo-labels", path["pseudo.tsv"],
             "--taxonomy", path["taxonomy.tsv"], "--out", path["model.tsv"]),
            ("predict", "--model", path["model.tsv"], "--docs", path["docs.tsv"],
             "--out", path["pred.tsv"]),
        ]
        for name, *rest in tail:
            done = xweak(name, *rest)
            assert done.returncode == 0, f"{name}: {done.stderr}"
        done = xweak(
            "eval",
            "--corpus", str(exported / "corpus.tsv"),
            "--taxonomy", str(exported / "taxonomy.tsv"),
            "--predictions", str(exported / "pred.tsv"),
        )
        assert done.returncode == 0, done.stderr
        assert "accuracy=" in done.stdout

    def test_finetuned_predictions_feed_the_eval_command(self, checkpoint, exported):
        pseudo = exported / "hand_pseudo.tsv"
        rows = [(f"w{i}", "Women") for i in range(3)] + [(f"j{i}", "Jewish") for i in range(3)]
        pseudo.write_text(
            "".join(f"{d}\t{c}\t{c}\t0.900000\t1\n" for d, c in rows)
        )
        out = exported / "finetuned_pred.tsv"
        finetune_classifier(
            checkpoint,
            exported / "corpus.tsv",
            exported / "taxonomy.tsv",
            pseudo,
            out,
            FinetuneSettings(epochs=0),
        )
        done = xweak(
            "eval",
            "--corpus", str(exported / "corpus.tsv"),
            "--taxonomy", str(exported / "taxonomy.tsv"),
            "--predictions", str(out),
        )
        assert done.returncode == 0, done.stderr
        assert "macro_f1=" in done.stdout
