from __future__ import annotations

import pytest

from conftest import write_corpus
from xweak_exporter.errors import ValidationError
from xweak_exporter.finetune import FinetuneSettings, finetune_classifier

WOMEN = ["women talk about girls", "she says hello her day", "good women so happy"]
JEWISH = ["jewish girls talk about rabbi", "the jewish day so nice", "happy jewish women hello"]


@pytest.fixture
def workdir(tmp_path):
    rows = []
    for i, text in enumerate(WOMEN):
        rows.append((f"w{i}", "Women", text))
    for i, text in enumerate(JEWISH):
        rows.append((f"j{i}", "Jewish", text))
    write_corpus(tmp_path / "corpus.tsv", rows)
    (tmp_path / "taxonomy.tsv").write_text("Women\twomen\nJewish\tjewish\n")
    pseudo = [
        ("w0", "Women", "Women", "0.900000", "1"),
        ("w1", "Women", "Women", "0.800000", "1"),
        ("w2", "Women", "Jewish", "0.500000", "0"),
        ("j0", "Jewish", "Jewish", "0.950000", "1"),
        ("j1", "Jewish", "Jewish", "0.700000", "1"),
        ("j2", "Jewish", "Women", "0.500000", "0"),
    ]
    (tmp_path / "pseudo.tsv").write_text(
        "".join("\t".join(row) + "\n" for row in pseudo)
    )
    return tmp_path


def read_pairs(path):
    return [tuple(line.split("\t")) for line in path.read_text().splitlines()]


class TestUnadaptedHead:
    def test_epochs_zero_emits_a_valid_file(self, checkpoint, workdir):
        out = workdir / "pred.tsv"
        report = finetune_classifier(
            checkpoint,
            workdir / "corpus.tsv",
            workdir / "taxonomy.tsv",
            workdir / "pseudo.tsv",
            out,
            FinetuneSettings(epochs=0),
        )
        assert report.steps == 0
        assert report.final_loss is None
        assert report.trained_on == 4
        pairs = read_pairs(out)
        assert [doc_id for doc_id, _ in pairs] == ["w0", "w1", "w2", "j0", "j1", "j2"]
        assert all(label in ("Women", "Jewish") for _, label in pairs)

    def test_same_seed_same_predictions(self, checkpoint, workdir):
        args = (
            checkpoint,
            workdir / "corpus.tsv",
            workdir / "taxonomy.tsv",
            workdir / "pseudo.tsv",
        )
        finetune_classifier(*args, workdir / "a.tsv", FinetuneSettings(epochs=0, seed=5))
        finetune_classifier(*args, workdir / "b.tsv", FinetuneSettings(epochs=0, seed=5))
        assert (workdir / "a.tsv").read_bytes() == (workdir / "b.tsv").read_bytes()


class TestTraining:
    def test_one_epoch_runs_and_counts_steps(self, checkpoint, workdir):
        out = workdir / "pred.tsv"
        report = finetune_classifier(
            checkpoint,
            workdir / "corpus.tsv",
            workdir / "taxonomy.tsv",
            workdir / "pseudo.tsv",
            out,
            FinetuneSettings(epochs=1, batch_size=2),
        )
        # 4 selected documents in batches of 2.
        assert report.steps == 2
        assert report.final_loss is not None
        assert len(read_pairs(out)) == 6

    def test_fits_the_pseudo_labels_given_enough_epochs(self, checkpoint, workdir):
        out = workdir / "pred.tsv"
        finetune_classifier(
            checkpoint,
            workdir / "corpus.tsv",
            workdir / "taxonomy.tsv",
            workdir / "pseudo.tsv",
            out,
            FinetuneSettings(epochs=30, batch_size=4, learning_rate=5e-3),
        )
        got = dict(read_pairs(out))
        assert got["w0"] == "Women" and got["w1"] == "Women"
        assert got["j0"] == "Jewish" and got["j1"] == "Jewish"


class TestInputValidation:
    def test_missing_class_is_an_error(self, checkpoint, workdir):
        (workdir / "pseudo.tsv").write_text("w0\tWomen\tWomen\t0.900000\t1\n")
        with pytest.raises(ValidationError, match="'Jewish'"):
            finetune_classifier(
                checkpoint,
                workdir / "corpus.tsv",
                workdir / "taxonomy.tsv",
                workdir / "pseudo.tsv",
                workdir / "pred.tsv",
                FinetuneSettings(epochs=0),
            )

    def test_unknown_pseudo_class_is_an_error(self, checkpoint, workdir):
        (workdir / "pseudo.tsv").write_text(
            "w0\tRacist\tRacist\t0.900000\t1\nj0\tJewish\tJewish\t0.900000\t1\n"
        )
        with pytest.raises(ValidationError, match="'Racist'"):
            finetune_classifier(
                checkpoint,
                workdir / "corpus.tsv",
                workdir / "taxonomy.tsv",
                workdir / "pseudo.tsv",
                workdir / "pred.tsv",
                FinetuneSettings(epochs=0),
            )

    def test_pseudo_document_missing_from_corpus(self, checkpoint, workdir):
        (workdir / "pseudo.tsv").write_text(
            "ghost\tWomen\tWomen\t0.900000\t1\nj0\tJewish\tJewish\t0.900000\t1\n"
        )
        with pytest.raises(ValidationError, match="ghost"):
            finetune_classifier(
                checkpoint,
                workdir / "corpus.tsv",
                workdir / "taxonomy.tsv",
                workdir / "pseudo.tsv",
                workdir / "pred.tsv",
                FinetuneSettings(epochs=0),
            )

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"learning_rate": 0.0},
            {"weight_decay": -0.1},
            {"epochs": -1},
            {"batch_size": 0},
            {"max_len": 2},
            {"warmup_fraction": 1.5},
        ],
    )
    def test_bad_settings_are_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            FinetuneSettings(**kwargs)
