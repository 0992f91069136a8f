import os

import pytest

from kbread.cli import main
from kbread.features import FeatureConfig, extract_features, read_corpus
from kbread.model import TrainConfig, classify, load_model, train_supervised


def run(*argv):
    return main(list(argv))


@pytest.fixture
def paths(fixtures_dir, kb_dir):
    return {
        "kb": kb_dir,
        "labeled": f"{fixtures_dir}/quads_labeled.tsv",
        "unlabeled": f"{fixtures_dir}/quads_unlabeled.tsv",
        "test": f"{fixtures_dir}/quads_test.tsv",
        "tuples": f"{fixtures_dir}/tuples.tsv",
        "roles": f"{fixtures_dir}/tuples_roles.tsv",
        "compounds": f"{fixtures_dir}/compounds.tsv",
    }


def train_fixture_model(paths, tmp_path, *extra):
    model_path = str(tmp_path / "model.tsv")
    code = run("train", "--labeled", paths["labeled"], "--unlabeled",
               paths["unlabeled"], "--kb-dir", paths["kb"],
               "--model-out", model_path, *extra)
    assert code == 0
    return model_path


class TestTrain:
    def test_writes_model_and_log(self, paths, tmp_path):
        model_path = train_fixture_model(paths, tmp_path)
        assert os.path.exists(model_path)
        log = open(model_path + ".log", encoding="utf-8").read()
        em_lines = [l for l in log.splitlines() if l.startswith("em\t")]
        assert em_lines
        for line in em_lines:
            fields = dict(f.split("=", 1) for f in line.split("\t")[1:])
            assert float(fields["q_end"]) >= float(fields["q_start"]) - 1e-12

    def test_labeled_only_matches_library_training(self, paths, tmp_path, kb):
        model_path = str(tmp_path / "model.tsv")
        assert run("train", "--labeled", paths["labeled"], "--kb-dir", paths["kb"],
                   "--model-out", model_path) == 0
        cli_model = load_model(model_path)
        cfg = FeatureConfig()
        data = [(extract_features(i, kb, cfg), i.label)
                for i in read_corpus(paths["labeled"])]
        lib_model = train_supervised(data, TrainConfig())
        for fv, _ in data:
            assert classify(cli_model, fv) == classify(lib_model, fv)

    def test_missing_labeled_file_exits_2(self, paths, tmp_path):
        code = run("train", "--labeled", str(tmp_path / "nope.tsv"),
                   "--model-out", str(tmp_path / "m.tsv"))
        assert code == 2

    def test_unknown_flag_rejected(self, paths, tmp_path):
        with pytest.raises(SystemExit):
            run("train", "--labeled", paths["labeled"],
                "--model-out", str(tmp_path / "m.tsv"), "--bogus-flag")

    def test_dry_run_writes_nothing(self, paths, tmp_path):
        model_path = str(tmp_path / "model.tsv")
        assert run("train", "--labeled", paths["labeled"], "--kb-dir", paths["kb"],
                   "--model-out", model_path, "--dry-run") == 0
        assert not os.path.exists(model_path)

    def test_synonym_expansion_grows_training_data(self, paths, tmp_path):
        model_path = train_fixture_model(paths, tmp_path, "--expand-synonyms")
        model = load_model(model_path)
        # Four "caught" quads each gain a "captured" copy.
        assert model.n_labeled == 24


class TestDryRunEverywhere:
    def test_no_subcommand_output_under_dry_run(self, paths, tmp_path):
        model_path = train_fixture_model(paths, tmp_path)
        out = str(tmp_path / "never-written.tsv")
        commands = [
            ("predict", "--model", model_path, "--input", paths["test"],
             "--kb-dir", paths["kb"], "--out", out),
            ("eval", "--test", paths["test"], "--collins-train", paths["labeled"],
             "--kb-dir", paths["kb"], "--out", out),
            ("ternary-extract", "--model", model_path, "--tuples", paths["tuples"],
             "--kb-dir", paths["kb"], "--out", out),
            ("ternary-templates", "--labeled-tuples", paths["roles"],
             "--kb-dir", paths["kb"], "--out", out),
            ("knom-mine", "--compounds", paths["compounds"], "--kb-dir", paths["kb"],
             "--out", out),
            ("knom-learn", "--compounds", paths["compounds"], "--kb-dir", paths["kb"],
             "--out", out),
        ]
        for argv in commands:
            assert run(*argv, "--dry-run") == 0, argv
            assert not os.path.exists(out), argv


class TestPredict:
    def test_prediction_rows(self, paths, tmp_path):
        model_path = train_fixture_model(paths, tmp_path)
        corpus = tmp_path / "tuples_corpus.tsv"
        corpus.write_text("format=tuple\n" + open(paths["tuples"], encoding="utf-8").read(),
                          encoding="utf-8")
        out = str(tmp_path / "pred.tsv")
        assert run("predict", "--model", model_path, "--input", str(corpus),
                   "--kb-dir", paths["kb"], "--out", out) == 0
        rows = [l.split("\t") for l in open(out, encoding="utf-8").read().splitlines()]
        assert len(rows) == 5
        assert all(len(r) == 7 and r[5] in ("V", "N") for r in rows)
        by_verb = {r[1]: r[5] for r in rows}
        assert by_verb["acquired"] == "V"
        assert by_verb["expect"] == "N"

    def test_reruns_are_byte_identical(self, paths, tmp_path):
        model_path = train_fixture_model(paths, tmp_path)
        out1, out2 = str(tmp_path / "p1.tsv"), str(tmp_path / "p2.tsv")
        for out in (out1, out2):
            assert run("predict", "--model", model_path, "--input", paths["test"],
                       "--kb-dir", paths["kb"], "--out", out) == 0
        assert open(out1, "rb").read() == open(out2, "rb").read()


class TestEval:
    def test_comparison_table(self, paths, tmp_path, capsys):
        model_path = train_fixture_model(paths, tmp_path)
        out = str(tmp_path / "report.txt")
        tsv = str(tmp_path / "report.tsv")
        chart = str(tmp_path / "chart.tsv")
        assert run("eval", "--test", paths["test"], "--model", model_path,
                   "--collins-train", paths["labeled"], "--kb-dir", paths["kb"],
                   "--out", out, "--tsv-out", tsv, "--chart-out", chart) == 0
        text = open(out, encoding="utf-8").read()
        assert "== ppad ==" in text and "== collins ==" in text
        tsv_rows = open(tsv, encoding="utf-8").read()
        assert "ppad\toverall\t10\t" in tsv_rows
        assert "collins\texcl_of\t7\t" in tsv_rows
        assert os.path.exists(chart)

    def test_requires_some_method(self, paths, tmp_path):
        assert run("eval", "--test", paths["test"],
                   "--out", str(tmp_path / "r.txt")) == 2


class TestTernaryCommands:
    def test_extract_gates_and_annotates(self, paths, tmp_path):
        model_path = train_fixture_model(paths, tmp_path)
        out = str(tmp_path / "ternary.tsv")
        assert run("ternary-extract", "--model", model_path, "--tuples",
                   paths["tuples"], "--kb-dir", paths["kb"], "--out", out,
                   "--min-support", "1") == 0
        rows = [l.split("\t") for l in open(out, encoding="utf-8").read().splitlines()]
        assert ["bny mellon", "acquired", "insight", "from", "lloyds",
                "acquired", "-"] in rows
        assert all(r[1] != "expect" for r in rows)

    def test_templates_learn_and_apply(self, paths, tmp_path):
        model_path = train_fixture_model(paths, tmp_path)
        out = str(tmp_path / "templates.tsv")
        labeled_out = str(tmp_path / "labeled.tsv")
        assert run("ternary-templates", "--labeled-tuples", paths["roles"],
                   "--kb-dir", paths["kb"], "--out", out, "--min-support", "3",
                   "--tuples", paths["tuples"], "--model", model_path,
                   "--labeled-out", labeled_out) == 0
        text = open(out, encoding="utf-8").read()
        assert text == "np_v_np_pp.beneficiary\tbuy\tjewelry\tfor\tperson\t3\n"
        assert os.path.exists(labeled_out)


class TestKnomCommands:
    def test_learn_then_predict(self, paths, tmp_path):
        mappings = str(tmp_path / "mappings.tsv")
        assert run("knom-learn", "--compounds", paths["compounds"], "--kb-dir",
                   paths["kb"], "--seq-min-support", "3", "--min-support", "3",
                   "--out", mappings) == 0
        text = open(mappings, encoding="utf-8").read()
        assert "citizenofcountry\t3\t1\ttype:country type:profession type:person\t3" in text
        assert "personhasjobposition\t3\t2\t" in text

        preds = str(tmp_path / "preds.tsv")
        sample = str(tmp_path / "sample.tsv")
        assert run("knom-predict", "--compounds", paths["compounds"], "--mappings",
                   mappings, "--kb-dir", paths["kb"], "--out", preds,
                   "--sample-out", sample, "--seed", "7") == 0
        pred_text = open(preds, encoding="utf-8").read()
        assert "citizenofcountry\tsoichi noguchi\tjapanese\tc1\tknown" in pred_text
        assert open(sample, encoding="utf-8").read().count("\n") == 7  # header + 6 rows

    def test_baseline_flag_discards_all_type_mappings(self, paths, tmp_path):
        mappings = str(tmp_path / "mappings.tsv")
        run("knom-learn", "--compounds", paths["compounds"], "--kb-dir", paths["kb"],
            "--seq-min-support", "3", "--min-support", "3", "--out", mappings)
        preds = str(tmp_path / "preds.tsv")
        assert run("knom-predict", "--compounds", paths["compounds"], "--mappings",
                   mappings, "--kb-dir", paths["kb"], "--out", preds,
                   "--baseline") == 0
        assert open(preds, encoding="utf-8").read() == ""

    def test_mine_writes_sequences(self, paths, tmp_path):
        out = str(tmp_path / "seqs.tsv")
        assert run("knom-mine", "--compounds", paths["compounds"], "--kb-dir",
                   paths["kb"], "--min-support", "3", "--out", out) == 0
        text = open(out, encoding="utf-8").read()
        assert "type:country type:profession type:person\t3\tc1,c2,c3" in text

    def test_learn_recovers_planted_corpus(self, tmp_path):
        from synth import PLANTED, write_planted
        from kbread.knom import read_mappings
        kb_dir, compounds = write_planted(str(tmp_path))
        out = str(tmp_path / "mappings.tsv")
        assert run("knom-learn", "--compounds", compounds, "--kb-dir", kb_dir,
                   "--out", out) == 0
        learned = read_mappings(out)
        assert {(m.relation, m.arg1_pos, m.arg2_pos, m.sequence.elements)
                for m in learned} == set(PLANTED)


class TestKbCheck:
    def test_stats_printed(self, paths, capsys):
        assert run("kb-check", "--kb-dir", paths["kb"]) == 0
        out = capsys.readouterr().out
        assert "svo_triples\t3" in out
        assert "relation_instances\t10" in out

    def test_missing_dir_exits_2(self, tmp_path):
        assert run("kb-check", "--kb-dir", str(tmp_path / "missing")) == 2


class TestFamilyFlags:
    def test_unknown_family_exits_2(self, paths, tmp_path):
        assert run("train", "--labeled", paths["labeled"], "--kb-dir", paths["kb"],
                   "--model-out", str(tmp_path / "m.tsv"),
                   "--families", "F1,F99") == 2

    def test_all_families_enable_extra_features(self, paths, tmp_path):
        default_path = train_fixture_model(paths, tmp_path)
        all_path = str(tmp_path / "all.tsv")
        assert run("train", "--labeled", paths["labeled"], "--kb-dir", paths["kb"],
                   "--model-out", all_path, "--families", "all") == 0
        default_feats = set(load_model(default_path).weights)
        all_feats = set(load_model(all_path).weights)
        assert any(f.startswith("F2:") or f.startswith("F6:")
                   for f in all_feats - default_feats)
        assert not any(f.startswith(("F2:", "F6:")) for f in default_feats)


class TestConfigPrecedence:
    def test_flag_beats_config_beats_default(self, paths, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("l2_penalty=0.5\nmax_em_iters=7\n", encoding="utf-8")
        model_path = str(tmp_path / "m.tsv")
        assert run("train", "--labeled", paths["labeled"], "--kb-dir", paths["kb"],
                   "--model-out", model_path, "--config", str(cfg_file),
                   "--l2-penalty", "0.25") == 0
        model = load_model(model_path)
        assert model.config.l2_penalty == 0.25      # flag wins
        assert model.config.max_em_iters == 7       # config file beats default
        assert model.config.learning_rate == 0.5    # default survives
