import json

import pytest

from qpclab.analysis.results import ExperimentKind, ExperimentReport, ExperimentSpec
from qpclab.analysis.statistics import Tally
from qpclab.attacks.passive import run_passive_attack
from qpclab.primitives.encoding import SecretInput
from qpclab.protocol.results import ProtocolConfig, Variant
from qpclab.protocol.run import run_protocol
from qpclab.serialization import (
    CSV_HEADER,
    dumps,
    format_tag,
    loads,
    read_tag,
    report_csv,
    write_text,
)


def transcript(seed=1, variant=Variant.ORIGINAL):
    config = ProtocolConfig(variant, n_bits=4, seed=seed)
    return run_protocol(SecretInput(6, 4), SecretInput(9, 4), config)


def small_report():
    spec = ExperimentSpec(ExperimentKind.CORRECTNESS, n_bits=2, trials=2, seed=0)
    return ExperimentReport(spec, [Tally("completeness", 1, 1, 1.0), Tally("soundness", 1, 2)])


# ==================== CANONICAL DOCUMENT TESTS ====================


class TestDumps:
    """Test the canonical text rendering of results."""

    def test_tag_line(self):
        text = dumps(transcript())
        assert text.splitlines()[0] == "qpclab-transcript/1"

    def test_trailing_newline_and_ascii(self):
        text = dumps(transcript())
        assert text.endswith("}\n")
        text.encode("ascii")

    def test_body_is_indented_json(self):
        body = dumps(transcript()).split("\n", 1)[1]
        assert body.startswith('{\n  "config"')
        assert json.loads(body)["verdict"] == {"kind": "NotEqual", "reason": None}

    def test_equal_runs_render_to_equal_text(self):
        assert dumps(transcript(seed=4)) == dumps(transcript(seed=4))

    def test_different_seeds_render_differently(self):
        assert dumps(transcript(seed=4)) != dumps(transcript(seed=5))

    def test_fixed_transcript_records_sum(self):
        data = loads(dumps(transcript(variant=Variant.FIXED)))
        assert data["config"]["variant"] == "fixed"
        assert isinstance(data["records"]["TP"]["announced_sum"], int)

    def test_attack_reports(self):
        config = ProtocolConfig(Variant.ORIGINAL, n_bits=4, seed=2)
        run, reports = run_passive_attack(SecretInput(6, 4), SecretInput(9, 4), config)
        text = dumps(reports, extra={"transcript": run.to_dict()})
        data = loads(text)
        assert read_tag(text) == ("attack-report", 1)
        assert [r["recovered_secret"] for r in data["reports"]] == [6, 9]
        assert "transcript" in data

    def test_experiment_report(self):
        assert read_tag(dumps(small_report())) == ("experiment-report", 1)

    def test_unknown_type_raises(self):
        with pytest.raises(TypeError):
            dumps(object())


class TestLoads:
    """Test reading canonical documents back."""

    def test_format_tag(self):
        assert format_tag("transcript") == "qpclab-transcript/1"

    def test_read_tag(self):
        assert read_tag("qpclab-experiment-report/1\n{}") == ("experiment-report", 1)

    def test_missing_tag_raises(self):
        with pytest.raises(ValueError):
            read_tag('{"config": {}}')

    def test_unsupported_version_raises(self):
        with pytest.raises(ValueError):
            loads("qpclab-transcript/2\n{}\n")

    def test_round_trip_keeps_messages(self):
        data = loads(dumps(transcript()))
        assert [m["body"]["type"] for m in data["messages"]][-3:] == ["pairs", "pairs", "pairs"]
        assert data["messages"][-1]["to"] == "*"


# ==================== CSV TESTS ====================


class TestReportCsv:
    """Test the CSV export of experiment reports."""

    def test_header(self):
        assert report_csv(small_report()).splitlines()[0] == ",".join(CSV_HEADER)

    def test_rows(self):
        lines = report_csv(small_report()).splitlines()
        assert len(lines) == 3
        assert lines[1] == "completeness,1,1,1.0,0.0,1.0"

    def test_missing_oracle_is_empty(self):
        row = report_csv(small_report()).splitlines()[2]
        assert row.startswith("soundness,1,2,0.5,")
        assert row.endswith(",")

    def test_unix_line_endings(self):
        assert "\r" not in report_csv(small_report())


class TestWriteText:
    """Test writing documents to disk."""

    def test_bytes_on_disk(self, tmp_path):
        path = tmp_path / "report.csv"
        write_text(path, report_csv(small_report()))
        data = path.read_bytes()
        assert b"\r\n" not in data
        assert data.endswith(b"\n")
