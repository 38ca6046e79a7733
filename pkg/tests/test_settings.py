import json

import numpy as np
import pytest

from config.constants import DEFAULT_SETTINGS
from config.settings import load_settings, save_settings, load_config, save_config
from torus.errors import ConfigError, BudgetExceededError, NumericalHealthError
from utils.check_utils import assert_unitary, assert_hermitian, assert_close
from utils.file_utils import format_float, write_csv, read_csv, write_json, write_matrix
from utils.system_utils import check_memory_budget, default_thread_count, describe_host


class TestSettings:

    def testMissingFile(self, tmp_path):
        assert load_settings(str(tmp_path / "none.json")) == DEFAULT_SETTINGS

    def testMerge(self, tmp_path):
        path = tmp_path / "settings.json"
        path.write_text(json.dumps({"threads": 4}), encoding="utf-8")
        settings = load_settings(str(path))
        assert settings["threads"] == 4
        assert settings["wigner_max_n"] == DEFAULT_SETTINGS["wigner_max_n"]

    def testCorrupt(self, tmp_path, caplog):
        path = tmp_path / "settings.json"
        path.write_text("{not json", encoding="utf-8")
        assert load_settings(str(path)) == DEFAULT_SETTINGS
        assert "设置加载失败" in caplog.text

    def testSaveRoundTrip(self, tmp_path):
        path = str(tmp_path / "settings.json")
        save_settings({**DEFAULT_SETTINGS, "log_level": "DEBUG"}, path)
        assert load_settings(path)["log_level"] == "DEBUG"


class TestScenarioFile:

    def testMissing(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "none.json"))

    def testNotObject(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def testRoundTrip(self, tmp_path):
        path = str(tmp_path / "cfg.json")
        save_config({"n": 8, "dynamics": "HH"}, path)
        assert load_config(path) == {"n": 8, "dynamics": "HH"}


class TestFileUtils:

    @pytest.mark.parametrize('value,expected', [(0.1, "0.10000000000000001"), (1.0, "1"),
                                                (float("nan"), "nan"), (np.float64(2.5), "2.5")])
    def testFormat(self, value, expected):
        assert format_float(value) == expected

    def testCsv(self, tmp_path):
        path = str(tmp_path / "a.csv")
        write_csv(path, ["t", "x"], [[0, 0.1], [1, float("nan")]])
        header, rows = read_csv(path)
        assert header == ["t", "x"]
        assert rows == [["0", "0.10000000000000001"], ["1", "nan"]]

    def testJsonSorted(self, tmp_path):
        path = tmp_path / "a.json"
        write_json(str(path), {"b": np.float64(1.5), "a": (1, 2), "c": {"z", "y"}})
        text = path.read_text(encoding="utf-8")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [1, 2], "b": 1.5, "c": ["y", "z"]}

    def testMatrix(self, tmp_path):
        path = tmp_path / "m.txt"
        write_matrix(str(path), np.eye(2), {"n": 2})
        assert path.read_text(encoding="utf-8").startswith("# n: 2")
        np.testing.assert_array_equal(np.loadtxt(str(path), delimiter=","), np.eye(2))


class TestChecks:

    def testUnitary(self):
        assert assert_unitary(np.eye(3), 1e-12, "I") == 0.0
        with pytest.raises(NumericalHealthError):
            assert_unitary(2 * np.eye(3), 1e-8, "2I")

    def testNan(self):
        with pytest.raises(NumericalHealthError):
            assert_close(float("nan"), 0.0, 1.0, "nan")

    def testHermitian(self):
        with pytest.raises(NumericalHealthError):
            assert_hermitian(np.array([[0, 1], [0, 0]]), 1e-8, "nilpotent")


class TestSystem:

    def testBudget(self):
        with pytest.raises(BudgetExceededError):
            check_memory_budget(2 ** 62, "huge")
        assert check_memory_budget(16, "tiny") == 16

    def testHost(self):
        assert default_thread_count() >= 1
        assert "logical_cpus" in describe_host()
