from pathlib import Path

import pytest

from skdist.config import CORPUS_DIR_ENV, SolverOptions, corpus_directory


# ----- SolverOptions Tests -----
def test_defaults():
    options = SolverOptions()
    assert options.restarts == 32
    assert options.iterations == 2000
    assert options.threads == 1
    assert options.tol == 1e-9


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"restarts": -1}, "restarts"),
        ({"iterations": 0}, "iterations"),
        ({"threads": 0}, "threads"),
        ({"tol": 0.0}, "tol"),
        ({"patience": 0}, "patience"),
        ({"seed": -3}, "seed"),
    ],
)
def test_invalid_options(kwargs, message):
    with pytest.raises(ValueError, match=message):
        SolverOptions(**kwargs)


def test_zero_restarts_is_allowed():
    assert SolverOptions(restarts=0).restarts == 0


# ----- corpus_directory Tests -----
def test_packaged_corpus_directory(monkeypatch):
    monkeypatch.delenv(CORPUS_DIR_ENV, raising=False)
    directory = corpus_directory()
    assert directory.joinpath("ubi-demo.dist").is_file()


def test_environment_override(tmp_path, monkeypatch):
    monkeypatch.setenv(CORPUS_DIR_ENV, str(tmp_path))
    assert corpus_directory() == Path(tmp_path)


def test_missing_override_is_logged(tmp_path, monkeypatch, caplog):
    missing = tmp_path / "nowhere"
    monkeypatch.setenv(CORPUS_DIR_ENV, str(missing))
    assert corpus_directory() == missing
    assert "is not a directory" in caplog.text
