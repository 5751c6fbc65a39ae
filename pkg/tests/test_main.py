"""Basic tests for marchetype."""

from pathlib import Path

import pytest

from marchetype.main import main


def test_import():
    """Test that marchetype can be imported."""
    import marchetype

    assert marchetype.__version__ == "0.1.0"


def test_main_exits_with_cli_code(monkeypatch: pytest.MonkeyPatch, capsys):
    monkeypatch.setattr("sys.argv", ["marchetype", "count", "--segments", "2", "--actions", "1",
                                     "--customers", "3"])

    with pytest.raises(SystemExit) as exc:
        main()

    assert exc.value.code == 0
    assert "Total" in capsys.readouterr().out


def test_main_loads_dotenv(tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
    log_dir = tmp_path / "from-dotenv"
    (tmp_path / ".env").write_text(f"MARCHETYPE_LOG_DIR={log_dir}\n")
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("MARCHETYPE_LOG_DIR")
    monkeypatch.setattr("sys.argv", ["marchetype", "count", "--segments", "1", "--actions", "1",
                                     "--customers", "1"])

    with pytest.raises(SystemExit):
        main()

    assert (log_dir / "logs.jsonl").exists()
