"""Check and execute the python blocks of the documentation."""

import ast
import contextlib
import io
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import pytest

PROJECT_ROOT = Path(__file__).parent.parent
DOCS_DIR = PROJECT_ROOT / "docs" / "content"

_SKIP_MARKER = re.compile(r"<!--\s*skip\s*-->", re.IGNORECASE)


@dataclass
class CodeBlock:
    content: str
    file_path: Path
    line_number: int
    should_skip: bool = False

    def __str__(self) -> str:
        return f"{self.file_path}:{self.line_number}"


@dataclass
class DocRunner:
    """Runs the blocks of one page in a shared namespace, top to bottom."""

    namespace: dict[str, Any] = field(default_factory=dict)

    def run(self, block: CodeBlock) -> str | None:
        try:
            code = compile(block.content, str(block.file_path), "exec")
        except SyntaxError as exc:
            return f"syntax error: {exc}"
        out = io.StringIO()
        try:
            with contextlib.redirect_stdout(out):
                exec(code, self.namespace)
        except Exception as exc:
            return f"{type(exc).__name__}: {exc}"
        return None


def extract_python_blocks(path: Path) -> list[CodeBlock]:
    lines = path.read_text(encoding="utf-8").split("\n")
    blocks: list[CodeBlock] = []
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("```"):
            info = line[3:].strip()
            language = info.split()[0] if info else ""
            skip = "skip" in info.lower() or (
                i > 0 and bool(_SKIP_MARKER.search(lines[i - 1]))
            )
            start = i + 2
            i += 1
            body: list[str] = []
            while i < len(lines) and not lines[i].strip().startswith("```"):
                body.append(lines[i])
                i += 1
            if language in ("python", "py") and body:
                blocks.append(CodeBlock("\n".join(body), path, start, skip))
        i += 1
    return blocks


def looks_like_signature(content: str) -> bool:
    """Reference blocks that document call signatures rather than run code."""
    joined = "\n".join(
        line.strip()
        for line in content.splitlines()
        if line.strip() and not line.strip().startswith("#")
    )
    if not joined:
        return False
    has_typed_call = bool(re.search(r"\w[\w.]*\([^)]*:\s*[^)]*\)", joined))
    return has_typed_call or "->" in joined


def _markdown_files() -> list[Path]:
    return sorted(DOCS_DIR.rglob("*.md"))


@contextlib.contextmanager
def _working_directory(path: Path):
    previous = Path.cwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(previous)


# ----- Extractor Tests -----


def test_extract_python_block(tmp_path):
    page = tmp_path / "page.md"
    page.write_text("# Title\n\n```python\nx = 1 + 1\n```\n\n```bash\nls\n```\n")

    blocks = extract_python_blocks(page)

    assert len(blocks) == 1
    assert blocks[0].content == "x = 1 + 1"
    assert blocks[0].line_number == 4


def test_skip_markers(tmp_path):
    page = tmp_path / "page.md"
    page.write_text(
        "<!-- skip -->\n```python\n1 / 0\n```\n\n```python skip\nundefined\n```\n"
    )

    blocks = extract_python_blocks(page)

    assert [block.should_skip for block in blocks] == [True, True]


def test_runner_keeps_state_between_blocks(tmp_path):
    runner = DocRunner()
    first = CodeBlock("x = 42", tmp_path / "a.md", 1)
    second = CodeBlock("assert x == 42", tmp_path / "a.md", 5)

    assert runner.run(first) is None
    assert runner.run(second) is None


def test_runner_reports_failures(tmp_path):
    runner = DocRunner()

    error = runner.run(CodeBlock("1 / 0", tmp_path / "a.md", 1))

    assert error is not None and "ZeroDivisionError" in error


@pytest.mark.parametrize(
    "content, expected",
    [
        ("validate(d: Joint) -> ValidationResult", True),
        ("SolverOptions(\n    restarts: int = 32,\n)", True),
        ("d = sk.get_entry('ubi-demo')", False),
    ],
)
def test_signature_detection(content, expected):
    assert looks_like_signature(content) is expected


# ----- Documentation Tests -----


def test_documentation_blocks_parse_or_are_signatures():
    failures: list[str] = []
    total = 0
    for page in _markdown_files():
        for block in extract_python_blocks(page):
            total += 1
            if block.should_skip or looks_like_signature(block.content):
                continue
            try:
                ast.parse(block.content)
            except SyntaxError as exc:
                failures.append(f"{block}: {exc}")

    assert total > 0
    assert not failures, "\n".join(failures)


@pytest.mark.parametrize("page", _markdown_files(), ids=lambda p: p.name)
def test_documentation_examples_execute(page):
    runner = DocRunner()
    failures: list[str] = []
    with tempfile.TemporaryDirectory() as tmp_dir, _working_directory(Path(tmp_dir)):
        for block in extract_python_blocks(page):
            if block.should_skip or looks_like_signature(block.content):
                continue
            error = runner.run(block)
            if error is not None:
                failures.append(f"{block}: {error}")

    assert not failures, "\n".join(failures)
