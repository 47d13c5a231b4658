# this_file: tests/test_project.py
"""
Consistency checks between the manifest, the scripts and the docs sources.
"""

import re
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent


def _text(relative):
    return (ROOT / relative).read_text(encoding="utf-8")


class TestDocs:
    def test_docs_extra_covers_mkdocs_config(self):
        """The theme and plugins named in mkdocs.yml are installable from the docs extra."""
        manifest = _text("pyproject.toml")
        extra = re.search(r"^docs = \[(.*?)\]", manifest, re.S | re.M)
        assert extra is not None
        for package in ("mkdocs", "mkdocs-material", "mkdocs-minify-plugin"):
            assert f'"{package}>=' in extra.group(1)
        config = _text("src_docs/mkdocs.yml")
        assert "name: material" in config
        assert "- minify:" in config

    def test_nav_pages_exist(self):
        config = _text("src_docs/mkdocs.yml")
        pages = re.findall(r":\s*([\w-]+\.md)\s*$", config, re.M)
        assert pages
        for page in pages:
            assert (ROOT / "src_docs" / "md" / page).is_file(), page
        for script in re.findall(r"^\s*-\s*(javascripts/\S+\.js)\s*$", config, re.M):
            assert (ROOT / "src_docs" / "md" / script).is_file(), script


class TestScripts:
    @pytest.mark.parametrize("name", ["build.sh", "release.sh", "test.sh", "docs.sh"])
    def test_scripts_exist(self, name):
        assert (ROOT / "scripts" / name).is_file()

    def test_release_tags_before_building(self):
        """hatch-vcs stamps the release version only if the tag exists at build time."""
        script = _text("scripts/release.sh")
        assert script.index("git tag -a") < script.index("./scripts/build.sh")
        assert script.index("./scripts/build.sh") < script.index("git push origin")

    def test_release_can_run_slow_suite(self):
        script = _text("scripts/release.sh")
        assert "pytest tests/ -m slow" in script
        assert "-m 'not slow'" in _text("pyproject.toml")

    def test_build_smoke_tests_the_wheel(self):
        script = _text("scripts/build.sh")
        assert "python -m build" in script
        assert "reactpinn forward" in script
