import subprocess
import sys

import pytest

from latticeglow_figures.render import EXPECTED_CSVS, OUTPUT_NAMES, RenderError, main, render


@pytest.fixture(scope="session")
def preset_dir(tmp_path_factory):
    """Generate the preset CSVs through the simulator's CLI."""
    target = tmp_path_factory.mktemp("presets")
    for name in ("fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5", "cavity"):
        result = subprocess.run(
            [sys.executable, "-m", "latticeglow.cli", "--preset", name, "--out", str(target)],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
    return target


def test_renders_five_images(preset_dir, tmp_path):
    written = render(preset_dir, tmp_path / "img")
    assert sorted(p.name for p in written) == sorted(OUTPUT_NAMES)
    for path in written:
        assert path.stat().st_size > 0
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_rerun_overwrites(preset_dir, tmp_path):
    out = tmp_path / "img"
    first = {p.name: p.stat().st_size for p in render(preset_dir, out)}
    second = {p.name: p.stat().st_size for p in render(preset_dir, out)}
    assert first.keys() == second.keys()


def test_empty_directory_lists_expected_files(tmp_path):
    with pytest.raises(RenderError) as err:
        render(tmp_path / "nope", tmp_path / "img")
    message = str(err.value)
    for name in EXPECTED_CSVS:
        assert name in message


def test_missing_column_named_in_error(preset_dir, tmp_path):
    broken = tmp_path / "broken"
    broken.mkdir()
    for name in EXPECTED_CSVS:
        (broken / name).write_bytes((preset_dir / name).read_bytes())
    lines = (broken / "fig2.csv").read_text().splitlines()
    lines[0] = lines[0].replace("noise_sf_k30", "renamed")
    (broken / "fig2.csv").write_text("\n".join(lines) + "\n")
    with pytest.raises(RenderError, match="noise_sf_k30"):
        render(broken, tmp_path / "img")


def test_cli_entry_point(preset_dir, tmp_path):
    assert main([str(preset_dir), str(tmp_path / "img")]) == 0
    assert main([str(tmp_path / "absent"), str(tmp_path / "img")]) == 1
    assert main([]) == 2
