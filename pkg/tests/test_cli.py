import numpy as np
import pytest

from arnl.cli import main
from arnl.imageio import read_image, write_image


FAST = ["--max-iters=2", "--nl-search-radius=4"]


@pytest.fixture
def small_lr(tmp_path, rng):
    path = tmp_path / "lr.pgm"
    write_image(path, rng.integers(0, 256, (12, 12)).astype(np.float64))
    return path


@pytest.fixture
def small_hr(tmp_path, data_dir):
    hr = read_image(data_dir / "camera64.pgm")[:32, :32]
    path = tmp_path / "hr.pgm"
    write_image(path, hr)
    return path


def test_interpolate_doubles_dimensions(tmp_path, small_lr, capsys):
    out = tmp_path / "hr_out.pgm"
    assert main(["interpolate", str(small_lr), str(out)] + FAST) == 0
    assert read_image(out).shape == (24, 24)
    printed = capsys.readouterr().out
    assert "data_residual" in printed and len(printed.splitlines()) >= 4


def test_interpolate_missing_file(tmp_path, capsys):
    missing = tmp_path / "nope.pgm"
    rc = main(["interpolate", str(missing), str(tmp_path / "o.pgm")] + FAST)
    assert rc != 0
    assert str(missing) in capsys.readouterr().err


def test_unknown_override_key_exits_nonzero(small_lr, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["interpolate", str(small_lr), str(tmp_path / "o.pgm"), "--bogus=3"])
    assert exc.value.code != 0


def test_interpolate_byte_identical_reruns(tmp_path, small_lr):
    out1, out2 = tmp_path / "a.pgm", tmp_path / "b.pgm"
    assert main(["interpolate", str(small_lr), str(out1)] + FAST) == 0
    assert main(["interpolate", str(small_lr), str(out2)] + FAST) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_evaluate_constant_image_caps_at_99(tmp_path, capsys):
    path = tmp_path / "flat.pgm"
    write_image(path, np.full((64, 64), 128.0))
    csv = tmp_path / "out.csv"
    assert main(["evaluate", str(path), str(csv)] + FAST) == 0
    rows = [line for line in csv.read_text().splitlines() if not line.startswith("#")]
    assert rows[0] == "image,method,psnr_db"
    body = [r.split(",") for r in rows[1:]]
    assert [r[1] for r in body] == ["bicubic", "proposed"]
    assert all(float(r[2]) == 99.0 for r in body)


def test_evaluate_rejects_odd_dimensions(tmp_path, capsys):
    path = tmp_path / "odd.pgm"
    write_image(path, np.ones((15, 16)))
    assert main(["evaluate", str(path), str(tmp_path / "o.csv")] + FAST) != 0
    assert "divisible" in capsys.readouterr().err


def test_evaluate_echoes_config(tmp_path, small_hr):
    csv = tmp_path / "out.csv"
    assert main(["evaluate", str(small_hr), str(csv), "--gamma=123.5"] + FAST) == 0
    header = [line for line in csv.read_text().splitlines() if line.startswith("#")]
    assert any("gamma=123.5" in line for line in header)
    keys = {line[2:].split("=")[0] for line in header}
    assert {"lambda", "alpha", "beta", "max_iters", "ar_window", "nl_block_size",
            "factor", "phase_row"} <= keys


def test_benchmark_rows_and_average(tmp_path, rng, data_dir):
    imgdir = tmp_path / "imgs"
    imgdir.mkdir()
    base = read_image(data_dir / "camera64.pgm")
    write_image(imgdir / "a.pgm", base[:32, :32])
    write_image(imgdir / "b.pgm", base[32:, 32:])
    csv = tmp_path / "bench.csv"
    assert main(["benchmark", str(imgdir), str(csv)] + FAST) == 0
    rows = [line.split(",") for line in csv.read_text().splitlines()
            if line and not line.startswith("#")][1:]
    assert len(rows) == 6  # 2 images x 2 methods + 2 average rows
    names = [r[0] for r in rows]
    assert names[:4] == ["a", "a", "b", "b"] and names[4:] == ["Average", "Average"]
    for method in ("bicubic", "proposed"):
        vals = [float(r[2]) for r in rows[:4] if r[1] == method]
        avg = [float(r[2]) for r in rows[4:] if r[1] == method][0]
        assert abs(avg - np.mean(vals)) <= 1e-9


def test_benchmark_empty_directory(tmp_path, capsys):
    empty = tmp_path / "none"
    empty.mkdir()
    assert main(["benchmark", str(empty), str(tmp_path / "o.csv")]) != 0


def test_benchmark_deterministic(tmp_path, data_dir):
    imgdir = tmp_path / "imgs"
    imgdir.mkdir()
    write_image(imgdir / "a.pgm", read_image(data_dir / "camera64.pgm")[:32, :32])
    csv1, csv2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert main(["benchmark", str(imgdir), str(csv1)] + FAST) == 0
    assert main(["benchmark", str(imgdir), str(csv2)] + FAST) == 0
    assert csv1.read_bytes() == csv2.read_bytes()


def test_png_input_accepted(tmp_path, rng):
    lr = tmp_path / "lr.png"
    write_image(lr, rng.integers(0, 256, (12, 12)).astype(np.float64))
    out = tmp_path / "up.png"
    assert main(["interpolate", str(lr), str(out)] + FAST) == 0
    assert read_image(out).shape == (24, 24)
