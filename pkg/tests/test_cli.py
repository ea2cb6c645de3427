import json
import subprocess
import sys

import pytest

from stark_packet.cli import main, parse_range
from stark_packet.validation import check_rk4_convergence


@pytest.fixture
def red_cfg(tmp_path):
    path = tmp_path / "red.cfg"
    path.write_text("packet.delta=3\npacket.linewidth=0.9\ngrid.t_max=4\n")
    return path


def test_simulate_writes_csv_and_summary(tmp_path, red_cfg, capsys):
    out = tmp_path / "out"
    assert main(["simulate", str(red_cfg), "-o", str(out)]) == 0
    csv = (out / "red.csv").read_text().splitlines()
    assert csv[0].startswith("t,re_psi,im_psi")
    assert len(csv) == 4002
    doc = json.loads((out / "red.summary.json").read_text())
    assert doc["config"]["grid"]["t_max"] == 4.0
    assert "max_abs_shift" in capsys.readouterr().out


def test_simulate_absolute_flag(tmp_path, red_cfg):
    out = tmp_path / "out"
    assert main(["simulate", str(red_cfg), "-o", str(out), "--absolute"]) == 0
    row = (out / "red.csv").read_text().splitlines()[1].split(",")
    assert float(row[4]) == pytest.approx(1e6 + 1.5)


def test_simulate_repeat_is_byte_identical(tmp_path, red_cfg):
    main(["simulate", str(red_cfg), "-o", str(tmp_path / "a")])
    main(["simulate", str(red_cfg), "-o", str(tmp_path / "b")])
    assert (tmp_path / "a" / "red.csv").read_bytes() == (tmp_path / "b" / "red.csv").read_bytes()


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("grid.dt=0\n")
    assert main(["simulate", str(bad)]) == 1
    assert "grid.dt" in capsys.readouterr().err


def test_step_size_violation_is_a_config_error(tmp_path):
    cfg = tmp_path / "coarse.cfg"
    cfg.write_text("packet.delta=3\ngrid.dt=0.2\n")
    assert main(["simulate", str(cfg), "-o", str(tmp_path)]) == 1


def test_missing_file_exit_code(tmp_path):
    assert main(["simulate", str(tmp_path / "nope.cfg")]) == 3


def test_unwritable_output_exit_code(tmp_path, red_cfg):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert main(["simulate", str(red_cfg), "-o", str(blocker / "sub")]) == 3


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["bogus"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["sweep", "x.cfg", "--delta", "1:2"])
    assert err.value.code == 1


def test_parse_range():
    assert list(parse_range("0:1:3")) == [0.0, 0.5, 1.0]
    assert list(parse_range("-3:3:2")) == [-3.0, 3.0]


def test_sweep_serial_and_parallel_identical(tmp_path, red_cfg):
    args = ["sweep", str(red_cfg), "--delta=-3:3:3", "--linewidth", "0.5:1.5:2"]
    assert main(args + ["-o", str(tmp_path / "p")]) == 0
    assert main(args + ["-o", str(tmp_path / "s"), "--serial"]) == 0
    p = (tmp_path / "p" / "red.sweep.csv").read_bytes()
    assert p == (tmp_path / "s" / "red.sweep.csv").read_bytes()
    assert len(p.decode().splitlines()) == 7


def test_tabulated_path_resolves_next_to_config(tmp_path):
    sub = tmp_path / "cfgdir"
    sub.mkdir()
    (sub / "zero.csv").write_text("x,re,im\n-1,0,0\n0,0,0\n")
    (sub / "decay.cfg").write_text("packet.kind=tabulated\npacket.file=zero.csv\n"
                                  "initial.psi0_re=1\ngrid.t_max=1\n")
    assert main(["simulate", str(sub / "decay.cfg"), "-o", str(tmp_path / "o")]) == 0


def test_figures(tmp_path):
    assert main(["fig2", "-o", str(tmp_path)]) == 0
    assert main(["fig3", "-o", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("fig*.csv"))) == 6


def test_injected_coarse_step_fails_convergence_check():
    assert not check_rk4_convergence(0.2).passed
    assert check_rk4_convergence(1e-3).passed


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stark_packet", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "stark-packet" in proc.stdout
