import subprocess
import sys

CLI = [sys.executable, "-m", "spinal"]


def run_cli(*args, cwd=None):
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, cwd=cwd, timeout=300
    )


def test_no_command_exits_2():
    proc = run_cli()
    assert proc.returncode == 2


def test_encode_reproduces_golden(golden_dir, tmp_path):
    out = tmp_path / "cw.bin"
    proc = run_cli(
        "encode", "--config", str(golden_dir / "configs/golden_bsc.ini"),
        "--out", str(out), "0000",
    )
    assert proc.returncode == 0, proc.stderr
    assert "spine_digest=" in proc.stdout
    assert out.read_bytes() == (golden_dir / "codeword_bsc.bin").read_bytes()


def test_encode_awgn_reproduces_golden(golden_dir, tmp_path):
    out = tmp_path / "cw_awgn.bin"
    proc = run_cli(
        "encode", "--config", str(golden_dir / "configs/golden_awgn.ini"),
        "--out", str(out), "0000",
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_bytes() == (golden_dir / "codeword_awgn.bin").read_bytes()


def test_encode_bad_hex_length_exits_2(golden_dir, tmp_path):
    proc = run_cli(
        "encode", "--config", str(golden_dir / "configs/golden_bsc.ini"),
        "--out", str(tmp_path / "x.bin"), "00000",
    )
    assert proc.returncode == 2
    assert "message" in proc.stderr


def test_decode_noiseless_roundtrip(golden_dir, tmp_path):
    # 9 passes: enough evidence that the clean codeword decodes uniquely
    cfg = tmp_path / "roundtrip.ini"
    cfg.write_text(
        (golden_dir / "configs/golden_bsc.ini").read_text().replace(
            "passes = 3", "passes = 9"
        )
    )
    cw = tmp_path / "cw.bin"
    run_cli("encode", "--config", str(cfg), "--out", str(cw), "a7c3")
    proc = run_cli("decode", "--config", str(cfg), str(cw), "--beam", "256")
    assert proc.returncode == 0, proc.stderr
    assert "message=a7c3" in proc.stdout
    assert "cost=0" in proc.stdout


def test_decode_matches_golden_transcripts(golden_dir, tmp_path):
    cfg = str(golden_dir / "configs/golden_bsc.ini")
    obs = str(golden_dir / "observation_bsc.bin")
    for beam in (1, 256):
        out = tmp_path / f"decode_b{beam}.txt"
        proc = run_cli("decode", "--config", cfg, obs, "--beam", str(beam),
                       "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        expected = (golden_dir / f"decode_b{beam}.txt").read_bytes()
        assert out.read_bytes() == expected


def test_decode_beam_monotone_on_golden_observation(golden_dir):
    costs = {}
    for beam in (1, 256):
        text = (golden_dir / f"decode_b{beam}.txt").read_text()
        costs[beam] = float(text.split("cost=")[1].splitlines()[0])
    assert costs[256] <= costs[1]


def test_decode_truncated_file_exits_3(golden_dir, tmp_path):
    cfg = str(golden_dir / "configs/golden_bsc.ini")
    blob = (golden_dir / "observation_bsc.bin").read_bytes()
    broken = tmp_path / "trunc.bin"
    broken.write_bytes(blob[:-3])
    proc = run_cli("decode", "--config", cfg, str(broken))
    assert proc.returncode == 3
    assert "byte" in proc.stderr


def test_decode_kind_mismatch_exits_2(golden_dir):
    proc = run_cli(
        "decode", "--config", str(golden_dir / "configs/golden_awgn.ini"),
        str(golden_dir / "observation_bsc.bin"),
    )
    assert proc.returncode == 2


def test_sweep_reproduces_golden(golden_dir, tmp_path):
    out = tmp_path / "sweep.csv"
    proc = run_cli(
        "sweep", "--config", str(golden_dir / "configs/golden_sweep.ini"),
        "--out", str(out),
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_bytes() == (golden_dir / "sweep.csv").read_bytes()


def test_sweep_zero_trials_header_only(golden_dir, tmp_path):
    cfg_text = (golden_dir / "configs/golden_sweep.ini").read_text()
    cfg_text = cfg_text.replace("trials = 5", "trials = 0")
    cfg = tmp_path / "zero.ini"
    cfg.write_text(cfg_text)
    out = tmp_path / "zero.csv"
    proc = run_cli("sweep", "--config", str(cfg), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = out.read_text().splitlines()
    data = [l for l in lines if l and not l.startswith("#")]
    assert data == ["trial,channel,p_or_snr,n,k,nu,B,passes_used,rate,success,"
                    "first_error_bit,seed_hex"]


def test_sweep_seed_override_changes_output(golden_dir, tmp_path):
    cfg = str(golden_dir / "configs/golden_sweep.ini")
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli("sweep", "--config", cfg, "--out", str(a)).returncode == 0
    assert run_cli("sweep", "--config", cfg, "--out", str(b), "--seed", "77").returncode == 0
    assert a.read_bytes() != b.read_bytes()


def test_sweep_threads_flag_identical_output(golden_dir, tmp_path):
    cfg = str(golden_dir / "configs/golden_sweep.ini")
    one = tmp_path / "one.csv"
    two = tmp_path / "two.csv"
    assert run_cli("sweep", "--config", cfg, "--out", str(one), "--threads", "1").returncode == 0
    assert run_cli("sweep", "--config", cfg, "--out", str(two), "--threads", "2").returncode == 0
    assert one.read_bytes() == two.read_bytes()


def test_simulate_runs(golden_dir):
    proc = run_cli("simulate", "--config", str(golden_dir / "configs/golden_bsc.ini"))
    assert proc.returncode == 0, proc.stderr
    assert "passes_used=" in proc.stdout
    assert "seed_hex=" in proc.stdout


def test_exponent_rows_match_capacity(golden_dir, tmp_path):
    from spinal.exponents import capacity_bsc

    cfg_text = (golden_dir / "configs/golden_bsc.ini").read_text()
    cfg_text = cfg_text.replace("p = 0.1", "p = 0.05,0.1,0.2")
    cfg = tmp_path / "exp.ini"
    cfg.write_text(cfg_text)
    out = tmp_path / "exp.csv"
    proc = run_cli("exponent", "--config", str(cfg), "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    lines = [l for l in out.read_text().splitlines() if l and not l.startswith("#")]
    header, rows = lines[0], lines[1:]
    assert len(rows) == 3
    cap_col = header.split(",").index("capacity")
    for row, p in zip(rows, (0.05, 0.1, 0.2)):
        assert abs(float(row.split(",")[cap_col]) - capacity_bsc(p)) <= 1e-12

    again = tmp_path / "exp2.csv"
    assert run_cli("exponent", "--config", str(cfg), "--out", str(again)).returncode == 0
    assert out.read_bytes() == again.read_bytes()


def test_config_field_path_errors(tmp_path, golden_dir):
    bad = (golden_dir / "configs/golden_bsc.ini").read_text().replace("p = 0.1", "p = 0.7")
    cfg = tmp_path / "bad.ini"
    cfg.write_text(bad)
    proc = run_cli("simulate", "--config", str(cfg))
    assert proc.returncode == 2
    assert "channel.p" in proc.stderr

    missing = tmp_path / "missing.ini"
    missing.write_text("[code]\nn = 16\nk = 4\n")
    proc = run_cli("simulate", "--config", str(missing))
    assert proc.returncode == 2


def test_golden_gen_is_reproducible(golden_dir, tmp_path):
    out = tmp_path / "regen"
    proc = run_cli("golden-gen", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    shipped = sorted(p.relative_to(golden_dir) for p in golden_dir.rglob("*") if p.is_file())
    regen = sorted(p.relative_to(out) for p in out.rglob("*") if p.is_file())
    assert shipped == regen
    for rel in shipped:
        assert (out / rel).read_bytes() == (golden_dir / rel).read_bytes(), rel
