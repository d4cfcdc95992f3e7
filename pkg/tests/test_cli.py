"""End-to-end command-line flows driven through main(argv), including the
exit-code contract."""

import pytest

from medvault import rsa
from medvault.bench import BenchReport
from medvault.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def vault(tmp_path_factory):
    """A chain with three registered principals and one stored record."""
    root = tmp_path_factory.mktemp("vault")
    chain = root / "chain"
    keys = root / "keys"
    for pid, role in (("alice", "patient"),
                      ("clinic", "medical-institution"),
                      ("labcorp", "third-party")):
        assert run("--seed", 1000 + hash(pid) % 100, "keygen",
                   "--id", pid, "--role", role, "--bits", 512,
                   "--out", keys, "--chain", chain) == 0
    plain = root / "note.txt"
    plain.write_bytes(b"blood pressure 120/80, pulse 61\n" * 40)
    assert run("--seed", 7, "encrypt", "--in", plain,
               "--to", keys / "alice.mlpk", "--out", root / "note.env") == 0
    assert run("store", "--chain", chain, "--record-id", "visit-2026",
               "--owner", "alice", "--in", root / "note.env") == 0
    return {"root": root, "chain": chain, "keys": keys, "plain": plain}


def test_keygen_writes_key_files(vault, capsys):
    keys = vault["keys"]
    assert (keys / "alice.mlpk").exists()
    assert (keys / "alice.mlsk").exists()
    pub = rsa.decode_public_key((keys / "alice.mlpk").read_bytes())
    assert pub.n.bit_length() == 512


def test_keygen_refuses_overwrite_without_force(vault, tmp_path, capsys):
    out = tmp_path / "k"
    assert run("--seed", 1, "keygen", "--id", "solo", "--role", "patient",
               "--bits", 512, "--out", out) == 0
    assert run("--seed", 2, "keygen", "--id", "solo", "--role", "patient",
               "--bits", 512, "--out", out) == 1
    assert run("--seed", 2, "keygen", "--id", "solo", "--role", "patient",
               "--bits", 512, "--out", out, "--force") == 0


def test_keygen_chain_registry_rejects_duplicate_id(vault):
    # --force replaces files but the registry still refuses a second "alice".
    assert run("--seed", 3, "keygen", "--id", "alice", "--role", "patient",
               "--bits", 512, "--out", vault["keys"], "--chain",
               vault["chain"], "--force") == 1


def test_keygen_deterministic_under_seed(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("--seed", 11, "keygen", "--id", "x", "--role", "patient",
               "--bits", 512, "--out", a) == 0
    assert run("--seed", 11, "keygen", "--id", "x", "--role", "patient",
               "--bits", 512, "--out", b) == 0
    assert (a / "x.mlpk").read_bytes() == (b / "x.mlpk").read_bytes()


def test_encrypt_decrypt_round_trip(vault, tmp_path):
    out = tmp_path / "note.out"
    assert run("decrypt", "--in", vault["root"] / "note.env",
               "--key", vault["keys"] / "alice.mlsk", "--out", out) == 0
    assert out.read_bytes() == vault["plain"].read_bytes()


def test_decrypt_wrong_key_is_integrity_exit(vault, tmp_path):
    assert run("decrypt", "--in", vault["root"] / "note.env",
               "--key", vault["keys"] / "clinic.mlsk",
               "--out", tmp_path / "x") == 4


def test_decrypt_truncated_envelope(vault, tmp_path):
    blob = (vault["root"] / "note.env").read_bytes()
    bad = tmp_path / "cut.env"
    bad.write_bytes(blob[:len(blob) // 2])
    assert run("decrypt", "--in", bad,
               "--key", vault["keys"] / "alice.mlsk",
               "--out", tmp_path / "x") == 4


def test_missing_input_file(vault, tmp_path):
    assert run("encrypt", "--in", tmp_path / "absent.txt",
               "--to", vault["keys"] / "alice.mlpk",
               "--out", tmp_path / "x") == 5


def test_fetch_as_owner(vault, tmp_path):
    out = tmp_path / "fetched.env"
    assert run("fetch", "--chain", vault["chain"], "--record-id",
               "visit-2026", "--as", "alice", "--out", out) == 0
    env = rsa.Envelope.from_bytes(out.read_bytes())
    pri = rsa.decode_private_key((vault["keys"] / "alice.mlsk").read_bytes())
    assert rsa.hybrid_decrypt(env, pri) == vault["plain"].read_bytes()


def test_fetch_to_stdout(vault, capsysbinary):
    assert run("fetch", "--chain", vault["chain"], "--record-id",
               "visit-2026", "--as", "alice") == 0
    blob = capsysbinary.readouterr().out
    assert blob[:4] == b"MLEN"
    rsa.Envelope.from_bytes(blob)


def test_store_duplicate_creates_version(vault, capsys):
    assert run("store", "--chain", vault["chain"], "--record-id",
               "visit-2026", "--owner", "alice",
               "--in", vault["root"] / "note.env") == 0
    assert "visit-2026#2" in capsys.readouterr().out
    assert run("verify", "--chain", vault["chain"]) == 0


def test_grant_revoke_flow(vault, capsys):
    chain = vault["chain"]
    fetch = ("fetch", "--chain", chain, "--record-id", "visit-2026",
             "--as", "labcorp", "--out", vault["root"] / "lab.env")
    assert run(*fetch) == 3
    assert run("grant", "--chain", chain, "--record-id", "visit-2026",
               "--to", "labcorp", "--action", "read") == 0
    assert run(*fetch) == 0
    assert run("revoke", "--chain", chain, "--record-id", "visit-2026",
               "--to", "labcorp", "--action", "read") == 0
    assert run(*fetch) == 3
    # Nothing left to revoke.
    assert run("revoke", "--chain", chain, "--record-id", "visit-2026",
               "--to", "labcorp", "--action", "read") == 5


def test_emergency_read_scope(vault, tmp_path):
    chain = vault["chain"]
    assert run("fetch", "--chain", chain, "--record-id", "visit-2026",
               "--as", "clinic", "--out", tmp_path / "e1") == 3
    assert run("fetch", "--chain", chain, "--record-id", "visit-2026",
               "--as", "clinic", "--emergency", "--out", tmp_path / "e2") == 0
    assert run("fetch", "--chain", chain, "--record-id", "visit-2026",
               "--as", "labcorp", "--emergency", "--out", tmp_path / "e3") == 3


def test_fetch_unknown_record(vault, tmp_path):
    assert run("fetch", "--chain", vault["chain"], "--record-id", "nothing",
               "--as", "alice", "--out", tmp_path / "x") == 5


def test_fetch_unknown_principal(vault, tmp_path):
    assert run("fetch", "--chain", vault["chain"], "--record-id",
               "visit-2026", "--as", "mallory", "--out", tmp_path / "x") == 3


def test_verify_detects_corruption(vault, tmp_path, capsys):
    import shutil
    copy = tmp_path / "chain-copy"
    shutil.copytree(vault["chain"], copy)
    log = copy / "chain.log"
    raw = bytearray(log.read_bytes())
    raw[40] ^= 0xFF
    log.write_bytes(bytes(raw))
    assert run("verify", "--chain", copy) == 4
    assert "Invalid at block" in capsys.readouterr().out


def test_bench_size_writes_parseable_csv(tmp_path):
    out = tmp_path / "size.csv"
    assert run("--seed", 9, "bench", "size", "--sizes", "1,2", "--reps", 1,
               "--bits", 512, "--schemes", "twofish,hybrid",
               "--out", out) == 0
    rep = BenchReport.from_csv(out.read_text())
    assert len(rep.rows) == 4
    assert {r.label for r in rep.rows} == {"twofish", "hybrid"}


def test_bench_load_bad_users_is_usage_error(tmp_path):
    assert run("bench", "load", "--users", "0", "--duration", "0.2",
               "--out", tmp_path / "x.csv") == 2
    assert run("bench", "load", "--users", "5..1", "--duration", "0.2",
               "--out", tmp_path / "x.csv") == 2


def test_argparse_usage_failures():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["keygen"])  # missing required flags
    assert exc.value.code == 2
