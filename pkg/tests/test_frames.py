"""Frame layout, observation window, and snapshot tests."""

import numpy as np
import pytest

from otfskit.channel import effective_channel
from otfskit.frames import (
    SnapshotSet,
    average_frames,
    build_frame,
    build_layout,
    extract_observation,
    generate_snapshots,
    noise_std_from_psnr,
    read_data_positions,
    window_anchor,
    window_index_map,
)
from otfskit.grid import GridConfig, PathSet, PathSpec, sample_paths
from otfskit.rng import stream

CFG = GridConfig()


def classify_brute(cfg):
    """Exhaustive double-loop guard classification oracle."""
    M, N, Mt, Nn = cfg.M, cfg.N, cfg.M_tau, cfg.N_nu
    sets = {"pilot": set(), "int": set(), "nu": set(), "tau": set(), "data": set()}
    for l in range(M):
        for k in range(N):
            lc = l <= Mt - 1 or l >= M - Mt
            kc = k <= Nn - 1 or k >= N - Nn
            lm = Mt - 1 <= l <= M - Mt
            km = Nn - 1 <= k <= N - Nn
            if (l, k) == (0, 0):
                sets["pilot"].add((l, k))
            elif lc and kc:
                sets["int"].add((l, k))
            elif lc and km:
                sets["nu"].add((l, k))
            elif lm and kc:
                sets["tau"].add((l, k))
            else:
                sets["data"].add((l, k))
    return sets


@pytest.mark.parametrize("dims", [(32, 32, 8, 8), (16, 16, 4, 4), (24, 20, 6, 4)])
def test_layout_partitions_grid(dims):
    M, N, Mt, Nn = dims
    cfg = GridConfig(M=M, N=N, M_tau=Mt, N_nu=Nn)
    lay = build_layout(cfg)
    groups = [
        {lay.pilot_pos},
        set(lay.guard_int),
        set(lay.guard_nu),
        set(lay.guard_tau),
        set(lay.data_positions),
    ]
    sizes = sum(len(g) for g in groups)
    union = set().union(*groups)
    assert sizes == M * N
    assert len(union) == M * N


def test_layout_matches_brute_force_oracle():
    cfg = GridConfig(M=16, N=16, M_tau=4, N_nu=4)
    lay = build_layout(cfg)
    oracle = classify_brute(cfg)
    assert set(lay.guard_int) == oracle["int"]
    assert set(lay.guard_nu) == oracle["nu"]
    assert set(lay.guard_tau) == oracle["tau"]
    assert set(lay.data_positions) == oracle["data"]


def test_layout_table1_counts():
    lay = build_layout(CFG)
    counts = (len(lay.guard_int), len(lay.guard_nu), len(lay.guard_tau), len(lay.data_positions))
    assert sum(counts) + 1 == 32 * 32
    assert counts == (255, 256, 256, 256)


def test_degenerate_geometry_has_no_data():
    cfg = GridConfig(M=16, N=16, M_tau=8, N_nu=8)
    lay = build_layout(cfg)
    assert len(lay.data_positions) == 0
    assert 1 + len(lay.guard_int) + len(lay.guard_nu) + len(lay.guard_tau) == 256


def test_build_frame_energy_and_readback():
    lay = build_layout(CFG, sigma_p=2.0)
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=len(lay.data_positions))
    symbols = 2.0 * bits - 1.0 + 0j  # BPSK
    X = build_frame(lay, symbols)
    assert X.data[0, 0] == 2.0
    assert abs(np.sum(np.abs(X.data) ** 2) - (4.0 + len(symbols))) < 1e-9
    assert np.allclose(read_data_positions(X.data, lay), symbols)
    with pytest.raises(ValueError):
        build_frame(lay, symbols[:-1])


def test_empty_data_frame_is_pilot_impulse():
    cfg = GridConfig(M=16, N=16, M_tau=8, N_nu=8)
    lay = build_layout(cfg, sigma_p=3.0)
    X = build_frame(lay, np.array([], dtype=complex))
    expect = np.zeros((16, 16), dtype=complex)
    expect[0, 0] = 3.0
    assert np.array_equal(X.data, expect)


def test_window_index_map_documented_values():
    rows, cols = window_index_map(CFG)
    assert rows[0] == 30
    assert rows[2] == 0
    assert cols[4] == 0
    # injective into the grid
    pairs = {(r, c) for r in rows for c in cols}
    assert len(pairs) == CFG.M_tau * CFG.N_nu
    assert len(set(rows)) == len(rows) and len(set(cols)) == len(cols)


def test_extract_observation_identity_channel_anchor():
    lay = build_layout(CFG, sigma_p=4.0)
    Y = np.zeros((32, 32), dtype=complex)
    Y[0, 0] = 4.0  # pilot through the identity channel, noiseless
    win = extract_observation(Y, lay, CFG)
    u0, v0 = window_anchor(CFG)
    assert win[u0, v0] == 1.0
    assert np.sum(np.abs(win)) == 1.0


def test_extract_observation_integer_channel_readoff():
    paths = PathSet(
        (PathSpec(0.8 - 0.3j, 1, 0.0, 2, 0.0), PathSpec(-0.2 + 0.5j, 3, 0.0, -1, 0.0))
    )
    full = effective_channel(paths, CFG, scope="full").full_grid
    lay = build_layout(CFG, sigma_p=2.0)
    win = extract_observation(2.0 * full, lay, CFG)
    u0, v0 = window_anchor(CFG)
    assert abs(win[u0 + 1, v0 + 2] - (0.8 - 0.3j)) < 1e-12
    assert abs(win[u0 + 3, v0 - 1] - (-0.2 + 0.5j)) < 1e-12


def test_extract_observation_rejects_zero_pilot():
    lay = build_layout(CFG)
    object.__setattr__(lay, "pilot_amp", 0.0)
    with pytest.raises(ValueError):
        extract_observation(np.zeros((32, 32), complex), lay, CFG)


def test_pure_noise_window_variance():
    lay = build_layout(CFG, sigma_p=2.0)
    psnr_db = 7.0
    sigma = noise_std_from_psnr(psnr_db, 2.0)
    rng = np.random.default_rng(5)
    acc = 0.0
    n = 1000
    for _ in range(n):
        noise = (rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)))
        noise *= sigma / np.sqrt(2)
        win = extract_observation(noise, lay, CFG)
        acc += np.mean(np.abs(win) ** 2)
    empirical = acc / n
    expected = (sigma / 2.0) ** 2
    assert abs(empirical - expected) / expected < 0.10


def test_snapshots_noiseless_limit():
    paths = sample_paths(CFG, 5, stream(9, 0, "channel"))
    snaps = generate_snapshots(paths, CFG, np.inf, stream(9, 0, "noise"))
    h = effective_channel(paths, CFG, scope="window").window
    assert snaps.F == CFG.F
    for f in range(snaps.F):
        assert np.allclose(snaps.frames[f], h, atol=0)


def test_snapshot_noise_level_matches_analytic_nmse():
    psnr_db = 10.0
    trials = 500
    ratio = []
    for t in range(trials):
        paths = sample_paths(CFG, 5, stream(13, t, "channel"))
        h = effective_channel(paths, CFG, scope="window").window
        snaps = generate_snapshots(paths, CFG, psnr_db, stream(13, t, "noise"), h_window=h)
        h_energy = np.sum(np.abs(h) ** 2)
        analytic = CFG.M_tau * CFG.N_nu * 10 ** (-psnr_db / 10) / h_energy
        empirical = np.sum(np.abs(snaps.frames[0] - h) ** 2) / h_energy
        ratio.append(empirical / analytic)
    assert abs(np.mean(ratio) - 1.0) < 0.10


def test_cross_frame_noise_whiteness():
    paths = sample_paths(CFG, 5, stream(21, 0, "channel"))
    h = effective_channel(paths, CFG, scope="window").window
    n = 1000
    corrs = []
    f0 = []
    f1 = []
    for t in range(n):
        snaps = generate_snapshots(paths, CFG, 10.0, stream(21, t, "noise"), h_window=h)
        f0.append((snaps.frames[0] - h).ravel())
        f1.append((snaps.frames[1] - h).ravel())
    a = np.concatenate(f0)
    b = np.concatenate(f1)
    corr = np.abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    assert corr <= 0.05


def test_average_frames_basics():
    rng = np.random.default_rng(2)
    w = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    stack = np.stack([w, w, w])
    assert np.allclose(average_frames(stack), w, atol=0)
    assert np.allclose(average_frames(w[None]), w, atol=0)
    perm = np.stack([stack[2], stack[0], stack[1]])
    assert np.allclose(average_frames(perm), average_frames(stack), atol=0)
    with pytest.raises(ValueError):
        average_frames(np.zeros((0, 4, 4)))


def test_averaging_gain_matches_variance_of_mean_law():
    # 10 log10(F) dB NMSE gap between single-frame and F-frame averaging
    psnr_db = 10.0
    trials = 2000
    single = 0.0
    avg = 0.0
    for t in range(trials):
        paths = sample_paths(CFG, 5, stream(31, t, "channel"))
        h = effective_channel(paths, CFG, scope="window").window
        snaps = generate_snapshots(paths, CFG, psnr_db, stream(31, t, "noise"), h_window=h)
        e = np.sum(np.abs(h) ** 2)
        single += np.sum(np.abs(snaps.frames[0] - h) ** 2) / e
        avg += np.sum(np.abs(average_frames(snaps.frames) - h) ** 2) / e
    gap_db = 10 * np.log10(single / avg)
    assert abs(gap_db - 10 * np.log10(CFG.F)) < 0.5


def test_snapshotset_validation():
    with pytest.raises(ValueError):
        SnapshotSet(frames=np.zeros((4, 4)), psnr_db=10.0)
