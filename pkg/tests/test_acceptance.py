"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints a ``[PASS]`` or ``[FAIL]`` line with its measured
numbers and runtime; the lines are repeated in the terminal summary.
"""
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import record
from discordqpt import channels, dynamics, oracles
from discordqpt.channels import ChannelKind
from discordqpt.correlators import ModelPoint, load_correlator_table
from discordqpt.dynamics import DynamicsType
from discordqpt.xstate import XState


@contextmanager
def criterion(number, title, time_limit=None):
    info: dict = {}
    start = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        record(f"[FAIL] criterion {number}: {title} ({elapsed:.1f} s) {exc}".splitlines()[0])
        raise
    elapsed = time.perf_counter() - start
    detail = ", ".join(f"{k}={v}" for k, v in info.items())
    if time_limit is not None and elapsed >= time_limit:
        record(f"[FAIL] criterion {number}: {title} ({elapsed:.1f} s >= {time_limit} s) {detail}")
        pytest.fail(f"runtime {elapsed:.1f} s exceeds {time_limit} s")
    record(f"[PASS] criterion {number}: {title} ({elapsed:.1f} s) {detail}")


def test_criterion_1_sudden_change_datum():
    with criterion(1, "BPF p_sc at lambda=0.7, gamma=0.7", time_limit=10) as info:
        sc = dynamics.detect_p_sc(ModelPoint.xy(0.7, 0.7, 1), ChannelKind.BPF)
        info["p_sc"] = f"{sc.p_sc:.5f}"
        assert sc.found and 0.109 <= sc.p_sc <= 0.119


def test_criterion_2_sign_correspondence():
    with criterion(2, "BPF(gamma) == BF(-gamma); BPF(-0.7) is TypeIII", time_limit=10) as info:
        grid = dynamics.default_p_grid()
        bpf = dynamics.trajectory(ModelPoint.xy(0.7, 0.7), ChannelKind.BPF, grid)
        bf = dynamics.trajectory(ModelPoint.xy(0.7, -0.7), ChannelKind.BF, grid)
        dev = max(
            float(np.max(np.abs(getattr(bpf, k) - getattr(bf, k))))
            for k in ("mutual", "classical", "discord")
        )
        info["max_dev"] = f"{dev:.2e}"
        assert len(grid) == 1001 and dev < 1e-12
        neg = ModelPoint.xy(0.7, -0.7)
        kind = dynamics.classify(dynamics.trajectory(neg, ChannelKind.BPF, grid))
        sc = dynamics.detect_p_sc(neg, ChannelKind.BPF)
        info["type"] = kind.value
        info["p_sc"] = sc.p_sc
        assert kind is DynamicsType.TYPE_III and not sc.found


def test_criterion_3_pf_type_two():
    with criterion(3, "PF TypeII at lambda=0.5, gamma=1", time_limit=10) as info:
        point = ModelPoint.xy(0.5, 1.0)
        traj = dynamics.trajectory(point, ChannelKind.PF)
        kind = dynamics.classify(traj)
        interval = dynamics.q_exceeds_c_interval(traj)
        sc = dynamics.detect_p_sc(point, ChannelKind.PF)
        limit = dynamics.limit_triple(point, ChannelKind.PF)
        after = traj.p_grid > sc.p_sc
        c_dev = float(np.max(np.abs(traj.classical[after] - limit.mutual)))
        q_end = float(traj.discord[-1])
        info.update(type=kind.value, q_gt_c=interval, p_sc=f"{sc.p_sc:.4f}",
                    c_dev=f"{c_dev:.1e}", q_end=f"{q_end:.1e}")
        assert kind is DynamicsType.TYPE_II
        assert interval is not None and interval[1] > interval[0]
        assert c_dev < 1e-6
        assert traj.p_grid[-1] == 0.999 and q_end < 1e-3


@pytest.mark.slow
def test_criterion_4_divergence_indicator():
    with criterion(4, "lambda-scan divergence indicator, BPF(0.5) and PF(1)", time_limit=180) as info:
        grid = np.round(np.arange(0.50, 0.995, 0.01), 10)
        assert grid[0] == 0.5 and grid[-1] == 0.99 and len(grid) == 50
        for name, channel, gamma in (("BPF", ChannelKind.BPF, 0.5), ("PF", ChannelKind.PF, 1.0)):
            res = dynamics.scan("lambda", grid, {"gamma": gamma}, channel)
            d = {round(float(g), 10): v for g, v in zip(grid, res.derivative)}
            ratio = abs(d[0.99]) / abs(d[0.89])
            tail = [abs(d[round(g, 10)]) for g in (0.95, 0.96, 0.97, 0.98, 0.99)]
            monotone = all(b > a for a, b in zip(tail, tail[1:]))
            info[f"{name}_ratio"] = f"{ratio:.2f}"
            info[f"{name}_monotone"] = monotone
            assert ratio >= 2.0 and monotone
            assert res.indicator.fires and res.indicator.monotone_tail


@pytest.mark.slow
def test_criterion_5_anisotropy_transition():
    with criterion(5, "gamma-scan at lambda=0.5: PF symmetry, BPF/BF existence", time_limit=180) as info:
        half = np.round(np.arange(0.05, 1.0001, 0.05), 10)
        grid = np.concatenate([-half[::-1], half])
        pf = dynamics.scan("gamma", grid, {"lambda": 0.5}, ChannelKind.PF)
        by_gamma = dict(zip(np.round(grid, 10), pf.p_sc))
        assert all(v is not None for v in pf.p_sc)
        asym = max(abs(by_gamma[g] - by_gamma[-g]) for g in half)
        info["pf_asymmetry"] = f"{asym:.1e}"
        assert asym < 1e-10
        for name, channel, sign in (("BPF", ChannelKind.BPF, 1), ("BF", ChannelKind.BF, -1)):
            res = dynamics.scan("gamma", grid, {"lambda": 0.5}, channel)
            present = {g for g, v in zip(grid, res.p_sc) if v is not None}
            info[f"{name}_present"] = f"{len(present)}/{len(grid)}"
            assert present == {g for g in grid if sign * g > 0}


@pytest.mark.slow
def test_criterion_6_oracle_suite():
    with criterion(6, "oracle suite on 1000 seeded states", time_limit=300) as info:
        results = oracles.run_all(seed=0, n_states=1000)
        for r in results:
            info[r.name] = f"max {r.max_dev:.1e}"
        failed = [r.name for r in results if not r.passed]
        assert not failed, f"failed oracles: {failed}"
        names = {r.name for r in results}
        assert names == {"coefficient_maps_vs_kraus", "spectrum_vs_dense", "analytic_vs_numeric_discord",
                         "kraus_completeness", "pure_state_equal_split"}


def test_criterion_7_ad_asymptotics():
    with criterion(7, "AD: I, C, Q < 1e-3 at p=0.999; exact |00> at p=1", time_limit=5) as info:
        rng = np.random.default_rng(7)
        points = [(lam, g) for lam in (0.0, 0.5, 1.0, 2.5, 10.0) for g in (-1.0, 0.0, 0.5, 1.0)]
        points += [(float(rng.uniform(0, 5)), float(rng.uniform(-1, 1))) for _ in range(20)]
        worst = 0.0
        for lam, g in points:
            point = ModelPoint.xy(lam, g)
            traj = dynamics.trajectory(point, ChannelKind.AD, [0.0, 0.999])
            worst = max(worst, *traj.triples[-1])
            final = channels.evolve_two_qubit(dynamics.resolve_state(point), ChannelKind.AD, 1.0)
            assert final == XState(1.0, 0.0, 0.0, 0.0, 0.0)
        info["points"] = len(points)
        info["worst"] = f"{worst:.1e}"
        assert worst < 1e-3


def test_criterion_8_xxz_regions(xxz_table):
    with criterion(8, "XXZ p_sc regions and PF indicator near delta=1") as info:
        table = load_correlator_table(xxz_table)
        grid = np.array(sorted(pt.delta for pt, _ in table))
        inside = {d for d in grid if -1 < d < 1}
        below = {d for d in grid if d < -1}
        assert inside and below and inside | below == set(grid)
        found = {}
        for channel in (ChannelKind.PF, ChannelKind.BF, ChannelKind.BPF):
            res = dynamics.scan("delta", grid, channel=channel, table=table, critical=1.0)
            found[channel] = (res, {d for d, v in zip(grid, res.p_sc) if v is not None})
        assert found[ChannelKind.PF][1] == inside
        assert found[ChannelKind.BF][1] == below
        assert found[ChannelKind.BPF][1] == below
        ind = found[ChannelKind.PF][0].indicator
        info.update(rows=len(grid), pf_ratio=f"{ind.ratio:.2f}", monotone=ind.monotone_tail)
        assert ind.near == 0.99 and ind.fires
