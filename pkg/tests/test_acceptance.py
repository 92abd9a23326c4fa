"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see every criterion
line.  Criteria 2 and 6 assert external reference targets that the
implemented definitions provably cannot reach; they are expected to fail
and their messages carry the analysis (see README and the failure text).
"""

import numpy as np
import pytest

from mmwave_bitalloc.bitalloc import (
    allocate_crlb,
    allocate_full_search,
    complexity_report,
    enumerate_bset,
    gain_table,
    trace_mse_objective,
)
from mmwave_bitalloc.channel import (
    ArrayGeometry,
    ChannelConfig,
    channel_from_spectrum,
    generate_channel,
)
from mmwave_bitalloc.checks import count_by_budget_dp
from mmwave_bitalloc.combining import design_unconstrained_combiner, equalize
from mmwave_bitalloc.config import PRESET_CHANNEL_8, PRESET_CHANNEL_12
from mmwave_bitalloc.metrics import (
    NoiseModel,
    analytic_mse,
    crlb,
    simulate_mc,
    snr_sweep,
)
from mmwave_bitalloc.quantization import (
    DEFAULT_DISTORTION,
    BitAllocation,
    build_aqnm,
    train_lloyd_max,
)

REFERENCE_DISTORTION = {1: 0.3634, 2: 0.1175, 3: 0.03454, 4: 0.009497, 5: 0.002499}

REFERENCE_BSET_SIZES = {8: 1878, 12: 133253}

REFERENCE_COMPLEXITY = [
    ("FS", 8, 1878, 1622592, 1592544, 0),
    ("GA", 8, 324, 279936, 274752, 0),
    ("CRLB", 8, 1878, 864, 760, 13146),
    ("FS", 12, 133253, 179092032, 175893960, 0),
    ("GA", 12, 2025, 2721600, 2673000, 0),
    ("CRLB", 12, 133253, 1296, 1140, 1465783),
]


def _report(criterion: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def test_criterion_1_distortion_table():
    worst = 0.0
    for bits, reference in REFERENCE_DISTORTION.items():
        trained = train_lloyd_max(bits).distortion
        worst = max(worst, abs(trained - reference))
    passed = worst <= 1e-3
    _report("1 (distortion table)", passed, f"max abs error {worst:.2e} (tol 1e-3)")
    assert passed


def test_criterion_2_feasible_set_sizes():
    enumerated = {n: enumerate_bset(n).cardinality() for n in (8, 12)}
    dp = {n: count_by_budget_dp(n) for n in (8, 12)}
    assert enumerated == dp, "enumerator and DP counter disagree"

    passed = enumerated == REFERENCE_BSET_SIZES
    _report(
        "2 (feasible-set sizes)",
        passed,
        f"computed {enumerated} (DP-cross-validated), reference {REFERENCE_BSET_SIZES}",
    )
    assert passed, (
        f"enumerated feasible-set sizes {enumerated} do not match the reference "
        f"targets {REFERENCE_BSET_SIZES}. The enumeration and an independent "
        "dynamic-programming counter agree exactly, and no cost model or budget "
        "rule of the stated form (2**b costs, bits 1..4, all-2-bit budget, "
        "strict or non-strict) reproduces the reference values; both reference "
        "counts are smaller by exactly 18, which cannot equal any union of "
        "permutation classes of the cube, so the targets are unreachable from "
        "the stated set definition."
    )


def test_criterion_3_complexity_cells():
    failures = []
    for method, n_s, evals, mults, adds, real_adds in REFERENCE_COMPLEXITY:
        rep = complexity_report(method, n_s, 32, 64, 4, evals)
        if (rep.complex_mults, rep.complex_adds, rep.real_adds) != (mults, adds, real_adds):
            failures.append((method, n_s, rep))
    passed = not failures
    _report("3 (operation-count cells)", passed,
            f"{len(REFERENCE_COMPLEXITY) - len(failures)}/{len(REFERENCE_COMPLEXITY)} cells exact")
    assert passed, failures


def test_criterion_4_mse_achieves_lower_bound():
    rng = np.random.default_rng(2024)
    geometry = ArrayGeometry(num_tx_antennas=16, num_rx_antennas=16)
    worst = 0.0
    num_instances = 1000
    for i in range(num_instances):
        n_s = int(rng.choice([2, 4, 8]))
        sigma = np.sort(10.0 ** rng.uniform(-1.0, 1.0, size=n_s))[::-1]
        channel = channel_from_spectrum(sigma, geometry, rng_seed=int(rng.integers(2**31)))
        combiner = design_unconstrained_combiner(channel)
        bits = BitAllocation(tuple(int(b) for b in rng.integers(1, 5, size=n_s)))
        aqnm = build_aqnm(channel, combiner, bits)
        equalized = equalize(combiner, channel.sigma, aqnm.w_alpha)
        noise = NoiseModel.from_snr_db(float(rng.uniform(-10.0, 30.0)))
        mse = analytic_mse(channel, equalized, aqnm, noise).mse_matrix
        bound = crlb(channel, equalized, aqnm, noise)
        worst = max(worst, float(np.linalg.norm(mse - bound) / np.linalg.norm(mse)))
    passed = worst <= 1e-9
    _report("4 (MSE achieves the lower bound)", passed,
            f"{num_instances} instances, worst relative gap {worst:.2e} (tol 1e-9)")
    assert passed


@pytest.fixture(scope="module")
def preset8():
    return generate_channel(PRESET_CHANNEL_8)


@pytest.fixture(scope="module")
def preset12():
    return generate_channel(PRESET_CHANNEL_12)


def test_criterion_5_monte_carlo_consistency(preset8):
    combiner = design_unconstrained_combiner(preset8)
    rng = np.random.default_rng(555)
    num_runs = 200
    hits = 0
    for run in range(num_runs):
        bits = BitAllocation(tuple(int(b) for b in rng.integers(1, 5, size=8)))
        aqnm = build_aqnm(preset8, combiner, bits)
        equalized = equalize(combiner, preset8.sigma, aqnm.w_alpha)
        noise = NoiseModel.from_snr_db(float(rng.uniform(0.0, 20.0)))
        analytic = analytic_mse(preset8, equalized, aqnm, noise).trace_mse
        mc = simulate_mc(
            preset8, equalized, aqnm, noise,
            num_symbols=100_000, rng_seed=run,
        )
        if abs(mc.mc_trace_mse - analytic) <= 3.0 * mc.mc_std_err:
            hits += 1
    passed = hits >= int(np.ceil(0.99 * num_runs))
    _report("5 (Monte-Carlo consistency)", passed,
            f"{hits}/{num_runs} runs within 3 standard errors (need >= 198)")
    assert passed


_ORDERED_POLICIES = ("no-quantization", "crlb", "all-2-bit", "all-1-bit")


def _ordering_violations(channel):
    grid = list(range(-10, 31, 5))
    curves = {
        policy: [row.delta_analytic for row in snr_sweep(channel, policy, grid)]
        for policy in _ORDERED_POLICIES
    }
    violations = []
    for i, snr in enumerate(grid):
        chain = [curves[p][i] for p in _ORDERED_POLICIES]
        for (pa, va), (pb, vb) in zip(
            zip(_ORDERED_POLICIES, chain), zip(_ORDERED_POLICIES[1:], chain[1:])
        ):
            if va > vb * (1 + 1e-12):
                violations.append(f"snr {snr}: {pa} ({va:.4g}) > {pb} ({vb:.4g})")
    return violations


def test_criterion_6a_curve_ordering(preset8, preset12):
    violations = _ordering_violations(preset8) + _ordering_violations(preset12)
    passed = not violations
    _report("6a (curve ordering)", passed,
            "ordering no-quantization <= gain-scan <= all-2-bit <= all-1-bit "
            + ("holds on both presets" if passed else f"violated {len(violations)} times"))
    assert passed, (
        "trace-MSE curve ordering violated: the gain-sum allocation "
        "concentrates bits on the strongest path in the quantization-limited "
        "regime and its trace MSE exceeds the all-2-bit baseline; first "
        f"violations: {violations[:4]}"
    )


def _near_optimality_ratios(num_streams, channel_seed_base, snrs=(0.0, 10.0, 20.0)):
    space = enumerate_bset(num_streams)
    geometry = ArrayGeometry(num_tx_antennas=32, num_rx_antennas=64)
    ratios = []
    for i in range(100):
        config = ChannelConfig(
            geometry=geometry,
            num_streams=num_streams,
            num_clusters=num_streams,
            num_rays_per_cluster=10,
            dominant_boost_factor=3.0,
            rng_seed=channel_seed_base + i,
        )
        channel = generate_channel(config)
        combiner = design_unconstrained_combiner(channel)
        objective = None
        for snr in snrs:
            noise = NoiseModel.from_snr_db(snr)
            fs = allocate_full_search(space, channel, combiner, noise)
            scan = allocate_crlb(space, gain_table(channel, combiner, noise))
            objective = trace_mse_objective(channel, combiner, noise)
            ratios.append(objective(scan.allocation.array) / fs.objective)
    return np.asarray(ratios)


def test_criterion_6b_near_optimality():
    ratios = np.concatenate(
        [_near_optimality_ratios(8, 3000), _near_optimality_ratios(12, 4000)]
    )
    median = float(np.median(ratios))
    worst = float(np.max(ratios))
    passed = median <= 1.05 and worst <= 1.25
    _report("6b (near-optimality)", passed,
            f"trace-MSE ratio gain-scan/full-search: median {median:.3f} "
            f"(need <= 1.05), max {worst:.3f} (need <= 1.25)")
    assert passed, (
        f"gain-scan allocation is not near-optimal: median ratio {median:.3f}, "
        f"max {worst:.3f}. Maximizing the summed per-path gains rewards "
        "spending the whole bit budget on the strongest path (the per-path "
        "gain saturates at (1-f)/f, which grows 60x from 1 to 4 bits), while "
        "the trace MSE is the sum of the RECIPROCAL gains and is minimized by "
        "balanced allocations; the two objectives disagree whenever any path "
        "is quantization-limited, so the stated ratio bounds are unreachable "
        "for the summed-gain rule."
    )


def test_criterion_7_allocator_oracle_equivalence():
    rng = np.random.default_rng(77)
    geometry = ArrayGeometry(num_tx_antennas=8, num_rx_antennas=8)
    checked = 0
    for n_s in (1, 2, 3):
        for budget in (4.0 * n_s, 16.0 * n_s):  # all-2-bit budget and the full cube
            space = enumerate_bset(n_s, power_budget=budget)
            for _ in range(4):
                sigma = np.sort(10.0 ** rng.uniform(-0.5, 1.0, size=n_s))[::-1]
                channel = channel_from_spectrum(
                    sigma, geometry, rng_seed=int(rng.integers(2**31))
                )
                combiner = design_unconstrained_combiner(channel)
                noise = NoiseModel.from_snr_db(float(rng.uniform(-5.0, 25.0)))
                table = gain_table(channel, combiner, noise)

                best_gain, best_gain_bits = -np.inf, None
                best_trace, best_trace_bits = np.inf, None
                for member in space:
                    total = 0.0
                    for i, b in enumerate(member.bits):
                        f = DEFAULT_DISTORTION.factor(b)
                        s2 = sigma[i] ** 2
                        total += s2 / (noise.sigma_n_sq + (f / (1 - f)) * (1 + s2))
                    if total > best_gain:
                        best_gain, best_gain_bits = total, member.bits
                    aqnm = build_aqnm(channel, combiner, member)
                    eq = equalize(combiner, channel.sigma, aqnm.w_alpha)
                    trace = analytic_mse(channel, eq, aqnm, noise).trace_mse
                    if trace < best_trace:
                        best_trace, best_trace_bits = trace, member.bits

                assert allocate_crlb(space, table).allocation.bits == best_gain_bits
                assert (
                    allocate_full_search(space, channel, combiner, noise).allocation.bits
                    == best_trace_bits
                )
                checked += 1
    _report("7 (allocator oracle equivalence)", True,
            f"{checked} instances with N_s <= 3 match brute force exactly")


def test_criterion_8_quantizer_model_fidelity(preset8):
    combiner = design_unconstrained_combiner(preset8)
    allocation = BitAllocation((2,) * 8)
    aqnm = build_aqnm(preset8, combiner, allocation)
    equalized = equalize(combiner, preset8.sigma, aqnm.w_alpha)
    noise = NoiseModel.from_snr_db(10.0)
    linear = simulate_mc(
        preset8, equalized, aqnm, noise, num_symbols=100_000, rng_seed=81
    )
    lloyd = simulate_mc(
        preset8, equalized, aqnm, noise, num_symbols=100_000, rng_seed=82,
        quantizer_mode="lloyd-max",
    )
    rel = abs(lloyd.mc_trace_mse - linear.mc_trace_mse) / linear.mc_trace_mse
    passed = rel <= 0.10
    _report("8 (quantizer-model fidelity)", passed,
            f"lloyd-max vs linear-surrogate trace MSE differ by {100 * rel:.2f}% "
            "(tol 10%)")
    assert passed
