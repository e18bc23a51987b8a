"""Acceptance suite: one test per criterion, each at its stated tolerance.

Run ``pytest -s tests/test_acceptance.py`` to see a pass/fail line per
criterion.  The seeded 200-instance corpus (dimensions cycling 2..8,
perturbation Hilbert-Schmidt norms in (0, 1]) is shared across criteria.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import max_abs, rel_scale_err
from specshift.cli import EXIT_IO, EXIT_OK, EXIT_PRECONDITION, save_matrix
from specshift.derivatives import (
    d1_divdiff,
    d1_poly,
    d2_divdiff,
    d2_poly,
    remainder_trace,
)
from specshift.fourier_path import (
    FourierFunction,
    d1_fourier,
    d2_fourier,
    remainder_fourier,
)
from specshift.functions import GaussianPacket, monomial
from specshift.oracles import (
    fd_frechet,
    palindrome_sum_identity,
    random_hermitian,
    random_instance,
)
from specshift.pinching import path_decomposition, pinch, resolvent_pinch
from specshift.shift_density import (
    DoiKernel,
    eta_density,
    simplex_doi_difference,
    support_bounds,
)
from specshift.spectral import HermitianOperator, apply_function, eig, schatten_norm

CORPUS_SEED = 77000
CORPUS_SIZE = 200


def _report(num, text):
    print(f"[criterion {num:2d}] PASS  {text}")


@pytest.fixture(scope="module")
def corpus():
    instances = []
    for k in range(CORPUS_SIZE):
        n = 2 + k % 7
        v_norm = 0.25 + 0.75 * ((k * 37) % 100) / 100.0
        A, V = random_instance(CORPUS_SEED + k, n, v_norm)
        eta = eta_density(A, V, grid_size=41, quad_order=64, path_samples=33)
        instances.append({"A": A, "V": V, "eta": eta, "n": n,
                          "hs2": schatten_norm(V, 2) ** 2})
    return instances


def test_criterion_01_trace_formula_monomials(corpus):
    start = time.time()
    worst = 0.0
    for inst in corpus:
        A, V, eta = inst["A"], inst["V"], inst["eta"]
        for r in range(3, 11):
            lhs = remainder_trace(monomial(r), A, V, 3)
            rhs = r * (r - 1) * (r - 2) * eta.moment(r - 3)
            resid = abs(lhs - rhs) / (1.0 + abs(lhs))
            worst = max(worst, resid)
            assert resid <= 1e-6
    elapsed = time.time() - start
    assert elapsed < 30.0
    _report(1, f"trace formula on {CORPUS_SIZE} instances x monomials 3..10; "
               f"worst residual {worst:.2e} (tol 1e-6), {elapsed:.1f}s")


def test_criterion_02_moment_identity(corpus):
    worst = 0.0
    for inst in corpus:
        eta = inst["eta"]
        trv3 = eta.metadata["tr_v3"]
        err = abs(eta.moment(0) - trv3 / 6.0) / (1.0 + abs(trv3))
        worst = max(worst, err)
        assert err <= 1e-8
    _report(2, f"zeroth moment equals Tr(V^3)/6; worst {worst:.2e} (tol 1e-8)")


def test_criterion_03_degenerate_orders(corpus):
    worst = 0.0
    for inst in corpus:
        for r in (0, 1, 2):
            value = abs(remainder_trace(monomial(r), inst["A"], inst["V"], 3))
            worst = max(worst, value)
            assert value <= 1e-10
    # the numerically assembled cancellation stays below tolerance as well
    for inst in corpus[:10]:
        A, V = inst["A"], inst["V"]
        dec = eig(A)
        p = monomial(2)
        assembled = np.trace(
            apply_function(p, A + V).entries - apply_function(p, A).entries
            - d1_divdiff(p, dec, V.entries)
            - 0.5 * d2_divdiff(p, dec, V.entries, V.entries))
        worst = max(worst, abs(assembled))
        assert abs(assembled) <= 1e-10
    _report(3, f"remainders of degree <= 2 vanish; worst {worst:.2e} (tol 1e-10)")


def test_criterion_04_canonical_1x1_density():
    A = HermitianOperator([[0.0]])
    V = HermitianOperator([[1.0]])
    eta = eta_density(A, V, grid_size=1001, quad_order=64)
    x = eta.grid
    exact = np.where((x >= 0) & (x <= 1), 0.5 * (1.0 - x) ** 2, 0.0)
    err = max_abs(eta.values - exact)
    assert err <= 1e-8
    _report(4, f"1x1 density matches (1-x)^2/2; sup error {err:.2e} (tol 1e-8)")


def test_criterion_05_l1_bound(corpus):
    worst = 0.0
    for inst in corpus:
        eta = inst["eta"]
        l1 = eta.l1_norm(resolution=513)
        bound = eta.l1_bound() * (1.0 + 1e-9)
        worst = max(worst, l1 / bound if bound else 0.0)
        assert l1 <= bound
    _report(5, f"||eta||_1 <= (b-a)||V||_2^2 on all instances; "
               f"worst ratio {worst:.3f}")


def test_criterion_06_pinching_pythagoras(corpus):
    worst = 0.0
    for inst in corpus[:30]:
        A, V, hs2 = inst["A"], inst["V"], inst["hs2"]
        for split in (pinch(eig(A), V.entries), resolvent_pinch(A, V.entries)):
            err = abs(hs2 - split.v1_norm ** 2 - split.v2_norm ** 2) / hs2
            worst = max(worst, err)
            assert err <= 1e-12
    for inst in corpus[:8]:
        A, V, hs2 = inst["A"], inst["V"], inst["hs2"]
        for node in path_decomposition(A, V, np.linspace(0, 1, 21)):
            err = abs(hs2 - node.v1_norm ** 2 - node.v2_norm ** 2) / hs2
            worst = max(worst, err)
            assert err <= 1e-12
    _report(6, f"||V||^2 = ||V1||^2 + ||V2||^2 for pinch, resolvent pinch and "
               f"21-node paths; worst {worst:.2e} (tol 1e-12)")


def test_criterion_07_palindrome_identity():
    rng = np.random.default_rng(CORPUS_SEED + 7)
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        half = rng.integers(-1000, 1000, size=(n + 1) // 2)
        seq = [int(v) for v in np.concatenate([half, half[: n // 2][::-1]])]
        check = palindrome_sum_identity(seq)
        assert check.lhs == check.rhs
    _report(7, "double-sum identity exact on 1000 integer palindromes, n <= 20")


def test_criterion_08_route_agreement():
    rng = np.random.default_rng(CORPUS_SEED + 8)
    worst = {"d1_poly": 0.0, "d2_poly": 0.0}
    for k in range(50):
        n = 2 + k % 7
        A, V = random_instance(CORPUS_SEED + 100 + k, n, 0.9)
        X = random_hermitian(rng, n).entries
        Y = random_hermitian(rng, n).entries
        dec = eig(A)
        r = 3 + k % 8
        p = monomial(r)
        e1 = rel_scale_err(d1_divdiff(p, dec, X), d1_poly(A, X, r))
        e2 = rel_scale_err(d2_divdiff(p, dec, X, Y), d2_poly(A, X, Y, r))
        worst["d1_poly"] = max(worst["d1_poly"], e1)
        worst["d2_poly"] = max(worst["d2_poly"], e2)
        assert e1 <= 1e-8 and e2 <= 1e-7

    start = time.time()
    worst.update({"d1_fourier": 0.0, "d2_fourier": 0.0, "remainder": 0.0})
    for k in range(50):
        n = 2 + k % 3
        A, V = random_instance(CORPUS_SEED + 200 + k, n, 0.8)
        A = HermitianOperator(A.entries * (2.0 / schatten_norm(A, "op")))
        X = random_hermitian(rng, n).entries
        Y = random_hermitian(rng, n).entries
        dec = eig(A)
        g = GaussianPacket(center=float(dec.eigenvalues.mean()), width=1.0)
        ff = FourierFunction.from_gaussian(g)     # T = 12/sigma, t-order 128
        e1 = rel_scale_err(d1_fourier(ff, A, X), d1_divdiff(g, dec, X))
        e2 = rel_scale_err(d2_fourier(ff, A, X, Y), d2_divdiff(g, dec, X, Y))
        zt = remainder_trace(g, A, V, 3)
        er = abs(remainder_fourier(ff, A, V) - zt) / (1.0 + abs(zt))
        worst["d1_fourier"] = max(worst["d1_fourier"], e1)
        worst["d2_fourier"] = max(worst["d2_fourier"], e2)
        worst["remainder"] = max(worst["remainder"], er)
        assert e1 <= 1e-6 and e2 <= 1e-5 and er <= 1e-5
    elapsed = time.time() - start
    assert elapsed < 60.0
    _report(8, "route agreement: "
               + ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
               + f"; fourier sub-corpus {elapsed:.1f}s (< 60s)")


def test_criterion_09_finite_difference_order():
    rng = np.random.default_rng(CORPUS_SEED + 9)
    hs = np.array([1e-2, 1e-3, 1e-4])
    slopes = []
    for _ in range(10):
        A = random_hermitian(rng, 4)
        X = random_hermitian(rng, 4).entries
        exact = d1_poly(A, X, 5)
        errs = [max_abs(fd_frechet(monomial(5), A, X, h=h, order=1) - exact)
                for h in hs]
        slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
        slopes.append(slope)
        assert slope >= 1.8
    _report(9, f"central differences converge at order >= 1.8 "
               f"(observed {min(slopes):.2f}..{max(slopes):.2f})")


def test_criterion_10_grid_independence(corpus):
    worst_m = worst_l1 = 0.0
    for inst in corpus[:5]:
        A, V, hs2 = inst["A"], inst["V"], inst["hs2"]
        coarse = eta_density(A, V, grid_size=501, quad_order=64, path_samples=129)
        fine = eta_density(A, V, grid_size=2001, quad_order=64, path_samples=129)
        l1_diff = abs(coarse.l1_norm() - fine.l1_norm())
        worst_l1 = max(worst_l1, l1_diff)
        assert l1_diff <= 1e-6 * hs2
        for k in range(11):
            m_diff = abs(coarse.moment(k) - fine.moment(k))
            worst_m = max(worst_m, m_diff)
            assert m_diff <= 1e-6
    _report(10, f"grid 501 vs 2001: L1 diff {worst_l1:.2e}, "
                f"moment diff {worst_m:.2e} (tol 1e-6)")


def test_criterion_11_doi_representation_identity():
    worst = 0.0
    count = 0
    for j in range(4):
        A, V = random_instance(CORPUS_SEED + 300 + j, 5, 0.9)
        sup = support_bounds(A, V)
        eta = eta_density(A, V, grid_size=21, quad_order=256, path_samples=2049)
        hs2 = schatten_norm(V, 2) ** 2
        rng = np.random.default_rng(CORPUS_SEED + 400 + j)
        for _ in range(5):
            c, d = np.sort(sup.a + sup.width * rng.random(2))
            kern = DoiKernel.from_indicator(float(c), float(d), origin=sup.a)
            lhs = eta.integrate(float(c), float(d))
            rhs = simplex_doi_difference(A, V, kern, base_order=128,
                                         tol=5e-8, max_doublings=5).value
            err = abs(lhs - rhs) / hs2
            worst = max(worst, err)
            count += 1
            assert err <= 1e-6
    assert count == 20
    _report(11, f"int f eta equals the coupling-constant DOI difference for "
                f"20 indicators; worst {worst:.2e} (tol 1e-6)")


def test_criterion_12_cli_determinism(tmp_path):
    def invoke(*args):
        return subprocess.run([sys.executable, "-m", "specshift.cli", *args],
                              capture_output=True, text=True)

    gen = invoke("gen", "--seed", "31", "--n", "4", "--out", str(tmp_path))
    assert gen.returncode == EXIT_OK, gen.stderr
    blobs = []
    for tag in ("first", "second"):
        res = invoke("eta", "--a", f"{tmp_path}/A.json",
                     "--v", f"{tmp_path}/V.json", "--grid-size", "201",
                     "--quad-order", "64", "--out", f"{tmp_path}/{tag}")
        assert res.returncode == EXIT_OK, res.stderr
        blobs.append(((tmp_path / f"{tag}.csv").read_bytes(),
                      (tmp_path / f"{tag}.json").read_bytes()))
    assert blobs[0] == blobs[1]

    # exit-code contract on malformed inputs
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "re": [[0.0, 1.0], [0.0, 0.0]]}))
    assert invoke("eig", str(bad)).returncode == EXIT_PRECONDITION
    assert invoke("eig", str(tmp_path / "missing.json")).returncode == EXIT_IO
    save_matrix(str(tmp_path / "VV.json"),
                HermitianOperator(np.eye(2) * 0.1))
    res = invoke("remainder", "--a", str(bad), "--v", str(tmp_path / "VV.json"),
                 "--function", "monomial:3")
    assert res.returncode == EXIT_PRECONDITION
    res = invoke("remainder", "--a", str(tmp_path / "VV.json"),
                 "--v", str(tmp_path / "VV.json"), "--function", "poly:1,,2")
    assert res.returncode == EXIT_IO
    _report(12, "gen -> eta reruns are byte-identical; exit codes 1/2 honored "
                "on malformed inputs")
