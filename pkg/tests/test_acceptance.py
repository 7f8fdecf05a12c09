"""Acceptance suite: one test per criterion, run at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass line per
criterion.
"""

import math

import numpy as np
import pytest

from pmod import core, families, structure
from pmod import linalg as la

from conftest import (
    d2_display_pair,
    shared_eigenline_module,
    atomic_emergence_pair,
    leg_defect,
    random_d2,
    random_gp,
    random_unitary,
    restricted,
)

R2 = 1 / np.sqrt(2)


def _pass(criterion, text):
    print(f"PASS criterion {criterion}: {text}")


def _dims(i):
    return 1 + i % 3, 1 + (i // 3) % 3


# ---------------------------------------------------------------------------


def test_criterion_01_pythagorean_identity_and_conservation():
    produced = []

    # Atomic, GP, D2, random (both classes and the boundary), duals.
    for word in ("0", "01", "001", "0111"):
        produced.append(families.atomic_module(families.AtomicLabel(word, np.exp(0.3j))))
    rng = np.random.default_rng(1)
    for length in (1, 2, 3, 4):
        produced.append(families.gp_module(random_gp(rng, length)))
    d2a, d2b = d2_display_pair()
    produced += [d2a, d2b]
    rep = families.d2_fuse(d2a, d2b)
    produced += list(rep.blocks)
    produced += [s.as_module() for split in rep.scalar_splits if split for s in split]
    for d in range(1, 6):
        produced.append(families.random_module(d, "N", seed=10 + d))
        produced.append(families.random_module(d, "M", seed=20 + d))
    produced.append(families.random_module(3, "M", seed=30, zero_eigenvalues=1))

    # Fusion products across families, the Kawamura product, duals.
    produced.append(core.boxtimes(families.random_module(2, "M", seed=41),
                                  families.random_module(3, "M", seed=42)))
    produced.append(core.boxtimes(families.atomic_module(families.AtomicLabel("01", 1j)),
                                  families.random_module(2, "N", seed=43)))
    produced.append(core.boxtimes(families.gp_module(random_gp(rng, 2)),
                                  families.gp_module(random_gp(rng, 3))))
    produced.append(core.boxtimes(core.scalar_module(0.5, np.sqrt(3) / 2),
                                  shared_eigenline_module()))
    produced.append(core.kawamura_tensor(families.random_module(2, "N", seed=44),
                                         families.random_module(2, "N", seed=45)))
    for d in (1, 2, 3):
        produced.append(core.dual_module(families.random_module(d, "N", seed=50 + d)))

    worst = max(core.pythagorean_residual(m) for m in produced)
    assert worst <= 1e-9, worst

    # Conservation over all words of length <= 6.
    rng = np.random.default_rng(2)
    worst_cons = 0.0
    for i in range(100):
        d = 1 + i % 5
        m = families.random_module(d, "MN"[i % 2], seed=1000 + i)
        xi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        xi /= np.linalg.norm(xi)
        worst_cons = max(worst_cons, core.conservation_defect(m, xi, 6))
    assert worst_cons <= 1e-9, worst_cons
    _pass(1, f"identity residual {worst:.2e}, conservation defect {worst_cons:.2e}")


def test_criterion_02_monoidal_laws():
    rng = np.random.default_rng(3)
    worst = {"assoc": 0.0, "flip": 0.0, "unit": 0.0, "distrib": 0.0, "stable": 0.0}
    for i in range(50):
        d1, d2 = _dims(i)
        d3 = 1 + (i // 9) % 3
        m = families.random_module(d1, "M", seed=2000 + i)
        mt = families.random_module(d2, "M", seed=3000 + i)
        mh = families.random_module(d3, "M", seed=4000 + i)

        lhs = core.boxtimes(core.boxtimes(m, mt), mh)
        rhs = core.boxtimes(m, core.boxtimes(mt, mh))
        worst["assoc"] = max(worst["assoc"], leg_defect(lhs, rhs))

        ab, ba = core.boxtimes(m, mt), core.boxtimes(mt, m)
        u = core.flip_permutation(d1, d2)
        worst["flip"] = max(worst["flip"], leg_defect(core.conjugate(ab, u), ba))

        worst["unit"] = max(
            worst["unit"],
            leg_defect(core.boxtimes(m, core.unit_module()), m),
            leg_defect(core.boxtimes(core.unit_module(), m), m),
        )

        # Left distributivity up to the block shuffle; right is the identity.
        left = core.boxtimes(mh, core.direct_sum(m, mt))
        split = core.direct_sum(core.boxtimes(mh, m), core.boxtimes(mh, mt))
        s = np.zeros((d3 * (d1 + d2), d3 * (d1 + d2)), dtype=np.complex128)
        for k in range(d3):
            for j in range(d1):
                s[k * d1 + j, k * (d1 + d2) + j] = 1.0
            for j in range(d2):
                s[d3 * d1 + k * d2 + j, k * (d1 + d2) + d1 + j] = 1.0
        worst["distrib"] = max(worst["distrib"], leg_defect(core.conjugate(left, s), split))
        right = core.boxtimes(core.direct_sum(m, mt), mh)
        rsplit = core.direct_sum(core.boxtimes(m, mh), core.boxtimes(mt, mh))
        worst["distrib"] = max(worst["distrib"], leg_defect(right, rsplit))

        u1, u2 = random_unitary(rng, d1), random_unitary(rng, d2)
        conj = core.boxtimes(core.conjugate(m, u1), core.conjugate(mt, u2))
        direct = core.conjugate(core.boxtimes(m, mt), la.kron(u1, u2))
        worst["stable"] = max(worst["stable"], leg_defect(conj, direct))

    assert worst["assoc"] <= 1e-9, worst
    assert worst["flip"] <= 1e-10, worst
    assert worst["unit"] <= 1e-10, worst
    assert worst["distrib"] <= 1e-9, worst
    assert worst["stable"] <= 1e-9, worst
    _pass(2, ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))


def test_criterion_03_p_dimension_multiplicative():
    for i in range(25):
        d1, d2 = _dims(i)
        m = families.random_module(d1, "M", seed=5000 + i)
        mt = families.random_module(d2, "M", seed=6000 + i)
        prod = core.boxtimes(m, mt)
        rep = structure.decompose_full(prod, seed=i)
        assert sum(s.dimension for s in rep.summands) == d1 * d2
        assert rep.residual_dimension == 0
        eye = np.eye(prod.dim)
        for s in rep.summands:
            v = s.isometry
            assert np.linalg.norm(v.conj().T @ v - np.eye(s.dimension)) <= 1e-8
            for leg in prod.legs:
                assert np.linalg.norm((eye - v @ v.conj().T) @ leg @ v) <= 1e-8
    _pass(3, "25 class-M fusions decompose to total dimension d*dt")


def test_criterion_04_shared_eigenline_module():
    m = shared_eigenline_module()
    cp = structure.complete_submodule(m)
    target = np.array([1, 1], dtype=complex) / np.sqrt(2)
    angle = np.arccos(min(1.0, abs(np.vdot(cp.isometry[:, 0], target))))
    assert cp.p_dimension == 1
    assert angle <= 1e-8

    n = core.scalar_module(0.5, np.sqrt(3) / 2)
    nm = core.boxtimes(n, m)
    assert len(structure.intertwiner_basis(nm, nm)) == 1
    assert structure.complete_submodule(nm).p_dimension == 2
    # The fused legs share no eigenvector, unlike the factor m.
    _, va = la.eig_general(nm.A)
    for j in range(2):
        image = nm.B @ va[:, j]
        overlap = abs(np.vdot(va[:, j], image)) / np.linalg.norm(image)
        assert overlap < 1 - 1e-6

    back = core.boxtimes(core.scalar_inverse(core.ScalarModule(0.5, np.sqrt(3) / 2)).as_module(), nm)
    res = structure.equivalent(back, m)
    assert res.verdict is True
    _pass(4, f"complete line angle {angle:.1e}, fused module irreducible of intrinsic dim 2, inverse recovers the non-full module")


def test_criterion_05_d2_display():
    m, mt = d2_display_pair(alpha=np.exp(1j * np.pi / 7))
    lam = R2
    targets = [(-lam, lam), (-lam, -lam), (lam, lam), (lam, -lam)]

    rep = families.d2_fuse(m, mt)
    scalars = [s for split in rep.scalar_splits if split for s in split]
    assert len(scalars) == 4

    direct = core.boxtimes(m, mt)
    drep = structure.decompose_full(direct, seed=7)
    assert [s.dimension for s in drep.summands] == [1, 1, 1, 1]
    blocks = [restricted(direct, s.isometry) for s in drep.summands]

    for ta, tb in targets:
        target = core.scalar_module(ta, tb)
        hits_closed = [
            s for s in scalars
            if structure.equivalent(target, s.as_module(), rtol=1e-9).verdict
        ]
        hits_direct = [
            b for b in blocks if structure.equivalent(target, b, rtol=1e-9).verdict
        ]
        assert len(hits_closed) == 1, (ta, tb)
        assert len(hits_direct) == 1, (ta, tb)
    _pass(5, "both fusion paths give the four expected scalar modules")


def test_criterion_06_gp_fusion_rule():
    rng = np.random.default_rng(8)
    checked_oracle = 0
    for i in range(20):
        for r, s in ((2, 3), (2, 2), (4, 6)):
            z, zt = random_gp(rng, r), random_gp(rng, s)
            assert families.gp_canonical(z)[1] and families.gp_canonical(zt)[1]
            ys = families.gp_fuse(z, zt)
            assert len(ys) == math.gcd(r, s)
            assert all(len(y) == math.lcm(r, s) for y in ys)
            if (r, s) in ((2, 3), (2, 2)) and i < 10:
                direct = core.boxtimes(families.gp_module(z), families.gp_module(zt))
                combined = families.gp_module(ys[0])
                for y in ys[1:]:
                    combined = core.direct_sum(combined, families.gp_module(y))
                res = structure.equivalent(direct, combined, seed=9000 + i)
                assert res.verdict is True, (r, s, i, res.reason)
                checked_oracle += 1
    # One larger case inside the <= (3, 4) oracle bound.
    z, zt = random_gp(rng, 3), random_gp(rng, 4)
    direct = core.boxtimes(families.gp_module(z), families.gp_module(zt))
    res = structure.equivalent(direct, families.gp_module(families.gp_fuse(z, zt)[0]), seed=77)
    assert res.verdict is True
    checked_oracle += 1

    worst = 0.0
    for i in range(20):
        z = random_gp(rng, 2)
        inv = [core.scalar_inverse(core.ScalarModule(*e)) for e in z.entries]
        zt = families.GPVector(entries=tuple((s.a, s.b) for s in inv))
        y1 = families.gp_fuse(z, zt)[0]
        worst = max(worst, max(abs(a - R2) + abs(b - R2) for a, b in y1.entries))
    assert worst <= 1e-10
    _pass(6, f"counts/lengths hold, {checked_oracle} direct-product oracles matched, inverse pairs reach the unit within {worst:.1e}")


def test_criterion_07_atomic_absorption():
    z = np.exp(0.23j)
    for word in families.prime_words(3):
        lab = families.AtomicLabel(word, z)
        for k in range(10):
            md = families.random_module(2, "N", seed=7000 + k)
            labels = families.atomic_diffuse_fuse(lab, md)

            va, vb = la.polar(md.A).unitary, la.polar(md.B).unitary
            v = np.eye(2, dtype=complex)
            for digit in word:
                v = (va if digit == "0" else vb) @ v
            phases, _ = la.unitary_eig(v)
            want = sorted((p * z for p in phases), key=np.angle)
            got = [l.phase for l in labels]
            assert max(abs(g - w) for g, w in zip(got, want)) <= 1e-9

            prod = core.boxtimes(families.atomic_module(lab), md)
            parts = structure.atomic_part(prod, max_len=2 * len(word))
            assert sum(p.isometry.shape[1] for p in parts) == prod.dim
            got2 = sorted((p.label.phase for p in parts), key=np.angle)
            assert max(abs(g - w) for g, w in zip(got2, want)) <= 1e-9
            assert all(p.label.word == word for p in parts)

        g = core.ScalarModule(0.6 * np.exp(0.4j), 0.8 * np.exp(-0.9j))
        out = families.atomic_diffuse_fuse(lab, g.as_module())
        k0 = word.count("0")
        want_phase = (g.a / abs(g.a)) ** k0 * (g.b / abs(g.b)) ** (len(word) - k0) * z
        assert abs(out[0].phase - want_phase) <= 1e-12
    _pass(7, "absorption phases equal eig(V)*z in closed form and through the direct product")


def test_criterion_08_atomic_emergence():
    m, mt = atomic_emergence_pair(theta=np.pi / 5, a=0.6, at=0.7,
                            alpha=np.exp(0.3j), alphat=np.exp(-1.1j))
    n = core.boxtimes(m, mt)
    rep = structure.classify_parts(n)
    assert (rep.atomic_dim, rep.diffuse_dim, rep.residual_dim) == (1, 3, 0)
    assert rep.atomic[0].label.word == "1"
    assert abs(rep.atomic[0].label.phase - 1.0) <= 1e-9
    xi = np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2)
    angle = np.arccos(min(1.0, abs(np.vdot(rep.atomic[0].isometry[:, 0], xi))))
    assert angle <= 1e-8
    sub = restricted(n, rep.diffuse_isometry)
    assert rep.diffuse_isometry.shape[1] == 3
    assert len(structure.intertwiner_basis(sub, sub)) == 1
    _pass(8, f"atomic line ('1', 1) at angle {angle:.1e} with a 3-dim diffuse irreducible complement")


def test_criterion_09_duality():
    for i in range(20):
        d = 1 + i % 3
        m = families.random_module(d, "N", seed=8000 + i)
        rep = core.duality_check(m)
        assert abs(rep.quantum_dim - d) <= 1e-9
        assert rep.zigzag_residual <= 1e-9
        assert rep.ev_residual <= 1e-9
        assert rep.coev_residual <= 1e-9
        assert abs(rep.ev_factor - R2) <= 1e-9
        dd = core.dual_module(core.dual_module(m))
        assert structure.equivalent(dd, m).verdict is True
    _pass(9, "quantum dimension, zig-zag, 1/sqrt(2) pairing scalar and double duals hold for 20 class-N samples")


def test_criterion_10_scalar_group():
    rng = np.random.default_rng(10)
    worst_group = 0.0
    worst_homo = 0.0
    prev = core.scalar_coords_iso(core.GroupCoords(1.0, 1.0, 0.3))
    unit = core.ScalarModule(R2, R2)
    for _ in range(1000):
        t1, t2 = rng.uniform(-4, 4, 2)
        u1, v1, u2, v2 = np.exp(2j * np.pi * rng.random(4))
        s1 = core.scalar_coords_iso(core.GroupCoords(u1, v1, t1))
        s2 = core.scalar_coords_iso(core.GroupCoords(u2, v2, t2))

        lhs = core.scalar_boxtimes(core.scalar_boxtimes(s1, s2), prev)
        rhs = core.scalar_boxtimes(s1, core.scalar_boxtimes(s2, prev))
        worst_group = max(worst_group, abs(lhs.a - rhs.a), abs(lhs.b - rhs.b))

        with_unit = core.scalar_boxtimes(s1, unit)
        worst_group = max(worst_group, abs(with_unit.a - s1.a), abs(with_unit.b - s1.b))

        inv = core.scalar_boxtimes(s1, core.scalar_inverse(s1))
        worst_group = max(worst_group, abs(inv.a - R2), abs(inv.b - R2))

        prod = core.scalar_boxtimes(s1, s2)
        direct = core.scalar_coords_iso(core.GroupCoords(u1 * u2, v1 * v2, t1 + t2))
        worst_homo = max(worst_homo, abs(prod.a - direct.a), abs(prod.b - direct.b))
        prev = s1
    assert worst_group <= 1e-12, worst_group
    assert worst_homo <= 1e-12, worst_homo
    _pass(10, f"group axioms within {worst_group:.1e}, coordinate map a homomorphism within {worst_homo:.1e}")


def test_criterion_11_kawamura_product():
    worst_valid = 0.0
    worst_assoc = 0.0
    for i in range(5):
        m = families.random_module(2, "N", seed=8500 + i)
        mt = families.random_module(2, "N", seed=8600 + i)
        mh = families.random_module(2, "N", seed=8700 + i)
        k = core.kawamura_tensor(m, mt)
        worst_valid = max(worst_valid, core.pythagorean_residual(k))
        lhs = core.kawamura_tensor(core.kawamura_tensor(m, mt), mh)
        rhs = core.kawamura_tensor(m, core.kawamura_tensor(mt, mh))
        worst_assoc = max(worst_assoc, leg_defect(lhs, rhs))
    assert worst_valid <= 1e-12
    assert worst_assoc <= 1e-10

    # Search for an ordered pair witnessing asymmetry among small GP modules.
    rng = np.random.default_rng(12)
    witness = None
    candidates = [families.gp_module(random_gp(rng, 1)) for _ in range(4)]
    for a in candidates:
        for b in candidates:
            k_ab = core.kawamura_tensor(a, b)
            k_ba = core.kawamura_tensor(b, a)
            if structure.equivalent(k_ab, k_ba).verdict is False:
                witness = (a, b)
                break
        if witness:
            break
    assert witness is not None
    _pass(11, f"validates within {worst_valid:.1e}, associative within {worst_assoc:.1e}, asymmetry witness found")


def test_criterion_12_prime_words():
    for d in range(1, 13):
        words = families.prime_words(d)
        brute = set()
        for bits in range(2**d):
            w = format(bits, f"0{d}b")
            if any(d % p == 0 and w == w[:p] * (d // p) for p in range(1, d)):
                continue
            brute.add(min(w[k:] + w[:k] for k in range(d)))
        assert words == sorted(brute), d
    assert len(families.prime_words(6)) == 9
    _pass(12, "prime-word enumeration matches brute force for d <= 12 (d=6 count is 9)")
