"""
Seeded Monte-Carlo runs of BB84 and Ekert sessions with an eavesdropper.

Randomness comes from Philox, a counter-based generator: draw ``j`` of
pulse ``i`` is keyed by (seed, j) at counter position i. Any sharding of
the pulses therefore sees the same numbers, and all statistics are built
from integer histograms, so results do not depend on the worker count.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .cloning import ClonerSpec, KINDS as CLONER_KINDS, uqcm_isometry
from .information import _h
from .probe import IDENTITY, VON_NEUMANN, IntensityGamma, ProbeParams, SymmetryAxis, probe_isometry
from .states import ket

BB84_ANGLES = (0.0, np.pi / 2)
# Ekert layout: CHSH from Alice {0, pi/2} x Bob {pi/4, 3pi/4}; key from shared bases
EKERT_ALICE = (0.0, np.pi / 4, np.pi / 2)
EKERT_BOB = (np.pi / 4, np.pi / 2, 3 * np.pi / 4)

SHARD = 1 << 16  # multiple of 4 so shards align with Philox output blocks
MASK64 = (1 << 64) - 1

# draw slots
ALICE_BIT, ALICE_BASIS, BOB_BASIS, BRANCH, OUTCOME, SECOND, BOB2_BASIS = range(7)


@dataclass(frozen=True)
class EveStrategy:
    """
    What Eve does to each qubit on its way to Bob.

    kind is one of none, intercept, intensity, general, cloner.
    """

    kind: str = "none"
    gamma: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    fraction: float = 1.0
    symmetrized: bool = False
    cloner: Optional[ClonerSpec] = None

    def __post_init__(self):
        if self.kind not in ("none", "intercept", "intensity", "general", "cloner"):
            raise ValueError(f"unknown eavesdropping strategy {self.kind!r}")
        if self.kind == "intercept" and not 0 <= self.fraction <= 1:
            raise ValueError("intercept fraction must lie in [0, 1]")
        if self.kind == "intensity":
            IntensityGamma(self.gamma)
        if self.kind == "cloner" and self.cloner is None:
            raise ValueError("cloner strategy needs a ClonerSpec")

    @classmethod
    def parse(cls, text, degrees=False):
        """
        Parse ``none``, ``intercept:P``, ``intensity:G[:sym]``,
        ``general:A:B[:sym|:unsym]`` or ``cloner:KIND[:ALPHA]``.
        """
        parts = [p.strip() for p in text.strip().split(":")]
        kind, args = parts[0].lower(), parts[1:]
        conv = np.deg2rad if degrees else float

        def flag(rest, default):
            if not rest:
                return default
            if rest[0] in ("sym", "symmetrized"):
                return True
            if rest[0] in ("unsym", "plain"):
                return False
            raise ValueError(f"bad symmetrization flag {rest[0]!r}")

        try:
            if kind == "none" and not args:
                return cls()
            if kind in ("intercept", "intercept_resend") and len(args) <= 1:
                return cls("intercept", fraction=float(args[0]) if args else 1.0)
            if kind == "intensity" and 1 <= len(args) <= 2:
                return cls("intensity", gamma=float(conv(float(args[0]))), symmetrized=flag(args[1:], False))
            if kind == "general" and 2 <= len(args) <= 3:
                return cls(
                    "general",
                    alpha=float(conv(float(args[0]))),
                    beta=float(conv(float(args[1]))),
                    symmetrized=flag(args[2:], True),
                )
            if kind == "cloner" and 1 <= len(args) <= 2 and args[0] in CLONER_KINDS:
                spec = ClonerSpec(args[0])
                if len(args) == 2:
                    spec = ClonerSpec(args[0], float(conv(float(args[1]))))
                return cls("cloner", cloner=spec)
        except ValueError as exc:
            raise ValueError(f"bad strategy {text!r}: {exc}") from None
        raise ValueError(f"bad strategy {text!r}")

    def describe(self):
        if self.kind == "none":
            return "none"
        if self.kind == "intercept":
            return f"intercept:{self.fraction:.12g}"
        sym = ":sym" if self.symmetrized else ":unsym"
        if self.kind == "intensity":
            return f"intensity:{self.gamma:.12g}{sym}"
        if self.kind == "general":
            return f"general:{self.alpha:.12g}:{self.beta:.12g}{sym}"
        if self.cloner.kind == "uqcm":
            return "cloner:uqcm"
        return f"cloner:{self.cloner.kind}:{self.cloner.alpha:.12g}"

    def branches(self):
        """
        List of (weight, isometry, eve_dim, own_basis).

        Each isometry maps Bob's incoming qubit to Bob (x) Eve. ``own_basis``
        is the basis Eve reads when she measures without waiting.
        """
        axes = tuple(SymmetryAxis) if self.symmetrized else (SymmetryAxis.UP,)
        if self.kind == "none":
            return [(1.0, probe_isometry(IDENTITY), 2, 0)]
        if self.kind == "intercept":
            out = [(self.fraction / 4, probe_isometry(VON_NEUMANN, ax), 2, ax % 2)
                   for ax in SymmetryAxis]
            if self.fraction < 1:
                out.append((1 - self.fraction, probe_isometry(IDENTITY), 2, 0))
            return out
        if self.kind == "cloner":
            spec = self.cloner
            if spec.kind == "uqcm":
                return [(1.0, uqcm_isometry(), 4, 0)]
            axes = tuple(SymmetryAxis) if spec.symmetrized else (SymmetryAxis.UP,)
            return [(1 / len(axes), probe_isometry(spec.params, ax), 2, ax % 2) for ax in axes]
        p = IntensityGamma(self.gamma).params if self.kind == "intensity" else ProbeParams(self.alpha, self.beta)
        return [(1 / len(axes), probe_isometry(p, ax), 2, ax % 2) for ax in axes]


@dataclass(frozen=True)
class SimConfig:
    n_pulses: int
    seed: int = 0
    protocol: str = "bb84"
    eve: EveStrategy = field(default_factory=EveStrategy)
    delayed: bool = True
    threads: Optional[int] = None
    exact: bool = False

    def __post_init__(self):
        if int(self.n_pulses) < 1:
            raise ValueError("n_pulses must be at least 1")
        if self.protocol not in ("bb84", "ekert"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SimResult:
    protocol: str
    n_pulses: int
    sifted_count: int
    empirical_q: float
    per_basis_q: tuple
    eve_guess_rate: float
    empirical_i_ae_lower_bound: float
    empirical_s: Optional[float]
    empirical_s_stderr: Optional[float]
    rng_trace_digest: str

    def to_dict(self):
        d = asdict(self)
        d["per_basis_q"] = list(self.per_basis_q)
        return d


def _layout(protocol):
    if protocol == "bb84":
        return BB84_ANGLES, BB84_ANGLES, [(0, 0), (1, 1)]
    return EKERT_ALICE, EKERT_BOB, [(1, 0), (2, 1)]


def _sent_angle(protocol, chi, bit):
    # Ekert: Alice's outcome leaves Bob's half anti-aligned with it
    return chi + (bit if protocol == "bb84" else 1 - bit) * np.pi


def _bob_bit(protocol, outcome):
    return outcome if protocol == "bb84" else 1 - outcome


def _helstrom(rho0, rho1):
    w, v = np.linalg.eigh(rho0 - rho1)
    keep = w > 1e-12
    return v[:, keep] @ v[:, keep].conj().T


def _eve_states(v, dim_e, theta):
    out = (v @ ket(theta)).reshape(2, dim_e)
    return out.T @ out.conj()


def _eve_projectors(protocol, branches, alice_angles, delayed):
    """Eve's outcome-0 projector per (branch, Alice basis)."""
    proj = []
    for _, v, dim_e, own in branches:
        row = []
        for ia, chi in enumerate(alice_angles):
            target = chi if delayed else alice_angles[own if protocol == "bb84" else 2 * own]
            rho = [_eve_states(v, dim_e, _sent_angle(protocol, target, b)) for b in (0, 1)]
            row.append(_helstrom(*rho))
        proj.append(row)
    return proj


def _joint_table(protocol, branches, alice_angles, bob_angles, projectors):
    """P(bob outcome, eve outcome) indexed [branch, ia, bit, ib, 2*o + e]."""
    nb, na, nbob = len(branches), len(alice_angles), len(bob_angles)
    table = np.zeros((nb, na, 2, nbob, 4))
    for i, (_, v, dim_e, _) in enumerate(branches):
        for ia, chi in enumerate(alice_angles):
            p0 = projectors[i][ia]
            p1 = np.eye(dim_e) - p0
            for bit in (0, 1):
                psi = (v @ ket(_sent_angle(protocol, chi, bit))).reshape(2, dim_e)
                for ib, chib in enumerate(bob_angles):
                    for o in (0, 1):
                        amp = ket(chib + o * np.pi).conj() @ psi
                        for e, pe in enumerate((p0, p1)):
                            table[i, ia, bit, ib, 2 * o + e] = np.real(amp.conj() @ pe @ amp)
    return _clean(table)


def _clean(table):
    table = np.where(np.abs(table) < 1e-15, 0.0, table)
    return table / table.sum(-1, keepdims=True)


def _uniforms(seed, slot, start, n):
    bg = np.random.Philox(
        key=np.array([seed, slot], dtype=np.uint64),
        counter=np.array([start // 4, 0, 0, 0], dtype=np.uint64),
    )
    raw = bg.random_raw(n)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53, raw


def _digest(raws):
    total = 0
    for r in raws:
        total = (total + int(np.sum(r, dtype=np.uint64))) & MASK64
    return total


def _pick(u, cum):
    """Index of the cell each uniform falls in; ``cum`` rows are cumulative probabilities."""
    return (u[:, None] >= cum).sum(-1).clip(max=cum.shape[-1] - 1)


def _run_shards(n, threads, worker):
    starts = list(range(0, n, SHARD))
    jobs = [(s, min(s + SHARD, n)) for s in starts]
    threads = threads or _env_threads()
    if threads <= 1 or len(jobs) == 1:
        parts = [worker(*j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda j: worker(*j), jobs))
    hist = sum(p[0] for p in parts)
    digest = 0
    for p in parts:
        digest = (digest + p[1]) & MASK64
    return hist, f"{digest:016x}"


def _env_threads():
    try:
        return max(1, int(os.environ.get("QEVE_THREADS", "1")))
    except ValueError:
        return 1


def _draw_common(cfg, start, stop, n_alice, n_bob, cum_w):
    n = stop - start
    u_bit, r0 = _uniforms(cfg.seed, ALICE_BIT, start, n)
    u_ab, r1 = _uniforms(cfg.seed, ALICE_BASIS, start, n)
    u_bb, r2 = _uniforms(cfg.seed, BOB_BASIS, start, n)
    u_br, r3 = _uniforms(cfg.seed, BRANCH, start, n)
    bit = (u_bit >= 0.5).astype(np.int64)
    ia = np.minimum((u_ab * n_alice).astype(np.int64), n_alice - 1)
    ib = np.minimum((u_bb * n_bob).astype(np.int64), n_bob - 1)
    br = _pick(u_br, cum_w[None, :])
    return bit, ia, ib, br, [r0, r1, r2, r3]


def _histogram_shape(cfg, n_branch):
    na, nb, _ = _layout(cfg.protocol)
    # [ia, ib, branch, alice bit, bob bit, eve guess]
    return (len(na), len(nb), n_branch, 2, 2, 2)


def run(cfg):
    """Run the configured protocol; returns a :class:`SimResult`."""
    if cfg.protocol == "bb84":
        return run_bb84(cfg)
    return run_ekert(cfg)


def run_bb84(cfg):
    """Prepare-and-measure BB84 with sifting on matched bases."""
    if cfg.protocol != "bb84":
        raise ValueError("run_bb84 needs protocol='bb84'")
    return _run_protocol(cfg)


def run_ekert(cfg):
    """Entanglement-based session: shared bases give key, the rest estimate S."""
    if cfg.protocol != "ekert":
        raise ValueError("run_ekert needs protocol='ekert'")
    return _run_protocol(cfg)


def _run_protocol(cfg):
    alice_angles, bob_angles, _ = _layout(cfg.protocol)
    branches = cfg.eve.branches()
    weights = np.array([b[0] for b in branches])
    cum_w = np.cumsum(weights / weights.sum())
    proj = _eve_projectors(cfg.protocol, branches, alice_angles, cfg.delayed)
    table = _joint_table(cfg.protocol, branches, alice_angles, bob_angles, proj)
    cum_table = np.cumsum(table, -1)
    shape = _histogram_shape(cfg, len(branches))

    def worker(start, stop):
        bit, ia, ib, br, raws = _draw_common(
            cfg, start, stop, len(alice_angles), len(bob_angles), cum_w
        )
        u, r = _uniforms(cfg.seed, OUTCOME, start, stop - start)
        raws.append(r)
        if cfg.exact:
            u2, r2 = _uniforms(cfg.seed, SECOND, start, stop - start)
            raws.append(r2)
            o, e = _trajectories(cfg.protocol, branches, proj, alice_angles, bob_angles,
                                 br, ia, bit, ib, u, u2)
        else:
            cell = _pick(u, cum_table[br, ia, bit, ib])
            o, e = cell // 2, cell % 2
        bob_bit = _bob_bit(cfg.protocol, o)
        guess = e  # outcome 0 of the Helstrom projector favours bit 0
        flat = np.ravel_multi_index((ia, ib, br, bit, bob_bit, guess), shape)
        hist = np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)
        return hist, _digest(raws)

    hist, digest = _run_shards(int(cfg.n_pulses), cfg.threads, worker)
    return _summarize(cfg, hist, digest)


def _trajectories(protocol, branches, proj, alice_angles, bob_angles, br, ia, bit, ib, u1, u2):
    """Sequential collapse: Bob measures first, then Eve measures her collapsed probe."""
    o = np.zeros(len(u1), dtype=np.int64)
    e = np.zeros(len(u1), dtype=np.int64)
    for k in range(len(u1)):
        _, v, dim_e, _ = branches[br[k]]
        psi = (v @ ket(_sent_angle(protocol, alice_angles[ia[k]], bit[k]))).reshape(2, dim_e)
        amp0 = ket(bob_angles[ib[k]]).conj() @ psi
        p0 = float(np.real(amp0.conj() @ amp0))
        if u1[k] < p0:
            amp = amp0
        else:
            o[k] = 1
            amp = ket(bob_angles[ib[k]] + np.pi).conj() @ psi
        amp = amp / np.linalg.norm(amp)
        pe0 = float(np.real(amp.conj() @ proj[br[k]][ia[k]] @ amp))
        e[k] = 0 if u2[k] < pe0 else 1
    return o, e


def _mi_counts(c):
    """Plug-in mutual information (bits) of a 2x2 count table."""
    n = c.sum()
    if n == 0:
        return 0.0
    p = c / n
    return float(_h(p.sum(1)[0]) + _h(p.sum(0)[0]) - _joint_entropy(p))


def _joint_entropy(p):
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def _summarize(cfg, hist, digest):
    _, _, key_pairs = _layout(cfg.protocol)
    # hist[ia, ib, branch, alice, bob, guess]
    sifted = errors = correct = 0
    per_basis = []
    info_num = 0.0
    for ia, ib in key_pairs:
        h = hist[ia, ib]
        n = int(h.sum())
        err = int(h[:, 0, 1].sum() + h[:, 1, 0].sum())
        per_basis.append(err / n if n else 0.0)
        sifted += n
        errors += err
        correct += int(h[:, 0, :, 0].sum() + h[:, 1, :, 1].sum())
        for branch_counts in h:
            ag = branch_counts.sum(1)  # [alice, guess]
            info_num += ag.sum() * _mi_counts(ag)
    s = s_err = None
    if cfg.protocol == "ekert":
        s, s_err = _chsh_estimate(hist)
    return SimResult(
        protocol=cfg.protocol,
        n_pulses=int(cfg.n_pulses),
        sifted_count=sifted,
        empirical_q=errors / sifted if sifted else 0.0,
        per_basis_q=tuple(per_basis),
        eve_guess_rate=correct / sifted if sifted else 0.0,
        empirical_i_ae_lower_bound=info_num / sifted if sifted else 0.0,
        empirical_s=s,
        empirical_s_stderr=s_err,
        rng_trace_digest=digest,
    )


def _correlator(counts):
    """Mean and standard error of s_A s_B from a [alice, bob] count table."""
    n = counts.sum()
    if n == 0:
        return 0.0, 0.0
    same = counts[0, 0] + counts[1, 1]
    e = (2 * same - n) / n
    return e, np.sqrt(max(1 - e * e, 0.0) / n)


def _chsh_estimate(hist):
    # Ekert: bit b <-> spin s = +1 for b = 0 on both sides
    def corr(ia, ib):
        c = hist[ia, ib].sum(axis=(0, 3))  # [alice, bob]
        return _correlator(c)

    terms = [(0, 0, 1), (0, 2, -1), (2, 0, 1), (2, 2, 1)]
    vals = [(sign, *corr(ia, ib)) for ia, ib, sign in terms]
    # correlators of recorded bits are minus those of raw spins, so the singlet gives +2 sqrt 2
    s = sum(sign * e for sign, e, _ in vals)
    err = np.sqrt(sum(se * se for _, _, se in vals))
    return float(s), float(err)


@dataclass(frozen=True)
class BroadcastResult:
    bob1: SimResult
    bob2: SimResult
    bob_covariance: float
    bob_covariance_stderr: float


def broadcast_sim(cfg, spec):
    """
    Alice's data against two Bobs sharing the cloner's outputs.

    Bob1 receives the original, Bob2 the copy; each picks his own basis.
    ``bob_covariance`` is cov(s1, s2) given Alice's basis and bit, on rounds
    where both Bobs measured in Alice's basis.
    """
    alice_angles, bob_angles, key_pairs = _layout(cfg.protocol)
    if spec.kind == "uqcm":
        branches = [(1.0, uqcm_isometry(), 4)]
    else:
        axes = tuple(SymmetryAxis) if spec.symmetrized else (SymmetryAxis.UP,)
        branches = [(1 / len(axes), probe_isometry(spec.params, ax), 2) for ax in axes]
    weights = np.array([b[0] for b in branches])
    cum_w = np.cumsum(weights / weights.sum())
    nb, na, nbob = len(branches), len(alice_angles), len(bob_angles)

    # P(o1, o2) indexed [branch, ia, bit, ib1, ib2, 2*o1 + o2]
    table = np.zeros((nb, na, 2, nbob, nbob, 4))
    for i, (_, v, dim_e) in enumerate(branches):
        for ia, chi in enumerate(alice_angles):
            for bit in (0, 1):
                psi = (v @ ket(_sent_angle(cfg.protocol, chi, bit))).reshape(2, 2, dim_e // 2)
                for ib1, c1 in enumerate(bob_angles):
                    for ib2, c2 in enumerate(bob_angles):
                        for o1 in (0, 1):
                            for o2 in (0, 1):
                                amp = np.einsum(
                                    "i,j,ijm->m",
                                    ket(c1 + o1 * np.pi).conj(),
                                    ket(c2 + o2 * np.pi).conj(),
                                    psi,
                                )
                                table[i, ia, bit, ib1, ib2, 2 * o1 + o2] = np.real(amp.conj() @ amp)
    cum_table = np.cumsum(_clean(table), -1)
    shape = (na, nbob, nbob, 2, 2, 2)

    def worker(start, stop):
        bit, ia, ib1, br, raws = _draw_common(cfg, start, stop, na, nbob, cum_w)
        u2, r2 = _uniforms(cfg.seed, BOB2_BASIS, start, stop - start)
        ib2 = np.minimum((u2 * nbob).astype(np.int64), nbob - 1)
        u, r = _uniforms(cfg.seed, OUTCOME, start, stop - start)
        raws += [r2, r]
        cell = _pick(u, cum_table[br, ia, bit, ib1, ib2])
        b1 = _bob_bit(cfg.protocol, cell // 2)
        b2 = _bob_bit(cfg.protocol, cell % 2)
        flat = np.ravel_multi_index((ia, ib1, ib2, bit, b1, b2), shape)
        return np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape), _digest(raws)

    hist, digest = _run_shards(int(cfg.n_pulses), cfg.threads, worker)

    # hist[ia, ib1, ib2, alice, bob1, bob2]; fold into the single-Bob layout
    # [ia, ib, branch=1, alice, bob, other-bob-agrees-as-guess]
    h1 = np.zeros(_histogram_shape(cfg, 1), dtype=np.int64)
    h2 = np.zeros_like(h1)
    for ia in range(na):
        for ib in range(nbob):
            for a in (0, 1):
                for x in (0, 1):
                    for y in (0, 1):
                        h1[ia, ib, 0, a, x, y] = hist[ia, ib, :, a, x, y].sum()
                        h2[ia, ib, 0, a, y, x] = hist[ia, :, ib, a, x, y].sum()
    cov, cov_err = _pair_covariance(hist, key_pairs)
    return BroadcastResult(
        bob1=_summarize(cfg, h1, digest),
        bob2=_summarize(cfg, h2, digest),
        bob_covariance=cov,
        bob_covariance_stderr=cov_err,
    )


def _pair_covariance(hist, key_pairs):
    covs, weights, variances = [], [], []
    for ia, ib in key_pairs:
        for a in (0, 1):
            c = hist[ia, ib, ib, a].astype(float)  # [bob1, bob2]
            n = c.sum()
            if n < 2:
                continue
            s = np.array([1.0, -1.0])
            e12 = (c * np.outer(s, s)).sum() / n
            e1 = (c.sum(1) * s).sum() / n
            e2 = (c.sum(0) * s).sum() / n
            covs.append(e12 - e1 * e2)
            weights.append(n)
            variances.append(max(1 - e12 * e12, 1e-12) / n)
    w = np.array(weights) / np.sum(weights)
    return float(np.dot(w, covs)), float(np.sqrt(np.dot(w * w, variances)))


def report_fields(cfg, result):
    """Flat record of a run: the result fields followed by the echoed config."""
    out = {}
    for key, value in result.to_dict().items():
        if key == "per_basis_q":
            for i, q in enumerate(value):
                out[f"per_basis_q_{i}"] = q
        else:
            out[key] = value
    out.update(
        config_protocol=cfg.protocol,
        config_n_pulses=int(cfg.n_pulses),
        config_seed=int(cfg.seed),
        config_eve=cfg.eve.describe(),
        config_delayed=bool(cfg.delayed),
        config_exact=bool(cfg.exact),
    )
    return out


def _json_number(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    # shortest round-trip digits, never in exponent form
    return np.format_float_positional(float(x), unique=True, trim="0")


def to_json(fields):
    """Serialize a flat record; floats are plain decimal literals."""
    parts = []
    for key, value in fields.items():
        if value is None:
            text = "null"
        elif isinstance(value, str):
            text = json.dumps(value)
        else:
            text = _json_number(value)
        parts.append(f"  {json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(parts) + "\n}\n"
