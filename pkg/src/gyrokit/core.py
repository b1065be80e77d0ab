"""Abstract gyrogroup models and the universal law-verification engine.

A model supplies the operation, inverse, identity and (optionally) a
closed-form gyration. The suites here evaluate both sides of each
algebraic law on seeded samples (continuous carriers) or on every tuple
(finite carriers) and report per-check residuals.

Precision scheme for continuous carriers: every law is first evaluated
with the model's float64 kernels. Samples whose evaluation passed
through a point too close to the carrier boundary (where composed
operations amplify last-bit rounding beyond any meaningful tolerance)
are re-evaluated with the model's compensated double-double kernels,
each side rounded to float64 once at the end. The verdict therefore
reflects the algebra, not the conditioning of the sample.
"""

from __future__ import annotations

import time

import numpy as np

from .errors import ResourceLimitError
from .report import CheckResult, VerificationReport
from .sampling import Sampler, ToleranceConfig, ball_points, sample_operands

# rapidity beyond which a float64 intermediate is no longer trusted;
# cosh(5.5)^2 * eps stays two orders below the default tolerance
STRESS_RAPIDITY = 5.5

_EXHAUSTIVE_CAP = 20_000_000


class GyrogroupModel:
    """Carrier description plus the gyrogroup operations.

    Subclasses implement ``oplus`` and ``neg`` (vectorized over leading
    axes) and may override ``gyr`` with a closed form. Continuous models
    set ``dim``/``bound`` and may supply ``extended()`` double-double
    kernels; exact models set ``is_exact`` and work on index arrays.
    """

    name = "abstract"
    dim: int | None = None
    bound = 1.0
    is_exact = False
    has_closed_gyr = False

    def oplus(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    def zero_like(self, x):
        return np.zeros_like(x)

    def gyr(self, x, y, z):
        return derived_gyration(self, x, y, z)

    def gyr_derived(self, x, y, z):
        return derived_gyration(self, x, y, z)

    def distance(self, a, b):
        return np.linalg.norm(np.asarray(a) - np.asarray(b), axis=-1)

    def magnitude(self, a):
        return np.linalg.norm(np.asarray(a), axis=-1)

    def norm_fraction(self, a):
        """Carrier norm as a fraction of the boundary radius."""
        return self.magnitude(a) / self.bound

    def extended(self):
        """Double-double kernel set for stressed samples, or None."""
        return None

    @property
    def stress_norm_fraction(self):
        return float(np.tanh(STRESS_RAPIDITY))

    def sample_operands(self, gen, n, k, tol: ToleranceConfig):
        if self.dim is None:
            raise NotImplementedError("sampling requires a continuous carrier")
        return sample_operands(
            gen, n, self.dim, k, bound=self.bound, margin=tol.boundary_margin
        )

    def sample_witnesses(self, gen, n, count, offset, tol: ToleranceConfig):
        return [
            ball_points(
                gen, n, self.dim, self.bound,
                margin=tol.boundary_margin, forced_offset=(offset + j) % 100,
            )
            for j in range(count)
        ]


def derived_gyration(ops, x, y, z):
    """gyr[x, y](z) as the three-addition composition."""
    xy = ops.oplus(x, y)
    return ops.oplus(ops.neg(xy), ops.oplus(x, ops.oplus(y, z)))


def gyr_apply(model, x, y, z):
    """Evaluate the derived gyration, short-circuiting degenerate pivots.

    When x or y is exactly the identity the map is the identity map; the
    short-circuit returns z for those samples without running the
    composition.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    z = np.asarray(z)
    out = derived_gyration(model, x, y, z)
    if model.is_exact:
        e = model.zero_like(x)
        trivial = (x == e) | (y == e)
        return np.where(trivial, z, out)
    trivial = (model.magnitude(x) == 0.0) | (model.magnitude(y) == 0.0)
    if np.any(trivial):
        out = np.where(trivial[..., None], z, out)
    return out


class _TracedOps:
    """Duck-typed ops that record the largest norm fraction per sample."""

    def __init__(self, model):
        self._m = model
        self.peak = None

    def _note(self, r):
        f = self._m.norm_fraction(r)
        self.peak = f if self.peak is None else np.maximum(self.peak, f)
        return r

    def note_inputs(self, streams):
        for s in streams:
            self._note(s)

    def oplus(self, x, y):
        return self._note(self._m.oplus(x, y))

    def neg(self, x):
        return self._m.neg(x)

    def zero_like(self, x):
        return self._m.zero_like(x)

    def gyr(self, x, y, z):
        if self._m.has_closed_gyr:
            return self._note(self._m.gyr(x, y, z))
        return derived_gyration(self, x, y, z)

    def gyr_derived(self, x, y, z):
        return derived_gyration(self, x, y, z)


# ---------------------------------------------------------------------------
# laws: each returns a list of (lhs, rhs) comparisons


def law_g1(ops, x):
    e = ops.zero_like(x)
    return [(ops.oplus(x, e), x), (ops.oplus(e, x), x)]


def law_g2(ops, x):
    e = ops.zero_like(x)
    return [(ops.oplus(x, ops.neg(x)), e), (ops.oplus(ops.neg(x), x), e)]


def law_g3(ops, x, y, z):
    lhs = ops.oplus(x, ops.oplus(y, z))
    rhs = ops.oplus(ops.oplus(x, y), ops.gyr(x, y, z))
    return [(lhs, rhs)]


def law_g3_automorphism(ops, x, y, a, b):
    lhs = ops.gyr(x, y, ops.oplus(a, b))
    rhs = ops.oplus(ops.gyr(x, y, a), ops.gyr(x, y, b))
    return [(lhs, rhs)]


def law_g4_loop(ops, x, y, z):
    return [(ops.gyr(ops.oplus(x, y), y, z), ops.gyr(x, y, z))]


def law_left_cancellation(ops, x, y):
    return [(ops.oplus(ops.neg(x), ops.oplus(x, y)), y)]


def law_right_cancellation(ops, x, y):
    ny = ops.neg(y)
    return [(ops.oplus(ops.oplus(x, ny), ops.gyr(x, ny, y)), x)]


def law_twisted_right_cancellation(ops, x, y):
    return [(ops.oplus(ops.oplus(x, ops.gyr(x, y, ops.neg(y))), y), x)]


def law_gyration_agreement(ops, x, y, z):
    return [(ops.gyr(x, y, z), ops.gyr_derived(x, y, z))]


def law_triangle_decomposition(ops, x, y, z):
    nx = ops.neg(x)
    lhs = ops.oplus(nx, y)
    rhs = ops.oplus(
        ops.oplus(nx, z), ops.gyr(nx, z, ops.oplus(ops.neg(z), y))
    )
    return [(lhs, rhs)]


AXIOM_CHECKS = (
    # (name, law, base operand count, witness operand count)
    ("G1_identity", law_g1, 1, 0),
    ("G2_inverses", law_g2, 1, 0),
    ("G3_gyroassociativity", law_g3, 3, 0),
    ("G3_automorphism", law_g3_automorphism, 2, 2),
    ("G4_loop", law_g4_loop, 2, 1),
)

IDENTITY_CHECKS = (
    ("left_cancellation", law_left_cancellation, 2, 0),
    ("right_cancellation", law_right_cancellation, 2, 0),
    ("twisted_right_cancellation", law_twisted_right_cancellation, 2, 0),
    ("gyration_agreement", law_gyration_agreement, 3, 0),
    ("triangle_decomposition", law_triangle_decomposition, 3, 0),
)


def _pairs_metrics(model, lowered, comparator=None):
    compare = comparator if comparator is not None else model.distance
    diff = None
    mag = None
    for l, r in lowered:
        d = compare(l, r)
        m = np.maximum(model.magnitude(l), model.magnitude(r))
        diff = d if diff is None else np.maximum(diff, d)
        mag = m if mag is None else np.maximum(mag, m)
    return diff, mag


def run_law_check(
    model, name, law, streams, tol: ToleranceConfig, samples_note=None, comparator=None
):
    """Evaluate one law on prepared operand streams; returns a CheckResult.

    ``comparator(lhs, rhs) -> per-sample diff`` replaces the model's
    element distance when a check compares derived scalars (norms,
    membership excess) instead of elements.
    """
    if model.is_exact:
        lowered = [(l, r) for l, r in law(model, *streams)]
        diff, _ = _pairs_metrics(model, lowered, comparator)
        ok = diff == 0
        result = CheckResult(
            name,
            bool(ok.all()),
            float(diff.max()) if diff.size else 0.0,
            samples_note if samples_note is not None else "exhaustive",
        )
        if not result.passed:
            result.witness = _exact_witness(model, streams, lowered, ok)
        return result

    traced = _TracedOps(model)
    traced.note_inputs(streams)
    lowered = law(traced, *streams)
    diff, mag = _pairs_metrics(model, lowered, comparator)

    ext = model.extended()
    if ext is not None and traced.peak is not None:
        stressed = traced.peak > model.stress_norm_fraction
        if stressed.any():
            sub = [ext.lift(s[stressed]) for s in streams]
            redone = [(ext.lower(L), ext.lower(R)) for L, R in law(ext, *sub)]
            d2, m2 = _pairs_metrics(model, redone, comparator)
            diff = diff.copy()
            mag = mag.copy()
            diff[stressed] = d2
            mag[stressed] = m2

    effective = np.maximum(tol.abs_tol, tol.rel_tol * mag)
    ok = diff <= effective
    residual = diff / np.maximum(1.0, mag)
    result = CheckResult(
        name,
        bool(ok.all()),
        float(residual.max()) if residual.size else 0.0,
        samples_note if samples_note is not None else int(diff.shape[0]),
    )
    if not result.passed:
        bad = np.flatnonzero(~ok)
        worst = bad[np.argmax(residual[bad])]
        result.witness = {
            "inputs": [np.asarray(s)[worst].tolist() for s in streams],
            "residual": float(residual[worst]),
        }
    return result


def _exact_witness(model, streams, lowered, ok):
    bad = np.flatnonzero(~ok)
    i = int(bad[0])
    labels = getattr(model, "labels", None)

    def show(v):
        v = int(np.asarray(v).ravel()[0]) if np.asarray(v).ndim else int(v)
        return labels[v] if labels is not None else v

    mismatch = None
    for l, r in lowered:
        if np.asarray(l).ravel()[i] != np.asarray(r).ravel()[i]:
            mismatch = (show(np.asarray(l).ravel()[i]), show(np.asarray(r).ravel()[i]))
            break
    return {
        "inputs": [show(np.asarray(s).ravel()[i]) for s in streams],
        "lhs": mismatch[0] if mismatch else None,
        "rhs": mismatch[1] if mismatch else None,
    }


def _exhaustive_streams(model, arity):
    n = model.order
    if n**arity > _EXHAUSTIVE_CAP:
        raise ResourceLimitError(
            f"exhaustive check over {arity} operands infeasible for order {n}"
        )
    grids = np.meshgrid(*([np.arange(n)] * arity), indexing="ij")
    return [g.ravel() for g in grids]


def _continuous_streams(model, gen, n, base, wit, witnesses, tol):
    streams = model.sample_operands(gen, n, base, tol)
    if wit:
        k = max(1, witnesses)
        streams = [np.repeat(s, k, axis=0) for s in streams]
        streams += model.sample_witnesses(gen, n * k, wit, base, tol)
    return streams


def _run_suite(model, suite, checks, sampler, n_samples, tol, witnesses):
    report = VerificationReport(
        suite=suite,
        seed=sampler.seed,
        tolerances=tol.to_dict(),
        model=model.name,
    )
    start = time.perf_counter()
    for name, law, base, wit in checks:
        if model.is_exact:
            streams = _exhaustive_streams(model, base + wit)
            result = run_law_check(model, name, law, streams, tol)
        else:
            gen = sampler.stream(suite, name)
            streams = _continuous_streams(model, gen, n_samples, base, wit, witnesses, tol)
            result = run_law_check(
                model, name, law, streams, tol, samples_note=int(streams[0].shape[0])
            )
        report.checks.append(result)
    report.wall_time_s = time.perf_counter() - start
    return report


def check_axioms(model, sampler=None, n_samples=10000, tol=None, witnesses=3):
    """Verify the gyrogroup axioms on a model.

    Continuous carriers are sampled (``n_samples`` base tuples per check,
    times ``witnesses`` for the pointwise gyration comparisons); finite
    carriers are checked exhaustively and exactly.
    """
    sampler = sampler if sampler is not None else Sampler()
    tol = tol if tol is not None else ToleranceConfig()
    return _run_suite(model, "axioms", AXIOM_CHECKS, sampler, n_samples, tol, witnesses)


def check_identities(model, sampler=None, n_samples=10000, tol=None, witnesses=3):
    """Verify the cancellation laws, gyration agreement and the
    three-point decomposition of a difference."""
    sampler = sampler if sampler is not None else Sampler()
    tol = tol if tol is not None else ToleranceConfig()
    return _run_suite(
        model, "identities", IDENTITY_CHECKS, sampler, n_samples, tol, witnesses
    )
