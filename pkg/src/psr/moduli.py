"""Operations on the compact convex generating set of closed instances.

The set C_n of standard-form cubics with sphere maximum at most
2/(3 sqrt 3) generates all closed connected instances in dimension n; it is
convex, so segments between closed instances stay closed, and scaling P by
s in [0, 1] preserves closedness.  The module also decides homogeneity (the
first variation of P vanishes identically for some antisymmetric direction
field, a linear least squares problem), estimates the dimension-dependent
scalar curvature range by sampling and polishing inside C_n, and carries the
classical surface fixtures with their explicit reducing matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambient import AmbientCubic, LinearChange, StandardCubic, apply_change
from .curvature import scalar_at_base
from .domain import CLOSEDNESS_THRESHOLD
from .errors import DimensionMismatch, EndpointNotClosed, MalformedInput, NotCCPSR
from .membership import GeneratingSetPosition, classify, max_on_sphere, _newton_polish
from .standard_form import SoNDirectionField, delta_p3
from .symtensor import SymCubic

__all__ = [
    "DeformationCurve",
    "HomogeneityResult",
    "SurfaceFixture",
    "CurvatureBoundsEstimate",
    "generating_set_position",
    "deform",
    "scale_path",
    "homogeneity_test",
    "curvature_bounds_estimate",
    "surface_fixture",
    "f_interpolation_chain",
    "e_from_y3_limit",
]

_SQ2 = np.sqrt(2.0)
_SQ3 = np.sqrt(3.0)


def generating_set_position(p3: SymCubic, seed: int = 0) -> GeneratingSetPosition:
    """Position of the standard-form cubic relative to the generating set."""
    return classify(p3, seed=seed).generating_set_position


@dataclass(frozen=True)
class DeformationCurve:
    endpoints: tuple
    samples: list  # (t, StandardCubic, MembershipReport)

    def to_json_dict(self) -> dict:
        return {
            "samples": [
                {
                    "t": float(t),
                    "p3": std.to_json_dict(),
                    "report": report.to_json_dict(),
                }
                for t, std, report in self.samples
            ]
        }


def deform(
    a: StandardCubic, b: StandardCubic, k_samples: int, seed: int = 0
) -> DeformationCurve:
    """The segment (1-t) a + t b, classified at k equispaced samples.

    Both endpoints must classify as closed; convexity then guarantees every
    sample is closed, which is re-checked sample by sample.
    """
    if a.n != b.n:
        raise DimensionMismatch("endpoints have different dimensions")
    if k_samples < 2:
        raise ValueError("need at least two samples")
    for name, end in (("a", a), ("b", b)):
        if not classify(end.p3, seed=seed).is_closed_ccpsr:
            raise EndpointNotClosed(f"endpoint {name} is not closed")
    samples = []
    for i in range(k_samples):
        t = i / (k_samples - 1)
        p3 = (1.0 - t) * a.p3 + t * b.p3
        report = classify(p3, seed=seed)
        if not report.is_closed_ccpsr:
            raise NotCCPSR(
                f"interior sample t = {t:g} failed the closedness invariant"
            )
        samples.append((t, StandardCubic(p3), report))
    return DeformationCurve(endpoints=(a, b), samples=samples)


def scale_path(p3: SymCubic, s: float) -> StandardCubic:
    """The instance with P scaled by s in [0, 1]; closedness is preserved."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s = {s:g} outside [0, 1]")
    return StandardCubic(s * p3)


@dataclass(frozen=True)
class HomogeneityResult:
    is_homogeneous: bool
    dB0: SoNDirectionField
    residual: float

    def to_json_dict(self) -> dict:
        return {
            "is_homogeneous": self.is_homogeneous,
            "residual": self.residual,
            "generators": [
                [list(map(float, row)) for row in gen] for gen in self.dB0.generators
            ],
        }


def _so_basis(n: int) -> list:
    basis = []
    for r in range(n):
        for s in range(r + 1, n):
            B = np.zeros((n, n))
            B[r, s] = 1.0
            B[s, r] = -1.0
            basis.append(B)
    return basis


def homogeneity_test(p3: SymCubic) -> HomogeneityResult:
    """Decide whether some antisymmetric direction field kills the first
    variation of P identically.

    The variation is affine in the field, so the decision reduces to one
    linear least squares solve per coordinate direction; the reported
    residual is the root sum of squares of the remaining variation tensors.
    """
    n = p3.n
    std = StandardCubic(p3)
    basis = _so_basis(n)
    n_unknown = len(basis)
    zero_field = SoNDirectionField.zero(n)
    generators = np.zeros((n, n, n))
    residual_sq = 0.0
    eye = np.eye(n)
    for d in range(n):
        v = eye[d]
        const = delta_p3(std, zero_field, v).tensor.reshape(-1)
        if n_unknown:
            cols = []
            for B in basis:
                gens = np.zeros((n, n, n))
                gens[d] = B
                field = SoNDirectionField(gens)
                # Subtract the affine part to isolate the linear action of B.
                col = delta_p3(std, field, v).tensor.reshape(-1) - const
                cols.append(col)
            A = np.stack(cols, axis=1)
            x, _, _, _ = np.linalg.lstsq(A, -const, rcond=None)
            resid_vec = A @ x + const
            generators[d] = sum(x[k] * basis[k] for k in range(n_unknown))
        else:
            resid_vec = const
        residual_sq += float(resid_vec @ resid_vec)
    residual = float(np.sqrt(residual_sq))
    threshold = 1e-9 * (1.0 + p3.frobenius_norm())
    return HomogeneityResult(
        is_homogeneous=residual <= threshold,
        dB0=SoNDirectionField(generators),
        residual=residual,
    )


@dataclass(frozen=True)
class CurvatureBoundsEstimate:
    lower: float
    upper: float
    lower_witness: SymCubic
    upper_witness: SymCubic
    budget: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "lower_witness": self.lower_witness.to_json_dict(),
            "upper_witness": self.upper_witness.to_json_dict(),
            "budget": self.budget,
            "seed": self.seed,
        }


def _triples(n: int) -> list:
    return [
        (i, j, k)
        for i in range(1, n + 1)
        for j in range(i, n + 1)
        for k in range(j, n + 1)
    ]


def _coeff_vector(p3: SymCubic, triples) -> np.ndarray:
    c = p3.coeffs(drop_zero=False)
    return np.array([c.get(t, 0.0) for t in triples])


_CIRCLE = None


def _sphere_max_quick(p3: SymCubic, seed: int) -> float:
    """Fast sphere maximum for sampling; certification happens separately."""
    global _CIRCLE
    n = p3.n
    if n == 1:
        return abs(float(p3.tensor[0, 0, 0]))
    if n == 2:
        if _CIRCLE is None:
            theta = np.linspace(0.0, 2.0 * np.pi, 2048, endpoint=False)
            _CIRCLE = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        vals = np.einsum("ijk,ai,aj,ak->a", p3.tensor, _CIRCLE, _CIRCLE, _CIRCLE)
        z = _newton_polish(p3, _CIRCLE[int(np.argmax(vals))], iters=6)
        return max(float(vals.max()), p3.eval(z))
    return max_on_sphere(p3, seed=seed, starts=8).max_value


def _project_generating_set(p3: SymCubic, seed: int) -> SymCubic:
    """Rescale into the generating set (no-op for members)."""
    m = _sphere_max_quick(p3, seed)
    if m <= CLOSEDNESS_THRESHOLD:
        return p3
    return (CLOSEDNESS_THRESHOLD / m) * p3


def _polish_extremum(p3: SymCubic, sign: float, seed: int, iters: int = 400) -> SymCubic:
    """Local improvement of sign * scalar curvature inside the generating set."""
    n = p3.n
    triples = _triples(n)
    vec = _coeff_vector(p3, triples)

    def build(v: np.ndarray) -> SymCubic:
        return SymCubic.from_coeffs(n, dict(zip(triples, v)))

    def objective(v: np.ndarray) -> float:
        return sign * scalar_at_base(_project_generating_set(build(v), seed))

    best = objective(vec)
    step = 0.05
    fd = 1e-5
    for _ in range(iters):
        grad = np.zeros(len(vec))
        for i in range(len(vec)):
            vp = vec.copy()
            vp[i] += fd
            vm = vec.copy()
            vm[i] -= fd
            grad[i] = (objective(vp) - objective(vm)) / (2.0 * fd)
        gn = np.linalg.norm(grad)
        if gn < 1e-11:
            break
        moved = False
        while step > 1e-12:
            cand = vec + step * grad / gn
            val = objective(cand)
            if val > best:
                vec, best = cand, val
                step *= 1.4
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    return _project_generating_set(build(vec), seed)


def _classical_extremal_candidates(n: int) -> list:
    """The classical surface extremizers embedded in the first two
    coordinates; members of the generating set in every dimension."""
    a_form = {(1, 1, 1): 2 / (3 * _SQ3), (1, 2, 2): -2 / _SQ3}
    b_form = {(1, 1, 1): 2 / (3 * _SQ3), (1, 2, 2): 1 / _SQ3}
    return [SymCubic.from_coeffs(n, c) for c in (a_form, b_form)]


def curvature_bounds_estimate(n: int, budget: int, seed: int = 0) -> CurvatureBoundsEstimate:
    """Inner estimates of the scalar curvature range over the generating set.

    Random symmetric tensors are rescaled so their sphere maximum is uniform
    in [0, threshold] and scored by base-point scalar curvature; whenever a
    candidate sets a new record it is polished by projected local search.
    The classical extremal surface forms are always in the pool, so the
    estimate dominates their values.  Candidates carry per-index seeds and
    records accumulate, hence growing the budget can only widen the band.
    Estimates are inner: the true range can only be wider.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    if n == 1:
        zero = SymCubic.zero(1)
        return CurvatureBoundsEstimate(0.0, 0.0, zero, zero, budget, seed)

    lower_val, upper_val = np.inf, -np.inf
    lower_wit = upper_wit = SymCubic.zero(n)

    def certify(member: SymCubic) -> SymCubic:
        """Rescale into the generating set when genuinely outside it (beyond
        roundoff of the sphere maximum)."""
        m = max_on_sphere(member, seed=seed).max_value
        if m > CLOSEDNESS_THRESHOLD + 1e-12:
            member = (CLOSEDNESS_THRESHOLD / m) * member
        return member

    def consider(member: SymCubic) -> None:
        nonlocal lower_val, upper_val, lower_wit, upper_wit
        s = scalar_at_base(member)
        if not (s < lower_val or s > upper_val):
            return
        # Record candidate: certify membership, then polish from it.
        member = certify(member)
        s = scalar_at_base(member)
        if s < lower_val:
            cand, sc = member, s
            polished = certify(_polish_extremum(member, sign=-1.0, seed=seed))
            sp = scalar_at_base(polished)
            if sp < sc:
                cand, sc = polished, sp
            if sc < lower_val:
                lower_val, lower_wit = sc, cand
        if s > upper_val:
            cand, sc = member, s
            polished = certify(_polish_extremum(member, sign=+1.0, seed=seed))
            sp = scalar_at_base(polished)
            if sp > sc:
                cand, sc = polished, sp
            if sc > upper_val:
                upper_val, upper_wit = sc, cand

    for member in _classical_extremal_candidates(n):
        consider(member)
    for i in range(budget):
        rng = np.random.default_rng((seed, i))
        raw = SymCubic.from_tensor(rng.standard_normal((n, n, n)), symmetrize=True)
        m = _sphere_max_quick(raw, seed)
        if m >= 1e-12:
            raw = (rng.uniform(0.0, CLOSEDNESS_THRESHOLD) / m) * raw
        consider(raw)

    return CurvatureBoundsEstimate(
        lower=float(lower_val),
        upper=float(upper_val),
        lower_witness=lower_wit,
        upper_witness=upper_wit,
        budget=budget,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Surface fixtures: the classical cubics in three variables, a point on each
# hypersurface, and an explicit reducing matrix, together with the reduced P.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceFixture:
    kind: str
    ambient: AmbientCubic
    change: LinearChange
    standard: StandardCubic
    b_param: float | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "kind": self.kind,
            "ambient": self.ambient.to_json_dict(),
            "A": [list(map(float, row)) for row in self.change.matrix],
            "p3": self.standard.to_json_dict(),
        }
        if self.b_param is not None:
            doc["b"] = float(self.b_param)
        return doc


def _fixture_data(kind: str, b: float | None):
    if kind == "a":
        ambient = {(1, 2, 3): 1.0}
        A = [[1, -2 / _SQ3, 0], [1, 1 / _SQ3, -1], [1, 1 / _SQ3, 1]]
        p3 = {(1, 1, 1): -2 / (3 * _SQ3), (1, 2, 2): 2 / _SQ3}
    elif kind == "b":
        ambient = {(1, 1, 2): 1.0, (1, 3, 3): -1.0}
        A = [[1, -1 / _SQ3, 0], [1, 2 / _SQ3, 0], [0, 0, 1]]
        p3 = {(1, 1, 1): 2 / (3 * _SQ3), (1, 2, 2): 1 / _SQ3}
    elif kind == "c":
        s15, s30 = np.sqrt(15.0), np.sqrt(30.0)
        ambient = {(1, 2, 3): 1.0, (1, 1, 1): 1.0}
        A = [
            [-1, 0, 2 * _SQ2 / s15],
            [1, 1 / _SQ2, -1 / s30],
            [-2, _SQ2, _SQ2 / s15],
        ]
        p3 = {(1, 1, 2): 2 * _SQ2 / s15, (2, 2, 2): 14 * _SQ2 / (15 * s15)}
    elif kind == "d":
        ambient = {(1, 1, 3): 1.0, (2, 2, 3): 1.0, (3, 3, 3): -1.0}
        A = [[0, 0, -1], [0, 1, 0], [-1, 0, 0]]
        p3 = {}
    elif kind == "e":
        ambient = {(1, 2, 2): 1.0, (1, 3, 3): -1.0, (2, 2, 2): 1.0}
        A = [[2, 1 / _SQ3, 0], [-1, 1 / _SQ3, 0], [0, 0, 1 / _SQ2]]
        p3 = {(1, 1, 1): 2 / (3 * _SQ3), (1, 2, 2): -1 / (2 * _SQ3)}
    elif kind == "f":
        if b is None or not -1.0 < b < 1.0:
            raise MalformedInput("kind f requires a parameter b in (-1, 1)")
        ambient = {(2, 2, 3): 1.0, (1, 1, 1): -4.0, (1, 3, 3): 3.0, (3, 3, 3): b}
        cb = (1.0 - b) ** (1.0 / 3.0)
        sixth = (1.0 - b) ** (1.0 / 6.0)
        A_tilde = np.array(
            [
                [-1.0 / cb, 0.0, 0.0],
                [0.0, sixth, 0.0],
                [1.0 / (2.0 * cb), 0.0, -sixth / np.sqrt(6.0)],
            ]
        )
        swap = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
        A = swap @ A_tilde
        p3 = {(2, 2, 2): _SQ2 * np.sqrt(1.0 - b) / (3.0 * _SQ3)}
    else:
        raise MalformedInput(f"unknown fixture kind {kind!r}")
    return ambient, np.asarray(A, dtype=float), p3


def surface_fixture(kind: str, b_param: float | None = None) -> SurfaceFixture:
    """One of the classical surface fixtures a-f with its reducing matrix.

    The reduction invariant (applying the matrix to the ambient cubic gives
    the stored standard form) is verified at construction.
    """
    if kind != "f" and b_param is not None:
        raise MalformedInput("only kind f takes a parameter")
    ambient_coeffs, A, p3_coeffs = _fixture_data(kind, b_param)
    ambient = AmbientCubic.from_coeffs(3, ambient_coeffs)
    change = LinearChange(A)
    standard = StandardCubic(SymCubic.from_coeffs(2, p3_coeffs))
    reduced = apply_change(ambient, change)
    target = standard.to_ambient()
    err = np.max(np.abs(reduced.tensor.tensor - target.tensor.tensor))
    if err > 1e-12:
        raise MalformedInput(f"fixture {kind} failed its reduction invariant ({err:g})")
    return SurfaceFixture(
        kind=kind,
        ambient=ambient,
        change=change,
        standard=standard,
        b_param=b_param,
    )


def f_interpolation_chain(b: float) -> dict:
    """The two-step reduction of the f family: coordinate swap, then the
    point-moving matrix; exposes the non-orthogonal pieces individually."""
    fixture = surface_fixture("f", b)
    swap = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    A_tilde = swap @ fixture.change.matrix  # swap is an involution
    return {
        "fixture": fixture,
        "swap": LinearChange(swap),
        "A_tilde": LinearChange(A_tilde),
        "base_point": fixture.change.matrix @ np.array([1.0, 0.0, 0.0]),
    }


def e_from_y3_limit() -> tuple:
    """The limit instance of the f family (pure y^3 term) and the explicit
    non-orthogonal change taking it to the e fixture's standard form."""
    limit = StandardCubic(
        SymCubic.from_coeffs(2, {(1, 1, 1): 2.0 / (3.0 * _SQ3)})
    ).to_ambient()
    c13 = 2.0 ** (-1.0 / 3.0)
    A = np.array(
        [
            [c13 * 4.0 / 3.0, c13 * 2.0 / (3.0 * _SQ3), 0.0],
            [c13 / _SQ3, c13 * 5.0 / 3.0, 0.0],
            [0.0, 0.0, 2.0 ** (-5.0 / 6.0) * _SQ3],
        ]
    )
    target = surface_fixture("e").standard
    return limit, LinearChange(A), target
