"""The six orthogonal components of the intrinsic-torsion space W.

W splits into (L3E + K + E)(H + S3H) with multiplicity one each.  The H /
S3H halves are the 4 and -2 eigenspaces of the five-slot operator Lcal, so

    hpart   = (Lcal + 2)/6,      s3hpart = (4 - Lcal)/6.

Since the contraction d* kills exactly L3EH + KS3H and hat_dstar is a right
inverse landing in W, the four components visible to d* are recovered as
hat_dstar of the matching 3-form projector of d*a; the invisible two are the
eigenspace remainders:

    KH, EH, ES3H, L3ES3H : a -> hat_dstar(proj3(d* a))
    L3EH  = hpart(a)  - KH - EH
    KS3H  = s3hpart(a) - ES3H - L3ES3H.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


from .exterior import MixedTorsion, contract12
from .structure import QuatStructure
from .threeform import hat_matrix, proj3_matrix
from .torsion import MembershipError, is_in_W


class ComponentLabel(Enum):
    L3EH = "L3EH"
    KH = "KH"
    EH = "EH"
    L3ES3H = "L3ES3H"
    KS3H = "KS3H"
    ES3H = "ES3H"

    @property
    def display(self) -> str:
        return _DISPLAY[self]

    @property
    def zero_at_n2(self) -> bool:
        return self in (ComponentLabel.L3EH, ComponentLabel.L3ES3H)


_DISPLAY = {
    ComponentLabel.L3EH: "Λ₀³EH",
    ComponentLabel.KH: "KH",
    ComponentLabel.EH: "EH",
    ComponentLabel.L3ES3H: "Λ₀³ES³H",
    ComponentLabel.KS3H: "KS³H",
    ComponentLabel.ES3H: "ES³H",
}

COMPONENT_DIMS = {
    ComponentLabel.L3EH: lambda n: 0 if n == 2 else 28,
    ComponentLabel.KH: lambda n: 32 if n == 2 else 128,
    ComponentLabel.EH: lambda n: 4 * n,
    ComponentLabel.L3ES3H: lambda n: 0 if n == 2 else 56,
    ComponentLabel.KS3H: lambda n: 64 if n == 2 else 256,
    ComponentLabel.ES3H: lambda n: 8 * n,
}

_PROJ3_OF = {
    ComponentLabel.KH: "KH",
    ComponentLabel.EH: "EH",
    ComponentLabel.ES3H: "ES3H",
    ComponentLabel.L3ES3H: "L3ES3H",
}


def _check(a: MixedTorsion, s: QuatStructure, tol: float):
    ok, resid = is_in_W(a, s, tol)
    if not ok:
        raise MembershipError(
            f"tensor is not in the torsion space (residual {resid:.2e})")


def proj_hpart(a: MixedTorsion, s: QuatStructure, tol: float = 1e-8,
               check: bool = True) -> MixedTorsion:
    if check:
        _check(a, s, tol)
    La = s.lcal_raw(a)
    return MixedTorsion(a.dim, (La.rows + 2.0 * a.rows) / 6.0)


def proj_s3hpart(a: MixedTorsion, s: QuatStructure, tol: float = 1e-8,
                 check: bool = True) -> MixedTorsion:
    if check:
        _check(a, s, tol)
    La = s.lcal_raw(a)
    return MixedTorsion(a.dim, (4.0 * a.rows - La.rows) / 6.0)


def component(a: MixedTorsion, X: ComponentLabel, s: QuatStructure,
              tol: float = 1e-8, check: bool = True) -> MixedTorsion:
    if check:
        _check(a, s, tol)
    if X in _PROJ3_OF:
        ds = contract12(a)
        part = proj3_matrix(s, _PROJ3_OF[X]) @ ds.coeffs
        return MixedTorsion.from_flat(a.dim, hat_matrix(s) @ part)
    if X is ComponentLabel.L3EH:
        h = proj_hpart(a, s, check=False)
        return (h - component(a, ComponentLabel.KH, s, check=False)
                - component(a, ComponentLabel.EH, s, check=False))
    h = proj_s3hpart(a, s, check=False)
    return (h - component(a, ComponentLabel.ES3H, s, check=False)
            - component(a, ComponentLabel.L3ES3H, s, check=False))


def components(a: MixedTorsion, s: QuatStructure, tol: float = 1e-8,
               check: bool = True) -> dict[ComponentLabel, MixedTorsion]:
    """All six components (shares the d*/eigen work across labels)."""
    if check:
        _check(a, s, tol)
    ds = contract12(a)
    out = {}
    for X, lab3 in _PROJ3_OF.items():
        part = proj3_matrix(s, lab3) @ ds.coeffs
        out[X] = MixedTorsion.from_flat(a.dim, hat_matrix(s) @ part)
    out[ComponentLabel.L3EH] = (proj_hpart(a, s, check=False)
                                - out[ComponentLabel.KH]
                                - out[ComponentLabel.EH])
    out[ComponentLabel.KS3H] = (proj_s3hpart(a, s, check=False)
                                - out[ComponentLabel.ES3H]
                                - out[ComponentLabel.L3ES3H])
    return out


@dataclass
class ComponentProfile:
    """Six component norms of a torsion tensor plus its total norm."""

    norms: dict[ComponentLabel, float]
    total: float

    @property
    def pythagoras_residual(self) -> float:
        if self.total == 0.0:
            return 0.0
        ss = sum(v * v for v in self.norms.values())
        return abs(ss - self.total ** 2) / self.total ** 2

    def to_json(self) -> dict:
        return {
            "norms": {X.value: v for X, v in self.norms.items()},
            "total": self.total,
        }


def profile(a: MixedTorsion, s: QuatStructure, tol: float = 1e-8,
            check: bool = True) -> ComponentProfile:
    comps = components(a, s, tol=tol, check=check)
    return ComponentProfile(
        norms={X: c.norm() for X, c in comps.items()},
        total=a.norm(),
    )
