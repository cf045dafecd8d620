"""Spectral sequence of a filtered free complex over a PID.

Pages are computed by explicit subquotient bases:
  E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}),  Z_r^p = F^p  n  d^-1(F^{p+r})
with F^p the span of generators of filtration level >= p.  Submodules of the
ambient free module are held as generator-column matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import smith
from .complexes import ComplexError, FreeComplex, ModuleReport, _sorted_torsion
from .rings import F2Z2


def _span_columns(ring, n, indices):
    cols = smith.mat_zero(ring, n, len(indices))
    for k, i in enumerate(indices):
        cols[i][k] = ring.one
    return cols


def _ncols(m):
    return len(m[0]) if m else 0


def submodule_intersection(ring, n, a, b):
    """Generators of span(a) n span(b) inside R^n."""
    if _ncols(a) == 0 or _ncols(b) == 0:
        return smith.mat_zero(ring, n, 0)
    combined = smith.mat_hstack(a, b)
    ker = smith.pid_kernel(ring, combined)
    ca = _ncols(a)
    if not ker or _ncols(ker) == 0:
        return smith.mat_zero(ring, n, 0)
    xpart = ker[:ca]  # first block of kernel rows = coefficients on a-columns
    return smith.mat_mul(ring, a, xpart)


def preimage_under(ring, n, d, s):
    """Generators of {x in R^n : d x in span(s)}."""
    if _ncols(s) == 0:
        return smith.pid_kernel(ring, d) if n else []
    combined = smith.mat_hstack(d, s)
    ker = smith.pid_kernel(ring, combined)
    if not ker or _ncols(ker) == 0:
        return smith.mat_zero(ring, n, 0)
    return ker[:n]


def subquotient_report(ring, ambient_n, num, den) -> ModuleReport:
    """span(num)/span(den) with span(den) <= span(num)."""
    g = _ncols(num)
    if g == 0:
        return ModuleReport(ring.name, 0, ())
    if _ncols(den) == 0:
        rel = smith.pid_kernel(ring, num)
    else:
        coords = smith.pid_solve(ring, num, den)
        if coords is None:
            raise ComplexError("denominator not contained in numerator")
        rel = smith.mat_hstack(coords, smith.pid_kernel(ring, num))
    free, torsion = smith.module_report_from_presentation(ring, rel, g)
    return ModuleReport(ring.name, free, tuple(_sorted_torsion(ring, torsion)))


@dataclass
class SpectralPage:
    page: int
    by_level: dict
    total: ModuleReport


@dataclass
class SpectralReport:
    pages: list
    degeneration_page: int | None
    width: int

    def page(self, r: int) -> SpectralPage:
        for p in self.pages:
            if p.page == r:
                return p
        raise KeyError(r)


def spectral_pages(c: FreeComplex, up_to_page: int) -> SpectralReport:
    """Pages E_1 .. E_max(up_to_page, width+1) and the detected degeneration page.

    Beyond page width+1 every differential vanishes for filtration reasons, so
    stabilization detected through that page is certified.
    """
    if c.filtration is None:
        raise ComplexError("spectral_pages needs a filtered complex")
    if c.ring is F2Z2:
        raise ComplexError("push F2[Z/2] complexes through a_f2 or borel first")
    ring, n = c.ring, c.n
    levels = sorted(set(c.filtration)) if n else [0]
    lo, hi = (levels[0], levels[-1]) if levels else (0, 0)
    width = hi - lo if n else 0
    last_page = max(up_to_page, width + 1)

    fcache = {}

    def F(p):
        if p not in fcache:
            if p <= lo:
                fcache[p] = _span_columns(ring, n, list(range(n)))
            elif p > hi:
                fcache[p] = smith.mat_zero(ring, n, 0)
            else:
                fcache[p] = _span_columns(
                    ring, n, [i for i in range(n) if c.filtration[i] >= p]
                )
        return fcache[p]

    zcache = {}

    def Z(r, p):
        # F^p n d^-1(F^{p+r}); clamp exponents outside the active range
        p_eff = min(max(p, lo), hi + 1)
        q_eff = min(max(p + r, lo), hi + 1)
        key = (p_eff, q_eff)
        if key not in zcache:
            pre = preimage_under(ring, n, c.d, F(q_eff))
            zcache[key] = submodule_intersection(ring, n, F(p_eff), pre)
        return zcache[key]

    pages = []
    for r in range(1, last_page + 1):
        by_level = {}
        free_total, torsion_total = 0, []
        for p in range(lo, hi + 1):
            num = Z(r, p)
            den_a = Z(r - 1, p + 1)
            src = Z(r - 1, p - r + 1)
            den_b = smith.mat_mul(ring, c.d, src) if _ncols(src) else smith.mat_zero(ring, n, 0)
            den = smith.mat_hstack(den_a, den_b)
            rep = subquotient_report(ring, n, num, den)
            if not rep.is_zero():
                by_level[p] = rep
                free_total += rep.free_rank
                torsion_total.extend(rep.torsion)
        total = ModuleReport(
            ring.name, free_total, tuple(_sorted_torsion(ring, torsion_total))
        )
        pages.append(SpectralPage(r, by_level, total))

    degeneration = None
    for idx, pg in enumerate(pages):
        tail = pages[idx:]
        if all(_same_page(pg, q) for q in tail):
            degeneration = pg.page
            break
    return SpectralReport(pages, degeneration, width)


def _same_page(a: SpectralPage, b: SpectralPage) -> bool:
    if set(a.by_level) != set(b.by_level):
        return False
    return all(a.by_level[p] == b.by_level[p] for p in a.by_level)
