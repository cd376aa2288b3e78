"""Analysis pipeline and versioned reports.

``analyze(spec, config)`` runs every point of interest through the
invariant engine, the tensor routes, the ideal generators and the
boundary-system step, and records each checked claim as pass / fail /
skipped.  Reports are plain dicts serialized with sorted keys; exact
numbers are ``{"re": "p/q", "im": "p/q"}``.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import ZERO, GaussianRational, gr
from .geometry import GeometryError
from .invariants import is_admissible, point_invariants
from .normal_form import NormalFormError
from .parser import HypersurfaceSpec, SpecError, parse_polynomial
from .sheaves import AdmissibilityError, ideal_generator
from .tensors import CH, CK, CT, K10, KBAR, NormalFormTensors, TensorLab, double_bracket_diagnostic, \
    quadruple_bracket_diagnostic, symmetric_extension
from .boundary import BoundarySystemState, boundary_system_step, quartic_reduction_check
from .invariants import kernel_coincidence_check

SCHEMA = "crinv-report/1"

# claim id -> what is asserted
CLAIMS = {
    "cubic-vanishes-when-pseudoconvex": "tau3 = 0 in every slot at a pseudoconvex point",
    "cubic-routes-agree": "derivative tau3 = bracket tau31 on CK x K10 x conj K10",
    "quartic-routes-agree": "derivative tau4 = normal-form tau40 = quadruple bracket on kernel slots",
    "quartic-positivity": "tau4(v2, v2, v1, conj v1) >= 0 for real tangent v2 and kernel v1",
    "no-type-3": "no cubic normal-form terms in the kernel variables at a pseudoconvex point",
    "kernel-coincidence": "slot kernels of tau40 equal the holomorphic kernel of phi4",
    "boundary-reduction": "weight-1 length-4 list derivatives equal tau40, length-3 vanish",
    "tau21-calibration": "tau21 = c * tau3 on H10 x K10 x conj K10 with a single constant c",
    "expectation": "fixture expectation matches the computed value",
}


@dataclass
class AnalysisConfig:
    points: list | None = None
    order: int | None = None
    budget: Fraction = Fraction(4)
    positivity_samples: int = 64
    seed: int = 0
    diagnostics: bool | None = None
    jobs: int = 1


@dataclass
class AnalysisReport:
    data: dict

    @property
    def claims(self) -> list:
        return [c for pt in self.data["points"] for c in pt["claims"]]

    @property
    def passed(self) -> bool:
        return all(c["status"] != "fail" for c in self.claims) and not any(
            pt.get("error") for pt in self.data["points"])

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        return render_text(self.data)


def _enc(vs):
    return [[gr(x).to_json() for x in v] for v in vs]


def _claim(cid: str, status: str, **detail) -> dict:
    out = {"id": cid, "asserts": CLAIMS[cid.split(":")[0]], "status": status}
    out.update(detail)
    return out


def _passfail(ok: bool) -> str:
    return "pass" if ok else "fail"


def _tensor_table(t) -> dict:
    nonzero = {",".join(str(i) for i in k): v.to_json() for k, v in sorted(t.values.items()) if v}
    return {"slots": list(t.slots), "dims": [len(b) for b in t.bases], "nonzero": nonzero}


# positivity --------------------------------------------------------------------------------

def positivity_sample(lab: TensorLab, count: int, seed: int = 0) -> dict:
    """Evaluate tau4(v2, v2, v1, conj v1) on random rational real tangent v2 and kernel v1."""
    rng = random.Random(seed)
    m = lab.m

    def r():
        return Fraction(rng.randint(-6, 6), rng.randint(1, 5))

    worst = None
    bad = None
    for _ in range(count):
        a = [GaussianRational(r(), r()) for _ in range(m)]
        v2 = tuple(a) + tuple(x.conj() for x in a) + (gr(r()),)
        coeffs = [GaussianRational(r(), r()) for _ in lab.kernel]
        k = [sum((c * v[j] for c, v in zip(coeffs, lab.kernel)), ZERO) for j in range(m)]
        val = lab.tau4(v2, v2, k, [x.conj() for x in k])
        if val.im or val.re < 0:
            bad = {"v2": [x.to_json() for x in v2], "v1": [x.to_json() for x in k], "value": val.to_json()}
            break
        if worst is None or val.re < worst:
            worst = val.re
    return {"samples": count, "ok": bad is None, "min": None if worst is None else str(worst),
            "witness": bad}


# ideal generators ---------------------------------------------------------------------------

def ideal_section(lab: TensorLab) -> dict:
    """Differentials of g = <d'rho,[L2,L1]> and f = L3 g over kernel pairs and L3 in the CT basis."""
    h = lab.h
    m = lab.m
    rows = []
    transversal = False
    tangential_ok = True
    basis = lab.basis(CT)
    for j, a in enumerate(lab.kernel):
        for k, b in enumerate(lab.kernel):
            l2 = lab.admissible_holo(a)
            l1 = lab.admissible_anti([x.conj() for x in b])
            g = ideal_generator(h, "g", None, l2, l1, check=False)
            rows.append({"kind": "g", "L2": j, "L1": k, "differential": [x.to_json() for x in g.differential]})
            for i, v3 in enumerate(basis):
                f = ideal_generator(h, "f", lab.field(v3), l2, l1, check=False)
                du = f.differential[2 * m]
                tangential = not v3[2 * m]
                if tangential:
                    tangential_ok = tangential_ok and not du
                else:
                    transversal = transversal or bool(du)
                rows.append({"kind": "f", "L3": i, "L2": j, "L1": k, "L3_tangential": tangential,
                             "differential": [x.to_json() for x in f.differential]})
    return {"generators": rows, "transversal_cut": transversal,
            "tangential_vanish_on_dz0": tangential_ok}


# boundary system ----------------------------------------------------------------------------

def boundary_trace(h, p, order, budget) -> dict:
    """Greedy boundary-system steps: at each stage the admitted kernel vector of least weight."""
    st = BoundarySystemState.start(h, p, order)
    used = set()
    steps = []
    while True:
        cands = [v for v in st.lab.kernel if tuple(v) not in used and st.admits(v)]
        if not cands:
            break
        best = None
        for v in cands:
            res = boundary_system_step(st, v, budget, commit=False)
            if res.success and (best is None or res.alpha < best[1].alpha):
                best = (v, res)
        if best is None:
            steps.append({"status": "exhausted", "budget": str(budget),
                          "candidates": _enc(cands)})
            break
        v = best[0]
        res = boundary_system_step(st, v, budget, commit=True)
        used.add(tuple(v))
        steps.append({"candidate": [x.to_json() for x in v], "alpha": str(res.alpha), "list": res.list.render(),
                      "value": res.value.to_json(), "part": res.part, "lists_tried": len(res.tried)})
    return {"q": st.q, "nu": st.nu, "weights": {str(k): str(w) for k, w in sorted(st.weights.items())},
            "steps": steps}


# expectations ---------------------------------------------------------------------------------

def _expectations_for(spec: HypersurfaceSpec, index: int) -> dict:
    out = {}
    for key, val in spec.expect.items():
        base, _, at = key.partition("@")
        if (int(at) if at else 0) == index:
            out[base] = val
    return out


def _check_expectations(exp: dict, pt: dict, nft) -> list:
    claims = []
    inv = pt["invariants"]
    for key in sorted(exp):
        want = exp[key].strip()
        got = None
        if key == "levi_rank":
            got = str(inv["levi_rank"])
        elif key == "pseudoconvex":
            got = "yes" if inv["pseudoconvex"]["pseudoconvex"] else "no"
            want = {"true": "yes", "false": "no"}.get(want.lower(), want.lower())
        elif key == "type":
            got = inv["type"]["verdict"] if inv["type"] else "refused"
        elif key == "multitype":
            got = "refused" if inv["multitype"] is None else "(" + ",".join(inv["multitype"]["entries"]) + ")"
            want = want.replace(" ", "")
        elif key == "quartic_rank":
            got = str(inv["quartic_rank"])
        elif key == "tau40":
            if nft is None or nft.quartic is None:
                got = "unavailable"
            else:
                poly = symmetric_extension(nft, "tau40").poly
                try:
                    ok = parse_polynomial(want, poly.ring) == poly
                except SpecError as exc:
                    claims.append(_claim("expectation:tau40", "fail", expected=want, error=str(exc)))
                    continue
                claims.append(_claim("expectation:tau40", _passfail(ok), expected=want, got=poly.render()))
                continue
        elif key == "kernels_coincide":
            kr = pt.get("kernels")
            got = "unavailable" if kr is None else _coincide_text(kr)
            want = want.lower()
        elif key == "slot_kernel_dims":
            kr = pt.get("kernels")
            got = "unavailable" if kr is None else ",".join(str(len(k)) for k in kr["slot_kernels"])
            want = want.replace(" ", "")
        elif key == "tangent_S_dim":
            ts = inv.get("tangent_space_S")
            got = "unavailable" if ts is None else str(ts["dim"])
        elif key == "transversal_cut":
            got = "unavailable" if pt.get("ideal") is None else ("yes" if pt["ideal"]["transversal_cut"] else "no")
            want = want.lower()
        else:
            claims.append(_claim(f"expectation:{key}", "fail", expected=want, error="unknown expectation key"))
            continue
        claims.append(_claim(f"expectation:{key}", _passfail(got == want), expected=want, got=got))
    return claims


def _coincide_text(kr: dict) -> str:
    dims = [len(k) for k in kr["slot_kernels"]]
    hk = len(kr["holomorphic_kernel"])
    bad = [str(i + 1) for i, d in enumerate(dims) if d != hk]
    return "yes" if not bad else "no:" + ",".join(bad)


# pipeline -----------------------------------------------------------------------------------------

def analyze_point(spec: HypersurfaceSpec, p, index: int, config: AnalysisConfig) -> dict:
    h = spec.hypersurface()
    order = config.order or max(spec.order, 6)
    pt: dict = {"index": index, "point": None if p is None else [gr(x).to_json() for x in p], "claims": []}
    claims = pt["claims"]
    try:
        inv = point_invariants(h, p, order)
    except (GeometryError, NormalFormError, AdmissibilityError) as exc:
        pt["error"] = str(exc)
        return pt
    pt["invariants"] = inv.to_json()
    psc = bool(inv.pseudoconvex)
    lab = TensorLab(h, p, order)
    pt["tensors"] = {"levi": _tensor_table(lab.levi_tensor())}
    t3 = lab.tau3_array()
    pt["tensors"]["tau3"] = _tensor_table(t3)
    nft = None
    for quartic in (True, False):
        try:
            nft = NormalFormTensors(h, p, order, quartic=quartic)
            break
        except (NormalFormError, AdmissibilityError) as exc:
            pt["normal_form_error"] = str(exc)
    if nft is not None:
        cnf = nft.cubic
        nf = {"levi_rank": cnf.q, "signature": list(cnf.signature),
              "tau30": symmetric_extension(nft, "tau30").poly.render(),
              "cubic_obstructions": len(cnf.cubic_obstructions())}
        if nft.quartic is not None:
            nf["phi4"] = nft.quartic.phi4.render()
            nf["tau40"] = symmetric_extension(nft, "tau40").poly.render()
        pt["normal_form"] = nf
    if lab.kernel:
        same3 = all(lab.tau31(v3, v2, v1) == lab.tau3(v3, v2, v1)
                    for v3 in lab.basis(CK) for v2 in lab.basis(K10) for v1 in lab.basis(KBAR))
        claims.append(_claim("cubic-routes-agree", _passfail(same3)))
        if not t3.is_zero():
            claims.append(_tau21_calibration(lab))
    if psc:
        claims.append(_claim("cubic-vanishes-when-pseudoconvex", _passfail(t3.is_zero())))
        if nft is not None:
            claims.append(_claim("no-type-3", _passfail(symmetric_extension(nft, "tau30").is_zero())))
    else:
        claims.append(_claim("cubic-vanishes-when-pseudoconvex", "skipped", reason="not pseudoconvex"))
    quartic_ok = psc and t3.is_zero() and nft is not None and nft.quartic is not None
    if quartic_ok and lab.kernel:
        t4 = lab.tau4_array()
        t40 = nft.tau40_array()
        pt["tensors"]["tau4"] = _tensor_table(t4)
        pt["tensors"]["tau40"] = _tensor_table(t40)
        same = t4.values == t40.values
        bracket = lab.quartic_bracket_check()
        claims.append(_claim("quartic-routes-agree", _passfail(same and bracket),
                             derivative_equals_normal_form=same, bracket_equals_derivative=bracket))
        pos = positivity_sample(lab, config.positivity_samples, config.seed + index)
        pt["positivity"] = pos
        claims.append(_claim("quartic-positivity", _passfail(pos["ok"]), samples=pos["samples"]))
        kr = kernel_coincidence_check(h, p, pseudoconvex=True)
        pt["kernels"] = kr.to_json()
        claims.append(_claim("kernel-coincidence", _passfail(bool(kr.coincide))))
        pt["ideal"] = ideal_section(lab)
        red = quartic_reduction_check(h, p, order=order)
        pt["boundary"] = {"reduction": {"length4_equal": red.length4_equal, "length3_vanish": red.length3_vanish,
                                        "lists": len(red.lists)},
                          "trace": boundary_trace(h, p, order, config.budget)}
        claims.append(_claim("boundary-reduction", _passfail(red.ok), lists=len(red.lists)))
    elif lab.kernel and nft is not None and nft.quartic is not None and not psc:
        # slot kernels are still informative without pseudoconvexity
        pt["kernels"] = kernel_coincidence_check(h, p, pseudoconvex=False).to_json()
        pt["tensors"]["tau40"] = _tensor_table(nft.tau40_array())
    diag = config.diagnostics if config.diagnostics is not None else spec.diagnostics
    if diag:
        pt["diagnostics"] = diagnostics_section(lab)
    if config.points is None:
        # expectations are indexed by the points listed in the file
        claims.extend(_check_expectations(_expectations_for(spec, index), pt, nft))
    return pt


def _tau21_calibration(lab: TensorLab) -> dict:
    """Ratio tau21 / tau3 on holomorphic-kernel-conj-kernel triples; a single ratio means tau21 = c * phi21."""
    ratios = set()
    for v3 in lab.basis(CH)[:lab.m]:
        for v2 in lab.basis(K10):
            for v1 in lab.basis(KBAR):
                t3 = lab.tau3(v3, v2, v1)
                t21 = lab.tau21(v3, v2, v1)
                if t3:
                    ratios.add(t21 / t3)
                elif t21:
                    ratios.add(None)
    if not ratios:
        return _claim("tau21-calibration", "skipped", reason="phi21 vanishes on the kernel")
    if len(ratios) == 1 and None not in ratios:
        return _claim("tau21-calibration", "pass", constant=next(iter(ratios)).to_json())
    return _claim("tau21-calibration", "fail", constants=sorted("none" if r is None else str(r) for r in ratios))


def diagnostics_section(lab: TensorLab) -> dict:
    """c-dependence of bracket expressions along twisted extensions (needs a nondegenerate and a kernel coordinate)."""
    m = lab.m
    nondeg = [j for j in range(m) if lab.levi[j, j] and all(not lab.levi[j, k] for k in range(m) if k != j)]
    kern = [j for j in range(m) if all(not lab.levi[j, k] and not lab.levi[k, j] for k in range(m))]
    if not nondeg or not kern:
        return {"available": False}
    cs = [gr(0), gr(1), gr(2), GaussianRational(0, 1)]
    dbl = double_bracket_diagnostic(lab.h, cs, nondeg[0], kern[0])
    quad = quadruple_bracket_diagnostic(lab.h, cs, nondeg[0], kern[0])
    return {"available": True, "nondegenerate": nondeg[0], "kernel": kern[0],
            "c": [c.to_json() for c in cs],
            "double_bracket": [dbl[c].to_json() for c in cs],
            "quadruple_bracket": [quad[c][0].to_json() for c in cs],
            "second_derivative": [quad[c][1].to_json() for c in cs],
            "depends_on_c": len({dbl[c] for c in cs}) > 1 or len({quad[c][0] for c in cs}) > 1}


def _run_point(args):
    spec, p, index, config = args
    return analyze_point(spec, p, index, config)


def analyze(spec: HypersurfaceSpec, config: AnalysisConfig | None = None) -> AnalysisReport:
    config = config or AnalysisConfig()
    points = config.points if config.points is not None else (spec.points or [None])
    h = spec.hypersurface()
    for p in points:
        if p is not None and not h.contains(p):
            raise SpecError("point is not on the hypersurface")
    jobs = [(spec, p, k, config) for k, p in enumerate(points)]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as ex:
            results = list(ex.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    data = {
        "schema": SCHEMA,
        "model": {"name": spec.name, "claim": spec.claim, "n": spec.n, "rho": spec.rho.render(),
                  "order": config.order or max(spec.order, 6)},
        "config": {"budget": str(config.budget), "positivity_samples": config.positivity_samples,
                   "seed": config.seed},
        "points": results,
    }
    if config.points is not None and spec.expect:
        data["config"]["expectations"] = "skipped: points given on the command line"
    if spec.weights:
        data["model"]["weights"] = [{"weights": [str(x) for x in wv], "admissible": is_admissible(wv)}
                                    for wv in spec.weights]
    rep = AnalysisReport(data)
    data["summary"] = {"claims": len(rep.claims),
                       "failed": sorted(c["id"] for c in rep.claims if c["status"] == "fail"),
                       "passed": rep.passed}
    return rep


# text rendering ----------------------------------------------------------------------------------

def _num(x: dict) -> str:
    return gr(GaussianRational(Fraction(x["re"]), Fraction(x["im"]))).render()


def render_text(data: dict) -> str:
    m = data["model"]
    lines = [f"model {m['name'] or '(unnamed)'}: n={m['n']}, order={m['order']}",
             f"  rho = {m['rho']}"]
    if m["claim"]:
        lines.append(f"  source: {m['claim']}")
    for pt in data["points"]:
        where = "origin" if pt["point"] is None else "(" + ", ".join(_num(x) for x in pt["point"]) + ")"
        lines.append(f"point {pt['index']}: {where}")
        if pt.get("error"):
            lines.append(f"  error: {pt['error']}")
            continue
        inv = pt["invariants"]
        pc = inv["pseudoconvex"]
        lines.append(f"  levi rank {inv['levi_rank']}, signature {tuple(pc['signature'])}, "
                     f"pseudoconvex {'yes' if pc['pseudoconvex'] else 'no'}")
        if inv["type"]:
            lines.append(f"  type: {inv['type']['verdict']} ({inv['type']['tier']})")
        if inv["multitype"]:
            lines.append("  multitype: (" + ",".join(inv["multitype"]["entries"]) + ")")
        if inv.get("tangent_space_S"):
            lines.append(f"  tangent space of S: dim {inv['tangent_space_S']['dim']}")
        nf = pt.get("normal_form", {})
        if "tau40" in nf:
            lines.append(f"  quartic part on the kernel: {nf['tau40']}")
        b = pt.get("boundary")
        if b:
            for s in b["trace"]["steps"]:
                if s.get("status") == "exhausted":
                    lines.append(f"  boundary step: exhausted within weight {s['budget']}")
                else:
                    lines.append(f"  boundary step: weight {s['alpha']} via {s['list']} = {_num(s['value'])}")
        for c in pt["claims"]:
            lines.append(f"  [{c['status'].upper():7}] {c['id']}")
    s = data["summary"]
    lines.append(f"{'PASS' if s['passed'] else 'FAIL'}: {s['claims']} claims, {len(s['failed'])} failed")
    return "\n".join(lines) + "\n"
