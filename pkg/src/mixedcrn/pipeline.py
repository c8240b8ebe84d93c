"""The decompose / parametrize / merge pipeline and its report."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import sympy as sp

from .decomposition import Decomposition, finest_independent_decomposition, mass_action_union, restrict_kinetics
from .dsl import Model, render_expr
from .errors import CRNError, MergeContradiction, MethodInapplicable
from .kinetics import KineticAssignment, concentration_name
from .merge import MergeResult, acr_report, merge_parametrizations
from .mixed import ClearedSystem, clear_denominators, solve_by_elimination
from .network import Network, deficiency, format_complex
from .parametrization import Parametrization, parametrize
from .translation import check_dynamic_equivalence, check_translation, search_translation, translate
from .verify import DEFAULT_SEED, ResidualReport, residual_harness

SCHEMA = "mixedcrn.report/1"


@dataclass
class PartResult:
    index: int
    labels: List[str]
    pure: bool
    method: str
    parametrization: Optional[Parametrization] = None
    shifts: Dict[str, str] = field(default_factory=dict)
    deficiencies: Optional[Dict[str, int]] = None
    residual: Optional[ResidualReport] = None
    error: Optional[str] = None


@dataclass
class PipelineReport:
    network: Network
    kinetics: KineticAssignment
    decomposition: Optional[Decomposition] = None
    parts: List[PartResult] = field(default_factory=list)
    mutually_exclusive: Optional[bool] = None
    merge: Optional[MergeResult] = None
    acr: Dict[str, bool] = field(default_factory=dict)
    residual: Optional[ResidualReport] = None
    cleared: Optional[ClearedSystem] = None
    errors: List[Dict[str, str]] = field(default_factory=list)
    inapplicable: bool = False
    seed: int = DEFAULT_SEED

    @property
    def parametrization(self) -> Optional[Parametrization]:
        return self.merge.parametrization if self.merge else None

    @property
    def exit_code(self) -> int:
        if self.inapplicable:
            return 3
        if self.errors:
            return 1
        if self.residual is None or not self.residual.passed:
            return 1
        if any(p.residual is not None and not p.residual.passed for p in self.parts):
            return 1
        return 0

    def to_dict(self) -> Dict[str, Any]:
        net = self.network
        out: Dict[str, Any] = {"schema": SCHEMA, "seed": self.seed,
                               "structure": deficiency(net).as_dict()}
        if self.cleared is not None:
            out["cleared"] = cleared_to_dict(self.cleared)
        if self.decomposition is not None:
            out["decomposition"] = {
                "independent": self.decomposition.independent,
                "parts": [p.labels for p in self.parts] or self.decomposition.labels(net),
                "mutually_exclusive": self.mutually_exclusive,
            }
        out["parts"] = []
        for p in self.parts:
            d: Dict[str, Any] = {"index": p.index + 1, "reactions": p.labels, "pure_mass_action": p.pure,
                                 "method": p.method}
            if p.shifts:
                d["shifts"] = p.shifts
            if p.deficiencies:
                d["deficiencies"] = p.deficiencies
            if p.parametrization is not None:
                d["parametrization"] = param_to_dict(p.parametrization)
            if p.residual is not None:
                d["residual"] = p.residual.max_residual
            if p.error:
                d["error"] = p.error
            out["parts"].append(d)
        if self.merge is not None:
            out["merged"] = param_to_dict(self.merge.parametrization)
            out["constraints"] = [{"species": c.species, "resolution": c.resolution}
                                  for c in self.merge.constraints if c.resolution != "identical"]
        out["acr"] = {s: ("ACR" if v else "not-ACR") for s, v in self.acr.items()}
        if self.residual is not None:
            r = self.residual
            out["verification"] = {"samples": r.samples, "tol": r.tol, "max_residual": r.max_residual,
                                   "median_residual": r.median_residual, "passed": r.passed}
        out["errors"] = self.errors
        out["exit_code"] = self.exit_code
        return out


def param_to_dict(P: Parametrization) -> Dict[str, Any]:
    return {
        "free_parameters": [s.name for s in P.free_parameters],
        "expressions": {s: render_expr(e) for s, e in P.items()},
        "provenance": P.provenance,
    }


def cleared_to_dict(c: ClearedSystem) -> Dict[str, Any]:
    net = c.network
    return {
        "denominator": render_expr(c.denominator),
        "reactions": [f"{r.label}: {format_complex(r.source, net.species)} -> "
                      f"{format_complex(r.product, net.species)} ; {render_expr(c.kinetics.rates[r.label])}"
                      for r in net.reactions],
        "substitutions": {k.name: render_expr(v) for k, v in c.substitutions.items()},
    }


def _part_translations(net: Network, translations: Mapping[str, tuple]) -> Dict[str, tuple]:
    labels = {r.label for r in net.reactions}
    return {k: v for k, v in translations.items() if k in labels}


def run_pipeline(model: Model, seed: int = DEFAULT_SEED, samples: int = 100, tol: float = 1e-9,
                 constant_values: Optional[Mapping[str, float]] = None, clear: bool = False,
                 search_budget: int = 2, part_tol: Optional[float] = None) -> PipelineReport:
    """Run every stage; failures are recorded per stage and later stages still
    run on whatever is available."""
    net, kin = model.network, model.kinetics
    report = PipelineReport(net, kin, seed=seed)
    translations = dict(model.translations)
    substitutions = None
    if clear:
        try:
            report.cleared = clear_denominators(net, kin)
        except MethodInapplicable as exc:
            report.errors.append({"stage": "clear-denominators", "message": str(exc)})
            report.inapplicable = True
            return report
        work_net, work_kin = report.cleared.network, report.cleared.kinetics
        substitutions = report.cleared.substitutions
        translations = {}
    else:
        work_net, work_kin = net, kin

    try:
        dec = finest_independent_decomposition(work_net)
    except CRNError as exc:
        report.errors.append({"stage": "decompose", "message": str(exc)})
        return report
    report.decomposition = dec
    parts = restrict_kinetics(work_net, work_kin, dec)
    report.mutually_exclusive = mass_action_union(work_net, dec, [p[2] for p in parts]).mutually_exclusive
    pinned_idx = [work_net.species_index(s) for s in model.free]
    # species shared by fewer parts are preferred as dependent (pivot) species
    shared_count = {j: sum(j in sub.involved_species() for sub, _, _ in parts) for j in range(work_net.m)}
    preference = sorted(range(work_net.m), key=lambda j: (shared_count[j], j))
    n_sigma = n_tau = n_pi = 1
    part_params: List[Parametrization] = []
    for p, (sub, sub_kin, pure) in enumerate(parts):
        labels = [r.label for r in sub.reactions]
        res = PartResult(p, labels, pure, "tree-constants" if pure else "elimination")
        report.parts.append(res)
        try:
            if pure:
                shifts = _part_translations(sub, translations)
                if not shifts and not check_translation(translate(sub, sub_kin)).ok:
                    found = search_translation(sub, sub_kin, budget=search_budget)
                    if found is None:
                        raise MethodInapplicable(f"no translation found within budget {search_budget}")
                    shifts = found
                g = translate(sub, sub_kin, shifts, sigma_start=n_sigma)
                chk = check_translation(g)
                res.deficiencies = {"effective": chk.effective_deficiency, "kinetic": chk.kinetic_deficiency}
                res.shifts = {k: format_complex(v, sub.species) for k, v in shifts.items()}
                if check_dynamic_equivalence(sub, sub_kin, g) != 0.0:
                    raise MethodInapplicable("translation is not dynamically equivalent")
                system = parametrize(g, species=sub.involved_species(), pinned=pinned_idx, tau_start=n_tau,
                                     preference=preference)
                P = system.result
                n_sigma += len(system.sigmas)
                n_tau += len(system.taus)
            else:
                P, _ = solve_by_elimination(sub, sub_kin, pinned=model.free, param_start=n_pi)
                n_pi += len(P.free_parameters)
            P.part = p
            res.parametrization = P
            res.residual = residual_harness(sub, sub_kin, P, seed=seed, n=samples,
                                            tol=part_tol if part_tol is not None else tol,
                                            constant_values=constant_values)
            part_params.append(P)
        except CRNError as exc:
            res.error = str(exc)
            report.errors.append({"stage": f"part {p + 1}", "message": str(exc)})
            if isinstance(exc, MethodInapplicable):
                report.inapplicable = True
    if report.errors:
        return report
    try:
        report.merge = merge_parametrizations(part_params, work_net.species, model.free,
                                              list(kin.constants))
    except MergeContradiction as exc:
        report.errors.append({"stage": "merge", "message": str(exc)})
        report.inapplicable = True
        return report
    P = report.merge.parametrization
    report.acr = acr_report(P)
    try:
        report.residual = residual_harness(net, kin, P, seed=seed, n=samples, tol=tol,
                                           constant_values=constant_values, substitutions=substitutions)
    except CRNError as exc:
        report.errors.append({"stage": "verify", "message": str(exc)})
    return report
