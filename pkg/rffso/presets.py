"""
Built-in scenarios: the figure curves and the special-case rows.

Channel parameters are fixed per preset. Every preset sweeps [0, 30] dB in
2 dB steps by default and says so in its notes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from .scenario import Scenario, parse_scenario_text, render_scenario_text

SWEEP_NOTE = "sweep endpoints [0, 30] dB are a default, not part of the curve definition"
PHI_SWEEP = "phi_r_db=0:30:16"
UD_SWEEP = "u_d_db=0:30:16"

Sections = Dict[str, Dict[str, object]]


@dataclass(frozen=True)
class Preset:
    name: str
    title: str
    metric: str
    sections: Mapping[str, Mapping[str, object]]
    sweep: str
    methods: Tuple[str, ...] = ("closed", "mc")
    notes: Tuple[str, ...] = field(default=(SWEEP_NOTE,))

    def text(self) -> str:
        return render_scenario_text(self.sections)

    def scenario(self) -> Scenario:
        return parse_scenario_text(self.text(), source=f"preset:{self.name}")

    def describe(self) -> str:
        lines = [f"{self.name}: {self.title}", f"  metric={self.metric} sweep={self.sweep} methods={','.join(self.methods)}"]
        for section, values in self.sections.items():
            body = ", ".join(f"{k}={v}" for k, v in values.items() if v is not None)
            lines.append(f"  [{section}] {body}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _rf(alpha: float, kappa: float, mu: int, x_shadow: float, phi_r_db: float = 10.0) -> Dict[str, object]:
    return {"alpha": float(alpha), "kappa": float(kappa), "mu": int(mu), "x_shadow": float(x_shadow),
            "phi_r_db": float(phi_r_db)}


def _fso(u_db: float, a: float = 4.2, b: int = 3, eps: float = 1.1, s: int = 1, r_scatter: float = 0.1,
         zeta_t: float = 1.0) -> Dict[str, object]:
    return {"a": float(a), "b": int(b), "eps": float(eps), "s": int(s), "r_scatter": float(r_scatter),
            "zeta_t": float(zeta_t), "u_db": float(u_db)}


def _sections(rf: Dict[str, object], fso_d: Dict[str, object], fso_e: Dict[str, object],
              target_rate: float = 0.5) -> Sections:
    return {"rf": rf, "fso_d": fso_d, "fso_e": fso_e, "secrecy": {"target_rate": float(target_rate)}}


# suffix: (turbulence, a, b, s)
_TURBULENCE_VARIANTS = {
    "": ("moderate", 4.2, 3, 1),
    "-imdd": ("moderate", 4.2, 3, 2),
    "-strong": ("strong", 2.296, 2, 1),
    "-weak": ("weak", 8.0, 4, 1),
}


def _figure_presets() -> List[Preset]:
    presets = [
        Preset("fig2", "SOP versus phi_r, AKM alpha/kappa family (alpha=2.5, kappa=1 curve)", "sop",
               _sections(_rf(2.5, 1, 1, 100), _fso(15.0), _fso(-5.0)), PHI_SWEEP),
        Preset("fig3", "SOP versus phi_r, AKM mu/x family (mu=2, x=10 curve)", "sop",
               _sections(_rf(2, 2, 2, 10), _fso(10.0), _fso(-10.0)), PHI_SWEEP),
    ]
    for suffix, (turbulence, a, b, s) in _TURBULENCE_VARIANTS.items():
        detection = "IM/DD" if s == 2 else "HD"
        rf = _rf(2.5, 2, 2, 1000, phi_r_db=10.0)
        presets.extend([
            Preset(f"fig4{suffix}", f"SOP versus U_d, {turbulence} turbulence, {detection}", "sop",
                   _sections(rf, _fso(0.0, a=a, b=b, s=s), _fso(-5.0, a=a, b=b, s=s)), UD_SWEEP),
            Preset(f"fig5{suffix}", f"SPSC versus U_d, {turbulence} turbulence, {detection}", "spsc",
                   _sections(rf, _fso(0.0, a=a, b=b, s=s), _fso(-1.0, a=a, b=b, s=s)), UD_SWEEP),
            Preset(f"fig6{suffix}", f"IP versus U_d, {turbulence} turbulence, {detection}", "ip",
                   _sections(rf, _fso(0.0, a=a, b=b, s=s), _fso(-1.0, a=a, b=b, s=s)), UD_SWEEP),
        ])
    presets.append(
        Preset("fig7", "SOP versus phi_r across AKM special cases, strong turbulence (alpha-kappa-mu curve)", "sop",
               _sections(_rf(3, 1, 2, 1e4), _fso(15.0, a=2.296, b=2), _fso(0.0, a=2.296, b=2)), PHI_SWEEP,
               notes=(SWEEP_NOTE, "the RF parameters are those of the table1-alpha-kappa-mu row"))
    )
    for suffix, eps in (("", 1.1), ("-eps6.7", 6.7)):
        rf = _rf(3, 2, 2, 1000, phi_r_db=12.0)
        presets.extend([
            Preset(f"fig8{suffix}", f"SOP versus U_d with pointing error eps={eps}", "sop",
                   _sections(rf, _fso(0.0, eps=eps), _fso(-10.0, eps=eps)), UD_SWEEP,
                   methods=("closed", "asymptotic", "mc")),
            Preset(f"fig9{suffix}", f"SPSC versus U_d with pointing error eps={eps}", "spsc",
                   _sections(rf, _fso(0.0, eps=eps), _fso(2.0, eps=eps)), UD_SWEEP,
                   methods=("closed", "asymptotic", "mc")),
            Preset(f"fig10{suffix}", f"IP versus U_d with pointing error eps={eps}", "ip",
                   _sections(rf, _fso(0.0, eps=eps), _fso(3.0, eps=eps)), UD_SWEEP,
                   methods=("closed", "asymptotic", "mc")),
        ])
    for suffix, u_e in (("", -5.0), ("-ue0", 0.0), ("-ue5", 5.0)):
        presets.append(
            Preset(f"fig11{suffix}", f"SPSC versus U_d, strong turbulence, U_e={u_e:g} dB", "spsc",
                   _sections(_rf(2.5, 2, 2, 1000), _fso(0.0, a=2.296, b=2), _fso(u_e, a=2.296, b=2)), UD_SWEEP,
                   notes=(SWEEP_NOTE, "the RF link does not enter SPSC; fig4 RF parameters are used"))
        )
    presets.append(
        Preset("fig12", "SOP versus U_d for the unified special cases (Nakagami-m / Malaga row)", "sop",
               _sections(_rf(2, 0, 2, 2, phi_r_db=0.0), _fso(0.0, b=3), _fso(-10.0, b=3)), UD_SWEEP,
               notes=(SWEEP_NOTE, "curve of the table3-nakagami-malaga row"))
    )
    return presets


# name: (alpha, kappa, mu, x)
_TABLE1_RF = {
    "rayleigh": (2, 0, 1, 1),
    "nakagami": (2, 0, 2, 2),
    "kappa-mu": (2, 1, 2, 1e4),
    "eta-mu": (2, 0.5, 2, 1),
    "weibull": (3, 0, 1, 1),
    "alpha-kappa-mu": (3, 1, 2, 1e4),
}

# name: (zeta_t, r_scatter, b)
_TABLE2_FSO = {
    "gamma-gamma": (1.0, 0.0, 2),
    "rice-nakagami": (2.0, 0.1, 3),
    "lognormal": (2.0, 1e-4, 3),
    "k-distribution": (2.0, 0.1, 1),
}

# name: (rf (alpha, kappa, mu, x), fso (zeta_t, r_scatter, b))
_TABLE3_ROWS = {
    "nakagami-lognormal": ((2, 0, 2, 2), (2.0, 1e-4, 3)),
    "weibull-k": ((3, 0, 1, 1), (2.0, 0.1, 1)),
    "eta-mu-lognormal": ((2, 0, 4, 2), (2.0, 1e-4, 3)),
    "kappa-mu-rice-nakagami": ((2, 1, 2, 100), (2.0, 0.1, 3)),
    "rayleigh-gg": ((2, 0, 1, 1), (1.0, 0.0, 2)),
    "nakagami-malaga": ((2, 0, 2, 2), (1.0, 0.1, 3)),
}


def _table_presets() -> List[Preset]:
    presets = []
    for name, (alpha, kappa, mu, x) in _TABLE1_RF.items():
        notes = (SWEEP_NOTE,)
        if x == 1e4:
            notes += ("x -> infinity is represented by x = 1e4",)
        if name == "eta-mu":
            notes += ("eta = 0.5, mu_eta = 1: kappa = (1 - eta)/(2 eta), mu = 2 mu_eta, x = mu_eta",)
        if name == "nakagami":
            notes += ("m = 2: alpha = 2, kappa = 0, mu = x = m",)
        presets.append(
            Preset(f"table1-{name}", f"AKM-shadowed special case: {name}", "sop",
                   _sections(_rf(alpha, kappa, mu, x), _fso(15.0, a=2.296, b=2), _fso(0.0, a=2.296, b=2)),
                   PHI_SWEEP, notes=notes)
        )
    for name, (zeta_t, r_scatter, b) in _TABLE2_FSO.items():
        notes = (SWEEP_NOTE,)
        if name == "lognormal":
            notes += ("r -> 0+ is represented by r = 1e-4",)
        presets.append(
            Preset(f"table2-{name}", f"Malaga special case: {name}", "sop",
                   _sections(_rf(3, 1, 2, 1000, phi_r_db=5.0),
                             _fso(0.0, b=b, r_scatter=r_scatter, zeta_t=zeta_t),
                             _fso(-5.0, b=b, r_scatter=r_scatter, zeta_t=zeta_t)),
                   UD_SWEEP, notes=notes)
        )
    for name, ((alpha, kappa, mu, x), (zeta_t, r_scatter, b)) in _TABLE3_ROWS.items():
        presets.append(
            Preset(f"table3-{name}", f"unified RF-FSO special case: {name}", "sop",
                   _sections(_rf(alpha, kappa, mu, x, phi_r_db=0.0),
                             _fso(0.0, b=b, r_scatter=r_scatter, zeta_t=zeta_t),
                             _fso(-10.0, b=b, r_scatter=r_scatter, zeta_t=zeta_t)),
                   UD_SWEEP)
        )
    return presets


PRESETS: Dict[str, Preset] = {p.name: p for p in _figure_presets() + _table_presets()}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; run `presets` for the catalog") from None
