"""Named exponential-type potentials as points of the five-parameter family."""

from shapeinv.families import CaseSpec, case_round_trip

targets = {
    "tanh2": {"V0": 2.0, "d": 1.0},
    "scarf2": {"A": 1.0, "B": 0.5, "alpha": 1.0},
    "gen_poschl_teller": {"A": 1.0, "B": 0.5, "alpha": 1.0},
    "poschl_teller2": {"A": 2.0, "B": 1.0, "alpha": 1.0},
    "pt_scarf2": {"V1": 2.0, "V2": 1.0, "alpha": 1.0},
    "double_well": {"V1": 1.0, "V2": 0.5, "alpha": 1.0},
    "reflectionless": {"lambda": 1.0},
}
for case_id, params in targets.items():
    rt = case_round_trip(CaseSpec(case_id, params))
    p = rt.params
    print(f"{case_id:>18}: alpha={p.alpha:g} q={p.q:g} g={p.g:g} Q2={p.Q2:.6g} Q3={p.Q3:.6g}"
          f"  shift={rt.shift:.3g} residual={rt.residual:.1e}")
