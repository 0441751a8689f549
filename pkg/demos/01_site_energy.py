"""
Site energy from fleet parameters
=================================

A site's IT energy is accelerators x power x utilization x hours, summed
over the training and inference fleets. Facility energy multiplies by PUE.
"""
from nexusgrid import BaselineParams, EvolutionRates, compute_e_dc, evolve_baseline

fleet = BaselineParams(
    n_train=1000, n_inference=2000,
    p_avg_train=0.7, p_avg_inference=0.3,   # kW per accelerator
    u_train=0.8, u_inference=0.3,
    h_train=8760, h_inference=8760,
    pue=1.2,
)
rec = compute_e_dc(fleet)
print(f"IT energy       {rec.e_it:10.1f} MWh")
print(f"facility energy {rec.e_dc:10.2f} MWh (PUE {rec.pue_used})")

# Roll the fleet forward with mid-band growth and efficiency assumptions.
rates = EvolutionRates(capacity_growth=0.15, efficiency_gain=0.02, utilization_drift=0.01)
print("\nyear  n_train  n_inf   P_train  E_dc [MWh]")
for offset in range(7):
    p = evolve_baseline(fleet, rates, offset)
    print(f"{2024 + offset}  {p.n_train:7.0f}  {p.n_inference:5.0f}  {p.p_avg_train:.4f}  "
          f"{compute_e_dc(p).e_dc:10.1f}")
