"""Named sweep scenarios (fig2 ... fig8, fig7b).

Each preset is ordinary config text, so a user config given alongside a
preset overrides it key by key.
"""

PRESETS = {
    # Adaptive conditional throughput vs R_s for different N and eta.
    "fig2": """
scheme = single-adaptive
mode = throughput
P_b_db = 0
Gamma_e_db = 0
delta = 0.2
sweep.R_s = 0.01:3.0:0.01
sweep.N = 100,500,1000
sweep.eta_db = 5,10
""",
    # Non-adaptive throughput vs R_s for different N and sigma_b^2.
    "fig3": """
scheme = single-nonadaptive
mode = throughput
P_b_db = 0
Gamma_e_db = 0
delta = 0.2
sweep.R_s = 0.01:4.0:0.01
sweep.N = 100,500,1000
sweep.sigma_b2_db = 0,10,20
""",
    # Optimal average throughputs and their gap vs N for different sigma_b^2 and delta.
    "fig4": """
scheme = single-adaptive
mode = compare
P_b_db = 0
Gamma_e_db = 0
sweep.N = 100,200,300,400,500,600,700,800,900,1000
sweep.sigma_b2_db = 0,10
sweep.delta = 0.1,0.2
""",
    # Exact vs asymptotic leakage vs phi for different M, n and Gamma_e.
    "fig5": """
scheme = multi-adaptive
mode = leakage
P_e_db = 0
R_e = 1
M = 2
sweep.phi = 0.05:0.95:0.05
sweep.M = 2,4
sweep.n = 200,1000
sweep.Gamma_e_db = 0,5
""",
    # Optimal phi and adaptive throughput vs R_s for different N and eta.
    "fig6": """
scheme = multi-adaptive
mode = throughput
M = 4
P_b_db = 0
Gamma_e_db = 0
delta = 0.2
sweep.R_s = 0.05:3.0:0.05
sweep.N = 100,1000
sweep.eta_db = 5,10
""",
    # Optimal R_s and non-adaptive throughput vs phi for different N and delta.
    "fig7": """
scheme = multi-nonadaptive
mode = throughput
M = 4
Gamma_b_db = 3
Gamma_e_db = 0
sweep.phi = 0.05:1.0:0.05
sweep.N = 100,1000
sweep.delta = 0.1,0.2
""",
    # Optimal phi and non-adaptive throughput vs R_s for different N and delta.
    "fig7b": """
scheme = multi-nonadaptive
mode = throughput
M = 4
Gamma_b_db = 3
Gamma_e_db = 0
sweep.R_s = 0.05:2.5:0.05
sweep.N = 100,1000
sweep.delta = 0.1,0.2
""",
    # Optimal average throughputs and their gap vs M for different N and delta.
    "fig8": """
scheme = multi-adaptive
mode = compare
M = 2
Gamma_b_db = 3
Gamma_e_db = 0
sweep.M = 2,3,4,5,6
sweep.N = 100,1000
sweep.delta = 0.1,0.2
""",
}
