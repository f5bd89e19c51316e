"""Physical constants and unit conversions.

Values are CODATA 2018 (https://doi.org/10.1103/RevModPhys.93.025010).
Everything downstream works in SI; the unit factors below are only used
at the configuration and output boundary.
"""

# exact (SI defining constants)
PHYS_C = 299792458.0  # speed of light in vacuum [m s^-1]
PHYS_HPL = 6.62607015e-34  # Planck constant [J s]
PHYS_QEL = 1.602176634e-19  # elementary charge [C]

# measured
EL_M0 = 9.1093837015e-31  # electron rest mass, uncertainty (28) in last digits [kg]

# derived
EL_E0 = EL_M0 * PHYS_C**2  # electron rest energy [J]
PHYS_HC = PHYS_HPL * PHYS_C  # [J m]

# unit factors (multiply to get SI)
KEV = 1.0e3 * PHYS_QEL
MM = 1.0e-3
UM = 1.0e-6
NM = 1.0e-9
PM = 1.0e-12
