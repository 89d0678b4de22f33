"""
A set of constants used within the screenmin software
"""
from enum import Enum

DEFAULT_ALPHA = 0.05

# tolerance when checking that pair-type proportions sum to one
PROPORTION_SUM_TOLERANCE = 1e-12
# the selected-set pmf is built by direct convolution, which stays exact in double precision up to this size
EXACT_PMF_MAX_M = 10_000
# pmf tail mass ignored when evaluating the familywise error bound
PMF_TAIL_TOLERANCE = 1e-12

# log-spaced grid scanned by the oracle threshold search: ORACLE_GRID_POINTS values in [ORACLE_GRID_MIN, alpha]
ORACLE_GRID_POINTS = 2000
ORACLE_GRID_MIN = 1e-10
ORACLE_RELATIVE_TOLERANCE = 1e-12
# the oracle root is located against alpha * (1 - ORACLE_TARGET_SLACK) so that it lands on the feasible side
ORACLE_TARGET_SLACK = 1e-10

# smallest selection threshold shown in the error/power curves
CURVE_MIN_THRESHOLD = 1e-8
CURVE_DEFAULT_POINTS = 200
# p0 curves against snr: the selection thresholds and the quantile under consideration
CURVE_DEFAULT_P0_THRESHOLDS = (5e-4, 2.5e-2, 5e-2)
CURVE_DEFAULT_P0_QUANTILE = 0.05
CURVE_DEFAULT_MAX_SNR = 5.0

# CSV output: 17 significant digits, i.e. a full double precision round trip
CSV_FLOAT_FORMAT = "%.16e"
CSV_NA_REP = "NA"
CSV_INPUT_COLUMNS = ("id", "p1", "p2")
CSV_RESULT_COLUMNS = ("id", "p1", "p2", "pmin", "pmax", "selected", "adjusted_p", "rejected")

EXIT_SUCCESS = 0
EXIT_USAGE_ERROR = 2


class PairType(Enum):
    """
    Truth pattern of a component hypothesis pair (H_i1, H_i2).
    (0,1) and (1,0) pairs behave identically under independence and share ONE_FALSE.
    """
    BOTH_NULL = "00"
    ONE_FALSE = "01"
    BOTH_FALSE = "11"


class Method(Enum):
    """
    Multiple testing procedures applied to a p-value matrix
    """
    # two-stage procedure: select on the minimum p-value, Bonferroni on the maximum within the selected set
    SCREENMIN = "screenmin"
    # two-stage procedure with the data-dependent threshold used for both selection and testing
    ADAPTIVE = "adaptive"
    # one-stage procedures on the maximum p-values
    BONFERRONI = "bonferroni"
    HOLM = "holm"


class ThresholdKind(Enum):
    """
    Ways of choosing the ScreenMin selection threshold
    """
    DEFAULT = "default"  # alpha / m
    FIXED = "fixed"  # user supplied value
    ORACLE = "oracle"  # model based, needs the pair mixture
    ADAPTIVE = "adaptive"  # data based gamma


class OracleStatus(Enum):
    """
    Outcome of the oracle threshold search
    """
    # the power maximiser lies on the boundary of the approximate familywise error constraint
    CONSTRAINED = "constrained"
    # the power maximiser lies inside the feasible set, the constraint does not bind there
    UNCONSTRAINED = "unconstrained"
    # no scanned threshold satisfies the constraint; alpha is used
    INFEASIBLE = "infeasible"


class CurveKind(Enum):
    P0_VS_SNR = "p0-vs-snr"
    FWER_POWER_VS_C = "fwer-power-vs-c"
