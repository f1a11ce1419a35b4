# unit roundoff of IEEE double precision
U = 2.0 ** -53

# working precision limits (decimal digits)
MIN_DIGITS = 16
MAX_DIGITS = 4096

# digits of the reference oracle
ORACLE_DIGITS = 128

# largest Taylor degree tried by the atomic evaluator
K_MAX = 150

# greedy condition number refinement thresholds
GREEDY_DOUBLE_LIMIT = 1e14
GREEDY_COMPARISON_RATIO = 1e4

# passes of the eigenvector refinement loop
MAX_REFINEMENTS = 3

# random re-perturbations before giving up on distinct eigenvalues
MAX_PERTURBATIONS = 3

# step of the condition number difference quotient
KAPPA_F_STEP = 1e-32

# power iteration for spectral norms
NORM_TOLERANCE = 1e-6
NORM_MAX_ITERATIONS = 200
# inflation applied to estimated norms that feed bounds
NORM_INFLATION = 1.01

# divided differences switch to derivatives below this relative gap
CONFLUENCE_TOLERANCE = 1e-8

# QR iteration budget per eigenvalue
SCHUR_SWEEPS_PER_EIGENVALUE = 30

# digits holding a randomly perturbed triangular block
PERTURBATION_DIGITS = 32

# safety factor on eigenvector condition estimates
KAPPA_SAFETY = 2.0

# multiprecision working and eigenvector digits are rounded up to a multiple of this
DIGITS_STEP = 8
