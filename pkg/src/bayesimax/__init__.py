"""Prior disclosure games: evaluate, estimate, and maximize the minimum Bayes risk.

The minimum Bayes risk of a prior in these games equals the conditional
generalized entropy of the parameter given the data.  The package provides
exact finite-game machinery, closed forms for three conjugate families
under the log score, a nested Monte Carlo estimator with a k-nearest-
neighbor inner step, a large-sample approximation, and derivative-free
maximizers for finding (nearly) least favorable priors.
"""

from .asymptotics import (
    BetaPrior,
    FisherModel,
    GammaPrior,
    GridPrior,
    ModelFamily,
    NormalPrior,
    asymptotic_conditional_entropy,
    bvm_boundary_warning,
    fisher_info,
)
from .conjugate import (
    BetaBernoulliSpec,
    GammaPoissonSpec,
    NormalNormalSpec,
    bb_conditional_entropy,
    beta_posterior_entropy,
    conditional_entropy,
    gamma_posterior_entropy,
    gp_conditional_entropy,
    nn_conditional_entropy,
    prior_entropy,
    sample_data,
    sample_posterior,
    sample_prior,
)
from .game import (
    DiscreteGame,
    LeastFavorableReport,
    RiskProfile,
    TruthTellingReport,
    ZeroMarginalError,
    bayes_risk,
    check_least_favorable,
    decomposition,
    find_bayesimax,
    frequentist_risk,
    loss,
    marginal,
    min_bayes_risk,
    posterior,
    truth_telling_rule,
    verify_truth_telling,
)
from .mcent import (
    DegenerateSampleError,
    EntropyEstimate,
    McConfig,
    decomposed_mc_entropy,
    knn_entropy,
    nested_mc_entropy,
)
from .optimizer import (
    Box,
    OptResult,
    OptStatus,
    SequenceResult,
    grid_search,
    maximize_conditional_entropy,
    nearly_bayesimax_sequence,
    nelder_mead,
)
from .scores import ScoreKind, divergence, entropy, score, validate_distribution

__version__ = "0.1.0"
