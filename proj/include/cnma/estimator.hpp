#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cnma/combination.hpp"
#include "cnma/network.hpp"
#include "cnma/stats.hpp"

namespace cnma {

/// Arm-level binary outcome to (log odds ratio, standard error). When any
/// cell count is 0 (no events or all events in an arm) 0.5 is added to all
/// four event and non-event cells before computing.
std::pair<double, double> pairwise_from_binary(double events1, double total1, double events2,
                                               double total2);

/// One weighted-least-squares solve at a fixed tau^2. Weights are
/// 1/(se^2 + tau2); the coefficient solution uses the Moore-Penrose
/// pseudoinverse of X'WX, so rank-deficient designs are fine (the fitted
/// values are unique even when the coefficients are not).
struct WlsCore {
  Eigen::VectorXd beta;
  Eigen::VectorXd fitted;      // X * beta
  Eigen::MatrixXd coef_cov;    // (X'WX)^+
  Eigen::MatrixXd fitted_cov;  // X (X'WX)^+ X'
  Eigen::VectorXd weights;     // diagonal of W
  double q = 0.0;              // (d - fitted)' W (d - fitted)
};

WlsCore fit_wls(const Eigen::MatrixXd& design, const Eigen::VectorXd& effects,
                const Eigen::VectorXd& std_errs, double tau2);

/// Generalized method-of-moments heterogeneity estimate,
///   tau2 = max(0, (Q - df) / (tr(W) - tr((X'WX)^+ X'W^2X)))
/// with W the common-effect weights and df = m - rank(X). Zero when df = 0.
double estimate_tau2(const Eigen::MatrixXd& design, const Eigen::VectorXd& effects,
                     const Eigen::VectorXd& std_errs);

enum class FitKind { nma, cnma };

/// A fitted (C)NMA model. Q, df and the heterogeneity p-value come from the
/// common-effect stage (tau2 = 0); coefficient estimates, fitted effects and
/// confidence intervals from the random-effects stage at the estimated tau2.
struct ModelFit {
  FitKind kind = FitKind::cnma;
  std::vector<std::string> columns;  // design column names
  Eigen::VectorXd beta;              // random-effects coefficients (pseudoinverse solution)
  Eigen::VectorXd theta;             // per-intervention effects, theta = C_int * beta
  Eigen::VectorXd delta;             // fitted comparison effects, X * beta
  Eigen::MatrixXd cov_delta;         // covariance of the fitted comparisons
  Eigen::VectorXd weights_fe;        // common-effect weight diagonal
  double Q = 0.0;
  int df = 0;
  double p_Q = 0.0;  // NaN when df = 0
  double tau2 = 0.0;
  int rank = 0;

  Eigen::MatrixXi theta_map;     // C_int: n x p
  Eigen::MatrixXd design;        // X = B * C_int
  Eigen::MatrixXd coef_cov_re;   // (X'W X)^+ at the random-effects weights
  std::optional<int> reference;  // set for NMA fits

  int n() const { return static_cast<int>(theta_map.rows()); }
};

/// Shared fitting path: theta = theta_map * beta, design = B * theta_map.
ModelFit fit_linear_model(const Network& net, const Eigen::MatrixXi& theta_map,
                          std::vector<std::string> columns, FitKind kind);

/// Standard NMA relative to a reference. Throws ModelError on a disconnected
/// network; use fit_separate_nmas there instead.
ModelFit fit_nma(const Network& net, int reference);

/// Additive (no interactions) or interaction CNMA; works on connected and
/// disconnected networks. An interaction whose design column is identically
/// zero is rejected as inestimable by construction.
ModelFit fit_cnma(const Network& net, const CombinationMatrix& combo);
ModelFit fit_cnma(const Network& net, const std::set<std::string>& inactive_components,
                  const std::vector<InteractionPair>& interactions = {});

/// Independent standard NMAs per subnetwork. `joint` is the same model fitted
/// as one block design; its Q equals the sum of the per-subnetwork Qs.
struct SeparateNmaFits {
  std::vector<ModelFit> fits;
  std::vector<int> references;  // local reference per subnetwork
  double q_total = 0.0;
  int df_total = 0;
  double p_total = 0.0;  // NaN when df_total = 0
  ModelFit joint;
};

SeparateNmaFits fit_separate_nmas(const Network& net,
                                  std::optional<int> reference = std::nullopt);

struct QDifference {
  double q_diff = 0.0;
  int df_diff = 0;
  double p = 1.0;
};

/// Chi-square test on the Q difference of two nested fits of the same data.
/// Requires the sparse design's column space inside the rich one and
/// df_sparse > df_rich.
QDifference q_difference_test(const ModelFit& sparse, const ModelFit& rich);

/// Raw difference arithmetic without the structural nesting check; negative
/// differences clamp to zero. Used by forward selection, where the best
/// subset of one cardinality need not contain the best of the previous.
QDifference q_difference_raw(double q_sparse, int df_sparse, double q_rich, int df_rich);

struct EffectEstimate {
  int treat1 = -1;
  int treat2 = -1;
  bool estimable = false;
  double estimate = 0.0;
  double std_err = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Fitted relative effect treat1 vs treat2 with a Wald interval; flagged (and
/// NaN-valued) when the contrast is outside the design row space.
EffectEstimate relative_effect(const ModelFit& fit, int treat1, int treat2, double level = 0.95);

std::vector<EffectEstimate> effects_vs_reference(const ModelFit& fit, int reference,
                                                 double level = 0.95);

}  // namespace cnma
