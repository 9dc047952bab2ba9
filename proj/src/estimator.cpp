#include "cnma/estimator.hpp"

#include <cmath>
#include <limits>

#include "cnma/errors.hpp"
#include "cnma/linalg.hpp"

namespace cnma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool whole(double x) { return std::floor(x) == x; }

/// Method-of-moments tau^2 from a finished common-effect solve.
double tau2_from_core(const WlsCore& fe, const Eigen::MatrixXd& design, int df) {
  if (df <= 0) return 0.0;
  const Eigen::VectorXd w2 = fe.weights.array().square();
  const Eigen::MatrixXd xtw2x = design.transpose() * w2.asDiagonal() * design;
  const double denom = fe.weights.sum() - (fe.coef_cov * xtw2x).trace();
  if (!(denom > 1e-12)) return 0.0;
  return std::max(0.0, (fe.q - df) / denom);
}

void extract_data(const Network& net, Eigen::VectorXd& effects, Eigen::VectorXd& std_errs) {
  effects.resize(net.m());
  std_errs.resize(net.m());
  for (int j = 0; j < net.m(); ++j) {
    effects[j] = net.comparisons()[j].effect;
    std_errs[j] = net.comparisons()[j].std_err;
  }
}

}  // namespace

std::pair<double, double> pairwise_from_binary(double events1, double total1, double events2,
                                               double total2) {
  for (double x : {events1, total1, events2, total2})
    if (!std::isfinite(x) || !whole(x)) throw InputError("arm counts must be whole numbers");
  if (total1 < 1 || total2 < 1) throw InputError("arm sizes must be at least 1");
  if (events1 < 0 || events1 > total1 || events2 < 0 || events2 > total2)
    throw InputError("event counts must lie between 0 and the arm size");

  const bool sparse = events1 == 0 || events2 == 0 || events1 == total1 || events2 == total2;
  const double add = sparse ? 0.5 : 0.0;
  const double a = events1 + add;
  const double b = total1 - events1 + add;
  const double c = events2 + add;
  const double d = total2 - events2 + add;
  const double effect = std::log(a * d) - std::log(b * c);
  const double std_err = std::sqrt(1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
  return {effect, std_err};
}

WlsCore fit_wls(const Eigen::MatrixXd& design, const Eigen::VectorXd& effects,
                const Eigen::VectorXd& std_errs, double tau2) {
  const Eigen::Index m = effects.size();
  if (m == 0) throw ModelError("cannot fit a model without comparisons");
  if (design.rows() != m || std_errs.size() != m)
    throw ModelError("design, effect and standard-error dimensions disagree");
  if (!std::isfinite(tau2) || tau2 < 0.0)
    throw ModelError("tau2 must be finite and nonnegative");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!std::isfinite(effects[j])) throw ModelError("non-finite effect in weighted fit");
    if (!(std_errs[j] > 0.0) || !std::isfinite(std_errs[j]))
      throw ModelError("standard errors must be positive and finite");
  }

  WlsCore out;
  out.weights = (std_errs.array().square() + tau2).inverse();
  const Eigen::MatrixXd xtw = design.transpose() * out.weights.asDiagonal();
  out.coef_cov = pseudo_inverse(xtw * design);
  out.beta = out.coef_cov * (xtw * effects);
  out.fitted = design * out.beta;
  out.fitted_cov = design * out.coef_cov * design.transpose();
  const Eigen::ArrayXd resid = (effects - out.fitted).array();
  out.q = std::max(0.0, (resid.square() * out.weights.array()).sum());
  if (!std::isfinite(out.q)) throw NumericalError("Q statistic is not finite");
  return out;
}

double estimate_tau2(const Eigen::MatrixXd& design, const Eigen::VectorXd& effects,
                     const Eigen::VectorXd& std_errs) {
  const WlsCore fe = fit_wls(design, effects, std_errs, 0.0);
  const int df = static_cast<int>(effects.size()) - numerical_rank(design);
  return tau2_from_core(fe, design, df);
}

ModelFit fit_linear_model(const Network& net, const Eigen::MatrixXi& theta_map,
                          std::vector<std::string> columns, FitKind kind) {
  if (theta_map.rows() != net.n())
    throw ModelError("parameter map needs one row per intervention");
  if (theta_map.cols() == 0)
    throw ModelError("model has no parameters (no active components)");
  if (static_cast<int>(columns.size()) != theta_map.cols())
    throw ModelError("column name count does not match the parameter map");

  ModelFit fit;
  fit.kind = kind;
  fit.columns = std::move(columns);
  fit.theta_map = theta_map;
  fit.design = (incidence_matrix(net) * theta_map).cast<double>();
  fit.rank = numerical_rank(fit.design);
  // Two-arm studies: arm_count - k = m, so this is the m - rank residual df.
  fit.df = net.arm_count() - net.k() - fit.rank;

  Eigen::VectorXd effects, std_errs;
  extract_data(net, effects, std_errs);

  const WlsCore fe = fit_wls(fit.design, effects, std_errs, 0.0);
  fit.Q = fe.q;
  fit.weights_fe = fe.weights;
  fit.p_Q = fit.df > 0 ? chi_square_sf(fit.Q, fit.df) : kNaN;
  fit.tau2 = tau2_from_core(fe, fit.design, fit.df);

  const WlsCore re = fit.tau2 > 0.0 ? fit_wls(fit.design, effects, std_errs, fit.tau2) : fe;
  fit.beta = re.beta;
  fit.theta = fit.theta_map.cast<double>() * re.beta;
  fit.delta = re.fitted;
  fit.cov_delta = re.fitted_cov;
  fit.coef_cov_re = re.coef_cov;
  return fit;
}

ModelFit fit_nma(const Network& net, int reference) {
  if (reference < 0 || reference >= net.n())
    throw InputError("reference intervention index out of range");
  const ConnectivityInfo conn = connectivity(net);
  if (!conn.connected())
    throw ModelError("network is disconnected (" + std::to_string(conn.n_c()) +
                     " subnetworks); a joint NMA is not identified — fit the subnetworks "
                     "separately");

  Eigen::MatrixXi map = Eigen::MatrixXi::Zero(net.n(), net.n() - 1);
  std::vector<std::string> columns;
  columns.reserve(net.n() - 1);
  int col = 0;
  for (int i = 0; i < net.n(); ++i) {
    if (i == reference) continue;
    map(i, col++) = 1;
    columns.push_back(net.interventions()[i].label);
  }

  ModelFit fit = fit_linear_model(net, map, std::move(columns), FitKind::nma);
  fit.reference = reference;
  return fit;
}

ModelFit fit_cnma(const Network& net, const CombinationMatrix& combo) {
  if (combo.rows() != net.n())
    throw ModelError("combination matrix rows do not match the network's interventions");
  for (int j = combo.component_count(); j < combo.cols(); ++j)
    if (combo.entries().col(j).isZero())
      throw ModelError("interaction '" + combo.column_names()[j] +
                       "' is not contained in any intervention; its column is identically "
                       "zero");
  return fit_linear_model(net, combo.entries(), combo.column_names(), FitKind::cnma);
}

ModelFit fit_cnma(const Network& net, const std::set<std::string>& inactive_components,
                  const std::vector<InteractionPair>& interactions) {
  CombinationMatrix combo = build_combination_matrix(net, inactive_components);
  if (!interactions.empty()) combo = add_interaction_columns(combo, interactions);
  return fit_cnma(net, combo);
}

SeparateNmaFits fit_separate_nmas(const Network& net, std::optional<int> reference) {
  if (reference && (*reference < 0 || *reference >= net.n()))
    throw InputError("reference intervention index out of range");
  const ConnectivityInfo conn = connectivity(net, reference);

  SeparateNmaFits out;
  Eigen::MatrixXi joint_map = Eigen::MatrixXi::Zero(net.n(), net.n() - conn.n_c());
  std::vector<std::string> joint_columns;
  int col = 0;
  for (int ci = 0; ci < conn.n_c(); ++ci) {
    const std::vector<int>& members = conn.components[ci];
    int local_ref = members.front();  // members are label-sorted
    if (reference && conn.component_of[*reference] == ci) local_ref = *reference;
    out.references.push_back(local_ref);

    for (int i : members) {
      if (i == local_ref) continue;
      joint_map(i, col++) = 1;
      joint_columns.push_back(net.interventions()[i].label);
    }

    const Network sub = subnetwork(net, members);
    out.fits.push_back(fit_nma(sub, sub.require_intervention(net.interventions()[local_ref].label)));
    out.q_total += out.fits.back().Q;
    out.df_total += out.fits.back().df;
  }
  out.p_total = out.df_total > 0 ? chi_square_sf(out.q_total, out.df_total) : kNaN;
  out.joint = fit_linear_model(net, joint_map, std::move(joint_columns), FitKind::nma);
  return out;
}

QDifference q_difference_test(const ModelFit& sparse, const ModelFit& rich) {
  if (sparse.design.rows() != rich.design.rows() ||
      !sparse.weights_fe.isApprox(rich.weights_fe, 1e-12))
    throw ModelError("nested Q test needs both models fitted to the same comparisons");

  Eigen::MatrixXd stacked(rich.design.rows(), rich.design.cols() + sparse.design.cols());
  stacked << rich.design, sparse.design;
  if (numerical_rank(stacked) != rich.rank)
    throw ModelError("models are not nested: the sparse design is not contained in the "
                     "rich one");

  QDifference d;
  d.df_diff = sparse.df - rich.df;
  if (d.df_diff <= 0)
    throw ModelError("nested Q test needs the sparse model to have more degrees of freedom");
  d.q_diff = sparse.Q - rich.Q;
  if (d.q_diff < -1e-9)
    throw NumericalError("Q difference of nested fits is negative beyond tolerance");
  d.q_diff = std::max(0.0, d.q_diff);
  d.p = chi_square_sf(d.q_diff, d.df_diff);
  return d;
}

QDifference q_difference_raw(double q_sparse, int df_sparse, double q_rich, int df_rich) {
  QDifference d;
  d.df_diff = df_sparse - df_rich;
  if (d.df_diff <= 0) throw ModelError("Q difference test needs a positive df difference");
  d.q_diff = std::max(0.0, q_sparse - q_rich);
  d.p = chi_square_sf(d.q_diff, d.df_diff);
  return d;
}

EffectEstimate relative_effect(const ModelFit& fit, int treat1, int treat2, double level) {
  if (treat1 < 0 || treat1 >= fit.n() || treat2 < 0 || treat2 >= fit.n())
    throw InputError("intervention index out of range");

  EffectEstimate e;
  e.treat1 = treat1;
  e.treat2 = treat2;
  const Eigen::VectorXd v =
      (fit.theta_map.row(treat1) - fit.theta_map.row(treat2)).cast<double>().transpose();
  e.estimable = in_row_space(fit.design, v);
  if (!e.estimable) {
    e.estimate = e.std_err = e.low = e.high = kNaN;
    return e;
  }
  e.estimate = v.dot(fit.beta);
  e.std_err = std::sqrt(std::max(0.0, v.dot(fit.coef_cov_re * v)));
  if (e.std_err > 0.0) {
    std::tie(e.low, e.high) = confidence_interval(e.estimate, e.std_err, level);
  } else {
    e.low = e.high = e.estimate;
  }
  return e;
}

std::vector<EffectEstimate> effects_vs_reference(const ModelFit& fit, int reference,
                                                 double level) {
  if (reference < 0 || reference >= fit.n())
    throw InputError("reference intervention index out of range");
  std::vector<EffectEstimate> out;
  out.reserve(fit.n() - 1);
  for (int i = 0; i < fit.n(); ++i)
    if (i != reference) out.push_back(relative_effect(fit, i, reference, level));
  return out;
}

}  // namespace cnma
