#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "mymove/analytics.hpp"
#include "mymove/errors.hpp"

namespace mymove {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::string_view kIntercept = "intercept";

bool is_constant_nonzero(const Eigen::MatrixXd& x, Eigen::Index c) {
  double v = x(0, c);
  return v != 0.0 && (x.col(c).array() == v).all();
}

double two_sided_p(double t, std::size_t df) {
  if (df == 0 || std::isnan(t)) return kNaN;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t dist(static_cast<double>(df));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

}  // namespace

DesignMatrix DesignMatrix::without_column(std::size_t c) const {
  DesignMatrix d;
  d.rows = rows;
  d.cols = cols - 1;
  d.values.reserve(rows * d.cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < cols; ++k)
      if (k != c) d.values.push_back(at(r, k));
  for (std::size_t k = 0; k < cols; ++k)
    if (k != c) d.names.push_back(names[k]);
  return d;
}

const ParameterEstimate* RegressionResult::find(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

RegressionResult ols_fit(const DesignMatrix& design, std::span<const double> yv) {
  if (design.values.size() != design.rows * design.cols || design.names.size() != design.cols)
    throw Error(ErrorCode::kInvalidArgument, "design matrix shape does not match its data");
  if (yv.size() != design.rows)
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} rows vs {} responses", design.rows, yv.size()));
  if (design.cols == 0 || design.rows < design.cols)
    throw Error(ErrorCode::kRankDeficient,
                fmt::format("{} rows cannot identify {} parameters", design.rows, design.cols));

  const auto n = static_cast<Eigen::Index>(design.rows);
  const auto p = static_cast<Eigen::Index>(design.cols);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> xm(
      design.values.data(), n, p);
  Eigen::MatrixXd x = xm;
  Eigen::Map<const Eigen::VectorXd> y(yv.data(), n);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p)
    throw Error(ErrorCode::kRankDeficient, fmt::format("design rank {} < {} columns", qr.rank(), p));

  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - x * beta;
  const double rss = resid.squaredNorm();
  const std::size_t df = design.rows - design.cols;

  bool intercept = false;
  for (Eigen::Index c = 0; c < p; ++c) intercept = intercept || is_constant_nonzero(x, c);
  const double tss = intercept ? (y.array() - y.mean()).square().sum() : y.squaredNorm();

  RegressionResult r;
  r.n = design.rows;
  r.df = df;
  r.sigma2 = df > 0 ? rss / static_cast<double>(df) : kNaN;
  r.r2 = tss > 0 ? 1.0 - rss / tss : kNaN;
  const double n_eff = static_cast<double>(design.rows) - (intercept ? 1.0 : 0.0);
  r.adjusted_r2 = (tss > 0 && df > 0) ? 1.0 - (rss / static_cast<double>(df)) / (tss / n_eff) : kNaN;
  const double k = static_cast<double>(p) - (intercept ? 1.0 : 0.0);
  r.f_stat = (k > 0 && df > 0 && rss > 0) ? ((tss - rss) / k) / (rss / static_cast<double>(df))
             : (k > 0 && df > 0)          ? std::numeric_limits<double>::infinity()
                                          : kNaN;

  // (X'X)^-1 through the triangular factor: P R^-1 R^-T P'.
  Eigen::MatrixXd rinv = qr.matrixR()
                             .topLeftCorner(p, p)
                             .triangularView<Eigen::Upper>()
                             .solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
  Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

  r.residuals.assign(resid.data(), resid.data() + n);
  for (Eigen::Index c = 0; c < p; ++c) {
    ParameterEstimate e;
    e.name = design.names[static_cast<std::size_t>(c)];
    e.coef = beta(c);
    e.se = df > 0 ? std::sqrt(r.sigma2 * cov(c, c)) : kNaN;
    e.t = e.se > 0 ? e.coef / e.se : (e.coef != 0 && e.se == 0 ? std::copysign(INFINITY, e.coef) : kNaN);
    e.p = two_sided_p(e.t, df);
    r.params.push_back(std::move(e));
  }
  return r;
}

EliminationResult backward_eliminate(const DesignMatrix& x, std::span<const double> y, double alpha_keep) {
  if (!(alpha_keep > 0 && alpha_keep <= 1))
    throw Error(ErrorCode::kInvalidArgument, fmt::format("alpha_keep {} outside (0, 1]", alpha_keep));
  EliminationResult out;
  DesignMatrix cur = x;
  out.model = ols_fit(cur, y);
  for (;;) {
    std::optional<std::size_t> worst;
    double worst_p = -1.0;
    for (std::size_t c = 0; c < cur.cols; ++c) {
      if (cur.names[c] == kIntercept) continue;
      double p = out.model.params[c].p;
      if (std::isnan(p)) p = 1.0;
      if (p > worst_p) {
        worst_p = p;
        worst = c;
      }
    }
    if (!worst || worst_p < alpha_keep || cur.cols == 1) break;
    out.trace.push_back({cur.names[*worst], worst_p});
    cur = cur.without_column(*worst);
    out.model = ols_fit(cur, y);
  }
  return out;
}

}  // namespace mymove
