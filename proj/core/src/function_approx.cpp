#include "ampo/function_approx.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>

#include "ampo/errors.hpp"

namespace ampo {
namespace {

void check_problem(const RegressionProblem& p, const char* who) {
  if (p.weights.rows() != p.targets.rows() || p.weights.cols() != p.targets.cols())
    throw InputError(std::string(who) + ": weight/target shape mismatch");
  if (p.weights.size() == 0) throw InputError(std::string(who) + ": empty problem");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
    const double w = p.weights.data()[i];
    if (!std::isfinite(w) || w < 0.0) throw InputError(std::string(who) + ": bad weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw InputError(std::string(who) + ": weights must sum to 1");
  if (!p.targets.allFinite()) throw InputError(std::string(who) + ": non-finite target");
}

}  // namespace

TabularApproximator fit_exact_tabular(const RegressionProblem& problem) {
  check_problem(problem, "fit_exact_tabular");
  return TabularApproximator{problem.targets};
}

LinearFit fit_exact_linear(const RegressionProblem& problem, const Eigen::MatrixXd& features) {
  check_problem(problem, "fit_exact_linear");
  const Eigen::Index n = problem.weights.size();
  if (features.rows() != n) throw InputError("fit_exact_linear: feature row count mismatch");
  const Eigen::Index d = features.cols();

  // Row-major flattening matches the (s,a) row convention of the features.
  Eigen::VectorXd w(n), y(n);
  for (Eigen::Index s = 0; s < problem.weights.rows(); ++s)
    for (Eigen::Index a = 0; a < problem.weights.cols(); ++a) {
      w[s * problem.weights.cols() + a] = problem.weights(s, a);
      y[s * problem.weights.cols() + a] = problem.targets(s, a);
    }

  const Eigen::MatrixXd wf = w.asDiagonal() * features;
  Eigen::MatrixXd gram = features.transpose() * wf;
  const Eigen::VectorXd rhs = wf.transpose() * y;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  LinearFit fit;
  fit.ridge_engaged = !(lo > 0.0) || hi / lo > 1e12;
  if (fit.ridge_engaged) gram += 1e-10 * Eigen::MatrixXd::Identity(d, d);

  Eigen::VectorXd theta = gram.ldlt().solve(rhs);
  const double grad_norm = (gram * theta - rhs).lpNorm<Eigen::Infinity>();
  if (!(grad_norm <= 1e-8 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())))
    throw NumericalError("least-squares solve left a large gradient");

  fit.f = LinearApproximator{features, std::move(theta)};
  return fit;
}

double regression_loss(const RegressionProblem& problem, const Eigen::MatrixXd& scores) {
  if (scores.rows() != problem.targets.rows() || scores.cols() != problem.targets.cols())
    throw InputError("regression_loss: shape mismatch");
  double loss = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double r = scores.data()[i] - problem.targets.data()[i];
    loss += problem.weights.data()[i] * r * r;
  }
  return loss;
}

ShallowReluNet make_shallow_relu(int m, int d, double eps_a, std::uint64_t seed) {
  if (m < 1 || d < 1) throw InputError("make_shallow_relu needs m >= 1, d >= 1");
  if (!(eps_a > 0.0) || !std::isfinite(eps_a)) throw InputError("make_shallow_relu needs eps_a > 0");
  ShallowReluNet net;
  net.m = m;
  net.d = d;
  net.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> inner(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  std::normal_distribution<double> outer(0.0, std::sqrt(eps_a));
  net.w0.resize(m, d);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < d; ++k) net.w0(j, k) = inner(rng);
  net.b.resize(m);
  for (int j = 0; j < m; ++j) net.b[j] = inner(rng);
  net.c.resize(m);
  for (int j = 0; j < m; ++j) net.c[j] = outer(rng);
  net.w = Eigen::MatrixXd::Zero(m, d);

  // The zero-mean output check: over probe inputs, the sample mean of f is a
  // zero-mean combination of the c draws and stays within 6x the output rms.
  std::normal_distribution<double> probe(0.0, 1.0);
  const int kProbes = 256;
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < kProbes; ++i) {
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x[k] = probe(rng);
    x /= std::max(x.norm(), 1e-12);
    const double f = net_value(net, x);
    mean += f;
    sq += f * f;
  }
  mean /= kProbes;
  const double rms = std::sqrt(sq / kProbes);
  if (std::abs(mean) > 6.0 * rms + 1e-12)
    throw NumericalError("shallow relu init failed the zero-mean output check");
  return net;
}

double net_value(const ShallowReluNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.d) throw InputError("net_value: input dimension mismatch");
  const Eigen::VectorXd pre = (net.w0 + net.w) * x + net.b;
  return net.c.dot(pre.cwiseMax(0.0));
}

Eigen::MatrixXd net_grad_w(const ShallowReluNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.d) throw InputError("net_grad_w: input dimension mismatch");
  const Eigen::VectorXd pre = (net.w0 + net.w) * x + net.b;
  Eigen::MatrixXd g(net.m, net.d);
  for (int j = 0; j < net.m; ++j)
    g.row(j) = (pre[j] > 0.0 ? net.c[j] : 0.0) * x.transpose();
  return g;
}

void fit_sgd(ShallowReluNet& net, int steps, double alpha, const SgdSampler& sampler,
             std::uint64_t seed) {
  if (steps < 0) throw InputError("fit_sgd needs steps >= 0");
  if (!std::isfinite(alpha)) throw InputError("fit_sgd needs a finite step size");
  std::mt19937_64 rng(seed);
  for (int k = 0; k < steps; ++k) {
    const auto [x, y] = sampler(rng);
    const double err = net_value(net, x) - y;
    net.w.noalias() -= alpha * err * net_grad_w(net, x);
    if (!net.w.allFinite())
      throw NumericalError("fit_sgd diverged at step " + std::to_string(k));
  }
}

Eigen::VectorXd encode_state_action(const Eigen::VectorXd& state, int action, int n_actions) {
  if (action < 0 || action >= n_actions) throw InputError("encode_state_action: bad action");
  Eigen::VectorXd z(state.size() + n_actions);
  z.head(state.size()) = state;
  z.tail(n_actions).setZero();
  z[state.size() + action] = 1.0;
  z /= std::max(z.norm(), 1e-12);
  Eigen::VectorXd x(z.size() + 1);
  x.head(z.size()) = z;
  x[z.size()] = 0.5;
  return x;
}

void save_net(const ShallowReluNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out.precision(17);
  out << net.m << " " << net.d << " " << net.seed << "\n";
  auto dump = [&](const Eigen::MatrixXd& mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) out << (c ? " " : "") << mat(r, c);
      out << "\n";
    }
  };
  dump(net.w0);
  dump(net.w);
  dump(net.b.transpose());
  dump(net.c.transpose());
}

ShallowReluNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  ShallowReluNet net;
  if (!(in >> net.m >> net.d >> net.seed) || net.m < 1 || net.d < 1)
    throw InputError("malformed net header in " + path);
  auto slurp = [&](Eigen::MatrixXd& mat, Eigen::Index rows, Eigen::Index cols) {
    mat.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (!(in >> mat(r, c))) throw InputError("malformed net block in " + path);
  };
  Eigen::MatrixXd tmp;
  slurp(net.w0, net.m, net.d);
  slurp(net.w, net.m, net.d);
  slurp(tmp, 1, net.m);
  net.b = tmp.row(0).transpose();
  slurp(tmp, 1, net.m);
  net.c = tmp.row(0).transpose();
  return net;
}

}  // namespace ampo
