#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>

namespace ampo {

// Exact per-pair table of scores.
struct TabularApproximator {
  Eigen::MatrixXd theta;  // S x A
  double operator()(int s, int a) const { return theta(s, a); }
};

// f(s,a) = <features.row(s*A + a), theta>.
struct LinearApproximator {
  Eigen::MatrixXd features;  // (S*A) x d
  Eigen::VectorXd theta;     // d
  double evaluate(int row) const { return features.row(row).dot(theta); }
};

// Weighted regression instance over state-action pairs: minimize
// sum_{s,a} weights(s,a) (f(s,a) - targets(s,a))^2.
struct RegressionProblem {
  Eigen::MatrixXd weights;  // S x A, nonnegative, sums to 1
  Eigen::MatrixXd targets;  // S x A
};

// Tabular fit: zero loss by construction. Rejects non-finite targets.
TabularApproximator fit_exact_tabular(const RegressionProblem& problem);

struct LinearFit {
  LinearApproximator f;
  bool ridge_engaged = false;  // normal equations were regularized
};

// Weighted least squares via the normal equations; a 1e-10 ridge engages
// when the Gram matrix condition estimate exceeds 1e12.
LinearFit fit_exact_linear(const RegressionProblem& problem, const Eigen::MatrixXd& features);

// Realized weighted L2 loss of a score table against a problem.
double regression_loss(const RegressionProblem& problem, const Eigen::MatrixXd& scores);

// One-hidden-layer ReLU net f(x) = c . relu((W0 + W) x + b) with frozen
// random W0, b, c and a trainable delta W (zero at init).
struct ShallowReluNet {
  int m = 0;  // width
  int d = 0;  // input dimension
  std::uint64_t seed = 0;
  Eigen::MatrixXd w0;  // m x d, N(0, 1/m)
  Eigen::MatrixXd w;   // m x d, trainable
  Eigen::VectorXd b;   // m, N(0, 1/m)
  Eigen::VectorXd c;   // m, N(0, eps_a)
};

ShallowReluNet make_shallow_relu(int m, int d, double eps_a, std::uint64_t seed);

double net_value(const ShallowReluNet& net, const Eigen::VectorXd& x);

// d f / d W; the ReLU subgradient at exactly 0 is taken as 0.
Eigen::MatrixXd net_grad_w(const ShallowReluNet& net, const Eigen::VectorXd& x);

// Draws one (input, target) regression sample.
using SgdSampler = std::function<std::pair<Eigen::VectorXd, double>(std::mt19937_64&)>;

// Single-sample SGD on W only: W <- W - alpha (f(x) - y) df/dW, `steps`
// times. Deterministic given the seed; throws NumericalError naming the
// step index if an update goes non-finite.
void fit_sgd(ShallowReluNet& net, int steps, double alpha, const SgdSampler& sampler,
             std::uint64_t seed);

// Encoding of a continuous state and a discrete action for net input: the
// one-hot action block is appended, the vector is rescaled to unit l2 norm,
// and a trailing 1/2 coordinate is added.
Eigen::VectorXd encode_state_action(const Eigen::VectorXd& state, int action, int n_actions);

// Checkpoint: header "m d seed", then W0, W, b, c row-major at 17
// significant digits. Round-trips exactly.
void save_net(const ShallowReluNet& net, const std::string& path);
ShallowReluNet load_net(const std::string& path);

}  // namespace ampo
