#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "ampo/checks.hpp"
#include "ampo/control.hpp"
#include "ampo/csv.hpp"
#include "ampo/engine.hpp"
#include "ampo/errors.hpp"
#include "ampo/mdp.hpp"
#include "ampo/omega_potential.hpp"
#include "ampo/projection.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalAbort = 3;

// Seed lists accept plain integers, comma lists, and inclusive ranges: "7",
// "1,2,9", "1-50".
std::vector<std::uint64_t> expand_seeds(const std::vector<std::string>& tokens) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& token : tokens) {
    std::size_t start = 0;
    while (start <= token.size()) {
      const std::size_t comma = token.find(',', start);
      const std::string piece =
          token.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      start = comma == std::string::npos ? token.size() + 1 : comma + 1;
      if (piece.empty()) continue;
      const std::size_t dash = piece.find('-', 1);
      try {
        if (dash == std::string::npos) {
          seeds.push_back(std::stoull(piece));
        } else {
          const std::uint64_t lo = std::stoull(piece.substr(0, dash));
          const std::uint64_t hi = std::stoull(piece.substr(dash + 1));
          if (hi < lo) throw ampo::InputError("seed range is reversed: " + piece);
          for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        }
      } catch (const std::logic_error&) {
        throw ampo::InputError("unparseable seed token: " + piece);
      }
    }
  }
  if (seeds.empty()) throw ampo::InputError("seed list is empty");
  return seeds;
}

// "constant" or "geometric:<nu>" with nu > 1; "geometric:auto" defers the
// mismatch bound to a measuring pilot run.
struct ScheduleSpec {
  bool geometric = false;
  bool auto_nu = false;
  double nu = 0.0;
};

ScheduleSpec parse_schedule(const std::string& token) {
  ScheduleSpec spec;
  if (token == "constant") return spec;
  const std::string prefix = "geometric:";
  if (token.rfind(prefix, 0) != 0)
    throw ampo::InputError("schedule must be constant or geometric:<nu>, got " + token);
  spec.geometric = true;
  const std::string arg = token.substr(prefix.size());
  if (arg == "auto") {
    spec.auto_nu = true;
    return spec;
  }
  std::size_t used = 0;
  try {
    spec.nu = std::stod(arg, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used != arg.size() || !(spec.nu > 1.0))
    throw ampo::InputError("geometric schedule needs nu > 1, got " + arg);
  return spec;
}

std::string sanitize(const std::string& token) {
  std::string out = token;
  std::replace(out.begin(), out.end(), ':', '-');
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ampo::InputError("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ampo::InputError("cannot open " + path + " for writing");
  return out;
}

// ---------------------------------------------------------------- theory ---

struct TheoryOpts {
  std::uint64_t seed = 20250822;
  double trial_scale = 1.0;
  double projection_precision = 1e-10;
  bool inject_broken_projection = false;
  std::string out_dir;
};

int cmd_theory_check(const TheoryOpts& opts) {
  ampo::TheoryCheckOptions copt;
  copt.seed = opts.seed;
  copt.trial_scale = opts.trial_scale;
  copt.projection_precision = opts.projection_precision;
  copt.break_projection = opts.inject_broken_projection;
  const std::vector<ampo::SuiteReport> reports = ampo::run_theory_suites(copt);
  long passed = 0;
  for (const ampo::SuiteReport& r : reports) {
    std::printf("[suite] %-26s %s  trials=%ld failures=%ld skipped=%ld worst_slack=%s elapsed_ms=%.1f\n",
                r.name.c_str(), r.passed() ? "PASS" : "FAIL", r.trials, r.failures, r.skipped,
                ampo::format_double(r.worst_slack).c_str(), r.elapsed_ms);
    if (r.passed()) ++passed;
  }
  std::printf("theory-check: %ld/%zu suites passed\n", passed, reports.size());
  if (!opts.out_dir.empty()) {
    ensure_dir(opts.out_dir);
    std::ofstream out = open_out(opts.out_dir + "/suites.csv");
    out << "name,trials,failures,skipped,worst_slack,elapsed_ms\n";
    for (const ampo::SuiteReport& r : reports)
      out << r.name << ',' << r.trials << ',' << r.failures << ',' << r.skipped << ','
          << ampo::format_double(r.worst_slack) << ',' << ampo::format_double(r.elapsed_ms)
          << '\n';
  }
  return passed == static_cast<long>(reports.size()) ? kExitOk : kExitCheckFailure;
}

// --------------------------------------------------------------- tabular ---

struct TabularOpts {
  std::string mdp_path;
  std::string mirror = "entropy";
  std::string schedule = "geometric:auto";
  double eta0 = 1.0;
  int iters = 60;
  double projection_precision = 1e-12;
  std::string eval = "exact";
  int mc_episodes = 32;
  std::string weight = "uniform";
  std::vector<std::string> seed_tokens = {"0"};
  std::string out_dir = "out/tabular";
};

double fit_log_gap_slope(const std::vector<ampo::IterationRecord>& records) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (const ampo::IterationRecord& r : records) {
    if (!(r.gap > 1e-13)) continue;
    const double x = static_cast<double>(r.t);
    const double y = std::log(r.gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (n < 2 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

double max_finite_nu(const std::vector<ampo::IterationRecord>& records) {
  double nu = 1.0;
  for (const ampo::IterationRecord& r : records)
    if (std::isfinite(r.nu)) nu = std::max(nu, r.nu);
  return nu;
}

int cmd_tabular(const TabularOpts& opts) {
  const ampo::TabularMdp mdp =
      opts.mdp_path.empty() ? ampo::canonical_test_mdp() : ampo::load_mdp(opts.mdp_path);
  const ScheduleSpec sched = parse_schedule(opts.schedule);
  const std::vector<std::uint64_t> seeds = expand_seeds(opts.seed_tokens);
  ensure_dir(opts.out_dir);

  ampo::AmpoConfig base;
  base.map = ampo::OmegaPotential::parse(opts.mirror);
  base.iterations = opts.iters;
  base.projection_precision = opts.projection_precision;
  if (opts.eval == "exact") {
    base.eval_mode = ampo::EvalMode::Exact;
  } else if (opts.eval == "mc") {
    base.eval_mode = ampo::EvalMode::MonteCarlo;
    base.mc_episodes = opts.mc_episodes;
  } else {
    throw ampo::InputError("eval must be exact or mc, got " + opts.eval);
  }
  if (opts.weight == "uniform") {
    base.weight_mode = ampo::WeightMode::Uniform;
  } else if (opts.weight == "onpolicy") {
    base.weight_mode = ampo::WeightMode::OnPolicy;
  } else {
    throw ampo::InputError("weight must be uniform or onpolicy, got " + opts.weight);
  }

  std::ofstream summary = open_out(opts.out_dir + "/summary.csv");
  summary << "mirror,schedule,eta0,seed,nu_bar,ratio,slope,predicted_slope,final_gap,iterations\n";
  for (const std::uint64_t seed : seeds) {
    ampo::AmpoConfig cfg = base;
    cfg.seed = seed;
    double nu_bar = sched.nu;
    double ratio = 1.0;
    ampo::AmpoRun run;
    if (!sched.geometric) {
      cfg.schedule = ampo::StepSizeSchedule::constant(opts.eta0);
      run = ampo::run_ampo(cfg, mdp);
      nu_bar = max_finite_nu(run.records);
    } else {
      if (sched.auto_nu) {
        ampo::AmpoConfig pilot = cfg;
        pilot.schedule = ampo::StepSizeSchedule::constant(opts.eta0);
        nu_bar = max_finite_nu(ampo::run_ampo(pilot, mdp).records);
      }
      // The measured mismatch bound must cover the geometric run itself;
      // re-run with the enlarged bound until it does.
      for (int round = 0; round < 4; ++round) {
        ratio = nu_bar / (nu_bar - 1.0);
        cfg.schedule = ampo::StepSizeSchedule::geometric(opts.eta0, ratio);
        run = ampo::run_ampo(cfg, mdp);
        const double seen = max_finite_nu(run.records);
        if (seen <= nu_bar * (1.0 + 1e-12)) break;
        nu_bar = seen;
      }
    }
    const std::string run_name = "run_" + sanitize(opts.mirror) + "_" +
                                 sanitize(opts.schedule) + "_seed" + std::to_string(seed) +
                                 ".csv";
    ampo::write_run_csv(opts.out_dir + "/" + run_name, run.records);
    const double slope = fit_log_gap_slope(run.records);
    const double predicted = std::log1p(-1.0 / nu_bar);
    const double final_gap = run.records.empty() ? 0.0 : run.records.back().gap;
    summary << opts.mirror << ',' << opts.schedule << ',' << ampo::format_double(opts.eta0)
            << ',' << seed << ',' << ampo::format_double(nu_bar) << ','
            << ampo::format_double(ratio) << ',' << ampo::format_double(slope) << ','
            << ampo::format_double(predicted) << ',' << ampo::format_double(final_gap) << ','
            << run.records.size() << '\n';
    std::printf(
        "[tabular] mirror=%s schedule=%s seed=%llu nu_bar=%.6g slope=%.6g predicted=%.6g "
        "final_gap=%.3e -> %s\n",
        opts.mirror.c_str(), opts.schedule.c_str(), static_cast<unsigned long long>(seed), nu_bar,
        slope, predicted, final_gap, run_name.c_str());
  }
  return kExitOk;
}

// --------------------------------------------------------------- control ---

struct ControlOpts {
  std::string env = "cartpole";
  std::string mirror = "entropy";
  double eta0 = 1.0;
  int iters = 150;
  int rollout = 2048;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double projection_precision = 1e-8;
  std::string inner = "adam";
  int epochs = 10;
  int minibatch = 256;
  double adam_lr = 2e-2;
  int actor_width = 128;
  int critic_width = 64;
  double critic_lr = 1e-2;
  int sgd_steps = 8192;
  double sgd_alpha = 1e-2;
  std::vector<std::string> seed_tokens = {"1-50"};
  int threads = 0;  // 0 = hardware concurrency
  std::string out_dir = "out/control";
};

int cmd_control(const ControlOpts& opts) {
  const std::vector<std::uint64_t> seeds = expand_seeds(opts.seed_tokens);
  ensure_dir(opts.out_dir);
  ampo::ControlConfig cfg;
  cfg.env = opts.env;
  cfg.map = ampo::OmegaPotential::parse(opts.mirror);
  cfg.eta = opts.eta0;
  cfg.iterations = opts.iters;
  cfg.rollout_steps = opts.rollout;
  cfg.gamma = opts.gamma;
  cfg.gae_lambda = opts.gae_lambda;
  cfg.projection_precision = opts.projection_precision;
  cfg.inner = opts.inner;
  cfg.epochs = opts.epochs;
  cfg.minibatch = opts.minibatch;
  cfg.adam_lr = opts.adam_lr;
  cfg.actor_width = opts.actor_width;
  cfg.critic_width = opts.critic_width;
  cfg.critic_lr = opts.critic_lr;
  cfg.sgd_steps = opts.sgd_steps;
  cfg.sgd_alpha = opts.sgd_alpha;

  // Seeds fan out across workers; results land in per-seed slots so the
  // write-out below is deterministic regardless of scheduling.
  std::vector<ampo::ControlCurve> curves(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      std::min<std::size_t>(opts.threads > 0 ? static_cast<std::size_t>(opts.threads) : hw,
                            seeds.size());
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      try {
        curves[i] = ampo::train_control(cfg, seeds[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w + 1 < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  const std::string stem = opts.env + "_" + sanitize(opts.mirror);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::ofstream out =
        open_out(opts.out_dir + "/" + stem + "_seed" + std::to_string(seeds[i]) + ".csv");
    out << "iter,mean_return,episodes,wall_ms\n";
    for (std::size_t t = 0; t < curves[i].mean_return.size(); ++t)
      out << t << ',' << ampo::format_double(curves[i].mean_return[t]) << ','
          << curves[i].episodes[t] << ',' << ampo::format_double(curves[i].wall_ms[t]) << '\n';
  }
  std::ofstream mean_out = open_out(opts.out_dir + "/" + stem + "_mean.csv");
  mean_out << "iter,mean_return\n";
  double final_window_sum = 0.0;
  long final_window_count = 0;
  const int window_start = opts.iters - std::max(1, opts.iters / 10);
  for (int t = 0; t < opts.iters; ++t) {
    double acc = 0.0;
    for (const ampo::ControlCurve& c : curves) acc += c.mean_return[static_cast<std::size_t>(t)];
    const double mean = acc / static_cast<double>(curves.size());
    mean_out << t << ',' << ampo::format_double(mean) << '\n';
    if (t >= window_start) {
      final_window_sum += mean;
      ++final_window_count;
    }
  }
  std::printf("[control] env=%s mirror=%s seeds=%zu iters=%d final-window mean return=%.2f\n",
              opts.env.c_str(), opts.mirror.c_str(), seeds.size(), opts.iters,
              final_window_sum / static_cast<double>(final_window_count));
  return kExitOk;
}

// --------------------------------------------------------------- bench ----

struct BenchOpts {
  double precision = 1e-10;
  int min_pow = 1;
  int max_pow = 14;
  std::uint64_t seed = 1;
  std::string out_dir = "out/projection";
};

double time_ns_per_call(const std::function<void()>& call) {
  // Grow the batch until the measurement window is comfortably above timer
  // noise, then report the median of three windows.
  long batch = 1;
  for (;;) {
    const auto t0 = Clock::now();
    for (long i = 0; i < batch; ++i) call();
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (ms >= 10.0 || batch >= (1L << 24)) break;
    batch *= 2;
  }
  std::array<double, 3> samples{};
  for (double& s : samples) {
    const auto t0 = Clock::now();
    for (long i = 0; i < batch; ++i) call();
    const double ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
    s = ns / static_cast<double>(batch);
  }
  std::sort(samples.begin(), samples.end());
  return samples[1];
}

int cmd_project_bench(const BenchOpts& opts) {
  ensure_dir(opts.out_dir);
  std::ofstream out = open_out(opts.out_dir + "/timing.csv");
  out << "kind,method,n,ns_per_call\n";
  struct Row {
    std::string kind;
    std::string method;
    int n;
    double ns;
  };
  std::vector<Row> rows;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-6.0, 6.0);
  struct Entry {
    ampo::OmegaPotential pot;
    bool closed;
  };
  const std::vector<Entry> entries = {
      {ampo::OmegaPotential::negative_entropy(), true},
      {ampo::OmegaPotential::squared_l2(), true},
      {ampo::OmegaPotential::eps_negative_entropy(0.1), true},
      {ampo::OmegaPotential::negative_entropy(), false},
      {ampo::OmegaPotential::hyperbolic(1.0), false},
      {ampo::OmegaPotential::tanh_entropy(), false},
  };
  double sink = 0.0;
  for (const Entry& entry : entries) {
    const std::string method = entry.closed ? "closed" : "bisection";
    for (int p = opts.min_pow; p <= opts.max_pow; ++p) {
      const int n = 1 << p;
      std::vector<Eigen::VectorXd> inputs(8, Eigen::VectorXd(n));
      for (Eigen::VectorXd& v : inputs)
        for (int i = 0; i < n; ++i) v[i] = unif(rng);
      std::size_t which = 0;
      const double ns = time_ns_per_call([&]() {
        const Eigen::VectorXd& scores = inputs[which];
        which = (which + 1) % inputs.size();
        const ampo::ProjectionResult r =
            entry.closed ? ampo::project(scores, entry.pot, opts.precision)
                         : ampo::project_bisection(scores, entry.pot, opts.precision);
        sink += r.dist[0];
      });
      rows.push_back({entry.pot.token(), method, n, ns});
      out << entry.pot.token() << ',' << method << ',' << n << ','
          << ampo::format_double(ns) << '\n';
    }
  }
  // Doubling ratios across the upper range, per bisection kind.
  double worst_ratio = 0.0;
  for (const Entry& entry : entries) {
    if (entry.closed) continue;
    for (int p = 6; p <= opts.max_pow; ++p) {
      double t_prev = 0.0, t_cur = 0.0;
      for (const Row& r : rows) {
        if (r.kind != entry.pot.token() || r.method != "bisection") continue;
        if (r.n == (1 << (p - 1))) t_prev = r.ns;
        if (r.n == (1 << p)) t_cur = r.ns;
      }
      if (t_prev > 0.0 && t_cur > 0.0) worst_ratio = std::max(worst_ratio, t_cur / t_prev);
    }
  }
  if (worst_ratio > 0.0) {
    std::printf("[project-bench] sizes 2^%d..2^%d written; worst bisection doubling ratio %.3f "
                "(sink %.3g)\n",
                opts.min_pow, opts.max_pow, worst_ratio, sink);
  } else {
    std::printf("[project-bench] sizes 2^%d..2^%d written; worst bisection doubling ratio n/a, "
                "range stops below 2^6 (sink %.3g)\n",
                opts.min_pow, opts.max_pow, sink);
  }
  return kExitOk;
}

// Flat key=value defaults file. Fills exactly the options the command line left
// unset, so explicit flags always win. Returns an error message, empty on success.
std::string apply_config_file(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) return "cannot open " + path;
  const auto strip = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    const std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) return where + ": expected key = value";
    const std::string key = strip(text.substr(0, eq));
    std::string value = strip(text.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    CLI::Option* op = key.empty() ? nullptr : sub.get_option_no_throw("--" + key);
    if (op == nullptr) return where + ": unknown key '" + key + "'";
    if (op->count() > 0) continue;
    try {
      op->add_result(value);
      op->run_callback();
    } catch (const CLI::Error& e) {
      return where + ": " + e.what();
    }
  }
  return std::string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mirror-descent policy optimization toolkit"};
  app.require_subcommand(1);
  std::string theory_config, tabular_config, control_config, bench_config;

  TheoryOpts theory;
  CLI::App* tc = app.add_subcommand("theory-check", "Run the randomized invariant suites");
  tc->add_option("--config", theory_config, "Flat key=value defaults file (explicit flags win)");
  tc->add_option("--seed", theory.seed, "Base seed for the randomized trials");
  tc->add_option("--trial-scale", theory.trial_scale, "Multiplier on every suite's trial count");
  tc->add_option("--projection-precision", theory.projection_precision,
                 "Bisection tolerance used inside the suites");
  tc->add_option("--out", theory.out_dir, "Directory for suites.csv (optional)");
  tc->add_flag("--inject-broken-projection", theory.inject_broken_projection)->group("");

  TabularOpts tabular;
  CLI::App* tb = app.add_subcommand("tabular", "Exact-MDP convergence experiments");
  tb->add_option("--config", tabular_config, "Flat key=value defaults file (explicit flags win)");
  tb->add_option("--mdp", tabular.mdp_path, "MDP file (default: the fixed 5x3 instance)");
  tb->add_option("--mirror", tabular.mirror, "Mirror map token");
  tb->add_option("--schedule", tabular.schedule, "constant | geometric:<nu> | geometric:auto");
  tb->add_option("--eta0", tabular.eta0, "Initial step size");
  tb->add_option("--iters", tabular.iters, "Iteration count");
  tb->add_option("--projection-precision", tabular.projection_precision, "Bisection tolerance");
  tb->add_option("--eval", tabular.eval, "exact | mc");
  tb->add_option("--mc-episodes", tabular.mc_episodes, "Samples per state-action pair (mc)");
  tb->add_option("--weight", tabular.weight, "Regression weights: uniform | onpolicy");
  tb->add_option("--seed", tabular.seed_tokens, "Seed list (e.g. 0 or 1-5 or 1,2,9)");
  tb->add_option("--out", tabular.out_dir, "Output directory");

  ControlOpts control;
  CLI::App* ct = app.add_subcommand("control", "CartPole / Acrobot learning curves");
  ct->add_option("--config", control_config, "Flat key=value defaults file (explicit flags win)");
  ct->add_option("--env", control.env, "cartpole | acrobot");
  ct->add_option("--mirror", control.mirror, "Mirror map token");
  ct->add_option("--eta0", control.eta0, "Step size (constant schedule)");
  ct->add_option("--iters", control.iters, "Outer iterations");
  ct->add_option("--rollout", control.rollout, "Environment steps per iteration");
  ct->add_option("--gamma", control.gamma, "Discount factor");
  ct->add_option("--gae-lambda", control.gae_lambda, "Advantage mixing parameter");
  ct->add_option("--projection-precision", control.projection_precision, "Bisection tolerance");
  ct->add_option("--inner", control.inner, "Inner regression: adam | sgd");
  ct->add_option("--epochs", control.epochs, "Adam epochs per iteration");
  ct->add_option("--minibatch", control.minibatch, "Adam minibatch size");
  ct->add_option("--adam-lr", control.adam_lr, "Adam learning rate");
  ct->add_option("--actor-width", control.actor_width, "Actor hidden width");
  ct->add_option("--critic-width", control.critic_width, "Critic hidden width");
  ct->add_option("--critic-lr", control.critic_lr, "Critic Adam learning rate");
  ct->add_option("--sgd-steps", control.sgd_steps, "Inner SGD steps (inner=sgd)");
  ct->add_option("--sgd-alpha", control.sgd_alpha, "Inner SGD step size (inner=sgd)");
  ct->add_option("--seed", control.seed_tokens, "Seed list (default 1-50)");
  ct->add_option("--threads", control.threads, "Worker threads (0 = hardware)");
  ct->add_option("--out", control.out_dir, "Output directory");

  BenchOpts bench;
  CLI::App* pb = app.add_subcommand("project-bench", "Projection wall-time scaling table");
  pb->add_option("--config", bench_config, "Flat key=value defaults file (explicit flags win)");
  pb->add_option("--projection-precision", bench.precision, "Bisection tolerance");
  pb->add_option("--min-pow", bench.min_pow, "Smallest size as a power of two");
  pb->add_option("--max-pow", bench.max_pow, "Largest size as a power of two");
  pb->add_option("--seed", bench.seed, "Input generation seed");
  pb->add_option("--out", bench.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  const std::array<std::pair<CLI::App*, const std::string*>, 4> config_slots = {
      {{tc, &theory_config}, {tb, &tabular_config}, {ct, &control_config}, {pb, &bench_config}}};
  for (const auto& [sub, cfg_path] : config_slots) {
    if (!sub->parsed() || cfg_path->empty()) continue;
    const std::string err = apply_config_file(*sub, *cfg_path);
    if (!err.empty()) {
      std::fprintf(stderr, "config error: %s\n", err.c_str());
      return kExitConfigError;
    }
  }

  try {
    if (tc->parsed()) return cmd_theory_check(theory);
    if (tb->parsed()) return cmd_tabular(tabular);
    if (ct->parsed()) return cmd_control(control);
    if (pb->parsed()) return cmd_project_bench(bench);
  } catch (const ampo::NumericalError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumericalAbort;
  } catch (const ampo::InfeasibleError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumericalAbort;
  } catch (const ampo::InputError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitConfigError;
}
