#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd = std::string(AMPO_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, ',')) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("the invariant suites run clean end to end") {
  const int rc = run_cli("theory-check --trial-scale 0.02 --seed 5 --out cli_tc", "cli_tc.log");
  CHECK(rc == 0);
  const std::string log = slurp("cli_tc.log");
  CHECK(contains(log, "15/15 suites passed"));
  CHECK_FALSE(contains(log, " FAIL "));
  const std::vector<std::string> rows = lines_of(slurp("cli_tc/suites.csv"));
  REQUIRE(rows.size() == 16);  // header + one row per suite
  CHECK(fields_of(rows[0])[0] == "name");
}

TEST_CASE("an injected projection defect turns the suites red") {
  const int rc = run_cli(
      "theory-check --trial-scale 0.02 --seed 5 --inject-broken-projection", "cli_broken.log");
  CHECK(rc == 1);
  const std::string log = slurp("cli_broken.log");
  CHECK(contains(log, "three-point-descent"));
  CHECK(contains(log, " FAIL "));
}

TEST_CASE("exact-MDP runs are reproducible across invocations") {
  const std::string args = "tabular --schedule geometric:auto --iters 25 --seed 3 --eta0 1.0";
  CHECK(run_cli(args + " --out cli_tab_a", "cli_tab_a.log") == 0);
  CHECK(run_cli(args + " --out cli_tab_b", "cli_tab_b.log") == 0);
  CHECK(slurp("cli_tab_a/summary.csv") == slurp("cli_tab_b/summary.csv"));

  const std::string run_name = "run_entropy_geometric-auto_seed3.csv";
  const std::vector<std::string> a = lines_of(slurp("cli_tab_a/" + run_name));
  const std::vector<std::string> b = lines_of(slurp("cli_tab_b/" + run_name));
  REQUIRE(a.size() == 26);  // header + 25 iterations
  REQUIRE(b.size() == a.size());
  CHECK(a[0] == "t,eta,value,gap,bregman_to_opt,eps_approx,c_v,nu,wall_ms");
  for (std::size_t i = 1; i < a.size(); ++i) {
    const std::vector<std::string> fa = fields_of(a[i]), fb = fields_of(b[i]);
    REQUIRE(fa.size() == 9);
    REQUIRE(fb.size() == 9);
    CHECK(fa[0] == std::to_string(i - 1));
    for (int c = 0; c < 8; ++c) CHECK(fa[c] == fb[c]);  // wall time may differ
  }
  const std::vector<std::string> summary = lines_of(slurp("cli_tab_a/summary.csv"));
  REQUIRE(summary.size() == 2);
  CHECK(fields_of(summary[1]).back() == "25");
}

TEST_CASE("bad tokens exit with the configuration code") {
  CHECK(run_cli("tabular --schedule geometric:0.5 --iters 5 --out cli_bad", "cli_bad.log") == 2);
  CHECK(run_cli("tabular --schedule geometric:abc --iters 5 --out cli_bad", "cli_bad.log") == 2);
  CHECK(run_cli("tabular --mirror nosuch --iters 5 --out cli_bad", "cli_bad.log") == 2);
  CHECK(run_cli("tabular --eta0 -1.0 --iters 5 --out cli_bad", "cli_bad.log") == 2);
  CHECK(run_cli("control --env mountaincar --iters 1 --seed 1 --out cli_bad", "cli_bad.log") == 2);
  CHECK(run_cli("", "cli_bad.log") == 2);  // a subcommand is required
  CHECK(run_cli("--help", "cli_help.log") == 0);
  CHECK(run_cli("theory-check --help", "cli_help.log") == 0);
}

TEST_CASE("control runs write one curve per seed plus the mean") {
  const int rc = run_cli(
      "control --env cartpole --iters 2 --rollout 128 --actor-width 16 --critic-width 8 "
      "--epochs 1 --minibatch 32 --seed 4 --threads 1 --out cli_ctl",
      "cli_ctl.log");
  CHECK(rc == 0);
  CHECK(contains(slurp("cli_ctl.log"), "final-window mean return"));
  const std::vector<std::string> curve = lines_of(slurp("cli_ctl/cartpole_entropy_seed4.csv"));
  REQUIRE(curve.size() == 3);
  CHECK(curve[0] == "iter,mean_return,episodes,wall_ms");
  CHECK(fields_of(curve[1])[0] == "0");
  CHECK(fields_of(curve[2])[0] == "1");
  const std::vector<std::string> mean = lines_of(slurp("cli_ctl/cartpole_entropy_mean.csv"));
  REQUIRE(mean.size() == 3);
  CHECK(mean[0] == "iter,mean_return");
}

TEST_CASE("config files supply defaults and the command line overrides them") {
  {
    std::ofstream cfg("cli_cfg.toml");
    cfg << "iters=35\n";
  }
  CHECK(run_cli("tabular --config cli_cfg.toml --out cli_cfg_a", "cli_cfg_a.log") == 0);
  CHECK(fields_of(lines_of(slurp("cli_cfg_a/summary.csv"))[1]).back() == "35");
  CHECK(run_cli("tabular --config cli_cfg.toml --iters 20 --out cli_cfg_b", "cli_cfg_b.log") == 0);
  CHECK(fields_of(lines_of(slurp("cli_cfg_b/summary.csv"))[1]).back() == "20");
}

TEST_CASE("the projection timing table covers every size") {
  const int rc = run_cli("project-bench --min-pow 2 --max-pow 4 --out cli_pb", "cli_pb.log");
  CHECK(rc == 0);
  CHECK(contains(slurp("cli_pb.log"), "worst bisection doubling ratio"));
  const std::vector<std::string> rows = lines_of(slurp("cli_pb/timing.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == "kind,method,n,ns_per_call");
  CHECK(rows.size() == 1 + 6 * 3);  // six kind/method entries, three sizes
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::vector<std::string> f = fields_of(rows[i]);
    REQUIRE(f.size() == 4);
    CHECK(std::stod(f[3]) > 0.0);
  }
}
