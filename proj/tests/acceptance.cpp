// Acceptance runner: one PASS/FAIL line per criterion.
//
//   rwde_acceptance               all criteria
//   rwde_acceptance --criterion 6 one criterion
//
// Each criterion runs the registered experiments with frozen parameters and
// then re-checks the headline numbers against hand-evaluated targets.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rwde/experiments.hpp"
#include "rwde/parallel.hpp"
#include "rwde/walk.hpp"

using namespace rwde;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAILED]");
  }
};

Verdict run(const std::string& name, std::map<std::string, std::string> params) {
  ExperimentConfig cfg;
  cfg.experiment = name;
  cfg.parameters = std::move(params);
  cfg.seed = kSeed;
  cfg.threads = default_thread_count();
  return run_experiment(cfg);
}

const Check* find(const Verdict& v, const std::string& name) {
  for (const auto& c : v.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Requires the named experiment check to pass and returns its measured value.
double passed(Outcome& o, const Verdict& v, const std::string& name) {
  const Check* c = find(v, name);
  if (!c) {
    o.require(false, "missing check '" + name + "'");
    return std::nan("");
  }
  o.require(c->pass, name + " = " + num(c->measured));
  return c->measured;
}

void runtime(Outcome& o, const std::vector<Verdict>& vs, double limit) {
  double total = 0.0;
  for (const auto& v : vs) total += v.wall_seconds;
  o.require(total < limit, "runtime " + num(total) + " s < " + num(limit) + " s");
}

double ks5(double n) { return 1.358 / std::sqrt(n); }

Outcome c1() {
  Outcome o;
  const Verdict v = run("reversal-check",
                        {{"dim", "2"}, {"torus", "4"}, {"weights", "1,2,1,1"}, {"samples", "1e5"}, {"max-order", "3"},
                         {"sigma", "4"}});
  passed(o, v, "max |z| of site moments");
  const double corr = passed(o, v, "max |cross-site correlation|");
  o.require(corr < 4.0 / std::sqrt(1e5), "correlation < 4/sqrt(n)");
  runtime(o, {v}, 120);
  return o;
}

Outcome c2() {
  Outcome o;
  const Verdict v = run("return-law", {{"graph", "triangle"}, {"weight", "1"}, {"samples", "1e4"}});
  const double ks = passed(o, v, "KS vs Beta(alpha_e, alpha_x - alpha_e)");
  o.require(ks < ks5(1e4), "KS vs Uniform(0,1) < " + num(ks5(1e4)));
  runtime(o, {v}, 30);
  return o;
}

Outcome c3() {
  Outcome o;
  const Verdict v = run("polya-equivalence", {{"max-length", "6"}});
  const double gap = passed(o, v, "max |urn - Dirichlet| path probability");
  o.require(gap <= 1e-12, "gap <= 1e-12");
  passed(o, v, "max |total path mass - 1|");
  runtime(o, {v}, 10);
  return o;
}

Outcome c4() {
  Outcome o;
  const Verdict v = run("transience-cylinder",
                        {{"n", "16"}, {"length", "64"}, {"weights", "2,1,1,1"}, {"samples", "1e4"}, {"halvings", "2"}});
  passed(o, v, "mean P(H_R < H_L) at L=64");
  passed(o, v, "nonincreasing from L=16 to 32");
  passed(o, v, "nonincreasing from L=32 to 64");
  runtime(o, {v}, 300);
  return o;
}

Outcome c5() {
  Outcome o;
  const double k = kappa(LatticeWeights(2, {1, 1, 1, 1}));
  o.require(k == 6.0, "kappa(1,1,1,1) = " + num(k));
  const Verdict t = run("kappa-table", {});
  passed(o, t, "kappa d=2 (1,1,1,1)");
  const Verdict v = run("trap-tails", {{"dim", "2"}, {"weights", "0.3,0.3,0.3,0.3"}, {"samples", "1e6"}, {"tolerance", "0.15"}});
  const double hill = passed(o, v, "Hill tail exponent of pair-trap Green function");
  o.require(std::abs(hill - 1.8) <= 0.15 * 1.8, "within 15% of 1.8");
  runtime(o, {t, v}, 60);
  return o;
}

Outcome c6() {
  Outcome o;
  const Verdict v = run("speed", {{"alpha", "3"}, {"beta", "1"}, {"steps", "1e6"}, {"replicas", "100"}});
  const Check* c = find(v, "mean X_n / n");
  const double m = c ? c->measured : std::nan("");
  o.require(m >= 0.31 && m <= 0.35, "mean X_n/n = " + num(m) + " in [0.31, 0.35]");
  runtime(o, {v}, 120);
  return o;
}

Outcome c7() {
  Outcome o;
  const Verdict v = run("clt", {{"alpha", "4"}, {"beta", "1"}, {"steps", "1e5"}, {"replicas", "1e4"}});
  const double sd = passed(o, v, "sd of (X_n - v n)/sqrt(n)");
  o.require(std::abs(sd - 1.5) <= 0.15, "within 10% of 1.5");
  runtime(o, {v}, 600);
  return o;
}

Outcome c8() {
  Outcome o;
  const Verdict v = run("exponent", {{"alpha", "1.5"}, {"beta", "1"}, {"min-steps", "1e4"}, {"steps", "1e6"}});
  const double slope = passed(o, v, "slope of median log X_n vs log n");
  o.require(std::abs(slope - 0.5) <= 0.15, "within 0.15 of 0.5");
  runtime(o, {v}, 600);
  return o;
}

Outcome c9() {
  Outcome o;
  const Verdict v = run("onedim-laws", {{"alpha", "3"}, {"beta", "1"}, {"samples", "1e5"}, {"tail-alpha", "1.5"},
                                        {"tail-beta", "1"}, {"tail-samples", "1e7"}, {"tail-t", "1e3"}});
  const double ks = passed(o, v, "KS 1/R vs Beta(alpha-beta, beta)");
  o.require(ks < ks5(1e5), "KS < " + num(ks5(1e5)));
  const double tail = passed(o, v, "P(R > t) t^kappa1");
  o.require(std::abs(tail - 1.0) <= 0.25, "within 25% of C_K = 1");
  runtime(o, {v}, 300);
  return o;
}

Outcome c10() {
  Outcome o;
  const Verdict v = run("ldp-rate", {{"alpha", "3"}, {"beta", "1"}, {"lambda", "0.5"}, {"samples", "1e5"}, {"t-grid", "1:20:100"}});
  const double ks = passed(o, v, "KS phi/lambda vs h1 CDF");
  o.require(ks < ks5(1e5), "KS < " + num(ks5(1e5)));
  passed(o, v, "KS fixed-point iterate vs h1 CDF");
  const double i = passed(o, v, "I(1/v)");
  o.require(i <= 1e-3, "I(1/v) <= 1e-3");
  passed(o, v, "min second difference of I");
  runtime(o, {v}, 300);
  return o;
}

Outcome c11() {
  Outcome o;
  const Verdict f = run("flows-resistance", {{"d2-sizes", "8,16,32,64,128"}, {"d3-sizes", "4,8,12"}});
  const double gap = passed(o, f, "max |Thomson norm - effective resistance|");
  o.require(gap <= 1e-8, "gap <= 1e-8");
  const double growth = passed(o, f, "relative increase of R_N in d=3 over the last step");
  o.require(growth < 0.05, "N=8 -> 12 increase < 5%");
  const double r2 = passed(o, f, "R^2 of R_N = a ln N + b in d=2");
  o.require(r2 > 0.99, "R^2 > 0.99");
  const Verdict m = run("min-cut", {});
  const double cut = passed(o, m, "lattice min-cut d=2");
  o.require(cut == 4.0, "min-cut = 4");
  runtime(o, {f, m}, 300);
  return o;
}

Outcome c12() {
  Outcome o;
  const Verdict v = run("accelerated", {{"dim", "2"}, {"weights", "1,1,1,1"}, {"radius", "1"}});
  const double g0 = passed(o, v, "max |gamma - 1| at r=0");
  o.require(g0 == 0.0, "gamma = 1 exactly at r=0");
  passed(o, v, "mean holding time at the origin");
  // hand evaluation: min over i0 of (a_i0 + a_i0+d) + (r + 1) * (remaining pair sums)
  const LatticeWeights ones(2, {1, 1, 1, 1});
  o.require(kappa_lambda_box(ones, 0) == 4.0, "kappa_box d=2 ones r=0 = 4");
  o.require(kappa_lambda_box(ones, 1) == 6.0, "kappa_box d=2 ones r=1 = 6");
  o.require(kappa_lambda_box(LatticeWeights(3, {1, 2, 1, 1, 1, 1}), 2) == 15.0, "kappa_box d=3 (1,2,1,1,1,1) r=2 = 15");
  runtime(o, {v}, 120);
  return o;
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"time-reversal law on the 4x4 torus", c1},
      {"return-edge Beta law on the triangle", c2},
      {"reinforced walk and Dirichlet environment path probabilities", c3},
      {"directional bound on the cylinder", c4},
      {"kappa and pair-trap tails", c5},
      {"ballistic speed (3,1)", c6},
      {"Gaussian regime constant (4,1)", c7},
      {"sub-ballistic displacement exponent (1.5,1)", c8},
      {"1/R law and Kesten tail constant", c9},
      {"hitting-time large deviations", c10},
      {"flows, resistances and min-cut", c11},
      {"accelerated process and box constants", c12},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::size_t only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-12)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    if (only != 0 && only != i + 1) continue;
    Outcome o;
    try {
      o = criteria()[i].run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::printf("C%zu [PRIMARY] %s: %s (%s)\n", i + 1, criteria()[i].title, o.pass ? "PASS" : "FAIL",
                o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
