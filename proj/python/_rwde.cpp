#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rwde/errors.hpp"
#include "rwde/experiments.hpp"
#include "rwde/flows.hpp"
#include "rwde/graph_env.hpp"
#include "rwde/onedim.hpp"
#include "rwde/sampling.hpp"
#include "rwde/walk.hpp"

namespace py = pybind11;
using namespace rwde;

namespace {

py::dict verdict_dict(const Verdict& v) {
  py::list checks;
  for (const auto& c : v.checks) {
    py::dict d;
    d["name"] = c.name;
    d["measured"] = c.measured;
    d["expected"] = c.expected;
    d["tolerance"] = c.tolerance;
    d["provenance"] = provenance_tag(c.provenance);
    d["pass"] = c.pass;
    checks.append(d);
  }
  py::dict out;
  out["experiment"] = v.experiment;
  out["seed"] = v.seed;
  out["parameters"] = v.parameters;
  out["checks"] = checks;
  out["metrics"] = v.metrics;
  out["artifacts"] = v.artifacts;
  out["pass"] = v.pass();
  out["wall_seconds"] = v.wall_seconds;
  return out;
}

LatticeWeights lattice(std::size_t d, std::vector<double> alpha) { return LatticeWeights(d, std::move(alpha)); }

}  // namespace

PYBIND11_MODULE(_rwde, m) {
  m.doc() = "Random walks in Dirichlet environment";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_RuntimeError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  m.def("experiments", [] {
    std::vector<std::string> names;
    for (const auto& info : experiment_registry()) names.push_back(info.name);
    return names;
  });
  m.def(
      "run_experiment",
      [](const std::string& name, std::map<std::string, std::string> params, std::uint64_t seed, std::size_t threads,
         const std::string& out) {
        ExperimentConfig cfg;
        cfg.experiment = name;
        cfg.parameters = std::move(params);
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.out_dir = out;
        Verdict v;
        {
          py::gil_scoped_release release;
          v = run_experiment(cfg);
        }
        return verdict_dict(v);
      },
      py::arg("name"), py::arg("params") = std::map<std::string, std::string>{}, py::arg("seed") = 1,
      py::arg("threads") = 1, py::arg("out") = "");

  m.def("kappa", [](std::size_t d, std::vector<double> a) { return kappa(lattice(d, std::move(a))); }, py::arg("dim"),
        py::arg("weights"));
  m.def("kappa_lambda_box",
        [](std::size_t d, std::vector<double> a, std::size_t r) { return kappa_lambda_box(lattice(d, std::move(a)), r); },
        py::arg("dim"), py::arg("weights"), py::arg("radius"));
  m.def("d_alpha", [](std::size_t d, std::vector<double> a) { return d_alpha(lattice(d, std::move(a))); },
        py::arg("dim"), py::arg("weights"));

  m.def(
      "sample_dirichlet",
      [](std::vector<double> w, std::uint64_t seed, std::size_t n) {
        RngHandle rng(seed);
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < n; ++i) {
          const auto p = sample_dirichlet(w, rng);
          out.emplace_back(p.coordinates().begin(), p.coordinates().end());
        }
        return out;
      },
      py::arg("weights"), py::arg("seed") = 1, py::arg("n") = 1);
  m.def(
      "dirichlet_joint_moment",
      [](std::vector<double> w, std::vector<double> k) {
        const auto r = dirichlet_joint_moment(w, k);
        return r.infinite ? std::numeric_limits<double>::infinity() : r.value;
      },
      py::arg("weights"), py::arg("exponents"));

  m.def(
      "return_probabilities",
      [](std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges, std::vector<double> weights,
         std::size_t x, std::uint64_t seed, std::size_t samples) {
        std::vector<Edge> es;
        for (auto [a, b] : edges) es.push_back({a, b});
        const WeightedDigraph g(n, std::move(es), std::move(weights));
        RngHandle rng(seed);
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < samples; ++i) out.push_back(return_edge_distribution(sample_environment(g, rng), x));
        return out;
      },
      py::arg("vertices"), py::arg("edges"), py::arg("weights"), py::arg("x"), py::arg("seed") = 1,
      py::arg("samples") = 1);

  m.def(
      "lattice_ball_resistance",
      [](std::size_t d, std::size_t n) {
        const Network net = lattice_ball_network(d, n);
        const std::size_t out[] = {net.vertices - 1};
        return effective_resistance(net, 0, out);
      },
      py::arg("dim"), py::arg("radius"));

  m.def("solomon_speed", [](double a, double b) { return solomon_speed(BetaEnvParams(a, b)); }, py::arg("alpha"),
        py::arg("beta"));
  m.def("kesten_constant", [](double a, double b) { return kesten_constant(BetaEnvParams(a, b)); }, py::arg("alpha"),
        py::arg("beta"));
  m.def(
      "regime",
      [](double a, double b) {
        const auto rc = regime_constants(BetaEnvParams(a, b));
        py::dict d;
        d["kappa1"] = rc.kappa1;
        d["regime"] = regime_name(rc.regime);
        d["speed"] = rc.speed;
        d["exponent"] = rc.exponent;
        d["scale"] = rc.scale ? py::cast(*rc.scale) : py::none();
        return d;
      },
      py::arg("alpha"), py::arg("beta"));
  m.def(
      "sample_R",
      [](double a, double b, std::uint64_t seed, std::size_t n) {
        RngHandle rng(seed);
        std::vector<double> out(n);
        for (auto& x : out) x = sample_R(BetaEnvParams(a, b), rng);
        return out;
      },
      py::arg("alpha"), py::arg("beta"), py::arg("seed") = 1, py::arg("n") = 1);
  m.def("hyp2f1", &hyp2f1, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"));
  m.def("h1_cdf", [](double a, double b, double z, double u) { return h1_cdf(BetaEnvParams(a, b), z, u); },
        py::arg("alpha"), py::arg("beta"), py::arg("z"), py::arg("u"));
  m.def("log_mgf", [](double a, double b, double lambda) { return log_mgf(BetaEnvParams(a, b), lambda); },
        py::arg("alpha"), py::arg("beta"), py::arg("lam"));
  m.def(
      "rate_function",
      [](double a, double b, double t) {
        const auto r = rate_function(BetaEnvParams(a, b), t);
        return py::make_tuple(r.rate, r.lambda_star);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("t"));
}
