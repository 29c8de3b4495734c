// Acceptance runner: one PASS/FAIL line per criterion, exit 1 on any failure.
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "gmclab/analysis.hpp"
#include "gmclab/experiments.hpp"

using namespace gmclab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void add(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back((ok ? "ok " : "FAILED ") + what);
  }
};

fs::path g_root = "acceptance_out";

RunResult run(ExperimentConfig cfg, const std::string& name) {
  cfg.out = (g_root / name).string();
  cfg.plot = false;
  return run_experiment(cfg);
}

void absorb(Outcome& o, const RunResult& r, const std::function<bool(const std::string&)>& keep = {}) {
  for (const auto& c : r.checks) {
    if (!keep || keep(c.name)) o.add(c.pass, c.name + ": " + c.detail);
  }
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

Outcome expectation_identity() {
  auto c = default_config(Subcommand::kChaos);
  c.gamma2 = 0.5;
  c.level = 6;
  c.grid = 1024;
  c.replicas = 10000;
  c.lambdas = {1.0};
  Outcome o;
  absorb(o, run(c, "c1_chaos"), [](const std::string& n) { return n == "expectation identity"; });
  return o;
}

Outcome spectrum() {
  auto c = default_config(Subcommand::kSpectrum);
  c.gamma2 = 0.5;
  c.level = 6;
  c.grid = 1024;
  c.replicas = 10000;
  c.q_grid = {0.5, 1.0, 1.5};
  c.lambdas = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
  Outcome o;
  absorb(o, run(c, "c2_spectrum"));
  return o;
}

RunResult laplace_run() {
  auto c = default_config(Subcommand::kLaplace);
  c.d = 1;
  c.gamma2 = 1.0;
  c.replicas = 100000;
  c.u_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  c.construction = ConstructionChoice::kBoth;
  c.beta = 0.25;
  return run(c, "c34_laplace");
}

Outcome tail() {
  auto c = default_config(Subcommand::kTail);
  c.gamma2 = 1.0;
  c.replicas = 100000;
  Outcome o;
  absorb(o, run(c, "c5_tail"));
  return o;
}

Outcome scaling() {
  auto c = default_config(Subcommand::kScaling);
  c.kernel = KernelSpec::exact1d();
  c.gamma2 = 1.0;
  c.q_grid = {0.25};
  c.lambdas = {0.5, 0.25, 0.125};
  Outcome o;
  absorb(o, run(c, "c6_scaling"));
  return o;
}

Outcome kpz() {
  auto c = default_config(Subcommand::kKpz);
  c.gamma2 = 0.5;
  c.cover_set = "cantor";
  const auto r = run(c, "c7_kpz");
  Outcome o;
  absorb(o, r);
  const double root = kpz_solve(std::log(2.0) / std::log(3.0), 0.5, 1);
  o.add(std::abs(root - 0.569642264834269054) <= 1e-12, "KPZ root matches the quadratic oracle 0.569642264834269054");
  return o;
}

Outcome duality() {
  auto c = default_config(Subcommand::kDuality);
  c.gamma2 = 1.0;
  c.alpha_mode = AlphaMode::kDuality;
  c.cover_set = "cantor";
  Outcome o;
  absorb(o, run(c, "c8_duality"));
  return o;
}

double min_eigen_ratio(const Lattice& lat, const std::function<double(const Point&, const Point&)>& cov) {
  const auto s = static_cast<Eigen::Index>(lat.site_count());
  Eigen::MatrixXd g(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) g(i, j) = cov(lat.site(i), lat.site(j));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
}

Outcome structural() {
  Outcome o;

  bool positive = true;
  for (auto spec : {KernelSpec::exact1d(), KernelSpec::exact2d(), KernelSpec::star(1), KernelSpec::star(2)}) {
    for (int n = 1; n <= 8; ++n) {
      for (int i = 0; i <= 200; ++i) positive = positive && level_increment_radial(spec, n, i / 100.0) >= 0.0;
    }
  }
  for (int n = 1; n <= 5; ++n) {
    for (double x : {0.05, 0.3, 0.5, 0.9}) {
      positive = positive && gff_square_level(KernelSpec::gff_square(), n, {0.5, 0.5}, {x, 0.4}) >= 0.0;
    }
  }
  o.add(positive, "level increments q_n are nonnegative");

  double worst = 1.0;
  const Lattice l1(1, 64), l2(2, 10);
  for (auto spec : {KernelSpec::exact1d(), KernelSpec::star(1)}) {
    for (int n : {1, 3, 6}) {
      worst = std::min(worst, min_eigen_ratio(l1, [&](const Point& a, const Point& b) {
        return eval_level_increment(spec, n, a, b);
      }));
    }
  }
  for (auto spec : {KernelSpec::exact2d(), KernelSpec::gff_square()}) {
    for (int n : {1, 2, 4}) {
      worst = std::min(worst, min_eigen_ratio(l2, [&](const Point& a, const Point& b) {
        return eval_level_increment(spec, n, a, b);
      }));
    }
  }
  o.add(worst > -1e-10, "Gram eigenvalue floor: min/max ratio " + format_double(worst) + " > -1e-10");

  auto f1 = default_config(Subcommand::kField);
  f1.pairs = 20;
  absorb(o, run(f1, "c9_field_exact1d"));
  auto f2 = default_config(Subcommand::kField);
  f2.d = 2;
  f2.kernel = KernelSpec::gff_square();
  f2.grid = 32;
  f2.level = 4;
  f2.backend = SamplerBackend::kDense;
  f2.pairs = 20;
  absorb(o, run(f2, "c9_field_gff"));

  double frac = 0.0;
  for (double beta : {0.1, 0.25, 0.5, 0.9}) {
    for (double x : {0.01, 0.5, 1.0, 7.0, 300.0}) frac = std::max(frac, fractional_moment_identity_check(x, beta));
  }
  o.add(frac < 1e-8, "fractional-moment identity residual " + format_double(frac) + " < 1e-8");

  const std::vector<double> lambdas{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  RngStream rng(1, {0, 0, StreamPurpose::kBootstrap});
  double reg = 0.0;
  for (double q : {0.5, 1.0, 1.5}) {
    BoxMassSamples s;
    s.lambdas = lambdas;
    for (double l : lambdas) {
      const double m = std::pow(1.7 * std::pow(l, xi(0.5, 1, q)), 1.0 / q);
      s.masses.push_back(std::vector<std::vector<double>>(3, std::vector<double>(4, m)));
    }
    const std::vector<double> qs{q};
    reg = std::max(reg, std::abs(estimate_spectrum(s, qs, 0, rng).slopes[0] - xi(0.5, 1, q)));
  }
  o.add(reg <= 1e-9, "regression self-test error " + format_double(reg) + " <= 1e-9");

  auto c = default_config(Subcommand::kChaos);
  c.replicas = 200;
  const auto a = run(c, "c9_rerun_a");
  const auto b = run(c, "c9_rerun_b");
  setenv("GMCLAB_WORKERS", "3", 1);
  const auto w = run(c, "c9_rerun_workers3");
  unsetenv("GMCLAB_WORKERS");
  bool same = a.files.size() == b.files.size() && a.files.size() == w.files.size();
  for (std::size_t i = 0; same && i < a.files.size(); ++i) {
    if (a.files[i].name == "manifest.json") continue;
    same = a.files[i].sha256 == b.files[i].sha256 && a.files[i].sha256 == w.files[i].sha256;
  }
  o.add(same, "byte-identical reruns, including GMCLAB_WORKERS=3");
  return o;
}

Outcome atoms() {
  auto c = default_config(Subcommand::kAtoms);
  c.d = 2;
  c.gamma2 = 1.0;
  c.gamma2_sweep = {0.01, 1.0, 3.6};
  Outcome o;
  const auto r = run(c, "c10_atoms");
  absorb(o, r);
  o.add(std::abs(c.effective_alpha() - 0.25) < 1e-15, "alpha = 0.25");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_root = argv[1];
  fs::create_directories(g_root);

  struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> body;
  };
  RunResult laplace;
  bool laplace_done = false;
  auto laplace_once = [&]() -> const RunResult& {
    if (!laplace_done) {
      laplace = laplace_run();
      laplace_done = true;
    }
    return laplace;
  };
  const std::vector<Criterion> criteria{
      {1, "expectation identity", expectation_identity},
      {2, "spectrum of M", spectrum},
      {3, "Laplace duality",
       [&] {
         Outcome o;
         absorb(o, laplace_once(), [](const std::string& n) { return starts_with(n, "laplace "); });
         return o;
       }},
      {4, "moment relation",
       [&] {
         Outcome o;
         absorb(o, laplace_once(), [](const std::string& n) { return starts_with(n, "moment relation"); });
         o.add(std::abs(moment_relation_constant(0.25, 0.5) - 2.723288216330671026) <= 1e-12,
               "moment constant matches the special-function oracle 2.723288216330671026");
         return o;
       }},
      {5, "moment threshold (tail index)", tail},
      {6, "perfect scaling", scaling},
      {7, "KPZ on the triadic Cantor set", kpz},
      {8, "duality of dimensions", duality},
      {9, "structural self-tests", structural},
      {10, "atom tables", atoms},
  };

  bool all = true;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.add(false, std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.title << std::endl;
  }
  return all ? 0 : 1;
}
