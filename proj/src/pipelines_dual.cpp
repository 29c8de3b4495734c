#include <algorithm>
#include <cmath>

#include "gmclab/analysis.hpp"
#include "gmclab/parallel.hpp"
#include "pipeline.hpp"

namespace gmclab::detail {

namespace {

std::string fmt(double v) { return format_double(v); }

struct DualTotals {
  std::vector<double> direct;
  std::vector<double> direct_half;  // same draw with the threshold halved
  std::vector<double> subordinated;
  std::vector<double> reference;    // independent M(A)
  Truncation truncation;
  double truncation_bound = 0.0;
};

bool wants(ConstructionChoice choice, Construction c) {
  return choice == ConstructionChoice::kBoth ||
         (choice == ConstructionChoice::kDirect) == (c == Construction::kDirect);
}

/// Totals over the unit domain, one field per replica and purpose.
DualTotals sample_totals(Run& run, bool direct, bool subordinated, bool reference) {
  const auto& c = run.cfg;
  FieldSynthesizer synth(c.kernel, unit_lattice(c), c.backend);
  const Box region = Box::unit(c.d);
  const double alpha = c.effective_alpha();
  const auto reps = static_cast<std::size_t>(c.replicas);
  DualTotals t;
  t.truncation = choose_truncation(c, region.volume(), alpha);
  const Truncation half{t.truncation.log_z_min - std::log(2.0)};
  t.truncation_bound = region.volume() * std::exp((1.0 - alpha) * t.truncation.log_z_min) / (1.0 - alpha);
  if (direct) {
    t.direct.resize(reps);
    t.direct_half.resize(reps);
  }
  if (subordinated) t.subordinated.resize(reps);
  if (reference) t.reference.resize(reps);
  const auto lvl = static_cast<std::uint64_t>(c.level);
  if (direct || subordinated) run.stream(c.level, StreamPurpose::kField);
  if (direct) run.stream(c.level, StreamPurpose::kAtoms);
  if (subordinated) run.stream(c.level, StreamPurpose::kSubordination);
  if (reference) run.stream(c.level, StreamPurpose::kReferenceField);

  parallel_for(reps, [&](std::size_t r) {
    if (direct || subordinated) {
      const auto field = synth.field(c.level, c.seed, r);
      if (direct) {
        RngStream rng(c.seed, {r, lvl, StreamPurpose::kAtoms});
        const auto atoms = sample_stable_atoms(region, alpha, half, rng);
        const auto m = build_atomic_direct(field, c.gamma2, alpha, atoms);
        double full = 0.0, all = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
          all += m.masses[i];
          if (atoms.log_sizes[i] >= t.truncation.log_z_min) full += m.masses[i];
        }
        t.direct[r] = full;
        t.direct_half[r] = all;
      }
      if (subordinated) {
        RngStream rng(c.seed, {r, lvl, StreamPurpose::kSubordination});
        // the control measure is M itself, so automatic thresholds follow its total
        const auto m = build_chaos(field, c.gamma2);
        t.subordinated[r] = build_subordinated(m, alpha, choose_truncation(c, m.total(), alpha), rng).total();
      }
    }
    if (reference) {
      t.reference[r] = build_chaos(synth.field(c.level, c.seed, r, StreamPurpose::kReferenceField), c.gamma2).total();
    }
  });
  return t;
}

std::vector<double> powered(const std::vector<double>& xs, double q) {
  std::vector<double> v;
  v.reserve(xs.size());
  for (double x : xs) v.push_back(std::pow(x, q));
  return v;
}

}  // namespace

// ---------------------------------------------------------------- laplace

void run_laplace(Run& run) {
  const auto& c = run.cfg;
  const double alpha = c.effective_alpha();
  const bool direct = wants(c.construction, Construction::kDirect);
  const bool sub = wants(c.construction, Construction::kSubordinated);
  const auto t = sample_totals(run, direct, sub, true);
  RngStream boot(c.seed, {0, 0, StreamPurpose::kBootstrap});
  run.stream(0, StreamPurpose::kBootstrap);
  run.note("z_min", fmt(t.truncation.z_min()));
  run.note("truncation_bound", fmt(t.truncation_bound));

  std::vector<SvgSeries> series;
  auto laplace = [&](const std::string& tag, const std::vector<double>& mbar) {
    const auto rows = verify_laplace(mbar, t.reference, alpha, c.u_grid, c.bootstrap, boot);
    CsvWriter csv({"u", "lhs", "rhs", "ci_lo", "ci_hi"});
    std::vector<double> us, lhs, rhs;
    for (const auto& r : rows) {
      csv.row({r.u, r.lhs, r.rhs, r.diff_ci.lo, r.diff_ci.hi});
      run.check("laplace " + tag + " u=" + fmt(r.u), r.overlap,
                "lhs " + fmt(r.lhs) + " [" + fmt(r.lhs_ci.lo) + ", " + fmt(r.lhs_ci.hi) + "], rhs " + fmt(r.rhs) +
                    " [" + fmt(r.rhs_ci.lo) + ", " + fmt(r.rhs_ci.hi) + "]");
      us.push_back(r.u);
      lhs.push_back(r.lhs);
      rhs.push_back(r.rhs);
    }
    run.dir.write("laplace_" + tag + ".csv", csv.text());
    series.push_back({tag + " lhs", us, lhs, true});
    if (series.size() == 1) series.push_back({"rhs", us, rhs, true});
  };

  CsvWriter moments({"construction", "beta", "empirical", "theory", "rel_err", "pass"});
  const double beta = c.beta > 0.0 ? c.beta : 0.5 * alpha;
  const double theory = moment_relation_constant(beta, alpha);
  const double den = stats::mean(powered(t.reference, beta / alpha));
  auto moment = [&](const std::string& tag, const std::vector<double>& mbar) {
    const double ratio = stats::mean(powered(mbar, beta)) / den;
    const double rel = std::abs(ratio / theory - 1.0);
    moments.row({tag, beta, ratio, theory, rel, rel <= 0.05});
    run.check("moment relation " + tag, rel <= 0.05,
              "ratio " + fmt(ratio) + " vs " + fmt(theory) + " (relative error " + fmt(rel) + ", tolerance 0.05)");
  };

  if (direct) {
    laplace("direct", t.direct);
    moment("direct", t.direct);
    // the halved threshold only adds atoms, so the change is bounded by u times the discarded mass
    std::vector<double> a, b;
    for (std::size_t i = 0; i < t.direct.size(); ++i) {
      a.push_back(std::exp(-t.direct[i]));
      b.push_back(std::exp(-t.direct_half[i]));
    }
    const double change = std::abs(stats::mean(a) - stats::mean(b));
    run.check("z_min robustness u=1", change < t.truncation_bound,
              "change " + fmt(change) + " vs truncation bound " + fmt(t.truncation_bound));
  }
  if (sub) {
    laplace("subordinated", t.subordinated);
    moment("subordinated", t.subordinated);
  }
  run.dir.write("moments.csv", moments.text());
  run.plot("laplace.svg", svg_plot("Laplace transforms", "u", "E exp(-u Mbar) and E exp(-c u^alpha M)", series));
}

// ---------------------------------------------------------------- tail

void run_tail(Run& run) {
  const auto& c = run.cfg;
  const double alpha = c.effective_alpha();
  const bool direct = wants(c.construction, Construction::kDirect);
  const bool sub = wants(c.construction, Construction::kSubordinated);
  const auto t = sample_totals(run, direct, sub, false);
  const std::size_t n = static_cast<std::size_t>(c.replicas);
  const std::size_t k = c.hill_k > 0 ? c.hill_k : std::max<std::size_t>(kHillMinimumK, n / 100);

  RngStream synth(c.seed, {0, 0, StreamPurpose::kSynthetic});
  run.stream(0, StreamPurpose::kSynthetic);
  std::vector<double> pareto(n), expo(n);
  for (auto& v : pareto) v = std::pow(synth.uniform(), -1.0 / alpha);
  for (auto& v : expo) v = -std::log(synth.uniform());

  CsvWriter table({"sample", "k", "estimate", "ci_lo", "ci_hi", "drift", "stable"});
  CsvWriter sweep({"sample", "k", "estimate"});
  std::vector<SvgSeries> series;
  auto hill = [&](const std::string& tag, const std::vector<double>& xs) {
    const auto h = hill_tail_index(xs, k);
    table.row({tag, h.k, h.estimate, h.ci_lo, h.ci_hi, h.drift, h.stable});
    std::vector<double> lk;
    for (std::size_t i = 0; i < h.sweep_k.size(); ++i) {
      sweep.row({tag, h.sweep_k[i], h.sweep_estimate[i]});
      lk.push_back(std::log(static_cast<double>(h.sweep_k[i])));
    }
    series.push_back({tag, lk, h.sweep_estimate, true});
    return h;
  };
  auto gate = [&](const std::string& tag, const HillResult& h) {
    run.check("tail index " + tag, h.stable && std::abs(h.estimate - alpha) <= 0.05,
              "estimate " + fmt(h.estimate) + " vs alpha " + fmt(alpha) + " (tolerance 0.05), drift " + fmt(h.drift));
  };
  if (direct) gate("direct", hill("direct", t.direct));
  if (sub) gate("subordinated", hill("subordinated", t.subordinated));
  gate("pareto control", hill("pareto", pareto));
  const auto he = hill("exponential", expo);
  run.check("exponential control flagged unstable", !he.stable, "drift " + fmt(he.drift));
  run.dir.write("tail.csv", table.text());
  run.dir.write("tail_sweep.csv", sweep.text());
  run.plot("tail.svg", svg_plot("Hill estimates over the k sweep", "log k", "tail index", series));
}

// ---------------------------------------------------------------- scaling

void run_scaling(Run& run) {
  const auto& c = run.cfg;
  const double alpha = c.effective_alpha();
  const auto reps = static_cast<std::size_t>(c.replicas);
  const Truncation base_trunc = choose_truncation(c, 1.0, alpha);

  // Mbar(lambda A) at level n / lambda on the box scaled by lambda: the jump
  // threshold scales like lambda^(d/alpha), so the law matches exactly
  auto totals = [&](double lambda) {
    const Lattice lat(c.d, c.grid, 0.0, lambda);
    FieldSynthesizer synth(c.kernel, lat, c.backend);
    const int level = static_cast<int>(std::llround(c.level / lambda));
    const Truncation trunc{base_trunc.log_z_min + (c.d / alpha) * std::log(lambda)};
    run.stream(level, StreamPurpose::kField);
    run.stream(level, StreamPurpose::kAtoms);
    std::vector<double> out(reps);
    parallel_for(reps, [&](std::size_t r) {
      const auto field = synth.field(level, c.seed, r);
      RngStream rng(c.seed, {r, static_cast<std::uint64_t>(level), StreamPurpose::kAtoms});
      const auto atoms = sample_stable_atoms(lat.domain(), alpha, trunc, rng);
      out[r] = build_atomic_direct(field, c.gamma2, alpha, atoms).total();
    });
    return out;
  };
  const auto base = totals(1.0);
  std::vector<std::vector<double>> scaled;
  for (double l : c.lambdas) scaled.push_back(l == 1.0 ? base : totals(l));

  RngStream boot(c.seed, {0, 0, StreamPurpose::kBootstrap});
  run.stream(0, StreamPurpose::kBootstrap);
  const auto res = verify_perfect_scaling(base, scaled, c.lambdas, c.gamma2, alpha, c.d, c.q_grid,
                                          c.bootstrap, boot);
  CsvWriter ratios({"lambda", "q", "ratio", "ci_lo", "ci_hi", "theory", "pass"});
  for (const auto& r : res.rows) {
    ratios.row({r.lambda, r.q, r.ratio, r.ci.lo, r.ci.hi, r.theory, r.pass});
    run.check("moment ratio lambda=" + fmt(r.lambda) + " q=" + fmt(r.q), r.pass,
              "ratio " + fmt(r.ratio) + " [" + fmt(r.ci.lo) + ", " + fmt(r.ci.hi) + "] vs " + fmt(r.theory));
  }
  run.dir.write("ratios.csv", ratios.text());

  CsvWriter slopes({"q", "slope", "stderr", "theory", "pass"});
  std::vector<double> ll;
  for (double l : c.lambdas) ll.push_back(std::log(l));
  for (std::size_t qi = 0; qi < c.q_grid.size(); ++qi) {
    std::vector<double> lr;
    bool all = true;
    for (std::size_t l = 0; l < c.lambdas.size(); ++l) {
      const auto& row = res.rows[l * c.q_grid.size() + qi];
      lr.push_back(std::log(row.ratio));
      all = all && row.pass;
    }
    const double se = ll.size() > 2 ? stats::ols(ll, lr).slope_stderr : 0.0;
    slopes.row({c.q_grid[qi], res.slopes[qi], se, xi_bar(c.gamma2, alpha, c.d, c.q_grid[qi]), all});
  }
  run.dir.write("scaling.csv", slopes.text());

  CsvWriter ks({"lambda", "ks", "critical", "pass"});
  for (std::size_t l = 0; l < c.lambdas.size(); ++l) {
    const bool ok = res.ks_statistic[l] <= res.ks_critical[l];
    ks.row({c.lambdas[l], res.ks_statistic[l], res.ks_critical[l], ok});
    run.check("law of Mbar(lambda A) lambda=" + fmt(c.lambdas[l]), ok,
              "KS " + fmt(res.ks_statistic[l]) + " vs 1% critical " + fmt(res.ks_critical[l]));
  }
  run.dir.write("scaling_ks.csv", ks.text());

  RngStream omega(c.seed, {0, 0, StreamPurpose::kOmega});
  run.stream(0, StreamPurpose::kOmega);
  CsvWriter mgf({"lambda", "q", "empirical", "theory", "stderr", "pass"});
  for (double l : c.lambdas) {
    if (l == 1.0) continue;
    for (double q : {1.0, c.q_grid.front() / alpha}) {
      const auto m = omega_mgf_self_test(c.gamma2, l, q, 100000, omega);
      mgf.row({l, q, m.empirical, m.theory, m.se, m.pass});
      run.check("Omega mgf lambda=" + fmt(l) + " q=" + fmt(q), m.pass,
                fmt(m.empirical) + " vs " + fmt(m.theory) + " (3 SE = " + fmt(3 * m.se) + ")");
    }
  }
  run.dir.write("omega_mgf.csv", mgf.text());

  std::vector<SvgSeries> series;
  for (std::size_t qi = 0; qi < c.q_grid.size(); ++qi) {
    std::vector<double> emp, th;
    for (std::size_t l = 0; l < c.lambdas.size(); ++l) {
      emp.push_back(std::log(res.rows[l * c.q_grid.size() + qi].ratio));
      th.push_back(std::log(res.rows[l * c.q_grid.size() + qi].theory));
    }
    series.push_back({"q=" + fmt(c.q_grid[qi]), ll, emp, false});
    series.push_back({"theory", ll, th, true});
  }
  run.plot("scaling.svg", svg_plot("moment ratios", "log lambda", "log ratio", series));
}

// ---------------------------------------------------------------- covering sums

namespace {

void write_covering(Run& run, const std::string& name, const std::vector<CoveringSumTable>& tables) {
  const auto& f = tables.front();
  CsvWriter csv({"s", "level", "sum"});
  for (std::size_t si = 0; si < f.s_grid.size(); ++si) {
    for (std::size_t li = 0; li < f.levels.size(); ++li) {
      double acc = 0.0;
      for (const auto& t : tables) acc += t.sums[li][si];
      csv.row({f.s_grid[si], f.levels[li], acc / static_cast<double>(tables.size())});
    }
  }
  run.dir.write(name, csv.text());
}

std::vector<CoveringSumTable> chaos_tables(Run& run, const SelfSimilarSet& set,
                                           std::vector<FieldGrid>* keep_fields) {
  const auto& c = run.cfg;
  FieldSynthesizer synth(c.kernel, unit_lattice(c), c.backend);
  const auto reps = static_cast<std::size_t>(c.replicas);
  std::vector<CoveringSumTable> tables(reps);
  if (keep_fields) keep_fields->resize(reps);
  run.stream(c.level, StreamPurpose::kField);
  parallel_for(reps, [&](std::size_t r) {
    auto field = synth.field(c.level, c.seed, r);
    tables[r] = covering_sums(build_chaos(field, c.gamma2), set, c.cover_levels, c.s_grid);
    if (keep_fields) (*keep_fields)[r] = std::move(field);
  });
  return tables;
}

}  // namespace

void run_kpz(Run& run) {
  const auto& c = run.cfg;
  const auto set = SelfSimilarSet::by_name(c.cover_set);
  const auto tables = chaos_tables(run, set, nullptr);
  write_covering(run, "covering_M.csv", tables);

  RngStream boot(c.seed, {0, 0, StreamPurpose::kBootstrap});
  run.stream(0, StreamPurpose::kBootstrap);
  const auto est = dimension_estimate(tables, c.bootstrap, boot);
  const double target = kpz_solve(set.dimension(), c.gamma2, c.d);
  const auto leb_table = covering_sums_lebesgue(set, c.cover_levels, c.s_grid);
  const auto leb = dimension_estimate(std::span(&leb_table, 1), 0, boot);

  CsvWriter csv({"measure", "s_star", "ci_lo", "ci_hi", "theory", "pass"});
  const bool ok = std::abs(est.s_star - target) <= 0.1;
  const bool leb_ok = std::abs(leb.s_star - set.dimension()) <= 0.01;
  csv.row({"M", est.s_star, est.ci_lo, est.ci_hi, target, ok});
  csv.row({"lebesgue", leb.s_star, leb.s_star, leb.s_star, set.dimension(), leb_ok});
  run.dir.write("dimension.csv", csv.text());
  run.check("M-dimension of " + set.name, ok, "estimate " + fmt(est.s_star) + " vs KPZ root " + fmt(target) + " (tolerance 0.1)");
  run.check("Lebesgue control", leb_ok, "estimate " + fmt(leb.s_star) + " vs " + fmt(set.dimension()) + " (tolerance 0.01)");
  run.plot("kpz.svg", svg_plot("level slope of log covering sums", "s", "slope",
                               {{"M", c.s_grid, est.slopes, true}, {"Lebesgue", c.s_grid, leb.slopes, true}}));
}

void run_duality(Run& run) {
  const auto& c = run.cfg;
  const double alpha = c.effective_alpha();
  const auto set = SelfSimilarSet::by_name(c.cover_set);
  std::vector<FieldGrid> fields;
  const auto m_tables = chaos_tables(run, set, &fields);
  write_covering(run, "covering_M.csv", m_tables);

  const int coarsest = *std::min_element(c.cover_levels.begin(), c.cover_levels.end());
  const auto cover = set.cover(coarsest);
  double cover_volume = 0.0;
  for (const auto& b : cover) cover_volume += b.volume();
  const Truncation trunc = choose_truncation(c, cover_volume, alpha);
  run.note("z_min", fmt(trunc.z_min()));
  const auto reps = static_cast<std::size_t>(c.replicas);
  std::vector<CoveringSumTable> b_tables(reps);
  run.stream(c.level, StreamPurpose::kAtoms);
  parallel_for(reps, [&](std::size_t r) {
    // atoms outside the coarsest cover never enter a covering box
    RngStream rng(c.seed, {r, static_cast<std::uint64_t>(c.level), StreamPurpose::kAtoms});
    const auto atoms = sample_stable_atoms(cover, alpha, trunc, rng);
    b_tables[r] = covering_sums(build_atomic_direct(fields[r], c.gamma2, alpha, atoms), set, c.cover_levels, c.s_grid);
  });
  write_covering(run, "covering_Mbar.csv", b_tables);

  RngStream boot(c.seed, {0, 0, StreamPurpose::kBootstrap});
  run.stream(0, StreamPurpose::kBootstrap);
  const auto dm = dimension_estimate(m_tables, c.bootstrap, boot);
  const auto db = dimension_estimate(b_tables, c.bootstrap, boot);
  const double dim = set.dimension();
  CsvWriter csv({"measure", "s_star", "ci_lo", "ci_hi", "theory", "pass"});
  const bool ok = std::abs(db.s_star - alpha * dm.s_star) <= 0.1;
  csv.row({"M", dm.s_star, dm.ci_lo, dm.ci_hi, kpz_solve(dim, c.gamma2, c.d), true});
  csv.row({"Mbar", db.s_star, db.ci_lo, db.ci_hi, kpz_solve_dual(dim, c.gamma2, c.d), ok});
  run.dir.write("duality.csv", csv.text());
  run.check("dual dimension = alpha * M-dimension", ok,
            "Mbar " + fmt(db.s_star) + " vs alpha * " + fmt(dm.s_star) + " = " + fmt(alpha * dm.s_star) + " (tolerance 0.1)");

  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = i / 99.0;
    worst = std::max(worst, std::abs(kpz_solve_dual(x, c.gamma2, c.d) - alpha * kpz_solve(x, c.gamma2, c.d)));
  }
  run.check("kpz_solve_dual = alpha * kpz_solve", worst <= 1e-12, "max deviation " + fmt(worst) + " on 100 points");
  run.plot("duality.svg", svg_plot("level slope of log covering sums", "s", "slope",
                                   {{"M", c.s_grid, dm.slopes, true}, {"Mbar", c.s_grid, db.slopes, true}}));
}

}  // namespace gmclab::detail
