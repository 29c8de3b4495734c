#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmclab/analysis.hpp"
#include "gmclab/parallel.hpp"
#include "pipeline.hpp"

namespace gmclab::detail {

namespace {

std::string fmt(double v) { return format_double(v); }

}  // namespace

// ---------------------------------------------------------------- field

void run_field(Run& run) {
  const auto& c = run.cfg;
  FieldSynthesizer synth(c.kernel, unit_lattice(c), c.backend);
  const Lattice& lat = synth.lattice();
  const std::size_t sites = lat.site_count();

  RngStream pick(c.seed, {0, 0, StreamPurpose::kSitePairs});
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (int p = 0; p < c.pairs; ++p) {
    const auto i = static_cast<std::size_t>(pick.engine()() % sites);
    const auto j = p == 0 ? i : static_cast<std::size_t>(pick.engine()() % sites);
    pairs.emplace_back(i, j);
  }

  const auto reps = static_cast<std::size_t>(c.replicas);
  std::vector<std::vector<double>> products(pairs.size(), std::vector<double>(reps));
  std::vector<std::vector<double>> dumped(c.dump_ensemble ? reps : 0);
  run.stream(c.level, StreamPurpose::kField);
  parallel_for(reps, [&](std::size_t r) {
    auto f = synth.field(c.level, c.seed, r);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      products[p][r] = f.values[pairs[p].first] * f.values[pairs[p].second];
    }
    if (c.dump_ensemble) dumped[r] = std::move(f.values);
  });

  CsvWriter csv({"site_i", "site_j", "distance", "empirical", "stderr", "theory", "pass"});
  int within = 0;
  std::vector<double> xs, ys;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    const double emp = stats::mean(products[p]);
    const double se = stats::standard_error(products[p]);
    const double th = eval_partial_kernel(c.kernel, c.level, lat.site(i), lat.site(j));
    const bool ok = std::abs(emp - th) <= 3.0 * se;
    within += ok;
    csv.row({i, j, distance(lat.site(i), lat.site(j), lat.d), emp, se, th, ok});
    xs.push_back(th);
    ys.push_back(emp);
  }
  run.dir.write("covariance.csv", csv.text());
  const int allowed = static_cast<int>(pairs.size()) / 20;
  run.check("covariance fidelity", within >= static_cast<int>(pairs.size()) - allowed,
            std::to_string(within) + "/" + std::to_string(pairs.size()) + " pairs within 3 SE");

  if (c.dump_ensemble) {
    EnsembleHeader h;
    h.d = static_cast<std::uint32_t>(lat.d);
    h.n = static_cast<std::uint32_t>(lat.n);
    h.level = static_cast<std::uint32_t>(c.level);
    h.family = static_cast<std::uint32_t>(c.kernel.family);
    h.seed = c.seed;
    h.replicas = reps;
    write_ensemble(run.dir.path_of("field.gmcf").string(), h, dumped);
    run.dir.record("field.gmcf");
  }
  run.plot("covariance.svg", svg_plot("covariance at sampled site pairs", "kernel value",
                                      "empirical covariance",
                                      {{"pairs", xs, ys, false}, {"identity", xs, xs, true}}));
}

// ---------------------------------------------------------------- chaos

void run_chaos(Run& run) {
  const auto& c = run.cfg;
  FieldSynthesizer synth(c.kernel, unit_lattice(c), c.backend);
  const auto reps = static_cast<std::size_t>(c.replicas);
  std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{1.0} : c.lambdas;
  std::vector<std::vector<Box>> boxes;
  for (double l : lambdas) boxes.push_back(tiling_boxes(c.d, l));

  std::vector<double> totals(reps), peak(reps);
  std::vector<std::vector<std::vector<double>>> masses(reps);
  std::vector<std::string> warnings;
  run.stream(c.level, StreamPurpose::kField);
  parallel_for(reps, [&](std::size_t r) {
    const auto m = build_chaos(synth.field(c.level, c.seed, r), c.gamma2);
    totals[r] = m.total();
    peak[r] = *std::max_element(m.masses.begin(), m.masses.end()) / totals[r];
    masses[r].resize(lambdas.size());
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      for (const auto& b : boxes[l]) masses[r][l].push_back(measure_box(m, b));
    }
    if (r == 0) warnings = m.meta.warnings;
  });

  CsvWriter csv({"replica", "box_id", "lambda", "mass"});
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      for (std::size_t b = 0; b < masses[r][l].size(); ++b) csv.row({r, b, lambdas[l], masses[r][l][b]});
    }
  }
  run.dir.write("masses.csv", csv.text());

  const double mean = stats::mean(totals);
  const double se = stats::standard_error(totals);
  run.check("expectation identity", std::abs(mean - 1.0) <= 3.0 * se,
            "mean total " + fmt(mean) + ", SE " + fmt(se));
  run.note("max_cell_fraction_mean", fmt(stats::mean(peak)));
  for (const auto& w : warnings) run.note("warning", w);

  std::vector<double> idx(reps);
  std::iota(idx.begin(), idx.end(), 0.0);
  run.plot("totals.svg", svg_plot("total mass per replica", "replica", "M_n(domain)", {{"total", idx, totals, false}}));
}

// ---------------------------------------------------------------- atoms

void run_atoms(Run& run) {
  const auto& c = run.cfg;
  FieldSynthesizer synth(c.kernel, unit_lattice(c), c.backend);
  const Box region = Box::unit(c.d);
  std::vector<double> sweep = c.gamma2_sweep.empty() ? std::vector<double>{c.gamma2} : c.gamma2_sweep;
  std::sort(sweep.begin(), sweep.end());
  const auto reps = static_cast<std::size_t>(c.replicas);
  run.stream(c.level, StreamPurpose::kField);
  run.stream(c.level, StreamPurpose::kAtoms);

  // one field per replica shared by the whole sweep
  std::vector<FieldGrid> fields;
  for (std::size_t r = 0; r < reps; ++r) fields.push_back(synth.field(c.level, c.seed, r));

  CsvWriter stats_csv({"gamma2", "alpha", "atoms", "log10_span", "top1pct_share", "spearman"});
  std::vector<double> corr;
  std::vector<SvgSeries> series;
  for (std::size_t g = 0; g < sweep.size(); ++g) {
    const double gamma2 = sweep[g];
    const double alpha = c.alpha_mode == AlphaMode::kDuality ? gamma2 / (2.0 * c.d) : c.alpha;
    const auto trunc = choose_truncation(c, region.volume(), alpha);
    std::vector<std::string> cols{"replica", "x"};
    if (c.d == 2) cols.push_back("y");
    CsvWriter csv([&] { auto v = cols; v.insert(v.end(), {"z", "mass"}); return v; }());
    CsvWriter log_csv([&] { auto v = cols; v.insert(v.end(), {"log_z", "log_mass"}); return v; }());
    std::vector<double> log_mass, field_at, xs, ls;
    std::vector<double> shares;
    for (std::size_t r = 0; r < reps; ++r) {
      RngStream rng(c.seed, {r, static_cast<std::uint64_t>(c.level), StreamPurpose::kAtoms});
      const auto atoms = sample_stable_atoms(region, alpha, trunc, rng);
      const auto m = build_atomic_direct(fields[r], gamma2, alpha, atoms);
      for (std::size_t i = 0; i < m.size(); ++i) {
        std::vector<CsvCell> row{r, m.positions[i][0]};
        if (c.d == 2) row.emplace_back(m.positions[i][1]);
        auto log_row = row;
        row.emplace_back(atoms.size_of(i));
        row.emplace_back(m.masses[i]);
        log_row.emplace_back(atoms.log_sizes[i]);
        log_row.emplace_back(m.log_masses[i]);
        csv.row(row);
        log_csv.row(log_row);
        log_mass.push_back(m.log_masses[i]);
        field_at.push_back(fields[r].values[fields[r].lattice.cell_of(m.positions[i])]);
        if (r == 0) {
          xs.push_back(m.positions[i][0]);
          ls.push_back(m.log_masses[i] / std::log(10.0));
        }
      }
      // share of the largest 1% of atoms in the total mass, in log space
      std::vector<double> lm = m.log_masses;
      std::sort(lm.begin(), lm.end(), std::greater<>());
      if (!lm.empty()) {
        const std::size_t top = std::max<std::size_t>(1, lm.size() / 100);
        double all = 0.0, head = 0.0;
        for (std::size_t i = 0; i < lm.size(); ++i) {
          const double w = std::exp(lm[i] - lm[0]);
          all += w;
          if (i < top) head += w;
        }
        shares.push_back(head / all);
      }
    }
    const std::string tag = std::to_string(g);
    run.dir.write("atoms_" + tag + ".csv", csv.text());
    run.dir.write("atoms_log_" + tag + ".csv", log_csv.text());
    if (log_mass.size() < 2) {
      run.check("atoms present at gamma2=" + fmt(gamma2), false, "fewer than 2 atoms");
      corr.push_back(NAN);
      continue;
    }
    const auto [lo, hi] = std::minmax_element(log_mass.begin(), log_mass.end());
    const double span = (*hi - *lo) / std::log(10.0);
    const double share = stats::mean(shares);
    const double rho = stats::spearman(log_mass, field_at);
    corr.push_back(rho);
    stats_csv.row({gamma2, alpha, log_mass.size(), span, share, rho});
    run.check("mass span >= 4 decades at gamma2=" + fmt(gamma2), span >= 4.0, "log10 span " + fmt(span));
    run.check("dominant atoms at gamma2=" + fmt(gamma2), share >= 0.5,
              "top 1% of atoms carry " + fmt(share) + " of the mass");
    series.push_back({"gamma2=" + fmt(gamma2), xs, ls, false});
  }
  run.dir.write("atoms_summary.csv", stats_csv.text());
  if (sweep.size() > 1) {
    bool monotone = true;
    std::string detail;
    for (std::size_t g = 0; g < corr.size(); ++g) {
      detail += (g ? ", " : "") + fmt(corr[g]);
      if (g > 0 && !(corr[g] > corr[g - 1])) monotone = false;
    }
    run.check("location/intensity correlation increases with gamma2", monotone, "spearman " + detail);
  }
  run.plot("atoms.svg", svg_plot("atom masses (replica 0)", "x", "log10 mass", series));
}

// ---------------------------------------------------------------- spectrum

void run_spectrum(Run& run) {
  const auto& c = run.cfg;
  const Lattice lat = unit_lattice(c);
  FieldSynthesizer synth(c.kernel, lat, c.backend);
  const double top = *std::max_element(c.lambdas.begin(), c.lambdas.end());
  const auto reps = static_cast<std::size_t>(c.replicas);
  const bool matched = c.kernel.family == KernelFamily::kExactScale1D || c.kernel.family == KernelFamily::kExactScale2D;

  BoxMassSamples samples;
  samples.lambdas = c.lambdas;
  samples.masses.assign(c.lambdas.size(), std::vector<std::vector<double>>(reps));
  for (std::size_t l = 0; l < c.lambdas.size(); ++l) {
    // cutoff-matched level: the cutoff shrinks with the box
    const int level = matched ? static_cast<int>(std::llround(c.level * top / c.lambdas[l])) : c.level;
    run.stream(level, StreamPurpose::kField);
    const auto boxes = tiling_boxes(c.d, c.lambdas[l]);
    parallel_for(reps, [&](std::size_t r) {
      const auto m = build_chaos(synth.field(level, c.seed, r), c.gamma2);
      auto& out = samples.masses[l][r];
      for (const auto& b : boxes) out.push_back(measure_box(m, b));
    });
  }

  CsvWriter masses({"replica", "box_id", "lambda", "mass"});
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t l = 0; l < c.lambdas.size(); ++l) {
      for (std::size_t b = 0; b < samples.masses[l][r].size(); ++b) {
        masses.row({r, b, c.lambdas[l], samples.masses[l][r][b]});
      }
    }
  }
  run.dir.write("masses.csv", masses.text());

  RngStream boot(c.seed, {0, 0, StreamPurpose::kBootstrap});
  run.stream(0, StreamPurpose::kBootstrap);
  const auto fit = estimate_spectrum(samples, c.q_grid, c.bootstrap, boot);
  CsvWriter csv({"q", "slope", "stderr", "theory", "pass"});
  std::vector<SvgSeries> series;
  std::vector<double> ll;
  for (double l : c.lambdas) ll.push_back(std::log(l));
  for (std::size_t i = 0; i < fit.q_grid.size(); ++i) {
    const double q = fit.q_grid[i];
    const double th = xi(c.gamma2, c.d, q);
    const bool ok = std::abs(fit.slopes[i] - th) <= 0.1;
    csv.row({q, fit.slopes[i], fit.stderr_[i], th, ok});
    run.check("spectrum slope q=" + fmt(q), ok,
              "slope " + fmt(fit.slopes[i]) + " vs xi " + fmt(th) + " (tolerance 0.1)");
    run.note("curvature q=" + fmt(q), fmt(fit.curvature[i]));
    if (q >= chaos_moment_bound(c.gamma2, c.d) / 2.0) run.note("heavy tail q=" + fmt(q), "moment order near 2d/gamma2");
    series.push_back({"q=" + fmt(q), ll, fit.log_moments[i], true});
  }
  run.dir.write("spectrum.csv", csv.text());
  run.plot("spectrum.svg", svg_plot("log E[M(B)^q] against log lambda", "log lambda", "log moment", series));
}

// ---------------------------------------------------------------- lq

namespace {

void write_lq(Run& run, const std::string& name, const std::vector<LqResult>& res, bool gate_examples) {
  const auto& q = res.front().fit.q_grid;
  CsvWriter csv({"q", "slope", "stderr", "theory", "pass"});
  for (std::size_t i = 0; i < q.size(); ++i) {
    std::vector<double> v;
    for (const auto& r : res) v.push_back(r.fit.slopes[i]);
    const double tau = stats::mean(v);
    const double se = v.size() > 1 ? stats::standard_error(v) : res.front().fit.stderr_[i];
    const double th = res.front().reference[i];
    csv.row({q[i], tau, se, th, std::abs(tau - th) <= 0.1});
    if (gate_examples && (q[i] == 0.0 || q[i] == 1.0)) {
      run.check("tau(" + fmt(q[i]) + ") of M", std::abs(tau - th) <= 0.1,
                "tau-hat " + fmt(tau) + " vs " + fmt(th) + " (tolerance 0.1)");
    }
  }
  run.dir.write(name, csv.text());
}

}  // namespace

void run_lq(Run& run) {
  const auto& c = run.cfg;
  FieldSynthesizer synth(c.kernel, unit_lattice(c), c.backend);
  const auto reps = static_cast<std::size_t>(c.replicas);
  const double alpha = c.effective_alpha();
  const bool dual = alpha > 0.0 && alpha < 1.0;
  const Box region = Box::unit(c.d);
  std::vector<LqResult> lm(reps), lb(dual ? reps : 0);
  run.stream(c.level, StreamPurpose::kField);
  if (dual) run.stream(c.level, StreamPurpose::kAtoms);
  parallel_for(reps, [&](std::size_t r) {
    const auto field = synth.field(c.level, c.seed, r);
    lm[r] = lq_spectrum(build_chaos(field, c.gamma2), c.q_grid, c.lq_depths);
    if (dual) {
      RngStream rng(c.seed, {r, static_cast<std::uint64_t>(c.level), StreamPurpose::kAtoms});
      const auto atoms = sample_stable_atoms(region, alpha, choose_truncation(c, region.volume(), alpha), rng);
      lb[r] = lq_spectrum(build_atomic_direct(field, c.gamma2, alpha, atoms), c.q_grid, c.lq_depths);
    }
  });
  write_lq(run, "lq_M.csv", lm, true);
  std::vector<SvgSeries> series{{"M", c.q_grid, lm.front().fit.slopes, true},
                                {"xi(q)-d", c.q_grid, lm.front().reference, true}};
  if (dual) {
    write_lq(run, "lq_Mbar_conjecture_comparison.csv", lb, false);
    run.note("label", kConjectureLabel);
    run.note("q_minus", fmt(lq_lower_switch(c.gamma2, alpha, c.d)));
    series.push_back({"Mbar", c.q_grid, lb.front().fit.slopes, true});
    series.push_back({"conjectured", c.q_grid, lb.front().reference, true});
  }
  run.plot("lq.svg", svg_plot(std::string("dyadic tau-hat(q), ") + kConjectureLabel, "q", "tau", series));
}

}  // namespace gmclab::detail
