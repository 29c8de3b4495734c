#include "gmclab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "gmclab/analysis.hpp"
#include "gmclab/io.hpp"

namespace gmclab {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(parse_double(item));
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(static_cast<int>(parse_int(item)));
  return out;
}

std::string list_text(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

std::string list_text(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

std::string backend_text(SamplerBackend b) {
  switch (b) {
    case SamplerBackend::kCirculant: return "circulant";
    case SamplerBackend::kDense: return "dense";
    default: return "auto";
  }
}

std::string construction_text(ConstructionChoice c) {
  switch (c) {
    case ConstructionChoice::kDirect: return "direct";
    case ConstructionChoice::kSubordinated: return "subordinated";
    default: return "both";
  }
}

bool needs_alpha(Subcommand s) {
  switch (s) {
    case Subcommand::kAtoms:
    case Subcommand::kLaplace:
    case Subcommand::kTail:
    case Subcommand::kScaling:
    case Subcommand::kDuality:
    case Subcommand::kLq:
      return true;
    default:
      return false;
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(join_lines(diagnostics)), diagnostics_(std::move(diagnostics)) {}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::vector<std::string> problems;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(number) + ": expected key=value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      problems.push_back("line " + std::to_string(number) + ": empty key");
    } else if (!map.emplace(key, value).second) {
      problems.push_back("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return map;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"field", "chaos", "atoms", "spectrum", "laplace",
                                              "tail", "scaling", "kpz", "duality", "lq"};
  return names;
}

std::string to_string(Subcommand s) { return subcommand_names()[static_cast<std::size_t>(s)]; }

Subcommand parse_subcommand(const std::string& name) {
  const auto& names = subcommand_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("unknown subcommand '" + name + "'");
  return static_cast<Subcommand>(it - names.begin());
}

double ExperimentConfig::effective_alpha() const {
  return alpha_mode == AlphaMode::kDuality ? gamma2 / (2.0 * d) : alpha;
}

ConfigMap ExperimentConfig::echo() const {
  ConfigMap m;
  m["dimension"] = std::to_string(d);
  m["kernel.family"] = std::string(family_name(kernel.family));
  m["kernel.T"] = format_double(kernel.T);
  m["kernel.seed"] = std::string(seed_name(kernel.seed));
  m["gamma2"] = format_double(gamma2);
  m["level"] = std::to_string(level);
  m["grid.N"] = std::to_string(grid);
  m["grid.backend"] = backend_text(backend);
  m["replicas"] = std::to_string(replicas);
  m["seed"] = std::to_string(seed);
  m["alpha.mode"] = alpha_mode == AlphaMode::kDuality ? "duality" : "explicit";
  m["alpha"] = format_double(effective_alpha());
  m["zmin"] = z_min ? format_double(*z_min) : "auto";
  m["zmin.ratio"] = format_double(z_ratio);
  m["atoms.expected"] = format_double(atoms_expected);
  m["construction"] = construction_text(construction);
  m["lambda"] = list_text(lambdas);
  m["q"] = list_text(q_grid);
  m["u"] = list_text(u_grid);
  m["s"] = list_text(s_grid);
  m["gamma2.sweep"] = list_text(gamma2_sweep);
  m["cover.set"] = cover_set;
  m["cover.depth"] = std::to_string(cover_depth);
  m["cover.levels"] = list_text(cover_levels);
  m["lq.depths"] = list_text(lq_depths);
  m["hill.k"] = std::to_string(hill_k);
  m["bootstrap"] = std::to_string(bootstrap);
  m["beta"] = format_double(beta);
  m["pairs"] = std::to_string(pairs);
  m["out"] = out;
  m["plot"] = plot ? "true" : "false";
  m["ensemble.dump"] = dump_ensemble ? "true" : "false";
  return m;
}

ExperimentConfig default_config(Subcommand s) {
  ExperimentConfig c;
  c.subcommand = s;
  switch (s) {
    case Subcommand::kField:
      c.grid = 256;
      c.replicas = 4000;
      break;
    case Subcommand::kChaos:
      c.replicas = 10000;
      c.lambdas = {1.0, 0.5, 0.25};
      break;
    case Subcommand::kSpectrum:
      c.replicas = 4000;
      c.lambdas = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
      c.q_grid = {0.5, 1.0, 1.5};
      break;
    case Subcommand::kLaplace:
    case Subcommand::kTail:
      c.gamma2 = 1.0;
      c.grid = 512;
      c.replicas = 100000;
      c.u_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
      c.construction = ConstructionChoice::kBoth;
      break;
    case Subcommand::kScaling:
      c.gamma2 = 1.0;
      c.grid = 256;
      c.replicas = 20000;
      c.lambdas = {0.5, 0.25, 0.125};
      c.q_grid = {0.25};
      c.construction = ConstructionChoice::kDirect;
      break;
    case Subcommand::kKpz:
      c.grid = 2916;
      c.level = 2916;
      c.replicas = 1000;
      c.cover_levels = {3, 4, 5, 6};
      c.s_grid = {0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9};
      break;
    case Subcommand::kDuality:
      c.gamma2 = 1.0;
      c.grid = 2916;
      c.level = 2916;
      c.replicas = 1000;
      c.z_min = 1e-9;
      c.cover_levels = {3, 4, 5, 6};
      c.s_grid = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7,
                  0.75, 0.8, 0.85, 0.9};
      c.construction = ConstructionChoice::kDirect;
      break;
    case Subcommand::kLq:
      c.grid = 4096;
      c.level = 1024;
      c.replicas = 1;
      c.q_grid = {-1.0, -0.5, 0.0, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0};
      c.lq_depths = {3, 4, 5, 6, 7, 8, 9};
      c.atoms_expected = 100000;
      c.construction = ConstructionChoice::kDirect;
      break;
    case Subcommand::kAtoms:
      c.d = 2;
      c.kernel = KernelSpec::exact2d();
      c.gamma2 = 1.0;
      c.grid = 128;
      c.level = 32;
      c.replicas = 1;
      c.atoms_expected = 2000;
      c.gamma2_sweep = {0.01, 1.0, 3.6};
      c.construction = ConstructionChoice::kDirect;
      break;
  }
  return c;
}

ExperimentConfig make_config(Subcommand s, const ConfigMap& map) {
  ExperimentConfig c = default_config(s);
  std::vector<std::string> problems;
  bool family_given = false;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"dimension", [&](const std::string& v) { c.d = static_cast<int>(parse_int(v)); }},
      {"kernel.family", [&](const std::string& v) { c.kernel.family = parse_family(v); family_given = true; }},
      {"kernel.T", [&](const std::string& v) { c.kernel.T = parse_double(v); }},
      {"kernel.seed", [&](const std::string& v) { c.kernel.seed = parse_seed(v); }},
      {"gamma2", [&](const std::string& v) { c.gamma2 = parse_double(v); }},
      {"level", [&](const std::string& v) { c.level = static_cast<int>(parse_int(v)); }},
      {"grid.N", [&](const std::string& v) { c.grid = static_cast<int>(parse_int(v)); }},
      {"grid.backend",
       [&](const std::string& v) {
         if (v == "auto") c.backend = SamplerBackend::kAuto;
         else if (v == "circulant") c.backend = SamplerBackend::kCirculant;
         else if (v == "dense") c.backend = SamplerBackend::kDense;
         else throw std::invalid_argument("expected auto, circulant or dense");
       }},
      {"replicas", [&](const std::string& v) { c.replicas = static_cast<int>(parse_int(v)); }},
      {"seed",
       [&](const std::string& v) {
         const auto x = parse_int(v);
         if (x < 0) throw std::invalid_argument("seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"alpha.mode",
       [&](const std::string& v) {
         if (v == "duality") c.alpha_mode = AlphaMode::kDuality;
         else if (v == "explicit") c.alpha_mode = AlphaMode::kExplicit;
         else throw std::invalid_argument("expected duality or explicit");
       }},
      {"alpha", [&](const std::string& v) { c.alpha = parse_double(v); }},
      {"zmin",
       [&](const std::string& v) {
         if (v == "auto") c.z_min.reset();
         else c.z_min = parse_double(v);
       }},
      {"zmin.ratio", [&](const std::string& v) { c.z_ratio = parse_double(v); }},
      {"atoms.expected", [&](const std::string& v) { c.atoms_expected = parse_double(v); }},
      {"construction",
       [&](const std::string& v) {
         if (v == "direct") c.construction = ConstructionChoice::kDirect;
         else if (v == "subordinated") c.construction = ConstructionChoice::kSubordinated;
         else if (v == "both") c.construction = ConstructionChoice::kBoth;
         else throw std::invalid_argument("expected direct, subordinated or both");
       }},
      {"lambda", [&](const std::string& v) { c.lambdas = parse_doubles(v); }},
      {"q", [&](const std::string& v) { c.q_grid = parse_doubles(v); }},
      {"u", [&](const std::string& v) { c.u_grid = parse_doubles(v); }},
      {"s", [&](const std::string& v) { c.s_grid = parse_doubles(v); }},
      {"gamma2.sweep", [&](const std::string& v) { c.gamma2_sweep = parse_doubles(v); }},
      {"cover.set", [&](const std::string& v) { c.cover_set = v; }},
      {"cover.depth", [&](const std::string& v) { c.cover_depth = static_cast<int>(parse_int(v)); }},
      {"cover.levels", [&](const std::string& v) { c.cover_levels = parse_ints(v); }},
      {"lq.depths", [&](const std::string& v) { c.lq_depths = parse_ints(v); }},
      {"hill.k",
       [&](const std::string& v) {
         const auto x = parse_int(v);
         if (x < 0) throw std::invalid_argument("hill.k must be >= 0");
         c.hill_k = static_cast<std::size_t>(x);
       }},
      {"bootstrap", [&](const std::string& v) { c.bootstrap = static_cast<int>(parse_int(v)); }},
      {"beta", [&](const std::string& v) { c.beta = parse_double(v); }},
      {"pairs", [&](const std::string& v) { c.pairs = static_cast<int>(parse_int(v)); }},
      {"out", [&](const std::string& v) { c.out = v; }},
      {"plot", [&](const std::string& v) { c.plot = parse_bool(v); }},
      {"ensemble.dump", [&](const std::string& v) { c.dump_ensemble = parse_bool(v); }},
  };
  for (const auto& [key, value] : map) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      problems.push_back("unknown key '" + key + "'");
      continue;
    }
    try {
      it->second(value);
    } catch (const std::exception& e) {
      problems.push_back(key + ": " + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  c.kernel.d = c.d;
  if (!family_given && map.count("dimension")) {
    if (c.d == 2 && c.kernel.family == KernelFamily::kExactScale1D) c.kernel.family = KernelFamily::kExactScale2D;
    if (c.d == 1 && c.kernel.family == KernelFamily::kExactScale2D) c.kernel.family = KernelFamily::kExactScale1D;
  }
  return c;
}

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> out;
  auto say = [&](std::string msg) { out.push_back(std::move(msg)); };
  const Subcommand s = c.subcommand;

  if (c.d != 1 && c.d != 2) say("dimension must be 1 or 2");
  if (c.kernel.d != c.d) say("kernel dimension does not match the dimension key");
  try {
    c.kernel.validate();
  } catch (const std::exception& e) {
    say(std::string("kernel: ") + e.what());
  }
  if (c.grid < 2) say("grid.N must be >= 2");
  if (c.level < 1) say("level must be >= 1");
  if (c.replicas < 1) say("replicas must be >= 1");
  if (c.bootstrap < 0) say("bootstrap must be >= 0");
  if (!(c.gamma2 > 0.0)) say("gamma2 must be > 0");
  if (c.backend == SamplerBackend::kDense && std::pow(double(c.grid), c.d) > 4096) {
    say("dense backend limited to 4096 sites");
  }
  if (c.backend == SamplerBackend::kCirculant && !c.kernel.stationary()) {
    say("circulant backend needs a stationary kernel family");
  }

  const double alpha = c.effective_alpha();
  if (needs_alpha(s) || c.alpha_mode == AlphaMode::kExplicit) {
    if (!(alpha > 0.0 && alpha < 1.0)) say("alpha out of (0,1): alpha = " + format_double(alpha));
  }
  if (c.z_min && !(*c.z_min > 0.0)) say("zmin must be > 0 or auto");
  if (!(c.z_ratio > 0.0)) say("zmin.ratio must be > 0");
  if (c.atoms_expected < 0.0) say("atoms.expected must be >= 0");

  auto check_lambdas = [&](bool allow_one) {
    for (double l : c.lambdas) {
      if (!(l > 0.0 && (l < 1.0 || (allow_one && l == 1.0)))) say("lambda " + format_double(l) + " outside (0,1]");
    }
  };

  switch (s) {
    case Subcommand::kField:
      if (c.pairs < 1) say("pairs must be >= 1");
      break;
    case Subcommand::kChaos:
      check_lambdas(true);
      break;
    case Subcommand::kSpectrum: {
      check_lambdas(true);
      std::vector<double> u = c.lambdas;
      std::sort(u.begin(), u.end());
      if (std::unique(u.begin(), u.end()) - u.begin() < 4) say("spectrum needs at least 4 distinct lambda values");
      if (c.q_grid.empty()) say("q grid is empty");
      const double bound = 2.0 * c.d / c.gamma2;
      for (double q : c.q_grid) {
        if (!(q > 0.0 && q < bound)) {
          say("q=" + format_double(q) + " outside the moment range (0, 2d/gamma2=" + format_double(bound) + ")");
        }
      }
      if (!c.lambdas.empty() && c.kernel.family != KernelFamily::kGffSquare &&
          c.kernel.family != KernelFamily::kStarScale) {
        const double top = *std::max_element(c.lambdas.begin(), c.lambdas.end());
        for (double l : c.lambdas) {
          const double lv = c.level * top / l;
          if (std::abs(lv - std::round(lv)) > 1e-9) say("level * max(lambda) / lambda must be an integer");
        }
      }
      break;
    }
    case Subcommand::kLaplace:
    case Subcommand::kTail:
      for (double u : c.u_grid) {
        if (u < 0.0) say("u values must be >= 0");
      }
      if (c.beta < 0.0 || (c.beta > 0.0 && c.beta >= alpha)) {
        say("beta=" + format_double(c.beta) + " must lie in [0, alpha=" + format_double(alpha) + ")");
      }
      if (c.replicas < 2) say("at least 2 replicas needed");
      break;
    case Subcommand::kScaling:
      check_lambdas(true);
      if (c.lambdas.empty()) say("lambda grid is empty");
      for (double q : c.q_grid) {
        if (!(q >= 0.0 && q < alpha)) {
          say("q=" + format_double(q) + " for Mbar exceeds the moment threshold alpha=" + format_double(alpha) +
              " (moments of order >= alpha are infinite)");
        }
      }
      if (c.kernel.family == KernelFamily::kExactScale1D || c.kernel.family == KernelFamily::kExactScale2D) {
        for (double l : c.lambdas) {
          const double lv = c.level / l;
          if (std::abs(lv - std::round(lv)) > 1e-9) say("level / lambda must be an integer");
        }
      } else {
        say("perfect scaling needs an exact-scale kernel family");
      }
      break;
    case Subcommand::kKpz:
    case Subcommand::kDuality: {
      SelfSimilarSet set;
      try {
        set = SelfSimilarSet::by_name(c.cover_set);
      } catch (const std::exception& e) {
        say(e.what());
        break;
      }
      if (set.d != c.d) say("cover.set dimension does not match the dimension key");
      if (c.cover_levels.size() < 3) say("at least 3 cover.levels needed");
      if (c.s_grid.size() < 5) say("at least 5 s values needed");
      for (int l : c.cover_levels) {
        if (l < 1 || l > c.cover_depth) say("cover level " + std::to_string(l) + " outside [1, cover.depth]");
      }
      const double cells = std::pow(double(set.base), c.cover_depth);
      if (std::fmod(double(c.grid), cells) != 0.0) {
        say("grid.N=" + std::to_string(c.grid) + " is not a multiple of " + std::to_string(set.base) + "^" +
            std::to_string(c.cover_depth) + " (lattice/Cantor alignment)");
      }
      for (double v : c.s_grid) {
        if (!(v >= 0.0 && v <= 1.0)) say("s values must lie in [0,1]");
      }
      if (s == Subcommand::kKpz && !(c.gamma2 < 2.0 * c.d)) say("kpz needs gamma2 < 2d");
      break;
    }
    case Subcommand::kLq:
      if (c.lq_depths.size() < 2) say("at least 2 lq.depths needed");
      for (int j : c.lq_depths) {
        if (j < 0 || j > 20 || c.grid % (1 << std::clamp(j, 0, 20)) != 0) {
          say("dyadic depth " + std::to_string(j) + " does not divide grid.N");
        }
      }
      if (c.q_grid.empty()) say("q grid is empty");
      break;
    case Subcommand::kAtoms:
      for (double g : c.gamma2_sweep) {
        if (!(g > 0.0 && g < 2.0 * c.d)) say("gamma2.sweep value " + format_double(g) + " outside (0, 2d)");
      }
      break;
  }
  return out;
}

}  // namespace gmclab
