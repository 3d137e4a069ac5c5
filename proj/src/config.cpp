#include "fraclab/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fraclab/errors.hpp"

namespace fraclab {

const char* to_string(RunKind k) {
  switch (k) {
    case RunKind::sample: return "sample";
    case RunKind::eigen: return "eigen";
    case RunKind::kernel: return "kernel";
    case RunKind::iu_check: return "iu-check";
    case RunKind::counterexample: return "counterexample";
    default: return "validate";
  }
}

std::optional<RunKind> run_kind_from_string(const std::string& s) {
  if (s == "sample") return RunKind::sample;
  if (s == "eigen") return RunKind::eigen;
  if (s == "kernel") return RunKind::kernel;
  if (s == "iu-check") return RunKind::iu_check;
  if (s == "counterexample") return RunKind::counterexample;
  if (s == "validate") return RunKind::validate;
  return std::nullopt;
}

StableModel ExperimentConfig::build_model() const {
  return StableModel::make(d, alpha, alpha_override);
}

Potential ExperimentConfig::build_potential() const {
  if (potential_kind == "power") return make_power(beta);
  if (potential_kind == "exp") return make_exp(beta);
  if (potential_kind == "log") return make_log(kappa);
  if (potential_kind == "const") return make_const(c);
  if (potential_kind == "counterexample") {
    return make_counterexample(CounterexampleSpec::default_sequence(alpha, terms), d,
                               alpha);
  }
  throw ConfigError("unknown potential kind: " + potential_kind);
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt(v[i]);
  }
  return s;
}

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "[model]\n";
  os << "d = " << d << "\n";
  os << "alpha = " << fmt(alpha) << "\n";
  os << "alpha_override = " << (alpha_override ? "true" : "false") << "\n";
  os << "\n[potential]\n";
  os << "kind = " << potential_kind << "\n";
  os << "beta = " << fmt(beta) << "\n";
  os << "kappa = " << fmt(kappa) << "\n";
  os << "c = " << fmt(c) << "\n";
  os << "terms = " << terms << "\n";
  os << "\n[paths]\n";
  os << "step = " << fmt(paths.step) << "\n";
  os << "horizon = " << fmt(paths.horizon) << "\n";
  os << "replicas = " << paths.replicas << "\n";
  os << "epsilon = " << fmt(paths.smoothing_radius) << "\n";
  os << "potential_cap = " << fmt(paths.potential_cap) << "\n";
  os << "max_steps = " << paths.max_steps << "\n";
  os << "weight_cutoff = " << fmt(paths.weight_cutoff) << "\n";
  os << "\n[grid]\n";
  os << "half_width = " << fmt(grid.half_width) << "\n";
  os << "nodes = " << grid.n << "\n";
  os << "\n[run]\n";
  os << "kind = " << to_string(kind) << "\n";
  os << "t = " << fmt(t) << "\n";
  os << "window = " << fmt(window) << "\n";
  os << "radii = " << fmt_list(radii) << "\n";
  os << "probes = " << fmt_list(probes) << "\n";
  os << "\n[thresholds]\n";
  os << "envelope_dispersion = " << fmt(envelope_dispersion) << "\n";
  os << "gauge_band = " << fmt(gauge_band) << "\n";
  os << "slope_slack = " << fmt(slope_slack) << "\n";
  os << "iu_growth_min = " << fmt(iu_growth_min) << "\n";
  os << "iu_stable_max = " << fmt(iu_stable_max) << "\n";
  os << "\n[output]\n";
  os << "dir = " << out_dir << "\n";
  os << "seed = " << seed << "\n";
  os << "jobs = " << jobs << "\n";
  return os.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(serialize()); }

namespace {

struct Parser {
  ExperimentConfig cfg;
  std::vector<ConfigViolation> errs;
  bool kind_set = false;

  void err(int line, std::string msg) { errs.push_back({line, std::move(msg)}); }

  static std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  bool parse_double(const std::string& v, double& out) {
    char* end = nullptr;
    out = std::strtod(v.c_str(), &end);
    return end && *end == '\0' && !v.empty();
  }
  bool parse_long(const std::string& v, long& out) {
    char* end = nullptr;
    out = std::strtol(v.c_str(), &end, 10);
    return end && *end == '\0' && !v.empty();
  }
  bool parse_u64(const std::string& v, std::uint64_t& out) {
    char* end = nullptr;
    out = std::strtoull(v.c_str(), &end, 10);
    return end && *end == '\0' && !v.empty();
  }
  bool parse_bool(const std::string& v, bool& out) {
    if (v == "true") return out = true, true;
    if (v == "false") return out = false, true;
    return false;
  }
  bool parse_list(const std::string& v, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double d;
      if (!parse_double(trim(item), d)) return false;
      out.push_back(d);
    }
    return !out.empty();
  }

  void handle(int line, const std::string& sec, const std::string& key,
              const std::string& val) {
    auto need_double = [&](double& slot) {
      double v;
      if (parse_double(val, v))
        slot = v;
      else
        err(line, "type mismatch for " + sec + "." + key + ": expected number");
    };
    auto need_long = [&](long& slot) {
      long v;
      if (parse_long(val, v))
        slot = v;
      else
        err(line, "type mismatch for " + sec + "." + key + ": expected integer");
    };

    if (sec == "model") {
      if (key == "d") {
        long v;
        if (parse_long(val, v))
          cfg.d = static_cast<int>(v);
        else
          err(line, "type mismatch for model.d: expected integer");
      } else if (key == "alpha") {
        need_double(cfg.alpha);
      } else if (key == "alpha_override") {
        if (!parse_bool(val, cfg.alpha_override))
          err(line, "type mismatch for model.alpha_override: expected true/false");
      } else {
        err(line, "unknown key: model." + key);
      }
    } else if (sec == "potential") {
      if (key == "kind") {
        cfg.potential_kind = val;
      } else if (key == "beta") {
        need_double(cfg.beta);
      } else if (key == "kappa") {
        need_double(cfg.kappa);
      } else if (key == "c") {
        need_double(cfg.c);
      } else if (key == "terms") {
        long v;
        if (parse_long(val, v))
          cfg.terms = static_cast<int>(v);
        else
          err(line, "type mismatch for potential.terms: expected integer");
      } else {
        err(line, "unknown key: potential." + key);
      }
    } else if (sec == "paths") {
      if (key == "step")
        need_double(cfg.paths.step);
      else if (key == "horizon")
        need_double(cfg.paths.horizon);
      else if (key == "replicas")
        need_long(cfg.paths.replicas);
      else if (key == "epsilon")
        need_double(cfg.paths.smoothing_radius);
      else if (key == "potential_cap")
        need_double(cfg.paths.potential_cap);
      else if (key == "max_steps")
        need_long(cfg.paths.max_steps);
      else if (key == "weight_cutoff")
        need_double(cfg.paths.weight_cutoff);
      else
        err(line, "unknown key: paths." + key);
    } else if (sec == "grid") {
      if (key == "half_width")
        need_double(cfg.grid.half_width);
      else if (key == "nodes") {
        long v;
        if (parse_long(val, v))
          cfg.grid.n = static_cast<int>(v);
        else
          err(line, "type mismatch for grid.nodes: expected integer");
      } else
        err(line, "unknown key: grid." + key);
    } else if (sec == "run") {
      if (key == "kind") {
        auto k = run_kind_from_string(val);
        if (k) {
          cfg.kind = *k;
          kind_set = true;
        } else {
          err(line, "unknown run kind: " + val);
        }
      } else if (key == "t")
        need_double(cfg.t);
      else if (key == "window")
        need_double(cfg.window);
      else if (key == "radii") {
        if (!parse_list(val, cfg.radii))
          err(line, "type mismatch for run.radii: expected comma-separated numbers");
      } else if (key == "probes") {
        if (!parse_list(val, cfg.probes))
          err(line, "type mismatch for run.probes: expected comma-separated numbers");
      } else
        err(line, "unknown key: run." + key);
    } else if (sec == "thresholds") {
      if (key == "envelope_dispersion")
        need_double(cfg.envelope_dispersion);
      else if (key == "gauge_band")
        need_double(cfg.gauge_band);
      else if (key == "slope_slack")
        need_double(cfg.slope_slack);
      else if (key == "iu_growth_min")
        need_double(cfg.iu_growth_min);
      else if (key == "iu_stable_max")
        need_double(cfg.iu_stable_max);
      else
        err(line, "unknown key: thresholds." + key);
    } else if (sec == "output") {
      if (key == "dir")
        cfg.out_dir = val;
      else if (key == "seed") {
        if (!parse_u64(val, cfg.seed))
          err(line, "type mismatch for output.seed: expected unsigned integer");
      } else if (key == "jobs") {
        long v;
        if (parse_long(val, v))
          cfg.jobs = static_cast<int>(v);
        else
          err(line, "type mismatch for output.jobs: expected integer");
      } else
        err(line, "unknown key: output." + key);
    } else {
      err(line, "unknown section: [" + sec + "]");
    }
  }

  void validate() {
    if (!kind_set) err(0, "missing key: run.kind");
    if (cfg.d < 1) err(0, "d must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) err(0, "alpha out of (0,2)");
    else if ((cfg.alpha < 0.3 || cfg.alpha > 1.8) && !cfg.alpha_override)
      err(0,
          "alpha outside the default range [0.3, 1.8]; set model.alpha_override = "
          "true to proceed");

    if (cfg.potential_kind == "power" || cfg.potential_kind == "exp") {
      if (!(cfg.beta > 0.0)) err(0, "missing key: potential.beta (must be > 0)");
    } else if (cfg.potential_kind == "log") {
      if (!(cfg.kappa > 0.0)) err(0, "missing key: potential.kappa (must be > 0)");
    } else if (cfg.potential_kind == "const") {
      if (cfg.c < 0.0) err(0, "potential.c must be >= 0");
    } else if (cfg.potential_kind == "counterexample") {
      if (cfg.terms < 2) err(0, "missing key: potential.terms (need >= 2)");
    } else {
      err(0, "unknown potential kind: " + cfg.potential_kind);
    }

    try {
      cfg.paths.validate();
    } catch (const ConfigError& e) {
      err(0, e.what());
    }
    try {
      cfg.grid.validate();
    } catch (const ConfigError& e) {
      err(0, e.what());
    }
    if (cfg.kind == RunKind::eigen && cfg.window > cfg.grid.half_width / 2.0)
      err(0, "run.window must be <= grid.half_width / 2");
    if (cfg.kind == RunKind::eigen) {
      for (double p : cfg.probes)
        if (std::abs(p) + 1.0 > cfg.grid.half_width)
          err(0, "run.probes: probe ball leaves the declared grid");
    }
    if (cfg.jobs < 0) err(0, "output.jobs must be >= 0");
  }
};

}  // namespace

ParseOutcome parse_config(const std::string& text) {
  Parser p;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  std::string section;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = Parser::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        p.err(line_no, "malformed section header: " + line);
        continue;
      }
      section = Parser::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      p.err(line_no, "expected key = value: " + line);
      continue;
    }
    const std::string key = Parser::trim(line.substr(0, eq));
    const std::string val = Parser::trim(line.substr(eq + 1));
    if (section.empty()) {
      p.err(line_no, "key outside any section: " + key);
      continue;
    }
    p.handle(line_no, section, key, val);
  }
  p.validate();

  ParseOutcome out;
  out.violations = std::move(p.errs);
  if (out.violations.empty()) out.config = std::move(p.cfg);
  return out;
}

ParseOutcome parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseOutcome out;
    out.violations.push_back({0, "cannot open config file: " + path});
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace fraclab
