#include "biqrm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace biqrm {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown field: " + path + "." + item.key());
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing field: " + path + "." + key);
  return *it;
}

double require_number(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_number()) throw ConfigError("field must be a number: " + path + "." + key);
  return v.get<double>();
}

double optional_number(const json& obj, const std::string& path, const char* key,
                       double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ConfigError("field must be a number: " + path + "." + key);
  return it->get<double>();
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) throw ConfigError("field must be a string: " + path + "." + key);
  return v.get<std::string>();
}

std::vector<double> require_number_array(const json& obj, const std::string& path,
                                         const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_array()) throw ConfigError("field must be an array: " + path + "." + key);
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number())
      throw ConfigError("array entries must be numbers: " + path + "." + key);
    out.push_back(x.get<double>());
  }
  return out;
}

TabulatedShape read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile table: " + path);
  TabulatedShape tab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string t_field, v_field;
    if (!std::getline(row, t_field, ',') || !std::getline(row, v_field)) {
      throw ConfigError("profile table line " + std::to_string(line_no) +
                        ": expected two comma-separated columns");
    }
    try {
      tab.times.push_back(std::stod(t_field));
      tab.values.push_back(std::stod(v_field));
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header row
      throw ConfigError("profile table line " + std::to_string(line_no) +
                        ": cannot parse numbers");
    }
  }
  return tab;
}

TemporalProfile parse_profile(const json& block) {
  const std::string path = "profile";
  const std::string kind = require_string(block, path, "kind");
  const double horizon = require_number(block, path, "horizon");
  std::optional<DerivativeBound> bound;
  if (block.contains("derivative_bound")) {
    bound = DerivativeBound{optional_number(block, path, "derivative_bound", 0.0), true};
  }
  try {
    if (kind == "constant") {
      check_keys(block, path, {"kind", "horizon", "value", "derivative_bound"});
      return TemporalProfile(horizon, ConstantShape{require_number(block, path, "value")},
                             bound);
    }
    if (kind == "polynomial") {
      check_keys(block, path, {"kind", "horizon", "coefficients", "derivative_bound"});
      return TemporalProfile(
          horizon, PolynomialShape{require_number_array(block, path, "coefficients")},
          bound);
    }
    if (kind == "piecewise_trig") {
      check_keys(block, path, {"kind", "horizon", "segments", "derivative_bound"});
      const json& segs = require(block, path, "segments");
      if (!segs.is_array() || segs.empty())
        throw ConfigError("profile.segments must be a nonempty array");
      PiecewiseTrigShape shape;
      std::size_t idx = 0;
      for (const auto& seg : segs) {
        const std::string spath = path + ".segments[" + std::to_string(idx++) + "]";
        if (!seg.is_object()) throw ConfigError(spath + " must be an object");
        check_keys(seg, spath, {"from", "to", "amplitude", "frequency", "phase", "function"});
        TrigSegment s;
        s.from = require_number(seg, spath, "from");
        s.to = require_number(seg, spath, "to");
        s.amplitude = require_number(seg, spath, "amplitude");
        s.frequency = optional_number(seg, spath, "frequency", 1.0);
        s.phase = optional_number(seg, spath, "phase", 0.0);
        const std::string fn =
            seg.contains("function") ? require_string(seg, spath, "function") : "cos";
        if (fn == "sin")
          s.sine = true;
        else if (fn == "cos")
          s.sine = false;
        else
          throw ConfigError(spath + ".function must be \"cos\" or \"sin\"");
        shape.segments.push_back(s);
      }
      return TemporalProfile(horizon, std::move(shape), bound);
    }
    if (kind == "tabulated") {
      check_keys(block, path, {"kind", "horizon", "times", "values", "csv", "derivative_bound"});
      TabulatedShape tab;
      if (block.contains("csv")) {
        tab = read_table_csv(require_string(block, path, "csv"));
      } else {
        tab.times = require_number_array(block, path, "times");
        tab.values = require_number_array(block, path, "values");
      }
      return TemporalProfile(horizon, std::move(tab), bound);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  throw ConfigError("profile.kind must be one of constant | polynomial | "
                    "piecewise_trig | tabulated");
}

}  // namespace

ExperimentSpec ConfigFile::experiment_spec() const {
  if (!domain) throw ConfigError("missing block: domain");
  if (!profile) throw ConfigError("missing block: profile");
  if (!smoothness) throw ConfigError("missing block: smoothness");
  if (!source) throw ConfigError("missing block: source");
  if (!regularizer) throw ConfigError("missing block: regularizer");
  if (!has_experiment_block) throw ConfigError("missing block: experiment");
  ExperimentSpec spec;
  spec.domain = domain;
  spec.profile = profile;
  spec.source = *source;
  spec.smoothness = *smoothness;
  spec.order_b = regularizer->order;
  spec.rule = regularizer->rule;
  spec.xi = regularizer->xi;
  spec.sigma = regularizer->sigma;
  spec.deltas = deltas;
  spec.seed = seed;
  spec.trials = trials;
  spec.label = label;
  return spec;
}

ConfigFile parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  check_keys(root, "config",
             {"domain", "profile", "smoothness", "source", "regularizer",
              "experiment", "modulus", "illposed"});

  ConfigFile cfg;

  if (root.contains("domain")) {
    const json& d = root["domain"];
    check_keys(d, "domain", {"dimension", "lengths", "modes"});
    const double dim = require_number(d, "domain", "dimension");
    auto lengths = require_number_array(d, "domain", "lengths");
    const double modes = optional_number(d, "domain", "modes", 256.0);
    if (dim < 1 || dim != std::floor(dim))
      throw ConfigError("domain.dimension must be a positive integer");
    if (lengths.size() != static_cast<std::size_t>(dim))
      throw ConfigError("domain.lengths must list one side per dimension");
    if (modes < 1 || modes != std::floor(modes))
      throw ConfigError("domain.modes must be a positive integer");
    try {
      cfg.domain = SpectralDomain::make(std::move(lengths),
                                        static_cast<std::size_t>(modes));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("domain: ") + e.what());
    }
  }

  if (root.contains("profile")) cfg.profile = parse_profile(root["profile"]);

  if (root.contains("smoothness")) {
    const json& s = root["smoothness"];
    check_keys(s, "smoothness", {"p", "rho"});
    try {
      cfg.smoothness = SmoothnessClass(require_number(s, "smoothness", "p"),
                                       require_number(s, "smoothness", "rho"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("smoothness: ") + e.what());
    }
  }

  if (root.contains("source")) {
    const json& s = root["source"];
    const std::string kind = require_string(s, "source", "kind");
    SourceSpec spec;
    if (kind == "decay") {
      check_keys(s, "source", {"kind", "q"});
      spec.decay = true;
      spec.q = optional_number(s, "source", "q", 0.5);
    } else if (kind == "coefficients") {
      check_keys(s, "source", {"kind", "values"});
      spec.decay = false;
      spec.coefficients = require_number_array(s, "source", "values");
    } else {
      throw ConfigError("source.kind must be decay | coefficients");
    }
    cfg.source = spec;
  }

  if (root.contains("regularizer")) {
    const json& r = root["regularizer"];
    check_keys(r, "regularizer", {"order", "rule", "alpha", "xi", "sigma"});
    RegularizerConfig reg;
    reg.order = require_number(r, "regularizer", "order");
    const std::string rule = require_string(r, "regularizer", "rule");
    if (rule == "manual") {
      reg.rule = ChoiceRule::manual;
      reg.alpha = require_number(r, "regularizer", "alpha");
    } else if (rule == "apriori") {
      reg.rule = ChoiceRule::apriori;
      reg.alpha = optional_number(r, "regularizer", "alpha", 1.0);
    } else if (rule == "aposteriori") {
      reg.rule = ChoiceRule::aposteriori;
      reg.alpha = optional_number(r, "regularizer", "alpha", 1.0);
      reg.xi = require_number(r, "regularizer", "xi");
      reg.sigma = optional_number(r, "regularizer", "sigma", 0.5);
    } else {
      throw ConfigError("regularizer.rule must be manual | apriori | aposteriori");
    }
    if (!(reg.order >= 2.0)) throw ConfigError("regularizer.order must be >= 2");
    cfg.regularizer = reg;
  }

  if (root.contains("experiment")) {
    const json& e = root["experiment"];
    check_keys(e, "experiment", {"deltas", "trials", "seed", "output_dir", "label"});
    cfg.deltas = require_number_array(e, "experiment", "deltas");
    const double trials = optional_number(e, "experiment", "trials", 1.0);
    if (trials < 1 || trials != std::floor(trials))
      throw ConfigError("experiment.trials must be a positive integer");
    cfg.trials = static_cast<int>(trials);
    const double seed = optional_number(e, "experiment", "seed", 1.0);
    if (seed < 0 || seed != std::floor(seed))
      throw ConfigError("experiment.seed must be a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(seed);
    if (e.contains("output_dir"))
      cfg.output_dir = require_string(e, "experiment", "output_dir");
    if (e.contains("label")) cfg.label = require_string(e, "experiment", "label");
    cfg.has_experiment_block = true;
  }

  if (root.contains("modulus")) {
    const json& m = root["modulus"];
    check_keys(m, "modulus", {"r", "offspectrum_points"});
    cfg.modulus_r = optional_number(m, "modulus", "r", 1.0);
    const double pts = optional_number(m, "modulus", "offspectrum_points", 20.0);
    if (pts < 1 || pts != std::floor(pts))
      throw ConfigError("modulus.offspectrum_points must be a positive integer");
    cfg.modulus_offspectrum_points = static_cast<int>(pts);
    cfg.has_modulus_block = true;
  }

  if (root.contains("illposed")) {
    const json& b = root["illposed"];
    check_keys(b, "illposed", {"k_max"});
    const double k_max = require_number(b, "illposed", "k_max");
    if (k_max < 1 || k_max != std::floor(k_max))
      throw ConfigError("illposed.k_max must be a positive integer");
    cfg.illposed_k_max = static_cast<std::size_t>(k_max);
    cfg.has_illposed_block = true;
  }

  if (cfg.label.empty()) cfg.label = "experiment";
  return cfg;
}

ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace biqrm
