#include <fmt/format.h>
#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "hhdmft/errors.hpp"
#include "hhdmft/workbench.hpp"

namespace hhdmft {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
};

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("'{}' is not a finite number", s));
  }
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument(fmt::format("'{}' is not an integer", s));
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidArgument(fmt::format("'{}' is not a boolean", s));
}

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

template <class Get>
Field real_field(std::string section, std::string key, Get ref, std::function<void(double)> check = {}) {
  return {std::move(section), std::move(key),
          [ref, check](RunConfig& c, const std::string& s) {
            const double v = parse_double(s);
            if (check) check(v);
            ref(c) = v;
          },
          [ref](const RunConfig& c) { return fmt_double(ref(c)); }};
}

template <class Get>
Field int_field(std::string section, std::string key, Get ref, long long min_value) {
  return {std::move(section), std::move(key),
          [ref, min_value](RunConfig& c, const std::string& s) {
            const long long v = parse_int(s);
            if (v < min_value) throw InvalidArgument(fmt::format("must be at least {}", min_value));
            using T = std::remove_reference_t<decltype(ref(c))>;
            ref(c) = static_cast<T>(v);
          },
          [ref](const RunConfig& c) { return fmt::format("{}", ref(c)); }};
}

template <class Get>
Field bool_field(std::string section, std::string key, Get ref) {
  return {std::move(section), std::move(key),
          [ref](RunConfig& c, const std::string& s) { ref(c) = parse_bool(s); },
          [ref](const RunConfig& c) { return ref(c) ? "true" : "false"; }};
}

template <class Get, class Parse, class Show>
Field enum_field(std::string section, std::string key, Get ref, Parse parse, Show show) {
  return {std::move(section), std::move(key),
          [ref, parse](RunConfig& c, const std::string& s) { ref(c) = parse(s); },
          [ref, show](const RunConfig& c) { return show(ref(c)); }};
}

auto positive = [](double v) { require(v > 0.0, "must be positive"); };
auto non_negative = [](double v) { require(v >= 0.0, "must be non-negative"); };

EvalMode eval_mode_from_string(const std::string& s) {
  if (s == "exact") return EvalMode::Exact;
  if (s == "sampled") return EvalMode::Sampled;
  throw InvalidArgument(fmt::format("unknown mode '{}'", s));
}
std::string eval_mode_name(EvalMode m) { return m == EvalMode::Exact ? "exact" : "sampled"; }

DmftAction dmft_action_from_string(const std::string& s) {
  if (s == "scan") return DmftAction::Scan;
  if (s == "iterate") return DmftAction::Iterate;
  if (s == "both") return DmftAction::Both;
  throw InvalidArgument(fmt::format("unknown dmft action '{}'", s));
}
std::string dmft_action_name(DmftAction a) {
  return a == DmftAction::Scan ? "scan" : (a == DmftAction::Iterate ? "iterate" : "both");
}

SpectrumSource spectrum_source_from_string(const std::string& s) {
  if (s == "ed") return SpectrumSource::Ed;
  if (s == "kvqa") return SpectrumSource::Kvqa;
  throw InvalidArgument(fmt::format("unknown spectrum source '{}'", s));
}
std::string spectrum_source_name(SpectrumSource s) { return s == SpectrumSource::Ed ? "ed" : "kvqa"; }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = [] {
    std::vector<Field> v;
    // model
    v.push_back(real_field("model", "U", [](auto& c) -> auto& { return c.model.U; }));
    v.push_back(real_field("model", "V", [](auto& c) -> auto& { return c.model.V; }));
    v.push_back({"model", "mu",
                 [](RunConfig& c, const std::string& s) {
                   if (s == "half-filling" || s == "U/2") {
                     c.mu_convention = mu_convention_from_string(s);
                   } else {
                     c.model.mu = parse_double(s);
                     c.mu_convention = MuConvention::Explicit;
                   }
                 },
                 [](const RunConfig& c) {
                   return c.mu_convention == MuConvention::Explicit ? fmt_double(c.model.mu)
                                                                    : to_string(c.mu_convention);
                 }});
    v.push_back(real_field("model", "omega0", [](auto& c) -> auto& { return c.model.omega0; }, positive));
    v.push_back(real_field("model", "lambda", [](auto& c) -> auto& { return c.model.lambda; }));
    v.push_back(
        int_field("model", "n_boson_levels", [](auto& c) -> auto& { return c.model.n_boson_levels; }, 2));
    // landscape
    v.push_back(int_field(
        "landscape", "theta0_points", [](auto& c) -> auto& { return c.landscape.theta0_points; }, 2));
    v.push_back(int_field(
        "landscape", "theta1_points", [](auto& c) -> auto& { return c.landscape.theta1_points; }, 2));
    v.push_back(
        real_field("landscape", "theta0_min", [](auto& c) -> auto& { return c.landscape.theta0_min; }));
    v.push_back(
        real_field("landscape", "theta0_max", [](auto& c) -> auto& { return c.landscape.theta0_max; }));
    v.push_back(
        real_field("landscape", "theta1_min", [](auto& c) -> auto& { return c.landscape.theta1_min; }));
    v.push_back(
        real_field("landscape", "theta1_max", [](auto& c) -> auto& { return c.landscape.theta1_max; }));
    v.push_back(enum_field(
        "landscape", "mode", [](auto& c) -> auto& { return c.landscape_mode; }, eval_mode_from_string,
        eval_mode_name));
    // krylov
    v.push_back(enum_field(
        "krylov", "mode", [](auto& c) -> auto& { return c.krylov.mode; }, krylov_mode_from_string,
        [](KrylovMode m) { return to_string(m); }));
    v.push_back(int_field("krylov", "depth", [](auto& c) -> auto& { return c.krylov_depth; }, 0));
    v.push_back(enum_field(
        "krylov", "ground_state", [](auto& c) -> auto& { return c.krylov_ground_state; },
        ground_state_source_from_string, [](GroundStateSource g) { return to_string(g); }));
    v.push_back(enum_field(
        "krylov", "side", [](auto& c) -> auto& { return c.krylov_side; }, spectrum_side_from_string,
        [](SpectrumSide s) { return to_string(s); }));
    v.push_back(int_field(
        "krylov", "theta0_points", [](auto& c) -> auto& { return c.krylov.grid.theta0_points; }, 2));
    v.push_back(int_field(
        "krylov", "theta1_points", [](auto& c) -> auto& { return c.krylov.grid.theta1_points; }, 2));
    v.push_back(
        int_field("krylov", "t_points", [](auto& c) -> auto& { return c.krylov.short_time.t_points; }, 2));
    v.push_back(
        real_field("krylov", "t_min", [](auto& c) -> auto& { return c.krylov.short_time.t_min; }, positive));
    v.push_back(
        real_field("krylov", "t_max", [](auto& c) -> auto& { return c.krylov.short_time.t_max; }, positive));
    v.push_back(bool_field("krylov", "trotter_estimator",
                           [](auto& c) -> auto& { return c.krylov.short_time.trotter; }));
    v.push_back({"krylov", "b2_floor",
                 [](RunConfig& c, const std::string& s) {
                   if (s == "auto") {
                     c.krylov.b2_floor.reset();
                   } else {
                     const double x = parse_double(s);
                     non_negative(x);
                     c.krylov.b2_floor = x;
                   }
                 },
                 [](const RunConfig& c) {
                   return c.krylov.b2_floor ? fmt_double(*c.krylov.b2_floor) : std::string("auto");
                 }});
    v.push_back(bool_field("krylov", "refine", [](auto& c) -> auto& { return c.krylov.refine; }));
    // spectrum
    v.push_back(real_field("spectrum", "omega_min", [](auto& c) -> auto& { return c.spectrum.omega_min; }));
    v.push_back(real_field("spectrum", "omega_max", [](auto& c) -> auto& { return c.spectrum.omega_max; }));
    v.push_back(int_field("spectrum", "n_points", [](auto& c) -> auto& { return c.spectrum.n_points; }, 2));
    v.push_back(real_field("spectrum", "delta", [](auto& c) -> auto& { return c.spectrum.delta; }, positive));
    v.push_back(enum_field(
        "spectrum", "source", [](auto& c) -> auto& { return c.spectrum_source; }, spectrum_source_from_string,
        spectrum_source_name));
    // noise
    v.push_back(int_field("noise", "shots", [](auto& c) -> auto& { return c.noise.shots; }, 1));
    v.push_back(real_field(
        "noise", "readout_flip", [](auto& c) -> auto& { return c.noise.readout_flip; },
        [](double x) { require(x >= 0.0 && x <= 0.5, "must lie in [0, 0.5]"); }));
    // dmft
    v.push_back(real_field("dmft", "m2", [](auto& c) -> auto& { return c.dmft.m2; }, positive));
    v.push_back(real_field("dmft", "v_initial", [](auto& c) -> auto& { return c.dmft.v_initial; }, positive));
    v.push_back(real_field("dmft", "tol", [](auto& c) -> auto& { return c.dmft.tol; }, positive));
    v.push_back(int_field("dmft", "max_iter", [](auto& c) -> auto& { return c.dmft.max_iter; }, 1));
    v.push_back(real_field(
        "dmft", "mixing", [](auto& c) -> auto& { return c.dmft.mixing; },
        [](double x) { require(x > 0.0 && x <= 1.0, "must lie in (0, 1]"); }));
    v.push_back(enum_field(
        "dmft", "solver", [](auto& c) -> auto& { return c.dmft.solver; }, impurity_solver_from_string,
        [](ImpuritySolver s) { return to_string(s); }));
    v.push_back(enum_field(
        "dmft", "z_method", [](auto& c) -> auto& { return c.dmft.z_method; }, z_method_from_string,
        [](ZMethod m) { return to_string(m); }));
    v.push_back(int_field("dmft", "depth", [](auto& c) -> auto& { return c.dmft.depth; }, 0));
    v.push_back(enum_field(
        "dmft", "side", [](auto& c) -> auto& { return c.dmft.side; }, spectrum_side_from_string,
        [](SpectrumSide s) { return to_string(s); }));
    v.push_back(enum_field(
        "dmft", "action", [](auto& c) -> auto& { return c.dmft_action; }, dmft_action_from_string,
        dmft_action_name));
    v.push_back(real_field("dmft", "scan_v_min", [](auto& c) -> auto& { return c.scan_v_min; }, positive));
    v.push_back(real_field("dmft", "scan_v_max", [](auto& c) -> auto& { return c.scan_v_max; }, positive));
    v.push_back(int_field("dmft", "scan_points", [](auto& c) -> auto& { return c.scan_points; }, 2));
    // time
    v.push_back(real_field("time", "t_max", [](auto& c) -> auto& { return c.time.t_max; }, positive));
    v.push_back(int_field("time", "n_steps", [](auto& c) -> auto& { return c.time.n_steps; }, 1));
    v.push_back(int_field("time", "n_t", [](auto& c) -> auto& { return c.n_t; }, 1));
    v.push_back(int_field("time", "vha_layers", [](auto& c) -> auto& { return c.vha_layers; }, 1));
    v.push_back({"time", "ordering", [](RunConfig& c, const std::string& s) { c.ordering = s; },
                 [](const RunConfig& c) { return c.ordering; }});
    // run
    v.push_back(int_field("run", "seed", [](auto& c) -> auto& { return c.seed; }, 0));
    v.push_back({"run", "output_dir",
                 [](RunConfig& c, const std::string& s) {
                   require(!s.empty(), "must not be empty");
                   c.output_dir = s;
                 },
                 [](const RunConfig& c) { return c.output_dir; }});
    v.push_back(bool_field("run", "emit_plots", [](auto& c) -> auto& { return c.emit_plots; }));
    return v;
  }();
  return f;
}

}  // namespace

void RunConfig::validate() const {
  auto wrap = [](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const InvalidArgument& e) {
      throw ConfigError(key, e.what());
    }
  };
  wrap("model", [&] { model.validate(); });
  wrap("landscape", [&] { landscape.validate(); });
  wrap("krylov", [&] { krylov.validate(); });
  wrap("spectrum", [&] { spectrum.validate(); });
  wrap("noise", [&] { noise.validate(); });
  wrap("dmft", [&] { dmft.validate(); });
  wrap("time", [&] { time.validate(); });
  if (!(scan_v_max > scan_v_min)) throw ConfigError("dmft.scan_v_max", "must exceed scan_v_min");
  if (!ordering.empty()) {
    wrap("time.ordering", [&] { parse_ordering(ordering, build_full_pauli_hamiltonian(model).size()); });
  }
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", fmt::format("syntax error at line {}: {}", e.line(), e.message()));
  }
  std::map<std::string, std::map<std::string, const Field*>> index;
  for (const auto& f : fields()) index[f.section][f.key] = &f;

  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "key outside of any section");
    }
    const auto sec = index.find(section);
    if (sec == index.end()) throw ConfigError(section, "unknown section");
    std::set<std::string> seen;
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) throw ConfigError(path, "unknown key");
      if (!seen.insert(key).second) throw ConfigError(path, "duplicate key");
      try {
        it->second->set(cfg, value.data());
      } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config file {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const RunConfig& cfg) {
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    if (f.section != current) {
      if (!current.empty()) out += "\n";
      out += fmt::format("[{}]\n", f.section);
      current = f.section;
    }
    out += fmt::format("{} = {}\n", f.key, f.get(cfg));
  }
  return out;
}

std::string git_blob_hash(const std::string& text) {
  const std::string blob = fmt::format("blob {}", text.size()) + std::string(1, '\0') + text;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw InternalConsistencyError("SHA-1 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace hhdmft
