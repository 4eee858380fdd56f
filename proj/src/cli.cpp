#include "casimir/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "casimir/asymptotics.hpp"
#include "casimir/format.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/modes.hpp"

#ifndef CASIMIR_VERSION
#define CASIMIR_VERSION "0.0.0"
#endif

namespace casimir::cli {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Canonical key order of the echoed configuration.
const std::vector<std::string> kKeys = {
    "command", "model",  "rho",       "omega_p",  "gamma0",  "alpha2",
    "L",       "tau",    "taus",      "tau0",     "tau_count", "polarization",
    "k",       "xi_max", "xi_count",  "re_min",   "re_max",  "im_min",
    "im_max",  "max_count", "Lambda", "sweep",    "values",  "quantity",
    "rel_tol", "abs_tol", "output"};

const std::map<std::string, Command> kCommands = {
    {"energy", Command::energy}, {"entropy", Command::entropy},
    {"force", Command::force},   {"gcurve", Command::gcurve},
    {"modes", Command::modes},   {"nernst", Command::nernst},
    {"sweep", Command::sweep}};

std::string command_name(Command c) {
  for (const auto& [name, cmd] : kCommands) {
    if (cmd == c) return name;
  }
  return "unknown";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out)) {
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return out;
}

std::vector<double> to_grid(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "grid is empty");
  for (std::size_t j = 1; j < out.size(); ++j) {
    if (!(out[j] > out[j - 1])) throw ConfigError(key, "grid must be increasing");
  }
  return out;
}

std::string grid_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j > 0) s += ',';
    s += format_double(v[j]);
  }
  return s;
}

void require_key(const std::map<std::string, std::string>& kv, const std::string& key,
                 const std::string& why) {
  if (!kv.count(key)) throw ConfigError(key, "missing required key (" + why + ")");
}

void forbid_key(const std::map<std::string, std::string>& kv, const std::string& key,
                const std::string& why) {
  if (kv.count(key)) throw ConfigError(key, "key does not apply " + why);
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
}

DielectricModel parse_model(const std::map<std::string, std::string>& kv) {
  require_key(kv, "model", "mirror model");
  const std::string name = kv.at("model");
  auto get = [&](const std::string& key) {
    require_key(kv, key, "parameter of model " + name);
    return to_double(key, kv.at(key));
  };
  std::set<std::string> params;
  DielectricModel model;
  if (name == "perfect") {
    model = PerfectMirror{};
  } else if (name == "constant_r") {
    const double rho = get("rho");
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho", "must lie in [0, 1)");
    model = ConstantR{rho};
    params = {"rho"};
  } else if (name == "plasma") {
    const double wp = get("omega_p");
    require_positive("omega_p", wp);
    model = Plasma{wp};
    params = {"omega_p"};
  } else if (name == "drude" || name == "drude_thermal") {
    const double wp = get("omega_p");
    require_positive("omega_p", wp);
    const double g0 = get("gamma0");
    if (!(g0 >= 0.0)) throw ConfigError("gamma0", "must be non-negative");
    params = {"omega_p", "gamma0"};
    if (name == "drude") {
      model = Drude{wp, g0};
    } else {
      const double a2 = get("alpha2");
      if (!(a2 >= 0.0)) throw ConfigError("alpha2", "must be non-negative");
      model = DrudeThermal{wp, g0, a2};
      params.insert("alpha2");
    }
  } else {
    throw ConfigError("model",
                      "unknown model '" + name +
                          "' (perfect, constant_r, plasma, drude, drude_thermal)");
  }
  for (const char* p : {"rho", "omega_p", "gamma0", "alpha2"}) {
    if (!params.count(p)) forbid_key(kv, p, "to model " + name);
  }
  return model;
}

bool has_thermal(const RunConfig& c) {
  return c.tau.has_value() || !c.taus.empty() || c.tau0.has_value();
}

LifshitzOptions lifshitz_options(const RunConfig& c) {
  LifshitzOptions o;
  if (c.rel_tol) o.k_rel_tol = o.sum_rel_tol = *c.rel_tol;
  if (c.abs_tol) o.abs_tol = *c.abs_tol;
  return o;
}

Tolerance tolerance(const RunConfig& c) {
  return {c.rel_tol.value_or(1e-12), c.abs_tol.value_or(1e-300)};
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& detail)
    : Error(ErrorCode::invalid_argument, key + ": " + detail), key_(std::move(key)) {}

std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::stringstream words(line);
    std::string word;
    // Several pairs may share a line, separated by blanks.
    while (words >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ConfigError(word, "expected key=value");
      }
      std::string key = word.substr(0, eq);
      while (!key.empty() && key.front() == '-') key.erase(0, 1);
      out.emplace_back(key, word.substr(eq + 1));
    }
  }
  return out;
}

RunConfig parse_config(const std::string& text) { return parse_config(parse_pairs(text)); }

RunConfig parse_config(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : pairs) {
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end()) {
      throw ConfigError(k, "unknown key");
    }
    if (v.empty()) throw ConfigError(k, "empty value");
    kv[k] = v;
  }
  RunConfig c;
  for (const auto& k : kKeys) {
    if (kv.count(k)) c.keys.push_back(k);
  }

  require_key(kv, "command", "what to compute");
  const auto cmd = kCommands.find(kv.at("command"));
  if (cmd == kCommands.end()) {
    throw ConfigError("command", "unknown command '" + kv.at("command") + "'");
  }
  c.command = cmd->second;
  c.cavity.model = parse_model(kv);
  require_key(kv, "L", "mirror separation");
  c.cavity.L = to_double("L", kv.at("L"));
  require_positive("L", c.cavity.L);

  if (kv.count("tau")) {
    c.tau = to_double("tau", kv.at("tau"));
    if (*c.tau < 0.0) throw ConfigError("tau", "must be non-negative");
  }
  if (kv.count("taus")) {
    c.taus = to_grid("taus", kv.at("taus"));
    if (!(c.taus.front() > 0.0)) throw ConfigError("taus", "must be positive");
  }
  if (kv.count("tau0")) {
    c.tau0 = to_double("tau0", kv.at("tau0"));
    require_positive("tau0", *c.tau0);
    require_key(kv, "tau_count", "length of the tau0 schedule");
  }
  if (kv.count("tau_count")) {
    require_key(kv, "tau0", "start of the schedule");
    c.tau_count = to_int("tau_count", kv.at("tau_count"));
    if (*c.tau_count < 3) throw ConfigError("tau_count", "needs at least 3 points");
  }
  if (int(kv.count("tau")) + int(kv.count("taus")) + int(kv.count("tau0")) > 1) {
    throw ConfigError("tau", "give only one of tau, taus, tau0");
  }

  if (kv.count("polarization")) {
    const auto& p = kv.at("polarization");
    if (p == "te") {
      c.polarization = Polarization::TE;
    } else if (p == "tm") {
      c.polarization = Polarization::TM;
    } else {
      throw ConfigError("polarization", "must be te or tm");
    }
  }
  if (kv.count("k")) {
    c.k = to_double("k", kv.at("k"));
    if (*c.k < 0.0) throw ConfigError("k", "must be non-negative");
  }
  if (kv.count("xi_max")) {
    c.xi_max = to_double("xi_max", kv.at("xi_max"));
    require_positive("xi_max", *c.xi_max);
  }
  if (kv.count("xi_count")) {
    c.xi_count = to_int("xi_count", kv.at("xi_count"));
    if (c.xi_count < 2) throw ConfigError("xi_count", "needs at least 2 points");
  }
  for (auto [key, field] : {std::pair{"re_min", &c.re_min}, std::pair{"re_max", &c.re_max},
                            std::pair{"im_min", &c.im_min}, std::pair{"im_max", &c.im_max}}) {
    if (kv.count(key)) *field = to_double(key, kv.at(key));
  }
  if (kv.count("max_count")) {
    c.max_count = to_int("max_count", kv.at("max_count"));
    if (c.max_count < 1) throw ConfigError("max_count", "must be positive");
  }
  if (kv.count("Lambda")) {
    c.Lambda = to_double("Lambda", kv.at("Lambda"));
    require_positive("Lambda", c.Lambda);
  }
  if (kv.count("rel_tol")) {
    c.rel_tol = to_double("rel_tol", kv.at("rel_tol"));
    require_positive("rel_tol", *c.rel_tol);
  }
  if (kv.count("abs_tol")) {
    c.abs_tol = to_double("abs_tol", kv.at("abs_tol"));
    require_positive("abs_tol", *c.abs_tol);
  }
  if (kv.count("output")) c.output = kv.at("output");
  if (kv.count("quantity")) c.quantity = kv.at("quantity");

  auto need_channel = [&](const std::string& why) {
    require_key(kv, "polarization", why);
    require_key(kv, "k", why);
  };
  const std::string for_cmd = "to command " + kv.at("command");
  switch (c.command) {
    case Command::energy:
      if (c.k) need_channel("per-channel energy");
      if (!c.k) forbid_key(kv, "polarization", "without k");
      break;
    case Command::entropy:
    case Command::force:
      forbid_key(kv, "k", for_cmd);
      forbid_key(kv, "polarization", for_cmd);
      if (c.command == Command::entropy && !has_thermal(c)) {
        throw ConfigError("tau", "entropy needs tau, taus or tau0");
      }
      break;
    case Command::gcurve:
      require_key(kv, "k", "transverse wavenumber of the curve");
      require_key(kv, "xi_max", "end of the xi grid");
      forbid_key(kv, "polarization", "(both polarizations are written)");
      if (!c.taus.empty() || c.tau0) throw ConfigError("tau", "gcurve takes a single tau");
      break;
    case Command::modes:
      need_channel("channel of the mode search");
      for (const char* key : {"re_min", "re_max", "im_min", "im_max"}) {
        require_key(kv, key, "search rectangle");
      }
      if (!(*c.re_min < *c.re_max)) throw ConfigError("re_max", "must exceed re_min");
      if (!(*c.im_min < *c.im_max)) throw ConfigError("im_max", "must exceed im_min");
      if (!(*c.im_min < 0.0)) throw ConfigError("im_min", "must be negative");
      if (*c.re_min < 0.0) throw ConfigError("re_min", "must be non-negative");
      if (!c.taus.empty() || c.tau0) throw ConfigError("tau", "modes takes a single tau");
      break;
    case Command::nernst:
      if (has_thermal(c)) throw ConfigError("tau", "nernst takes no temperature");
      break;
    case Command::sweep: {
      require_key(kv, "sweep", "parameter to sweep");
      require_key(kv, "values", "sweep grid");
      c.sweep = kv.at("sweep");
      c.values = to_grid("values", kv.at("values"));
      if (c.sweep != "L" && c.sweep != "tau" && c.sweep != "gamma0" && c.sweep != "Lambda") {
        throw ConfigError("sweep", "must be one of L, tau, gamma0, Lambda");
      }
      if (c.sweep == "Lambda") {
        if (c.quantity != "pole_energy") {
          throw ConfigError("quantity", "a Lambda sweep needs quantity=pole_energy");
        }
      } else if (c.quantity != "energy" && c.quantity != "entropy" &&
                 c.quantity != "force" && c.quantity != "pole_energy") {
        throw ConfigError("quantity", "must be energy, entropy, force or pole_energy");
      }
      if (c.quantity == "pole_energy") need_channel("pole-sum energy");
      if (c.quantity != "pole_energy") {
        forbid_key(kv, "k", "to k-integrated quantities");
        forbid_key(kv, "polarization", "to k-integrated quantities");
      }
      if (c.sweep == "tau") {
        forbid_key(kv, "tau", "when sweeping tau");
        if (!(c.values.front() > 0.0)) throw ConfigError("values", "tau must be positive");
      } else if (!c.taus.empty() || c.tau0) {
        throw ConfigError("tau", "a sweep takes a single tau");
      }
      if (c.sweep == "L" && !(c.values.front() > 0.0)) {
        throw ConfigError("values", "L must be positive");
      }
      if (c.sweep == "gamma0") {
        if (!std::holds_alternative<Drude>(c.cavity.model) &&
            !std::holds_alternative<DrudeThermal>(c.cavity.model)) {
          throw ConfigError("sweep", "gamma0 sweeps need a Drude model");
        }
        if (c.values.front() < 0.0) throw ConfigError("values", "gamma0 must be non-negative");
      }
      if (c.sweep == "Lambda" && !(c.values.front() > 0.0)) {
        throw ConfigError("values", "Lambda must be positive");
      }
      if (c.quantity == "entropy" && c.sweep != "tau" && !c.tau) {
        throw ConfigError("tau", "entropy needs tau");
      }
      break;
    }
  }
  if (c.command != Command::sweep) {
    forbid_key(kv, "sweep", for_cmd);
    forbid_key(kv, "values", for_cmd);
    forbid_key(kv, "quantity", for_cmd);
  }
  return c;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  auto put = [&](const std::string& k, const std::string& v) { os << k << '=' << v << '\n'; };
  auto has = [&](const std::string& k) {
    return std::find(c.keys.begin(), c.keys.end(), k) != c.keys.end();
  };
  put("command", command_name(c.command));
  std::visit(Overloaded{
                 [&](const PerfectMirror&) { put("model", "perfect"); },
                 [&](const ConstantR& m) {
                   put("model", "constant_r");
                   put("rho", format_double(m.rho));
                 },
                 [&](const Plasma& m) {
                   put("model", "plasma");
                   put("omega_p", format_double(m.omega_p));
                 },
                 [&](const Drude& m) {
                   put("model", "drude");
                   put("omega_p", format_double(m.omega_p));
                   put("gamma0", format_double(m.gamma0));
                 },
                 [&](const DrudeThermal& m) {
                   put("model", "drude_thermal");
                   put("omega_p", format_double(m.omega_p));
                   put("gamma0", format_double(m.gamma0));
                   put("alpha2", format_double(m.alpha2));
                 },
             },
             c.cavity.model);
  put("L", format_double(c.cavity.L));
  if (c.tau) put("tau", format_double(*c.tau));
  if (!c.taus.empty()) put("taus", grid_text(c.taus));
  if (c.tau0) put("tau0", format_double(*c.tau0));
  if (c.tau_count) put("tau_count", std::to_string(*c.tau_count));
  if (c.polarization) put("polarization", *c.polarization == Polarization::TE ? "te" : "tm");
  if (c.k) put("k", format_double(*c.k));
  if (c.xi_max) put("xi_max", format_double(*c.xi_max));
  if (has("xi_count")) put("xi_count", std::to_string(c.xi_count));
  if (c.re_min) put("re_min", format_double(*c.re_min));
  if (c.re_max) put("re_max", format_double(*c.re_max));
  if (c.im_min) put("im_min", format_double(*c.im_min));
  if (c.im_max) put("im_max", format_double(*c.im_max));
  if (has("max_count")) put("max_count", std::to_string(c.max_count));
  if (has("Lambda")) put("Lambda", format_double(c.Lambda));
  if (!c.sweep.empty()) put("sweep", c.sweep);
  if (!c.values.empty()) put("values", grid_text(c.values));
  if (has("quantity")) put("quantity", c.quantity);
  if (c.rel_tol) put("rel_tol", format_double(*c.rel_tol));
  if (c.abs_tol) put("abs_tol", format_double(*c.abs_tol));
  if (!c.output.empty()) put("output", c.output);
  return os.str();
}

std::string version() { return CASIMIR_VERSION; }

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::out_of_range:
    case ErrorCode::singular_frequency:
    case ErrorCode::singular_spectral_point:
    case ErrorCode::on_pole:
      return 2;
    default:
      return 1;
  }
}

namespace {

struct Row {
  double x;
  double value;
  double error;
};

void write_rows(std::ostream& out, const std::string& column, const std::vector<Row>& rows) {
  out << column << ",value,error\n";
  for (const auto& r : rows) {
    out << format_double(r.x) << ',' << format_double(r.value) << ','
        << format_double(r.error) << '\n';
  }
}

// One thermodynamic quantity at one temperature (tau = 0 allowed where a
// zero-temperature form exists).
Row thermal_value(const RunConfig& c, const CavityConfig& cav, const std::string& what,
                  double tau) {
  const auto opts = lifshitz_options(c);
  if (what == "energy") {
    if (c.k) {
      const TransverseMode m{*c.polarization, *c.k};
      if (tau == 0.0) return {tau, channel_energy_T0(cav, m, tolerance(c)), 0.0};
      const auto r = channel_free_energy(cav, m, tau, c.rel_tol.value_or(1e-14));
      return {tau, r.value, r.error};
    }
    if (tau == 0.0) {
      const auto r = energy_integral_T0(cav, opts);
      return {tau, r.value, r.error};
    }
    const auto r = free_energy(cav, tau, opts);
    return {tau, r.value, r.error};
  }
  if (what == "force") {
    if (tau == 0.0) {
      const auto r = force_integral_T0(cav, opts);
      return {tau, r.value, r.error};
    }
    const auto r = force(cav, tau, opts);
    return {tau, r.value, r.error};
  }
  if (tau == 0.0) throw Error(ErrorCode::invalid_argument, "entropy needs tau > 0");
  const auto r = entropy_matsubara(cav, tau, opts);
  return {tau, r.value, r.error};
}

void run_thermal(const RunConfig& c, const std::string& what, std::ostream& out) {
  std::vector<Row> rows;
  if (c.tau0) {
    auto f = [&](double tau) {
      const auto r = thermal_value(c, c.cavity, what, tau);
      rows.push_back(r);
      return r.value;
    };
    const auto lim = zero_temperature_limit(f, *c.tau0, *c.tau_count);
    rows.push_back({0.0, lim.value, lim.residual});
  } else if (!c.taus.empty()) {
    for (double tau : c.taus) rows.push_back(thermal_value(c, c.cavity, what, tau));
  } else {
    rows.push_back(thermal_value(c, c.cavity, what, c.tau.value_or(0.0)));
  }
  write_rows(out, "tau", rows);
}

void run_sweep(const RunConfig& c, std::ostream& out) {
  std::vector<Row> rows;
  for (double v : c.values) {
    CavityConfig cav = c.cavity;
    double tau = c.tau.value_or(0.0);
    double Lambda = c.Lambda;
    if (c.sweep == "L") {
      cav.L = v;
    } else if (c.sweep == "tau") {
      tau = v;
    } else if (c.sweep == "gamma0") {
      if (auto* m = std::get_if<Drude>(&cav.model)) m->gamma0 = v;
      if (auto* m = std::get_if<DrudeThermal>(&cav.model)) m->gamma0 = v;
    } else {
      Lambda = v;
    }
    Row r{};
    if (c.quantity == "pole_energy") {
      const TransverseMode m{*c.polarization, *c.k};
      const auto p = tau > 0.0 ? pole_sum_energy_finiteT(cav, m, tau, 0, Lambda)
                               : pole_sum_energy_T0(cav, m, Lambda);
      r = {v, p.value, p.change};
    } else {
      r = thermal_value(c, cav, c.quantity, tau);
    }
    r.x = v;
    rows.push_back(r);
  }
  write_rows(out, c.sweep, rows);
}

void run_gcurve(const RunConfig& c, std::ostream& out) {
  std::vector<double> xi(c.xi_count);
  for (int j = 0; j < c.xi_count; ++j) xi[j] = *c.xi_max * (j + 1) / c.xi_count;
  const double tau = c.tau.value_or(0.0);
  const auto te = sample_g_curve(c.cavity, {Polarization::TE, *c.k}, tau, xi);
  const auto tm = sample_g_curve(c.cavity, {Polarization::TM, *c.k}, tau, xi);
  out << spectral_curves_csv(te, tm);
}

void run_modes(const RunConfig& c, std::ostream& out) {
  ModeSearchOptions opts;
  opts.tau = c.tau.value_or(0.0);
  const auto ms = find_modes(c.cavity, {*c.polarization, *c.k},
                             {*c.re_min, *c.re_max, *c.im_min, *c.im_max},
                             c.max_count, opts);
  out << modes_csv(ms);
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::ostringstream body;
  try {
    switch (c.command) {
      case Command::energy: run_thermal(c, "energy", body); break;
      case Command::entropy: run_thermal(c, "entropy", body); break;
      case Command::force: run_thermal(c, "force", body); break;
      case Command::gcurve: run_gcurve(c, body); break;
      case Command::modes: run_modes(c, body); break;
      case Command::nernst: body << nernst_csv(residual_entropy(c.cavity)); break;
      case Command::sweep: run_sweep(c, body); break;
    }
  } catch (const ConfigError& e) {
    err << "error=" << to_string(e.code()) << " key=" << e.key() << " message=" << e.what()
        << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error=" << to_string(e.code()) << " message=" << e.what() << '\n';
    return exit_code(e.code());
  }
  out << "# casimir " << version() << '\n';
  std::stringstream cfg(to_text(c));
  std::string line;
  while (std::getline(cfg, line)) out << "# " << line << '\n';
  out << body.str();
  return 0;
}

}  // namespace casimir::cli
