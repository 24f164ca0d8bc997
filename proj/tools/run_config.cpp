#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace qlpme::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string section;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of a [section]");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string full = section + "." + key;
    if (cfg.entries_.count(full)) throw ConfigError(where + ": duplicate key " + full);
    cfg.entries_[full] = Entry{trim(line.substr(eq + 1)), number};
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
  return entries_.at(key).value;
}

int KeyValueConfig::line(const std::string& key) const { return entries_.at(key).line; }

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(const KeyValueConfig& kv) : kv_(kv) {}

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ConfigError(key + ": " + why);
  }

  void real(const std::string& key, double& out) {
    if (!take(key)) return;
    out = to_double(key, kv_.raw(key));
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (!take(key)) return;
    out = static_cast<Int>(to_long(key, kv_.raw(key)));
  }

  void boolean(const std::string& key, bool& out) {
    if (!take(key)) return;
    const std::string v = unquote(kv_.raw(key));
    if (v == "true" || v == "yes" || v == "1") {
      out = true;
    } else if (v == "false" || v == "no" || v == "0") {
      out = false;
    } else {
      fail(key, "expected true or false, got '" + v + "'");
    }
  }

  void string(const std::string& key, std::string& out) {
    if (!take(key)) return;
    out = unquote(kv_.raw(key));
  }

  void path(const std::string& key, std::optional<std::filesystem::path>& out) {
    if (!take(key)) return;
    out = std::filesystem::path(unquote(kv_.raw(key)));
  }

  void words(const std::string& key, std::vector<std::string>& out) {
    if (!take(key)) return;
    out = items(key);
  }

  void integers(const std::string& key, std::vector<int>& out) {
    if (!take(key)) return;
    out.clear();
    for (const auto& item : items(key)) out.push_back(static_cast<int>(to_long(key, item)));
  }

  void grid_pairs(const std::string& key, std::vector<std::pair<Index, Index>>& out) {
    if (!take(key)) return;
    out.clear();
    for (const auto& item : items(key)) {
      const auto x = item.find('x');
      if (x == std::string::npos) fail(key, "expected entries of the form NXxNT, got '" + item + "'");
      out.emplace_back(to_long(key, item.substr(0, x)), to_long(key, item.substr(x + 1)));
    }
  }

  /// First key the reader never consumed, if any.
  std::optional<std::string> unknown() const {
    for (const auto& k : kv_.keys()) {
      if (!used_.count(k)) return k;
    }
    return std::nullopt;
  }

 private:
  bool take(const std::string& key) {
    used_.insert(key);
    return kv_.contains(key);
  }

  std::vector<std::string> items(const std::string& key) const {
    std::string v = trim(kv_.raw(key));
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
      fail(key, "expected a bracketed list like [a, b]");
    }
    v = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = unquote(trim(item));
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  double to_double(const std::string& key, const std::string& text) const {
    const std::string v = trim(text);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
      fail(key, "expected a finite number, got '" + v + "'");
    }
    return out;
  }

  long to_long(const std::string& key, const std::string& text) const {
    const std::string v = trim(text);
    long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      fail(key, "expected an integer, got '" + v + "'");
    }
    return out;
  }

  const KeyValueConfig& kv_;
  std::set<std::string> used_;
};

void check(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw ConfigError(key + ": " + why);
}

}  // namespace

RunConfig RunConfig::from(const KeyValueConfig& kv) {
  RunConfig c;
  Reader r(kv);

  r.real("domain.x_a", c.x_a);
  r.real("domain.x_b", c.x_b);
  r.integer("grid.nx", c.nx);
  r.integer("grid.nt", c.nt);
  r.real("time.T", c.horizon);

  r.string("data.preset", c.data.preset);
  r.path("data.phi0_csv", c.data.phi0_csv);
  // u0 and w0 are alternative spellings of the reduced initial datum.
  for (const char* alias : {"data.u0_csv", "data.w0_csv"}) {
    std::optional<std::filesystem::path> p;
    r.path(alias, p);
    if (p) {
      check(!c.data.phi0_csv, alias, "conflicts with another phi0/u0/w0 csv key");
      c.data.phi0_csv = p;
    }
  }
  r.path("data.f0_csv", c.data.f0_csv);
  r.path("data.W0_csv", c.data.W0_csv);
  r.path("data.g0_csv", c.data.g0_csv);
  r.real("data.amplitude", c.data.params.amplitude);
  r.real("data.center", c.data.params.center);
  r.real("data.width", c.data.params.width);
  r.real("data.bump_height", c.data.params.bump_height);

  r.integer("regularization.n", c.n);
  r.integers("regularization.n_list", c.n_list);

  r.integers("functionals.l_list", c.functionals.l_values);
  r.real("functionals.s", c.functionals.s);
  r.real("functionals.sigma", c.functionals.sigma);
  r.real("functionals.theta", c.functionals.theta);
  r.real("functionals.delta", c.functionals.delta);
  r.real("functionals.alpha", c.functionals.alpha);
  r.real("functionals.epsilon", c.functionals.epsilon);
  r.real("functionals.nu", c.functionals.nu);

  std::optional<std::filesystem::path> dir;
  r.path("output.directory", dir);
  if (dir) c.output.directory = *dir;
  std::vector<std::string> formats;
  r.words("output.formats", formats);
  if (kv.contains("output.formats")) {
    c.output.csv = c.output.json = c.output.svg = false;
    for (const auto& f : formats) {
      if (f == "csv") {
        c.output.csv = true;
      } else if (f == "json") {
        c.output.json = true;
      } else if (f == "svg") {
        c.output.svg = true;
      } else {
        check(false, "output.formats", "unknown format '" + f + "' (csv, json, svg)");
      }
    }
  }
  r.boolean("output.snapshots", c.output.snapshots);

  r.real("tolerances.max_principle_lower", c.tolerances.max_principle_lower);
  r.real("tolerances.max_principle_upper", c.tolerances.max_principle_upper);
  r.real("tolerances.linear_solver", c.tolerances.linear_solver);
  r.real("tolerances.dt_safety", c.tolerances.dt_safety);
  r.real("tolerances.uniformity_factor", c.tolerances.uniformity_factor);
  r.real("tolerances.scale", c.tolerances.scale);

  r.grid_pairs("refinement.grids", c.refinement_grids);

  if (auto key = r.unknown()) {
    throw ConfigError(*key + ": unknown key (line " + std::to_string(kv.line(*key)) + ")");
  }

  check(c.x_a > 0.0, "domain.x_a", "must be positive");
  check(c.x_b > c.x_a, "domain.x_b", "must exceed domain.x_a");
  check(c.nx >= 4, "grid.nx", "must be at least 4");
  check(c.nt >= 2, "grid.nt", "must be at least 2");
  check(c.horizon > 0.0, "time.T", "must be positive");
  check(parse_preset(c.data.preset).has_value(), "data.preset",
        "unknown preset '" + c.data.preset +
            "' (zero, bump_on_tail, linear_equilibrium, constant_f0)");
  check(c.data.params.amplitude >= 0.0, "data.amplitude", "must be nonnegative");
  check(c.data.params.width > 0.0, "data.width", "must be positive");
  check(c.data.params.bump_height >= 0.0, "data.bump_height", "must be nonnegative");
  check(c.n >= 1, "regularization.n", "must be a positive integer");
  check(!c.n_list.empty(), "regularization.n_list", "must not be empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    check(c.n_list[i] >= 1, "regularization.n_list", "entries must be positive");
    check(i == 0 || c.n_list[i] > c.n_list[i - 1], "regularization.n_list",
          "entries must be strictly increasing");
  }
  check(!c.functionals.l_values.empty(), "functionals.l_list", "must not be empty");
  for (int l : c.functionals.l_values) check(l >= 1, "functionals.l_list", "entries must be >= 1");
  const auto& f = c.functionals;
  check(f.s > 0.0 && f.s < 1.0, "functionals.s", "must lie in (0, 1)");
  check(f.sigma > 0.0 && f.sigma < 2.0, "functionals.sigma", "must lie in (0, 2)");
  check(f.theta > 0.0 && f.theta < 0.5, "functionals.theta", "must lie in (0, 1/2)");
  check(f.delta > 0.0 && f.delta < 1.0, "functionals.delta", "must lie in (0, 1)");
  check(f.alpha > 0.0 && f.alpha < 1.0, "functionals.alpha", "must lie in (0, 1)");
  check(f.epsilon > 0.0, "functionals.epsilon", "must be positive");
  check(f.nu > 0.0, "functionals.nu", "must be positive");
  const auto& t = c.tolerances;
  check(t.max_principle_lower > 0.0, "tolerances.max_principle_lower", "must be positive");
  check(t.max_principle_upper > 0.0, "tolerances.max_principle_upper", "must be positive");
  check(t.linear_solver > 0.0, "tolerances.linear_solver", "must be positive");
  check(t.dt_safety > 0.0 && t.dt_safety <= 1.0, "tolerances.dt_safety", "must lie in (0, 1]");
  check(t.uniformity_factor >= 1.0, "tolerances.uniformity_factor", "must be at least 1");
  check(t.scale > 0.0, "tolerances.scale", "must be positive");
  for (const auto& [nx, nt] : c.refinement_grids) {
    check(nx >= 4 && nt >= 2, "refinement.grids", "each grid needs nx >= 4 and nt >= 2");
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return from(KeyValueConfig::load(path));
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.dt_safety = tolerances.dt_safety;
  s.max_principle_tol = tolerances.max_principle_lower;
  s.max_principle_upper_tol = tolerances.max_principle_upper;
  s.linear_solver_tol = tolerances.linear_solver;
  return s;
}

ValidationSettings RunConfig::validation_settings() const {
  ValidationSettings v;
  v.x_a = x_a;
  v.x_b = x_b;
  v.nx = nx;
  v.nt = nt;
  v.horizon = horizon;
  v.n_values = n_list;
  v.preset = *parse_preset(data.preset);
  v.params = data.params;
  v.functionals = functionals;
  v.solver = solver_config();
  v.tolerance_scale = tolerances.scale;
  v.uniformity_factor = tolerances.uniformity_factor;
  return v;
}

nlohmann::json RunConfig::to_json() const {
  using nlohmann::json;
  auto opt_path = [](const std::optional<std::filesystem::path>& p) -> json {
    return p ? json(p->string()) : json(nullptr);
  };
  json grids = json::array();
  for (const auto& [gx, gt] : refinement_grids) grids.push_back({gx, gt});
  return json{
      {"domain", {{"x_a", x_a}, {"x_b", x_b}}},
      {"grid", {{"nx", nx}, {"nt", nt}}},
      {"time", {{"T", horizon}}},
      {"data",
       {{"preset", data.preset},
        {"phi0_csv", opt_path(data.phi0_csv)},
        {"f0_csv", opt_path(data.f0_csv)},
        {"W0_csv", opt_path(data.W0_csv)},
        {"g0_csv", opt_path(data.g0_csv)},
        {"amplitude", data.params.amplitude},
        {"center", data.params.center},
        {"width", data.params.width},
        {"bump_height", data.params.bump_height}}},
      {"regularization", {{"n", n}, {"n_list", n_list}}},
      {"functionals",
       {{"l_list", functionals.l_values},
        {"s", functionals.s},
        {"sigma", functionals.sigma},
        {"theta", functionals.theta},
        {"delta", functionals.delta},
        {"alpha", functionals.alpha},
        {"epsilon", functionals.epsilon},
        {"nu", functionals.nu}}},
      {"output",
       {{"directory", output.directory.string()},
        {"csv", output.csv},
        {"json", output.json},
        {"svg", output.svg},
        {"snapshots", output.snapshots}}},
      {"tolerances",
       {{"max_principle_lower", tolerances.max_principle_lower},
        {"max_principle_upper", tolerances.max_principle_upper},
        {"linear_solver", tolerances.linear_solver},
        {"dt_safety", tolerances.dt_safety},
        {"uniformity_factor", tolerances.uniformity_factor},
        {"scale", tolerances.scale}}},
      {"refinement", {{"grids", grids}}},
  };
}

}  // namespace qlpme::cli
