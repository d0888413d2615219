#include "mhn/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "mhn/errors.hpp"

namespace mhn {

namespace {

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (...) {
  }
  throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (...) {
  }
  throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
}

std::vector<double> split_numbers(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(to_double(key, tok));
  return out;
}

DomainSpec parse_domain(const std::string& value, Point center) {
  std::istringstream is(value);
  std::string kind;
  is >> kind;
  std::vector<double> nums;
  double d;
  while (is >> d) nums.push_back(d);
  if (kind == "disk" && nums.size() == 1) return DomainSpec::disk(nums[0], center);
  if (kind == "ellipse" && nums.size() == 2) return DomainSpec::ellipse(nums[0], nums[1], center);
  if (kind == "superellipse" && nums.size() == 3)
    return DomainSpec::superellipse(nums[0], nums[1], nums[2], center);
  throw ConfigError("config: domain must be 'disk R', 'ellipse A B' or 'superellipse A B P', got '" +
                    value + "'");
}

}  // namespace

std::vector<Expr> RunConfig::alphas() const {
  std::vector<Expr> out;
  out.reserve(alpha_src.size());
  for (const auto& s : alpha_src) out.push_back(Expr::parse(s));
  return out;
}

Expr RunConfig::phi() const { return Expr::parse(phi_src); }

std::optional<Expr> RunConfig::reference() const {
  if (!reference_src) return std::nullopt;
  return Expr::parse(*reference_src);
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::map<int, std::string> alphas;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("alpha_", 0) == 0) {
      const int idx = int(to_long(key, key.substr(6)));
      if (!alphas.emplace(idx, value).second)
        throw ConfigError("config: duplicate key '" + key + "'");
      continue;
    }
    if (!kv.emplace(key, value).second)
      throw ConfigError("config: duplicate key '" + key + "'");
  }

  static const char* known[] = {"domain", "center", "k", "phi", "h", "eps0", "eps_ratio",
                                "eps_min", "newton_max_iter", "newton_tol_res", "newton_tol_step",
                                "tau_safety", "audits", "out", "reference", "c_ref",
                                "initial_scale", "seed"};
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* s) { return key == s; }) == std::end(known))
      throw ConfigError("config: unknown key '" + key + "'");
  }

  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(std::string("config: missing required key '") + key + "'");
    return it->second;
  };
  auto maybe = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  RunConfig rc;
  Point center{0, 0};
  if (const auto* c = maybe("center")) {
    const auto nums = split_numbers("center", *c);
    if (nums.size() != 2) throw ConfigError("config: center expects two numbers");
    center = {nums[0], nums[1]};
  }
  rc.domain = parse_domain(need("domain"), center);
  rc.k = int(to_long("k", need("k")));
  if (rc.k < 2) throw ConfigError("config: k must be >= 2");
  if (rc.k > 2) throw ConfigError("config: the planar solve supports k = 2 only");

  for (int l = 0; l < rc.k; ++l) {
    auto it = alphas.find(l);
    if (it == alphas.end())
      throw ConfigError("config: missing alpha_" + std::to_string(l) +
                        " (need exactly k = " + std::to_string(rc.k) + " entries)");
    rc.alpha_src.push_back(it->second);
  }
  if (int(alphas.size()) != rc.k)
    throw ConfigError("config: need exactly k = " + std::to_string(rc.k) + " alpha entries");
  rc.phi_src = need("phi");

  rc.h = to_double("h", need("h"));
  if (!(rc.h > 0)) throw ConfigError("config: h must be positive");
  if (rc.domain.diameter() / rc.h < 16.0)
    throw ConfigError("config: grid too coarse, need at least 16 nodes across the diameter");

  if (const auto* v = maybe("eps0")) rc.sched.eps0 = to_double("eps0", *v);
  if (const auto* v = maybe("eps_ratio")) rc.sched.ratio = to_double("eps_ratio", *v);
  if (const auto* v = maybe("eps_min")) rc.sched.eps_min = to_double("eps_min", *v);
  if (const auto* v = maybe("newton_max_iter")) rc.sched.max_iter = int(to_long("newton_max_iter", *v));
  if (const auto* v = maybe("newton_tol_res")) rc.sched.tol_res = to_double("newton_tol_res", *v);
  if (const auto* v = maybe("newton_tol_step")) rc.sched.tol_step = to_double("newton_tol_step", *v);
  if (const auto* v = maybe("tau_safety")) rc.sched.tau_safety = to_double("tau_safety", *v);
  rc.sched.validate();

  if (const auto* v = maybe("audits")) {
    if (*v == "on" || *v == "true" || *v == "1") rc.audits = true;
    else if (*v == "off" || *v == "false" || *v == "0") rc.audits = false;
    else throw ConfigError("config: audits expects on/off");
  }
  if (const auto* v = maybe("out")) rc.out_dir = *v;
  if (const auto* v = maybe("reference")) rc.reference_src = *v;
  if (const auto* v = maybe("c_ref")) rc.c_ref = to_double("c_ref", *v);
  if (const auto* v = maybe("initial_scale")) {
    rc.initial_scale = to_double("initial_scale", *v);
    if (!(rc.initial_scale > 0)) throw ConfigError("config: initial_scale must be positive");
  }
  if (const auto* v = maybe("seed")) rc.seed = static_cast<unsigned long>(to_long("seed", *v));

  // surface expression syntax errors now
  (void)rc.alphas();
  (void)rc.phi();
  (void)rc.reference();
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mhn
