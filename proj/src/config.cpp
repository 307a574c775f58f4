#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mclt/error.hpp"
#include "mclt/experiment.hpp"

namespace mclt {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Splits on commas that are not inside parentheses.
std::vector<std::string> split_top_level(std::string_view s, int line) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw ParseError("line " + std::to_string(line) + ": unbalanced ')'");
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw ParseError("line " + std::to_string(line) + ": unbalanced '('");
  out.push_back(trim(cur));
  for (const auto& item : out)
    if (item.empty()) throw ParseError("line " + std::to_string(line) + ": empty list item");
  return out;
}

double parse_double(const std::string& s, int line) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double v;
  if (!(is >> v) || !is.eof() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, int line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("line " + std::to_string(line) + ": expected a nonnegative integer, got '" + s +
                     "'");
  return v;
}

FamilyDescriptor parse_family(const std::string& item, int line) {
  FamilyDescriptor d;
  const auto open = item.find('(');
  const std::string name = trim(item.substr(0, open));
  try {
    d.id = parse_family_id(name);
  } catch (const InvalidArgument& e) {
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
  if (open == std::string::npos) return d;
  if (item.back() != ')') throw ParseError("line " + std::to_string(line) + ": expected ')'");
  const std::string inner = item.substr(open + 1, item.size() - open - 2);
  if (trim(inner).empty()) return d;
  for (const auto& kv : split_top_level(inner, line)) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line) + ": family parameter needs name=value");
    d.params[trim(kv.substr(0, eq))] = parse_double(trim(kv.substr(eq + 1)), line);
  }
  return d;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line) + ": expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (value.empty()) throw ParseError("line " + std::to_string(line) + ": empty value for " + key);
    if (!seen.insert(key).second)
      throw ParseError("line " + std::to_string(line) + ": duplicate key '" + key + "'");

    if (key == "families") {
      for (const auto& item : split_top_level(value, line))
        cfg.families.push_back(parse_family(item, line));
    } else if (key == "n_grid") {
      for (const auto& item : split_top_level(value, line))
        cfg.n_grid.push_back(static_cast<std::size_t>(parse_u64(item, line)));
    } else if (key == "m") {
      cfg.m = static_cast<std::size_t>(parse_u64(value, line));
    } else if (key == "p") {
      cfg.p = parse_double(value, line);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, line);
    } else if (key == "a_grid") {
      cfg.a_grid.clear();
      for (const auto& item : split_top_level(value, line))
        cfg.a_grid.push_back(parse_double(item, line));
    } else if (key == "master_seed") {
      cfg.master_seed = parse_u64(value, line);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "workers") {
      cfg.workers = static_cast<unsigned>(parse_u64(value, line));
    } else {
      throw ParseError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  for (const char* required : {"families", "n_grid", "m"})
    if (!seen.count(required)) throw ParseError(std::string("missing required key '") + required + "'");
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.families.empty()) throw InvalidArgument("config: no families");
  if (cfg.n_grid.empty()) throw InvalidArgument("config: empty n_grid");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) throw InvalidArgument("config: n_grid entries must be >= 1");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw InvalidArgument("config: n_grid must be strictly increasing");
  }
  if (cfg.m < 2) throw InvalidArgument("config: m must be >= 2");
  if (!(cfg.p >= 1.0)) throw InvalidArgument("config: p must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw InvalidArgument("config: epsilon must be positive");
  if (cfg.a_grid.empty()) throw InvalidArgument("config: empty a_grid");
  for (double a : cfg.a_grid)
    if (!(a >= 0.0)) throw InvalidArgument("config: a_grid entries must be >= 0");
  if (cfg.workers < 1) throw InvalidArgument("config: workers must be >= 1");
  // Surface family parameter errors before any simulation runs.
  for (const auto& f : cfg.families) (void)build_family(f.id, cfg.n_grid.front(), f.params);
}

}  // namespace mclt
