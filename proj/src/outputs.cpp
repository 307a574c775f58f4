#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mclt/error.hpp"
#include "mclt/experiment.hpp"

namespace mclt {

namespace {

using nlohmann::ordered_json;

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// results.csv kernel columns, in order.
const std::pair<const char*, KernelId> kKernelColumns[] = {
    {"kernel_theorem8", KernelId::Theorem8},
    {"kernel_corollary9", KernelId::Corollary9},
    {"kernel_roellin7", KernelId::Roellin7},
    {"kernel_lemma10_paper", KernelId::Lemma10PaperA},
    {"kernel_lemma10_opt", KernelId::Lemma10OptimalA},
    {"kernel_hb1", KernelId::HeydeBrown1},
    {"kernel_bolt2", KernelId::Bolthausen2},
    {"kernel_mourrat", KernelId::MourratTerm},
    {"kernel_fan5", KernelId::Fan5},
    {"kernel_vd6", KernelId::VanDung6},
};

ordered_json num(double x) { return round12(x); }

ordered_json opt_num(const std::optional<double>& x) {
  return x ? num(*x) : ordered_json(nullptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(fmt12(x).c_str(), nullptr);
}

std::string results_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "family,n,m,seed,w1,w1_se,kolmogorov";
  for (const auto& [name, id] : kKernelColumns) os << ',' << name;
  os << '\n';
  for (const auto& row : report.rows) {
    os << row.family << ',' << row.n << ',' << row.m << ',' << row.seed << ','
       << fmt12(row.distance.w1) << ','
       << (row.distance.w1_se ? fmt12(*row.distance.w1_se) : std::string()) << ','
       << fmt12(row.distance.kolmogorov);
    for (const auto& [name, id] : kKernelColumns) {
      os << ',';
      if (auto it = row.kernels.find(id); it != row.kernels.end()) os << fmt12(it->second);
    }
    os << '\n';
  }
  return os.str();
}

std::string summary_json(const ExperimentReport& report) {
  const auto& cfg = report.config;
  ordered_json j;

  ordered_json families = ordered_json::array();
  for (const auto& f : cfg.families) {
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : f.params) params[k] = num(v);
    families.push_back({{"id", std::string(to_string(f.id))}, {"params", params}});
  }
  ordered_json a_grid = ordered_json::array();
  for (double a : cfg.a_grid) a_grid.push_back(num(a));
  j["config"] = {{"families", families},  {"n_grid", cfg.n_grid},   {"m", cfg.m},
                 {"p", num(cfg.p)},        {"epsilon", num(cfg.epsilon)}, {"a_grid", a_grid},
                 {"master_seed", cfg.master_seed}};

  ordered_json fits = ordered_json::array();
  for (const auto& fk : report.fitted) {
    ordered_json e = {{"family", fk.family}, {"kernel", fk.kernel}};
    if (fk.fit) {
      e["slope"] = num(fk.fit->slope);
      e["intercept"] = num(fk.fit->intercept);
      e["slope_se"] = num(fk.fit->slope_se);
    } else {
      e["slope"] = nullptr;
      e["intercept"] = nullptr;
      e["slope_se"] = nullptr;
    }
    e["c_hat"] = opt_num(fk.c_hat);
    e["ratio_spread"] = opt_num(fk.ratio_spread);
    fits.push_back(e);
  }
  j["fits"] = fits;

  ordered_json inapplicable = ordered_json::array();
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    for (const auto& [id, why] : row.inapplicable)
      inapplicable.push_back({{"family", row.family},
                              {"n", row.n},
                              {"kernel", std::string(to_string(id))},
                              {"reason", why}});
    const auto& e = row.moments;
    rows.push_back({{"family", row.family},
                    {"n", row.n},
                    {"roellin_best_a", num(row.roellin_best_a)},
                    {"bolthausen_2_is_lower_bound", true},
                    {"moments",
                     {{"p", num(e.p)},
                      {"sn2", num(e.sn2)},
                      {"vdev_p", num(e.vdev_p)},
                      {"vdev_1", num(e.vdev_1)},
                      {"vdev_inf", num(e.vdev_inf)},
                      {"emax_2p", num(e.emax_2p)},
                      {"sum_e_abs3", num(e.sum_e_abs3)},
                      {"sum_e_abs2p", num(e.sum_e_abs2p)},
                      {"se",
                       {{"vdev_p", num(e.se.vdev_p)},
                        {"vdev_1", num(e.se.vdev_1)},
                        {"emax_2p", num(e.se.emax_2p)},
                        {"sum_e_abs3", num(e.se.sum_e_abs3)},
                        {"sum_e_abs2p", num(e.se.sum_e_abs2p)}}}}}});
  }
  j["rows"] = rows;
  j["inapplicable"] = inapplicable;

  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json e = {{"name", c.name}, {"family", c.family}};
    e["n"] = c.n ? ordered_json(*c.n) : ordered_json(nullptr);
    e["kind"] = std::string(to_string(c.kind));
    e["pass"] = c.pass;
    e["lhs"] = num(c.lhs);
    e["rhs"] = num(c.rhs);
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["all_pass"] = report.all_gating_pass();
  return j.dump(2) + "\n";
}

std::string audits_json(const ExperimentReport& report) {
  ordered_json cells = ordered_json::array();
  for (const auto& row : report.rows) {
    const auto& t = row.audit;
    cells.push_back({{"family", row.family},
                     {"n", row.n},
                     {"epsilon", num(report.config.epsilon)},
                     {"paths", t.paths},
                     {"failures", t.failures},
                     {"variance_sum_fail", t.variance_sum_fail},
                     {"prefix_fail", t.prefix_fail},
                     {"fill_fail", t.fill_fail},
                     {"thirdmoment_cap_fail", t.thirdmoment_fail},
                     {"eq16_fail", t.eq16_fail},
                     {"eq17_fail", t.eq17_fail},
                     {"eq17_not_applicable", t.eq17_not_applicable},
                     {"tau_lt_n", t.tau_interior},
                     {"tau_eq_n", t.eq17_not_applicable},
                     {"max_variance_sum_err", num(t.max_variance_sum_err)},
                     {"max_eq16_err", num(t.max_eq16_err)},
                     {"mean_N", num(t.mean_N)}});
  }
  ordered_json j = {{"cells", cells}};
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir + "'");
  write_file(fs::path(out_dir) / "results.csv", results_csv(report));
  write_file(fs::path(out_dir) / "summary.json", summary_json(report));
  write_file(fs::path(out_dir) / "audits.json", audits_json(report));
}

}  // namespace mclt
