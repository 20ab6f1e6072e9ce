#include "cld/report.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace cld {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

std::string sweep_csv(const SweepReport& rep) {
  std::string out = "epsilon,value\n";
  for (std::size_t i = 0; i < rep.epsilons.size(); ++i)
    out += g17(rep.epsilons[i]) + "," + g17(rep.values[i]) + "\n";
  return out;
}

std::string sweep_json(const SweepReport& rep) {
  ordered_json j;
  j["region_label"] = rep.region_label;
  j["epsilons"] = rep.epsilons;
  j["values"] = rep.values;
  j["fit_valid"] = rep.fit_valid;
  if (rep.fit_valid) {
    j["exponent"] = rep.fit.exponent;
    j["r2"] = rep.fit.r_squared;
    j["log_prefactor"] = rep.fit.log_prefactor;
    j["points_used"] = rep.fit.points_used;
  } else {
    j["exponent"] = nullptr;
    j["r2"] = nullptr;
    j["log_prefactor"] = nullptr;
    j["points_used"] = 0;
  }
  return j.dump(2) + "\n";
}

std::string balance_json(const BalanceReport& rep) {
  ordered_json j;
  j["times"] = rep.times;
  j["energy"] = rep.energy;
  j["dEdt"] = rep.dEdt;
  j["interior"] = rep.interior;
  j["shell"] = rep.shell;
  j["closure"] = rep.closure;
  return j.dump(2) + "\n";
}

std::string compat_json(const std::string& system, const CompatReport& rep) {
  ordered_json j;
  j["system"] = system;
  j["samples"] = rep.samples;
  j["max_eta_residual"] = rep.max_eta_residual;
  j["max_q_residual"] = rep.max_q_residual;
  j["max_fd_mismatch"] = rep.max_fd_mismatch;
  return j.dump(2) + "\n";
}

std::string describe_json(const SystemSpec& sys) {
  ordered_json j;
  j["name"] = sys.name;
  j["k"] = sys.k;
  j["n_states"] = sys.n_states;
  j["n_rows"] = sys.n_rows;
  j["states"] = sys.state_names;
  j["rows"] = sys.row_names;
  j["state_domain"] = {{"lo", sys.sample_lo}, {"hi", sys.sample_hi}};
  j["affine_rows"] = sys.affine_rows;
  return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw error("failed writing '" + path + "'");
}

} // namespace cld
