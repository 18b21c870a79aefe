#include "etalab/report.hpp"

#include <cstdio>
#include <fstream>

#include "etalab/error.hpp"

namespace etalab {

std::string num_str(double x) { return nlohmann::json(x).dump(); }

ordered_json make_envelope(ordered_json config, ordered_json result,
                           const std::vector<std::string>& warnings, bool flagged,
                           double wall_ms) {
  ordered_json env;
  env["schema"] = "etalab/1";
  env["tool"] = {{"name", "etalab"}, {"version", "1.0.0"}};
  env["config"] = std::move(config);
  env["result"] = std::move(result);
  env["diagnostics"] = {{"warnings", warnings}, {"flagged", flagged}, {"wall_ms", wall_ms}};
  return env;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail_precondition("cannot open output file for writing: " + tmp);
    os << content;
    if (!os.flush()) fail_precondition("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail_precondition("cannot move output into place: " + path);
  }
}

ordered_json eta_json(const EtaResult& r) {
  ordered_json j;
  j["value"] = r.value.real();
  j["value_im"] = r.value.imag();
  j["quad_err"] = r.quad_err;
  j["small_t_bound"] = r.small_t_bound;
  j["tail_bound"] = r.tail_bound;
  j["trunc_bound"] = r.trunc_bound;
  j["total_error"] = r.total_error();
  j["gap"] = r.gap;
  j["t_hi"] = r.t_hi;
  j["small_t_estimated"] = r.small_t_estimated;
  j["flagged"] = r.flagged;
  return j;
}

ordered_json convergence_json(const ConvergenceReport& rep) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : rep.rows) {
    ordered_json r;
    r["n"] = row.n;
    r["eta"] = eta_json(row.eta);
    if (row.has_diff)
      r["abs_diff"] = row.abs_diff;
    else
      r["abs_diff"] = nullptr;
    rows.push_back(std::move(r));
  }
  ordered_json j;
  j["rows"] = std::move(rows);
  j["line"] = rep.line_value ? eta_json(*rep.line_value) : ordered_json(nullptr);
  j["stabilization_index"] =
      rep.stabilization_index >= 0 ? ordered_json(rep.stabilization_index) : ordered_json(nullptr);
  j["constants"] = {{"K_Gamma", rep.K_Gamma},     {"K_u", rep.K_u},
                    {"R", rep.R},                 {"sigma_Gamma", rep.sigma_Gamma},
                    {"sigma_u", rep.sigma_u},     {"sigma_R", rep.sigma_R},
                    {"gap_margin", rep.gap_margin}};
  return j;
}

ordered_json decay_json(const DecayReport& rep) {
  ordered_json j;
  j["gap"] = rep.gap;
  j["eps"] = rep.eps;
  j["c5"] = rep.c5;
  j["mu"] = rep.mu;
  j["stability_growth"] = rep.stability_growth;
  j["failed"] = rep.failed;
  j["offending"] = rep.offending;
  ordered_json fits = ordered_json::array();
  for (const auto& f : rep.class_fits)
    fits.push_back({{"a", f.a}, {"d", f.d}, {"eps1", f.eps1}, {"c6", f.c6}});
  j["class_fits"] = std::move(fits);
  ordered_json od = ordered_json::array();
  for (const auto& o : rep.offdiag)
    od.push_back({{"t", o.t},
                  {"slope", o.slope},
                  {"required", o.required},
                  {"points", o.points},
                  {"ok", o.ok}});
  j["offdiag"] = std::move(od);
  ordered_json samples = ordered_json::array();
  for (const auto& s : rep.samples)
    samples.push_back({{"t", s.t},
                       {"a", s.a},
                       {"value", s.value},
                       {"bound", s.bound},
                       {"margin", s.margin},
                       {"regime", s.regime}});
  j["samples"] = std::move(samples);
  return j;
}

ordered_json growth_json(const GrowthConstants& gc) {
  ordered_json j;
  j["K_Gamma"] = gc.K_Gamma;
  j["K_Gamma_subexponential"] = gc.K_Gamma_subexponential;
  j["K_class"] = gc.K_class;
  j["K_class_subexponential"] = gc.K_class_subexponential;
  j["K_u"] = gc.K_u;
  j["R"] = gc.R;
  j["theta0"] = gc.theta0;
  j["theta1"] = gc.theta1;
  j["c0"] = gc.c0;
  j["c1"] = gc.c1;
  j["sigma_Gamma"] = gc.sigma.sigma_Gamma;
  j["sigma_u"] = gc.sigma.sigma_u;
  j["sigma_R"] = gc.sigma.sigma_R;
  j["fit_lo"] = gc.fit_lo;
  j["fit_hi"] = gc.fit_hi;
  j["ball"] = gc.ball;
  j["class_ball"] = gc.class_ball;
  return j;
}

std::string convergence_csv(const ConvergenceReport& rep) {
  std::string out = "n, eta_n, quad_err, tail_bound, trunc_bound, eta_line, abs_diff\n";
  for (const auto& row : rep.rows) {
    out += std::to_string(row.n);
    out += ", " + num_str(row.eta.value.real());
    out += ", " + num_str(row.eta.quad_err);
    out += ", " + num_str(row.eta.tail_bound);
    out += ", " + num_str(row.eta.trunc_bound);
    if (rep.line_value) {
      out += ", " + num_str(rep.line_value->value.real());
      out += ", " + num_str(row.abs_diff);
    } else {
      out += ", , ";
    }
    out += "\n";
  }
  return out;
}

}  // namespace etalab
