#include <CLI11.hpp>
#include <functional>
#include <chrono>
#include <complex>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "etalab/cayley.hpp"
#include "etalab/decay.hpp"
#include "etalab/error.hpp"
#include "etalab/eta.hpp"
#include "etalab/group.hpp"
#include "etalab/growth.hpp"
#include "etalab/kernel.hpp"
#include "etalab/quotient.hpp"
#include "etalab/report.hpp"
#include "etalab/specparse.hpp"
#include "etalab/spectrum.hpp"

namespace {

using etalab::ordered_json;

struct Globals {
  std::string json_path, csv_path;
  double tol = 1e-8;
  int threads = 1;
  unsigned long long seed = 1;
};

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t next = s.find(',', pos);
    std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    try {
      size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      etalab::fail_parse("bad numeric list entry '" + tok + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (out.empty()) etalab::fail_parse("empty numeric list");
  return out;
}

std::vector<int> parse_int_list_cli(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) {
    int i = (int)v;
    if ((double)i != v) etalab::fail_parse("expected integer list, got '" + s + "'");
    out.push_back(i);
  }
  return out;
}

// Words in a finite-set spec are ';'-separated (words themselves may contain
// commas, e.g. coordinate elements of z2).
std::vector<std::string> parse_word_list(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find(';', pos);
    std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!tok.empty()) out.push_back(tok);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (out.empty()) etalab::fail_parse("empty element list");
  return out;
}

void emit(const Globals& g, ordered_json config, ordered_json result,
          const std::vector<std::string>& warnings, bool flagged, double wall_ms,
          const std::string& csv = "") {
  config["tol"] = g.tol;
  config["threads"] = g.threads;
  config["seed"] = g.seed;
  if (!g.json_path.empty()) config["json"] = g.json_path;
  if (!g.csv_path.empty()) config["csv"] = g.csv_path;
  ordered_json env =
      etalab::make_envelope(std::move(config), std::move(result), warnings, flagged, wall_ms);
  std::string text = env.dump(2);
  text += "\n";
  std::cout << text;
  if (!g.json_path.empty()) etalab::atomic_write_text(g.json_path, text);
  if (!g.csv_path.empty()) {
    if (csv.empty()) etalab::fail_parse("--csv applies to the converge subcommand only");
    etalab::atomic_write_text(g.csv_path, csv);
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

ordered_json eig_window_json(const etalab::SpectralData& sd, double window) {
  ordered_json eigs = ordered_json::array();
  for (double l : sd.all_eigs())
    if (std::fabs(l) <= window) eigs.push_back(l);
  return eigs;
}

int run(int argc, char** argv) {
  CLI::App app{"model Dirac operators on circle covers: delocalized eta invariants,\n"
               "folding checks, decay certificates, and group growth constants"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--json", g.json_path, "write the JSON report to this path");
  app.add_option("--csv", g.csv_path, "write the CSV table to this path (converge only)");
  app.add_option("--tol", g.tol, "per-panel quadrature tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads for tower rows")
      ->check(CLI::Range(1, 256));
  app.add_option("--seed", g.seed, "seed echoed into the config (randomized tests live in the "
                                   "test suite)");

  // ---- group ----------------------------------------------------------
  auto* grp = app.add_subcommand("group", "growth constants, distinguishing, separation");
  grp->require_subcommand(1);
  std::string g_group, g_class, g_tower, g_quotient, g_set;
  int g_radius = 10, g_cap = 8;
  double g_theta0 = 1.0;
  long long g_states = etalab::kDefaultStateBudget;

  auto add_group_opts = [&](CLI::App* c, bool need_class, bool need_tower) {
    c->add_option("--group", g_group, "group spec (z, z2, z3, f2, heis, sl2z, cyclic:k)")
        ->required();
    auto* oc = c->add_option("--class", g_class, "class representative word");
    auto* ot = c->add_option("--tower", g_tower, "tower spec");
    if (need_class) oc->required();
    if (need_tower) ot->required();
  };

  auto* gc_cmd = grp->add_subcommand("constants", "ball growth and sigma thresholds");
  add_group_opts(gc_cmd, false, false);
  gc_cmd->add_option("--radius", g_radius, "BFS radius");
  gc_cmd->add_option("--theta0", g_theta0, "unit-translation constant");
  gc_cmd->add_option("--max-states", g_states, "BFS state budget");

  auto* gd_cmd = grp->add_subcommand("distinguish", "first quotient separating a class from F");
  add_group_opts(gd_cmd, true, true);
  gd_cmd->add_option("--set", g_set, "';'-separated words forming the finite set F")->required();

  auto* gs_cmd = grp->add_subcommand("seprate", "separation rate along a tower");
  add_group_opts(gs_cmd, true, true);
  gs_cmd->add_option("--cap", g_cap, "injective-radius cap");
  auto* gs_alias = grp->add_subcommand("separate", "");
  gs_alias->group("");  // hidden spelling
  add_group_opts(gs_alias, true, true);
  gs_alias->add_option("--cap", g_cap, "injective-radius cap");

  auto* gr_cmd = grp->add_subcommand("radius", "injective radius of one quotient");
  add_group_opts(gr_cmd, true, false);
  gr_cmd->add_option("--quotient", g_quotient, "quotient spec")->required();
  gr_cmd->add_option("--cap", g_cap, "radius cap");

  // ---- spectrum / eta / converge / decay ------------------------------
  std::string s_op, s_cover = "n=1", s_tower, s_tgrid = "0.25,0.5,1,2,4", s_agrid = "0,1";
  int s_class = 0, s_kmax = 0, s_nodes = 0;
  double s_tmin = 1e-2, s_tsplit = 1.0, s_tmax = 0.0, s_mu = 2.0, s_window = 15.0;

  auto* sp_cmd = app.add_subcommand("spectrum", "sector eigenvalues on a cover");
  sp_cmd->add_option("--op", s_op, "operator spec, e.g. 'comp=2,m=1,c=0.3,theta=0.25,v=0.2cos1'")
      ->required();
  sp_cmd->add_option("--cover", s_cover, "'n=K' or 'line'");
  sp_cmd->add_option("--kmax", s_kmax, "Fourier cutoff override");
  sp_cmd->add_option("--window", s_window, "emit eigenvalues with |lambda| <= window");

  auto* eta_cmd = app.add_subcommand("eta", "delocalized eta of one class");
  eta_cmd->add_option("--op", s_op, "operator spec")->required();
  eta_cmd->add_option("--cover", s_cover, "'n=K' or 'line'");
  eta_cmd->add_option("--class", s_class, "deck class (integer mod n)");
  eta_cmd->add_option("--kmax", s_kmax, "Fourier cutoff override");
  eta_cmd->add_option("--nodes", s_nodes, "Bloch nodes override (line cover)");
  eta_cmd->add_option("--tmin", s_tmin, "analytic small-t cutoff");
  eta_cmd->add_option("--tsplit", s_tsplit, "panel split");
  eta_cmd->add_option("--tmax", s_tmax, "tail cutoff (0 = auto from the gap)");

  auto* cv_cmd = app.add_subcommand("converge", "eta along a cover tower vs the line");
  cv_cmd->add_option("--op", s_op, "operator spec")->required();
  cv_cmd->add_option("--tower", s_tower, "cover list '2,4,8' or '2..16'")->required();
  cv_cmd->add_option("--class", s_class, "deck class");
  cv_cmd->add_option("--kmax", s_kmax, "Fourier cutoff override");
  cv_cmd->add_option("--nodes", s_nodes, "Bloch nodes override");
  cv_cmd->add_option("--tmin", s_tmin, "analytic small-t cutoff");
  cv_cmd->add_option("--tsplit", s_tsplit, "panel split");
  cv_cmd->add_option("--tmax", s_tmax, "tail cutoff (0 = auto)");

  auto* dc_cmd = app.add_subcommand("decay", "trace and kernel decay certificates");
  dc_cmd->add_option("--op", s_op, "operator spec")->required();
  dc_cmd->add_option("--cover", s_cover, "'n=K' (finite covers only)");
  dc_cmd->add_option("--tgrid", s_tgrid, "comma-separated t samples");
  dc_cmd->add_option("--agrid", s_agrid, "comma-separated classes");
  dc_cmd->add_option("--mu", s_mu, "off-diagonal Gaussian slack (> 1)");

  auto* st_cmd = app.add_subcommand("selftest", "fast internal consistency checks");

  // let global options (--json, --tol, --threads, ...) appear after the
  // subcommand name as well as before it
  std::function<void(CLI::App*)> allow_globals = [&](CLI::App* cmd) {
    for (CLI::App* sub : cmd->get_subcommands({})) {
      sub->fallthrough();
      allow_globals(sub);
    }
  };
  allow_globals(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // config errors are exit 2
  }

  Timer timer;
  std::vector<std::string> warnings;

  if (gc_cmd->parsed() || gd_cmd->parsed() || gs_cmd->parsed() || gs_alias->parsed() ||
      gr_cmd->parsed()) {
    auto group = etalab::make_group(g_group);
    ordered_json config{{"subcommand", "group"}, {"group", g_group}};
    if (gc_cmd->parsed()) {
      config["mode"] = "constants";
      config["radius"] = g_radius;
      config["theta0"] = g_theta0;
      std::optional<etalab::ConjClass> cls;
      std::optional<etalab::Tower> tower;
      if (!g_class.empty()) {
        cls = etalab::make_class(group, g_class);
        config["class"] = g_class;
      }
      if (!g_tower.empty()) {
        tower = etalab::make_tower(group, g_tower);
        config["tower"] = g_tower;
      }
      etalab::GrowthConstants out = etalab::group_constants(
          group, cls ? &*cls : nullptr, tower ? &*tower : nullptr, g_radius, g_theta0, g_states);
      emit(g, std::move(config), etalab::growth_json(out), warnings, false, timer.ms());
      return 0;
    }
    if (gd_cmd->parsed()) {
      config["mode"] = "distinguish";
      config["class"] = g_class;
      config["tower"] = g_tower;
      config["set"] = g_set;
      auto cls = etalab::make_class(group, g_class);
      auto tower = etalab::make_tower(group, g_tower);
      std::vector<etalab::Elem> F;
      for (const std::string& w : parse_word_list(g_set)) F.push_back(group->parse_word(w));
      etalab::DistinguishResult out = etalab::distinguishes(tower, cls, F);
      ordered_json result{{"found", out.found},
                          {"index", out.index},
                          {"label", out.label},
                          {"violating", out.violating}};
      emit(g, std::move(config), std::move(result), warnings, !out.found, timer.ms());
      return 0;
    }
    if (gs_cmd->parsed() || gs_alias->parsed()) {
      config["mode"] = "seprate";
      config["class"] = g_class;
      config["tower"] = g_tower;
      config["cap"] = g_cap;
      auto cls = etalab::make_class(group, g_class);
      auto tower = etalab::make_tower(group, g_tower);
      etalab::SeparationRate out = etalab::separation_rate(tower, cls, g_cap);
      ordered_json rows = ordered_json::array();
      for (const auto& r : out.rows)
        rows.push_back({{"index", r.index},
                        {"label", r.label},
                        {"radius", r.radius.value},
                        {"radius_at_cap", r.radius.at_cap},
                        {"class_size", r.class_size}});
      ordered_json result{{"rate", out.rate},
                          {"lower_bound_only", out.lower_bound_only},
                          {"bounded_classes", out.bounded_classes},
                          {"rows", std::move(rows)}};
      emit(g, std::move(config), std::move(result), warnings, false, timer.ms());
      return 0;
    }
    // radius
    config["mode"] = "radius";
    config["class"] = g_class;
    config["quotient"] = g_quotient;
    config["cap"] = g_cap;
    auto cls = etalab::make_class(group, g_class);
    auto q = etalab::make_quotient(group, g_quotient);
    etalab::InjectiveRadius out = etalab::injective_radius(*q, cls, g_cap);
    ordered_json result{{"radius", out.value}, {"at_cap", out.at_cap}};
    emit(g, std::move(config), std::move(result), warnings, false, timer.ms());
    return 0;
  }

  if (sp_cmd->parsed()) {
    etalab::ModelOperator op = etalab::parse_operator(s_op);
    etalab::CoverSpec cover = etalab::parse_cover(s_cover);
    ordered_json config{{"subcommand", "spectrum"},
                        {"op", op.str()},
                        {"cover", cover.str()},
                        {"kmax", s_kmax},
                        {"window", s_window}};
    if (cover.line) {
      double cert = op.certified_line_gap();  // throws exit-3 for 1-comp
      if (cert <= 0.0)
        etalab::fail_precondition("no certified line gap: require m - |v|_1 - |c| > 0");
      double grid_gap = etalab::line_gap(op, 64);
      ordered_json result{{"certified_gap", cert}, {"grid_gap", grid_gap}};
      emit(g, std::move(config), std::move(result), warnings, false, timer.ms());
      return 0;
    }
    etalab::SpectralData sd = etalab::spectrum_on_cover(op, cover.n, s_kmax, false);
    ordered_json result{{"n", sd.n},
                        {"K", sd.K},
                        {"components", op.components},
                        {"gap", etalab::finite_cover_min_eig(sd)},
                        {"min_abs_eig", sd.min_abs_eig},
                        {"trunc_bound", sd.trunc_bound},
                        {"eigs", eig_window_json(sd, s_window)}};
    emit(g, std::move(config), std::move(result), warnings, false, timer.ms());
    return 0;
  }

  if (eta_cmd->parsed() || cv_cmd->parsed()) {
    etalab::ModelOperator op = etalab::parse_operator(s_op);
    etalab::QuadraturePlan plan;
    plan.t_min = s_tmin;
    plan.t_split = s_tsplit;
    plan.t_max = s_tmax;
    plan.tol = g.tol;
    plan.K = s_kmax;
    plan.bloch_nodes = s_nodes;
    if (eta_cmd->parsed()) {
      etalab::CoverSpec cover = etalab::parse_cover(s_cover);
      ordered_json config{{"subcommand", "eta"},      {"op", op.str()},
                          {"cover", cover.str()},     {"class", s_class},
                          {"tmin", plan.t_min},       {"tsplit", plan.t_split},
                          {"tmax", plan.t_max},       {"kmax", plan.K},
                          {"nodes", plan.bloch_nodes}};
      etalab::EtaResult r = etalab::eta_quadrature(op, cover, s_class, plan);
      if (r.small_t_estimated)
        warnings.push_back("small-t piece estimated from samples, not certified");
      emit(g, std::move(config), etalab::eta_json(r), warnings, r.flagged, timer.ms());
      return 0;
    }
    std::vector<int> ns = etalab::parse_cover_list(s_tower);
    ordered_json config{{"subcommand", "converge"}, {"op", op.str()},
                        {"tower", s_tower},         {"class", s_class},
                        {"tmin", plan.t_min},       {"tsplit", plan.t_split},
                        {"tmax", plan.t_max},       {"kmax", plan.K},
                        {"nodes", plan.bloch_nodes}};
    etalab::ConvergenceReport rep = etalab::converge_tower(op, ns, s_class, plan, g.threads);
    bool flagged = false;
    for (const auto& row : rep.rows) {
      if (row.eta.flagged) flagged = true;
      if (row.eta.small_t_estimated)
        warnings.push_back("n=" + std::to_string(row.n) +
                           ": small-t piece estimated from samples, not certified");
    }
    if (rep.line_value && rep.line_value->flagged) flagged = true;
    emit(g, std::move(config), etalab::convergence_json(rep), warnings, flagged, timer.ms(),
         etalab::convergence_csv(rep));
    return 0;
  }

  if (dc_cmd->parsed()) {
    etalab::ModelOperator op = etalab::parse_operator(s_op);
    etalab::CoverSpec cover = etalab::parse_cover(s_cover);
    std::vector<double> tgrid = parse_double_list(s_tgrid);
    std::vector<int> agrid = parse_int_list_cli(s_agrid);
    ordered_json config{{"subcommand", "decay"}, {"op", op.str()}, {"cover", cover.str()},
                        {"tgrid", s_tgrid},      {"agrid", s_agrid}, {"mu", s_mu}};
    etalab::DecayReport rep = etalab::decay_check(op, cover, tgrid, agrid, s_mu);
    if (rep.failed) warnings.push_back("decay check failed: " + rep.offending);
    emit(g, std::move(config), etalab::decay_json(rep), warnings, rep.failed, timer.ms());
    return 0;
  }

  if (st_cmd->parsed()) {
    ordered_json checks = ordered_json::array();
    bool all_ok = true;
    auto check = [&](const std::string& name, bool ok) {
      checks.push_back({{"name", name}, {"ok", ok}});
      all_ok = all_ok && ok;
    };
    {
      etalab::ModelOperator op;
      op.components = 1;
      op.theta = 0.25;
      op.c = 0.3;
      std::complex<double> closed = etalab::eta_closed_form_1comp(op, 2, 1);
      etalab::EtaResult r = etalab::eta_quadrature(op, etalab::CoverSpec{false, 2}, 1);
      check("eta quadrature vs closed form (n=2, a=1)", std::abs(closed - r.value) < 1e-8);
      std::complex<double> oracle = etalab::eta_spectral_oracle(op, 2, 1);
      check("eta oracle vs closed form (n=2, a=1)", std::abs(closed - oracle) < 1e-6);
    }
    {
      etalab::ModelOperator op;
      op.components = 2;
      op.m = 1.0;
      op.c = 0.3;
      op.theta = 0.25;
      etalab::FoldingCheck fc =
          etalab::verify_folding(op, 2, {1.0}, {{0.3, 0.7}}, 96, 24);
      check("line kernel folds to the 2-cover kernel", fc.max_dev <= 1e-10);
    }
    {
      auto sl2z = etalab::make_group("sl2z");
      auto x = etalab::make_class(sl2z, "x");
      auto q = etalab::make_quotient(sl2z, "psi");
      auto r = etalab::injective_radius(*q, x, 4);
      check("psi-quotient radius >= 4 for <x>", r.at_cap);
    }
    ordered_json config{{"subcommand", "selftest"}};
    ordered_json result{{"checks", std::move(checks)}, {"all_ok", all_ok}};
    emit(g, std::move(config), std::move(result), warnings, !all_ok, timer.ms());
    return all_ok ? 0 : 1;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const etalab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case etalab::ErrKind::Parse:
        return 2;
      case etalab::ErrKind::Precondition:
        return 3;
      case etalab::ErrKind::Budget:
        return 4;
      case etalab::ErrKind::Numeric:
        return 1;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
