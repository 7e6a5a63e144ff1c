// Command-line front end: criterion checks, counterexample probes, sweeps.
//
// Exit codes: 0 every criterion holds, 1 a proven failure, 2 indeterminate
// outcomes present, 3 input error.  DISSIP_LOG=debug enables progress notes
// on stderr.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dissip/capacity.hpp"
#include "dissip/elasticity.hpp"
#include "dissip/errors.hpp"
#include "dissip/harness.hpp"
#include "dissip/json_io.hpp"
#include "dissip/lame_probe.hpp"
#include "dissip/nonlocal.hpp"
#include "dissip/oblique.hpp"

namespace {

using dissip::Json;

bool log_enabled() {
  const char* env = std::getenv("DISSIP_LOG");
  return env && std::string(env) != "" && std::string(env) != "0" && std::string(env) != "silent";
}

void log_note(const std::string& msg) {
  if (log_enabled()) std::cerr << "[dissip] " << msg << "\n";
}

int emit_verdict(const dissip::Verdict& v) {
  std::cout << dissip::verdict_to_json(v).dump(2) << "\n";
  return dissip::exit_code_for(v);
}

struct CommonOpts {
  double p = 2.0;
  double tol_eig = 1e-9;
  double tol_form = 1e-7;
  std::uint64_t seed = 1234;
  int threads = 1;

  dissip::Tolerances tolerances() const {
    dissip::Tolerances t;
    t.eig = tol_eig;
    t.form = tol_form;
    return t;
  }
};

void add_common(CLI::App* cmd, CommonOpts& c, bool with_p = true) {
  if (with_p) cmd->add_option("--p", c.p, "Lebesgue exponent p in (1, inf)");
  cmd->add_option("--tol-eig", c.tol_eig, "eigenvalue slack");
  cmd->add_option("--tol-form", c.tol_form, "relative functional slack");
  cmd->add_option("--seed", c.seed, "random seed for probes");
  cmd->add_option("--threads", c.threads, "worker threads for sweeps/probes");
}

dissip::KernelSpec load_kernel_table(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw dissip::ParseError("cannot open kernel table '" + path + "'");
  dissip::KernelSpec k;
  k.kind = dissip::KernelSpec::Kind::TabulatedRadial;
  k.dimension = dim;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double r, d;
    if (ls >> r >> d) {
      k.radii.push_back(r);
      k.density.push_back(d);
    }
  }
  k.validate();
  return k;
}

std::vector<dissip::GridFunction> load_test_sets(const std::string& path,
                                                 const dissip::GridFunction& proto) {
  std::ifstream in(path);
  if (!in) throw dissip::ParseError("cannot open set file '" + path + "'");
  Json j;
  in >> j;
  std::vector<dissip::GridFunction> sets;
  for (const Json& box : j.at("boxes")) {
    const auto lo = box.at("lo").get<std::vector<double>>();
    const auto hi = box.at("hi").get<std::vector<double>>();
    dissip::GridFunction f = proto;
    for (long q = 0; q < f.num_points(); ++q) {
      const Eigen::VectorXd x = f.point_at(q);
      bool inside = true;
      for (int d = 0; d < f.dim_domain(); ++d) {
        if (x[d] < lo.at(d) || x[d] > hi.at(d)) inside = false;
      }
      f.set_value(0, q, inside ? dissip::Complex(1, 0) : dissip::Complex(0, 0));
    }
    f.assert_compact_support();
    sets.push_back(std::move(f));
  }
  return sets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L^p-dissipativity and positivity checks for differential and integral operators"};
  app.require_subcommand(1);

  // ---- check ----------------------------------------------------------
  CLI::App* check = app.add_subcommand("check", "algebraic criteria");
  check->require_subcommand(1);

  CommonOpts sc;
  std::string sc_spec, sc_criterion = "all";
  double sc_alpha = 0.0, sc_beta = 0.0;
  bool sc_best_effort = false;
  CLI::App* check_scalar = check->add_subcommand("scalar", "scalar second-order operator");
  check_scalar->add_option("--spec", sc_spec, "operator spec JSON")->required();
  check_scalar->add_option("--criterion", sc_criterion,
                           "main|quadform|polynomial|constant|repart|all");
  check_scalar->add_option("--alpha", sc_alpha, "polynomial alpha");
  check_scalar->add_option("--beta", sc_beta, "polynomial beta");
  check_scalar->add_flag("--best-effort", sc_best_effort, "grid-search alpha, beta");
  add_common(check_scalar, sc);

  CommonOpts sy;
  std::string sy_spec;
  CLI::App* check_system = check->add_subcommand("system", "first/second-order systems");
  check_system->add_option("--spec", sy_spec, "operator spec JSON")->required();
  add_common(check_system, sy);

  CommonOpts el;
  double el_nu = 0.0;
  bool el_planar = false, el_ndim = false;
  int el_alpha_dim = 0;
  std::string el_sweep, el_out = "json";
  CLI::App* check_el = check->add_subcommand("elasticity", "Lame operator criteria");
  check_el->add_option("--nu", el_nu, "Poisson ratio");
  check_el->add_flag("--planar", el_planar, "planar necessary-and-sufficient test");
  check_el->add_flag("--ndim", el_ndim, "n-dimensional sufficient test");
  check_el->add_option("--alpha-range", el_alpha_dim, "weighted alpha range for dimension N");
  check_el->add_option("--sweep", el_sweep, "nu=a:b:step,p=a:b:step CSV sweep");
  check_el->add_option("--out", el_out, "json|csv");
  add_common(check_el, el);

  // ---- probe ----------------------------------------------------------
  CommonOpts pr;
  std::string pr_spec;
  int pr_restarts = 20, pr_grid = 33, pr_iters = 60;
  CLI::App* probe = app.add_subcommand("probe", "numerical counterexample search");
  probe->add_option("--spec", pr_spec, "operator spec JSON");
  probe->add_option("--restarts", pr_restarts, "search restarts");
  probe->add_option("--grid", pr_grid, "grid points per axis");
  probe->add_option("--iters", pr_iters, "descent iterations per restart");
  add_common(probe, pr);

  CommonOpts sg;
  double sg_lambda = 1.0;
  double sg_t = 0.0;
  bool sg_have_t = false;
  int sg_grid = 33;
  CLI::App* probe_sigma = probe->add_subcommand("sigma-example", "oscillating-coefficient example");
  probe_sigma->add_option("--lambda", sg_lambda, "coupling strength");
  probe_sigma->add_option("--t", sg_t, "modal frequency (default: quadratic vertex)")
      ->each([&](const std::string&) { sg_have_t = true; });
  probe_sigma->add_option("--grid", sg_grid, "grid points per axis");
  add_common(probe_sigma, sg);

  // ---- nonlocal -------------------------------------------------------
  CommonOpts nl;
  double nl_s = 0.5;
  int nl_grid = 65, nl_dim = 1;
  std::string nl_kernel;
  CLI::App* nonlocal = app.add_subcommand("nonlocal", "integral-operator positivity report");
  nonlocal->add_option("--s", nl_s, "fractional exponent in (0,1)");
  nonlocal->add_option("--grid", nl_grid, "grid points per axis");
  nonlocal->add_option("--dim", nl_dim, "spatial dimension");
  nonlocal->add_option("--kernel", nl_kernel, "tabulated radial kernel CSV (r,density)");
  add_common(nonlocal, nl);

  // ---- oblique --------------------------------------------------------
  CommonOpts ob;
  std::string ob_spec;
  bool ob_real = false;
  int ob_budget = 300;
  CLI::App* oblique = app.add_subcommand("oblique", "oblique-derivative boundary operator");
  oblique->add_option("--a", ob_spec, "oblique spec JSON")->required();
  oblique->add_flag("--real", ob_real, "force the real-coefficient test");
  oblique->add_option("--probe-budget", ob_budget, "power-iteration budget");
  add_common(oblique, ob);

  // ---- capacity -------------------------------------------------------
  CommonOpts cp;
  std::string cp_set, cp_mu;
  std::vector<double> cp_box{-1.0, 1.0};
  int cp_grid = 33, cp_dim = 2;
  CLI::App* capacity = app.add_subcommand("capacity", "relative Sobolev capacity");
  capacity->add_option("--set", cp_set, "test sets JSON ({boxes: [{lo, hi}]})")->required();
  capacity->add_option("--box", cp_box, "domain box lo hi (cube)")->expected(2);
  capacity->add_option("--grid", cp_grid, "grid points per axis");
  capacity->add_option("--dim", cp_dim, "spatial dimension");
  capacity->add_option("--mu", cp_mu, "density grid-function JSON for the capacity verdict");
  add_common(capacity, cp);

  // ---- run / sweep ----------------------------------------------------
  CommonOpts rn;
  std::string rn_spec, rn_out = "json", rn_criterion = "all";
  bool rn_probe = false;
  CLI::App* run = app.add_subcommand("run", "all applicable criteria plus optional probe");
  run->add_option("--spec", rn_spec, "operator spec JSON")->required();
  run->add_option("--criterion", rn_criterion, "criterion filter");
  run->add_flag("--probe", rn_probe, "run the counterexample probe");
  run->add_option("--out", rn_out, "json|csv");
  add_common(run, rn);

  CommonOpts sw;
  std::string sw_template, sw_ranges;
  CLI::App* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep to CSV");
  sweep->add_option("--template", sw_template, "spec template JSON with $param placeholders")
      ->required();
  sweep->add_option("--sweep", sw_ranges, "name=lo:hi:step,... (a 'p' range varies the exponent)")
      ->required();
  add_common(sweep, sw);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check_scalar) {
      dissip::RunOptions opts;
      opts.criterion = sc_criterion;
      opts.tol = sc.tolerances();
      opts.poly.alpha = sc_alpha;
      opts.poly.beta = sc_beta;
      opts.poly_best_effort = sc_best_effort;
      log_note("checking scalar spec " + sc_spec);
      dissip::RunReport rep =
          dissip::run_spec_file(sc_spec, dissip::make_exponent(sc.p), opts);
      if (sc_criterion != "all" && rep.outcomes.size() == 1) {
        return emit_verdict(rep.outcomes[0].verdict);
      }
      std::cout << rep.to_json().dump(2) << "\n";
      return rep.exit_code();
    }
    if (*check_system) {
      dissip::RunOptions opts;
      opts.tol = sy.tolerances();
      opts.sphere.seed = sy.seed;
      dissip::RunReport rep = dissip::run_spec_file(sy_spec, dissip::make_exponent(sy.p), opts);
      std::cout << rep.to_json().dump(2) << "\n";
      return rep.exit_code();
    }
    if (*check_el) {
      const dissip::Tolerances tol = el.tolerances();
      if (!el_sweep.empty()) {
        auto ranges = dissip::parse_sweep_spec(el_sweep);
        if (ranges.size() != 2 || ranges[0].name != "nu" || ranges[1].name != "p") {
          throw dissip::ConfigError("elasticity sweep expects nu=...:...,p=...:...");
        }
        dissip::elasticity_sweep_csv(std::cout, ranges[0], ranges[1], tol);
        return 0;
      }
      if (el_alpha_dim > 0) {
        const dissip::AlphaRange r =
            dissip::elasticity_weighted_alpha_range(el_alpha_dim, dissip::make_exponent(el.p));
        Json j;
        j["alpha_min"] = r.lo;
        j["alpha_max"] = r.hi;
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      const dissip::Exponent e = dissip::make_exponent(el.p);
      if (el_planar || !el_ndim) {
        return emit_verdict(dissip::elasticity_planar(el_nu, e, tol));
      }
      return emit_verdict(dissip::elasticity_ndim_sufficient(el_nu, e, tol));
    }
    if (*probe_sigma) {
      dissip::GridFunction sigma = dissip::make_sigma_bump(sg_grid);
      const double lam_star = dissip::sigma_lambda_threshold(sigma);
      const double t = sg_have_t ? sg_t : dissip::sigma_vertex_t(sigma, sg_lambda);
      Json j;
      j["lambda"] = sg_lambda;
      j["lambda_star"] = lam_star;
      j["t"] = t;
      j["q"] = dissip::sigma_modal_probe(sigma, sg_lambda, t);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*probe) {
      if (pr_spec.empty()) throw dissip::ConfigError("probe requires --spec");
      dissip::SearchOptions opts;
      opts.restarts = pr_restarts;
      opts.grid_points = pr_grid;
      opts.max_iters = pr_iters;
      opts.seed = pr.seed;
      opts.threads = pr.threads;
      log_note("probing spec " + pr_spec);
      dissip::ProbeResult res = dissip::search_counterexample(
          dissip::load_spec(pr_spec), dissip::make_exponent(pr.p), opts);
      Json j;
      j["value"] = res.value;
      j["converged"] = res.converged;
      j["evaluations"] = res.evaluations;
      j["counterexample"] = res.value < -10.0 * pr.tolerances().form_at(1.0);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*nonlocal) {
      const int npts = nl_grid;
      Eigen::VectorXd origin = Eigen::VectorXd::Constant(nl_dim, -1.0);
      const double h = 2.0 / (npts - 1);
      dissip::GridFunction bump = dissip::GridFunction::sample(
          nl_dim, 1, origin, h, std::vector<int>(nl_dim, npts), 1,
          [](const Eigen::VectorXd& x, int) {
            const double r = x.norm();
            if (r >= 0.9) return dissip::Complex(0, 0);
            const double c = std::cos(0.5 * M_PI * r / 0.9);
            return dissip::Complex(c * c, 0.0);
          });
      dissip::KernelSpec k;
      if (!nl_kernel.empty()) {
        k = load_kernel_table(nl_kernel, nl_dim);
      } else {
        k.kind = dissip::KernelSpec::Kind::Fractional;
        k.dimension = nl_dim;
        k.s = nl_s;
      }
      const dissip::PositivityReport rep = dissip::check_positivity_bound(
          bump, dissip::make_exponent(nl.p), k, nl.tolerances(), nl_s);
      Json j;
      j["lhs"] = rep.lhs;
      j["rhs_half"] = rep.rhs_half;
      j["margin"] = rep.margin;
      j["besov_bound"] = rep.besov_bound;
      j["half_bound_holds"] = rep.half_bound_holds;
      j["printed_rhs"] = rep.printed_rhs;
      j["printed_margin"] = rep.printed_margin;
      j["corollary_constant"] = rep.corollary_constant;
      std::cout << j.dump(2) << "\n";
      return rep.half_bound_holds ? 0 : 2;
    }
    if (*oblique) {
      dissip::OperatorSpec spec = dissip::load_spec(ob_spec);
      dissip::ObliqueProbeOptions opts;
      opts.power_iters = ob_budget;
      const dissip::Exponent e = dissip::make_exponent(ob.p);
      dissip::ObliqueCheck res = ob_real
                                     ? dissip::check_real_oblique(spec, e, opts, ob.tolerances())
                                     : dissip::check_oblique(spec, e, opts, ob.tolerances());
      return emit_verdict(res.verdict);
    }
    if (*capacity) {
      Eigen::VectorXd origin = Eigen::VectorXd::Constant(cp_dim, cp_box[0]);
      const double h = (cp_box[1] - cp_box[0]) / (cp_grid - 1);
      dissip::GridFunction proto = dissip::GridFunction::zeros(
          cp_dim, 1, origin, h, std::vector<int>(cp_dim, cp_grid), 1);
      const auto sets = load_test_sets(cp_set, proto);
      if (!cp_mu.empty()) {
        std::ifstream in(cp_mu);
        if (!in) throw dissip::ParseError("cannot open density '" + cp_mu + "'");
        Json j;
        in >> j;
        dissip::GridFunction mu = dissip::grid_function_from_json(j);
        return emit_verdict(dissip::check_schrodinger_capacity(
            mu, dissip::make_exponent(cp.p), sets, false, {}, cp.tolerances()));
      }
      Json out = Json::array();
      for (const auto& f : sets) out.push_back(dissip::capacity_estimate(f));
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*run) {
      dissip::RunOptions opts;
      opts.criterion = rn_criterion;
      opts.with_probe = rn_probe;
      opts.tol = rn.tolerances();
      opts.threads = rn.threads;
      opts.probe.seed = rn.seed;
      opts.sphere.seed = rn.seed;
      dissip::RunReport rep = dissip::run_spec_file(rn_spec, dissip::make_exponent(rn.p), opts);
      if (rn_out == "csv") {
        dissip::RunReport::csv_header(std::cout);
        rep.append_csv(std::cout);
      } else {
        std::cout << rep.to_json().dump(2) << "\n";
      }
      return rep.exit_code();
    }
    if (*sweep) {
      std::ifstream in(sw_template);
      if (!in) throw dissip::ParseError("cannot open template '" + sw_template + "'");
      Json templ;
      in >> templ;
      dissip::RunOptions opts;
      opts.tol = sw.tolerances();
      opts.threads = sw.threads;
      dissip::spec_sweep_csv(std::cout, templ, dissip::parse_sweep_spec(sw_ranges), sw.p, opts);
      return 0;
    }
  } catch (const dissip::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "error: invalid JSON: " << err.what() << "\n";
    return 3;
  }
  return 3;
}
