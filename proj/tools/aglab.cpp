// aglab: numerical laboratory for the Aviles-Giga energy on convex planar
// domains. Subcommands: domain, competitor, minimize, energy, identity-check,
// verify, sweep, plot.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aglab/competitor.hpp"
#include "aglab/energy.hpp"
#include "aglab/entropy.hpp"
#include "aglab/io.hpp"
#include "aglab/minimize.hpp"
#include "aglab/plot.hpp"
#include "aglab/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aglab;

namespace {

int default_threads() {
  if (const char* env = std::getenv("AGLAB_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

ConvexDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("domain file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed domain JSON in " + path + ": " + e.what());
  }
  return ConvexDomain::from_json(j);
}

json minimize_summary(const MinimizeResult& res, double eps) {
  return {{"final_energy", res.final_energy},
          {"iterations", res.trace.size()},
          {"converged", res.converged},
          {"stalled", res.stalled},
          {"boundary_residual_value", res.boundary_residual_value},
          {"boundary_residual_grad", res.boundary_residual_grad},
          {"eps", eps}};
}

std::string trace_csv(const std::vector<IterationRecord>& trace) {
  std::string out = "iter,energy,grad_norm,step,restarted\n";
  for (const IterationRecord& r : trace) {
    out += std::to_string(r.iter) + ',' + format_double(r.energy) + ',' + format_double(r.grad_norm) +
           ',' + format_double(r.step) + ',' + (r.restarted ? "1" : "0") + '\n';
  }
  return out;
}

struct SweepConfig {
  std::vector<SweepMember> family;
  Pipeline pipeline = Pipeline::Competitor;
  SweepOptions opts;
  fs::path out_dir;
  long seed = 0;
};

SweepConfig parse_sweep_config(const fs::path& path, bool override_coarse) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file not found: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("malformed config JSON: " + std::string(e.what()));
  }
  SweepConfig cfg;
  cfg.pipeline = pipeline_from_string(j.value("pipeline", std::string("competitor")));
  cfg.out_dir = j.value("out", std::string("out"));
  cfg.seed = j.value("seed", 0L);
  cfg.opts.q = j.value("q", 24);
  cfg.opts.h = j.value("h", 0.0);
  cfg.opts.threads = j.value("threads", default_threads());
  if (j.contains("minimize")) {
    const json& m = j["minimize"];
    cfg.opts.minimize.max_iters = m.value("max_iters", cfg.opts.minimize.max_iters);
    cfg.opts.minimize.grad_tol = m.value("grad_tol", cfg.opts.minimize.grad_tol);
    cfg.opts.minimize.boundary_penalty_weight =
        m.value("lambda_b", cfg.opts.minimize.boundary_penalty_weight);
  }

  if (j.contains("family")) {
    if (!j["family"].is_array() || j["family"].empty())
      throw ValidationError("config: family must be a non-empty array");
    for (const json& m : j["family"]) {
      SweepMember sm{[&] {
                       if (m.contains("domain_file")) return load_domain(m["domain_file"].get<std::string>());
                       return ConvexDomain::from_json(m.at("domain"));
                     }(),
                     m.at("eps").get<double>(), m.at("beta").get<double>(),
                     m.value("label", std::string("member") + std::to_string(cfg.family.size()))};
      cfg.family.push_back(std::move(sm));
    }
  } else if (j.contains("generator")) {
    const json& gen = j["generator"];
    const std::string type = gen.at("type").get<std::string>();
    if (type == "ellipse-beta") {
      if (!gen.contains("beta") || gen["beta"].empty())
        throw ValidationError("config: generator.beta must be non-empty");
      for (double beta : gen["beta"].get<std::vector<double>>()) {
        double eps = gen.contains("eps") ? gen["eps"].get<double>() : std::sqrt(beta) / 4.0;
        char label[64];
        std::snprintf(label, sizeof(label), "beta%g", beta);
        cfg.family.push_back(
            {ConvexDomain::ellipse({0, 0}, 1.0, 1.0 - beta / kPi, 0.0), eps, beta, label});
      }
    } else if (type == "ellipse-alpha") {
      // eccentricity family at fixed eps; beta couples to the members as 4(alpha + eps)
      double eps = gen.at("eps").get<double>();
      if (!gen.contains("b") || gen["b"].empty()) throw ValidationError("config: generator.b must be non-empty");
      for (double b : gen["b"].get<std::vector<double>>()) {
        double alpha = kPi * (1.0 - b);
        char label[64];
        std::snprintf(label, sizeof(label), "b%g", b);
        cfg.family.push_back({ConvexDomain::ellipse({0, 0}, 1.0, b, 0.0), eps, 4.0 * (alpha + eps), label});
      }
    } else {
      throw ValidationError("config: unknown generator type " + type);
    }
  } else {
    throw ValidationError("config needs either a family list or a generator");
  }

  if (!override_coarse && cfg.opts.h > 0.0) {
    for (const SweepMember& m : cfg.family)
      if (cfg.opts.h > m.eps / 4.0)
        throw ValidationError("config: h exceeds eps/4 for member " + m.label +
                              " (pass --override-coarse-grid to proceed)");
  }
  return cfg;
}

std::string aggregate_csv(const SweepResult& res, const std::vector<SweepMember>& family) {
  std::string csv =
      "label,beta,eps,alpha,energy,entropy_production,eikonal_defect,symdiff,deviation,w12_gap,h,"
      "excluded_area,admissible\n";
  std::size_t ri = 0;
  for (const SweepMember& m : family) {
    if (ri >= res.labels.size() || res.labels[ri] != m.label) continue;  // failed member
    const TheoremReport& r = res.reports[ri++];
    csv += m.label + ',' + format_double(m.beta) + ',' + format_double(r.epsilon) + ',' +
           format_double(r.alpha) + ',' + format_double(r.beta_energy) + ',' +
           format_double(r.entropy_production) + ',' + format_double(r.eikonal_defect) + ',' +
           format_double(r.symdiff) + ',' + format_double(r.deviation) + ',' + format_double(r.w12_gap) +
           ',' + format_double(r.h) + ',' + format_double(r.excluded_area) + ',' +
           (r.admissible ? "1" : "0") + '\n';
  }
  return csv;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::vector<double> column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError("CSV is missing column " + name);
    std::size_t idx = it - header.begin();
    std::vector<double> out;
    for (const auto& row : rows) {
      try {
        out.push_back(std::stod(row.at(idx)));
      } catch (const std::exception&) {
        throw ValidationError("malformed CSV value '" + row.at(idx) + "' in column " + name);
      }
    }
    return out;
  }
};

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = cells;
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw ValidationError("malformed CSV row: " + line);
      t.rows.push_back(cells);
    }
  }
  if (t.header.empty()) throw ValidationError("empty CSV");
  return t;
}

// log-log scatter + fitted line per response; deterministic bytes
void emit_plots(const std::string& csv_text, const fs::path& out_dir) {
  CsvTable t = parse_csv(csv_text);
  if (t.rows.size() < 3) throw ValidationError("CSV needs at least 3 data rows for plots");
  auto beta = t.column("beta");
  auto energy = t.column("energy");
  auto eps = t.column("eps");
  auto alpha = t.column("alpha");
  auto w12 = t.column("w12_gap");
  auto dev = t.column("deviation");
  std::vector<double> ea(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) ea[i] = eps[i] + alpha[i];

  atomic_write(out_dir / "fit_energy_vs_beta.svg",
               loglog_svg(beta, energy, loglog_fit(beta, energy), "beta", "energy", "energy vs beta"));
  atomic_write(out_dir / "fit_w12_vs_eps_alpha.svg",
               loglog_svg(ea, w12, loglog_fit(ea, w12), "eps+alpha", "w12_gap", "w12 gap vs eps+alpha"));
  atomic_write(out_dir / "fit_deviation_vs_energy.svg",
               loglog_svg(energy, dev, loglog_fit(energy, dev), "energy", "deviation", "deviation vs energy"));
}

json fit_to_json(const FitResult& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"n_points", f.n_points}};
}

void write_json(const fs::path& path, const json& j) { atomic_write(path, j.dump(2) + "\n"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for the Aviles-Giga energy on convex domains"};
  app.require_subcommand(1);
  // --h is a domain flag (grid spacing), so help lives on --help only
  app.set_help_flag("--help", "print help");

  int threads = default_threads();
  app.add_option("--threads", threads, "worker threads (env AGLAB_THREADS)");

  // ---- domain ---------------------------------------------------------------
  auto* cmd_domain = app.add_subcommand("domain", "inspect or normalize a domain");
  cmd_domain->set_help_flag("--help", "print help");
  std::string dom_path, dom_out;
  bool dom_normalize = false;
  cmd_domain->add_option("--domain", dom_path, "domain JSON file")->required();
  cmd_domain->add_flag("--normalize", dom_normalize, "normalize to centroid 0, diameter 2");
  cmd_domain->add_option("--out", dom_out, "write the (normalized) domain JSON here");

  // ---- competitor -----------------------------------------------------------
  auto* cmd_comp = app.add_subcommand("competitor", "build the low-energy test function");
  cmd_comp->set_help_flag("--help", "print help");
  std::string comp_domain, comp_out = "out";
  double comp_beta = 0.0, comp_eps = 0.0, comp_h = 0.0;
  int comp_q = 32;
  cmd_comp->add_option("--domain", comp_domain, "domain JSON file")->required();
  cmd_comp->add_option("--beta", comp_beta, "symmetric-difference budget")->required();
  cmd_comp->add_option("--eps", comp_eps, "singular perturbation scale")->required();
  cmd_comp->add_option("--h", comp_h, "grid spacing (default eps/4)");
  cmd_comp->add_option("--q", comp_q, "mollifier quadrature order");
  cmd_comp->add_option("--out", comp_out, "output directory");
  bool comp_csv = false;
  cmd_comp->add_flag("--csv", comp_csv, "also export the field as CSV");

  // ---- minimize -------------------------------------------------------------
  auto* cmd_min = app.add_subcommand("minimize", "minimize the energy over the admissible class");
  cmd_min->set_help_flag("--help", "print help");
  std::string min_domain, min_out = "out", min_seed = "competitor";
  double min_eps = 0.0, min_h = 0.0, min_gtol = 1e-5, min_lam = 1e3, min_beta = 0.0;
  int min_iters = 500, min_q = 24;
  cmd_min->add_option("--domain", min_domain, "domain JSON file")->required();
  cmd_min->add_option("--eps", min_eps, "singular perturbation scale")->required();
  cmd_min->add_option("--h", min_h, "grid spacing (default eps/4)");
  cmd_min->add_option("--max-iters", min_iters, "iteration budget");
  cmd_min->add_option("--grad-tol", min_gtol, "stationarity threshold");
  cmd_min->add_option("--lambda-b", min_lam, "boundary penalty weight");
  cmd_min->add_option("--seed-from", min_seed, "competitor|cone|zero");
  cmd_min->add_option("--beta", min_beta, "competitor-seed beta (default 16 eps^2)");
  cmd_min->add_option("--q", min_q, "mollifier quadrature order for the seed");
  cmd_min->add_option("--out", min_out, "output directory");
  bool min_csv = false;
  cmd_min->add_flag("--csv", min_csv, "also export the field as CSV");

  // ---- energy ---------------------------------------------------------------
  auto* cmd_energy = app.add_subcommand("energy", "evaluate the energy of a stored field");
  cmd_energy->set_help_flag("--help", "print help");
  std::string en_domain, en_field, en_out;
  double en_eps = 0.0;
  cmd_energy->add_option("--domain", en_domain, "domain JSON file")->required();
  cmd_energy->add_option("--field", en_field, "binary field file")->required();
  cmd_energy->add_option("--eps", en_eps, "singular perturbation scale")->required();
  cmd_energy->add_option("--out", en_out, "also write the report here");

  // ---- identity-check -------------------------------------------------------
  auto* cmd_id = app.add_subcommand("identity-check", "entropy-pair divergence identity residual");
  cmd_id->set_help_flag("--help", "print help");
  std::string id_domain, id_source = "test-function";
  double id_h = 0.02, id_delta = 0.5, id_theta_deg = 0.0, id_eps = 0.05, id_beta = 0.0;
  int id_q = 24;
  cmd_id->add_option("--domain", id_domain, "domain JSON file")->required();
  cmd_id->add_option("--h", id_h, "coarsest grid spacing");
  cmd_id->add_option("--delta", id_delta, "ramp transition width");
  cmd_id->add_option("--theta-deg", id_theta_deg, "entropy direction in degrees");
  cmd_id->add_option("--source", id_source, "competitor|minimizer|test-function");
  cmd_id->add_option("--eps", id_eps, "scale for competitor/minimizer sources");
  cmd_id->add_option("--beta", id_beta, "beta for competitor/minimizer sources");
  cmd_id->add_option("--q", id_q, "mollifier quadrature order");

  // ---- verify ---------------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "theorem-level report for one run");
  cmd_verify->set_help_flag("--help", "print help");
  std::string ver_domain, ver_pipeline = "competitor", ver_out;
  double ver_eps = 0.0, ver_h = 0.0, ver_beta = 0.0;
  int ver_q = 24, ver_iters = 300;
  cmd_verify->add_option("--domain", ver_domain, "domain JSON file")->required();
  cmd_verify->add_option("--eps", ver_eps, "singular perturbation scale")->required();
  cmd_verify->add_option("--h", ver_h, "grid spacing (default eps/4)");
  cmd_verify->add_option("--pipeline", ver_pipeline, "competitor|minimize");
  cmd_verify->add_option("--beta", ver_beta, "competitor beta (default 16 eps^2)");
  cmd_verify->add_option("--q", ver_q, "mollifier quadrature order");
  cmd_verify->add_option("--max-iters", ver_iters, "minimize iteration budget");
  cmd_verify->add_option("--out", ver_out, "also write the report here");

  // ---- sweep ----------------------------------------------------------------
  auto* cmd_sweep = app.add_subcommand("sweep", "run a family and fit scaling exponents");
  cmd_sweep->set_help_flag("--help", "print help");
  std::string sweep_config, sweep_out_override;
  bool override_coarse = false;
  cmd_sweep->add_option("--config", sweep_config, "experiment config JSON")->required();
  cmd_sweep->add_option("--out", sweep_out_override, "override the config output directory");
  cmd_sweep->add_flag("--override-coarse-grid", override_coarse, "accept h > eps/4");

  // ---- plot -----------------------------------------------------------------
  auto* cmd_plot = app.add_subcommand("plot", "emit log-log SVG plots from a sweep CSV");
  cmd_plot->set_help_flag("--help", "print help");
  std::string plot_csv, plot_out = "out";
  cmd_plot->add_option("--csv", plot_csv, "aggregate CSV from sweep")->required();
  cmd_plot->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_domain) {
      ConvexDomain dom = load_domain(dom_path);
      if (dom_normalize) dom = dom.normalize();
      auto [kmax, kpt] = dom.max_curvature();
      (void)kpt;
      BestFitBall fit = best_fit_ball(dom);
      json j{{"domain", dom.to_json()},
             {"area", dom.area()},
             {"perimeter", dom.perimeter()},
             {"diameter", dom.diameter()},
             {"centroid", {dom.centroid().x, dom.centroid().y}},
             {"max_curvature", std::isfinite(kmax) ? json(kmax) : json("infinite")},
             {"best_fit_center", {fit.center.x, fit.center.y}},
             {"alpha", fit.alpha}};
      std::cout << j.dump(2) << "\n";
      if (!dom_out.empty()) write_json(dom_out, dom.to_json());
      return 0;
    }

    if (*cmd_comp) {
      ConvexDomain dom = load_domain(comp_domain);
      if (comp_h <= 0.0) comp_h = comp_eps / 4.0;
      CompetitorParams params(comp_eps, comp_beta, comp_q);
      ScalarField xi = build_competitor(dom, params, comp_h, threads);
      EnergyReport rep = aviles_giga_energy(xi, comp_eps);

      VectorField g = gradient(xi);
      double worst_trace = 0.0, mean_trace = 0.0;
      int n_ok = 0;
      for (const TraceSample& t : boundary_trace_gradient(g, dom, 512)) {
        if (!t.ok) continue;
        worst_trace = std::max(worst_trace, std::abs(t.grad_dot_normal - 1.0));
        mean_trace += std::abs(t.grad_dot_normal - 1.0);
        ++n_ok;
      }
      if (n_ok > 0) mean_trace /= n_ok;

      ScalarField dist = ScalarField::sample(xi.dm, [&](Vec2 p) { return dom.signed_distance(p); }, threads);
      ContactSetDiagnostic contact = contact_set_diagnostic(dist, comp_beta, comp_eps);

      fs::path out(comp_out);
      atomic_write(out / "field.bin", field_to_binary(xi));
      if (comp_csv) atomic_write(out / "field.csv", field_to_csv(xi));
      json summary{{"energy", rep.to_json()},
                   {"trace", {{"max_abs_residual", worst_trace}, {"mean_abs_residual", mean_trace}, {"samples", n_ok}}},
                   {"contact",
                    {{"empty", contact.empty},
                     {"expected_radius", contact.expected_radius},
                     {"hausdorff_band", contact.hausdorff_band},
                     {"tube_area", contact.tube_area}}},
                   {"beta", comp_beta},
                   {"q", comp_q}};
      write_json(out / "summary.json", summary);
      std::cout << "competitor: energy " << format_double(rep.total) << ", max trace residual "
                << format_double(worst_trace) << ", wrote " << (out / "field.bin").string() << "\n";
      return 0;
    }

    if (*cmd_min) {
      ConvexDomain dom = load_domain(min_domain);
      if (min_h <= 0.0) min_h = min_eps / 4.0;
      MinimizeOptions opts;
      opts.max_iters = min_iters;
      opts.grad_tol = min_gtol;
      opts.boundary_penalty_weight = min_lam;
      opts.seed_beta = min_beta;
      opts.seed_q = min_q;
      if (min_seed == "competitor")
        opts.seed = MinimizeOptions::Seed::Competitor;
      else if (min_seed == "cone")
        opts.seed = MinimizeOptions::Seed::Cone;
      else if (min_seed == "zero")
        opts.seed = MinimizeOptions::Seed::Zero;
      else
        throw ValidationError("unknown seed: " + min_seed);

      MinimizeResult res = minimize_field(dom, min_eps, opts, min_h, nullptr, threads);
      fs::path out(min_out);
      atomic_write(out / "iterations.csv", trace_csv(res.trace));
      if (res.numerical_failure) {
        std::cerr << "numerical failure during minimize: " << res.failure_message << " (partial log kept)\n";
        return 2;
      }
      atomic_write(out / "field.bin", field_to_binary(res.u));
      if (min_csv) atomic_write(out / "field.csv", field_to_csv(res.u));
      write_json(out / "summary.json", minimize_summary(res, min_eps));
      std::cout << "minimize: final energy " << format_double(res.final_energy) << " after "
                << res.trace.size() << " iterations" << (res.stalled ? " (stalled)" : "") << "\n";
      return 0;
    }

    if (*cmd_energy) {
      ConvexDomain dom = load_domain(en_domain);
      RawField rf = field_from_binary(en_field);
      MaskPtr dm = rasterize(dom, rf.spec.h, threads);
      ScalarField u = field_from_raw(rf, dm);
      EnergyReport rep = aviles_giga_energy(u, en_eps);
      std::cout << rep.to_json().dump(2) << "\n";
      if (!en_out.empty()) write_json(en_out, rep.to_json());
      return 0;
    }

    if (*cmd_id) {
      ConvexDomain dom = load_domain(id_domain);
      double th = id_theta_deg * kPi / 180.0;
      EntropyPair pair({std::cos(th), std::sin(th)}, SmoothRamp(id_delta));
      if (id_beta <= 0.0) id_beta = 16.0 * id_eps * id_eps;

      auto field_at = [&](double h) -> ScalarField {
        if (id_source == "test-function") {
          MaskPtr dm = rasterize(dom, h, threads);
          return ScalarField::sample(dm, [](Vec2 p) {
            return 0.15 * std::sin(2.0 * p.x + 0.7) * std::cos(p.y - 0.3) + 0.1 * std::cos(p.x - 2.0 * p.y);
          });
        }
        if (id_source == "competitor")
          return build_competitor(dom, CompetitorParams(id_eps, id_beta, id_q), h, threads);
        if (id_source == "minimizer") {
          MinimizeOptions opts;
          opts.seed_q = id_q;
          opts.seed_beta = id_beta;
          return minimize_field(dom, id_eps, opts, h, nullptr, threads).u;
        }
        throw ValidationError("unknown source: " + id_source);
      };

      std::vector<double> hs{id_h, id_h / 2.0, id_h / 4.0}, residuals;
      double rhs_check = 0.0;
      for (double h : hs) {
        IdentityResidual res = identity_residual(rotated_gradient(field_at(h)), pair);
        residuals.push_back(res.residual_l1);
        rhs_check = res.rhs_check;
      }
      FitResult fit = loglog_fit(hs, residuals);
      json j{{"residual_l1", residuals.back()},
             {"rhs_check", rhs_check},
             {"order_estimate", fit.slope},
             {"h", hs},
             {"residuals", residuals}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*cmd_verify) {
      ConvexDomain dom = load_domain(ver_domain);
      if (ver_h <= 0.0) ver_h = ver_eps / 4.0;
      if (ver_beta <= 0.0) ver_beta = 16.0 * ver_eps * ver_eps;
      Pipeline pipe = pipeline_from_string(ver_pipeline);
      ScalarField u = build_competitor(dom, CompetitorParams(ver_eps, ver_beta, ver_q), ver_h, threads);
      if (pipe == Pipeline::Minimize) {
        MinimizeOptions opts;
        opts.max_iters = ver_iters;
        MinimizeResult res = minimize_field(dom, ver_eps, opts, ver_h, &u, threads);
        if (res.numerical_failure) throw NumericError(res.failure_message);
        u = res.u;
      }
      TheoremReport rep = verify_theorem(dom, u, ver_eps);
      std::cout << rep.to_json().dump(2) << "\n";
      if (!ver_out.empty()) write_json(ver_out, rep.to_json());
      return 0;
    }

    if (*cmd_sweep) {
      SweepConfig cfg = parse_sweep_config(sweep_config, override_coarse);
      if (!sweep_out_override.empty()) cfg.out_dir = sweep_out_override;
      cfg.opts.threads = threads;
      SweepResult res = exponent_sweep(cfg.family, cfg.pipeline, cfg.opts);
      if (res.reports.empty()) {
        std::cerr << "sweep: every family member failed\n";
        for (const std::string& f : res.failures) std::cerr << "  " << f << "\n";
        return 2;
      }
      for (std::size_t i = 0; i < res.reports.size(); ++i)
        write_json(cfg.out_dir / ("report_" + res.labels[i] + ".json"), res.reports[i].to_json());
      std::string csv = aggregate_csv(res, cfg.family);
      atomic_write(cfg.out_dir / "aggregate.csv", csv);
      json fits{{"failures", res.failures}, {"n_success", res.reports.size()}};
      if (res.fits_valid) {
        fits["energy_vs_beta"] = fit_to_json(res.fit_energy_vs_beta);
        fits["w12_vs_eps_alpha"] = fit_to_json(res.fit_w12_vs_eps_alpha);
        fits["deviation_vs_energy"] = fit_to_json(res.fit_deviation_vs_energy);
        emit_plots(csv, cfg.out_dir);
      }
      write_json(cfg.out_dir / "fits.json", fits);
      std::cout << "sweep: " << res.reports.size() << "/" << cfg.family.size() << " members, results in "
                << cfg.out_dir.string() << "\n";
      return 0;
    }

    if (*cmd_plot) {
      std::ifstream in(plot_csv);
      if (!in) throw ValidationError("CSV file not found: " + plot_csv);
      std::stringstream ss;
      ss << in.rdbuf();
      emit_plots(ss.str(), plot_out);
      std::cout << "plot: wrote 3 SVG files to " << plot_out << "\n";
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
