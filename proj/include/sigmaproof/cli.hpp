#pragma once

// Command-line front end. Exit status: 0 success, 1 a check or the sweep
// failed, 2 bad usage or unreadable input.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigmaproof/certificates.hpp"
#include "sigmaproof/closed_form.hpp"
#include "sigmaproof/config_io.hpp"
#include "sigmaproof/objective.hpp"
#include "sigmaproof/oracle.hpp"
#include "sigmaproof/proof_engine.hpp"

namespace sigmaproof {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string fmt(double v, int digits = 10) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  return out;
}

inline Point2 parse_point(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw UsageError("a point is written x,y");
  return {v[0], v[1]};
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << j.dump(2) << '\n';
}

inline void print_witness(std::ostream& out, const Configuration& cfg, const RadiiAssignment& w) {
  out << "  witness:";
  for (std::size_t i = 0; i < w.size(); ++i) out << ' ' << cfg.label(i) << '=' << fmt(w[i], 8);
  out << '\n';
}

inline nlohmann::json value_json(const ObjectiveValue& v) {
  return {{"certified", v.value}, {"optimum", v.optimum}, {"witness", v.witness.radii},
          {"found", v.found}};
}

inline void print_report(std::ostream& out, const CertificateReport& r) {
  out << r.name << ": " << (r.overall() ? "PASS" : "FAIL") << '\n';
  for (const auto& c : r.checks)
    out << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.description << " = " << fmt(c.value)
        << "  (" << c.relation << ")\n";
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate the density min-max objective and run the discretized sweep."};
  app.name("sigmaproof");
  app.require_subcommand(1);

  // closed-form
  double cf_sigma = 0;
  auto* cf = app.add_subcommand("closed-form", "Zero- and one-generation min-max values");
  cf->add_option("sigma", cf_sigma, "density parameter in (1/2, 1]")->required();

  auto* roots = app.add_subcommand("roots", "Threshold values of sigma and their residuals");

  // eval
  std::string ev_path, ev_which = "full", ev_radii;
  bool ev_parity = false, ev_json = false;
  auto* ev = app.add_subcommand("eval", "Maximize the objective over a configuration file");
  ev->add_option("config", ev_path, "configuration JSON")->required();
  ev->add_option("--which", ev_which, "sharp, flat, bar-flat or full")
      ->check(CLI::IsMember({"sharp", "flat", "bar-flat", "full"}));
  ev->add_option("--radii", ev_radii, "evaluate at these radii (comma separated) instead");
  ev->add_flag("--skip-singletons", ev_parity, "score singletons as infeasible, as the sweep does");
  ev->add_flag("--json", ev_json, "print JSON");

  // certify
  std::string ce_name = "all", ce_report;
  bool ce_json = false;
  auto* ce = app.add_subcommand("certify", "Verify a built-in configuration");
  ce->add_option("name", ce_name, "six_point_0683, trapezoid_064368, metric_quadrilateral_pt, "
                                  "interval_set or all");
  ce->add_option("--report", ce_report, "write the reports as JSON");
  ce->add_flag("--json", ce_json, "print JSON instead of a table");

  // net
  SweepParams net_params;
  double net_step = 0.03, net_r = 0, net_m = 0;
  std::string net_p1, net_p2;
  bool net_list = false;
  auto* net = app.add_subcommand("net", "Lattice net of dangerous children near p1");
  net->add_option("--p1", net_p1, "x,y")->required();
  net->add_option("--p2", net_p2, "x,y")->required();
  net->add_option("--sigma", net_params.sigma, "density parameter")->capture_default_str();
  net->add_option("--step", net_step, "lattice step")->capture_default_str();
  net->add_option("--r", net_r, "radius (default 1 + delta/sqrt2)");
  net->add_option("--m", net_m, "value threshold (default sqrt2 delta)");
  net->add_option("--delta", net_params.delta, "cube size used for the defaults")
      ->capture_default_str();
  net->add_flag("--list", net_list, "print the points");

  // prove
  SweepParams pr_params;
  std::string pr_s2 = "0.05,0.02,0.01", pr_checkpoint, pr_report;
  std::size_t pr_sample = 1000, pr_workers = default_workers();
  bool pr_full = false, pr_restart = false, pr_quiet = false;
  auto* pr = app.add_subcommand("prove", "Run the discretized sweep");
  pr->add_option("--sigma", pr_params.sigma)->capture_default_str();
  pr->add_option("--delta", pr_params.delta)->capture_default_str();
  pr->add_option("--s3-delta", pr_params.s3_delta)->capture_default_str();
  pr->add_option("--s2-deltas", pr_s2, "comma separated")->capture_default_str();
  pr->add_option("--seed", pr_params.seed)->capture_default_str();
  pr->add_option("--workers", pr_workers, "default from SIGMAPROOF_WORKERS or the core count")
      ->check(CLI::PositiveNumber);
  auto* sample_opt = pr->add_option("--sample", pr_sample, "sweep this many shuffled cubes")
                         ->capture_default_str()
                         ->check(CLI::PositiveNumber);
  pr->add_flag("--full", pr_full, "sweep every cube")->excludes(sample_opt);
  pr->add_flag("--exact-subsets", pr_params.exact_subsets,
               "enumerate all subsets in the clique test");
  pr->add_option("--checkpoint", pr_checkpoint, "append-only progress log; resumed if present");
  pr->add_flag("--restart", pr_restart, "discard an existing checkpoint");
  pr->add_option("--report", pr_report, "write the report as JSON");
  pr->add_flag("--quiet", pr_quiet, "no progress output");

  // oracle
  std::string or_path;
  double or_step = 1e-3;
  auto* orc = app.add_subcommand("oracle", "Grid search over radii (at most three points)");
  orc->add_option("config", or_path, "configuration JSON")->required();
  orc->add_option("--step", or_step, "grid step")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cf) {
      out << "zero_gen_minmax " << detail::fmt(zero_gen_minmax(cf_sigma)) << '\n';
      if (cf_sigma > 0.5 && cf_sigma <= 0.75)
        out << "one_gen_minmax " << detail::fmt(one_gen_minmax(cf_sigma)) << '\n';
      else
        out << "one_gen_minmax n/a (defined on (1/2, 3/4])\n";
      return kExitOk;
    }

    if (*roots) {
      const double pt = sigma_pt(), lo = sigma_lower();
      out << "sigma_b " << detail::fmt(sigma_b(), 17) << '\n';
      out << "sigma_pt " << detail::fmt(pt, 17) << "  residual "
          << detail::fmt(one_gen_numerator(pt), 3) << '\n';
      out << "sigma_lower " << detail::fmt(lo, 17) << "  residual "
          << detail::fmt(32 * lo * lo * lo - 32 * lo * lo + 12 * lo - 3, 3) << '\n';
      return kExitOk;
    }

    if (*ev) {
      const auto file = read_config_file(ev_path);
      const auto& cfg = file.config;
      nlohmann::json j;
      if (!ev_radii.empty()) {
        RadiiAssignment r{detail::parse_list(ev_radii)};
        if (r.size() != cfg.size()) throw detail::UsageError("one radius per point is required");
        j = {{"F", eval_F(cfg, r)}, {"F_sharp", eval_F_sharp(cfg, r)},
             {"F_flat", eval_F_flat(cfg, r)}};
      } else {
        SubsetOptions opt;
        opt.include_singletons = !ev_parity;
        if (ev_which == "sharp" || ev_which == "full") j["M_sharp"] = detail::value_json(M_sharp(cfg, opt));
        if (ev_which == "flat" || ev_which == "full") j["M_flat"] = detail::value_json(M_flat(cfg));
        if (ev_which == "bar-flat" || ev_which == "full")
          j["bar_M_flat"] = detail::value_json(bar_M_flat(cfg));
        if (ev_which == "full") j["M_sigma"] = detail::value_json(M_sigma(cfg));
      }
      if (ev_json) {
        out << j.dump(2) << '\n';
        return kExitOk;
      }
      for (const auto& [k, v] : j.items()) {
        if (v.is_number()) {
          out << k << ' ' << detail::fmt(v.get<double>()) << '\n';
          continue;
        }
        out << k << " optimum " << detail::fmt(v["optimum"].get<double>()) << "  certified >= "
            << detail::fmt(v["certified"].get<double>()) << '\n';
        if (v["found"].get<bool>())
          detail::print_witness(out, cfg, {v["witness"].get<std::vector<double>>()});
      }
      return kExitOk;
    }

    if (*ce) {
      std::vector<std::string> names;
      if (ce_name == "all")
        names = builtin_names();
      else
        names.push_back(ce_name);
      std::vector<CertificateReport> reports;
      for (const auto& n : names) reports.push_back(certify(n));
      bool ok = true;
      for (const auto& r : reports) ok = ok && r.overall();
      const nlohmann::json j = reports;
      if (ce_json)
        out << j.dump(2) << '\n';
      else
        for (const auto& r : reports) detail::print_report(out, r);
      if (!ce_report.empty()) detail::write_json_file(ce_report, j);
      return ok ? kExitOk : kExitFailed;
    }

    if (*net) {
      const Point2 p1 = detail::parse_point(net_p1), p2 = detail::parse_point(net_p2);
      const double r = net->count("--r") ? net_r : net_params.r_delta();
      const double m = net->count("--m") ? net_m : net_params.m_delta();
      const auto pts = x_net(net_params, net_step, p1, p2, r, m);
      out << "points " << pts.size() << '\n';
      out << "diameter_bound " << detail::fmt(net_diameter(pts, net_params.eps)) << '\n';
      if (net_list)
        for (const auto& q : pts) out << detail::fmt(q.x, 12) << ' ' << detail::fmt(q.y, 12) << '\n';
      return kExitOk;
    }

    if (*pr) {
      pr_params.s2_deltas = detail::parse_list(pr_s2);
      if (!pr_full) pr_params.sample = pr_sample;
      pr_params.validate();
      SweepOptions so;
      so.workers = pr_workers;
      so.checkpoint_path = pr_checkpoint;
      so.restart = pr_restart;
      if (!pr_quiet) {
        so.progress = [&err, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
          const std::size_t pct = total ? done * 100 / total : 100;
          if (pct != last || done == total) {
            err << "\rprogress " << done << '/' << total << std::flush;
            last = pct;
          }
          if (done == total) err << '\n';
        };
      }
      const auto rep = run_sweep(pr_params, so);
      out << "cubes " << rep.total_cubes << " selected " << rep.selected_cubes << " processed "
          << rep.processed << " (resumed " << rep.resumed << ")\n";
      out << "S1 " << rep.count_s1 << "  S2 " << rep.count_s2 << "  S3 " << rep.count_s3
          << "  Failed " << rep.count_failed << '\n';
      for (const auto& [d, c] : rep.s2_by_step) out << "  S2 step " << d << ": " << c << '\n';
      out << "wall time " << detail::fmt(rep.wall_time, 4) << " s\n";
      out << "verdict " << to_string(rep.verdict) << '\n';
      if (!pr_report.empty()) detail::write_json_file(pr_report, report_json(rep));
      return rep.verdict == Verdict::Proved ? kExitOk : kExitFailed;
    }

    if (*orc) {
      const auto file = read_config_file(or_path);
      const auto res = grid_oracle(file.config, or_step);
      out << "sharp " << detail::fmt(res.sharp) << '\n';
      out << "flat " << detail::fmt(res.flat) << '\n';
      out << "bar_flat " << detail::fmt(res.bar_flat) << '\n';
      out << "sigma " << detail::fmt(res.sigma_value()) << '\n';
      return kExitOk;
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {  // domain and parameter errors
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << "error: " << e.what() << " (use --restart to discard it)\n";
    return kExitFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace sigmaproof
