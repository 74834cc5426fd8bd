#include "preyswitch/cli.hpp"

#include <charconv>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "preyswitch/connection.hpp"
#include "preyswitch/error.hpp"
#include "preyswitch/io.hpp"
#include "preyswitch/sliding.hpp"

namespace preyswitch {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> split_numbers(const std::string& text, char sep, std::size_t expected,
                                  const char* flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    const std::string piece = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
    double v = 0.0;
    const auto res = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || res.ec != std::errc() || res.ptr != piece.data() + piece.size())
      throw UsageError(std::string(flag) + ": cannot parse '" + piece + "' as a number");
    out.push_back(v);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (out.size() != expected)
    throw UsageError(std::string(flag) + ": expected " + std::to_string(expected) + " values in '" + text + "'");
  return out;
}

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
};

Grid parse_grid(const std::string& text) {
  const auto v = split_numbers(text, ':', 3, "--grid");
  if (!(v[2] >= 0.0) || v[2] != static_cast<double>(static_cast<std::size_t>(v[2])))
    throw UsageError("--grid: node count must be a nonnegative integer");
  if (!(v[0] <= v[1])) throw UsageError("--grid: lo must not exceed hi");
  return {v[0], v[1], static_cast<std::size_t>(v[2])};
}

struct Options {
  std::string params_path;
  std::string out_path;
  std::string format;
  std::string point;
  std::string grid;
  std::string beta1_range = "0.994:10";
  std::string events_path;
  double tol = 0.0;
  double t_max = 0.0;
  double x0 = 0.0;
  double r2 = 0.0;
  unsigned threads = 0;
};

IntegratorConfig make_config(const Options& o) {
  IntegratorConfig cfg;
  if (o.tol > 0.0) {
    cfg.rel_tol = o.tol;
    cfg.abs_tol = o.tol * 1e-2;
    cfg.event_tol = cfg.abs_tol;
  }
  if (o.t_max > 0.0) cfg.t_max = o.t_max;
  cfg.validate();
  return cfg;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out_path.empty()) out << text;
  else write_text(o.out_path, text);
}

bool want_json(const Options& o, const char* fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  return f == "json";
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Filippov prey-switching model: sliding dynamics and Shilnikov connection search", "preyswitch"};
  app.require_subcommand(1);
  Options o;
  o.threads = std::max(1u, std::thread::hardware_concurrency());

  auto add_params = [&](CLI::App* sub) { sub->add_option("--params", o.params_path, "parameters JSON")->required(); };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", o.out_path, "output file (stdout if omitted)"); };
  auto add_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "relative tolerance; abs and event tolerances follow at 1e-2 of it")
        ->check(CLI::PositiveNumber);
    sub->add_option("--t-max", o.t_max, "integration horizon")->check(CLI::PositiveNumber);
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* validate = app.add_subcommand("validate", "check parameter admissibility");
  add_params(validate);

  auto* classify = app.add_subcommand("classify", "region of a switching-plane point");
  add_params(classify);
  classify->add_option("--point", o.point, "x,z")->required();

  auto* simulate = app.add_subcommand("simulate", "Filippov trajectory as CSV");
  add_params(simulate);
  simulate->add_option("--point", o.point, "x,z on the switching plane or x,y,z")->required();
  simulate->add_option("--events", o.events_path, "event log JSON");
  add_out(simulate);
  add_tol(simulate);

  auto* mu = app.add_subcommand("mu-curve", "first return of fold-point X-orbits");
  add_params(mu);
  mu->add_option("--grid", o.grid, "x0 grid lo:hi:n")->required();
  add_out(mu);
  add_format(mu);
  add_tol(mu);
  add_threads(mu);

  auto* lemmas = app.add_subcommand("lemmas", "asymptotic checks of the fold return");
  add_params(lemmas);
  add_out(lemmas);
  add_tol(lemmas);

  auto* find = app.add_subcommand("find-connection", "bisection over beta1 for the sliding loop");
  add_params(find);
  find->add_option("--beta1-range", o.beta1_range, "lo:hi");
  add_out(find);
  add_tol(find);

  auto* verify = app.add_subcommand("verify", "connection certificate at the given parameters");
  add_params(verify);
  verify->add_option("--x0", o.x0, "fold abscissa (matched from the mu-curve if omitted)");
  add_out(verify);
  add_tol(verify);

  auto* npoint = app.add_subcommand("build-n-point", "place the focus on the mu-curve at x0");
  add_params(npoint);
  npoint->add_option("--x0", o.x0, "fold abscissa")->required();
  npoint->add_option("--r2", o.r2, "alternative prey growth rate")->required();
  add_out(npoint);
  add_tol(npoint);

  auto* rmap = app.add_subcommand("return-map", "first return map on the fold line");
  add_params(rmap);
  rmap->add_option("--grid", o.grid, "s grid lo:hi:n")->required();
  add_out(rmap);
  add_format(rmap);
  add_tol(rmap);

  auto* sweep = app.add_subcommand("sweep", "connection distance over a beta1 grid");
  add_params(sweep);
  sweep->add_option("--grid", o.grid, "beta1 grid lo:hi:n")->required();
  add_out(sweep);
  add_format(sweep);
  add_tol(sweep);
  add_threads(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const RawParameters raw = load_raw_parameters(o.params_path);
    const Parameters params = validate_parameters(raw);
    const IntegratorConfig cfg = make_config(o);

    if (*validate) {
      out << "valid: phi = " << format_double(params.phi()) << ", b_q = " << format_double(params.b_q());
      if (params.has_tau()) out << ", tau = " << format_double(params.tau());
      out << ", focus condition " << (focus_condition(params) ? "holds" : "fails") << '\n';
    } else if (*classify) {
      const auto p = split_numbers(o.point, ',', 2, "--point");
      out << to_string(classify_sigma_point({p[0], p[1]}, params)) << '\n';
    } else if (*simulate) {
      const auto n = std::count(o.point.begin(), o.point.end(), ',');
      const auto p = split_numbers(o.point, ',', n == 1 ? 2 : 3, "--point");
      const State s0 = p.size() == 2 ? State{p[0], p[0], p[1]} : State{p[0], p[1], p[2]};
      const Trajectory traj = integrate_filippov(s0, cfg, params);
      std::ostringstream csv;
      write_trajectory_csv(csv, traj);
      emit(o, out, csv.str());
      if (!o.events_path.empty()) write_text(o.events_path, trajectory_events_json(traj));
    } else if (*mu) {
      const Grid g = parse_grid(o.grid);
      const auto nodes = linspace(g.lo, g.hi, g.n);
      const MuCurve curve = mu_curve(nodes, params, cfg, o.threads);
      if (want_json(o, "csv")) {
        emit(o, out, mu_curve_json(curve));
      } else {
        std::ostringstream csv;
        write_mu_curve_csv(csv, curve);
        emit(o, out, csv.str());
      }
    } else if (*lemmas) {
      emit(o, out, lemma1_json(lemma1_asymptotics_report(params, cfg)));
    } else if (*find) {
      const auto r = split_numbers(o.beta1_range, ':', 2, "--beta1-range");
      emit(o, out, certificate_json(find_shilnikov(params, r[0], r[1], cfg)));
    } else if (*verify) {
      double x0 = o.x0;
      if (verify->count("--x0") == 0) x0 = distance_to_connection(params, cfg).x0;
      emit(o, out, certificate_json(verify_connection(params, x0, cfg)));
    } else if (*npoint) {
      emit(o, out, n_point_json(build_N_point(o.x0, o.r2, params, cfg), cfg));
    } else if (*rmap) {
      const Grid g = parse_grid(o.grid);
      const auto samples = return_map_sample(params, g.lo, g.hi, g.n, cfg);
      if (want_json(o, "csv")) {
        emit(o, out, return_map_json(samples));
      } else {
        std::ostringstream csv;
        write_return_map_csv(csv, samples);
        emit(o, out, csv.str());
      }
      for (std::size_t i : sign_changes(samples))
        err << "sign change of pi(s) - s on [" << format_double(samples[i].s) << ", "
            << format_double(samples[i + 1].s) << "]\n";
    } else if (*sweep) {
      const Grid g = parse_grid(o.grid);
      const auto nodes = linspace(g.lo, g.hi, g.n);
      const auto points = sweep_distance(params, nodes, cfg, o.threads);
      if (want_json(o, "csv")) {
        emit(o, out, sweep_json(points));
      } else {
        std::ostringstream csv;
        write_sweep_csv(csv, points);
        emit(o, out, csv.str());
      }
    }
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "InternalError: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace preyswitch
