#include "prefetch/bench.hpp"

#include "prefetch/closed_form.hpp"
#include "prefetch/policies.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace prefetch {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
}

json model_to_json(const FsmcModel& model) {
  json rows = json::array();
  for (int i = 0; i < model.num_states(); ++i) {
    json row = json::array();
    for (int k = 0; k < model.num_states(); ++k) {
      row.push_back(model.prob(i, k));
    }
    rows.push_back(std::move(row));
  }
  json attr = json::array();
  for (int i = 0; i < model.num_states(); ++i) attr.push_back(model.attr(i));
  return json{{"transition", rows}, {"attribute", attr}};
}

FsmcModel model_from_json(const json& node, const std::string& label) {
  if (!node.is_object() || !node.contains("transition") ||
      !node.contains("attribute")) {
    throw std::invalid_argument(label +
                                ": expected {\"transition\", \"attribute\"}");
  }
  const auto& rows = node.at("transition");
  const auto& attr = node.at("attribute");
  if (!rows.is_array() || rows.empty() || !attr.is_array()) {
    throw std::invalid_argument(label + ": malformed transition or attribute");
  }
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd p(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw std::invalid_argument(label + ": transition matrix must be square");
    }
    for (int k = 0; k < n; ++k) p(i, k) = row.at(k).get<double>();
  }
  if (static_cast<int>(attr.size()) != n) {
    throw std::invalid_argument(label + ": attribute length mismatch");
  }
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = attr.at(i).get<double>();
  return FsmcModel(std::move(p), std::move(a));
}

}  // namespace

std::vector<double> parse_c_grid(const std::string& grid) {
  std::vector<std::string> parts;
  std::string token;
  std::istringstream in(grid);
  while (std::getline(in, token, ':')) parts.push_back(token);
  if (parts.size() != 4) {
    throw std::invalid_argument("c grid must be lo:hi:{log,lin}:n, got '" +
                                grid + "'");
  }
  double lo, hi;
  long n;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    n = std::stol(parts[3]);
  } catch (const std::exception&) {
    throw std::invalid_argument("c grid has non-numeric fields: '" + grid +
                                "'");
  }
  const std::string& kind = parts[2];
  if (kind != "log" && kind != "lin") {
    throw std::invalid_argument("c grid spacing must be 'log' or 'lin'");
  }
  if (!(lo >= 1.0) || hi < lo || n < 1) {
    throw std::invalid_argument("c grid requires 1 <= lo <= hi and n >= 1");
  }
  std::vector<double> cs(static_cast<std::size_t>(n));
  if (n == 1) {
    cs[0] = lo;
    return cs;
  }
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    cs[static_cast<std::size_t>(k)] =
        kind == "log" ? std::pow(10.0, std::log10(lo) +
                                           t * (std::log10(hi) - std::log10(lo)))
                      : lo + t * (hi - lo);
  }
  cs.front() = lo;
  cs.back() = hi;
  return cs;
}

ScenarioConfig scenario_from_json(const std::string& text) {
  const json root = parse_json_text(text);
  try {
    if (!root.is_object() || !root.contains("channel") ||
        !root.contains("processor")) {
      throw std::invalid_argument(
          "scenario config requires \"channel\" and \"processor\"");
    }
    ScenarioConfig config(model_from_json(root.at("channel"), "channel"),
                          model_from_json(root.at("processor"), "processor"));
    config.name = root.value("name", std::string("custom"));
    config.initial_b1 = root.value("initial_b1", 20);
    config.initial_b2 = root.value("initial_b2", 0);
    if (root.contains("c_values")) {
      config.c_values = root.at("c_values").get<std::vector<double>>();
    }
    config.episodes = root.value("episodes", 5000);
    config.base_seed = root.value("base_seed", std::uint64_t{12345});
    if (root.contains("initial_jm")) {
      const auto& jm = root.at("initial_jm");
      if (jm.is_string() && jm.get<std::string>() == "stationary") {
        config.initial_jm.reset();
      } else if (jm.is_array() && jm.size() == 2) {
        config.initial_jm = std::make_pair(jm.at(0).get<int>(),
                                           jm.at(1).get<int>());
      } else {
        throw std::invalid_argument(
            "initial_jm must be \"stationary\" or [j, m]");
      }
    }
    return config;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario config: ") + e.what());
  }
}

std::string scenario_to_json(const ScenarioConfig& config) {
  json root;
  root["name"] = config.name;
  root["channel"] = model_to_json(config.channel);
  root["processor"] = model_to_json(config.processor);
  root["initial_b1"] = config.initial_b1;
  root["initial_b2"] = config.initial_b2;
  root["c_values"] = config.c_values;
  root["episodes"] = config.episodes;
  root["base_seed"] = config.base_seed;
  if (config.initial_jm) {
    root["initial_jm"] = json::array(
        {config.initial_jm->first, config.initial_jm->second});
  } else {
    root["initial_jm"] = "stationary";
  }
  return root.dump(2);
}

SolveRequest solve_request_from_json(const std::string& text) {
  const json root = parse_json_text(text);
  try {
    SolveRequest req;
    if (root.contains("s") || root.contains("mu")) {
      if (!root.contains("s") || !root.contains("mu")) {
        throw std::invalid_argument(
            "reduced solve config requires both \"s\" and \"mu\"");
      }
      req.reduced = true;
      req.s = root.at("s").get<double>();
      req.mu = root.at("mu").get<double>();
    } else if (root.contains("channel") && root.contains("processor")) {
      req.reduced = false;
      req.channel = model_from_json(root.at("channel"), "channel");
      req.processor = model_from_json(root.at("processor"), "processor");
    } else {
      throw std::invalid_argument(
          "solve config requires either {s, mu} or {channel, processor}");
    }
    req.c = root.value("c", 1.0);
    req.B1max = root.value("B1max", 20);
    req.B2max = root.value("B2max", 20);
    return req;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("solve config: ") + e.what());
  }
}

void write_manifest(const fs::path& path, const RunManifest& manifest) {
  json root;
  root["tool"] = kToolName;
  root["version"] = kToolVersion;
  root["command"] = manifest.command;
  root["argv"] = manifest.argv;
  root["scenario_ref"] = manifest.scenario_ref;
  root["scenario"] = manifest.scenario_json.empty()
                         ? json()
                         : parse_json_text(manifest.scenario_json);
  root["policies"] = manifest.policies;
  root["c_values"] = manifest.c_values;
  root["episodes"] = manifest.episodes;
  root["base_seed"] = manifest.base_seed;
  root["out_dir"] = manifest.out_dir;
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write " + path.string());
  }
  out << root.dump(2) << '\n';
}

void write_tradeoff_csv(const fs::path& path,
                        const std::vector<TradeoffPoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write " + path.string());
  }
  out << "c,b2_ave,ci_b2,d_ave,ci_d,mean_cost,episodes\n";
  for (const auto& p : points) {
    out << fmt(p.c) << ',' << fmt(p.b2_ave) << ',' << fmt(p.ci_b2) << ','
        << fmt(p.d_ave) << ',' << fmt(p.ci_d) << ',' << fmt(p.mean_cost) << ','
        << p.episodes << '\n';
  }
}

std::vector<TradeoffPoint> read_tradeoff_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument(path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "c,b2_ave,ci_b2,d_ave,ci_d,mean_cost,episodes") {
    throw std::invalid_argument(path.string() + ": unexpected CSV header");
  }
  std::vector<TradeoffPoint> points;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw std::invalid_argument(path.string() + ": row " +
                                  std::to_string(row) + " has " +
                                  std::to_string(fields.size()) + " fields");
    }
    try {
      TradeoffPoint p;
      p.c = std::stod(fields[0]);
      p.b2_ave = std::stod(fields[1]);
      p.ci_b2 = std::stod(fields[2]);
      p.d_ave = std::stod(fields[3]);
      p.ci_d = std::stod(fields[4]);
      p.mean_cost = std::stod(fields[5]);
      p.episodes = std::stoi(fields[6]);
      points.push_back(p);
    } catch (const std::exception&) {
      throw std::invalid_argument(path.string() + ": row " +
                                  std::to_string(row) + " is not numeric");
    }
  }
  return points;
}

void write_values_csv(const fs::path& path, const ReducedSolution& sol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write " + path.string());
  }
  out << "b1,b2,j,m,value,action\n";
  for (int b1 = 0; b1 <= sol.B1max; ++b1) {
    for (int b2 = 0; b1 + b2 <= sol.level_cap(); ++b2) {
      out << b1 << ',' << b2 << ",0,0," << fmt(sol.value(b1, b2)) << ','
          << to_string(static_cast<Action>(sol.policy(b1, b2))) << '\n';
    }
  }
}

void write_values_csv(const fs::path& path, const FullSolution& sol) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write " + path.string());
  }
  out << "b1,b2,j,m,value,action\n";
  for (int b1 = 0; b1 <= sol.B1max; ++b1) {
    for (int b2 = 0; b1 + b2 <= sol.level_cap(); ++b2) {
      for (int j = 0; j < sol.channel.num_states(); ++j) {
        for (int m = 0; m < sol.processor.num_states(); ++m) {
          out << b1 << ',' << b2 << ',' << j << ',' << m << ','
              << fmt(sol.value[sol.index(b1, b2, j, m)]) << ','
              << to_string(static_cast<Action>(
                     sol.policy[sol.index(b1, b2, j, m)]))
              << '\n';
        }
      }
    }
  }
}

void write_switchover_csv(const fs::path& path, const ReducedSolution& sol,
                          const SwitchoverCurve& curve) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write " + path.string());
  }
  const LinearDecision never_line = one_step_improvement_line(
      quadratic_of_never_fetch(sol.s, sol.mu, sol.c), sol.mu);
  out << "b1,psi_star,psi_never,psi_always\n";
  for (int b1 = 0; b1 <= sol.B1max; ++b1) {
    const int psi = curve.psi(b1);
    const int branch =
        fluid_branch(b1, std::max(psi, 0), sol.s, sol.mu);
    const LinearDecision always_line = one_step_improvement_line(
        quadratic_of_always_fetch_fluid(sol.s, sol.mu, sol.c, branch), sol.mu);
    out << b1 << ',' << psi << ',' << fmt(switchover_boundary(never_line, b1))
        << ',' << fmt(switchover_boundary(always_line, b1)) << '\n';
  }
}

CompareOutcome compare_tradeoffs(const std::vector<TradeoffPoint>& baseline,
                                 const std::vector<TradeoffPoint>& candidate,
                                 double tol) {
  if (baseline.size() != candidate.size()) {
    throw std::invalid_argument("c grid mismatch: baseline has " +
                                std::to_string(baseline.size()) +
                                " rows, candidate has " +
                                std::to_string(candidate.size()));
  }
  CompareOutcome outcome;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    const auto& b = baseline[i];
    const auto& c = candidate[i];
    if (std::abs(b.c - c.c) > 1e-12) {
      throw std::invalid_argument("c grid mismatch at row " +
                                  std::to_string(i + 1) + ": " + fmt(b.c) +
                                  " vs " + fmt(c.c));
    }
    const auto check = [&](const char* column, double base, double cand) {
      const double rel = std::abs(cand - base) / std::max(std::abs(base), 1e-12);
      if (!(rel <= tol)) {
        outcome.pass = false;
        outcome.failures.push_back("c=" + fmt(b.c) + " " + column +
                                   ": baseline " + fmt(base) + ", candidate " +
                                   fmt(cand) + ", rel " + fmt4(rel) +
                                   " > tol " + fmt4(tol));
      }
    };
    check("b2_ave", b.b2_ave, c.b2_ave);
    check("d_ave", b.d_ave, c.d_ave);
  }
  return outcome;
}

void write_tradeoff_svg(
    const fs::path& path, const std::string& title,
    const std::vector<std::pair<std::string, std::vector<TradeoffPoint>>>&
        series) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& [name, points] : series) {
    for (const auto& p : points) {
      xmin = std::min(xmin, p.d_ave);
      xmax = std::max(xmax, p.d_ave);
      ymin = std::min(ymin, p.b2_ave);
      ymax = std::max(ymax, p.b2_ave);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  const auto pad = [](double& lo, double& hi) {
    if (hi - lo <= 0.0) {
      const double d = std::max(0.5, std::abs(hi) * 0.1);
      lo -= d;
      hi += d;
    } else {
      const double d = (hi - lo) * 0.06;
      lo -= d;
      hi += d;
    }
  };
  pad(xmin, xmax);
  pad(ymin, ymax);

  const double left = 90, right = 810, top = 40, bottom = 530;
  const auto X = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (right - left);
  };
  const auto Y = [&](double y) {
    return bottom - (y - ymin) / (ymax - ymin) * (bottom - top);
  };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                 "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  const auto coord = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write " + path.string());
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" "
         "height=\"600\" viewBox=\"0 0 840 600\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"840\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"450\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + i * (xmax - xmin) / 5.0;
    const double yv = ymin + i * (ymax - ymin) / 5.0;
    out << "<line x1=\"" << coord(X(xv)) << "\" y1=\"" << coord(top)
        << "\" x2=\"" << coord(X(xv)) << "\" y2=\"" << coord(bottom)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(Y(yv))
        << "\" x2=\"" << coord(right) << "\" y2=\"" << coord(Y(yv))
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << coord(X(xv)) << "\" y=\"" << coord(bottom + 20)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt4(xv)
        << "</text>\n";
    out << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(Y(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"12\">" << fmt4(yv)
        << "</text>\n";
  }
  out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(bottom)
      << "\" x2=\"" << coord(right) << "\" y2=\"" << coord(bottom)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\""
      << coord(left) << "\" y2=\"" << coord(bottom)
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"450\" y=\"575\" text-anchor=\"middle\" font-size=\"14\">"
         "average per-task delay (slots)</text>\n";
  out << "<text x=\"24\" y=\"285\" text-anchor=\"middle\" font-size=\"14\" "
         "transform=\"rotate(-90 24 285)\">average MT backlog</text>\n";

  int idx = 0;
  for (const auto& [name, points] : series) {
    const char* color = colors[idx % 7];
    if (points.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.8\" points=\"";
      for (const auto& p : points) {
        out << coord(X(p.d_ave)) << ',' << coord(Y(p.b2_ave)) << ' ';
      }
      out << "\"/>\n";
    }
    for (const auto& p : points) {
      out << "<circle cx=\"" << coord(X(p.d_ave)) << "\" cy=\""
          << coord(Y(p.b2_ave)) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * idx;
    out << "<line x1=\"" << coord(right - 150) << "\" y1=\"" << coord(ly)
        << "\" x2=\"" << coord(right - 120) << "\" y2=\"" << coord(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2.5\"/>\n";
    out << "<text x=\"" << coord(right - 112) << "\" y=\"" << coord(ly + 4)
        << "\" font-size=\"13\">" << name << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

int run_solve(const SolveArgs& args) {
  try {
    if (args.config_path.empty() == args.preset.empty()) {
      std::cerr << "solve: exactly one of --config or --preset is required\n";
      return kExitConfig;
    }
    SolveRequest req;
    std::string ref;
    if (!args.config_path.empty()) {
      req = solve_request_from_json(slurp(args.config_path));
      ref = args.config_path;
    } else {
      const ScenarioConfig sc = scenario_preset(args.preset);
      req.reduced = false;
      req.channel = sc.channel;
      req.processor = sc.processor;
      req.c = sc.c_values.front();
      req.B1max = sc.initial_b1;
      req.B2max = sc.initial_b1 + sc.initial_b2;
      ref = args.preset;
    }

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    json report;
    json request;
    request["c"] = req.c;
    request["B1max"] = req.B1max;
    request["B2max"] = req.B2max;

    if (req.reduced) {
      request["s"] = req.s;
      request["mu"] = req.mu;
      const ReducedSolution sol =
          solve_reduced(req.s, req.mu, CostParams{req.c}, req.B1max, req.B2max);
      const SwitchoverCurve curve = extract_switchover_curve(sol);
      write_values_csv(out_dir / "values.csv", sol);
      write_switchover_csv(out_dir / "switchover.csv", sol, curve);
      report["mode"] = "reduced";
      report["s"] = req.s;
      report["mu"] = req.mu;
      report["iterations"] = sol.iterations;
      report["residual"] = sol.residual;
      report["is_switchover"] = curve.is_switchover;
      report["prefix_violations"] = curve.prefix_violations;
      report["monotonicity_violations"] = curve.monotonicity_violations;
      report["psi"] = std::vector<int>(curve.psi.data(),
                                       curve.psi.data() + curve.psi.size());
    } else {
      request["channel"] = model_to_json(*req.channel);
      request["processor"] = model_to_json(*req.processor);
      if (const auto diags = validate_model(*req.channel, *req.processor);
          !diags.empty()) {
        for (const auto& d : diags) std::cerr << "config: " << d << '\n';
        return kExitConfig;
      }
      const FullSolution sol = solve_full(*req.channel, *req.processor,
                                          CostParams{req.c}, req.B1max,
                                          req.B2max);
      write_values_csv(out_dir / "values.csv", sol);
      std::ofstream sw(out_dir / "switchover.csv", std::ios::binary);
      sw << "j,m,b1,psi\n";
      report["mode"] = "full";
      report["iterations"] = sol.iterations;
      report["residual"] = sol.residual;
      json slices = json::array();
      for (int j = 0; j < sol.channel.num_states(); ++j) {
        for (int m = 0; m < sol.processor.num_states(); ++m) {
          PolicyGrid grid(sol.B1max + 1, sol.level_cap() + 1);
          grid.setZero();
          for (int b1 = 0; b1 <= sol.B1max; ++b1) {
            for (int b2 = 0; b1 + b2 <= sol.level_cap(); ++b2) {
              grid(b1, b2) = sol.policy[sol.index(b1, b2, j, m)];
            }
          }
          const SwitchoverCurve curve =
              extract_switchover_curve(grid, sol.B1max, sol.B2max);
          for (int b1 = 0; b1 <= sol.B1max; ++b1) {
            sw << j << ',' << m << ',' << b1 << ',' << curve.psi(b1) << '\n';
          }
          json slice;
          slice["j"] = j;
          slice["m"] = m;
          slice["is_switchover"] = curve.is_switchover;
          slice["prefix_violations"] = curve.prefix_violations;
          slice["monotonicity_violations"] = curve.monotonicity_violations;
          slices.push_back(std::move(slice));
        }
      }
      report["slices"] = std::move(slices);
    }
    report["c"] = req.c;
    report["B1max"] = req.B1max;
    report["B2max"] = req.B2max;
    {
      std::ofstream rep(out_dir / "report.json");
      rep << report.dump(2) << '\n';
    }
    RunManifest manifest;
    manifest.command = "solve";
    manifest.argv = args.argv;
    manifest.scenario_ref = ref;
    manifest.scenario_json = request.dump(2);
    manifest.c_values = {req.c};
    manifest.out_dir = args.out_dir;
    write_manifest(out_dir / "manifest.json", manifest);
    return kExitOk;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (residual " << e.residual
              << " after " << e.iterations << " iterations)\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int run_sweep(const SweepArgs& args) {
  try {
    if (args.config_path.empty() == args.preset.empty()) {
      std::cerr << "sweep: exactly one of --config or --preset is required\n";
      return kExitConfig;
    }
    ScenarioConfig scenario =
        !args.preset.empty() ? scenario_preset(args.preset)
                             : scenario_from_json(slurp(args.config_path));
    if (args.episodes > 0) scenario.episodes = args.episodes;
    if (args.seed >= 0) {
      scenario.base_seed = static_cast<std::uint64_t>(args.seed);
    }
    if (!args.c_grid.empty()) scenario.c_values = parse_c_grid(args.c_grid);
    std::vector<std::string> policies =
        args.policies.empty() ? policy_names() : args.policies;
    for (const auto& p : policies) {
      if (std::find(policy_names().begin(), policy_names().end(), p) ==
          policy_names().end()) {
        std::cerr << "sweep: unknown policy '" << p << "'\n";
        return kExitConfig;
      }
    }
    if (const auto diags = validate_scenario(scenario); !diags.empty()) {
      for (const auto& d : diags) std::cerr << "config: " << d << '\n';
      return kExitConfig;
    }

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    std::vector<std::pair<std::string, std::vector<TradeoffPoint>>> series;
    for (const auto& policy : policies) {
      series.emplace_back(policy, sweep_c(scenario, policy));
      write_tradeoff_csv(out_dir / (policy + ".csv"), series.back().second);
    }
    write_tradeoff_svg(out_dir / "tradeoff.svg", scenario.name, series);

    RunManifest manifest;
    manifest.command = "sweep";
    manifest.argv = args.argv;
    manifest.scenario_ref =
        !args.preset.empty() ? args.preset : args.config_path;
    manifest.scenario_json = scenario_to_json(scenario);
    manifest.policies = policies;
    manifest.c_values = scenario.c_values;
    manifest.episodes = scenario.episodes;
    manifest.base_seed = scenario.base_seed;
    manifest.out_dir = args.out_dir;
    write_manifest(out_dir / "manifest.json", manifest);
    return kExitOk;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (residual " << e.residual
              << " after " << e.iterations << " iterations)\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int run_compare(const CompareArgs& args) {
  try {
    const auto baseline = read_tradeoff_csv(args.baseline);
    const auto candidate = read_tradeoff_csv(args.candidate);
    const CompareOutcome outcome =
        compare_tradeoffs(baseline, candidate, args.tol);
    if (outcome.pass) {
      std::cout << "compare: PASS (" << baseline.size() << " rows, tol "
                << fmt4(args.tol) << ")\n";
      return kExitOk;
    }
    for (const auto& f : outcome.failures) std::cout << f << '\n';
    std::cout << "compare: FAIL (" << outcome.failures.size()
              << " deviations)\n";
    return kExitCompare;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace prefetch
