// flatcover: build, verify and estimate polynomial covers from the command line.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "flatcover/cover.hpp"
#include "flatcover/engine.hpp"
#include "flatcover/estimate.hpp"
#include "flatcover/harness.hpp"
#include "flatcover/polyjson.hpp"

using nlohmann::json;
using namespace flatcover;

namespace {

enum Exit { kOk = 0, kUsage = 1, kContract = 2, kMalformed = 3, kUnsupported = 4 };

struct Settings {
  EngineConfig engine;
  VerifyOptions verify;
  EstimateOptions estimate;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline JSON when the argument starts with '{', else a file path.
json load_json(const std::string& arg) {
  const std::string text = !arg.empty() && arg.front() == '{' ? arg : slurp(arg);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("malformed JSON in '" + arg.substr(0, 64) + "': " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

// "2^-8", "2^-8.5" or a plain decimal
double parse_scale(const std::string& s) {
  const auto caret = s.find('^');
  try {
    if (caret == std::string::npos) return std::stod(s);
    const double base = std::stod(s.substr(0, caret));
    return std::pow(base, std::stod(s.substr(caret + 1)));
  } catch (const std::logic_error&) {
    throw InvalidArgument("cannot parse scale '" + s + "'");
  }
}

// "2^-4..2^-8" steps the exponent by one; otherwise a comma list.
std::vector<double> parse_scales(const std::string& s) {
  std::vector<double> out;
  const auto dots = s.find("..");
  if (dots != std::string::npos) {
    const std::string a = s.substr(0, dots), b = s.substr(dots + 2);
    const auto ca = a.find('^'), cb = b.find('^');
    if (ca == std::string::npos || cb == std::string::npos) throw InvalidArgument("range needs 2^-a..2^-b tokens");
    const double base = std::stod(a.substr(0, ca));
    const int e0 = std::stoi(a.substr(ca + 1)), e1 = std::stoi(b.substr(cb + 1));
    const int step = e1 >= e0 ? 1 : -1;
    for (int e = e0;; e += step) {
      out.push_back(std::pow(base, e));
      if (e == e1) break;
    }
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(parse_scale(tok));
  if (out.empty()) throw InvalidArgument("empty scale list");
  return out;
}

void apply_config(const json& j, Settings& s) {
  auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
  };
  get("c_flat", s.engine.c_flat);
  get("c_sub", s.engine.c_sub);
  get("strict", s.engine.strict);
  get("max_dim", s.engine.max_dim);
  get("two_variable", s.engine.two_variable);
  get("piece_budget", s.engine.piece_budget);
  s.verify.c_flat = s.engine.c_flat;
  s.verify.c_sub = s.engine.c_sub;
  get("raster", s.verify.raster);
  get("mus", s.verify.mus);
  get("exact_overlap", s.verify.exact_overlap);
  get("overlap_bound", s.verify.overlap_bound);
  get("budget_constant", s.verify.budget_constant);
  get("line_budget", s.verify.line_budget);
  get("axis_cap", s.estimate.axis_cap);
  get("cell_cap", s.estimate.cell_cap);
}

Settings load_settings(const std::string& path) {
  Settings s;
  std::string p = path;
  if (p.empty())
    if (const char* env = std::getenv("FLATCOVER_CONFIG")) p = env;
  if (!p.empty()) {
    try {
      apply_config(load_json(p), s);
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("bad config: ") + e.what());
    }
  }
  return s;
}

std::optional<NearAffineWitness> load_witness(const std::string& arg) {
  if (arg.empty()) return std::nullopt;
  const json j = load_json(arg);
  try {
    const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    const auto off = j.at("offset").get<std::vector<double>>();
    const int n = static_cast<int>(off.size());
    AffineMap m{Mat(n, n), Vec(n)};
    if (static_cast<int>(rows.size()) != n) throw InvalidArgument("witness matrix must be square");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n) throw InvalidArgument("witness matrix must be square");
      for (int k = 0; k < n; ++k) m.matrix(i, k) = rows[i][k];
      m.offset[i] = off[i];
    }
    return NearAffineWitness{m};
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed witness: ") + e.what());
  }
}

void log_trace(const Cover& c, bool quiet) {
  if (quiet) return;
  for (const auto& s : c.provenance)
    std::cerr << "trace " << s.algorithm << " scale=" << format_double(s.scale) << (s.shell.empty() ? "" : " ")
              << s.shell << '\n';
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

struct CommonArgs {
  std::string phi, config, out;
  bool quiet = false;
  int threads = 1;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--phi", a.phi, "polynomial JSON file or inline object")->required();
  app->add_option("--config", a.config, "config JSON (default $FLATCOVER_CONFIG)");
  app->add_option("-o,--out", a.out, "output path (default stdout)");
  app->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--quiet", a.quiet, "suppress the trace log");
}

struct EngineArgs {
  std::string mode = "uniform", delta, domain, witness;
  double eps = 0.5;
  std::optional<double> k;
  std::optional<bool> strict;
};

void add_engine(CLI::App* app, EngineArgs& a, bool need_delta) {
  app->add_option("--mode", a.mode, "uniform|degenerate|sublevel|bd|nearaffine|pseudo");
  auto* d = app->add_option("--delta", a.delta, "scale, e.g. 2^-8");
  if (need_delta) d->required();
  app->add_option("--eps", a.eps, "stage exponent");
  app->add_option("--k", a.k, "nondegeneracy constant K");
  app->add_option("--domain", a.domain, "parallelogram JSON (sub-domain)");
  app->add_option("--witness", a.witness, "affine normal-form witness JSON");
  app->add_flag("--strict,!--no-strict", a.strict, "re-subdivide failing pieces");
}

CoverRequest make_request(const Polynomial& phi, const EngineArgs& a, double delta) {
  CoverRequest r;
  r.phi = phi;
  r.delta = delta;
  r.eps = a.eps;
  r.mode = mode_from_string(a.mode);
  r.k = a.k;
  if (!a.domain.empty()) r.domain = parallelogram_from_json(load_json(a.domain));
  r.witness = load_witness(a.witness);
  return r;
}

struct EstimateArgs {
  double p = 4.0, q = 4.0;
  int trials = 3;
  std::uint64_t seed = 1;
  std::optional<int> m, mh;
  bool disjoint = false;
  std::vector<std::string> portfolio;
};

void add_estimate(CLI::App* app, EstimateArgs& a) {
  app->add_option("--p", a.p, "Lebesgue exponent");
  app->add_option("--q", a.q, "sequence exponent");
  app->add_option("--trials", a.trials, "number of trials")->check(CLI::PositiveNumber);
  app->add_option("--seed", a.seed, "base seed");
  app->add_option("--m", a.m, "grid size along the neighbourhood axis (power of two)");
  app->add_option("--m-horizontal", a.mh, "grid size along the base axes");
  app->add_flag("--disjoint", a.disjoint, "first-owner cell assignment");
  app->add_option("--portfolio", a.portfolio, "trial kinds: gaussian, phase, ones");
}

EstimateOptions estimate_options(const EstimateArgs& a, EstimateOptions o) {
  o.p = a.p;
  o.q = a.q;
  o.trials = a.trials;
  o.seed = a.seed;
  o.m_vertical = a.m;
  o.m_horizontal = a.mh;
  o.disjoint = a.disjoint;
  if (!a.portfolio.empty()) {
    o.portfolio.clear();
    for (const auto& s : a.portfolio) o.portfolio.push_back(trial_from_string(s));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat and sublevel covers of polynomial graphs"};
  app.require_subcommand(1);

  CommonArgs cover_c;
  EngineArgs cover_e;
  std::string cover_report, cover_svg;
  std::optional<double> cover_slice;
  auto* cover = app.add_subcommand("cover", "build a cover and verify it");
  add_common(cover, cover_c);
  add_engine(cover, cover_e, true);
  cover->add_option("--report", cover_report, "verification report path");
  cover->add_option("--svg", cover_svg, "SVG path (n = 2, or n = 3 with --slice)");
  cover->add_option("--slice", cover_slice, "x3 value for SVG slices");

  CommonArgs ver_c;
  std::string ver_cover;
  auto* verify = app.add_subcommand("verify", "check a cover against its contracts");
  add_common(verify, ver_c);
  verify->add_option("--cover", ver_cover, "cover JSON")->required();

  CommonArgs est_c;
  EngineArgs est_e;
  EstimateArgs est_a;
  std::string est_cover;
  auto* estimate = app.add_subcommand("estimate", "lower-bound the decoupling constant of a cover");
  add_common(estimate, est_c);
  add_engine(estimate, est_e, false);
  add_estimate(estimate, est_a);
  estimate->add_option("--cover", est_cover, "cover JSON (otherwise built with --mode/--delta)");

  CommonArgs sw_c;
  EngineArgs sw_e;
  EstimateArgs sw_a;
  std::string sw_deltas, sw_csv;
  double sw_tol = 0.05;
  auto* sweep_cmd = app.add_subcommand("sweep", "estimate across scales and fit the log-log slope");
  add_common(sweep_cmd, sw_c);
  add_engine(sweep_cmd, sw_e, false);
  add_estimate(sweep_cmd, sw_a);
  sweep_cmd->add_option("--deltas", sw_deltas, "e.g. 2^-4..2^-8 or 2^-4,2^-6")->required();
  sweep_cmd->add_option("--csv", sw_csv, "CSV table path");
  sweep_cmd->add_option("--slope-tol", sw_tol, "allowed slope above eps");

  std::string rep_cover, rep_svg, rep_out;
  std::optional<double> rep_slice;
  auto* report = app.add_subcommand("report", "summarize a cover (counts, widths, provenance)");
  report->add_option("--cover", rep_cover, "cover JSON")->required();
  report->add_option("-o,--out", rep_out, "output path (default stdout)");
  report->add_option("--svg", rep_svg, "SVG path");
  report->add_option("--slice", rep_slice, "x3 value for SVG slices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*cover) {
      Settings s = load_settings(cover_c.config);
      if (cover_e.strict) s.engine.strict = *cover_e.strict;
      const Polynomial phi = polynomial_from_json(load_json(cover_c.phi));
      const CoverRequest req = make_request(phi, cover_e, parse_scale(cover_e.delta));
      Cover c = build_cover(req, s.engine);
      log_trace(c, cover_c.quiet);
      VerifyOptions vo = s.verify;
      if (req.domain) vo.domain = req.domain->bounding_box();
      const VerificationReport rep = verify_cover(phi, c, vo);
      c.overlap = rep.overlap;
      write_text(cover_c.out, dump(to_json(c)));
      if (!cover_report.empty()) write_text(cover_report, dump(to_json(rep)));
      if (!cover_svg.empty()) write_text(cover_svg, to_svg(c, cover_slice));
      if (!cover_c.quiet) std::cerr << "pieces " << c.pieces.size() << (rep.pass() ? " pass" : " FAIL") << '\n';
      return rep.pass() ? kOk : kContract;
    }
    if (*verify) {
      const Settings s = load_settings(ver_c.config);
      const Polynomial phi = polynomial_from_json(load_json(ver_c.phi));
      const Cover c = cover_from_json(load_json(ver_cover));
      const VerificationReport rep = verify_cover(phi, c, s.verify);
      write_text(ver_c.out, dump(to_json(rep)));
      return rep.pass() ? kOk : kContract;
    }
    if (*estimate) {
      Settings s = load_settings(est_c.config);
      if (est_e.strict) s.engine.strict = *est_e.strict;
      const Polynomial phi = polynomial_from_json(load_json(est_c.phi));
      Cover c;
      if (!est_cover.empty()) {
        c = cover_from_json(load_json(est_cover));
      } else {
        if (est_e.delta.empty()) throw CLI::ValidationError("estimate needs --cover or --delta");
        c = build_cover(make_request(phi, est_e, parse_scale(est_e.delta)), s.engine);
        log_trace(c, est_c.quiet);
      }
      const auto est = estimate_ratio(phi, c, estimate_options(est_a, s.estimate));
      write_text(est_c.out, dump(to_json(est)));
      return kOk;
    }
    if (*sweep_cmd) {
      Settings s = load_settings(sw_c.config);
      if (sw_e.strict) s.engine.strict = *sw_e.strict;
      const Polynomial phi = polynomial_from_json(load_json(sw_c.phi));
      const auto deltas = parse_scales(sw_deltas);
      auto build = [&](double d) {
        Cover c = build_cover(make_request(phi, sw_e, d), s.engine);
        log_trace(c, sw_c.quiet);
        return c;
      };
      const SweepTable t = sweep(phi, deltas, build, estimate_options(sw_a, s.estimate), sw_e.eps, sw_tol);
      write_text(sw_c.out, dump(to_json(t)));
      if (!sw_csv.empty()) write_text(sw_csv, to_csv(t));
      return t.slope_ok ? kOk : kContract;
    }
    if (*report) {
      const Cover c = cover_from_json(load_json(rep_cover));
      std::map<std::string, int> algos;
      for (const auto& st : c.provenance) ++algos[st.algorithm];
      int max_depth = 0;
      for (const auto& p : c.pieces) max_depth = std::max(max_depth, p.depth);
      const json j = {{"nvars", c.nvars},
                      {"kind", to_string(c.kind)},
                      {"scale", c.scale},
                      {"eps", c.eps},
                      {"pieces", c.pieces.size()},
                      {"width_min", c.pieces.empty() ? 0.0 : c.min_width()},
                      {"max_depth", max_depth},
                      {"overlap_B", overlap_profile(c).b},
                      {"provenance", algos}};
      write_text(rep_out, dump(j));
      if (!rep_svg.empty()) write_text(rep_svg, to_svg(c, rep_slice));
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUnsupported;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << " enclosure [" << format_double(e.enclosure().lo) << ", "
              << format_double(e.enclosure().hi) << "]\n";
    return kMalformed;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kMalformed;
  } catch (const EngineError& e) {
    std::cerr << "engine: " << e.what() << '\n';
    return kContract;
  } catch (const DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return kMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMalformed;
  }
  return kUsage;
}
