#include "l2ext/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "l2ext/bergman.hpp"
#include "l2ext/certify.hpp"
#include "l2ext/constants.hpp"
#include "l2ext/denominator.hpp"
#include "l2ext/parallel.hpp"
#include "l2ext/serialize.hpp"
#include "l2ext/weights.hpp"

namespace l2ext {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The spec or δ cannot be certified; maps to exit code 2.
class CertFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("bad number for " + what + ": '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw UsageError("empty list for " + what);
  return out;
}

bool has_spec(const RunConfig& cfg) { return !cfg.family.empty() || !cfg.g_expr.empty(); }

DenominatorSpec build_spec(const RunConfig& cfg) {
  if (!cfg.family.empty() && !cfg.g_expr.empty()) throw UsageError("give either --family or --g, not both");
  if (!has_spec(cfg)) throw UsageError("--family or --g is required for " + cfg.subcommand);
  if (!cfg.g_expr.empty()) {
    ParamMap params;
    for (const auto& p : cfg.params) {
      const auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--param expects k=v, got '" + p + "'");
      params[p.substr(0, eq)] = parse_number(p.substr(eq + 1), "--param " + p.substr(0, eq));
    }
    return DenominatorSpec::expression(cfg.g_expr, params).with_quad_tol(cfg.quad_tol);
  }
  const std::string f = lower(cfg.family);
  if (f == "fn1") return DenominatorSpec::fn1(cfg.s).with_quad_tol(cfg.quad_tol);
  if (f == "fn2") return DenominatorSpec::fn2().with_quad_tol(cfg.quad_tol);
  if (f == "fn3") return DenominatorSpec::fn3(cfg.s).with_quad_tol(cfg.quad_tol);
  if (f == "fn4") return DenominatorSpec::fn4(cfg.s, cfg.N).with_quad_tol(cfg.quad_tol);
  throw UsageError("unknown family '" + cfg.family + "' (expected fn1, fn2, fn3 or fn4)");
}

DenominatorSpec normalized(const DenominatorSpec& spec) { return is_normalized(spec) ? spec : normalize(spec); }

Kappa build_kappa(const RunConfig& cfg, Domain domain) {
  const std::string k = lower(cfg.kappa);
  if (k == "0" || k == "zero") return Kappa::zero();
  if (k == "r2") return domain == Domain::Disk ? Kappa::quadratic(0.0, 1.0, 0.0) : Kappa::quadratic(1.0, 1.0, 0.0);
  const std::vector<double> v = parse_list(k, "--kappa");
  if (v.size() != 3) throw UsageError("--kappa expects \"0\", \"r2\" or \"a,b,c\"");
  return Kappa::quadratic(v[0], v[1], v[2]);
}

RModel build_R(const RunConfig& cfg) {
  const std::string& r = cfg.R;
  if (lower(r) == "zero" || r == "0") return RModel::zero();
  if (r.rfind("const:", 0) == 0) return RModel::constant(parse_number(r.substr(6), "--R const"));
  if (r.rfind("radial:", 0) == 0) return RModel::radial(read_radial_csv(r.substr(7)));
  throw UsageError("--R expects zero, const:<v> or radial:<file>");
}

WeightModel build_weight(const RunConfig& cfg, Domain domain) {
  WeightModel w;
  w.domain = domain;
  w.kappa = build_kappa(cfg, domain);
  w.R = build_R(cfg);
  w.ohsawa_mode = cfg.ohsawa;
  return w;
}

bool hypotheses_ok(const RunConfig& cfg, const DenominatorSpec& spec, const WeightModel& weight, std::string& why) {
  const Admissibility adm = check_weight(weight);
  if (!adm.ok) {
    why = adm.reason;
    return false;
  }
  if (weight.R.kind() != RModel::Kind::Zero) {
    const BergCheck b = check_berg(spec, weight, cfg.gammas, cfg.eps, cfg.grid);
    if (!b.pass) {
      why = b.reason;
      return false;
    }
  }
  if (weight.ohsawa_mode) {
    const BergCheck o = check_ohsawa(weight, cfg.grid);
    if (!o.pass) {
      why = o.reason;
      return false;
    }
  }
  return true;
}

// The explicit δ, or the default grid followed by the generic optimum.
std::vector<double> delta_list(const RunConfig& cfg, const DenominatorSpec& spec) {
  if (cfg.delta) return {*cfg.delta};
  std::vector<double> ds = default_delta_grid();
  ds.push_back(optimal_delta(spec, Objective::Generic).delta);
  return ds;
}

bool json(const RunConfig& cfg) { return cfg.format == "json"; }

int verdict_exit(const std::vector<ModelVerdict>& vs) {
  int code = kExitPass;
  for (const auto& v : vs) {
    if (v.flag == "CRITICAL") return kExitCritical;
    if (v.flag != "pass") code = kExitCertFailure;
  }
  return code;
}

struct Outcome {
  int code = kExitPass;
  std::string report;
  std::string summary;
};

Outcome cmd_check_class(const RunConfig& cfg) {
  const DenominatorSpec spec = build_spec(cfg);
  std::vector<double> grid = cfg.delta ? std::vector<double>{*cfg.delta} : default_delta_grid();
  ClassDResult res = check_class_d(spec, grid);
  Outcome o;
  if (res.pass && !cfg.delta) {
    const DeltaOptimum opt = optimal_delta(spec, Objective::Generic);
    if (opt.value < res.best->bound) {
      res.all.push_back(certify_delta(spec, opt.delta));
      res.best = res.all.back();
    }
  }
  if (res.pass) {
    const WeightModel weight = build_weight(cfg, Domain::Disk);
    res.best->berg = check_berg(spec, weight, cfg.gammas, cfg.eps, cfg.grid);
    const DeltaCertificate& b = *res.best;
    const bool h_ok = b.h_conditions_ok[0] && b.h_conditions_ok[1] && b.h_conditions_ok[2];
    if (!b.berg->pass) {
      o.code = kExitCertFailure;
      o.summary = "FAIL " + b.berg->reason;
    } else if (!h_ok) {
      o.code = kExitCertFailure;
      o.summary = "FAIL h-conditions at delta = " + format_double(b.delta);
    } else if (b.ode_max_residual > cfg.cert_tol) {
      o.code = kExitCertFailure;
      o.summary = "FAIL ODE residual " + format_double(b.ode_max_residual) + " exceeds " + format_double(cfg.cert_tol);
    } else {
      o.summary = "PASS best delta = " + format_double(b.delta) + ", bound = " + format_double(b.bound);
    }
  } else {
    o.code = kExitCertFailure;
    o.summary = "FAIL " + res.violated + ": " + res.reason;
  }
  o.report = json(cfg) ? class_result_json(spec.id(), res) + "\n" : certificates_csv(res.all);
  return o;
}

Outcome cmd_twist_table(const RunConfig& cfg) {
  const DenominatorSpec spec = build_spec(cfg);
  const std::vector<double> xs = default_twist_grid(cfg.points, cfg.xmax);
  std::vector<TwistSamples> tables;
  Outcome o;
  for (double d : delta_list(cfg, spec)) {
    tables.push_back(h_delta_samples(spec, d, xs));
    if (!check_h_conditions(tables.back()).all()) {
      o.code = kExitCertFailure;
      o.summary = "FAIL h-conditions at delta = " + format_double(d);
    }
  }
  if (o.code == kExitPass) o.summary = "PASS " + std::to_string(tables.size()) + " table(s)";
  o.report = json(cfg) ? twist_json(tables) + "\n" : twist_csv(tables);
  return o;
}

Outcome cmd_constant(const RunConfig& cfg) {
  const DenominatorSpec spec = build_spec(cfg);
  std::vector<ExtensionBound> bounds;
  for (double d : delta_list(cfg, spec)) bounds.push_back(extension_bound(spec, d));
  Outcome o;
  const auto best = std::min_element(bounds.begin(), bounds.end(),
                                     [](const auto& a, const auto& b) { return a.generic_bound < b.generic_bound; });
  if (!std::isfinite(best->generic_bound)) {
    o.code = kExitCertFailure;
    o.summary = "FAIL K_delta is infinite for every delta";
  } else {
    o.summary = "PASS min generic bound " + format_double(best->generic_bound) + " at delta = " +
                format_double(best->delta);
  }
  o.report = json(cfg) ? extension_bounds_json(bounds) + "\n" : extension_bounds_csv(bounds);
  return o;
}

Outcome cmd_optimize_delta(const RunConfig& cfg) {
  const DenominatorSpec spec = build_spec(cfg);
  const std::string obj = lower(cfg.objective);
  Objective objective;
  if (obj == "generic") {
    objective = Objective::Generic;
  } else if (obj == "as-printed" || obj == "as_printed") {
    objective = Objective::AsPrinted;
  } else {
    throw UsageError("--objective expects generic or as-printed");
  }
  const DeltaOptimum opt = optimal_delta(spec, objective);
  Outcome o;
  o.summary = "PASS delta* = " + format_double(opt.delta) + ", value = " + format_double(opt.value);
  if (json(cfg)) {
    o.report = "{\n  \"spec\": \"" + spec.id() + "\",\n  \"objective\": \"" + obj + "\",\n  \"delta\": " +
               format_double(opt.delta) + ",\n  \"value\": " + format_double(opt.value) + "\n}\n";
  } else {
    o.report = "spec,objective,delta,value\n" + spec.id() + "," + obj + "," + format_double(opt.delta) + "," +
               format_double(opt.value) + "\n";
  }
  return o;
}

Outcome cmd_reproduce(const RunConfig& cfg) {
  const Report rep = reproduce_report();
  Outcome o;
  std::size_t flagged = 0;
  for (const auto& r : rep.rows) flagged += r.discrepancy ? 1 : 0;
  o.summary = "PASS " + std::to_string(rep.rows.size()) + " rows, " + std::to_string(flagged) + " flagged";
  o.report = json(cfg) ? report_json(rep) + "\n" : report_csv(rep);
  return o;
}

DeltaCertificate certificate_for(const RunConfig& cfg, const DenominatorSpec& spec) {
  DeltaCertificate cert;
  try {
    cert = verdict_certificate(spec, cfg.delta);
  } catch (const DomainError& e) {
    throw CertFailure(e.what());
  }
  if (!cert.K_finite) throw CertFailure("K_delta is infinite at delta = " + format_double(cert.delta));
  return cert;
}

// Exit 2 also when the ratio holds but the weight hypotheses do not: nothing was certified.
Outcome verdict_outcome(const RunConfig& cfg, const std::vector<ModelVerdict>& vs, bool hyp, const std::string& why) {
  Outcome o;
  o.code = verdict_exit(vs);
  if (o.code == kExitPass && !hyp) o.code = kExitCertFailure;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& v : vs) min_margin = std::min(min_margin, v.margin);
  if (o.code == kExitCritical) {
    o.summary = "CRITICAL ratio exceeds the bound for a weight that passed the hypotheses";
  } else if (o.code == kExitCertFailure) {
    o.summary = "FAIL weight hypotheses: " + (why.empty() ? std::string("not satisfied") : why);
  } else {
    o.summary = "PASS " + std::to_string(vs.size()) + " verdict(s), min margin " + format_double(min_margin);
  }
  o.report = json(cfg) ? verdicts_json(vs) + "\n" : verdicts_csv(vs);
  return o;
}

Outcome cmd_verify_disk(const RunConfig& cfg) {
  const DenominatorSpec spec = normalized(build_spec(cfg));
  const WeightModel weight = build_weight(cfg, Domain::Disk);
  std::string why;
  const bool hyp = hypotheses_ok(cfg, spec, weight, why);
  const DeltaCertificate cert = certificate_for(cfg, spec);
  return verdict_outcome(cfg, {disk_min_extension(spec, weight, cert, hyp)}, hyp, why);
}

Outcome cmd_verify_bidisk(const RunConfig& cfg) {
  const DenominatorSpec spec = normalized(build_spec(cfg));
  const WeightModel weight = build_weight(cfg, Domain::Bidisk);
  std::string why;
  const bool hyp = hypotheses_ok(cfg, spec, weight, why);
  const DeltaCertificate cert = certificate_for(cfg, spec);
  const Gram gram = bidisk_gram(spec, weight, cfg.degree);
  const std::vector<std::vector<double>> fs = cfg.f_list.empty() ? std::vector<std::vector<double>>{{1.0}} : cfg.f_list;
  std::vector<ModelVerdict> vs;
  for (const auto& f : fs) vs.push_back(bidisk_min_extension(spec, weight, gram, f, cfg.degree, cert, hyp));
  return verdict_outcome(cfg, vs, hyp, why);
}

Outcome cmd_sweep(const RunConfig& cfg) {
  const std::vector<DenominatorSpec> specs =
      has_spec(cfg) ? std::vector<DenominatorSpec>{normalized(build_spec(cfg))} : default_sweep_specs();
  std::vector<int> degrees;
  for (int d = 1; d <= cfg.degree; ++d) degrees.push_back(d);
  const auto fs = cfg.f_list.empty() ? default_sweep_f() : cfg.f_list;
  return verdict_outcome(cfg, sweep_verify(specs, default_sweep_weights(), fs, degrees, cfg.delta), true, "");
}

Outcome dispatch(const RunConfig& cfg) {
  if (cfg.subcommand == "check-class") return cmd_check_class(cfg);
  if (cfg.subcommand == "twist-table") return cmd_twist_table(cfg);
  if (cfg.subcommand == "constant") return cmd_constant(cfg);
  if (cfg.subcommand == "optimize-delta") return cmd_optimize_delta(cfg);
  if (cfg.subcommand == "reproduce") return cmd_reproduce(cfg);
  if (cfg.subcommand == "verify-disk") return cmd_verify_disk(cfg);
  if (cfg.subcommand == "verify-bidisk") return cmd_verify_bidisk(cfg);
  if (cfg.subcommand == "sweep") return cmd_sweep(cfg);
  throw UsageError("unknown subcommand '" + cfg.subcommand + "'");
}

void add_options(CLI::App* app, RunConfig& cfg, std::string& delta_text, std::vector<std::string>& f_text) {
  app->add_option("--family", cfg.family, "Built-in denominator: fn1, fn2, fn3 or fn4");
  app->add_option("--g", cfg.g_expr, "Denominator expression in x");
  app->add_option("--param", cfg.params, "Expression parameter k=v (repeatable)");
  app->add_option("--s", cfg.s, "Family parameter s")->capture_default_str();
  app->add_option("--N", cfg.N, "FN4 depth")->capture_default_str();
  app->add_option("--delta", delta_text, "delta value or auto")->capture_default_str();
  app->add_option("--kappa", cfg.kappa, "kappa: 0, r2 or a,b,c")->capture_default_str();
  app->add_option("--R", cfg.R, "R: zero, const:<v> or radial:<file>")->capture_default_str();
  app->add_flag("--ohsawa", cfg.ohsawa, "Also require R + log|w|^2 <= 0 and subharmonic R");
  app->add_option("--gamma", cfg.gammas, "gamma grid")->delimiter(',')->capture_default_str();
  app->add_option("--eps", cfg.eps, "epsilon grid")->delimiter(',')->capture_default_str();
  app->add_option("--grid", cfg.grid, "Polar grid size")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--degree", cfg.degree, "Polynomial degree D")->check(CLI::Range(0, 12))->capture_default_str();
  app->add_option("--f", f_text, "Coefficients of f, e.g. 3,0,2 (repeatable)");
  app->add_option("--objective", cfg.objective, "generic or as-printed")->capture_default_str();
  app->add_option("--points", cfg.points, "Twist table points")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--xmax", cfg.xmax, "Twist table upper end")->check(CLI::Range(1.0, 1e12))->capture_default_str();
  app->add_option("--tol", cfg.quad_tol, "Quadrature tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--cert-tol", cfg.cert_tol, "Certificate tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app->add_option("--out", cfg.out, "Output path (default stdout)");
  app->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out,
                              std::ostream& err) {
  CLI::App app{"Numerical companion for an L2 extension theorem with denominators", "l2ext"};
  app.require_subcommand(1);
  std::string delta_text = "auto";
  std::vector<std::string> f_text;
  const std::pair<const char*, const char*> subs[] = {
      {"check-class", "Certify class membership of a denominator"},
      {"twist-table", "Tabulate G, h, h', h'' of the twist"},
      {"constant", "Extension constants per delta"},
      {"optimize-delta", "Minimize the extension constant over delta"},
      {"reproduce", "Constants table for the four families"},
      {"verify-disk", "Minimal-extension ratio on the unit disk"},
      {"verify-bidisk", "Minimal-extension ratio on the bidisk"},
      {"sweep", "Theorem soundness sweep"},
  };
  for (const auto& [name, desc] : subs) add_options(app.add_subcommand(name, desc), cfg, delta_text, f_text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitError;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  try {
    if (lower(delta_text) == "auto") {
      cfg.delta.reset();
    } else {
      cfg.delta = parse_number(delta_text, "--delta");
      if (!(*cfg.delta > 0.0)) throw UsageError("--delta must be positive");
    }
    cfg.f_list.clear();
    for (const auto& f : f_text) cfg.f_list.push_back(parse_list(f, "--f"));
  } catch (const UsageError& e) {
    err << "l2ext: " << e.what() << "\n";
    return kExitError;
  }
  return std::nullopt;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  set_default_jobs(cfg.jobs);
  Outcome o;
  try {
    o = dispatch(cfg);
  } catch (const UsageError& e) {
    err << "l2ext " << cfg.subcommand << ": usage: " << e.what() << "\n";
    return kExitError;
  } catch (const DivergenceError& e) {
    err << "l2ext " << cfg.subcommand << ": FAIL " << e.what() << "\n";
    return kExitCertFailure;
  } catch (const CertFailure& e) {
    err << "l2ext " << cfg.subcommand << ": FAIL " << e.what() << "\n";
    return kExitCertFailure;
  } catch (const HypothesisError& e) {
    err << "l2ext " << cfg.subcommand << ": FAIL " << e.what() << "\n";
    return kExitCertFailure;
  } catch (const std::exception& e) {
    err << "l2ext " << cfg.subcommand << ": error: " << e.what() << "\n";
    return kExitError;
  }

  if (cfg.out.empty()) {
    out << o.report;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!(f << o.report)) {
      err << "l2ext " << cfg.subcommand << ": error: cannot write " << cfg.out << "\n";
      return kExitError;
    }
  }
  err << "l2ext " << cfg.subcommand << ": " << o.summary << "\n";
  return o.code;
}

}  // namespace l2ext
