#include "l2ext/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace l2ext {

using nlohmann::ordered_json;

namespace {

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json opt_num(const std::optional<double>& v) { return v ? num(*v) : ordered_json(nullptr); }

std::string csv_num(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string domain_name(Domain d) { return d == Domain::Disk ? "disk" : "bidisk"; }

std::string f_text(const std::vector<double>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? ";" : "") + format_double(f[i]);
  return s;
}

// Quote a CSV field when it contains a separator or quote.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json cert_object(const DeltaCertificate& c) {
  ordered_json j;
  j["delta"] = num(c.delta);
  j["C"] = num(c.C);
  j["K"] = num(c.K);
  j["witness_x"] = num(c.witness_x);
  j["bound"] = num(c.bound);
  j["ode_max_residual"] = num(c.ode_max_residual);
  j["h_conditions"] = {c.h_conditions_ok[0], c.h_conditions_ok[1], c.h_conditions_ok[2]};
  if (c.berg) {
    ordered_json b;
    b["pass"] = c.berg->pass;
    if (c.berg->witness) {
      ordered_json w = ordered_json::array();
      for (double v : *c.berg->witness) w.push_back(num(v));
      b["witness"] = w;
    } else {
      b["witness"] = nullptr;
    }
    j["berg"] = b;
  } else {
    j["berg"] = nullptr;
  }
  return j;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string certificate_json(const DeltaCertificate& cert, int indent) { return cert_object(cert).dump(indent); }

std::string class_result_json(const std::string& spec_id, const ClassDResult& res, int indent) {
  ordered_json j;
  j["spec"] = spec_id;
  j["pass"] = res.pass;
  j["violated"] = res.violated.empty() ? ordered_json(nullptr) : ordered_json(res.violated);
  j["reason"] = res.reason;
  j["witness"] = res.pass ? ordered_json(nullptr) : num(res.witness);
  j["best"] = res.best ? cert_object(*res.best) : ordered_json(nullptr);
  ordered_json all = ordered_json::array();
  for (const auto& c : res.all) all.push_back(cert_object(c));
  j["all"] = all;
  return j.dump(indent);
}

std::string certificates_csv(const std::vector<DeltaCertificate>& certs) {
  std::ostringstream os;
  os << "delta,C,K,witness_x,bound,ode_max_residual,h_a,h_b,h_c,berg_pass\n";
  for (const auto& c : certs) {
    os << format_double(c.delta) << ',' << format_double(c.C) << ',' << format_double(c.K) << ','
       << format_double(c.witness_x) << ',' << format_double(c.bound) << ',' << format_double(c.ode_max_residual);
    for (bool b : c.h_conditions_ok) os << ',' << (b ? "true" : "false");
    os << ',' << (c.berg ? (c.berg->pass ? "true" : "false") : "") << '\n';
  }
  return os.str();
}

std::string twist_csv(const std::vector<TwistSamples>& tables) {
  std::ostringstream os;
  os << "delta,x,G,h,hp,hpp\n";
  for (const auto& t : tables)
    for (std::size_t i = 0; i < t.xs.size(); ++i)
      os << format_double(t.delta) << ',' << format_double(t.xs[i]) << ',' << format_double(t.G[i]) << ','
         << format_double(t.h[i]) << ',' << format_double(t.hp[i]) << ',' << format_double(t.hpp[i]) << '\n';
  return os.str();
}

std::string twist_json(const std::vector<TwistSamples>& tables, int indent) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : tables) {
    ordered_json j;
    j["delta"] = num(t.delta);
    j["x"] = t.xs;
    j["G"] = t.G;
    j["h"] = t.h;
    j["hp"] = t.hp;
    j["hpp"] = t.hpp;
    arr.push_back(j);
  }
  return arr.dump(indent);
}

std::string extension_bounds_csv(const std::vector<ExtensionBound>& bounds) {
  std::ostringstream os;
  os << "spec,delta,K,C,generic_bound,as_printed_bound,K_bound,generic_from_K_bound,discrepancy,norm\n";
  for (const auto& b : bounds)
    os << field(b.spec_id) << ',' << format_double(b.delta) << ',' << format_double(b.K) << ','
       << format_double(b.C) << ',' << format_double(b.generic_bound) << ',' << csv_num(b.as_printed_bound) << ','
       << csv_num(b.K_bound) << ',' << csv_num(b.generic_from_K_bound) << ',' << (b.discrepancy ? "true" : "false")
       << ',' << field(b.norm_description) << '\n';
  return os.str();
}

std::string extension_bounds_json(const std::vector<ExtensionBound>& bounds, int indent) {
  ordered_json arr = ordered_json::array();
  for (const auto& b : bounds) {
    ordered_json j;
    j["spec_id"] = b.spec_id;
    j["delta"] = num(b.delta);
    j["K"] = num(b.K);
    j["C"] = num(b.C);
    j["generic_bound"] = num(b.generic_bound);
    j["as_printed_bound"] = opt_num(b.as_printed_bound);
    j["K_bound"] = opt_num(b.K_bound);
    j["generic_from_K_bound"] = opt_num(b.generic_from_K_bound);
    j["discrepancy"] = b.discrepancy;
    j["norm_description"] = b.norm_description;
    arr.push_back(j);
  }
  return arr.dump(indent);
}

std::string report_csv(const Report& report) {
  std::ostringstream os;
  os << "family,s,N,delta,K_numeric,K_bound,C,generic_bound,as_printed_bound,discrepancy\n";
  for (const auto& r : report.rows)
    os << r.family << ',' << (r.family == "FN2" ? "" : format_double(r.s)) << ','
       << (r.family == "FN4" ? std::to_string(r.N) : "") << ',' << format_double(r.delta) << ','
       << format_double(r.K_numeric) << ',' << format_double(r.K_bound) << ',' << format_double(r.C) << ','
       << format_double(r.generic_bound) << ',' << format_double(r.as_printed_bound) << ','
       << (r.discrepancy ? "true" : "false") << '\n';
  return os.str();
}

std::string report_json(const Report& report, int indent) {
  ordered_json j;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json o;
    o["family"] = r.family;
    o["s"] = r.family == "FN2" ? ordered_json(nullptr) : num(r.s);
    o["N"] = r.family == "FN4" ? ordered_json(r.N) : ordered_json(nullptr);
    o["delta"] = num(r.delta);
    o["K_numeric"] = num(r.K_numeric);
    o["K_bound"] = num(r.K_bound);
    o["C"] = num(r.C);
    o["generic_bound"] = num(r.generic_bound);
    o["generic_bound_numeric_K"] = num(r.generic_numeric);
    o["as_printed_bound"] = num(r.as_printed_bound);
    o["discrepancy"] = r.discrepancy;
    rows.push_back(o);
  }
  j["rows"] = rows;
  ordered_json dem = ordered_json::array();
  for (const auto& d : report.demailly) {
    ordered_json o;
    o["s"] = num(d.s);
    o["paper_route"] = num(d.paper_route);
    o["demailly_route"] = num(d.demailly_route);
    o["inequality_holds"] = d.inequality_holds;
    o["points"] = d.points;
    o["max_gap"] = num(d.max_gap);
    dem.push_back(o);
  }
  j["demailly"] = dem;
  return j.dump(indent);
}

std::string verdicts_csv(const std::vector<ModelVerdict>& verdicts) {
  std::ostringstream os;
  os << "domain,spec,weight,f,delta,ratio,bound,margin,degree,quad_error,flag\n";
  for (const auto& v : verdicts)
    os << domain_name(v.domain) << ',' << field(v.spec_id) << ',' << field(v.weight_id) << ','
       << field(f_text(v.f_coeffs)) << ',' << format_double(v.delta) << ',' << format_double(v.ratio) << ','
       << format_double(v.bound) << ',' << format_double(v.margin) << ',' << v.degree << ','
       << format_double(v.quad_error) << ',' << v.flag << '\n';
  return os.str();
}

std::string verdicts_json(const std::vector<ModelVerdict>& verdicts, int indent) {
  ordered_json arr = ordered_json::array();
  for (const auto& v : verdicts) {
    ordered_json o;
    o["domain"] = domain_name(v.domain);
    o["spec"] = v.spec_id;
    o["weight"] = v.weight_id;
    o["f"] = v.f_coeffs;
    o["delta"] = num(v.delta);
    o["ratio"] = num(v.ratio);
    o["bound"] = num(v.bound);
    o["margin"] = num(v.margin);
    o["degree"] = v.degree;
    o["quad_error"] = num(v.quad_error);
    o["flag"] = v.flag;
    arr.push_back(o);
  }
  return arr.dump(indent);
}

}  // namespace l2ext
