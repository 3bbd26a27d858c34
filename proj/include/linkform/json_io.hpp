// JSON encodings of the library types and small file helpers for the CLI.
//
//   FieldElement  {"N": 12, "coeffs": ["p/q", ...]}
//   RootOfUnity   {"num": 1, "den": 6}
//   LaurentPoly   {"terms": {"-1": elt, "0": elt, ...}}
//   LaurentMatrix {"rows": r, "cols": c, "entries": [[poly, ...], ...]}
//   LinkingForm   {"mode": "real"|"complex", "N": n, "summands":
//                  [{"f": poly, "h": poly}, ...], "roots": [root, ...]}
//   Decomposition {"mode": ..., "parts": [{"type": "E"|"Fw", ...}, ...]}
#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "knots.hpp"

namespace linkform {

using Json = nlohmann::ordered_json;

inline Json to_json(const RootOfUnity& r) { return Json{{"num", r.num}, {"den", r.den}}; }

inline RootOfUnity root_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("den"))
    fail_input("BadRoot", "root of unity needs {num, den}");
  return RootOfUnity(j.at("num").get<long>(), j.at("den").get<long>());
}

inline Json to_json(const FieldElement& x) {
  Json coeffs = Json::array();
  for (const auto& q : x.coeffs()) coeffs.push_back(format_rational(q));
  return Json{{"N", x.ctx().N()}, {"coeffs", coeffs}};
}

inline FieldElement element_from_json(const Json& j, const FieldContext& ctx) {
  if (!j.is_object() || !j.contains("N") || !j.contains("coeffs"))
    fail_input("BadElement", "field element needs {N, coeffs}");
  if (j.at("N").get<long>() != ctx.N())
    fail_input("ConductorMismatch", "field element conductor differs from the ambient one");
  const Json& coeffs = j.at("coeffs");
  if (!coeffs.is_array() || static_cast<long>(coeffs.size()) != ctx.degree())
    fail_input("BadElement", "coefficient vector must have length phi(N)");
  std::vector<mpq_class> c;
  c.reserve(coeffs.size());
  for (const auto& s : coeffs) c.push_back(parse_rational(s.get<std::string>()));
  return FieldElement(ctx, std::move(c));
}

inline long element_conductor(const Json& j) {
  if (!j.is_object() || !j.contains("N")) fail_input("BadElement", "field element needs N");
  return j.at("N").get<long>();
}

inline Json to_json(const LaurentPoly& p) {
  Json terms = Json::object();
  for (const auto& [e, c] : p.terms()) terms[std::to_string(e)] = to_json(c);
  return Json{{"terms", terms}};
}

inline LaurentPoly poly_from_json(const Json& j, const FieldContext& ctx) {
  if (!j.is_object() || !j.contains("terms")) fail_input("BadPolynomial", "polynomial needs {terms}");
  LaurentPoly p(ctx);
  for (const auto& [key, val] : j.at("terms").items()) {
    long e = 0;
    try {
      e = std::stol(key);
    } catch (const std::exception&) {
      fail_input("BadPolynomial", "exponent key '" + key + "' is not an integer");
    }
    p.set(e, element_from_json(val, ctx));
  }
  return p;
}

// scan any polynomial JSON for the conductor it was written with
inline std::optional<long> poly_conductor(const Json& j) {
  if (!j.is_object() || !j.contains("terms")) return std::nullopt;
  for (const auto& [key, val] : j.at("terms").items()) {
    (void)key;
    return element_conductor(val);
  }
  return std::nullopt;
}

inline Json to_json(const LaurentMatrix& m) {
  Json rows = Json::array();
  for (long i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"N", m.ctx().N()}, {"entries", rows}};
}

inline LaurentMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    fail_input("BadMatrix", "matrix needs {rows, cols, entries}");
  long rows = j.at("rows").get<long>(), cols = j.at("cols").get<long>();
  std::optional<long> n;
  if (j.contains("N")) n = j.at("N").get<long>();
  const Json& entries = j.at("entries");
  if (!entries.is_array() || static_cast<long>(entries.size()) != rows)
    fail_input("BadMatrix", "entry grid does not match rows");
  if (!n)
    for (const auto& row : entries)
      for (const auto& cell : row)
        if (auto c = poly_conductor(cell)) {
          n = c;
          break;
        }
  if (!n) fail_input("BadMatrix", "cannot determine the conductor; add a top-level N");
  FieldContext ctx = FieldContext::make(*n);
  LaurentMatrix m(ctx, rows, cols);
  for (long i = 0; i < rows; ++i) {
    const Json& row = entries.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<long>(row.size()) != cols)
      fail_input("BadMatrix", "entry grid does not match cols");
    for (long c = 0; c < cols; ++c) m.at(i, c) = poly_from_json(row.at(static_cast<std::size_t>(c)), ctx);
  }
  return m;
}

inline Json to_json(const LinkingForm& f) {
  Json summands = Json::array();
  for (const auto& s : f.summands)
    summands.push_back(Json{{"f", to_json(s.f)}, {"h", to_json(s.h)}});
  Json roots = Json::array();
  for (const auto& r : f.roots.circle) roots.push_back(to_json(r));
  Json off = Json::array();
  for (const auto& x : f.roots.off) off.push_back(to_json(x));
  Json j{{"mode", f.mode == Mode::Real ? "real" : "complex"},
         {"N", f.ctx.N()},
         {"summands", summands}};
  if (!roots.empty()) j["roots"] = roots;
  if (!off.empty()) j["off_roots"] = off;
  return j;
}

inline LinkingForm form_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("mode") || !j.contains("summands"))
    fail_input("BadForm", "form needs {mode, summands}");
  std::string mode = j.at("mode").get<std::string>();
  if (mode != "real" && mode != "complex") fail_input("BadForm", "mode must be real or complex");
  std::optional<long> n;
  if (j.contains("N")) n = j.at("N").get<long>();
  if (!n)
    for (const auto& s : j.at("summands")) {
      if (auto c = poly_conductor(s.at("f"))) {
        n = c;
        break;
      }
    }
  if (!n) fail_input("BadForm", "cannot determine the conductor; add a top-level N");
  LinkingForm f;
  f.mode = (mode == "real") ? Mode::Real : Mode::Complex;
  f.ctx = FieldContext::make(*n);
  for (const auto& s : j.at("summands")) {
    if (!s.contains("f") || !s.contains("h")) fail_input("BadForm", "summand needs {f, h}");
    f.summands.push_back(
        CyclicPairing{poly_from_json(s.at("f"), f.ctx), poly_from_json(s.at("h"), f.ctx), f.mode});
  }
  if (j.contains("roots"))
    for (const auto& r : j.at("roots")) f.roots.add_circle(root_from_json(r));
  if (j.contains("off_roots"))
    for (const auto& x : j.at("off_roots")) f.roots.add_off(element_from_json(x, f.ctx));
  return f;
}

inline Json to_json(const BasicForm& b) {
  if (b.kind == BasicForm::Kind::E)
    return Json{{"type", "E"}, {"n", b.n}, {"k", b.k}, {"eps", b.eps}, {"xi", to_json(b.xi)}};
  return Json{{"type", "Fw"}, {"a", b.a}, {"b", b.b}, {"k", b.k}, {"xi", to_json(b.xi_off)}};
}

inline Json to_json(const Decomposition& d) {
  Json parts = Json::array();
  for (const auto& p : d.parts) parts.push_back(to_json(p));
  return Json{{"mode", d.mode == Mode::Real ? "real" : "complex"}, {"parts", parts}};
}

inline Decomposition decomposition_from_json(const Json& j, const FieldContext& ctx) {
  if (!j.is_object() || !j.contains("mode") || !j.contains("parts"))
    fail_input("BadDecomposition", "decomposition needs {mode, parts}");
  Decomposition d;
  d.mode = j.at("mode").get<std::string>() == "real" ? Mode::Real : Mode::Complex;
  for (const auto& p : j.at("parts")) {
    std::string type = p.at("type").get<std::string>();
    if (type == "E") {
      d.add(BasicForm::E(p.at("n").get<long>(), p.at("k").get<long>(), p.at("eps").get<int>(),
                         root_from_json(p.at("xi"))));
    } else if (type == "Fw") {
      d.add(BasicForm::Fw(p.at("a").get<long>(), p.at("b").get<long>(), p.at("k").get<long>(),
                          element_from_json(p.at("xi"), ctx)));
    } else {
      fail_input("BadDecomposition", "part type must be E or Fw");
    }
  }
  return d;
}

// reference form realizing a decomposition (round-trip support)
inline LinkingForm reference_form(const Decomposition& d, const FieldContext& ctx) {
  LinkingForm f;
  f.mode = d.mode;
  f.ctx = ctx;
  for (const auto& p : d.parts) {
    f.summands.push_back(make_basic(ctx, d.mode, p));
    if (p.kind == BasicForm::Kind::E)
      f.roots.add_circle(p.xi);
    else
      f.roots.add_off(p.xi_off);
  }
  return f;
}

inline Json to_json(const JumpTable& t) {
  Json jumps = Json::array();
  for (const auto& [xi, v] : t.support()) jumps.push_back(Json{{"root", to_json(xi)}, {"value", v}});
  return Json{{"jumps", jumps}};
}

inline Json to_json(const SweepReport& r) {
  Json classes = Json::array();
  for (const auto& c : r.classes) {
    Json supp = Json::array();
    for (const auto& [xi, v] : c.jump_support)
      supp.push_back(Json{{"root", to_json(xi)}, {"value", v}});
    classes.push_back(Json{{"theta", c.thetas}, {"metabolic", c.metabolic}, {"jumps", supp}});
  }
  return Json{{"ell", r.ell},
              {"nontrivial_classes", r.nontrivial_classes},
              {"nontrivial_metabolic", r.nontrivial_metabolic},
              {"trivial_class_metabolic", r.trivial_metabolic},
              {"classes", classes},
              {"note", r.note}};
}

// ---------------------------------------------------------------------
// File helpers.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_input("FileNotFound", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// write-then-rename so interrupted runs never leave partial files
inline void write_file_atomic(const std::string& path, const std::string& data) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail_input("FileWrite", "cannot open '" + tmp + "'");
    out << data;
    if (!out) fail_input("FileWrite", "failed writing '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    fail_input("FileWrite", "failed renaming into '" + path + "'");
}

inline std::string fnv1a_digest(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json parse_json(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) fail_input("BadJson", "input is not valid JSON");
  return j;
}

} // namespace linkform
