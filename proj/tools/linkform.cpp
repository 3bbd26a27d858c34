// Command-line front end: classification, signatures, Witt comparisons,
// representability checks, torus-knot Blanchfield forms and the HKL
// character sweep. All subcommands speak the JSON formats of json_io.hpp.
//
// Exit codes: 0 success, 2 invalid input, 3 mathematical precondition
// violated (including the LINKFORM_CONDUCTOR_CAP guard).

#include <iostream>

#include <CLI11.hpp>

#include "linkform/linkform.hpp"

namespace lf = linkform;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Output {
  std::string command;
  std::string digest;
  lf::Json payload;

  lf::Json report() const {
    return lf::Json{{"command", command}, {"version", kVersion}, {"input_digest", digest},
                    {"result", payload}};
  }
  void emit(const std::string& out_path) const {
    std::string text = report().dump(2) + "\n";
    if (out_path.empty())
      std::cout << text;
    else
      lf::write_file_atomic(out_path, text);
  }
};

lf::LinkingForm load_form(const std::string& path, std::string* digest) {
  std::string text = lf::read_file(path);
  if (digest) *digest = lf::fnv1a_digest(text);
  lf::Json j = lf::parse_json(text);
  // accept previously emitted reports directly
  if (j.is_object() && j.contains("result")) j = j.at("result");
  if (j.contains("parts")) {
    // a decomposition: rebuild the reference form realizing it
    std::optional<long> n;
    if (j.contains("N")) n = j.at("N").get<long>();
    if (!n) {
      long acc = 4;
      for (const auto& p : j.at("parts")) {
        if (p.at("type").get<std::string>() == "E")
          acc = lf::lcm_long(acc, lf::root_from_json(p.at("xi")).den);
        else
          acc = lf::lcm_long(acc, p.at("xi").at("N").get<long>());
      }
      n = acc;
    }
    lf::FieldContext ctx = lf::FieldContext::make(*n);
    return lf::reference_form(lf::decomposition_from_json(j, ctx), ctx);
  }
  return lf::form_from_json(j);
}

int run_classify(const std::string& input, const std::string& out) {
  Output o;
  o.command = "classify";
  lf::LinkingForm form = load_form(input, &o.digest);
  lf::Decomposition d = lf::classify(form);
  o.payload = lf::to_json(d);
  o.payload["N"] = form.ctx.N();
  o.emit(out);
  return 0;
}

int run_signature(const std::string& input, const std::string& at, long grid,
                  const std::string& csv, const std::string& out) {
  Output o;
  o.command = "signature";
  lf::LinkingForm form = load_form(input, &o.digest);
  lf::Decomposition d = lf::classify(form);
  lf::JumpTable table = lf::jumps(d);
  if (!at.empty()) {
    auto slash = at.find('/');
    if (slash == std::string::npos) lf::fail_input("BadArgument", "--at expects NUM/DEN");
    lf::RootOfUnity omega(std::stol(at.substr(0, slash)), std::stol(at.substr(slash + 1)));
    o.payload = lf::Json{{"at", lf::to_json(omega)},
                         {"sigma", lf::signature_function(table, omega)},
                         {"sigma_avg", lf::format_rational(lf::averaged_signature(table, omega))}};
  } else {
    if (grid <= 0) lf::fail_input("BadArgument", "need --at NUM/DEN or --grid N");
    std::ostringstream rows;
    rows << "num,den,sigma,sigma_avg\n";
    lf::Json jrows = lf::Json::array();
    for (long j = 0; j < grid; ++j) {
      lf::RootOfUnity omega(j, grid);
      long s = lf::signature_function(table, omega);
      mpq_class av = lf::averaged_signature(table, omega);
      rows << j << ',' << grid << ',' << s << ',' << lf::format_rational(av) << "\n";
      jrows.push_back(lf::Json{{"num", j},
                               {"den", grid},
                               {"sigma", s},
                               {"sigma_avg", lf::format_rational(av)}});
    }
    if (!csv.empty()) lf::write_file_atomic(csv, rows.str());
    o.payload = lf::Json{{"grid", grid}, {"samples", jrows}};
  }
  o.payload["jumps"] = lf::to_json(table)["jumps"];
  o.emit(out);
  return 0;
}

int run_witt(const std::string& a_path, const std::string& b_path, bool metabolic,
             const std::string& out) {
  Output o;
  o.command = "witt";
  std::string da, db;
  lf::LinkingForm a = load_form(a_path, &da);
  lf::Decomposition dda = lf::classify(a);
  o.payload = lf::Json{{"a_witt", lf::to_json(lf::witt_normal_form(dda))}};
  if (metabolic || b_path.empty())
    o.payload["a_metabolic"] = lf::is_metabolic(dda);
  if (!b_path.empty()) {
    lf::LinkingForm b = load_form(b_path, &db);
    lf::Decomposition ddb = lf::classify(b);
    o.payload["b_witt"] = lf::to_json(lf::witt_normal_form(ddb));
    o.payload["witt_equivalent"] = lf::witt_equivalent(dda, ddb);
  }
  o.digest = lf::fnv1a_digest(da + "|" + db);
  o.emit(out);
  return 0;
}

int run_represent_check(const std::string& matrix_path, long grid, const std::string& out) {
  Output o;
  o.command = "represent-check";
  std::string text = lf::read_file(matrix_path);
  o.digest = lf::fnv1a_digest(text);
  lf::LaurentMatrix m = lf::matrix_from_json(lf::parse_json(text));
  lf::LinkingForm form = lf::from_matrix(m);
  lf::Decomposition d = lf::classify(form);
  lf::Decomposition dc = form.mode == lf::Mode::Real ? lf::classify(lf::complexify(form)) : d;
  long tj = lf::total_jump(lf::jumps(dc));
  std::vector<lf::RootOfUnity> samples;
  for (long j = 0; j < grid; ++j) samples.push_back(lf::RootOfUnity(j, grid));
  lf::CrosscheckReport rep = lf::crosscheck_matrix(d, m, samples);
  lf::Json failures = lf::Json::array();
  for (const auto& s : rep.samples)
    if (!s.ok)
      failures.push_back(lf::Json{{"root", lf::to_json(s.omega)},
                                  {"sigma_form", s.sigma_form},
                                  {"sigma_matrix", s.sigma_matrix}});
  o.payload = lf::Json{{"classification", lf::to_json(d)},
                       {"total_jump", tj},
                       {"total_jump_zero", tj == 0},
                       {"crosscheck_grid", grid},
                       {"crosscheck_ok", rep.ok},
                       {"crosscheck_failures", failures}};
  o.emit(out);
  return rep.ok ? 0 : 3;
}

int run_torus_blanchfield(long k, long theta, bool abelian, const std::string& out) {
  Output o;
  o.command = "torus-blanchfield";
  o.digest = lf::fnv1a_digest("k=" + std::to_string(k) + ";theta=" + std::to_string(theta) +
                              (abelian ? ";abelian" : ""));
  if (k < 1) lf::fail_pre("BadTorusParameter", "k must be >= 1");
  lf::ChainComplexData chain = lf::build_complex(k);
  lf::LinkingForm form = abelian ? lf::blanchfield(lf::abelian_rep(k), chain)
                                 : lf::blanchfield(lf::metabelian_rep(k, theta), chain);
  o.payload = lf::to_json(form);
  o.payload["classification"] = lf::to_json(lf::classify(form));
  o.emit(out);
  return 0;
}

int run_hkl_sweep(long ell, long jobs, const std::string& report_path) {
  Output o;
  o.command = "hkl-sweep";
  o.digest = lf::fnv1a_digest("ell=" + std::to_string(ell));
  lf::SweepReport rep = lf::hkl_sweep(ell, jobs);
  o.payload = lf::to_json(rep);
  o.emit(report_path);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"linkform: linking forms over Laurent rings, their signatures, and "
               "metabelian Blanchfield pairings of torus knots"};
  app.require_subcommand(1);

  std::string input, out, csv, at, a_path, b_path, matrix_path, report_path;
  long grid = 0, k = 1, theta = 0, ell = 13, jobs = 1;
  bool abelian = false, metabolic = false;

  auto* c_classify = app.add_subcommand("classify", "classify a linking form into basic forms");
  c_classify->add_option("--input", input, "form or decomposition JSON")->required();
  c_classify->add_option("--out", out, "output JSON path (stdout if omitted)");

  auto* c_sig = app.add_subcommand("signature", "signature function and averaged signature");
  c_sig->add_option("--input", input)->required();
  c_sig->add_option("--at", at, "evaluate at exp(2 pi i NUM/DEN)");
  c_sig->add_option("--grid", grid, "sample at all roots of unity of this order");
  c_sig->add_option("--csv", csv, "write num,den,sigma,sigma_avg rows here");
  c_sig->add_option("--out", out);

  auto* c_witt = app.add_subcommand("witt", "Witt class, metabolicity, Witt equivalence");
  c_witt->add_option("--a", a_path)->required();
  c_witt->add_option("--b", b_path);
  c_witt->add_flag("--metabolic", metabolic, "report whether --a is metabolic");
  c_witt->add_option("--out", out);

  auto* c_rep = app.add_subcommand("represent-check", "classify the form presented by a "
                                                      "Hermitian matrix and cross-check the "
                                                      "signature identities");
  c_rep->add_option("--matrix", matrix_path)->required();
  c_rep->add_option("--grid", grid)->default_val(24);
  c_rep->add_option("--out", out);

  auto* c_torus = app.add_subcommand("torus-blanchfield",
                                     "metabelian or abelian Blanchfield form of T(2, 2k+1)");
  c_torus->add_option("--k", k)->required();
  c_torus->add_option("--theta", theta)->default_val(0);
  c_torus->add_flag("--abelian", abelian);
  c_torus->add_option("--out", out);

  auto* c_sweep = app.add_subcommand("hkl-sweep", "character sweep of the HKL knot");
  c_sweep->add_option("--ell", ell)->check(CLI::IsMember({3, 5, 13}))->required();
  c_sweep->add_option("--jobs", jobs)->default_val(1);
  c_sweep->add_option("--report", report_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_classify)) return run_classify(input, out);
    if (app.got_subcommand(c_sig)) return run_signature(input, at, grid, csv, out);
    if (app.got_subcommand(c_witt)) return run_witt(a_path, b_path, metabolic, out);
    if (app.got_subcommand(c_rep)) return run_represent_check(matrix_path, grid, out);
    if (app.got_subcommand(c_torus)) return run_torus_blanchfield(k, theta, abelian, out);
    if (app.got_subcommand(c_sweep)) return run_hkl_sweep(ell, jobs, report_path);
  } catch (const lf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == lf::ErrorKind::InvalidInput ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
