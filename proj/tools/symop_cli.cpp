// symop: command-line front end for the certification library.
//
// Exit codes: 0 the property holds (verdict reached), 1 it is rejected,
// 2 invalid input.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <symop/io.hpp>
#include <symop/report.hpp>
#include <symop/selftest.hpp>
#include <symop/symop.hpp>

namespace {

using namespace symop;
using json = io::json;

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kInputError = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol_structural;
  std::optional<double> tol_oracle;
  std::string out;
  std::string format = "text";
  int criterion = 0;
};

/// Parsed configuration with flag overrides applied.
class Context {
 public:
  explicit Context(const Options& o) : opt_(o) {
    if (!o.config.empty()) {
      cfg_ = io::load_json_file(o.config);
      if (!cfg_.is_object()) throw io::ConfigError("--config", "top level must be an object");
      base_dir_ = std::filesystem::path(o.config).parent_path().string();
    }
    if (cfg_.contains("seed")) {
      if (!cfg_["seed"].is_number_unsigned()) throw io::ConfigError("seed", "expected a nonnegative integer");
      sampling_.seed = cfg_["seed"].get<std::uint64_t>();
    }
    if (cfg_.contains("samples")) {
      if (!cfg_["samples"].is_number_integer() || cfg_["samples"].get<int>() < 1)
        throw io::ConfigError("samples", "expected a positive integer");
      sampling_.samples = cfg_["samples"].get<int>();
    }
    if (cfg_.contains("tolerances")) tol_ = io::parse_tolerances(cfg_["tolerances"]);
    if (o.seed) sampling_.seed = *o.seed;
    if (o.samples) {
      if (*o.samples < 1) throw io::ConfigError("--samples", "must be positive");
      sampling_.samples = *o.samples;
    }
    if (o.tol_structural) tol_.structural = *o.tol_structural;
    if (o.tol_oracle) tol_.oracle = *o.tol_oracle;
  }

  const json& field(const std::string& key) const {
    if (opt_.config.empty()) throw io::ConfigError("--config", "this command needs a configuration file");
    if (!cfg_.contains(key)) throw io::ConfigError(key, "missing field");
    return cfg_[key];
  }

  AlgebraPtr algebra() {
    if (!alg_) alg_ = io::parse_algebra(field("algebra"));
    return alg_;
  }
  SymmetricNorm norm(const std::string& key = "norm") {
    auto n = io::parse_norm(field(key), key);
    try {
      n.check_algebra(*algebra());
    } catch (const DomainError& e) {
      throw io::ConfigError(key, e.what());
    }
    return n;
  }
  bool has(const std::string& key) const { return cfg_.contains(key); }
  Element element(const std::string& key = "element") { return io::parse_element(algebra(), field(key), key); }
  SuperOperator op() { return io::parse_operator(algebra(), field("operator"), "operator", base_dir_); }

  const SamplingOptions& sampling() const { return sampling_; }
  const Tolerances& tol() const { return tol_; }

  void header(Report& rep, const std::string& command) const {
    rep.record("run")
        .set("command", command)
        .set("seed", sampling_.seed)
        .set("samples", sampling_.samples)
        .set("tolerances", io::tolerances_to_json(tol_));
  }

 private:
  Options opt_;
  json cfg_ = json::object();
  std::string base_dir_;
  AlgebraPtr alg_;
  SamplingOptions sampling_;
  Tolerances tol_;
};

json matrix_to_json(const Mat& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      arr.push_back(m(r, c).real());
      arr.push_back(m(r, c).imag());
    }
  return arr;
}

json steps_to_json(const StepFunction& f) {
  json arr = json::array();
  for (const auto& s : f.steps()) arr.push_back(json::array({s.value, s.length}));
  return arr;
}

int cmd_mu(Context& ctx, Report& rep) {
  const auto f = mu(ctx.element());
  rep.record("mu").set("steps", steps_to_json(f)).set("support", f.support()).set("sup", f.sup()).set("integral", f.integral());
  return kOk;
}

int cmd_norm(Context& ctx, Report& rep, bool dual) {
  const auto n = ctx.norm();
  const Element x = ctx.element();
  rep.record(dual ? "dual_norm" : "norm").set("norm", n.describe()).set("value", dual ? dual_norm(x, n) : norm(x, n));
  return kOk;
}

void write_certificate(Report& rep, const HermitianCertificate& c) {
  rep.record("certificate")
      .set("verdict", to_string(c.verdict))
      .set("exp_defect", c.exp_defect)
      .set("max_imag_numrange", c.max_imag_numrange)
      .set("fit_residual", c.fit_residual)
      .set("l2_exception", c.l2_exception)
      .set("norm", c.norm_id)
      .set("samples", c.samples)
      .set("seed", c.seed);
  if (c.decomposition)
    rep.record("decomposition")
        .set("a", io::element_to_json(c.decomposition->a))
        .set("b", io::element_to_json(c.decomposition->b))
        .set("residual", c.decomposition->residual);
}

int cmd_certify(Context& ctx, Report& rep) {
  const auto c = certify(ctx.op(), ctx.norm(), {ctx.sampling(), ctx.tol()});
  write_certificate(rep, c);
  return c.verdict == Verdict::Hermitian ? kOk : kRejected;
}

int cmd_decompose(Context& ctx, Report& rep) {
  const auto d = decompose_hermitian(ctx.op());
  const bool ok = d.residual < ctx.tol().fit;
  rep.record("decomposition")
      .set("a", io::element_to_json(d.a))
      .set("b", io::element_to_json(d.b))
      .set("residual", d.residual)
      .set("accepted", ok);
  return ok ? kOk : kRejected;
}

int cmd_isometry_check(Context& ctx, Report& rep) {
  const auto src = ctx.norm();
  const auto tgt = ctx.has("target_norm") ? ctx.norm("target_norm") : src;
  try {
    const auto r = is_isometry(ctx.op(), src, tgt, ctx.sampling(), ctx.tol().check);
    rep.record("isometry")
        .set("isometry", r.isometry)
        .set("defect", r.defect)
        .set("condition", r.condition)
        .set("source_norm", src.describe())
        .set("target_norm", tgt.describe());
    return r.isometry ? kOk : kRejected;
  } catch (const NotSurjective& e) {
    rep.record("rejected").set("reason", "NotSurjective").set("message", e.what());
    return kRejected;
  }
}

int cmd_isometry_factor(Context& ctx, Report& rep) {
  const auto t = ctx.op();
  try {
    const auto f = factor_isometry(t, ctx.tol().fit);
    json perm = json::array(), flags = json::array(), vs = json::array();
    for (std::size_t i = 0; i < f.j.perm.size(); ++i) {
      perm.push_back(f.j.perm[i]);
      flags.push_back(f.j.transpose[i] ? "transpose" : "straight");
      vs.push_back(matrix_to_json(f.j.v[i]));
    }
    rep.record("jordan").set("perm", perm).set("flags", flags).set("v", vs).set("trace_preserving", f.trace_preserving);
    rep.record("factorization")
        .set("z", f.z.to_string())
        .set("A", io::element_to_json(f.a))
        .set("B", io::element_to_json(f.b))
        .set("residual", f.residual)
        .set("jordan_residual", f.jordan_residual)
        .set("condition", f.condition);
    if (f.u) rep.record("factor").set("u", io::element_to_json(*f.u)).set("unitary_defect", f.unitary_defect);
    return kOk;
  } catch (const NotFactorable& e) {
    rep.record("rejected").set("reason", "NotFactorable").set("message", e.what());
  } catch (const FactorizationRejected& e) {
    rep.record("rejected").set("reason", "FactorizationRejected").set("message", e.what());
  } catch (const ClassificationFailed& e) {
    rep.record("rejected").set("reason", "ClassificationFailed").set("message", e.what());
  } catch (const NotSurjective& e) {
    rep.record("rejected").set("reason", "NotSurjective").set("message", e.what());
  }
  return kRejected;
}

int cmd_central(Context& ctx, Report& rep) {
  const json& q = ctx.field("quadruple");
  auto part = [&](const char* k) {
    if (!q.contains(k)) throw io::ConfigError(std::string("quadruple.") + k, "missing field");
    return io::parse_element(ctx.algebra(), q[k], std::string("quadruple.") + k);
  };
  const Element a = part("a"), b = part("b"), e = part("e"), f = part("f");
  try {
    const auto cd = central_decomposition(a, b, e, f, ctx.tol());
    rep.record("central")
        .set("z", cd.z.to_string())
        .set("identity_defect", cd.identity.identity)
        .set("commutator_defect", cd.identity.commutator)
        .set("double_commutator_defect", cd.identity.double_comm)
        .set("a_defect", cd.a_defect)
        .set("e_defect", cd.e_defect)
        .set("b_defect", cd.b_defect)
        .set("f_defect", cd.f_defect);
    return kOk;
  } catch (const HypothesisViolated& ex) {
    rep.record("rejected").set("reason", "HypothesisViolated").set("message", ex.what());
  } catch (const DomainError& ex) {
    rep.record("rejected").set("reason", "IdentityFails").set("message", ex.what());
  }
  return kRejected;
}

int cmd_gallery(Context& ctx, Report& rep) {
  const auto n = SymmetricNorm::custom_two_atom(3.0);
  const auto t = selftest::exam_isometry();
  const auto h = selftest::exam_hermitian();
  rep.record("space").set("algebra", io::algebra_to_json(*t.algebra())).set("norm", n.describe());

  const auto iso = is_isometry(t, n, n, {ctx.sampling().seed, 1000}, 1e-10);
  const auto el = is_elementary(t);
  bool factorable = true;
  std::string why;
  try {
    extract_jordan(t, ctx.tol().fit);
  } catch (const NotFactorable& e) {
    factorable = false;
    why = e.what();
  }
  rep.record("isometry")
      .set("matrix", matrix_to_json(t.matrix()))
      .set("defect", iso.defect)
      .set("isometry", iso.isometry)
      .set("elementary", el.elementary)
      .set("best_elementary_defect", el.best_defect)
      .set("jordan_factorable", factorable);

  const auto c = certify(h, n, {ctx.sampling(), ctx.tol()});
  const double fit = multiplier_fit_residual(h);
  write_certificate(rep, c);
  rep.record("hermitian").set("matrix", matrix_to_json(h.matrix())).set("multiplier_fit_residual", fit).set("multiplication", fit < 0.1);

  const bool ok = iso.isometry && iso.defect < 1e-10 && !el.elementary && !factorable && c.verdict == Verdict::Hermitian && fit > 0.1;
  rep.record("summary")
      .set("isometry_defect_below_1e-10", iso.defect < 1e-10)
      .set("non_elementary", !el.elementary)
      .set("hermitian_certified", c.verdict == Verdict::Hermitian)
      .set("non_multiplication", fit > 0.1)
      .set("reproduced", ok);
  return ok ? kOk : kRejected;
}

int cmd_selftest(Context& ctx, Report& rep, int criterion) {
  selftest::Suite suite(ctx.sampling());
  std::vector<selftest::CriterionResult> results;
  if (criterion == 0) results = suite.run_all();
  else results.push_back(suite.run(criterion));
  bool all = true;
  for (const auto& r : results) {
    rep.record("criterion")
        .set("id", r.id)
        .set("title", r.title)
        .set("passed", r.passed())
        .set("property", r.property)
        .set("seconds", r.seconds)
        .set("budget", r.budget)
        .set("detail", r.detail);
    all = all && r.passed();
  }
  return all ? kOk : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify hermitian operators and isometries on symmetric operator spaces"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON configuration file")->envname("SYMOP_CONFIG");
  app.add_option("--seed", o.seed, "sampling seed")->envname("SYMOP_SEED");
  app.add_option("--samples", o.samples, "samples per oracle")->envname("SYMOP_SAMPLES");
  app.add_option("--tol-structural", o.tol_structural, "tolerance for exact identities")->envname("SYMOP_TOL_STRUCTURAL");
  app.add_option("--tol-oracle", o.tol_oracle, "tolerance for sampled oracles")->envname("SYMOP_TOL_ORACLE");
  app.add_option("--out", o.out, "write the report to this file")->envname("SYMOP_OUT");
  app.add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"text", "json-lines"}))
      ->envname("SYMOP_FORMAT");

  std::function<int(Context&, Report&)> action;
  std::string name;
  auto leaf = [&](CLI::App* parent, const std::string& cmd, const std::string& full, const std::string& help,
                  std::function<int(Context&, Report&)> fn) {
    auto* sub = parent->add_subcommand(cmd, help);
    sub->fallthrough();
    sub->callback([&action, &name, full, fn]() {
      name = full;
      action = fn;
    });
    return sub;
  };
  leaf(&app, "mu", "mu", "print the singular value function of `element`", cmd_mu);
  leaf(&app, "norm", "norm", "evaluate `norm` on `element`", [](Context& c, Report& r) { return cmd_norm(c, r, false); });
  leaf(&app, "dual-norm", "dual-norm", "evaluate the Koethe dual norm on `element`",
       [](Context& c, Report& r) { return cmd_norm(c, r, true); });
  auto* herm = app.add_subcommand("hermitian", "hermitian operators");
  herm->fallthrough();
  herm->require_subcommand(1);
  leaf(herm, "certify", "hermitian certify", "certify `operator` on `norm`", cmd_certify);
  leaf(herm, "decompose", "hermitian decompose", "fit `operator` as x -> a x + x b", cmd_decompose);
  auto* iso = app.add_subcommand("isometry", "isometries");
  iso->fallthrough();
  iso->require_subcommand(1);
  leaf(iso, "check", "isometry check", "sample the isometry defect of `operator`", cmd_isometry_check);
  leaf(iso, "factor", "isometry factor", "factor `operator` as J(x) A z + B J(x) (1 - z)", cmd_isometry_factor);
  auto* cen = app.add_subcommand("central", "central decomposition");
  cen->fallthrough();
  cen->require_subcommand(1);
  leaf(cen, "decompose", "central decompose", "split `quadruple` (a, b, e, f) by a central projection", cmd_central);
  auto* gal = app.add_subcommand("gallery", "worked examples");
  gal->fallthrough();
  gal->require_subcommand(1);
  leaf(gal, "exam", "gallery exam", "the weighted two-atom example", cmd_gallery);
  auto* st = leaf(&app, "selftest", "selftest", "run the acceptance suite",
                  [&o](Context& c, Report& r) { return cmd_selftest(c, r, o.criterion); });
  st->add_option("--criterion", o.criterion, "run a single criterion (1-8)")->check(CLI::Range(0, 8));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  const ReportFormat fmt = o.format == "json-lines" ? ReportFormat::JsonLines : ReportFormat::Text;
  Report rep;
  int rc = kOk;
  try {
    Context ctx(o);
    ctx.header(rep, name);
    rc = action(ctx, rep);
  } catch (const io::ConfigError& e) {
    std::cerr << "symop: config error: " << e.what() << '\n';
    return kInputError;
  } catch (const StructuralError& e) {
    std::cerr << "symop: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "symop: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "symop: error: " << e.what() << '\n';
    return kInputError;
  }
  if (o.out.empty()) {
    rep.write(std::cout, fmt);
  } else {
    std::ofstream out(o.out);
    if (!out) {
      std::cerr << "symop: cannot write '" << o.out << "'\n";
      return kInputError;
    }
    rep.write(out, fmt);
  }
  return rc;
}
