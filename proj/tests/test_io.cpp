#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>

#include <symop/io.hpp>
#include <symop/report.hpp>

#include "helpers.hpp"

using namespace symop;
using namespace testing_util;
using io::json;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const io::ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Io, ParseAlgebra) {
  const auto a = io::parse_algebra(json::parse(R"({"blocks": [{"dim": 2, "weight": 1.5}, {"dim": 1, "weight": 2}]})"));
  EXPECT_EQ(a->num_blocks(), 2);
  EXPECT_EQ(a->dim(0), 2);
  EXPECT_DOUBLE_EQ(a->weight(0), 1.5);
  EXPECT_EQ(io::algebra_to_json(*a).dump(), R"({"blocks":[{"dim":2,"weight":1.5},{"dim":1,"weight":2.0}]})");
}

TEST(Io, AlgebraErrorsNameTheField) {
  EXPECT_EQ(field_of([] { io::parse_algebra(json::parse(R"({})")); }), "algebra.blocks");
  EXPECT_EQ(field_of([] { io::parse_algebra(json::parse(R"({"blocks": []})")); }), "algebra.blocks");
  EXPECT_EQ(field_of([] { io::parse_algebra(json::parse(R"({"blocks": [{"weight": 1}]})")); }),
            "algebra.blocks[0].dim");
  EXPECT_EQ(field_of([] { io::parse_algebra(json::parse(R"({"blocks": [{"dim": 2, "weight": -1}]})")); }),
            "algebra.blocks[0].weight");
  EXPECT_EQ(field_of([] { io::parse_algebra(json::parse(R"({"blocks": [{"dim": 2.5, "weight": 1}]})")); }),
            "algebra.blocks[0].dim");
}

TEST(Io, ParseNorms) {
  EXPECT_EQ(io::parse_norm(json::parse(R"({"kind": "lp", "p": 3})")).describe(), "lp(p=3)");
  EXPECT_EQ(io::parse_norm(json::parse(R"({"kind": "lp", "p": "inf"})")).describe(), "lp(p=inf)");
  EXPECT_EQ(io::parse_norm(json::parse(R"({"kind": "ky_fan", "k": 2})")).describe(), "ky_fan(k=2)");
  EXPECT_EQ(io::parse_norm(json::parse(R"({"kind": "lorentz", "alpha": 0.5})")).describe(), "lorentz(alpha=0.5)");
  EXPECT_EQ(io::parse_norm(json::parse(R"({"kind": "l1_cap_linf"})")).describe(), "l1_cap_linf");
  EXPECT_EQ(io::parse_norm(json::parse(R"({"kind": "l1_plus_linf"})")).describe(), "l1_plus_linf");
  EXPECT_EQ(io::parse_norm(json::parse(R"({"kind": "custom_two_atom"})")).describe(), "custom_two_atom(c=3)");
}

TEST(Io, NormErrorsNameTheField) {
  EXPECT_EQ(field_of([] { io::parse_norm(json::parse(R"({"kind": "schatten"})")); }), "norm.kind");
  EXPECT_EQ(field_of([] { io::parse_norm(json::parse(R"({"kind": "lp"})")); }), "norm.p");
  EXPECT_EQ(field_of([] { io::parse_norm(json::parse(R"({"kind": "lp", "p": "three"})")); }), "norm.p");
  EXPECT_EQ(field_of([] { io::parse_norm(json::parse(R"({"kind": "lp", "p": 0.5})")); }), "norm");
}

TEST(Io, ElementRoundTrip) {
  auto a = alg_of({{2, 1.0}, {1, 2.0}});
  Rng rng = make_rng(110);
  const Element x = random_element(a, rng);
  const Element y = io::parse_element(a, io::element_to_json(x));
  EXPECT_EQ((x - y).norm_inf(), 0.0);
  const auto j = json::parse("[[1, 2, 3, 4, 5, 6, 7, 8], [9, 10]]");
  const Element z = io::parse_element(a, j);
  EXPECT_EQ(z.block(0)(0, 1), cplx(3.0, 4.0));
  EXPECT_EQ(z.block(0)(1, 0), cplx(5.0, 6.0));
  EXPECT_EQ(z.block(1)(0, 0), cplx(9.0, 10.0));
}

TEST(Io, ElementErrorsNameTheField) {
  auto a = alg_of({{2, 1.0}, {1, 2.0}});
  EXPECT_EQ(field_of([&] { io::parse_element(a, json::parse("[[1, 2]]")); }), "element");
  EXPECT_EQ(field_of([&] { io::parse_element(a, json::parse("[[1, 2], [1, 2]]")); }), "element[0]");
  EXPECT_EQ(field_of([&] { io::parse_element(a, json::parse(R"([[1, 2, 3, 4, 5, 6, 7, "x"], [1, 2]])")); }),
            "element[0][7]");
}

TEST(Io, Operators) {
  auto a = alg_of({{2, 1.0}});
  Rng rng = make_rng(111);
  const Element l = random_self_adjoint(a, rng), r = random_self_adjoint(a, rng);
  json j = json::object();
  j["type"] = "structured";
  j["a"] = io::element_to_json(l);
  j["b"] = io::element_to_json(r);
  EXPECT_LT(op_distance(io::parse_operator(a, j), SuperOperator::structured(l, r)), 1e-15);
  EXPECT_LT(op_distance(io::parse_operator(a, json::parse(R"({"type": "transpose"})")), SuperOperator::transpose_map(a)),
            1e-15);
  EXPECT_EQ(field_of([&] { io::parse_operator(a, json::parse(R"({"type": "magic"})")); }), "operator.type");
  EXPECT_EQ(field_of([&] { io::parse_operator(a, json::parse(R"({"type": "dense", "matrix": [[1, 0]]})")); }),
            "operator.matrix");
}

TEST(Io, DenseFileRoundTrip) {
  auto a = alg_of({{2, 1.0}});
  Rng rng = make_rng(112);
  const Mat m = random_gaussian_matrix(4, 4, rng);
  const std::string file = ::testing::TempDir() + "symop_dense.txt";
  io::write_dense_file(file, m);
  json j = json::object();
  j["type"] = "dense";
  j["file"] = file;
  EXPECT_EQ((io::parse_operator(a, j).matrix() - m).norm(), 0.0);
  EXPECT_EQ(field_of([&] { io::read_dense_file(file, 9, "operator.file"); }), "operator.file");
  std::remove(file.c_str());
}

TEST(Io, Tolerances) {
  const auto t = io::parse_tolerances(json::parse(R"({"oracle": 1e-6})"));
  EXPECT_DOUBLE_EQ(t.oracle, 1e-6);
  EXPECT_DOUBLE_EQ(t.fit, Tolerances{}.fit);
  EXPECT_EQ(field_of([] { io::parse_tolerances(json::parse(R"({"fit": -1})")); }), "tolerances.fit");
}

TEST(ReportFormat, TextAndJsonLines) {
  Report r;
  r.record("run").set("seed", 7).set("command", "norm");
  r.record("norm").set("value", 0.5).set("steps", json::array({json::array({1.0, 2.0})}));
  std::ostringstream text, lines;
  r.write(text, ReportFormat::Text);
  r.write(lines, ReportFormat::JsonLines);
  EXPECT_EQ(text.str(), "[run]\n  seed = 7\n  command = norm\n[norm]\n  value = 0.5\n  steps = [[1.0,2.0]]\n");
  EXPECT_EQ(lines.str(),
            "{\"record\":\"run\",\"seed\":7,\"command\":\"norm\"}\n{\"record\":\"norm\",\"value\":0.5,\"steps\":[[1.0,2.0]]}\n");
}
