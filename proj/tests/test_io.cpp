#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "linkform/json_io.hpp"

using namespace linkform;

TEST_CASE("json round trips") {
  FieldContext ctx = FieldContext::make(12);

  RootOfUnity r(5, 12);
  CHECK(root_from_json(to_json(r)) == r);

  FieldElement x = embed_root(ctx, RootOfUnity(1, 12)) * mpq_class(3, 7) +
                   FieldElement::from_rational(ctx, mpq_class(-2, 5));
  CHECK(element_from_json(to_json(x), ctx) == x);

  LaurentPoly p = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)) *
                  LaurentPoly::t_power(ctx, -2, imaginary_unit(ctx));
  CHECK(poly_from_json(to_json(p), ctx) == p);

  LaurentMatrix m(ctx, 2, 1);
  m.at(0, 0) = p;
  m.at(1, 0) = LaurentPoly::one(ctx);
  LaurentMatrix m2 = matrix_from_json(to_json(m));
  CHECK(m2 == m);

  LinkingForm f;
  f.mode = Mode::Real;
  f.ctx = ctx;
  f.summands.push_back(CyclicPairing{basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)),
                                     LaurentPoly::one(ctx), Mode::Real});
  f.roots.add_circle(RootOfUnity(1, 6));
  LinkingForm f2 = form_from_json(to_json(f));
  CHECK(f2.mode == f.mode);
  REQUIRE(f2.summands.size() == 1);
  CHECK(f2.summands[0].f == f.summands[0].f);
  CHECK(classify(f2) == classify(f));

  Decomposition d = classify(f);
  Decomposition d2 = decomposition_from_json(to_json(d), ctx);
  CHECK(d2 == d);
}

TEST_CASE("classify output re-ingested as a reference form classifies identically") {
  FieldContext ctx = FieldContext::make(24);
  LinkingForm f;
  f.mode = Mode::Complex;
  f.ctx = ctx;
  f.summands.push_back(make_basic(ctx, Mode::Complex, BasicForm::E(2, 0, -1, RootOfUnity(1, 8))));
  f.summands.push_back(make_basic(ctx, Mode::Complex, BasicForm::E(1, 0, +1, RootOfUnity(1, 6))));
  f.roots.add_circle(RootOfUnity(1, 8));
  f.roots.add_circle(RootOfUnity(1, 6));
  Decomposition d = classify(f);
  LinkingForm round = reference_form(decomposition_from_json(to_json(d), ctx), ctx);
  CHECK(classify(round) == d);
}

TEST_CASE("digest and atomic write") {
  CHECK(fnv1a_digest("abc") == fnv1a_digest("abc"));
  CHECK(fnv1a_digest("abc") != fnv1a_digest("abd"));
  std::string path = "io_test_tmp.json";
  write_file_atomic(path, "{\"x\": 1}\n");
  CHECK(read_file(path) == "{\"x\": 1}\n");
  std::remove(path.c_str());
}

TEST_CASE("bad inputs raise InvalidInput") {
  CHECK_THROWS_AS(parse_json("{nope"), Error);
  FieldContext ctx = FieldContext::make(12);
  Json bad = Json{{"N", 12}, {"coeffs", Json::array({"1/2"})}};
  CHECK_THROWS_AS(element_from_json(bad, ctx), Error);
}
