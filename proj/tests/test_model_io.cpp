#include "doctest.h"

#include <cmath>
#include <string>

#include "json.hpp"

#include "core/cox.hpp"
#include "core/model_io.hpp"
#include "core/numeric.hpp"
#include "core/sim.hpp"

#include "support.hpp"

using namespace rmdur;
using nlohmann::ordered_json;

namespace {

dataset sim_dataset(uint64_t seed, int n) {
  sim_config c;
  c.n = n;
  c.seed = seed;
  return generate_replicate(c, 0);
}

}  // namespace

TEST_SUITE("model_io") {
  TEST_CASE("artifacts survive a json round trip bit for bit") {
    dataset ds = sim_dataset(42, 120);
    model_artifact m = fit_model(ds);
    const std::string j1 = model_to_json(m);
    model_artifact back = model_from_json(j1);
    const std::string j2 = model_to_json(back);
    CHECK(j1 == j2);

    CHECK(back.protected_column == m.protected_column);
    CHECK(back.x_names == m.x_names);
    CHECK(back.z_names == m.z_names);
    CHECK(back.promo.beta == m.promo.beta);           // exact: decimal strings are shortest round trip
    CHECK(back.retire.beta == m.retire.beta);
    CHECK(back.promo.time == m.promo.time);
    CHECK(back.promo.jump == m.promo.jump);
    CHECK(back.promo.logD == m.promo.logD);
    CHECK(back.promo.xbar == m.promo.xbar);
    CHECK(back.retire.hessian_inv == m.retire.hessian_inv);
    CHECK(back.data_digest == m.data_digest);
    CHECK(back.has_window == m.has_window);
    if (m.has_window) {
      CHECK(back.window.tau0 == m.window.tau0);
      CHECK(back.window.tau1 == m.window.tau1);
    }
  }

  TEST_CASE("the artifact declares its format and carries both processes") {
    dataset ds = sim_dataset(7, 60);
    model_artifact m = fit_model(ds);
    auto j = ordered_json::parse(model_to_json(m));
    CHECK(j["format"] == "rmdur-model");
    CHECK(j["version"] == 1);
    CHECK(j["promotion"]["terms"].size() == ds.x_names.size());
    CHECK(j["retirement"]["terms"].size() == ds.z_names.size());
    CHECK(j["promotion"]["baseline"]["time"].size() == j["promotion"]["baseline"]["jump"].size());
  }

  TEST_CASE("loaded artifacts do not carry residuals until reattached") {
    dataset ds = sim_dataset(9, 80);
    model_artifact m = fit_model(ds);
    REQUIRE_FALSE(m.promo.resid.empty());

    model_artifact back = model_from_json(model_to_json(m));
    CHECK(back.promo.resid.empty());
    CHECK(back.retire.resid.empty());

    attach_residuals(back, ds);
    REQUIRE(back.promo.resid.size() == m.promo.resid.size());
    double worst = 0.0;
    for (size_t i = 0; i < m.promo.resid.size(); ++i)
      worst = std::max(worst, std::abs(back.promo.resid[i] - m.promo.resid[i]));
    for (size_t i = 0; i < m.retire.resid.size(); ++i)
      worst = std::max(worst, std::abs(back.retire.resid[i] - m.retire.resid[i]));
    CHECK(worst < 1e-10);
  }

  TEST_CASE("reattaching against a different dataset is refused") {
    dataset ds = sim_dataset(11, 70);
    model_artifact m = fit_model(ds);
    model_artifact back = model_from_json(model_to_json(m));
    dataset other = sim_dataset(12, 70);  // different draws, different event times
    CHECK_THROWS_AS(attach_residuals(back, other), validation_error);
  }

  TEST_CASE("malformed artifacts are rejected with parse or validation errors") {
    dataset ds = sim_dataset(5, 50);
    model_artifact m = fit_model(ds);
    auto j = ordered_json::parse(model_to_json(m));

    auto wrong_format = j;
    wrong_format["format"] = "something-else";
    CHECK_THROWS_AS(model_from_json(wrong_format.dump()), parse_error);

    auto short_coef = j;
    short_coef["promotion"]["coef"].erase(0);
    CHECK_THROWS_AS(model_from_json(short_coef.dump()), parse_error);

    auto ragged_baseline = j;
    ragged_baseline["retirement"]["baseline"]["jump"].erase(0);
    CHECK_THROWS_AS(model_from_json(ragged_baseline.dump()), parse_error);

    CHECK_THROWS(model_from_json("not json at all"));
  }

  TEST_CASE("coefficient tables expose hr, se, z and a two-sided p") {
    dataset ds = sim_dataset(21, 150);
    model_artifact m = fit_model(ds);
    const std::string csv = coef_table_csv(m);
    CHECK(csv.rfind("process,term,coef,hr,se,z,p\n", 0) == 0);

    // one row per term in each process, plus the header
    size_t lines = 0;
    for (char ch : csv)
      if (ch == '\n') ++lines;
    CHECK(lines == 1 + ds.x_names.size() + ds.z_names.size());

    auto tbl = ordered_json::parse(coef_table_json(m))["coefficients"];
    REQUIRE(tbl.is_array());
    REQUIRE(tbl.size() == ds.x_names.size() + ds.z_names.size());
    for (size_t k = 0; k < tbl.size(); ++k) {
      const auto& row = tbl[k];
      const double coef = parse_double(row["coef"].get<std::string>());
      const double hr = parse_double(row["hr"].get<std::string>());
      const double se = parse_double(row["se"].get<std::string>());
      const double z = parse_double(row["z"].get<std::string>());
      const double p = parse_double(row["p"].get<std::string>());
      CHECK(hr == doctest::Approx(std::exp(coef)).epsilon(1e-12));
      CHECK(se > 0.0);
      CHECK(z == doctest::Approx(coef / se).epsilon(1e-12));
      CHECK(p == doctest::Approx(2.0 * normal_cdf(-std::abs(z))).epsilon(1e-12));
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    // first block is the promotion process in term order
    CHECK(tbl[0]["process"] == "promotion");
    CHECK(tbl[0]["term"] == ds.x_names[0]);
    CHECK(tbl[tbl.size() - 1]["process"] == "retirement");
  }

  TEST_CASE("fit_model agrees with fitting the two processes directly") {
    dataset ds = sim_dataset(33, 90);
    model_artifact m = fit_model(ds);
    counting_view vp = build_view(ds, process_kind::promotion);
    counting_view vr = build_view(ds, process_kind::retirement);
    cox_fit fp = fit_cox(vp), fr = fit_cox(vr);
    REQUIRE(m.promo.beta.size() == fp.beta.size());
    for (size_t k = 0; k < fp.beta.size(); ++k)
      CHECK(m.promo.beta[k] == doctest::Approx(fp.beta[k]).epsilon(1e-14));
    for (size_t k = 0; k < fr.beta.size(); ++k)
      CHECK(m.retire.beta[k] == doctest::Approx(fr.beta[k]).epsilon(1e-14));
    CHECK(m.promo.time == fp.time);
    CHECK(m.x_names == ds.x_names);
    CHECK(m.z_names == ds.z_names);
    CHECK(m.protected_column == ds.protected_column);
  }
}
