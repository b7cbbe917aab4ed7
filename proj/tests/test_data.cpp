#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "core/csvio.hpp"
#include "core/data.hpp"

using namespace rmdur;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("rmdur_data_" + name)).string();
}

// two subjects, both processes, time-varying promotion covariate
const char* kCsv =
    "subject_id,process,entry,exit,event,segment_start,g,w\n"
    "a,P,0,4,1,0,1,0.5\n"
    "a,P,0,4,1,2,1,1.5\n"
    "a,R,1,5,0,1,1,0\n"
    "b,P,0.5,3,0,0.5,0,2\n"
    "b,R,2,3,1,2,0,0\n";

const char* kSidecar =
    "{\n"
    "  \"protected_column\": \"g\",\n"
    "  \"window\": {\"tau0\": 0, \"tau1\": 5}\n"
    "}\n";

dataset load_example() {
  const std::string csv = tmp_path("ex.csv"), sc = tmp_path("ex.json");
  spit_file(csv, kCsv);
  spit_file(sc, kSidecar);
  return load_dataset(csv, sc);
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("trajectory lookup is right continuous with constant extension") {
    covariate_trajectory tr;
    tr.start = {1.0, 3.0};
    tr.values = {10.0, 20.0, 11.0, 21.0};
    tr.dim = 2;
    CHECK(tr.at(1.0, 0) == 10.0);
    CHECK(tr.at(2.999, 1) == 20.0);
    CHECK(tr.at(3.0, 0) == 11.0);
    CHECK(tr.at(100.0, 1) == 21.0);
    CHECK_THROWS_AS(tr.at(0.999, 0), domain_error);
    CHECK(tr.covers(1.0));
    CHECK_FALSE(tr.covers(0.5));
  }

  TEST_CASE("loading the long format groups segments per subject and process") {
    dataset ds = load_example();
    REQUIRE(ds.n() == 2);
    CHECK(ds.x_names == std::vector<std::string>{"g", "w"});
    CHECK(ds.z_names == std::vector<std::string>{"g", "w"});
    CHECK(ds.protected_column == "g");
    CHECK(ds.window.tau0 == 0.0);
    CHECK(ds.window.tau1 == 5.0);
    CHECK(ds.has_window);

    const subject_record& a = ds.subjects[0];
    CHECK(a.id == "a");
    REQUIRE(a.promotion.has_value());
    CHECK(a.promotion->entry == 0.0);
    CHECK(a.promotion->exit == 4.0);
    CHECK(a.promotion->event);
    CHECK(a.x.nseg() == 2);
    CHECK(a.x.at(1.0, 1) == 0.5);
    CHECK(a.x.at(2.0, 1) == 1.5);
    REQUIRE(a.retirement.has_value());
    CHECK_FALSE(a.retirement->event);
    CHECK(a.z.nseg() == 1);

    const subject_record& b = ds.subjects[1];
    CHECK(b.id == "b");
    CHECK(b.promotion->entry == 0.5);
    REQUIRE(b.retirement.has_value());
    CHECK(b.retirement->event);
  }

  TEST_CASE("the sidecar can restrict each model to a covariate subset") {
    const std::string csv = tmp_path("sub.csv"), sc = tmp_path("sub.json");
    spit_file(csv, kCsv);
    spit_file(sc,
              "{\"protected_column\": \"g\", \"window\": {\"tau0\": 0, \"tau1\": 5},\n"
              " \"promotion_covariates\": [\"g\", \"w\"],\n"
              " \"retirement_covariates\": [\"g\"]}\n");
    dataset ds = load_dataset(csv, sc);
    CHECK(ds.x_names == std::vector<std::string>{"g", "w"});
    CHECK(ds.z_names == std::vector<std::string>{"g"});
    CHECK(ds.subjects[0].z.dim == 1);
    CHECK(ds.subjects[0].z.at(1.0, 0) == 1.0);
  }

  TEST_CASE("a configured epoch turns ISO dates into day offsets") {
    const std::string csv = tmp_path("date.csv"), sc = tmp_path("date.json");
    spit_file(csv,
              "subject_id,process,entry,exit,event,segment_start,g\n"
              "a,P,2000-01-01,2000-03-01,1,2000-01-01,1\n");
    spit_file(sc,
              "{\"epoch\": \"2000-01-01\", \"protected_column\": \"g\",\n"
              " \"window\": {\"tau0\": \"2000-01-01\", \"tau1\": \"2001-01-01\"}}\n");
    dataset ds = load_dataset(csv, sc);
    CHECK(ds.subjects[0].promotion->entry == 0.0);
    CHECK(ds.subjects[0].promotion->exit == 60.0);  // leap year: jan 31 + feb 29
    CHECK(ds.window.tau1 == 366.0);
  }

  TEST_CASE("civil date conversion round trips across leap years") {
    for (int64_t d : {0ll, 59ll, 60ll, -1ll, 10957ll, -25567ll, 36524ll}) {
      const std::string s = civil_from_days(d);
      int y = std::stoi(s.substr(0, 4));
      unsigned m = unsigned(std::stoi(s.substr(5, 2)));
      unsigned dd = unsigned(std::stoi(s.substr(8, 2)));
      CHECK(days_from_civil(y, m, dd) == d);
    }
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2000, 3, 1) == 11017);
    CHECK(civil_from_days(11017) == "2000-03-01");
  }

  TEST_CASE("validation reports entry after exit") {
    dataset ds = load_example();
    ds.subjects[0].promotion->entry = 9.0;
    auto diags = validate_dataset(ds);
    REQUIRE_FALSE(diags.empty());
    bool found = false;
    for (auto& d : diags) found = found || d.find("entry") != std::string::npos;
    CHECK(found);
    CHECK_THROWS_AS(require_valid(ds), validation_error);
  }

  TEST_CASE("validation reports a trajectory that starts after the entry time") {
    dataset ds = load_example();
    ds.subjects[1].x.start = {2.0};  // promotion entry is 0.5
    auto diags = validate_dataset(ds);
    bool found = false;
    for (auto& d : diags) found = found || d.find("after the observation entry") != std::string::npos;
    CHECK(found);
  }

  TEST_CASE("validation reports a window without any events for a process") {
    dataset ds = load_example();
    ds.subjects[0].promotion->event = false;  // b's promotion is already censored
    auto diags = validate_dataset(ds);
    bool found = false;
    for (auto& d : diags) found = found || d.find("no promotion events") != std::string::npos;
    CHECK(found);
  }

  TEST_CASE("validation reports duplicate ids and a missing protected column") {
    dataset ds = load_example();
    ds.subjects[1].id = "a";
    ds.protected_column = "nope";
    auto diags = validate_dataset(ds);
    bool dup = false, prot = false;
    for (auto& d : diags) {
      dup = dup || d.find("duplicate") != std::string::npos;
      prot = prot || d.find("protected") != std::string::npos;
    }
    CHECK(dup);
    CHECK(prot);
  }

  TEST_CASE("malformed csv rows fail loudly") {
    const std::string sc = tmp_path("m.json");
    spit_file(sc, kSidecar);

    const std::string bad1 = tmp_path("m1.csv");
    spit_file(bad1, "subject_id,process,entry,exit,event,segment_start,g,w\na,X,0,1,1,0,1,2\n");
    CHECK_THROWS_AS(load_dataset(bad1, sc), parse_error);

    const std::string bad2 = tmp_path("m2.csv");
    spit_file(bad2,
              "subject_id,process,entry,exit,event,segment_start,g,w\n"
              "a,P,0,4,1,0,1,0.5\na,P,0,3,1,2,1,1.5\n");  // exit changes between segments
    CHECK_THROWS_AS(load_dataset(bad2, sc), parse_error);

    const std::string bad3 = tmp_path("m3.csv");
    spit_file(bad3,
              "subject_id,process,entry,exit,event,segment_start,g,w\n"
              "a,P,0,4,1,2,1,0.5\na,P,0,4,1,2,1,1.5\n");  // segment_start not increasing
    CHECK_THROWS_AS(load_dataset(bad3, sc), parse_error);

    CHECK_THROWS_AS(load_dataset(tmp_path("missing.csv"), sc), io_error);
  }
}
