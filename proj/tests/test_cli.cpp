#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlog/cli.hpp"

using json = nlohmann::json;

namespace {
struct Out {
  int rc;
  std::string out, err;
};
Out call(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int rc = qlog::cli::run(args, o, e);
  return {rc, o.str(), e.str()};
}
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("eval schema") {
    auto r = call({"eval", "--family", "exp", "--q", "0.5", "--re", "0"});
    REQUIRE(r.rc == 0);
    auto j = json::parse(r.out);
    for (const char* k : {"op", "inputs", "value", "error_estimate", "certified", "method"}) CHECK(j.contains(k));
    CHECK(j["value"]["re"].get<double>() == 1.0);
    CHECK(j.contains("tail_bound"));
    CHECK(j.contains("terms_used"));
  }

  TEST_CASE("documented examples") {
    auto a = call({"eval", "--family", "exp", "--convention", "jackson", "--q", "1.09", "--re", "-12.1111"});
    auto ja = json::parse(a.out);
    CHECK(std::hypot(ja["value"]["re"].get<double>(), ja["value"]["im"].get<double>()) < 1e-4);
    auto s = call({"eval", "--family", "sin", "--q", "1", "--re", "3.14159265"});
    auto js = json::parse(s.out);
    CHECK(std::hypot(js["value"]["re"].get<double>(), js["value"]["im"].get<double>()) < 1e-8);
    auto e = call({"sumrules", "--family", "e", "--n", "4", "--q", "1"});
    REQUIRE(e.rc == 0);
    CHECK(std::abs(json::parse(e.out)["value"].get<double>()) < 1e-12);
  }

  TEST_CASE("17 significant digits") {
    auto r = call({"sumrules", "--family", "e", "--n", "2", "--q", "0.3"});
    CHECK(r.out.find("\"value\": ") != std::string::npos);
    auto j = json::parse(r.out);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", j["value"].get<double>());
    CHECK(r.out.find(buf) != std::string::npos);
  }

  TEST_CASE("determinism") {
    auto a = call({"zeros", "--q", "0.35", "--count", "4"});
    auto b = call({"zeros", "--q", "0.35", "--count", "4"});
    CHECK(a.rc == 0);
    CHECK(a.out == b.out);
  }

  TEST_CASE("exit codes") {
    CHECK(call({"eval", "--q", "-1"}).rc == 2);
    CHECK(call({"eval", "--family", "nope"}).rc == 2);
    CHECK(call({"bogus"}).rc == 2);
    CHECK(call({}).rc == 2);
    auto d = call({"eval", "--convention", "jackson", "--q", "0.5", "--re", "5"});
    CHECK(d.rc == 2);
    CHECK(json::parse(d.err)["error"] == "domain");
    CHECK(call({"sumrules", "--family", "cos", "--n", "3"}).rc == 2);
    CHECK(call({"sumrules", "--family", "e", "--n", "3", "--method", "closed"}).rc == 2);
    CHECK(call({"contour", "--window", "0", "1", "0"}).rc == 2);
  }

  TEST_CASE("usage message names the flag") {
    auto r = call({"sumrules", "--n", "0"});
    CHECK(r.rc == 2);
    CHECK(r.err.find("--n") != std::string::npos);
  }

  TEST_CASE("contour csv") {
    auto r = call({"contour", "--q", "1", "--window", "-1", "1", "-4", "4", "--grid", "32", "--format", "csv"});
    REQUIRE(r.rc == 0);
    CHECK(r.out.rfind("x,y,u,v\n", 0) == 0);
    CHECK(r.out.find("\n\n") != std::string::npos);  // several polylines
  }

  TEST_CASE("atomic output file") {
    const auto path = std::filesystem::temp_directory_path() / "qlog_cli_test.json";
    std::filesystem::remove(path);
    auto r = call({"lnq", "--q", "1", "--N", "5", "--output", path.string()});
    REQUIRE(r.rc == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    auto j = json::parse(f);
    CHECK(j["values"].size() == 5);
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove(path);
  }

  TEST_CASE("verify invariants") {
    auto r = call({"verify", "--suite", "invariants"});
    CHECK(r.rc == 0);
    auto rows = qlog::cli::verify_suite("invariants");
    CHECK(!rows.empty());
    for (const auto& row : rows) CHECK_MESSAGE(row.pass, row.name);
  }
}
