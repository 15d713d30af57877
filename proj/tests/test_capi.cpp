// Exercises the shared library through its C header only.
#include "colcont/colcont.h"

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

struct Family {
  explicit Family(const char* name) { EXPECT_EQ(cc_family_create(name, &f), CC_OK) << cc_last_error(); }
  ~Family() { cc_family_free(f); }
  cc_family* f = nullptr;
};

json report_json(cc_report* r) { return json::parse(cc_report_json(r)); }

}  // namespace

TEST(CApi, VersionAndNames) {
  EXPECT_STREQ(cc_version(), "1.0.0");
  EXPECT_STREQ(cc_status_name(CC_UNKNOWN_FAMILY), "unknown_family");
  std::string registry = cc_family_registry();
  EXPECT_NE(registry.find("rainbow-k3\n"), std::string::npos);
  EXPECT_NE(registry.find("mono-triangle\n"), std::string::npos);
}

TEST(CApi, ErrorsCarryStatusAndMessage) {
  cc_family* f = nullptr;
  EXPECT_EQ(cc_family_create("nope", &f), CC_UNKNOWN_FAMILY);
  EXPECT_EQ(f, nullptr);
  EXPECT_NE(std::string(cc_last_error()).find("nope"), std::string::npos);
  EXPECT_EQ(cc_family_create(nullptr, &f), CC_INVALID_ARGUMENT);

  Family rainbow("rainbow-k3");
  cc_report* r = nullptr;
  EXPECT_EQ(cc_solve_ex("kn", 5, rainbow.f, "{\"bogus\": 1}", &r), CC_INVALID_ARGUMENT);
  EXPECT_NE(std::string(cc_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(cc_solve_ex("kn", 5, rainbow.f, "[1,2]", &r), CC_INVALID_ARGUMENT);
  EXPECT_EQ(cc_solve_ex("kn", 5, rainbow.f, "{not json", &r), CC_INVALID_ARGUMENT);
  EXPECT_EQ(cc_solve_ex("torus", 5, rainbow.f, nullptr, &r), CC_INVALID_ARGUMENT);
  EXPECT_EQ(cc_solve_ex("qn-vertex", 3, rainbow.f, nullptr, &r), CC_HOST_MISMATCH);

  // a successful call clears the message
  EXPECT_EQ(cc_solve_ex("kn", 4, rainbow.f, nullptr, &r), CC_OK);
  EXPECT_STREQ(cc_last_error(), "");
  cc_report_free(r);
}

TEST(CApi, SolveExReport) {
  Family m("multigraph-3-4");
  cc_report* r = nullptr;
  ASSERT_EQ(cc_solve_ex("kn", 5, m.f, "{\"threads\": 2}", &r), CC_OK);
  json j = report_json(r);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["W_star"], "2304");
  EXPECT_EQ(j["k"], 5);
  EXPECT_TRUE(j["certified"].get<bool>());
  EXPECT_FALSE(j["witnesses"].empty());
  EXPECT_EQ(cc_report_passed(r), 1);
  cc_report_free(r);
}

TEST(CApi, TemplatesAndRelativeEx) {
  cc_template* t = nullptr;
  EXPECT_EQ(cc_template_parse("host kn 3 2\n0 1\n", &t), CC_PARSE_ERROR);
  ASSERT_EQ(cc_template_parse("host kn 3 3\n0 1,2,3\n1 1,2,3\n2 1,2,3\n", &t), CC_OK);
  Family rainbow("rainbow-k3");
  uint64_t bad = 0;
  ASSERT_EQ(cc_template_bad_pairs(t, rainbow.f, &bad), CC_OK);
  EXPECT_EQ(bad, 6u);
  cc_report* r = nullptr;
  ASSERT_EQ(cc_relative_ex(t, rainbow.f, nullptr, &r), CC_OK);
  EXPECT_EQ(report_json(r)["W_star"], "8");
  cc_report_free(r);
  cc_template_free(t);
}

TEST(CApi, ClosedFormsAndDensity) {
  cc_report* r = nullptr;
  ASSERT_EQ(cc_check_closed_forms("rainbow-k3", 3, 6, nullptr, &r), CC_OK);
  EXPECT_EQ(cc_report_passed(r), 1);
  EXPECT_TRUE(report_json(r)["all_hold"].get<bool>());
  cc_report_free(r);

  Family path("path-no-repeat");
  ASSERT_EQ(cc_density("pn", path.f, 3, 12, nullptr, &r), CC_OK);
  json j = report_json(r);
  EXPECT_TRUE(j["monotone_by_pairs"].get<bool>());
  EXPECT_FALSE(j["monotone_by_steps"].get<bool>());
  EXPECT_EQ(cc_report_passed(r), 1);
  EXPECT_NE(std::string(cc_report_csv(r)).find("n,W_star"), std::string::npos);
  cc_report_free(r);
}

TEST(CApi, SpeedAndEncode) {
  Family path("path-no-repeat");
  cc_report* r = nullptr;
  ASSERT_EQ(cc_speed("pn", 5, path.f, nullptr, &r), CC_OK);
  EXPECT_EQ(report_json(r)["speed"], "24");
  cc_report_free(r);

  ASSERT_EQ(cc_encode("tournament", "3\n1 2\n2 3\n3 1\n", 0, &r), CC_OK);
  EXPECT_EQ(report_json(r)["colours"], json::parse("[1, 2, 1]"));
  ASSERT_EQ(cc_report_artifact_count(r), 1u);
  const char* name = nullptr;
  const char* text = nullptr;
  ASSERT_EQ(cc_report_artifact(r, 0, &name, &text), CC_OK);
  EXPECT_STREQ(name, "colouring.txt");
  EXPECT_EQ(std::string(text).rfind("host kn 3 2\n", 0), 0u);
  EXPECT_EQ(cc_report_artifact(r, 1, &name, &text), CC_INVALID_ARGUMENT);
  cc_report_free(r);
  EXPECT_EQ(cc_encode("tournament", "3\n1 2\n", 0, &r), CC_INVALID_ARGUMENT);
  EXPECT_EQ(cc_encode("hypergraph", "3\n", 0, &r), CC_INVALID_ARGUMENT);
}

TEST(CApi, ContainersWriteArtifacts) {
  Family rainbow("rainbow-k3");
  cc_report* r = nullptr;
  ASSERT_EQ(cc_containers("kn", 4, rainbow.f, "{\"epsilon\": \"3/10\", \"seed\": 2, \"samples\": 500}", &r), CC_OK);
  json j = report_json(r);
  EXPECT_EQ(j["cover_failures"], 0);
  EXPECT_EQ(j["exhaustive"]["failures"], 0);
  EXPECT_EQ(j["epsilon"], "3/10");
  EXPECT_EQ(cc_report_artifact_count(r), j["n_containers"].get<std::size_t>());
  EXPECT_EQ(cc_report_passed(r), 1);
  cc_report_free(r);
}

TEST(CApi, StabilityVerdictFollowsTheBound) {
  Family rainbow("rainbow-k3");
  cc_report* r = nullptr;
  ASSERT_EQ(cc_stability(rainbow.f, 4, "1/2", 0, nullptr, &r), CC_OK);
  EXPECT_EQ(report_json(r)["max_distance"], 1);
  EXPECT_EQ(cc_report_passed(r), 1);
  cc_report_free(r);
  ASSERT_EQ(cc_stability(rainbow.f, 4, "1/2", 0, "{\"max_distance\": 0}", &r), CC_OK);
  EXPECT_EQ(cc_report_passed(r), 0);
  cc_report_free(r);
}

TEST(CApi, TransferRejectsNonMonotoneColour) {
  Family mono("mono-triangle");
  cc_report* r = nullptr;
  EXPECT_EQ(cc_transfer(mono.f, 1, 6, "1/2", "1/20", nullptr, &r), CC_NON_MONOTONE);
  ASSERT_EQ(cc_transfer(mono.f, 2, 6, "1", "0.05", "{\"seeds\": 3}", &r), CC_OK);
  json j = report_json(r);
  EXPECT_EQ(j["passes"], 3);
  EXPECT_EQ(j["pass_frequency"], "1/1");
  cc_report_free(r);
}

TEST(CApi, FileDigest) {
  const char* path = "capi_digest_probe.txt";
  {
    std::ofstream f(path, std::ios::binary);
    f << "abc";
  }
  char hex[65];
  ASSERT_EQ(cc_file_digest(path, hex), CC_OK);
  EXPECT_STREQ(hex, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  std::remove(path);
  EXPECT_EQ(cc_file_digest("/no/such/file", hex), CC_IO_ERROR);
}
