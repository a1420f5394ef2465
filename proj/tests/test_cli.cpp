#include <catch2/catch_amalgamated.hpp>

#include "sla4oai/cli.hpp"

#include <sstream>
#include <string>
#include <vector>

using namespace sla4oai;

namespace {

std::string fixture_path(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
};

CliRun run(CliOptions options) {
  std::ostringstream out, err;
  int code = run_cli(options, out, err);
  return {code, out.str(), err.str()};
}

CliOptions validity_of(const std::string& fixture) {
  CliOptions o;
  o.operation = "validity";
  o.file = fixture_path(fixture);
  return o;
}

}  // namespace

TEST_CASE("exit code 0: analyzed documents without conflicts") {
  for (const char* name :
       {"fullcontact.sla.yaml", "vc22-valid.yaml", "vc23-valid.yaml",
        "vc32-valid.yaml", "vc42-valid.yaml", "mini.sla.json"}) {
    CAPTURE(name);
    CliRun r = run(validity_of(name));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("verdict: valid") != std::string::npos);
  }
}

TEST_CASE("exit code 1: analyzed documents with conflicts") {
  struct Case {
    const char* fixture;
    const char* criterion;
  };
  for (Case c : {Case{"vc11-invalid.yaml", "VC1_1"},
                 Case{"vc22-invalid.yaml", "VC2_2"},
                 Case{"vc23-invalid.yaml", "VC2_3"},
                 Case{"vc32-invalid.yaml", "VC3_2"},
                 Case{"vc42-invalid.yaml", "VC4_2"}}) {
    CAPTURE(c.fixture);
    CliRun r = run(validity_of(c.fixture));
    CHECK(r.exit_code == 1);
    CHECK(r.out.find(std::string("conflict ") + c.criterion) !=
          std::string::npos);
    CHECK(r.out.find("verdict: invalid") != std::string::npos);
  }
}

TEST_CASE("exit code 2: documents that do not parse") {
  for (const char* name :
       {"broken-empty.yaml", "broken-period.yaml", "broken-type.yaml"}) {
    CAPTURE(name);
    CliRun r = run(validity_of(name));
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("exit code 3: trouble before the document is even analyzed") {
  // Unreadable input file.
  CliRun missing = run(validity_of("no-such-file.yaml"));
  CHECK(missing.exit_code == 3);
  CHECK(missing.err.find("UNREADABLE_INPUT") != std::string::npos);

  // URL input with fetching disabled.
  CliOptions url;
  url.operation = "validity";
  url.file = "http://127.0.0.1:1/doc.yaml";
  CliRun denied = run(url);
  CHECK(denied.exit_code == 3);
  CHECK(denied.err.find("FETCH_DENIED") != std::string::npos);

  // URL input with fetching enabled but nothing answering.
  url.allow_fetch = true;
  CliRun dead = run(url);
  CHECK(dead.exit_code == 3);
  CHECK(dead.err.find("FETCH_FAILED") != std::string::npos);

  // Unusable command lines.
  CliOptions bad_op = validity_of("vc22-valid.yaml");
  bad_op.operation = "validate";
  CHECK(run(bad_op).exit_code == 3);

  CliOptions bad_fmt = validity_of("vc22-valid.yaml");
  bad_fmt.format = "xml";
  CHECK(run(bad_fmt).exit_code == 3);

  CliOptions no_file;
  no_file.operation = "validity";
  CHECK(run(no_file).exit_code == 3);

  // Unreadable sidecars.
  CliOptions bad_cap = validity_of("vc24-invalid.yaml");
  bad_cap.capacity_path = fixture_path("no-such-cap.yaml");
  CHECK(run(bad_cap).exit_code == 3);

  CliOptions bad_oas = validity_of("vc22-valid.yaml");
  bad_oas.oas_path = fixture_path("no-such-oas.yaml");
  CHECK(run(bad_oas).exit_code == 3);
}

TEST_CASE("the capacity sidecar flips the capacity-dependent verdict") {
  // Without a declared capacity the derived default absorbs the quota.
  CliRun bare = run(validity_of("vc24-invalid.yaml"));
  CHECK(bare.exit_code == 0);

  // Declaring 100 requests/second makes the 200/day quota over-promise.
  CliOptions with_cap = validity_of("vc24-invalid.yaml");
  with_cap.capacity_path = fixture_path("cap-100.yaml");
  CliRun capped = run(with_cap);
  CHECK(capped.exit_code == 1);
  CHECK(capped.out.find("conflict VC2_4") != std::string::npos);

  // The aggregated sibling rate keeps the same capacity within bounds.
  CliOptions agg = validity_of("vc24-aggregated-valid.yaml");
  agg.capacity_path = fixture_path("cap-100.yaml");
  CHECK(run(agg).exit_code == 0);
}

TEST_CASE("an --oas override replaces the document's api reference") {
  CliOptions o = validity_of("vc22-valid.yaml");
  o.oas_path = fixture_path("listing-oas.yaml");
  CliRun r = run(o);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("verdict: valid") != std::string::npos);
}

TEST_CASE("json and text render the same analysis with the same exit code") {
  for (const char* name : {"vc22-valid.yaml", "vc22-invalid.yaml",
                           "vc42-invalid.yaml", "broken-period.yaml"}) {
    CAPTURE(name);
    CliOptions text_opts = validity_of(name);
    CliOptions json_opts = validity_of(name);
    json_opts.format = "json";
    CliRun as_text = run(text_opts);
    CliRun as_json = run(json_opts);
    CHECK(as_text.exit_code == as_json.exit_code);

    Json body = Json::parse(as_json.out);
    REQUIRE(body.contains("diagnostics"));
    if (as_json.exit_code < 2) {
      REQUIRE(body.contains("report"));
      CHECK(body["report"]["verdict"] ==
            (as_json.exit_code == 0 ? "valid" : "invalid"));
    } else {
      CHECK_FALSE(body.contains("report"));
    }
  }
}

TEST_CASE("json conflict entries carry criterion, subjects and explanation") {
  CliOptions o = validity_of("vc22-invalid.yaml");
  o.format = "json";
  CliRun r = run(o);
  REQUIRE(r.exit_code == 1);
  Json body = Json::parse(r.out);
  REQUIRE(body["report"]["conflicts"].size() == 1);
  const Json& c = body["report"]["conflicts"][0];
  CHECK(c["criterion"] == "VC2_2");
  REQUIRE(c["subjects"].is_array());
  CHECK(c["subjects"].size() == 2);
  CHECK(c["explanation"].is_object());
  // Capacities used for the analysis are reported alongside.
  REQUIRE(body["report"].contains("capacities"));
  CHECK(body["report"]["capacities"][0]["capacity"]["provenance"] ==
        "derived-default");
}

TEST_CASE("the syntax operation stops after parsing") {
  CliOptions ok;
  ok.operation = "syntax";
  ok.file = fixture_path("vc22-invalid.yaml");  // conflicts, but parses fine
  CliRun r = run(ok);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("syntax: valid") != std::string::npos);

  CliOptions bad;
  bad.operation = "syntax";
  bad.file = fixture_path("broken-period.yaml");
  CliRun b = run(bad);
  CHECK(b.exit_code == 2);
  CHECK(b.out.find("NONPOSITIVE_PERIOD") != std::string::npos);

  bad.format = "json";
  CliRun bj = run(bad);
  CHECK(bj.exit_code == 2);
  Json body = Json::parse(bj.out);
  CHECK(body["valid"] == false);
  CHECK_FALSE(body["diagnostics"].empty());
}

TEST_CASE("argv parsing feeds run_cli and handles help and mistakes") {
  auto main_with = [](std::vector<const char*> argv) {
    std::ostringstream out, err;
    int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return CliRun{code, out.str(), err.str()};
  };

  std::string file = fixture_path("vc22-invalid.yaml");
  CliRun analyzed = main_with(
      {"sla4oai-analyzer", "-o", "validity", "-f", file.c_str()});
  CHECK(analyzed.exit_code == 1);

  std::string cap = fixture_path("cap-100.yaml");
  std::string quota = fixture_path("vc24-invalid.yaml");
  CliRun long_form = main_with({"sla4oai-analyzer", "--operation", "validity",
                                "--file", quota.c_str(), "--capacity",
                                cap.c_str(), "--format", "json"});
  CHECK(long_form.exit_code == 1);
  CHECK(Json::parse(long_form.out)["report"]["verdict"] == "invalid");

  CliRun help = main_with({"sla4oai-analyzer", "--help"});
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("--operation") != std::string::npos);
  CHECK(help.out.find("--capacity") != std::string::npos);

  CliRun unknown = main_with({"sla4oai-analyzer", "--frobnicate"});
  CHECK(unknown.exit_code == 3);
  CHECK_FALSE(unknown.err.empty());
}

TEST_CASE("diagnostics render one line each in text mode") {
  CliOptions o = validity_of("broken-type.yaml");
  CliRun r = run(o);
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("error[UNSUPPORTED_THRESHOLD_TYPE]") != std::string::npos);
}
