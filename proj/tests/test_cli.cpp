#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <regex>
#include <string>

#include "pcbf/pcbf.hpp"
#include "support.hpp"

using namespace pcbf;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string cli() { return PCBF_CLI_PATH; }

std::string q(const std::string& path) { return "\"" + path + "\""; }

long count_occurrences(const std::string& haystack, const std::string& needle) {
    long n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

std::string extract_sha(const std::string& output) {
    std::smatch m;
    if (std::regex_search(output, m, std::regex("[0-9a-f]{64}"))) return m.str();
    return "";
}

std::string write_run_config(testing::TempDir& dir, const std::string& out_dir) {
    RunConfig c;
    c.env.spawn_position = {-4.0, 0.0};
    c.env.goal_position = {4.0, 0.0};
    c.env.max_steps = 200;
    c.env.scene.type = SceneType::open;
    c.policy.kind = "scripted";
    c.num_envs = 2;
    c.episodes = 3;
    c.seed = 5;
    c.output_dir = out_dir;
    const std::string path = dir.file("run_config.json");
    testing::spew(path, canonical_json(run_config_to_json(c)));
    return path;
}

PreRegistration reference_plan() {
    PreRegistration p;
    p.name = "reference-campaign";
    p.created_at = "2026-08-14T00:00:00Z";
    p.criteria = {{"success_rate", Comparator::ge, 0.85},
                  {"collision_rate", Comparator::le, 0.01}};
    p.attempt_distribution = {{SceneType::open, 0.18},
                              {SceneType::single_static, 0.36},
                              {SceneType::multi_obstacle, 0.26},
                              {SceneType::dynamic_obstacle, 0.20}};
    p.predicted_yields = {{SceneType::open, 1.0},
                          {SceneType::single_static, 0.725},
                          {SceneType::multi_obstacle, 0.40},
                          {SceneType::dynamic_obstacle, 0.31}};
    p.notes = "reference plan";
    return p;
}

// Commits a plan and returns the artifact path.
std::string commit_plan(testing::TempDir& dir, const PreRegistration& p,
                        const std::string& name = "prereg.json") {
    const std::string spec = dir.file("spec_" + name);
    testing::spew(spec, canonical_json(p.to_json()));
    const std::string artifact = dir.file(name);
    const auto r = testing::run_command(cli() + " prereg commit --spec " + q(spec) + " --out " +
                                        q(artifact));
    REQUIRE(r.exit_code == 0);
    return artifact;
}

void flip_byte(const std::string& path, std::size_t index) {
    std::string bytes = testing::slurp(path);
    REQUIRE(index < bytes.size());
    bytes[index] ^= 0x01;
    testing::spew(path, bytes);
}

Dataset small_clean_dataset() {
    Dataset ds;
    ds.header.v_max = 5.0;
    ds.header.chunk_length = 4;
    int len = 8;
    for (const SceneType t : {SceneType::open, SceneType::single_static}) {
        for (int k = 0; k < 3; ++k) {
            RolloutRecord r;
            r.scene_type = t;
            r.seed = static_cast<std::uint64_t>(len);
            r.length = len;
            r.termination_reason = TerminationReason::success;
            for (int i = 0; i < len; ++i) {
                StepLog s;
                s.observation = {static_cast<double>(i)};
                s.nominal_action = {1.0, -1.0};
                s.safe_action = {1.0, -1.0};
                s.h_hard = 1.0;
                s.h_soft = 0.5;
                r.steps.push_back(std::move(s));
            }
            ds.episodes.push_back(std::move(r));
            ++len;
        }
        len = 8;
    }
    return ds;
}

std::string write_audit_schema(testing::TempDir& dir) {
    const json schema{{"target_distribution",
                       json{{"open", 0.5}, {"single_static", 0.5}}},
                      {"tolerance", 0.2}};
    const std::string path = dir.file("schema.json");
    testing::spew(path, canonical_json(schema));
    return path;
}

}  // namespace

TEST_CASE("rollout command reports terminations and writes a summary") {
    testing::TempDir dir("cli_rollout");
    const std::string out_dir = dir.file("out");
    const std::string cfg = write_run_config(dir, out_dir);

    const auto r = testing::run_command(cli() + " rollout --config " + q(cfg));
    INFO(r.output);
    CHECK(r.exit_code == 0);
    CHECK_THAT(r.output, ContainsSubstring("episodes: 3"));
    CHECK_THAT(r.output, ContainsSubstring("filter: on"));
    CHECK_THAT(r.output, ContainsSubstring("success"));

    const std::string summary_path = out_dir + "/termination_breakdown.json";
    REQUIRE(std::filesystem::exists(summary_path));
    const json summary = json::parse(testing::slurp(summary_path));
    CHECK(summary.at("episodes") == 3);
    CHECK(summary.at("filter") == true);
    CHECK(summary.at("breakdown").at("success").at("count") == 3);
}

TEST_CASE("rollout honors the filter bypass flag") {
    testing::TempDir dir("cli_nofilter");
    const std::string cfg = write_run_config(dir, dir.file("out"));
    const auto r = testing::run_command(cli() + " rollout --config " + q(cfg) + " --no-filter");
    INFO(r.output);
    CHECK(r.exit_code == 0);
    CHECK_THAT(r.output, ContainsSubstring("filter: off"));
}

TEST_CASE("rollout distinguishes config errors from runtime failures") {
    testing::TempDir dir("cli_badcfg");

    SECTION("missing required key") {
        json j = run_config_to_json(RunConfig{});
        j.erase("barrier");
        const std::string path = dir.file("missing_key.json");
        testing::spew(path, canonical_json(j));
        const auto r = testing::run_command(cli() + " rollout --config " + q(path));
        CHECK(r.exit_code == 2);
        CHECK_THAT(r.output, ContainsSubstring("config error"));
    }

    SECTION("filter bound must match the env bound") {
        RunConfig c;
        c.barrier.v_max = 4.0;
        const std::string path = dir.file("mismatch.json");
        testing::spew(path, canonical_json(run_config_to_json(c)));
        const auto r = testing::run_command(cli() + " rollout --config " + q(path));
        CHECK(r.exit_code == 2);
        CHECK_THAT(r.output, ContainsSubstring("config error"));
    }

    SECTION("absent config file") {
        const auto r =
            testing::run_command(cli() + " rollout --config " + q(dir.file("nope.json")));
        CHECK(r.exit_code == 3);
        CHECK_THAT(r.output, ContainsSubstring("error"));
    }
}

TEST_CASE("top-level argument errors exit with the config code") {
    const auto none = testing::run_command(cli());
    CHECK(none.exit_code == 2);

    const auto bogus = testing::run_command(cli() + " frobnicate");
    CHECK(bogus.exit_code == 2);

    const auto help = testing::run_command(cli() + " --help");
    CHECK(help.exit_code == 0);
    CHECK_THAT(help.output, ContainsSubstring("rollout"));
    CHECK_THAT(help.output, ContainsSubstring("campaign"));
}

TEST_CASE("prereg commit is deterministic and leaves a manifest") {
    testing::TempDir dir("cli_commit");
    const std::string spec = dir.file("spec.json");
    testing::spew(spec, canonical_json(reference_plan().to_json()));

    const auto r1 = testing::run_command(cli() + " prereg commit --spec " + q(spec) + " --out " +
                                         q(dir.file("a.json")));
    const auto r2 = testing::run_command(cli() + " prereg commit --spec " + q(spec) + " --out " +
                                         q(dir.file("b.json")));
    INFO(r1.output);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);

    const std::string sha1 = extract_sha(r1.output);
    const std::string sha2 = extract_sha(r2.output);
    CHECK(sha1.size() == 64);
    CHECK(sha1 == sha2);
    CHECK(std::filesystem::exists(dir.file("a.json.manifest.json")));
}

TEST_CASE("prereg eval verifies the commitment and scores each criterion") {
    testing::TempDir dir("cli_eval");
    const std::string artifact = commit_plan(dir, reference_plan());

    SECTION("all criteria pass") {
        testing::spew(dir.file("metrics.json"),
                      R"({"success_rate":0.9,"collision_rate":0.005})");
        const auto r = testing::run_command(cli() + " prereg eval --artifact " + q(artifact) +
                                            " --metrics " + q(dir.file("metrics.json")));
        INFO(r.output);
        CHECK(r.exit_code == 0);
        CHECK_THAT(r.output, ContainsSubstring("verified"));
        CHECK_THAT(r.output, ContainsSubstring("overall: pass"));
        CHECK(count_occurrences(r.output, "[pass]") == 2);
    }

    SECTION("a failing criterion fails the run") {
        testing::spew(dir.file("metrics.json"),
                      R"({"success_rate":0.5,"collision_rate":0.5})");
        const auto r = testing::run_command(cli() + " prereg eval --artifact " + q(artifact) +
                                            " --metrics " + q(dir.file("metrics.json")));
        CHECK(r.exit_code == 1);
        CHECK_THAT(r.output, ContainsSubstring("overall: fail"));
    }

    SECTION("a missing metric is reported, not silently passed") {
        testing::spew(dir.file("metrics.json"), R"({"success_rate":0.9})");
        const auto r = testing::run_command(cli() + " prereg eval --artifact " + q(artifact) +
                                            " --metrics " + q(dir.file("metrics.json")));
        CHECK(r.exit_code == 1);
        CHECK_THAT(r.output, ContainsSubstring("[not_evaluated]"));
        CHECK_THAT(r.output, ContainsSubstring("metric missing"));
    }

    SECTION("an edited artifact is tamper") {
        flip_byte(artifact, 25);
        testing::spew(dir.file("metrics.json"), R"({"success_rate":0.9})");
        const auto r = testing::run_command(cli() + " prereg eval --artifact " + q(artifact) +
                                            " --metrics " + q(dir.file("metrics.json")));
        CHECK(r.exit_code == 4);
        CHECK_THAT(r.output, ContainsSubstring("tamper"));
    }
}

TEST_CASE("audit command checks a dataset against a schema") {
    testing::TempDir dir("cli_audit");
    const std::string schema = write_audit_schema(dir);

    SECTION("clean dataset passes every check") {
        Dataset ds = small_clean_dataset();
        DatasetWriter writer(ds.header);
        for (const RolloutRecord& r : ds.episodes) writer.add(r);
        writer.write(dir.file("clean.jsonl"));

        const auto r = testing::run_command(cli() + " audit --dataset " + q(dir.file("clean.jsonl")) +
                                            " --schema " + q(schema));
        INFO(r.output);
        CHECK(r.exit_code == 0);
        CHECK(count_occurrences(r.output, "[pass]") == 4);
        CHECK_THAT(r.output, ContainsSubstring("overall: pass"));
        CHECK_THAT(r.output, ContainsSubstring("dataset sha256"));
    }

    SECTION("an out-of-range action fails the sanity check") {
        Dataset ds = small_clean_dataset();
        ds.episodes[2].steps[1].safe_action = {7.5, 0.0};
        DatasetWriter writer(ds.header);
        for (const RolloutRecord& r : ds.episodes) writer.add(r);
        writer.write(dir.file("hot.jsonl"));

        const auto r = testing::run_command(cli() + " audit --dataset " + q(dir.file("hot.jsonl")) +
                                            " --schema " + q(schema));
        INFO(r.output);
        CHECK(r.exit_code == 1);
        CHECK_THAT(r.output, ContainsSubstring("[fail] action_sanity"));
        CHECK_THAT(r.output, ContainsSubstring("overall: fail"));
    }

    SECTION("a syntactically broken dataset is a usage error") {
        testing::spew(dir.file("broken.jsonl"), "{\n");
        const auto r = testing::run_command(cli() + " audit --dataset " +
                                            q(dir.file("broken.jsonl")) + " --schema " + q(schema));
        CHECK(r.exit_code == 2);
        CHECK_THAT(r.output, ContainsSubstring("malformed dataset"));
    }

    SECTION("unknown schema keys are rejected") {
        testing::spew(dir.file("schema_extra.json"),
                      R"({"target_distribution":{"open":1.0},"mystery":1})");
        Dataset ds = small_clean_dataset();
        DatasetWriter writer(ds.header);
        for (const RolloutRecord& r : ds.episodes) writer.add(r);
        writer.write(dir.file("d.jsonl"));
        const auto r = testing::run_command(cli() + " audit --dataset " + q(dir.file("d.jsonl")) +
                                            " --schema " + q(dir.file("schema_extra.json")));
        CHECK(r.exit_code == 2);
        CHECK_THAT(r.output, ContainsSubstring("config error"));
    }
}

TEST_CASE("campaign replay reproduces the reference yield table") {
    testing::TempDir dir("cli_replay");
    const std::string artifact = commit_plan(dir, reference_plan());

    const json counts{
        {"open", json{{"attempts", 9000}, {"accepted", 8971}}},
        {"single_static", json{{"attempts", 18000}, {"accepted", 13240}}},
        {"multi_obstacle", json{{"attempts", 13000}, {"accepted", 5796}}},
        {"dynamic_obstacle", json{{"attempts", 10000}, {"accepted", 3408}}}};
    testing::spew(dir.file("counts.json"), canonical_json(counts));

    SECTION("analysis text and artifacts") {
        const std::string out_dir = dir.file("out");
        const auto r = testing::run_command(cli() + " campaign --prereg " + q(artifact) +
                                            " --replay-counts " + q(dir.file("counts.json")) +
                                            " --out " + q(out_dir));
        INFO(r.output);
        CHECK(r.exit_code == 0);
        CHECK_THAT(r.output, ContainsSubstring("commitment"));
        CHECK_THAT(r.output, ContainsSubstring("verified"));
        CHECK_THAT(r.output, ContainsSubstring("62.83"));
        CHECK_THAT(r.output, ContainsSubstring("60.70"));
        CHECK_THAT(r.output, ContainsSubstring("+4.58"));
        CHECK_THAT(r.output, ContainsSubstring("10.7"));
        CHECK_THAT(r.output, ContainsSubstring("---"));

        REQUIRE(std::filesystem::exists(out_dir + "/yield.json"));
        const json y = json::parse(testing::slurp(out_dir + "/yield.json"));
        CHECK(y.at("buckets")[0].at("scene_type") == "open");
        CHECK(y.at("aggregate").at("attempts") == 50000);
    }

    SECTION("a tampered commitment aborts before analysis") {
        flip_byte(artifact, 30);
        const auto r = testing::run_command(cli() + " campaign --prereg " + q(artifact) +
                                            " --replay-counts " + q(dir.file("counts.json")));
        CHECK(r.exit_code == 4);
        CHECK_THAT(r.output, ContainsSubstring("tamper"));
    }

    SECTION("counts must cover exactly the committed scenes") {
        const json partial{{"open", json{{"attempts", 9000}, {"accepted", 8971}}}};
        testing::spew(dir.file("partial.json"), canonical_json(partial));
        const auto r = testing::run_command(cli() + " campaign --prereg " + q(artifact) +
                                            " --replay-counts " + q(dir.file("partial.json")));
        CHECK(r.exit_code == 2);
        CHECK_THAT(r.output, ContainsSubstring("config error"));
    }
}

TEST_CASE("campaign command runs a live desk-scale campaign") {
    testing::TempDir dir("cli_campaign");
    PreRegistration p;
    p.name = "cli-live";
    p.created_at = "2026-08-14T00:00:00Z";
    p.criteria = {{"aggregate_yield", Comparator::ge, 0.05},
                  {"hard_violation_count", Comparator::le, 0.0}};
    p.attempt_distribution = {{SceneType::open, 0.5}, {SceneType::single_static, 0.5}};
    p.predicted_yields = {{SceneType::open, 1.0}, {SceneType::single_static, 0.7}};
    p.notes = "desk scale";
    const std::string artifact = commit_plan(dir, p);

    const std::string out_dir = dir.file("out");
    const auto r = testing::run_command(cli() + " campaign --prereg " + q(artifact) +
                                        " --total 8 --seed 3 --out " + q(out_dir));
    INFO(r.output);
    // The audit may legitimately flag a tiny dataset; either verdict is a
    // well-formed run.
    CHECK((r.exit_code == 0 || r.exit_code == 1));
    CHECK_THAT(r.output, ContainsSubstring("verified"));
    CHECK_THAT(r.output, ContainsSubstring("dataset sha256"));
    CHECK_THAT(r.output, ContainsSubstring("overall:"));
    for (const char* name :
         {"dataset.jsonl", "audit.json", "evaluation.json", "yield.json", "campaign_manifest.json"}) {
        CHECK(std::filesystem::exists(out_dir + "/" + std::string(name)));
    }
}

TEST_CASE("halt demo halts the pipeline and verifies its own evidence") {
    testing::TempDir dir("cli_halt");
    const std::string out_dir = dir.file("demo");
    const auto r = testing::run_command(cli() + " halt-demo --out " + q(out_dir));
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    CHECK(count_occurrences(r.output, "[PASS]") == 3);
    CHECK(count_occurrences(r.output, "[FAIL]") == 0);
    CHECK_THAT(r.output, ContainsSubstring("halt at step 4"));
    CHECK_THAT(r.output, ContainsSubstring("observed 0.84"));

    CHECK(std::filesystem::exists(out_dir + "/prereg.json"));
    CHECK(std::filesystem::exists(out_dir + "/prereg.json.manifest.json"));
    CHECK(std::filesystem::exists(out_dir + "/halt_event.json"));
    CHECK_FALSE(std::filesystem::exists(out_dir + "/downstream.marker"));

    bool forensics_found = false;
    for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("forensics_", 0) == 0 && name.find(".json") != std::string::npos) {
            forensics_found = true;
            const json f = json::parse(testing::slurp(entry.path().string()));
            CHECK(f.at("entries").size() == 4);
            CHECK(f.at("trigger").at("watchdog_name") == "success_rate");
        }
    }
    CHECK(forensics_found);
}
