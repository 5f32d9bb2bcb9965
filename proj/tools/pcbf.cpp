// Command-line front end: rollouts, pre-registration commit/eval, yield
// campaigns, dataset audits, and the watchdog halt demonstration.
//
// Exit codes: 0 ok, 1 evaluation or audit failed, 2 invalid config or input,
// 3 runtime failure, 4 commitment tamper detected, 5 halt demo property
// violated.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pcbf/pcbf.hpp"

namespace {

using namespace pcbf;

struct RolloutArgs {
    std::string config_path;
    bool no_filter = false;
};

int cmd_rollout(const RolloutArgs& args) {
    const RunConfig cfg = load_run_config(args.config_path);

    AvoidanceVecEnv vec(cfg.env, cfg.num_envs);
    std::map<TerminationReason, long> breakdown;
    long violations = 0;
    long modified_steps = 0;
    long total_steps = 0;
    double min_h_hard = std::numeric_limits<double>::infinity();

    for (int e = 0; e < cfg.episodes; ++e) {
        AvoidanceEnv& env = vec.env(e % cfg.num_envs);
        const std::uint64_t env_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(e), 0);
        const std::uint64_t policy_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(e), 1);
        std::unique_ptr<Algorithm> policy;
        if (cfg.policy.kind == "random") {
            policy = std::make_unique<RandomPolicy>(cfg.env.v_max, policy_seed);
        } else {
            policy = std::make_unique<ScriptedTeacher>(cfg.env.v_max, cfg.policy.k_p);
        }
        const RolloutRecord rec = run_episode(env, *policy, env_seed, cfg.barrier, !args.no_filter);
        ++breakdown[rec.termination_reason];
        violations += env.hard_constraint_violations().count;
        min_h_hard = std::min(min_h_hard, env.safety_metrics().at("min_h_hard"));
        total_steps += rec.length;
        for (const StepLog& s : rec.steps) modified_steps += s.modified ? 1 : 0;
    }

    std::printf("episodes: %d  filter: %s\n", cfg.episodes, args.no_filter ? "off" : "on");
    std::printf("%-14s%8s%10s\n", "termination", "count", "percent");
    json breakdown_j;
    for (TerminationReason r : kAllTerminationReasons) {
        const long n = breakdown.count(r) ? breakdown[r] : 0;
        const double pct = 100.0 * static_cast<double>(n) / static_cast<double>(cfg.episodes);
        std::printf("%-14s%8ld%9.2f%%\n", termination_reason_name(r), n, pct);
        breakdown_j[termination_reason_name(r)] = json{{"count", n}, {"percent", pct}};
    }
    std::printf("hard violations: %ld   min h_hard: %.6f   modified steps: %ld/%ld\n", violations,
                min_h_hard, modified_steps, total_steps);

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        const json summary{{"episodes", cfg.episodes},
                           {"filter", !args.no_filter},
                           {"breakdown", breakdown_j},
                           {"hard_violations", violations},
                           {"min_h_hard", min_h_hard},
                           {"modified_steps", modified_steps},
                           {"total_steps", total_steps}};
        atomic_write(cfg.output_dir + "/termination_breakdown.json", canonical_json(summary));
    }
    return 0;
}

int cmd_prereg_commit(const std::string& spec_path, const std::string& out_path) {
    const PreRegistration p = PreRegistration::from_json(parse_json_file(spec_path));
    const Commitment c = commit_to_artifact(p, out_path);
    std::printf("committed %s -> %s\n", c.sha256.c_str(), out_path.c_str());
    return 0;
}

int cmd_prereg_eval(const std::string& artifact_path, const std::string& metrics_path) {
    const std::string sha = verify_commitment(artifact_path);
    const PreRegistration p = load_artifact(artifact_path);

    const json mj = parse_json_file(metrics_path);
    if (!mj.is_object()) throw InvalidConfig("metrics: expected a JSON object");
    std::map<std::string, double> metrics;
    for (const auto& [key, val] : mj.items()) {
        if (!val.is_number()) throw InvalidConfig("metrics: \"" + key + "\" must be a number");
        metrics[key] = val.get<double>();
    }

    const EvaluationReport rep = evaluate(p, metrics);
    std::printf("commitment %s verified\n", sha.c_str());
    for (const CriterionResult& r : rep.results) {
        if (r.observed) {
            std::printf("[%s] %s %s %g (observed %g)\n", criterion_status_name(r.status),
                        r.criterion.metric.c_str(), comparator_name(r.criterion.comparator),
                        r.criterion.threshold, *r.observed);
        } else {
            std::printf("[%s] %s %s %g (metric missing)\n", criterion_status_name(r.status),
                        r.criterion.metric.c_str(), comparator_name(r.criterion.comparator),
                        r.criterion.threshold);
        }
    }
    std::printf("overall: %s\n", rep.overall_pass ? "pass" : "fail");
    return rep.overall_pass ? 0 : 1;
}

struct CampaignArgs {
    std::string prereg_path;
    long total = 200;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string policy = "scripted";
    int chunk_length = kDefaultChunkLength;
    std::string replay_counts;
};

std::map<SceneType, BucketStats> load_replay_counts(const std::string& path) {
    const json j = parse_json_file(path);
    if (!j.is_object()) throw InvalidConfig("replay counts: expected a JSON object");
    std::map<SceneType, BucketStats> stats;
    for (const auto& [key, val] : j.items()) {
        require_keys(val, "replay counts", {"attempts", "accepted"});
        BucketStats b;
        b.attempts = get_integer(val, "replay counts", "attempts");
        b.accepted = get_integer(val, "replay counts", "accepted");
        stats[parse_scene_type(key)] = b;
    }
    return stats;
}

int cmd_campaign(const CampaignArgs& args) {
    const std::string sha = verify_commitment(args.prereg_path);
    const PreRegistration p = load_artifact(args.prereg_path);
    const Commitment commitment{sha, args.prereg_path};
    std::printf("commitment %s verified\n", sha.c_str());

    if (!args.replay_counts.empty()) {
        // Yield analysis of previously recorded counts; no simulation.
        const std::map<SceneType, BucketStats> stats = load_replay_counts(args.replay_counts);
        const YieldAnalysis analysis = YieldAnalysis::build(stats, p.predicted_yields);
        std::fputs(analysis.text().c_str(), stdout);
        if (!args.out_dir.empty()) {
            std::filesystem::create_directories(args.out_dir);
            atomic_write(args.out_dir + "/yield.json", canonical_json(analysis.to_json()));
            atomic_write(args.out_dir + "/yield.txt", analysis.text());
        }
        return 0;
    }

    CampaignOptions opts;
    opts.total_attempts = args.total;
    opts.seed = args.seed;
    opts.chunk_length = args.chunk_length;
    opts.policy_kind = args.policy;
    opts.output_dir = args.out_dir;
    const CampaignResult result = run_campaign(p, commitment, opts);

    std::fputs(result.analysis.text().c_str(), stdout);
    for (const AuditCheck& c : result.audit.checks) {
        std::printf("[%s] audit %s: %s\n", c.passed ? "pass" : "fail", c.name.c_str(),
                    c.detail.c_str());
    }
    for (const CriterionResult& r : result.evaluation.results) {
        std::printf("[%s] criterion %s\n", criterion_status_name(r.status), r.criterion.metric.c_str());
    }
    std::printf("dataset sha256 %s\n", result.audit.dataset_sha256.c_str());
    std::printf("overall: %s\n", result.overall_pass ? "pass" : "fail");
    return result.overall_pass ? 0 : 1;
}

int cmd_audit(const std::string& dataset_path, const std::string& schema_path) {
    const json j = parse_json_file(schema_path);
    require_keys(j, "audit schema", {"target_distribution"},
                 {"tolerance", "mad_multiplier", "max_outlier_fraction"});
    AuditSpec spec;
    const json& dist = j.at("target_distribution");
    if (!dist.is_object()) throw InvalidConfig("audit schema: target_distribution must be an object");
    for (const auto& [key, val] : dist.items()) {
        if (!val.is_number()) throw InvalidConfig("audit schema: fraction must be a number");
        spec.target_distribution[parse_scene_type(key)] = val.get<double>();
    }
    if (j.contains("tolerance")) spec.tolerance = get_number(j, "audit schema", "tolerance");
    if (j.contains("mad_multiplier")) {
        spec.mad_multiplier = get_number(j, "audit schema", "mad_multiplier");
    }
    if (j.contains("max_outlier_fraction")) {
        spec.max_outlier_fraction = get_number(j, "audit schema", "max_outlier_fraction");
    }
    spec.validate();

    const AuditReport rep = audit_dataset_file(dataset_path, spec);
    std::printf("dataset sha256 %s\n", rep.dataset_sha256.c_str());
    for (const AuditCheck& c : rep.checks) {
        std::printf("[%s] %s: %s\n", c.passed ? "pass" : "fail", c.name.c_str(), c.detail.c_str());
    }
    std::printf("overall: %s\n", rep.passed ? "pass" : "fail");
    return rep.passed ? 0 : 1;
}

// Scripted end-to-end demonstration that a committed criterion, violated
// mid-run, halts the pipeline before any downstream artifact is produced.
// The command then verifies its own evidence trail and fails loudly (exit 5)
// if any property does not hold.
int cmd_halt_demo(const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string marker_path = out_dir + "/downstream.marker";
    std::filesystem::remove(marker_path);

    PreRegistration p;
    p.name = "halt-demo";
    p.created_at = utc_timestamp_extended();
    p.criteria.push_back({"success_rate", Comparator::ge, 0.85});
    p.notes = "scripted decline to exercise the halt path";
    const std::string artifact = out_dir + "/prereg.json";
    const Commitment commitment = commit_to_artifact(p, artifact);
    std::printf("committed %s\n", commitment.sha256.c_str());

    WatchdogRegistry registry = watchdogs_from_preregistration(p, commitment);
    ForensicsBuffer forensics(256);

    const double planned[] = {0.90, 0.87, 0.86, 0.84, 0.83, 0.82};
    std::optional<WatchdogEvent> halt;
    std::uint64_t halted_at = 0;
    for (std::uint64_t step = 1; step <= std::size(planned); ++step) {
        const std::map<std::string, double> metrics{{"success_rate", planned[step - 1]}};
        forensics.record(step, metrics);
        registry.update(metrics, step);
        if (registry.should_halt()) {
            halt = registry.should_halt();
            halted_at = step;
            std::printf("halt at step %llu: %s %s %g observed %g\n",
                        static_cast<unsigned long long>(step), halt->metric.c_str(),
                        comparator_name(halt->comparator), halt->threshold, halt->observed);
            break;
        }
    }

    std::string forensics_path;
    if (halt) {
        atomic_write(out_dir + "/halt_event.json", canonical_json(halt->to_json()));
        forensics_path = forensics.dump(out_dir, halt);
        std::printf("forensics dumped to %s\n", forensics_path.c_str());
    } else {
        // Unreachable when the halt machinery works; produce the downstream
        // artifact exactly as an unguarded pipeline would.
        atomic_write(marker_path, "{}");
    }

    int failures = 0;
    const auto check = [&](bool ok, const char* what) {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what);
        if (!ok) ++failures;
    };

    bool halt_ok = halt.has_value() && halted_at == 4 && halt->observed == 0.84 &&
                   halt->commitment_sha256 == commitment.sha256 &&
                   halt->metric == "success_rate";
    if (halt_ok) {
        const json ev = parse_json_file(out_dir + "/halt_event.json");
        halt_ok = ev.at("step").get<std::uint64_t>() == 4 &&
                  ev.at("commitment_sha256").get<std::string>() == commitment.sha256 &&
                  ev.at("is_halt").get<bool>();
    }
    check(halt_ok, "halt event fired at the first violating step and cites the commitment");

    bool forensics_ok = false;
    if (!forensics_path.empty() && std::filesystem::exists(forensics_path)) {
        const json f = parse_json_file(forensics_path);
        const auto& entries = f.at("entries");
        forensics_ok = entries.is_array() && entries.size() == 4 && f.contains("trigger") &&
                       f.at("trigger").at("watchdog_name").get<std::string>() == "success_rate" &&
                       entries.back().at("step").get<std::uint64_t>() == 4 &&
                       entries.back().at("metrics").at("success_rate").get<double>() == 0.84;
    }
    check(forensics_ok, "forensics capture covers every step up to and including the halt");

    check(!std::filesystem::exists(marker_path),
          "no downstream artifact was produced after the halt");

    return failures == 0 ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"safe-rl avoidance pipeline tools"};
    app.require_subcommand(1);

    RolloutArgs rollout_args;
    CLI::App* rollout = app.add_subcommand("rollout", "run batched filtered episodes");
    rollout->add_option("--config", rollout_args.config_path, "run config JSON")->required();
    rollout->add_flag("--no-filter", rollout_args.no_filter, "bypass the safety filter");

    CLI::App* prereg = app.add_subcommand("prereg", "pre-registration commitments");
    prereg->require_subcommand(1);
    std::string spec_path, artifact_path, metrics_path;
    CLI::App* commit = prereg->add_subcommand("commit", "commit a plan to a hashed artifact");
    commit->add_option("--spec", spec_path, "plan JSON")->required();
    commit->add_option("--out", artifact_path, "artifact path")->required();
    CLI::App* eval_cmd = prereg->add_subcommand("eval", "evaluate metrics against a commitment");
    eval_cmd->add_option("--artifact", artifact_path, "committed artifact")->required();
    eval_cmd->add_option("--metrics", metrics_path, "metrics JSON")->required();

    CampaignArgs campaign_args;
    CLI::App* campaign = app.add_subcommand("campaign", "run a committed yield campaign");
    campaign->add_option("--prereg", campaign_args.prereg_path, "committed artifact")->required();
    campaign->add_option("--total", campaign_args.total, "total attempts");
    campaign->add_option("--seed", campaign_args.seed, "campaign seed");
    campaign->add_option("--out", campaign_args.out_dir, "output directory");
    campaign->add_option("--policy", campaign_args.policy, "policy kind");
    campaign->add_option("--chunk-length", campaign_args.chunk_length, "dataset chunk length");
    campaign->add_option("--replay-counts", campaign_args.replay_counts,
                         "bucket counts JSON; analyze instead of simulating");

    std::string dataset_path, schema_path;
    CLI::App* audit = app.add_subcommand("audit", "audit an episode dataset");
    audit->add_option("--dataset", dataset_path, "dataset JSONL")->required();
    audit->add_option("--schema", schema_path, "audit schema JSON")->required();

    std::string halt_out;
    CLI::App* halt = app.add_subcommand("halt-demo", "demonstrate a watchdog pipeline halt");
    halt->add_option("--out", halt_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (rollout->parsed()) return cmd_rollout(rollout_args);
        if (commit->parsed()) return cmd_prereg_commit(spec_path, artifact_path);
        if (eval_cmd->parsed()) return cmd_prereg_eval(artifact_path, metrics_path);
        if (campaign->parsed()) return cmd_campaign(campaign_args);
        if (audit->parsed()) return cmd_audit(dataset_path, schema_path);
        if (halt->parsed()) return cmd_halt_demo(halt_out);
    } catch (const CorruptArtifact& e) {
        std::cerr << "tamper: " << e.what() << "\n";
        return 4;
    } catch (const InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidDistribution& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const KeyMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const MalformedDataset& e) {
        std::cerr << "malformed dataset: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
