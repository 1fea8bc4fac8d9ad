#include "finsim/dump.hpp"
#include "finsim/errors.hpp"
#include "finsim/params.hpp"
#include "finsim/rng.hpp"
#include "finsim/scenario.hpp"
#include "finsim/sim.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace finsim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

// "25" or "25..30", inclusive.
std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text) {
    const std::size_t dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const std::uint64_t c = std::stoull(text);
            return {c, c};
        }
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw ConfigError("--C range is reversed: " + text);
        return {lo, hi};
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad --C range \"" + text + "\" (want N or N..M)");
    }
}

std::string sci(double v) {
    std::ostringstream out;
    out << std::scientific << std::setprecision(3) << v;
    return out.str();
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir) {
    const Scenario scenario = load_scenario(scenario_path);
    const RunResult result = run(scenario);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    spit(dir / "metrics.csv", result.metrics.to_csv());
    spit(dir / "summary.json", result.metrics.summary_json(scenario.name, scenario.seed));
    spit(dir / "ledger.tsv", ledger_dump(result.ledger));
    spit(dir / "calldata.tsv", calldata_dump(result.ledger, result.store, result.end_tick));
    for (const Checkpoint& cp : result.checkpoints.all()) {
        if (!cp.finalized_at) continue;
        spit(dir / ("checkpoint_" + std::to_string(cp.checkpoint_id) + ".ckpt"),
             export_checkpoint(cp));
    }

    const Counters& c = result.metrics.counters;
    std::cout << "scenario           " << scenario.name << " (seed " << scenario.seed << ")\n"
              << "head commitment    " << result.metrics.head_commitment.hex() << "\n"
              << "transactions       " << result.metrics.txns.size() << " submitted, "
              << c.executed_txns << " executed, " << c.wft_rejections << " rejected\n"
              << "safety failures    " << c.safety_failures << "\n"
              << "slash events       " << c.slash_events << "\n"
              << "order violations   " << c.order_finality_violations << "\n"
              << "stall ticks        " << c.liveness_stall_ticks << "\n"
              << "checkpoints        " << c.checkpoints_declared << " declared, "
              << c.checkpoints_finalized << " finalized\n"
              << "replication factor " << std::fixed << std::setprecision(2)
              << result.metrics.replication_factor() << "\n"
              << "outputs written to " << dir.string() << "\n";
    return 0;
}

int cmd_params(std::uint64_t T, std::uint64_t B, const std::string& c_range, double rate,
               std::uint64_t R, std::optional<double> target_years,
               const std::string& csv_path) {
    const auto [c_lo, c_hi] = parse_range(c_range);
    const Rational selection_rate(rate);

    std::ostringstream csv;
    csv << "C,W,p_all_faulty,hours,years\n";
    std::cout << std::left << std::setw(6) << "C" << std::right << std::setw(14) << "W"
              << std::setw(14) << "p_all_faulty" << std::setw(16) << "hours" << std::setw(16)
              << "years" << "\n";
    for (std::uint64_t c = c_lo; c <= c_hi; ++c) {
        CommitteeParams p{T, B, c, R, selection_rate};
        const Odds odds = all_faulty_odds(p);
        const Odds prob = all_faulty_probability(p);
        std::cout << std::left << std::setw(6) << c << std::right;
        if (odds.infinite) {
            std::cout << std::setw(14) << "inf" << std::setw(14) << "0" << std::setw(16) << "inf"
                      << std::setw(16) << "inf" << "\n";
            csv << c << ",inf,0,inf,inf\n";
            continue;
        }
        const Duration t = expected_time(odds, selection_rate);
        std::cout << std::setw(14) << sci(odds.approx()) << std::setw(14) << sci(prob.approx())
                  << std::setw(16) << sci(t.hours_approx()) << std::setw(16) << std::fixed
                  << std::setprecision(1) << t.years_approx() << "\n";
        csv << c << ',' << rational_to_decimal(odds.ratio, 4) << ','
            << sci(prob.approx()) << ',' << rational_to_decimal(t.hours, 2) << ','
            << rational_to_decimal(t.years, 2) << '\n';
    }
    if (target_years) {
        const std::uint64_t c_min =
            min_committee_size(T, B, R, selection_rate, Rational(*target_years));
        std::cout << "smallest C with expected time >= " << *target_years
                  << " years: " << c_min << "\n";
        csv << "min_committee_for_" << *target_years << "_years," << c_min << ",,,\n";
    }
    if (!csv_path.empty()) {
        spit(csv_path, csv.str());
        std::cout << "csv written to " << csv_path << "\n";
    }
    return 0;
}

int cmd_replay(const std::string& ledger_path, const std::string& checkpoint_path,
               std::string calldata_path, const std::string& scenario_path,
               const std::string& metrics_path, bool patched, const std::string& expect) {
    if (calldata_path.empty()) {
        calldata_path = (fs::path(ledger_path).parent_path() / "calldata.tsv").string();
    }
    VmSemantics semantics;
    if (!scenario_path.empty()) {
        semantics = load_scenario(scenario_path).semantics();
    }
    if (patched) {
        semantics.exploitable = false;
    }
    const Checkpoint checkpoint = import_checkpoint(slurp(checkpoint_path));

    std::optional<std::map<std::uint64_t, ExecStatus>> statuses;
    if (!metrics_path.empty()) {
        statuses = statuses_from_metrics_csv(slurp(metrics_path));
    }
    const FileReplay replay =
        replay_from_files(slurp(ledger_path), slurp(calldata_path), checkpoint, semantics,
                          statuses ? &*statuses : nullptr);

    std::cout << "checkpoint      " << checkpoint.checkpoint_id << " at position "
              << checkpoint.named_position << "\n"
              << "replayed txns   " << replay.result.replayed_txns << "\n";
    if (statuses) {
        std::cout << "flipped         " << replay.result.flipped_outcomes;
        if (!replay.result.flipped_txn_ids.empty()) {
            std::cout << " (txn";
            for (std::uint64_t id : replay.result.flipped_txn_ids) std::cout << ' ' << id;
            std::cout << ')';
        }
        std::cout << "\n";
    }
    std::cout << "head commitment " << replay.head.hex() << "\n";
    if (!expect.empty() && replay.head.hex() != expect) {
        std::cout << "MISMATCH: expected " << expect << "\n";
        return 1;
    }
    return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& strategies) {
    const Scenario scenario = load_scenario(scenario_path);
    std::cout << compare(scenario, parse_strategy_specs(strategies));
    return 0;
}

int cmd_freshness(std::uint64_t population, std::uint64_t compromised, std::uint64_t n,
                  std::uint64_t m, std::uint64_t trials, std::uint64_t seed) {
    DetRng rng(seed, "freshness");
    std::uint64_t counts[3] = {0, 0, 0};
    for (std::uint64_t t = 0; t < trials; ++t) {
        const FreshnessVerdict v = verify_chain_freshness(population, compromised, n, m, rng);
        ++counts[static_cast<std::size_t>(v)];
    }

    // Exact verdict distribution from the hypergeometric draw: j compromised
    // observers land in the sample with probability C(k,j)C(P-k,N-j)/C(P,N).
    Rational exact[3] = {0, 0, 0};
    const cpp_int denom = binomial(population, n);
    for (std::uint64_t j = 0; j <= std::min(n, compromised); ++j) {
        if (n - j > population - compromised) continue;
        const Rational pmf(binomial(compromised, j) * binomial(population - compromised, n - j),
                           denom);
        const std::uint64_t fork = j;
        const std::uint64_t truth = n - j;
        FreshnessVerdict v = FreshnessVerdict::Ambiguous;
        if (fork != truth && std::max(fork, truth) >= m) {
            v = truth > fork ? FreshnessVerdict::TrueHead : FreshnessVerdict::ForkHead;
        }
        exact[static_cast<std::size_t>(v)] += pmf;
    }

    std::cout << std::left << std::setw(12) << "verdict" << std::right << std::setw(10) << "count"
              << std::setw(12) << "empirical" << std::setw(12) << "exact" << "\n";
    for (std::size_t i = 0; i < 3; ++i) {
        const auto verdict = static_cast<FreshnessVerdict>(i);
        std::cout << std::left << std::setw(12) << freshness_verdict_name(verdict) << std::right
                  << std::setw(10) << counts[i] << std::setw(12) << std::fixed
                  << std::setprecision(4)
                  << (trials ? static_cast<double>(counts[i]) / static_cast<double>(trials) : 0.0)
                  << std::setw(12) << rational_to_decimal(exact[i], 4) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finality-shades simulator (scenario schema v" +
                 std::to_string(kScenarioSchemaVersion) + ")"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "finsim 1.0 (scenario schema v" +
                                          std::to_string(kScenarioSchemaVersion) + ")");

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write its outputs");
    std::string scenario_path, out_dir;
    run_cmd->add_option("--scenario", scenario_path, "scenario JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* params_cmd = app.add_subcommand("params", "committee security calculator");
    std::uint64_t T = 0, B = 0, R = 0;
    std::string c_range;
    double rate = 1000.0;
    std::optional<double> target_years;
    std::string csv_path;
    params_cmd->add_option("--T", T, "pool size")->required();
    params_cmd->add_option("--B", B, "byzantine members")->required();
    params_cmd->add_option("--C", c_range, "committee size or inclusive range N..M")->required();
    params_cmd->add_option("--rate", rate, "committee selections per hour (default 1000)");
    params_cmd->add_option("--R", R, "rational (bribable) members, worst-cased into B");
    params_cmd->add_option("--target-years", target_years,
                           "also print the smallest C meeting this expected time");
    params_cmd->add_option("--csv", csv_path, "write the table as CSV to this path");

    auto* replay_cmd = app.add_subcommand("replay", "recover a state from dumped records");
    std::string ledger_path, checkpoint_path, calldata_path, replay_scenario, metrics_path, expect;
    bool patched = false;
    replay_cmd->add_option("--ledger", ledger_path, "ledger dump (TSV)")
        ->required()
        ->check(CLI::ExistingFile);
    replay_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint export file")
        ->required()
        ->check(CLI::ExistingFile);
    replay_cmd->add_option("--calldata", calldata_path,
                           "callData dump (default: calldata.tsv next to the ledger dump)");
    replay_cmd->add_option("--scenario", replay_scenario,
                           "scenario file the run used (for gas costs and VM semantics)");
    replay_cmd->add_option("--metrics", metrics_path,
                           "metrics CSV of the original run (enables flip counting)");
    replay_cmd->add_flag("--patched", patched, "replay under patched semantics (bug disabled)");
    replay_cmd->add_option("--expect", expect, "expected head commitment hex; mismatch exits 1");

    auto* compare_cmd = app.add_subcommand("compare", "same workload under several strategies");
    std::string compare_scenario, strategies;
    compare_cmd->add_option("--scenario", compare_scenario, "scenario JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    compare_cmd
        ->add_option("--strategies", strategies,
                     "comma list: coupled[:V] | optimistic:W:V | dddr:T:B:C[:strategy[:p]]")
        ->required();

    auto* fresh_cmd = app.add_subcommand("freshness", "M-of-N chain-head freshness check");
    std::uint64_t population = 0, compromised = 0, sample_n = 0, threshold_m = 0;
    std::uint64_t trials = 10'000, seed = 42;
    fresh_cmd->add_option("--population", population, "observer population")->required();
    fresh_cmd->add_option("--compromised", compromised, "eclipsed observers")->required();
    fresh_cmd->add_option("--N", sample_n, "observers sampled per query")->required();
    fresh_cmd->add_option("--M", threshold_m, "agreement threshold")->required();
    fresh_cmd->add_option("--trials", trials, "sampled queries (default 10000)");
    fresh_cmd->add_option("--seed", seed, "rng seed (default 42)");

    try {
        app.parse(argc, argv);
        if (*run_cmd) return cmd_run(scenario_path, out_dir);
        if (*params_cmd) return cmd_params(T, B, c_range, rate, R, target_years, csv_path);
        if (*replay_cmd)
            return cmd_replay(ledger_path, checkpoint_path, calldata_path, replay_scenario,
                              metrics_path, patched, expect);
        if (*compare_cmd) return cmd_compare(compare_scenario, strategies);
        if (*fresh_cmd)
            return cmd_freshness(population, compromised, sample_n, threshold_m, trials, seed);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
