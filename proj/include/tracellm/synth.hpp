#pragma once

#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/anomaly_model.hpp"
#include "tracellm/call_tree.hpp"

namespace tracellm::synth {

// One generated incident: reconstructed forests per transaction plus the
// labeled root-to-leaf paths derived from them.
struct SynthTransaction {
    TxHash tx_hash;
    CallForest forest;
};

struct SynthIncident {
    std::string incident_id;
    std::vector<SynthTransaction> transactions;
    std::vector<LabeledPath> labeled;
};

struct SynthBenchmark {
    std::vector<SynthIncident> incidents;
};

// Deterministic benchmark with injected attack motifs: deep, structurally
// rare, suspicious-method-dense paths hidden among benign traffic and
// shallow high-suspicion decoys.
SynthBenchmark generate_benchmark(uint64_t seed, size_t n_incidents);

std::vector<LabeledPath> benchmark_dataset(const SynthBenchmark& bench);

std::map<std::string, std::vector<LabeledPath>> group_by_incident(
    const std::vector<LabeledPath>& paths);

// Writes a complete replayable incident (blocks, traces, codes, balance
// diffs, explorer metadata, a minimal-proxy victim) into a fixture store and
// returns the matching scope document.
nlohmann::json write_incident_fixtures(const std::string& fixture_dir,
                                       const std::string& sigdb_path, uint64_t seed);

}  // namespace tracellm::synth
