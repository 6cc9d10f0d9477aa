#pragma once

#include "escrowscan/corpus.hpp"
#include "escrowscan/features.hpp"

#include <cstdint>

namespace escrowscan {

// Knobs for the generated benchmark corpus. Fake sites are stamped from a
// small number of shared templates (duplicated text, layouts, URL patterns,
// images, topology); real sites get independently drawn content and random
// tree topologies. A few real "confuser" sites borrow exactly one template
// category so that no single feature category suffices on its own.
struct SynthConfig {
    int fake_sites = 30;
    int real_sites = 30;
    int templates = 5;
    int pages_min = 18;
    int pages_max = 22;
    std::uint64_t seed = 7;
    bool confusers = true;
};

// Deterministic in (cfg, wordlists): same config, same corpus, byte for byte.
Corpus generate_benchmark_corpus(const SynthConfig& cfg, const ExtractionContext& ctx);

} // namespace escrowscan
