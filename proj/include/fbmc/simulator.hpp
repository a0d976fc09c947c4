#pragma once

#include <functional>
#include <string>

#include "fbmc/analytics.hpp"
#include "fbmc/channel.hpp"
#include "fbmc/fec.hpp"

namespace fbmc {

struct SubBand {
    int start = 0;
    int width = 0;
    int offset = 0;  // timing offset, samples
};

struct ScenarioConfig {
    std::string preset;
    SystemConfig system;
    PowerDelayProfile pdp;
    std::string prototypeFile;  // empty: design_prototype
    rvec snrGridDb;
    std::vector<SubBand> subBands;
    std::vector<double> etas;  // IF variants; empty uses system.etaFraction
    std::vector<std::string> schemes{"ofdm", "fbmc-nif", "fbmc-if"};
    bool coded = true;
    DecodeMode decode = DecodeMode::Soft;
    int trials = 100;          // blocks per SNR point
    int blocksPerFrame = 8;    // consecutive blocks per user stream
    int cpLen = -1;            // -1: L-1
    bool overlapBlocks = false;
    Fidelity fidelity = Fidelity::Exact;
    std::uint64_t seed = 1;
    std::uint64_t channelSeed = 7;  // link validation's fixed channel

    int effective_cp() const { return cpLen < 0 ? pdp.length() - 1 : cpLen; }
    std::vector<std::string> violations() const;
    void validate() const;
};

// Period between FBMC block starts: (M+K-1)N plus L-1 guard samples unless overlapping.
int fbmc_block_period(const ScenarioConfig& cfg);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);
int worker_count();
// Runs f(i) for i in [0,n) on worker_count() threads.
void parallel_for(int n, const std::function<void(int)>& f);

struct MetricRow {
    double snrDb = 0.0;
    std::string scheme;
    int subband = 0;
    std::string metric;
    double value = 0.0;
    double ciHalfwidth = 0.0;
};

struct MetricSet {
    std::vector<MetricRow> rows;
    const MetricRow* find(double snrDb, const std::string& scheme, const std::string& metric) const;
};

struct ComponentEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;  // standard error of the mean, per-block samples
};

struct LinkPoint {
    double snrDb = 0.0;
    ComponentEstimate resd, ici, isi, rii, fd, ibi, noise, total, componentSum;
    MseBreakdown theory;
    double theoryMean(const std::string& component) const;
};

struct LinkValidation {
    ChannelRealization channel;
    std::vector<LinkPoint> points;
    MetricSet metrics;
};

LinkValidation run_link_validation(const ScenarioConfig& cfg);

struct BerCount {
    std::uint64_t errors = 0, bits = 0;
    double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
};

// Wilson score interval half-width and centre at z (1.96 for 95%).
struct Wilson {
    double centre, halfwidth, lo, hi;
};
Wilson wilson_interval(std::uint64_t errors, std::uint64_t n, double z = 1.96);

std::string if_scheme_label(double eta);

MetricSet run_multiservice(const ScenarioConfig& cfg);

std::vector<MetricSet> sweep(const std::vector<ScenarioConfig>& cfgs);

// Shared construction for one (w, M, eta).
struct FilterBank {
    PrototypeFilter w;
    BandedFilterMatrix P;
    AutocorrMatrix G;
    InverseFilterMatrix R;
};
FilterBank make_filter_bank(const SystemConfig& sys, const std::string& prototypeFile = {});

}  // namespace fbmc
