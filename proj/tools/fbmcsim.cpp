#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fbmc/analytics.hpp"
#include "fbmc/config.hpp"
#include "fbmc/simulator.hpp"

namespace fs = std::filesystem;
using namespace fbmc;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Outputs {
    fs::path dir;
    std::vector<fs::path> written;

    // Writes via a temporary file and rename so readers never see partial content.
    void write(const std::string& name, const std::string& content) {
        fs::create_directories(dir);
        const fs::path final = dir / name;
        const fs::path tmp = dir / (name + ".tmp");
        {
            std::ofstream o(tmp, std::ios::binary);
            if (!o) throw std::runtime_error("cannot write " + tmp.string());
            o << content;
            if (!o) throw std::runtime_error("write failed for " + tmp.string());
        }
        fs::rename(tmp, final);
        written.push_back(final);
    }
    void remove_all() {
        for (const auto& p : written) fs::remove(p);
        written.clear();
    }
};

std::string csv_value(double v) { return format_double(v); }

std::string metrics_csv(const MetricSet& ms) {
    std::ostringstream os;
    os << "snr_db,scheme,subband,metric,value,ci_halfwidth\n";
    for (const auto& r : ms.rows)
        os << format_double(r.snrDb) << ',' << r.scheme << ',' << r.subband << ',' << r.metric << ','
           << csv_value(r.value) << ',' << csv_value(r.ciHalfwidth) << '\n';
    return os.str();
}

std::string complexity_csv(const SystemConfig& s) {
    const auto c = complexity_report(s.N, s.M, s.K, s.etaFraction);
    std::ostringstream os;
    os << "N,M,K,eta,cTx,cRxNIF,cR,cRxIF,cR_mask,apply_P_mults_per_block,apply_R_mults_per_symbol,big_o\n";
    os << s.N << ',' << s.M << ',' << s.K << ',' << format_double(s.etaFraction) << ',' << c.cTx << ',' << c.cRxNIF << ','
       << format_double(c.cR) << ',' << format_double(c.cRxIF) << ',' << format_double(c.cRMask) << ','
       << c.countedApplyP << ',' << format_double(c.countedRPerSymbol) << ",\"" << c.bigO << "\"\n";
    return os.str();
}

int cmd_filter(const ScenarioConfig& cfg, Outputs& out) {
    const FilterBank fb = make_filter_bank(cfg.system, cfg.prototypeFile);
    const auto& s = cfg.system;
    std::ostringstream proto;
    for (double c : fb.w.coeffs) proto << format_double(c) << '\n';
    out.write("prototype.txt", proto.str());

    std::ostringstream g;
    g << "d,n,value\n";
    for (int d = 0; d < fb.G.K; ++d)
        for (int n = 0; n < fb.G.N; ++n) g << d << ',' << n << ',' << format_double(fb.G.bands[d][n]) << '\n';
    out.write("g_bands.csv", g.str());

    const InverseFilterMatrix R = sparsify_R(fb.R, s.etaFraction);
    std::ostringstream r;
    r << "m,i,norm\n";
    for (int m = 0; m < s.M; ++m)
        for (int i = 0; i < s.M; ++i) {
            double acc = 0.0;
            for (int n = 0; n < s.N; ++n) acc += R.entry(m, i, n) * R.entry(m, i, n);
            r << m << ',' << i << ',' << format_double(std::sqrt(acc)) << '\n';
        }
    out.write("r_block_norms.csv", r.str());

    std::ostringstream z;
    z << "m,n,zeta\n";
    for (int m = 0; m < s.M; ++m) {
        const rvec zm = compute_zeta(fb.R, fb.G, m);
        for (int n = 0; n < s.N; ++n) z << m << ',' << n << ',' << format_double(zm[n]) << '\n';
    }
    out.write("zeta.csv", z.str());
    out.write("complexity.csv", complexity_csv(s));
    return 0;
}

int cmd_analyze(const ScenarioConfig& cfg, bool average, Outputs& out) {
    const auto& s = cfg.system;
    const FilterBank fb = make_filter_bank(s, cfg.prototypeFile);
    const InverseFilterMatrix Rrx = sparsify_R(fb.R, s.etaFraction);
    Rng rng(derive_seed(cfg.channelSeed, 0xC4A77E1ull));
    const ChannelRealization ch = draw_channel(cfg.pdp, s.N, rng);
    std::ostringstream os;
    os << "snr_db,mode,m,n,component,value_db\n";
    for (double snr : cfg.snrGridDb) {
        const double sigma2 = s.symbolPower / std::pow(10.0, snr / 10.0);
        for (ReceiverMode mode : {ReceiverMode::NIF, ReceiverMode::IF}) {
            MseInputs in;
            in.P = &fb.P;
            in.G = &fb.G;
            in.R = &fb.R;
            in.Rrx = &Rrx;
            in.w = &fb.w;
            in.channel = ch;
            in.pdp = cfg.pdp;
            in.eq = make_equalizer(ch.C, s.equalizer, sigma2, s.symbolPower);
            in.delta2 = s.symbolPower;
            in.sigma2 = sigma2;
            in.guard = !cfg.overlapBlocks;
            const MseBreakdown b = mse_closed_form(mode, in, cfg.fidelity);
            std::vector<std::pair<std::string, const rvec*>> comps = {{"resd", &b.resd}};
            if (mode == ReceiverMode::NIF) {
                comps.push_back({"ici", &b.ici});
                comps.push_back({"isi", &b.isi});
            } else if (s.etaFraction > 0.0 && cfg.fidelity == Fidelity::Exact) {
                comps.push_back({"rii", &b.rii});
            }
            comps.push_back({"fd", &b.fd});
            comps.push_back({"ibi", &b.ibi});
            comps.push_back({"ibi_approx", &b.ibiApprox});
            comps.push_back({"noise", &b.noise});
            rvec total(b.resd.size()), sinr(b.resd.size());
            for (int m = 0; m < s.M; ++m)
                for (int n = 0; n < s.N; ++n) {
                    total[m * s.N + n] = b.total(m, n);
                    sinr[m * s.N + n] = b.sinr(m, n, s.symbolPower);
                }
            comps.push_back({"total", &total});
            comps.push_back({"joint", &b.joint});
            comps.push_back({"sinr", &sinr});
            const std::string ms = to_string(mode);
            for (const auto& [name, v] : comps) {
                if (average) {
                    double acc = 0.0;
                    for (double x : *v) acc += x;
                    os << format_double(snr) << ',' << ms << ",-1,-1," << name << ',' << format_db(acc / v->size()) << '\n';
                    continue;
                }
                for (int m = 0; m < s.M; ++m)
                    for (int n = 0; n < s.N; ++n)
                        os << format_double(snr) << ',' << ms << ',' << m << ',' << n << ',' << name << ','
                           << format_db((*v)[m * s.N + n]) << '\n';
            }
        }
    }
    out.write("analyze.csv", os.str());
    return 0;
}

int cmd_simulate(const ScenarioConfig& cfg, Outputs& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const MetricSet ms = cfg.subBands.empty() ? run_link_validation(cfg).metrics : run_multiservice(cfg);
    out.write("simulate.csv", metrics_csv(ms));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream m;
    m << "# run manifest; pass back with --config to reproduce\n";
    print_config(m, cfg);
    m << "manifest.master_seed = " << cfg.seed << '\n';
    m << "manifest.tool_version = " << kVersion << '\n';
    m << "manifest.wall_time_s = " << wall << '\n';
    m << "manifest.outputs = simulate.csv\n";
    out.write("manifest.txt", m.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FBMC/QAM inverse-filter receiver simulator"};
    app.require_subcommand(1);
    std::string configFile, outDir = ".";
    bool printConfig = false;
    std::vector<std::string> sets;
    KeyValues flags;

    auto addCommon = [&](CLI::App* sc) {
        sc->add_option("-c,--config", configFile, "key = value configuration file");
        sc->add_option("-o,--out", outDir, "output directory");
        sc->add_flag("--print-config", printConfig, "print the effective configuration and exit");
        sc->add_option("--set", sets, "override any key: key=value")->take_all();
        auto kvopt = [&](const std::string& flag, const std::string& key, const std::string& help) {
            sc->add_option_function<std::string>(flag, [&flags, key](const std::string& v) { flags[key] = v; }, help);
        };
        kvopt("--preset", "preset", "link | sync3band | async3band");
        kvopt("--N", "N", "subcarriers (power of two)");
        kvopt("--M", "M", "FBMC symbols per block");
        kvopt("--K", "K", "overlap factor");
        kvopt("--eta", "eta", "sparsification fraction in [0,1]");
        kvopt("--etas", "etas", "comma list of IF sparsification fractions");
        kvopt("--equalizer", "equalizer", "zf | mmse");
        kvopt("--receiver", "receiver", "nif | if");
        kvopt("--mod-order", "mod_order", "4 | 16 | 64");
        kvopt("--snr", "snr_db", "SNR grid: a,b,c or start:step:stop");
        kvopt("--trials", "trials", "blocks per SNR point");
        kvopt("--seed", "seed", "master seed");
        kvopt("--channel-seed", "channel_seed", "seed of the fixed analysis channel");
        kvopt("--pdp-file", "pdp_file", "`l,rho2` CSV");
        kvopt("--pdp-taps", "pdp_taps", "exponential profile length");
        kvopt("--prototype-file", "prototype_file", "one coefficient per line");
        kvopt("--fidelity", "fidelity", "exact | scalar");
        kvopt("--decode", "decode", "soft | hard");
        kvopt("--cp", "cp", "OFDM cyclic prefix (default L-1)");
        sc->add_flag_function("--pdp-autonormalize", [&flags](std::int64_t) { flags["pdp_autonormalize"] = "true"; },
                              "rescale PDP to unit power");
        sc->add_flag_function("--overlap-blocks", [&flags](std::int64_t) { flags["overlap_blocks"] = "true"; },
                              "back-to-back blocks (enables inter-block interference)");
        sc->add_flag_function("--uncoded", [&flags](std::int64_t) { flags["coded"] = "false"; }, "disable FEC");
    };
    auto* filter = app.add_subcommand("filter", "prototype, G bands, R norms, zeta and complexity diagnostics");
    auto* analyze = app.add_subcommand("analyze", "closed-form MSE breakdown CSV");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo link validation or multi-service BER");
    auto* complexity = app.add_subcommand("complexity", "multiplication counts");
    bool average = false;
    analyze->add_flag("--average", average, "emit block-averaged rows (m = n = -1)");
    for (auto* sc : {filter, analyze, simulate, complexity}) addCommon(sc);

    CLI11_PARSE(app, argc, argv);

    ScenarioConfig cfg = default_scenario();
    std::vector<std::string> errors;
    try {
        KeyValues merged;
        if (!configFile.empty()) merged = load_key_values(configFile);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                errors.push_back("--set " + s + ": expected key=value");
                continue;
            }
            flags[s.substr(0, eq)] = s.substr(eq + 1);
        }
        // A preset on the command line restarts from that preset; other flags then win over the file.
        if (flags.count("preset")) merged.erase("preset");
        for (const auto& [k, v] : flags) merged[k] = v;
        if (flags.count("preset")) {
            KeyValues fileKeys = configFile.empty() ? KeyValues{} : load_key_values(configFile);
            fileKeys.erase("preset");
            KeyValues ordered{{"preset", flags["preset"]}};
            apply_key_values(cfg, ordered, errors);
            for (const auto& [k, v] : flags) fileKeys[k] = v;
            fileKeys.erase("preset");
            apply_key_values(cfg, fileKeys, errors);
        } else {
            apply_key_values(cfg, merged, errors);
        }
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }
    for (auto& v : cfg.violations()) errors.push_back(v);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << '\n';
        return 2;
    }
    if (printConfig) {
        print_config(std::cout, cfg);
        return 0;
    }

    Outputs out;
    out.dir = outDir;
    try {
        if (*filter) return cmd_filter(cfg, out);
        if (*analyze) return cmd_analyze(cfg, average, out);
        if (*simulate) return cmd_simulate(cfg, out);
        if (*complexity) {
            const std::string csv = complexity_csv(cfg.system);
            std::cout << csv;
            out.write("complexity.csv", csv);
            return 0;
        }
    } catch (const std::exception& e) {
        out.remove_all();
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
