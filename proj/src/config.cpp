#include "fbmc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fbmc {

std::string to_string(EqualizerKind k) { return k == EqualizerKind::ZF ? "zf" : "mmse"; }
std::string to_string(ReceiverMode m) { return m == ReceiverMode::NIF ? "nif" : "if"; }

EqualizerKind parse_equalizer(const std::string& s) {
    if (s == "zf" || s == "ZF") return EqualizerKind::ZF;
    if (s == "mmse" || s == "MMSE") return EqualizerKind::MMSE;
    throw std::invalid_argument("equalizer must be zf or mmse, got '" + s + "'");
}

ReceiverMode parse_receiver_mode(const std::string& s) {
    if (s == "nif" || s == "NIF") return ReceiverMode::NIF;
    if (s == "if" || s == "IF") return ReceiverMode::IF;
    throw std::invalid_argument("receiver must be nif or if, got '" + s + "'");
}

bool is_pow2(long v) { return v > 0 && (v & (v - 1)) == 0; }

namespace {
std::string join_lines(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "\n") + x;
    return s;
}
}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& v) : std::runtime_error(join_lines(v)), fields(v) {}

std::vector<std::string> SystemConfig::violations(int channelLength) const {
    std::vector<std::string> v;
    if (!is_pow2(N)) v.push_back("N: must be a power of two, got " + std::to_string(N));
    if (M < 1) v.push_back("M: must be >= 1, got " + std::to_string(M));
    if (K < 1) v.push_back("K: must be >= 1, got " + std::to_string(K));
    if (!(symbolPower > 0.0)) v.push_back("delta2: symbol power must be > 0");
    if (modOrder != 4 && modOrder != 16 && modOrder != 64)
        v.push_back("mod_order: must be 4, 16 or 64, got " + std::to_string(modOrder));
    if (!(etaFraction >= 0.0 && etaFraction <= 1.0)) v.push_back("eta: must lie in [0,1]");
    if (channelLength > 0 && N < 2 * channelLength)
        v.push_back("N: must be >= 2L = " + std::to_string(2 * channelLength));
    return v;
}

void SystemConfig::validate(int channelLength) const {
    auto v = violations(channelLength);
    if (!v.empty()) throw ConfigError(v);
}

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineNo) + ": expected `key = value`");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

int async_offset(int N, int cpLen) { return static_cast<int>(std::floor(0.5 * (N + cpLen))); }

std::vector<SubBand> default_subbands(int N, int neighbourOffset) {
    const int width = N / 4, gap = N / 16, edge = N / 16;
    return {{edge, width, neighbourOffset}, {edge + width + gap, width, 0}, {edge + 2 * (width + gap), width, neighbourOffset}};
}

ScenarioConfig default_scenario() {
    ScenarioConfig c;
    c.pdp = default_pdp();
    c.snrGridDb = {0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    return c;
}

std::vector<std::string> preset_names() { return {"link", "sync3band", "async3band"}; }

ScenarioConfig preset_scenario(const std::string& name) {
    ScenarioConfig c = default_scenario();
    c.preset = name;
    if (name == "link") {
        c.system.receiverMode = ReceiverMode::NIF;
        c.snrGridDb = {20};
        c.trials = 112;
        c.overlapBlocks = true;
        c.coded = false;
        return c;
    }
    if (name == "sync3band" || name == "async3band") {
        const bool async = name == "async3band";
        c.snrGridDb = {0, 3, 6, 9, 12, 15, 18, 21, 24, 27, 30};
        c.trials = 4608;
        c.coded = true;
        c.decode = DecodeMode::Soft;
        c.subBands = default_subbands(c.system.N, async ? async_offset(c.system.N, c.effective_cp()) : 0);
        c.etas = async ? std::vector<double>{0.0, 1.0} : std::vector<double>{0.0};
        return c;
    }
    std::string names;
    for (const auto& n : preset_names()) names += " " + n;
    throw std::invalid_argument("unknown preset '" + name + "'; known:" + names);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        const auto a = cur.find_first_not_of(" \t");
        const auto b = cur.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
    }
    return out;
}

bool parse_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

int parse_int(const std::string& s) {
    size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
    return static_cast<int>(v);
}

double parse_double(const std::string& s) {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
    return v;
}

// "a,b,c" or "start:step:stop" (inclusive).
rvec parse_grid(const std::string& s) {
    rvec g;
    if (s.empty()) return g;
    if (s.find(':') != std::string::npos) {
        const auto p = split(s, ':');
        if (p.size() != 3) throw std::invalid_argument("grid range must be start:step:stop");
        const double a = parse_double(p[0]), st = parse_double(p[1]), b = parse_double(p[2]);
        if (!(st > 0.0)) throw std::invalid_argument("grid step must be > 0");
        for (int i = 0;; ++i) {
            const double v = a + i * st;
            if (v > b + 1e-9) break;
            g.push_back(v);
        }
        return g;
    }
    for (const auto& x : split(s, ',')) g.push_back(parse_double(x));
    return g;
}

std::string join_doubles(const rvec& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_db(double linear) {
    if (linear <= 0.0) return "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", 10.0 * std::log10(linear));
    return buf;
}

void apply_key_values(ScenarioConfig& cfg, const KeyValues& kv, std::vector<std::string>& errors) {
    std::string pdpFile;
    bool pdpNormalize = false;
    int pdpTaps = -1;
    double pdpLastDb = -20.0;
    bool pdpExp = false;
    if (auto it = kv.find("preset"); it != kv.end()) {
        try {
            cfg = preset_scenario(it->second);
        } catch (const std::exception& e) {
            errors.push_back(std::string("preset: ") + e.what());
        }
    }
    for (const auto& [key, value] : kv) {
        try {
            if (key == "preset" || key.rfind("manifest.", 0) == 0) continue;
            if (key == "N") cfg.system.N = parse_int(value);
            else if (key == "M") cfg.system.M = parse_int(value);
            else if (key == "K") cfg.system.K = parse_int(value);
            else if (key == "delta2") cfg.system.symbolPower = parse_double(value);
            else if (key == "mod_order") cfg.system.modOrder = parse_int(value);
            else if (key == "eta") cfg.system.etaFraction = parse_double(value);
            else if (key == "equalizer") cfg.system.equalizer = parse_equalizer(value);
            else if (key == "receiver") cfg.system.receiverMode = parse_receiver_mode(value);
            else if (key == "prototype_file") cfg.prototypeFile = value;
            else if (key == "pdp") {
                cfg.pdp.rho2 = value.empty() ? rvec{} : parse_grid(value);
            } else if (key == "pdp_file") pdpFile = value;
            else if (key == "pdp_autonormalize") pdpNormalize = parse_bool(value);
            else if (key == "pdp_taps") {
                pdpTaps = parse_int(value);
                pdpExp = true;
            } else if (key == "pdp_last_tap_db") {
                pdpLastDb = parse_double(value);
                pdpExp = true;
            } else if (key == "snr_db") cfg.snrGridDb = parse_grid(value);
            else if (key == "subbands") {
                cfg.subBands.clear();
                if (!value.empty() && value != "none")
                    for (const auto& b : split(value, ';')) {
                        const auto f = split(b, ':');
                        if (f.size() != 3) throw std::invalid_argument("each subband is start:width:offset");
                        cfg.subBands.push_back({parse_int(f[0]), parse_int(f[1]), parse_int(f[2])});
                    }
            } else if (key == "etas") cfg.etas = value.empty() ? rvec{} : parse_grid(value);
            else if (key == "schemes") cfg.schemes = split(value, ',');
            else if (key == "coded") cfg.coded = parse_bool(value);
            else if (key == "decode") {
                if (value == "soft") cfg.decode = DecodeMode::Soft;
                else if (value == "hard") cfg.decode = DecodeMode::Hard;
                else throw std::invalid_argument("decode must be soft or hard");
            } else if (key == "trials") cfg.trials = parse_int(value);
            else if (key == "blocks_per_frame") cfg.blocksPerFrame = parse_int(value);
            else if (key == "cp") cfg.cpLen = parse_int(value);
            else if (key == "overlap_blocks") cfg.overlapBlocks = parse_bool(value);
            else if (key == "fidelity") cfg.fidelity = parse_fidelity(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "channel_seed") cfg.channelSeed = std::stoull(value);
            else errors.push_back(key + ": unknown key");
        } catch (const std::exception& e) {
            errors.push_back(key + ": " + e.what());
        }
    }
    try {
        if (!pdpFile.empty()) cfg.pdp = load_pdp(pdpFile, pdpNormalize);
        else if (pdpExp) cfg.pdp = exponential_pdp(pdpTaps > 0 ? pdpTaps : cfg.pdp.length(), pdpLastDb);
        else if (pdpNormalize) {
            double s = 0.0;
            for (double r : cfg.pdp.rho2) s += r;
            if (s > 0.0)
                for (double& r : cfg.pdp.rho2) r /= s;
        }
    } catch (const std::exception& e) {
        errors.push_back(std::string("pdp: ") + e.what());
    }
    // A single explicit eta selects one IF variant.
    if (kv.count("eta") && !kv.count("etas")) cfg.etas = {cfg.system.etaFraction};
    // Preset band layouts follow N and the cyclic prefix unless given explicitly.
    if ((cfg.preset == "sync3band" || cfg.preset == "async3band") && !kv.count("subbands") && is_pow2(cfg.system.N))
        cfg.subBands = default_subbands(cfg.system.N,
                                        cfg.preset == "async3band" ? async_offset(cfg.system.N, cfg.effective_cp()) : 0);
}

KeyValues scenario_to_key_values(const ScenarioConfig& c) {
    KeyValues kv;
    if (!c.preset.empty()) kv["preset"] = c.preset;
    kv["N"] = std::to_string(c.system.N);
    kv["M"] = std::to_string(c.system.M);
    kv["K"] = std::to_string(c.system.K);
    kv["delta2"] = format_double(c.system.symbolPower);
    kv["mod_order"] = std::to_string(c.system.modOrder);
    kv["eta"] = format_double(c.system.etaFraction);
    kv["equalizer"] = to_string(c.system.equalizer);
    kv["receiver"] = to_string(c.system.receiverMode);
    kv["prototype_file"] = c.prototypeFile;
    kv["pdp"] = join_doubles(c.pdp.rho2);
    kv["snr_db"] = join_doubles(c.snrGridDb);
    std::string sb;
    for (const auto& b : c.subBands)
        sb += (sb.empty() ? "" : ";") + std::to_string(b.start) + ":" + std::to_string(b.width) + ":" + std::to_string(b.offset);
    kv["subbands"] = sb.empty() ? "none" : sb;
    kv["etas"] = join_doubles(c.etas);
    std::string sc;
    for (const auto& s : c.schemes) sc += (sc.empty() ? "" : ",") + s;
    kv["schemes"] = sc;
    kv["coded"] = c.coded ? "true" : "false";
    kv["decode"] = c.decode == DecodeMode::Soft ? "soft" : "hard";
    kv["trials"] = std::to_string(c.trials);
    kv["blocks_per_frame"] = std::to_string(c.blocksPerFrame);
    kv["cp"] = std::to_string(c.cpLen);
    kv["overlap_blocks"] = c.overlapBlocks ? "true" : "false";
    kv["fidelity"] = to_string(c.fidelity);
    kv["seed"] = std::to_string(c.seed);
    kv["channel_seed"] = std::to_string(c.channelSeed);
    return kv;
}

void print_config(std::ostream& os, const ScenarioConfig& cfg) {
    const auto kv = scenario_to_key_values(cfg);
    // preset first so that re-applying the file does not clobber later keys
    if (auto it = kv.find("preset"); it != kv.end()) os << "preset = " << it->second << '\n';
    for (const auto& [k, v] : kv)
        if (k != "preset") os << k << " = " << v << '\n';
}

}  // namespace fbmc
