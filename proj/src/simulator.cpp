#include "fbmc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "fbmc/fft.hpp"

namespace fbmc {

std::vector<std::string> ScenarioConfig::violations() const {
    std::vector<std::string> v = system.violations(pdp.length());
    for (auto& s : pdp.violations(system.N)) v.push_back(s);
    if (trials < 1) v.push_back("trials: must be >= 1");
    if (blocksPerFrame < 1) v.push_back("blocks_per_frame: must be >= 1");
    if (cpLen < -1) v.push_back("cp: must be >= 0");
    for (double e : etas)
        if (!(e >= 0.0 && e <= 1.0)) v.push_back("etas: every value must lie in [0,1]");
    for (const auto& s : schemes)
        if (s != "ofdm" && s != "fbmc-nif" && s != "fbmc-if") v.push_back("schemes: unknown scheme '" + s + "'");
    const int N = system.N;
    std::vector<int> owner(static_cast<size_t>(std::max(N, 0)), -1);
    for (size_t b = 0; b < subBands.size(); ++b) {
        const auto& sb = subBands[b];
        const std::string tag = "subbands[" + std::to_string(b) + "]";
        if (sb.width < 1) v.push_back(tag + ": width must be >= 1");
        if (sb.start < 0 || sb.start + sb.width > N) v.push_back(tag + ": must lie within [0, N)");
        if (sb.offset < 0 || sb.offset >= N * system.M) v.push_back(tag + ": offset must lie in [0, N*M)");
        for (int n = std::max(sb.start, 0); n < std::min(sb.start + sb.width, N); ++n) {
            if (owner[static_cast<size_t>(n)] >= 0) {
                v.push_back(tag + ": overlaps subbands[" + std::to_string(owner[static_cast<size_t>(n)]) + "]");
                break;
            }
            owner[static_cast<size_t>(n)] = static_cast<int>(b);
        }
    }
    if (!subBands.empty() && subBands.size() != 3) v.push_back("subbands: multi-service runs need exactly 3 bands");
    return v;
}

void ScenarioConfig::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(v);
}

int fbmc_block_period(const ScenarioConfig& cfg) {
    const int rows = (cfg.system.M + cfg.system.K - 1) * cfg.system.N;
    return cfg.overlapBlocks ? rows : rows + cfg.pdp.length() - 1;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::uint64_t s = mix(master);
    s = mix(s ^ a);
    s = mix(s ^ b);
    return mix(s ^ c);
}

int worker_count() {
    if (const char* e = std::getenv("FBMC_WORKERS")) {
        const int n = std::atoi(e);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& f) {
    const int workers = std::min(worker_count(), std::max(n, 1));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n && !failed; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

const MetricRow* MetricSet::find(double snrDb, const std::string& scheme, const std::string& metric) const {
    for (const auto& r : rows)
        if (std::abs(r.snrDb - snrDb) < 1e-9 && r.scheme == scheme && r.metric == metric) return &r;
    return nullptr;
}

Wilson wilson_interval(std::uint64_t errors, std::uint64_t n, double z) {
    if (n == 0) return {0.0, 0.5, 0.0, 1.0};
    const double N = static_cast<double>(n);
    const double p = static_cast<double>(errors) / N;
    const double z2 = z * z;
    const double den = 1.0 + z2 / N;
    const double centre = (p + z2 / (2.0 * N)) / den;
    const double hw = z * std::sqrt(p * (1.0 - p) / N + z2 / (4.0 * N * N)) / den;
    return {centre, hw, std::max(0.0, centre - hw), std::min(1.0, centre + hw)};
}

std::string if_scheme_label(double eta) {
    if (eta == 0.0) return "fbmc-if";
    std::ostringstream os;
    os << "fbmc-if-eta" << eta;
    return os.str();
}

FilterBank make_filter_bank(const SystemConfig& sys, const std::string& prototypeFile) {
    FilterBank fb;
    fb.w = prototypeFile.empty() ? design_prototype(sys.K, sys.N) : load_prototype(prototypeFile, sys.K, sys.N);
    fb.P = build_P(fb.w, sys.M);
    fb.G = build_G(fb.P);
    fb.R = invert_G(fb.G);
    return fb;
}

namespace {

inline size_t at(int m, int n, int N) { return static_cast<size_t>(m) * N + n; }

std::vector<std::uint8_t> random_bits(size_t n, Rng& rng) {
    std::vector<std::uint8_t> b(n);
    std::uint64_t word = 0;
    for (size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        b[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return b;
}

QamBlock random_block(int N, int M, int order, double power, Rng& rng) {
    const int bps = qam_bits_per_symbol(order);
    QamBlock S(N, M);
    S.data = qam_map(random_bits(static_cast<size_t>(N) * M * bps, rng), order, power);
    return S;
}

cvec circular_channel(const cvec& b, const cvec& h, int N) {
    cvec out(b.size());
    const int M = static_cast<int>(b.size()) / N;
    for (int m = 0; m < M; ++m)
        for (size_t l = 0; l < h.size(); ++l)
            for (int n = 0; n < N; ++n)
                out[at(m, n, N)] += h[l] * b[at(m, ((n - static_cast<int>(l)) % N + N) % N, N)];
    return out;
}

struct RunningMean {
    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    ComponentEstimate estimate() const {
        ComponentEstimate e;
        if (n == 0) return e;
        e.mean = sum / n;
        if (n > 1) {
            const double var = std::max(0.0, (sum2 - n * e.mean * e.mean) / (n - 1));
            e.stderr_ = std::sqrt(var / n);
        }
        return e;
    }
};

}  // namespace

double LinkPoint::theoryMean(const std::string& c) const {
    if (c == "resd") return theory.mean(theory.resd);
    if (c == "ici") return theory.mean(theory.ici);
    if (c == "isi") return theory.mean(theory.isi);
    if (c == "rii") return theory.mean(theory.rii);
    if (c == "fd") return theory.mean(theory.fd);
    if (c == "ibi") return theory.mean(theory.ibi);
    if (c == "noise") return theory.mean(theory.noise);
    if (c == "total") return theory.mean_total();
    if (c == "joint") return theory.mean_joint();
    throw std::invalid_argument("unknown component " + c);
}

LinkValidation run_link_validation(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto& sys = cfg.system;
    const int N = sys.N, M = sys.M;
    const FilterBank fb = make_filter_bank(sys, cfg.prototypeFile);
    const bool ifMode = sys.receiverMode == ReceiverMode::IF;
    const InverseFilterMatrix Rrx = sparsify_R(fb.R, sys.etaFraction);
    const double d2 = sys.symbolPower;

    LinkValidation out;
    Rng chRng(derive_seed(cfg.channelSeed, 0xC4A77E1ull));
    out.channel = draw_channel(cfg.pdp, N, chRng);
    const cvec& h = out.channel.taps;
    const std::string scheme = ifMode ? if_scheme_label(sys.etaFraction) : "fbmc-nif";

    for (size_t si = 0; si < cfg.snrGridDb.size(); ++si) {
        const double snr = cfg.snrGridDb[si];
        const double sigma2 = d2 / std::pow(10.0, snr / 10.0);
        LinkPoint pt;
        pt.snrDb = snr;
        MseInputs in;
        in.P = &fb.P;
        in.G = &fb.G;
        in.R = &fb.R;
        in.Rrx = &Rrx;
        in.w = &fb.w;
        in.channel = out.channel;
        in.pdp = cfg.pdp;
        in.eq = make_equalizer(out.channel.C, sys.equalizer, sigma2, d2);
        in.delta2 = d2;
        in.sigma2 = sigma2;
        in.guard = !cfg.overlapBlocks;
        pt.theory = mse_closed_form(sys.receiverMode, in, cfg.fidelity);
        const Equalizer& eq = in.eq;

        auto chain = [&](const cvec& r) {
            cvec x = apply_P_adjoint(fb.P, r);
            if (ifMode) x = apply_R(Rrx, x);
            QamBlock y = dft_block(x, N, M);
            equalize(y, eq);
            return y;
        };

        struct BlockStats {
            double resd, intraSym, interSym, fd, ibi, noise, total;
        };
        std::vector<BlockStats> stats(static_cast<size_t>(cfg.trials));
        parallel_for(cfg.trials, [&](int t) {
            Rng rng(derive_seed(cfg.seed, si, static_cast<std::uint64_t>(t)));
            const QamBlock S = random_block(N, M, sys.modOrder, d2, rng);
            const QamBlock Sprev = random_block(N, M, sys.modOrder, d2, rng);
            const cvec b = idft_block(S);
            const cvec o = apply_P(fb.P, b);
            cvec tail;
            if (cfg.overlapBlocks) {
                const cvec op = apply_P(fb.P, idft_block(Sprev));
                tail.assign(op.end() - std::min<long>(cfg.pdp.length() - 1, static_cast<long>(op.size())), op.end());
            }
            cvec noise(o.size());
            add_noise(noise, sigma2, rng);

            const QamBlock yLin = chain(apply_channel(o, h));
            const QamBlock yCirc = chain(apply_P(fb.P, circular_channel(b, h, N)));
            const QamBlock yIbi = chain(apply_channel(cvec(o.size()), h, tail));
            const QamBlock yNoise = chain(noise);
            cvec r = apply_channel(o, h, tail);
            for (size_t i = 0; i < r.size(); ++i) r[i] += noise[i];
            const QamBlock yJoint = chain(r);

            // Single-active-symbol stimuli split the circular-model output into same-symbol and cross-symbol parts.
            cvec intra(static_cast<size_t>(M) * N), inter(static_cast<size_t>(M) * N);
            for (int i = 0; i < M; ++i) {
                QamBlock Si(N, M);
                for (int n = 0; n < N; ++n) Si.at(n, i) = S.at(n, i);
                const QamBlock yi = chain(apply_P(fb.P, circular_channel(idft_block(Si), h, N)));
                for (int m = 0; m < M; ++m)
                    for (int n = 0; n < N; ++n) {
                        if (m == i) {
                            const cd desired = eq.E[static_cast<size_t>(n)] * out.channel.C[static_cast<size_t>(n)] * S.at(n, m);
                            intra[at(m, n, N)] += yi.at(n, m) - desired;
                        } else {
                            inter[at(m, n, N)] += yi.at(n, m);
                        }
                    }
            }
            BlockStats s{};
            const double inv = 1.0 / (static_cast<double>(M) * N);
            for (int m = 0; m < M; ++m)
                for (int n = 0; n < N; ++n) {
                    const size_t k = at(m, n, N);
                    const cd x = S.at(n, m);
                    s.resd += std::norm((eq.beta[static_cast<size_t>(n)] - 1.0) * x) * inv;
                    s.intraSym += std::norm(intra[k]) * inv;
                    s.interSym += std::norm(inter[k]) * inv;
                    s.fd += std::norm(yLin.at(n, m) - yCirc.at(n, m)) * inv;
                    s.ibi += std::norm(yIbi.at(n, m)) * inv;
                    s.noise += std::norm(yNoise.at(n, m)) * inv;
                    s.total += std::norm(yJoint.at(n, m) - x) * inv;
                }
            stats[static_cast<size_t>(t)] = s;
        });

        RunningMean resd, intraSym, interSym, fd, ibi, noise, total, sum;
        for (const auto& s : stats) {
            resd.add(s.resd);
            intraSym.add(s.intraSym);
            interSym.add(s.interSym);
            fd.add(s.fd);
            ibi.add(s.ibi);
            noise.add(s.noise);
            total.add(s.total);
            sum.add(s.resd + s.intraSym + s.interSym + s.fd + s.ibi + s.noise);
        }
        pt.resd = resd.estimate();
        pt.fd = fd.estimate();
        pt.ibi = ibi.estimate();
        pt.noise = noise.estimate();
        pt.total = total.estimate();
        pt.componentSum = sum.estimate();
        if (ifMode) {
            RunningMean rii;
            for (const auto& s : stats) rii.add(s.intraSym + s.interSym);
            pt.rii = rii.estimate();
        } else {
            pt.ici = intraSym.estimate();
            pt.isi = interSym.estimate();
        }

        auto emit = [&](const std::string& metric, double v, double ci) {
            out.metrics.rows.push_back({snr, scheme, 0, metric, v, ci});
        };
        const std::vector<std::pair<std::string, const ComponentEstimate*>> comps = {
            {"resd", &pt.resd}, {"ici", &pt.ici}, {"isi", &pt.isi}, {"rii", &pt.rii}, {"fd", &pt.fd},
            {"ibi", &pt.ibi},   {"noise", &pt.noise}, {"total", &pt.total}};
        for (const auto& [name, e] : comps) {
            if (ifMode && (name == "ici" || name == "isi")) continue;
            if (!ifMode && name == "rii") continue;
            emit("mse_" + name, e->mean, 1.96 * e->stderr_);
            emit("theory_mse_" + name, pt.theoryMean(name), 0.0);
        }
        emit("theory_mse_joint", pt.theory.mean_joint(), 0.0);
        emit("sinr_db", 10.0 * std::log10(d2 / pt.total.mean), 0.0);
        out.points.push_back(std::move(pt));
    }
    return out;
}

namespace {

struct SchemeTally {
    std::uint64_t errors = 0, bits = 0, rawErrors = 0, rawBits = 0;
    double mseSum = 0.0;
    long mseCount = 0;
    double ber_value() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
    void merge(const SchemeTally& o) {
        errors += o.errors;
        bits += o.bits;
        rawErrors += o.rawErrors;
        rawBits += o.rawBits;
        mseSum += o.mseSum;
        mseCount += o.mseCount;
    }
};

struct UserBlock {
    std::vector<std::uint8_t> info;  // information bits (coded runs) or payload bits
    QamBlock S;
    ChannelRealization ch;
};

// Places `piece` into `stream` starting at `start` (may be partially out of range).
void accumulate(cvec& stream, long start, const cvec& piece) {
    for (size_t i = 0; i < piece.size(); ++i) {
        const long t = start + static_cast<long>(i);
        if (t >= 0 && t < static_cast<long>(stream.size())) stream[static_cast<size_t>(t)] += piece[i];
    }
}

}  // namespace

MetricSet run_multiservice(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.subBands.size() != 3) throw ConfigError({"subbands: multi-service runs need exactly 3 bands"});
    const auto& sys = cfg.system;
    const int N = sys.N, M = sys.M, L = cfg.pdp.length();
    const double d2 = sys.symbolPower;
    const int order = sys.modOrder;
    const int bps = qam_bits_per_symbol(order);
    const int cp = cfg.effective_cp();
    const FilterBank fb = make_filter_bank(sys, cfg.prototypeFile);
    const int rows = fb.P.rows();
    const int periodF = fbmc_block_period(cfg);
    const int periodO = M * (N + cp);
    const int B = cfg.blocksPerFrame;
    const int frames = (cfg.trials + B - 1) / B;
    const int mid = 1;
    const SubBand& band = cfg.subBands[mid];

    auto has = [&](const std::string& s) { return std::find(cfg.schemes.begin(), cfg.schemes.end(), s) != cfg.schemes.end(); };
    std::vector<double> etas = cfg.etas.empty() ? std::vector<double>{sys.etaFraction} : cfg.etas;
    if (!has("fbmc-if")) etas.clear();
    std::vector<InverseFilterMatrix> Rs;
    std::vector<rvec> zetas;
    for (double e : etas) {
        Rs.push_back(sparsify_R(fb.R, e));
        rvec z(static_cast<size_t>(M));
        for (int m = 0; m < M; ++m) z[static_cast<size_t>(m)] = compute_zeta(Rs.back(), fb.G, m)[0];
        zetas.push_back(z);
    }
    std::vector<DistortionGram> gramsIf;
    for (const auto& R : Rs) gramsIf.push_back(distortion_gram(fb.P, &R, L));
    const DistortionGram gramNif = distortion_gram(fb.P, nullptr, L);
    rvec alphaNif(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) {
        const auto ic = compute_interference_coeffs(fb.G, m);
        alphaNif[static_cast<size_t>(m)] = ic.alphaICI[0] + ic.alphaISI[0];
    }

    // Scheme slots: 0 ofdm, 1 nif, 2.. IF variants.
    const size_t nSchemes = 2 + etas.size();
    std::vector<std::string> labels{"ofdm", "fbmc-nif"};
    for (double e : etas) labels.push_back(if_scheme_label(e));
    std::vector<bool> active(nSchemes, true);
    active[0] = has("ofdm");
    active[1] = has("fbmc-nif");

    const int capacity = band.width * M * bps;
    const int infoBits = cfg.coded ? capacity / 2 - (kConstraintLength - 1) : capacity;
    if (infoBits < 1) throw ConfigError({"subbands: middle band too narrow to carry a codeword"});

    MetricSet result;
    for (size_t si = 0; si < cfg.snrGridDb.size(); ++si) {
        const double snr = cfg.snrGridDb[si];
        const double sigma2 = d2 / std::pow(10.0, snr / 10.0);
        const double sigma2o = ofdm_noise_variance(sigma2, N, cp);
        std::vector<std::vector<SchemeTally>> perFrame(static_cast<size_t>(frames), std::vector<SchemeTally>(nSchemes));

        parallel_for(frames, [&](int f) {
            Rng rng(derive_seed(cfg.seed, 0x5E41ull + si, static_cast<std::uint64_t>(f)));
            Rng noiseF(derive_seed(cfg.seed, 0xF0ull + si, static_cast<std::uint64_t>(f), 1));
            Rng noiseO(derive_seed(cfg.seed, 0xF0ull + si, static_cast<std::uint64_t>(f), 2));
            // Blocks -1..B for every user so misaligned neighbours fill the middle window.
            const int nb = B + 2;
            std::vector<std::vector<UserBlock>> users(3, std::vector<UserBlock>(static_cast<size_t>(nb)));
            for (int u = 0; u < 3; ++u) {
                const SubBand& sb = cfg.subBands[static_cast<size_t>(u)];
                const int cap = sb.width * M * bps;
                const int info = cfg.coded ? cap / 2 - (kConstraintLength - 1) : cap;
                for (int j = 0; j < nb; ++j) {
                    UserBlock& ub = users[static_cast<size_t>(u)][static_cast<size_t>(j)];
                    std::vector<std::uint8_t> payload;
                    if (cfg.coded && info > 0) {
                        ub.info = random_bits(static_cast<size_t>(info), rng);
                        payload = conv_encode(ub.info);
                        payload.resize(static_cast<size_t>(cap), 0);
                    } else {
                        payload = random_bits(static_cast<size_t>(cap), rng);
                        ub.info = payload;
                    }
                    const cvec syms = qam_map(payload, order, d2);
                    ub.S = QamBlock(N, M);
                    size_t q = 0;
                    for (int m = 0; m < M; ++m)
                        for (int n = sb.start; n < sb.start + sb.width; ++n) ub.S.at(n, m) = syms[q++];
                    ub.ch = draw_channel(cfg.pdp, N, rng);
                }
            }
            const long lead = std::max(periodF, periodO) + N * M;  // room for block -1
            auto& tally = perFrame[static_cast<size_t>(f)];

            auto score = [&](SchemeTally& t, const UserBlock& ub, const QamBlock& Y, const Equalizer& eq,
                             const std::function<double(int, int)>& noiseVar) {
                // Y is already equalized.
                std::vector<double> llr;
                std::vector<std::uint8_t> hard;
                llr.reserve(static_cast<size_t>(capacity));
                double buf[6];
                cvec syms;
                for (int m = 0; m < M; ++m)
                    for (int n = band.start; n < band.start + band.width; ++n) {
                        const cd y = Y.at(n, m);
                        t.mseSum += std::norm(y - ub.S.at(n, m));
                        ++t.mseCount;
                        const double g = eq.beta[static_cast<size_t>(n)];
                        qam_llr(y, g, noiseVar(m, n), order, d2, buf);
                        for (int k = 0; k < bps; ++k) llr.push_back(buf[k]);
                        syms.push_back(g > 0.0 ? y / g : y);
                    }
                hard = qam_demap(syms, order, d2);
                std::vector<std::uint8_t> sent;
                if (cfg.coded) {
                    sent = conv_encode(ub.info);
                    sent.resize(static_cast<size_t>(capacity), 0);
                } else {
                    sent = ub.info;
                }
                for (size_t i = 0; i < sent.size(); ++i) t.rawErrors += hard[i] != sent[i];
                t.rawBits += sent.size();
                std::vector<std::uint8_t> dec;
                if (cfg.coded) {
                    const size_t used = 2 * (ub.info.size() + kConstraintLength - 1);
                    if (cfg.decode == DecodeMode::Soft) {
                        llr.resize(used);
                        dec = viterbi_decode_soft(llr);
                    } else {
                        hard.resize(used);
                        dec = viterbi_decode_hard(hard);
                    }
                } else {
                    dec = hard;
                }
                for (size_t i = 0; i < ub.info.size(); ++i) t.errors += dec[i] != ub.info[i];
                t.bits += ub.info.size();
            };

            const bool anyFbmc = nSchemes > 2 || active[1];
            if (anyFbmc) {
                cvec stream(static_cast<size_t>(lead + static_cast<long>(nb) * periodF + rows + L + N * M));
                for (int u = 0; u < 3; ++u)
                    for (int j = 0; j < nb; ++j) {
                        const UserBlock& ub = users[static_cast<size_t>(u)][static_cast<size_t>(j)];
                        const cvec o = convolve_full(fbmc_transmit(ub.S, fb.P), ub.ch.taps);
                        accumulate(stream, lead + static_cast<long>(j - 1) * periodF + cfg.subBands[static_cast<size_t>(u)].offset, o);
                    }
                for (int j = 1; j <= B; ++j) {
                    const UserBlock& ub = users[mid][static_cast<size_t>(j)];
                    const long start = lead + static_cast<long>(j - 1) * periodF + band.offset;
                    cvec r(stream.begin() + start, stream.begin() + start + rows);
                    add_noise(r, sigma2, noiseF);
                    const Equalizer eq = make_equalizer(ub.ch.C, sys.equalizer, sigma2, d2);
                    const cvec x = apply_P_adjoint(fb.P, r);
                    if (active[1]) {
                        QamBlock Y = dft_block(x, N, M);
                        equalize(Y, eq);
                        score(tally[1], ub, Y, eq, [&](int m, int n) {
                            const double e2 = std::norm(eq.E[static_cast<size_t>(n)]);
                            return sigma2 * e2 + d2 * e2 * std::norm(ub.ch.C[static_cast<size_t>(n)]) * alphaNif[static_cast<size_t>(m)] +
                                   d2 * e2 * gramNif.variance(m, n, ub.ch.taps);
                        });
                    }
                    for (size_t v = 0; v < etas.size(); ++v) {
                        QamBlock Y = dft_block(apply_R(Rs[v], x), N, M);
                        equalize(Y, eq);
                        score(tally[2 + v], ub, Y, eq, [&](int m, int n) {
                            const double e2 = std::norm(eq.E[static_cast<size_t>(n)]);
                            return sigma2 * e2 * zetas[v][static_cast<size_t>(m)] + d2 * e2 * gramsIf[v].variance(m, n, ub.ch.taps);
                        });
                    }
                }
            }
            if (active[0]) {
                cvec stream(static_cast<size_t>(lead + static_cast<long>(nb) * periodO + L + N * M));
                for (int u = 0; u < 3; ++u)
                    for (int j = 0; j < nb; ++j) {
                        const UserBlock& ub = users[static_cast<size_t>(u)][static_cast<size_t>(j)];
                        const cvec o = convolve_full(ofdm_transmit(ub.S, cp), ub.ch.taps);
                        accumulate(stream, lead + static_cast<long>(j - 1) * periodO + cfg.subBands[static_cast<size_t>(u)].offset, o);
                    }
                for (int j = 1; j <= B; ++j) {
                    const UserBlock& ub = users[mid][static_cast<size_t>(j)];
                    const long start = lead + static_cast<long>(j - 1) * periodO + band.offset;
                    cvec r(stream.begin() + start, stream.begin() + start + periodO);
                    add_noise(r, sigma2o, noiseO);
                    const Equalizer eq = make_equalizer(ub.ch.C, sys.equalizer, sigma2o, d2);
                    QamBlock Y = ofdm_demodulate(r, N, M, cp);
                    equalize(Y, eq);
                    score(tally[0], ub, Y, eq, [&](int, int n) { return sigma2o * std::norm(eq.E[static_cast<size_t>(n)]); });
                }
            }
        });

        for (size_t s = 0; s < nSchemes; ++s) {
            if (!active[s] && s < 2) continue;
            SchemeTally tot;
            for (const auto& fr : perFrame) tot.merge(fr[s]);
            const Wilson w = wilson_interval(tot.errors, tot.bits);
            const Wilson wr = wilson_interval(tot.rawErrors, tot.rawBits);
            result.rows.push_back({snr, labels[s], mid, "ber", tot.ber_value(), w.halfwidth});
            result.rows.push_back({snr, labels[s], mid, "ber_uncoded",
                                   tot.rawBits ? static_cast<double>(tot.rawErrors) / static_cast<double>(tot.rawBits) : 0.0,
                                   wr.halfwidth});
            result.rows.push_back({snr, labels[s], mid, "bits", static_cast<double>(tot.bits), 0.0});
            result.rows.push_back({snr, labels[s], mid, "mse", tot.mseCount ? tot.mseSum / tot.mseCount : 0.0, 0.0});
        }
        std::fprintf(stderr, "snr %.1f dB done\n", snr);
    }
    return result;
}

std::vector<MetricSet> sweep(const std::vector<ScenarioConfig>& cfgs) {
    std::vector<MetricSet> out;
    for (const auto& c : cfgs) out.push_back(c.subBands.empty() ? run_link_validation(c).metrics : run_multiservice(c));
    return out;
}

}  // namespace fbmc
