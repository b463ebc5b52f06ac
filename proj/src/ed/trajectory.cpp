#include "hbc/ed/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "hbc/errors.hpp"
#include "hbc/parallel.hpp"

namespace hbc::ed {

void EDParams::validate() const {
    std::vector<std::string> bad;
    if (N < 1) bad.push_back("N must be >= 1");
    if (2 * N > 14) bad.push_back("2N must be <= 14");
    if (!(dt > 0.0)) bad.push_back("dt must be > 0");
    if (!(total_time > 0.0)) bad.push_back("total_time must be > 0");
    if (n_realizations < 1) bad.push_back("n_realizations must be >= 1");
    if (krylov_dim < 2) bad.push_back("krylov_dim must be >= 2");
    for (double t : sample_times)
        if (!(t >= 0.0 && t <= total_time * (1.0 + 1e-12))) bad.push_back("sample time outside [0, total_time]");
    for (int a : subsystem_sizes)
        if (a < 1 || a >= N) bad.push_back("subsystem size must lie in [1, N-1]");
    if (!bad.empty()) {
        std::string msg;
        for (const auto& b : bad) msg += (msg.empty() ? "" : "; ") + b;
        throw ValidationError(msg);
    }
}

std::size_t EDParams::steps() const { return static_cast<std::size_t>(std::llround(total_time / dt)); }

std::vector<std::size_t> EDParams::sample_steps() const {
    std::vector<std::size_t> out;
    if (sample_times.empty()) {
        for (int k = 1; k <= 100; ++k) out.push_back(static_cast<std::size_t>(std::llround(total_time * k / 100.0 / dt)));
    } else {
        for (double t : sample_times) out.push_back(static_cast<std::size_t>(std::llround(t / dt)));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double TrajectoryRecord::purity(std::size_t t) const { return std::exp(log_z2[t] - log_p2[t]); }

TrajectoryRecord run_trajectory(const EDParams& ed, const ModelParams& params, std::uint32_t realization) {
    ed.validate();
    params.validate();
    const ModelParams p = params.unit();
    const KrylovSettings ks{ed.krylov_dim};
    const std::vector<std::size_t> samples = ed.sample_steps();

    TrajectoryRecord rec;
    rec.realization = realization;
    for (int a : ed.subsystem_sizes) rec.subsystems.push_back({a, {}, {}});

    std::vector<int> q_all(ed.N);
    for (int i = 0; i < ed.N; ++i) q_all[i] = i;

    PureState s = init_epr_state(ed.N);
    double log_norm2 = 0.0;  // ln <psi|psi> carried outside the renormalized vector
    auto record = [&](std::size_t step) {
        rec.times.push_back(static_cast<double>(step) * ed.dt);
        const PurityResult q = subsystem_purity(s, q_all);
        rec.log_z2.push_back(std::log(q.z2) + 2.0 * log_norm2);
        rec.log_p2.push_back(2.0 * std::log(q.trace) + 2.0 * log_norm2);
        for (auto& sub : rec.subsystems) {
            std::vector<int> a(q_all.begin(), q_all.begin() + sub.size);
            std::vector<int> abar(q_all.begin() + sub.size, q_all.end());
            sub.log_z2.push_back(std::log(subsystem_purity(s, a).z2) + 2.0 * log_norm2);
            sub.log_z2_complement.push_back(std::log(subsystem_purity(s, abar).z2) + 2.0 * log_norm2);
        }
    };

    std::size_t next = 0;
    while (next < samples.size() && samples[next] == 0) {
        record(0);
        ++next;
    }
    const std::size_t n = ed.steps();
    for (std::size_t step = 0; step < n && next < samples.size(); ++step) {
        const auto st = static_cast<std::uint32_t>(step);
        const DisorderLayer meas = sample_disorder_layer(p, ed.N, ed.dt, ed.seed, realization, st, LayerKind::Measurement);
        s.amplitudes = apply_weak_measurement(s.amplitudes, measurement_operator(meas), ed.dt, ks);
        if (ed.N > 1) {
            const DisorderLayer uni = sample_disorder_layer(p, ed.N, ed.dt, ed.seed, realization, st, LayerKind::Unitary);
            s.amplitudes = krylov_apply_exp(s.amplitudes, hamiltonian(uni), ed.dt / 2.0, ks);
        }
        const double nrm2 = s.norm_squared();
        if (!(nrm2 > 0.0) || !std::isfinite(nrm2)) throw Error("state norm collapsed at step " + std::to_string(step));
        s.amplitudes /= std::sqrt(nrm2);
        log_norm2 += std::log(nrm2);
        while (next < samples.size() && samples[next] == step + 1) {
            record(step + 1);
            ++next;
        }
    }
    return rec;
}

std::vector<TrajectoryRecord> run_realizations(const EDParams& ed, const ModelParams& p, int threads) {
    ed.validate();
    std::vector<TrajectoryRecord> out(static_cast<std::size_t>(ed.n_realizations));
    parallel_for(out.size(), threads,
                 [&](std::size_t r) { out[r] = run_trajectory(ed, p, static_cast<std::uint32_t>(r)); });
    return out;
}

std::string to_json_line(const TrajectoryRecord& r) {
    nlohmann::json j;
    j["realization"] = r.realization;
    j["times"] = r.times;
    j["log_z2"] = r.log_z2;
    j["log_p2"] = r.log_p2;
    j["subsystems"] = nlohmann::json::array();
    for (const auto& s : r.subsystems)
        j["subsystems"].push_back({{"size", s.size}, {"log_z2", s.log_z2}, {"log_z2_complement", s.log_z2_complement}});
    return j.dump();
}

TrajectoryRecord from_json_line(const std::string& line) {
    TrajectoryRecord r;
    try {
        const auto j = nlohmann::json::parse(line);
        r.realization = j.at("realization").get<std::uint32_t>();
        r.times = j.at("times").get<std::vector<double>>();
        r.log_z2 = j.at("log_z2").get<std::vector<double>>();
        r.log_p2 = j.at("log_p2").get<std::vector<double>>();
        for (const auto& s : j.at("subsystems")) {
            TrajectoryRecord::Subsystem sub;
            sub.size = s.at("size").get<int>();
            sub.log_z2 = s.at("log_z2").get<std::vector<double>>();
            sub.log_z2_complement = s.at("log_z2_complement").get<std::vector<double>>();
            r.subsystems.push_back(std::move(sub));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad trajectory record: ") + e.what());
    }
    if (r.log_z2.size() != r.times.size() || r.log_p2.size() != r.times.size())
        throw ValidationError("trajectory record arrays differ in length");
    return r;
}

}  // namespace hbc::ed
