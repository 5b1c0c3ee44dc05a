#pragma once

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "logtrap/classical.hpp"
#include "logtrap/dynamics.hpp"
#include "logtrap/interaction.hpp"
#include "logtrap/inverse_spectral.hpp"
#include "logtrap/protocol.hpp"
#include "logtrap/radial.hpp"

namespace logtrap::io {

// Shortest round-trip decimal form; parsing it back reproduces the exact
// bits, which the file formats here promise.
inline std::string fmt(double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, p);
}

inline double parse_double(std::string_view s) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || p != s.data() + s.size())
        throw parameter_error("parse_double: bad numeric field '" + std::string(s) + "'");
    return x;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

// Write-then-rename so readers never observe a half-written file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("write_atomic: cannot open " + tmp.string());
        f << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_file: cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- potential: JSON header line, then xi,V rows, bit-exact round trip ----

inline std::string potential_csv(const InversionReport& rep) {
    nlohmann::json hdr;
    hdr["L"] = rep.L;
    hdr["xmax"] = rep.potential.grid.xmax;
    hdr["n"] = rep.potential.grid.n;
    hdr["tol"] = rep.tol;
    hdr["iterations"] = rep.iterations;
    hdr["converged"] = rep.converged;
    std::string out = hdr.dump() + "\nxi,V\n";
    const auto& g = rep.potential.grid;
    for (int i = 0; i < g.n; ++i)
        out += fmt(g.point(i)) + "," + fmt(rep.potential.values[i]) + "\n";
    return out;
}

inline InversionReport parse_potential_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw parameter_error("potential csv: empty file");
    const auto hdr = nlohmann::json::parse(line);
    InversionReport rep;
    rep.L = hdr.at("L").get<std::int64_t>();
    rep.tol = hdr.at("tol").get<double>();
    rep.iterations = hdr.at("iterations").get<int>();
    rep.converged = hdr.at("converged").get<bool>();
    Grid grid(hdr.at("xmax").get<double>(), hdr.at("n").get<int>());
    if (!std::getline(in, line) || line != "xi,V")
        throw parameter_error("potential csv: missing column header");
    std::vector<double> values;
    values.reserve(grid.n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != 2) throw parameter_error("potential csv: bad row");
        values.push_back(parse_double(fields[1]));
    }
    rep.potential = PotentialOnGrid(grid, std::move(values));
    return rep;
}

// ---- spectrum rows (ell, k, energy, multiplicity) ----

inline std::string spectrum_csv(const DegeneracyAudit& audit) {
    std::string out = "ell,k,energy,multiplicity\n";
    for (const auto& lv : audit.levels)
        out += std::to_string(lv.ell) + "," + std::to_string(lv.k) + "," + fmt(lv.energy) +
               "," + std::to_string(lv.multiplicity) + "\n";
    return out;
}

// ---- matrix-element table (k1, k2, ell, W) ----

inline std::string wtable_csv(const MatrixElementTable& table) {
    std::string out = "k1,k2,ell,W\n";
    for (const auto& [key, w] : table.entries) {
        const auto [ell, k1, k2] = key;
        out += std::to_string(k1) + "," + std::to_string(k2) + "," + std::to_string(ell) +
               "," + fmt(w) + "\n";
    }
    return out;
}

// ---- trajectory (t, pair, Re b, Im b, |b|^2) ----

inline std::string trajectory_csv(const Trajectory& traj, const TwoBosonBasis& basis) {
    std::string out = "t,pair,re,im,prob\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s)
        for (int i = 0; i < basis.size(); ++i) {
            const auto& b = traj.amplitudes[s][i];
            out += fmt(traj.times[s]) + "," + std::to_string(i) + "," + fmt(b.real()) + "," +
                   fmt(b.imag()) + "," + fmt(std::norm(b)) + "\n";
        }
    return out;
}

// ---- orbit (t, rho, theta, x, y) ----

inline std::string orbit_csv(const OrbitTrace& trace) {
    std::string out = "t,rho,theta,x,y\n";
    for (const auto& [t, rho, theta] : trace.samples)
        out += fmt(t) + "," + fmt(rho) + "," + fmt(theta) + "," + fmt(rho * std::cos(theta)) +
               "," + fmt(rho * std::sin(theta)) + "\n";
    return out;
}

// ---- protocol result ----

inline nlohmann::json result_json(const ProtocolResult& res) {
    nlohmann::json j;
    j["N"] = res.N_raw;
    j["N_reduced"] = res.N;
    j["L"] = res.L;
    j["K"] = res.K;
    j["predivided"] = res.predivided;
    if (res.factors)
        j["factors"] = {res.factors->first, res.factors->second};
    else
        j["factors"] = nullptr;
    j["attempts"] = res.attempts;
    j["Omega"] = res.Omega;
    j["margin"] = res.margin;
    j["seed"] = res.seed;
    j["mode"] = to_string(res.mode);
    j["window_ok"] = res.window_ok;
    if (!res.failure.empty()) j["failure"] = res.failure;
    return j;
}

// ---- run manifest: command, config snapshot, output digests ----

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> outputs; // (path, fnv64)

    void add_output(const std::filesystem::path& p, const std::string& content) {
        outputs.emplace_back(p.string(), fnv1a64_hex(content));
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed;
        j["version"] = "logtrap 1.0";
        j["outputs"] = nlohmann::json::array();
        for (const auto& [path, digest] : outputs)
            j["outputs"].push_back({{"path", path}, {"fnv64", digest}});
        return j;
    }
};

} // namespace logtrap::io
