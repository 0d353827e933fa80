#include "wavekin/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace wavekin {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_ensemble_csv(const std::filesystem::path& path, const ParticleEnsemble& e) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << "id,q1,q2,q3,p1,p2,p3,weight\n";
    for (std::size_t i = 0; i < e.size(); ++i) {
        os << i << ',' << format_double(e.q[i].x) << ',' << format_double(e.q[i].y) << ','
           << format_double(e.q[i].z) << ',' << format_double(e.p[i].x) << ','
           << format_double(e.p[i].y) << ',' << format_double(e.p[i].z) << ','
           << format_double(e.w[i]) << '\n';
    }
}

ParticleEnsemble read_ensemble_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty ensemble file");
    ParticleEnsemble e;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double id, q1, q2, q3, p1, p2, p3, w;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &id, &q1, &q2, &q3,
                        &p1, &p2, &p3, &w) != 8)
            throw std::runtime_error("malformed ensemble row: " + line);
        e.add({q1, q2, q3}, {p1, p2, p3}, w);
    }
    return e;
}

namespace {

void write_doubles(const std::filesystem::path& path, const double* data, std::size_t n) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * 8));
}

std::vector<double> read_doubles(const std::filesystem::path& path, std::size_t n) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::vector<double> v(n);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * 8));
    if (static_cast<std::size_t>(is.gcount()) != n * 8)
        throw std::runtime_error("truncated binary file " + path.string());
    return v;
}

} // namespace

void write_ensemble_binary(const std::filesystem::path& stem, const ParticleEnsemble& e) {
    std::vector<double> flat;
    flat.reserve(e.size() * 7);
    for (std::size_t i = 0; i < e.size(); ++i) {
        flat.insert(flat.end(), {e.q[i].x, e.q[i].y, e.q[i].z, e.p[i].x, e.p[i].y, e.p[i].z,
                                 e.w[i]});
    }
    write_doubles(stem.string() + ".bin", flat.data(), flat.size());
    json hdr;
    hdr["kind"] = "ensemble";
    hdr["count"] = e.size();
    hdr["layout"] = "q1 q2 q3 p1 p2 p3 weight";
    hdr["scalar"] = "f64";
    hdr["byte_order"] = "little-endian";
    std::ofstream os(stem.string() + ".json");
    os << hdr.dump(2) << '\n';
}

ParticleEnsemble read_ensemble_binary(const std::filesystem::path& stem) {
    std::ifstream hs(stem.string() + ".json");
    if (!hs) throw std::runtime_error("missing header " + stem.string() + ".json");
    json hdr = json::parse(hs);
    const std::size_t n = hdr.at("count").get<std::size_t>();
    const auto flat = read_doubles(stem.string() + ".bin", n * 7);
    ParticleEnsemble e;
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = flat.data() + 7 * i;
        e.add({r[0], r[1], r[2]}, {r[3], r[4], r[5]}, r[6]);
    }
    return e;
}

void write_field_binary(const std::filesystem::path& stem, const WaveField& f) {
    const std::size_t n = f.psi.size();
    std::vector<double> flat;
    flat.reserve(2 * n);
    flat.insert(flat.end(), f.psi.data(), f.psi.data() + n);
    flat.insert(flat.end(), f.pi.data(), f.pi.data() + n);
    write_doubles(stem.string() + ".bin", flat.data(), flat.size());
    json hdr;
    hdr["kind"] = "field";
    hdr["grid_n"] = f.n();
    hdr["halfwidth"] = f.halfwidth();
    hdr["spacing"] = f.spacing();
    hdr["time"] = f.time;
    hdr["analytic_tail"] = f.analytic_tail;
    hdr["tail_mass"] = f.tail_mass;
    hdr["layout"] = "psi[n^3] pi[n^3] row-major z-fastest";
    hdr["scalar"] = "f64";
    hdr["byte_order"] = "little-endian";
    std::ofstream os(stem.string() + ".json");
    os << hdr.dump(2) << '\n';
}

WaveField read_field_binary(const std::filesystem::path& stem) {
    std::ifstream hs(stem.string() + ".json");
    if (!hs) throw std::runtime_error("missing header " + stem.string() + ".json");
    json hdr = json::parse(hs);
    const int n = hdr.at("grid_n").get<int>();
    WaveField f(n, hdr.at("halfwidth").get<double>());
    f.time = hdr.value("time", 0.0);
    f.analytic_tail = hdr.value("analytic_tail", false);
    f.tail_mass = hdr.value("tail_mass", 0.0);
    const std::size_t sz = f.psi.size();
    const auto flat = read_doubles(stem.string() + ".bin", 2 * sz);
    std::copy(flat.begin(), flat.begin() + sz, f.psi.data());
    std::copy(flat.begin() + sz, flat.end(), f.pi.data());
    return f;
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& recs) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << "time,mass,Px,Py,Pz,Jx,Jy,Jz,energy,kinetic,coupling,field,"
          "psi_h1,pi_l2,max_speed,max_momentum,pPx,pPy,pPz,pJx,pJy,pJz\n";
    for (const auto& r : recs) {
        os << format_double(r.time) << ',' << format_double(r.mass) << ','
           << format_double(r.momentum.x) << ',' << format_double(r.momentum.y) << ','
           << format_double(r.momentum.z) << ',' << format_double(r.angular_momentum.x)
           << ',' << format_double(r.angular_momentum.y) << ','
           << format_double(r.angular_momentum.z) << ',' << format_double(r.energy) << ','
           << format_double(r.kinetic) << ',' << format_double(r.coupling) << ','
           << format_double(r.field) << ',' << format_double(r.psi_h1) << ','
           << format_double(r.pi_l2) << ',' << format_double(r.max_speed) << ','
           << format_double(r.max_momentum) << ','
           << format_double(r.particle_momentum.x) << ','
           << format_double(r.particle_momentum.y) << ','
           << format_double(r.particle_momentum.z) << ','
           << format_double(r.particle_angular_momentum.x) << ','
           << format_double(r.particle_angular_momentum.y) << ','
           << format_double(r.particle_angular_momentum.z) << '\n';
    }
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty diagnostics file");
    std::vector<DiagnosticsRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        DiagnosticsRecord r;
        double v[22];
        if (std::sscanf(line.c_str(),
                        "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,"
                        "%lf,%lf,%lf,%lf,%lf,%lf",
                        &v[0], &v[1], &v[2], &v[3], &v[4], &v[5], &v[6], &v[7], &v[8], &v[9],
                        &v[10], &v[11], &v[12], &v[13], &v[14], &v[15], &v[16], &v[17],
                        &v[18], &v[19], &v[20], &v[21]) != 22)
            throw std::runtime_error("malformed diagnostics row: " + line);
        r.time = v[0];
        r.mass = v[1];
        r.momentum = {v[2], v[3], v[4]};
        r.angular_momentum = {v[5], v[6], v[7]};
        r.energy = v[8];
        r.kinetic = v[9];
        r.coupling = v[10];
        r.field = v[11];
        r.psi_h1 = v[12];
        r.pi_l2 = v[13];
        r.max_speed = v[14];
        r.max_momentum = v[15];
        r.particle_momentum = {v[16], v[17], v[18]};
        r.particle_angular_momentum = {v[19], v[20], v[21]};
        out.push_back(r);
    }
    return out;
}

} // namespace wavekin
