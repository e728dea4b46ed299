#include "thinfb/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thinfb/errors.hpp"

namespace thinfb {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

const char kMagic[8] = {'T', 'H', 'I', 'N', 'F', 'B', '1', '\n'};

template <class T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

template <class T>
T take(std::istream& in, const std::string& path) {
    T v;
    char raw[sizeof(T)];
    if (!in.read(raw, sizeof(T))) throw ConfigError("snapshot " + path + ": truncated header");
    std::memcpy(&v, raw, sizeof(T));
    return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

void write_file_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw ConfigError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_snapshot(const std::string& path, const ScalarField& U) {
    const HalfGrid& g = U.grid();
    std::string buf(kMagic, sizeof kMagic);
    put<std::int64_t>(buf, g.n);
    put<std::int64_t>(buf, g.nx);
    put<std::int64_t>(buf, g.ny);
    put<std::int64_t>(buf, g.nt);
    for (double v : {U.weight().a(), g.hx(), g.hy(), g.ht(), g.Rx, g.Ry, g.T}) put<double>(buf, v);
    const auto& vals = U.values();
    const std::size_t off = buf.size();
    buf.resize(off + vals.size() * sizeof(double));
    std::memcpy(buf.data() + off, vals.data(), vals.size() * sizeof(double));
    write_file_atomic(path, buf);
}

ScalarField read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open snapshot " + path);
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError(path + " is not a THINFB1 snapshot");
    HalfGrid g;
    g.n = static_cast<int>(take<std::int64_t>(in, path));
    g.nx = static_cast<int>(take<std::int64_t>(in, path));
    g.ny = static_cast<int>(take<std::int64_t>(in, path));
    g.nt = static_cast<int>(take<std::int64_t>(in, path));
    const double a = take<double>(in, path);
    const double hx = take<double>(in, path), hy = take<double>(in, path), ht = take<double>(in, path);
    g.Rx = take<double>(in, path);
    g.Ry = take<double>(in, path);
    g.T = take<double>(in, path);
    try {
        g.validate();
    } catch (const DomainError& e) {
        throw ConfigError("snapshot " + path + ": " + e.what());
    }
    if (!close(hx, g.hx()) || !close(hy, g.hy()) || !close(ht, g.ht()))
        throw ConfigError("snapshot " + path + ": spacings disagree with extents");
    ScalarField U(g, WeightParam(a));
    auto& vals = U.values();
    if (!in.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double))))
        throw ConfigError("snapshot " + path + ": truncated values");
    if (in.peek() != std::char_traits<char>::eof()) throw ConfigError("snapshot " + path + ": trailing bytes");
    return U;
}

}  // namespace thinfb
