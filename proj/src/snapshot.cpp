#include "ymh/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace ymh {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

constexpr char kMagic[4] = {'Y', 'M', 'H', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidArgument("snapshot: truncated input");
    return v;
}

}  // namespace

void write_snapshot(const PairState& pair, std::ostream& os) {
    validate(pair);
    const Grid& g = pair.grid();
    const int n = g.n();
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(n));
    for (int a = 0; a < n; ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim(a)));
    for (int a = 0; a < n; ++a) put<double>(os, g.length(a));
    for (int p = 0; p < g.plane_count(); ++p) {
        const Plane pl = g.plane(p);
        put<std::int32_t>(os, g.flux(pl.j, pl.k));
    }
    put<double>(os, pair.eps);
    for (const cplx& z : pair.u.values) {
        put<double>(os, z.real());
        put<double>(os, z.imag());
    }
    for (std::size_t x = 0; x < g.sites(); ++x)
        for (int j = 0; j < n; ++j) put<double>(os, pair.alpha.component(j)[x]);
    if (!os) throw Error("snapshot: write failed");
}

void write_snapshot(const PairState& pair, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("snapshot: cannot open " + path);
    write_snapshot(pair, os);
}

PairState read_snapshot(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InvalidArgument("snapshot: bad magic");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw InvalidArgument("snapshot: unknown version " + std::to_string(version));
    const int n = get<std::uint8_t>(is);
    if (n != 2 && n != 3) throw InvalidArgument("snapshot: dimension " + std::to_string(n));
    std::vector<int> dims(n);
    std::vector<double> lengths(n), flux(n == 2 ? 1 : 3);
    for (int& v : dims) v = static_cast<int>(get<std::uint32_t>(is));
    for (double& v : lengths) v = get<double>(is);
    for (double& v : flux) v = get<std::int32_t>(is);
    const double eps = get<double>(is);
    PairState p = make_pair(make_grid(n, dims, lengths, flux), eps);
    for (cplx& z : p.u.values) {
        const double re = get<double>(is);
        z = {re, get<double>(is)};
    }
    for (std::size_t x = 0; x < p.grid().sites(); ++x)
        for (int j = 0; j < n; ++j) p.alpha.component(j)[x] = get<double>(is);
    return p;
}

PairState read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("snapshot: cannot open " + path);
    return read_snapshot(is);
}

}  // namespace ymh
